"""Time integration of the coupled ray system.

One step is a kick-drift-kick splitting with the coupling field frozen
per step: half-kick with the cached gradient, drift, amplitude transport
and coupling refresh on the drifted front, half-kick with the fresh
gradient.  In free space p_z is recomputed as sqrt(1 - p_x^2) after every
kick, so |p| = 1 holds to machine precision; with a medium both momentum
components integrate the full force and |p| may legitimately change.

Numerical guards, both documented deviations from the naive scheme (see
transport module for the flux-tube width):

* Boundary momentum extrapolation.  The one-sided derivative stencils at
  the outermost rays feed a small error back through transport;
  linearized analysis shows the closed loop has exponentially growing
  edge modes, and even with those removed the margin keeps a marginally
  damped breathing mode.  After each step the transverse momenta of the
  outermost ``margin`` rays per side are replaced by a linear
  extrapolation from the interior, which removes the edge dynamics
  altogether while leaving the reported g/dg_dx estimates untouched.
  For a self-similarly spreading beam p_x is linear in x, so the
  extrapolation is exact there; elsewhere it only touches rays whose
  amplitude is orders of magnitude below the beam.

* Grid-scale momentum smoothing.  On a sloped amplitude background the
  stencil symbol errors at high transverse wavenumber make short-wave
  ripple grow at a rate proportional to (epsilon / spacing) times the
  log-amplitude slope, both taken at the same location.  A
  double-biharmonic (eighth-order) filter on p_x, with rate
  nu = filter_strength * (eps/4pi) * pi * max_j(|dln amp_j| / d_j^2),
  damps that band; the max of the local product sizes the damping to the
  worst single location instead of pairing the globally smallest spacing
  with the globally steepest slope, which over-damps structured beams.
  The response falls as theta^8 so beam- and fringe-scale structure is
  untouched (damping ratios below 1e-8 at the scales the scenarios
  produce).  Strength scales with dt, so the time-step convergence order
  is preserved.  filter_strength = 0 disables it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CausticError, MomentumOverflowError
from .model import BeamFront, Medium, ScenarioConfig, ensure_valid
from .profiles import build_launch_front
from .transport import StencilOperator, tube_widths

__all__ = ["force", "step", "run", "Propagator", "TrajectoryRecord"]

TERMINATION_REACHED = "ReachedZEnd"
TERMINATION_CAUSTIC = "Caustic"
TERMINATION_STEP_LIMIT = "StepLimit"
TERMINATION_MOMENTUM = "MomentumOverflow"


def force(medium: Medium, dg_dx, epsilon: float, x, z, coupling_enabled: bool = True):
    """Transverse and longitudinal force: 0.5 * d/dr [n^2 + (eps/2pi)^2 g].

    With coupling disabled the g term is dropped (geometrical-optics
    limit).  The coupling gradient is transverse-only; it acts
    perpendicular to near-axial rays, and no longitudinal estimate of it
    is available from a single front.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    gx2, gz2 = medium.squared_index_gradient(x, z)
    fx = 0.5 * gx2
    fz = 0.5 * gz2
    if coupling_enabled and dg_dx is not None:
        fx = fx + (epsilon ** 2 / (8.0 * np.pi ** 2)) * np.asarray(dg_dx)
    return fx, fz


def _hyper4(p, out=None):
    """Fourth index-space difference, zero at the two edge rays per side."""
    if out is None:
        out = np.zeros_like(p)
    else:
        out[:2] = 0.0
        out[-2:] = 0.0
    out[2:-2] = p[:-4] - 4.0 * p[1:-3] + 6.0 * p[2:-2] - 4.0 * p[3:-1] + p[4:]
    return out


def _extrapolate_edges(f, k):
    """Replace the k outermost values per side by linear extrapolation."""
    if k <= 0:
        return f
    steps = np.arange(1, k + 1)
    f[k - 1::-1] = f[k] - steps * (f[k + 1] - f[k])
    f[-k:] = f[-k - 1] + steps * (f[-k - 1] - f[-k - 2])
    return f


@dataclass
class TrajectoryRecord:
    """Recorded run: per-ray series at decimated steps plus metadata.

    Arrays are (n_frames, n_rays); ``t`` is (n_frames,).  The first frame
    is the launch front and the last frame is always the final one.
    """

    config: ScenarioConfig
    t: np.ndarray
    step_index: np.ndarray
    x: np.ndarray
    z: np.ndarray
    p_x: np.ndarray
    p_z: np.ndarray
    amp: np.ndarray
    g: np.ndarray
    termination: str
    steps: int
    wall_time: float
    error: Optional[str] = None

    @property
    def n_frames(self) -> int:
        return len(self.t)

    @property
    def launch_x(self) -> np.ndarray:
        return self.x[0]

    def frame(self, i: int) -> BeamFront:
        return BeamFront(t=float(self.t[i]), x=self.x[i], z=self.z[i],
                         p_x=self.p_x[i], p_z=self.p_z[i], amp=self.amp[i],
                         g=self.g[i])

    def final_front(self) -> BeamFront:
        return self.frame(self.n_frames - 1)

    def nearest_launch_index(self, x0: float) -> int:
        return int(np.argmin(np.abs(self.launch_x - x0)))


class Propagator:
    """Owns one run: launch front, flux constants, stencil and guards."""

    def __init__(self, config: ScenarioConfig):
        ensure_valid(config)
        self.config = config
        self.medium = config.medium
        self.op = StencilOperator(config.n_rays, config.stencil, config.min_separation)
        self.coef_g = config.epsilon ** 2 / (8.0 * np.pi ** 2)
        self._fbuf = np.empty(config.n_rays)
        self._fbuf2 = np.empty(config.n_rays)

    # -- pieces ------------------------------------------------------------

    def _coupling(self, x, amp, pz):
        w1, w2 = self.op.derivative_weights(x)
        rpp = self.op.apply(w2, amp)
        den = amp * pz * pz if self.config.pz_correction else amp
        g = rpp / den
        dg = self.op.apply(w1, g)
        return g, dg

    def _force_x(self, x, z, dg):
        cfg = self.config
        if cfg.coupling_enabled:
            fx = self.coef_g * dg
            _extrapolate_edges(fx, cfg.margin)
        else:
            fx = np.zeros_like(x)
        if not self.medium.is_vacuum:
            gx2, _ = self.medium.squared_index_gradient(x, z)
            fx = fx + 0.5 * gx2
        return fx

    def _dt(self, d_min: float) -> float:
        cfg = self.config
        if cfg.dt_policy == "fixed":
            return cfg.dt
        return min(cfg.dt_cap, cfg.cfl * d_min * d_min / cfg.epsilon)

    def _filter_gamma(self, d, amp, dt: float) -> float:
        cfg = self.config
        if cfg.filter_strength <= 0 or not cfg.coupling_enabled:
            return 0.0
        local = float(np.max(np.abs(np.diff(np.log(amp))) / (d * d)))
        nu = cfg.filter_strength * (cfg.epsilon / 4.0) * local
        return nu * dt

    def _apply_filter(self, px, gamma: float):
        if gamma <= 0.0:
            return
        nsub = max(1, int(np.ceil(gamma / 0.8)))
        g_sub = gamma / nsub / 256.0
        for _ in range(nsub):
            _hyper4(_hyper4(px, self._fbuf), self._fbuf2)
            px -= g_sub * self._fbuf2

    # -- stepping ----------------------------------------------------------

    def launch(self) -> BeamFront:
        """Launch front with coupling caches populated."""
        front = build_launch_front(self.config)
        g, dg = self._coupling(front.x, front.amp, front.p_z)
        return front.with_coupling(g, dg)

    def step(self, front: BeamFront) -> BeamFront:
        """Advance one step; flux constants are taken from the given front.

        The input front must carry fresh g/dg_dx caches (as produced by
        launch() or a previous step()); the returned front does too.
        """
        cfg = self.config
        if front.dg_dx is None:
            raise ValueError("front has no coupling cache; call attach_coupling/launch first")
        x = front.x.copy()
        z = front.z.copy()
        px = front.p_x.copy()
        pz = front.p_z.copy()
        dg = front.dg_dx.copy()
        d = np.hypot(np.diff(x), np.diff(z))
        consts = front.amp * np.sqrt(tube_widths(d))
        state = [front.t, x, z, px, pz, front.amp.copy(), None, dg, d]
        t, x, z, px, pz, amp, g, dg, d = self._advance(state, consts)
        return BeamFront(t=t, x=x, z=z, p_x=px, p_z=pz, amp=amp, g=g, dg_dx=dg)

    def _advance(self, state, consts):
        """One kick-drift-kick step on raw arrays.  Mutates and returns state."""
        cfg = self.config
        t, x, z, px, pz, amp, g, dg, d = state
        vacuum = self.medium.is_vacuum
        d_min = float(d.min())
        if d_min < cfg.min_separation:
            raise CausticError(int(np.argmin(d)), t, d_min)
        dt = self._dt(d_min)
        gamma = self._filter_gamma(d, amp, dt)

        fx = self._force_x(x, z, dg)
        if vacuum:
            px += 0.5 * dt * fx
            bad = np.abs(px) >= 1.0
            if bad.any():
                j = int(np.argmax(np.abs(px)))
                raise MomentumOverflowError(j, t, px[j])
            pz = np.sqrt(1.0 - px * px)
        else:
            _, gz2 = self.medium.squared_index_gradient(x, z)
            px += 0.5 * dt * fx
            pz += 0.5 * dt * 0.5 * gz2
            if (pz <= 0.0).any():
                j = int(np.argmin(pz))
                raise MomentumOverflowError(j, t, px[j])
        x += dt * px
        z += dt * pz
        dx = np.diff(x)
        d = np.hypot(dx, np.diff(z))
        bad = (d < cfg.min_separation) | (dx <= 0)
        if bad.any():
            j = int(np.argmax(bad))
            raise CausticError(j, t + dt, float(d[j]))
        amp = consts / np.sqrt(tube_widths(d))
        g, dg = self._coupling(x, amp, pz)
        fx = self._force_x(x, z, dg)
        if vacuum:
            px += 0.5 * dt * fx
            self._apply_filter(px, gamma)
            if cfg.coupling_enabled:
                _extrapolate_edges(px, cfg.margin)
            bad = np.abs(px) >= 1.0
            if bad.any():
                j = int(np.argmax(np.abs(px)))
                raise MomentumOverflowError(j, t + dt, px[j])
            pz = np.sqrt(1.0 - px * px)
        else:
            _, gz2 = self.medium.squared_index_gradient(x, z)
            px += 0.5 * dt * fx
            pz += 0.5 * dt * 0.5 * gz2
            if (pz <= 0.0).any():
                j = int(np.argmin(pz))
                raise MomentumOverflowError(j, t + dt, px[j])
            self._apply_filter(px, gamma)
            if cfg.coupling_enabled:
                _extrapolate_edges(px, cfg.margin)
        return [t + dt, x, z, px, pz, amp, g, dg, d]

    # -- full run ----------------------------------------------------------

    def run(self) -> TrajectoryRecord:
        """Step until mean z reaches z_end, the step budget runs out, or a
        caustic/turnback aborts the run; record every record_stride-th
        front plus the final one."""
        cfg = self.config
        t0 = time.perf_counter()
        front = self.launch()
        x = front.x.copy()
        z = front.z.copy()
        px = front.p_x.copy()
        pz = front.p_z.copy()
        amp = front.amp.copy()
        g = front.g.copy()
        dg = front.dg_dx.copy()
        d = np.hypot(np.diff(x), np.diff(z))
        consts = amp * np.sqrt(tube_widths(d))
        state = [0.0, x, z, px, pz, amp, g, dg, d]

        frames = []

        def snap(k):
            frames.append((state[0], k, state[1].copy(), state[2].copy(),
                           state[3].copy(), state[4].copy(), state[5].copy(),
                           state[6].copy()))

        snap(0)
        k = 0
        termination = TERMINATION_STEP_LIMIT
        error = None
        try:
            while k < cfg.step_limit:
                if float(np.mean(state[2])) >= cfg.z_end:
                    termination = TERMINATION_REACHED
                    break
                state = self._advance(state, consts)
                k += 1
                if k % cfg.record_stride == 0:
                    snap(k)
        except CausticError as exc:
            termination = TERMINATION_CAUSTIC
            error = str(exc)
        except MomentumOverflowError as exc:
            termination = TERMINATION_MOMENTUM
            error = str(exc)
        if not frames or frames[-1][1] != k:
            snap(k)
        wall = time.perf_counter() - t0

        ts = np.array([f[0] for f in frames])
        ks = np.array([f[1] for f in frames], dtype=int)
        stack = [np.vstack([f[i] for f in frames]) for i in range(2, 8)]
        return TrajectoryRecord(
            config=cfg, t=ts, step_index=ks,
            x=stack[0], z=stack[1], p_x=stack[2], p_z=stack[3],
            amp=stack[4], g=stack[5],
            termination=termination, steps=k, wall_time=wall, error=error,
        )


def step(front: BeamFront, config: ScenarioConfig) -> BeamFront:
    """One integration step of a front under the given configuration."""
    return Propagator(config).step(front)


def run(config: ScenarioConfig) -> TrajectoryRecord:
    """Propagate the configured scenario; deterministic for a fixed config."""
    return Propagator(config).run()
