"""Closure machinery: front geometry, flux-conserving amplitude transport,
and the dimensionless wave potential with its transverse gradient.

The coupling term is g = (d2R/dx2) / (p_z^2 R), estimated by fitting a
Lagrange polynomial of degree (stencil - 1) through the stencil centered
on each ray (shifted one-sided at the edges) and differentiating it
analytically at the ray's abscissa.  The same stencil weights serve both
the second derivative of R and the first derivative of g, so one weight
build per front covers both.

Amplitude transport uses flux conservation along ray tubes: R^2 times the
tube width is constant per ray.  The tube width assigned to a ray is the
mean of its two adjacent gaps (one-sided at the edges).  Pairing each ray
with a single side's gap instead, as the raw adjacent-distance rule would
suggest, half-cell-shifts the amplitude response and makes every
transverse mode of the coupled system linearly unstable; the centered
width restores a neutral spectrum (see notes in dynamics module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CausticError
from .model import BeamFront, ScenarioConfig

__all__ = [
    "FrontGeometry",
    "adjacent_distances",
    "tube_widths",
    "transport_amplitudes",
    "StencilOperator",
    "estimate_g",
    "estimate_dg_dx",
    "attach_coupling",
]


@dataclass(frozen=True)
class FrontGeometry:
    """Adjacent-ray gaps and derived per-ray quantities for one front.

    ``d[j]`` is the Euclidean distance between rays j and j+1 (length
    n-1), ``s`` the cumulative arc abscissa along the front (s[0] = 0),
    ``width`` the per-ray flux-tube width (centered mean of the two
    adjacent gaps, one-sided at the edges).
    """

    d: np.ndarray
    s: np.ndarray
    width: np.ndarray


def adjacent_distances(front: BeamFront, min_separation: float = 1e-9) -> FrontGeometry:
    """Gaps between adjacent rays, with caustic detection.

    Raises CausticError if any gap falls below ``min_separation`` or the
    transverse ordering is violated (rays crossed).
    """
    if front.n_rays < 2:
        raise ValueError("a front needs at least 2 rays")
    dx = np.diff(front.x)
    dz = np.diff(front.z)
    d = np.hypot(dx, dz)
    bad = np.where((d < min_separation) | (dx <= 0))[0]
    if len(bad):
        j = int(bad[0])
        raise CausticError(j, front.t, float(d[j]))
    s = np.concatenate(([0.0], np.cumsum(d)))
    return FrontGeometry(d=d, s=s, width=tube_widths(d))


def tube_widths(d: np.ndarray) -> np.ndarray:
    """Per-ray flux-tube width from the n-1 adjacent gaps."""
    n = len(d) + 1
    w = np.empty(n)
    w[1:-1] = 0.5 * (d[:-1] + d[1:])
    w[0] = d[0]
    w[-1] = d[-1]
    return w


def transport_amplitudes(prev_amp, prev_width, next_width):
    """Carry amplitudes across one step: R -> R sqrt(w_prev / w_next).

    Preserves R^2 w exactly per ray.  The propagation loop uses the
    equivalent closed form R = const / sqrt(w) with constants frozen at
    launch, which keeps the invariant exact against the launch value
    rather than the previous step.
    """
    return np.asarray(prev_amp) * np.sqrt(np.asarray(prev_width) / np.asarray(next_width))


class StencilOperator:
    """Reusable Lagrange derivative weights on a sliding stencil.

    Stencil index windows are fixed by ray count and width (interior
    windows centered, edge windows shifted one-sided); the weights are
    rebuilt from the current abscissae on every call.  Weight formulas
    are the analytic derivatives of the Lagrange basis at the center
    node, so any polynomial of degree < stencil is differentiated
    exactly.
    """

    def __init__(self, n_rays: int, stencil: int, min_separation: float = 1e-9):
        if stencil % 2 == 0 or stencil < 3:
            raise ValueError("stencil must be odd and >= 3")
        if n_rays < stencil:
            raise ValueError("n_rays must be >= stencil")
        half = stencil // 2
        centers = np.arange(n_rays)
        start = np.clip(centers - half, 0, n_rays - stencil)
        self.idx = start[:, None] + np.arange(stencil)[None, :]
        self.cpos = centers - start
        self.rows = np.arange(n_rays)
        self.n = n_rays
        self.s = stencil
        self.min_separation = min_separation
        self._xs = np.empty((n_rays, stencil))
        self._fs = np.empty((n_rays, stencil))
        self._D = np.empty((n_rays, stencil, stencil))
        self._P = np.empty((n_rays, stencil))
        self._Dc = np.empty((n_rays, stencil))
        self._Rc = np.empty((n_rays, stencil))

    def derivative_weights(self, x):
        """First- and second-derivative weights at each stencil center."""
        n, s = self.n, self.s
        dx = np.diff(x)
        if np.any(np.abs(dx) < self.min_separation):
            j = int(np.argmax(np.abs(dx) < self.min_separation))
            raise CausticError(j, float("nan"), float(abs(dx[j])))
        xs = self._xs
        np.take(x, self.idx, out=xs)
        D = self._D
        np.subtract(xs[:, :, None], xs[:, None, :], out=D)   # D[j,i,m] = x_i - x_m
        D.reshape(n, s * s)[:, :: s + 1] = 1.0               # diagonal -> 1
        P = self._P                                          # prod_{m != i} (x_i - x_m)
        np.multiply(D[:, :, 0], D[:, :, 1], out=P)
        for m in range(2, s):
            np.multiply(P, D[:, :, m], out=P)
        Dc = self._Dc                                        # x_c - x_m
        np.subtract(x[:, None], xs, out=Dc)
        Dc[self.rows, self.cpos] = 1.0
        Rc = self._Rc
        np.divide(1.0, Dc, out=Rc)
        Rc[self.rows, self.cpos] = 0.0
        S1 = Rc.sum(axis=1)
        S2 = np.einsum("ns,ns->n", Rc, Rc)
        Pc = P[self.rows, self.cpos]
        w1 = Pc[:, None] / (Dc * P)
        w2 = 2.0 * w1 * (S1[:, None] - Rc)
        w1[self.rows, self.cpos] = S1
        w2[self.rows, self.cpos] = S1 * S1 - S2
        return w1, w2

    def apply(self, weights, values):
        np.take(values, self.idx, out=self._fs)
        return np.einsum("ns,ns->n", weights, self._fs)


def _operator_for(front: BeamFront, config: ScenarioConfig) -> StencilOperator:
    return StencilOperator(front.n_rays, config.stencil, config.min_separation)


def estimate_g(front: BeamFront, config: ScenarioConfig, op: StencilOperator = None):
    """Per-ray dimensionless wave potential g = R''(x) / (p_z^2 R)."""
    op = op or _operator_for(front, config)
    _, w2 = op.derivative_weights(front.x)
    rpp = op.apply(w2, front.amp)
    den = front.amp * front.p_z ** 2 if config.pz_correction else front.amp
    return rpp / den


def estimate_dg_dx(front: BeamFront, g, config: ScenarioConfig, op: StencilOperator = None):
    """Transverse derivative of g with the same stencil machinery."""
    op = op or _operator_for(front, config)
    w1, _ = op.derivative_weights(front.x)
    return op.apply(w1, np.asarray(g))


def attach_coupling(front: BeamFront, config: ScenarioConfig,
                    op: StencilOperator = None) -> BeamFront:
    """Return the front with g and dg_dx caches populated (one weight build)."""
    op = op or _operator_for(front, config)
    w1, w2 = op.derivative_weights(front.x)
    rpp = op.apply(w2, front.amp)
    den = front.amp * front.p_z ** 2 if config.pz_correction else front.amp
    g = rpp / den
    dg = op.apply(w1, g)
    return front.with_coupling(g, dg)
