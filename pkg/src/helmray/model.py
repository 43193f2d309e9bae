"""Domain types: rays, fronts, media, scenario configuration, unit bridge.

All core quantities are dimensionless: transverse and longitudinal
positions in units of the reference width w0, momenta in units of the
launch momentum (|p| = 1 in free space), time in units of w0 over the
launch speed.  The single physical parameter of a free-space scenario is
``epsilon``, the ratio of wavelength to w0.  ``UnitSystem`` converts
between this dimensionless world and laboratory quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .errors import ValidationError

__all__ = [
    "RayState",
    "BeamFront",
    "Medium",
    "ScenarioConfig",
    "UnitSystem",
    "validate",
    "ensure_valid",
    "units_from_physical",
]


@dataclass(frozen=True)
class RayState:
    """One ray's dimensionless phase-space point plus carried amplitude.

    Attributes
    ----------
    x, z : float
        Transverse / longitudinal position (units of w0).
    p_x, p_z : float
        Momentum components; p_x**2 + p_z**2 == 1 in free space.
    amp : float
        Wave amplitude carried by the ray (arbitrary normalization).
    """

    x: float
    z: float
    p_x: float
    p_z: float
    amp: float


def _readonly(a):
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BeamFront:
    """Snapshot of all rays at a common time.

    Rays are ordered strictly increasing in x at launch, and that ordering
    must be preserved during propagation (a violated ordering is a
    detected caustic).  ``g`` and ``dg_dx`` cache the dimensionless wave
    potential (amplitude curvature ratio) and its transverse derivative;
    they are populated by the transport module.
    """

    t: float
    x: np.ndarray
    z: np.ndarray
    p_x: np.ndarray
    p_z: np.ndarray
    amp: np.ndarray
    g: Optional[np.ndarray] = None
    dg_dx: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("x", "z", "p_x", "p_z", "amp", "g", "dg_dx"):
            a = getattr(self, name)
            if a is None:
                continue
            object.__setattr__(self, name, _readonly(a))
            if len(getattr(self, name)) != len(self.x):
                raise ValueError(f"field {name} length mismatch")

    @property
    def n_rays(self) -> int:
        return len(self.x)

    def ray(self, j: int) -> RayState:
        return RayState(
            x=float(self.x[j]), z=float(self.z[j]),
            p_x=float(self.p_x[j]), p_z=float(self.p_z[j]),
            amp=float(self.amp[j]),
        )

    def with_coupling(self, g, dg_dx) -> "BeamFront":
        return replace(self, g=g, dg_dx=dg_dx)


@dataclass(frozen=True)
class Medium:
    """External field descriptor.

    ``kind`` is one of ``vacuum``, ``refractive-index`` (value is the
    squared refractive index n^2(x, z)) or ``potential`` (value is the
    potential-to-energy ratio V(x, z)/E).  The two non-vacuum variants are
    interchangeable through n^2 = 1 - V/E, so the force only ever needs
    the gradient of n^2; ``squared_index_gradient`` hides the sign
    difference.  ``grad`` must return the pair (d/dx, d/dz) of the value
    callable; both callables must accept numpy arrays.
    """

    kind: str = "vacuum"
    value: Optional[Callable] = None
    grad: Optional[Callable] = None
    expression: Optional[str] = None

    @staticmethod
    def vacuum() -> "Medium":
        return Medium(kind="vacuum")

    @staticmethod
    def refractive_index(value, grad, expression=None) -> "Medium":
        return Medium(kind="refractive-index", value=value, grad=grad,
                      expression=expression)

    @staticmethod
    def external_potential(value, grad, expression=None) -> "Medium":
        return Medium(kind="potential", value=value, grad=grad,
                      expression=expression)

    @staticmethod
    def from_expression(kind: str, expression: str) -> "Medium":
        """Build a medium from an analytic expression in x and z.

        The expression is differentiated symbolically, so gradients are
        exact.  Example: ``Medium.from_expression("potential", "x**2")``.
        """
        import sympy

        xs, zs = sympy.symbols("x z")
        try:
            expr = sympy.sympify(expression)
        except sympy.SympifyError as exc:
            raise ValidationError([f"medium expression not parseable: {exc}"])
        bad = expr.free_symbols - {xs, zs}
        if bad:
            raise ValidationError(
                [f"medium expression may only use x and z, got {sorted(map(str, bad))}"])
        f = sympy.lambdify((xs, zs), expr, "numpy")
        fx = sympy.lambdify((xs, zs), sympy.diff(expr, xs), "numpy")
        fz = sympy.lambdify((xs, zs), sympy.diff(expr, zs), "numpy")

        def value(x, z):
            return np.broadcast_to(np.asarray(f(x, z), dtype=float), np.shape(x)).copy()

        def grad(x, z):
            gx = np.broadcast_to(np.asarray(fx(x, z), dtype=float), np.shape(x)).copy()
            gz = np.broadcast_to(np.asarray(fz(x, z), dtype=float), np.shape(x)).copy()
            return gx, gz

        if kind not in ("refractive-index", "potential"):
            raise ValidationError([f"unknown medium kind {kind!r}"])
        return Medium(kind=kind, value=value, grad=grad, expression=expression)

    @property
    def is_vacuum(self) -> bool:
        return self.kind == "vacuum"

    def squared_index_gradient(self, x, z):
        """Gradient of n^2 at (x, z), regardless of how the medium is given."""
        if self.is_vacuum:
            zero = np.zeros_like(np.asarray(x, dtype=float))
            return zero, zero.copy()
        gx, gz = self.grad(x, z)
        if self.kind == "potential":
            return -gx, -gz          # n^2 = 1 - V/E
        return gx, gz


# profile types live in profiles.py; the union is re-exported there.


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that determines a run.

    ``dt`` is the time step in fixed mode and the step cap in auto mode
    (None picks the legacy default z_end / 1e4).  In auto mode the step
    follows a stability bound proportional to the squared minimum ray
    spacing over epsilon, scaled by ``cfl``.

    ``filter_strength`` scales the grid-scale momentum smoothing that
    suppresses a discretization instability of the coupled system; 0
    disables it (see dynamics module notes).  ``boundary_margin`` is the
    number of edge rays that receive an extrapolated force instead of the
    one-sided-stencil force (None picks the stencil width).
    """

    epsilon: float
    n_rays: int
    x_min: float
    x_max: float
    z_end: float
    profile: "LaunchProfile"
    medium: Medium = field(default_factory=Medium.vacuum)
    dt: Optional[float] = None
    dt_policy: str = "auto"
    cfl: float = 4.0
    stencil: int = 5
    coupling_enabled: bool = True
    min_separation: float = 1e-9
    amp_floor: float = 1e-12
    pz_correction: bool = True
    filter_strength: float = 32.0
    boundary_margin: Optional[int] = None
    step_limit: int = 10_000_000
    record_stride: int = 100

    @property
    def dt_cap(self) -> float:
        return self.dt if self.dt is not None else self.z_end / 1e4

    @property
    def margin(self) -> int:
        m = self.boundary_margin if self.boundary_margin is not None else self.stencil
        return min(m, (self.n_rays - 1) // 2)


def validate(config: ScenarioConfig) -> list:
    """Check every invariant; return the list of violations (empty if valid)."""
    from .profiles import profile_violations   # cycle-free at call time

    v = []
    if not config.epsilon > 0:
        v.append("epsilon must be > 0")
    if config.n_rays < config.stencil:
        v.append(f"n_rays must be >= stencil ({config.n_rays} < {config.stencil})")
    if config.stencil < 3:
        v.append("stencil must be >= 3")
    if config.stencil % 2 == 0:
        v.append("stencil must be odd")
    if not config.x_min < config.x_max:
        v.append("x_min must be < x_max")
    if not config.z_end > 0:
        v.append("z_end must be > 0")
    if config.dt is not None and not config.dt > 0:
        v.append("dt must be > 0")
    if config.dt_policy not in ("auto", "fixed"):
        v.append(f"dt_policy must be 'auto' or 'fixed', got {config.dt_policy!r}")
    if config.dt_policy == "fixed" and config.dt is None:
        v.append("fixed dt_policy requires an explicit dt")
    if not config.cfl > 0:
        v.append("cfl must be > 0")
    if not config.min_separation > 0:
        v.append("min_separation must be > 0")
    if not 0 <= config.amp_floor < 1:
        v.append("amp_floor must be in [0, 1) (relative to peak amplitude)")
    if config.filter_strength < 0:
        v.append("filter_strength must be >= 0")
    if config.boundary_margin is not None and config.boundary_margin < 0:
        v.append("boundary_margin must be >= 0")
    if config.step_limit < 1:
        v.append("step_limit must be >= 1")
    if config.record_stride < 1:
        v.append("record_stride must be >= 1")
    if config.medium.kind not in ("vacuum", "refractive-index", "potential"):
        v.append(f"unknown medium kind {config.medium.kind!r}")
    elif not config.medium.is_vacuum and (config.medium.value is None or config.medium.grad is None):
        v.append("non-vacuum medium needs value and grad callables")
    v.extend(profile_violations(config.profile))
    return v


def ensure_valid(config: ScenarioConfig) -> ScenarioConfig:
    violations = validate(config)
    if violations:
        raise ValidationError(violations)
    return config


# CODATA values, SI.
_HBAR = 1.054571817e-34
_C = 299792458.0


@dataclass(frozen=True)
class UnitSystem:
    """Bridge between dimensionless results and laboratory quantities.

    ``lambda0`` and ``w0`` share any single length unit as long as it is
    the same for both; the derived momenta/energies assume SI (meters,
    kilograms).  ``mass`` is only needed for matter-wave conversions.
    """

    lambda0: float
    w0: float
    mass: Optional[float] = None

    @property
    def epsilon(self) -> float:
        return self.lambda0 / self.w0

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.lambda0

    @property
    def omega(self) -> float:
        """Angular frequency of the light-wave interpretation."""
        return _C * self.k0

    @property
    def p0(self) -> float:
        """Launch momentum of the matter-wave interpretation, hbar * k0."""
        return 2.0 * math.pi * _HBAR / self.lambda0

    @property
    def v0(self) -> float:
        self._need_mass()
        return self.p0 / self.mass

    @property
    def energy(self) -> float:
        self._need_mass()
        return self.p0 ** 2 / (2.0 * self.mass)

    def _need_mass(self):
        if self.mass is None:
            raise ValueError("a particle mass is required for matter-wave units")

    def wave_potential(self, g):
        """Dimensional wave potential (a frequency) from dimensionless g."""
        return -(_C / (2.0 * self.k0)) * np.asarray(g) / self.w0 ** 2

    def quantum_potential(self, g):
        """Dimensional quantum potential (an energy) from dimensionless g."""
        self._need_mass()
        return -(_HBAR ** 2 / (2.0 * self.mass)) * np.asarray(g) / self.w0 ** 2

    def epsilon_matches(self, config: ScenarioConfig, rel_tol: float = 1e-9) -> bool:
        return abs(self.epsilon - config.epsilon) <= rel_tol * config.epsilon


def units_from_physical(lambda0: float, w0: float, mass: Optional[float] = None) -> UnitSystem:
    """Build a UnitSystem from physical wavelength and reference width."""
    if not lambda0 > 0 or not w0 > 0:
        raise ValidationError([
            f"lambda0 and w0 must be > 0 (got {lambda0}, {w0})",
        ])
    return UnitSystem(lambda0=lambda0, w0=w0, mass=mass)
