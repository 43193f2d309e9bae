"""Grid-based one-way beam propagation: the independent reference solver.

The launch amplitude is lifted onto a uniform grid with flat phase and
advanced in z by multiplying each transverse spectral component k_x with
exp(i dz (sqrt(k0^2 - k_x^2) - k0)), the exact one-way dispersion
relation in the comoving (carrier-referenced) phase convention, with
k0 = 2 pi / epsilon in the shared dimensionless units.  Evanescent
components (|k_x| > k0) are damped to zero; launch spectra at the
epsilons of interest contain none.

This path shares no derivative or transport machinery with the ray
engine, which is the point: it is the measuring stick the coupled-ray
results are held against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import OverlapError
from .model import ScenarioConfig
from .profiles import LaunchProfile, eval_profile
from .diagnostics import ExtremaSet, fringe_extrema

__all__ = [
    "ComplexField",
    "lift_profile",
    "propagate",
    "grid_for_scenario",
    "ComparisonReport",
    "compare",
]


@dataclass(frozen=True)
class ComplexField:
    """Complex transverse field u(x) at one plane z, on a uniform grid."""

    x: np.ndarray
    u: np.ndarray
    z: float
    epsilon: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        u = np.asarray(self.u, dtype=complex)
        if len(x) != len(u):
            raise ValueError("grid/field length mismatch")
        if len(x) & (len(x) - 1):
            raise ValueError("node count must be a power of two")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.u) ** 2

    @property
    def power(self) -> float:
        return float(np.sum(self.intensity) * self.dx)


def lift_profile(profile: LaunchProfile, epsilon: float, half_span: float,
                 n_nodes: int = 2 ** 16) -> ComplexField:
    """Launch field u(x, 0) = R(x) with zero phase on [-half_span, half_span).

    The grid must be wide enough that the boundary amplitude is at most
    1e-8 of the peak, else spectral wrap-around would contaminate the
    propagated field.
    """
    if n_nodes & (n_nodes - 1):
        raise ValueError("n_nodes must be a power of two")
    x = (np.arange(n_nodes) - n_nodes // 2) * (2.0 * half_span / n_nodes)
    r = np.asarray(eval_profile(profile, x), dtype=float)
    peak = r.max()
    edge = max(r[0], r[-1])
    if edge > 1e-8 * peak:
        raise ValueError(
            f"grid too narrow: boundary amplitude {edge / peak:.2e} of peak (need <= 1e-8)")
    return ComplexField(x=x, u=r.astype(complex), z=0.0, epsilon=epsilon)


def propagate(field: ComplexField, delta_z: float) -> ComplexField:
    """Advance the field by delta_z >= 0 in free space."""
    if delta_z < 0:
        raise ValueError("delta_z must be >= 0")
    if delta_z == 0.0:
        return ComplexField(x=field.x, u=field.u.copy(), z=field.z, epsilon=field.epsilon)
    k0 = 2.0 * np.pi / field.epsilon
    kx = 2.0 * np.pi * np.fft.fftfreq(len(field.x), d=field.dx)
    propagating = np.abs(kx) <= k0
    kz = np.sqrt(np.maximum(k0 ** 2 - kx ** 2, 0.0))
    multiplier = np.where(propagating, np.exp(1j * delta_z * (kz - k0)), 0.0)
    u = np.fft.ifft(np.fft.fft(field.u) * multiplier)
    return ComplexField(x=field.x, u=u, z=field.z + delta_z, epsilon=field.epsilon)


def grid_for_scenario(config: ScenarioConfig, z: float,
                      n_nodes: int = 2 ** 16) -> float:
    """Half-span wide enough for the spread beam at plane z (with margin).

    The launch spectrum of a Gaussian-superposition profile is
    significant out to transverse wavenumbers of roughly 6 q, which map
    to ray slopes 6 q eps / 2 pi; four times that excursion plus the
    launch window keeps wrap-around negligible.
    """
    from .profiles import CenteredGaussianSum, MirroredGaussianComb
    prof = config.profile
    q = getattr(prof, "q", 1.0) if isinstance(
        prof, (CenteredGaussianSum, MirroredGaussianComb)) else 1.0
    spread = 6.0 * q * config.epsilon / (2.0 * np.pi) * z
    half_span = 4.0 * (max(abs(config.x_min), abs(config.x_max)) + spread)
    return half_span


@dataclass(frozen=True)
class ComparisonReport:
    """Ray profile vs reference field at one plane, on a common grid."""

    l2_error: float
    common_x: np.ndarray
    ray_intensity: np.ndarray
    reference_intensity: np.ndarray
    max_offsets: np.ndarray        # |x_ray - x_ref| per paired maximum
    min_offsets: np.ndarray
    ray_extrema: Optional[ExtremaSet]
    reference_extrema: Optional[ExtremaSet]

    @property
    def maxima_count_matches(self) -> bool:
        if self.ray_extrema is None or self.reference_extrema is None:
            return False
        return len(self.ray_extrema.maxima) == len(self.reference_extrema.maxima)


def compare(ray_x, ray_intensity, field: ComplexField,
            support_floor: float = 1e-6, min_overlap: float = 0.8,
            extrema_floor: float = 1e-4) -> ComparisonReport:
    """Resample both profiles to a common grid and measure the mismatch.

    The common grid is the ray abscissae restricted to the reference
    support (intensity >= support_floor of peak); both curves are
    normalized to unit peak, the reference is interpolated with a
    monotone cubic.  Raises OverlapError when the rays cover less than
    ``min_overlap`` of the reference support.
    """
    ray_x = np.asarray(ray_x, dtype=float)
    ray_i = np.asarray(ray_intensity, dtype=float)
    ray_i = ray_i / ray_i.max()
    ref_i = field.intensity
    ref_i = ref_i / ref_i.max()

    above = np.where(ref_i >= support_floor)[0]
    lo, hi = field.x[above[0]], field.x[above[-1]]
    covered = (min(hi, ray_x.max()) - max(lo, ray_x.min())) / (hi - lo)
    if covered < min_overlap:
        raise OverlapError(
            f"rays cover {covered:.0%} of the reference support (need >= {min_overlap:.0%})")

    sel = (ray_x >= lo) & (ray_x <= hi)
    common_x = ray_x[sel]
    ray_c = ray_i[sel]
    ref_c = PchipInterpolator(field.x, ref_i)(common_x)
    l2 = float(np.linalg.norm(ray_c - ref_c) / np.linalg.norm(ref_c))

    try:
        ray_ext = fringe_extrema(common_x, ray_c, floor=extrema_floor)
        ref_ext = fringe_extrema(common_x, ref_c, floor=extrema_floor)
    except ValueError:
        ray_ext = ref_ext = None
        max_off = min_off = np.array([])
    else:
        max_off = _paired_offsets(ray_ext.maxima, ref_ext.maxima)
        min_off = _paired_offsets(ray_ext.minima, ref_ext.minima)
    return ComparisonReport(
        l2_error=l2, common_x=common_x, ray_intensity=ray_c,
        reference_intensity=ref_c, max_offsets=max_off, min_offsets=min_off,
        ray_extrema=ray_ext, reference_extrema=ref_ext,
    )


def _paired_offsets(a, b):
    k = min(len(a), len(b))
    if k == 0:
        return np.array([])
    return np.abs(np.sort(a)[:k] - np.sort(b)[:k])
