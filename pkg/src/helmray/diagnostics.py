"""Closed-form references and physical diagnostics.

The analytic waist trajectory sqrt(1 + (eps z / pi)^2) describes the rays
launched from x = +-1 of a unit Gaussian beam; its asymptotic slope
eps/pi anchors both the far-field test and the position-momentum
uncertainty product, which tends to 8 (in hbar units) for a beam whose
launch window is read as a slit of half-width w0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FarFieldError
from .model import BeamFront

__all__ = [
    "waist_trajectory",
    "UncertaintyReport",
    "uncertainty_product",
    "intensity_profile",
    "ExtremaSet",
    "fringe_extrema",
]


def waist_trajectory(epsilon: float, z):
    """Analytic |x|(z) of the rays launched at x = +-1: sqrt(1 + (eps z/pi)^2)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    z = np.asarray(z, dtype=float)
    out = np.sqrt(1.0 + (epsilon * z / np.pi) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class UncertaintyReport:
    """Position-momentum uncertainty reconstruction from a run.

    ``product_hbar`` is dx * dp_x in units of hbar, with dx = 2 (the
    launch slit width in w0 units) and dp_x = 2 max|p_x| over the two
    waist rays at final time.  ``beam_max_p_x`` reports the whole-beam
    momentum extreme for context.  ``slope_ratio`` is the waist-ray
    slope over its asymptote eps/pi (1 means fully far-field).
    """

    product_hbar: float
    waist_p_x: float
    beam_max_p_x: float
    slope_ratio: float
    far_field: bool


def uncertainty_product(record, far_field_tol: float = 0.05) -> UncertaintyReport:
    """Uncertainty product of a Gaussian-type run, in hbar units.

    Raises FarFieldError if the waist-ray slope is not within
    ``far_field_tol`` of its asymptote, unless coupling was disabled (no
    diffraction: the product is 0 and the far field never arrives).
    """
    eps = record.config.epsilon
    j_plus = record.nearest_launch_index(1.0)
    j_minus = record.nearest_launch_index(-1.0)
    px_waist = max(abs(record.p_x[-1, j_plus]), abs(record.p_x[-1, j_minus]))
    slope = max(abs(record.p_x[-1, j_plus] / record.p_z[-1, j_plus]),
                abs(record.p_x[-1, j_minus] / record.p_z[-1, j_minus]))
    asym = eps / np.pi
    ratio = slope / asym
    far = abs(ratio - 1.0) <= far_field_tol
    if not record.config.coupling_enabled:
        return UncertaintyReport(0.0, float(px_waist), float(np.abs(record.p_x[-1]).max()),
                                 float(ratio), far)
    if not far:
        raise FarFieldError(
            f"waist slope is {ratio:.4f} of its asymptote; need within {far_field_tol:.0%}"
            f" (grow z_end)")
    dp = 2.0 * px_waist
    product = 2.0 * dp / (eps / (2.0 * np.pi))   # dx = 2, hbar = eps/2pi
    return UncertaintyReport(float(product), float(px_waist),
                             float(np.abs(record.p_x[-1]).max()), float(ratio), far)


def intensity_profile(front: BeamFront):
    """Per-ray transverse intensity (x_j, R_j^2), normalized to unit peak."""
    intensity = front.amp ** 2
    return front.x.copy(), intensity / intensity.max()


@dataclass(frozen=True)
class ExtremaSet:
    """Refined extrema of a sampled curve, each ordered by position."""

    maxima: np.ndarray
    minima: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return np.sort(np.concatenate([self.maxima, self.minima]))


def _quadratic_refine(x, y, i):
    a, b, c = y[i - 1], y[i], y[i + 1]
    den = a - 2.0 * b + c
    if den == 0.0:
        return x[i]
    # vertex of the parabola through the three samples
    return x[i] + 0.25 * (a - c) / den * (x[i + 1] - x[i - 1])


def fringe_extrema(x, y, floor: float = 0.0) -> ExtremaSet:
    """Positions of local maxima/minima of a profile curve.

    Maxima below ``floor`` (same units as y) are ignored; minima are kept
    only between two retained maxima, which confines them to the fringe
    system rather than the noise tail.  Discrete extrema are refined by
    the vertex of the parabola through the three neighboring samples.
    Raises ValueError for a flat curve (no extrema).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 5:
        raise ValueError("need at least 5 samples")
    interior = slice(1, -1)
    is_max = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    is_min = (y[1:-1] < y[:-2]) & (y[1:-1] < y[2:])
    imax = np.where(is_max)[0] + 1
    imin = np.where(is_min)[0] + 1
    imax = imax[y[imax] > floor]
    if len(imax) > 1:
        imin = imin[(imin > imax.min()) & (imin < imax.max())]
    else:
        imin = imin[:0]
    if len(imax) == 0 and len(imin) == 0:
        raise ValueError("flat curve: no extrema found")
    maxima = np.array([_quadratic_refine(x, y, i) for i in imax])
    minima = np.array([_quadratic_refine(x, y, i) for i in imin])
    return ExtremaSet(maxima=maxima, minima=minima)
