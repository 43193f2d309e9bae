"""Launch amplitude profiles and the initial beam front.

Two closed-form families cover everything in practice, both built from
superposed Gaussians so the amplitude is strictly positive and smooth:

* ``CenteredGaussianSum`` -- a central Gaussian of weight ``a`` plus ``m``
  symmetric satellite pairs of weight ``b`` at multiples of ``x_c``:

      R(x) = a exp(-q^2 x^2)
             + b sum_{N=1..m} [exp(-q^2 (x - N x_c)^2) + exp(-q^2 (x + N x_c)^2)]

* ``MirroredGaussianComb`` -- two mirrored combs of 2m+1 Gaussians each,
  spaced ``x_1`` and centered at +-``x_c``:

      R(x) = sum_{N=-m..m} [exp(-q^2 (x - x_c + N x_1)^2)
                            + exp(-q^2 (x + x_c + N x_1)^2)]

``SampledProfile`` interpolates a user-supplied table with a monotone
piecewise cubic (no overshoot below the data, so positivity survives).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ValidationError
from .model import BeamFront, ScenarioConfig, ensure_valid

__all__ = [
    "CenteredGaussianSum",
    "MirroredGaussianComb",
    "SampledProfile",
    "LaunchProfile",
    "eval_profile",
    "profile_violations",
    "build_launch_front",
]


@dataclass(frozen=True)
class CenteredGaussianSum:
    a: float
    b: float = 0.0
    q: float = 1.0
    m: int = 0
    x_c: float = 0.0


@dataclass(frozen=True)
class MirroredGaussianComb:
    q: float
    m: int
    x_c: float
    x_1: float


@dataclass(frozen=True)
class SampledProfile:
    x: tuple
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))


LaunchProfile = Union[CenteredGaussianSum, MirroredGaussianComb, SampledProfile]


def profile_violations(profile: LaunchProfile) -> list:
    v = []
    if isinstance(profile, (CenteredGaussianSum, MirroredGaussianComb)):
        if not profile.q > 0:
            v.append("profile q must be > 0")
        if profile.m < 0:
            v.append("profile m must be >= 0")
        if isinstance(profile, CenteredGaussianSum):
            if profile.a < 0 or profile.b < 0:
                v.append("profile weights a, b must be >= 0")
            if profile.a == 0 and (profile.b == 0 or profile.m == 0):
                v.append("profile is identically zero (a=0 and no satellites)")
    elif isinstance(profile, SampledProfile):
        x = np.asarray(profile.x)
        r = np.asarray(profile.r)
        if len(x) < 4:
            v.append("sampled profile needs at least 4 points")
        elif np.any(np.diff(x) <= 0):
            v.append("sampled profile abscissae must be strictly increasing")
        if np.any(r < 0):
            v.append("sampled profile amplitudes must be >= 0")
        elif len(r) and not np.any(r > 0):
            v.append("sampled profile is identically zero")
    else:
        v.append(f"unknown profile type {type(profile).__name__}")
    return v


def eval_profile(profile: LaunchProfile, x):
    """Launch amplitude R(x) at z = 0.

    Scalar in, scalar out; array in, array out.  The closed-form families
    are evaluated exactly; ``SampledProfile`` uses monotone cubic
    interpolation and refuses x outside its table.
    """
    x_arr = np.asarray(x, dtype=float)
    if isinstance(profile, CenteredGaussianSum):
        q2 = profile.q * profile.q
        r = profile.a * np.exp(-q2 * x_arr * x_arr)
        for N in range(1, profile.m + 1):
            off = N * profile.x_c
            r = r + profile.b * (np.exp(-q2 * (x_arr - off) ** 2)
                                 + np.exp(-q2 * (x_arr + off) ** 2))
    elif isinstance(profile, MirroredGaussianComb):
        q2 = profile.q * profile.q
        r = np.zeros_like(x_arr)
        for N in range(-profile.m, profile.m + 1):
            off = profile.x_c - N * profile.x_1
            r = r + (np.exp(-q2 * (x_arr - off) ** 2)
                     + np.exp(-q2 * (x_arr + off) ** 2))
    elif isinstance(profile, SampledProfile):
        xs = np.asarray(profile.x)
        if np.any(x_arr < xs[0]) or np.any(x_arr > xs[-1]):
            raise ValueError(
                f"x outside sampled range [{xs[0]}, {xs[-1]}]")
        r = PchipInterpolator(xs, np.asarray(profile.r))(x_arr)
    else:
        raise TypeError(f"unknown profile type {type(profile).__name__}")
    if np.ndim(x) == 0:
        return float(r)
    return r


def launch_abscissae(config: ScenarioConfig) -> np.ndarray:
    """Uniform launch grid; exactly antisymmetric for symmetric windows."""
    x = np.linspace(config.x_min, config.x_max, config.n_rays)
    if config.x_min == -config.x_max:
        x = 0.5 * (x - x[::-1])
    return x


def build_launch_front(config: ScenarioConfig) -> BeamFront:
    """Initial front: uniform x grid, z=0, p_x=0, p_z=1, amp=R(x), t=0.

    Amplitudes below ``amp_floor`` times the peak are clamped to that
    floor instead of dropped, keeping the interpolation stencil uniform
    while avoiding division by zero in the wave-potential estimate.
    """
    ensure_valid(config)
    x = launch_abscissae(config)
    amp = np.asarray(eval_profile(config.profile, x), dtype=float)
    peak = amp.max()
    if not peak > 0:
        raise ValidationError(["all launch amplitudes are zero on the window"])
    if config.amp_floor > 0:
        amp = np.maximum(amp, config.amp_floor * peak)
    n = config.n_rays
    return BeamFront(
        t=0.0,
        x=x,
        z=np.zeros(n),
        p_x=np.zeros(n),
        p_z=np.ones(n),
        amp=amp,
    )
