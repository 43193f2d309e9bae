"""Exception types shared across the package."""


class HelmrayError(Exception):
    """Base class for all package errors."""


class ValidationError(HelmrayError):
    """A configuration or profile violates one or more invariants.

    Carries the full list of violations in ``violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class CausticError(HelmrayError):
    """Two adjacent rays came closer than min_separation (or crossed).

    The flux-closure rule divides by the adjacent-ray distance, so the
    scheme is meaningless past a ray crossing.  ``index`` is the left ray
    of the collapsing pair, ``t`` the dimensionless time of detection.
    """

    def __init__(self, index, t, separation):
        self.index = int(index)
        self.t = float(t)
        self.separation = float(separation)
        super().__init__(
            f"adjacent rays {index} and {index + 1} separated by "
            f"{separation:.3e} at t={t:.6g} (caustic)"
        )


class MomentumOverflowError(HelmrayError):
    """A ray's transverse momentum reached |p_x| >= 1 (turned back)."""

    def __init__(self, index, t, p_x):
        self.index = int(index)
        self.t = float(t)
        self.p_x = float(p_x)
        super().__init__(f"ray {index} reached p_x={p_x:.6g} at t={t:.6g}")


class FarFieldError(HelmrayError):
    """A far-field diagnostic was requested on a record that has not
    reached the far field."""


class OverlapError(HelmrayError):
    """Ray profile and reference field do not overlap enough to compare."""
