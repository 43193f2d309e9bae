"""Bundled quality gate: run a scenario, the reference solver, and the
diagnostics, and report each criterion with measured value, tolerance,
and pass/fail.

The criteria are keyed to the scenario type: the waist trajectory and
uncertainty product only make sense for a plain Gaussian launch, fringe
checks only when the reference field actually develops fringes.
Conservation checks (flux closure, momentum norm, reference-solver power)
apply everywhere.  With coupling disabled the trajectories must be
straight and the waist check is reported as an expected failure of the
geometrical-optics limit rather than a defect.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diagnostics import intensity_profile, uncertainty_product, waist_trajectory
from .dynamics import TrajectoryRecord, run
from .errors import FarFieldError
from .model import ScenarioConfig
from .oracle import compare, grid_for_scenario, lift_profile, propagate
from .profiles import CenteredGaussianSum
from .transport import tube_widths

__all__ = ["Criterion", "VerifyReport", "verify", "verify_record"]


@dataclass
class Criterion:
    name: str
    measured: float
    tolerance: float
    passed: bool
    comparator: str = "<="
    expected_fail: bool = False
    note: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "comparator": self.comparator,
            "passed": bool(self.passed),
            "expected_fail": bool(self.expected_fail),
            "note": self.note,
        }


@dataclass
class VerifyReport:
    config: ScenarioConfig
    criteria: list = field(default_factory=list)
    termination: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed or c.expected_fail for c in self.criteria)

    def as_dict(self):
        return {
            "passed": self.passed,
            "termination": self.termination,
            "criteria": [c.as_dict() for c in self.criteria],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def lines(self):
        for c in self.criteria:
            status = "PASS" if c.passed else ("XFAIL" if c.expected_fail else "FAIL")
            yield (f"[{status:5s}] {c.name}: measured {c.measured:.6g} "
                   f"{c.comparator} {c.tolerance:.6g}" + (f"  ({c.note})" if c.note else ""))


def _is_plain_gaussian(config: ScenarioConfig) -> bool:
    p = config.profile
    return isinstance(p, CenteredGaussianSum) and (p.b == 0.0 or p.m == 0)


def verify_record(record: TrajectoryRecord,
                  waist_tol: float = 5e-3,
                  uncertainty_band=(7.6, 8.4),
                  l2_tol: float = 0.05,
                  axis_decay_tol: float = 0.02,
                  fringe_tol_fraction: float = 0.02,
                  extrema_floor: float = 1e-4,
                  far_field_tol: float = 0.05) -> VerifyReport:
    """Evaluate all applicable criteria on an existing record."""
    cfg = record.config
    report = VerifyReport(config=cfg, termination=record.termination)
    crit = report.criteria
    eikonal = not cfg.coupling_enabled

    # flux closure: R^2 * width against its launch value, every frame
    worst_closure = 0.0
    consts = record.amp[0] ** 2 * tube_widths(
        np.hypot(np.diff(record.x[0]), np.diff(record.z[0])))
    for i in range(record.n_frames):
        w = tube_widths(np.hypot(np.diff(record.x[i]), np.diff(record.z[i])))
        dev = np.abs(record.amp[i] ** 2 * w / consts - 1.0)
        worst_closure = max(worst_closure, float(dev.max()))
    crit.append(Criterion("flux closure R^2 w / launch - 1", worst_closure, 1e-12,
                          worst_closure <= 1e-12))

    if cfg.medium.is_vacuum:
        dev = float(np.abs(record.p_x ** 2 + record.p_z ** 2 - 1.0).max())
        crit.append(Criterion("momentum norm |p|-1 (free space)", dev, 1e-15,
                              dev <= 1e-15))

    if eikonal:
        drift = float(np.abs(record.x - record.x[0]).max())
        crit.append(Criterion("straight trajectories (coupling off)", drift, 1e-12,
                              drift <= 1e-12))

    gaussian = _is_plain_gaussian(cfg)
    if gaussian:
        jp = record.nearest_launch_index(1.0)
        jm = record.nearest_launch_index(-1.0)
        ref = waist_trajectory(cfg.epsilon, record.z[:, jp])
        dev_p = np.abs(record.x[:, jp] - ref) / ref
        ref_m = waist_trajectory(cfg.epsilon, record.z[:, jm])
        dev_m = np.abs(-record.x[:, jm] - ref_m) / ref_m
        worst = float(max(dev_p.max(), dev_m.max()))
        rms = float(np.sqrt(np.mean(np.concatenate([dev_p, dev_m]) ** 2)))
        crit.append(Criterion("waist trajectory max relative deviation", worst,
                              waist_tol, worst <= waist_tol or eikonal,
                              expected_fail=eikonal,
                              note="expected failure in geometrical-optics mode" if eikonal else ""))
        crit.append(Criterion("waist trajectory RMS relative deviation", rms,
                              waist_tol, rms <= waist_tol or eikonal,
                              expected_fail=eikonal))
        try:
            unc = uncertainty_product(record, far_field_tol=far_field_tol)
            ok = uncertainty_band[0] <= unc.product_hbar <= uncertainty_band[1]
            crit.append(Criterion(
                "uncertainty product (hbar units)", unc.product_hbar,
                uncertainty_band[1], ok if not eikonal else unc.product_hbar == 0.0,
                comparator=f"in [{uncertainty_band[0]}, {uncertainty_band[1]}]",
                expected_fail=eikonal and unc.product_hbar == 0.0,
                note=f"whole-beam max |p_x| = {unc.beam_max_p_x:.3e}"))
        except FarFieldError as exc:
            crit.append(Criterion("uncertainty product (hbar units)", float("nan"),
                                  uncertainty_band[1], False, note=str(exc)))

    # reference-solver comparison (free space only)
    if cfg.medium.is_vacuum and not eikonal:
        final = record.final_front()
        z_cmp = float(np.mean(final.z))
        half_span = grid_for_scenario(cfg, z_cmp)
        field0 = lift_profile(cfg.profile, cfg.epsilon, half_span)
        power0 = field0.power
        field = propagate(field0, z_cmp)
        power_dev = abs(field.power / power0 - 1.0)
        crit.append(Criterion("reference solver power conservation", power_dev,
                              1e-10, power_dev <= 1e-10))
        x_r, i_r = intensity_profile(final)
        cmp_report = compare(x_r, i_r, field, extrema_floor=extrema_floor)
        crit.append(Criterion("final intensity L2 error vs reference",
                              cmp_report.l2_error, l2_tol,
                              cmp_report.l2_error <= l2_tol))
        if gaussian:
            # on-axis intensity decay against the reference field
            j0 = record.nearest_launch_index(0.0)
            ray_decay = float(record.amp[-1, j0] ** 2 / record.amp[0, j0] ** 2)
            i_axis = float(np.interp(0.0, field.x, field.intensity))
            i_axis0 = float(np.interp(0.0, field0.x, field0.intensity))
            ref_decay = i_axis / i_axis0
            dev = abs(ray_decay / ref_decay - 1.0)
            crit.append(Criterion("on-axis intensity decay vs reference", dev,
                                  axis_decay_tol, dev <= axis_decay_tol))
        if (cmp_report.ray_extrema is not None
                and len(cmp_report.reference_extrema.maxima) > 1):
            ok_count = cmp_report.maxima_count_matches
            crit.append(Criterion(
                "fringe count (maxima above floor)",
                float(len(cmp_report.ray_extrema.maxima)),
                float(len(cmp_report.reference_extrema.maxima)),
                ok_count, comparator="=="))
            offs, tols = _sided_fringe_offsets(cmp_report, fringe_tol_fraction)
            if len(offs):
                rel = float(np.max(offs / tols))
                crit.append(Criterion(
                    "fringe extrema offset / tolerance (first three per side)",
                    rel, 1.0, rel <= 1.0,
                    note=f"{len(offs)} extrema checked"))
    return report


def _sided_fringe_offsets(cmp_report, tol_fraction):
    """Offsets of up to the first three reference extrema per side, with
    tolerances tol_fraction times the local extremum spacing."""
    ref = np.sort(np.concatenate([cmp_report.reference_extrema.maxima,
                                  cmp_report.reference_extrema.minima]))
    ray = np.sort(np.concatenate([cmp_report.ray_extrema.maxima,
                                  cmp_report.ray_extrema.minima]))
    offs, tols = [], []
    for side in (+1, -1):
        r_side = ref[ref * side > 1e-9] * side
        y_side = ray[ray * side > 1e-9] * side
        r_side = np.sort(r_side)
        y_side = np.sort(y_side)
        k = min(3, len(r_side), len(y_side))
        for i in range(k):
            prev = r_side[i - 1] if i else 0.0
            nxt = r_side[i + 1] if i + 1 < len(r_side) else r_side[i] + (r_side[i] - prev)
            spacing = 0.5 * (nxt - prev)
            offs.append(abs(y_side[i] - r_side[i]))
            tols.append(tol_fraction * spacing)
    return np.asarray(offs), np.asarray(tols)


def verify(config: ScenarioConfig, **tolerances) -> VerifyReport:
    """Run the scenario and evaluate every applicable criterion."""
    record = run(config)
    return verify_record(record, **tolerances)
