"""Command-line interface: run scenarios, sweep parameters, verify quality.

Exit codes: 0 success, 1 verify criteria failed, 2 configuration error,
3 runtime (caustic/turnback) error with partial outputs kept.  The
default output root is the HELMRAY_OUTPUT_ROOT environment variable,
falling back to the current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import PRESET_NAMES, emit_config_text, parse_config, preset
from .diagnostics import uncertainty_product
from .dynamics import TERMINATION_REACHED, run
from .errors import FarFieldError, HelmrayError, ValidationError
from .model import ScenarioConfig
from .output import write_run_outputs
from .verify import verify_record

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _output_root() -> Path:
    return Path(os.environ.get("HELMRAY_OUTPUT_ROOT", "."))


def _load_config(args) -> ScenarioConfig:
    if args.preset and args.config:
        raise ValidationError(["give either a config file or --preset, not both"])
    if args.preset:
        cfg = preset(args.preset)
    elif args.config:
        cfg = parse_config(args.config)
    else:
        raise ValidationError(["a config file or --preset NAME is required"])
    if getattr(args, "no_coupling", False):
        cfg = replace(cfg, coupling_enabled=False)
    if getattr(args, "z_end", None) is not None:
        cfg = replace(cfg, z_end=args.z_end)
    if getattr(args, "record_stride", None) is not None:
        cfg = replace(cfg, record_stride=args.record_stride)
    return cfg


def _run_one(cfg: ScenarioConfig, out_dir: Path, svg: bool) -> int:
    record = run(cfg)
    write_run_outputs(record, out_dir, svg=svg)
    if record.termination != TERMINATION_REACHED:
        print(f"run ended early: {record.termination}: {record.error}", file=sys.stderr)
        print(f"partial outputs kept in {out_dir}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {out_dir} ({record.steps} steps, {record.wall_time:.1f}s)")
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out) if args.out else _output_root() / "helmray-run"
    return _run_one(cfg, out_dir, svg=not args.no_svg)


def _sweep_point(payload):
    """Run one sweep point in a worker process.

    The config is re-derived from its emitted text so nothing
    unpicklable crosses the process boundary.
    """
    from .config import parse_config_text

    text, overrides, out_dir, svg = payload
    cfg = parse_config_text(text)
    for key, value in overrides.items():
        cfg = _apply_override(cfg, key, value)
    try:
        record = run(cfg)
    except HelmrayError as exc:
        return {"out_dir": out_dir, "ok": False, "error": str(exc), "overrides": overrides}
    write_run_outputs(record, out_dir, svg=svg)
    summary = {
        "out_dir": out_dir,
        "ok": record.termination == TERMINATION_REACHED,
        "termination": record.termination,
        "overrides": overrides,
        "epsilon": cfg.epsilon,
        "far_field_halfwidth": float(np.ptp(record.x[-1]) / 2.0),
        "waist_ray_p_x": float(abs(record.p_x[-1, record.nearest_launch_index(1.0)])),
    }
    try:
        summary["uncertainty_product_hbar"] = uncertainty_product(record).product_hbar
    except (FarFieldError, ValueError):
        summary["uncertainty_product_hbar"] = None
    try:
        from .diagnostics import fringe_extrema, intensity_profile
        x, intens = intensity_profile(record.final_front())
        ext = fringe_extrema(x, intens, floor=1e-4)
        summary["fringe_count"] = int(len(ext.maxima))
    except ValueError:
        summary["fringe_count"] = 0
    return summary


def _apply_override(cfg: ScenarioConfig, key: str, value: float) -> ScenarioConfig:
    if key.startswith("profile."):
        pkey = key.split(".", 1)[1]
        prof = cfg.profile
        if not hasattr(prof, pkey):
            raise ValidationError([f"profile has no parameter {pkey!r}"])
        typ = type(getattr(prof, pkey))
        return replace(cfg, profile=replace(prof, **{pkey: typ(value)}))
    if not hasattr(cfg, key):
        raise ValidationError([f"unknown sweep parameter {key!r}"])
    typ = type(getattr(cfg, key))
    return replace(cfg, **{key: typ(value)})


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    ranges = {}
    for spec in args.param:
        if "=" not in spec:
            raise ValidationError([f"--param needs KEY=V1,V2,... got {spec!r}"])
        key, vals = spec.split("=", 1)
        values = [float(v) for v in vals.split(",") if v.strip()]
        if not values:
            raise ValidationError([f"--param {key}: empty value list"])
        ranges[key.strip()] = values
    if not ranges:
        raise ValidationError(["sweep needs at least one --param KEY=V1,V2,..."])

    # cartesian product of the ranges
    points = [{}]
    for key, values in ranges.items():
        points = [{**p, key: v} for p in points for v in values]

    root = Path(args.out) if args.out else _output_root() / "helmray-sweep"
    root.mkdir(parents=True, exist_ok=True)
    text = emit_config_text(cfg)
    payloads = []
    for i, overrides in enumerate(points):
        payloads.append((text, overrides, str(root / f"point-{i:03d}"), not args.no_svg))

    if args.jobs == 1 or len(payloads) == 1:
        results = [_sweep_point(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, payloads))

    summary_path = root / "sweep_summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(results, fh, indent=2, sort_keys=True)
        fh.write("\n")
    failures = [r for r in results if not r.get("ok")]
    for r in results:
        mark = "ok " if r.get("ok") else "ERR"
        print(f"[{mark}] {r['out_dir']} {r.get('overrides')}")
    print(f"wrote {summary_path}")
    return EXIT_RUNTIME if failures else EXIT_OK


def _cmd_verify(args) -> int:
    cfg = _load_config(args)
    record = run(cfg)
    report = verify_record(record)
    for line in report.lines():
        print(line)
    out_dir = Path(args.out) if args.out else _output_root() / "helmray-verify"
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "verify_report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    print(f"wrote {report_path}")
    if record.termination != TERMINATION_REACHED:
        return EXIT_RUNTIME
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helmray",
        description="Coupled Hamiltonian ray tracing for wave beams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", nargs="?", help="scenario config file")
        p.add_argument("--preset", choices=PRESET_NAMES,
                       help="named scenario instead of a config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--no-coupling", action="store_true",
                       help="drop the coupling term (geometrical-optics limit)")
        p.add_argument("--z-end", type=float, default=None,
                       help="override the stopping plane")
        p.add_argument("--record-stride", type=int, default=None,
                       help="record every k-th step")
        p.add_argument("--no-svg", action="store_true", help="skip the SVG plate")

    p_run = sub.add_parser("run", help="run one scenario and write its outputs")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    common(p_sweep)
    p_sweep.add_argument("--param", action="append", default=[],
                         metavar="KEY=V1,V2,...",
                         help="sweep values, e.g. epsilon=1.65e-4,3.3e-4 or profile.q=1,2")
    p_sweep.add_argument("--jobs", type=int, default=os.cpu_count(),
                         help="parallel worker processes")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run a scenario plus its quality gate")
    common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    except HelmrayError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
