"""Command-line front end: tomogram | scan | curve | validate.

Every command parses a scenario file, runs deterministically, and writes a
manifest.json with the fully resolved parameter set next to its artifacts.
Exit codes: 0 success, 2 scenario/argument validation failure, 3 I/O failure,
4 numerical-tolerance failure from validate.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, imaging, oracle
from .objects_io import export_grid
from .scenario import Scenario, ScenarioError, parse_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_TOLERANCE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holeburn",
        description="Velocity-selective hole-burning tomography simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario file (see README for the grammar)")
        p.add_argument("--out", help="output directory (default: scenario [outputs] directory)")
        p.add_argument("--mirror", action="store_true",
                       help="apply the camera-side horizontal flip to output grids")
        p.add_argument("--threads", type=int, default=1,
                       help="execution-width hint; never changes any output byte")

    p_tomo = sub.add_parser("tomogram", help="one tomographic section at a fixed detuning")
    common(p_tomo)
    p_tomo.add_argument("--detuning", type=float, required=True,
                        help="probe detuning in Hz (use --detuning=-40e6 for negatives)")

    p_scan = sub.add_parser("scan", help="a stack of tomograms over a detuning range")
    common(p_scan)
    p_scan.add_argument("--from", dest="start", type=float, required=True,
                        help="first probe detuning, Hz")
    p_scan.add_argument("--to", dest="stop", type=float, required=True,
                        help="last probe detuning, Hz (inclusive)")
    p_scan.add_argument("--step", type=float, required=True, help="detuning step, Hz")

    p_curve = sub.add_parser("curve", help="mean transmittance versus probe detuning")
    common(p_curve)
    p_curve.add_argument("--from", dest="start", type=float, required=True,
                         help="first probe detuning, Hz")
    p_curve.add_argument("--to", dest="stop", type=float, required=True,
                         help="last probe detuning, Hz (inclusive)")
    p_curve.add_argument("--step", type=float, required=True, help="detuning step, Hz")

    p_val = sub.add_parser("validate", help="cross-check quadrature against the reference")
    p_val.add_argument("scenario")
    p_val.add_argument("--out", help="write the JSON report here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = parse_scenario(args.scenario)
        if args.command == "tomogram":
            return _cmd_tomogram(scenario, args)
        if args.command == "scan":
            return _cmd_scan(scenario, args)
        if args.command == "curve":
            return _cmd_curve(scenario, args)
        return _cmd_validate(scenario, args)
    except ScenarioError as exc:
        print(f"holeburn: scenario error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"holeburn: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"holeburn: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def _detuning_list(start: float, stop: float, step: float) -> list[float]:
    """start, start+step, ... up to stop inclusive; a step beyond the range
    still yields the single starting point."""
    if step <= 0:
        raise ScenarioError(f"--step must be > 0, got {step!r}")
    if stop < start:
        raise ScenarioError(f"--from ({start!r}) must not exceed --to ({stop!r})")
    points = []
    i = 0
    while True:
        value = start + i * step
        if value > stop + 1e-9 * step:  # slack absorbs float accumulation
            break
        points.append(value)
        i += 1
    return points or [start]


def _out_dir(scenario: Scenario, args) -> Path:
    out = Path(args.out) if args.out else Path(scenario.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _use_mirror(scenario: Scenario, args) -> bool:
    return bool(scenario.outputs.mirror or getattr(args, "mirror", False))


def _write_manifest(out: Path, scenario: Scenario, command: str, extra: dict) -> None:
    manifest = {
        "tool": {"name": "holeburn", "version": __version__},
        "command": command,
        "arguments": extra,
        "scenario": scenario.resolved(),
    }
    payload = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    tmp = out / "manifest.json.tmp"
    tmp.write_text(payload, encoding="ascii")
    tmp.replace(out / "manifest.json")


def _tomogram_files(out: Path, scenario: Scenario, tomo, mirror: bool) -> list[str]:
    grid = imaging.mirror_transform(tomo.delta_od) if mirror else tomo.delta_od
    base = f"tomogram_{tomo.probe_detuning / 1e6:+.3f}MHz"
    sidecar = {
        "detuning_hz": tomo.probe_detuning,
        "resonant_velocity_m_per_s": tomo.resonant_velocity,
        "momentum_kg_m_per_s": tomo.momentum,
        "pixel_pitch_m": tomo.pixel_pitch,
        "mirrored": mirror,
    }
    written = []
    for fmt in scenario.outputs.formats:
        name = f"{base}.csv" if fmt == "csv" else f"{base}.pgm"
        export_grid(grid, out / name, fmt, metadata=sidecar if fmt == "pgm16" else None)
        written.append(name)
        if fmt == "pgm16":
            written.append(name + ".json")
    return written


def _cmd_tomogram(scenario: Scenario, args) -> int:
    tomo = imaging.tomogram(scenario, args.detuning)
    out = _out_dir(scenario, args)
    files = _tomogram_files(out, scenario, tomo, _use_mirror(scenario, args))
    _write_manifest(out, scenario, "tomogram",
                    {"detuning_hz": args.detuning, "mirror": _use_mirror(scenario, args),
                     "threads": args.threads, "files": files})
    return EXIT_OK


def _cmd_scan(scenario: Scenario, args) -> int:
    detunings = _detuning_list(args.start, args.stop, args.step)
    threads = max(1, args.threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tomos = list(pool.map(lambda d: imaging.tomogram(scenario, d), detunings))
    else:
        tomos = [imaging.tomogram(scenario, d) for d in detunings]

    out = _out_dir(scenario, args)
    mirror = _use_mirror(scenario, args)
    entries = []
    for tomo in tomos:
        files = _tomogram_files(out, scenario, tomo, mirror)
        entries.append({
            "detuning_hz": tomo.probe_detuning,
            "resonant_velocity_m_per_s": tomo.resonant_velocity,
            "momentum_kg_m_per_s": tomo.momentum,
            "files": files,
        })
    stack_manifest = {"tomograms": entries}
    payload = json.dumps(stack_manifest, sort_keys=True, indent=2) + "\n"
    tmp = out / "scan_manifest.json.tmp"
    tmp.write_text(payload, encoding="ascii")
    tmp.replace(out / "scan_manifest.json")
    _write_manifest(out, scenario, "scan",
                    {"from_hz": args.start, "to_hz": args.stop, "step_hz": args.step,
                     "mirror": mirror, "threads": args.threads})
    return EXIT_OK


def _cmd_curve(scenario: Scenario, args) -> int:
    detunings = _detuning_list(args.start, args.stop, args.step)
    points = imaging.transmittance_curve(scenario, detunings)
    out = _out_dir(scenario, args)
    lines = ["detuning_hz,transmittance"]
    lines += [f"{repr(float(d))},{repr(float(t))}" for d, t in points]
    tmp = out / "curve.csv.tmp"
    tmp.write_text("\n".join(lines) + "\n", encoding="ascii")
    tmp.replace(out / "curve.csv")
    _write_manifest(out, scenario, "curve",
                    {"from_hz": args.start, "to_hz": args.stop, "step_hz": args.step,
                     "threads": args.threads})
    return EXIT_OK


def _cmd_validate(scenario: Scenario, args) -> int:
    report = oracle.validate_report(scenario)
    payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="ascii")
    else:
        sys.stdout.write(payload)
    return EXIT_OK if report["passed"] else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
