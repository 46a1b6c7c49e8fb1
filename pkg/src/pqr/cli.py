"""Command-line surface: generate, peacock, scan, simulate, inspect.

Exit codes: 0 success, 2 no code found, 3 no unique code, 4 invalid input,
5 distracter infeasible, 6 capacity exceeded, 7 decode failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import encoder, pnm, scanner, scene
from .encoder import CapacityExceeded, EcLevel
from .matrix import ModuleMatrix
from .peacock import InfeasibleError, peacock, sidecar_report

EXIT_OK = 0
EXIT_NOT_FOUND = 2
EXIT_NO_UNIQUE = 3
EXIT_INVALID = 4
EXIT_INFEASIBLE = 5
EXIT_CAPACITY = 6
EXIT_DECODE_FAILED = 7

_OUTCOME_EXIT = {
    "decoded": EXIT_OK,
    "not_found": EXIT_NOT_FOUND,
    "no_unique_code": EXIT_NO_UNIQUE,
    "decode_failed": EXIT_DECODE_FAILED,
}

_POLICY_NAMES = {"strict": "strict_single", "arbitrary": "arbitrary", "first": "first_found"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pqr", description="QR / peacocked-QR codec toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="encode a payload as a standard QR symbol")
    gen.add_argument("--text", required=True, help="payload text (UTF-8)")
    gen.add_argument("--ec", default="M", choices=list("LMQH"), help="EC level (default M)")
    gen.add_argument("--version", type=int, default=1, help="minimum symbol version (default 1)")
    gen.add_argument("--out", help="PGM (P5) raster output path")
    gen.add_argument("--matrix", help="matrix text output path ('#'/'.')")
    gen.add_argument("--scale", type=int, default=4, help="pixels per module (default 4)")
    gen.add_argument("--rotate", type=int, default=0, choices=sorted(scene.ROTATIONS),
                     help="render rotation in degrees")

    pea = sub.add_parser("peacock", help="encode a payload as a peacocked QR symbol")
    pea.add_argument("--text", required=True)
    pea.add_argument("--ec", default="M", choices=list("LMQH"),
                     help="preferred EC level; stronger levels are substituted when needed")
    pea.add_argument("--min-version", type=int, default=2)
    pea.add_argument("--out", required=True, help="PGM (P5) raster output path")
    pea.add_argument("--report", help="JSON sidecar with the damage report and certification")
    pea.add_argument("--matrix", help="matrix text output path")
    pea.add_argument("--scale", type=int, default=4)
    pea.add_argument("--diamond", action="store_true",
                     help="render at 45 degrees with the covered corner at the bottom")

    sca = sub.add_parser("scan", help="scan a raster file")
    sca.add_argument("file", help="PGM/PBM input")
    sca.add_argument("--policy", default="strict", choices=sorted(_POLICY_NAMES))
    sca.add_argument("--seed", type=int, default=0,
                     help="seed for the arbitrary policy (default 0)")
    sca.add_argument("--json", action="store_true", help="emit the full scan report as JSON")

    sim = sub.add_parser("simulate", help="run seeded multi-code selection trials")
    sim.add_argument("--codes", type=int, required=True)
    sim.add_argument("--mode", required=True, choices=["plain", "pqr"])
    sim.add_argument("--target", type=int, default=0)
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--json", action="store_true")

    ins = sub.add_parser("inspect", help="print the scanner's hypothesis census")
    ins.add_argument("file")
    return parser


def _write_outputs(matrix: ModuleMatrix, args, rotation: int) -> None:
    if args.out:
        sc = scene.single_symbol_scene(matrix, scale=args.scale, rotation=rotation)
        pnm.write_pgm(args.out, scene.render(sc))
    if getattr(args, "matrix", None):
        with open(args.matrix, "w", encoding="ascii") as fh:
            fh.write(matrix.to_text())


def _cmd_generate(args) -> int:
    if args.scale < 1:
        raise _UsageError("--scale must be positive")
    try:
        matrix = encoder.generate(args.text.encode("utf-8"), EcLevel(args.ec), args.version)
    except CapacityExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        raise _UsageError(str(exc))
    if not args.out and not args.matrix:
        print(matrix.to_text(), end="")
        return EXIT_OK
    _write_outputs(matrix, args, args.rotate)
    return EXIT_OK


def _cmd_peacock(args) -> int:
    if args.scale < 1:
        raise _UsageError("--scale must be positive")
    min_version = args.min_version
    if min_version < 2:
        print("warning: --min-version clamped to 2 (a distracter needs an alignment pattern)",
              file=sys.stderr)
        min_version = 2
    try:
        artifact = peacock(args.text.encode("utf-8"), EcLevel(args.ec), min_version)
    except CapacityExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    rotation = scene.DIAMOND_ROTATION if args.diamond else 0
    _write_outputs(artifact.matrix, args, rotation)
    if args.report:
        with open(args.report, "w", encoding="ascii") as fh:
            json.dump(sidecar_report(artifact), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _cmd_scan(args) -> int:
    try:
        bitmap = pnm.read_pnm(args.file)
    except (OSError, pnm.PnmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = scanner.scan(bitmap, _POLICY_NAMES[args.policy], args.seed)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    elif report.outcome == "decoded":
        print(report.payload.decode("utf-8", errors="replace"))
    else:
        print(report.outcome, file=sys.stderr)
    return _OUTCOME_EXIT[report.outcome]


def _cmd_simulate(args) -> int:
    try:
        stats = scene.run_selection_trials(args.codes, args.mode, args.target,
                                           args.trials, args.seed)
    except (ValueError, InfeasibleError, CapacityExceeded) as exc:
        raise _UsageError(str(exc))
    payload = stats.to_json_dict()
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"trials: {stats.trials}  target_hit: {stats.target_hit}  "
              f"other_hit: {stats.other_hit}  none: {stats.none}")
    return EXIT_OK


def _cmd_inspect(args) -> int:
    try:
        bitmap = pnm.read_pnm(args.file)
    except (OSError, pnm.PnmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    pipe = scanner.scan_pipeline(bitmap)
    census = pipe.census
    print(f"finders: {census.finders}")
    print(f"triples: {census.triples}")
    print(f"decoded: {census.decoded}")
    print(f"format_failures: {census.format_failures}")
    print(f"rs_failures: {census.rs_failures}")
    print(f"structure_failures: {census.structure_failures}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "peacock": _cmd_peacock,
    "scan": _cmd_scan,
    "simulate": _cmd_simulate,
    "inspect": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
