"""Command-line front end.

Subcommands: ``analyze`` (one JSON state), ``batch`` (JSON-lines, one report
per line), ``random`` (reproducible state generator) and ``oracle-check``
(solver against brute force). Exit codes: 0 ok, 2 parse, 3 unphysical,
4 no feasible root, 5 certification failure, 6 oracle mismatch.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from .errors import GenerationStalled, InputError
from .gaussian_core import DEFAULT_TOL, StandardFormParams
from .report import (
    CONVENTION,
    EXIT_OK,
    EXIT_ORACLE,
    EXIT_PARSE,
    AnalysisError,
    analyze_text,
    dumps,
    error_report,
    format_text,
)

STALL_DRAWS = 1_000_000
STALL_RATE = 1e-3
PHYSICAL_MARGIN = 1e-6
ENTANGLED_MARGIN = 1e-6


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _analyze_line(text: str, tol: float, force_general: bool, oracle: bool) -> str:
    try:
        report = analyze_text(text, tol=tol, force_general=force_general, oracle=oracle)
    except AnalysisError as err:
        report = error_report(err, _label_of(text))
    return report.to_json()


def _label_of(text: str) -> str | None:
    try:
        obj = json.loads(text)
    except ValueError:
        return None
    label = obj.get("label") if isinstance(obj, dict) else None
    return label if isinstance(label, str) else None


def _map(fn, items, parallel: bool):
    if parallel and len(items) > 1:
        # Executor.map yields in submission order, so output order equals input order
        with ProcessPoolExecutor() as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // 32)))
    return [fn(item) for item in items]


def cmd_analyze(args) -> int:
    try:
        text = _read(args.path)
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = analyze_text(text, tol=args.tol, force_general=args.force_general, oracle=args.oracle)
    except AnalysisError as err:
        report = error_report(err, _label_of(text))
        code = err.exit_code
    else:
        code = EXIT_OK
    if args.format == "json":
        sys.stdout.write(report.to_json(indent=2) + "\n")
    else:
        sys.stdout.write(format_text(report))
    if code != EXIT_OK:
        print(f"error: {report.error['message']}", file=sys.stderr)
    return code


def _lines(path: str) -> list[str]:
    return [line for line in _read(path).splitlines() if line.strip()]


def cmd_batch(args) -> int:
    try:
        lines = _lines(args.path)
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    fn = partial(_analyze_line, tol=args.tol, force_general=args.force_general, oracle=args.oracle)
    for out in _map(fn, lines, args.parallel):
        sys.stdout.write(out + "\n")
    return EXIT_OK


def random_states(count: int, seed: int, entangled_only: bool = False):
    """Yield ``count`` physical standard-form parameter sets, reproducibly.

    Draws ``b1, b2 ~ U[0.6, 3]``, ``c ~ U[0, sqrt(b1 b2))``, ``|d| ~ U(0, c]``,
    ``d = -|d|`` and keeps states with ``nu_- >= 1/2 + 1e-6`` (and, with
    ``entangled_only``, Simon discriminant ``< -1e-6``).
    """
    if count < 1:
        raise InputError("count must be >= 1")
    rng = np.random.default_rng(seed)
    accepted = draws = 0
    while accepted < count:
        draws += 1
        b1 = rng.uniform(0.6, 3.0)
        b2 = rng.uniform(0.6, 3.0)
        c = rng.uniform(0.0, math.sqrt(b1 * b2))
        ad = c * (1.0 - rng.random())
        sf = StandardFormParams(float(b1), float(b2), float(c), float(-ad))
        if draws >= STALL_DRAWS and accepted < STALL_RATE * draws:
            raise GenerationStalled(f"only {accepted} of {draws} draws accepted")
        if _nu_minus(sf) < 0.5 + PHYSICAL_MARGIN:
            continue
        if entangled_only and not sf.simon < -ENTANGLED_MARGIN:
            continue
        accepted += 1
        yield sf


def _nu_minus(sf: StandardFormParams) -> float:
    det_v = sf.det_v
    if det_v <= 0.0:
        return 0.0
    delta = sf.delta
    disc = max(delta * delta - 4.0 * det_v, 0.0)
    return math.sqrt(det_v / (0.5 * (delta + math.sqrt(disc))))


def state_line(sf: StandardFormParams, label: str) -> str:
    obj = {
        "label": label,
        "convention": CONVENTION,
        "standard_form": {"b1": sf.b1, "b2": sf.b2, "c": sf.c, "d": sf.d},
    }
    return dumps(obj)


def cmd_random(args) -> int:
    try:
        for i, sf in enumerate(random_states(args.count, args.seed, args.entangled_only)):
            sys.stdout.write(state_line(sf, f"random-{args.seed}-{i}") + "\n")
    except (InputError, GenerationStalled) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


def _oracle_row(text: str, tol: float, force_general: bool):
    try:
        report = analyze_text(text, tol=tol, force_general=force_general, oracle=True)
    except AnalysisError as err:
        return _label_of(text), None, None, err.as_dict()["message"]
    return report.label, report.eof["ef_nats"], report.oracle["ef_nats"], None


def cmd_oracle_check(args) -> int:
    try:
        lines = _lines(args.path)
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rows = _map(partial(_oracle_row, tol=args.tol, force_general=args.force_general), lines, args.parallel)
    worst = 0.0
    failures = 0
    print(f"{'#':>4}  {'label':<24} {'EF solver':>22} {'EF oracle':>22} {'|dEF|':>10}")
    for i, (label, ef_s, ef_o, err) in enumerate(rows):
        name = (label or "-")[:24]
        if err is not None:
            failures += 1
            print(f"{i:>4}  {name:<24} error: {err}")
            continue
        delta = abs(ef_s - ef_o)
        worst = max(worst, delta)
        print(f"{i:>4}  {name:<24} {ef_s:>22.15g} {ef_o:>22.15g} {delta:>10.3e}")
    print(f"states: {len(rows)}, errors: {failures}, max |dEF| = {worst:.6e} nats (threshold {args.max_delta:g})")
    if failures or not worst <= args.max_delta:
        return EXIT_ORACLE
    return EXIT_OK


def _add_pipeline_flags(p, oracle=True):
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default %(default)g)")
    p.add_argument("--force-general", action="store_true", help="bypass the closed-form special cases")
    if oracle:
        p.add_argument("--oracle", action="store_true", help="add the brute-force cross-check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussian-eof",
        description="Entanglement of formation of two-mode Gaussian states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze one state (JSON file, '-' for stdin)")
    p.add_argument("path")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    p.set_defaults(format="text", func=cmd_analyze)
    _add_pipeline_flags(p)

    p = sub.add_parser("batch", help="analyze a JSON-lines file; one report per line")
    p.add_argument("path")
    p.add_argument("--json", dest="format", action="store_const", const="json", help="JSON-lines output (the only format)")
    p.add_argument("--parallel", action="store_true", help="process lines in worker processes")
    p.set_defaults(format="json", func=cmd_batch)
    _add_pipeline_flags(p)

    p = sub.add_parser("random", help="emit reproducible random physical states as JSON-lines")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--entangled-only", action="store_true")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("oracle-check", help="compare solver and brute-force EF on a JSON-lines file")
    p.add_argument("path")
    p.add_argument("--max-delta", type=float, default=1e-4, help="largest allowed |dEF| in nats")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_oracle_check)
    _add_pipeline_flags(p, oracle=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
