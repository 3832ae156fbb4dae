"""Command-line front end.

Usage::

    maxatom solve FILE [--format text|json] [--count N] [--seed S]
    maxatom check FILE VECTOR
    maxatom sample FILE [COUNT] [--seed S] [--format text|json]
    maxatom oracle FILE [--grid M] [--budget N] [--format text|json]

Exit codes: 0 success, 1 a checked vector is not a solution, 2 unreadable
file or syntax error, 3 internal contract violation, 4 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from importlib import resources

from .core import BOTTOM, ContractViolation, Matrix, format_scalar, scalar
from .model import AtomSyntaxError, MapSystem, parse_atoms, preprocess
from .nonpositive import sup_solution
from .oracle import (
    BudgetExceeded,
    Grid,
    completeness_report,
    default_budget,
    violated_atoms,
)
from .pipeline import ReportStatus, Solved, sample, solve
from .positive import combine

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CONTRACT = 3
EXIT_BUDGET = 4

REPORT_VERSION = 1


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("schema/report.json").read_text())


def _vec(x) -> list[str]:
    return [format_scalar(v) for v in x]


def supremum(solved: Solved) -> list:
    """Greatest solution with every surviving free variable at 0."""
    if solved.status is ReportStatus.ONLY_BOTTOM:
        return [BOTTOM] * solved.n
    if solved.status is ReportStatus.POSITIVE_SHARP:
        return combine(solved.positive, [0] * solved.positive.sharp.cols)
    return sup_solution(solved.description, [0] * solved.description.k_prime)


def build_report(solved: Solved, samples=()) -> dict:
    names = solved.system.names
    mats: dict[str, Matrix] = {}
    perm: tuple = tuple(range(solved.n))
    free: tuple = ()
    desc = solved.description
    if solved.positive is not None:
        mats["A_sharp"] = solved.positive.sharp
    elif desc is not None:
        perm = desc.perm
        free = desc.u1_variables
        for key in ("T_wedge", "J", "K", "F_wedge"):
            m = getattr(desc, key)
            if m is not None:
                mats[key] = m
    return {
        "version": REPORT_VERSION,
        "variables": list(names),
        "classification": solved.classification.value,
        "status": solved.status.value,
        "permutation": [names[i] for i in perm],
        "free": [names[i] for i in free],
        "pinned": [names[i] for i in sorted(solved.system.forced_bottom)],
        "matrices": {k: m.to_strings() for k, m in mats.items()},
        "supremum": _vec(supremum(solved)),
        "samples": [_vec(x) for x in samples],
    }


def parse_report(data: dict | str) -> dict:
    """Inverse of the JSON encoding: strings back to exact scalars."""
    if isinstance(data, str):
        data = json.loads(data)
    out = dict(data)
    out["matrices"] = {k: Matrix([[scalar(v) for v in row] for row in m])
                       for k, m in data["matrices"].items()}
    out["supremum"] = [scalar(v) for v in data["supremum"]]
    out["samples"] = [[scalar(v) for v in x] for x in data["samples"]]
    return out


def _matrix_lines(name: str, m: Matrix) -> list[str]:
    rows = m.to_strings()
    if not rows or not rows[0]:
        return [f"{name}: (empty {m.rows}x{m.cols})"]
    width = max(len(s) for row in rows for s in row)
    return [f"{name}:"] + ["  " + " ".join(s.rjust(width) for s in row) for row in rows]


def format_text(report: dict) -> str:
    lines = [
        f"classification: {report['classification']}",
        f"status: {report['status']}",
        "variables: " + " ".join(report["variables"]),
        "permutation: " + " ".join(report["permutation"]),
        "free: " + " ".join(report.get("free", [])),
        "pinned: " + " ".join(report["pinned"]),
    ]
    for name, rows in report["matrices"].items():
        lines += _matrix_lines(name, Matrix([[scalar(v) for v in r] for r in rows]))
    lines.append("supremum: " + " ".join(report["supremum"]))
    for x in report["samples"]:
        lines.append("sample: " + " ".join(x))
    return "\n".join(lines)


def _read_system(path: str) -> MapSystem:
    if path == "-":
        return parse_atoms(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_atoms(fh.read())


def _parse_vector(text: str) -> list:
    parts = [p for p in text.replace(";", ",").split(",")]
    if len(parts) == 1 and " " in text.strip():
        parts = text.split()
    return [scalar(p) for p in parts if p.strip()]


# ---------------------------------------------------------------- commands


def cmd_solve(args) -> int:
    solved = solve(_read_system(args.file))
    samples = sample(solved, args.count, args.seed) if args.count else []
    _emit(build_report(solved, samples), args.format)
    return EXIT_OK


def cmd_check(args) -> int:
    system = _read_system(args.file)
    x = _parse_vector(args.vector)
    if len(x) != system.n:
        print(f"error: vector has {len(x)} entries, system has {system.n} variables",
              file=sys.stderr)
        return EXIT_INPUT
    failures = []
    for atom in violated_atoms(x, system):
        best = max(x[r] for r in atom.rhs)
        rhs = best if best == BOTTOM else atom.offset + best
        failures.append(f"{atom.format(system.names)}  "
                        f"({format_scalar(x[atom.lhs])} <= {format_scalar(rhs)})")
    if args.format == "json":
        print(json.dumps({"pass": not failures, "violations": failures}))
    else:
        print("PASS" if not failures else "FAIL")
        for f in failures:
            print("  violated: " + f)
    return EXIT_OK if not failures else EXIT_FAIL


def cmd_sample(args) -> int:
    solved = solve(_read_system(args.file))
    vectors = sample(solved, args.count, args.seed)
    if args.format == "json":
        print(json.dumps([_vec(x) for x in vectors]))
    else:
        for x in vectors:
            print(" ".join(_vec(x)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    system = preprocess(_read_system(args.file))
    grid = Grid.symmetric(args.grid, system.n) if args.grid is not None else Grid.for_system(system)
    budget = args.budget if args.budget is not None else default_budget()
    solved = solve(system)
    target = solved.positive if solved.positive is not None else solved.description
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = completeness_report(target, system, grid, budget)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.format == "json":
        print(json.dumps({
            "grid_bound": format_scalar(max(grid.values)),
            "solutions": report.total,
            "dominated": report.dominated,
            "represented": report.represented,
            "not_dominated": [_vec(x) for x in report.not_dominated],
            "not_represented": [_vec(x) for x in report.not_represented],
        }))
    else:
        print(f"status: {solved.status.value}")
        print(f"grid: {len(grid.values)} values per variable, {grid.size} points")
        print(f"solutions: {report.total}")
        print(f"dominated: {report.dominated}/{report.total}")
        print(f"represented: {report.represented}/{report.total}")
    return EXIT_OK if report.dominated == report.total else EXIT_FAIL


def _emit(report: dict, fmt: str) -> None:
    print(json.dumps(report, indent=2) if fmt == "json" else format_text(report))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxatom", description="Solve max-atom systems in max-plus algebra.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="atom file, or - for stdin")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("solve", help="solve a system and print its parametric description")
    common(p)
    p.add_argument("--count", type=int, default=0, help="number of sample solutions to include")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="test whether a vector solves the system")
    common(p)
    p.add_argument("vector", help='comma-separated values, e.g. "0,-11,-inf,3/2"')
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sample", help="draw random solutions")
    common(p)
    p.add_argument("count", type=int, nargs="?", default=1)
    p.add_argument("--count", dest="count_flag", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("oracle", help="enumerate grid solutions and compare with the solver")
    common(p)
    p.add_argument("--grid", type=int, default=None, help="grid bound M (values -M..M plus -inf)")
    p.add_argument("--budget", type=int, default=None, help="maximum number of grid points")
    p.set_defaults(func=cmd_oracle)
    return parser


_VECTOR_LIKE = re.compile(r"^-(inf|\d)", re.IGNORECASE)


def _shield_vectors(argv: list[str]) -> list[str]:
    """Move literals such as ``-inf,0`` behind ``--`` so argparse keeps them positional."""
    if "--" in argv:
        return argv
    vectors = [a for a in argv if _VECTOR_LIKE.match(a)]
    if not vectors:
        return argv
    return [a for a in argv if not _VECTOR_LIKE.match(a)] + ["--"] + vectors


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_shield_vectors(argv))
    if getattr(args, "count_flag", None) is not None:
        args.count = args.count_flag
    try:
        return args.func(args)
    except (OSError, AtomSyntaxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
