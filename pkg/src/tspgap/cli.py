"""Command-line entry point.

Exit codes: 0 success, 1 invariant failure, 2 usage or domain error,
3 a mathematical claim failed to verify.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

from . import appendix_algebra, checks, kcycle, linalg, lp_bridge, tsp_sdp, witness
from .errors import DimensionMismatch, DomainError, InfeasibleWitness, TspGapError

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_CLAIM = 3


class _UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _even_at_least(value: int, low: int, flag: str) -> None:
    if value % 2 or value < low:
        raise DomainError(f"{flag} must be an even integer >= {low}, got {value}")


def _certificate_text(cert: witness.WitnessCertificate) -> str:
    lines = [
        f"n            {cert.n}",
        f"sdp_cost     {cert.sdp_cost!r}",
        f"integer_opt  {cert.integer_opt!r}",
        f"ratio        {cert.ratio!r}",
        f"bound        {cert.theorem_bound!r}",
        f"feasible     {cert.feasible}",
    ]
    if cert.k is not None:
        lines[1:1] = [f"k            {cert.k}", f"c            {cert.c}"]
    return "\n".join(lines) + "\n"


def _render_certificate(cert, fmt: str) -> str:
    if fmt == "json":
        return _dump(cert.to_dict())
    if fmt == "text":
        return _certificate_text(cert)
    raise _UsageError("certificates support --format json or text")


# -- commands --------------------------------------------------------------------

def cmd_witness(args) -> int:
    if args.n is None:
        raise _UsageError("witness requires --n")
    _even_at_least(args.n, 6, "--n")
    cert = witness.gap_certificate(args.n, args.tol, args.seed)
    _emit(_render_certificate(cert, args.format or "json"), args.out)
    return EXIT_OK if cert.feasible and cert.ratio <= cert.theorem_bound + 1e-10 else EXIT_CLAIM


def gap_rows(n_min: int, n_max: int, tol: float) -> list[dict]:
    rows = []
    for n in range(n_min, n_max + 1, 2):
        cert = witness.gap_certificate(n, tol)
        rows.append(
            {
                "n": n,
                "sdp_cost": cert.sdp_cost,
                "tsp_opt": cert.integer_opt,
                "ratio": cert.ratio,
                "bound": cert.theorem_bound,
                "tsp_over_sdp": cert.integer_opt / cert.sdp_cost,
                "feasible": cert.feasible,
            }
        )
    return rows


GAP_COLUMNS = ("n", "sdp_cost", "tsp_opt", "ratio", "bound", "tsp_over_sdp")


def cmd_gap_table(args) -> int:
    if args.n_min is None or args.n_max is None:
        raise _UsageError("gap-table requires --n-min and --n-max")
    _even_at_least(args.n_min, 6, "--n-min")
    _even_at_least(args.n_max, 6, "--n-max")
    if args.n_min > args.n_max:
        raise DomainError("--n-min must not exceed --n-max")
    rows = gap_rows(args.n_min, args.n_max, args.tol)
    fmt = args.format or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(",".join(GAP_COLUMNS) + "\n")
        for r in rows:
            buf.write(",".join(str(r["n"]) if c == "n" else repr(r[c]) for c in GAP_COLUMNS) + "\n")
        text = buf.getvalue()
    elif fmt == "json":
        text = _dump([{c: r[c] for c in GAP_COLUMNS} for r in rows])
    else:
        text = "".join(
            f"{r['n']:>5} {r['sdp_cost']:.12f} {r['tsp_over_sdp']:.12f}\n" for r in rows
        )
    _emit(text, args.out)
    increasing = all(b["tsp_over_sdp"] > a["tsp_over_sdp"] for a, b in zip(rows, rows[1:]))
    return EXIT_OK if increasing and all(r["feasible"] for r in rows) else EXIT_CLAIM


def cmd_kcycle(args) -> int:
    if args.k is None or args.c is None:
        raise _UsageError("kcycle requires --k and --c")
    cert = kcycle.kcycle_gap_certificate(args.k, args.c, args.tol, args.seed)
    _emit(_render_certificate(cert, args.format or "json"), args.out)
    return EXIT_OK if cert.feasible else EXIT_CLAIM


def cmd_verify(args) -> int:
    if args.solution is None:
        raise _UsageError("verify requires --solution (a manifest written by export)")
    sol = tsp_sdp.load_solution(args.solution)
    cost = linalg.read_csv(args.cost) if args.cost else witness.cut_cost_matrix(sol.n)
    inst = tsp_sdp.SdpInstance(cost)
    if inst.n != sol.n:
        raise DimensionMismatch(f"cost has n={inst.n}, solution has n={sol.n}")
    report = tsp_sdp.verify_feasibility(inst, sol, args.tol)
    if (args.format or "json") == "json":
        text = _dump(report.to_dict())
    else:
        text = (
            f"feasible   {report.feasible}\n"
            f"objective  {report.objective!r}\n"
            f"min_eig    {min(report.psd_min_eigs)!r}\n"
        )
    _emit(text, args.out)
    return EXIT_OK if report.feasible else EXIT_CLAIM


def cmd_checks(args) -> int:
    suite = args.suite or "all"
    if suite != "all" and suite not in checks.SUITES:
        raise _UsageError(f"unknown suite {suite!r}; choose from all, {', '.join(checks.SUITES)}")
    results = checks.run_suite(suite, args.seed)
    passed = all(r.ok for r in results)
    summary = {
        "suite": suite,
        "seed": args.seed,
        "passed": passed,
        "results": [r.to_dict() for r in results],
    }
    if not passed:
        summary["first_failure"] = next(f"{r.suite}: {r.name}" for r in results if not r.ok)
    _emit(_dump(summary), args.out)
    return EXIT_OK if passed else EXIT_INVARIANT


def cmd_export(args) -> int:
    """Write the witness matrices, the cost matrix, the LP and ``Q``/``Q^-1`` for one ``n``."""
    if args.n is None or args.out is None:
        raise _UsageError("export requires --n and --out (a directory)")
    _even_at_least(args.n, 6, "--n")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fam = witness.analytic_a(args.n)
    manifest = tsp_sdp.save_solution(witness.expand_family(fam), out)
    linalg.write_csv(out / "C.csv", witness.cut_cost_matrix(args.n))
    (out / "lp.json").write_text(lp_bridge.build_tsp_lp(args.n).to_json() + "\n")
    q = appendix_algebra.q_matrix(args.n)
    linalg.write_csv(out / "Q.csv", q.entries)
    linalg.write_csv(out / "Qinv.csv", appendix_algebra.q_inverse_closed_form(q))
    files = sorted(p.name for p in out.iterdir())
    sys.stdout.write(_dump({"manifest": manifest.name, "files": files}))
    return EXIT_OK


COMMANDS = {
    "witness": cmd_witness,
    "gap-table": cmd_gap_table,
    "kcycle": cmd_kcycle,
    "verify": cmd_verify,
    "checks": cmd_checks,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tspgap",
        description="Certify the integrality gap of the association-scheme SDP relaxation of the TSP.",
        allow_abbrev=False,
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--n", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--c", type=int)
    parser.add_argument("--n-min", type=int)
    parser.add_argument("--n-max", type=int)
    parser.add_argument("--tol", type=float, default=linalg.DEFAULT_PSD_TOL)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("json", "csv", "text"))
    parser.add_argument("--suite")
    parser.add_argument("--solution", help="solution manifest (JSON) for verify")
    parser.add_argument("--cost", help="cost matrix CSV for verify (default: the cut instance)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if not (args.tol >= 0 and math.isfinite(args.tol)):
        sys.stderr.write("error: --tol must be a finite non-negative number\n")
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, DimensionMismatch, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except InfeasibleWitness as exc:
        sys.stderr.write(f"claim failed: {exc}\n")
        return EXIT_CLAIM
    except TspGapError as exc:
        sys.stderr.write(f"invariant failure: {type(exc).__name__}: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
