"""Command-line frontend: ``spinr space``, ``spinr table1`` and ``spinr verify``.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

from . import connections as conn, spinorcalc as sc, verify
from .numlin import Tolerance
from .spaces import MetricParams, ModelError, SpaceId, build_model

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


def resolve_tolerance(value: float | None) -> Tolerance:
    """--tol wins over SPINR_TOL, which wins over the default."""
    if value is None:
        return Tolerance.from_env()
    if not value > 0:
        raise UsageError("--tol must be positive")
    return Tolerance(residual_tol=value, drop_tol=min(1e-12, value))


def _default_s(space: SpaceId, n: int) -> int:
    if space == SpaceId.CPN_HERMITIAN:
        return n + 1
    # the minimal structures: spin for k odd, s = -2(n+1) otherwise
    return 0 if n % 2 else -2 * (n + 1)


def _default_m(args) -> int:
    """The minimal twisting: m = n for HP^n (n odd), 3 for OP^2."""
    if args.aux == "trivial":
        return 1
    if args.space == "hpn" and args.n and args.n % 2:
        return args.n
    if args.space == "op2":
        return 3
    return 1


def model_from_args(args):
    space = SpaceId(args.space)
    if space != SpaceId.OP2 and args.n is None:
        raise UsageError(f"--n is required for {space.value}")
    if args.t is not None and space != SpaceId.CPN_SYMPLECTIC:
        raise UsageError("--t only applies to cpn-symplectic")
    cp = space in (SpaceId.CPN_HERMITIAN, SpaceId.CPN_SYMPLECTIC)
    if args.s is not None and not cp:
        raise UsageError("--s only applies to the CP spaces")
    if args.aux is not None and cp:
        raise UsageError("--aux only applies to hpn and op2; use --s for the CP spaces")
    if not (args.a > 0):
        raise UsageError("--a must be positive")
    params = MetricParams(a=args.a, t=1.0 if args.t is None else args.t)
    aux = (args.s if args.s is not None else _default_s(space, args.n)) if cp else args.aux
    return build_model(space, args.n, params, aux, args.r, args.m)


def _gen_killing(model, basis, nomizu, tol) -> bool:
    if len(basis) == 2:
        # the family alpha b0 + beta b1, sampled projectively
        scan = sc.killing_family_scan(model, basis[0], basis[1], nomizu, tol)
        return any(res <= tol.residual_tol for _, res in scan)
    return any(sc.generalized_killing_solve(model, v, nomizu, tol) is not None for v in basis)


def run_checks(model, basis, tol: Tolerance, notes: list) -> dict:
    checks = {"pure": None, "parallel": None, "einstein_constant": None, "gen_killing": None}
    if len(basis) == 0:
        notes.append("empty invariant space; checks skipped")
        return checks
    nomizu = conn.levi_civita_nomizu(model)
    checks["parallel"] = all(sc.parallel_check(model, v, nomizu, tol).parallel for v in basis)
    if not model.is_matrix_model:
        notes.append("purity, Ricci and generalised Killing checks are not run for OP2")
        return checks
    checks["pure"] = all(sc.purity_check(model, v, tol).pure_up_to_scale for v in basis)
    ric = conn.ricci_direct(model)
    c = conn.einstein_constant(ric)
    checks["einstein_constant"] = None if c is None else round(c, 10)
    if c is None:
        notes.append("metric is not Einstein")
    checks["gen_killing"] = _gen_killing(model, basis, nomizu, tol)
    return checks


def cmd_space(args) -> int:
    start = time.perf_counter()
    tol = resolve_tolerance(args.tol)
    model = model_from_args(args)
    notes = []
    basis = sc.invariant_space(model, tol, direct=args.direct, table3_path=args.table3)
    if model.space_id == SpaceId.HPN and model.n % 2 == 0 and len(basis) == 0:
        notes.append("HP^n with n even carries no invariant spinors for this structure")
    checks = run_checks(model, basis, tol, notes)
    record = {
        "space": model.space_id.value,
        "group": model.group,
        "n": model.n,
        "r": model.r,
        "m": model.m_twists,
        "dim_invariant": int(len(basis)),
        "checks": checks,
        "tolerance": asdict(tol),
        "runtime_ms": int(1000 * (time.perf_counter() - start)),
    }
    if args.dump_basis:
        mod = sc.twisted_module(model)
        dump = [mod.to_records(v, tol.drop_tol) for v in basis]
        with open(args.dump_basis, "w") as fh:
            json.dump(dump, fh)
        record["basis"] = dump
    if args.markdown:
        print(_record_markdown(record))
    else:
        print(json.dumps(record, indent=2, sort_keys=False))
    for note in notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def _record_markdown(rec: dict) -> str:
    lines = ["| field | value |", "|---|---|"]
    for key in ("space", "group", "n", "r", "m", "dim_invariant"):
        lines.append(f"| {key} | {rec[key]} |")
    for key, val in rec["checks"].items():
        lines.append(f"| {key} | {'n/a' if val is None else val} |")
    lines.append(f"| residual_tol | {rec['tolerance']['residual_tol']} |")
    lines.append(f"| runtime_ms | {rec['runtime_ms']} |")
    return "\n".join(lines)


def cmd_table1(args) -> int:
    start = time.perf_counter()
    tol = resolve_tolerance(args.tol)
    rows = verify.table1(tol, args.table3)
    ok = all(r["ok"] for r in rows)
    if args.markdown:
        print("| row | r | m | dim | expected | minimality | status |")
        print("|---|---|---|---|---|---|---|")
        for r in rows:
            cert = ", ".join(f"r={c['r']} m={c['m']}: {c['dim']}" for c in r["certificates"]) or "-"
            print(f"| {r['row']} | {r['r']} | {r['m']} | {r['dim']} | {r['expected']} | {cert} | "
                  f"{'ok' if r['ok'] else 'MISMATCH'} |")
    else:
        print(json.dumps({"rows": rows, "ok": ok, "tolerance": asdict(tol),
                          "runtime_ms": int(1000 * (time.perf_counter() - start))}, indent=2))
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_verify(args) -> int:
    tol = resolve_tolerance(args.tol)
    start = time.perf_counter()
    checks = verify.run_suite(args.suite, tol)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed in {time.perf_counter() - start:.1f} s")
    return EXIT_OK if not failed else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-8, or SPINR_TOL)")
    common.add_argument("--table3", default=None, help="path to a lowering-word file")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--markdown", action="store_true", help="markdown output")

    parser = argparse.ArgumentParser(prog="spinr", description="Invariant twisted spinors on homogeneous spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp_ = sub.add_parser("space", parents=[common], help="invariant spinors of one model")
    sp_.add_argument("--space", required=True, choices=[s.value for s in SpaceId])
    sp_.add_argument("--n", type=int, default=None)
    sp_.add_argument("--a", type=float, default=0.5)
    sp_.add_argument("--t", type=float, default=None, help="fibre scaling, cpn-symplectic only (default 1.0)")
    sp_.add_argument("--s", type=int, default=None,
                     help="circle weight for the CP spaces (default n+1 hermitian; 0 or -2(n+1) symplectic)")
    sp_.add_argument("--aux", choices=["trivial", "nontrivial"], default=None, help="auxiliary map for hpn and op2")
    sp_.add_argument("--r", type=int, default=None)
    sp_.add_argument("--m", type=int, default=None)
    sp_.add_argument("--dump-basis", default=None, metavar="PATH")
    sp_.add_argument("--direct", action="store_true", help="direct kernel for OP2 instead of the construction")
    sp_.set_defaults(func=cmd_space)

    t1 = sub.add_parser("table1", parents=[common], help="minimal (r, m, dim) per space")
    t1.set_defaults(func=cmd_table1)

    ve = sub.add_parser("verify", parents=[common], help="run verification suites")
    ve.add_argument("--suite", default="all", choices=list(verify.SUITES) + ["all"])
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "space" and args.m is None:
        args.m = _default_m(args)
    try:
        return args.func(args)
    except (UsageError, ModelError, ValueError) as exc:
        print(f"spinr: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
