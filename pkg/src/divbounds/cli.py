"""Command-line front end: ``divbounds {eval,verify,extremes,certify}``.

Exit codes: 0 ok, 1 violation found, 2 inconclusive certificate,
3 usage error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone

from . import catalog, polycert
from .arith import bundle, factorize
from .catalog import DomainError, eval_expression
from .sieve import sieve_range
from .verifier import DEFAULT_CHUNK_LEN, Journal, find_extremes, json_int, verify_many

EXIT_OK, EXIT_VIOLATION, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 4

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _natural(text: str) -> int:
    text = text.strip().replace("_", "")
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"not a decimal natural number: {text!r}")
    return int(text)


def _positive(text: str) -> int:
    v = _natural(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _ineq_ids(values: list[str] | None) -> list[str]:
    ids: list[str] = []
    for v in values or ["all"]:
        for tok in v.split(","):
            tok = tok.strip()
            if tok == "all":
                ids.extend(catalog.IDS)
            elif tok in catalog.IDS:
                ids.append(tok)
            else:
                raise UsageError(f"unknown inequality {tok!r}; known: all, {', '.join(catalog.IDS)}")
    return list(dict.fromkeys(ids))


def cmd_eval(args) -> int:
    if args.n < 1:
        raise UsageError("n must be >= 1")
    f = factorize(args.n)
    b = bundle(args.n)
    ids = _ineq_ids(args.ineq) if args.ineq else []
    gaps = []
    for i in ids:
        d = catalog.get(i)
        if b.n < d.min_n:
            raise UsageError(f"{i} requires n >= {d.min_n}")
        gaps.append((i, eval_expression(d.lhs, b), eval_expression(d.rhs, b)))
    if args.json:
        doc = {
            "n": str(b.n),
            "factorization": [[str(p), a] for p, a in f.factors],
            "probabilistic": f.probabilistic,
            "phi": str(b.phi),
            "psi": str(b.psi),
            "sigma": str(b.sigma),
            "phi_star": str(b.phi_star),
            "sigma_star": str(b.sigma_star),
            "omega": b.big_omega,
            "gaps": [{"inequality": i, "lhs": str(l), "rhs": str(r), "gap": str(l - r)} for i, l, r in gaps],
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"n={b.n}")
    flag = " (probable prime factors)" if f.probabilistic else ""
    print(f"factorization={f}{flag}")
    print(f"phi={b.phi} psi={b.psi} sigma={b.sigma} phi*={b.phi_star} sigma*={b.sigma_star} omega={b.big_omega}")
    for i, l, r in gaps:
        print(f"{i} lhs={l} rhs={r} gap={l - r}")
    return EXIT_OK


def _check_range(ids: list[str], lo: int, hi: int) -> None:
    if lo > hi:
        raise UsageError(f"--from {lo} exceeds --to {hi}")
    for i in ids:
        d = catalog.get(i)
        if lo < d.min_n:
            raise UsageError(f"{i} requires n >= {d.min_n} (got --from {lo})")


def write_csv(path: str, ineq_id: str, lo: int, hi: int, chunk_len: int) -> int:
    d = catalog.get(ineq_id)
    rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "phi", "psi", "sigma", "phi_star", "sigma_star", "lhs", "rhs", "gap"])
        for a in range(lo, hi + 1, chunk_len):
            for b in sieve_range(a, min(a + chunk_len - 1, hi)):
                l, r = eval_expression(d.lhs, b), eval_expression(d.rhs, b)
                w.writerow([b.n, b.phi, b.psi, b.sigma, b.phi_star, b.sigma_star, l, r, l - r])
                rows += 1
    return rows


def cmd_verify(args) -> int:
    ids = _ineq_ids(args.ineq)
    _check_range(ids, args.lo, args.hi)
    if args.csv and len(ids) != 1:
        raise UsageError("--csv needs exactly one --ineq")
    try:
        journal = Journal(args.journal) if args.journal else None
        reports = verify_many(
            ids, args.lo, args.hi, workers=args.threads, chunk_len=args.chunk, journal=journal
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc

    status = EXIT_OK
    for i in ids:
        r = reports[i]
        mp = f"{r.min_positive_gap.n}:{r.min_positive_gap.gap}" if r.min_positive_gap else "-"
        verdict = "ok" if r.ok else f"VIOLATED x{len(r.violations)}"
        print(
            f"{i:<5} [{r.lo}, {r.hi}] {verdict} rows={r.rows_checked} equality={r.equality_count} "
            f"class={r.equality_class_observed} min_positive_gap={mp} checksum={r.checksum:016x}"
        )
        for v in r.violations:
            print(f"  violation n={v.n} gap={v.gap}")
        if not r.ok:
            status = EXIT_VIOLATION

    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if args.report:
        docs = []
        for i in ids:
            doc = reports[i].to_json()
            doc["generated_at"] = stamp
            docs.append(doc)
        with open(args.report, "w") as fh:
            json.dump(docs[0] if len(docs) == 1 else docs, fh, indent=2)
            fh.write("\n")
    if args.csv:
        write_csv(args.csv, ids[0], args.lo, args.hi, args.chunk)
    return status


def cmd_extremes(args) -> int:
    ids = _ineq_ids(args.ineq)
    if len(ids) != 1:
        raise UsageError("extremes takes exactly one --ineq")
    _check_range(ids, args.lo, args.hi)
    rows = find_extremes(ids[0], args.lo, args.hi, args.top, chunk_len=args.chunk)
    print(f"{'n':>12} {'gap':>24}")
    for g in rows:
        print(f"{g.n:>12} {g.gap:>24}")
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(
                {"inequality": ids[0], "from": args.lo, "to": args.hi,
                 "extremes": [{"n": json_int(g.n), "gap": json_int(g.gap)} for g in rows]},
                fh, indent=2,
            )
            fh.write("\n")
    return EXIT_OK


def cmd_certify(args) -> int:
    theorem = None if args.theorem == "all" else args.theorem
    if args.table:
        print(polycert.obligation_table(theorem))
        return EXIT_OK
    obs = {ob.id: ob for ob in polycert.obligations()}
    verdicts = polycert.certify_all(theorem)
    for v in verdicts:
        ob = obs[v.obligation_id]
        shift = ",".join(f"{k}->{k}+{s}" for k, s in v.shift.items()) or "none"
        strength = v.strength.value if v.strength else "-"
        print(
            f"{v.obligation_id:<7} {ob.case.value:<13} {v.outcome.value:<18} {strength:<17} "
            f"shift={shift} min_coef={v.witness.get('min_coefficient', 0)} "
            f"raw_negative={v.witness.get('raw_negative_terms', 0)}"
        )
    proved = sum(v.ok for v in verdicts)
    print(f"{proved}/{len(verdicts)} obligations certified")
    return EXIT_OK if proved == len(verdicts) else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="divbounds", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate phi, psi, sigma, phi*, sigma*, omega at n")
    p.add_argument("n", type=_natural)
    p.add_argument("--ineq", action="append", help="also print lhs, rhs, gap for this inequality")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    def range_args(p):
        p.add_argument("--ineq", action="append", help="inequality id, comma list or 'all' (repeatable)")
        p.add_argument("--from", dest="lo", type=_positive, required=True)
        p.add_argument("--to", dest="hi", type=_positive, required=True)
        p.add_argument("--chunk", type=_positive, default=DEFAULT_CHUNK_LEN)
        p.add_argument("--report", metavar="PATH")

    p = sub.add_parser("verify", help="exhaustively check inequalities over a range")
    range_args(p)
    p.add_argument("--threads", type=_positive, default=None)
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--journal", metavar="PATH")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extremes", help="smallest positive gaps in a range")
    range_args(p)
    p.add_argument("--top", type=_positive, default=10)
    p.set_defaults(func=cmd_extremes)

    p = sub.add_parser("certify", help="check the polynomial proof obligations")
    p.add_argument("--theorem", default="all", choices=[*polycert.THEOREMS, "all"])
    p.add_argument("--table", action="store_true", help="print the obligation registry instead")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"divbounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"divbounds: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
