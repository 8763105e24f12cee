"""Command-line entry point: ``ctmaps <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import experiment, growth, hnn, rips, smallcancel, stallings
from .words import LengthCapExceeded, format_word, make_alphabet, parse_word

log = logging.getLogger("ctmaps")

OUTDIR_ENV = "CTMAPS_OUTDIR"


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a fraction: {text}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("lambda must lie strictly between 0 and 1")
    return v


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("range must look like LO:HI")
    lo, hi = int(lo), int(hi)
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("range needs 1 <= LO <= HI")
    return lo, hi


def _out_path(name: str | None) -> Path | None:
    """Relative output names land in $CTMAPS_OUTDIR when it is set."""
    if name is None:
        return None
    path = Path(name)
    base = os.environ.get(OUTDIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, name: str | None) -> None:
    path = _out_path(name)
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        log.info("wrote %s", path)


def _params(args) -> rips.RipsParams:
    r = args.r if args.r is not None else experiment.default_r(args.l)
    return rips.RipsParams(r, args.l)


def _load_presentation(path: str) -> rips.Presentation:
    return rips.Presentation.from_text(Path(path).read_text(), name=Path(path).stem)


# -- subcommands ---------------------------------------------------------------

def cmd_emit_presentation(args) -> int:
    _write(rips.presentation(args.group, _params(args)).to_text(), args.out)
    return 0


def cmd_check_cprime(args) -> int:
    ok, rep = smallcancel.check_cprime(_load_presentation(args.presentation), args.lam)
    if args.report:
        _write(_dump_json(rep.to_dict()), args.report)
    print(f"C'({args.lam}) {'holds' if ok else 'fails'}: max piece ratio {rep.max_ratio}")
    return 0 if ok else 1


def cmd_min_r(args) -> int:
    lo, hi = args.range
    r = smallcancel.find_min_r(args.lam, lo, hi, args.group, args.l)
    print("none" if r is None else r)
    return 0 if r is not None else 1


def cmd_wordproblem(args) -> int:
    p = _load_presentation(args.presentation)
    try:
        trivial = smallcancel.is_trivial(parse_word(args.word, p.alphabet), p)
    except smallcancel.NotC16 as exc:
        print(f"gate failure: {exc}", file=sys.stderr)
        return 2
    print("trivial" if trivial else "nontrivial")
    return 0 if trivial else 1


def cmd_britton(args) -> int:
    params = _params(args)
    level = hnn.level_c1(params) if args.group == "Gc1d" else hnn.level_c2(params)
    w = parse_word(args.word, level.alphabet)
    print(f"stable letters: {level.split(w).stable_count} -> {level.stable_count(w)}")
    try:
        print("reduced:", format_word(level.join(level.britton_reduce(w))))
    except LengthCapExceeded as exc:
        print(f"reduced form not printed: {exc}")
    return 0


def cmd_cross_oracle(args) -> int:
    rep = hnn.cross_oracle(args.trials, args.maxlen, args.seed, _params(args))
    _write(_dump_json(rep.to_dict()), args.out)
    return 0 if rep.passed else 1


def cmd_nielsen_check(args) -> int:
    fam = rips.c_family(args.r) if args.set == "C" else rips.d_family(args.r, args.l)
    rep = stallings.nielsen_check(fam)
    print(f"N0 {rep.n0}  N1 {rep.n1}  N2 {rep.n2}  triples {rep.triples_checked}")
    if rep.violation:
        print(f"violation {rep.violation[0]}: " + ", ".join(format_word(w) for w in rep.violation[1]))
    return 0 if rep.passed else 1


def cmd_membership(args) -> int:
    alphabet = None
    basis = []
    for line in Path(args.basis).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("gens:"):
            alphabet = make_alphabet(line[5:])
            continue
        if alphabet is None:
            raise SystemExit("basis file must start with a 'gens:' line")
        basis.append(parse_word(line, alphabet))
    if alphabet is None:
        raise SystemExit("basis file must start with a 'gens:' line")
    g = stallings.SubgroupGraph(basis, alphabet)
    w = parse_word(args.word, alphabet)
    if not g.contains(w):
        print("not a member")
        return 1
    print("member:", format_word(g.express_in_basis(w)))
    return 0


def _distortion_csv(rows) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["n", "gamma_len", "w_len_exact", "w_len_log10"])
    for row in rows:
        out.writerow([row.n, row.gamma_len, "" if row.w_len_exact is None else row.w_len_exact,
                      repr(row.w_len_log10)])
    return buf.getvalue()


def cmd_distortion(args) -> int:
    rows = growth.distortion_table(args.n_max, _params(args), args.exact_bits)
    _write(_distortion_csv(rows), args.out)
    return 0


def _mitra_csv(rep) -> str:
    buf = io.StringIO()
    rows = [row.to_dict() for row in rep.rows]
    out = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    out.writeheader()
    out.writerows(rows)
    return buf.getvalue()


def cmd_ct_experiment(args) -> int:
    try:
        rep = experiment.run_ct_experiment(_params(args), args.n_max, args.seed)
    except experiment.CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return 1
    data = rep.to_dict()
    data["schema_version"] = experiment.SCHEMA_VERSION
    if args.out and args.out.endswith(".csv"):
        _write(_mitra_csv(rep), args.out)
    else:
        _write(_dump_json(data), args.out)
    if args.csv:
        _write(_mitra_csv(rep), args.csv)
    log.info(data["verdict_text"])
    return 0 if rep.verdict else 1


def cmd_verify_all(args) -> int:
    cfg = experiment.VerifyConfig(r=args.r, l=args.l, seed=args.seed,
                                  cross_trials=args.trials, cross_maxlen=args.maxlen,
                                  h_trials=args.trials, n_max=args.n_max,
                                  exact_bits=args.exact_bits)
    code, report = experiment.verify_all(cfg, progress=lambda s: log.info("stage %s", s))
    _write(_dump_json(report), args.out)
    for stage in report["stages"]:
        log.warning("%-14s %s", stage["stage"], "PASS" if stage["passed"] else "FAIL")
    return code


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ctmaps", description=__doc__)
    ap.add_argument("-q", "--quiet", action="count", default=0)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def params(p, r_required=False):
        p.add_argument("--r", type=_positive, required=r_required,
                       default=None, help="block parameter (default: least C'(1/6) value)")
        p.add_argument("--l", type=_positive, default=2)

    p = sub.add_parser("emit-presentation", help="print a presentation file")
    p.add_argument("--group", choices=rips.GROUPS, default="G")
    params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_emit_presentation)

    p = sub.add_parser("check-cprime", help="small cancellation check")
    p.add_argument("--presentation", required=True)
    p.add_argument("--lambda", dest="lam", type=_fraction, default=smallcancel.ONE_SIXTH)
    p.add_argument("--report")
    p.set_defaults(func=cmd_check_cprime)

    p = sub.add_parser("min-r", help="least r making a presentation C'(lambda)")
    p.add_argument("--group", choices=rips.GROUPS, default="G")
    p.add_argument("--lambda", dest="lam", type=_fraction, default=smallcancel.ONE_SIXTH)
    p.add_argument("--range", type=_range, default=(2, 60))
    p.add_argument("--l", type=_positive, default=2)
    p.set_defaults(func=cmd_min_r)

    p = sub.add_parser("wordproblem", help="Dehn's algorithm (exit 0 trivial, 1 not, 2 gate)")
    p.add_argument("--presentation", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_wordproblem)

    p = sub.add_parser("britton", help="Britton reduction in G_c1d or G_cd")
    p.add_argument("--group", choices=("Gc1d", "Gcd"), default="Gcd")
    p.add_argument("--word", required=True)
    params(p)
    p.set_defaults(func=cmd_britton)

    p = sub.add_parser("cross-oracle", help="Dehn vs Britton agreement on random words")
    p.add_argument("--trials", type=_positive, default=10_000)
    p.add_argument("--maxlen", type=_positive, default=40)
    p.add_argument("--seed", type=int, default=experiment.DEFAULT_SEED)
    params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cross_oracle)

    p = sub.add_parser("nielsen-check", help="Nielsen conditions for the C or D family")
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("--l", type=_positive, default=2)
    p.add_argument("--set", choices=("C", "D"), required=True)
    p.set_defaults(func=cmd_nielsen_check)

    p = sub.add_parser("membership", help="subgroup membership via Stallings folding")
    p.add_argument("--basis", required=True, help="file: 'gens: ...' then one word per line")
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("distortion", help="CSV of |w_n| against |gamma_n|")
    params(p)
    p.add_argument("--n-max", type=_positive, default=10)
    p.add_argument("--exact-bits", type=_positive, default=growth.DEFAULT_EXACT_BITS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("ct-experiment", help="the Mitra table and verdict")
    params(p)
    p.add_argument("--n-max", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=experiment.DEFAULT_SEED)
    p.add_argument("--out", help="JSON report path (a .csv name writes the table instead)")
    p.add_argument("--csv", help="also write the table as CSV")
    p.set_defaults(func=cmd_ct_experiment)

    p = sub.add_parser("verify-all", help="run every stage; exit 10+k if stage k fails")
    params(p)
    p.add_argument("--seed", type=int, default=experiment.DEFAULT_SEED)
    p.add_argument("--trials", type=_positive, default=10_000)
    p.add_argument("--maxlen", type=_positive, default=40)
    p.add_argument("--n-max", type=_positive, default=10)
    p.add_argument("--exact-bits", type=_positive, default=growth.DEFAULT_EXACT_BITS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING + 10 * (args.quiet - args.verbose)
    logging.basicConfig(level=max(logging.DEBUG, min(level, logging.CRITICAL)),
                        format="%(message)s", stream=sys.stderr)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
