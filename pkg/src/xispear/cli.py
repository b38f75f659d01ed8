"""Command line entry point: ``xispear <command> [options]``.

Exit codes: 0 success, 1 computational failure (including a failed oracle
check), 2 input error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction

from . import exact, extremal, rng
from .csvio import fmt, parse_rational, read_matrix, read_pairs, read_x_file, write_csv
from .errors import InputError, TiesPresent
from .inference import PSource, TestResult, asymptotic_test, permutation_pvalue, statistic_for
from .measures import Method, all_statistics
from .ranks import REJECT, PairedSample, TiePolicy, concomitant_ranks
from .screening import HEADER as SCREEN_HEADER
from .screening import screen
from .simulation import Scenario, ScenarioSpec, bias_study, null_joint_sample, power_table

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SMALL_N = 30


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


@contextlib.contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _policy(args) -> TiePolicy:
    return TiePolicy.random_break(args.seed) if args.ties == "random" else REJECT


def _seed(text: str) -> int:
    try:
        return rng.check_seed(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


# -- commands -----------------------------------------------------------------


def cmd_test(args) -> int:
    x, y = read_pairs(args.input)
    sample = PairedSample(x, y)
    ranks = concomitant_ranks(sample, _policy(args))
    method = Method(args.method)
    st = all_statistics(ranks)
    mode = PSource(args.pvalue)
    extra = {}
    if mode is PSource.ASYMPTOTIC:
        if st.n < SMALL_N:
            _warn(f"n = {st.n} < {SMALL_N}: asymptotic p-values are conservative here; "
                  "consider --pvalue permutation")
        res = asymptotic_test(ranks, method)
    elif mode is PSource.PERMUTATION:
        res = permutation_pvalue(ranks, method, args.permutations, args.seed, threads=args.threads)
    else:
        if st.n > exact.MAX_N:
            raise InputError(f"exact p-values need n <= {exact.MAX_N}, got {st.n}")
        p = exact.exact_pvalue_for_ranks(ranks.tolist(), method)
        res = TestResult(method, statistic_for(method, st.spearman, st.xi, st.combined), st.n,
                         float(p), PSource.EXACT)
        extra["p_value_exact"] = fmt(p)
    doc = res.to_dict()
    doc.update(extra)
    doc["statistics"] = {"spearman": st.spearman, "xi": st.xi, "combined": st.combined}
    if args.ties == "random":
        doc["ties"] = {"policy": "random", "seed": args.seed,
                       "x_groups": sample.x_tie_groups, "y_groups": sample.y_tie_groups}
    with _output(args.out) as out:
        json.dump(doc, out, indent=2)
        out.write("\n")
    return EXIT_OK


def cmd_screen(args) -> int:
    x_override = read_x_file(args.x_file) if args.x_file else None
    data = read_matrix(args.input, x_override)
    mode = PSource(args.pvalue)
    if mode is PSource.ASYMPTOTIC and data.x.size < SMALL_N:
        _warn(f"n = {data.x.size} < {SMALL_N}: asymptotic p-values are conservative here; "
              "consider --pvalue permutation")
    res = screen(data, args.method, args.q, pvalue_mode=mode, permutations=args.permutations,
                 seed=args.seed, policy=_policy(args), threads=args.threads)
    with _output(args.out) as out:
        write_csv(out, SCREEN_HEADER, res.rows())
    counts = res.rejected_counts()
    print("summary: rows={} q={} pvalue={} rejected: {}".format(
        len(res.ids), fmt(args.q), mode.value,
        " ".join(f"{m.value}={counts[m]}" for m in Method)), file=sys.stderr)
    return EXIT_OK


def cmd_power(args) -> int:
    tests = list(Method) if args.test == "all" else [Method(args.test)]
    if args.runs < 100:
        raise InputError("power estimates need --runs >= 100")
    rows = []
    for sc in args.scenario:
        for n in args.n:
            spec = ScenarioSpec(Scenario(sc), n, args.seed)
            for est in power_table(spec, args.alpha, args.runs, tests=tests, pvalue_mode=args.pvalue,
                                   permutations=args.permutations, threads=args.threads):
                r = est.row()
                rows.append([r[k] for k in ("scenario", "n", "test", "alpha", "runs", "power", "se")])
    with _output(args.out) as out:
        write_csv(out, ("scenario", "n", "test", "alpha", "runs", "power", "se"), rows)
    return EXIT_OK


def cmd_bias(args) -> int:
    if args.runs < 100 or args.permutations < 1000:
        _warn("the bias protocol calls for runs >= 100 and permutations >= 1000")
    records = [bias_study(n, args.runs, args.permutations, args.test, args.seed, threads=args.threads)
               for n in args.n]
    with _output(args.out) as out:
        write_csv(out, ("n", "runs", "permutations", "test", "mean_bias"),
                  ([r.n, r.runs, r.permutations, r.test.value, r.mean_bias] for r in records))
    if args.samples_out:
        with open(args.samples_out, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, ("n", "run", "bias"),
                      ([r.n, k, b] for r in records for k, b in enumerate(r.bias_samples)))
    return EXIT_OK


def cmd_nulljoint(args) -> int:
    z = null_joint_sample(args.n, args.replicates, args.seed, threads=args.threads)
    with _output(args.out) as out:
        write_csv(out, ("replicate", "sqrt_n_S", "sqrt_n_xi"),
                  ([k, a, b] for k, (a, b) in enumerate(z)))
    return EXIT_OK


def cmd_extremal(args) -> int:
    if args.case == "1":
        if args.n is None:
            raise InputError("--case 1 requires --n")
        spec = extremal.ExtremalSpec.case1(args.n)
    else:
        if args.m is None or args.p is None:
            raise InputError("--case 2 requires --m and --p")
        spec = extremal.ExtremalSpec.case2(args.m, args.p)
    doc = extremal.describe(spec)
    with _output(args.out) as out:
        if args.format == "json":
            json.dump(doc, out, indent=2)
            out.write("\n")
        else:
            cf = doc["closed_form"]
            write_csv(out, ("case", "n", "ranks", "xi", "abs_s", "xi_closed_form", "abs_s_closed_form"),
                      [[doc["case"], doc["n"], " ".join(map(str, doc["ranks"])), doc["xi"], doc["abs_s"],
                        cf["xi"], cf.get("abs_s", "")]])
    return EXIT_OK


def _oracle_rows(check: str, n: int, eps: Fraction | None, observed: Fraction | None, method: str):
    """Yield ``(quantity, exact, expected, ok)`` rows for one oracle check."""
    if check == "table1":
        if n != 3:
            raise InputError("--check table1 is defined for --n 3")
        expected = {
            (1, 2, 3): (Fraction(1, 4), Fraction(1)),
            (1, 3, 2): (Fraction(-1, 8), Fraction(1, 2)),
            (2, 1, 3): (Fraction(-1, 8), Fraction(1, 2)),
            (2, 3, 1): (Fraction(-1, 8), Fraction(-1, 2)),
            (3, 1, 2): (Fraction(-1, 8), Fraction(-1, 2)),
            (3, 2, 1): (Fraction(1, 4), Fraction(-1)),
        }
        for ranks, x, s in exact.table1_rows():
            ex, es = expected[ranks]
            label = "(" + " ".join(map(str, ranks)) + ")"
            yield f"xi{label}", x, ex, x == ex
            yield f"S{label}", s, es, s == es
    elif check == "lemma1":
        c = exact.exact_covariance(n, exact.CovarianceMode.S_XI)
        yield "Cov[S,xi]", c, Fraction(0), c == 0
    elif check == "remark1":
        if n != 3:
            raise InputError("--check remark1 is defined for --n 3")
        c = exact.exact_covariance(3, exact.CovarianceMode.ABS_S_XI)
        yield "Cov[|S|,xi]", c, Fraction(1, 24), c == Fraction(1, 24)
    elif check in ("rank-moments", "moments"):
        whichs = ([exact.RankMoment.COV_R1_R2, exact.RankMoment.VAR_R1,
                   exact.RankMoment.COV_R1_MIN_R1R2, exact.RankMoment.COV_R1_MIN_R2R3]
                  if check == "rank-moments" else
                  [exact.RankMoment.MEAN_SQRTN_S, exact.RankMoment.VAR_SQRTN_S])
        for w in whichs:
            got, want = exact.exact_rank_moment(n, w), exact.rank_moment_formula(n, w)
            yield w.value, got, want, got == want
    elif check == "pvalue":
        if observed is None:
            raise InputError("--check pvalue requires --observed")
        p = exact.exact_pvalue(n, method, observed)
        yield f"P({method}>={fmt(observed)})", p, None, True
    elif check == "optimize":
        if eps is None:
            raise InputError("--check optimize requires --eps")
        best, perms = exact.extremal_search(n, eps)
        yield f"max|S| s.t. xi<{fmt(eps)}", best, None, True
        for p in perms:
            yield "xi at (" + " ".join(map(str, p)) + ")", exact.exact_xi(p), None, True


def cmd_oracle(args) -> int:
    if args.n > exact.MAX_N:
        raise InputError(f"exact enumeration is limited to n <= {exact.MAX_N}")
    checks = (["lemma1", "rank-moments", "moments"] + (["table1", "remark1"] if args.n == 3 else [])
              if args.check == "all" else [args.check])
    rows, ok = [], True
    for check in checks:
        for quantity, got, want, good in _oracle_rows(check, args.n, args.eps, args.observed, args.method):
            ok &= good
            status = "PASS" if good else "FAIL"
            rows.append([check, args.n, quantity, got, "" if want is None else want,
                         status if want is not None else "INFO"])
    with _output(args.out) as out:
        write_csv(out, ("check", "n", "quantity", "exact", "expected", "status"), rows)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write results to FILE instead of standard output")
    common.add_argument("--threads", type=_positive, default=None,
                        help=f"worker threads (default: ${rng.THREADS_ENV} or 1)")
    common.add_argument("--seed", type=_seed, default=0, help="unsigned 64-bit seed (default 0)")

    p = argparse.ArgumentParser(prog="xispear", description="Spearman, Chatterjee and combined rank tests of independence.")
    sub = p.add_subparsers(dest="command", required=True)
    methods = [m.value for m in Method]

    t = sub.add_parser("test", parents=[common], help="test one two-column CSV sample")
    t.add_argument("input")
    t.add_argument("--method", choices=methods, default="combined")
    t.add_argument("--pvalue", choices=[s.value for s in PSource], default="asymptotic")
    t.add_argument("--permutations", type=_positive, default=999)
    t.add_argument("--ties", choices=["reject", "random"], default="reject")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("screen", parents=[common], help="screen every row of a matrix CSV with BH control")
    s.add_argument("input")
    s.add_argument("--method", choices=methods, default="combined")
    s.add_argument("--q", type=float, default=0.05)
    s.add_argument("--pvalue", choices=["asymptotic", "permutation"], default="asymptotic")
    s.add_argument("--permutations", type=_positive, default=999)
    s.add_argument("--ties", choices=["reject", "random"], default="reject")
    s.add_argument("--x-file", help="condition values overriding the header")
    s.set_defaults(func=cmd_screen)

    w = sub.add_parser("power", parents=[common], help="empirical power of the three tests")
    w.add_argument("--scenario", nargs="+", choices=[c.value for c in Scenario], default=["linear"])
    w.add_argument("--n", type=int, nargs="+", default=[20, 40, 60, 80, 100])
    w.add_argument("--test", choices=methods + ["all"], default="all")
    w.add_argument("--runs", type=int, default=5000)
    w.add_argument("--alpha", type=float, default=0.05)
    w.add_argument("--pvalue", choices=["asymptotic", "permutation"], default="asymptotic")
    w.add_argument("--permutations", type=_positive, default=1000)
    w.set_defaults(func=cmd_power)

    b = sub.add_parser("bias", parents=[common], help="asymptotic minus permutation p-value under the null")
    b.add_argument("--n", type=int, nargs="+", default=[20, 40, 60, 80, 100])
    b.add_argument("--runs", type=_positive, default=1000)
    b.add_argument("--permutations", type=_positive, default=5000)
    b.add_argument("--test", choices=methods, default="combined")
    b.add_argument("--samples-out", help="also write every per-run bias to FILE")
    b.set_defaults(func=cmd_bias)

    j = sub.add_parser("nulljoint", parents=[common], help="scaled (S, xi) pairs under independence")
    j.add_argument("--n", type=int, required=True)
    j.add_argument("--replicates", type=_positive, default=1000)
    j.set_defaults(func=cmd_nulljoint)

    e = sub.add_parser("extremal", parents=[common], help="extremal rank constructions")
    e.add_argument("--case", choices=["1", "2"], required=True)
    e.add_argument("--n", type=int)
    e.add_argument("--m", type=int)
    e.add_argument("--p", type=int)
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.set_defaults(func=cmd_extremal)

    o = sub.add_parser("oracle", parents=[common], help="exact enumeration checks for n <= 8")
    o.add_argument("--n", type=int, default=3)
    o.add_argument("--check", default="all",
                   choices=["all", "table1", "lemma1", "remark1", "rank-moments", "moments", "pvalue", "optimize"])
    o.add_argument("--method", choices=methods, default="combined", help="for --check pvalue")
    o.add_argument("--observed", type=parse_rational, help="observed statistic for --check pvalue, e.g. 1/4")
    o.add_argument("--eps", type=parse_rational, help="xi bound for --check optimize, e.g. 1/10")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TiesPresent as exc:
        print(f"error: {exc} (tied groups: {exc.tied_groups})", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError, MemoryError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
