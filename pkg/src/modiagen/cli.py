"""Command-line surface: generate samples, query exact counts, measure
success rates, run the uniformity harness, and self-test against the
brute-force oracle.

Exit codes: 0 ok, 2 usage error, 3 sampler gave up, 4 verification
mismatch, 5 uniformity failure. All outputs are machine readable (JSONL,
CSV or JSON) with LF line endings, and identical invocations with the same
seed produce byte-identical bytes.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import oracle
from ._backend import backend_name
from .diagram import Diagram
from .errors import CacheError, GiveUpError, OracleCapError
from .sampler import (derive_subseed, run_attempts, sample_batch,
                      session_from_seed, sample_core, sample_modular)
from .tables import (CoreTable, WeightedTable, build_core_table,
                     build_weighted_table, load_core_table,
                     load_weighted_table, save_table)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GIVE_UP = 3
EXIT_MISMATCH = 4
EXIT_NONUNIFORM = 5

DEFAULT_MAX_RESTARTS = 10 ** 6


def _core_table(n: int, k: int, cache_dir: str | None) -> CoreTable:
    if cache_dir:
        table = load_core_table(cache_dir, n, k)
        if table is not None:
            return table
    table = build_core_table(n, k)
    if cache_dir:
        save_table(table, cache_dir)
    return table


def _weighted_table(n: int, k: int, sigma: int,
                    cache_dir: str | None) -> WeightedTable:
    if cache_dir:
        table = load_weighted_table(cache_dir, n, k, sigma)
        if table is not None:
            return table
    table = build_weighted_table(n, k, sigma)
    if cache_dir:
        save_table(table, cache_dir)
    return table


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _format_arcs_line(diagram: Diagram) -> str:
    if not diagram.arcs:
        return "."
    return ",".join(f"{i}-{j}" for i, j in diagram.sorted_arcs())


def cmd_gen(args) -> int:
    table: CoreTable | WeightedTable
    if args.core:
        table = _core_table(args.n, args.k, args.table_cache)
    else:
        table = _weighted_table(args.n, args.k, args.sigma, args.table_cache)
    result = sample_batch(table, args.count, args.seed,
                          parallelism=args.jobs,
                          max_restarts=args.max_restarts)
    out, close = _open_out(args.out)
    try:
        for diagram, attempts in zip(result.diagrams,
                                     result.per_sample_attempts):
            if args.format == "jsonl":
                record = {
                    "n": args.n,
                    "k": args.k,
                    "sigma": args.sigma,
                    "arcs": [[i, j] for i, j in diagram.sorted_arcs()],
                    "attempts": attempts,
                    "seed": str(args.seed),
                }
                out.write(json.dumps(record, sort_keys=True) + "\n")
            else:
                out.write(_format_arcs_line(diagram) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_count(args) -> int:
    if args.core:
        total = _core_table(args.n, args.k, args.table_cache).total()
        if args.oracle:
            expected = oracle.count_class(args.n, args.k, None, "core",
                                          cap=args.oracle_cap)
            if total != expected:
                print(f"mismatch: table says {total}, oracle says {expected}",
                      file=sys.stderr)
                return EXIT_MISMATCH
    else:
        total = _weighted_table(args.n, args.k, args.sigma,
                                args.table_cache).total()
        if args.oracle:
            expected = oracle.count_class(args.n, args.k, args.sigma,
                                          "sigma_modular", cap=args.oracle_cap)
            if total != expected:
                print(f"mismatch: table says {total}, oracle says {expected}",
                      file=sys.stderr)
                return EXIT_MISMATCH
    print(total)
    return EXIT_OK


def cmd_stats_success(args) -> int:
    out, close = _open_out(args.out)
    try:
        out.write("n,attempts,successes,rate\n")
        for n in range(args.n_min, args.n_max + 1, args.n_step):
            if args.core:
                table = _core_table(n, args.k, args.table_cache)
            else:
                table = _weighted_table(n, args.k, args.sigma,
                                        args.table_cache)
            rng = random.Random(derive_subseed(args.seed, n))
            successes = run_attempts(table, args.attempts, rng)
            rate = successes / args.attempts if args.attempts else 0.0
            out.write(f"{n},{args.attempts},{successes},{rate:.6f}\n")
            out.flush()
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_stats_uniformity(args) -> int:
    cls = "core" if args.core else "sigma_modular"
    targets = oracle.enumerate_class(args.n, args.k, args.sigma, cls,
                                     cap=args.oracle_cap)
    d = len(targets)
    count = args.count if args.count is not None else 200 * d
    if args.core:
        table = _core_table(args.n, args.k, args.table_cache)
    else:
        table = _weighted_table(args.n, args.k, args.sigma, args.table_cache)
    session = session_from_seed(args.seed, core_table=table if args.core else None,
                                weighted_table=None if args.core else table,
                                max_restarts=args.max_restarts)
    observed = {_format_arcs_line(d_): 0 for d_ in targets}
    for _ in range(count):
        if args.core:
            diagram = sample_core(args.n, args.k, session)
        else:
            diagram = sample_modular(args.n, args.k, args.sigma, session)
        key = _format_arcs_line(diagram)
        if key not in observed:
            print(f"sampled diagram outside the target class: {key}",
                  file=sys.stderr)
            return EXIT_MISMATCH
        observed[key] += 1
    report = oracle.chi_square_uniformity(observed, count, alpha=args.alpha)
    histogram: dict[int, int] = {}
    for c in observed.values():
        histogram[c] = histogram.get(c, 0) + 1
    doc = {
        "n": args.n,
        "k": args.k,
        "sigma": args.sigma,
        "mode": "core" if args.core else "modular",
        "seed": str(args.seed),
        "distinct_diagrams": d,
        "samples": count,
        "attempts": session.stats.attempts,
        "multiplicities": observed,
        "multiplicity_histogram": {str(m): c
                                   for m, c in sorted(histogram.items())},
        "all_observed": all(c > 0 for c in observed.values()),
        "chi_square": {
            "statistic": report.statistic,
            "degrees_of_freedom": report.degrees_of_freedom,
            "critical": report.critical,
            "alpha": report.alpha,
            "passed": report.passed,
            "inconclusive": report.inconclusive,
        },
    }
    out, close = _open_out(args.out)
    try:
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    finally:
        if close:
            out.close()
    if report.inconclusive:
        return EXIT_OK
    return EXIT_OK if report.passed else EXIT_NONUNIFORM


def cmd_selftest(args) -> int:
    failures = 0
    lines = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        mark = "ok" if ok else "FAIL"
        lines.append(f"{mark:4s}  {name}" + (f"  [{detail}]" if detail else ""))
        print(lines[-1], flush=True)
        if not ok:
            failures += 1

    max_n = args.max_n
    ks = (2, 3, 4)
    sigmas = (1, 2, 3)

    # DP totals against one enumeration pass per n
    for n in range(0, max_n + 1):
        counts = oracle.grid_counts(n, ks=ks, sigmas=sigmas, cap=max_n)
        for k in ks:
            got = build_core_table(n, k).total()
            want = counts[("core", k)]
            check(f"core total n={n} k={k}: {got}", got == want,
                  f"oracle {want}")
        for k in (2, 3):
            for sg in sigmas:
                got = build_weighted_table(n, k, sg).total()
                want = counts[("sigma_modular", k, sg)]
                check(f"modular total n={n} k={k} sigma={sg}: {got}",
                      got == want, f"oracle {want}")

    # weighted-core census cross-check
    census_cap = min(max_n, 10)
    for n in range(0, census_cap + 1):
        for k in (2, 3):
            got = oracle.weighted_core_census(n, k, 2, cap=census_cap)
            want = build_weighted_table(n, k, 2).total()
            check(f"census n={n} k={k} sigma=2: {got}", got == want,
                  f"table {want}")

    # bijection roundtrips
    from .tableau import diagram_to_star_sequence, star_sequence_to_diagram
    round_cap = min(max_n, 10)
    for k in (2, 3):
        bad = total = 0
        for n in range(0, round_cap + 1):
            for diagram in oracle.enumerate_diagrams(n, cap=round_cap):
                from .diagram import find_k_crossing
                if find_k_crossing(diagram, k) is not None:
                    continue
                total += 1
                seq = diagram_to_star_sequence(diagram, k)
                if star_sequence_to_diagram(seq) != diagram:
                    bad += 1
        check(f"roundtrip diagram<->sequence k={k} n<={round_cap}",
              bad == 0, f"{total} diagrams, {bad} failures")

    # normalization probes: weights must sum to the state's entry
    from .tables import core_transition_weights, weighted_transition_weights
    probe_n = min(max_n, 8)
    bad = states = 0
    table = build_core_table(probe_n, 3)
    for i in range(1, probe_n + 1):
        for o in range(len(table.space)):
            if table.t[i][o] == 0:
                continue
            states += 1
            shape = table.space.shape(o)
            total = sum(w for _, _, w in
                        core_transition_weights(table, i, shape))
            if total != table.t[i][o]:
                bad += 1
    check(f"core transition normalization n={probe_n} k=3",
          bad == 0, f"{states} states")
    wtable = build_weighted_table(probe_n, 3, 2)
    bad = states = 0
    for i in range(1, probe_n + 1):
        for o in range(len(wtable.space)):
            if wtable.w[i][o] == 0:
                continue
            states += 1
            shape = wtable.space.shape(o)
            total = sum(w for _, _, _, w in
                        weighted_transition_weights(wtable, i, shape))
            if total != wtable.w[i][o]:
                bad += 1
    check(f"weighted transition normalization n={probe_n} k=3 sigma=2",
          bad == 0, f"{states} states")

    # optional cache verification
    if args.table_cache:
        try:
            for n, k in ((6, 2), (6, 3)):
                cached = load_core_table(args.table_cache, n, k)
                fresh = build_core_table(n, k)
                if cached is None:
                    save_table(fresh, args.table_cache)
                else:
                    check(f"cache core n={n} k={k} matches",
                          cached.t == fresh.t and cached.g == fresh.g)
            for n, k, sg in ((6, 2, 2), (6, 3, 2)):
                cachedw = load_weighted_table(args.table_cache, n, k, sg)
                freshw = build_weighted_table(n, k, sg)
                if cachedw is None:
                    save_table(freshw, args.table_cache)
                else:
                    check(f"cache weighted n={n} k={k} sigma={sg} matches",
                          cachedw.w == freshw.w and cachedw.v == freshw.v)
        except CacheError as exc:
            check("table cache readable", False, str(exc))

    print(f"\nselftest: {len(lines)} checks, {failures} failures "
          f"(backend: {backend_name})")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modiagen",
        description="Generate k-noncrossing sigma-modular diagrams and "
                    "cores; query exact counts; validate against the "
                    "brute-force oracle.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_sigma=True):
        p.add_argument("--n", type=int, required=True, help="vertex count")
        p.add_argument("--k", type=int, default=3,
                       help="crossing bound (diagrams are k-noncrossing)")
        if with_sigma:
            p.add_argument("--sigma", type=int, default=2,
                           help="minimum stack length")
        p.add_argument("--table-cache", default=None, metavar="DIR",
                       help="directory for persisted counting tables")

    p = sub.add_parser("gen", help="sample diagrams")
    common(p)
    p.add_argument("--core", action="store_true",
                   help="sample k-noncrossing cores instead of modular diagrams")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-restarts", type=int, default=DEFAULT_MAX_RESTARTS)
    p.add_argument("--format", choices=("jsonl", "arcs"), default="jsonl")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--jobs", type=int, default=1,
                   help="thread parallelism; output independent of its value")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("count", help="print exact class totals")
    common(p)
    p.add_argument("--core", action="store_true")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against brute-force enumeration")
    p.add_argument("--oracle-cap", type=int, default=oracle.DEFAULT_CAP)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("stats-success",
                       help="acceptance rate of the restart sampler per n")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--sigma", type=int, default=2)
    p.add_argument("--core", action="store_true")
    p.add_argument("--attempts", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--table-cache", default=None, metavar="DIR")
    p.set_defaults(func=cmd_stats_success)

    p = sub.add_parser("stats-uniformity",
                       help="chi-square uniformity report at desk scale")
    common(p)
    p.add_argument("--core", action="store_true")
    p.add_argument("--count", type=int, default=None,
                   help="samples to draw (default 200 per target diagram)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--max-restarts", type=int, default=DEFAULT_MAX_RESTARTS)
    p.add_argument("--oracle-cap", type=int, default=oracle.DEFAULT_CAP)
    p.add_argument("--out", default=None, metavar="PATH")
    p.set_defaults(func=cmd_stats_uniformity)

    p = sub.add_parser("selftest",
                       help="oracle-equivalence grid; exit 4 on any mismatch")
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--table-cache", default=None, metavar="DIR")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GiveUpError as exc:
        print(f"gave up: {exc}", file=sys.stderr)
        return EXIT_GIVE_UP
    except CacheError as exc:
        print(f"cache verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except OracleCapError as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
