"""Command-line front end: run, compare, gen-trace, and selftest.

Diagnostics go to stderr at the level named by the NVWEAR_LOG environment
variable; ``run`` and ``compare`` put their reports in files only.
"""

import argparse
import logging
import os
import random
import sys

from .cache import CacheConfig, CacheState, decompose_address
from .coloring import MappingTable
from .errors import ConfigError
from .experiment import (build_config, compare_experiments, run_experiment,
                         write_comparison_report, write_run_report)
from .reference import ReferenceSimulator
from .workload import generate, write_trace

log = logging.getLogger("nvwear.cli")


def _add_policy_flags(parser):
    parser.add_argument("--policy", choices=("swl", "static", "xor"),
                        help="wear-leveling policy to simulate")
    parser.add_argument("--k", type=int, dest="k",
                        help="writes per policy interval (K)")
    parser.add_argument("--beta", type=float,
                        help="minimum write-count SD that allows a remap")
    parser.add_argument("--lambda", type=int, dest="lam",
                        help="swap-pair budget per interval (<= colors/2)")
    parser.add_argument("--swap-limit-mode", choices=("min", "max"),
                        dest="swap_limit_mode",
                        help="combine rule for the swap budget")
    parser.add_argument("--count-fills", choices=("on", "off"),
                        dest="count_fills",
                        help="whether miss fills count as block writes")
    parser.add_argument("--min-gap-cycles", type=int, dest="min_gap_cycles",
                        help="minimum cycles between policy executions")


def _add_workload_flags(parser):
    parser.add_argument("--kind", dest="workload_kind",
                        choices=("uniform", "zipf", "hotset", "roundrobin"),
                        help="synthetic workload kind")
    parser.add_argument("--events", type=int, help="number of accesses")
    parser.add_argument("--write-fraction", type=float, dest="write_fraction")
    parser.add_argument("--pages", type=int, help="distinct pages touched")
    parser.add_argument("--zipf-s", type=float, dest="zipf_s")
    parser.add_argument("--hotset-fraction", type=float, dest="hotset_fraction")
    parser.add_argument("--hotset-probability", type=float,
                        dest="hotset_probability")
    parser.add_argument("--instructions-per-access", type=int,
                        dest="instructions_per_access")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nvwear",
        description="Trace-driven wear-leveling simulator for non-volatile "
                    "set-associative caches")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one policy and write reports")
    p_run.add_argument("--config", help="INI config file")
    p_run.add_argument("--seed", type=int, help="workload seed override")
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--trace", help="replay this trace file instead of a "
                                       "generated workload")
    _add_policy_flags(p_run)
    _add_workload_flags(p_run)

    p_cmp = sub.add_parser("compare",
                           help="run baseline and technique configs on the "
                                "same workload and report the four headline "
                                "metrics")
    p_cmp.add_argument("baseline_config", help="INI config of the baseline")
    p_cmp.add_argument("technique_config", help="INI config of the technique")
    p_cmp.add_argument("--out", help="output directory")

    p_gen = sub.add_parser("gen-trace", help="write a synthetic trace file")
    p_gen.add_argument("path", help="output trace path")
    p_gen.add_argument("--config", help="INI config file for the workload")
    p_gen.add_argument("--seed", type=int)
    _add_workload_flags(p_gen)

    p_self = sub.add_parser("selftest",
                            help="differential check of the cache model "
                                 "against a naive reference simulator")
    p_self.add_argument("--cases", type=int, default=100)
    p_self.add_argument("--ops", type=int, default=400,
                        help="operations per case")
    p_self.add_argument("--seed", type=int, default=0)
    return parser


_OVERRIDE_KEYS = ("policy", "seed", "out", "trace", "k", "beta", "lam",
                  "swap_limit_mode", "count_fills", "min_gap_cycles",
                  "workload_kind", "events", "write_fraction", "pages",
                  "zipf_s", "hotset_fraction", "hotset_probability",
                  "instructions_per_access")


def _overrides(args):
    return {key: getattr(args, key) for key in _OVERRIDE_KEYS
            if hasattr(args, key)}


def _cmd_run(args):
    cfg = build_config(args.config, _overrides(args))
    report = run_experiment(cfg)
    write_run_report(report, cfg.out_dir)
    log.info("wrote reports for %s to %s", report.policy, cfg.out_dir)
    return 0


def _cmd_compare(args):
    base_cfg = build_config(args.baseline_config, {"out": args.out})
    tech_cfg = build_config(args.technique_config, {"out": args.out})
    comparison = compare_experiments(base_cfg, tech_cfg)
    out_dir = args.out or tech_cfg.out_dir
    write_comparison_report(comparison, out_dir)
    log.info("wrote comparison (%s vs %s) to %s", comparison.technique.policy,
             comparison.baseline.policy, out_dir)
    return 0


def _cmd_gen_trace(args):
    cfg = build_config(args.config, _overrides(args))
    if cfg.workload is None:
        raise ConfigError("gen-trace needs a generator workload, not a trace")
    directory = os.path.dirname(os.path.abspath(args.path))
    os.makedirs(directory, exist_ok=True)
    write_trace(args.path, generate(cfg.workload))
    log.info("wrote %d events to %s", cfg.workload.num_events, args.path)
    return 0


def _selftest_case(rng, case_index, ops):
    """Drive the production model and the naive reference through one shared
    random schedule of accesses, flushes, and remap swaps."""
    colors = rng.choice((2, 4))
    sets_per_color = rng.choice((2, 4))
    assoc = rng.choice((1, 2, 4))
    block = 64
    page = block * sets_per_color
    cfg = CacheConfig(cache_size_bytes=colors * page * assoc,
                      associativity=assoc, block_size_bytes=block,
                      page_size_bytes=page)
    count_fills = bool(rng.getrandbits(1))
    cache = CacheState(cfg, count_fills=count_fills)
    mapping = MappingTable(cfg.num_colors)
    ref = ReferenceSimulator(cfg, count_fills=count_fills)
    pages = colors * rng.choice((2, 4))
    writebacks = 0
    flush_writebacks = 0
    for op_index in range(ops):
        roll = rng.random()
        if roll < 0.01:
            color = rng.randrange(colors)
            got = cache.flush_color(color)
            want = ref.flush_color(color)
            if got != want:
                return (f"case {case_index} op {op_index}: flush writebacks "
                        f"{got} != {want}")
            flush_writebacks += got
        elif roll < 0.02:
            c1, c2 = rng.randrange(colors), rng.randrange(colors)
            got = mapping.apply_remap(cache, [(c1, c2)])
            want = ref.remap(c1, c2)
            if got != want:
                return (f"case {case_index} op {op_index}: remap writebacks "
                        f"{got} != {want}")
            flush_writebacks += got
        else:
            addr = rng.randrange(pages) * page + rng.randrange(sets_per_color) * block
            is_write = bool(rng.getrandbits(1))
            set_index, tag = decompose_address(addr, cfg, mapping)
            outcome = cache.access(set_index, tag, is_write)
            hit, evicted_dirty = ref.access_addr(addr, is_write)
            if (outcome.hit, outcome.evicted_dirty) != (hit, evicted_dirty):
                return (f"case {case_index} op {op_index}: access outcome "
                        f"({outcome.hit}, {outcome.evicted_dirty}) != "
                        f"({hit}, {evicted_dirty})")
            if outcome.evicted_dirty:
                writebacks += 1
    if cache.write_counts != ref.write_count_matrix():
        return f"case {case_index}: write count matrices differ"
    if writebacks != ref.writebacks:
        return f"case {case_index}: eviction writebacks {writebacks} != {ref.writebacks}"
    if flush_writebacks != ref.flush_writebacks:
        return (f"case {case_index}: flush writebacks {flush_writebacks} != "
                f"{ref.flush_writebacks}")
    return None


def _cmd_selftest(args):
    rng = random.Random(args.seed)
    for case_index in range(args.cases):
        failure = _selftest_case(rng, case_index, args.ops)
        if failure is not None:
            print(f"selftest FAILED: {failure}", file=sys.stderr)
            return 1
    print(f"selftest passed: {args.cases} cases x {args.ops} ops, production "
          f"and reference simulators agree")
    return 0


def main(argv=None):
    level_name = os.environ.get("NVWEAR_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level_name, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "compare": _cmd_compare,
                "gen-trace": _cmd_gen_trace, "selftest": _cmd_selftest}
    try:
        return handlers[args.command](args)
    # ConfigError and TraceFormatError are ValueErrors; plain ValueError also
    # covers malformed numbers fed to the config parser
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
