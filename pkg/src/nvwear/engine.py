"""Simulation loop tying workload, cache, mapping, and policy together."""

import logging
from dataclasses import dataclass, field

from .cache import CacheState, decompose_address
from .coloring import MappingTable
from .metrics import RunStats, block_write_sd

log = logging.getLogger("nvwear.engine")


@dataclass
class IntervalDecision:
    """One policy execution, as logged to the decision CSV."""

    interval: int
    cycle: int
    sdw: float
    n_higher: int
    n_color_to_swap: int
    swaps: list
    writebacks: int


@dataclass
class RunResult:
    stats: RunStats
    decisions: list = field(default_factory=list)
    mapping_audit: list = field(default_factory=list)  # (interval, region, color)
    mapping: MappingTable | None = None


class Simulator:
    """Replays one event stream against one cache and one wear policy.

    Timing model: 1 cycle per instruction between accesses plus the cache
    latency of each access (memory round trips included in the miss
    latency). Cell-programming events feed the policy at the granularity of
    the color that absorbed them; the policy's remap decisions come back as
    color swaps, which flush through the mapping table and are charged as
    memory writebacks.
    """

    def __init__(self, cfg, policy, count_fills=True):
        self.cfg = cfg
        self.policy = policy
        self.mapping = MappingTable(cfg.num_colors)
        self.cache = CacheState(cfg, count_fills=count_fills)

    def run(self, events) -> RunResult:
        cfg = self.cfg
        cache = self.cache
        mapping = self.mapping
        policy = self.policy
        sets_per_color = cfg.sets_per_color
        stats = RunStats()
        decisions = []
        audit = [(0, region, color) for region, color in enumerate(mapping.color_of)]

        cycles = 0
        last_icount = 0
        interval = 0
        for ev in events:
            delta = ev.icount - last_icount
            last_icount = ev.icount
            if delta > 0:
                cycles += delta
            set_index, tag = decompose_address(ev.addr, cfg, mapping)
            writes_before = cache.n_block_writes
            outcome = cache.access(set_index, tag, ev.is_write)
            cycles += outcome.latency
            if ev.is_write:
                stats.writes += 1
            else:
                stats.reads += 1
            if not outcome.hit:
                stats.misses += 1
            if outcome.evicted_dirty:
                stats.writebacks += 1
            if cache.n_block_writes == writes_before:
                continue
            policy.note_write(set_index // sets_per_color)
            decision = policy.poll(cycles)
            if decision is None:
                continue
            interval += 1
            flushed = mapping.apply_remap(cache, decision.swaps)
            stats.flush_writebacks += flushed
            if decision.ran:
                stats.remap_runs += 1
                if decision.swaps:
                    audit.extend((interval, region, color)
                                 for region, color in enumerate(mapping.color_of))
            decisions.append(IntervalDecision(
                interval=interval, cycle=cycles, sdw=decision.sdw,
                n_higher=decision.n_higher, n_color_to_swap=len(decision.swaps),
                swaps=list(decision.swaps), writebacks=flushed))
            log.debug("interval %d @%d cycles: sdw=%.3f swaps=%s writebacks=%d",
                      interval, cycles, decision.sdw, decision.swaps, flushed)

        stats.cycles = cycles
        stats.instructions = last_icount
        stats.fills = cache.n_fills
        stats.write_hits = cache.n_write_hits
        stats.block_write_events = cache.n_block_writes
        stats.max_block_writes = cache.max_block_writes()
        stats.block_write_sd = block_write_sd(cache)
        return RunResult(stats=stats, decisions=decisions, mapping_audit=audit,
                         mapping=mapping)
