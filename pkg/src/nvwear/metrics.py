"""Lifetime, energy, and MPKI accounting over finished runs."""

import math
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class EnergyConstants:
    """Per-event and leakage energy of the cache and main memory (joules/watts)."""

    read_energy_j: float = 1.015e-9
    write_energy_j: float = 1.036e-9
    cache_leakage_w: float = 2.235
    mem_access_energy_j: float = 70e-9
    mem_leakage_w: float = 0.18

    def __post_init__(self):
        for name in ("read_energy_j", "write_energy_j", "cache_leakage_w",
                     "mem_access_energy_j", "mem_leakage_w"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive")


@dataclass
class RunStats:
    """Raw counters of one simulation run.

    ``block_write_events`` counts cell-programming events (fills under the
    default counting mode, plus write hits); ``writebacks`` are dirty
    evictions, kept separate from ``flush_writebacks`` caused by remaps.
    """

    reads: int = 0
    writes: int = 0
    misses: int = 0
    fills: int = 0
    write_hits: int = 0
    block_write_events: int = 0
    writebacks: int = 0
    flush_writebacks: int = 0
    cycles: int = 0
    instructions: int = 0
    max_block_writes: int = 0
    block_write_sd: float = 0.0
    remap_runs: int = 0


def relative_lifetime(baseline: RunStats, technique: RunStats):
    """Baseline max block writes over technique's; higher is better.

    Returns ``inf`` when the technique saw no block writes at all, and None
    when neither run did (0/0).
    """
    if technique.max_block_writes == 0:
        return math.inf if baseline.max_block_writes > 0 else None
    return baseline.max_block_writes / technique.max_block_writes


def energy_joules(stats: RunStats, consts: EnergyConstants = EnergyConstants(),
                  frequency_hz: float = 2_000_000_000.0):
    """Total cache + memory energy: per-event dynamic terms plus leakage
    integrated over the run's wall time (cycles / frequency)."""
    if frequency_hz <= 0:
        raise ConfigError("frequency_hz must be positive")
    seconds = stats.cycles / frequency_hz
    mem_accesses = stats.misses + stats.writebacks + stats.flush_writebacks
    return (stats.reads * consts.read_energy_j
            + stats.block_write_events * consts.write_energy_j
            + mem_accesses * consts.mem_access_energy_j
            + (consts.cache_leakage_w + consts.mem_leakage_w) * seconds)


def mpki(misses, instructions):
    """Misses per thousand instructions; None when no instructions ran."""
    if instructions <= 0:
        return None
    return misses * 1000.0 / instructions


def block_write_sd(state):
    """Population SD of the write counters across every block in the cache."""
    counts = state.write_counts
    total = 0
    n = 0
    for row in counts:
        total += sum(row)
        n += len(row)
    mean = total / n
    var = math.fsum((v - mean) ** 2 for row in counts for v in row) / n
    return math.sqrt(var)


def geometric_mean(values):
    vals = list(values)
    if not vals:
        raise ValueError("geometric mean of no values")
    if any(v <= 0 for v in vals):
        raise ValueError("geometric mean needs strictly positive values")
    return math.exp(math.fsum(math.log(v) for v in vals) / len(vals))


def arithmetic_mean(values):
    vals = list(values)
    if not vals:
        raise ValueError("arithmetic mean of no values")
    return math.fsum(vals) / len(vals)


# ratio-like metrics aggregate geometrically, additive ones arithmetically
_GEOMETRIC_KINDS = frozenset({"geometric", "ratio", "lifetime", "performance"})
_ARITHMETIC_KINDS = frozenset({"arithmetic", "additive", "energy_saving", "mpki_increase"})


def aggregate(values, metric_kind):
    """Mean of per-workload values, geometric or arithmetic by metric kind."""
    if metric_kind in _GEOMETRIC_KINDS:
        return geometric_mean(values)
    if metric_kind in _ARITHMETIC_KINDS:
        return arithmetic_mean(values)
    raise ValueError(f"unknown metric kind {metric_kind!r}")
