"""Wear-leveling policies over cache colors.

Three policies share one trigger (every K counted writes, but never more
often than ``min_gap_cycles`` apart):

* ``swl``   - swap-based leveling: colors written hardest in the last window
              trade places with the colors carrying the least lifetime wear.
* ``xor``   - blind periodic remap through an XOR register, whole-cache flush.
* ``static``- identity mapping forever; the baseline.
"""

import math
from dataclasses import dataclass, field

from .errors import ConfigError

DEFAULT_BETA = 75.0
DEFAULT_K_WRITES = 100_000
DEFAULT_MIN_GAP_CYCLES = 3_000_000


def stddev_writes(values):
    """Population standard deviation of per-color write counts."""
    n = len(values)
    if n < 1:
        raise ValueError("stddev_writes needs at least one value")
    mean = sum(values) / n
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n)


@dataclass
class RemapDecision:
    """Outcome of one policy execution. ``ran`` False means the imbalance
    gate rejected remapping; the swap list is empty in that case."""

    ran: bool
    swaps: list = field(default_factory=list)
    sdw: float = 0.0
    n_higher: int = 0


@dataclass
class PolicyState:
    """Counters and thresholds driving the periodic remap decision.

    ``n_write_global`` accumulates over the whole run; ``n_write_last_interval``
    restarts whenever the decision procedure executes. ``swap_limit`` is the
    cap on swapped pairs per execution (defaults to a quarter of the colors)
    and must stay within [1, N/2].
    """

    num_colors: int
    beta: float = DEFAULT_BETA
    swap_limit: int | None = None
    k_writes: int = DEFAULT_K_WRITES
    min_gap_cycles: int = DEFAULT_MIN_GAP_CYCLES
    swap_limit_mode: str = "min"
    n_write_global: list = field(init=False, repr=False)
    n_write_last_interval: list = field(init=False, repr=False)
    writes_since_check: int = 0
    last_run_cycle: int = 0
    deferred: bool = False

    def __post_init__(self):
        n = self.num_colors
        if n < 2:
            raise ConfigError("wear-leveling needs at least 2 colors")
        if self.swap_limit is None:
            self.swap_limit = max(1, n // 4)
        if not 1 <= self.swap_limit <= n // 2:
            raise ConfigError(
                f"swap_limit must lie in [1, {n // 2}] for {n} colors, "
                f"got {self.swap_limit}")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0")
        if self.k_writes < 1:
            raise ConfigError("k_writes must be >= 1")
        if self.min_gap_cycles < 0:
            raise ConfigError("min_gap_cycles must be >= 0")
        if self.swap_limit_mode not in ("min", "max"):
            raise ConfigError(f"swap_limit_mode must be 'min' or 'max', "
                              f"got {self.swap_limit_mode!r}")
        self.n_write_global = [0] * n
        self.n_write_last_interval = [0] * n

    def observe_write(self, color):
        self.n_write_global[color] += 1
        self.n_write_last_interval[color] += 1
        self.writes_since_check += 1

    def check_trigger(self, now_cycle):
        """True when K writes accumulated and the minimum cycle gap has passed.

        Reaching K writes inside the gap defers: the write counter restarts
        and the next chance comes only after another K writes, re-checked
        against the same gap.
        """
        if self.writes_since_check < self.k_writes:
            return False
        self.writes_since_check = 0
        if now_cycle - self.last_run_cycle < self.min_gap_cycles:
            self.deferred = True
            return False
        self.deferred = False
        self.last_run_cycle = now_cycle
        return True

    def plan_remap(self) -> RemapDecision:
        """Decide which color pairs to swap for this interval.

        Skips entirely when the spread (population SD) of last-interval write
        counts is below ``beta``. Otherwise pairs the colors with the highest
        recent write counts against the colors with the lowest lifetime write
        counts, up to the configured pair budget: ``min`` mode caps at
        min(n_higher, swap_limit); ``max`` mode takes max(n_higher, swap_limit)
        but never more than N/2 pairs. Ties sort by ascending color index.
        The interval window restarts afterwards either way; lifetime counters
        are never reset.
        """
        last = self.n_write_last_interval
        n = self.num_colors
        sdw = stddev_writes(last)
        avg = sum(last) / n
        decision = RemapDecision(ran=False, sdw=sdw,
                                 n_higher=sum(1 for v in last if v > avg))
        if sdw >= self.beta:
            cum = self.n_write_global
            l1 = sorted(range(n), key=lambda c: (-last[c], c))
            l2 = sorted(range(n), key=lambda c: (cum[c], c))
            if self.swap_limit_mode == "min":
                n_swap = min(decision.n_higher, self.swap_limit)
            else:
                n_swap = min(max(decision.n_higher, self.swap_limit), n // 2)
            decision.swaps = list(zip(l1[:n_swap], l2[:n_swap]))
            decision.ran = True
        for i in range(n):
            last[i] = 0
        return decision


class StaticPolicy:
    """Baseline: identity mapping forever, no remaps, no flushes."""

    name = "static"

    def note_write(self, color):
        pass

    def poll(self, now_cycle):
        return None


class SwapWearPolicy:
    """Periodic pairwise swapping of hot colors toward the least-worn ones."""

    name = "swl"

    def __init__(self, state: PolicyState):
        self.state = state

    def note_write(self, color):
        self.state.observe_write(color)

    def poll(self, now_cycle):
        if self.state.check_trigger(now_cycle):
            return self.state.plan_remap()
        return None


class XorRemapPolicy:
    """Blind periodic remap: XOR a register into every region index.

    Each execution advances the register through 1..N-1 (never 0, which would
    be the identity) and rewrites the whole mapping, so every color is
    flushed. Expressed as N/2 disjoint color swaps so the flush accounting
    matches the mapping-table path.
    """

    name = "xor"

    def __init__(self, state: PolicyState):
        n = state.num_colors
        if n & (n - 1):
            raise ConfigError("xor remap needs a power-of-two color count")
        self.state = state
        self.register = 0
        self.runs = 0

    def note_write(self, color):
        self.state.observe_write(color)

    def poll(self, now_cycle):
        st = self.state
        if not st.check_trigger(now_cycle):
            return None
        n = st.num_colors
        last = st.n_write_last_interval
        avg = sum(last) / n
        decision = RemapDecision(ran=True, sdw=stddev_writes(last),
                                 n_higher=sum(1 for v in last if v > avg))
        self.runs += 1
        new_register = (self.runs - 1) % (n - 1) + 1
        delta = self.register ^ new_register
        self.register = new_register
        decision.swaps = [(c, c ^ delta) for c in range(n) if c < c ^ delta]
        for i in range(n):
            last[i] = 0
        return decision


POLICY_KINDS = ("swl", "static", "xor")


def build_policy(kind, num_colors, *, beta=DEFAULT_BETA, swap_limit=None,
                 k_writes=DEFAULT_K_WRITES, min_gap_cycles=DEFAULT_MIN_GAP_CYCLES,
                 swap_limit_mode="min"):
    if kind == "static":
        return StaticPolicy()
    state = PolicyState(num_colors, beta=beta, swap_limit=swap_limit,
                        k_writes=k_writes, min_gap_cycles=min_gap_cycles,
                        swap_limit_mode=swap_limit_mode)
    if kind == "swl":
        return SwapWearPolicy(state)
    if kind == "xor":
        return XorRemapPolicy(state)
    raise ConfigError(f"unknown policy kind {kind!r} (expected one of {POLICY_KINDS})")
