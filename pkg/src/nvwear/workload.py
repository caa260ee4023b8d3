"""Trace file I/O and deterministic synthetic access-stream generators."""

import random
from bisect import bisect_right
from dataclasses import dataclass

from .errors import ConfigError, TraceFormatError

MAX_ADDRESS = 1 << 48

GENERATOR_KINDS = ("uniform", "zipf", "hotset", "roundrobin")


@dataclass(frozen=True, slots=True)
class TraceEvent:
    is_write: bool
    addr: int
    icount: int  # cumulative instructions executed at this access


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic access stream; same spec => same events, byte
    for byte.

    Kinds:
      uniform    - pages drawn flat.
      zipf       - page k drawn with probability proportional to 1/(k+1)^s;
                   page 0 is the most popular.
      hotset     - the first ``hotset_fraction`` of pages absorbs
                   ``hotset_probability`` of the accesses.
      roundrobin - deterministic sweep hitting every block of every page in
                   turn (pages cycle fastest).

    Block offsets within a page are uniform except for roundrobin. The
    instruction counter advances by ``instructions_per_access`` per event.
    """

    kind: str = "uniform"
    num_events: int = 100_000
    write_fraction: float = 0.5
    zipf_exponent: float = 1.0
    hotset_fraction: float = 0.125
    hotset_probability: float = 0.9
    page_count: int = 256
    seed: int = 1
    instructions_per_access: int = 5
    page_size_bytes: int = 4096
    block_size_bytes: int = 64

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ConfigError(f"unknown generator kind {self.kind!r} "
                              f"(expected one of {GENERATOR_KINDS})")
        if self.num_events < 0:
            raise ConfigError("num_events must be >= 0")
        if not 0.0 <= self.write_fraction <= 1.0:
            raise ConfigError("write_fraction must lie in [0, 1]")
        if self.zipf_exponent < 0:
            raise ConfigError("zipf_exponent must be >= 0")
        if not 0.0 < self.hotset_fraction <= 1.0:
            raise ConfigError("hotset_fraction must lie in (0, 1]")
        if not 0.0 <= self.hotset_probability <= 1.0:
            raise ConfigError("hotset_probability must lie in [0, 1]")
        if self.page_count < 1:
            raise ConfigError("page_count must be >= 1")
        if self.instructions_per_access < 1:
            raise ConfigError("instructions_per_access must be >= 1")
        for name in ("page_size_bytes", "block_size_bytes"):
            v = getattr(self, name)
            if v < 1 or v & (v - 1):
                raise ConfigError(f"{name} must be a positive power of two")
        if self.block_size_bytes > self.page_size_bytes:
            raise ConfigError("block_size_bytes must not exceed page_size_bytes")
        if self.page_count * self.page_size_bytes > MAX_ADDRESS:
            raise ConfigError("page_count * page_size_bytes exceeds the 2^48 "
                              "address space")

    def label(self):
        """Short deterministic tag for reports."""
        parts = [self.kind, f"n={self.num_events}", f"wf={self.write_fraction:g}",
                 f"pages={self.page_count}"]
        if self.kind == "zipf":
            parts.append(f"s={self.zipf_exponent:g}")
        elif self.kind == "hotset":
            parts.append(f"hot={self.hotset_fraction:g}@{self.hotset_probability:g}")
        return " ".join(parts)


def _page_picker(spec, rng):
    p = spec.page_count
    if spec.kind == "uniform":
        return lambda: rng.randrange(p)
    if spec.kind == "zipf":
        s = spec.zipf_exponent
        weights = [1.0 / (rank ** s) for rank in range(1, p + 1)]
        total = sum(weights)
        cum = []
        acc = 0.0
        for w in weights:
            acc += w
            cum.append(acc / total)
        cum[-1] = 1.0
        return lambda: bisect_right(cum, rng.random())
    if spec.kind == "hotset":
        hot = max(1, round(spec.hotset_fraction * p))
        if hot >= p:
            return lambda: rng.randrange(p)
        prob = spec.hotset_probability

        def pick():
            if rng.random() < prob:
                return rng.randrange(hot)
            return rng.randrange(hot, p)

        return pick
    raise ConfigError(f"no page picker for kind {spec.kind!r}")


def generate(spec: GeneratorSpec):
    """Yield the deterministic event stream described by ``spec``."""
    rng = random.Random(spec.seed)
    blocks_per_page = spec.page_size_bytes // spec.block_size_bytes
    pick_page = None if spec.kind == "roundrobin" else _page_picker(spec, rng)
    page_size = spec.page_size_bytes
    block_size = spec.block_size_bytes
    icount = 0
    for i in range(spec.num_events):
        icount += spec.instructions_per_access
        is_write = rng.random() < spec.write_fraction
        if pick_page is None:
            page = i % spec.page_count
            block = (i // spec.page_count) % blocks_per_page
        else:
            page = pick_page()
            block = rng.randrange(blocks_per_page)
        yield TraceEvent(is_write, page * page_size + block * block_size, icount)


def read_trace(path):
    """Yield events from a text trace.

    One event per line: ``R|W 0x<hex address> <decimal cumulative icount>``.
    ``#`` lines are comments; blank lines are skipped. Addresses must stay
    within 2^48 and icounts must never decrease.
    """
    last_icount = 0
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 3:
                raise TraceFormatError(
                    f"{path}:{lineno}: expected 'R|W 0xADDR ICOUNT', got {stripped!r}")
            kind, addr_text, icount_text = parts
            if kind not in ("R", "W"):
                raise TraceFormatError(f"{path}:{lineno}: unknown kind {kind!r}")
            if not addr_text.startswith("0x"):
                raise TraceFormatError(
                    f"{path}:{lineno}: address must be 0x-prefixed hex, got {addr_text!r}")
            try:
                addr = int(addr_text, 16)
            except ValueError:
                raise TraceFormatError(
                    f"{path}:{lineno}: bad hex address {addr_text!r}") from None
            if addr > MAX_ADDRESS:
                raise TraceFormatError(f"{path}:{lineno}: address above 2^48")
            try:
                icount = int(icount_text, 10)
            except ValueError:
                raise TraceFormatError(
                    f"{path}:{lineno}: bad instruction count {icount_text!r}") from None
            if icount < 0:
                raise TraceFormatError(f"{path}:{lineno}: negative instruction count")
            if icount < last_icount:
                raise TraceFormatError(
                    f"{path}:{lineno}: instruction count decreased "
                    f"({last_icount} -> {icount})")
            last_icount = icount
            yield TraceEvent(kind == "W", addr, icount)


def write_trace(path, events):
    """Write events in the text format ``read_trace`` accepts (LF endings)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for ev in events:
            fh.write(f"{'W' if ev.is_write else 'R'} 0x{ev.addr:x} {ev.icount}\n")
