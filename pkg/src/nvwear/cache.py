"""Set-associative write-back cache model with per-block write counting."""

from dataclasses import dataclass, field

from .errors import ConfigError


def _is_pow2(v):
    return v > 0 and (v & (v - 1)) == 0


@dataclass(frozen=True)
class CacheConfig:
    """Geometry and timing of the simulated last-level cache.

    Sizes must be powers of two with block <= page <= cache size, and the
    color count (cache / (page * associativity)) must come out >= 1.
    Latencies are whole core cycles; the defaults model a 4MB 16-way
    non-volatile LLC behind a 2GHz core.
    """

    cache_size_bytes: int = 4 * 1024 * 1024
    associativity: int = 16
    block_size_bytes: int = 64
    page_size_bytes: int = 4096
    hit_read_latency: int = 2
    hit_write_latency: int = 12
    miss_penalty: int = 160
    core_frequency_hz: int = 2_000_000_000

    # derived geometry, filled in post-init
    num_sets: int = field(init=False, repr=False, default=0)
    num_colors: int = field(init=False, repr=False, default=0)
    sets_per_color: int = field(init=False, repr=False, default=0)

    def __post_init__(self):
        for name in ("cache_size_bytes", "associativity", "block_size_bytes",
                     "page_size_bytes"):
            if not _is_pow2(getattr(self, name)):
                raise ConfigError(
                    f"{name} must be a positive power of two, got {getattr(self, name)}")
        if not self.block_size_bytes <= self.page_size_bytes <= self.cache_size_bytes:
            raise ConfigError("need block_size_bytes <= page_size_bytes <= cache_size_bytes")
        if self.hit_read_latency < 0 or self.hit_write_latency < 0 or self.miss_penalty < 0:
            raise ConfigError("latencies must be non-negative")
        if self.core_frequency_hz <= 0:
            raise ConfigError("core_frequency_hz must be positive")
        num_colors = self.cache_size_bytes // (self.page_size_bytes * self.associativity)
        if num_colors < 1:
            raise ConfigError(
                "geometry yields zero colors: cache must hold at least "
                "page_size * associativity bytes")
        object.__setattr__(self, "num_colors", num_colors)
        object.__setattr__(self, "num_sets",
                           self.cache_size_bytes // (self.block_size_bytes * self.associativity))
        object.__setattr__(self, "sets_per_color",
                           self.page_size_bytes // self.block_size_bytes)
        # with power-of-two sizes this always closes exactly
        assert self.num_sets == self.num_colors * self.sets_per_color


@dataclass(frozen=True)
class CacheBlock:
    """Read-only snapshot of one block's state."""

    tag: int | None
    valid: bool
    dirty: bool
    lru_rank: int
    write_count: int


@dataclass(slots=True)
class AccessOutcome:
    hit: bool
    evicted_dirty: bool
    fill_occurred: bool
    latency: int


def decompose_address(addr, cfg, mapping):
    """Split a physical address into (set_index, tag) through the color map.

    The page number's low bits select a memory region, the mapping table turns
    the region into a cache color, and the block offset inside the page picks
    the set within that color. The tag keeps only the address bits above the
    region bits, so remapping a region never changes any block's tag.
    """
    if len(mapping.color_of) != cfg.num_colors:
        raise ConfigError(
            f"mapping table has {len(mapping.color_of)} entries, cache has "
            f"{cfg.num_colors} colors")
    page = addr // cfg.page_size_bytes
    region = page % cfg.num_colors
    color = mapping.color_of[region]
    within = (addr % cfg.page_size_bytes) // cfg.block_size_bytes
    return color * cfg.sets_per_color + within, page // cfg.num_colors


class CacheState:
    """Tags, dirty bits, LRU order, and write counters of every block.

    LRU per set; misses allocate (write-allocate) into the lowest-index
    invalid way, else evict the least recently used block. ``count_fills``
    selects whether installing a block on a miss programs its cells (the
    default) or only demand writes do; write hits always count.
    """

    def __init__(self, cfg: CacheConfig, count_fills: bool = True):
        self.cfg = cfg
        self.count_fills = count_fills
        n, a = cfg.num_sets, cfg.associativity
        self._tags = [[None] * a for _ in range(n)]
        self._dirty = [[False] * a for _ in range(n)]
        self._where = [dict() for _ in range(n)]  # tag -> way, valid blocks only
        self._recency = [list(range(a)) for _ in range(n)]  # way ids, MRU first
        self._valid_count = [0] * n
        self.write_counts = [[0] * a for _ in range(n)]
        self.n_fills = 0
        self.n_write_hits = 0
        self.n_block_writes = 0  # total write-counter increments

    def access(self, set_index, tag, is_write) -> AccessOutcome:
        """One demand access. Hits promote to MRU; misses fill and may evict."""
        cfg = self.cfg
        where = self._where[set_index]
        rec = self._recency[set_index]
        way = where.get(tag)
        if way is not None:
            if rec[0] != way:
                rec.remove(way)
                rec.insert(0, way)
            if is_write:
                self._dirty[set_index][way] = True
                self.write_counts[set_index][way] += 1
                self.n_write_hits += 1
                self.n_block_writes += 1
                return AccessOutcome(True, False, False, cfg.hit_write_latency)
            return AccessOutcome(True, False, False, cfg.hit_read_latency)

        tags = self._tags[set_index]
        if self._valid_count[set_index] < cfg.associativity:
            way = tags.index(None)
            self._valid_count[set_index] += 1
            evicted_dirty = False
        else:
            way = rec[-1]
            evicted_dirty = self._dirty[set_index][way]
            del where[tags[way]]
        tags[way] = tag
        where[tag] = way
        self._dirty[set_index][way] = is_write
        if is_write or self.count_fills:
            self.write_counts[set_index][way] += 1
            self.n_block_writes += 1
        self.n_fills += 1
        if rec[0] != way:
            rec.remove(way)
            rec.insert(0, way)
        # miss pays the memory round trip plus programming the filled block
        return AccessOutcome(False, evicted_dirty, True,
                             cfg.miss_penalty + cfg.hit_write_latency)

    def flush_color(self, color):
        """Invalidate every block of one color; returns dirty blocks written back.

        Write counters are not touched: flushing moves data, it does not
        program cache cells.
        """
        cfg = self.cfg
        if not 0 <= color < cfg.num_colors:
            raise ValueError(f"color {color} out of range (cache has {cfg.num_colors})")
        spc = cfg.sets_per_color
        writebacks = 0
        for s in range(color * spc, (color + 1) * spc):
            tags = self._tags[s]
            dirty = self._dirty[s]
            for w in range(cfg.associativity):
                if tags[w] is not None:
                    if dirty[w]:
                        writebacks += 1
                    tags[w] = None
                    dirty[w] = False
            self._where[s].clear()
            self._valid_count[s] = 0
        return writebacks

    def max_block_writes(self):
        return max(max(row) for row in self.write_counts)

    def block(self, set_index, way) -> CacheBlock:
        tag = self._tags[set_index][way]
        return CacheBlock(tag=tag,
                          valid=tag is not None,
                          dirty=self._dirty[set_index][way],
                          lru_rank=self._recency[set_index].index(way),
                          write_count=self.write_counts[set_index][way])

    def lru_ranks(self, set_index):
        """Rank of each way (0 = most recent)."""
        rec = self._recency[set_index]
        ranks = [0] * self.cfg.associativity
        for rank, way in enumerate(rec):
            ranks[way] = rank
        return ranks
