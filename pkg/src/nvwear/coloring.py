"""Region-to-color mapping layer: the software knob that moves write traffic."""

from .errors import ConfigError


def compute_num_colors(cfg):
    """Number of cache colors: cache size / (page size * associativity)."""
    denom = cfg.page_size_bytes * cfg.associativity
    n, rem = divmod(cfg.cache_size_bytes, denom)
    if rem != 0 or n < 1:
        raise ConfigError(
            f"cache of {cfg.cache_size_bytes} bytes does not split into a whole "
            f"number of colors of {denom} bytes")
    return n


class MappingTable:
    """Bijection between memory regions and cache colors, identity at start.

    ``color_of[region]`` and ``region_of[color]`` are kept exact inverses of
    each other through every swap.
    """

    def __init__(self, num_colors):
        if num_colors < 1:
            raise ConfigError("mapping table needs at least one color")
        self.color_of = list(range(num_colors))
        self.region_of = list(range(num_colors))

    def __len__(self):
        return len(self.color_of)

    def swap(self, c1, c2):
        """Exchange the regions mapped to colors c1 and c2; c1 == c2 is a no-op."""
        n = len(self.color_of)
        if not (0 <= c1 < n and 0 <= c2 < n):
            raise ValueError(f"swap({c1}, {c2}) out of range for {n} colors")
        if c1 == c2:
            return
        r1, r2 = self.region_of[c1], self.region_of[c2]
        self.region_of[c1], self.region_of[c2] = r2, r1
        self.color_of[r1], self.color_of[r2] = c2, c1

    def apply_remap(self, cache, swaps):
        """Apply swaps in order, flushing both colors of every effective pair.

        Dirty blocks in a flushed color become memory writebacks; clean ones
        are simply dropped. Returns the total writeback count. Pairs with
        c1 == c2 change nothing and flush nothing.
        """
        writebacks = 0
        for c1, c2 in swaps:
            self.swap(c1, c2)
            if c1 != c2:
                writebacks += cache.flush_color(c1)
                writebacks += cache.flush_color(c2)
        return writebacks

    def is_consistent(self):
        """True when color_of is a permutation and region_of its exact inverse."""
        n = len(self.color_of)
        if sorted(self.color_of) != list(range(n)):
            return False
        return all(self.color_of[self.region_of[c]] == c for c in range(n))
