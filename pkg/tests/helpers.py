"""Shared fixtures-in-spirit: tiny cache geometries and differential replay."""

import random

from nvwear import CacheConfig, CacheState, MappingTable, ReferenceSimulator, decompose_address


def small_cfg(colors=4, sets_per_color=4, assoc=2, block=64, **kwargs):
    page = block * sets_per_color
    return CacheConfig(cache_size_bytes=colors * page * assoc,
                       associativity=assoc, block_size_bytes=block,
                       page_size_bytes=page, **kwargs)


def random_trace(rng, length, pages, page_bytes, block_bytes, write_bias=0.5):
    """(addr, is_write) pairs over block-aligned addresses."""
    blocks = page_bytes // block_bytes
    return [(rng.randrange(pages) * page_bytes + rng.randrange(blocks) * block_bytes,
             rng.random() < write_bias)
            for _ in range(length)]


def replay_both(cfg, trace, count_fills=True):
    """Run one access trace through the production model and the naive
    reference; returns (outcomes, ref_outcomes, cache, ref)."""
    cache = CacheState(cfg, count_fills=count_fills)
    mapping = MappingTable(cfg.num_colors)
    ref = ReferenceSimulator(cfg, count_fills=count_fills)
    outcomes = []
    ref_outcomes = []
    for addr, is_write in trace:
        set_index, tag = decompose_address(addr, cfg, mapping)
        out = cache.access(set_index, tag, is_write)
        outcomes.append((out.hit, out.evicted_dirty))
        ref_outcomes.append(ref.access_addr(addr, is_write))
    return outcomes, ref_outcomes, cache, ref


def seeded(seed):
    return random.Random(seed)
