"""Hand-rolled oracles for the test suite.

These duplicate, through deliberately different code (selection sort,
statistics.pstdev, straight-line control flow), the decision procedure the
production policy module implements. They must stay independent of the
package internals they check.
"""

import statistics


def sort_colors(counts, descending):
    """Selection sort of color ids by count; earlier (smaller) id wins ties."""
    remaining = list(range(len(counts)))
    ordered = []
    while remaining:
        best = remaining[0]
        for c in remaining[1:]:
            if descending:
                if counts[c] > counts[best]:
                    best = c
            elif counts[c] < counts[best]:
                best = c
        remaining.remove(best)
        ordered.append(best)
    return ordered


def plan_remap_oracle(last_interval, cumulative, beta, swap_limit, mode):
    """Returns (ran, swaps, sdw, n_higher) for one decision."""
    n = len(last_interval)
    sdw = statistics.pstdev(last_interval)
    avg = sum(last_interval) / n
    n_higher = 0
    for v in last_interval:
        if v > avg:
            n_higher += 1
    if sdw < beta:
        return False, [], sdw, n_higher
    l1 = sort_colors(last_interval, descending=True)
    l2 = sort_colors(cumulative, descending=False)
    if mode == "min":
        n_swap = min(n_higher, swap_limit)
    else:
        n_swap = max(n_higher, swap_limit)
        if n_swap > n // 2:
            n_swap = n // 2
    swaps = []
    for k in range(1, n_swap + 1):
        swaps.append((l1[k - 1], l2[k - 1]))
    return True, swaps, sdw, n_higher
