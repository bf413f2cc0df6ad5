"""Pure-Python overlap counting kernel (fallback backend).

Same contract as the compiled variant in ``_paircounts.pyx``: given the
(member id, cluster index) columns of two snapshots, count how many
members each (cluster_a, cluster_b) pair shares.
"""

from __future__ import annotations

__all__ = ["pair_counts"]


def pair_counts(
    a_ids: list[int],
    a_clusters: list[int],
    b_ids: list[int],
    b_clusters: list[int],
    n_a: int,
    n_b: int,
) -> list[tuple[int, int, int]]:
    """Return sorted (cluster_a, cluster_b, shared member count) triples.

    Only pairs with a non-zero count appear. `a_ids`/`b_ids` hold interned
    integer member ids; members present in one snapshot only never produce
    a triple, which is what makes downstream relations turnover-robust.
    """
    if n_a == 0 or n_b == 0 or not a_ids or not b_ids:
        return []
    lookup = dict(zip(b_ids, b_clusters))
    counts: dict[tuple[int, int], int] = {}
    get = lookup.get
    for m, ca in zip(a_ids, a_clusters):
        cb = get(m)
        if cb is not None:
            key = (ca, cb)
            counts[key] = counts.get(key, 0) + 1
    return sorted((ca, cb, n) for (ca, cb), n in counts.items())
