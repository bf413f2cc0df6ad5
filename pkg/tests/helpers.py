"""Shared test utilities: random instances and label comparison."""

from __future__ import annotations

import random

from dynatrack import ClusteringSequence, ClusterRef, sequence_from_lists


def random_sequence(
    rng: random.Random,
    max_t: int = 6,
    max_members: int = 20,
    max_clusters: int = 4,
    presence: float = 0.8,
) -> ClusteringSequence:
    """Small random instance: per snapshot, a random subset of a member
    pool split into up to `max_clusters` non-empty clusters."""
    t_total = rng.randint(1, max_t)
    pool = [f"m{i}" for i in range(rng.randint(1, max_members))]
    data = []
    for _ in range(t_total):
        present = [m for m in pool if rng.random() < presence]
        rng.shuffle(present)
        if not present:
            data.append([])
            continue
        k = rng.randint(1, min(max_clusters, len(present)))
        cuts = sorted(rng.sample(range(1, len(present)), k - 1)) if k > 1 else []
        clusters, prev = [], 0
        for cut in cuts + [len(present)]:
            clusters.append(present[prev:cut])
            prev = cut
        data.append(clusters)
    return sequence_from_lists(data)


def canonical(
    seq: ClusteringSequence,
    labels: dict[ClusterRef, int],
    up_to_time: int | None = None,
) -> dict[ClusterRef, int]:
    """Renumber ids by first appearance, optionally over a prefix only."""
    mapping: dict[int, int] = {}
    out: dict[ClusterRef, int] = {}
    for ref in seq.cluster_refs():
        if up_to_time is not None and ref.time > up_to_time:
            continue
        out[ref] = mapping.setdefault(labels[ref], len(mapping))
    return out


def same_partition(
    seq: ClusteringSequence,
    a: dict[ClusterRef, int],
    b: dict[ClusterRef, int],
    up_to_time: int | None = None,
) -> bool:
    return canonical(seq, a, up_to_time) == canonical(seq, b, up_to_time)


def inject_one_shot_members(
    seq: ClusteringSequence, rng: random.Random, max_share: float = 0.5
) -> ClusteringSequence:
    """Add members that exist in exactly one snapshot to existing clusters."""
    data = []
    for t, snap in enumerate(seq.snapshots):
        row = [list(c) for c in snap.clusters]
        if row:
            budget = int(len(snap.members) * max_share)
            for j in range(rng.randint(0, budget) if budget else 0):
                row[rng.randrange(len(row))].append(f"one_shot_{t}_{j}")
        data.append(row)
    return sequence_from_lists(data)
