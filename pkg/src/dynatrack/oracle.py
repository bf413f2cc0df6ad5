"""Brute-force reference for dynamic-cluster detection (small inputs only).

Replays the same snapshot-by-snapshot procedure as ``tracking`` but with
naive evaluation straight from the member sets: majority sets are
recomputed by scanning all clusters at every query, multi-step paths by
literal recursion, and the enclosed-cluster walks by scanning as well. No
relation cache or incremental structure from the main implementation is
used, so agreement between the two is meaningful evidence.

After labelling, the result is audited: every dynamic cluster must be
connected through the association events that built it, otherwise it
would decompose into independent groups and the grouping would not be
minimal. A violation raises OracleInvariantError.
"""

from __future__ import annotations

from .errors import OracleInvariantError, OracleSizeError
from .metrics import DcSeries, DynamicClustering
from .model import ClusterRef, ClusteringSequence

__all__ = ["brute_force_track", "MAX_SNAPSHOTS", "MAX_TOTAL_CLUSTERS"]

MAX_SNAPSHOTS = 8
MAX_TOTAL_CLUSTERS = 40


def brute_force_track(
    seq: ClusteringSequence,
    x: int,
    *,
    check_minimality: bool = True,
    max_snapshots: int = MAX_SNAPSHOTS,
    max_total_clusters: int = MAX_TOTAL_CLUSTERS,
) -> DynamicClustering:
    """Reference dynamic clustering for desk-scale instances.

    Refuses sequences larger than the given limits; the defaults suit the
    exhaustive recursion, raise them knowingly for bigger fixtures.
    """
    if x < 0:
        raise ValueError(f"history must be non-negative, got {x}")
    t_total = len(seq)
    total_clusters = sum(len(s) for s in seq.snapshots)
    if t_total > max_snapshots or total_clusters > max_total_clusters:
        raise OracleSizeError(
            f"instance too large for the brute-force reference "
            f"(T={t_total}, clusters={total_clusters})"
        )

    members = [
        [set(c) for c in snap.clusters] for snap in seq.snapshots
    ]

    def clusters_at(t: int) -> list[ClusterRef]:
        return [ClusterRef(t, a) for a in range(len(members[t]))]

    def trace_one(ref: ClusterRef) -> set[ClusterRef]:
        if ref.time == 0:
            return set()
        mine = members[ref.time][ref.cluster]
        scores = {
            other: len(mine & members[other.time][other.cluster])
            for other in clusters_at(ref.time - 1)
        }
        best = max(scores.values(), default=0)
        if best == 0:
            return set()
        return {o for o, s in scores.items() if s == best}

    def map_one(ref: ClusterRef) -> set[ClusterRef]:
        if ref.time + 1 >= t_total:
            return set()
        mine = members[ref.time][ref.cluster]
        scores = {
            other: len(mine & members[other.time][other.cluster])
            for other in clusters_at(ref.time + 1)
        }
        best = max(scores.values(), default=0)
        if best == 0:
            return set()
        return {o for o, s in scores.items() if s == best}

    def trace_path(refs: set[ClusterRef], n: int) -> set[ClusterRef]:
        if n == 0:
            return set(refs)
        prev = trace_path(refs, n - 1)
        out: set[ClusterRef] = set()
        for r in prev:
            out |= trace_one(r)
        return out

    def map_path(refs: set[ClusterRef], n: int) -> set[ClusterRef]:
        if n == 0:
            return set(refs)
        prev = map_path(refs, n - 1)
        out: set[ClusterRef] = set()
        for r in prev:
            out |= map_one(r)
        return out

    def mapper_of(refs: set[ClusterRef], t: int) -> set[ClusterRef]:
        # clusters at t-1 whose mapping set is a singleton inside refs
        out = set()
        for cand in clusters_at(t - 1):
            m = map_one(cand)
            if len(m) == 1 and next(iter(m)) in refs:
                out.add(cand)
        return out

    def tracer_of(refs: set[ClusterRef], t: int) -> set[ClusterRef]:
        # clusters at t+1 whose tracing set is a singleton inside refs
        out = set()
        for cand in clusters_at(t + 1):
            ts = trace_one(cand)
            if len(ts) == 1 and next(iter(ts)) in refs:
                out.add(cand)
        return out

    labels: dict[ClusterRef, int] = {}
    next_id = 0
    event_groups: list[set[ClusterRef]] = []

    def assign(ref: ClusterRef, dc: int) -> None:
        labels[ref] = dc

    for alpha in range(len(members[0])):
        assign(ClusterRef(0, alpha), next_id)
        event_groups.append({ClusterRef(0, alpha)})
        next_id += 1

    for i in range(1, t_total):
        for alpha in range(len(members[i])):
            target = ClusterRef(i, alpha)
            # walk the tracing flow backwards, admitting a layer only while
            # its forward mapping path re-enters the flow built so far
            full_depths: list[int] = []
            depth_reached = 0
            for k in range(1, min(i, x) + 1):
                candidate = trace_path({target}, k)
                if not candidate:
                    break
                admitted = False
                full = False
                for j in range(1, k + 1):
                    forward = map_path(candidate, j)
                    if not forward:
                        break
                    if forward <= trace_path({target}, k - j):
                        admitted = True
                    if j == k and forward == {target}:
                        full = True
                if not admitted:
                    break
                depth_reached = k
                if full:
                    full_depths.append(k)
            chosen = None
            for k in reversed(full_depths):
                source = trace_path({target}, k)
                if len({labels[r] for r in source}) == 1:
                    chosen = (k, source)
                    break
            if chosen is None:
                assign(target, next_id)
                event_groups.append({target})
                next_id += 1
                continue
            n_star, source = chosen
            dc = labels[next(iter(source))]
            group: set[ClusterRef] = set()
            for k in range(n_star + 1):
                group |= trace_path({target}, k)
                group |= map_path(source, k)
            flow = set(group)
            mapper_layer = {target}
            mapper_layers: dict[int, set[ClusterRef]] = {}
            for o in range(1, n_star):
                mapper_layer = mapper_of(mapper_layer, i - o + 1)
                mapper_layers[o] = mapper_layer
            tracer_layer = set(source)
            for s in range(1, n_star):
                tracer_layer = tracer_of(tracer_layer, i - n_star + s - 1)
                o = n_star - s
                both = mapper_layers.get(o, set()) & tracer_layer
                group |= both - flow
            for r in sorted(group):
                assign(r, dc)
            event_groups.append(group)

    registry: dict[int, dict[int, set[int]]] = {}
    for ref, dc in labels.items():
        registry.setdefault(dc, {}).setdefault(ref.time, set()).add(ref.cluster)

    if check_minimality:
        _audit_minimality(registry, event_groups, labels)

    dcs: dict[int, DcSeries] = {}
    for dc_id, times in registry.items():
        presence = tuple(sorted(times))
        dcs[dc_id] = DcSeries(
            presence=presence,
            clusters_by_time={t: tuple(sorted(times[t])) for t in presence},
            members_by_time={
                t: frozenset().union(*(members[t][a] for a in times[t]))
                for t in presence
            },
        )
    return DynamicClustering(labels=dict(labels), dcs=dcs, x_used=x)


def _audit_minimality(registry, event_groups, labels) -> None:
    """Each DC must stay connected through the events that built it."""
    for dc_id, times in registry.items():
        refs = {
            ClusterRef(t, a) for t, alphas in times.items() for a in alphas
        }
        if len(refs) <= 1:
            continue
        parent = {r: r for r in refs}

        def find(r):
            while parent[r] != r:
                parent[r] = parent[parent[r]]
                r = parent[r]
            return r

        for group in event_groups:
            inside = sorted(group & refs)
            for a, b in zip(inside, inside[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        roots = {find(r) for r in refs}
        if len(roots) > 1:
            raise OracleInvariantError(
                f"dynamic cluster {dc_id} decomposes into {len(roots)} "
                f"independent groups; grouping is not minimal"
            )
