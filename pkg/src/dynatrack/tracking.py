"""Progressive dynamic-cluster detection.

Snapshots are processed in order. For every cluster of the newest snapshot
the algorithm searches, within the history horizon, for the earliest set
of already-labelled clusters that reciprocally holds the cluster's
majority (a bijective majority match across possibly several steps). The
cluster, every cluster on the connecting identity flow, and every cluster
marginalised by that flow inherit the dynamic-cluster id of that source
set; without a match the cluster founds a new dynamic cluster.

The search walks a tracing flow backwards layer by layer. A deeper layer
is admitted only while its forward mapping path re-enters the flow built
so far; the flow also ends where no tracing set exists, at the history
limit, or at snapshot 0. Candidate depths are the admitted layers whose
full mapping path returns exactly to the target cluster, scanned deepest
first; a candidate qualifies when its clusters all carry one dynamic
cluster id under the labels current at processing time.

Marginalised clusters are found in one pass per target instead of
iterating embedded flows: walk the mapper sets back from the target and
the tracer sets forward from the source set; whatever lies in both walks
but not on the identity flow is re-assigned to the embedding DC.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import SequencingError
from .metrics import DcSeries, DynamicClustering
from .model import ClusterRef, ClusteringSequence
from .relations import RelationCache

__all__ = [
    "tracing_path",
    "mapping_path",
    "is_bijective_match",
    "TrackingState",
    "TraceEvent",
    "new_state",
    "find_source_set",
    "IdentityFlowResult",
    "identity_flow",
    "process_snapshot",
    "track",
    "finalize",
]


def tracing_path(
    rels: RelationCache, ref: ClusterRef, n: int
) -> frozenset[ClusterRef]:
    """n-fold set-lifted tracing set of a cluster; {ref} for n=0."""
    if n < 0 or n > ref.time:
        raise IndexError(f"depth {n} out of range for cluster at time {ref.time}")
    layer = frozenset((ref,))
    for _ in range(n):
        layer = _trace_of(rels, layer)
        if not layer:
            return layer
    return layer


def mapping_path(
    rels: RelationCache, refs: Iterable[ClusterRef], n: int
) -> frozenset[ClusterRef]:
    """n-fold set-lifted mapping set of a cluster set; the set itself for n=0."""
    layer = frozenset(refs)
    if n < 0:
        raise IndexError(f"negative depth {n}")
    if not layer:
        return layer
    t = max(r.time for r in layer)
    if t + n >= len(rels.seq):
        raise IndexError(
            f"depth {n} out of range for clusters at time {t} (T={len(rels.seq)})"
        )
    for _ in range(n):
        layer = _map_of(rels, layer)
        if not layer:
            return layer
    return layer


# The lifted one-step walks below assume a homogeneous layer (all refs at
# one time point), which every caller guarantees; fetching the pair table
# once per layer keeps multi-step walks cheap.


def _pair(rels, i):
    rel = rels._pairs[i] if 0 <= i < rels.t_total - 1 else None
    return rel if rel is not None else rels.pair(i)


def _trace_of(rels, refs: frozenset[ClusterRef]) -> frozenset[ClusterRef]:
    if not refs:
        return refs
    first = next(iter(refs))
    table = _pair(rels, first.time - 1).tracing_refs
    if len(refs) == 1:
        return table[first.cluster]
    out: set[ClusterRef] = set()
    for r in refs:
        out.update(table[r.cluster])
    return frozenset(out)


def _map_of(rels, refs: frozenset[ClusterRef]) -> frozenset[ClusterRef]:
    if not refs:
        return refs
    first = next(iter(refs))
    table = _pair(rels, first.time).mapping_refs
    if len(refs) == 1:
        return table[first.cluster]
    out: set[ClusterRef] = set()
    for r in refs:
        out.update(table[r.cluster])
    return frozenset(out)


def _tracer_of(rels, refs: frozenset[ClusterRef]) -> frozenset[ClusterRef]:
    if not refs:
        return refs
    first = next(iter(refs))
    table = _pair(rels, first.time).tracer_refs
    if len(refs) == 1:
        return table[first.cluster]
    out: set[ClusterRef] = set()
    for r in refs:
        out.update(table[r.cluster])
    return frozenset(out)


def _mapper_of(rels, refs: frozenset[ClusterRef]) -> frozenset[ClusterRef]:
    if not refs:
        return refs
    first = next(iter(refs))
    table = _pair(rels, first.time - 1).mapper_refs
    if len(refs) == 1:
        return table[first.cluster]
    out: set[ClusterRef] = set()
    for r in refs:
        out.update(table[r.cluster])
    return frozenset(out)


def is_bijective_match(rels: RelationCache, ref: ClusterRef, n: int) -> bool:
    """Whether the cluster and its depth-n tracing path reciprocally hold
    each other's majorities (true for every cluster at n=0)."""
    back = tracing_path(rels, ref, n)
    if not back:
        return False
    return mapping_path(rels, back, n) == frozenset((ref,))


@dataclass(frozen=True)
class TraceEvent:
    """Audit record of one target-cluster association."""

    target: ClusterRef
    n_star: int
    dc: int
    source_set: frozenset[ClusterRef]
    flow: tuple[frozenset[ClusterRef], ...]
    marginals: frozenset[ClusterRef]


@dataclass
class TrackingState:
    """Mutable per-run state: labels, registry, id counter, frontier.

    labels maps every cluster of processed snapshots to its DC id;
    registry is the exact inverse (dc id -> time -> cluster indices).
    Mutated strictly sequentially, one snapshot and one target at a time.
    """

    history: int
    labels: dict[ClusterRef, int] = field(default_factory=dict)
    registry: dict[int, dict[int, set[int]]] = field(default_factory=dict)
    next_dc_id: int = 0
    frontier: int = -1
    trace: list[TraceEvent] | None = None

    def _assign(self, ref: ClusterRef, dc: int) -> None:
        old = self.labels.get(ref)
        if old == dc:
            return
        if old is not None:
            times = self.registry[old]
            times[ref.time].discard(ref.cluster)
            if not times[ref.time]:
                del times[ref.time]
            if not times:
                # A DC whose registry empties never existed as a
                # persistent structure; drop it entirely.
                del self.registry[old]
        self.labels[ref] = dc
        self.registry.setdefault(dc, {}).setdefault(ref.time, set()).add(ref.cluster)

    def _new_dc(self, ref: ClusterRef) -> int:
        dc = self.next_dc_id
        self.next_dc_id += 1
        self._assign(ref, dc)
        return dc


def new_state(
    seq: ClusteringSequence, x: int, trace: bool = False
) -> TrackingState:
    """Initial state: every cluster of snapshot 0 founds its own DC."""
    if x < 0:
        raise ValueError(f"history must be non-negative, got {x}")
    state = TrackingState(history=x, trace=[] if trace else None)
    for alpha in range(len(seq.snapshots[0])):
        state._new_dc(ClusterRef(0, alpha))
    state.frontier = 0
    return state


def _search_source(
    state: TrackingState, rels: RelationCache, ref: ClusterRef
) -> tuple[int, list[frozenset[ClusterRef]], list[frozenset[ClusterRef]] | None]:
    """Shared engine behind find_source_set and the snapshot pass.

    Returns (depth, tracing-flow layers, forward mapping path of the
    chosen source); depth 0 means the target founds a new DC.
    """
    layers: list[frozenset[ClusterRef]] = [frozenset((ref,))]
    full_matches: list[tuple[int, list[frozenset[ClusterRef]]]] = []
    for k in range(1, min(ref.time, state.history) + 1):
        candidate = _trace_of(rels, layers[k - 1])
        if not candidate:
            break
        admitted = False
        path = candidate
        forward: list[frozenset[ClusterRef]] = []
        for j in range(1, k + 1):
            path = _map_of(rels, path)
            if not path:
                break
            forward.append(path)
            if path <= layers[k - j]:
                admitted = True
        if not admitted:
            break
        layers.append(candidate)
        if len(forward) == k and forward[-1] == layers[0]:
            full_matches.append((k, forward))
    for k, forward in reversed(full_matches):
        source = layers[k]
        dcs = {state.labels[r] for r in source}
        if len(dcs) == 1:
            return k, layers, forward
    return 0, layers, None


def find_source_set(
    state: TrackingState, rels: RelationCache, ref: ClusterRef
) -> tuple[int, frozenset[ClusterRef]]:
    """Earliest single-DC source set of a target cluster within the horizon.

    Returns (depth, source set); depth 0 with {ref} itself means no
    qualifying earlier set exists and the target founds a new DC.
    """
    n_star, layers, _forward = _search_source(state, rels, ref)
    return n_star, layers[n_star]


@dataclass(frozen=True)
class IdentityFlowResult:
    """Clusters along which a DC identity propagates to a target.

    flow[o] holds the flow clusters o steps before the target (union of
    the tracing-path layer and the matching mapping-path layer), so
    flow[0] == {target} and source_set <= flow[n_star]. marginals are the
    clusters enclosed by the flow (reachable backwards from the target via
    mapper sets and forwards from the source set via tracer sets) that are
    not part of it; they lie strictly between source and target times.
    """

    n_star: int
    source_set: frozenset[ClusterRef]
    flow: tuple[frozenset[ClusterRef], ...]
    marginals: frozenset[ClusterRef]

    def all_flow(self) -> frozenset[ClusterRef]:
        out: set[ClusterRef] = set()
        for layer in self.flow:
            out.update(layer)
        return frozenset(out)


def identity_flow(
    rels: RelationCache,
    ref: ClusterRef,
    n_star: int,
    source_set: frozenset[ClusterRef],
    _tf_layers: Sequence[frozenset[ClusterRef]] | None = None,
    _mf_path: Sequence[frozenset[ClusterRef]] | None = None,
) -> IdentityFlowResult:
    """Assemble the identity flow and the marginalised clusters.

    The two private arguments let the snapshot pass hand over walk layers
    it already computed; results are identical either way.
    """
    flow: list[set[ClusterRef]] = [set() for _ in range(n_star + 1)]
    if _tf_layers is not None:
        for o in range(n_star + 1):
            flow[o].update(_tf_layers[o])
    else:
        layer = frozenset((ref,))
        flow[0].update(layer)
        for o in range(1, n_star + 1):
            layer = _trace_of(rels, layer)
            flow[o].update(layer)
    flow[n_star].update(source_set)
    if _mf_path is not None:
        for j in range(1, n_star + 1):
            flow[n_star - j].update(_mf_path[j - 1])
    else:
        layer = source_set
        for j in range(1, n_star + 1):
            layer = _map_of(rels, layer)
            flow[n_star - j].update(layer)

    marginals: set[ClusterRef] = set()
    if n_star >= 2:
        mapper_layers: list[frozenset[ClusterRef]] = []
        layer = frozenset((ref,))
        for _ in range(n_star - 1):
            layer = _mapper_of(rels, layer)
            mapper_layers.append(layer)
            if not layer:
                break
        tracer_by_offset: dict[int, frozenset[ClusterRef]] = {}
        layer = source_set
        for s in range(1, n_star):
            layer = _tracer_of(rels, layer)
            if not layer:
                break
            tracer_by_offset[n_star - s] = layer
        for o, mapper_layer in enumerate(mapper_layers, start=1):
            both = mapper_layer & tracer_by_offset.get(o, frozenset())
            marginals.update(both - flow[o])
    return IdentityFlowResult(
        n_star=n_star,
        source_set=source_set,
        flow=tuple(frozenset(layer) for layer in flow),
        marginals=frozenset(marginals),
    )


def process_snapshot(
    state: TrackingState,
    seq: ClusteringSequence,
    rels: RelationCache,
    i: int,
    order: Sequence[int] | None = None,
) -> TrackingState:
    """Label every cluster of snapshot i, correcting earlier associations.

    `order` overrides the canonical ascending processing order of the
    snapshot's clusters; the output is invariant under permutations (a
    property the test suite checks), so this exists for those tests.
    """
    if state.frontier != i - 1:
        raise SequencingError(
            f"cannot process snapshot {i} at frontier {state.frontier}"
        )
    m = len(seq.snapshots[i])
    if order is None:
        order = range(m)
    elif sorted(order) != list(range(m)):
        raise ValueError(f"order must be a permutation of range({m})")
    for alpha in order:
        ref = ClusterRef(i, alpha)
        n_star, layers, forward = _search_source(state, rels, ref)
        source = layers[n_star]
        if n_star == 0:
            dc = state._new_dc(ref)
            if state.trace is not None:
                state.trace.append(
                    TraceEvent(ref, 0, dc, source, (source,), frozenset())
                )
            continue
        dc = state.labels[next(iter(source))]
        result = identity_flow(
            rels, ref, n_star, source,
            _tf_layers=layers[: n_star + 1], _mf_path=forward,
        )
        for layer in result.flow:
            for r in layer:
                state._assign(r, dc)
        for r in result.marginals:
            state._assign(r, dc)
        if state.trace is not None:
            state.trace.append(
                TraceEvent(ref, n_star, dc, source, result.flow, result.marginals)
            )
    state.frontier = i
    if __debug__:
        frontier_dcs = [state.labels[ClusterRef(i, a)] for a in range(m)]
        assert len(set(frontier_dcs)) == m, (
            f"frontier labels not injective at snapshot {i}: {frontier_dcs}"
        )
    return state


def track(
    seq: ClusteringSequence,
    x: int,
    *,
    orders: dict[int, Sequence[int]] | None = None,
    trace: list[TraceEvent] | None = None,
) -> DynamicClustering:
    """Dynamic clusters of a whole sequence with an x-step history.

    `orders` (per-snapshot processing permutations) and `trace` (audit
    event sink) are test hooks; defaults give the canonical run.
    """
    rels = RelationCache(seq)
    state = new_state(seq, x, trace=trace is not None)
    for i in range(1, len(seq)):
        process_snapshot(
            state, seq, rels, i, order=orders.get(i) if orders else None
        )
    if trace is not None and state.trace is not None:
        trace.extend(state.trace)
    return finalize(state, seq)


def finalize(state: TrackingState, seq: ClusteringSequence) -> DynamicClustering:
    """Freeze a tracking state into an immutable result."""
    dcs: dict[int, DcSeries] = {}
    for dc_id, times in state.registry.items():
        presence = tuple(sorted(times))
        clusters_by_time = {t: tuple(sorted(times[t])) for t in presence}
        members_by_time = {}
        for t in presence:
            members: set[str] = set()
            for alpha in times[t]:
                members.update(seq.snapshots[t].clusters[alpha])
            members_by_time[t] = frozenset(members)
        dcs[dc_id] = DcSeries(
            presence=presence,
            clusters_by_time=clusters_by_time,
            members_by_time=members_by_time,
        )
    return DynamicClustering(
        labels=dict(state.labels), dcs=dcs, x_used=state.history
    )
