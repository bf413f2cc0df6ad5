"""Persistent-group results and their analysis.

Holds the final outcome of a tracking run (every cluster mapped to a
dynamic-cluster id, plus the per-DC presence and member history) and the
read-only analyses on top of it: life-cycle event classification,
membership auto-correlation, total consistency, and summary statistics.
All functions here are pure; results are treated as immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import fmean

from .model import ClusterRef, ClusteringSequence

__all__ = [
    "DcSeries",
    "DynamicClustering",
    "LifecycleEvent",
    "classify_events",
    "autocorrelation",
    "total_consistency",
    "SummaryStats",
    "summary_stats",
]


@dataclass(frozen=True)
class DcSeries:
    """One dynamic cluster: where it exists and what it contains there."""

    presence: tuple[int, ...]  # strictly increasing snapshot indices
    clusters_by_time: dict[int, tuple[int, ...]]
    members_by_time: dict[int, frozenset[str]]

    @property
    def lifespan(self) -> int:
        return len(self.presence)

    def member_snapshots(self) -> int:
        """Total member-presence count over the DC's lifetime."""
        return sum(len(self.members_by_time[t]) for t in self.presence)


@dataclass(frozen=True)
class DynamicClustering:
    """Final association of every cluster to a dynamic-cluster id."""

    labels: dict[ClusterRef, int]
    dcs: dict[int, DcSeries]
    x_used: int

    def members_at(self, i: int) -> frozenset[str]:
        """All members present at snapshot i (union over DCs)."""
        out: set[str] = set()
        for series in self.dcs.values():
            m = series.members_by_time.get(i)
            if m:
                out.update(m)
        return frozenset(out)


@dataclass(frozen=True)
class LifecycleEvent:
    """One life-cycle event of a dynamic cluster.

    kind is one of birth, death, growth, shrinkage, split, merge. For
    split/merge, `related` lists the other dynamic clusters involved; for
    growth/shrinkage `delta` is the signed member-count change.
    """

    kind: str
    time: int
    dc: int
    related: tuple[int, ...] = ()
    delta: int = 0


def _sort_key(ev: LifecycleEvent) -> tuple:
    return (ev.time, ev.dc, ev.kind, ev.related)


def classify_events(
    result: DynamicClustering, seq: ClusteringSequence
) -> list[LifecycleEvent]:
    """Classify all life-cycle events of a tracking result.

    Events are evaluated on DC member sets. Birth requires that no member
    of the DC's first member set was present at the previous snapshot;
    death that no member of the last set survives to the next snapshot.
    Both are therefore optional, and undefined at the sequence boundaries.
    Split (merge) fires when a DC's members spread over several clusters
    at the next (previous) snapshot that belong to at least two distinct
    DCs overall. Growth and shrinkage are reported per consecutive
    presence pair with non-zero size change; events are not mutually
    exclusive.
    """
    t_total = len(seq)
    member_maps: dict[int, dict[str, int]] = {}
    events: list[LifecycleEvent] = []
    for dc_id in sorted(result.dcs):
        series = result.dcs[dc_id]
        first = series.presence[0]
        last = series.presence[-1]
        if first >= 1:
            prior = seq.snapshots[first - 1].members
            if not (series.members_by_time[first] & prior):
                events.append(LifecycleEvent("birth", first, dc_id))
        if last + 1 < t_total:
            after = seq.snapshots[last + 1].members
            if not (series.members_by_time[last] & after):
                events.append(LifecycleEvent("death", last + 1, dc_id))
        for j in range(len(series.presence) - 1):
            i, nxt = series.presence[j], series.presence[j + 1]
            if nxt != i + 1:
                continue
            delta = len(series.members_by_time[nxt]) - len(series.members_by_time[i])
            if delta > 0:
                events.append(LifecycleEvent("growth", nxt, dc_id, delta=delta))
            elif delta < 0:
                events.append(LifecycleEvent("shrinkage", nxt, dc_id, delta=delta))
        for i in series.presence:
            if i + 1 < t_total:
                ev = _split_at(result, seq, dc_id, series, i, member_maps)
                if ev is not None:
                    events.append(ev)
            if i >= 1:
                ev = _merge_at(result, seq, dc_id, series, i, member_maps)
                if ev is not None:
                    events.append(ev)
    return sorted(events, key=_sort_key)


def _cluster_of_member(
    seq: ClusteringSequence, i: int, memo: dict[int, dict[str, int]]
) -> dict[str, int]:
    table = memo.get(i)
    if table is None:
        table = {}
        for alpha, members in enumerate(seq.snapshots[i].clusters):
            for m in members:
                table[m] = alpha
        memo[i] = table
    return table


def _split_at(result, seq, dc_id, series, i, memo) -> LifecycleEvent | None:
    where = _cluster_of_member(seq, i + 1, memo)
    hit_clusters = {where[m] for m in series.members_by_time[i] if m in where}
    if len(hit_clusters) < 2:
        return None
    hit_dcs = {result.labels[ClusterRef(i + 1, a)] for a in hit_clusters}
    if len(hit_dcs | {dc_id}) < 2:
        return None
    related = tuple(sorted(hit_dcs - {dc_id}))
    return LifecycleEvent("split", i + 1, dc_id, related=related)


def _merge_at(result, seq, dc_id, series, i, memo) -> LifecycleEvent | None:
    where = _cluster_of_member(seq, i - 1, memo)
    src_clusters = {where[m] for m in series.members_by_time[i] if m in where}
    if len(src_clusters) < 2:
        return None
    src_dcs = {result.labels[ClusterRef(i - 1, a)] for a in src_clusters}
    if len(src_dcs | {dc_id}) < 2:
        return None
    related = tuple(sorted(src_dcs - {dc_id}))
    return LifecycleEvent("merge", i, dc_id, related=related)


def autocorrelation(series: DcSeries, j: int) -> float | None:
    """Jaccard overlap of a DC's members between local index j and j+1.

    Returns None when the two presences are not at consecutive snapshots
    (creation/destruction pairs are excluded from consistency).
    """
    if not (0 <= j < len(series.presence) - 1):
        raise IndexError(f"local index out of range: {j}")
    i, nxt = series.presence[j], series.presence[j + 1]
    if nxt != i + 1:
        return None
    a = series.members_by_time[i]
    b = series.members_by_time[nxt]
    return len(a & b) / len(a | b)


def total_consistency(
    result: DynamicClustering, mode: str = "all_members"
) -> float | None:
    """Average per-DC membership auto-correlation over all consecutive
    presence pairs; None when no DC has such a pair.

    mode "all_members" uses the plain Jaccard union denominator;
    "residents_only" restricts each pair's denominator to the members
    present in both snapshots system-wide, so members entering or leaving
    the dataset do not dilute the score.
    """
    if mode not in ("all_members", "residents_only"):
        raise ValueError(f"unknown consistency mode {mode!r}")
    system: dict[int, frozenset[str]] = {}

    def members_at(i: int) -> frozenset[str]:
        if i not in system:
            system[i] = result.members_at(i)
        return system[i]

    total = 0.0
    pairs = 0
    for series in result.dcs.values():
        for j in range(len(series.presence) - 1):
            i, nxt = series.presence[j], series.presence[j + 1]
            if nxt != i + 1:
                continue
            a = series.members_by_time[i]
            b = series.members_by_time[nxt]
            union = a | b
            if mode == "residents_only":
                union = union & members_at(i) & members_at(nxt)
            pairs += 1
            if union:
                total += len(a & b) / len(union)
    if pairs == 0:
        return None
    return total / pairs


@dataclass(frozen=True)
class SummaryStats:
    """Head-count statistics of a dynamic clustering."""

    dc_count: int
    lifespan_histogram: dict[int, int] = field(default_factory=dict)
    mean_lifespan: float | None = None
    weighted_mean_lifespan: float | None = None


def summary_stats(result: DynamicClustering) -> SummaryStats:
    """DC count, lifespan histogram, and (weighted) mean lifespans.

    The weighted mean weights each DC's lifespan by its total
    member-snapshot count: the lifespan of the DC an average member
    resides in.
    """
    if not result.dcs:
        return SummaryStats(dc_count=0)
    lifespans = [s.lifespan for s in result.dcs.values()]
    hist: dict[int, int] = {}
    for ls in lifespans:
        hist[ls] = hist.get(ls, 0) + 1
    weights = [s.member_snapshots() for s in result.dcs.values()]
    weighted = sum(w * ls for w, ls in zip(weights, lifespans)) / sum(weights)
    return SummaryStats(
        dc_count=len(lifespans),
        lifespan_histogram=dict(sorted(hist.items())),
        mean_lifespan=fmean(lifespans),
        weighted_mean_lifespan=weighted,
    )
