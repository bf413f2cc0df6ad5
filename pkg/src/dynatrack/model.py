"""Snapshot data model: clustering sequences, parsing, resident queries.

A clustering sequence is an ordered list of snapshots; each snapshot is a
disjoint family of non-empty member-ID sets. Member IDs are opaque UTF-8
strings compared by exact equality. Snapshot order is file order; optional
labels are carried along but never used for ordering.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import ParseError, SequenceValidationError

__all__ = [
    "ClusterRef",
    "Snapshot",
    "ClusteringSequence",
    "sequence_from_lists",
    "parse_sequence",
    "sequence_to_json_dict",
    "sequence_to_json_bytes",
    "residents",
    "subsequence",
]


class ClusterRef(NamedTuple):
    """Stable handle for one cluster: (snapshot index, cluster index)."""

    time: int
    cluster: int


@dataclass(frozen=True)
class Snapshot:
    """One time point's clustering: a disjoint family of member sets."""

    index: int
    clusters: tuple[frozenset[str], ...]

    @cached_property
    def members(self) -> frozenset[str]:
        out: set[str] = set()
        for c in self.clusters:
            out.update(c)
        return frozenset(out)

    def __len__(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class ClusteringSequence:
    """Ordered snapshots plus optional per-snapshot labels."""

    snapshots: tuple[Snapshot, ...]
    labels: tuple[str | None, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.snapshots:
            raise SequenceValidationError("a sequence needs at least one snapshot")
        if not self.labels:
            object.__setattr__(self, "labels", (None,) * len(self.snapshots))
        elif len(self.labels) != len(self.snapshots):
            raise SequenceValidationError(
                f"{len(self.labels)} labels for {len(self.snapshots)} snapshots"
            )

    def __len__(self) -> int:
        return len(self.snapshots)

    def cluster_members(self, ref: ClusterRef) -> frozenset[str]:
        return self.snapshots[ref.time].clusters[ref.cluster]

    def cluster_refs(self) -> Iterable[ClusterRef]:
        for snap in self.snapshots:
            for alpha in range(len(snap.clusters)):
                yield ClusterRef(snap.index, alpha)


def sequence_from_lists(
    data: Sequence[Sequence[Iterable[str]]],
    labels: Sequence[str | None] | None = None,
) -> ClusteringSequence:
    """Build and validate a sequence from plain nested collections.

    Raises SequenceValidationError for empty clusters, empty or non-string
    member IDs, and members repeated within a snapshot.
    """
    snapshots = []
    for t, raw_clusters in enumerate(data):
        seen: set[str] = set()
        clusters = []
        for alpha, raw in enumerate(raw_clusters):
            members = list(raw)
            if not members:
                raise SequenceValidationError(
                    f"snapshot {t}: cluster {alpha} is empty"
                )
            for m in members:
                if not isinstance(m, str) or not m:
                    raise SequenceValidationError(
                        f"snapshot {t}: cluster {alpha} has a non-string or "
                        f"empty member ID ({m!r})"
                    )
                if m in seen:
                    raise SequenceValidationError(
                        f"snapshot {t}: member {m!r} appears in more than one cluster"
                    )
                seen.add(m)
            clusters.append(frozenset(members))
        snapshots.append(Snapshot(index=t, clusters=tuple(clusters)))
    return ClusteringSequence(
        snapshots=tuple(snapshots),
        labels=tuple(labels) if labels is not None else (),
    )


def _parse_json(text: str) -> ClusteringSequence:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict) or "snapshots" not in doc:
        raise ParseError('top-level JSON object must contain a "snapshots" array')
    raw_snaps = doc["snapshots"]
    if not isinstance(raw_snaps, list):
        raise ParseError('"snapshots" must be an array')
    data = []
    labels: list[str | None] = []
    for t, entry in enumerate(raw_snaps):
        if not isinstance(entry, dict) or "clusters" not in entry:
            raise ParseError(f'snapshot {t} must be an object with a "clusters" array')
        clusters = entry["clusters"]
        if not isinstance(clusters, list) or any(
            not isinstance(c, list) for c in clusters
        ):
            raise ParseError(f'snapshot {t}: "clusters" must be an array of arrays')
        label = entry.get("label")
        if label is not None and not isinstance(label, str):
            raise ParseError(f"snapshot {t}: label must be a string")
        data.append(clusters)
        labels.append(label)
    return sequence_from_lists(data, labels)


def _parse_csv(text: str) -> ClusteringSequence:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV input") from None
    if [h.strip() for h in header] != ["t", "member", "cluster"]:
        raise ParseError('CSV header must be "t,member,cluster"')
    by_time: dict[int, dict[int, list[str]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"line {lineno}: expected 3 fields, got {len(row)}")
        t_raw, member, cluster_raw = row
        try:
            t = int(t_raw)
            cluster = int(cluster_raw)
        except ValueError:
            raise ParseError(
                f"line {lineno}: t and cluster must be integers"
            ) from None
        if t < 0 or cluster < 0:
            raise ParseError(f"line {lineno}: t and cluster must be non-negative")
        by_time.setdefault(t, {}).setdefault(cluster, []).append(member)
    if not by_time:
        raise ParseError("CSV contains no data rows")
    t_max = max(by_time)
    missing = [t for t in range(t_max + 1) if t not in by_time]
    if missing:
        raise SequenceValidationError(
            f"snapshot indices have gaps: missing t={missing[0]}"
        )
    data = []
    for t in range(t_max + 1):
        clusters_for_t = by_time[t]
        c_max = max(clusters_for_t)
        gaps = [c for c in range(c_max + 1) if c not in clusters_for_t]
        if gaps:
            raise SequenceValidationError(
                f"snapshot {t}: cluster indices have gaps: missing cluster={gaps[0]}"
            )
        data.append([clusters_for_t[c] for c in range(c_max + 1)])
    return sequence_from_lists(data)


def parse_sequence(source: bytes | str, fmt: str = "json") -> ClusteringSequence:
    """Parse a clustering sequence from raw file content.

    `fmt` is "json" or "csv"; see the README for both layouts. Syntax
    problems raise ParseError, invariant violations raise
    SequenceValidationError.
    """
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    else:
        text = source
    if fmt == "json":
        return _parse_json(text)
    if fmt == "csv":
        return _parse_csv(text)
    raise ValueError(f"unknown input format {fmt!r}")


def sequence_to_json_dict(seq: ClusteringSequence) -> dict:
    """Plain-JSON form of a sequence; inverse of parse_sequence for “json”.

    Cluster membership is order-free, so members are emitted sorted.
    """
    snaps = []
    for snap, label in zip(seq.snapshots, seq.labels):
        entry: dict = {"clusters": [sorted(c) for c in snap.clusters]}
        if label is not None:
            entry["label"] = label
        snaps.append(entry)
    return {"snapshots": snaps}


def sequence_to_json_bytes(seq: ClusteringSequence) -> bytes:
    doc = sequence_to_json_dict(seq)
    return (
        json.dumps(doc, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        + "\n"
    ).encode("utf-8")


def residents(seq: ClusteringSequence, i: int, j: int) -> frozenset[str]:
    """Members present (in any cluster) in both snapshot i and snapshot j."""
    t = len(seq)
    if not (0 <= i < t) or not (0 <= j < t):
        raise IndexError(f"snapshot index out of range (T={t}, got i={i}, j={j})")
    if i == j:
        return seq.snapshots[i].members
    return seq.snapshots[i].members & seq.snapshots[j].members


def subsequence(seq: ClusteringSequence, end: int) -> ClusteringSequence:
    """Prefix of the sequence containing snapshots 0..end-1."""
    if not (1 <= end <= len(seq)):
        raise IndexError(f"prefix length out of range (T={len(seq)}, got {end})")
    return ClusteringSequence(
        snapshots=seq.snapshots[:end], labels=seq.labels[:end]
    )
