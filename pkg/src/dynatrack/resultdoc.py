"""Versioned result documents for tracking runs.

A result document carries everything downstream consumers (event listing,
rendering) need: per snapshot the clusters with their members and dynamic
cluster id, the DC registry, and run metadata. DC ids are canonicalised
by first appearance (snapshot order, then cluster order) and the JSON
encoding is byte-deterministic, so outputs are directly comparable across
runs and implementations.
"""

from __future__ import annotations

import json

from .errors import SchemaError
from .metrics import DcSeries, DynamicClustering
from .model import ClusterRef, ClusteringSequence, sequence_from_lists

__all__ = [
    "SCHEMA_VERSION",
    "canonical_labels",
    "build_document",
    "document_to_bytes",
    "load_document",
    "clustering_from_labels",
]

SCHEMA_VERSION = 1


def canonical_labels(
    seq: ClusteringSequence, labels: dict[ClusterRef, int]
) -> dict[ClusterRef, int]:
    """Renumber DC ids by first appearance in snapshot-then-cluster order."""
    mapping: dict[int, int] = {}
    out: dict[ClusterRef, int] = {}
    for ref in seq.cluster_refs():
        dc = labels[ref]
        if dc not in mapping:
            mapping[dc] = len(mapping)
        out[ref] = mapping[dc]
    return out


def clustering_from_labels(
    seq: ClusteringSequence, labels: dict[ClusterRef, int], x: int
) -> DynamicClustering:
    """Rebuild a full result from a bare cluster-to-id association."""
    times: dict[int, dict[int, set[int]]] = {}
    for ref, dc in labels.items():
        times.setdefault(dc, {}).setdefault(ref.time, set()).add(ref.cluster)
    dcs = {}
    for dc_id, by_time in times.items():
        presence = tuple(sorted(by_time))
        members_by_time = {}
        for t in presence:
            members: set[str] = set()
            for alpha in by_time[t]:
                members.update(seq.snapshots[t].clusters[alpha])
            members_by_time[t] = frozenset(members)
        dcs[dc_id] = DcSeries(
            presence=presence,
            clusters_by_time={t: tuple(sorted(by_time[t])) for t in presence},
            members_by_time=members_by_time,
        )
    return DynamicClustering(labels=dict(labels), dcs=dcs, x_used=x)


def build_document(
    seq: ClusteringSequence,
    result: DynamicClustering,
    tool_version: str,
) -> dict:
    """Result document (canonical ids) ready for serialisation."""
    labels = canonical_labels(seq, result.labels)
    snapshots = []
    for snap, label in zip(seq.snapshots, seq.labels):
        clusters = [
            {"members": sorted(members), "dc": labels[ClusterRef(snap.index, a)]}
            for a, members in enumerate(snap.clusters)
        ]
        entry: dict = {"clusters": clusters}
        if label is not None:
            entry["label"] = label
        snapshots.append(entry)
    registry: dict[int, list[list[int]]] = {}
    for ref, dc in labels.items():
        registry.setdefault(dc, []).append([ref.time, ref.cluster])
    dcs = [
        {"id": dc, "clusters": sorted(registry[dc])} for dc in sorted(registry)
    ]
    return {
        "schema": SCHEMA_VERSION,
        "tool": "dynatrack",
        "version": tool_version,
        "history": result.x_used,
        "snapshot_count": len(seq),
        "snapshots": snapshots,
        "dcs": dcs,
    }


def document_to_bytes(doc: dict) -> bytes:
    return (
        json.dumps(doc, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        + "\n"
    ).encode("utf-8")


def load_document(
    raw: bytes | str,
) -> tuple[ClusteringSequence, dict[ClusterRef, int], int]:
    """Parse a result document back into (sequence, labels, history)."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"result document is not valid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("result document must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported schema version {doc.get('schema')!r} "
            f"(expected {SCHEMA_VERSION})"
        )
    for key in ("history", "snapshots"):
        if key not in doc:
            raise SchemaError(f"result document is missing {key!r}")
    data = []
    labels_meta: list[str | None] = []
    dc_of: dict[ClusterRef, int] = {}
    try:
        for t, entry in enumerate(doc["snapshots"]):
            row = []
            for a, cluster in enumerate(entry["clusters"]):
                row.append(cluster["members"])
                dc_of[ClusterRef(t, a)] = int(cluster["dc"])
            data.append(row)
            labels_meta.append(entry.get("label"))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed result document: {exc!r}") from exc
    seq = sequence_from_lists(data, labels_meta)
    return seq, dc_of, int(doc["history"])
