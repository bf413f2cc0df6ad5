"""Overlap-kernel backend selection.

The compiled extension is preferred when importable; otherwise (or when
``DYNATRACK_PURE_PYTHON`` is set to a non-empty value other than "0") the
pure-Python fallback is used. Both backends share one contract, tested for
equivalence in the suite and timed against each other in
``benchmarks/compare_backends.py``.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass, field

from . import _paircounts_py

__all__ = ["BACKEND", "IndexedSnapshot", "pair_counts"]

# Above this many (cluster_a, cluster_b) cells the compiled dense
# accumulator would waste memory; such pairs take the sparse Python path.
DENSE_CELL_LIMIT = 8_000_000

_FORCE_PURE = os.environ.get("DYNATRACK_PURE_PYTHON", "") not in ("", "0")

_compiled = None
if not _FORCE_PURE:
    try:
        from . import _paircounts as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


@dataclass
class IndexedSnapshot:
    """Columnar view of one snapshot: sorted interned member ids with the
    cluster index of each member."""

    n_clusters: int
    ids: list[int]
    clusters: list[int]
    _id_buf: array | None = field(default=None, repr=False)
    _cluster_buf: array | None = field(default=None, repr=False)

    def buffers(self) -> tuple[array, array]:
        if self._id_buf is None:
            self._id_buf = array("q", self.ids)
            self._cluster_buf = array("q", self.clusters)
        return self._id_buf, self._cluster_buf  # type: ignore[return-value]


def pair_counts(a: IndexedSnapshot, b: IndexedSnapshot) -> list[tuple[int, int, int]]:
    """Shared-member counts between the clusters of two snapshots.

    Returns (cluster_a, cluster_b, count) triples sorted lexicographically,
    non-zero counts only.
    """
    if (
        _compiled is not None
        and a.n_clusters * b.n_clusters <= DENSE_CELL_LIMIT
    ):
        a_ids, a_cl = a.buffers()
        b_ids, b_cl = b.buffers()
        return _compiled.pair_counts(
            a_ids, a_cl, b_ids, b_cl, a.n_clusters, b.n_clusters
        )
    return _paircounts_py.pair_counts(
        a.ids, a.clusters, b.ids, b.clusters, a.n_clusters, b.n_clusters
    )
