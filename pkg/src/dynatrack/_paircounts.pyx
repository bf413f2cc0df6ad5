# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled overlap counting kernel (hot path).

Two-pointer merge over the sorted member-id columns of two snapshots,
accumulating shared-member counts per (cluster_a, cluster_b) pair into a
dense matrix. The wrapper in ``kernel`` routes oversized cluster grids to
the pure-Python backend instead.
"""

from cython.view cimport array as _cvarray


def pair_counts(const long long[::1] a_ids,
                const long long[::1] a_clusters,
                const long long[::1] b_ids,
                const long long[::1] b_clusters,
                Py_ssize_t n_a,
                Py_ssize_t n_b):
    """Return sorted (cluster_a, cluster_b, shared member count) triples."""
    cdef Py_ssize_t na = a_ids.shape[0]
    cdef Py_ssize_t nb = b_ids.shape[0]
    cdef Py_ssize_t ia = 0, ib = 0, r, c
    cdef long long ma, mb

    if n_a == 0 or n_b == 0 or na == 0 or nb == 0:
        return []

    cdef long long[:, ::1] mat = _cvarray(
        shape=(n_a, n_b), itemsize=sizeof(long long), format="q"
    )
    mat[:, :] = 0

    while ia < na and ib < nb:
        ma = a_ids[ia]
        mb = b_ids[ib]
        if ma == mb:
            mat[a_clusters[ia], b_clusters[ib]] += 1
            ia += 1
            ib += 1
        elif ma < mb:
            ia += 1
        else:
            ib += 1

    out = []
    for r in range(n_a):
        for c in range(n_b):
            if mat[r, c] != 0:
                out.append((r, c, mat[r, c]))
    return out
