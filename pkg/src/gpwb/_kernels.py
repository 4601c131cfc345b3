"""Hot graph kernels with a numba path and a plain numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``GPWB_DISABLE_JIT`` is unset or ``0``.  Both paths return
identical results; ``benchmarks/bench_kernels.py`` compares their speed.

Graphs are passed in CSR form: ``indptr`` (n+1,) and ``indices`` (m,),
both int64, with every undirected edge stored in both directions.
Unreachable distances are reported as -1.
"""

from __future__ import annotations

import os
from collections import deque

import numpy as np

__all__ = [
    "JIT_ENABLED",
    "bfs",
    "bfs_many",
    "delta_doubled_full",
    "delta_doubled_quads",
    "circuits_dfs",
]


def _jit_requested() -> bool:
    flag = os.environ.get("GPWB_DISABLE_JIT", "0").strip().lower()
    return flag in ("", "0", "false", "no")


try:  # pragma: no cover - exercised implicitly by whichever path is live
    if not _jit_requested():
        raise ImportError("disabled by GPWB_DISABLE_JIT")
    import numba

    JIT_ENABLED = True
except ImportError:  # pragma: no cover
    numba = None
    JIT_ENABLED = False


# ----------------------------------------------------------------------------
# numba implementations


def _bfs_nb(indptr, indices, src):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return dist


def _bfs_many_nb(indptr, indices, sources):
    n = indptr.shape[0] - 1
    out = np.empty((sources.shape[0], n), dtype=np.int64)
    for i in range(sources.shape[0]):
        out[i, :] = _bfs_nb_inner(indptr, indices, sources[i])
    return out


def _delta_full_nb(dmat):
    # max over (x, y, z, w) of min((x|y)_w, (y|z)_w) - (x|z)_w, doubled
    n = dmat.shape[0]
    best = 0
    gp = np.empty((n, n), dtype=np.int64)
    for w in range(n):
        for x in range(n):
            for y in range(n):
                gp[x, y] = dmat[x, w] + dmat[y, w] - dmat[x, y]
        for x in range(n):
            for y in range(n):
                gxy = gp[x, y]
                for z in range(n):
                    gyz = gp[y, z]
                    m = gxy if gxy < gyz else gyz
                    val = m - gp[x, z]
                    if val > best:
                        best = val
    return best


def _delta_quads_nb(dmat, quads):
    best = 0
    for i in range(quads.shape[0]):
        x = quads[i, 0]
        y = quads[i, 1]
        z = quads[i, 2]
        w = quads[i, 3]
        gxy = dmat[x, w] + dmat[y, w] - dmat[x, y]
        gyz = dmat[y, w] + dmat[z, w] - dmat[y, z]
        gxz = dmat[x, w] + dmat[z, w] - dmat[x, z]
        m = gxy if gxy < gyz else gyz
        if m - gxz > best:
            best = m - gxz
    return best


def _circuits_nb(indptr, indices, a, b, nmax, dist_to_a, cap, out):
    # Enumerate simple paths b -> a of length 2..nmax-1 avoiding the edge (a, b).
    # Each one closes with the edge (a, b) into a circuit of length <= nmax.
    n = indptr.shape[0] - 1
    on_path = np.zeros(n, dtype=np.bool_)
    path = np.empty(nmax + 1, dtype=np.int64)
    cursor = np.empty(nmax + 1, dtype=np.int64)
    count = 0
    path[0] = b
    on_path[b] = True
    on_path[a] = True
    cursor[0] = indptr[b]
    depth = 0
    while depth >= 0:
        u = path[depth]
        if cursor[depth] >= indptr[u + 1]:
            if depth > 0:
                on_path[u] = False
            depth -= 1
            continue
        w = indices[cursor[depth]]
        cursor[depth] += 1
        step = depth + 1
        if w == a:
            if step >= 2 and step + 1 <= nmax:
                if count >= cap:
                    return -1
                for t in range(step):
                    out[count, t] = path[t]
                out[count, step] = a
                for t in range(step + 1, nmax + 1):
                    out[count, t] = -1
                count += 1
            continue
        if on_path[w]:
            continue
        # remaining edges after reaching w: back to a, then the closing edge
        if dist_to_a[w] < 0 or step + dist_to_a[w] + 1 > nmax:
            continue
        depth = step
        path[depth] = w
        on_path[w] = True
        cursor[depth] = indptr[w]
    return count


if JIT_ENABLED:
    _bfs_nb_inner = numba.njit(cache=True)(_bfs_nb)
    _bfs_many_impl = numba.njit(cache=True)(_bfs_many_nb)
    _delta_full_impl = numba.njit(cache=True)(_delta_full_nb)
    _delta_quads_impl = numba.njit(cache=True)(_delta_quads_nb)
    _circuits_impl = numba.njit(cache=True)(_circuits_nb)


# ----------------------------------------------------------------------------
# numpy fallbacks


def _bfs_np(indptr, indices, src):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.array([src], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        starts = indptr[frontier]
        stops = indptr[frontier + 1]
        lengths = stops - starts
        total = int(lengths.sum())
        if total == 0:
            break
        # flat positions of every neighbour slot of every frontier vertex
        shift = np.repeat(starts - (np.cumsum(lengths) - lengths), lengths)
        nbrs = indices[shift + np.arange(total)]
        nbrs = np.unique(nbrs[dist[nbrs] < 0])
        dist[nbrs] = level
        frontier = nbrs
    return dist


def _delta_full_np(dmat):
    n = dmat.shape[0]
    best = 0
    for w in range(n):
        gp = dmat[:, w][:, None] + dmat[:, w][None, :] - dmat
        # m[x, y, z] = min(gp[x, y], gp[y, z]) - gp[x, z]
        m = np.minimum(gp[:, :, None], gp[None, :, :]) - gp[:, None, :]
        best = max(best, int(m.max()))
    return best


def _delta_quads_np(dmat, quads):
    x, y, z, w = quads.T
    gxy = dmat[x, w] + dmat[y, w] - dmat[x, y]
    gyz = dmat[y, w] + dmat[z, w] - dmat[y, z]
    gxz = dmat[x, w] + dmat[z, w] - dmat[x, z]
    vals = np.minimum(gxy, gyz) - gxz
    return max(0, int(vals.max())) if vals.size else 0


def _circuits_py(indptr, indices, a, b, nmax, dist_to_a, cap):
    found = []
    path = [b]
    on_path = {a, b}
    stack = [iter(indices[indptr[b]:indptr[b + 1]].tolist())]
    while stack:
        advanced = False
        for w in stack[-1]:
            step = len(path)
            if w == a:
                if step >= 2 and step + 1 <= nmax:
                    if len(found) >= cap:
                        return None
                    found.append(path + [a])
                continue
            if w in on_path:
                continue
            if dist_to_a[w] < 0 or step + dist_to_a[w] + 1 > nmax:
                continue
            path.append(w)
            on_path.add(w)
            stack.append(iter(indices[indptr[w]:indptr[w + 1]].tolist()))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if len(path) > 1:
                on_path.discard(path.pop())
            else:
                path.pop()
    return found


# ----------------------------------------------------------------------------
# public entry points


def _as_csr(indptr, indices):
    return (np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int64))


def bfs(indptr, indices, src: int) -> np.ndarray:
    """Unweighted single-source distances (-1 where unreachable)."""
    indptr, indices = _as_csr(indptr, indices)
    if JIT_ENABLED:
        return _bfs_nb_inner(indptr, indices, int(src))
    return _bfs_np(indptr, indices, int(src))


def bfs_many(indptr, indices, sources) -> np.ndarray:
    """Distance rows for each source, shape (len(sources), n)."""
    indptr, indices = _as_csr(indptr, indices)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    if JIT_ENABLED:
        return _bfs_many_impl(indptr, indices, sources)
    n = indptr.shape[0] - 1
    out = np.empty((sources.shape[0], n), dtype=np.int64)
    for i, s in enumerate(sources):
        out[i] = _bfs_np(indptr, indices, int(s))
    return out


def delta_doubled_full(dmat) -> int:
    """Twice the four-point delta over every ordered quadruple of ``dmat``."""
    dmat = np.ascontiguousarray(dmat, dtype=np.int64)
    if dmat.shape[0] == 0:
        return 0
    if JIT_ENABLED:
        return int(_delta_full_impl(dmat))
    return _delta_full_np(dmat)


def delta_doubled_quads(dmat, quads) -> int:
    """Twice the four-point delta over the listed (x, y, z, w) index rows."""
    dmat = np.ascontiguousarray(dmat, dtype=np.int64)
    quads = np.ascontiguousarray(quads, dtype=np.int64).reshape(-1, 4)
    if quads.shape[0] == 0:
        return 0
    if JIT_ENABLED:
        return int(_delta_quads_impl(dmat, quads))
    return _delta_quads_np(dmat, quads)


def circuits_dfs(indptr, indices, a: int, b: int, nmax: int, dist_to_a, cap: int):
    """Closed paths ``[b, ..., a]`` that complete the edge (a, b) to a circuit.

    ``dist_to_a`` must be BFS distances to ``a`` in the graph with the edge
    (a, b) removed; it prunes branches that cannot close in time.  Returns a
    list of vertex-index lists, or ``None`` when more than ``cap`` exist.
    """
    indptr, indices = _as_csr(indptr, indices)
    dist_to_a = np.ascontiguousarray(dist_to_a, dtype=np.int64)
    if nmax < 3:
        return []
    if JIT_ENABLED:
        out = np.empty((cap, nmax + 1), dtype=np.int64)
        count = _circuits_impl(indptr, indices, int(a), int(b), int(nmax),
                               dist_to_a, int(cap), out)
        if count < 0:
            return None
        rows = out[:count]
        return [row[row >= 0].tolist() for row in rows]
    return _circuits_py(indptr, indices, int(a), int(b), int(nmax), dist_to_a, int(cap))
