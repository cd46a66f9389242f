"""Compiled inner loops.

Callers obtain this module through :func:`_accel.kernels`, which hands out an
uncompiled copy when ``DISTCOLOR_BACKEND=numpy``. Graphs are passed as CSR
pairs ``(indptr, indices)`` with sorted neighbour rows.
"""

import numpy as np

from ._accel import njit


@njit
def _dist(pts, i, j, p):
    d = pts.shape[1]
    if p == 2.0:
        acc = 0.0
        for k in range(d):
            t = pts[i, k] - pts[j, k]
            acc += t * t
        return np.sqrt(acc)
    if p == 1.0:
        acc = 0.0
        for k in range(d):
            acc += abs(pts[i, k] - pts[j, k])
        return acc
    if np.isinf(p):
        acc = 0.0
        for k in range(d):
            t = abs(pts[i, k] - pts[j, k])
            if t > acc:
                acc = t
        return acc
    acc = 0.0
    for k in range(d):
        acc += abs(pts[i, k] - pts[j, k]) ** p
    return acc ** (1.0 / p)


@njit
def _grow(buf, need):
    if need <= buf.shape[0]:
        return buf
    cap = buf.shape[0] * 2
    while cap < need:
        cap *= 2
    out = np.empty(cap, dtype=buf.dtype)
    out[: buf.shape[0]] = buf
    return out


@njit
def _cell_lookup(uniq, key):
    b = np.searchsorted(uniq, key)
    if b < uniq.shape[0] and uniq[b] == key:
        return b
    return -1


@njit
def cell_pairs(pts, cells, order, uniq, starts, counts, dims, strides, offsets, r, p):
    """All pairs ``i < j`` at l^p distance strictly below ``r``.

    ``cells`` holds integer cell coordinates per point, ``order`` sorts points
    by linear cell key, ``uniq/starts/counts`` describe the occupied cells in
    that order and ``offsets`` lists the ``3^d`` neighbour displacements.
    """
    d = pts.shape[1]
    cap = 1024
    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    m = 0
    nc = np.empty(d, dtype=np.int64)
    for a in range(uniq.shape[0]):
        rep = order[starts[a]]
        for o in range(offsets.shape[0]):
            key = 0
            inside = True
            for k in range(d):
                nc[k] = cells[rep, k] + offsets[o, k]
                if nc[k] < 0 or nc[k] >= dims[k]:
                    inside = False
                key += nc[k] * strides[k]
            if not inside:
                continue
            b = _cell_lookup(uniq, key)
            if b < 0:
                continue
            for s in range(starts[a], starts[a] + counts[a]):
                i = order[s]
                for t in range(starts[b], starts[b] + counts[b]):
                    j = order[t]
                    if i < j and _dist(pts, i, j, p) < r:
                        if m == out_i.shape[0]:
                            out_i = _grow(out_i, m + 1)
                            out_j = _grow(out_j, m + 1)
                        out_i[m] = i
                        out_j[m] = j
                        m += 1
    return out_i[:m].copy(), out_j[:m].copy()


@njit
def power_bfs(indptr, indices, l):
    """CSR of the ``l``-th power by depth-limited BFS from every vertex."""
    n = indptr.shape[0] - 1
    mark = np.full(n, -1, dtype=np.int64)
    frontier = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    found = np.empty(n, dtype=np.int64)
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    out = np.empty(max(16, 2 * indices.shape[0]), dtype=np.int64)
    total = 0
    for s in range(n):
        mark[s] = s
        frontier[0] = s
        fsize = 1
        cnt = 0
        for _ in range(l):
            nsize = 0
            for q in range(fsize):
                u = frontier[q]
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if mark[v] != s:
                        mark[v] = s
                        nxt[nsize] = v
                        nsize += 1
                        found[cnt] = v
                        cnt += 1
            frontier, nxt = nxt, frontier
            fsize = nsize
            if fsize == 0:
                break
        out = _grow(out, total + cnt)
        out[total : total + cnt] = np.sort(found[:cnt])
        total += cnt
        out_ptr[s + 1] = total
    return out_ptr, out[:total].copy()


@njit
def far_pairs(pts, cells, order, uniq, starts, counts, dims, strides, offsets,
              reach, p, indptr, indices, l):
    """Count pairs ``i < j`` closer than ``reach`` but more than ``l`` hops apart.

    The grid arguments describe cells of side ``reach``; ``indptr/indices``
    is the graph whose hop distance is tested.
    """
    n = pts.shape[0]
    d = pts.shape[1]
    mark = np.full(n, -1, dtype=np.int64)
    frontier = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    nc = np.empty(d, dtype=np.int64)
    count = 0
    for a in range(uniq.shape[0]):
        rep = order[starts[a]]
        for s in range(starts[a], starts[a] + counts[a]):
            i = order[s]
            mark[i] = i
            frontier[0] = i
            fsize = 1
            for _ in range(l):
                nsize = 0
                for q in range(fsize):
                    u = frontier[q]
                    for e in range(indptr[u], indptr[u + 1]):
                        v = indices[e]
                        if mark[v] != i:
                            mark[v] = i
                            nxt[nsize] = v
                            nsize += 1
                frontier, nxt = nxt, frontier
                fsize = nsize
                if fsize == 0:
                    break
            for o in range(offsets.shape[0]):
                key = 0
                inside = True
                for k in range(d):
                    nc[k] = cells[rep, k] + offsets[o, k]
                    if nc[k] < 0 or nc[k] >= dims[k]:
                        inside = False
                    key += nc[k] * strides[k]
                if not inside:
                    continue
                b = _cell_lookup(uniq, key)
                if b < 0:
                    continue
                for t in range(starts[b], starts[b] + counts[b]):
                    j = order[t]
                    if j > i and mark[j] != i and _dist(pts, i, j, p) < reach:
                        count += 1
    return count


@njit
def greedy_colors(indptr, indices, order):
    """First-fit colouring visiting vertices in ``order``."""
    n = indptr.shape[0] - 1
    colors = np.full(n, -1, dtype=np.int64)
    maxdeg = 0
    for v in range(n):
        if indptr[v + 1] - indptr[v] > maxdeg:
            maxdeg = indptr[v + 1] - indptr[v]
    stamp = np.full(maxdeg + 2, -1, dtype=np.int64)
    for v in order:
        for e in range(indptr[v], indptr[v + 1]):
            c = colors[indices[e]]
            if c >= 0:
                stamp[c] = v
        c = 0
        while stamp[c] == v:
            c += 1
        colors[v] = c
    return colors


@njit
def _heap_push(heap, size, key):
    heap[size] = key
    k = size
    while k > 0:
        parent = (k - 1) // 2
        if heap[parent] >= heap[k]:
            break
        heap[parent], heap[k] = heap[k], heap[parent]
        k = parent
    return size + 1


@njit
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    k = 0
    while True:
        left = 2 * k + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and heap[left + 1] > heap[left]:
            child = left + 1
        if heap[k] >= heap[child]:
            break
        heap[k], heap[child] = heap[child], heap[k]
        k = child
    return top, size


@njit
def dsatur_colors(indptr, indices):
    """DSATUR: most distinct neighbour colours first, then degree, then index.

    Candidates sit in a max-heap keyed by ``(sat, deg, n - 1 - v)`` packed
    into one int64; stale entries are skipped when popped.
    """
    n = indptr.shape[0] - 1
    deg = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    width = maxdeg + 2
    seen = np.zeros((n, width), dtype=np.bool_)
    sat = np.zeros(n, dtype=np.int64)
    colors = np.full(n, -1, dtype=np.int64)
    base = (maxdeg + 1) * n
    heap = np.empty(n + indices.shape[0] + 1, dtype=np.int64)
    size = 0
    for v in range(n):
        size = _heap_push(heap, size, deg[v] * n + (n - 1 - v))
    done = 0
    while done < n:
        key, size = _heap_pop(heap, size)
        s = key // base
        rest = key - s * base
        v = n - 1 - (rest % n)
        if colors[v] >= 0 or s != sat[v]:
            continue
        c = 0
        while seen[v, c]:
            c += 1
        colors[v] = c
        done += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if colors[u] < 0 and not seen[u, c]:
                seen[u, c] = True
                sat[u] += 1
                size = _heap_push(heap, size, sat[u] * base + deg[u] * n + (n - 1 - u))
    return colors


@njit
def degeneracy_order(indptr, indices):
    """Smallest-degree-first removal order and core numbers (Batagelj-Zaversnik)."""
    n = indptr.shape[0] - 1
    deg = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    bins = np.zeros(maxdeg + 1, dtype=np.int64)
    for v in range(n):
        bins[deg[v]] += 1
    start = 0
    for k in range(maxdeg + 1):
        num = bins[k]
        bins[k] = start
        start += num
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    for v in range(n):
        pos[v] = bins[deg[v]]
        vert[pos[v]] = v
        bins[deg[v]] += 1
    for k in range(maxdeg, 0, -1):
        bins[k] = bins[k - 1]
    bins[0] = 0
    for i in range(n):
        v = vert[i]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bins[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bins[du] += 1
                deg[u] -= 1
    return vert, deg


@njit
def greedy_clique(indptr, indices, vert):
    """Largest clique found by greedy growth from every vertex.

    From each vertex ``v`` the candidates are its neighbours later in the
    degeneracy order ``vert``; the highest-degree candidate is added until
    none remain. Seeds whose candidate set cannot beat the best are skipped.
    """
    n = indptr.shape[0] - 1
    pos = np.empty(n, dtype=np.int64)
    for i in range(n):
        pos[vert[i]] = i
    mark = np.full(n, -1, dtype=np.int64)
    cand = np.empty(n, dtype=np.int64)
    clique = np.empty(n, dtype=np.int64)
    best = np.empty(n, dtype=np.int64)
    best_size = 0
    tick = 0
    for idx in range(n - 1, -1, -1):
        v = vert[idx]
        k = 0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if pos[u] > idx:
                cand[k] = u
                k += 1
        if k + 1 <= best_size:
            continue
        size = 1
        clique[0] = v
        while k > 0:
            pick = cand[0]
            for q in range(1, k):
                c = cand[q]
                dc = indptr[c + 1] - indptr[c]
                dp = indptr[pick + 1] - indptr[pick]
                if dc > dp or (dc == dp and c < pick):
                    pick = c
            clique[size] = pick
            size += 1
            tick += 1
            for e in range(indptr[pick], indptr[pick + 1]):
                mark[indices[e]] = tick
            kk = 0
            for q in range(k):
                c = cand[q]
                if c != pick and mark[c] == tick:
                    cand[kk] = c
                    kk += 1
            k = kk
            if size + k <= best_size:
                break
        if size > best_size:
            best_size = size
            best[:size] = clique[:size]
    return best[:best_size].copy()


@njit
def pairs_to_csr(n, pi, pj):
    """Symmetric CSR with sorted rows from unique pairs ``i < j``."""
    indptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(pi.shape[0]):
        indptr[pi[e] + 1] += 1
        indptr[pj[e] + 1] += 1
    for v in range(n):
        indptr[v + 1] += indptr[v]
    fill = indptr[:-1].copy()
    indices = np.empty(2 * pi.shape[0], dtype=np.int64)
    for e in range(pi.shape[0]):
        a = pi[e]
        b = pj[e]
        indices[fill[a]] = b
        fill[a] += 1
        indices[fill[b]] = a
        fill[b] += 1
    for v in range(n):
        indices[indptr[v] : indptr[v + 1]].sort()
    return indptr, indices


@njit
def local_masks(indptr, indices, members):
    """Adjacency among ``members`` as little-endian uint64 bit rows."""
    k = members.shape[0]
    words = max(1, (k + 63) // 64)
    out = np.zeros((k, words), dtype=np.uint64)
    n = indptr.shape[0] - 1
    local = np.full(n, -1, dtype=np.int64)
    for a in range(k):
        local[members[a]] = a
    for a in range(k):
        u = members[a]
        for e in range(indptr[u], indptr[u + 1]):
            b = local[indices[e]]
            if b >= 0:
                out[a, b // 64] |= np.uint64(1) << np.uint64(b % 64)
    return out
