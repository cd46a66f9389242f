"""Geometric graph construction, graph powers, degrees and cliques.

Graphs are stored in CSR form: ``indices[indptr[v]:indptr[v + 1]]`` is the
strictly increasing neighbour list of ``v``.
"""

import itertools

import numpy as np
import scipy.sparse as sp

from ._accel import kernels, use_numba
from .errors import UsageError
from .geometry import pairwise_lp

DEFAULT_CLIQUE_BUDGET = 200_000

# cells are a hair wider than the radius so rounding in the cell index can
# never separate two points closer than r by more than one cell
_CELL_SLACK = 1.0 + 1e-9


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class Graph:
    """Immutable undirected simple graph in CSR layout."""

    __slots__ = ("indptr", "indices")

    def __init__(self, indptr, indices):
        self.indptr = _readonly(indptr)
        self.indices = _readonly(indices)

    @classmethod
    def empty(cls, n):
        return cls(np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64))

    @classmethod
    def from_pairs(cls, n, i, j):
        """Build from unique pairs with ``i < j`` (no validation)."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if use_numba():
            return cls(*kernels().pairs_to_csr(n, i, j))
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        order = np.lexsort((cols, rows))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(indptr, cols[order])

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an arbitrary edge list; duplicates and orientation are
        normalised, self-loops and out-of-range endpoints rejected."""
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise UsageError(f"edge endpoint out of range for n={n}")
        if np.any(e[:, 0] == e[:, 1]):
            raise UsageError("self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * n + hi)
        return cls.from_pairs(n, keys // n, keys % n)

    @classmethod
    def from_adjacency(cls, adj):
        """Build from a mapping or sequence ``v -> iterable of neighbours``."""
        items = adj.items() if isinstance(adj, dict) else enumerate(adj)
        n = len(adj)
        return cls.from_edges(n, [(u, v) for u, nbrs in items for v in nbrs])

    @property
    def n(self):
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self):
        return self.indices.shape[0] // 2

    @property
    def degrees(self):
        return np.diff(self.indptr)

    @property
    def adjacency(self):
        return [self.neighbors(v) for v in range(self.n)]

    def neighbors(self, v):
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edges(self):
        """``(m, 2)`` array of edges ``i < j`` in lexicographic order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def edge_keys(self):
        e = self.edges()
        return e[:, 0] * self.n + e[:, 1]

    def is_subgraph_of(self, other):
        """True when every edge of ``self`` is an edge of ``other``."""
        if self.n != other.n:
            return False
        return bool(np.all(np.isin(self.edge_keys(), other.edge_keys(), assume_unique=True)))

    def check(self):
        """Raise ``AssertionError`` if the CSR structure breaks an invariant."""
        n = self.n
        assert self.indptr[0] == 0 and self.indptr[-1] == self.indices.shape[0]
        assert np.all(np.diff(self.indptr) >= 0)
        if self.indices.size:
            assert self.indices.min() >= 0 and self.indices.max() < n
        rows = np.repeat(np.arange(n), self.degrees)
        assert not np.any(rows == self.indices), "self-loop"
        step = np.diff(self.indices)
        same_row = np.diff(rows) == 0
        assert np.all(step[same_row] > 0), "rows not strictly sorted"
        fwd = np.sort(rows * n + self.indices)
        back = np.sort(self.indices * n + rows)
        assert np.array_equal(fwd, back), "asymmetric adjacency"
        assert self.indices.shape[0] % 2 == 0

    def to_scipy(self):
        data = np.ones(self.indices.shape[0], dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.indptr, other.indptr) and np.array_equal(
            self.indices, other.indices
        )

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


# -- construction ----------------------------------------------------------


class CellGrid:
    """Uniform grid of cubes slightly wider than ``side`` over a point set."""

    def __init__(self, points, side):
        n, d = points.shape
        lo = points.min(axis=0)
        cells = np.floor((points - lo) / (side * _CELL_SLACK)).astype(np.int64)
        dims = cells.max(axis=0) + 1
        if np.sum(np.log2(dims.astype(float))) > 62:
            raise UsageError("radius too small for the cell grid of this point cloud")
        strides = np.ones(d, dtype=np.int64)
        for k in range(d - 2, -1, -1):
            strides[k] = strides[k + 1] * dims[k + 1]
        keys = cells @ strides
        order = np.argsort(keys, kind="stable")
        uniq, starts, counts = np.unique(keys[order], return_index=True, return_counts=True)
        self.cells = cells
        self.dims = dims
        self.strides = strides
        self.order = order.astype(np.int64)
        self.uniq = uniq
        self.starts = starts.astype(np.int64)
        self.counts = counts.astype(np.int64)
        self.offsets = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64)

    def args(self):
        return (self.cells, self.order, self.uniq, self.starts, self.counts,
                self.dims, self.strides, self.offsets)


def _cell_pairs_numpy(points, grid, r, p):
    K = grid.uniq.shape[0]
    cell_coords = grid.cells[grid.order[grid.starts]]
    out_i, out_j = [], []
    for off in grid.offsets:
        nb = cell_coords + off
        valid = np.all((nb >= 0) & (nb < grid.dims), axis=1)
        key = nb @ grid.strides
        pos = np.minimum(np.searchsorted(grid.uniq, key), K - 1)
        hit = valid & (grid.uniq[pos] == key)
        a = np.nonzero(hit)[0]
        b = pos[hit]
        ca, cb = grid.counts[a], grid.counts[b]
        tot = ca * cb
        blk = np.repeat(np.arange(a.shape[0]), tot)
        local = np.arange(tot.sum()) - np.repeat(np.cumsum(tot) - tot, tot)
        ii = grid.order[grid.starts[a][blk] + local // cb[blk]]
        jj = grid.order[grid.starts[b][blk] + local % cb[blk]]
        keep = ii < jj
        ii, jj = ii[keep], jj[keep]
        close = pairwise_lp(points[ii], points[jj], p) < r
        out_i.append(ii[close])
        out_j.append(jj[close])
    return np.concatenate(out_i), np.concatenate(out_j)


def close_pairs(points, r, p):
    """Pairs ``i < j`` with l^p distance strictly below ``r`` via a cell grid."""
    n = points.shape[0]
    if n < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    grid = CellGrid(points, r)
    if use_numba():
        return kernels().cell_pairs(points, *grid.args(), float(r), float(p))
    return _cell_pairs_numpy(points, grid, r, p)


def build_graph(cloud):
    """Geometric graph: ``i ~ j`` iff ``||X_i - X_j||_p < r`` (strict)."""
    i, j = close_pairs(cloud.points, cloud.r, cloud.p)
    return Graph.from_pairs(cloud.n, i, j)


def build_graph_bruteforce(cloud):
    """All-pairs reference construction of :func:`build_graph`."""
    pts = cloud.points
    n = cloud.n
    out_i, out_j = [], []
    for i in range(n - 1):
        dist = pairwise_lp(pts[i + 1 :], pts[i][None, :], cloud.p)
        j = np.nonzero(dist < cloud.r)[0] + i + 1
        out_i.append(np.full(j.shape[0], i, dtype=np.int64))
        out_j.append(j)
    if not out_i:
        return Graph.empty(n)
    return Graph.from_pairs(n, np.concatenate(out_i), np.concatenate(out_j))


# -- powers, degrees, cliques ---------------------------------------------


def _power_sparse(g, l):
    step = g.to_scipy() + sp.identity(g.n, dtype=np.int8, format="csr")
    reach = step.copy()
    for _ in range(l - 1):
        reach = reach @ step
        reach.data[:] = 1
    reach.setdiag(0)
    reach.eliminate_zeros()
    reach.sort_indices()
    return Graph(reach.indptr, reach.indices)


def graph_power(g, l):
    """``g^l``: vertices joined when their hop distance is between 1 and ``l``."""
    if int(l) != l or l < 1:
        raise UsageError(f"power must be a positive integer, got {l}")
    l = int(l)
    if l == 1 or g.edge_count == 0:
        return g
    if use_numba():
        return Graph(*kernels().power_bfs(g.indptr, g.indices, l))
    return _power_sparse(g, l)


def max_degree(g):
    if g.n == 0:
        raise UsageError("graph has no vertices")
    return int(g.degrees.max())


class _OutOfBudget(Exception):
    pass


class _CliqueSearch:
    """Branch and bound with greedy-colouring bounds over one candidate set.

    ``adj`` holds neighbour bitmasks in local indices.
    """

    def __init__(self, adj, best_size, budget):
        self.adj = adj
        self.best_size = best_size
        self.best = None
        self.nodes = 0
        self.budget = budget

    def color_sort(self, P):
        adj = self.adj
        order, bounds = [], []
        color = 0
        while P:
            color += 1
            Q = P
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~low & ~adj[v]
                P &= ~low
                order.append(v)
                bounds.append(color)
        return order, bounds

    def expand(self, R, P):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _OutOfBudget
        order, bounds = self.color_sort(P)
        for k in range(len(order) - 1, -1, -1):
            if len(R) + bounds[k] <= self.best_size:
                return
            v = order[k]
            R.append(v)
            sub = P & self.adj[v]
            if sub:
                self.expand(R, sub)
            elif len(R) > self.best_size:
                self.best_size = len(R)
                self.best = list(R)
            R.pop()
            P &= ~(1 << v)


def max_clique(g, budget=DEFAULT_CLIQUE_BUDGET):
    """Largest clique found and whether the search proved it maximum.

    A greedy pass seeds the incumbent; branch and bound then runs from each
    vertex over its later neighbours in degeneracy order, highest cores
    first. Building a candidate set costs one budget unit per candidate and
    every search node one unit; the search stops when ``budget`` is spent.
    """
    n = g.n
    if n == 0:
        raise UsageError("graph has no vertices")
    k = kernels()
    vert, _ = k.degeneracy_order(g.indptr, g.indices)
    best = [int(v) for v in k.greedy_clique(g.indptr, g.indices, vert)]
    pos = np.empty(n, dtype=np.int64)
    pos[vert] = np.arange(n)
    rows = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    later_count = np.bincount(rows[pos[g.indices] > pos[rows]], minlength=n)
    spent = 0
    for idx in range(n - 1, -1, -1):
        v = int(vert[idx])
        if later_count[v] + 1 <= len(best):
            continue
        nbrs = g.neighbors(v)
        later = nbrs[pos[nbrs] > idx]
        spent += later.shape[0]
        if spent > budget:
            return sorted(best), False
        adj = [int.from_bytes(row.tobytes(), "little")
               for row in k.local_masks(g.indptr, g.indices, later)]
        search = _CliqueSearch(adj, len(best) - 1, budget - spent)
        try:
            search.expand([], (1 << len(adj)) - 1)
        except _OutOfBudget:
            if search.best is not None:
                best = [v] + [int(later[a]) for a in search.best]
            return sorted(best), False
        spent += search.nodes
        if search.best is not None:
            best = [v] + [int(later[a]) for a in search.best]
    return sorted(best), True


def clique_number(g, budget=DEFAULT_CLIQUE_BUDGET):
    """``(lower, exact)``: size of the best clique found and whether it is omega."""
    members, exact = max_clique(g, budget)
    return len(members), exact


# -- edge-list serialisation ----------------------------------------------


def format_edgelist(g):
    """``"n m"`` header, then ``"i j"`` lines with ``i < j`` in sorted order."""
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{i} {j}" for i, j in g.edges().tolist())
    return "\n".join(lines) + "\n"


def parse_edgelist(text):
    rows = text.split("\n")
    try:
        n, m = (int(v) for v in rows[0].split())
        edges = [tuple(int(v) for v in row.split()) for row in rows[1:] if row.strip()]
    except ValueError:
        raise UsageError("malformed edge list") from None
    if len(edges) != m or any(len(e) != 2 for e in edges):
        raise UsageError(f"edge list header promises {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)
