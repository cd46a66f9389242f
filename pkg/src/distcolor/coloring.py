"""Vertex colouring: greedy orders, DSATUR, exact search and brute force.

All colourings are canonicalised so colour ``0`` is the colour of vertex 0,
the next new colour met in index order is ``1``, and so on.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from ._accel import kernels
from .errors import InvariantError, UsageError
from .graph import DEFAULT_CLIQUE_BUDGET, Graph, graph_power, max_clique

DEFAULT_COLOR_BUDGET = 500_000
DEFAULT_ILP_NODES = 1_000
BRUTEFORCE_MAX_N = 10
METHODS = ("exact", "dsatur", "greedy")


def canonical(colors):
    """Relabel colours by order of first occurrence."""
    colors = np.asarray(colors, dtype=np.int64)
    if colors.size == 0:
        return colors.copy()
    _, first, inverse = np.unique(colors, return_index=True, return_inverse=True)
    rank = np.empty(first.shape[0], dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.shape[0])
    return rank[inverse]


@dataclass(frozen=True, eq=False)
class Coloring:
    colors: np.ndarray
    method: str
    proper_for: Graph = field(repr=False)

    @property
    def num_colors(self):
        return int(self.colors.max()) + 1 if self.colors.size else 0

    def is_proper(self, g=None):
        g = self.proper_for if g is None else g
        e = g.edges()
        return bool(np.all(self.colors[e[:, 0]] != self.colors[e[:, 1]]))

    def to_text(self):
        return "".join(f"{v} {c}\n" for v, c in enumerate(self.colors.tolist()))


@dataclass(frozen=True)
class ChromaticEstimate:
    """Bracket ``lower <= chi <= upper``.

    ``lower`` is the clique bound unless ``exact`` is set, in which case the
    search has certified ``lower == upper == chi``. ``clique`` always keeps
    the size of the largest clique found.
    """

    lower: int
    upper: int
    exact: bool
    clique: int = 0
    coloring: Coloring = field(default=None, compare=False, repr=False)


def _wrap(g, colors, method):
    return Coloring(canonical(colors), method, g)


def greedy_color(g, ordering="smallest-last", seed=None):
    """First-fit colouring along ``ordering``.

    ``ordering`` is ``"smallest-last"``, ``"random"`` (permutation drawn from
    ``seed``) or an explicit vertex sequence.
    """
    k = kernels()
    if isinstance(ordering, str):
        if ordering == "smallest-last":
            vert, _ = k.degeneracy_order(g.indptr, g.indices)
            order = vert[::-1].copy()
            method = "greedy-smallest-last"
        elif ordering == "random":
            order = np.random.default_rng(seed).permutation(g.n).astype(np.int64)
            method = "greedy-random"
        else:
            raise UsageError(f"unknown ordering {ordering!r}")
    else:
        order = np.asarray(ordering, dtype=np.int64)
        if order.ndim != 1 or not np.array_equal(np.sort(order), np.arange(g.n)):
            raise UsageError("ordering must be a permutation of the vertices")
        method = "greedy-given"
    return _wrap(g, k.greedy_colors(g.indptr, g.indices, order), method)


def dsatur(g):
    """DSATUR colouring, ties by degree then lowest index."""
    if g.n == 0:
        raise UsageError("graph has no vertices")
    return _wrap(g, kernels().dsatur_colors(g.indptr, g.indices), "dsatur")


class _OutOfBudget(Exception):
    pass


class _ColorSearch:
    """DSATUR-ordered backtracking that tries to beat an incumbent colouring."""

    def __init__(self, g, best, best_colors, lower, budget):
        self.n = g.n
        self.nbrs = [g.neighbors(v).tolist() for v in range(g.n)]
        self.deg = g.degrees.tolist()
        self.color = [-1] * g.n
        self.count = [[0] * best for _ in range(g.n)]
        self.sat = [0] * g.n
        self.best = best
        self.best_colors = list(best_colors)
        self.lower = lower
        self.nodes = 0
        self.budget = budget

    def assign(self, v, c):
        self.color[v] = c
        for u in self.nbrs[v]:
            self.count[u][c] += 1
            if self.count[u][c] == 1:
                self.sat[u] |= 1 << c

    def unassign(self, v, c):
        self.color[v] = -1
        for u in self.nbrs[v]:
            self.count[u][c] -= 1
            if self.count[u][c] == 0:
                self.sat[u] &= ~(1 << c)

    def select(self):
        pick, ps, pd = -1, -1, -1
        for v in range(self.n):
            if self.color[v] < 0:
                s = self.sat[v].bit_count()
                if s > ps or (s == ps and self.deg[v] > pd):
                    pick, ps, pd = v, s, self.deg[v]
        return pick

    def search(self, colored, used):
        """Return True once the incumbent meets the lower bound."""
        self.nodes += 1
        if self.nodes > self.budget:
            raise _OutOfBudget
        if colored == self.n:
            self.best = used
            self.best_colors = list(self.color)
            return used <= self.lower
        v = self.select()
        for c in range(used + 1):
            if c >= self.best - 1:
                break
            if self.sat[v] >> c & 1:
                continue
            self.assign(v, c)
            done = self.search(colored + 1, max(used, c + 1))
            self.unassign(v, c)
            if done:
                return True
        return False


def _ilp_colorable(g, k, clique, node_limit):
    """Decide ``k``-colourability with HiGHS: True, False or None (undecided).

    Assignment model ``x[v, c]`` with ``x[a, c] + x[b, c] <= 1`` per edge; the
    clique is pinned to colours ``0..|clique|-1``. A node limit rather than a
    time limit keeps the answer independent of machine load.
    """
    n, e = g.n, g.edges()
    m = e.shape[0]
    cols = np.arange(k)
    rows_v = np.repeat(np.arange(n), k)
    cols_v = (np.arange(n)[:, None] * k + cols).ravel()
    rows_e = n + np.repeat(np.arange(m)[:, None] * k + cols, 2, axis=1).ravel()
    cols_e = np.stack([e[:, 0, None] * k + cols, e[:, 1, None] * k + cols], axis=2).ravel()
    a = sparse.csr_array(
        (np.ones(rows_v.size + rows_e.size), (np.concatenate([rows_v, rows_e]),
                                              np.concatenate([cols_v, cols_e]))),
        shape=(n + m * k, n * k),
    )
    lo = np.concatenate([np.ones(n), np.zeros(m * k)])
    lb = np.zeros(n * k)
    lb[np.asarray(clique, dtype=np.int64) * k + np.arange(len(clique))] = 1
    res = milp(np.zeros(n * k), constraints=LinearConstraint(a, lo, np.ones(n + m * k)),
               integrality=np.ones(n * k), bounds=Bounds(lb, np.ones(n * k)),
               options={"node_limit": node_limit, "presolve": True})
    if res.status == 0:
        return True, np.argmax(res.x.reshape(n, k), axis=1)
    if res.status == 2:
        return False, None
    return None, None


def exact_chromatic(g, budget=DEFAULT_COLOR_BUDGET, clique_budget=DEFAULT_CLIQUE_BUDGET,
                    ilp_nodes=DEFAULT_ILP_NODES):
    """Branch and bound for chi: clique lower bound, DSATUR incumbent.

    The largest clique found is precoloured ``0..k-1``; the remaining
    vertices are branched on in DSATUR order. When the node budget runs out,
    an integer program settles ``k``-colourability for ``k`` below the
    incumbent (``ilp_nodes=0`` skips it). ``exact`` is False when neither
    closes the gap, and the bracket is then ``[clique, incumbent]``.
    """
    if g.n == 0:
        raise UsageError("graph has no vertices")
    start = dsatur(g)
    clique, _ = max_clique(g, clique_budget)
    omega = len(clique)
    if omega == start.num_colors:
        return ChromaticEstimate(omega, omega, True, omega, _wrap(g, start.colors, "exact"))
    search = _ColorSearch(g, start.num_colors, start.colors, omega, budget)
    for c, v in enumerate(clique):
        search.assign(v, c)
    try:
        search.search(omega, omega)
    except _OutOfBudget:
        best, colors, lower = search.best, search.best_colors, omega
        while ilp_nodes and best > lower:
            ok, found = _ilp_colorable(g, best - 1, clique, ilp_nodes)
            if ok is None:
                break
            if ok:
                best, colors = best - 1, found
            else:
                lower = best
        coloring = _wrap(g, colors, "exact")
        if not coloring.is_proper() or coloring.num_colors > best:
            raise InvariantError("integer program returned an improper colouring")
        return ChromaticEstimate(lower, best, lower == best, omega, coloring)
    coloring = _wrap(g, search.best_colors, "exact")
    return ChromaticEstimate(search.best, search.best, True, omega, coloring)


def _partitions(n):
    """Restricted growth strings of length ``n`` (every set partition once)."""
    a = [0] * n
    top = [0] * n

    def rec(i):
        if i == n:
            yield a
            return
        for c in range(top[i - 1] + 2):
            a[i] = c
            top[i] = max(top[i - 1], c)
            yield from rec(i + 1)

    if n == 0:
        yield a
        return
    yield from rec(1)


def chromatic_bruteforce(g):
    """Chromatic number by enumerating every partition of the vertex set."""
    if g.n > BRUTEFORCE_MAX_N:
        raise UsageError(f"brute force is limited to n <= {BRUTEFORCE_MAX_N}, got {g.n}")
    if g.n == 0:
        return 0
    edges = [tuple(e) for e in g.edges().tolist()]
    best = g.n
    for a in _partitions(g.n):
        k = max(a) + 1
        if k < best and all(a[i] != a[j] for i, j in edges):
            best = k
    return best


def estimate(g, method="exact", budget=DEFAULT_COLOR_BUDGET, clique_budget=DEFAULT_CLIQUE_BUDGET):
    """Chromatic bracket of ``g`` by the named method."""
    if method == "exact":
        return exact_chromatic(g, budget, clique_budget)
    if method == "dsatur":
        coloring = dsatur(g)
    elif method == "greedy":
        coloring = greedy_color(g, "smallest-last")
    else:
        raise UsageError(f"unknown colouring method {method!r}")
    omega, _ = max_clique(g, clique_budget)
    k = coloring.num_colors
    return ChromaticEstimate(len(omega), k, len(omega) == k, len(omega), coloring)


def distant_chromatic(g, l, method="exact", budget=DEFAULT_COLOR_BUDGET,
                      clique_budget=DEFAULT_CLIQUE_BUDGET):
    """Bracket on the distance-``l`` chromatic number, i.e. chi of ``g^l``."""
    return estimate(graph_power(g, l), method, budget, clique_budget)
