"""Monte-Carlo trials and experiment suites.

One trial samples ``X_n``, builds ``G_n`` at radius ``r_n``, its ``l``-th
power and ``G'_n`` at radius ``l r_n`` on the same points, and records
chromatic brackets for all three together with the clique number, the count
of "close but far in hops" pairs, and the scan statistic.

Per-trial seeds are ``trial_seed(base_seed, n_index, trial_index)``, three
chained SplitMix64 finalisers, so a trial's outcome does not depend on which
worker runs it or when.
"""

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from ._accel import kernels
from .coloring import DEFAULT_COLOR_BUDGET, ChromaticEstimate, estimate
from .errors import DomainError, InvariantError, UsageError
from .geometry import Density, RadiusSchedule, format_p, parse_p, radius_for, sample_points
from .graph import CellGrid, build_graph, close_pairs, graph_power, max_degree
from .theory import k_n as k_n_value

THREADS_ENV = "DISTCOLOR_THREADS"
MASK64 = (1 << 64) - 1

CSV_COLUMNS = (
    "seed", "n", "d", "p", "l", "regime", "param", "r", "nrd",
    "chi_lo", "chi_hi", "chil_lo", "chil_hi", "chip_lo", "chip_hi",
    "omega", "viol", "scan_max", "k_n", "ratio", "norm_ratio",
)
_INT_COLUMNS = {"seed", "n", "d", "l", "chi_lo", "chi_hi", "chil_lo", "chil_hi",
                "chip_lo", "chip_hi", "omega", "viol", "scan_max"}
_STR_COLUMNS = {"regime"}

SUITES = {
    "focusing": dict(schedule=RadiusSchedule("sub", 0.5), l=2),
    "sub": dict(schedule=RadiusSchedule("sub", 0.5), l=2),
    "conn": dict(schedule=RadiusSchedule("conn", 2.0), l=2),
    "super": dict(schedule=RadiusSchedule("super", 0.5), l=2),
    "lemma4": dict(schedule=RadiusSchedule("conn", 2.0), l=3, colorings=False),
    "sparse": dict(schedule=RadiusSchedule("sparse", 0.5), l=2),
}


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(base_seed, n_index, trial_index):
    h = splitmix64(base_seed & MASK64)
    h = splitmix64(h ^ n_index)
    return splitmix64(h ^ trial_index)


def default_workers():
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            workers = int(value)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {value!r}") from None
        if workers < 1:
            raise UsageError(f"{THREADS_ENV} must be >= 1")
        return workers
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TrialConfig:
    n: int
    d: int = 2
    p: float = 2.0
    l: int = 2
    density: Density = Density()
    schedule: RadiusSchedule = RadiusSchedule("conn", 1.0)
    seed: int = 0
    method: str = "auto"
    exact_threshold: int = 120
    colorings: bool = True
    budget: int = DEFAULT_COLOR_BUDGET
    clique_budget: int = 20_000

    def __post_init__(self):
        if self.n < 3:
            raise UsageError(f"trials need n >= 3, got {self.n}")
        if self.d < 1:
            raise UsageError(f"d must be >= 1, got {self.d}")
        if int(self.l) != self.l or self.l < 1:
            raise UsageError(f"l must be a positive integer, got {self.l}")
        if self.method not in ("auto", "exact", "dsatur", "greedy"):
            raise UsageError(f"unknown method {self.method!r}")
        object.__setattr__(self, "p", parse_p(self.p))

    def coloring_method(self):
        if self.method == "auto":
            return "exact" if self.n <= self.exact_threshold else "dsatur"
        return self.method


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    n: int
    d: int
    p: float
    l: int
    regime: str
    param: float
    r: float
    nrd: float
    chi_lo: int = None
    chi_hi: int = None
    chil_lo: int = None
    chil_hi: int = None
    chip_lo: int = None
    chip_hi: int = None
    omega: int = None
    viol: int = 0
    scan_max: int = 0
    k_n: float = None
    ratio: float = None
    norm_ratio: float = None
    max_deg_power: int = 0
    exact: bool = False

    def row(self):
        return {c: getattr(self, c) for c in CSV_COLUMNS}


def lemma4_violations(cloud, g, l):
    """Pairs closer than ``l r`` whose hop distance in ``g`` exceeds ``l``.

    Candidates come from a cell grid of side ``l r``; hop distances from an
    ``l``-deep BFS out of each vertex.
    """
    if cloud.n != g.n:
        raise UsageError("graph and cloud sizes differ")
    if cloud.n < 2:
        return 0
    reach = l * cloud.r
    grid = CellGrid(cloud.points, reach)
    return int(kernels().far_pairs(cloud.points, *grid.args(), float(reach), float(cloud.p),
                                   g.indptr, g.indices, int(l)))


def scan_max(cloud, g=None):
    """Most sample points in one open ``r``-ball centred at a sample point.

    A lower bound on the scan statistic over all centres in ``R^d``.
    """
    if cloud.n < 1:
        raise UsageError("empty cloud")
    if g is not None:
        return 1 + max_degree(g)
    i, j = close_pairs(cloud.points, cloud.r, cloud.p)
    counts = np.bincount(np.concatenate([i, j]), minlength=cloud.n)
    return 1 + int(counts.max())


def focusing_mass(values):
    """``(a, mass)``: the window ``{a, a + 1}`` holding the largest share."""
    values = [int(v) for v in values]
    if not values:
        raise UsageError("focusing_mass needs at least one value")
    counts = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    best_a, best = None, -1
    for a in range(min(values), max(values) + 1):
        hits = counts.get(a, 0) + counts.get(a + 1, 0)
        if hits > best:
            best_a, best = a, hits
    return best_a, best / len(values)


def _tighten(chi, chi_l, chi_p):
    """Share bounds along ``G ⊆ G^l ⊆ G'``.

    A colouring of a supergraph colours every subgraph and a clique of a
    subgraph is a clique of every supergraph. Exact values must already be
    consistent; anything else is a bug.
    """
    up_l = min(chi_l.upper, chi_p.upper)
    up = min(chi.upper, up_l)
    lo_l = max(chi_l.lower, chi.lower)
    lo_p = max(chi_p.lower, lo_l)
    for est, lo, hi in ((chi, chi.lower, up), (chi_l, lo_l, up_l), (chi_p, lo_p, chi_p.upper)):
        if est.exact and (lo, hi) != (est.lower, est.upper):
            raise InvariantError(
                f"exact bracket [{est.lower}, {est.upper}] contradicts the subgraph chain"
            )
        if lo > hi:
            raise InvariantError(f"empty chromatic bracket [{lo}, {hi}]")
    return (chi.lower, up), (lo_l, up_l), (lo_p, chi_p.upper)


def run_trial(cfg):
    """Sample one cloud and compute every statistic of a :class:`TrialRecord`."""
    r = radius_for(cfg.schedule, cfg.n, cfg.d)
    nrd = cfg.n * r**cfg.d
    cloud = sample_points(cfg.n, cfg.density, cfg.d, cfg.seed, r=r, p=cfg.p)
    g = build_graph(cloud)
    try:
        kn = k_n_value(cfg.n, nrd)
    except DomainError:
        kn = None
    out = dict(
        seed=cfg.seed, n=cfg.n, d=cfg.d, p=cfg.p, l=cfg.l,
        regime=cfg.schedule.regime, param=cfg.schedule.param, r=r, nrd=nrd,
        viol=lemma4_violations(cloud, g, cfg.l), scan_max=scan_max(cloud, g), k_n=kn,
    )
    if cfg.colorings:
        g_l = graph_power(g, cfg.l)
        g_p = build_graph(cloud.with_radius(cfg.l * r))
        method = cfg.coloring_method()
        chi = estimate(g, method, cfg.budget, cfg.clique_budget)
        chi_l = chi if cfg.l == 1 else estimate(g_l, method, cfg.budget, cfg.clique_budget)
        chi_p = estimate(g_p, method, cfg.budget, cfg.clique_budget)
        (a, b), (c, d), (e, f) = _tighten(chi, chi_l, chi_p)
        ratio = d / b
        out.update(
            chi_lo=a, chi_hi=b, chil_lo=c, chil_hi=d, chip_lo=e, chip_hi=f,
            omega=chi.clique, ratio=ratio, norm_ratio=ratio / cfg.l**cfg.d,
            max_deg_power=max_degree(g_l),
            exact=chi.exact and chi_l.exact and chi_p.exact,
        )
    return TrialRecord(**out)


# -- tables and aggregates ---------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return format_p(v) if math.isinf(v) else repr(v)
    return str(v)


def table_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def parse_table(text):
    """Typed rows back from :func:`table_csv` output."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {}
        for c in CSV_COLUMNS:
            v = raw[c]
            if v == "":
                row[c] = None
            elif c in _INT_COLUMNS:
                row[c] = int(v)
            elif c in _STR_COLUMNS:
                row[c] = v
            else:
                row[c] = float(v)
        rows.append(row)
    return rows


def _quantiles(values):
    if not values:
        return None, None, None
    q = np.quantile(np.asarray(values, dtype=float), [0.25, 0.5, 0.75])
    return float(q[0]), float(statistics.median(values)), float(q[2])


def aggregate(rows):
    """Per-n summary rows, in order of first appearance of each n."""
    groups = {}
    for row in rows:
        groups.setdefault(row["n"], []).append(row)
    out = []
    for n, grp in groups.items():
        scale = [row["l"] ** row["d"] for row in grp]
        colored = [(row, s) for row, s in zip(grp, scale) if row["chi_hi"] is not None]
        ratio = [row["ratio"] for row, _ in colored]
        norm = [row["norm_ratio"] for row, _ in colored]
        bracket_lo = [row["chil_lo"] / (s * row["chi_hi"]) for row, s in colored]
        bracket_hi = [row["chil_hi"] / (s * row["chi_lo"]) for row, s in colored]
        viol = [row["viol"] for row in grp]
        scan = [row["scan_max"] / row["k_n"] for row in grp if row["k_n"]]
        agg = {"n": n, "trials": len(grp), "colored": len(colored)}
        agg["ratio_q25"], agg["ratio_median"], agg["ratio_q75"] = _quantiles(ratio)
        agg["norm_ratio_q25"], agg["norm_ratio_median"], agg["norm_ratio_q75"] = _quantiles(norm)
        agg["norm_bracket_lo_median"] = _quantiles(bracket_lo)[1]
        agg["norm_bracket_hi_median"] = _quantiles(bracket_hi)[1]
        agg["chi_hi_median"] = _quantiles([row["chi_hi"] for row, _ in colored])[1]
        agg["chil_hi_median"] = _quantiles([row["chil_hi"] for row, _ in colored])[1]
        if colored:
            a, mass = focusing_mass([row["chil_hi"] for row, _ in colored])
        else:
            a, mass = None, None
        agg["focus_a"], agg["focus_mass"] = a, mass
        agg["viol_mean"] = statistics.fmean(viol)
        agg["viol_zero_fraction"] = sum(v == 0 for v in viol) / len(viol)
        agg["scan_over_kn_median"] = _quantiles(scan)[1]
        out.append(agg)
    return out


def spearman(x, y):
    """Rank correlation with average ranks; None when either side is constant."""
    from scipy.stats import rankdata

    if len(x) < 2:
        return None
    rx, ry = rankdata(x), rankdata(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        return None
    return float(np.corrcoef(rx, ry)[0, 1])


def trend(aggregates):
    """Direction of per-n medians across the grid."""
    ns = [a["n"] for a in aggregates]
    out = {}
    for key in ("ratio_median", "norm_ratio_median", "viol_zero_fraction", "focus_mass",
                "scan_over_kn_median"):
        ys = [a[key] for a in aggregates]
        if any(v is None for v in ys):
            continue
        steps = [b - a for a, b in zip(ys, ys[1:])]
        out[key] = {
            "values": ys,
            "spearman": spearman(ns, ys),
            "nonincreasing": all(s <= 0 for s in steps),
            "nondecreasing": all(s >= 0 for s in steps),
        }
    return out


@dataclass
class ExperimentReport:
    suite: str
    records: list
    aggregates: list
    trend: dict
    manifest: dict = field(default_factory=dict)

    def rows(self):
        return [rec.row() for rec in self.records]

    def to_csv(self):
        return table_csv(self.rows())

    def summary(self):
        return {"suite": self.suite, "aggregates": self.aggregates, "trend": self.trend,
                "manifest": self.manifest}

    def to_json(self):
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


class TrialFailure(RuntimeError):
    def __init__(self, seed, n, exc):
        super().__init__(f"trial with seed {seed} (n={n}) failed: {exc!r}")
        self.seed = seed
        self.n = n


def _run_checked(cfg):
    try:
        return run_trial(cfg)
    except Exception as exc:
        raise TrialFailure(cfg.seed, cfg.n, exc) from exc


def suite_config(suite, **overrides):
    """Template :class:`TrialConfig` keyword arguments for ``suite``."""
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    base = dict(SUITES[suite])
    base.update({k: v for k, v in overrides.items() if v is not None})
    return base


def run_experiment(suite, grid, trials, base_seed=0, workers=None, **overrides):
    """Run ``trials`` trials for each ``n`` in ``grid`` and aggregate them.

    ``overrides`` replace :class:`TrialConfig` fields of the suite template
    (``d``, ``p``, ``l``, ``density``, ``schedule``, ``method``, ...).
    """
    grid = [int(n) for n in grid]
    if not grid:
        raise UsageError("empty n grid")
    if trials < 1:
        raise UsageError(f"trials must be >= 1, got {trials}")
    template = suite_config(suite, **overrides)
    configs = [
        TrialConfig(n=n, seed=trial_seed(base_seed, ni, ti), **template)
        for ni, n in enumerate(grid)
        for ti in range(trials)
    ]
    workers = default_workers() if workers is None else workers
    start = time.perf_counter()
    if workers <= 1 or len(configs) == 1:
        records = [_run_checked(cfg) for cfg in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_checked, configs, chunksize=1))
    wall = time.perf_counter() - start
    aggs = aggregate([rec.row() for rec in records])
    sample = replace(configs[0], seed=0)
    manifest = {
        "version": __version__,
        "suite": suite,
        "base_seed": base_seed,
        "seed_mixing": "splitmix64(splitmix64(splitmix64(base) ^ n_index) ^ trial_index)",
        "grid": grid,
        "trials": trials,
        "config": {k: str(v) for k, v in asdict(sample).items() if k not in ("n", "seed")},
        "workers": workers,
        "wall_time_s": wall,
    }
    return ExperimentReport(suite, records, aggs, trend(aggs), manifest)
