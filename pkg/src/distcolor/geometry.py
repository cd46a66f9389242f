"""Point sampling, l^p distances and radius schedules.

Random streams come from numpy's ``PCG64`` bit generator seeded through
``SeedSequence`` (``numpy.random.default_rng(seed)``), so a cloud is a pure
function of ``(seed, n, d, density)`` for a given numpy release.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UsageError

INF = math.inf

DENSITY_KINDS = ("uniform-cube", "gaussian", "step-cube")
REGIMES = ("sub", "conn", "super", "sparse")


def parse_p(p):
    """Normalise a norm exponent to a float in ``[1, inf]``."""
    if isinstance(p, str):
        text = p.strip().lower()
        if text in ("inf", "infinity", "max"):
            return INF
        try:
            p = float(text)
        except ValueError:
            raise UsageError(f"p must be a real >= 1 or 'inf', got {p!r}") from None
    p = float(p)
    if math.isnan(p) or p < 1:
        raise UsageError(f"p must be >= 1, got {p}")
    return p


def format_p(p):
    return "inf" if math.isinf(p) else repr(float(p))


def lp_distance(x, y, p=2.0):
    """l^p distance between two points of equal dimension."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise UsageError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(pairwise_lp(x[None, :], y[None, :], parse_p(p))[0])


def pairwise_lp(a, b, p):
    """Row-wise l^p distances between equally shaped ``(m, d)`` arrays."""
    diff = np.abs(a - b)
    if p == 1.0:
        return diff.sum(axis=-1)
    if p == 2.0:
        return np.sqrt((diff * diff).sum(axis=-1))
    if math.isinf(p):
        return diff.max(axis=-1)
    return (diff**p).sum(axis=-1) ** (1.0 / p)


@dataclass(frozen=True)
class Density:
    """Bounded sampling density with known essential sup and inf.

    ``step-cube`` lives on ``[0, 1]^d`` and takes level ``lo`` where the first
    coordinate is below 1/2 and ``hi`` elsewhere; ``lo + hi`` must equal 2 so
    the total mass is one.
    """

    kind: str = "uniform-cube"
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise UsageError(f"unsupported density kind {self.kind!r}")
        if self.kind == "step-cube":
            if len(self.params) != 2:
                raise UsageError("step-cube needs two levels lo,hi")
            lo, hi = map(float, self.params)
            if lo < 0 or hi < 0 or not math.isclose(lo + hi, 2.0, abs_tol=1e-12):
                raise UsageError(f"step-cube levels must be >= 0 and sum to 2, got {lo},{hi}")
            object.__setattr__(self, "params", (lo, hi))
        elif self.params:
            raise UsageError(f"{self.kind} takes no parameters")

    @classmethod
    def parse(cls, text):
        kind, _, rest = text.strip().partition(":")
        params = ()
        if rest:
            try:
                params = tuple(float(v) for v in rest.split(","))
            except ValueError:
                raise UsageError(f"bad density parameters in {text!r}") from None
        return cls(kind, params)

    def __str__(self):
        if self.params:
            return f"{self.kind}:" + ",".join(repr(v) for v in self.params)
        return self.kind

    def f_max(self, d):
        if self.kind == "uniform-cube":
            return 1.0
        if self.kind == "gaussian":
            return (2 * math.pi) ** (-d / 2)
        return max(self.params)

    def f_0(self, d):
        if self.kind == "uniform-cube":
            return 1.0
        if self.kind == "gaussian":
            return 0.0
        lo, hi = self.params
        # a zero level drops out of the support
        positive = [v for v in (lo, hi) if v > 0]
        return min(positive)

    def sample(self, rng, n, d):
        if self.kind == "uniform-cube":
            return rng.random((n, d))
        if self.kind == "gaussian":
            return rng.standard_normal((n, d))
        lo, _ = self.params
        pts = rng.random((n, d))
        low_half = rng.random(n) < lo / 2.0
        pts[:, 0] = np.where(low_half, 0.5 * pts[:, 0], 0.5 + 0.5 * pts[:, 0])
        return pts


@dataclass(frozen=True)
class RadiusSchedule:
    """Target value of ``n * r^d`` as a function of ``n``.

    ========  =====================  ==================
    regime    param                  n r^d
    ========  =====================  ==================
    sub       b in (0, 1)            (ln n)^b
    conn      t > 0                  t ln n
    super     a > 0                  (ln n)^(1 + a)
    sparse    eps > 0                n^(-eps)
    ========  =====================  ==================
    """

    regime: str = "conn"
    param: float = 1.0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise UsageError(f"unknown regime {self.regime!r}")
        param = float(self.param)
        if not math.isfinite(param) or param <= 0:
            raise UsageError(f"{self.regime} parameter must be positive, got {param}")
        if self.regime == "sub" and param >= 1:
            raise UsageError(f"sub exponent must lie in (0, 1), got {param}")
        object.__setattr__(self, "param", param)

    @classmethod
    def parse(cls, text):
        regime, _, rest = text.strip().partition(":")
        if not rest:
            raise UsageError(f"regime needs a parameter, e.g. conn:2 (got {text!r})")
        try:
            return cls(regime, float(rest))
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"bad regime parameter in {text!r}") from None

    def __str__(self):
        return f"{self.regime}:{self.param!r}"

    def target(self, n):
        """``n * r_n^d`` for this schedule."""
        ln = math.log(n)
        if self.regime == "sub":
            return ln**self.param
        if self.regime == "conn":
            return self.param * ln
        if self.regime == "super":
            return ln ** (1.0 + self.param)
        return n ** (-self.param)


def radius_for(schedule, n, d):
    """Radius ``r`` with ``n * r^d`` equal to the schedule's target."""
    if n < 3:
        raise DomainError(f"radius schedules need n >= 3, got {n}")
    target = schedule.target(n)
    if schedule.regime == "sub" and not math.log(n) / target > 1:
        raise DomainError(f"n={n} too small for the sub schedule: ln n <= n r^d")
    return (target / n) ** (1.0 / d)


@dataclass(frozen=True)
class PointCloud:
    """``n`` points in ``R^d`` together with the connection radius and norm."""

    points: np.ndarray
    r: float
    p: float = 2.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C")
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise UsageError(f"points must be an (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise UsageError("points must be finite")
        if not self.r > 0 or not math.isfinite(self.r):
            raise UsageError(f"radius must be positive and finite, got {self.r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "p", parse_p(self.p))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def with_radius(self, r):
        return PointCloud(self.points, r, self.p, self.meta)


def sample_points(n, density, d, seed, r=1.0, p=2.0):
    """Draw ``n`` i.i.d. points from ``density`` in ``R^d``."""
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    if d < 1:
        raise UsageError(f"d must be >= 1, got {d}")
    if isinstance(density, str):
        density = Density.parse(density)
    rng = np.random.default_rng(int(seed) % 2**64)
    pts = density.sample(rng, int(n), int(d))
    return PointCloud(pts, r, p, {"seed": int(seed), "density": str(density)})
