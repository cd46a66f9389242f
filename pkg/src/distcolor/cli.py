"""``distcolor`` command line.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 internal invariant
violation.
"""

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .coloring import estimate
from .errors import DomainError, InvariantError, UsageError
from .experiments import SUITES, TrialFailure, run_experiment
from .geometry import Density, RadiusSchedule, parse_p, radius_for, sample_points
from .graph import build_graph, format_edgelist, graph_power, parse_edgelist
from .theory import theory_table

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3
SUBCOMMANDS = ("generate", "color", "theory", "experiment")
FORMATS = {
    "generate": ("edgelist", "csv"),
    "color": ("text",),
    "theory": ("csv",),
    "experiment": ("csv", "json"),
}
REGIME_SUITE = {"sub": "sub", "conn": "conn", "super": "super", "sparse": "sparse"}


@dataclass
class CliConfig:
    subcommand: str
    n: int = 1000
    d: int = 2
    p: float = 2.0
    l: int = 2
    density: Density = field(default_factory=Density)
    regime: RadiusSchedule = field(default_factory=lambda: RadiusSchedule("conn", 1.0))
    seed: int = 0
    trials: int = 1
    grid: list = field(default_factory=list)
    method: str = "dsatur"
    out: str = None
    format: str = None
    suite: str = None
    input: str = None
    volume: float = 1.0
    t_min: float = 1e-3
    t_max: float = 1e3
    points: int = 25
    budget: int = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--grid must be a comma list of integers, got {text!r}") from None


def _build_parser():
    shared = _Parser(add_help=False)
    shared.add_argument("--n", type=int, default=1000, help="number of points (default 1000)")
    shared.add_argument("--d", type=int, default=2, help="dimension (default 2)")
    shared.add_argument("--p", default="2", help="norm exponent: real >= 1 or inf (default 2)")
    shared.add_argument("--l", type=int, default=2, help="graph distance l (default 2)")
    shared.add_argument("--density", default="uniform-cube",
                        help="uniform-cube | gaussian | step-cube:lo,hi (default uniform-cube)")
    shared.add_argument("--regime", default="conn:1",
                        help="sub:b | conn:t | super:a | sparse:eps (default conn:1)")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--trials", type=int, default=1)
    shared.add_argument("--grid", default="", help="comma list of n values")
    shared.add_argument("--method", default="dsatur", choices=("exact", "dsatur", "greedy"))
    shared.add_argument("--out", default=None, help="output path (default stdout)")
    shared.add_argument("--format", default=None, help="csv | json | edgelist")

    parser = _Parser(prog="distcolor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("generate", parents=[shared], help="sample a geometric graph, emit edges")
    color = sub.add_parser("color", parents=[shared], help="distance-l colouring")
    color.add_argument("--input", default=None, help="colour this edge list instead")
    color.add_argument("--budget", type=int, default=None, help="exact search node budget")
    theory = sub.add_parser("theory", parents=[shared], help="xi and c-ratio table")
    theory.add_argument("--volume", type=float, default=1.0, help="window volume vol(W)")
    theory.add_argument("--t-min", type=float, default=1e-3)
    theory.add_argument("--t-max", type=float, default=1e3)
    theory.add_argument("--points", type=int, default=25)
    exp = sub.add_parser("experiment", parents=[shared], help="Monte-Carlo suite")
    exp.add_argument("--suite", default=None, choices=sorted(SUITES),
                     help="defaults to the suite named by --regime")
    return parser


def parse_args(argv):
    """Validated :class:`CliConfig`; raises :class:`UsageError` naming the flag."""
    ns = _build_parser().parse_args(argv)
    cfg = CliConfig(subcommand=ns.subcommand)
    for name in ("n", "d", "l", "seed", "trials", "method", "out"):
        setattr(cfg, name, getattr(ns, name))
    for name in ("input", "suite", "volume", "t_min", "t_max", "points", "budget"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    try:
        cfg.p = parse_p(ns.p)
    except UsageError as exc:
        raise UsageError(f"--p: {exc}") from None
    try:
        cfg.density = Density.parse(ns.density)
    except UsageError as exc:
        raise UsageError(f"--density: {exc}") from None
    try:
        cfg.regime = RadiusSchedule.parse(ns.regime)
    except UsageError as exc:
        raise UsageError(f"--regime: {exc}") from None
    cfg.grid = _int_list(ns.grid)

    if cfg.d < 1:
        raise UsageError("--d must be >= 1")
    if cfg.l < 1:
        raise UsageError("--l must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    formats = FORMATS[cfg.subcommand]
    cfg.format = ns.format or formats[0]
    if cfg.format not in formats:
        raise UsageError(f"--format {cfg.format!r} is not available for {cfg.subcommand}; "
                         f"choose from {', '.join(formats)}")

    if cfg.subcommand in ("generate", "color") and cfg.input is None:
        if cfg.n < 1:
            raise UsageError("--n must be >= 1")
        _check_radius("--n", cfg.regime, cfg.n, cfg.d)
    if cfg.subcommand == "experiment":
        if not cfg.grid:
            raise UsageError("--grid must list at least one n")
        if cfg.trials < 1:
            raise UsageError("--trials must be >= 1")
        for n in cfg.grid:
            _check_radius("--grid", cfg.regime, n, cfg.d)
        if cfg.suite is None:
            cfg.suite = REGIME_SUITE[cfg.regime.regime]
    if cfg.subcommand == "theory":
        if not (0 < cfg.t_min <= cfg.t_max) or cfg.points < 1:
            raise UsageError("--t-min/--t-max/--points must describe a nonempty positive range")
        if not cfg.volume > 0:
            raise UsageError("--volume must be positive")
    if cfg.budget is not None and cfg.budget < 1:
        raise UsageError("--budget must be positive")
    return cfg


def _check_radius(flag, schedule, n, d):
    try:
        radius_for(schedule, n, d)
    except DomainError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def emit(text, path=None):
    """Write ``text`` (newline-terminated, UTF-8) to ``path`` or stdout."""
    if not text.endswith("\n"):
        text += "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _cloud(cfg):
    r = radius_for(cfg.regime, cfg.n, cfg.d)
    return sample_points(cfg.n, cfg.density, cfg.d, cfg.seed, r=r, p=cfg.p)


def _points_csv(cloud):
    header = ",".join(f"x{k}" for k in range(cloud.d))
    rows = [",".join(repr(float(v)) for v in row) for row in cloud.points]
    return "\n".join([header, *rows]) + "\n"


def _run(cfg):
    if cfg.subcommand == "generate":
        cloud = _cloud(cfg)
        text = format_edgelist(build_graph(cloud)) if cfg.format == "edgelist" else _points_csv(cloud)
        emit(text, cfg.out)
    elif cfg.subcommand == "color":
        if cfg.input is not None:
            with open(cfg.input, encoding="utf-8") as fh:
                g = parse_edgelist(fh.read())
        else:
            g = build_graph(_cloud(cfg))
        power = graph_power(g, cfg.l)
        kwargs = {} if cfg.budget is None else {"budget": cfg.budget}
        est = estimate(power, cfg.method, **kwargs)
        if not est.coloring.is_proper(power):
            raise InvariantError("colouring is not proper")
        emit(est.coloring.to_text(), cfg.out)
        print(f"# chi_{cfg.l} in [{est.lower}, {est.upper}] exact={est.exact}", file=sys.stderr)
    elif cfg.subcommand == "theory":
        ts = np.geomspace(cfg.t_min, cfg.t_max, cfg.points).tolist() + [math.inf]
        f_max = cfg.density.f_max(cfg.d)
        lines = ["t,xi,c_ratio"]
        for t, xi, c in theory_table(ts, cfg.l, cfg.d, cfg.volume, f_max):
            lines.append(f"{'inf' if math.isinf(t) else repr(t)},{xi!r},{c!r}")
        emit("\n".join(lines) + "\n", cfg.out)
    else:
        overrides = dict(d=cfg.d, p=cfg.p, l=cfg.l, density=cfg.density, schedule=cfg.regime,
                         method="auto" if cfg.method == "exact" else cfg.method)
        if cfg.suite == "lemma4":
            overrides["colorings"] = False
        report = run_experiment(cfg.suite, cfg.grid, cfg.trials, cfg.seed, **overrides)
        if cfg.format == "json":
            emit(report.to_json(), cfg.out)
        else:
            emit(report.to_csv(), cfg.out)
            if cfg.out not in (None, "-"):
                stem = cfg.out[:-4] if cfg.out.endswith(".csv") else cfg.out
                emit(report.to_json(), stem + ".json")


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"distcolor: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _run(cfg)
    except (UsageError, DomainError) as exc:
        print(f"distcolor: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"distcolor: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as exc:
        print(f"distcolor: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except TrialFailure as exc:
        print(f"distcolor: {exc}", file=sys.stderr)
        return EXIT_INVARIANT if isinstance(exc.__cause__, InvariantError) else EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
