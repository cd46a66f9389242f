import itertools

import numpy as np
import pytest

from conftest import complete, cycle, path, petersen, random_graph
from distcolor.coloring import (
    canonical,
    chromatic_bruteforce,
    distant_chromatic,
    dsatur,
    estimate,
    exact_chromatic,
    greedy_color,
)
from distcolor.errors import UsageError
from distcolor.geometry import sample_points
from distcolor.graph import Graph, build_graph, graph_power


def test_greedy_examples():
    assert greedy_color(Graph.empty(3)).num_colors == 1
    for order in itertools.permutations(range(4)):
        assert greedy_color(complete(4), list(order)).num_colors == 4
    c5 = greedy_color(cycle(5), [0, 1, 2, 3, 4])
    assert c5.num_colors == 3
    assert c5.colors.tolist() == [0, 1, 0, 1, 2]
    assert c5.method == "greedy-given"


@pytest.mark.parametrize("bad", [[0, 1, 2], [0, 0, 1, 2, 3], "largest-first"])
def test_greedy_rejects_bad_ordering(bad):
    with pytest.raises(UsageError):
        greedy_color(cycle(5), bad)


def test_greedy_random_is_seeded(rng):
    g = random_graph(rng, 30, 0.3)
    a = greedy_color(g, "random", seed=5)
    b = greedy_color(g, "random", seed=5)
    assert np.array_equal(a.colors, b.colors) and a.is_proper()


def test_dsatur_examples():
    assert dsatur(cycle(6)).num_colors == 2 == chromatic_bruteforce(cycle(6))
    assert dsatur(complete(4)).num_colors == 4
    assert dsatur(Graph.empty(1)).num_colors == 1


def test_dsatur_exact_on_bipartite(rng):
    for _ in range(20):
        a, b = int(rng.integers(1, 15)), int(rng.integers(1, 15))
        edges = [(i, a + j) for i in range(a) for j in range(b) if rng.random() < 0.4]
        g = Graph.from_edges(a + b, edges)
        assert dsatur(g).num_colors <= 2


def test_colorings_are_proper(rng):
    for _ in range(20):
        g = random_graph(rng, 50, float(rng.uniform(0.05, 0.6)))
        for col in (dsatur(g), greedy_color(g), greedy_color(g, "random", seed=1),
                    exact_chromatic(g).coloring):
            assert col.is_proper()
            assert col.colors.min() == 0
            assert np.array_equal(canonical(col.colors), col.colors)


def test_exact_examples():
    assert exact_chromatic(cycle(5)).upper == 3
    est = exact_chromatic(petersen())
    assert (est.lower, est.upper, est.exact) == (3, 3, True)
    for n in range(1, 9):
        assert exact_chromatic(complete(n)).upper == n


def test_petersen_three_colorable_by_enumeration():
    g = petersen()
    e = g.edges()
    ok = [c for c in itertools.product(range(3), repeat=10)
          if all(c[i] != c[j] for i, j in e)]
    assert ok
    assert not any(all(c[i] != c[j] for i, j in e) for c in itertools.product(range(2), repeat=10))


def test_bruteforce_examples():
    assert chromatic_bruteforce(cycle(5)) == 3
    k4_minus = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    assert chromatic_bruteforce(k4_minus) == 3
    assert chromatic_bruteforce(Graph.empty(4)) == 1
    with pytest.raises(UsageError):
        chromatic_bruteforce(Graph.empty(11))


def test_bell_numbers():
    from distcolor.coloring import _partitions

    assert [sum(1 for _ in _partitions(n)) for n in range(1, 8)] == [1, 2, 5, 15, 52, 203, 877]


def test_exact_matches_bruteforce(rng):
    for _ in range(40):
        g = random_graph(rng, int(rng.integers(1, 10)), float(rng.uniform(0.1, 0.9)))
        est = exact_chromatic(g)
        assert est.exact and est.lower == est.upper == chromatic_bruteforce(g)


def test_exact_budget_gives_bracket():
    g = random_graph(np.random.default_rng(3), 70, 0.5)
    est = exact_chromatic(g, budget=50, ilp_nodes=0)
    assert est.lower <= est.upper
    assert est.coloring.is_proper()
    if not est.exact:
        assert est.lower == est.clique


def test_distant_chromatic_examples():
    assert distant_chromatic(path(4), 2).upper == 3
    assert distant_chromatic(path(4), 3).upper == 4
    g = random_graph(np.random.default_rng(9), 12, 0.3)
    assert distant_chromatic(g, 1) == exact_chromatic(g)


def test_estimate_methods_bracket_exact(rng):
    cloud = sample_points(90, "uniform-cube", 2, seed=2, r=0.2)
    g = graph_power(build_graph(cloud), 2)
    chi = exact_chromatic(g).upper
    for method in ("dsatur", "greedy"):
        est = estimate(g, method)
        assert est.lower <= chi <= est.upper
    with pytest.raises(UsageError):
        estimate(g, "tabu")


def test_integer_program_fallback_matches_bruteforce(rng):
    for _ in range(60):
        g = random_graph(rng, int(rng.integers(2, 10)), float(rng.uniform(0.1, 0.9)))
        est = exact_chromatic(g, budget=1)
        assert est.exact and est.upper == chromatic_bruteforce(g)
        assert est.coloring.is_proper() and est.coloring.num_colors == est.upper


def test_integer_program_closes_clique_gap():
    # omega = 13 but chi = 14; plain backtracking stalls on this one
    from distcolor.experiments import TrialConfig
    from distcolor.geometry import RadiusSchedule, radius_for

    cfg = TrialConfig(n=40, schedule=RadiusSchedule("conn", 2.0), seed=6335966618781341355)
    g = build_graph(sample_points(40, cfg.density, 2, cfg.seed, r=radius_for(cfg.schedule, 40, 2)))
    assert exact_chromatic(g, budget=1, ilp_nodes=0).exact is False
    est = exact_chromatic(g, budget=1)
    assert (est.lower, est.upper, est.exact, est.clique) == (14, 14, True, 13)
