"""Distance-l chromatic numbers of random geometric graphs."""

__version__ = "0.1.0"

from .coloring import (  # noqa: E402
    ChromaticEstimate,
    Coloring,
    chromatic_bruteforce,
    distant_chromatic,
    dsatur,
    exact_chromatic,
    greedy_color,
)
from .geometry import Density, PointCloud, RadiusSchedule, lp_distance, radius_for, sample_points  # noqa: E402
from .graph import (  # noqa: E402
    Graph,
    build_graph,
    build_graph_bruteforce,
    clique_number,
    graph_power,
    max_degree,
)
from .theory import c_ratio_indicator, h_function, h_inverse_upper, k_n, xi_indicator  # noqa: E402

__all__ = [
    "ChromaticEstimate", "Coloring", "Density", "Graph", "PointCloud", "RadiusSchedule",
    "build_graph", "build_graph_bruteforce", "c_ratio_indicator", "chromatic_bruteforce",
    "clique_number", "distant_chromatic", "dsatur", "exact_chromatic", "graph_power",
    "greedy_color", "h_function", "h_inverse_upper", "k_n", "lp_distance", "max_degree",
    "radius_for", "sample_points", "xi_indicator",
]
