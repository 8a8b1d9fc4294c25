"""Synthetic social networks: friendship ABM, graph descriptors and heat-content comparison."""
from .compare import (
    METRICS,
    DayComparisonError,
    DistanceMatrix,
    HcaSettings,
    RunSeries,
    distance_matrix,
    portrait_divergence,
    run_distance,
    wasserstein1,
)
from .friendsim import ScenarioParams, SimTuning, init_state, run_scenario, scenario_grid, step_day
from .graph import (
    Distribution,
    Graph,
    Portrait,
    WeightedSocialGraph,
    basic_stats,
    binarize,
    clustering_stats,
    degree_distribution,
    network_portrait,
    shortest_path_distribution,
)
from .heat import (
    GraphDomain,
    HcaCoefficients,
    HeatWalkConfig,
    approx_heat_content,
    d_hca,
    exact_heat_content,
    graph_hca,
    hca_estimate,
    heat_content_curve,
    make_domains,
)
from .io import write_plot_data
from .popgen import PopConfig, Population, sample_population, validate_marginal

__version__ = "0.1.0"
