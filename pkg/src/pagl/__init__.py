"""pagl: preferential-attachment graph lab.

Generators for Buckley-Osthus and baseline random graphs, degree and
edge-degree statistics for edge-list graphs, and estimation of the
initial-attractiveness parameter from either distribution.
"""

from .graphs import (
    Graph,
    SimpleGraph,
    MultiplicityReport,
    load_edge_list,
    save_edge_list,
    load_binary,
    save_binary,
    simplify,
    count_multiplicities,
    GraphFormatError,
    GraphValidationError,
)
from .buckley_osthus import (
    BOParams,
    AttachmentState,
    attachment_distribution,
    generate_bo_chain,
    generate_bo,
    merge_blocks,
    generate_bo_samples,
)
from .baselines import (
    GDSParams,
    HKParams,
    power_law_cap,
    sample_power_law_degrees,
    generate_configuration,
    generate_holme_kim,
)
from .stats import (
    DegreeHistogram,
    EdgeDegreeMatrix,
    LogGrid,
    RhoSurface,
    NeighborDegreeProfile,
    degree_histogram,
    histogram_from_degrees,
    edge_degree_matrix,
    cumulative_degree,
    cumulative_edges,
    log_grid,
    rho_surface,
    d_nn_profile,
    write_degrees_tsv,
    write_edges_tsv,
    write_dnn_tsv,
)
from .theory import (
    TheoryParams,
    log_gamma,
    log_beta,
    expected_degree_count,
    expected_edge_count,
    MultiplicityScalingReport,
    multiplicity_scaling_report,
    ShapeCheckReport,
    tail_ratio,
    edge_model_shape_check,
)
from .fitting import (
    FitResult,
    GNResult,
    DivergenceError,
    DegreeRange,
    PairDomain,
    RangeSelection,
    degree_model,
    edge_model,
    loglog_regression,
    gauss_newton,
    degree_range,
    pair_domain,
    fit_degree,
    fit_edges,
    select_range,
)
from .bootstrap import (
    BootstrapReport,
    bootstrap_vertices,
    bootstrap_edges,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "SimpleGraph",
    "MultiplicityReport",
    "load_edge_list",
    "save_edge_list",
    "load_binary",
    "save_binary",
    "simplify",
    "count_multiplicities",
    "GraphFormatError",
    "GraphValidationError",
    "BOParams",
    "AttachmentState",
    "attachment_distribution",
    "generate_bo_chain",
    "generate_bo",
    "merge_blocks",
    "generate_bo_samples",
    "GDSParams",
    "HKParams",
    "power_law_cap",
    "sample_power_law_degrees",
    "generate_configuration",
    "generate_holme_kim",
    "DegreeHistogram",
    "EdgeDegreeMatrix",
    "LogGrid",
    "RhoSurface",
    "NeighborDegreeProfile",
    "degree_histogram",
    "histogram_from_degrees",
    "edge_degree_matrix",
    "cumulative_degree",
    "cumulative_edges",
    "log_grid",
    "rho_surface",
    "d_nn_profile",
    "write_degrees_tsv",
    "write_edges_tsv",
    "write_dnn_tsv",
    "TheoryParams",
    "log_gamma",
    "log_beta",
    "expected_degree_count",
    "expected_edge_count",
    "MultiplicityScalingReport",
    "multiplicity_scaling_report",
    "ShapeCheckReport",
    "tail_ratio",
    "edge_model_shape_check",
    "FitResult",
    "GNResult",
    "DivergenceError",
    "DegreeRange",
    "PairDomain",
    "RangeSelection",
    "degree_model",
    "edge_model",
    "loglog_regression",
    "gauss_newton",
    "degree_range",
    "pair_domain",
    "fit_degree",
    "fit_edges",
    "select_range",
    "BootstrapReport",
    "bootstrap_vertices",
    "bootstrap_edges",
]
