"""Assortativity coefficients for weighted and directed networks."""

from .assort import (
    AssortProfile,
    WeightedMoments,
    assortativity_profile,
    feature_assortativity,
    strength_assortativity,
    undirected_assortativity,
    unweighted_strength_assortativity,
    weighted_moments,
)
from .backbone import EdgeSignificance, disparity_pvalue, edge_significance, extract_backbone
from .errors import (
    ConfigError,
    CsvFormatError,
    DegenerateGraphError,
    DegenerateVarianceError,
    FeatureError,
    GraphError,
    InfeasibleTargetError,
    SolverError,
    WdassortError,
)
from .gen import BaConfig, ErConfig, SbmConfig, gen_ba, gen_er, gen_sbm
from .graph import (
    FeatureTable,
    WeightedDigraph,
    build_graph,
    degree,
    expand_to_endpoint_list,
    from_undirected,
    strength,
)
from .rewire import (
    LinkDistribution,
    RewireConfig,
    RewireResult,
    StrengthDistribution,
    initial_network,
    link_distribution,
    rewire_chain,
    run_rewire,
)

__version__ = "0.1.0"
