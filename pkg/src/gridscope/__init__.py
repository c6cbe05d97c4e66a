"""gridscope: uniform grid layout of embedded point clouds plus topic-grid
behavioral analytics (activity, self/peer risk, time-stacked views)."""

from .core_sd import (
    GridAssignment,
    GridShape,
    PointCloud,
    resolve_cell,
    sd_1d,
    split_diffuse,
)
from .embedding import (
    DistanceMatrix,
    HighDimVectors,
    classical_mds,
    import_embedding,
    export_embedding,
    pairwise_distances,
    procrustes_align,
)
from .metrics import (
    LayoutScore,
    density_heterogeneity,
    geometry_correlation,
    overlap_count,
    score_layout,
    topology_agreement,
)
from .topic_grids import (
    ActivityProfile,
    RiskGrid,
    TimeStack,
    TimeWindow,
    TopicGrid,
    TopicInfo,
    build_topic_grid,
    normalize_profile,
    peer_risk,
    self_risk,
    topic_curtain,
    topic_shower,
)
from .ingest import (
    ActivityEvent,
    ScenarioConfig,
    SyntheticDataset,
    WindowSpec,
    parse_events,
    synthesize,
    window_profiles,
)

__version__ = "0.1.0"

__all__ = [
    "PointCloud",
    "GridShape",
    "GridAssignment",
    "split_diffuse",
    "resolve_cell",
    "sd_1d",
    "DistanceMatrix",
    "HighDimVectors",
    "pairwise_distances",
    "classical_mds",
    "procrustes_align",
    "import_embedding",
    "export_embedding",
    "LayoutScore",
    "overlap_count",
    "density_heterogeneity",
    "topology_agreement",
    "geometry_correlation",
    "score_layout",
    "TimeWindow",
    "TopicInfo",
    "ActivityProfile",
    "RiskGrid",
    "TopicGrid",
    "TimeStack",
    "normalize_profile",
    "self_risk",
    "peer_risk",
    "build_topic_grid",
    "topic_curtain",
    "topic_shower",
    "ActivityEvent",
    "WindowSpec",
    "ScenarioConfig",
    "SyntheticDataset",
    "parse_events",
    "window_profiles",
    "synthesize",
    "__version__",
]
