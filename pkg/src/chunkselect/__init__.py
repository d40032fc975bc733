"""Consensus selection for sampled action-chunk candidates."""

from .clustering import ClusterAssignment, ClusterConfig, cluster_medoid, init_centroids, kmeans, largest_cluster
from .errors import (
    BatchFileError,
    BatchValidationError,
    ChunkSelectError,
    DegenerateBatchError,
    InsufficientCandidatesError,
    ScenarioError,
)
from .geometry import (
    ActionChunk,
    CandidateBatch,
    DistanceMatrix,
    flatten,
    global_medoid,
    median_pairwise,
    pairwise_distances,
    unimodality_score,
    validate_batch,
)
from .selector import SelectionResult, SelectorConfig, select, selected_chunk
from .simulate import (
    Consensus,
    EpisodeModel,
    ModeSpec,
    RolloutStats,
    RoundModel,
    SingleSample,
    SweepAxes,
    SweepRow,
    ablation_sweep,
    draw_candidates,
    estimate_success,
    run_episode,
)

__version__ = "0.1.0"
