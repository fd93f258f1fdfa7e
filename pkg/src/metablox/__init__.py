"""Metadata / block-structure relevance analysis for undirected simple graphs."""

from .combinatorics import (
    QTable,
    default_qtable,
    log_binomial,
    log_double_factorial_even,
    log_factorial,
    log_multiset,
    log_q,
)
from .dl import DLBreakdown, Variant, dl, posterior_odds
from .graph import (
    BlockStats,
    Graph,
    GraphFormatError,
    GraphValidationError,
    Partition,
    align_metadata,
    block_stats,
    load_edge_list,
    load_metadata_csv,
    relabel_partition,
)
from .inference import (
    AgglomerationLadder,
    BetaSchedule,
    InferenceConfig,
    InferenceResult,
    MoveMerge,
    MoveNode,
    PartitionState,
    agglomerative_init,
    delta_dl,
    infer,
    mcmc_sweep,
    posterior_sample,
)
from .report import (
    MetabloxReport,
    ReportConfig,
    VariantOutcome,
    compute_gamma,
    compute_metablox,
    edge_compression,
)
from .significance import (
    PermutationEnsemble,
    bestest_pvalue,
    permute_labels,
    randomized_dl_distribution,
    sigma_rand,
)
from .synthetic import (
    BlockMatrix,
    GenerationError,
    SyntheticSpec,
    correlated_metadata,
    sbm_generate,
    scbm_generate,
    theta_bc,
    theta_cp,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
