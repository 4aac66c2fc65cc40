"""Extremal l^p-block cluster inference for heavy-tailed time series.

Simulate regularly varying series with known cluster structure, estimate
cluster statistics (extremal index, cluster-size probabilities, cluster index
for sums) from the blocks whose l^p-norms are largest, and check the results
against analytic and Monte Carlo oracles.
"""

from .blocks import INF, BlockPartition, NormOrderStats, lp_modulus, lp_modulus_rows, order_stats, partition
from .estimators import (
    ClusterFunctional,
    DeterministicThresholdResult,
    EstimateResult,
    EstimatorConfig,
    cluster_size_probs,
    estimate_cluster_statistic,
    estimate_deterministic_threshold,
    estimate_with_estimated_alpha,
    extremal_index_alpha_blocks,
    extremal_index_classic_blocks,
    hill_estimate,
    resolve_block_length,
    sum_index_alpha_blocks,
    sum_index_classic_blocks,
)
from .experiments import (
    EstimatorSetting,
    HeatmapGrid,
    McConfig,
    McReport,
    VarianceComparison,
    default_k_grid,
    default_k_prime_grid,
    run_heatmap,
    run_mc,
    run_variance_comparison,
)
from .models import (
    AR1,
    IidPareto,
    IidStudentAbs,
    KestenSRE,
    LinearMA,
    MaxMA,
    ModelSpec,
    Series,
    derive_seed,
    effective_filter,
    model_from_dict,
    model_to_dict,
    pareto_draw,
    pareto_sym_draw,
    simulate,
    student_abs_draw,
)
from .oracles import (
    McOracleResult,
    OracleValue,
    QSample,
    model_oracle,
    oracle_kesten_cp,
    oracle_kesten_statistic,
    oracle_linear_cp,
    oracle_linear_pi,
    oracle_linear_theta,
    sample_kesten_q,
)

__version__ = "0.1.0"
