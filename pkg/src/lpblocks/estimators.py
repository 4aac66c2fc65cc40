"""Cluster-statistic estimators on extremal l^p-blocks.

The generic estimator averages a shift- and scale-invariant functional over
the k blocks whose l^p-norm exceeds the (k+1)-th norm order statistic,

    estimate = (1/k) * sum_t f(B_t / T) * 1(||B_t||_p > T),   T = ||B||_(p,(k+1)),

and reports alongside it the plug-in variance (1/k) * sum f^2 * 1(.) -
estimate^2, the blocks estimate of the asymptotic variance of the normalized
estimator.  Built-in functionals (extremal index, cluster index for sums,
cluster-size probabilities) are scale invariant, so they are evaluated on the
raw blocks; custom functionals are evaluated on B_t / T literally.

Also here: the deterministic-threshold variant, the classic estimators that
threshold on order statistics of |X_t| instead of block norms, and the Hill
tail-index estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .blocks import INF, lp_modulus_rows, order_stats, partition
from .models import series_values

FUNCTIONAL_KINDS = ("extremal-index", "sum-index", "cluster-size", "constant-one", "custom")


@dataclass(frozen=True)
class ClusterFunctional:
    """A shift- and scale-invariant map from a block to a real number.

    kind:
      - "extremal-index":  ||x||_inf^alpha / ||x||_alpha^alpha
      - "sum-index":       ||x||_1^alpha / ||x||_alpha^alpha
      - "cluster-size":    (|x|_(j)^alpha - |x|_(j+1)^alpha) / ||x||_alpha^alpha,
                           order statistics within the block, |x|_(b+1) = 0
      - "constant-one":    1
      - "custom":          a user map; evaluated on the threshold-scaled block,
                           so it need not be scale invariant (untested beyond
                           the built-in identities)
    """

    kind: str
    alpha: float
    j: Optional[int] = None
    fn: Optional[Callable[[np.ndarray], float]] = None

    def __post_init__(self):
        if self.kind not in FUNCTIONAL_KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.kind == "cluster-size":
            if self.j is None or self.j < 1:
                raise ValueError("cluster-size requires j >= 1")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom functional requires fn")

    @property
    def scale_invariant(self) -> bool:
        return self.kind != "custom"

    def value(self, block) -> float:
        """Evaluate on one block (1D array); nonzero blocks only."""
        if self.kind == "constant-one":
            return 1.0
        x = np.abs(np.asarray(block, dtype=float))
        if self.kind == "custom":
            return float(self.fn(np.asarray(block, dtype=float)))
        m = x.max()
        if m == 0.0:
            raise ValueError("functional undefined on an all-zero block")
        # Scale by the block maximum: every built-in is a ratio of
        # alpha-homogeneous terms, so this is exact and overflow-safe.
        r = x / m
        ra = r**self.alpha
        s = float(np.sum(ra))
        if self.kind == "extremal-index":
            return 1.0 / s
        if self.kind == "sum-index":
            return float(np.sum(r)) ** self.alpha / s
        # cluster-size
        w = np.sort(ra)[::-1]
        top_j = w[self.j - 1] if self.j <= len(w) else 0.0
        top_j1 = w[self.j] if self.j < len(w) else 0.0
        return (float(top_j) - float(top_j1)) / s


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning of the blocks estimator.

    ``p=None`` means p = alpha (the l^alpha-blocks default); ``b=None``
    derives the block length as floor(sqrt(n/k)).
    """

    k: int
    alpha: float
    p: Optional[float] = None
    b: Optional[int] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.p is not None and not (self.p == INF or self.p > 0):
            raise ValueError("p must be > 0 or inf")
        if self.b is not None and self.b < 1:
            raise ValueError("b must be >= 1")

    @property
    def p_resolved(self) -> float:
        return self.alpha if self.p is None else self.p


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    plug_in_variance: float
    k_used: int
    b_used: int
    m_used: int
    threshold: float
    p_used: float
    alpha_used: float


def resolve_block_length(n: int, k: int, b: Optional[int] = None) -> int:
    """b = floor(sqrt(n/k)) unless given explicitly."""
    if b is not None:
        return int(b)
    # isqrt(n // k) equals floor(sqrt(n / k)): no integer square lies
    # strictly between n // k and n / k.
    return math.isqrt(n // k)


def _threshold_and_exceedances(vals, k, b, p):
    part = partition(vals, b)
    if k >= part.m:
        raise ValueError("too many extremal blocks (need k <= m - 1)")
    stats = order_stats(part, p)
    if stats.sorted_desc[0] == 0.0:
        raise ValueError("degenerate sample: all block norms are zero")
    threshold = float(stats.sorted_desc[k])
    exceed = np.flatnonzero(stats.norms > threshold)
    return part, threshold, exceed


def estimate_cluster_statistic(series, f: ClusterFunctional, cfg: EstimatorConfig) -> EstimateResult:
    """The disjoint-blocks estimator with the (k+1)-th norm order statistic
    as random threshold; see the module docstring for the formula."""
    vals = series_values(series)
    n = len(vals)
    k = cfg.k
    b = resolve_block_length(n, k, cfg.b)
    p = cfg.p_resolved
    part, threshold, exceed = _threshold_and_exceedances(vals, k, b, p)

    s1 = 0.0
    s2 = 0.0
    for t in exceed:
        block = part.values[t]
        v = f.value(block if f.scale_invariant else block / threshold)
        s1 += v
        s2 += v * v
    estimate = s1 / k
    plug_in_variance = max(s2 / k - estimate * estimate, 0.0)
    return EstimateResult(
        estimate=estimate,
        plug_in_variance=plug_in_variance,
        k_used=k,
        b_used=b,
        m_used=part.m,
        threshold=threshold,
        p_used=p,
        alpha_used=f.alpha,
    )


@dataclass(frozen=True)
class DeterministicThresholdResult:
    value: float
    exceedances: int

    @property
    def no_exceedances(self) -> bool:
        return self.exceedances == 0


def estimate_deterministic_threshold(series, f, p, u, x_b, b) -> DeterministicThresholdResult:
    """Blocks estimator at the fixed threshold u * x_b.

    The normalizing count is the number of exceedances, so the estimate
    agrees with the random-threshold estimator for scale-invariant
    functionals whenever u * x_b reproduces its order-statistic threshold.
    Returns value 0 with ``no_exceedances`` set when nothing exceeds.
    """
    if not u > 0 or not x_b > 0:
        raise ValueError("u and x_b must be > 0")
    vals = series_values(series)
    part = partition(vals, b)
    threshold = u * x_b
    norms = lp_modulus_rows(part.values, p)
    exceed = np.flatnonzero(norms > threshold)
    if len(exceed) == 0:
        return DeterministicThresholdResult(value=0.0, exceedances=0)
    s1 = 0.0
    for t in exceed:
        block = part.values[t]
        s1 += f.value(block if f.scale_invariant else block / threshold)
    return DeterministicThresholdResult(value=s1 / len(exceed), exceedances=len(exceed))


# ---------------------------------------------------------------------------
# named estimators
# ---------------------------------------------------------------------------

def extremal_index_alpha_blocks(series, cfg: EstimatorConfig) -> EstimateResult:
    """Extremal index from extremal l^alpha-blocks (p is forced to alpha)."""
    f = ClusterFunctional("extremal-index", alpha=cfg.alpha)
    return estimate_cluster_statistic(series, f, replace(cfg, p=cfg.alpha))


def sum_index_alpha_blocks(series, cfg: EstimatorConfig) -> EstimateResult:
    """Cluster index for sums c(1) from extremal l^alpha-blocks.

    The asymptotic theory behind the plug-in variance assumes alpha < 2; the
    point estimate is well defined for any alpha, so larger values only warn.
    """
    if cfg.alpha >= 2:
        warnings.warn("sum-index inference assumes alpha < 2; estimate may be unreliable")
    f = ClusterFunctional("sum-index", alpha=cfg.alpha)
    return estimate_cluster_statistic(series, f, replace(cfg, p=cfg.alpha))


def cluster_size_probs(series, cfg: EstimatorConfig, j_max: int) -> list[EstimateResult]:
    """Cluster-size probability estimates pi_hat_j for j = 1..j_max.

    All j share the same blocks and threshold, so the estimates telescope:
    their sum over j = 1..b equals the extremal-index estimate exactly.
    """
    vals = series_values(series)
    n = len(vals)
    k = cfg.k
    b = resolve_block_length(n, k, cfg.b)
    if not 1 <= j_max <= b:
        raise ValueError("j_max must satisfy 1 <= j_max <= b")
    p = cfg.p if cfg.p is not None else cfg.alpha
    part, threshold, exceed = _threshold_and_exceedances(vals, k, b, p)

    s1 = np.zeros(j_max)
    s2 = np.zeros(j_max)
    for t in exceed:
        x = np.abs(part.values[t])
        m = x.max()
        ra = np.sort((x / m) ** cfg.alpha)[::-1]
        s = float(np.sum(ra))
        padded = np.concatenate([ra, [0.0]])
        vals_j = (padded[:j_max] - padded[1 : j_max + 1]) / s
        s1 += vals_j
        s2 += vals_j * vals_j
    results = []
    for idx in range(j_max):
        est = s1[idx] / k
        var = max(s2[idx] / k - est * est, 0.0)
        results.append(
            EstimateResult(
                estimate=float(est),
                plug_in_variance=float(var),
                k_used=k,
                b_used=b,
                m_used=part.m,
                threshold=threshold,
                p_used=p,
                alpha_used=cfg.alpha,
            )
        )
    return results


def _classic_blocks_count(series, k, b, block_p):
    vals = series_values(series)
    n = len(vals)
    if k + 1 > n:
        raise ValueError("k + 1 exceeds the sample size")
    if k < 1 or b < 1:
        raise ValueError("k and b must be >= 1")
    absx = np.abs(vals)
    # (k+1)-th largest absolute value over the whole sample
    threshold = float(np.partition(absx, n - k - 1)[n - k - 1])
    if threshold == 0.0 and absx.max() == 0.0:
        raise ValueError("degenerate sample: all values are zero")
    part = partition(vals, b)
    norms = lp_modulus_rows(part.values, block_p)
    return int(np.count_nonzero(norms > threshold))


def extremal_index_classic_blocks(series, k: int, b: int) -> float:
    """Classic l^inf-blocks extremal index: the number of blocks whose
    maximum exceeds the (k+1)-th largest |X_t|, divided by k (the number of
    sample exceedances of that threshold)."""
    return _classic_blocks_count(series, k, b, INF) / k


def sum_index_classic_blocks(series, k: int, b: int) -> float:
    """Classic l^inf-blocks estimator of c(1): blocks whose l^1-norm exceeds
    the (k+1)-th largest |X_t|, divided by k."""
    return _classic_blocks_count(series, k, b, 1.0) / k


# ---------------------------------------------------------------------------
# Hill tail-index estimation
# ---------------------------------------------------------------------------

def _hill_from_sorted_desc(sorted_desc, k_prime, bias_correction=False):
    x_next = sorted_desc[k_prime]
    if not x_next > 0:
        raise ValueError("insufficient positive tail data")
    logs = np.log(sorted_desc[:k_prime] / x_next)
    gamma = float(np.mean(logs))  # estimates 1/alpha
    if gamma == 0.0:
        raise ValueError("degenerate sample: all upper order statistics are equal")
    if not bias_correction:
        return 1.0 / gamma
    # Second-order correction by regressing the rescaled log-spacings
    # z_i = i * (log x_(i) - log x_(i+1)) on i/(k'+1); the intercept
    # extrapolates the spacing mean to the far tail.  This is a simple
    # approximation, validated only against the iid Pareto oracle.
    i = np.arange(1, k_prime + 1)
    z = i * np.log(sorted_desc[:k_prime] / sorted_desc[1 : k_prime + 1])
    u = i / (k_prime + 1)
    slope, intercept = np.polyfit(u, z, 1)
    if not intercept > 0:
        raise ValueError("bias-corrected Hill failed: nonpositive intercept")
    return 1.0 / float(intercept)


def hill_estimate(series, k_prime: int, bias_correction: bool = False) -> float:
    """Hill estimate of the tail index alpha on absolute values.

    1/alpha_hat is the mean log-spacing of the k' largest |X_t| above the
    (k'+1)-th.  ``bias_correction`` switches to the regression-intercept
    variant documented in `_hill_from_sorted_desc`.
    """
    vals = series_values(series)
    n = len(vals)
    if not 2 <= k_prime < n:
        raise ValueError("k_prime must satisfy 2 <= k' < n")
    absx = np.abs(vals)
    top = np.sort(np.partition(absx, n - k_prime - 1)[n - k_prime - 1 :])[::-1]
    return _hill_from_sorted_desc(top, k_prime, bias_correction)


_FUNCTIONAL_ESTIMATORS = {
    "extremal-index": extremal_index_alpha_blocks,
    "sum-index": sum_index_alpha_blocks,
}


def estimate_with_estimated_alpha(
    series, functional_kind: str, k: int, k_prime: int, j: Optional[int] = None, b: Optional[int] = None
) -> EstimateResult:
    """Run hill_estimate, then the requested l^alpha-blocks estimator with
    p = alpha = alpha_hat(k')."""
    alpha_hat = hill_estimate(series, k_prime)
    cfg = EstimatorConfig(k=k, alpha=alpha_hat, b=b)
    if functional_kind == "cluster-size":
        if j is None:
            raise ValueError("cluster-size requires j")
        return cluster_size_probs(series, cfg, j)[j - 1]
    if functional_kind == "constant-one":
        f = ClusterFunctional("constant-one", alpha=alpha_hat)
        return estimate_cluster_statistic(series, f, replace(cfg, p=alpha_hat))
    est = _FUNCTIONAL_ESTIMATORS.get(functional_kind)
    if est is None:
        raise ValueError(f"unknown functional kind {functional_kind!r}")
    return est(series, cfg)
