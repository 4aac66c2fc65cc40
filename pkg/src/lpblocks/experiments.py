"""Monte Carlo harness: replicate loops, heatmap grids, variance contrasts.

Replicates are independent work items.  Each derives its own seed from
(master_seed, replicate index), and results are reduced in replicate order,
so a report is bit-identical regardless of the thread count.  Heatmap grids
reuse the same simulated series across all (k, k') cells (common random
numbers), so cell differences reflect tuning only.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .estimators import (
    ClusterFunctional,
    EstimatorConfig,
    _hill_from_sorted_desc,
    cluster_size_probs,
    estimate_cluster_statistic,
    extremal_index_alpha_blocks,
    extremal_index_classic_blocks,
    hill_estimate,
    resolve_block_length,
)
from .models import ModelSpec, derive_seed, effective_filter, model_alpha, simulate
from .oracles import OracleValue, model_oracle

MC_FUNCTIONALS = ("extremal-index", "sum-index", "cluster-size", "constant-one")


@dataclass(frozen=True)
class EstimatorSetting:
    """What to estimate and how it is tuned.

    ``alpha`` is the known tail index; leaving it None requires ``k_prime``,
    which switches to the Hill-estimated tail index per replicate.  ``p`` is
    either the policy string "alpha" or a fixed exponent.
    """

    functional: str
    k: int
    alpha: Optional[float] = None
    p: Union[str, float] = "alpha"
    j: Optional[int] = None
    b: Optional[int] = None
    k_prime: Optional[int] = None

    def __post_init__(self):
        if self.functional not in MC_FUNCTIONALS:
            raise ValueError(f"functional must be one of {MC_FUNCTIONALS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha is None and self.k_prime is None:
            raise ValueError("either alpha or k_prime must be given")
        if self.functional == "cluster-size" and (self.j is None or self.j < 1):
            raise ValueError("cluster-size requires j >= 1")
        if isinstance(self.p, str) and self.p != "alpha":
            raise ValueError("p must be a number or the policy string 'alpha'")


@dataclass(frozen=True)
class McConfig:
    model: ModelSpec
    n: int
    reps: int
    estimator: EstimatorSetting
    master_seed: int = 0

    def __post_init__(self):
        if self.reps < 2:
            raise ValueError("reps must be >= 2")
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class RepResult:
    rep: int
    seed: int
    result: EstimateResult


@dataclass(frozen=True)
class McReport:
    config: McConfig
    per_rep: list
    mean: float
    sd: float
    mse_vs_oracle: float
    oracle: OracleValue
    gaussian_overlay: dict


def _parallel_map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(item) for item in items]


def _estimate_once(series, setting: EstimatorSetting, alpha: Optional[float] = None) -> EstimateResult:
    """One estimator evaluation; ``alpha`` overrides the Hill step when the
    caller has already computed it (heatmap cells share one Hill fit)."""
    if alpha is None:
        alpha = setting.alpha
        if setting.k_prime is not None:
            alpha = hill_estimate(series, setting.k_prime)
    p = alpha if setting.p == "alpha" else float(setting.p)
    cfg = EstimatorConfig(k=setting.k, alpha=alpha, p=p, b=setting.b)
    if setting.functional == "cluster-size":
        return cluster_size_probs(series, cfg, setting.j)[setting.j - 1]
    f = ClusterFunctional(setting.functional, alpha=alpha)
    return estimate_cluster_statistic(series, f, cfg)


def _oracle_for(cfg_model, setting, mc_reps, master_seed):
    return model_oracle(
        cfg_model,
        setting.functional,
        j=setting.j,
        mc_reps=mc_reps,
        seed=derive_seed(master_seed, 0, stream=1),
    )


def run_mc(cfg: McConfig, threads: int = 1, oracle_mc_reps: int = 100_000) -> McReport:
    """Replicate loop for one estimator setting.

    The report holds every per-replicate result plus summary statistics: the
    empirical mean and SD (population convention, so mse = sd^2 + bias^2
    exactly), the model oracle, and the Gaussian-overlay parameters pairing
    the empirical SD with the mean plug-in SD rescaled by 1/sqrt(k).
    """

    def one(rep):
        seed = derive_seed(cfg.master_seed, rep)
        try:
            series = simulate(cfg.model, cfg.n, seed)
            result = _estimate_once(series, cfg.estimator)
        except Exception as exc:
            raise RuntimeError(f"replicate {rep} (seed {seed}) failed: {exc}") from exc
        return RepResult(rep=rep, seed=seed, result=result)

    per_rep = _parallel_map(one, range(cfg.reps), threads)
    estimates = np.array([r.result.estimate for r in per_rep])
    mean = float(estimates.mean())
    sd = float(estimates.std())
    oracle = _oracle_for(cfg.model, cfg.estimator, oracle_mc_reps, cfg.master_seed)
    mse = float(np.mean((estimates - oracle.value) ** 2))
    plugin_sds = np.sqrt([r.result.plug_in_variance for r in per_rep])
    overlay = {
        "center": oracle.value,
        "empirical_mean": mean,
        "sd_plugin": float(plugin_sds.mean() / math.sqrt(cfg.estimator.k)),
        "sd_empirical": sd,
    }
    return McReport(
        config=cfg,
        per_rep=per_rep,
        mean=mean,
        sd=sd,
        mse_vs_oracle=mse,
        oracle=oracle,
        gaussian_overlay=overlay,
    )


# ---------------------------------------------------------------------------
# (k, k') heatmaps with common random numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatmapGrid:
    k_values: tuple
    k_prime_values: tuple
    mean: np.ndarray  # shape (len(k_values), len(k_prime_values)); NaN = skipped
    sd: np.ndarray
    mse: np.ndarray
    reps: int
    oracle: OracleValue
    skipped: tuple  # (k, k_prime, reason) triples


def _cell_reason(n, k, k_prime, b):
    b_eff = resolve_block_length(n, k, b)
    if b_eff < 1:
        return "derived block length < 1"
    if b_eff > n:
        return "block longer than sample"
    if k >= n // b_eff:
        return "too many extremal blocks (k > m-1)"
    if not 2 <= k_prime < n:
        return "k_prime out of range"
    return None


def run_heatmap(
    model: ModelSpec,
    n: int,
    reps: int,
    k_grid,
    k_prime_grid,
    functional: str = "extremal-index",
    master_seed: int = 0,
    j: Optional[int] = None,
    b: Optional[int] = None,
    threads: int = 1,
    oracle_mc_reps: int = 100_000,
) -> HeatmapGrid:
    """SD and MSE surfaces over (k, k') with Hill-estimated tail index.

    Every cell sees the same ``reps`` simulated series (replicate r is the
    same series in every cell); the absolute values are sorted once per
    replicate and shared by all Hill fits.  Invalid cells are skipped with a
    recorded reason instead of aborting the grid.
    """
    k_values = tuple(int(k) for k in k_grid)
    kp_values = tuple(int(kp) for kp in k_prime_grid)
    if not k_values or not kp_values:
        raise ValueError("grids must be nonempty")
    if reps < 2:
        raise ValueError("reps must be >= 2")

    skipped = []
    valid = {}
    for k in k_values:
        for kp in kp_values:
            reason = _cell_reason(n, k, kp, b)
            if reason is None:
                valid[(k, kp)] = True
            else:
                skipped.append((k, kp, reason))

    setting_by_cell = {
        (k, kp): EstimatorSetting(functional=functional, k=k, j=j, b=b, k_prime=kp)
        for (k, kp) in valid
    }

    def one(rep):
        seed = derive_seed(master_seed, rep)
        try:
            series = simulate(model, n, seed)
            sorted_abs = np.sort(np.abs(series.values))[::-1]
            row = {}
            for kp in kp_values:
                alpha_hat = None
                for k in k_values:
                    if (k, kp) not in valid:
                        continue
                    if alpha_hat is None:
                        alpha_hat = _hill_from_sorted_desc(sorted_abs, kp)
                    res = _estimate_once(series, setting_by_cell[(k, kp)], alpha=alpha_hat)
                    row[(k, kp)] = res.estimate
            return row
        except Exception as exc:
            raise RuntimeError(f"replicate {rep} (seed {seed}) failed: {exc}") from exc

    rows = _parallel_map(one, range(reps), threads)
    oracle = model_oracle(
        model, functional, j=j, mc_reps=oracle_mc_reps, seed=derive_seed(master_seed, 0, stream=1)
    )

    shape = (len(k_values), len(kp_values))
    mean = np.full(shape, np.nan)
    sd = np.full(shape, np.nan)
    mse = np.full(shape, np.nan)
    for i, k in enumerate(k_values):
        for l, kp in enumerate(kp_values):
            if (k, kp) not in valid:
                continue
            cell = np.array([row[(k, kp)] for row in rows])
            mean[i, l] = cell.mean()
            sd[i, l] = cell.std()
            mse[i, l] = np.mean((cell - oracle.value) ** 2)
    return HeatmapGrid(
        k_values=k_values,
        k_prime_values=kp_values,
        mean=mean,
        sd=sd,
        mse=mse,
        reps=reps,
        oracle=oracle,
        skipped=tuple(skipped),
    )


def default_k_grid(lo=4, hi=64, num=None):
    """Geometric grid of integers; defaults reconstruct the heatmap axes."""
    if num is None:
        num = max(2, int(round(math.log2(hi / lo))) + 1)
    pts = np.unique(np.round(np.geomspace(lo, hi, num)).astype(int))
    return tuple(int(p) for p in pts)


def default_k_prime_grid(lo=100, hi=4000, num=None):
    return default_k_grid(lo, hi, num)


# ---------------------------------------------------------------------------
# variance contrast: alpha-blocks vs classic blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarianceComparison:
    k_var_alpha_blocks: float
    k_var_classic: float
    ratio: float
    mean_alpha_blocks: float
    mean_classic: float
    k: int
    b: int
    reps: int


def run_variance_comparison(
    model: ModelSpec, n: int, reps: int, k: int, master_seed: int = 0, threads: int = 1
) -> VarianceComparison:
    """k-scaled empirical variances of the two extremal-index estimators on
    identical series.  Applies to linear-class models, where the alpha-blocks
    estimator has a degenerate (null-variance) limit."""
    if effective_filter(model) is None:
        raise ValueError("variance comparison applies to linear-class models only")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    alpha = model_alpha(model)
    b = resolve_block_length(n, k)
    cfg = EstimatorConfig(k=k, alpha=alpha, b=b)

    def one(rep):
        seed = derive_seed(master_seed, rep)
        try:
            series = simulate(model, n, seed)
            return (
                extremal_index_alpha_blocks(series, cfg).estimate,
                extremal_index_classic_blocks(series, k, b),
            )
        except Exception as exc:
            raise RuntimeError(f"replicate {rep} (seed {seed}) failed: {exc}") from exc

    pairs = _parallel_map(one, range(reps), threads)
    alpha_est = np.array([p[0] for p in pairs])
    classic_est = np.array([p[1] for p in pairs])
    k_var_alpha = float(k * alpha_est.var())
    k_var_classic = float(k * classic_est.var())
    return VarianceComparison(
        k_var_alpha_blocks=k_var_alpha,
        k_var_classic=k_var_classic,
        ratio=k_var_alpha / k_var_classic,
        mean_alpha_blocks=float(alpha_est.mean()),
        mean_classic=float(classic_est.mean()),
        k=k,
        b=b,
        reps=reps,
    )
