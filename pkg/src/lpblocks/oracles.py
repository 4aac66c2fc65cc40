"""Ground-truth cluster quantities for every model class.

Linear-class models (iid, moving averages, AR1) have a deterministic cluster
shape given by their coefficient filter, so the extremal index, the cluster
indices c(p) and the cluster-size probabilities are closed-form ratios of
filter norms.  The Kesten recursion has a random cluster shape; its truths
are computed by Monte Carlo over the two-sided multiplicative-walk
representation of the normalized cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blocks import INF
from .estimators import ClusterFunctional
from .models import KestenSRE, ModelSpec, effective_filter, model_alpha, pareto_draw

# Per-side truncation defaults for the Kesten cluster walk.
DEFAULT_HORIZON_EPS = 1e-8
MAX_LAGS = 10_000
_CHUNK = 20_000


# ---------------------------------------------------------------------------
# closed forms for deterministic (linear-filter) clusters
# ---------------------------------------------------------------------------

def _filter_powers(coeffs, alpha):
    a = np.abs(np.asarray(coeffs, dtype=float)) ** alpha
    s = float(a.sum())
    if s == 0.0:
        raise ValueError("zero filter")
    return a, s


def oracle_linear_theta(coeffs, alpha) -> float:
    """Extremal index of a filter: max_j |phi_j|^alpha / sum_j |phi_j|^alpha."""
    a, s = _filter_powers(coeffs, alpha)
    return float(a.max() / s)


def oracle_linear_cp(coeffs, alpha, p) -> float:
    """Cluster index c(p) of a filter: ||phi||_p^alpha / ||phi||_alpha^alpha.

    c(alpha) = 1 exactly; c(inf) equals the extremal index.
    """
    a = np.abs(np.asarray(coeffs, dtype=float))
    denom = float((a**alpha).sum())
    if denom == 0.0:
        raise ValueError("zero filter")
    if p == INF:
        num = float(a.max() ** alpha)
    else:
        num = float((a**p).sum() ** (alpha / p))
    return num / denom


def oracle_linear_pi(coeffs, alpha, j) -> float:
    """Cluster-size probability pi_j of a filter.

    Sort |phi|^alpha descending and normalize; pi_j is the gap between the
    j-th and (j+1)-th normalized weights (zero beyond the filter length).
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    a, s = _filter_powers(coeffs, alpha)
    w = np.sort(a)[::-1] / s
    wj = float(w[j - 1]) if j <= len(w) else 0.0
    wj1 = float(w[j]) if j < len(w) else 0.0
    return wj - wj1


# ---------------------------------------------------------------------------
# Kesten cluster sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QSample:
    """One draw of the normalized cluster: weights with sum(w^alpha) = 1,
    an independent Pareto(alpha) magnitude, and the index of the t=0 lag."""

    weights: np.ndarray
    pareto_y: float
    center: int


def _walk_side_batch(nreps, mu, sigma, stop_level, rng):
    """Log-products of one side of the cluster walk for a batch of samples.

    Each row is a random walk with increments N(mu, sigma^2), simulated until
    it first drops below ``stop_level`` (or MAX_LAGS).  Entries beyond the
    stopping lag are -inf so that exp() turns them into zero weights.
    Returns (log matrix, per-row lag counts).
    """
    width = min(MAX_LAGS, max(8, int(2.2 * stop_level / mu)))
    logs = np.cumsum(rng.normal(mu, sigma, size=(nreps, width)), axis=1)
    below = logs < stop_level
    hit = below.any(axis=1)
    lengths = np.where(hit, below.argmax(axis=1) + 1, width)
    while not hit.all() and width < MAX_LAGS:
        idx = np.flatnonzero(~hit)
        extra = min(width, MAX_LAGS - width)
        steps = np.cumsum(rng.normal(mu, sigma, size=(len(idx), extra)), axis=1)
        steps += logs[idx, width - 1][:, None]
        logs = np.concatenate([logs, np.full((nreps, extra), -np.inf)], axis=1)
        logs[idx, width : width + extra] = steps
        below = steps < stop_level
        sub_hit = below.any(axis=1)
        lengths[idx] = np.where(sub_hit, width + below.argmax(axis=1) + 1, width + extra)
        hit[idx] = sub_hit
        width += extra
    cols = np.arange(width)
    logs[cols[None, :] >= lengths[:, None]] = -np.inf
    return logs, lengths


def _q_power_batch(model: KestenSRE, nreps, horizon_eps, rng):
    """Unnormalized alpha-powers of the cluster weights for a batch.

    Forward and backward lags are independent multiplicative walks started
    from the t=0 product 1.  A side is truncated once its running product has
    fallen a further full factor horizon_eps below horizon_eps itself: the
    chance that a drift mu < 0, variance sigma^2 walk ever climbs back by
    |log eps| is exp(2 mu |log eps| / sigma^2) (= eps for the benchmark
    parameterization), so with that probability the discarded lags all carry
    alpha-mass below eps.

    Returns (back, fwd, lengths_back, lengths_fwd): matrices of Pi_t^alpha
    with zero padding, backward columns in lag order -1, -2, ...
    """
    alpha = model.alpha
    if not horizon_eps > 0:
        raise ValueError("horizon_eps must be > 0")
    stop_level = 2.0 * math.log(horizon_eps)
    logs_b, len_b = _walk_side_batch(nreps, model.log_a_mu, model.log_a_sigma, stop_level, rng)
    logs_f, len_f = _walk_side_batch(nreps, model.log_a_mu, model.log_a_sigma, stop_level, rng)
    with np.errstate(under="ignore"):
        back = np.exp(alpha * logs_b)
        fwd = np.exp(alpha * logs_f)
    return back, fwd, len_b, len_f


def sample_kesten_q(model: KestenSRE, horizon_eps=DEFAULT_HORIZON_EPS, rng=None) -> QSample:
    """Draw one normalized cluster sample for a Kesten model.

    The weight vector runs from the deepest retained backward lag to the
    deepest forward lag, alpha-normalized so that sum(weights^alpha) = 1;
    ``pareto_y`` is an independent Pareto(alpha) draw.
    """
    if rng is None:
        rng = np.random.default_rng()
    alpha = model.alpha
    back, fwd, len_b, len_f = _q_power_batch(model, 1, horizon_eps, rng)
    nb, nf = int(len_b[0]), int(len_f[0])
    powers = np.concatenate([back[0, :nb][::-1], [1.0], fwd[0, :nf]])
    s = float(powers.sum())
    weights = (powers / s) ** (1.0 / alpha)
    y = float(pareto_draw(alpha, rng))
    return QSample(weights=weights, pareto_y=y, center=nb)


def _batch_functional_values(f: ClusterFunctional, model, back, fwd, len_b, len_f, rng):
    """Vectorized f(Q) (or f(Y*Q) for custom f) over one batch."""
    alpha = model.alpha
    s_alpha = 1.0 + back.sum(axis=1) + fwd.sum(axis=1)
    if f.kind == "constant-one":
        return np.ones(len(s_alpha))
    if f.kind == "extremal-index":
        peak = np.maximum(back.max(axis=1, initial=0.0), fwd.max(axis=1, initial=0.0))
        return np.maximum(peak, 1.0) / s_alpha
    if f.kind == "sum-index":
        inv = 1.0 / alpha
        with np.errstate(under="ignore"):
            s_one = 1.0 + (back**inv).sum(axis=1) + (fwd**inv).sum(axis=1)
        return s_one**alpha / s_alpha
    if f.kind == "cluster-size":
        combined = np.concatenate([back, np.ones((back.shape[0], 1)), fwd], axis=1)
        top = -np.sort(-combined, axis=1)[:, : f.j + 1]
        wj = top[:, f.j - 1] if f.j <= top.shape[1] else np.zeros(len(s_alpha))
        wj1 = top[:, f.j] if f.j < top.shape[1] else np.zeros(len(s_alpha))
        return (wj - wj1) / s_alpha
    # custom: assemble each weight vector and scale by an independent Pareto Y
    out = np.empty(back.shape[0])
    inv = 1.0 / alpha
    for i in range(back.shape[0]):
        nb, nf = int(len_b[i]), int(len_f[i])
        powers = np.concatenate([back[i, :nb][::-1], [1.0], fwd[i, :nf]])
        weights = (powers / powers.sum()) ** inv
        y = float(pareto_draw(alpha, rng))
        out[i] = f.fn(y * weights)
    return out


@dataclass(frozen=True)
class McOracleResult:
    mean: float
    mc_stderr: float
    reps: int


def oracle_kesten_statistic(
    model: KestenSRE,
    f: ClusterFunctional,
    reps: int,
    horizon_eps=DEFAULT_HORIZON_EPS,
    seed: int = 0,
) -> McOracleResult:
    """Monte Carlo truth E[f(Q)] over the Kesten cluster representation.

    Scale-invariant functionals are evaluated on Q directly; custom
    functionals on Y*Q.  Batches are accumulated in fixed chunk order, so the
    result is deterministic in (reps, seed).
    """
    if reps < 100:
        raise ValueError("reps must be >= 100")
    rng = np.random.default_rng(seed)
    values = []
    done = 0
    while done < reps:
        nchunk = min(_CHUNK, reps - done)
        back, fwd, len_b, len_f = _q_power_batch(model, nchunk, horizon_eps, rng)
        values.append(_batch_functional_values(f, model, back, fwd, len_b, len_f, rng))
        done += nchunk
    values = np.concatenate(values)
    mean = float(values.mean())
    stderr = float(values.std() / math.sqrt(reps))
    return McOracleResult(mean=mean, mc_stderr=stderr, reps=reps)


def oracle_kesten_cp(
    model: KestenSRE,
    p,
    reps: int,
    horizon_eps=DEFAULT_HORIZON_EPS,
    seed: int = 0,
) -> McOracleResult:
    """Monte Carlo estimate of the cluster index c(p) = E[||Q||_p^alpha]."""
    if reps < 100:
        raise ValueError("reps must be >= 100")
    alpha = model.alpha
    rng = np.random.default_rng(seed)
    values = []
    done = 0
    while done < reps:
        nchunk = min(_CHUNK, reps - done)
        back, fwd, len_b, len_f = _q_power_batch(model, nchunk, horizon_eps, rng)
        s_alpha = 1.0 + back.sum(axis=1) + fwd.sum(axis=1)
        if p == INF:
            peak = np.maximum(back.max(axis=1, initial=0.0), fwd.max(axis=1, initial=0.0))
            num = np.maximum(peak, 1.0)
        else:
            ratio = p / alpha
            with np.errstate(under="ignore"):
                s_p = 1.0 + (back**ratio).sum(axis=1) + (fwd**ratio).sum(axis=1)
            num = s_p ** (alpha / p)
        values.append(num / s_alpha)
        done += nchunk
    values = np.concatenate(values)
    return McOracleResult(
        mean=float(values.mean()), mc_stderr=float(values.std() / math.sqrt(reps)), reps=reps
    )


# ---------------------------------------------------------------------------
# dispatch: the truth for (model, functional)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleValue:
    value: float
    provenance: str
    mc_stderr: Optional[float] = None


def model_oracle(
    model: ModelSpec,
    functional: str,
    j: Optional[int] = None,
    mc_reps: int = 100_000,
    horizon_eps=DEFAULT_HORIZON_EPS,
    seed: int = 0,
) -> OracleValue:
    """Ground truth of a built-in cluster statistic for a model.

    Linear-class models use the closed-form filter ratios; Kesten models fall
    back to the Monte Carlo oracle (provenance records reps and seed).
    """
    if functional == "constant-one":
        return OracleValue(value=1.0, provenance="constant")
    alpha = model_alpha(model)
    coeffs = effective_filter(model)
    if coeffs is not None:
        if functional == "extremal-index":
            return OracleValue(oracle_linear_theta(coeffs, alpha), "oracle:linear-theta")
        if functional == "sum-index":
            return OracleValue(oracle_linear_cp(coeffs, alpha, 1.0), "oracle:linear-c1")
        if functional == "cluster-size":
            if j is None:
                raise ValueError("cluster-size oracle requires j")
            return OracleValue(oracle_linear_pi(coeffs, alpha, j), f"oracle:linear-pi{j}")
        raise ValueError(f"no oracle for functional {functional!r}")
    if not isinstance(model, KestenSRE):
        raise ValueError(f"no oracle for model type {type(model).__name__}")
    f = ClusterFunctional(functional, alpha=alpha, j=j)
    res = oracle_kesten_statistic(model, f, reps=mc_reps, horizon_eps=horizon_eps, seed=seed)
    name = functional if j is None else f"{functional}{j}"
    return OracleValue(
        value=res.mean,
        provenance=f"oracle:kesten-mc:{name}(reps={mc_reps},seed={seed})",
        mc_stderr=res.mc_stderr,
    )
