"""Seeded simulation of stationary heavy-tailed time-series models.

Every model here is regularly varying with a known tail index, and every
trajectory is a pure function of ``(model, n, seed)``: the same triple always
reproduces the same values bit for bit.  Parallel Monte Carlo derives one
independent stream per replicate from a master seed via `derive_seed`.

Supported models
----------------
- ``IidPareto`` / ``IidStudentAbs``: iid draws, extremal index 1.
- ``LinearMA``: finite moving average over heavy-tailed noise.
- ``MaxMA``: max-moving average over nonnegative Pareto noise.
- ``AR1``: autoregression of order one with absolute Student noise.
- ``KestenSRE``: scalar affine stochastic recurrence X_t = A_t X_{t-1} + B_t
  with lognormal A and uniform B; heavy tails arise from the recursion even
  though A and B are light-tailed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.signal import lfilter

# Steps discarded before recording for the recursive models (AR1, KestenSRE).
# Both are geometrically ergodic, so 2000 steps starting from 0 leave no
# detectable initialization effect at the sample sizes used here.
BURN_IN = 2000

NOISE_KINDS = ("student-abs", "pareto-sym")


# ---------------------------------------------------------------------------
# model specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IidPareto:
    """Iid standard Pareto: P(X > x) = x^(-alpha) for x >= 1."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class IidStudentAbs:
    """Iid |T| with T Student-t; degrees of freedom = tail index."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class LinearMA:
    """Finite moving average X_t = sum_j coeffs[j] * Z_{t-j}."""

    coeffs: tuple
    alpha: float
    noise: str = "student-abs"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise ValueError("filter must have at least one coefficient")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.noise not in NOISE_KINDS:
            raise ValueError(f"noise must be one of {NOISE_KINDS}")


@dataclass(frozen=True)
class MaxMA:
    """Max-moving average X_t = max_j coeffs[j] * Z_{t-j}, Z nonnegative Pareto."""

    coeffs: tuple
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise ValueError("filter must have at least one coefficient")
        if any(c < 0 for c in self.coeffs):
            raise ValueError("max-moving average coefficients must be >= 0")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class AR1:
    """X_t = phi * X_{t-1} + Z_t with absolute Student(alpha) noise, |phi| < 1."""

    phi: float
    alpha: float

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ValueError("AR1 requires |phi| < 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class KestenSRE:
    """Scalar stochastic recurrence X_t = A_t X_{t-1} + B_t.

    log A ~ Normal(log_a_mu, log_a_sigma^2) and B ~ Uniform(0, 1).  The tail
    index is the unique alpha > 0 with E[A^alpha] = 1, which for lognormal A
    is alpha = -2 * log_a_mu / log_a_sigma^2.  The benchmark parameterization
    log A = N - 0.5 gives alpha = 1.
    """

    log_a_mu: float = -0.5
    log_a_sigma: float = 1.0

    def __post_init__(self):
        if not self.log_a_sigma > 0:
            raise ValueError("log_a_sigma must be > 0")
        if not self.log_a_mu < 0:
            raise ValueError("contraction requires E[log A] = log_a_mu < 0")

    @property
    def alpha(self) -> float:
        return -2.0 * self.log_a_mu / self.log_a_sigma**2


ModelSpec = Union[IidPareto, IidStudentAbs, LinearMA, MaxMA, AR1, KestenSRE]


@dataclass(frozen=True, eq=False)
class Series:
    """A simulated trajectory plus the provenance needed to regenerate it."""

    values: np.ndarray
    model: ModelSpec
    seed: int
    n: int


def series_values(series) -> np.ndarray:
    """Accept a Series or a bare array and return the float value vector."""
    if isinstance(series, Series):
        return series.values
    return np.asarray(series, dtype=float)


# ---------------------------------------------------------------------------
# elementary draws
# ---------------------------------------------------------------------------

def pareto_draw(alpha, rng, size=None):
    """Standard Pareto(alpha) draws: P(X > x) = x^(-alpha), x >= 1."""
    # 1 - U lies in (0, 1], so the power never divides by zero.
    return (1.0 - rng.random(size)) ** (-1.0 / alpha)


def pareto_sym_draw(alpha, rng, size=None):
    """Symmetric Pareto: independent sign flip times a Pareto(alpha) draw."""
    signs = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return signs * pareto_draw(alpha, rng, size)


def student_abs_draw(alpha, rng, size=None):
    """|T| with T Student-t(alpha), via the Gaussian / chi-square ratio.

    T = Z / sqrt(V / alpha) with Z standard normal and V chi-square(alpha)
    is the exact Student law, so the draws carry tail index alpha without
    any inverse-CDF approximation.
    """
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    z = rng.standard_normal(size)
    v = rng.chisquare(alpha, size)
    return np.abs(z / np.sqrt(v / alpha))


def _noise_draw(kind, alpha, rng, size):
    if kind == "student-abs":
        return student_abs_draw(alpha, rng, size)
    if kind == "pareto-sym":
        return pareto_sym_draw(alpha, rng, size)
    raise ValueError(f"unknown noise kind {kind!r}")


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

def _simulate_iid_pareto(model, n, rng):
    return pareto_draw(model.alpha, rng, n)


def _simulate_iid_student_abs(model, n, rng):
    return student_abs_draw(model.alpha, rng, n)


def _simulate_linear_ma(model, n, rng):
    # n + m0 noises so that every output already uses the full filter.
    extra = len(model.coeffs) - 1
    z = _noise_draw(model.noise, model.alpha, rng, n + extra)
    return np.convolve(z, np.asarray(model.coeffs), mode="valid")


def _simulate_max_ma(model, n, rng):
    extra = len(model.coeffs) - 1
    z = pareto_draw(model.alpha, rng, n + extra)
    shifted = [c * z[extra - j : extra - j + n] for j, c in enumerate(model.coeffs)]
    return np.max(shifted, axis=0)


def _simulate_ar1(model, n, rng):
    z = student_abs_draw(model.alpha, rng, BURN_IN + n)
    # lfilter runs the exact recursion x_t = phi x_{t-1} + z_t from x_0 = 0;
    # the burn-in removes the initialization effect.
    x = lfilter([1.0], [1.0, -model.phi], z)
    return x[BURN_IN:]


def _simulate_kesten(model, n, rng):
    total = BURN_IN + n
    a = np.exp(model.log_a_mu + model.log_a_sigma * rng.standard_normal(total))
    b = rng.random(total)
    # Plain-float loop: the recursion is inherently sequential and this is
    # fast enough (~2 ms for n = 14000).
    al = a.tolist()
    bl = b.tolist()
    out = [0.0] * total
    prev = 0.0
    for i in range(total):
        prev = al[i] * prev + bl[i]
        out[i] = prev
    return np.asarray(out[BURN_IN:])


_SIMULATORS = {
    IidPareto: _simulate_iid_pareto,
    IidStudentAbs: _simulate_iid_student_abs,
    LinearMA: _simulate_linear_ma,
    MaxMA: _simulate_max_ma,
    AR1: _simulate_ar1,
    KestenSRE: _simulate_kesten,
}


def simulate(model: ModelSpec, n: int, seed: int) -> Series:
    """Simulate a stationary trajectory of length n.

    Deterministic in ``(model, seed, n)``.  AR1 and KestenSRE discard
    `BURN_IN` initial steps; the moving averages draw the extra pre-sample
    noises they need, so the returned segment is stationary throughout.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    sim = _SIMULATORS.get(type(model))
    if sim is None:
        raise ValueError(f"unknown model type {type(model).__name__}")
    rng = np.random.default_rng(seed)
    values = sim(model, n, rng)
    return Series(values=values, model=model, seed=seed, n=n)


def derive_seed(master_seed: int, index: int, stream: int = 0) -> int:
    """Derive an independent 64-bit seed from (master_seed, index).

    Uses numpy's SeedSequence hash, so distinct (master, stream, index)
    triples give independent generator states; this is what makes parallel
    replicates deterministic regardless of execution order.
    """
    ss = np.random.SeedSequence((int(master_seed), int(stream), int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# JSON representation (field names are the CLI wire format)
# ---------------------------------------------------------------------------

_MODEL_KINDS = {
    "iid-pareto": (IidPareto, ("alpha",), ()),
    "iid-student-abs": (IidStudentAbs, ("alpha",), ()),
    "linear-ma": (LinearMA, ("coeffs", "alpha"), ("noise",)),
    "max-ma": (MaxMA, ("coeffs", "alpha"), ()),
    "ar1": (AR1, ("phi", "alpha"), ()),
    "kesten": (KestenSRE, (), ("log_a_mu", "log_a_sigma")),
}

_KIND_BY_TYPE = {cls: kind for kind, (cls, _, _) in _MODEL_KINDS.items()}


def model_from_dict(d: dict) -> ModelSpec:
    """Build a ModelSpec from its JSON object; unknown fields are rejected."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("model JSON must be an object with a 'kind' field")
    kind = d["kind"]
    if kind not in _MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {sorted(_MODEL_KINDS)}")
    cls, required, optional = _MODEL_KINDS[kind]
    extra = set(d) - {"kind"} - set(required) - set(optional)
    if extra:
        raise ValueError(f"unknown field(s) for model kind {kind!r}: {sorted(extra)}")
    missing = set(required) - set(d)
    if missing:
        raise ValueError(f"missing field(s) for model kind {kind!r}: {sorted(missing)}")
    kwargs = {k: d[k] for k in d if k != "kind"}
    if "coeffs" in kwargs:
        kwargs["coeffs"] = tuple(kwargs["coeffs"])
    return cls(**kwargs)


def model_to_dict(model: ModelSpec) -> dict:
    kind = _KIND_BY_TYPE.get(type(model))
    if kind is None:
        raise ValueError(f"unknown model type {type(model).__name__}")
    d = {"kind": kind}
    cls, required, optional = _MODEL_KINDS[kind]
    for name in (*required, *optional):
        value = getattr(model, name)
        d[name] = list(value) if isinstance(value, tuple) else value
    return d


def model_alpha(model: ModelSpec) -> float:
    """Tail index of the model (exact by construction for every class)."""
    return model.alpha


def effective_filter(model: ModelSpec):
    """The deterministic cluster filter of a linear-class model, or None.

    Iid models are the identity filter; AR1 is the geometric filter cut at
    machine precision; KestenSRE has a random cluster shape and returns None.
    """
    if isinstance(model, (IidPareto, IidStudentAbs)):
        return np.array([1.0])
    if isinstance(model, (LinearMA, MaxMA)):
        return np.asarray(model.coeffs, dtype=float)
    if isinstance(model, AR1):
        phi = abs(model.phi)
        if phi == 0.0:
            return np.array([1.0])
        depth = int(math.ceil(math.log(1e-16) / math.log(phi))) + 1
        return phi ** np.arange(depth)
    return None
