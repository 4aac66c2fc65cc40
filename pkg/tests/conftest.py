"""Session-scoped Monte Carlo runs shared between module and acceptance tests.

Everything here is deterministic: one fixed master seed per study, replicate
seeds derived from it.  The heavy runs match the benchmark protocol
(n = 12000, k = 8, b = 38) and are reused wherever a test needs them.
"""

import time

import numpy as np
import pytest

from lpblocks.experiments import (
    EstimatorSetting,
    McConfig,
    default_k_grid,
    default_k_prime_grid,
    run_heatmap,
    run_mc,
    run_variance_comparison,
)
from lpblocks.models import AR1, IidPareto, KestenSRE, derive_seed, simulate
from lpblocks.estimators import hill_estimate

MASTER_SEED = 2026


@pytest.fixture(scope="session")
def kesten_theta_report():
    """Extremal-index MC study on the benchmark Kesten model, with wall time."""
    cfg = McConfig(
        model=KestenSRE(),
        n=12000,
        reps=500,
        estimator=EstimatorSetting(functional="extremal-index", k=8, alpha=1.0, b=38),
        master_seed=MASTER_SEED,
    )
    t0 = time.perf_counter()
    report = run_mc(cfg, threads=1)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def kesten_pi_reports():
    reports = {}
    for j in (1, 2, 3):
        cfg = McConfig(
            model=KestenSRE(),
            n=12000,
            reps=500,
            estimator=EstimatorSetting(functional="cluster-size", k=8, alpha=1.0, b=38, j=j),
            master_seed=MASTER_SEED,
        )
        reports[j] = run_mc(cfg, threads=1, oracle_mc_reps=60_000)
    return reports


@pytest.fixture(scope="session")
def ar1_theta_reports():
    reports = {}
    for phi in (0.5, 0.7):
        cfg = McConfig(
            model=AR1(phi=phi, alpha=1.0),
            n=12000,
            reps=500,
            estimator=EstimatorSetting(functional="extremal-index", k=8, alpha=1.0),
            master_seed=MASTER_SEED,
        )
        reports[phi] = run_mc(cfg, threads=1)
    return reports


@pytest.fixture(scope="session")
def ar1_hill_reports():
    reports = {}
    for phi in (0.5, 0.7):
        cfg = McConfig(
            model=AR1(phi=phi, alpha=1.0),
            n=12000,
            reps=500,
            estimator=EstimatorSetting(functional="extremal-index", k=8, k_prime=2000),
            master_seed=MASTER_SEED,
        )
        reports[phi] = run_mc(cfg, threads=1)
    return reports


@pytest.fixture(scope="session")
def ar1_variance_comparison():
    return run_variance_comparison(AR1(phi=0.5, alpha=1.0), n=12000, reps=500, k=8,
                                   master_seed=MASTER_SEED)


@pytest.fixture(scope="session")
def heatmap_grids():
    grids = {}
    for name, model in (
        ("ar1-0.5", AR1(phi=0.5, alpha=1.0)),
        ("ar1-0.7", AR1(phi=0.7, alpha=1.0)),
        ("kesten", KestenSRE()),
    ):
        grids[name] = run_heatmap(
            model, n=12000, reps=300,
            k_grid=default_k_grid(), k_prime_grid=default_k_prime_grid(),
            master_seed=MASTER_SEED,
        )
    return grids


@pytest.fixture(scope="session")
def pareto_hill_estimates():
    """Hill estimates on iid Pareto(1), n = 1e5, k' = 2000, 20 seeds."""
    model = IidPareto(alpha=1.0)
    return np.array([
        hill_estimate(simulate(model, 100_000, derive_seed(MASTER_SEED, r, stream=7)), 2000)
        for r in range(20)
    ])
