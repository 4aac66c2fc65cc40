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
from lpblocks.models import AR1, KestenSRE, IidPareto


def _small_cfg(**overrides):
    defaults = dict(
        model=KestenSRE(),
        n=2000,
        reps=12,
        estimator=EstimatorSetting(functional="extremal-index", k=4, alpha=1.0),
        master_seed=5,
    )
    defaults.update(overrides)
    return McConfig(**defaults)


def test_run_mc_deterministic_across_thread_counts():
    reports = [run_mc(_small_cfg(), threads=t, oracle_mc_reps=2000) for t in (1, 3, 7)]
    base = reports[0]
    for other in reports[1:]:
        assert [r.result.estimate for r in other.per_rep] == [r.result.estimate for r in base.per_rep]
        assert other.mean == base.mean
        assert other.sd == base.sd
        assert other.mse_vs_oracle == base.mse_vs_oracle
    # and bit-identical on a fresh run with the same config
    again = run_mc(_small_cfg(), threads=2, oracle_mc_reps=2000)
    assert again.mean == base.mean


def test_run_mc_mse_identity_and_overlay():
    report = run_mc(_small_cfg(reps=40), oracle_mc_reps=2000)
    bias = report.mean - report.oracle.value
    assert report.mse_vs_oracle == pytest.approx(report.sd**2 + bias**2, rel=1e-12)
    overlay = report.gaussian_overlay
    assert overlay["center"] == report.oracle.value
    assert overlay["sd_empirical"] == report.sd
    assert overlay["empirical_mean"] == report.mean
    assert overlay["sd_plugin"] > 0.0
    assert len(report.per_rep) == 40
    seeds = {r.seed for r in report.per_rep}
    assert len(seeds) == 40


def test_run_mc_reports_failing_seed():
    cfg = _small_cfg(estimator=EstimatorSetting(functional="extremal-index", k=4, alpha=1.0, b=1500))
    with pytest.raises(RuntimeError, match=r"replicate 0 \(seed \d+\) failed"):
        run_mc(cfg, oracle_mc_reps=2000)


def test_run_mc_validates_config():
    with pytest.raises(ValueError, match="reps"):
        _small_cfg(reps=1)
    with pytest.raises(ValueError, match="alpha or k_prime"):
        EstimatorSetting(functional="extremal-index", k=4)
    with pytest.raises(ValueError, match="requires j"):
        EstimatorSetting(functional="cluster-size", k=4, alpha=1.0)


def test_heatmap_single_cell_reduces_to_run_mc():
    model = KestenSRE()
    grid = run_heatmap(model, n=2000, reps=10, k_grid=[6], k_prime_grid=[300],
                       master_seed=9, oracle_mc_reps=2000)
    cfg = McConfig(model=model, n=2000, reps=10,
                   estimator=EstimatorSetting(functional="extremal-index", k=6, k_prime=300),
                   master_seed=9)
    report = run_mc(cfg, oracle_mc_reps=2000)
    assert grid.mean[0, 0] == report.mean
    assert grid.sd[0, 0] == report.sd
    assert grid.mse[0, 0] == report.mse_vs_oracle


def test_heatmap_common_random_numbers_across_cells():
    # every cell must see the same series per replicate: a k-cell of a grid
    # equals the same cell computed from a single-k grid
    model = AR1(phi=0.5, alpha=1.0)
    grid = run_heatmap(model, n=2000, reps=8, k_grid=[4, 9], k_prime_grid=[200, 400],
                       master_seed=3, oracle_mc_reps=2000)
    solo = run_heatmap(model, n=2000, reps=8, k_grid=[9], k_prime_grid=[400],
                       master_seed=3, oracle_mc_reps=2000)
    assert grid.mean[1, 1] == solo.mean[0, 0]
    assert grid.sd[1, 1] == solo.sd[0, 0]


def test_heatmap_skips_invalid_cells_with_reason():
    grid = run_heatmap(KestenSRE(), n=900, reps=5, k_grid=[4, 2000], k_prime_grid=[100, 5000],
                       master_seed=1, oracle_mc_reps=2000)
    assert np.isnan(grid.mean[1, 0]) and np.isnan(grid.mean[1, 1])
    assert np.isnan(grid.mean[0, 1])
    assert not np.isnan(grid.mean[0, 0])
    reasons = {(k, kp): reason for k, kp, reason in grid.skipped}
    assert (2000, 100) in reasons and "block length" in reasons[(2000, 100)]
    assert (4, 5000) in reasons and "k_prime" in reasons[(4, 5000)]


def test_default_grids_match_documented_ranges():
    assert default_k_grid() == (4, 8, 16, 32, 64)
    kp = default_k_prime_grid()
    assert kp[0] == 100 and kp[-1] == 4000
    assert all(a < b for a, b in zip(kp, kp[1:]))


def test_variance_comparison_runs_and_reports_scaled_variances():
    cmp = run_variance_comparison(AR1(phi=0.5, alpha=1.0), n=3000, reps=40, k=6, master_seed=4)
    assert cmp.k == 6 and cmp.b == 22
    assert cmp.k_var_alpha_blocks > 0.0
    assert cmp.k_var_classic > 0.0
    assert cmp.ratio == cmp.k_var_alpha_blocks / cmp.k_var_classic
    with pytest.raises(ValueError, match="linear-class"):
        run_variance_comparison(KestenSRE(), n=3000, reps=10, k=6)


def test_variance_comparison_deterministic_across_threads():
    a = run_variance_comparison(IidPareto(alpha=1.0), n=2000, reps=16, k=4, master_seed=2, threads=1)
    b = run_variance_comparison(IidPareto(alpha=1.0), n=2000, reps=16, k=4, master_seed=2, threads=4)
    assert a == b
