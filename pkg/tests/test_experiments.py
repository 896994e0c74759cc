"""Monte Carlo harness: reproducibility, K-monotonicity, Wilson intervals,
root-leaf frequencies, sweep grids, and the CSV table.

Determinism claims are checked the strong way — per-trial outcome arrays
must match bit for bit across repeat runs and across worker counts, and
K-monotonicity must hold trial by trial, not just in the aggregate rate.
"""

import math

import numpy as np
import pytest
import scipy.stats

from rootfinder import (
    BadSizeError,
    ExperimentConfig,
    ExperimentResult,
    ModelSpec,
    TooLargeError,
    parse_model,
    parse_sweep_grid,
    results_csv,
    root_leaf_frequency,
    run_trials,
    sweep,
    wilson_interval,
)
from rootfinder.experiments import CSV_COLUMNS, DEFAULT_MAX_EXACT_N
from rootfinder.rng import DEFAULT_SEED

UA = ModelSpec("uniform")
PA = ModelSpec("preferential")


def small_config(**overrides):
    base = dict(model=UA, estimator="psi", n=40, k=5, trials=60, seed=31)
    base.update(overrides)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# config and result invariants


def test_config_rejects_unknown_estimator():
    with pytest.raises(ValueError):
        small_config(estimator="chi")


def test_config_rejects_tiny_n():
    with pytest.raises(BadSizeError):
        small_config(n=1)


def test_config_rejects_bad_k_and_trials():
    with pytest.raises(ValueError):
        small_config(k=0)
    with pytest.raises(ValueError):
        small_config(trials=0)


def test_result_fields_are_consistent():
    res = run_trials(small_config())
    assert res.trials == 60
    assert 0 <= res.successes <= res.trials
    assert res.rate == res.successes / res.trials
    assert res.lo95 <= res.rate <= res.hi95
    assert res.outcomes.dtype == np.bool_
    assert res.outcomes.shape == (60,)
    assert int(np.count_nonzero(res.outcomes)) == res.successes
    assert res.seconds >= 0.0


def test_result_equality_ignores_wall_time():
    res = run_trials(small_config())
    twin = ExperimentResult(
        successes=res.successes,
        trials=res.trials,
        rate=res.rate,
        lo95=res.lo95,
        hi95=res.hi95,
        seconds=res.seconds + 123.0,
        outcomes=res.outcomes.copy(),
    )
    assert twin == res


def test_k_equal_n_saturates():
    # the confidence set is all of 1..n, so every trial succeeds
    res = run_trials(small_config(n=12, k=12, trials=50))
    assert res.rate == 1.0
    assert res.successes == 50


# ---------------------------------------------------------------------------
# determinism


def test_rerun_is_bit_identical():
    a = run_trials(small_config())
    b = run_trials(small_config())
    assert a == b
    assert np.array_equal(a.outcomes, b.outcomes)


def test_different_seeds_differ():
    a = run_trials(small_config(seed=1))
    b = run_trials(small_config(seed=2))
    assert not np.array_equal(a.outcomes, b.outcomes)


def test_jobs_do_not_change_outcomes():
    config = small_config(trials=48)
    serial = run_trials(config, jobs=1)
    parallel = run_trials(config, jobs=2)
    assert serial == parallel
    assert np.array_equal(serial.outcomes, parallel.outcomes)


def test_success_monotone_in_k_per_trial():
    # shared seed => shared trees, and the K lowest scores nest as K grows,
    # so each individual trial's outcome can only flip False -> True
    results = [
        run_trials(small_config(n=60, k=k, trials=150, seed=5)) for k in (1, 2, 4, 8, 16)
    ]
    for tight, loose in zip(results, results[1:]):
        assert np.all(loose.outcomes >= tight.outcomes)
        assert loose.successes >= tight.successes


# ---------------------------------------------------------------------------
# wilson interval


def test_wilson_matches_reference_implementation():
    for successes, trials in [(0, 10), (7, 10), (50, 100), (999, 1000), (1, 3)]:
        lo, hi = wilson_interval(successes, trials)
        ref = scipy.stats.binomtest(successes, trials).proportion_ci(
            confidence_level=0.95, method="wilson"
        )
        assert math.isclose(lo, ref.low, rel_tol=0, abs_tol=1e-12)
        assert math.isclose(hi, ref.high, rel_tol=0, abs_tol=1e-12)


def test_wilson_brackets_the_point_estimate():
    for successes, trials in [(0, 1), (1, 1), (3, 7), (250, 1000)]:
        lo, hi = wilson_interval(successes, trials)
        assert 0.0 <= lo <= successes / trials <= hi <= 1.0


def test_wilson_rejects_bad_counts():
    with pytest.raises(ValueError):
        wilson_interval(1, 0)
    with pytest.raises(ValueError):
        wilson_interval(-1, 10)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)


def test_wilson_calibration_on_bernoulli_streams():
    # nominal 95% coverage; 400 repetitions at p=0.3 should rarely dip
    # below 90% (binomial 3-sigma around 0.95 is ~0.92)
    rng = np.random.default_rng(2024)
    covered = 0
    reps, trials, p = 400, 100, 0.3
    for _ in range(reps):
        successes = int(rng.binomial(trials, p))
        lo, hi = wilson_interval(successes, trials)
        covered += lo <= p <= hi
    assert covered / reps >= 0.90


# ---------------------------------------------------------------------------
# root-leaf frequency


def test_root_leaf_uniform_n3_is_half():
    # vertex 3 hides vertex 1 as a leaf iff it attaches to vertex 2
    res = root_leaf_frequency(UA, 3, trials=20_000, seed=9)
    sigma = math.sqrt(0.25 / 20_000)
    assert abs(res.rate - 0.5) <= 3 * sigma


def test_root_leaf_uniform_matches_closed_form():
    # P(vertex 1 stays a leaf) = prod_{i=3..n} (1 - 1/(i-1)) = 1/(n-1)
    n, trials = 50, 30_000
    res = root_leaf_frequency(UA, n, trials=trials, seed=11)
    p = 1 / (n - 1)
    sigma = math.sqrt(p * (1 - p) / trials)
    assert abs(res.rate - p) <= 3 * sigma


def test_root_leaf_preferential_scales_like_inverse_sqrt():
    # Theta(1/sqrt(n)): quadrupling n should roughly halve the frequency
    trials = 20_000
    small = root_leaf_frequency(PA, 100, trials=trials, seed=13)
    large = root_leaf_frequency(PA, 400, trials=trials, seed=13)
    assert large.rate > 0
    assert 1.4 <= small.rate / large.rate <= 2.6


def test_root_leaf_rejects_tiny_trees():
    with pytest.raises(BadSizeError):
        root_leaf_frequency(UA, 2, trials=10)
    with pytest.raises(ValueError):
        root_leaf_frequency(UA, 5, trials=0)


def test_root_leaf_jobs_parity():
    a = root_leaf_frequency(UA, 20, trials=64, seed=3, jobs=1)
    b = root_leaf_frequency(UA, 20, trials=64, seed=3, jobs=2)
    assert a == b
    assert np.array_equal(a.outcomes, b.outcomes)


# ---------------------------------------------------------------------------
# quadratic-estimator size cap


def test_zeta_cell_above_cap_is_refused():
    config = small_config(estimator="zeta", n=150, trials=1)
    with pytest.raises(TooLargeError):
        run_trials(config, max_exact_n=100)


def test_zeta_cell_under_cap_runs():
    res = run_trials(small_config(estimator="zeta", n=80, trials=2), max_exact_n=100)
    assert res.trials == 2


def test_default_cap_blocks_big_xi_cells():
    config = small_config(estimator="xi", n=DEFAULT_MAX_EXACT_N + 1, trials=1)
    with pytest.raises(TooLargeError):
        run_trials(config)


def test_linear_estimators_ignore_the_cap():
    res = run_trials(small_config(n=DEFAULT_MAX_EXACT_N + 1, k=1, trials=1))
    assert res.trials == 1


# ---------------------------------------------------------------------------
# sweep grids


GRID = """\
# two models, two set sizes
model = ua, pa
estimator = psi
n = 30
k = 2, 8
trials = 25
seed = 7
"""


def test_parse_sweep_grid_orders_cells():
    configs = parse_sweep_grid(GRID)
    assert [(c.model.label, c.estimator, c.n, c.k) for c in configs] == [
        ("uniform", "psi", 30, 2),
        ("uniform", "psi", 30, 8),
        ("preferential", "psi", 30, 2),
        ("preferential", "psi", 30, 8),
    ]
    assert all(c.trials == 25 and c.seed == 7 for c in configs)


def test_parse_sweep_grid_seed_is_optional():
    configs = parse_sweep_grid("model=ua\nestimator=phi\nn=10\nk=1\ntrials=5\n")
    assert len(configs) == 1
    assert configs[0].seed == DEFAULT_SEED


def test_parse_sweep_grid_nesting_order():
    text = "model=ua\nestimator=psi,phi\nn=10,20\nk=1,2\ntrials=5\n"
    cells = [(c.estimator, c.n, c.k) for c in parse_sweep_grid(text)]
    assert cells == [
        ("psi", 10, 1),
        ("psi", 10, 2),
        ("psi", 20, 1),
        ("psi", 20, 2),
        ("phi", 10, 1),
        ("phi", 10, 2),
        ("phi", 20, 1),
        ("phi", 20, 2),
    ]


def test_parse_sweep_grid_rejects_missing_keys():
    with pytest.raises(ValueError, match="missing"):
        parse_sweep_grid("model=ua\nestimator=psi\nn=10\nk=1\n")


def test_parse_sweep_grid_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        parse_sweep_grid(GRID + "alpha = 2\n")


def test_parse_sweep_grid_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        parse_sweep_grid(GRID + "n = 40\n")


def test_parse_sweep_grid_rejects_non_assignments():
    with pytest.raises(ValueError, match="key=value"):
        parse_sweep_grid("model=ua\nestimator psi\n")


def test_sweep_matches_individual_runs():
    configs = parse_sweep_grid(GRID)
    rows = sweep(configs)
    assert [c for c, _ in rows] == configs
    for config, result in rows:
        assert result == run_trials(config)


def test_sweep_rejects_empty_grid():
    with pytest.raises(ValueError):
        sweep([])


# ---------------------------------------------------------------------------
# CSV rendering


def test_results_csv_layout():
    config = ExperimentConfig(
        model=parse_model("alpha:1.5"), estimator="phi", n=12, k=3, trials=40, seed=2
    )
    rows = sweep([config])
    text = results_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 2
    fields = lines[1].split(",")
    assert fields[0] == "alpha:1.5"
    assert fields[1] == "phi"
    assert [int(f) for f in fields[2:6]] == [12, 3, 40, rows[0][1].successes]
    # floats are rendered with repr so they round-trip exactly
    assert float(fields[6]) == rows[0][1].rate
    assert float(fields[7]) == rows[0][1].lo95
    assert float(fields[8]) == rows[0][1].hi95
    assert fields[9] == f"{rows[0][1].seconds:.3f}"


def test_results_csv_is_deterministic_apart_from_seconds():
    configs = parse_sweep_grid(GRID)
    first = results_csv(sweep(configs))
    second = results_csv(sweep(configs))
    strip = lambda text: [line.rsplit(",", 1)[0] for line in text.splitlines()]
    assert strip(first) == strip(second)


# ---------------------------------------------------------------------------
# headline success rates (small-scale smoke versions)


def test_argmin_phi_alone_finds_the_root_sometimes():
    # even a singleton set has a visibly positive hit rate on big trees
    config = ExperimentConfig(model=UA, estimator="phi", n=10_000, k=1, trials=300, seed=41)
    res = run_trials(config)
    assert res.rate >= 0.01


def test_psi_beats_chance_on_uniform_trees():
    config = small_config(n=500, k=10, trials=200, seed=17)
    res = run_trials(config)
    # K/n = 2% by chance; psi should clear 50% easily at this size
    assert res.rate >= 0.5
