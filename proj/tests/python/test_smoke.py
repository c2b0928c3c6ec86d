import math

import pytest

import radsel

MARKOV = radsel.MarkovModel(2, [0.5, 0.5], [[0.3, 0.7], [0.4, 0.6]])


def test_theory_values():
    assert radsel.cov_uniform(0.25, 0.375) == pytest.approx(1.25)
    assert radsel.lcp(0.3, 0.3) == math.inf
    assert radsel.lcp(0.25, 0.375) == 2
    k0, k1, kmu = radsel.kappa(MARKOV)
    assert (k0, k1, kmu) == pytest.approx((2.242063, 2.123016, 2.091270), abs=1e-6)
    assert radsel.mean_asyb(0.2, 0.7) == pytest.approx(1.809524, abs=1e-6)
    assert radsel.skew_digits(0.5, 0.7, 3) == [1, 0, 1]


def test_model_validation_and_json():
    with pytest.raises(radsel.ModelError):
        radsel.MarkovModel(2, [0.3, 0.8], [[0.5, 0.5], [0.5, 0.5]])
    again = radsel.MarkovModel.from_json(MARKOV.to_json())
    assert again.p(1, 0) == pytest.approx(0.4)
    assert radsel.MarkovModel.bernoulli(0.7).family == "asymmetric_bernoulli"


def test_profile_matches_select():
    model = radsel.MarkovModel.uniform()
    y = radsel.profile(model, 30, 5)
    assert [radsel.select_ops(model, 30, 5, r) for r in range(1, 31)] == y


def test_experiment_is_reproducible():
    model = radsel.MarkovModel.bernoulli(0.7)
    a = radsel.quantile_experiment(model, 256, 20, seed=3)
    b = radsel.quantile_experiment(model, 256, 20, seed=3, threads=1)
    assert a["rows"] == b["rows"]
    assert a["metadata"]["seed"] == 3
    ids = {row["check_id"] for row in a["rows"]}
    assert {"mean_X", "mean_Y_over_n", "cov"} <= ids


def test_limit_samplers():
    grid, values = radsel.sample_G_uniform(2, 4, seed=1)
    assert len(grid) == len(values) == 17
    assert len(radsel.sample_G_asyb(0.7, [0.0, 0.5, 1.0], seed=1)) == 3
    z = radsel.sample_Z_mu(radsel.MarkovModel.uniform(), 5, seed=2)
    assert z == [2.0] * 5


def test_acceptance_subset():
    results = radsel.run_acceptance("fast", seed=42, only=[1, 5])
    assert [r["id"] for r in results] == [1, 5]
    assert all(r["pass"] for r in results)
