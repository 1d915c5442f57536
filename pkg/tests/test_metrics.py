import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emse_unlearn.data import ScenarioSpec, generate
from emse_unlearn.metrics import (
    DegenerateSubsetError,
    OverlapWarning,
    evaluate,
    exponential_r_squared,
    fair_r_squared,
    overlap_diagnostic,
    r_squared,
)
from emse_unlearn.model import PolynomialModel


def assert_report_identities(rep):
    assert abs(rep.exp_r2_wanted - (1 - math.exp(-(1 - rep.r2_wanted)))) <= 1e-12
    assert abs(rep.exp_r2_unwanted - (1 - math.exp(-(1 - rep.r2_unwanted)))) <= 1e-12
    assert abs(rep.fair_r2 - (1 - rep.exp_r2_wanted) * rep.exp_r2_unwanted) <= 1e-12
    assert 0 <= rep.overlap_score <= 1


def test_r_squared_examples():
    y = np.array([1.0, 2.0, 3.0])
    assert r_squared(y, y) == 1.0
    assert r_squared(y, np.full(3, y.mean())) == 0.0
    assert r_squared(y, [1.0, 2.0, 5.0]) == -1.0


def test_r_squared_errors():
    with pytest.raises(DegenerateSubsetError, match="degenerate"):
        r_squared([2.0, 2.0], [1.0, 3.0])
    with pytest.raises(DegenerateSubsetError):
        r_squared([1.0], [1.0])


def test_exponential_r_squared_examples():
    assert exponential_r_squared(1.0) == 0.0
    assert exponential_r_squared(0.0) == pytest.approx(0.632120558828557678, abs=1e-15)
    assert exponential_r_squared(-1.0) == pytest.approx(0.864664716763387308, abs=1e-15)
    with pytest.raises(ValueError):
        exponential_r_squared(1.0001)


@settings(max_examples=300)
@given(st.floats(-30, 1), st.floats(-30, 1))
def test_exponential_r_squared_monotone_and_bounded(a, b):
    ea, eb = exponential_r_squared(a), exponential_r_squared(b)
    assert 0.0 <= ea < 1.0
    if a < b - 1e-9:
        assert ea > eb


def test_fair_r_squared_examples():
    assert fair_r_squared(0.0, 0.37) == 0.37
    assert fair_r_squared(0.4, 0.0) == 0.0
    assert fair_r_squared(0.2, 0.9) == pytest.approx(0.72, abs=1e-15)
    with pytest.raises(ValueError):
        fair_r_squared(-0.1, 0.5)
    with pytest.raises(ValueError):
        fair_r_squared(0.5, 1.5)


@settings(max_examples=300)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_fair_r_squared_range(w, u):
    assert 0.0 <= fair_r_squared(w, u) < 1.0


def test_overlap_diagnostic_examples():
    rng = np.random.default_rng(0)
    xs = np.concatenate([rng.uniform(0, 1, 50), rng.uniform(10, 11, 50)])
    wanted = np.arange(100) < 50
    assert overlap_diagnostic(xs, wanted) < 0.05
    same = np.array([0.1, 0.5, 0.9, 0.1, 0.5, 0.9])
    assert overlap_diagnostic(same, [True] * 3 + [False] * 3) == 1.0
    with pytest.raises(ValueError):
        overlap_diagnostic([0.0, 1.0], [True, True])


@pytest.mark.parametrize("seed", range(1, 6))
def test_overlap_diagnostic_on_scenarios(seed):
    ov = generate(ScenarioSpec("overlap", seed=seed))
    cl = generate(ScenarioSpec("cluster", seed=seed))
    assert overlap_diagnostic(ov.xs, ov.wanted) > 0.5
    assert overlap_diagnostic(cl.xs, cl.wanted) < 0.3


def test_evaluate_mean_predictor():
    xs = np.array([0.0, 1.0, 2.0, 3.0])
    y = np.array([1.0, 3.0, 2.0, 2.0])
    wanted = np.array([True, True, False, False])
    # wanted mean 2, unwanted targets all 2 would be degenerate; use another constant model per subset
    with pytest.raises(DegenerateSubsetError, match="unwanted"):
        evaluate(PolynomialModel.from_coefficients([2.0]), xs, y, wanted)

    y = np.array([1.0, 3.0, 0.0, 4.0])
    rep = evaluate(PolynomialModel.from_coefficients([2.0]), xs, y, wanted)
    assert rep.r2_wanted == 0.0 and rep.r2_unwanted == 0.0
    assert rep.exp_r2_wanted == pytest.approx(0.6321205588, abs=1e-10)
    assert rep.fair_r2 == pytest.approx(0.2325441579, abs=1e-10)
    assert (rep.n_wanted, rep.n_unwanted) == (2, 2)
    assert_report_identities(rep)


def test_evaluate_exact_fit_on_wanted():
    xs = np.linspace(0, 1, 10)
    wanted = xs < 0.75
    y = np.where(wanted, 1 + xs, 1 + xs + 8 + xs)
    rep = evaluate(PolynomialModel.from_coefficients([1.0, 1.0]), xs, y, wanted)
    assert rep.exp_r2_wanted == pytest.approx(0.0, abs=1e-12)
    assert rep.fair_r2 == pytest.approx(rep.exp_r2_unwanted, abs=1e-12)
    assert_report_identities(rep)


def test_evaluate_warns_on_overlap():
    ds = generate(ScenarioSpec("overlap", seed=1))
    with pytest.warns(OverlapWarning):
        rep = evaluate(PolynomialModel.from_coefficients([1.0, -2.0, 0.0, 0.5]), ds.xs, ds.ys, ds.wanted)
    assert rep.overlap_warning()
    assert not rep.overlap_warning(threshold=0.99)
    assert_report_identities(rep)


def test_evaluate_quiet_on_cluster():
    ds = generate(ScenarioSpec("cluster", seed=1))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = evaluate(PolynomialModel.from_coefficients([1.0, -2.0, 0.0, 0.5]), ds.xs, ds.ys, ds.wanted)
    assert_report_identities(rep)


def test_metrics_permutation_invariant():
    ds = generate(ScenarioSpec("heavy", seed=4))
    model = PolynomialModel.from_coefficients([0.5, -1.5, 0.1, 0.4])
    perm = np.random.default_rng(1).permutation(len(ds))
    a = evaluate(model, ds.xs, ds.ys, ds.wanted).to_dict()
    b = evaluate(model, ds.xs[perm], ds.ys[perm], ds.wanted[perm]).to_dict()
    for key in a:
        assert b[key] == pytest.approx(a[key], rel=1e-12, abs=1e-12)
