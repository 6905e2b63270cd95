"""Synthetic process generators: moments, dependence structure, determinism."""

import numpy as np
import pytest

from taumix.processes import ProcessSpec, gen_ar1, gen_iid, gen_ma, gen_markov_chain


def _autocorr(x, k):
    return float(np.corrcoef(x[:-k], x[k:])[0, 1])


def test_ar1_lag1_autocorrelation_matches_rho():
    x = gen_ar1(0.9, 1.0, 10_000, seed=3).data.ravel()
    assert abs(_autocorr(x, 1) - 0.9) < 0.03


def test_ar1_rho_zero_is_serially_uncorrelated():
    x = gen_ar1(0.0, 1.0, 10_000, seed=4).data.ravel()
    assert abs(_autocorr(x, 1)) < 0.03


def test_ar1_zero_innovation_is_identically_zero():
    x = gen_ar1(0.5, 0.0, 50, seed=0).data
    assert np.all(x == 0.0)


def test_ar1_parameter_validation():
    with pytest.raises(ValueError):
        gen_ar1(1.0, 1.0, 10, seed=0)
    with pytest.raises(ValueError):
        gen_ar1(0.5, -1.0, 10, seed=0)


def test_ma1_autocorrelation_structure():
    # coeffs (1, 1): corr 0.5 at lag 1, exactly independent beyond lag 1
    x = gen_ma((1.0, 1.0), 10_000, seed=5).data.ravel()
    assert abs(_autocorr(x, 1) - 0.5) < 0.03
    for k in (2, 3, 5):
        assert abs(_autocorr(x, k)) < 0.03


def test_ma_single_coefficient_is_iid_noise():
    x = gen_ma((1.0,), 10_000, seed=6).data.ravel()
    assert abs(_autocorr(x, 1)) < 0.03
    assert abs(float(np.var(x)) - 1.0) < 0.05


def test_ma_rejects_empty_coeffs():
    with pytest.raises(ValueError):
        gen_ma((), 10, seed=0)


def test_iid_kinds_and_validation():
    g = gen_iid(200, seed=0, kind="gaussian", dim=3)
    assert g.data.shape == (200, 3)
    u = gen_iid(200, seed=0, kind="uniform").data
    assert np.all((u >= 0.0) & (u < 1.0))
    with pytest.raises(ValueError):
        gen_iid(10, seed=0, kind="poisson")


def test_markov_identity_matrix_freezes_state():
    x = gen_markov_chain(np.eye(4), 100, seed=7).data.ravel()
    assert np.all(x == x[0])


def test_markov_transition_frequencies():
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    x = gen_markov_chain(P, 10_000, seed=12).data.ravel().astype(int)
    for i in range(2):
        mask = x[:-1] == i
        freq = float(np.mean(x[1:][mask] == 1))
        assert abs(freq - P[i, 1]) < 0.02


def test_markov_equal_rows_forgets_current_state():
    P = np.array([[0.3, 0.7], [0.3, 0.7]])
    x = gen_markov_chain(P, 10_000, seed=9).data.ravel().astype(int)
    for i in range(2):
        mask = x[:-1] == i
        assert abs(float(np.mean(x[1:][mask] == 1)) - 0.7) < 0.02


def test_markov_one_hot_encoding_consistent():
    P = np.array([[0.5, 0.5], [0.5, 0.5]])
    plain = gen_markov_chain(P, 300, seed=10).data.ravel().astype(int)
    hot = gen_markov_chain(P, 300, seed=10, one_hot=True).data
    assert hot.shape == (300, 2)
    assert np.all(hot.sum(axis=1) == 1.0)
    assert np.all(np.argmax(hot, axis=1) == plain)


def test_markov_rejects_bad_matrices():
    with pytest.raises(ValueError):
        gen_markov_chain(np.ones((2, 3)), 10, seed=0)
    with pytest.raises(ValueError):
        gen_markov_chain(np.array([[0.5, 0.4], [0.5, 0.5]]), 10, seed=0)


def test_process_spec_dispatch_and_determinism():
    for kind, params in (
            ("iid_gaussian", {"dim": 2}),
            ("iid_uniform", {}),
            ("ar1", {"rho": 0.3, "innovation_sd": 2.0}),
            ("ma_q", {"coeffs": (1.0, 0.5, 0.25)}),
            ("finite_markov", {"P": [[0.5, 0.5], [0.1, 0.9]]})):
        spec = ProcessSpec(kind=kind, T=64, seed=11, params=params)
        a = spec.generate().data
        b = ProcessSpec(kind=kind, T=64, seed=11, params=params).generate().data
        assert a.shape[0] == 64
        np.testing.assert_array_equal(a, b)
        c = ProcessSpec(kind=kind, T=64, seed=12, params=params).generate().data
        assert not np.array_equal(a, c)


def test_process_spec_rejects_unknown_kind():
    with pytest.raises(ValueError):
        ProcessSpec(kind="brownian", T=10)
