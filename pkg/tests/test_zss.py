import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zsnft import discretize as D
from zsnft import profiles as P
from zsnft import zss
from zsnft.errors import DerivativeUnsupported, NumericalOverflow
from zsnft.zss import Scheme

EXACT_FREE = [s for s in Scheme if s is not Scheme.CN]


@pytest.mark.parametrize("scheme", EXACT_FREE)
def test_zero_potential(scheme):
    pot = D.zero_potential(L=3.0, n=32)
    xi = np.array([-2.0, 0.3, 1.0 + 0.5j])
    a, b, _, _ = zss.scatter_arrays(pot, xi, scheme)
    np.testing.assert_allclose(a, 1.0, atol=1e-13)
    np.testing.assert_allclose(b, 0.0, atol=1e-13)
    if scheme.has_derivative:
        _, _, ap, _ = zss.scatter_arrays(pot, xi, scheme, want_derivative=True)
        np.testing.assert_allclose(ap, 0.0, atol=1e-12)


def test_cn_free_phase_error_is_second_order():
    errs = []
    for n in (64, 128, 256):
        a = zss.scatter(D.zero_potential(L=3.0, n=n), 0.7, Scheme.CN).a
        assert abs(abs(a) - 1) < 1e-13
        errs.append(abs(a - 1))
    assert 3.8 < errs[0] / errs[1] < 4.2 and 3.8 < errs[1] / errs[2] < 4.2


def test_bo_exact_on_rectangle():
    spec = P.rect(1.2, 0.8)
    xi = np.linspace(-6, 6, 61)
    a, b, _, _ = zss.scatter_arrays(D.sample(spec, n=64), xi, Scheme.BO)
    np.testing.assert_allclose(a, P.analytic_a(spec, xi), rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(b, P.analytic_b(spec, xi), rtol=1e-12, atol=1e-13)


def test_bo_rect_eigenvalue_is_zero_of_a():
    spec = P.rect(math.pi / 2, 1.0)
    xi = P.analytic_eigenvalues(spec)[0]
    assert abs(zss.scatter(D.sample(spec, n=16), xi).a) < 1e-13


@pytest.mark.parametrize("scheme", [Scheme.BO, Scheme.AL, Scheme.CN, Scheme.BOMOD, Scheme.ALMOD])
def test_transfer_matrices_unimodular(scheme):
    rng = np.random.default_rng(1)
    for _ in range(10):
        q = complex(*rng.normal(size=2))
        xi = float(rng.uniform(-3, 3))
        T = zss.transfer_matrix(scheme, q, q, xi, 0.05, t_m=0.3).T
        assert abs(np.linalg.det(T) - 1) < 1e-12
        # unitary on the real axis
        np.testing.assert_allclose(T @ T.conj().T, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("scheme", [Scheme.BO, Scheme.AL, Scheme.CN, Scheme.BOMOD, Scheme.ALMOD])
def test_transfer_derivative_matches_difference(scheme):
    q, qn, xi, dt, tm = 0.7 - 0.2j, 0.6 - 0.1j, 0.4 + 0.3j, 0.05, -1.3
    step = zss.transfer_matrix(scheme, q, qn, xi, dt, tm, want_derivative=True)
    h = 1e-6
    fd = (zss.transfer_matrix(scheme, q, qn, xi + h, dt, tm).T
          - zss.transfer_matrix(scheme, q, qn, xi - h, dt, tm).T) / (2 * h)
    np.testing.assert_allclose(step.T_prime, fd, atol=1e-8)


def test_bo_small_step_series_branch():
    # tiny |kappa dt| takes the series branch; compare with a nearby exact branch
    a = zss.transfer_matrix(Scheme.BO, 1e-3, 0, 1e-3, 1e-3).T
    np.testing.assert_allclose(a, [[1 - 1e-6j, 1e-6], [-1e-6, 1 + 1e-6j]], atol=1e-11)


def test_rk4_has_no_derivative():
    pot = D.sample(P.over(1.0), n=64)
    with pytest.raises(DerivativeUnsupported):
        zss.scatter(pot, 0.1, Scheme.RK4, want_derivative=True)
    with pytest.raises(DerivativeUnsupported):
        zss.transfer_matrix(Scheme.RK4, 1, 1, 0, 0.1)
    with pytest.raises(DerivativeUnsupported):
        zss.CoefficientA(pot, Scheme.RK4).derivative(0.5j)


@pytest.mark.parametrize("scheme", [Scheme.BO, Scheme.AL, Scheme.CN])
def test_real_axis_unitarity(scheme):
    pot = D.sample(P.over(2.25, 30.0), n=512)
    xi = np.linspace(-5, 5, 41)
    a, b, _, _ = zss.scatter_arrays(pot, xi, scheme)
    np.testing.assert_allclose(np.abs(a) ** 2 + np.abs(b) ** 2, 1.0, atol=1e-11)


def test_overflow_reports_index():
    pot = D.sample(P.over(5.0, 30.0), n=256)
    xis = [0.5j, 1.0j, 400j]
    with pytest.raises(NumericalOverflow) as err:
        zss.scatter_arrays(pot, xis, Scheme.BO, cap=1e100)
    assert err.value.index == 2
    a, _, _, status = zss.scatter_arrays(pot, xis, Scheme.BO, cap=1e100, check=False)
    assert list(status) == [0, 0, 1] and np.isnan(a[2])


def _rms_error(scheme, n, xi):
    spec = P.over(2.25, 30.0)
    a, _, _, _ = zss.scatter_arrays(D.sample(spec, n=n), xi, scheme)
    ref = P.analytic_a(spec, xi)
    return math.sqrt(np.mean(np.abs(a - ref) ** 2 / np.abs(ref) ** 2))


@pytest.mark.parametrize("scheme, order", [(Scheme.BO, 2), (Scheme.AL, 2), (Scheme.BOMOD, 2),
                                           (Scheme.ALMOD, 2), (Scheme.CN, 2), (Scheme.RK4, 4)])
def test_order_of_accuracy(scheme, order):
    xi = np.linspace(-1, 1, 11)
    e1, e2 = _rms_error(scheme, 1024, xi), _rms_error(scheme, 2048, xi)
    assert abs(math.log2(e1 / e2) - order) < 0.3


def test_bo_and_bomod_agree_to_second_order():
    xi = np.linspace(-2, 2, 9) + 0.5j
    diffs = []
    for n in (1024, 2048, 4096):
        pot = D.sample(P.over(2.25, 30.0), n=n)
        a_bo = zss.scatter_arrays(pot, xi, Scheme.BO)[0]
        a_mod = zss.scatter_arrays(pot, xi, Scheme.BOMOD)[0]
        diffs.append(np.max(np.abs(a_bo - a_mod)))
    assert 3.5 < diffs[0] / diffs[1] < 4.5 and 3.5 < diffs[1] / diffs[2] < 4.5


def test_al_and_almod_agree():
    pot = D.sample(P.over(2.25, 30.0), n=1024)
    xi = np.linspace(-2, 2, 9)
    a1 = zss.scatter_arrays(pot, xi, Scheme.AL)[0]
    a2 = zss.scatter_arrays(pot, xi, Scheme.ALMOD)[0]
    np.testing.assert_allclose(a1, a2, atol=1e-10)


def test_continuous_spectrum_thread_invariant(monkeypatch):
    pot = D.sample(P.over(1.7, 20.0), n=512)
    grid = np.linspace(-3, 3, 37)
    one = zss.continuous_spectrum(pot, grid, Scheme.AL, want_derivative=True, threads=1)
    many = zss.continuous_spectrum(pot, grid, Scheme.AL, want_derivative=True, threads=4)
    assert [(r.a, r.b, r.a_prime, r.xi) for r in one] == [(r.a, r.b, r.a_prime, r.xi) for r in many]
    monkeypatch.setenv("ZSNFT_THREADS", "3")
    assert zss.worker_count() == 3


def test_scattering_result_r():
    res = zss.scatter(D.sample(P.over(2.25, 30.0), n=2048), 0.4)
    assert abs(res.r - P.analytic_r(P.over(2.25), 0.4)) < 1e-4
    assert res.a_prime is None


def test_coefficient_a_caches_last_point():
    f = zss.CoefficientA(D.sample(P.over(1.5, 20.0), n=256))
    v = f(0.2 + 0.7j)
    d = f.derivative(0.2 + 0.7j)
    assert f.evaluations == 1
    a, ap = f.many([0.2 + 0.7j], want_derivative=True)
    assert a[0] == v and ap[0] == d


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.2, 2.0), st.floats(-8.0, 8.0))
def test_bo_exact_on_any_rectangle(A, L, xi):
    spec = P.rect(A, L)
    res = zss.scatter(D.sample(spec, n=32), xi)
    assert abs(res.a - P.analytic_a(spec, xi)) < 1e-11
    assert abs(res.b - P.analytic_b(spec, xi)) < 1e-11
