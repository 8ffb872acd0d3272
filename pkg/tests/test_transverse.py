import numpy as np
import pytest
from scipy.integrate import quad

from wavecascade.presets import example_blocks
from wavecascade.transverse import (biorthogonal_norm, build_basis, expand_coeffs, expand_coeffs_many, expand_mu,
                                    lambda_derivatives, solve_lambda, solve_lambda_many)


def _cquad(f):
    re = quad(lambda v: f(v).real, 0, 1, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = quad(lambda v: f(v).imag, 0, 1, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return re + 1j * im


def test_hard_wall_roots():
    lam = solve_lambda(0.0, 3.0, 8)
    assert np.allclose(lam, np.pi * np.arange(8), atol=1e-14)


def test_real_impedance_root():
    lam = solve_lambda(1j, 1.0, 3)  # lam tan lam = 1
    assert lam[0] == pytest.approx(0.8603335890, abs=1e-9)
    assert np.allclose(lam * np.tan(lam), 1.0, atol=1e-10)


@pytest.mark.parametrize("Y,k", [(0.5 + 0.5j, 15.0), (0.3j, 4.0), (1.0, 2.0), (2.0 - 1.0j, 10.0)])
def test_roots_solve_the_dispersion_relation(Y, k):
    lam = solve_lambda(Y, k, 10)
    c = -1j * k * Y
    assert np.abs(lam * np.sin(lam) - c * np.cos(lam)).max() < 1e-9 * max(1, abs(c))
    assert lam[0].real >= 0
    # distinct roots (large |c| can pull one branch out as a wall-localized mode, so no ordering)
    gaps = np.abs(lam[:, None] - lam[None, :]) + np.eye(len(lam))
    assert gaps.min() > 1e-6


def test_path_grazing_a_double_root():
    # the ray t*c passes about 1e-3 from the double root at c = -1.6506 - 2.0600i
    c = -2.0 - 2.5j
    lam = solve_lambda_many(np.array([c]), 12)[0]
    assert np.abs(lam * np.sin(lam) - c * np.cos(lam)).max() < 1e-10
    gaps = np.abs(lam[:, None] - lam[None, :]) + np.eye(len(lam))
    assert gaps.min() > 0.1


def test_roots_track_branches():
    c = np.linspace(0, 8j, 30)
    lam = solve_lambda_many(c, 6)
    assert np.abs(np.diff(lam, axis=0)).max() < 1.0


def test_eigenvalue_derivatives():
    k, h = 5.0, 1e-6
    Y = lambda u: (0.4 + 0.3j) * (1 + 0.2 * u + 0.1 * u * u)
    Y1 = lambda u: (0.4 + 0.3j) * (0.2 + 0.2 * u)
    Y2 = (0.4 + 0.3j) * 0.2
    u = 0.3
    lam = solve_lambda(Y(u), k, 6)
    lp, lpp = lambda_derivatives(lam, Y1(u), Y2, k)
    lp_fd = (solve_lambda(Y(u + h), k, 6) - solve_lambda(Y(u - h), k, 6)) / (2 * h)
    assert np.allclose(lp, lp_fd, atol=1e-7)
    lp_p = lambda_derivatives(solve_lambda(Y(u + h), k, 6), Y1(u + h), Y2, k)[0]
    lp_m = lambda_derivatives(solve_lambda(Y(u - h), k, 6), Y1(u - h), Y2, k)[0]
    assert np.allclose(lpp, (lp_p - lp_m) / (2 * h), atol=1e-6)


def test_norm_formula():
    for lam in (0.0, 1e-4, 0.3 + 0.1j, 4.0 - 2.0j):
        assert abs(biorthogonal_norm(lam) - _cquad(lambda v: np.cos(lam * v) ** 2)) < 1e-12


def test_expansion_coefficients_against_quadrature():
    Y, k, N = 0.5 + 0.5j, 6.0, 5
    lam = solve_lambda(Y, k, N)
    nrm = biorthogonal_norm(lam)
    alpha, beta = expand_coeffs_many(lam[None], nrm[None])
    for m in range(N):
        for n in range(N):
            psi_m = lambda v: np.cos(lam[m] * v)
            a = _cquad(lambda v: v * np.sin(lam[n] * v) * psi_m(v)) / nrm[m]
            b = _cquad(lambda v: v * v * np.cos(lam[n] * v) * psi_m(v)) / nrm[m]
            assert abs(alpha[0, m, n] - a) < 1e-11
            assert abs(beta[0, m, n] - b) < 1e-11


def test_hard_wall_coefficients_closed_form():
    basis = build_basis(0.0, 0.0, 0.0, 0.0, 1.0, 3)
    alpha, beta = expand_coeffs(basis)
    # alpha_01 = int v sin(pi v) dv / int 1 dv,  beta_00 = int v^2 dv
    assert alpha[0, 1] == pytest.approx(1 / np.pi, abs=1e-14)
    assert beta[0, 0] == pytest.approx(1 / 3, abs=1e-14)
    assert alpha[0, 0] == 0


def test_metric_expansion_fft_matches_quadrature():
    step, _ = example_blocks()
    basis = build_basis(0.5, 0.0, 0.0, 0.0, 5.0, 6)
    a = expand_mu(basis, step.map, method="fft")
    b = expand_mu(basis, step.map, method="quadrature")
    assert np.abs(a - b).max() < 1e-10 * np.abs(b).max()


def test_metric_expansion_reproduces_the_metric():
    step, _ = example_blocks()
    Y, k, N = 0.5 + 0.5j, 5.0, 40
    basis = build_basis(0.0, Y, 0, 0, k, N)
    mu_mn = expand_mu(basis, step.map)
    v = np.array([0.3, 0.7])
    # mu psi_n = sum_m mu_mn psi_m
    lhs = np.abs(step.map.dF(0.0 + 1j * v)) ** 2 * np.cos(basis.lam[0] * v)
    rhs = basis.psi(v) @ mu_mn[:, 0]
    assert np.allclose(lhs, rhs, atol=1e-3 * np.abs(lhs).max())
