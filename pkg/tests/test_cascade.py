import numpy as np
import pytest

from wavecascade.assembly import build_table
from wavecascade.cascade import StraightGuide, axial_wavenumbers, chain, combine, connector_field, propagator_U
from wavecascade.presets import straight_block
from wavecascade.rt_solver import ScatteringMatrix, solve_rt

K, N = 4.0, 4


def _random_S(rng, w=1.0, scale=0.3):
    m = lambda: scale * (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))
    return ScatteringMatrix(m(), m(), np.eye(N) + m(), np.eye(N) + m(), width_left=w, width_right=w, k=K)


def test_axial_wavenumbers_branch():
    a = axial_wavenumbers(1.0, 4.0, 3)
    assert a[0] == 4.0 and a[1] == pytest.approx(np.sqrt(16 - np.pi**2))
    assert a[2].real == 0 and a[2].imag > 0


def test_propagator():
    U = propagator_U(1.0, 4.0, 2.0, 3)
    assert np.allclose(np.diag(U), np.exp(2j * axial_wavenumbers(1.0, 4.0, 3)))
    assert np.array_equal(propagator_U(1.0, 4.0, 0.0, 3), np.eye(3))
    with pytest.raises(ValueError):
        propagator_U(-1.0, 4.0, 1.0, 3)


def test_identity_is_neutral(rng):
    S = _random_S(rng)
    I = ScatteringMatrix.identity(N, width=1.0, k=K)
    g = StraightGuide(1.0, 0.0)
    for T in (combine(S, g, I).S_total, combine(I, g, S).S_total):
        for name in ("R_plus", "R_minus", "T_plus", "T_minus"):
            assert np.allclose(getattr(T, name), getattr(S, name), atol=1e-13)


def test_associativity(rng):
    S1, S2, S3 = (_random_S(rng) for _ in range(3))
    g = StraightGuide(1.0, 0.4)
    a = chain([chain([S1, g, S2]), g, S3])
    b = chain([S1, g, chain([S2, g, S3])])
    for name in ("R_plus", "R_minus", "T_plus", "T_minus"):
        assert np.allclose(getattr(a, name), getattr(b, name), atol=1e-12)


def test_cascade_of_straight_blocks_equals_one_long_block():
    a = 0.5
    blk = lambda L: solve_rt(build_table(straight_block(a, L), K, N), rel_tol=1e-11, abs_tol=1e-13,
                             widths=(a, a))
    S = combine(blk(1.0), StraightGuide(a, 0.7), blk(0.5)).S_total
    U = propagator_U(a, K, 2.2, N)
    assert np.allclose(S.T_plus, U, atol=1e-8) and np.abs(S.R_plus).max() < 1e-10


def test_connector_field_satisfies_both_interfaces(rng):
    S1, S3 = _random_S(rng), _random_S(rng)
    g = StraightGuide(1.0, 0.6)
    res = combine(S1, g, S3)
    phi = rng.normal(size=N) + 0j
    start = connector_field(res.C_plus, res.C_minus, g, K, 0.0, phi)
    U = propagator_U(1.0, K, 0.6, N)
    assert np.allclose(start, res.C_plus @ phi + U @ S3.R_plus @ U @ res.C_plus @ phi)
    # right-going part arriving at S3 is U C+ phi; S3 transmits it
    assert np.allclose(res.S_total.T_plus @ phi, S3.T_plus @ U @ res.C_plus @ phi)


def test_width_mismatch_and_structure_errors(rng):
    S = _random_S(rng, w=1.0)
    with pytest.raises(ValueError):
        combine(S, StraightGuide(0.5, 0.1), S)
    with pytest.raises(ValueError):
        chain([StraightGuide(1.0, 1.0), S])
    with pytest.raises(ValueError):
        chain([S, StraightGuide(1.0, 1.0)])
    with pytest.raises(ValueError):
        StraightGuide(-1.0, 1.0)
