import numpy as np
import pytest

from wavecascade.analysis import power_ratio
from wavecascade.assembly import build_table
from wavecascade.cascade import axial_wavenumbers
from wavecascade.presets import straight_block
from wavecascade.rt_solver import ScatteringMatrix, solve_rt

K, N = 4.0, 4


@pytest.fixture(scope="module")
def lined():
    block = straight_block(1.0, 3.0, beta=0.5 + 0.5j)
    return block, solve_rt(build_table(block, K, N), rel_tol=1e-10, abs_tol=1e-12, widths=block.end_widths)


def test_hard_straight_block_is_pure_propagation():
    a, ell = 0.4, 1.3
    S = solve_rt(build_table(straight_block(a, ell), K, N), rel_tol=1e-11, abs_tol=1e-13)
    U = np.diag(np.exp(1j * axial_wavenumbers(a, K, N) * ell))
    assert np.abs(S.R_plus).max() < 1e-12 and np.abs(S.R_minus).max() < 1e-12
    assert np.allclose(S.T_plus, U, atol=1e-8) and np.allclose(S.T_minus, U, atol=1e-8)


def test_symmetric_block_has_equal_sides(lined):
    _, S = lined
    assert np.allclose(S.R_plus, S.R_minus, atol=1e-6)
    assert np.allclose(S.T_plus, S.T_minus, atol=1e-6)


def test_absorbing_lining_loses_power(lined):
    _, S = lined
    P = power_ratio(S, np.eye(N)[0], K).ratio
    assert 0 < P < 1


def test_reactive_lining_conserves_power_up_to_table_spacing():
    block = straight_block(1.0, 3.0, beta=0.7j)
    err = []
    for du in (0.01, 0.005, 0.0025):
        S = solve_rt(build_table(block, K, N, du=du), rel_tol=1e-10, abs_tol=1e-12, widths=block.end_widths)
        err.append(abs(power_ratio(S, np.eye(N)[0], K).ratio - 1))
    # linear interpolation of the tables: second order in the station spacing
    assert err[-1] < 5e-5
    assert 3.5 < err[0] / err[1] < 4.5 and 3.5 < err[1] / err[2] < 4.5


def test_csv_round_trip(lined, tmp_path):
    _, S = lined
    S.to_csv(tmp_path / "s.csv")
    S2 = ScatteringMatrix.from_csv(tmp_path / "s.csv")
    for name in ("R_plus", "R_minus", "T_plus", "T_minus"):
        assert np.array_equal(getattr(S, name), getattr(S2, name))


def test_identity_and_mirror():
    S = ScatteringMatrix.identity(3, width=1.0)
    assert np.array_equal(S.T_plus, np.eye(3)) and not S.R_plus.any()
    R = np.arange(9.0).reshape(3, 3)
    M = ScatteringMatrix(R, -R, 2 * R, 3 * R, 0.0, 1.0, 0.5, 0.7).mirrored()
    assert np.array_equal(M.R_plus, -R) and np.array_equal(M.T_plus, 3 * R)
    assert (M.width_left, M.width_right) == (0.7, 0.5)


def test_mode_count_mismatch():
    t = build_table(straight_block(1.0, 1.0), K, 3)
    with pytest.raises(ValueError):
        solve_rt(t, N=4)
