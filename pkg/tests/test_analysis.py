import numpy as np
import pytest

from wavecascade.analysis import ZeroIncidentPower, modal_power, modal_powers, power_ratio, write_sweep_csv
from wavecascade.rt_solver import ScatteringMatrix


def test_modal_power_formula():
    a, k = 0.5, 10.0
    assert modal_power(1.0, 0, a, k) == pytest.approx(a / k * k)
    assert modal_power(2.0, 1, a, k) == pytest.approx(a / (2 * k) * 4 * np.sqrt(k * k - (np.pi / a) ** 2))
    assert modal_power(1.0, 4, a, k) == 0.0  # cut off
    with pytest.raises(ValueError):
        modal_power(1.0, 0, -a, k)


def test_power_of_identity_is_one():
    S = ScatteringMatrix.identity(4, width=0.5, k=10.0)
    rep = power_ratio(S, np.array([1, 0.5, 0, 0]), 10.0)
    assert rep.ratio == pytest.approx(1.0) and rep.P == rep.ratio
    assert rep.reflected_power == 0


def test_width_change_rescales_power():
    S = ScatteringMatrix.identity(1, k=3.0)
    S.width_left, S.width_right = 1.0, 2.0
    assert power_ratio(S, np.array([1.0])).ratio == pytest.approx(2.0)


def test_evanescent_incidence_has_no_power():
    S = ScatteringMatrix.identity(3, width=0.2, k=1.0)
    with pytest.raises(ZeroIncidentPower):
        power_ratio(S, np.array([0, 1.0, 0]))
    assert modal_powers(np.ones(3), 0.2, 1.0)[1:].sum() == 0


def test_sweep_csv(tmp_path):
    write_sweep_csv(tmp_path / "s.csv", [(1.0, 0.5, [0.1j, 0], [0.3, 0.2])], 2)
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "k,P,absR0,absR1,absT0,absT1"
    assert lines[1].split(",")[2] == "0.10000000000000001"
