import numpy as np
import pytest

from wavecascade.cascade import StraightGuide
from wavecascade.pipeline import SolverSettings, power_sweep, rt_dtn_comparison, solve_fields, solve_structure
from wavecascade.presets import straight_block

K = 4.0
SET = SolverSettings(N=4, rel_tol=1e-10, abs_tol=1e-12)


@pytest.fixture(scope="module")
def structure():
    a = 0.5
    b1 = straight_block(a, 1.0, beta=0.3 + 0.4j, name="first")
    b2 = straight_block(a, 1.5, beta=0.6j, name="second")
    return [b1, StraightGuide(a, 0.35), b2]


@pytest.fixture(scope="module")
def solved(structure):
    sol = solve_structure(structure, K, SET)
    return sol, solve_fields(sol)


def test_rt_and_dtn_interface_fields_agree(solved):
    sol, fields = solved
    comp = rt_dtn_comparison(sol, fields)
    assert len(comp) == 2
    assert max(d.max() for _, _, d in comp) < 1e-6
    assert np.allclose(comp[-1][0], sol.end_field())


def test_field_is_continuous_along_the_structure(solved):
    _, fields = solved
    segs = fields.segments
    assert [s.kind for s in segs] == ["block", "guide", "block"]
    for left, right in zip(segs, segs[1:]):
        assert np.allclose(left.phi[-1], right.phi[0], atol=1e-6)
        assert left.s[-1] == pytest.approx(right.s[0])
    s, phi = fields.axial()
    assert s[-1] == pytest.approx(1.0 + 0.35 + 1.5)
    assert phi.shape == (len(s), 4)


def test_reflection_matches_cascade(solved):
    sol, fields = solved
    assert np.allclose(fields.reflection, sol.S_total.R_plus, atol=1e-6)


def test_power_sweep_is_in_range(structure):
    out = power_sweep(structure, [2.0, 5.0], SolverSettings(N=3))
    assert all(0 < rep.ratio < 1 for _, rep, _ in out)


def test_structure_validation(structure):
    with pytest.raises(ValueError):
        solve_structure(structure[1:], K, SET)
    with pytest.raises(ValueError):
        solve_structure([structure[0], structure[1], structure[1], structure[2]], K, SET)
