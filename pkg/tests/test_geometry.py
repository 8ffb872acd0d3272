import numpy as np
import pytest

from wavecascade.geometry import (AdmittanceProfile, AdmittanceSegment, ConformalBlock, StraightMap,
                                  admittance_Y, map_from_dict, metric_mu, metric_mu_dv)
from wavecascade.presets import bend_map, example_admittance, example_blocks, step_map


@pytest.fixture(scope="module")
def maps():
    return step_map(), bend_map()


def test_straight_map():
    m = StraightMap(0.2)
    assert m.point(1 + 0.5j) == pytest.approx(0.2 + 0.1j)
    assert m.width(3.0) == pytest.approx(0.2)
    d1, d2, d3 = m.derivatives(np.array([0.3 + 0.2j]))
    assert d1[0] == 0.2 and d2[0] == 0 and d3[0] == 0


@pytest.mark.parametrize("which", [0, 1])
def test_derivatives_match_finite_differences(maps, which):
    m = maps[which]
    h = 1e-5
    for w in (-3.0 + 0.3j, 0.4 + 0.7j, 2.5 + 1.0j):
        d1, d2, d3 = (complex(x) for x in m.derivatives(w))
        f = lambda z, i: complex(m.derivatives(z)[i])
        assert abs((f(w + h, 0) - f(w - h, 0)) / (2 * h) - d2) < 1e-6 * max(1, abs(d2))
        assert abs((f(w + h, 1) - f(w - h, 1)) / (2 * h) - d3) < 1e-5 * max(1, abs(d3))


@pytest.mark.parametrize("which", [0, 1])
def test_point_integrates_derivative(maps, which):
    m = maps[which]
    a, b = -1.0 + 0.2j, 1.5 + 0.8j
    h = 1e-5
    dz = m.point(b + h) - m.point(b - h)
    assert abs(dz / (2 * h) - complex(m.dF(b))) < 1e-6
    assert abs(m.point(a) - m.point(a)) == 0


def test_example_end_widths():
    step, bend = example_blocks()
    wl, wr = step.end_widths
    assert wl == pytest.approx(0.2, abs=1e-3) and wr == pytest.approx(0.6, abs=1e-3)
    wl, wr = bend.end_widths
    assert wl == pytest.approx(0.6, abs=1e-3) and wr == pytest.approx(0.2 * np.sqrt(2), abs=1e-3)


def test_example_corner_points():
    step, bend = example_blocks()
    assert abs(step.map.point(5.0) - (3.87561 + 0.19726j)) < 1e-4
    assert abs(bend.map.point(7.0) - (7.0671 - 1.5855j)) < 2e-3


def test_ends_are_straight():
    for b in example_blocks():
        assert b.straightness("left") < 1e-3 and b.straightness("right") < 1e-3


def test_metric_and_its_v_derivative(maps):
    m = maps[0]
    u, v, h = 0.3, 0.4, 1e-6
    fd = (metric_mu(m, u, v + h) - metric_mu(m, u, v - h)) / (2 * h)
    assert abs(metric_mu_dv(m, u, v) - fd) < 1e-5 * max(1, abs(fd))


@pytest.mark.parametrize("shape", ["quintic", "septic", "raised_cosine"])
def test_admittance_profile_and_derivatives(shape):
    prof = example_admittance(0.5 + 0.5j, shape)
    b, b1, b2 = prof.evaluate(np.array([-3.0, 0.0, 3.0]))
    assert np.allclose(b, [0, 0.5 + 0.5j, 0])
    us = np.linspace(-2.2, 2.2, 23)
    h = 1e-5
    f = lambda u: prof.evaluate(u)[0]
    d1 = (f(us + h) - f(us - h)) / (2 * h)
    assert np.allclose(d1, prof.evaluate(us)[1], atol=2e-5)  # raised cosine has a curvature jump


def test_admittance_validation():
    with pytest.raises(ValueError):
        AdmittanceSegment(0, 1, 0.5, 2, 0.5)
    with pytest.raises(ValueError):
        AdmittanceSegment(0, 1, 2, 3, -0.1)
    prof = AdmittanceProfile((AdmittanceSegment(-5.5, -1, 1, 2, 0.5),))
    with pytest.raises(ValueError):
        ConformalBlock(StraightMap(1.0), prof, (-5, 5))


def test_transformed_admittance_derivatives():
    step, _ = example_blocks()
    us = np.array([-1.5, -0.2, 0.7, 1.6])
    h = 1e-5
    Y, Y1, Y2 = admittance_Y(step, us)
    Yp = admittance_Y(step, us + h)[0]
    Ym = admittance_Y(step, us - h)[0]
    assert np.allclose((Yp - Ym) / (2 * h), Y1, atol=1e-6)
    assert np.allclose((Yp - 2 * Y + Ym) / h**2, Y2, atol=2e-3)


def test_map_and_profile_round_trip(maps):
    for m in maps:
        assert map_from_dict(m.to_dict()) == m
    prof = example_admittance()
    assert AdmittanceProfile.from_dict(prof.to_dict()) == prof
    with pytest.raises(ValueError):
        map_from_dict({"kind": "ellipse"})


def test_grid_image_matches_point():
    step, _ = example_blocks()
    rows = step.grid_image([0.0, 1.0], [0.0, 0.5, 1.0])
    for u, v, x, y in rows:
        assert abs(step.map.point(complex(u, v)) - (x + 1j * y)) < 1e-9
