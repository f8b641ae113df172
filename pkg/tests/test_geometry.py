import math

import numpy as np
import pytest
from scipy.integrate import quad

from hypharm import geometry as geo


def test_lorentz_form_origin():
    o = geo.origin(3)
    assert geo.lorentz_form(o, o) == 1.0


def test_lorentz_form_origin_to_polar():
    o = geo.origin(2)
    x = geo.polar_point(1.0, [1.0, 0.0])
    assert math.isclose(geo.lorentz_form(o, x), math.cosh(1.0), rel_tol=1e-14)


def test_lorentz_form_same_direction():
    # cosh1 cosh2 - sinh1 sinh2 = cosh(2 - 1)
    sigma = np.array([0.6, 0.8])
    x = geo.polar_point(1.0, sigma)
    y = geo.polar_point(2.0, sigma)
    assert math.isclose(geo.lorentz_form(x, y), math.cosh(1.0), rel_tol=1e-12)


def test_point_invariants_rejected():
    with pytest.raises(geo.GeometryError):
        geo.HyperPoint((1.1, 0.0, 0.0))
    with pytest.raises(geo.GeometryError):
        geo.HyperPoint((-1.0, 0.0, 0.0))
    with pytest.raises(geo.GeometryError):
        geo.polar_point(1.0, [1.0, 1.0])
    with pytest.raises(geo.GeometryError):
        geo.polar_point(-0.5, [1.0, 0.0])


def test_distance_to_self_is_zero():
    x = geo.polar_point(2.5, [0.0, 1.0, 0.0])
    assert geo.distance(x, x) == 0.0


def test_distance_to_origin_is_radius():
    for r in (0.0, 0.37, 4.0, 11.0):
        x = geo.polar_point(r, [1.0, 0.0])
        assert math.isclose(geo.distance(geo.origin(2), x), r, rel_tol=1e-12, abs_tol=1e-14)
    # ambient coordinates store cosh r, which caps small-radius precision
    # near sqrt(machine eps)
    x = geo.polar_point(1e-3, [1.0, 0.0])
    assert math.isclose(geo.distance(geo.origin(2), x), 1e-3, rel_tol=1e-9)


def test_distance_same_direction():
    sigma = [0.0, 1.0]
    x = geo.polar_point(1.0, sigma)
    y = geo.polar_point(2.0, sigma)
    assert math.isclose(geo.distance(x, y), 1.0, rel_tol=1e-10)


def test_distance_symmetric_exactly(rng):
    for _ in range(50):
        u = rng.normal(size=3)
        v = rng.normal(size=3)
        x = geo.polar_point(rng.uniform(0, 5), u / np.linalg.norm(u))
        y = geo.polar_point(rng.uniform(0, 5), v / np.linalg.norm(v))
        assert geo.distance(x, y) == geo.distance(y, x)


def test_distance_clamp_and_error():
    x = geo.origin(2)
    y = geo.HyperPoint((1.0 + 2e-13, 2e-7, 6e-7))
    assert geo.distance(x, y) >= 0.0
    # a lorentz form far below 1 cannot come from round-off
    class Fake:
        array = np.array([0.9, 0.0, 0.0])
    with pytest.raises(geo.GeometryError):
        geo.distance(x, Fake())


def test_triangle_inequality(rng):
    for _ in range(80):
        pts = []
        for _k in range(3):
            u = rng.normal(size=4)
            pts.append(geo.polar_point(rng.uniform(0, 4), u / np.linalg.norm(u)))
        x, y, z = pts
        assert geo.distance(x, z) <= geo.distance(x, y) + geo.distance(y, z) + 1e-9


def test_two_point_distance_aligned():
    assert math.isclose(geo.two_point_distance(2.0, 1.0, 0.0), 1.0, abs_tol=1e-12)


def test_two_point_distance_antipodal():
    assert math.isclose(geo.two_point_distance(2.0, 1.0, np.pi), 3.0, rel_tol=1e-12)


def test_two_point_distance_from_origin():
    for theta in (0.0, 0.4, 2.0, np.pi):
        assert math.isclose(geo.two_point_distance(0.0, 1.7, theta), 1.7, rel_tol=1e-12)


def test_two_point_distance_monotone_in_angle():
    thetas = np.linspace(0, np.pi, 200)
    rho = geo.two_point_distance(1.3, 0.8, thetas)
    assert np.all(np.diff(rho) >= -1e-14)
    assert abs(rho[0] - 0.5) < 1e-12 and abs(rho[-1] - 2.1) < 1e-12


def test_ball_volume_zero():
    assert geo.ball_volume(0.0, 2) == 0.0
    assert geo.ball_volume(0.0, 5) == 0.0


def test_ball_volume_closed_forms():
    for t in (0.3, 1.0, 2.5, 7.0):
        assert math.isclose(geo.ball_volume(t, 2), 2 * np.pi * (np.cosh(t) - 1), rel_tol=1e-13)
        assert math.isclose(geo.ball_volume(t, 3),
                            2 * np.pi * (np.sinh(t) * np.cosh(t) - t), rel_tol=1e-13)


def test_ball_volume_against_quadrature():
    for n in (4, 5, 7):
        for t in (0.5, 2.0):
            want, _ = quad(lambda r: np.sinh(r) ** (n - 1), 0, t, epsabs=1e-13)
            want *= geo.sphere_area(n)
            assert math.isclose(geo.ball_volume(t, n), want, rel_tol=1e-10)


def test_ball_volume_monotone_euclidean_limit():
    ts = np.linspace(0.001, 3, 50)
    vols = [geo.ball_volume(t, 3) for t in ts]
    assert np.all(np.diff(vols) > 0)
    # ~ (4/3) pi t^3 as t -> 0
    assert math.isclose(vols[0], 4 * np.pi * ts[0] ** 3 / 3, rel_tol=1e-5)


def test_ball_volume_non_doubling():
    # exponential growth: the doubling ratio V(2t)/V(t) is ~ e^((n-1)t),
    # far above the Euclidean constant 2^n and increasing without bound
    r2 = geo.ball_volume(10.0, 2) / geo.ball_volume(5.0, 2)
    assert r2 > 100 > 2 ** 2
    assert geo.ball_volume(14.0, 2) / geo.ball_volume(7.0, 2) > r2
    assert geo.ball_volume(10.0, 3) / geo.ball_volume(5.0, 3) > 1e3


def test_sphere_area_values():
    assert math.isclose(geo.sphere_area(2), 2 * np.pi, rel_tol=1e-15)
    assert math.isclose(geo.sphere_area(3), 4 * np.pi, rel_tol=1e-15)


def test_dimension_validation():
    with pytest.raises(geo.GeometryError):
        geo.check_dimension(1)
    with pytest.raises(geo.GeometryError):
        geo.ball_volume(1.0, 2.5)
