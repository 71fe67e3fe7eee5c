import numpy as np
import pytest

from hyperharm.geometry import (
    HoroPoint,
    T_CAP,
    ambient_distance,
    ambient_to_horo,
    ball_volume_cartan,
    ball_volume_horocyclic,
    cartan_correction,
    cartan_radius,
    dilate,
    disc_bracket,
    disc_distance,
    horo_to_ambient,
    horocycle_weight_integral,
    iwasawa_height,
    log_polar_density,
    make_space,
    make_strip,
    polar_density,
    polar_density_log_derivative,
    sphere_area,
)
from hyperharm.numerics import central_derivative

from conftest import PAIRS


def test_derived_constants():
    sp = make_space(2, 1)
    assert sp.d == 4
    assert sp.rho == 2.0
    assert sp.c0 == pytest.approx(4.0 / 3.0)
    sp = make_space(2, 0)
    assert sp.d == 3 and sp.rho == 1.0 and sp.c0 == 2.0
    assert sp.is_hyperbolic
    assert not make_space(2, 1).is_hyperbolic


def test_make_space_rejects_bad_multiplicities():
    with pytest.raises(ValueError):
        make_space(0, 0)
    with pytest.raises(ValueError):
        make_space(2, -1)
    with pytest.raises(ValueError):
        make_space(1.5, 0)


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_density_small_t_power(m1, m2):
    # Delta(t) ~ 2^m2 (2t)^(m1+m2) as t -> 0
    sp = make_space(m1, m2)
    t = 1e-6
    lead = 2.0**m2 * (2.0 * t) ** (m1 + m2)
    assert polar_density(sp, t) == pytest.approx(lead, rel=1e-9)


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_log_density_routes_agree(m1, m2):
    sp = make_space(m1, m2)
    t = np.linspace(0.2, 12.0, 31)
    direct = np.log(polar_density(sp, t))
    # the log route must also survive t values where the plain product
    # overflows
    assert np.allclose(log_polar_density(sp, t), direct, atol=1e-10)
    # for large t both factors behave like e^t, so log Delta -> 2 rho t
    big = log_polar_density(sp, np.array([400.0]))
    assert np.isfinite(big).all()
    assert big[0] == pytest.approx(2.0 * sp.rho * 400.0, rel=1e-12)


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_density_log_derivative_matches_fd(m1, m2):
    sp = make_space(m1, m2)
    t = np.linspace(0.3, 6.0, 13)
    fd = central_derivative(lambda u: log_polar_density(sp, u), t, 1, 1e-4)
    assert np.abs(polar_density_log_derivative(sp, t) - fd).max() < 1e-7


def test_strip_width_and_membership():
    sp = make_space(2, 0)
    strip = make_strip(sp, 1.5)
    assert strip.width == pytest.approx(abs(2.0 / 1.5 - 1.0) * sp.rho)
    assert strip.contains(5.0 + 0.33j)
    assert strip.contains(0.0 + strip.width * 1j)
    assert not strip.contains(0.0 + (strip.width + 1e-6) * 1j)
    # p = 2 collapses the strip to the real axis
    flat = make_strip(sp, 2.0)
    assert flat.width == 0.0
    assert flat.contains(3.0) and not flat.contains(1e-6j * 2)
    with pytest.raises(ValueError):
        make_strip(sp, 0.9)


def test_iwasawa_height_closed_form():
    sp = make_space(2, 0)
    x = np.array([0.3, -1.1])
    assert iwasawa_height(sp, x) == pytest.approx(np.log(1.0 + sp.c0 * np.dot(x, x)), rel=1e-14)
    with pytest.raises(ValueError):
        iwasawa_height(sp, np.array([1.0]))
    with pytest.raises(ValueError):
        iwasawa_height(sp, x, y=np.array([0.5]))
    spc = make_space(2, 1)
    x2 = np.array([0.4, 0.2])
    y2 = np.array([0.7])
    want = 0.5 * np.log((1.0 + spc.c0 * 0.2) ** 2 + 4.0 * spc.c0 * 0.49)
    assert iwasawa_height(spc, x2, y2) == pytest.approx(want, rel=1e-14)


def test_cartan_radius_at_origin_coordinate():
    sp = make_space(2, 0)
    t = np.array([0.0, 0.7, 3.0, -2.0])
    r = cartan_radius(sp, np.zeros(2), t)
    assert np.allclose(r, np.abs(t), atol=1e-12)


def test_cartan_radius_large_height_is_stable():
    sp = make_space(2, 0)
    r = cartan_radius(sp, np.array([1e6, 0.0]), 500.0)
    assert np.isfinite(r)
    # asymptotically r = t + H(X)
    assert r == pytest.approx(500.0 + iwasawa_height(sp, np.array([1e6, 0.0])), rel=1e-12)
    with pytest.raises(ValueError):
        cartan_radius(sp, np.zeros(2), T_CAP + 1.0)


def test_cartan_radius_matches_ambient_distance(rng):
    sp = make_space(2, 0)
    origin = horo_to_ambient(sp, HoroPoint(x=np.zeros(2), t=0.0))
    for _ in range(20):
        x = rng.normal(size=2) * 2.0
        t = rng.uniform(-3.0, 3.0)
        pt = horo_to_ambient(sp, HoroPoint(x=x, t=t))
        assert cartan_radius(sp, x, t) == pytest.approx(ambient_distance(origin, pt), abs=1e-10)


def test_cartan_correction_bounds(rng):
    # 0 <= E(X, r) <= 2 exp(-2r), with E the defect of r + H(X)
    for m1, m2 in [(1, 0), (2, 0)]:
        sp = make_space(m1, m2)
        x = rng.normal(size=(200, m1 + m2)) * rng.choice([0.1, 1.0, 5.0], size=(200, 1))
        r = rng.uniform(0.0, 5.0, size=200)
        e = np.array([cartan_correction(sp, xi, ri) for xi, ri in zip(x, r)])
        assert e.min() > -1e-10
        assert np.max(e - 2.0 * np.exp(-2.0 * r)) <= 0.0


def test_dilate_contracts_coordinates():
    sp = make_space(2, 0)
    out = dilate(sp, 1.5, np.array([2.0, -4.0]))
    assert np.allclose(out, np.exp(-1.5) * np.array([2.0, -4.0]))


def test_ambient_roundtrip(rng):
    sp = make_space(4, 0)
    for _ in range(10):
        x = rng.normal(size=4) * 3.0
        t = rng.uniform(-5.0, 5.0)
        back = ambient_to_horo(sp, horo_to_ambient(sp, HoroPoint(x=x, t=t)))
        assert back.t == pytest.approx(t, abs=1e-12)
        assert np.allclose(back.x, x, atol=1e-10)
    with pytest.raises(NotImplementedError):
        horo_to_ambient(make_space(2, 1), HoroPoint(x=np.zeros(2), t=0.0))


def test_disc_model_consistency():
    # z = tanh(t/2) b lies at distance t from 0 and bracket t at b
    t = 1.3
    b = np.exp(0.4j)
    z = np.tanh(t / 2.0) * b
    assert disc_distance(z, 0.0) == pytest.approx(t, rel=1e-12)
    assert disc_bracket(z, b) == pytest.approx(t, rel=1e-12)
    # bracket at the opposite boundary point is -t
    assert disc_bracket(z, -b) == pytest.approx(-t, rel=1e-12)


def test_sphere_area_values():
    assert sphere_area(1) == pytest.approx(2.0 * np.pi, rel=1e-14)
    assert sphere_area(2) == pytest.approx(4.0 * np.pi, rel=1e-14)
    assert sphere_area(3) == pytest.approx(2.0 * np.pi**2, rel=1e-14)


def test_horocycle_weight_closed_forms():
    # two hand-integrable cases; both reduce to elementary integrals
    # with value pi/4 (accuracy is limited by the internal tail cutoff
    # times the sphere-area factor)
    assert horocycle_weight_integral(make_space(2, 0), 2.0, tol=1e-8) == pytest.approx(
        np.pi / 4.0, abs=1e-7
    )
    assert horocycle_weight_integral(make_space(1, 0), 3.0, tol=2e-6) == pytest.approx(
        np.pi / 4.0, abs=1e-5
    )


def test_horocycle_weight_monotone_and_guards():
    sp = make_space(2, 1)
    vals = [horocycle_weight_integral(sp, e, tol=1e-4) for e in (3.0, 4.0, 6.0)]
    assert vals[0] > vals[1] > vals[2] > 0.0
    with pytest.raises(ValueError):
        horocycle_weight_integral(sp, 0.0)


@pytest.mark.parametrize("m1", [1, 2, 4])
def test_ball_volume_routes_agree(m1):
    sp = make_space(m1, 0)
    kappa = ball_volume_cartan(sp, 1.0) / ball_volume_horocyclic(sp, 1.0)
    for R in (0.5, 2.0, 4.0):
        va = ball_volume_cartan(sp, R)
        vb = ball_volume_horocyclic(sp, R, kappa=kappa)
        assert abs(va - vb) / va < 1e-8


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_ball_volume_flat_limit(m1, m2):
    # Delta(t) ~ 2^(m1+2 m2) t^(d-1), so V(R) ~ 2^(m1+2 m2) R^d / d
    sp = make_space(m1, m2)
    R = 1e-2
    flat = 2.0 ** (m1 + 2 * m2) * R**sp.d / sp.d
    assert ball_volume_cartan(sp, R) == pytest.approx(flat, rel=1e-3)
