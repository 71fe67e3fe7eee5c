import numpy as np
import pytest

from hyperharm.cfunction import c_function
from hyperharm.geometry import make_space

from conftest import PAIRS

# frozen reference values computed with mpmath (dps=30) from the
# Gamma-quotient form of the same normalization
C_ORACLE = {
    (1, 0, 0.9): complex(0.35493242271296224, -0.47977638407420241),
    (1, 0, 3.7): complex(0.20025389025862047, -0.21430837225517313),
    (2, 0, 0.9): complex(0.0, -1.1111111111111111),
    (2, 0, 3.7): complex(0.0, -0.27027027027027026),
    (4, 0, 0.9): complex(-3.3149171270718231, -3.6832412523020256),
    (4, 0, 3.7): complex(-0.40844111640571814, -0.11038949092046436),
    (2, 1, 0.9): complex(-1.619701595958231, -3.128582112997848),
    (2, 1, 3.7): complex(-0.29464375617086426, -0.3380436693003767),
}


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_against_gamma_oracle(m1, m2):
    cf = c_function(make_space(m1, m2))
    for lam in (0.9, 3.7):
        want = C_ORACLE[(m1, m2, lam)]
        assert abs(cf.c(lam) - want) < 1e-13 * abs(want)


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_normalized_at_minus_i_rho(m1, m2):
    sp = make_space(m1, m2)
    cf = c_function(sp)
    assert abs(cf.c(-1j * sp.rho) - 1.0) < 1e-12


def test_h3_reciprocal_is_linear():
    # (2,0): c(lambda) = -i / lambda exactly, so the density is lambda^2
    cf = c_function(make_space(2, 0))
    lam = np.array([0.25, 1.0, 4.0, 17.0])
    assert np.abs(cf.c(lam) * lam - (-1j)).max() < 1e-13
    assert np.abs(cf.plancherel_density(lam) - lam**2).max() < 1e-10 * lam.max() ** 2


def test_h2_density_closed_form():
    # (1,0): |c(lambda)|^(-2) = pi lambda tanh(pi lambda)
    cf = c_function(make_space(1, 0))
    lam = np.array([0.3, 0.5, 1.0, 2.0, 4.0, 9.0])
    want = np.pi * lam * np.tanh(np.pi * lam)
    assert np.abs(cf.plancherel_density(lam) / want - 1.0).max() < 1e-12


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_density_routes_and_symmetries(m1, m2):
    cf = c_function(make_space(m1, m2))
    lam = np.linspace(0.1, 25.0, 40)
    via_product = 1.0 / np.abs(cf.c(lam)) ** 2
    assert np.allclose(cf.plancherel_density(lam), via_product, rtol=1e-10)
    # real lambda: c(-lambda) is the conjugate, density is even
    assert np.abs(cf.c(-lam) - np.conj(cf.c(lam))).max() < 1e-12
    assert np.allclose(cf.plancherel_density(-lam), cf.plancherel_density(lam), rtol=1e-12)
    assert cf.plancherel_density(0.0) == 0.0


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_density_growth_exponent(m1, m2):
    # |c(lambda)|^(-2) ~ const lambda^(d-1) at high frequency
    sp = make_space(m1, m2)
    cf = c_function(sp)
    lo, hi = 200.0, 400.0
    slope = np.log(cf.plancherel_density(hi) / cf.plancherel_density(lo)) / np.log(hi / lo)
    assert slope == pytest.approx(sp.d - 1.0, abs=0.05)


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_c_inv_minus_upper_half_plane(m1, m2):
    # 1/c(-lambda) must be finite on Im lambda >= 0 and vanish only at 0
    cf = c_function(make_space(m1, m2))
    lam = np.array([0.4 + 0.0j, 1.0 + 2.0j, -3.0 + 0.5j, 0.0 + 1.0j, 5.0 + 0.0j])
    vals = cf.c_inv_minus(lam)
    assert np.all(np.isfinite(vals))
    assert cf.c_inv_minus(0.0) == 0.0
    on_axis = cf.c_inv_minus(np.array([1.7 + 0.0j]))[0]
    assert on_axis == pytest.approx(1.0 / cf.c(-1.7), rel=1e-12)
