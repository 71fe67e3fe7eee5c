import numpy as np
import pytest

from hyperharm.cfunction import c_function
from hyperharm.geometry import make_space
from hyperharm.spherical import (
    local_bessel_certificate,
    phi_hc,
    phi_series,
    phi_table,
    spherical_property_suite,
)

from conftest import PAIRS

# frozen reference values from the Gauss hypergeometric representation,
# computed independently with mpmath (dps=30); keyed by (m1, m2, lam, t)
PHI_ORACLE = {
    (1, 0, 0.7, 0.4): 0.97081165585437245,
    (1, 0, 2.5, 1.2): -0.22603484686634241,
    (1, 0, 8.0, 2.5): 0.10776132597304834,
    (2, 0, 0.7, 0.4): 0.96114801758308996,
    (2, 0, 2.5, 1.2): 0.037396123472490804,
    (2, 0, 8.0, 2.5): 0.018861867677130332,
    (4, 0, 0.7, 0.4): 0.9310087301123468,
    (4, 0, 2.5, 1.2): 0.19208939796752345,
    (4, 0, 8.0, 2.5): -0.00036869595539835182,
    (2, 1, 0.7, 0.4): 0.91504430624472,
    (2, 1, 2.5, 1.2): 0.11658321114286912,
    (2, 1, 8.0, 2.5): 0.00074037930342805693,
}

# mpmath legenp(-1/2 + 1.3j, 0, cosh 0.9), the classical closed form on
# the hyperbolic plane
LEGENDRE_10 = 0.655106811532553


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_against_hypergeometric_oracle(m1, m2):
    sp = make_space(m1, m2)
    for (pm1, pm2, lam, t), want in PHI_ORACLE.items():
        if (pm1, pm2) != (m1, m2):
            continue
        got = phi_table(sp, np.array([lam]), np.array([t]))[0, 0]
        assert abs(got - want) < 1e-10


def test_h2_legendre_value():
    sp = make_space(1, 0)
    got = phi_table(sp, np.array([1.3]), np.array([0.9]))[0, 0]
    assert got == pytest.approx(LEGENDRE_10, abs=1e-12)


def test_h3_closed_form(rng):
    sp = make_space(2, 0)
    lam = rng.uniform(0.05, 20.0, size=25)
    t = rng.uniform(0.05, 8.0, size=15)
    tab = phi_table(sp, lam, t)
    want = np.sin(np.outer(lam, t)) / np.outer(lam, np.sinh(t))
    assert np.abs(tab - want).max() < 1e-10


@pytest.mark.parametrize("m1,m2", PAIRS)
def test_property_suite_rows(m1, m2):
    rows = spherical_property_suite(make_space(m1, m2), seed=0, n_samples=20)
    failed = [name for name, row in rows.items() if not row["passed"]]
    assert failed == []


def test_normalization_and_evenness():
    sp = make_space(2, 1)
    lam = np.array([0.3, 1.0, 6.0])
    assert np.abs(phi_table(sp, lam, np.array([0.0])) - 1.0).max() < 1e-14
    t = np.linspace(0.1, 5.0, 9)
    assert np.abs(phi_table(sp, lam, t) - phi_table(sp, -lam, t)).max() < 1e-12


def test_ground_function_envelope():
    # e^(-rho t) <= phi_0(t) <= C (1 + t) e^(-rho t).  The upper constant
    # is 1 only on the hyperbolic plane; e.g. for (2,0) one has
    # phi_0 = t/sinh t ~ 2 t e^(-t), so C -> 2 there.  Assert the
    # constant-free lower bound everywhere and a uniform C <= 4.
    for m1, m2 in PAIRS:
        sp = make_space(m1, m2)
        t = np.linspace(0.05, 40.0, 161)
        phi0 = phi_table(sp, np.array([0.0]), t)[0].real
        env = np.exp(-sp.rho * t)
        assert np.all(phi0 >= env - 1e-12)
        const = np.max(phi0 / ((1.0 + t) * env))
        assert const <= 4.0
    sp = make_space(1, 0)
    t = np.linspace(0.05, 40.0, 161)
    phi0 = phi_table(sp, np.array([0.0]), t)[0].real
    assert np.all(phi0 <= (1.0 + t) * np.exp(-sp.rho * t) + 1e-12)


def test_hc_series_matches_table():
    sp = make_space(2, 0)
    lam = np.array([0.5, 3.0, 20.0])
    t = np.array([1.5, 4.0, 8.0])
    tab = phi_table(sp, lam, t)
    hc = phi_hc(sp, lam, t, n_terms=20)
    assert np.abs(tab - hc).max() < 1e-9


def test_local_series_matches_table():
    sp = make_space(4, 0)
    lam = np.array([0.4, 2.0])
    t = np.array([1e-3, 0.05, 0.2])
    tab = phi_table(sp, lam, t)
    loc = phi_series(sp, lam, t, n_terms=8)
    assert np.abs(tab - loc).max() < 1e-10


@pytest.mark.parametrize("m1", [1, 4])
def test_bessel_window_t_square_law(m1):
    # odd m1 keeps the t^2 correction alive, so the fitted slope is 2
    cert = local_bessel_certificate(make_space(m1, 0))
    assert cert.passed
    assert cert.t_slope == pytest.approx(2.0, abs=0.1)


def test_strip_bound_at_imaginary_shift():
    # |phi_lambda| <= phi_0 continues to hold on the strip boundary
    # lam + i rho, where the modulus is controlled by phi_0
    sp = make_space(2, 0)
    t = np.linspace(0.2, 6.0, 13)
    phi0 = phi_table(sp, np.array([0.0]), t)[0].real
    shifted = phi_table(sp, np.array([1.5 + 1j * sp.rho]), t)[0]
    assert np.all(np.abs(shifted) <= phi0 * np.exp(sp.rho * 0.0) + 1e-10)
