"""Geometry of rank-one hyperbolic spaces.

A space is fixed by the two root multiplicities (m1, m2); the real
hyperbolic space H^d is (d-1, 0).  Coordinates:

* Cartan (polar): a point at geodesic distance t from the origin, with
  radial volume density Delta(t) = (2 sinh t)^(m1+m2) (2 cosh t)^m2.
* Horocyclic: nbar_X a_t applied to the origin, X in R^m1 (m2 = 0
  concretely; the Iwasawa height also takes the (X, Y) pair for m2 > 0).

The concrete model for m2 = 0 is the hyperboloid in Minkowski space
R^(d,1); unipotent and boost actions are written in null coordinates
(xi+, xi-, x) with xi+- = x0 +- xd.  The horocyclic X coordinate is
normalized so the Iwasawa height is H(X) = log(1 + c0 |X|^2) with
c0 = 4 / (m1 + m2); the model's null-coordinate translation parameter is
then sqrt(c0) X.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

T_CAP = 700.0  # beyond this, ambient cosh/exp arithmetic overflows


@dataclass(frozen=True)
class SpaceParams:
    """Multiplicities and derived constants of a rank-one space."""

    m1: int
    m2: int
    d: int = field(init=False)
    rho: float = field(init=False)
    c0: float = field(init=False)

    def __post_init__(self):
        if int(self.m1) != self.m1 or int(self.m2) != self.m2:
            raise ValueError("multiplicities must be integers")
        if self.m1 < 1 or self.m2 < 0:
            raise ValueError("need m1 >= 1 and m2 >= 0")
        object.__setattr__(self, "m1", int(self.m1))
        object.__setattr__(self, "m2", int(self.m2))
        object.__setattr__(self, "d", self.m1 + self.m2 + 1)
        object.__setattr__(self, "rho", (self.m1 + 2 * self.m2) / 2.0)
        object.__setattr__(self, "c0", 4.0 / (self.m1 + self.m2))

    @property
    def is_hyperbolic(self):
        return self.m2 == 0


def make_space(m1, m2=0):
    return SpaceParams(m1, m2)


@dataclass(frozen=True)
class StripSpec:
    """Horizontal strip |Im lambda| <= width attached to an exponent p."""

    p: float
    rho: float
    width: float = field(init=False)

    def __post_init__(self):
        if not 1.0 <= self.p <= np.inf:
            raise ValueError("need p >= 1")
        object.__setattr__(self, "width", abs(2.0 / self.p - 1.0) * self.rho)

    def contains(self, lam):
        return np.abs(np.imag(lam)) <= self.width + 1e-15


def make_strip(space, p):
    return StripSpec(p=float(p), rho=space.rho)


@dataclass(frozen=True)
class HoroPoint:
    """Horocyclic coordinates of nbar_X a_t applied to the origin."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))


def polar_density(space, t):
    """Radial volume density Delta(t)."""
    t = np.asarray(t, dtype=float)
    return (2.0 * np.sinh(t)) ** (space.m1 + space.m2) * (2.0 * np.cosh(t)) ** space.m2


def log_polar_density(space, t):
    """log Delta(t), stable for large t."""
    t = np.asarray(t, dtype=float)
    # log(2 sinh t) = t + log(1 - e^(-2t)), valid for t > 0
    ls = t + np.log1p(-np.exp(-2.0 * t))
    lc = t + np.log1p(np.exp(-2.0 * t))
    return (space.m1 + space.m2) * ls + space.m2 * lc


def polar_density_log_derivative(space, t):
    """Delta'(t)/Delta(t) = (m1+m2) coth t + m2 tanh t."""
    t = np.asarray(t, dtype=float)
    return (space.m1 + space.m2) / np.tanh(t) + space.m2 * np.tanh(t)


def iwasawa_height(space, x, y=None):
    """Iwasawa height H(nbar) >= 0 of the unipotent with coordinates
    (X, Y); Y defaults to zero (and must be absent for m2 = 0)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[-1] != space.m1:
        raise ValueError(f"X must have {space.m1} components")
    xsq = np.sum(x * x, axis=-1)
    base = 1.0 + space.c0 * xsq
    if y is None:
        return np.log(base)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if space.m2 == 0:
        raise ValueError("Y coordinate requires m2 > 0")
    if y.shape[-1] != space.m2:
        raise ValueError(f"Y must have {space.m2} components")
    ysq = np.sum(y * y, axis=-1)
    return 0.5 * np.log(base**2 + 4.0 * space.c0 * ysq)


def _require_model(space):
    if space.m2 != 0:
        raise NotImplementedError("ambient model is implemented for m2 = 0 only")


def horo_to_ambient(space, point):
    """Hyperboloid-model coordinates (x0, x_1..x_{d-1}, xd) of
    nbar_X a_t applied to the origin (m2 = 0)."""
    _require_model(space)
    x = np.atleast_1d(np.asarray(point.x, dtype=float))
    t = float(point.t)
    if abs(t) > T_CAP:
        raise ValueError(f"|t| > {T_CAP} overflows the ambient model")
    v = np.sqrt(space.c0) * x
    # origin has (xi+, xi-, x) = (1, 1, 0); a_t scales xi+ by e^t;
    # nbar_v fixes xi+, sends x -> x + v xi+, xi- -> xi- + 2 v.x + |v|^2 xi+.
    xi_p = np.exp(t)
    xvec = v * xi_p
    xi_m = np.exp(-t) + np.sum(v * v) * xi_p
    out = np.empty(space.d + 1)
    out[0] = 0.5 * (xi_p + xi_m)
    out[1:-1] = xvec
    out[-1] = 0.5 * (xi_p - xi_m)
    return out


def ambient_to_horo(space, v):
    """Invert horo_to_ambient."""
    _require_model(space)
    v = np.asarray(v, dtype=float)
    xi_p = v[0] + v[-1]
    if xi_p <= 0:
        raise ValueError("point is outside the horocyclic chart")
    t = np.log(xi_p)
    x_model = v[1:-1] / xi_p
    return HoroPoint(x=x_model / np.sqrt(space.c0), t=t)


def ambient_distance(u, v):
    """Geodesic distance between hyperboloid points via the Minkowski
    pairing -u0 v0 + u.v (the pairing of two model points is <= -1)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    z = u[0] * v[0] - np.dot(u[1:], v[1:])
    return float(np.arccosh(max(z, 1.0)))


def cartan_radius(space, x, t):
    """Geodesic distance from the origin to nbar_X a_t (the Cartan radial
    coordinate of the point), stable for large t + height."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > T_CAP):
        raise ValueError(f"|t| > {T_CAP} not supported")
    q = 1.0 + space.c0 * np.sum(x * x, axis=-1)  # e^{H}
    # cosh(radius) = z with 2z = q e^t + e^(-t) >= 2
    log_z = np.logaddexp(np.log(q) + t, -t) - np.log(2.0)
    log_z, = np.broadcast_arrays(log_z)
    small = log_z < 30.0
    z = np.exp(np.where(small, log_z, 0.0))
    # for log z >= 30, arccosh(z) = log(2z) to machine precision
    out = np.where(small, np.arccosh(np.maximum(z, 1.0)), log_z + np.log(2.0))
    if out.ndim == 0:
        return float(out)
    return out


def cartan_correction(space, x, r):
    """E(X, r) = cartan_radius(nbar_X a_r) - r - H(X); lies in
    [0, 2 e^(-2r)] for r >= 0."""
    return cartan_radius(space, x, r) - np.asarray(r, dtype=float) - iwasawa_height(space, x)


def dilate(space, r, x):
    """Conjugation of nbar_X by a_r in coordinates: X -> e^(-r) X."""
    return np.exp(-r) * np.atleast_1d(np.asarray(x, dtype=float))


def sphere_area(n):
    """Surface measure of the unit sphere S^n in R^(n+1)."""
    from scipy.special import gamma as _g

    return 2.0 * np.pi ** ((n + 1) / 2.0) / _g((n + 1) / 2.0)


def horocycle_weight_integral(space, eps0, tol=1e-10):
    """Integral over the opposite unipotent group of
    exp(-(1+eps0) rho H(nbar)), in the X (and Y) Lebesgue normalization.

    Finite for every eps0 > 0; raises if the adaptive tail estimate
    exceeds ``tol`` or if eps0 <= 0.
    """
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    s = (1.0 + eps0) * space.rho
    c0 = space.c0
    if space.m2 == 0:
        area = sphere_area(space.m1 - 1) if space.m1 > 1 else 2.0

        def integrand(u):
            return u ** (space.m1 - 1) * (1.0 + c0 * u * u) ** (-s)

        U = 40.0 / np.sqrt(c0) * (1.0 + 1.0 / eps0)
        val, err = quad(integrand, 0.0, U, limit=200)
        # tail: integrand <= u^(m1-1) (c0 u^2)^(-s)
        pw = space.m1 - 2.0 * s
        tail = c0 ** (-s) * U ** (pw) / (-pw)
        if tail > tol or err > tol:
            raise ValueError("horocycle weight integral did not converge")
        return area * val + 0.0
    # m2 > 0: polar in X and Y separately
    area_x = sphere_area(space.m1 - 1) if space.m1 > 1 else 2.0
    area_y = sphere_area(space.m2 - 1) if space.m2 > 1 else 2.0

    def inner(u):
        base = 1.0 + c0 * u * u

        def g(v):
            return v ** (space.m2 - 1) * (base**2 + 4.0 * c0 * v * v) ** (-s / 2.0)

        V = 40.0 * base / np.sqrt(c0) * (1.0 + 1.0 / eps0)
        val, _ = quad(g, 0.0, V, limit=200)
        return val * u ** (space.m1 - 1)

    U = 40.0 / np.sqrt(c0) * (1.0 + 1.0 / eps0)
    val, err = quad(inner, 0.0, U, limit=200)
    if err > tol * max(1.0, abs(val)):
        raise ValueError("horocycle weight integral did not converge")
    return area_x * area_y * val


def ball_volume_cartan(space, R, n_panels=40, order=12):
    """Volume of the metric ball of radius R by the polar route."""
    from .numerics import gauss_panels

    nodes, weights = gauss_panels(0.0, float(R), n_panels, order)
    return float(np.sum(polar_density(space, nodes) * weights))


def ball_volume_horocyclic(space, R, kappa=1.0, n_panels=120, order=10):
    """Volume of the metric ball of radius R by the unipotent-boost
    route: kappa * int int 1{radius <= R} e^(2 rho t) dt dX (m2 = 0).

    The t-slab for fixed |X| is an interval with an exact exponential
    antiderivative, so only the radial X quadrature is numerical.  The
    overall constant depends on the unipotent measure normalization;
    calibrate kappa once per space against the polar route.
    """
    _require_model(space)
    from .numerics import gauss_panels

    # nbar_X a_t lies in B_R iff (q e^t + e^(-t))/2 <= cosh R
    # with q = 1 + c0 |X|^2, i.e. e^t between the roots of
    # q s^2 - 2 cosh(R) s + 1.
    cR = np.cosh(R)
    u_max = np.sinh(R) / np.sqrt(space.c0)
    # substitute u = u_max sin(theta): sqrt(cosh(R)^2 - q) becomes
    # sinh(R) cos(theta), removing the square-root edge singularity
    th, thw = gauss_panels(0.0, np.pi / 2.0, n_panels, order)
    un = u_max * np.sin(th)
    uw = thw * u_max * np.cos(th)
    area = sphere_area(space.m1 - 1) if space.m1 > 1 else 2.0
    q = 1.0 + space.c0 * un**2
    root = np.sinh(R) * np.cos(th)
    s_lo = (cR - root) / q
    s_hi = (cR + root) / q
    two_rho = 2.0 * space.rho
    inner = (s_hi**two_rho - s_lo**two_rho) / two_rho
    return kappa * area * float(np.sum(uw * un ** (space.m1 - 1) * inner))


def disc_bracket(z, b):
    """Horocycle bracket on the curvature -1 unit disc: the signed
    distance from the origin to the horocycle through z tangent at the
    boundary point b (|b| = 1).  Equals t when z = tanh(t/2) b."""
    z = np.asarray(z, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.log((1.0 - np.abs(z) ** 2) / np.abs(z - b) ** 2)


def disc_distance(z, w):
    """Hyperbolic distance on the curvature -1 unit disc."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = 2.0 * np.abs(z - w) ** 2
    den = (1.0 - np.abs(z) ** 2) * (1.0 - np.abs(w) ** 2)
    return np.arccosh(1.0 + num / den)
