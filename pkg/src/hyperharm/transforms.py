"""Spherical transform, inversion, Plancherel checks, Abel transform
(two routes), the weighted Abel mapping-property check, the boundary
Fourier transform on the 2-d disc model, and the band-limited test
function factory.

Measure conventions: the volume element is polar, density Delta(t) with
unit-mass angular average, so the forward transform is
f^(lam) = int_0^inf f(t) phi_lam(t) Delta(t) dt.  The inversion and
Abel constants depend on further measure choices the formulas leave
open; they are calibrated once per space, cached, and pinned in tests.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .cfunction import CFunction
from .geometry import polar_density, sphere_area
from .spherical import phi_table

DEFAULT_T_MAX = 30.0
DEFAULT_LAM_MAX = 16.0


@dataclass(frozen=True)
class QuadGrid:
    """Quadrature nodes and weights on [0, bound]."""

    nodes: np.ndarray
    weights: np.ndarray
    bound: float

    @property
    def size(self):
        return self.nodes.size


def time_grid(t_max=DEFAULT_T_MAX, n_panels=48, order=12, grading=2.5):
    """Graded radial quadrature grid, dense near the origin."""
    from .numerics import gauss_panels

    x, w = gauss_panels(0.0, t_max, n_panels, order, grading=grading)
    return QuadGrid(x, w, t_max)


def spectral_grid(lam_max=DEFAULT_LAM_MAX, n_panels=64, order=10):
    """Uniform half-line spectral quadrature grid on [0, lam_max].

    Panel width stays below 1/2: the spectral density can have complex
    poles that close to the real axis (half-integer multiplicity
    spaces), and wider panels stall the quadrature convergence there."""
    from .numerics import gauss_panels

    x, w = gauss_panels(0.0, lam_max, n_panels, order)
    return QuadGrid(x, w, lam_max)


@dataclass
class RadialFunction:
    """Radial (bi-invariant) function known through a vectorized
    evaluator on t >= 0; evenness in t is implicit."""

    space: object
    evaluator: object
    label: str = ""
    t_max: float = DEFAULT_T_MAX

    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        return self.evaluator(t)

    def lp_norm(self, p, grid=None):
        grid = grid or time_grid(self.t_max)
        vals = np.abs(self(grid.nodes))
        dens = polar_density(self.space, grid.nodes)
        return float(np.sum(vals**p * dens * grid.weights)) ** (1.0 / p)


@dataclass
class SpectralFunction:
    """Even spectral-side function with samples on a half-line grid and
    an evaluator; `strip_evaluator`, when set, extends it to complex
    arguments."""

    grid: QuadGrid
    values: np.ndarray
    evaluator: object = None
    even: bool = True
    strip_evaluator: object = None

    def __call__(self, lam):
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.evaluator is not None:
            return self.evaluator(lam)
        spline = CubicSpline(self.grid.nodes, self.values)
        return spline(lam)


@dataclass
class BoundaryFunction:
    """Samples on a spectral grid x boundary-circle grid (2-d model)."""

    lam_grid: QuadGrid
    theta: np.ndarray
    values: np.ndarray  # (n_lam, n_theta)


_KAPPA_INV = {}
_KAPPA_ABEL = {}
_ABEL_B_CONST = {}


class SphericalAnalysis:
    """Cached transform context for one space: eigenfunction table on a
    product quadrature grid, spectral density, and the calibrated
    inversion constant."""

    def __init__(self, space, tgrid=None, lgrid=None):
        self.space = space
        self.tgrid = tgrid or time_grid()
        self.lgrid = lgrid or spectral_grid()
        self.cf = CFunction(space)
        self.phi = phi_table(space, self.lgrid.nodes, self.tgrid.nodes)
        self.density = polar_density(space, self.tgrid.nodes)
        self.pl = self.cf.plancherel_density(self.lgrid.nodes)
        self.kappa_inv = kappa_inv(space, analysis=self)

    def forward(self, f):
        """Spherical transform sampled on the spectral grid."""
        vals = f(self.tgrid.nodes)
        tail = np.abs(vals[-8:]).max() * self.density[-8:].max()
        head = np.abs(vals).max() * self.density.max()
        if head > 0 and tail > 1e-10 * head:
            raise ValueError("radial tail not negligible on the grid; increase t_max")
        coeffs = vals * self.density * self.tgrid.weights
        samples = self.phi @ coeffs
        spline = CubicSpline(self.lgrid.nodes, samples)
        return SpectralFunction(self.lgrid, samples, evaluator=lambda x: spline(np.abs(x)))

    def raw_inverse_on_nodes(self, h):
        hv = h(self.lgrid.nodes) if callable(h) else np.asarray(h)
        return (hv * self.pl * self.lgrid.weights) @ self.phi

    def inverse(self, h, label="inverse"):
        """Calibrated half-line spectral synthesis, returned with a
        spline evaluator built on the radial grid."""
        node_vals = self.kappa_inv * self.raw_inverse_on_nodes(h)
        order = np.argsort(self.tgrid.nodes)
        spline = CubicSpline(self.tgrid.nodes[order], node_vals[order])
        t_hi = float(self.tgrid.nodes.max())

        def evaluate(t):
            t = np.asarray(t, dtype=float)
            out = spline(np.clip(t, None, t_hi))
            return np.where(t > t_hi, 0.0, out)

        return RadialFunction(self.space, evaluate, label=label, t_max=self.tgrid.bound)

    def plancherel_defect(self, f):
        """Relative gap between the radial and spectral L2 energies."""
        h = self.forward(f)
        lhs = np.sum(np.abs(f(self.tgrid.nodes)) ** 2 * self.density * self.tgrid.weights)
        rhs = self.kappa_inv * np.sum(np.abs(h.values) ** 2 * self.pl * self.lgrid.weights)
        return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def _calibration_spectrum(lam):
    return np.exp(-np.asarray(lam, dtype=float) ** 2 / 2.0)


def kappa_inv(space, analysis=None):
    """Inversion normalization, measured once per space on a Gaussian
    spectrum and cached.  The measurement asserts flatness of the
    pointwise ratio to 1e-8."""
    key = (space.m1, space.m2)
    if key in _KAPPA_INV:
        return _KAPPA_INV[key]
    if analysis is None:
        analysis = SphericalAnalysis.__new__(SphericalAnalysis)
        analysis.space = space
        analysis.tgrid = time_grid()
        analysis.lgrid = spectral_grid()
        analysis.cf = CFunction(space)
        analysis.phi = phi_table(space, analysis.lgrid.nodes, analysis.tgrid.nodes)
        analysis.density = polar_density(space, analysis.tgrid.nodes)
        analysis.pl = analysis.cf.plancherel_density(analysis.lgrid.nodes)
    g = _calibration_spectrum(analysis.lgrid.nodes)
    f_raw = (g * analysis.pl * analysis.lgrid.weights) @ analysis.phi
    h = analysis.phi @ (f_raw * analysis.density * analysis.tgrid.weights)
    mask = g > 0.05
    ratio = g[mask] / h[mask]
    value = float(np.mean(ratio))
    spread = float(np.max(np.abs(ratio - value)) / abs(value))
    if spread > 1e-8:
        raise RuntimeError(f"inversion constant not flat: spread {spread:.2e}")
    _KAPPA_INV[key] = value
    if analysis is not None and hasattr(analysis, "kappa_inv"):
        analysis.kappa_inv = value
    return value


def paley_wiener_factory(space, analysis, spectrum, label="pw"):
    """Radial test function synthesized from an even rapidly decaying
    spectrum callable; the spectrum is attached for round-trip checks."""
    h = SpectralFunction(
        analysis.lgrid,
        np.asarray(spectrum(analysis.lgrid.nodes), dtype=float),
        evaluator=lambda x: spectrum(np.abs(np.asarray(x, dtype=float))),
        strip_evaluator=spectrum,
    )
    f = analysis.inverse(h, label=label)
    f.spectrum = h
    return f


def function_family(space, analysis, n=10, seed=2024):
    """Band-limited family used across the regression checks: Gaussian
    spectra modulated by even polynomials, spectral-L2 normalized."""
    rng = np.random.default_rng(seed)
    fam = []
    for i in range(n):
        width = rng.uniform(0.8, 1.8)
        a = rng.uniform(-0.25, 0.5)
        b = rng.uniform(-0.1, 0.3)
        shift = rng.uniform(0.0, 2.0)

        def spectrum(lam, w=width, a=a, b=b, s=shift):
            lam = np.asarray(lam)
            return np.exp(-(lam**2) / (2.0 * w**2)) * (1.0 + a * lam**2 + b * lam**4) * np.cosh(
                s * lam / (1.0 + lam * lam / 40.0)
            ) / np.cosh(s)

        norm = np.sqrt(
            np.sum(np.abs(spectrum(analysis.lgrid.nodes)) ** 2 * analysis.pl * analysis.lgrid.weights)
        )
        fam.append(
            paley_wiener_factory(
                space, analysis, (lambda x, sp=spectrum, c=norm: sp(x) / c), label=f"pw{i}"
            )
        )
    return fam


# ---------------------------------------------------------------------------
# Abel transform


def effective_support(f, t_max=DEFAULT_T_MAX, floor=1e-13, n=481):
    """Largest radius where |f| exceeds floor * max|f| on [0, t_max]."""
    ts = np.linspace(0.0, t_max, n)
    v = np.abs(f(ts))
    m = v.max()
    if m == 0.0:
        return 0.0
    idx = np.nonzero(v > floor * m)[0]
    return float(ts[min(idx[-1] + 1, n - 1)])


def abel_transform_horocyclic(space, f, t, kappa=None, n_panels=60, order=10, t_max=DEFAULT_T_MAX):
    """Route A: weighted unipotent-slice integral
    kappa e^(rho t) int f(r(X)) dX over the flat slice, reduced to the
    radial profile with cosh r = cosh t + (c0/2)|X|^2 e^t.  Requires the
    split-free model (m2 = 0).  kappa defaults to the calibrated value.

    The slice variable is truncated where f becomes negligible; without
    that the nodes spread over e^(t_max/2) scales and miss the support.
    """
    from .numerics import gauss_panels

    if space.m2 != 0:
        raise ValueError("horocyclic route needs m2 = 0")
    if kappa is None:
        kappa = kappa_abel(space)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ta = np.abs(t)
    out = np.zeros_like(ta)
    area = sphere_area(space.m1 - 1)
    r_supp = min(effective_support(f, t_max) + 1.0, t_max)
    for i, ti in enumerate(ta):
        arg = 2.0 * (np.cosh(r_supp) - np.cosh(ti)) * np.exp(-ti) / space.c0
        if arg <= 0.0:
            continue
        u, w = gauss_panels(0.0, np.sqrt(arg), n_panels, order, grading=2.0)
        r = np.arccosh(np.maximum(np.cosh(ti) + 0.5 * space.c0 * u * u * np.exp(ti), 1.0))
        out[i] = np.sum(f(r) * u ** (space.m1 - 1) * w) * area
    return kappa * np.exp(space.rho * ta) * out


def abel_transform_sinh(space, f, t, const=None, n_panels=60, order=10, t_max=DEFAULT_T_MAX):
    """Route B (d = 3 closed form): const * int_|t|^inf f(r) sinh r dr."""
    from .numerics import gauss_panels

    if space.d != 3 or space.m2 != 0:
        raise ValueError("closed-form route is specific to d = 3, m2 = 0")
    if const is None:
        const = abel_sinh_constant(space)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    for i, ti in enumerate(np.abs(t)):
        r, w = gauss_panels(ti, t_max, n_panels, order)
        out[i] = np.sum(f(r) * np.sinh(r) * w)
    return const * out


def kappa_abel(space, analysis=None, probe=None):
    """Slice normalization for the unipotent route, calibrated once per
    space so that the flat Fourier transform of the slice integral
    matches the spherical transform, then cached."""
    key = (space.m1, space.m2)
    if key in _KAPPA_ABEL:
        return _KAPPA_ABEL[key]
    analysis = analysis or SphericalAnalysis(space)
    probe = probe or paley_wiener_factory(space, analysis, _calibration_spectrum, label="abel-cal")
    lam = np.linspace(0.15, 2.5, 9)
    target = probe.spectrum(lam) if hasattr(probe, "spectrum") else analysis.forward(probe)(lam)
    raw = fourier_of_even(
        lambda s: abel_transform_horocyclic(space, probe, s, kappa=1.0), lam, t_max=analysis.tgrid.bound
    )
    ratio = target / raw
    value = float(np.mean(ratio.real))
    spread = float(np.max(np.abs(ratio - value)) / abs(value))
    if spread > 1e-6:
        raise RuntimeError(f"slice normalization not flat: spread {spread:.2e}")
    _KAPPA_ABEL[key] = value
    return value


def abel_sinh_constant(space):
    """d = 3 closed-form route constant, calibrated against route A."""
    key = (space.m1, space.m2)
    if key in _ABEL_B_CONST:
        return _ABEL_B_CONST[key]
    if space.d != 3:
        raise ValueError("closed-form route is specific to d = 3")
    f = RadialFunction(space, lambda t: np.exp(-((t - 1.2) ** 2) * 2.0), label="cal")
    ts = np.linspace(0.0, 3.0, 13)
    a_route = abel_transform_horocyclic(space, f, ts)
    b_raw = abel_transform_sinh(space, f, ts, const=1.0)
    ratio = a_route / b_raw
    value = float(np.mean(ratio))
    if np.max(np.abs(ratio - value)) > 1e-6 * abs(value):
        raise RuntimeError("route constant not flat")
    _ABEL_B_CONST[key] = value
    return value


def fourier_of_even(g, lam, t_max=DEFAULT_T_MAX, n_panels=64, order=12):
    """Flat Fourier transform int_R g(|t|) e^(-i lam t) dt of an even
    function: 2 int_0^inf g cos(lam t) dt."""
    from .numerics import gauss_panels

    t, w = gauss_panels(0.0, t_max, n_panels, order)
    gv = g(t)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return 2.0 * (np.cos(np.outer(lam, t)) * (gv * w)[None, :]).sum(axis=1)


def slice_projection_defect(space, f, analysis, lam=None, route="horocyclic"):
    """Sup gap between the flat Fourier transform of the slice integral
    and the spherical transform, over a probe spectral window."""
    if lam is None:
        lam = np.linspace(0.1, 4.0, 23)
    fhat = analysis.forward(f)(lam)
    if route == "horocyclic":
        abel = lambda s: abel_transform_horocyclic(space, f, s, t_max=analysis.tgrid.bound)
    elif route == "sinh":
        abel = lambda s: abel_transform_sinh(space, f, s, t_max=analysis.tgrid.bound)
    else:
        raise ValueError(f"unknown route {route!r}")
    proj = fourier_of_even(abel, lam, t_max=analysis.tgrid.bound)
    scale = np.abs(fhat).max()
    return float(np.abs(proj - fhat).max() / max(scale, 1e-300))


@dataclass(frozen=True)
class AbelMappingReport:
    """Weighted mapping-property sample for the slice transform."""

    p: float
    r: float
    beta: float
    weighted_lhs: float
    source_norm: float

    @property
    def ratio(self):
        return self.weighted_lhs / max(self.source_norm, 1e-300)


def abel_mapping_check(space, f, p, r, beta, analysis=None, t_max=DEFAULT_T_MAX):
    """Weighted integrability check of the slice transform:
    (int |Af|^r e^(rho beta |t|) dt)^(1/r) against the L^p source norm.
    Valid for 1 <= r < 1/(2/p - 1) and 0 <= beta < (2/p - 1) r."""
    from .numerics import gauss_panels

    gamma_p = 2.0 / p - 1.0
    if not (1.0 < p < 2.0):
        raise ValueError("p must lie in (1, 2)")
    if not (1.0 <= r < 1.0 / gamma_p):
        raise ValueError("r out of the admissible window")
    if not (0.0 <= beta < gamma_p * r):
        raise ValueError("beta out of the admissible window")
    t, w = gauss_panels(0.0, t_max, 64, 10)
    av = abel_transform_horocyclic(space, f, t, t_max=t_max)
    lhs = (2.0 * np.sum(np.abs(av) ** r * np.exp(space.rho * beta * t) * w)) ** (1.0 / r)
    grid = analysis.tgrid if analysis is not None else None
    rhs = f.lp_norm(p, grid) if isinstance(f, RadialFunction) else RadialFunction(space, f).lp_norm(p, grid)
    return AbelMappingReport(p, r, beta, float(lhs), float(rhs))


# ---------------------------------------------------------------------------
# Boundary Fourier transform on the 2-d disc model


class DiscAnalysis:
    """Boundary Fourier transform context on the curvature -1 disc
    (d = 2 model): polar quadrature in (t, theta), boundary circle
    quadrature in beta.

    Intended for data supported well inside the radial window: the
    boundary factor has a branch point at each ring's closest approach
    to the boundary circle, so the angular trapezoid error scales like
    exp(-n_theta (1 - |z|)) and rings near the rim cannot be resolved.
    """

    def __init__(self, space, tgrid=None, lgrid=None, n_theta=256, n_boundary=64):
        if space.d != 2:
            raise ValueError("disc analysis needs d = 2")
        self.space = space
        self.tgrid = tgrid or time_grid(t_max=4.0, n_panels=12, order=8)
        self.lgrid = lgrid or spectral_grid(lam_max=14.0, n_panels=56, order=8)
        self.theta = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
        self.boundary = np.linspace(0.0, 2.0 * np.pi, n_boundary, endpoint=False)
        self.cf = CFunction(space)
        self.pl = self.cf.plancherel_density(self.lgrid.nodes)
        self.kappa = kappa_inv(space)
        # volume element: dvol = (1/2pi) Delta(t) dt dtheta in polar
        # coordinates z = tanh(t/2) e^(i theta)
        self.z = np.tanh(self.tgrid.nodes[:, None] / 2.0) * np.exp(1j * self.theta[None, :])
        self.wvol = (
            polar_density(space, self.tgrid.nodes)[:, None]
            * self.tgrid.weights[:, None]
            * (1.0 / self.theta.size)
        )

    def forward(self, f):
        """Boundary transform on the lam x boundary grid; f is a
        callable on complex disc points."""
        from .geometry import disc_bracket

        fv = f(self.z) * self.wvol
        rho = self.space.rho
        b = np.exp(1j * self.boundary)
        vals = np.empty((self.lgrid.size, self.boundary.size), dtype=complex)
        for j, bj in enumerate(b):
            br = disc_bracket(self.z, bj)
            for i, lam in enumerate(self.lgrid.nodes):
                vals[i, j] = np.sum(fv * np.exp((-1j * lam + rho) * br))
        return BoundaryFunction(self.lgrid, self.boundary, vals)

    def inverse(self, bf, points):
        """Synthesize at complex disc points from boundary data."""
        from .geometry import disc_bracket

        points = np.asarray(points, dtype=complex)
        flat = points.ravel()
        rho = self.space.rho
        b = np.exp(1j * self.boundary)
        acc = np.zeros(flat.shape, dtype=complex)
        for j, bj in enumerate(b):
            br = disc_bracket(flat, bj)
            kern = np.exp((1j * self.lgrid.nodes[:, None] + rho) * br[None, :])
            acc += (bf.values[:, j] * self.pl * self.lgrid.weights) @ kern
        return (self.kappa / self.boundary.size * acc).reshape(points.shape)

    def radial_collapse_defect(self, f_radial, analysis):
        """For radial data the boundary transform must not depend on the
        boundary point and must equal the spherical transform."""
        from .geometry import disc_distance

        bf = self.forward(lambda z: f_radial(disc_distance(z, 0.0)))
        spread = np.abs(bf.values - bf.values.mean(axis=1, keepdims=True)).max()
        fhat = analysis.forward(f_radial)(self.lgrid.nodes)
        gap = np.abs(bf.values.mean(axis=1) - fhat).max()
        scale = max(np.abs(fhat).max(), 1e-300)
        return float(spread / scale), float(gap / scale)
