"""Shared numerical utilities: panel quadrature, finite differences,
smooth cutoffs, envelope fits.

Everything here is deterministic: fixed-order quadrature, fixed stencils.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss


def gauss_panels(a, b, n_panels, order, grading=1.0):
    """Composite Gauss-Legendre rule on [a, b].

    Parameters
    ----------
    a, b : float
        Interval endpoints, a < b.
    n_panels : int
        Number of sub-panels.
    order : int
        Gauss-Legendre order per panel.
    grading : float
        Panel edges follow u**grading; grading > 1 concentrates panels
        near ``a``.

    Returns
    -------
    nodes, weights : ndarray
        Flat arrays, len = n_panels * order.
    """
    u = np.linspace(0.0, 1.0, n_panels + 1) ** grading
    edges = a + (b - a) * u
    x0, w0 = leggauss(order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


# Central stencils: {deriv order: (offsets, coefficients, h power)}.
_STENCILS = {
    1: (np.arange(-2, 3), np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0),
    2: (np.arange(-2, 3), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
    3: (np.arange(-3, 4), np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0),
    4: (np.arange(-3, 4), np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0),
}


def central_derivative(f, x, n, h, direction=1.0):
    """n-th derivative of callable f at points x by 4th-order central
    differences with step h (scalar or per-point array).

    ``direction`` multiplies the step; pass 1j to differentiate along the
    imaginary axis of a holomorphic evaluator.
    """
    if n == 0:
        return f(np.asarray(x))
    offsets, coeffs = _STENCILS[n]
    x = np.asarray(x)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape)
    pts = x[..., None] + offsets * (h[..., None] * direction)
    vals = f(pts.ravel()).reshape(pts.shape)
    return (vals @ coeffs) / (h * direction) ** n


def fit_loglog(x, y, floor=0.0):
    """Least-squares slope/intercept of log y against log x.

    Points with y <= floor are dropped.  Returns (slope, intercept,
    n_used).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > floor
    if keep.sum() < 2:
        return np.nan, np.nan, int(keep.sum())
    lx, ly = np.log(x[keep]), np.log(y[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    return slope, intercept, int(keep.sum())


def fit_exp_profile(r, y):
    """Fit log|y| = a - c*r - m*log(r).  Returns (c, m, a)."""
    r = np.asarray(r, dtype=float)
    y = np.abs(np.asarray(y))
    keep = y > 0
    A = np.column_stack([np.ones(keep.sum()), -r[keep], -np.log(r[keep])])
    sol, *_ = np.linalg.lstsq(A, np.log(y[keep]), rcond=None)
    a, c, m = sol
    return c, m, a


def smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly increasing
    in between.  Vectorized."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    ga = np.exp(-1.0 / um)
    gb = np.exp(-1.0 / (1.0 - um))
    out[mid] = ga / (ga + gb)
    if np.ndim(u) == 0:
        return float(out)
    return out


def richardson_zero(eps_values, samples):
    """Extrapolate samples(eps) to eps -> 0 through a polynomial that
    interpolates all supplied points (Vandermonde solve).  samples may
    have extra leading axes; extrapolation runs along the last axis."""
    eps_values = np.asarray(eps_values, dtype=float)
    samples = np.asarray(samples)
    V = np.vander(eps_values, increasing=True)  # columns 1, eps, eps^2, ...
    coeffs = np.linalg.solve(V, np.moveaxis(samples, -1, 0).reshape(len(eps_values), -1))
    out = coeffs[0].reshape(samples.shape[:-1])
    if out.ndim == 0:
        return out[()]
    return out


def relative_error(a, b, floor=0.0):
    """|a - b| / max(|b|, floor), elementwise."""
    a = np.asarray(a)
    b = np.asarray(b)
    denom = np.maximum(np.abs(b), floor)
    return np.abs(a - b) / np.where(denom > 0, denom, 1.0)
