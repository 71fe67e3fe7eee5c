"""Named verification suites behind the CLI.

Each suite runs a deterministic battery on one space and returns
(metrics, artifacts): metrics are {name, value, tolerance, pass} rows
for summary.json, artifacts are {name: ordered column dict} tables for
metric-<name>.csv files.  All randomness is seeded from the config, and
quadrature sizes are fixed by the config grids, so outputs are
bit-identical across runs.
"""

from dataclasses import dataclass, field

import numpy as np

from . import psdo, transforms, weylred
from .geometry import (ball_volume_cartan, ball_volume_horocyclic,
                       horocycle_weight_integral, log_polar_density, make_space,
                       make_strip, polar_density_log_derivative)
from .numerics import central_derivative
from .spherical import local_bessel_certificate, phi_table, spherical_property_suite


class ConfigError(ValueError):
    """Invalid run configuration; message carries the field path."""


_GRID_DEFAULTS = {
    "T_max": 8.0,
    "t_points": 13,
    "lam_max": 30.0,
    "lam_points": 40,
    "n_family": 10,
    "rank2": True,
}

_SEED_DEFAULTS = {"family": 2024, "probe": 0}

SUITE_NAMES = ("spherical-verify", "transform-verify", "kernel-verify",
               "transference", "complex-reduce", "norm-lab", "geometry-verify")


@dataclass
class RunConfig:
    space: object
    suite: str
    p: float = 1.5
    grids: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    out_dir: str = "out"
    lam_scale: float = 1.0
    translate: object = None
    pairs: int = 3
    sweep: dict = field(default_factory=dict)

    def grid(self, key):
        return self.grids.get(key, _GRID_DEFAULTS[key])

    def seed(self, key):
        return self.seeds.get(key, _SEED_DEFAULTS[key])


def _norm_key(k):
    return k.replace("-", "_").replace("Λ", "lam_max").replace("λ", "lam")


def parse_config(raw):
    """Validate a JSON config dict into a RunConfig; raises ConfigError
    with the offending field path."""
    if not isinstance(raw, dict):
        raise ConfigError("config: must be a JSON object")
    d = {_norm_key(k): v for k, v in raw.items()}
    if "space" not in d:
        raise ConfigError("space: required")
    sp = d["space"]
    if (not isinstance(sp, (list, tuple)) or len(sp) != 2
            or not all(isinstance(v, int) for v in sp)):
        raise ConfigError("space: expected [m1, m2] integers")
    try:
        space = make_space(sp[0], sp[1])
    except Exception as exc:
        raise ConfigError(f"space: {exc}") from exc
    suite = d.get("suite")
    if suite not in SUITE_NAMES:
        raise ConfigError(f"suite: unknown suite {suite!r}; expected one of {SUITE_NAMES}")
    p = d.get("p", 1.5)
    if not isinstance(p, (int, float)) or not 1.0 < p <= 2.0:
        raise ConfigError("p: must be a number in (1, 2]")
    grids = {_norm_key(k): v for k, v in d.get("grids", {}).items()}
    for k, v in grids.items():
        if k not in _GRID_DEFAULTS:
            raise ConfigError(f"grids.{k}: unknown grid key")
        if k == "rank2":
            if not isinstance(v, bool):
                raise ConfigError("grids.rank2: must be a boolean")
        elif not isinstance(v, (int, float)) or v <= 0:
            raise ConfigError(f"grids.{k}: must be a positive number")
    seeds = {_norm_key(k): v for k, v in d.get("seeds", {}).items()}
    for k, v in seeds.items():
        if k not in _SEED_DEFAULTS or not isinstance(v, int):
            raise ConfigError(f"seeds.{k}: must be an integer seed (family/probe)")
    cfg = RunConfig(space=space, suite=suite, p=float(p), grids=grids, seeds=seeds,
                    out_dir=d.get("output_dir", "out"),
                    lam_scale=float(d.get("lam_scale", 1.0)),
                    translate=d.get("translate"),
                    pairs=int(d.get("pairs", 3)),
                    sweep={_norm_key(k): v for k, v in d.get("sweep", {}).items()})
    if cfg.suite == "kernel-verify" and space.d not in (2, 3):
        raise ConfigError("suite: kernel-verify runs on d = 2 or d = 3 spaces")
    if cfg.suite == "complex-reduce" and (space.m1, space.m2) != (2, 0):
        raise ConfigError("suite: complex-reduce needs the even-multiplicity space (2, 0)")
    return cfg


def _metric(name, value, tolerance, passed):
    return {"name": name, "value": float(value), "tolerance": float(tolerance),
            "pass": bool(passed)}


def _bounded(name, value, tol):
    return _metric(name, value, tol, np.isfinite(value) and value <= tol)


def _mihlin(scale=1.0):
    def m(lam):
        z = scale * lam
        return z * z / (1.0 + z * z)
    return m


# ---------------------------------------------------------------------------
# suites


def geometry_verify(cfg):
    space = cfg.space
    t = np.linspace(0.3, cfg.grid("T_max"), int(cfg.grid("t_points")))
    fd = np.array([central_derivative(lambda u: log_polar_density(space, u), tv, 1, 1e-3)
                   for tv in t])
    metrics = [_bounded("density-log-derivative",
                        np.abs(fd - polar_density_log_derivative(space, t)).max(), 1e-8)]
    artifacts = {}

    R_list = np.array([0.5, 1.0, 2.0, 3.0])
    vc = np.array([ball_volume_cartan(space, R) for R in R_list])
    if space.m2 == 0:
        vh_raw = np.array([ball_volume_horocyclic(space, R) for R in R_list])
        kappa = vc[1] / vh_raw[1]
        gap = np.abs(kappa * vh_raw / vc - 1.0).max()
        metrics.append(_bounded("ball-volume-route-gap", gap, 1e-8))
        artifacts["ball-volumes"] = {"R": R_list, "cartan": vc, "horocyclic": kappa * vh_raw}
    else:
        artifacts["ball-volumes"] = {"R": R_list, "cartan": vc}
    # small balls are flat: Delta(t) ~ (2t)^(m1+m2) 2^m2, so
    # V(R) -> 2^(m1+2 m2) R^d / d
    flat = 2.0 ** (space.m1 + 2 * space.m2) * 1e-2 ** space.d / space.d
    ratio = ball_volume_cartan(space, 1e-2) / flat
    metrics.append(_bounded("ball-volume-flat-limit", abs(ratio - 1.0), 1e-3))

    # the internal tail bound needs a healthy decay margin, hence the
    # large eps0 probes
    w = [horocycle_weight_integral(space, e, tol=1e-4) for e in (3.0, 4.0, 6.0)]
    metrics.append(_bounded("horocycle-weight-monotone",
                            max(w[1] - w[0], w[2] - w[1], 0.0), 1e-12))

    strip = make_strip(space, cfg.p)
    inside = strip.contains(1.0 + 0.999j * strip.width) if strip.width > 0 else True
    outside = not strip.contains(1.0 + 1.001j * strip.width) if strip.width > 0 else True
    metrics.append(_metric("strip-membership", 0.0 if (inside and outside) else 1.0,
                           0.5, inside and outside))
    return metrics, artifacts


def spherical_verify(cfg):
    space = cfg.space
    res = spherical_property_suite(space, seed=cfg.seed("probe"),
                                   n_samples=int(cfg.grid("lam_points")))
    metrics = [_metric(name.replace("_", "-"), r["max_err"], r["tol"], r["passed"])
               for name, r in res.items()]
    if (space.m1, space.m2) in ((1, 0), (4, 0)):
        cert = local_bessel_certificate(space)
        metrics.append(_metric("bessel-t-slope-dev", abs(cert.t_slope - 2.0), 0.1,
                               abs(cert.t_slope - 2.0) <= 0.1))
    lam = np.linspace(0.5, cfg.grid("lam_max"), 12)
    tt = np.linspace(1.0, cfg.grid("T_max"), 9)
    gap = np.abs(phi_table(space, lam, tt, method="hc")
                 - phi_table(space, lam, tt, method="ode"))
    artifacts = {"ode-vs-hc": {"lam": lam, "max-residual": gap.max(axis=1)}}
    return metrics, artifacts


def transform_verify(cfg):
    space = cfg.space
    analysis = psdo.get_analysis(space)
    fam = transforms.function_family(space, analysis, n=int(cfg.grid("n_family")),
                                     seed=cfg.seed("family"))
    tn = analysis.tgrid.nodes
    wts = analysis.density * analysis.tgrid.weights
    errs = []
    for f in fam:
        back = analysis.inverse(analysis.forward(f).values)
        fv = f(tn)
        num = np.sqrt(np.sum(np.abs(back(tn) - fv) ** 2 * wts))
        errs.append(num / np.sqrt(np.sum(np.abs(fv) ** 2 * wts)))
    errs = np.array(errs)
    metrics = [_bounded("roundtrip-rel-l2", errs.max(), 1e-6)]
    artifacts = {"roundtrip": {"member": np.arange(len(fam)), "rel-l2": errs}}
    if space.m2 == 0:
        d0 = transforms.slice_projection_defect(space, fam[0], analysis, route="horocyclic")
        metrics.append(_bounded("slice-projection-horocyclic", d0, 1e-6))
    if (space.m1, space.m2) == (2, 0):
        d1 = transforms.slice_projection_defect(space, fam[0], analysis, route="sinh")
        metrics.append(_bounded("slice-projection-sinh", d1, 1e-6))
        t = np.linspace(0.0, 6.0, 25)
        ah = transforms.abel_transform_horocyclic(space, fam[0], t)
        asym = transforms.abel_transform_sinh(space, fam[0], t)
        gap = np.abs(ah - asym).max() / np.abs(ah).max()
        metrics.append(_bounded("abel-route-gap", gap, 1e-6))
        artifacts["abel-routes"] = {"t": t, "horocyclic": ah, "sinh": asym}
    return metrics, artifacts


def kernel_verify(cfg):
    space = cfg.space
    sigma = psdo.multiplier_space_symbol(space, _mihlin(cfg.lam_scale), label="mihlin")
    es = psdo.separate_kernel(sigma)
    spread = es.dominator_constants.max() / es.dominator_constants.min()
    slope_target = space.d - 1.0
    metrics = [
        _bounded("dominator-spread", spread, 2.0),
        _bounded("zeta0-origin-slope-dev", abs(es.zeta0_origin_slope - slope_target), 0.2),
        _bounded("zeta0-integral", es.zeta0_integral, 10.0),
    ]
    # multipliers have no position dependence, so the extracted flat
    # symbol must be exactly s-independent
    az = psdo.extract_az(es, 0)
    y = np.array([0.5, 1.0, 2.0])
    gap = np.abs(az(0.3, y) - az(1.0, y)).max()
    metrics.append(_bounded("flat-symbol-s-independence", gap, 1e-10))
    artifacts = {"zeta-profile": {"t": es.t_grid, "zeta0": es.zeta0}}
    if space.d == 3:
        prof = psdo.global_kernel_profile(sigma, cfg.p)
        metrics.append(_metric("kernel-decay-rate", prof.exp_rate,
                               prof.target_rate - 0.1, prof.passed))
        artifacts["kernel-profile"] = {"r": np.array(prof.r), "abs-kernel": np.array(prof.values)}
    else:
        hb = psdo.h_chain_bounds(es, 0)
        worst = max(v for pair in hb.values() for v in pair) if isinstance(hb, dict) \
            else float(np.max(hb))
        metrics.append(_bounded("h-chain-max-constant", worst, 1e4))
    return metrics, artifacts


def transference(cfg):
    space = cfg.space
    analysis = psdo.get_analysis(space)
    fam = transforms.function_family(space, analysis, n=max(int(cfg.grid("n_family")), cfg.pairs),
                                     seed=cfg.seed("family"))
    sigs = [
        psdo.multiplier_space_symbol(space, _mihlin(cfg.lam_scale), label="mihlin"),
        psdo.SpaceSymbol(space, lambda s, lam: np.exp(-(cfg.lam_scale * lam) ** 2)
                         * (1.0 + 0.3 * np.exp(-np.real(s) ** 2)), label="s-dependent"),
    ]
    worst = 0.0
    table = None
    for k in range(cfg.pairs):
        sig = sigs[k % len(sigs)]
        f = fam[k]
        nodes, lhs, rhs, gap, scale = psdo.transference_check(sig, f, analysis)
        worst = max(worst, gap / scale)
        if table is None:
            sel = (nodes >= 2.0) & (nodes <= 6.0)
            table = {"t": nodes[sel], "lhs": lhs[sel].real, "rhs": rhs[sel].real,
                     "abs-residual": np.abs(lhs[sel] - rhs[sel])}
    slope = psdo.transference_truncation_slope(sigs[0], fam[0], analysis)
    metrics = [
        _bounded("flat-side-rel-gap", worst, 1e-4),
        _metric("truncation-slope-dev", abs(slope + 2.0), 0.3, abs(slope + 2.0) <= 0.3),
    ]
    return metrics, {"residual-table": table}


def complex_reduce(cfg):
    w1 = weylred.weyl_rank1()
    space = cfg.space
    f0 = lambda t: np.exp(-np.asarray(t) ** 2 / 2.0)
    g0 = weylred.reduce(w1, f0)
    pts = np.linspace(-4.0, 4.0, 33).reshape(-1, 1)
    metrics = [
        _bounded("flattened-antisymmetry", weylred.antisymmetry_defect(w1, g0, pts), 1e-10),
        _bounded("fourier-antisymmetry", weylred.fourier_antisymmetry_defect(w1, g0), 1e-10),
    ]
    # closed-form eigenfunctions against the series/ODE route
    lam = np.linspace(0.3, 6.0, 9)
    tt = np.linspace(0.05, 6.0, 23)
    tab = weylred.phi_lambda_complex(w1, lam, tt)
    metrics.append(_bounded("rank1-eigenfunction-gap",
                            np.abs(tab - phi_table(space, lam, tt)).max(), 1e-6))
    # transform identity fhat = c |W| F g
    lamq = np.array([0.4, 0.9, 1.7, 2.6, 4.0])
    fhat = weylred.spherical_transform_complex(w1, f0, lamq)
    ident = weylred.c_weyl(w1, lamq) * w1.order * weylred.flat_transform(w1, g0, lamq)
    metrics.append(_bounded("transform-identity-drift",
                            np.abs(fhat / ident - 1.0).max(), 1e-6))
    # kappa drift across pairs
    pair_sigs = [
        weylred.ComplexSymbol(w1, lambda H, lam: np.exp(-np.asarray(lam) ** 2)
                              * (1.0 + 0.2 * np.cos(np.asarray(H)))),
        weylred.ComplexSymbol(w1, lambda H, lam: 1.0 / (1.0 + np.asarray(lam) ** 2)
                              + 0 * np.asarray(H)),
        weylred.ComplexSymbol(w1, lambda H, lam: np.cos(np.asarray(lam))
                              * np.exp(-0.5 * np.asarray(lam) ** 2)
                              * np.exp(-0.1 * np.asarray(H) ** 2)),
    ]
    pair_fs = [
        lambda t: np.exp(-np.asarray(t) ** 2 / 2.0),
        lambda t: np.exp(-np.asarray(t) ** 2 / 1.5) * np.cos(0.7 * np.asarray(t)),
        lambda t: np.exp(-0.8 * np.asarray(t) ** 2) * (1.0 + 0.3 * np.asarray(t) ** 2),
    ]
    probe = np.linspace(0.4, 3.0, 9).reshape(-1, 1)
    kws = []
    for k in range(min(cfg.pairs, len(pair_sigs))):
        r1 = weylred.psi_spectral(w1, pair_sigs[k], pair_fs[k], probe)
        r2 = weylred.psi_reduced(w1, pair_sigs[k], pair_fs[k], probe)
        kws.append(float(np.mean(np.real(r1) / np.real(r2))))
    kws = np.array(kws)
    drift = np.abs(kws - kws.mean()).max() / kws.mean()
    metrics.append(_bounded("kappa-drift-rank1", drift, 1e-6))
    artifacts = {"kappa-pairs": {"pair": np.arange(len(kws)), "kappa": kws}}

    if cfg.grid("rank2"):
        w2 = weylred.weyl_a2()
        rng = np.random.default_rng(cfg.seed("probe"))
        pts2 = rng.uniform(-3.0, 3.0, (30, 2))
        g2 = weylred.reduce(w2, lambda H: np.exp(-np.sum(np.asarray(H) ** 2, axis=-1) / 2.0))
        metrics.append(_bounded("a2-flattened-antisymmetry",
                                weylred.antisymmetry_defect(w2, g2, pts2), 1e-10))
        sub = pts2[np.abs(weylred._wall_distance(w2, pts2)).min(axis=1) > 0.35][:8]
        a2_pairs = [
            (weylred.ComplexSymbol(w2, lambda H, lam: np.exp(-np.sum(np.asarray(lam) ** 2, axis=-1))
                                   * (1.0 + 0.2 * np.exp(-np.sum(np.asarray(H) ** 2, axis=-1)))),
             lambda H: np.exp(-np.sum(np.asarray(H) ** 2, axis=-1) / 2.0)),
            (weylred.ComplexSymbol(w2, lambda H, lam: np.exp(-0.7 * np.sum(np.asarray(lam) ** 2, axis=-1))),
             lambda H: np.exp(-0.8 * np.sum(np.asarray(H) ** 2, axis=-1))),
        ]
        kws2 = []
        for sig, f in a2_pairs:
            r1 = weylred.psi_spectral(w2, sig, f, sub)
            r2 = weylred.psi_reduced(w2, sig, f, sub, n=64 * 64, half_width=6.0)
            kws2.append(float(np.median(np.real(r1) / np.real(r2))))
        kws2 = np.array(kws2)
        metrics.append(_bounded("kappa-drift-a2",
                                np.abs(kws2 - kws2.mean()).max() / kws2.mean(), 1e-4))
        artifacts["kappa-pairs-a2"] = {"pair": np.arange(len(kws2)), "kappa": kws2}
    return metrics, artifacts


def norm_lab_suite(cfg):
    space = cfg.space
    analysis = psdo.get_analysis(space)
    fam = transforms.function_family(space, analysis, n=int(cfg.grid("n_family")),
                                     seed=cfg.seed("family"))
    mih = _mihlin(cfg.lam_scale)
    sigma = psdo.multiplier_space_symbol(space, mih, label="mihlin")
    contrast = psdo.SpaceSymbol(space, lambda s, lam: (1.0 + 0.4 * np.real(s)) * mih(lam),
                                label="grow-contrast")
    artifacts = {}
    if cfg.translate is not None:
        # single-translate point (sweep mode): ratio of each symbol on
        # the translate of the first family member
        tau = float(cfg.translate)
        base_spec = analysis.forward(fam[0]).values
        spec = base_spec * np.cos(analysis.lgrid.nodes * tau)
        f_tau = analysis.inverse(spec, label=f"translate[{tau}]")
        fn = f_tau.lp_norm(cfg.p)
        rc = psdo.apply_radial_psdo(sigma, f_tau, analysis).lp_norm(cfg.p) / fn
        rg = psdo.apply_radial_psdo(contrast, f_tau, analysis).lp_norm(cfg.p) / fn
        artifacts["translate-ratios"] = {
            "tau": np.array([tau]),
            "ratio-compliant": np.array([rc]),
            "ratio-contrast": np.array([rg]),
        }
        # informational values for the sweep table; bounded by the
        # coarse cap only
        return [_metric("compliant-ratio", rc, 1e9, rc < 1e9),
                _metric("contrast-ratio", rg, 1e9, rg < 1e9)], artifacts

    rep = psdo.norm_lab(sigma, cfg.p, fam, analysis)
    rep_c = psdo.norm_lab(contrast, cfg.p, fam, analysis)
    metrics = [_bounded("max-family-ratio", rep.max_ratio, 3.0)]
    pinned_default = ((space.m1, space.m2) == (2, 0) and cfg.p == 1.5
                      and cfg.lam_scale == 1.0 and int(cfg.grid("n_family")) == 10)
    if pinned_default:
        # frozen from this construction: mihlin multiplier, 10-member
        # family with seed 2024, p = 1.5
        metrics.append(_bounded("pinned-ratio-dev",
                                abs(rep.max_ratio - 0.9469799586) / 0.9469799586, 0.02))
    metrics.append(_bounded("compliant-trend-slope", abs(rep.trend_slope), 0.05))
    metrics.append(_bounded("compliant-spearman", abs(rep.spearman), 0.9))
    metrics.append(_metric("contrast-spearman", rep_c.spearman, 0.9,
                           rep_c.spearman >= 0.9))
    artifacts["translate-ratios"] = {
        "tau": np.array(rep.taus),
        "ratio-compliant": np.array(rep.translate_ratios),
        "ratio-contrast": np.array(rep_c.translate_ratios),
    }
    return metrics, artifacts


SUITES = {
    "geometry-verify": geometry_verify,
    "spherical-verify": spherical_verify,
    "transform-verify": transform_verify,
    "kernel-verify": kernel_verify,
    "transference": transference,
    "complex-reduce": complex_reduce,
    "norm-lab": norm_lab_suite,
}


def run_suite(cfg):
    """Execute the configured suite; returns (metrics, artifacts)."""
    return SUITES[cfg.suite](cfg)
