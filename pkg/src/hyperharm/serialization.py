"""Shared on-disk formats: columnar CSV for gridded functions and
metrics, JSON descriptors and summaries.  Floats are written with repr
round-tripping so reruns with the same config are byte-identical."""

import csv
import json
import os

import numpy as np


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def save_function_csv(path, grid, values):
    """Columnar (grid, value-real, value-imag) CSV."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["grid", "value-real", "value-imag"])
        for g, v in zip(grid, values):
            wr.writerow([_fmt(g), _fmt(v.real), _fmt(v.imag)])


def load_function_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    body = np.array([[float(c) for c in r] for r in rows[1:]])
    return body[:, 0], body[:, 1] + 1j * body[:, 2]


def function_descriptor(path, space=None, grid_spec=None, constants=None):
    """JSON descriptor next to a function CSV: space parameters, grid
    layout, and any calibrated normalization constants."""
    desc = {
        "space": None if space is None else {"m1": space.m1, "m2": space.m2},
        "grid": grid_spec or {},
        "constants": {k: float(v) for k, v in (constants or {}).items()},
    }
    with open(path, "w") as fh:
        json.dump(desc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return desc


def report_json(path, claim, fitted_exponent, claimed_exponent, constant,
                passed, samples_path=None):
    """Decay/bound report: the claim, the fitted vs claimed exponent,
    the constant in front, and where the raw samples live."""
    rep = {
        "claim": claim,
        "fitted-exponent": float(fitted_exponent),
        "claimed-exponent": float(claimed_exponent),
        "constant": float(constant),
        "pass": bool(passed),
        "samples-path": samples_path,
    }
    with open(path, "w") as fh:
        json.dump(rep, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return rep


def weyl_data_json(wd):
    """WeylData as plain JSON matrix lists."""
    return {
        "rank": wd.rank,
        "label": wd.label,
        "matrices": [np.asarray(m).tolist() for m in wd.matrices],
        "rho": np.asarray(wd.rho_vec).tolist(),
        "positive-roots": [np.asarray(a).tolist() for a in wd.pos_roots],
    }


def weyl_data_from_json(d):
    from .weylred import WeylData

    return WeylData(int(d["rank"]),
                    tuple(np.array(m, dtype=float) for m in d["matrices"]),
                    np.array(d["rho"], dtype=float),
                    tuple(np.array(a, dtype=float) for a in d["positive-roots"]),
                    label=d.get("label", ""))


def save_metric_csv(out_dir, name, columns):
    """metric-<name>.csv with a header row; columns is an ordered
    {column-name: array} mapping."""
    path = os.path.join(out_dir, f"metric-{name}.csv")
    keys = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[k])) for k in keys]
    n = max(len(a) for a in arrays)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(keys)
        for i in range(n):
            wr.writerow([_fmt(a[i]) if i < len(a) else "" for a in arrays])
    return path


def save_summary(out_dir, suite, space, metrics):
    """summary.json in the fixed schema {suite, space, pass, metrics:
    [{name, value, tolerance, pass}]}."""
    summary = {
        "suite": suite,
        "space": {"m1": space.m1, "m2": space.m2},
        "pass": bool(all(m["pass"] for m in metrics)),
        "metrics": [
            {"name": m["name"], "value": float(m["value"]),
             "tolerance": float(m["tolerance"]), "pass": bool(m["pass"])}
            for m in metrics
        ],
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
