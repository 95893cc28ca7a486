"""Glue between result tables and the fitting machinery.

Extracts per-size (v, f, sigma) datasets from a curve table, applies the
high-velocity plateau exclusion, runs the shared-exponent fit, and
assembles the machine-readable fit summary document.
"""

from __future__ import annotations

import numpy as np

from . import __version__
from .errors import ParameterError, SchemaError
from .scaling import PowerLawFit, fit_global, master_curve, optimum, rescale
from .tables import Table

FIT_SUMMARY_SCHEMA = "fit-summary/1"
PLATEAU_MODES = ("energy_1d", "none")


def datasets_from_table(table: Table, observable: str = "delta_e",
                        plateau_mode: str = "energy_1d",
                        plateau_fraction: float = 0.8) -> dict:
    """size -> (v, f, sigma) arrays, cleaned for fitting.

    Rows with NaN entries (recorded failures) are dropped.  In
    'energy_1d' mode, points with f >= fraction * (L - 1) are treated as
    the high-velocity saturation plateau and excluded; the two-power-law
    form does not model saturation.
    """
    if plateau_mode not in PLATEAU_MODES:
        raise ParameterError(f"plateau_mode must be one of {PLATEAU_MODES}")
    mean_col = f"{observable}_mean"
    err_col = f"{observable}_stderr"
    if not table.has_column(mean_col) and \
            table.has_column(f"{observable}_phys_mean"):
        # device tables report physical-qubit observables under this name
        mean_col = f"{observable}_phys_mean"
        err_col = f"{observable}_phys_stderr"
    for col in ("L", "v", mean_col, err_col):
        if not table.has_column(col):
            raise SchemaError(f"table lacks required column {col!r}")
    L = table["L"]
    v = table["v"]
    f = table[mean_col]
    s = table[err_col]
    keep = ~(np.isnan(f) | np.isnan(s) | np.isnan(v))
    if plateau_mode == "energy_1d":
        keep &= f < plateau_fraction * (L - 1)
    out = {}
    for size in sorted(set(int(x) for x in L[keep])):
        m = keep & (L == size)
        vv, ff, ss = v[m], f[m], s[m]
        if np.all(ss == 0.0):
            ss = np.ones_like(ss)
        elif np.any(ss <= 0.0):
            raise ParameterError(
                f"size {size}: mix of zero and positive uncertainties")
        order = np.argsort(vv)
        out[size] = (vv[order], ff[order], ss[order])
    if not out:
        raise ParameterError("no usable rows after cleaning")
    return out


def fit_summary_document(fit: PowerLawFit, observable: str,
                         config_digest: str = "") -> dict:
    doc = {
        "schema": FIT_SUMMARY_SCHEMA,
        "generated_by": f"annealkit {__version__}",
        "config_digest": config_digest,
        "observable": observable,
        "alpha": fit.alpha,
        "alpha_error": fit.alpha_error,
        "beta": fit.beta,
        "beta_error": fit.beta_error,
        "chi_square": fit.chi_square,
        "dof": fit.dof,
        "n_points": fit.n_points,
        "degenerate": fit.degenerate,
        "message": fit.message,
        "per_size": [],
    }
    for j, size in enumerate(fit.sizes):
        opt = optimum(fit, size)
        doc["per_size"].append({
            "L": size,
            "a": float(fit.a[j]), "a_error": float(fit.a_error(size)),
            "b": float(fit.b[j]), "b_error": float(fit.b_error(size)),
            "v_min": opt.v_min, "v_min_error": opt.v_min_error,
            "f_min": opt.f_min, "f_min_error": opt.f_min_error,
        })
    return doc


def fit_table(table: Table, observable: str = "delta_e",
              plateau_mode: str = "energy_1d", plateau_fraction: float = 0.8,
              u_max: float | None = None, config_digest: str = "") -> tuple:
    """Fit a curve table; returns (fit, summary document, datasets).

    With u_max set, points beyond that rescaled velocity are dropped
    after a first fit pass and the fit repeats on the trimmed data
    (a second way to shed the high-velocity plateau).
    """
    datasets = datasets_from_table(table, observable, plateau_mode,
                                   plateau_fraction)
    fit = fit_global(datasets)
    if u_max is not None:
        if u_max <= 0:
            raise ParameterError("u_max must be positive")
        trimmed = {}
        for size, (v, f, s) in datasets.items():
            keep = v / optimum(fit, size).v_min <= u_max
            if keep.sum() >= 5:
                trimmed[size] = (v[keep], f[keep], s[keep])
        if trimmed:
            datasets = trimmed
            fit = fit_global(datasets)
    doc = fit_summary_document(fit, observable, config_digest)
    return fit, doc, datasets


def rescaled_rows(fit: PowerLawFit, datasets: dict):
    """(L, v, u, g, g_err) rows collapsing every dataset."""
    rows = []
    for size, (v, f, s) in datasets.items():
        opt = optimum(fit, size)
        u, g = rescale(v, f, opt.v_min, opt.f_min)
        for k in range(len(u)):
            rows.append((size, v[k], u[k], g[k], s[k] / opt.f_min))
    return rows


def master_curve_rows(fit: PowerLawFit, datasets: dict, n: int = 200):
    """(u, g) samples of the fitted master curve spanning the data."""
    us = []
    for size, (v, _, _) in datasets.items():
        opt = optimum(fit, size)
        us.append(v / opt.v_min)
    u_all = np.concatenate(us)
    grid = np.logspace(np.log10(u_all.min() / 2), np.log10(u_all.max() * 2), n)
    g = master_curve(grid, fit.alpha, fit.beta)
    return list(zip(grid, g))
