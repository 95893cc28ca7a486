"""Ensembles of annealing runs over an (L, v) grid with binned errors.

Each grid point runs n_realizations independent noise realizations of
the chain anneal (T = 1/v), averages the residual energy, and estimates
the standard error by data binning.  Per-realization seeds derive from
(master_seed, L, v, realization, site), so results are reproducible and
independent of execution order or worker count.  Completed points are
appended to the output table immediately and skipped on restart.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import __version__
from .errors import IntegrationAbort, ParameterError, SchemaError
from .fermion import (ChainSpec, bdg_matrices, correlations, evolve,
                      ground_state, residual_energy)
from .noise import NoiseSpectrum, sample_signal
from .tables import append_row, read_table

NOISE_MODES = ("all", "single", "none")
CURVE_COLUMNS = ("L", "v", "delta_e_mean", "delta_e_stderr", "n_real", "n_bins")
CURVE_SCHEMA = "ensemble-curve/1"
SWEEP_STREAM_TAG = "sweep"


def default_velocity_grid(L: int, count: int = 20) -> tuple:
    """Log-spaced window shifted down with size (minima move left).

    The lower edge tracks the finite-size crossover 2/L^2, where the
    quasi-adiabatic branch turns over.
    """
    lo = 2.0 / L ** 2
    return tuple(np.logspace(np.log10(lo), np.log10(0.5), count))


@dataclass(frozen=True)
class SweepPlan:
    """Grid specification; velocities=None means the per-size default."""

    sizes: tuple
    velocities: Optional[tuple] = None
    n_realizations: int = 100
    noise_mode: str = "all"
    single_site: int = 0
    spectrum: NoiseSpectrum = field(default_factory=NoiseSpectrum)
    master_seed: int = 1
    rtol: float = 1e-8
    atol: float = 1e-10
    n_bins: int = 20

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if self.velocities is not None:
            object.__setattr__(self, "velocities",
                               tuple(float(v) for v in self.velocities))
        if self.noise_mode not in NOISE_MODES:
            raise ParameterError(f"noise_mode must be one of {NOISE_MODES}")
        if any(s < 2 for s in self.sizes):
            raise ParameterError("all sizes must be >= 2")
        if self.velocities is not None:
            vs = self.velocities
            if any(v <= 0 for v in vs) or list(vs) != sorted(vs):
                raise ParameterError(
                    "velocities must be positive and sorted ascending")
        if self.n_realizations < 1:
            raise ParameterError("n_realizations must be >= 1")
        if self.noise_mode != "none" and self.n_realizations < 100:
            raise ParameterError("noisy sweeps need n_realizations >= 100 "
                                 "for meaningful binned error bars")
        if self.noise_mode == "single" and self.single_site < 0:
            raise ParameterError("single_site must be a valid site index")

    def velocities_for(self, L: int) -> tuple:
        if self.velocities is not None:
            return self.velocities
        return default_velocity_grid(L)

    def digest(self) -> str:
        doc = {
            "sizes": list(self.sizes),
            "velocities": ("auto" if self.velocities is None
                           else [repr(v) for v in self.velocities]),
            "n_realizations": self.n_realizations,
            "noise_mode": self.noise_mode,
            "single_site": self.single_site,
            "spectrum": [self.spectrum.p, self.spectrum.omega0,
                         self.spectrum.coupling, self.spectrum.n_modes],
            "master_seed": self.master_seed,
            "rtol": self.rtol,
            "atol": self.atol,
            "n_bins": self.n_bins,
        }
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


class PointRow(NamedTuple):
    L: int
    v: float
    delta_e_mean: float
    delta_e_stderr: float
    n_real: int
    n_bins: int


@dataclass
class SweepResult:
    rows: list
    failures: list  # [(L, v, message)]

    @property
    def complete(self) -> bool:
        return not self.failures


def build_chain(plan: SweepPlan, L: int, v: float, realization: int) -> ChainSpec:
    """Chain with the realization's noise signals attached per noise_mode."""
    if plan.noise_mode == "none":
        return ChainSpec(size=L)
    if plan.noise_mode == "single":
        site = plan.single_site
        if site >= L:
            raise ParameterError(f"single_site {site} outside chain of {L}")
        noisy_sites = [site]
    else:
        noisy_sites = range(L)
    signals = [None] * L
    for site in noisy_sites:
        signals[site] = sample_signal(
            plan.spectrum,
            (plan.master_seed, SWEEP_STREAM_TAG, L, float(v), realization, site))
    return ChainSpec(size=L, coupling=plan.spectrum.coupling,
                     signals=tuple(signals))


def _one_realization(plan: SweepPlan, L: int, v: float, r: int) -> float:
    chain = build_chain(plan, L, v, r)
    modes = ground_state(*bdg_matrices(chain, 0.0, 0.0))
    final = evolve(modes, chain, T=1.0 / v, rtol=plan.rtol, atol=plan.atol)
    return residual_energy(correlations(final))


def bin_stats(values: np.ndarray, n_bins_target: int):
    """Mean and binned standard error; bins equal to within one sample."""
    n = len(values)
    if n == 1:
        return float(values[0]), 0.0, 1
    n_bins = min(n_bins_target, n)
    edges = np.linspace(0, n, n_bins + 1).astype(int)
    bin_means = np.array([values[a:b].mean() for a, b in zip(edges[:-1], edges[1:])])
    stderr = float(bin_means.std(ddof=1) / math.sqrt(n_bins))
    return float(values.mean()), stderr, n_bins


def run_point(L: int, v: float, plan: SweepPlan, workers: int = 1) -> PointRow:
    """Ensemble mean and binned error at one grid point (T = 1/v)."""
    n_real = 1 if plan.noise_mode == "none" else plan.n_realizations
    energies = np.empty(n_real)
    try:
        if workers > 1 and n_real > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for r, e in enumerate(pool.map(_one_realization,
                                               [plan] * n_real, [L] * n_real,
                                               [v] * n_real, range(n_real),
                                               chunksize=4)):
                    energies[r] = e
        else:
            for r in range(n_real):
                energies[r] = _one_realization(plan, L, v, r)
    except IntegrationAbort as exc:
        raise IntegrationAbort(f"point (L={L}, v={v}) failed: {exc}",
                               t=exc.t, step=exc.step) from exc
    if n_real == 1:
        return PointRow(L, v, float(energies[0]), 0.0, 1, 1)
    mean, stderr, n_bins = bin_stats(energies, plan.n_bins)
    return PointRow(L, v, mean, stderr, n_real, n_bins)


def _table_meta(plan: SweepPlan, extra: Optional[dict] = None) -> dict:
    meta = {"schema": CURVE_SCHEMA,
            "generated_by": f"annealkit {__version__}",
            "plan_digest": plan.digest()}
    meta.update(extra or {})
    return meta


def _load_completed(path, plan: SweepPlan) -> dict:
    if not path or not os.path.exists(path):
        return {}
    table = read_table(path)
    digest = table.meta.get("plan_digest")
    if digest != plan.digest():
        raise SchemaError(
            f"{path} was produced by a different plan (digest {digest}, "
            f"expected {plan.digest()}); refusing to resume")
    done = {}
    for row in table.rows():
        key = (int(row[0]), repr(float(row[1])))
        done[key] = PointRow(int(row[0]), float(row[1]), row[2], row[3],
                             int(row[4]), int(row[5]))
    return done


def run_sweep(plan: SweepPlan, out_path=None, workers: int = 1,
              progress=None, meta: Optional[dict] = None) -> SweepResult:
    """Run the grid, resuming from and appending to out_path if given.

    Failed points are recorded as NaN rows and the sweep continues.
    Velocities run highest-first so cheap points land early.
    """
    done = _load_completed(out_path, plan)
    table_meta = _table_meta(plan, meta)
    rows, failures = [], []
    for L in plan.sizes:
        for v in sorted(plan.velocities_for(L), reverse=True):
            key = (L, repr(v))
            if key in done:
                row = done[key]
                if math.isnan(row.delta_e_mean):
                    failures.append((L, v, "recorded failure (resumed)"))
                rows.append(row)
                continue
            try:
                row = run_point(L, v, plan, workers=workers)
            except IntegrationAbort as exc:
                failures.append((L, v, str(exc)))
                row = PointRow(L, v, float("nan"), float("nan"),
                               0, 0)
            rows.append(row)
            if out_path:
                append_row(out_path, CURVE_COLUMNS, row, table_meta)
            if progress is not None:
                progress(row)
    rows.sort(key=lambda r: (r.L, r.v))
    return SweepResult(rows=rows, failures=failures)
