"""Command-line entry point.

Verbs: simulate, qubit, fit, collapse, kzm, embed, decode, aggregate,
oracle-check.  A JSON configuration file drives each verb; --set
key=value flags override individual keys, and ANNEALKIT_WORKERS /
ANNEALKIT_OUTPUT_DIR override the worker count and output directory.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 partial results.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analysis import (FIT_SUMMARY_SCHEMA, fit_summary_document, fit_table,
                       master_curve_rows, rescaled_rows)
from .config import (apply_override, config_digest, load_config,
                     validate_config)
from .errors import (ConfigError, FitConvergenceError, HorizonError,
                     IntegrationAbort, ParameterError, SchemaError)
from .noise import NoiseSpectrum, sample_signal
from .tables import append_row, read_table, write_table

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_PARTIAL = 3


def _effective_config(args) -> tuple:
    doc = load_config(args.config) if args.config else validate_config({})
    if "ANNEALKIT_WORKERS" in os.environ:
        doc["workers"] = int(os.environ["ANNEALKIT_WORKERS"])
    if "ANNEALKIT_OUTPUT_DIR" in os.environ:
        doc["output_dir"] = os.environ["ANNEALKIT_OUTPUT_DIR"]
    for assignment in args.set or []:
        apply_override(doc, assignment)
    if getattr(args, "output_dir", None):
        doc["output_dir"] = args.output_dir
    if getattr(args, "workers", None):
        doc["workers"] = args.workers
    if getattr(args, "master_seed", None) is not None:
        doc["master_seed"] = args.master_seed
    doc = validate_config(doc)
    return doc, config_digest(doc)


def _outpath(doc: dict, name: str) -> str:
    directory = doc.get("output_dir", ".")
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


def _sidecar(path: str, payload: dict) -> None:
    payload = dict(payload)
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _spectrum_from(section: dict) -> NoiseSpectrum:
    return NoiseSpectrum(**section.get("spectrum", {}))


def _require(doc: dict, section: str) -> dict:
    if section not in doc:
        raise ConfigError(f"config has no {section!r} section")
    return doc[section]


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    from .ensemble import SweepPlan, run_sweep

    doc, digest = _effective_config(args)
    sec = _require(doc, "simulate")
    velocities = sec.get("velocities")
    if isinstance(velocities, dict):
        velocities = np.logspace(np.log10(velocities["min"]),
                                 np.log10(velocities["max"]),
                                 velocities["count"]).tolist()
    plan = SweepPlan(
        sizes=tuple(sec.get("sizes", ())),
        velocities=None if velocities is None else tuple(sorted(velocities)),
        n_realizations=sec.get("n_realizations", 100),
        noise_mode=sec.get("noise_mode", "all"),
        single_site=sec.get("single_site", 0),
        spectrum=_spectrum_from(sec),
        master_seed=doc["master_seed"],
        rtol=sec.get("rtol", 1e-8),
        atol=sec.get("atol", 1e-10),
        n_bins=sec.get("n_bins", 20),
    )
    out = _outpath(doc, sec.get("output", "curve.tsv"))

    def progress(row):
        print(f"  L={row.L:4d} v={row.v:.6g} dE={row.delta_e_mean:.6g} "
              f"+- {row.delta_e_stderr:.2g}", flush=True)

    result = run_sweep(plan, out_path=out, workers=doc["workers"],
                       progress=progress, meta={"config_digest": digest})
    _sidecar(out, {"config_digest": digest, "plan_digest": plan.digest(),
                   "failures": [list(f) for f in result.failures]})
    print(f"wrote {out} ({len(result.rows)} points, "
          f"{len(result.failures)} failures)")
    return EXIT_PARTIAL if result.failures else EXIT_OK


def cmd_qubit(args) -> int:
    from .qubit import QubitRun, coherence_time, evolve_qubit

    doc, digest = _effective_config(args)
    sec = doc.get("qubit", {})
    run = QubitRun(
        h_z=sec.get("h_z", 0.0),
        spectrum=_spectrum_from(sec),
        t_max=sec.get("t_max", 150.0),
        dt_out=sec.get("dt_out", 0.5),
        n_realizations=sec.get("n_realizations", 1000),
        master_seed=doc["master_seed"],
        rtol=sec.get("rtol", 1e-10),
    )
    curve = evolve_qubit(run)
    out = _outpath(doc, sec.get("output", "purity.tsv"))
    write_table(out, ("t", "purity"), zip(curve.times, curve.purity),
                {"schema": "purity-curve/1", "config_digest": digest,
                 "h_z": repr(run.h_z),
                 "n_realizations": run.n_realizations})
    try:
        t_r = coherence_time(curve)
    except HorizonError as exc:
        _sidecar(out, {"config_digest": digest, "coherence_time": None,
                       "final_purity": exc.final_purity})
        print(f"wrote {out}; purity never reached 3/4 "
              f"(final {exc.final_purity:.4f}); extend t_max")
        return EXIT_NUMERICAL
    _sidecar(out, {"config_digest": digest, "coherence_time": t_r})
    print(f"wrote {out}")
    print(f"coherence_time T_r = {t_r:.4f}")
    return EXIT_OK


def _cmd_fit_common(args, section: str) -> int:
    doc, digest = _effective_config(args)
    sec = _require(doc, section)
    table = read_table(sec["input"])
    observable = sec.get("observable", "delta_e")
    plateau_mode = sec.get("plateau_mode",
                           "energy_1d" if observable.startswith("delta_e")
                           else "none")
    fraction = sec.get("plateau_fraction", 0.8)
    prefix = sec.get("output_prefix", section)

    if section == "collapse" and "fit_summary" in sec:
        with open(sec["fit_summary"], encoding="utf-8") as fh:
            summary = json.load(fh)
        if summary.get("schema") != FIT_SUMMARY_SCHEMA:
            raise SchemaError(f"{sec['fit_summary']} is not a fit summary")
        from .analysis import datasets_from_table
        from .scaling import master_curve, rescale
        datasets = datasets_from_table(table, observable, plateau_mode,
                                       fraction)
        rows = []
        by_size = {entry["L"]: entry for entry in summary["per_size"]}
        for size, (v, f, s) in datasets.items():
            if size not in by_size:
                raise SchemaError(f"fit summary lacks size {size}")
            entry = by_size[size]
            u, g = rescale(v, f, entry["v_min"], entry["f_min"])
            rows.extend((size, v[k], u[k], g[k], s[k] / entry["f_min"])
                        for k in range(len(u)))
        out = _outpath(doc, f"{prefix}_rescaled.tsv")
        write_table(out, ("L", "v", "u", "g", "g_stderr"), rows,
                    {"schema": "rescaled-points/1", "config_digest": digest})
        us = np.logspace(np.log10(min(r[2] for r in rows) / 2),
                         np.log10(max(r[2] for r in rows) * 2), 200)
        gs = master_curve(us, summary["alpha"], summary["beta"])
        mout = _outpath(doc, f"{prefix}_master.tsv")
        write_table(mout, ("u", "g"), zip(us, gs),
                    {"schema": "master-curve/1", "config_digest": digest})
        print(f"wrote {out} and {mout}")
        return EXIT_OK

    fit, summary, datasets = fit_table(table, observable, plateau_mode,
                                       fraction, u_max=sec.get("u_max"),
                                       config_digest=digest)
    out_json = _outpath(doc, f"{prefix}_summary.json")
    with open(out_json, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    out_resc = _outpath(doc, f"{prefix}_rescaled.tsv")
    write_table(out_resc, ("L", "v", "u", "g", "g_stderr"),
                rescaled_rows(fit, datasets),
                {"schema": "rescaled-points/1", "config_digest": digest})
    out_master = _outpath(doc, f"{prefix}_master.tsv")
    write_table(out_master, ("u", "g"), master_curve_rows(fit, datasets),
                {"schema": "master-curve/1", "config_digest": digest})
    print(f"wrote {out_json}, {out_resc}, {out_master}")
    print(f"alpha = {fit.alpha:.4f} +- {fit.alpha_error:.4f}, "
          f"beta = {fit.beta:.4f} +- {fit.beta_error:.4f}, "
          f"chi2/dof = {fit.chi_square / max(fit.dof, 1):.3g}")
    for entry in summary["per_size"]:
        print(f"  L={entry['L']:4d} a={entry['a']:.4g} b={entry['b']:.4g} "
              f"v_min={entry['v_min']:.4g} f_min={entry['f_min']:.4g}")
    if fit.degenerate:
        print(f"warning: degenerate fit: {fit.message}")
    return EXIT_OK


def cmd_fit(args) -> int:
    return _cmd_fit_common(args, "fit")


def cmd_collapse(args) -> int:
    return _cmd_fit_common(args, "collapse")


def cmd_kzm(args) -> int:
    from .scaling import KzmInput, kzm_exponent, lzm_exponent

    doc, _ = _effective_config(args)
    sec = _require(doc, "kzm")
    inp = KzmInput(d=sec["d"], z=sec["z"], nu=sec["nu"],
                   kappa=sec.get("kappa", 0.0))
    print(f"alpha_kzm = {kzm_exponent(inp):.6f}")
    print(f"alpha_lzm = {lzm_exponent(inp.z):.6f}")
    return EXIT_OK


def cmd_embed(args) -> int:
    from .chimera import (DefectList, build_embedding, checkerboard_gauge,
                          gauge_transform, tile_partition,
                          write_coupler_list, write_logical_map)

    doc, digest = _effective_config(args)
    sec = _require(doc, "embed")
    L = sec["L"]
    defects_doc = sec.get("defects", {})
    defects = DefectList(
        qubits=frozenset(defects_doc.get("qubits", ())),
        couplers=frozenset(tuple(c) for c in defects_doc.get("couplers", ())))
    placements = tile_partition(L) if sec.get("tiled", True) else None
    emb = build_embedding(L, j_ising=sec.get("j_ising", 0.5),
                          defects=defects, placements=placements,
                          j_hc=sec.get("j_hc", 1.0))
    gauge = sec.get("gauge", "none")
    if gauge == "checkerboard":
        emb = gauge_transform(emb, checkerboard_gauge(emb))
    elif gauge != "none":
        raise ConfigError("embed.gauge must be 'none' or 'checkerboard'")
    prefix = sec.get("output_prefix", f"embedding_L{L}")
    cpath = _outpath(doc, f"{prefix}.couplers.txt")
    mpath = _outpath(doc, f"{prefix}.map.json")
    tpath = _outpath(doc, f"{prefix}.tiles.json")
    write_coupler_list(cpath, emb)
    write_logical_map(mpath, emb)
    with open(tpath, "w", encoding="utf-8") as fh:
        json.dump({"schema": "tile-partition/1", "tile_side": emb.L,
                   "placements": [[t.tile_id, t.x0, t.y0]
                                  for t in emb.placements],
                   "config_digest": digest}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    census = emb.census()
    print(f"wrote {cpath}, {mpath}, {tpath}")
    print(f"couplers: {census['hc']} high-cost, {census['intra']} intra-cell, "
          f"{census['inter']} inter-cell; {len(emb.vacancies)} vacancies")
    return EXIT_OK


def cmd_decode(args) -> int:
    from .chimera import (DECODED_COLUMNS, DECODED_SCHEMA, decode_samples,
                          read_embedding, read_samples)

    doc, digest = _effective_config(args)
    sec = _require(doc, "decode")
    samples = read_samples(sec["samples"])
    emb = read_embedding(sec["couplers"], sec["logical_map"])
    decoded = decode_samples(samples, emb,
                             vacancy_threshold=sec.get("vacancy_threshold",
                                                       0.05))
    out = _outpath(doc, sec.get("output", "decoded.tsv"))
    anneal_time = samples.metadata.get("annealing_time", float("nan"))
    write_table(out, DECODED_COLUMNS, decoded,
                {"schema": DECODED_SCHEMA, "config_digest": digest,
                 "tile_side": emb.L, "annealing_time": repr(float(anneal_time))})
    print(f"wrote {out} ({len(decoded)} tile-runs)")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    from .chimera import (DEVICE_CURVE_COLUMNS, DEVICE_CURVE_SCHEMA,
                          DECODED_SCHEMA, TileStats, aggregate_tiles)

    doc, digest = _effective_config(args)
    sec = _require(doc, "aggregate")
    table = read_table(sec["input"])
    if table.meta.get("schema") != DECODED_SCHEMA:
        raise SchemaError(f"{sec['input']} is not a {DECODED_SCHEMA} table")
    L = int(float(table.meta["tile_side"]))
    anneal_time = float(table.meta["annealing_time"])
    v = 1.0 / anneal_time if anneal_time > 0 else float("nan")
    decoded = [TileStats(int(r[0]), int(r[1]), r[2], r[3], r[4], r[5],
                         int(r[6]), bool(r[7])) for r in table.rows()]
    agg = aggregate_tiles(decoded, L=L, v=v, n_bins=sec.get("n_bins", 20))
    out = _outpath(doc, sec.get("output", "device_curve.tsv"))
    row = tuple(agg[key] for key in
                ("L", "v", "delta_e_phys_mean", "delta_e_phys_stderr",
                 "delta_m_phys_mean", "delta_m_phys_stderr",
                 "delta_e_logical_mean", "delta_e_logical_stderr",
                 "delta_m_logical_mean", "delta_m_logical_stderr",
                 "n_real", "n_bins"))
    append_row(out, DEVICE_CURVE_COLUMNS, row,
               {"schema": DEVICE_CURVE_SCHEMA, "config_digest": digest,
                "annealing_time": repr(anneal_time)})
    print(f"wrote {out}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from . import ed
    from .fermion import (ChainSpec, bdg_matrices, correlations, evolve,
                          ground_energy, ground_state, residual_energy)

    doc, digest = _effective_config(args)
    sec = doc.get("oracle_check", {})
    max_size = sec.get("max_size", 10)
    n_cases = sec.get("n_cases", 20)
    tol_ground = sec.get("tolerance_ground", 1e-10)
    tol_evolved = sec.get("tolerance_evolved", 1e-5)
    anneal_time = sec.get("anneal_time", 10.0)
    seed = doc["master_seed"]
    rng = np.random.default_rng(seed)
    worst_ground, worst_evolved = 0.0, 0.0
    for L in range(2, max_size + 1):
        for case in range(n_cases):
            s = rng.uniform(0.0, 1.0)
            spectrum = NoiseSpectrum(n_modes=64)
            signals = tuple(
                sample_signal(spectrum, (seed, "oracle", L, case, site))
                for site in range(L))
            chain = ChainSpec(size=L, coupling=0.01, signals=signals)
            t_probe = rng.uniform(0.0, anneal_time)
            e_bdg = ground_energy(chain, s, t_probe)
            e_ed = ed.spectrum_exact(chain, s, t_probe)[0]
            worst_ground = max(worst_ground, abs(e_bdg - e_ed))
        chain = ChainSpec(size=L, coupling=0.01,
                          signals=tuple(sample_signal(NoiseSpectrum(n_modes=64),
                                                      (seed, "oracle-ev", L, site))
                                        for site in range(L)))
        modes = ground_state(*bdg_matrices(chain, 0.0, 0.0))
        final = evolve(modes, chain, anneal_time, rtol=1e-10, atol=1e-12)
        de_bdg = residual_energy(correlations(final))
        de_ed = ed.residual_energy_exact(ed.anneal_exact(chain, anneal_time))
        worst_evolved = max(worst_evolved, abs(de_bdg - de_ed))
        print(f"L={L}: ground max |dE| = {worst_ground:.3e}, "
              f"evolved |d dE| = {abs(de_bdg - de_ed):.3e}")
    ok = worst_ground < tol_ground and worst_evolved < tol_evolved
    print(f"worst ground deviation {worst_ground:.3e} (tol {tol_ground:g}), "
          f"worst evolved deviation {worst_evolved:.3e} (tol {tol_evolved:g})")
    print("oracle check PASSED" if ok else "oracle check FAILED")
    return EXIT_OK if ok else EXIT_NUMERICAL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annealkit",
        description="Quantum-annealing simulation and scaling-analysis toolkit")
    parser.add_argument("--version", action="version",
                        version=f"annealkit {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    verbs = {
        "simulate": (cmd_simulate, "run an (L, v) residual-energy sweep"),
        "qubit": (cmd_qubit, "single-qubit purity curve and coherence time"),
        "fit": (cmd_fit, "two-power-law fit of a curve table"),
        "collapse": (cmd_collapse, "rescale data onto the master curve"),
        "kzm": (cmd_kzm, "critical-exponent predictions"),
        "embed": (cmd_embed, "emit Chimera coupler list and logical map"),
        "decode": (cmd_decode, "decode measurement samples into tile stats"),
        "aggregate": (cmd_aggregate, "average decoded tiles with binned errors"),
        "oracle-check": (cmd_oracle_check,
                         "cross-check the fermion route against dense "
                         "diagonalization"),
    }
    for name, (func, help_text) in verbs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (dotted path, JSON value)")
        p.add_argument("--output-dir", help="directory for output files")
        p.add_argument("--workers", type=int, help="worker process count")
        p.add_argument("--master-seed", type=int, help="master random seed")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationAbort, FitConvergenceError, HorizonError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
