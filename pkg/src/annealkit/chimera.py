"""Chimera-graph embeddings of open square Ising lattices, and decoding.

The 2048-qubit target graph is a 16x16 grid of 8-qubit cells; qubit
index = 8*(16*row + col) + k with k in 0..3 one shore and 4..7 the
other.  Within a cell the shores are completely bipartitely coupled;
between cells, same-k qubits couple vertically for the 0..3 shore and
horizontally for the 4..7 shore.

Each cell hosts a 2x2 block of logical sites.  A logical site is a pair
(one qubit per shore) locked by a strong ferromagnetic coupler -J_hc.
Nearest-neighbor lattice bonds inside a cell are realized as two
parallel couplers of -J_ising/2; bonds crossing cells use the single
available inter-cell coupler at -J_ising.  Two cell wirings (A and B)
alternate in a checkerboard so that every crossing bond lands on a
same-k inter-cell coupler.

Broken qubits or couplers turn the touched logical sites into vacancies:
every coupler touching either member qubit is omitted, and vacancies are
excluded from all statistics.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence
import warnings

import numpy as np

from . import __version__
from .errors import ParameterError, SchemaError
from .seeds import stream

GRID = 16                 # cells per side
CELL = 8                  # qubits per cell
N_QUBITS = GRID * GRID * CELL
LOGICAL_SIDE = 2 * GRID   # 32x32 logical lattice

COUPLER_SCHEMA = "coupler-list/1"
LOGICAL_MAP_SCHEMA = "logical-map/1"
SAMPLES_TEXT_SCHEMA = "sample-set/1"
SAMPLES_MAGIC = b"ANKSMP01"
DECODED_SCHEMA = "decoded-tiles/1"
DEVICE_CURVE_SCHEMA = "device-curve/1"

DECODED_COLUMNS = ("tile", "run", "delta_e_phys", "delta_m_phys",
                   "delta_e_logical", "delta_m_logical", "hc_violations",
                   "excluded")
DEVICE_CURVE_COLUMNS = ("L", "v", "delta_e_mean", "delta_e_stderr",
                        "delta_m_mean", "delta_m_stderr",
                        "delta_e_logical_mean", "delta_e_logical_stderr",
                        "delta_m_logical_mean", "delta_m_logical_stderr",
                        "n_real", "n_bins")


def qubit_index(row: int, col: int, k: int) -> int:
    return CELL * (GRID * row + col) + k


def cell_pattern(row: int, col: int) -> str:
    """Checkerboard wiring label of a cell."""
    return "A" if (row + col) % 2 == 0 else "B"


def physical_pair(x: int, y: int) -> tuple:
    """(vertical-shore qubit, horizontal-shore qubit) of logical site (x, y)."""
    row, col = y // 2, x // 2
    dx, dy = x % 2, y % 2
    if cell_pattern(row, col) == "A":
        kv = dx + 2 * dy
        kh = dx + 2 * dy
    else:
        kv = dx + 2 * (1 - dy)
        kh = (1 - dx) + 2 * dy
    return qubit_index(row, col, kv), qubit_index(row, col, 4 + kh)


def chimera_edge_exists(q1: int, q2: int) -> bool:
    """Whether (q1, q2) is a coupler of the target graph."""
    c1, k1 = divmod(q1, CELL)
    c2, k2 = divmod(q2, CELL)
    r1, col1 = divmod(c1, GRID)
    r2, col2 = divmod(c2, GRID)
    if c1 == c2:
        return (k1 < 4) != (k2 < 4)
    if k1 != k2:
        return False
    if k1 < 4:
        return col1 == col2 and abs(r1 - r2) == 1
    return r1 == r2 and abs(col1 - col2) == 1


@dataclass(frozen=True)
class DefectList:
    qubits: frozenset = frozenset()
    couplers: frozenset = frozenset()  # of sorted (q1, q2) tuples

    def __post_init__(self):
        object.__setattr__(self, "qubits", frozenset(int(q) for q in self.qubits))
        object.__setattr__(
            self, "couplers",
            frozenset(tuple(sorted((int(a), int(b)))) for a, b in self.couplers))
        for q in self.qubits:
            if not (0 <= q < N_QUBITS):
                raise ParameterError(f"defect qubit {q} outside topology")
        for a, b in self.couplers:
            if not (0 <= a < N_QUBITS and 0 <= b < N_QUBITS):
                raise ParameterError(f"defect coupler ({a},{b}) outside topology")

    def touched_qubits(self) -> frozenset:
        touched = set(self.qubits)
        for a, b in self.couplers:
            touched.add(a)
            touched.add(b)
        return frozenset(touched)


class TilePlacement(NamedTuple):
    tile_id: int
    x0: int
    y0: int


def tile_partition(L: int) -> list:
    """Disjoint L x L tile placements over the 32x32 logical grid.

    For L > 16 only a single tile fits; callers get one placement and a
    warning note.
    """
    if L > 16:
        if L < LOGICAL_SIDE:
            warnings.warn(f"L={L} > 16 admits a single tile only", stacklevel=2)
        return [TilePlacement(0, 0, 0)]
    n = LOGICAL_SIDE // L
    return [TilePlacement(ty * n + tx, tx * L, ty * L)
            for ty in range(n) for tx in range(n)]


@dataclass
class Embedding:
    """Full programming of the target graph for tiles of side L."""

    L: int
    j_ising: float
    j_hc: float
    placements: tuple
    pairs: dict          # site (x, y) -> (q_vertical, q_horizontal)
    site_tile: dict      # site -> tile_id
    vacancies: frozenset
    hc_couplers: dict    # site -> (q1, q2, value); non-vacancy sites only
    bonds: dict          # (site_a, site_b) -> tuple of (q1, q2, value)

    def active_sites(self, tile_id: Optional[int] = None):
        out = [s for s in self.pairs if s not in self.vacancies]
        if tile_id is not None:
            out = [s for s in out if self.site_tile[s] == tile_id]
        return sorted(out)

    def coupler_list(self) -> list:
        """All programmed couplers as sorted (q1, q2, value) rows."""
        rows = {}
        for q1, q2, val in self.hc_couplers.values():
            key = (min(q1, q2), max(q1, q2))
            rows[key] = val
        for cs in self.bonds.values():
            for q1, q2, val in cs:
                key = (min(q1, q2), max(q1, q2))
                if key in rows:
                    raise ParameterError(f"duplicate coupler {key}")
                rows[key] = val
        return [(q1, q2, rows[(q1, q2)]) for q1, q2 in sorted(rows)]

    def census(self) -> dict:
        """Counts by coupler role: high-cost, intra-cell bond, inter-cell bond."""
        n_intra = sum(len(c) for c in self.bonds.values() if len(c) == 2)
        n_inter = sum(len(c) for c in self.bonds.values() if len(c) == 1)
        return {"hc": len(self.hc_couplers), "intra": n_intra, "inter": n_inter}

    def vacancy_fraction(self, tile_id: int) -> float:
        sites = [s for s in self.pairs if self.site_tile[s] == tile_id]
        if not sites:
            return 1.0
        return sum(1 for s in sites if s in self.vacancies) / len(sites)

    def coupler_digest(self) -> str:
        """Fingerprint of the programmed couplers; stamped into sample
        metadata so decoding against the wrong embedding is caught."""
        blob = "\n".join(f"{q1} {q2} {val!r}"
                         for q1, q2, val in self.coupler_list())
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _in_same_cell(s1, s2) -> bool:
    return (s1[0] // 2, s1[1] // 2) == (s2[0] // 2, s2[1] // 2)


def build_embedding(L: int, j_ising: float = 0.5,
                    defects: Optional[DefectList] = None,
                    placements: Optional[Sequence[TilePlacement]] = None,
                    j_hc: float = 1.0) -> Embedding:
    """Compile L x L ferromagnetic tiles onto the target graph.

    With the default single placement at the origin this programs one
    tile; pass tile_partition(L) to fill the whole graph.
    """
    if not (2 <= L <= LOGICAL_SIDE):
        raise ParameterError(f"tile side must be in [2, {LOGICAL_SIDE}], got {L}")
    if not (0.0 < j_ising <= 1.0):
        raise ParameterError("j_ising must be in (0, 1]")
    if not (0.0 < j_hc <= 1.0):
        raise ParameterError("j_hc must be in (0, 1]")
    defects = defects or DefectList()
    if placements is None:
        placements = [TilePlacement(0, 0, 0)]
    touched = defects.touched_qubits()

    pairs, site_tile = {}, {}
    vacancies = set()
    for tile in placements:
        if tile.x0 + L > LOGICAL_SIDE or tile.y0 + L > LOGICAL_SIDE:
            raise ParameterError(f"tile {tile} overflows the logical grid")
        for y in range(tile.y0, tile.y0 + L):
            for x in range(tile.x0, tile.x0 + L):
                site = (x, y)
                if site in pairs:
                    raise ParameterError(f"overlapping tiles at {site}")
                pairs[site] = physical_pair(x, y)
                site_tile[site] = tile.tile_id
                if set(pairs[site]) & touched:
                    vacancies.add(site)

    hc = {site: (qv, qh, -j_hc)
          for site, (qv, qh) in pairs.items() if site not in vacancies}

    bonds = {}
    for tile in placements:
        for y in range(tile.y0, tile.y0 + L):
            for x in range(tile.x0, tile.x0 + L):
                s1 = (x, y)
                for s2 in ((x + 1, y), (x, y + 1)):
                    if s2[0] >= tile.x0 + L or s2[1] >= tile.y0 + L:
                        continue
                    if s1 in vacancies or s2 in vacancies:
                        continue
                    qv1, qh1 = pairs[s1]
                    qv2, qh2 = pairs[s2]
                    if _in_same_cell(s1, s2):
                        cs = ((qv1, qh2, -j_ising / 2.0),
                              (qv2, qh1, -j_ising / 2.0))
                    elif s2[0] > s1[0]:      # horizontal crossing
                        cs = ((qh1, qh2, -j_ising),)
                    else:                    # vertical crossing
                        cs = ((qv1, qv2, -j_ising),)
                    for q1, q2, _ in cs:
                        if not chimera_edge_exists(q1, q2):
                            raise ParameterError(
                                f"internal wiring error: ({q1},{q2}) is not an edge")
                    bonds[(s1, s2)] = tuple(sorted(cs))

    emb = Embedding(L=L, j_ising=j_ising, j_hc=j_hc,
                    placements=tuple(placements), pairs=pairs,
                    site_tile=site_tile, vacancies=frozenset(vacancies),
                    hc_couplers=hc, bonds=bonds)
    emb.coupler_list()  # audits duplicates
    return emb


def build_full_embedding(L: int, j_ising: float = 0.5,
                         defects: Optional[DefectList] = None,
                         j_hc: float = 1.0) -> Embedding:
    """Embedding covering every disjoint tile the graph admits."""
    return build_embedding(L, j_ising, defects, tile_partition(L), j_hc)


def gauge_transform(emb: Embedding, gauge: dict) -> Embedding:
    """Flip coupler signs by J -> J g_a g_b; high-cost couplers unchanged.

    gauge maps every non-vacancy site to +1 or -1.  The classical
    spectrum of each tile is preserved.
    """
    g = {}
    for site in emb.pairs:
        if site in emb.vacancies:
            continue
        if site not in gauge:
            raise ParameterError(f"gauge value missing for site {site}")
        val = int(gauge[site])
        if val not in (-1, 1):
            raise ParameterError("gauge values must be +1 or -1")
        g[site] = val
    bonds = {}
    for (s1, s2), cs in emb.bonds.items():
        f = g[s1] * g[s2]
        bonds[(s1, s2)] = tuple((q1, q2, val * f) for q1, q2, val in cs)
    return Embedding(L=emb.L, j_ising=emb.j_ising, j_hc=emb.j_hc,
                     placements=emb.placements, pairs=dict(emb.pairs),
                     site_tile=dict(emb.site_tile), vacancies=emb.vacancies,
                     hc_couplers=dict(emb.hc_couplers), bonds=bonds)


def checkerboard_gauge(emb: Embedding) -> dict:
    """The ferromagnet <-> antiferromagnet relabeling."""
    return {(x, y): (1 if (x + y) % 2 == 0 else -1)
            for (x, y) in emb.pairs if (x, y) not in emb.vacancies}


@dataclass
class SampleSet:
    """Projective measurement records: one row of +-1 per annealing run."""

    values: np.ndarray               # (n_runs, N_QUBITS) int8
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int8)
        if vals.ndim != 2 or vals.shape[1] != N_QUBITS:
            raise SchemaError(f"sample records must have {N_QUBITS} entries")
        if not np.all(np.isin(vals, (-1, 1))):
            raise SchemaError("sample values must be +-1")
        self.values = vals

    @property
    def n_runs(self) -> int:
        return self.values.shape[0]


class TileStats(NamedTuple):
    tile: int
    run: int
    delta_e_phys: float
    delta_m_phys: float
    delta_e_logical: float
    delta_m_logical: float
    hc_violations: int
    excluded: bool


def decode_samples(samples: SampleSet, emb: Embedding,
                   vacancy_threshold: float = 0.05) -> list:
    """Per-tile, per-run observables from the raw records.

    Vacancy sites are excluded everywhere; tiles whose vacancy fraction
    exceeds the threshold are flagged excluded.  Energies are energy
    differences to the perfectly ordered state in programmed coupler
    units; the physical variant sums the embedded Ising couplers (never
    the high-cost ones), the logical variant first collapses each pair
    to one spin (ties resolved by the lower-indexed qubit).
    """
    recorded = samples.metadata.get("coupler_digest")
    if recorded is not None and recorded != emb.coupler_digest():
        raise SchemaError(
            f"sample set was taken with couplers {recorded}, but the "
            f"embedding programs {emb.coupler_digest()}")
    vals = samples.values
    out = []
    for tile in emb.placements:
        sites = emb.active_sites(tile.tile_id)
        excluded = emb.vacancy_fraction(tile.tile_id) > vacancy_threshold
        if not sites:
            for run in range(samples.n_runs):
                out.append(TileStats(tile.tile_id, run, np.nan, np.nan,
                                     np.nan, np.nan, 0, True))
            continue
        qv = np.array([emb.pairs[s][0] for s in sites])
        qh = np.array([emb.pairs[s][1] for s in sites])
        site_pos = {s: i for i, s in enumerate(sites)}

        cq1, cq2, cj = [], [], []
        bq1, bq2, bj = [], [], []   # logical bonds
        for (s1, s2), cs in emb.bonds.items():
            if emb.site_tile[s1] != tile.tile_id:
                continue
            for q1, q2, val in cs:
                cq1.append(q1)
                cq2.append(q2)
                cj.append(val)
            bq1.append(site_pos[s1])
            bq2.append(site_pos[s2])
            bj.append(sum(val for _, _, val in cs))
        cq1, cq2 = np.array(cq1, int), np.array(cq2, int)
        cj = np.array(cj, float)
        bq1, bq2 = np.array(bq1, int), np.array(bq2, int)
        bj = np.array(bj, float)

        # physical observables
        if len(cj):
            e_phys = (vals[:, cq1] * vals[:, cq2]).astype(float) @ cj
            e_phys -= -np.abs(cj).sum()
        else:
            e_phys = np.zeros(samples.n_runs)
        m_phys = vals[:, qv].sum(axis=1) + vals[:, qh].sum(axis=1)
        dm_phys = 2 * len(sites) - np.abs(m_phys)

        # logical decode
        agree = vals[:, qv] == vals[:, qh]
        tie = np.minimum(qv, qh)
        logical = np.where(agree, vals[:, qv], vals[:, tie])
        violations = (~agree).sum(axis=1)
        if len(bj):
            e_log = (logical[:, bq1] * logical[:, bq2]).astype(float) @ bj
            e_log -= -np.abs(bj).sum()
        else:
            e_log = np.zeros(samples.n_runs)
        dm_log = len(sites) - np.abs(logical.sum(axis=1))

        for run in range(samples.n_runs):
            out.append(TileStats(tile.tile_id, run,
                                 float(e_phys[run]), float(dm_phys[run]),
                                 float(e_log[run]), float(dm_log[run]),
                                 int(violations[run]), excluded))
    return out


def aggregate_tiles(decoded: Sequence[TileStats], L: int, v: float,
                    n_bins: int = 20) -> dict:
    """Means with binned errors over all non-excluded tile-runs.

    Each tile-run counts as one independent measurement.  With a single
    measurement the errors are reported as NaN (missing); identical
    repeated measurements give 0.
    """
    rows = [r for r in decoded if not r.excluded]
    if not rows:
        raise ParameterError("no tile-runs left after exclusions")
    fields = ("delta_e_phys", "delta_m_phys", "delta_e_logical",
              "delta_m_logical")
    result = {"L": L, "v": v, "n_real": len(rows)}
    n = len(rows)
    if n == 1:
        result["n_bins"] = 1
        for name in fields:
            result[name + "_mean"] = getattr(rows[0], name)
            result[name + "_stderr"] = float("nan")
        return result
    nb = min(n_bins, n)
    edges = np.linspace(0, n, nb + 1).astype(int)
    result["n_bins"] = nb
    for name in fields:
        x = np.array([getattr(r, name) for r in rows])
        bin_means = np.array([x[a:b].mean() for a, b in zip(edges[:-1], edges[1:])])
        result[name + "_mean"] = float(x.mean())
        result[name + "_stderr"] = float(bin_means.std(ddof=1) / np.sqrt(nb))
    return result


def synthesize_samples(emb: Embedding, n_runs: int, flip_probability: float = 0.0,
                       seed: int = 0, annealing_time: float = 1.0) -> SampleSet:
    """Generator-side synthetic records: independent logical flips.

    Every non-vacancy logical site flips with the given probability
    (both member qubits together, so the high-cost constraint is never
    violated); unused qubits read +1.
    """
    if not (0.0 <= flip_probability < 0.5):
        raise ParameterError("flip_probability must be in [0, 0.5)")
    rng = stream(seed, "synthetic-samples")
    vals = np.ones((n_runs, N_QUBITS), dtype=np.int8)
    sites = [s for s in emb.pairs if s not in emb.vacancies]
    if sites and flip_probability > 0.0:
        qv = np.array([emb.pairs[s][0] for s in sites])
        qh = np.array([emb.pairs[s][1] for s in sites])
        flips = rng.random((n_runs, len(sites))) < flip_probability
        spin = np.where(flips, -1, 1).astype(np.int8)
        for r in range(n_runs):
            vals[r, qv] = spin[r]
            vals[r, qh] = spin[r]
    meta = {"generator": "bernoulli-logical-flips",
            "flip_probability": flip_probability, "seed": seed,
            "annealing_time": annealing_time,
            "coupler_digest": emb.coupler_digest()}
    return SampleSet(values=vals, metadata=meta)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def write_coupler_list(path, emb: Embedding) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# schema: {COUPLER_SCHEMA}\n")
        fh.write(f"# generated_by: annealkit {__version__}\n")
        fh.write(f"# tile_side: {emb.L}\n")
        fh.write(f"# j_ising: {emb.j_ising!r}\n")
        fh.write(f"# j_hc: {emb.j_hc!r}\n")
        fh.write("q1 q2 J\n")
        for q1, q2, val in emb.coupler_list():
            fh.write(f"{q1} {q2} {val!r}\n")


def read_coupler_list(path):
    meta, rows = {}, []
    with open(path, encoding="utf-8") as fh:
        header_seen = False
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if line.split() != ["q1", "q2", "J"]:
                    raise SchemaError(f"unexpected coupler header: {line}")
                header_seen = True
                continue
            a, b, j = line.split()
            rows.append((int(a), int(b), float(j)))
    if meta.get("schema") != COUPLER_SCHEMA:
        raise SchemaError(f"{path} is not a {COUPLER_SCHEMA} document")
    return meta, rows


def write_logical_map(path, emb: Embedding) -> None:
    doc = {
        "schema": LOGICAL_MAP_SCHEMA,
        "generated_by": f"annealkit {__version__}",
        "tile_side": emb.L,
        "j_ising": emb.j_ising,
        "j_hc": emb.j_hc,
        "placements": [[t.tile_id, t.x0, t.y0] for t in emb.placements],
        "sites": [
            {"x": x, "y": y, "tile": emb.site_tile[(x, y)],
             "qubits": list(emb.pairs[(x, y)]),
             "vacancy": (x, y) in emb.vacancies}
            for (x, y) in sorted(emb.pairs)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_embedding(coupler_path, map_path) -> Embedding:
    """Rebuild an Embedding from its two emitted documents."""
    _, couplers = read_coupler_list(coupler_path)
    with open(map_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != LOGICAL_MAP_SCHEMA:
        raise SchemaError(f"{map_path} is not a {LOGICAL_MAP_SCHEMA} document")
    pairs, site_tile, vacancies = {}, {}, set()
    owner = {}
    for entry in doc["sites"]:
        site = (entry["x"], entry["y"])
        pairs[site] = tuple(entry["qubits"])
        site_tile[site] = entry["tile"]
        if entry["vacancy"]:
            vacancies.add(site)
        else:
            for q in entry["qubits"]:
                owner[q] = site
    hc, bond_map = {}, {}
    hc_keys = {tuple(sorted(pairs[s])): s
               for s in pairs if s not in vacancies}
    for q1, q2, val in couplers:
        key = (min(q1, q2), max(q1, q2))
        if key in hc_keys:
            site = hc_keys[key]
            hc[site] = (pairs[site][0], pairs[site][1], val)
            continue
        s1, s2 = owner[q1], owner[q2]
        bond = (s1, s2) if (s1 < s2) else (s2, s1)
        bond_map.setdefault(bond, []).append((q1, q2, val))
    bonds = {bond: tuple(sorted(cs)) for bond, cs in bond_map.items()}
    return Embedding(L=doc["tile_side"], j_ising=doc["j_ising"],
                     j_hc=doc["j_hc"],
                     placements=tuple(TilePlacement(*p) for p in doc["placements"]),
                     pairs=pairs, site_tile=site_tile,
                     vacancies=frozenset(vacancies), hc_couplers=hc,
                     bonds=bonds)


def write_samples(path, samples: SampleSet, fmt: str = "text") -> None:
    """Emit records as text (one run per line) or the compact binary form."""
    if fmt == "text":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# schema: {SAMPLES_TEXT_SCHEMA}\n")
            fh.write(f"# n_qubits: {N_QUBITS}\n")
            for row in samples.values:
                fh.write(" ".join(str(int(x)) for x in row) + "\n")
    elif fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(SAMPLES_MAGIC)
            fh.write(struct.pack("<II", N_QUBITS, samples.n_runs))
            fh.write(samples.values.astype("<i1").tobytes())
    else:
        raise ParameterError("fmt must be 'text' or 'binary'")
    sidecar = dict(samples.metadata)
    sidecar["schema"] = SAMPLES_TEXT_SCHEMA
    sidecar["format"] = fmt
    with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_samples(path) -> SampleSet:
    """Parse either sample format, sniffing the binary magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(len(SAMPLES_MAGIC))
        if head == SAMPLES_MAGIC:
            n_qubits, n_runs = struct.unpack("<II", fh.read(8))
            if n_qubits != N_QUBITS:
                raise SchemaError(f"binary sample file has {n_qubits} qubits")
            data = np.frombuffer(fh.read(n_qubits * n_runs), dtype="<i1")
            values = data.reshape(n_runs, n_qubits)
        else:
            values = None
    if values is None:
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                rows.append([int(tok) for tok in line.split()])
        values = np.array(rows, dtype=np.int8)
    metadata = {}
    sidecar = str(path) + ".meta.json"
    if os.path.exists(sidecar):
        with open(sidecar, encoding="utf-8") as fh:
            metadata = json.load(fh)
    return SampleSet(values=values, metadata=metadata)
