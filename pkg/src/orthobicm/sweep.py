"""Es/N0 sweeps, Eb/N0 re-coordination, CSV/JSON output and the limits table."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .channels import ChannelModel, Detection, NoiseConfig
from .constellation import (
    Labeling,
    SignalSet,
    labeling_natural,
    labeling_near_gray,
    make_bippm,
    make_ppm,
)
from .mi import DEFAULT_SAMPLES, MAX_SAMPLES, CapacityEstimate, simulate
from .wideband import (
    bicm_coefficients,
    cm_coefficients,
    tangent_line,
    wideband_summary,
)

__all__ = [
    "SpecError",
    "SweepSpec",
    "CurvePoint",
    "SweepResult",
    "MinEbNo",
    "TableRow",
    "parse_grid",
    "make_point",
    "run_sweep",
    "write_result",
    "write_curve",
    "read_curve",
    "min_ebno",
    "shannon_reference",
    "table_rows",
    "render_table",
    "worker_count",
    "CSV_HEADER",
    "DEFAULT_GRID_DB",
    "SHANNON_NOTE",
]

CSV_HEADER = ("esn0_db", "capacity_bits", "capacity_per_dim", "ebno_db", "std_error", "flag")
WORKERS_ENV = "ORTHOBICM_WORKERS"
SHANNON_NOTE = "real AWGN per dimension: 0.5*log2(1 + 2*(Es/N0)/D) bits/dim"


class SpecError(ValueError):
    """Invalid sweep specification (CLI exit code 2)."""


def parse_grid(text: str) -> tuple[float, ...]:
    """``"A:STEP:B"`` (inclusive) in dB to a tuple of grid values."""
    try:
        a, step, b = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise SpecError(f"grid must look like A:STEP:B, got {text!r}") from exc
    if step <= 0 or b < a:
        raise SpecError(f"grid needs STEP > 0 and B >= A, got {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return tuple(round(a + i * step, 10) for i in range(n))


DEFAULT_GRID_DB = parse_grid("-10:0.5:12")


@dataclass(frozen=True)
class SweepSpec:
    scheme: str
    M: int
    labeling: str = "natural"  # natural | near-gray | none (CM only)
    detection: str = "coherent"
    esn0_db: tuple = DEFAULT_GRID_DB
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0
    target_se: float | None = 0.002
    max_samples: int = MAX_SAMPLES

    def validate(self) -> None:
        if self.scheme not in ("ppm", "bippm"):
            raise SpecError(f"scheme must be ppm or bippm, got {self.scheme!r}")
        if self.M < 2 or self.M & (self.M - 1):
            raise SpecError(f"M must be a power of two >= 2, got {self.M}")
        if self.labeling not in ("natural", "near-gray", "none"):
            raise SpecError(f"labeling must be natural, near-gray or none, got {self.labeling!r}")
        if self.labeling == "near-gray" and self.scheme != "bippm":
            raise SpecError("near-gray labeling is defined for bippm only")
        if self.detection not in tuple(d.value for d in Detection):
            raise SpecError(f"unknown detection {self.detection!r}")
        if self.detection == "energy" and self.scheme != "ppm":
            raise SpecError("energy detection requires scheme=ppm")
        if self.detection == "differential" and (self.scheme != "bippm" or self.M != 2):
            raise SpecError("differential detection requires scheme=bippm with M=2")
        grid = np.asarray(self.esn0_db, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise SpecError("Es/N0 grid must be non-empty and strictly increasing")
        if self.n_samples < 1000:
            raise SpecError("n_samples must be at least 1000")
        if self.seed < 0:
            raise SpecError("seed must be non-negative")

    def signal_set(self) -> SignalSet:
        return make_ppm(self.M) if self.scheme == "ppm" else make_bippm(self.M)

    def labeling_for(self, signal_set: SignalSet) -> Labeling | None:
        if self.labeling == "none":
            return None
        if self.labeling == "near-gray":
            return labeling_near_gray(signal_set)
        return labeling_natural(signal_set)

    @property
    def dim(self) -> int:
        return self.M if self.scheme == "ppm" else self.M // 2


@dataclass(frozen=True)
class CurvePoint:
    esn0_db: float
    capacity_bits: float
    capacity_per_dim: float
    ebno_db: float
    std_error: float
    flag: str  # "ok" or "unreliable"

    @property
    def esn0(self) -> float:
        return 10.0 ** (self.esn0_db / 10.0)

    @property
    def reliable(self) -> bool:
        return self.flag == "ok"


def make_point(esn0_db: float, capacity_bits: float, std_error: float, dim: int) -> CurvePoint:
    """Curve point with Eb/N0 = Es/N0 / C (C in bits per symbol)."""
    esn0 = 10.0 ** (esn0_db / 10.0)
    ebno_db = 10.0 * math.log10(esn0 / capacity_bits) if capacity_bits > 0 else math.nan
    flag = "ok" if capacity_bits > 3.0 * std_error else "unreliable"
    return CurvePoint(float(esn0_db), float(capacity_bits), capacity_bits / dim, ebno_db, float(std_error), flag)


@dataclass
class SweepResult:
    spec: SweepSpec
    curves: dict = field(default_factory=dict)  # family -> list[CurvePoint]
    n_samples: list = field(default_factory=list)


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(workers))


def _grid_point(args) -> CapacityEstimate:
    spec, index = args
    signal_set = spec.signal_set()
    model = ChannelModel(Detection(spec.detection), NoiseConfig.from_db(spec.esn0_db[index]))
    return simulate(
        signal_set,
        spec.labeling_for(signal_set),
        model,
        spec.n_samples,
        spec.seed,
        grid_index=index,
        target_se=spec.target_se,
        max_samples=spec.max_samples,
    )


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Estimate CM, BICM and bit-level curves at every grid point.

    Grid points may run in worker processes; every point uses its own
    substreams, so the output does not depend on the worker count.
    """
    spec.validate()
    jobs = [(spec, i) for i in range(len(spec.esn0_db))]
    n_workers = worker_count(workers)
    if n_workers == 1:
        estimates = [_grid_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            estimates = list(pool.map(_grid_point, jobs))
    D = spec.dim
    result = SweepResult(spec)
    result.curves["cm"] = [make_point(db, e.cm.value_bits, e.cm.std_error, D) for db, e in zip(spec.esn0_db, estimates)]
    if estimates[0].bicm is not None:
        result.curves["bicm"] = [
            make_point(db, e.bicm.value_bits, e.bicm.std_error, D) for db, e in zip(spec.esn0_db, estimates)
        ]
        for mu in range(len(estimates[0].levels)):
            result.curves[f"level{mu + 1}"] = [
                make_point(db, e.levels[mu].value_bits, e.levels[mu].std_error, D)
                for db, e in zip(spec.esn0_db, estimates)
            ]
    result.n_samples = [e.cm.n_samples for e in estimates]
    return result


def shannon_reference(esn0_db, dim: int) -> list[CurvePoint]:
    """Real-AWGN capacity of ``dim`` dimensions on the same Es/N0 grid."""
    out = []
    for db in esn0_db:
        esn0 = 10.0 ** (db / 10.0)
        per_dim = 0.5 * math.log2(1.0 + 2.0 * esn0 / dim)
        out.append(make_point(db, dim * per_dim, 0.0, dim))
    return out


def write_curve(points, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for p in points:
            w.writerow([repr(p.esn0_db), repr(p.capacity_bits), repr(p.capacity_per_dim),
                        repr(p.ebno_db), repr(p.std_error), p.flag])


def read_curve(path) -> list[CurvePoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: missing or unexpected CSV header")
    return [CurvePoint(*(float(v) for v in r[:5]), r[5]) for r in rows[1:]]


def _wideband_metadata(spec: SweepSpec) -> dict:
    signal_set = spec.signal_set()
    out = {}
    families = {"cm": cm_coefficients(signal_set)}
    labeling = spec.labeling_for(signal_set)
    if labeling is not None:
        families["bicm"] = bicm_coefficients(signal_set, labeling)
    for name, coeffs in families.items():
        summary = wideband_summary(coeffs, spec.dim)
        line = tangent_line(summary)
        out[name] = {
            "c1": coeffs.c1,
            "c2": coeffs.c2,
            "ebno_lim_db": summary.ebno_lim_db,
            "slope_per_dim_3db": summary.slope_per_dim_3db,
            "tangent": None if line is None else [list(p) for p in line.points],
        }
    return out


def write_result(result: SweepResult, out_dir) -> list[Path]:
    """One CSV per curve family plus ``shannon.csv`` and a ``sweep.json`` sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, points in result.curves.items():
        path = out / f"{name}.csv"
        write_curve(points, path)
        written.append(path)
    path = out / "shannon.csv"
    write_curve(shannon_reference(result.spec.esn0_db, result.spec.dim), path)
    written.append(path)
    meta = {
        "spec": asdict(result.spec),
        "dim": result.spec.dim,
        "n_samples": result.n_samples,
        "kernel_backend": kernels.BACKEND,
        "shannon_reference": SHANNON_NOTE,
        "ebno_definition": "Eb/N0 = (Es/N0) / C with C in bits per symbol",
    }
    if result.spec.detection == "coherent":
        meta["wideband"] = _wideband_metadata(result.spec)
    side = out / "sweep.json"
    side.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    written.append(side)
    return written


@dataclass(frozen=True)
class MinEbNo:
    ebno_db: float
    capacity_bits: float
    std_error: float
    at_boundary: bool


def min_ebno(curve) -> MinEbNo:
    """Smallest Eb/N0 along a curve, refined by a parabola through the grid minimum.

    Only reliable points enter; a minimum at either end of the reliable
    range is returned unrefined with ``at_boundary`` set.
    """
    pts = [p for p in curve if p.reliable and math.isfinite(p.ebno_db)]
    if len(pts) < 3:
        raise ValueError("need at least 3 points with capacity distinguishable from zero")
    pts.sort(key=lambda p: p.esn0_db)
    y = np.array([p.ebno_db for p in pts])
    i = int(np.argmin(y))
    if i == 0 or i == len(pts) - 1:
        p = pts[i]
        return MinEbNo(p.ebno_db, p.capacity_bits, p.std_error, True)
    t = np.array([pts[k].esn0_db for k in (i - 1, i, i + 1)])
    yy = y[i - 1 : i + 2]
    cc = np.array([pts[k].capacity_bits for k in (i - 1, i, i + 1)])
    a, b, _ = np.polyfit(t, yy, 2)
    t_star = -b / (2 * a) if a > 0 else t[1]
    t_star = float(np.clip(t_star, t[0], t[2]))
    return MinEbNo(
        float(np.polyval(np.polyfit(t, yy, 2), t_star)),
        float(np.polyval(np.polyfit(t, cc, 2), t_star)),
        pts[i].std_error,
        False,
    )


@dataclass(frozen=True)
class TableRow:
    scheme: str
    mode: str
    labeling: str
    M: str
    ebno_lim_db: float
    slope: float


def table_rows(orders=(2, 4, 8, 16, 32)) -> list[TableRow]:
    """Limit Eb/N0 and wideband slope of every scheme, from trace-based coefficients."""
    rows = []
    for M in orders:
        s = make_ppm(M)
        w = wideband_summary(cm_coefficients(s), s.dim)
        rows.append(TableRow("PPM", "CM", "-", str(M), w.ebno_lim_db, w.slope_per_dim_3db))
    for M in orders:
        s = make_ppm(M)
        w = wideband_summary(bicm_coefficients(s, labeling_natural(s)), s.dim)
        rows.append(TableRow("PPM", "BICM", "any", str(M), w.ebno_lim_db, w.slope_per_dim_3db))
    cm = {}
    for M in orders:
        s = make_bippm(M)
        w = wideband_summary(cm_coefficients(s), s.dim)
        cm[M] = (round(w.ebno_lim_db, 12), round(w.slope_per_dim_3db, 12))
    if len(set(cm.values())) != 1:
        raise AssertionError(f"biPPM CM limits differ across M: {cm}")
    db, slope = next(iter(cm.values()))
    rows.append(TableRow("biPPM", "CM", "-", "all", db, slope))
    for name, rule in (("natural", labeling_natural), ("near-gray", labeling_near_gray)):
        for M in orders:
            s = make_bippm(M)
            w = wideband_summary(bicm_coefficients(s, rule(s)), s.dim)
            rows.append(TableRow("biPPM", "BICM", name, str(M), w.ebno_lim_db, w.slope_per_dim_3db))
    return rows


def _fmt_slope(v: float) -> str:
    text = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def render_table(orders=(2, 4, 8, 16, 32)) -> str:
    header = ("scheme", "mode", "labeling", "M", "EbN0_lim [dB]", "slope [bit/dim/3dB]")
    body = [(r.scheme, r.mode, r.labeling, r.M, f"{r.ebno_lim_db:.2f}", _fmt_slope(r.slope)) for r in table_rows(orders)]
    widths = [max(len(x[c]) for x in [header, *body]) for c in range(len(header))]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines)
