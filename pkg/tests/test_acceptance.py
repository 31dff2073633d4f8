"""Acceptance criteria, each at its stated tolerance and runtime budget.

Run alone with ``python3 -m pytest tests/test_acceptance.py -v``; the terminal
summary ends with one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest

from orthobicm.channels import ChannelModel, NoiseConfig
from orthobicm.constellation import Labeling, labeling_natural, labeling_near_gray, make_bippm, make_ppm
from orthobicm.mi import (
    DEFAULT_SAMPLES,
    bicm_capacity_decomposed,
    cm_capacity,
    combined_std_error,
    simulate,
)
from orthobicm.sweep import SweepSpec, min_ebno, parse_grid, render_table, run_sweep, table_rows, write_result
from orthobicm.wideband import bicm_coefficients, closed_form, cm_coefficients

pytestmark = pytest.mark.acceptance

ORDERS = [2, 4, 8, 16, 32]
LN2 = math.log(2)

# reference limit Eb/N0 [dB] and wideband slope [bit/dim per 3 dB]
REFERENCE = {
    ("PPM", "CM", "-"): {2: (1.42, 0.5), 4: (-0.34, 0.75), 8: (-1.01, 0.875), 16: (-1.31, 0.9375),
                         32: (-1.45, 0.9688)},
    ("PPM", "BICM", "any"): {2: (1.42, 1.0), 4: (1.42, -0.5), 8: (2.67, -0.075), 16: (4.43, -0.0192),
                             32: (6.47, -0.0054)},
    ("biPPM", "CM", "-"): {"all": (-1.59, 1.0)},
    ("biPPM", "BICM", "natural"): {2: (-1.59, 1.0), 4: (1.42, -0.5), 8: (4.42, -0.04), 16: (7.43, -0.005),
                                   32: (10.45, -0.001)},
    ("biPPM", "BICM", "near-gray"): {2: (-1.59, 1.0), 4: (-1.59, 1.0), 8: (-0.34, 0.75), 16: (1.42, 0.5),
                                     32: (3.46, 0.3125)},
}

# reference cells that contradict the closed forms they should follow from
MISPRINTS = {
    ("PPM", "BICM", "any", "2", "slope"): "one bit per symbol, so BICM equals CM and the slope is 1/2",
    ("biPPM", "BICM", "natural", "8", "db"): "10*log10(4 ln 2) = 4.4289 rounds to 4.43",
    ("biPPM", "BICM", "natural", "16", "db"): "10*log10(8 ln 2) = 7.4392 rounds to 7.44",
    ("biPPM", "BICM", "natural", "8", "slope"): "-1/(4*(4*3-4-1)) = -0.0357 rounds to -0.036",
}

# I(X;Y) of BPSK in bits, Gauss-Hermite oracle below, cross-checked against adaptive quadrature
BPSK_ORACLE = {-3.0: 0.4867135921103437, 0.0: 0.7214515907903849, 3.0: 0.9123521169067309, 6.0: 0.990263801574147}


def bpsk_oracle(esn0_db, n=200):
    esn0 = 10 ** (esn0_db / 10)
    s2 = 1 / (2 * esn0)
    t, w = np.polynomial.hermite.hermgauss(n)
    y = 1 + math.sqrt(2 * s2) * t
    return 1 - float(np.sum(w * np.logaddexp(0, -2 * y / s2)) / math.sqrt(math.pi)) / LN2


def coherent(esn0):
    return ChannelModel("coherent", NoiseConfig(esn0))


# --- criterion 1 -------------------------------------------------------------


def _cells():
    rows = {(r.scheme, r.mode, r.labeling, r.M): r for r in table_rows()}
    for (scheme, mode, lab), by_m in REFERENCE.items():
        for M, (db, slope) in by_m.items():
            row = rows[(scheme, mode, lab, str(M))]
            for what, want, got, tol in (("db", db, row.ebno_lim_db, 0.005), ("slope", slope, row.slope, 0.0005)):
                key = (scheme, mode, lab, str(M), what)
                marks = [pytest.mark.xfail(strict=True, reason=MISPRINTS[key])] if key in MISPRINTS else []
                yield pytest.param(key, want, got, tol, id="-".join(key), marks=marks)


@pytest.mark.parametrize("key,want,got,tol", list(_cells()))
def test_criterion_1_table_cell(acceptance, key, want, got, tol):
    ok = abs(got - want) <= tol
    acceptance(1, "limit Eb/N0 and slope table (+-0.005 dB / +-0.0005)", ok,
               f"{'/'.join(key)}: reference {want}, computed {got:.5f}")
    assert ok


def test_criterion_1_runtime(acceptance):
    t0 = time.perf_counter()
    text = render_table()
    dt = time.perf_counter() - t0
    acceptance(1, "limit Eb/N0 and slope table (+-0.005 dB / +-0.0005)", dt < 1.0, f"render_table in {dt:.3f} s")
    assert dt < 1.0 and len(text.splitlines()) == 23


# --- criterion 2 -------------------------------------------------------------


def test_criterion_2_closed_forms(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    for M in ORDERS:
        p, b = make_ppm(M), make_bippm(M)
        pairs = [
            (cm_coefficients(p), closed_form("ppm", "CM", M)),
            (bicm_coefficients(p, labeling_natural(p)), closed_form("ppm", "BICM", M)),
            (cm_coefficients(b), closed_form("bippm", "CM", M)),
            (bicm_coefficients(b, labeling_natural(b)), closed_form("bippm", "BICM", M, "natural")),
            (bicm_coefficients(b, labeling_near_gray(b)), closed_form("bippm", "BICM", M, "near-gray")),
        ]
        for got, want in pairs:
            for g, w in ((got.c1, want.c1), (got.c2, want.c2)):
                worst = max(worst, abs(g - w) / abs(w) if w else abs(g))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    acceptance(2, "closed forms equal trace-based coefficients (<= 1e-12 rel)", ok,
               f"worst relative deviation {worst:.2e}, {dt:.3f} s")
    assert ok


# --- criterion 3 -------------------------------------------------------------


def test_criterion_3_low_snr_expansion(acceptance):
    t0 = time.perf_counter()
    cases = [
        ("8-PPM", make_ppm(8), labeling_natural(make_ppm(8))),
        ("8-biPPM natural", make_bippm(8), labeling_natural(make_bippm(8))),
        ("8-biPPM near-Gray", make_bippm(8), labeling_near_gray(make_bippm(8))),
    ]
    ok_all = True
    for name, s, lab in cases:
        cm_c, bicm_c = cm_coefficients(s), bicm_coefficients(s, lab)
        for i, x in enumerate((0.02, 0.05, 0.1)):
            est = simulate(s, lab, coherent(x), DEFAULT_SAMPLES, seed=30, grid_index=i, target_se=0.002)
            for mode, e, c in (("CM", est.cm, cm_c), ("BICM", est.bicm, bicm_c)):
                dev = abs(e.value_bits - float(c.capacity_bits(x)))
                tol = 3 * e.std_error + 2 * x**3 / LN2
                ok = dev <= tol
                ok_all &= ok
                acceptance(3, "low-SNR expansion within 3 se + 2x^3/ln2", ok,
                           f"{name} {mode} x={x}: |MC - expansion| = {dev:.2e} <= {tol:.2e}")
    dt = time.perf_counter() - t0
    acceptance(3, "low-SNR expansion within 3 se + 2x^3/ln2", dt < 300, f"{dt:.1f} s")
    assert ok_all and dt < 300


# --- criterion 4 -------------------------------------------------------------


def test_criterion_4_oracle_is_frozen():
    from scipy import integrate, stats

    for db, frozen in BPSK_ORACLE.items():
        assert bpsk_oracle(db) == pytest.approx(frozen, abs=1e-12)
        esn0 = 10 ** (db / 10)
        s2 = 1 / (2 * esn0)
        f = lambda y: stats.norm.pdf(y, 1, math.sqrt(s2)) * np.logaddexp(0, -2 * y / s2)
        quad = 1 - integrate.quad(f, -np.inf, np.inf, epsabs=1e-13)[0] / LN2
        assert quad == pytest.approx(frozen, abs=1e-8)


def test_criterion_4_bpsk(acceptance):
    t0 = time.perf_counter()
    ok_all = True
    for i, db in enumerate((0.0, 3.0, 6.0)):
        est = cm_capacity(make_bippm(2), None, coherent(10 ** (db / 10)), DEFAULT_SAMPLES, seed=40, grid_index=i)
        oracle = bpsk_oracle(db)
        ok = abs(est.value_bits - oracle) <= 3 * est.std_error
        ok_all &= ok
        acceptance(4, "BPSK capacity vs Gauss-Hermite oracle within 3 se", ok,
                   f"{db:+.0f} dB: MC {est.value_bits:.5f} +- {est.std_error:.1e}, oracle {oracle:.5f}")
    dt = time.perf_counter() - t0
    acceptance(4, "BPSK capacity vs Gauss-Hermite oracle within 3 se", dt < 60, f"{dt:.1f} s")
    assert ok_all and dt < 60


@pytest.mark.xfail(strict=True, reason="0.486 bits is the oracle value at -3 dB; at 0 dB it is 0.7215")
def test_criterion_4_quoted_reference_value():
    assert bpsk_oracle(0.0) == pytest.approx(0.486, abs=0.001)


# --- criterion 5 -------------------------------------------------------------

C5 = "structural equalities within 3 combined se"
SNRS = (0.25, 1.0, 4.0)


def _close(a, b, *others):
    return abs(a.value_bits - b.value_bits) <= 3 * combined_std_error(a, b, *others)


@pytest.fixture(scope="module")
def c5_clock():
    return {"t": 0.0}


def _timed(c5_clock, fn):
    t0 = time.perf_counter()
    out = fn()
    c5_clock["t"] += time.perf_counter() - t0
    return out


def test_criterion_5a_gray_small_bippm(acceptance, c5_clock):
    def run():
        ok = True
        for M in (2, 4):
            s = make_bippm(M)
            for i, x in enumerate(SNRS):
                est = simulate(s, labeling_near_gray(s), coherent(x), seed=51, grid_index=i)
                good = _close(est.bicm, est.cm)
                ok &= good
                acceptance(5, C5, good, f"(a) {M}-biPPM x={x}: BICM {est.bicm.value_bits:.4f} CM {est.cm.value_bits:.4f}")
        return ok

    assert _timed(c5_clock, run)


def test_criterion_5b_ppm_labeling_invariance(acceptance, c5_clock):
    rng = np.random.default_rng(2024)

    def run():
        ok = True
        for M in (4, 8, 16):
            s = make_ppm(M)
            labs = [Labeling(rng.permutation(M)) for _ in range(2)]
            for i, x in enumerate(SNRS):
                a, b = (simulate(s, lab, coherent(x), seed=52, grid_index=i).bicm for lab in labs)
                good = _close(a, b)
                ok &= good
                acceptance(5, C5, good, f"(b) {M}-PPM x={x}: BICM {a.value_bits:.4f} vs {b.value_bits:.4f}")
        return ok

    assert _timed(c5_clock, run)


def test_criterion_5c_equal_levels(acceptance, c5_clock):
    def run():
        ok = True
        for name, s, lab in [
            ("8-PPM", make_ppm(8), labeling_natural(make_ppm(8))),
            ("16-PPM", make_ppm(16), labeling_natural(make_ppm(16))),
            ("8-biPPM near-Gray", make_bippm(8), labeling_near_gray(make_bippm(8))),
            ("16-biPPM near-Gray", make_bippm(16), labeling_near_gray(make_bippm(16))),
        ]:
            for i, x in enumerate(SNRS):
                levels = simulate(s, lab, coherent(x), seed=53, grid_index=i).levels
                good = all(_close(a, b) for a in levels for b in levels)
                ok &= good
                spread = max(v.value_bits for v in levels) - min(v.value_bits for v in levels)
                acceptance(5, C5, good, f"(c) {name} x={x}: level spread {spread:.1e}")
        return ok

    assert _timed(c5_clock, run)


def test_criterion_5d_bicm_below_cm(acceptance, c5_clock):
    def run():
        ok = True
        for M in (4, 8, 16):
            for s, rules in ((make_ppm(M), [labeling_natural]), (make_bippm(M), [labeling_natural, labeling_near_gray])):
                for rule in rules:
                    for i, x in enumerate(SNRS):
                        est = simulate(s, rule(s), coherent(x), seed=54, grid_index=i)
                        good = est.bicm.value_bits <= est.cm.value_bits + 3 * combined_std_error(est.bicm, est.cm)
                        ok &= good
                        acceptance(5, C5, good, f"(d) {M}-{s.kind} {rule(s).name} x={x}: "
                                   f"BICM {est.bicm.value_bits:.4f} <= CM {est.cm.value_bits:.4f}")
        return ok

    assert _timed(c5_clock, run)


def test_criterion_5e_decomposition(acceptance, c5_clock):
    s = make_bippm(8)
    lab = labeling_natural(s)

    def run():
        ok = True
        for i, x in enumerate(SNRS):
            direct = simulate(s, lab, coherent(x), seed=55, grid_index=i).bicm
            dec = bicm_capacity_decomposed(s, lab, coherent(x), seed=55, grid_index=i)
            good = _close(direct, dec)
            ok &= good
            acceptance(5, C5, good, f"(e) 8-biPPM natural x={x}: levels {direct.value_bits:.4f} "
                       f"decomposition {dec.value_bits:.4f}")
        return ok

    assert _timed(c5_clock, run)


def test_criterion_5_runtime(acceptance, c5_clock):
    dt = c5_clock["t"]
    acceptance(5, C5, dt < 600, f"{dt:.1f} s")
    assert dt < 600


# --- criterion 6 -------------------------------------------------------------

C6 = "noncoherent curves: interior Eb/N0 minimum, below coherent everywhere"
GRID6 = parse_grid("-10:1:20")


@pytest.fixture(scope="module")
def c6_clock():
    return {"t": 0.0}


def _check_noncoherent(acceptance, name, spec, coh_spec):
    non = run_sweep(spec)
    coh = run_sweep(coh_spec)
    ok = True
    for fam in non.curves:
        curve = non.curves[fam]
        m = min_ebno(curve)
        interior = not m.at_boundary and m.capacity_bits > 3 * m.std_error
        below = all(n.capacity_bits <= c.capacity_bits + 3 * math.hypot(n.std_error, c.std_error)
                    for n, c in zip(curve, coh.curves[fam]))
        good = interior and below
        ok &= good
        acceptance(6, C6, good, f"{name} {fam}: min Eb/N0 {m.ebno_db:.2f} dB at C = {m.capacity_bits:.3f} "
                   f"({'interior' if interior else 'NOT interior'}), "
                   f"{'below' if below else 'NOT below'} coherent")
    return ok


@pytest.mark.parametrize("M", [2, 4, 8, 16])
def test_criterion_6_energy_ppm(acceptance, c6_clock, M):
    t0 = time.perf_counter()
    spec = SweepSpec("ppm", M, "natural", "energy", GRID6, seed=60 + M)
    coh = SweepSpec("ppm", M, "natural", "coherent", GRID6, seed=60 + M)
    ok = _check_noncoherent(acceptance, f"energy {M}-PPM", spec, coh)
    c6_clock["t"] += time.perf_counter() - t0
    assert ok


def test_criterion_6_differential_bpsk(acceptance, c6_clock):
    t0 = time.perf_counter()
    spec = SweepSpec("bippm", 2, "natural", "differential", GRID6, seed=66)
    coh = SweepSpec("bippm", 2, "natural", "coherent", GRID6, seed=66)
    ok = _check_noncoherent(acceptance, "differential BPSK", spec, coh)
    c6_clock["t"] += time.perf_counter() - t0
    assert ok


def test_criterion_6_runtime(acceptance, c6_clock):
    dt = c6_clock["t"]
    acceptance(6, C6, dt < 900, f"{dt:.1f} s")
    assert dt < 900


# --- criterion 7 -------------------------------------------------------------

C7 = "determinism: identical CSV bytes on repeat, worker count changes nothing"


@pytest.mark.parametrize("kind", ["coherent", "energy"])
def test_criterion_7_determinism(acceptance, tmp_path, kind):
    if kind == "coherent":
        spec = SweepSpec("bippm", 8, "natural", "coherent", parse_grid("-4:2:6"), n_samples=50_000, seed=7)
    else:
        spec = SweepSpec("ppm", 4, "natural", "energy", parse_grid("-2:2:8"), n_samples=50_000, seed=7)
    outs = {}
    for tag, workers in (("a", 1), ("b", 1), ("c", 2)):
        d = tmp_path / tag
        write_result(run_sweep(spec, workers=workers), d)
        outs[tag] = {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}
    identical = outs["a"] == outs["b"]
    worst = 0.0
    for name, data in outs["a"].items():
        a = np.genfromtxt(data.decode().splitlines(), delimiter=",", skip_header=1, usecols=range(5))
        c = np.genfromtxt(outs["c"][name].decode().splitlines(), delimiter=",", skip_header=1, usecols=range(5))
        worst = max(worst, float(np.nanmax(np.abs(a - c))))
    ok = identical and worst <= 1e-9
    acceptance(7, C7, ok, f"{kind}: repeat identical={identical}, max |1 worker - 2 workers| = {worst:.1e}")
    assert ok
