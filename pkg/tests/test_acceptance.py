"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured figure;
the lines are repeated in the pytest terminal summary.  Run this file
directly (``python tests/test_acceptance.py``) to get only those lines.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from analogbf.closed_form import (  # noqa: E402
    endfire_rate,
    endfire_solution,
    flat_multiplier,
    flat_rate,
    flat_solution,
    gain_db,
    max_flat_gain,
    optimal_bandwidth,
)
from analogbf.geometry import ula_geometry  # noqa: E402
from analogbf.optimizer import (  # noqa: E402
    Scenario,
    achievable_rate,
    alternating_optimize,
    kkt_residual,
    power_gap,
    waterfill_s0,
)
from analogbf.power import (  # noqa: E402
    radiated_power_asymptotic,
    radiated_power_omega_form,
    s0_power_weights,
    sphere_average_intensity,
)
from analogbf.spectra import AngularSpectrum, SampledSpectrum, trapezoid_weights  # noqa: E402
from analogbf.synthesis import finite_n_report  # noqa: E402

from conftest import ACCEPTANCE_LINES, BAND_28, BAND_60  # noqa: E402
from oracles import grid_oracle, sort_and_pour  # noqa: E402

RAD60 = math.radians(60)
BANDS = {"28ghz": BAND_28, "60ghz": BAND_60}


def report(num, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{num:2d}] {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


# -- criteria ---------------------------------------------------------------------

def criterion_1():
    db = gain_db(max_flat_gain(RAD60, 27.5e9, 28.35e9))
    return report(1, "max flat gain 28 GHz / 60 deg = 21.2 +- 0.05 dB", abs(db - 21.2) <= 0.05, f"{db:.4f} dB")


def criterion_2():
    worst_k = worst_p = 0.0
    for band in BANDS.values():
        for deg in (45, 60, 75):
            sc = Scenario.from_cn(*band, math.radians(deg), 1e9)
            G, s0 = flat_solution(sc)
            worst_k = max(worst_k, kkt_residual(G, s0, flat_multiplier(sc), sc))
            worst_p = max(worst_p, power_gap(G, s0, sc))
    ok = worst_k < 1e-7 and worst_p < 1e-9
    return report(2, "flat pair KKT < 1e-7 and power gap < 1e-9", ok, f"kkt {worst_k:.2e}, power {worst_p:.2e}")


def criterion_3():
    changes = {}
    for name, band in BANDS.items():
        for db in (60.0, 80.0, 100.0):
            sc = Scenario.from_cn(*band, RAD60, 10 ** (db / 10))
            G0, s00 = flat_solution(sc)
            r0 = achievable_rate(G0, s00, sc)
            res = alternating_optimize(G0, sc, max_iter=1)
            changes[f"{name}@{db:g}"] = abs(res.rate - r0) / r0
    worst = max(changes.values())
    detail = "relative rate change " + ", ".join(f"{k} {v:.2e}" for k, v in changes.items())
    return report(3, "flat start moves < 1e-6 after one alternation", worst < 1e-6, detail)


def _step_G(seed, fc, levels):
    r = np.random.default_rng(seed)
    om = np.linspace(0, 2 * fc, 2001)
    edges = np.sort(r.uniform(0, 2 * fc, levels - 1))
    return AngularSpectrum(om, r.uniform(0.5, 50.0, levels)[np.searchsorted(edges, om)], fc)


def criterion_4(seeds=24):
    worst = 0.0
    for seed in range(seeds):
        r = np.random.default_rng(seed)
        band = BAND_28 if seed % 2 else BAND_60
        deg = float(r.choice([45.0, 60.0, 75.0, 120.0]))
        sc = Scenario.from_cn(*band, math.radians(deg), 10 ** r.uniform(7, 11), freq_bins=64)
        G = _step_G(seed, sc.f_c, int(r.integers(2, 6)))
        s0, _ = waterfill_s0(G, sc)
        f = sc.freq_grid()
        gc = G.evaluate(sc.cos_c * f)
        w = trapezoid_weights(f)
        x = sort_and_pour(w, s0_power_weights(G, f, sc.f_min, sc.f_max), 1 / (sc.kappa * gc), sc.p_r)
        ref = float(w @ np.log2(1 + sc.kappa * gc * x))
        worst = max(worst, abs(achievable_rate(G, s0, sc) - ref) / ref)
    return report(4, f"water-filling = sort-and-pour within 1e-6 ({seeds} seeds)", worst < 1e-6,
                  f"max relative rate error {worst:.2e}")


def _power_corpus():
    for band in BANDS.values():
        f_min, f_max = band
        fc = (f_min + f_max) / 2
        for deg in (45, 60, 75, 120):
            yield flat_solution(Scenario.from_cn(*band, math.radians(deg), 1e9))
        sc = Scenario.from_cn(*band, 0.0, 1e10)
        yield endfire_solution(sc)[0], SampledSpectrum.flat(*band, sc.p_r / sc.bandwidth, sc.freq_bins)
        sc = Scenario.from_cn(*band, RAD60, 1e10, freq_bins=256)
        res = alternating_optimize(_step_G(3, fc, 4), sc)
        yield res.G, res.s0
        r = np.random.default_rng(int(f_min) % 1000)
        for _ in range(20):
            m, k = int(r.integers(2, 100)), int(r.integers(2, 100))
            lo, hi = np.sort(r.uniform(0, 2 * fc, 2))
            G = AngularSpectrum(np.linspace(lo, hi, m), r.uniform(0, 5, m), fc)
            yield G, SampledSpectrum(np.linspace(f_min, f_max, k), r.uniform(0, 2, k))
        yield AngularSpectrum.constant(2.0, fc), SampledSpectrum.flat(*band, 1.0, 64)


def criterion_5():
    worst, count = 0.0, 0
    for G, s0 in _power_corpus():
        f_min, f_max = s0.span
        a = radiated_power_asymptotic(G, s0, f_min, f_max)
        w = radiated_power_omega_form(G, s0, f_min, f_max)
        worst = max(worst, abs(a - w) / a)
        count += 1
    return report(5, f"Omega-form power = frequency-form power within 1e-8 ({count} pairs)", worst < 1e-8,
                  f"max relative difference {worst:.2e}")


def criterion_6():
    worst = 0.0
    r = np.random.default_rng(6)
    fc = 28e9
    for n in (2, 8, 32):
        g = ula_geometry(n, 0.5, fc)
        for _ in range(10):
            b = r.normal(size=n) + 1j * r.normal(size=n)
            nb = np.vdot(b, b).real
            worst = max(worst, abs(sphere_average_intensity(g, b, fc) - nb) / nb)
    return report(6, "Parseval at f_c for d = 1/2, N in {2, 8, 32}", worst < 1e-8, f"max relative error {worst:.2e}")


def criterion_7():
    cns = np.arange(30.0, 120.0 + 1e-9, 2.0)
    diff, endfire_ok = [], True
    for db in cns:
        cn = 10 ** (db / 10)
        flat = {k: flat_rate(Scenario.from_cn(*b, RAD60, cn)) for k, b in BANDS.items()}
        diff.append(flat["28ghz"] - flat["60ghz"])
        for k, b in BANDS.items():
            endfire_ok &= endfire_rate(Scenario.from_cn(*b, 0.0, cn)) < flat[k]
    sign = np.sign(diff)
    changes = np.nonzero(np.diff(sign))[0]
    crossing = sign[0] > 0 and sign[-1] < 0 and changes.size == 1
    ok = bool(crossing and endfire_ok)
    where = f"{cns[changes[0]]:g}-{cns[changes[0] + 1]:g} dB-Hz" if changes.size else "none"
    return report(7, "28 GHz beats 60 GHz below a crossover, reversed above; end-fire below flat", ok,
                  f"crossover {where}, end-fire ordering {'holds' if endfire_ok else 'violated'}")


def criterion_8():
    cns = np.linspace(40.0, 116.0, 20)
    bs, worst = [], 0.0
    for db in cns:
        cn = 10 ** (db / 10)
        b, _ = optimal_bandwidth(60e9, RAD60, cn)
        ref = grid_oracle(60e9, RAD60, cn)
        worst = max(worst, abs(b - ref) / ref)
        bs.append(b)
    bs = np.array(bs)
    mono = bool(np.all(np.diff(bs) >= 0))
    cap = bool(bs.max() <= 40e9 * (1 + 1e-12))
    ok = mono and cap and worst < 1e-3
    return report(8, "optimal bandwidth nondecreasing, <= 40 GHz, matches grid oracle within 0.1%", ok,
                  f"monotone {mono}, max B* {bs.max() / 1e9:.3f} GHz, max oracle deviation {worst:.2e}")


def criterion_9():
    wr = ws = wp = 0.0
    for band in BANDS.values():
        for cn in (1e7, 1e9, 1e11):
            sc = Scenario.from_cn(*band, 0.0, cn)
            G, _ = endfire_solution(sc)
            s0 = SampledSpectrum.flat(*band, sc.p_r / sc.bandwidth, sc.freq_bins)
            r = endfire_rate(sc)
            wr = max(wr, abs(r - achievable_rate(G, s0, sc)) / r)
            ws = max(ws, np.max(np.abs(G.values - G.values[::-1])) / G.values.max())
            wp = max(wp, abs(radiated_power_omega_form(G, s0, *band) - sc.p_r) / sc.p_r)
    ok = wr < 1e-8 and ws < 1e-9 and wp < 1e-8
    return report(9, "end-fire rate, symmetry and power consistency", ok,
                  f"rate {wr:.2e}, symmetry {ws:.2e}, power {wp:.2e}")


def criterion_10():
    sc = Scenario(*BAND_28, RAD60)
    reps = [finite_n_report(n, sc) for n in (8, 32, 128)]
    gaps = [r.gap_db for r in reps]
    dec = gaps[0] > gaps[1] > gaps[2]
    bound_ok = all(r.achieved_max_gain <= r.bound * (1 + 1e-6) for r in reps)
    return report(10, "finite-N gap strictly decreasing over N = 8, 32, 128; bound respected", dec and bound_ok,
                  "gap_db " + " > ".join(f"{g:.3f}" for g in gaps))


def criterion_11():
    def rates(p_r, n0):
        out = []
        for band in BANDS.values():
            sc = Scenario(*band, RAD60, p_r=p_r, n0=n0)
            G0, _ = flat_solution(sc)
            out.append(flat_rate(sc))
            out.append(alternating_optimize(G0, sc.scaled(freq_bins=256)).rate)
            s0, _ = waterfill_s0(_step_G(1, sc.f_c, 3), sc.scaled(freq_bins=128))
            out.append(achievable_rate(_step_G(1, sc.f_c, 3), s0, sc.scaled(freq_bins=128)))
            out.append(endfire_rate(sc.scaled(theta_c=0.0)))
        return np.array(out)

    a, b = rates(1e9, 1.0), rates(1e10, 10.0)
    worst = float(np.max(np.abs(a - b) / a))
    return report(11, "rate invariant under (P_R, N0) -> (10 P_R, 10 N0)", worst < 1e-10,
                  f"max relative difference {worst:.2e}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1:02d}" for i in range(len(CRITERIA))])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
