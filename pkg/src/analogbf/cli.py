"""Command-line front end.

Subcommands write data (CSV) or reports (JSON); nothing is plotted.  Exit
codes: 0 success, 2 argument or parse error, 3 regime or infeasibility
error, 4 numerical non-convergence.

Scenario files are YAML::

    band: 28ghz                  # or 60ghz, or {f_min_hz: ..., f_max_hz: ...}
    theta_c_deg: 60
    cn_dbhz: 80                  # or {start: 40, stop: 110, step: 10}, or "-inf"
    grid: {freq_bins: 2048, u_nodes: 64, phi_nodes: 128}
    tolerances: {power_rel: 1.0e-9, mu_rel: 1.0e-12, rate_rel: 1.0e-12}

Command-line flags override file values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import closed_form
from .errors import (
    AnalogBFError,
    InfeasibleError,
    InvalidArgumentError,
    NonConvergenceError,
    UnsupportedRegimeError,
)
from .geometry import Direction, intensity_grid, matched_beamformer, uca_geometry, ula_geometry
from .optimizer import Scenario, alternating_optimize
from .spectra import format_float
from .synthesis import DEFAULT_BETA, DEFAULT_GUARD, finite_n_report

BANDS = {
    "28ghz": (27.5e9, 28.35e9),
    "60ghz": (57e9, 66e9),
}
EXIT_ARGS, EXIT_REGIME, EXIT_NONCONV = 2, 3, 4

_CONFIG_KEYS = {"band", "theta_c_deg", "cn_dbhz", "grid", "tolerances"}
_GRID_KEYS = {"freq_bins": "freq_bins", "u_nodes": "u_nodes", "phi_nodes": "phi_nodes"}
_TOL_KEYS = {"power_rel": "power_rtol", "mu_rel": "mu_rtol", "rate_rel": "rate_rtol"}


class UsageError(InvalidArgumentError):
    pass


# -- parsing helpers ------------------------------------------------------------

def parse_cn(text) -> list[float]:
    """C/N in dB-Hz: a value, ``start:stop:step`` (stop inclusive) or ``-inf``."""
    if isinstance(text, dict):
        try:
            start, stop, step = (float(text[k]) for k in ("start", "stop", "step"))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"cn_dbhz sweep needs numeric start/stop/step: {text!r}") from exc
        return _sweep(start, stop, step)
    if isinstance(text, (int, float)):
        return [float(text)]
    s = str(text).strip()
    try:
        if ":" in s:
            parts = s.split(":")
            if len(parts) != 3:
                raise ValueError
            return _sweep(*(float(p) for p in parts))
        v = float(s)
    except ValueError as exc:
        raise UsageError(f"cannot parse C/N {text!r}; use v, start:stop:step or -inf") from exc
    if math.isnan(v) or v == math.inf:
        raise UsageError(f"invalid C/N {text!r}")
    return [v]


def _sweep(start, stop, step):
    if not all(math.isfinite(x) for x in (start, stop, step)) or step <= 0 or stop < start:
        raise UsageError(f"invalid sweep {start}:{stop}:{step}; need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def cn_linear(cn_dbhz: float) -> float:
    return 0.0 if cn_dbhz == -math.inf else 10.0 ** (cn_dbhz / 10.0)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read scenario file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"malformed scenario file {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise UsageError(f"scenario file {path} must hold a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown scenario keys: {sorted(unknown)}")
    for key, allowed in (("grid", _GRID_KEYS), ("tolerances", _TOL_KEYS)):
        sub = data.get(key, {}) or {}
        if not isinstance(sub, dict) or set(sub) - set(allowed):
            raise UsageError(f"invalid '{key}' section: {sub!r}")
    return data


def _band_from_config(band):
    if isinstance(band, str):
        return band.lower(), None, None
    if isinstance(band, dict):
        if "preset" in band:
            return str(band["preset"]).lower(), None, None
        try:
            return "custom", float(band["f_min_hz"]), float(band["f_max_hz"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"band needs f_min_hz and f_max_hz: {band!r}") from exc
    raise UsageError(f"invalid band entry {band!r}")


def resolve(args) -> dict:
    """Merge the scenario file (if any) and explicit flags."""
    cfg = load_config(args.config) if args.config else {}
    name, fmin, fmax = _band_from_config(cfg["band"]) if "band" in cfg else (None, None, None)
    if args.band is not None:
        name = args.band
    if args.fmin_hz is not None or args.fmax_hz is not None:
        if args.band is None:
            name = "custom"
        fmin = args.fmin_hz if args.fmin_hz is not None else fmin
        fmax = args.fmax_hz if args.fmax_hz is not None else fmax
    name = name or "28ghz"
    if name == "custom":
        if fmin is None or fmax is None:
            raise UsageError("--band custom needs --fmin-hz and --fmax-hz")
    elif name in BANDS:
        fmin, fmax = BANDS[name]
    else:
        raise UsageError(f"unknown band {name!r}; choose 28ghz, 60ghz or custom")
    if not 0 < fmin < fmax:
        raise UsageError(f"need 0 < f_min < f_max, got [{fmin}, {fmax}]")
    theta = args.theta if args.theta is not None else cfg.get("theta_c_deg")
    if theta is not None:
        theta = float(theta)
        if not 0 <= theta <= 180:
            raise UsageError(f"theta must be in [0, 180] degrees, got {theta}")
    cn = args.cn_dbhz if args.cn_dbhz is not None else cfg.get("cn_dbhz")
    grid = {_GRID_KEYS[k]: int(v) for k, v in (cfg.get("grid") or {}).items()}
    tol = {_TOL_KEYS[k]: float(v) for k, v in (cfg.get("tolerances") or {}).items()}
    return {
        "band": name, "f_min": float(fmin), "f_max": float(fmax), "theta_deg": theta,
        "cn": None if cn is None else parse_cn(cn), "settings": {**grid, **tol},
    }


def _need_theta(r, default=None):
    if r["theta_deg"] is None:
        if default is None:
            raise UsageError("--theta is required")
        return default
    return r["theta_deg"]


def _need_cn(r):
    if r["cn"] is None:
        raise UsageError("--cn-dbhz is required")
    return r["cn"]


# -- output ---------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_float(v)


def emit_csv(out, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    _write(out, buf.getvalue())


def emit_json(out, obj):
    _write(out, json.dumps(obj, indent=2, allow_nan=True) + "\n")


def _write(out, text):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


# -- commands -------------------------------------------------------------------

def cmd_gain(args):
    r = resolve(args)
    theta = math.radians(_need_theta(r))
    g = closed_form.max_flat_gain(theta, r["f_min"], r["f_max"])
    emit_json(args.out, {
        "band": r["band"], "f_min_hz": r["f_min"], "f_max_hz": r["f_max"], "theta_deg": r["theta_deg"],
        "gain_linear": g, "gain_db": closed_form.gain_db(g), "regime": "broadside-side",
    })


def cmd_pattern(args):
    r = resolve(args)
    f_c = (r["f_min"] + r["f_max"]) / 2
    theta_c = math.radians(_need_theta(r, 90.0))
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.array == "ula":
        geo = ula_geometry(args.n, args.spacing, f_c)
    else:
        geo = uca_geometry(args.n, args.radius_m, f_c)
    b = matched_beamformer(geo, f_c, Direction(theta_c))
    if args.freq_points < 1 or args.theta_points < 2:
        raise UsageError("need --freq-points >= 1 and --theta-points >= 2")
    freqs = np.linspace(r["f_min"], r["f_max"], args.freq_points)
    thetas_deg = np.linspace(0.0, 180.0, args.theta_points)
    inten = intensity_grid(geo, b, freqs, np.radians(thetas_deg))
    rows = ((f, t, inten[i, j]) for i, f in enumerate(freqs) for j, t in enumerate(thetas_deg))
    emit_csv(args.out, ("freq_hz", "theta_deg", "intensity"), rows)


def _scenario(r, theta_deg, cn_dbhz, f_min=None, f_max=None):
    return Scenario.from_cn(f_min or r["f_min"], f_max or r["f_max"], math.radians(theta_deg),
                            cn_linear(cn_dbhz), **r["settings"])


def cmd_rate_curve(args):
    r = resolve(args)
    theta = _need_theta(r)
    rows = []
    for cn in _need_cn(r):
        sc = _scenario(r, theta, cn)
        try:
            flat = closed_form.flat_rate(sc)
        except UnsupportedRegimeError as exc:
            warn(f"cn={cn:g} dB-Hz: flat rate unavailable ({exc})")
            flat = None
        endfire = closed_form.endfire_rate(sc.scaled(theta_c=0.0))
        rows.append((cn, flat, endfire))
    emit_csv(args.out, ("cn_dbhz", "rate_bps_flat", "rate_bps_endfire"), rows)


def cmd_bandwidth_opt(args):
    r = resolve(args)
    theta = math.radians(_need_theta(r))
    f_c = args.fc_hz if args.fc_hz is not None else (r["f_min"] + r["f_max"]) / 2
    if not f_c > 0:
        raise UsageError("--fc-hz must be positive")
    rows = []
    for cn in _need_cn(r):
        b, rate = closed_form.optimal_bandwidth(f_c, theta, cn_linear(cn))
        rows.append((cn, b, rate))
    emit_csv(args.out, ("cn_dbhz", "b_opt_hz", "rate_bps"), rows)


def _sidecar_paths(args):
    if args.sidecar_dir is not None:
        base = Path(args.sidecar_dir)
        stem = Path(args.out).stem if args.out not in (None, "-") else "optimize"
    elif args.out not in (None, "-"):
        base, stem = Path(args.out).parent, Path(args.out).stem
    else:
        base, stem = Path("."), "optimize"
    base.mkdir(parents=True, exist_ok=True)
    return base / f"{stem}.G.csv", base / f"{stem}.s0.csv"


def cmd_optimize(args):
    r = resolve(args)
    theta = _need_theta(r)
    cns = _need_cn(r)
    if len(cns) != 1:
        raise UsageError("optimize takes a single C/N value")
    sc = _scenario(r, theta, cns[0])
    G0, _ = closed_form.flat_solution(sc)
    res = alternating_optimize(G0, sc, max_iter=args.max_iter)
    g_path, s_path = _sidecar_paths(args)
    res.G.to_csv(g_path)
    res.s0.to_csv(s_path)
    report = {
        "band": r["band"], "f_min_hz": sc.f_min, "f_max_hz": sc.f_max, "theta_deg": theta,
        "cn_dbhz": cns[0], "rate_bps": res.rate, "rate_bps_flat": closed_form.flat_rate(sc),
        "mu": res.mu, "kkt_residual": res.kkt_residual, "power_gap": res.power_gap,
        "iterations": res.iterations, "converged": res.converged,
        "g_csv": str(g_path), "s0_csv": str(s_path),
    }
    emit_json(args.out, report)
    if not res.converged:
        raise NonConvergenceError(f"alternating optimization stopped after {res.iterations} iterations")


def _parse_ns(text):
    try:
        ns = [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse --n {text!r}") from exc
    if not ns or any(n < 2 for n in ns):
        raise UsageError("--n needs element counts >= 2")
    return ns


def _weights_path(template, n, many):
    p = Path(template)
    return p.with_name(f"{p.stem}_n{n}{p.suffix}") if many else p


def cmd_synthesize(args):
    r = resolve(args)
    theta = _need_theta(r)
    ns = _parse_ns(args.n)
    sc = Scenario(r["f_min"], r["f_max"], math.radians(theta), **r["settings"])
    reports = []
    for n in ns:
        rep = finite_n_report(n, sc, beta=args.beta, guard=args.guard)
        path = _weights_path(args.weights, n, len(ns) > 1)
        m = np.arange(n)
        emit_csv(path, ("index", "re", "im"), zip(m, rep.weights.real, rep.weights.imag))
        reports.append({
            "n": n, "achieved_min_gain": rep.achieved_min_gain, "achieved_max_gain": rep.achieved_max_gain,
            "bound": rep.bound, "gap_db": rep.gap_db, "ripple_db": rep.ripple_db, "weights_csv": str(path),
        })
    emit_json(args.out, {"band": r["band"], "theta_deg": theta, "beta": args.beta,
                         "guard": args.guard, "reports": reports})


# -- argument parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--band", choices=["28ghz", "60ghz", "custom"], default=None)
    common.add_argument("--fmin-hz", type=float, default=None)
    common.add_argument("--fmax-hz", type=float, default=None)
    common.add_argument("--theta", type=float, default=None, help="steering angle in degrees")
    common.add_argument("--cn-dbhz", default=None, help="C/N in dB-Hz: v, start:stop:step or -inf")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--config", default=None, help="YAML scenario file")

    p = argparse.ArgumentParser(prog="analogbf", description="Limits of frequency-flat analog beamforming.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gain", parents=[common], help="maximum flat gain toward theta_c")
    s.set_defaults(func=cmd_gain)

    s = sub.add_parser("pattern", parents=[common], help="frequency/angle intensity grid")
    s.add_argument("--array", choices=["ula", "uca"], default="ula")
    s.add_argument("--n", type=int, default=16)
    s.add_argument("--spacing", type=float, default=0.5, help="ULA spacing in wavelengths at f_c")
    s.add_argument("--radius-m", type=float, default=None, help="UCA radius (default N lambda / 4 pi)")
    s.add_argument("--freq-points", type=int, default=201)
    s.add_argument("--theta-points", type=int, default=181)
    s.set_defaults(func=cmd_pattern)

    s = sub.add_parser("rate-curve", parents=[common], help="flat and end-fire rates vs C/N")
    s.set_defaults(func=cmd_rate_curve)

    s = sub.add_parser("bandwidth-opt", parents=[common], help="rate-optimal bandwidth vs C/N")
    s.add_argument("--fc-hz", type=float, default=None, help="centre frequency (default: band centre)")
    s.set_defaults(func=cmd_bandwidth_opt)

    s = sub.add_parser("optimize", parents=[common], help="alternating joint optimization")
    s.add_argument("--sidecar-dir", default=None, help="directory for the G and S0 CSV files")
    s.add_argument("--max-iter", type=int, default=200)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("synthesize", parents=[common], help="finite-N flat-beam weights")
    s.add_argument("--n", default="32", help="element count or comma-separated list")
    s.add_argument("--beta", type=float, default=DEFAULT_BETA, help="Kaiser window beta")
    s.add_argument("--guard", type=float, default=DEFAULT_GUARD,
                   help="target widening as a fraction of the window transition width")
    s.add_argument("--weights", default="weights.csv", help="weights CSV path")
    s.set_defaults(func=cmd_synthesize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (UnsupportedRegimeError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (InvalidArgumentError, AnalogBFError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    return 0


if __name__ == "__main__":
    sys.exit(main())
