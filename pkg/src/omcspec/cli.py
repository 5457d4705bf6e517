"""Command-line front end.

Subcommands::

    omcspec spectrum  [--preset fig2] [--time T ...] [--out DIR] [--svg]
    omcspec evolve    [--tmax T] [--points N]
    omcspec dressed   [--mmax N]
    omcspec ledger    [--tmax T]
    omcspec presets

Settings are resolved in the order: built-in ``fig2`` defaults, ``--preset``
(or the config's ``"preset"`` key), the ``--config`` JSON document, then
individual flags.  Exit codes: 0 success, 1 numeric/model error (error JSON
on stderr and ``error.json`` in the output directory), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, kernels, output, presets
from .dressed import UnsupportedRegimeError, closed_form_levels, diagonalize_truncated, transition_table
from .hamiltonian import generator
from .model import Branch, ParameterError, SystemParams, check, make_initial_state, validate
from .propagator import NonDiagonalizableError, amplitude_series, decompose, flux_ledger
from .spectrum import (Backend, FilterSpec, Mode, find_peaks, spectrum, stepped_series,
                       thermal_spectrum, thermal_weights)

DEFAULT_OUT = "omcspec_out"
DRESSED_MIN_WEIGHT = 1e-4
LEDGER_SAMPLES = 200

_CONFIG_KEYS = {
    "preset", "params", "filter_gamma", "delta_min", "delta_max", "delta_points", "times",
    "initial_state", "mode", "backend", "thermal", "ledger_tmax", "peak_prominence", "out", "svg",
}
_DEFAULTS = {
    "delta_min": -8.0,
    "delta_max": 8.0,
    "delta_points": 801,
    "initial_state": {"branch": Branch.ATOM_EXCITED.value, "m0": 0},
    "mode": Mode.INCOHERENT.value,
    "backend": Backend.CLOSED_FORM.value,
    "ledger_tmax": 120.0,
    "peak_prominence": 0.05,
    "out": DEFAULT_OUT,
    "svg": False,
}


class ConfigError(ValueError):
    """Malformed configuration (usage error, exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    filter: FilterSpec
    times: tuple
    initial_branch: Branch = Branch.ATOM_EXCITED
    initial_m0: int = 0
    mode: Mode = Mode.INCOHERENT
    backend: Backend = Backend.CLOSED_FORM
    thermal: bool = False
    ledger_tmax: float = 120.0
    peak_prominence: float = 0.05
    out: Path = Path(DEFAULT_OUT)
    svg: bool = False
    preset: str | None = None

    def to_dict(self) -> dict:
        grid = self.filter.delta_grid
        return {
            "preset": self.preset,
            "params": self.params.to_dict(),
            "filter_gamma": self.filter.gamma,
            "delta_min": float(grid[0]),
            "delta_max": float(grid[-1]),
            "delta_points": int(grid.size),
            "times": list(self.times),
            "initial_state": {"branch": self.initial_branch.value, "m0": self.initial_m0},
            "mode": self.mode.value,
            "backend": self.backend.value,
            "thermal": self.thermal,
            "ledger_tmax": self.ledger_tmax,
            "peak_prominence": self.peak_prominence,
            "svg": self.svg,
        }

    def initial_state(self):
        return make_initial_state(self.initial_branch, self.initial_m0, self.params)


def resolve_config(document: dict | None = None, preset: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, preset, config document and overrides into a :class:`RunConfig`.

    ``overrides`` uses the config-document keys; ``overrides["params"]`` is
    merged key by key.  Times are sorted and de-duplicated.
    """
    document = dict(document or {})
    overrides = dict(overrides or {})
    unknown = set(document) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    name = preset or document.get("preset") or "fig2"
    try:
        merged = {**_DEFAULTS, **presets.get(name)}
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    for layer in (document, overrides):
        for key, value in layer.items():
            if key == "params":
                if not isinstance(value, dict):
                    raise ConfigError("'params' must be an object")
                merged["params"] = {**merged["params"], **value}
            elif key == "initial_state":
                merged["initial_state"] = {**merged["initial_state"], **value}
            elif key != "preset":
                merged[key] = value
    try:
        params = SystemParams.from_dict(merged["params"])
        grid = np.linspace(float(merged["delta_min"]), float(merged["delta_max"]), int(merged["delta_points"]))
        filt = FilterSpec(float(merged["filter_gamma"]), grid)
        times = tuple(sorted({float(t) for t in merged["times"]}))
        if not times or any(not (math.isfinite(t) and t >= 0) for t in times):
            raise ConfigError("times must be a non-empty list of finite non-negative numbers")
        init = merged["initial_state"]
        cfg = RunConfig(
            params=params,
            filter=filt,
            times=times,
            initial_branch=Branch(init["branch"]),
            initial_m0=int(init["m0"]),
            mode=Mode(merged["mode"]),
            backend=Backend(merged["backend"]),
            thermal=bool(merged["thermal"]),
            ledger_tmax=float(merged["ledger_tmax"]),
            peak_prominence=float(merged["peak_prominence"]),
            out=Path(merged["out"]),
            svg=bool(merged["svg"]),
            preset=name,
        )
    except ConfigError:
        raise
    except ParameterError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    if not 0 <= cfg.initial_m0 <= params.m_max:
        raise ConfigError(f"initial m0 = {cfg.initial_m0} outside [0, {params.m_max}]")
    if not 0 < cfg.peak_prominence < 1:
        raise ConfigError("peak_prominence must lie in (0, 1)")
    return cfg


def load_document(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


# artifact builders ---------------------------------------------------------

def compute_spectrum(cfg: RunConfig):
    if cfg.thermal:
        return thermal_spectrum(cfg.params, cfg.filter, cfg.times, cfg.mode, cfg.backend)
    return spectrum(cfg.params, cfg.filter, cfg.times, cfg.initial_state(), cfg.mode, cfg.backend)


def peaks_document(result, prominence: float) -> dict:
    out = []
    for t, row in zip(result.times, result.values):
        ps = find_peaks(row, result.delta_grid, prominence)
        out.append({
            "t": t,
            "threshold": ps.threshold,
            "peaks": [{"delta": p.location, "height": p.height, "prominence": p.prominence} for p in ps],
        })
    return {"prominence_fraction": prominence, "spectra": out}


def dressed_document(cfg: RunConfig) -> dict:
    params = cfg.params
    dressed = diagonalize_truncated(params)
    table = transition_table(dressed, cfg.initial_state(), params, cfg.filter.gamma)
    doc = {
        "m_max": params.m_max,
        "levels": dressed.levels,
        "ground_levels": dressed.ground_levels,
        "min_weight": DRESSED_MIN_WEIGHT,
        "transitions": [
            {"upper": r.upper, "lower": r.lower, "frequency": r.frequency, "weight": r.weight,
             "bare_weight": r.bare_weight, "linewidth": r.linewidth}
            for r in sorted(table.significant(DRESSED_MIN_WEIGHT), key=lambda r: r.frequency)
        ],
    }
    if params.delta_a == 0:
        cf = closed_form_levels(params)
        doc["single_phonon_closed_form"] = {
            "excited": {f"{'+' if s1 > 0 else '-'}{'+' if s2 > 0 else '-'}": e for (s1, s2), e in cf.excited.items()},
            "ground": cf.ground,
        }
    return doc


def ledger_document(cfg: RunConfig, tmax: float | None = None) -> dict:
    tmax = cfg.ledger_tmax if tmax is None else tmax
    led = flux_ledger(decompose(generator(cfg.params)), cfg.initial_state(), cfg.params, tmax)
    stride = max(1, (led.times.size - 1) // LEDGER_SAMPLES)
    sl = slice(None, None, stride)
    return {
        "summary": led.summary(),
        "series": {
            "t": led.times[sl],
            "norm2": led.norm2[sl],
            "detected": led.detected[sl],
            "spontaneous": led.spontaneous[sl],
            "phonon_loss": led.phonon_loss[sl],
        },
    }


def meta_document(cfg: RunConfig) -> dict:
    meta = {
        "version": __version__,
        "kernels": kernels.IMPLEMENTATION,
        "config": cfg.to_dict(),
        "diagnostics": [{"level": d.level, "code": d.code, "message": d.message} for d in validate(cfg.params)],
        "csv_columns": ["t", "delta", "N"],
    }
    if cfg.thermal:
        p, tail = thermal_weights(cfg.params.mbar, cfg.params.m_max)
        meta["thermal"] = {"weights": p, "tail": tail}
    return meta


def run(cfg: RunConfig) -> int:
    """Compute the spectrum set for ``cfg`` and write every artifact to ``cfg.out``."""
    check(cfg.params)
    out = Path(cfg.out)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = compute_spectrum(cfg)
    output.write_atomic(out / "spectrum.csv", output.spectrum_csv(result.times, result.delta_grid, result.values))
    output.write_json(out / "peaks.json", peaks_document(result, cfg.peak_prominence))
    output.write_json(out / "dressed.json", dressed_document(cfg))
    output.write_json(out / "ledger.json", ledger_document(cfg))
    output.write_json(out / "meta.json", meta_document(cfg))
    if cfg.svg:
        labels = [f"t = {t:g}" for t in result.times]
        output.write_atomic(out / "plot.svg", output.svg_plot(result.delta_grid, result.values, labels))
    return 0


def evolve_csv(cfg: RunConfig, tmax: float, points: int) -> str:
    params = cfg.params
    check(params)
    if points < 2 or not tmax > 0:
        raise ConfigError("evolve needs --points >= 2 and --tmax > 0")
    t = np.linspace(0.0, tmax, points)
    psi0 = cfg.initial_state()
    try:
        amps = amplitude_series(decompose(generator(params)), psi0, t)
    except NonDiagonalizableError:
        amps = stepped_series(generator(params).entries, psi0.amps, t[1], points)
    n = params.n_phonon
    header = ["t", "norm2"]
    for prefix in ("a", "b"):
        for m in range(n):
            header += [f"re_{prefix}{m}", f"im_{prefix}{m}"]
    cols = [t, np.sum(np.abs(amps) ** 2, axis=1)]
    for i in range(2 * n):
        cols += [amps[:, i].real, amps[:, i].imag]
    return output.table_csv(header, np.column_stack(cols))


# argument parsing ----------------------------------------------------------

_PARAM_FLAGS = {
    "ga": "g_a", "gm": "g_m", "kappa": "kappa", "gamma_a": "gamma_a", "gamma_m": "gamma_m",
    "mbar": "mbar", "delta_a": "delta_a", "mmax": "m_max",
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="PATH", help="JSON config document")
    g.add_argument("--preset", metavar="NAME", help=f"built-in parameter set ({', '.join(sorted(presets.PRESETS))})")
    g.add_argument("--out", metavar="DIR", help=f"output directory (default {DEFAULT_OUT})")
    m = p.add_argument_group("model")
    m.add_argument("--ga", type=float, help="atom-cavity coupling g_a")
    m.add_argument("--gm", type=float, help="optomechanical coupling g_m")
    m.add_argument("--kappa", type=float, help="cavity decay rate")
    m.add_argument("--gamma-a", dest="gamma_a", type=float, help="atomic decay rate")
    m.add_argument("--gamma-m", dest="gamma_m", type=float, help="mechanical damping rate")
    m.add_argument("--mbar", type=float, help="thermal phonon number")
    m.add_argument("--delta-a", dest="delta_a", type=float, help="atom-cavity detuning")
    m.add_argument("--mmax", type=int, help="phonon cutoff")
    m.add_argument("--initial", choices=[b.value for b in Branch], help="initial branch (default atom_excited)")
    m.add_argument("--m0", type=int, help="initial phonon number")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omcspec", description="Filtered emission spectra of an atom in an optomechanical cavity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common()

    sp = sub.add_parser("spectrum", parents=[common], help="compute spectra and write all artifacts")
    sp.add_argument("--time", type=float, action="append", metavar="T", help="spectrum time (repeatable)")
    sp.add_argument("--delta-min", dest="delta_min", type=float)
    sp.add_argument("--delta-max", dest="delta_max", type=float)
    sp.add_argument("--delta-points", dest="delta_points", type=int)
    sp.add_argument("--filter-gamma", dest="filter_gamma", type=float, help="filter bandwidth Gamma")
    sp.add_argument("--mode", choices=[m.value for m in Mode])
    sp.add_argument("--backend", choices=[b.value for b in Backend])
    sp.add_argument("--thermal", action=argparse.BooleanOptionalAction, default=None, help="average over thermal m0")
    sp.add_argument("--prominence", type=float, help="peak prominence as a fraction of the maximum")
    sp.add_argument("--tmax", type=float, help="horizon for ledger.json (default 120)")
    sp.add_argument("--svg", action="store_true", default=None, help="also write plot.svg")

    ev = sub.add_parser("evolve", parents=[common], help="amplitude time series as CSV")
    ev.add_argument("--tmax", type=float, default=20.0)
    ev.add_argument("--points", type=int, default=201)

    sub.add_parser("dressed", parents=[common], help="dressed levels and transition table")

    lg = sub.add_parser("ledger", parents=[common], help="probability flux bookkeeping")
    lg.add_argument("--tmax", type=float, help="integration horizon (default 120)")

    sub.add_parser("presets", help="list built-in parameter sets")
    return parser


def _overrides(args) -> dict:
    ov: dict = {}
    params = {key: getattr(args, flag) for flag, key in _PARAM_FLAGS.items() if getattr(args, flag, None) is not None}
    if params:
        ov["params"] = params
    init = {}
    if getattr(args, "initial", None) is not None:
        init["branch"] = args.initial
    if getattr(args, "m0", None) is not None:
        init["m0"] = args.m0
    if init:
        ov["initial_state"] = init
    for key in ("delta_min", "delta_max", "delta_points", "filter_gamma", "mode", "backend", "thermal", "svg", "out"):
        value = getattr(args, key, None)
        if value is not None:
            ov[key] = value
    if getattr(args, "time", None):
        ov["times"] = args.time
    if getattr(args, "prominence", None) is not None:
        ov["peak_prominence"] = args.prominence
    if args.command in ("spectrum", "ledger") and getattr(args, "tmax", None) is not None:
        ov["ledger_tmax"] = args.tmax
    return ov


def _fail(code: int, exc: Exception, out: Path | None) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    if out is not None and code == 1:
        try:
            output.write_json(out / "error.json", err)
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        print(json.dumps(output.clean(presets.PRESETS), indent=2, sort_keys=True))
        return 0
    try:
        cfg = resolve_config(load_document(args.config), args.preset, _overrides(args))
    except ConfigError as exc:
        return _fail(2, exc, None)
    except ParameterError as exc:
        return _fail(1, exc, None)
    try:
        if args.command == "spectrum":
            code = run(cfg)
            print(f"wrote {len(cfg.times)} spectra x {cfg.filter.delta_grid.size} points to {cfg.out}")
            return code
        if args.command == "evolve":
            path = output.write_atomic(cfg.out / "evolve.csv", evolve_csv(cfg, args.tmax, args.points))
            print(f"wrote {path}")
        elif args.command == "dressed":
            doc = dressed_document(cfg)
            output.write_json(cfg.out / "dressed.json", doc)
            print("levels: " + " ".join(output.fmt(x) for x in doc["levels"]))
        elif args.command == "ledger":
            doc = ledger_document(cfg)
            output.write_json(cfg.out / "ledger.json", doc)
            print(json.dumps(output.clean(doc["summary"]), sort_keys=True))
        return 0
    except ConfigError as exc:
        return _fail(2, exc, None)
    except (ParameterError, NonDiagonalizableError, UnsupportedRegimeError, np.linalg.LinAlgError,
            ValueError, FloatingPointError, OSError) as exc:
        return _fail(1, exc, cfg.out)


if __name__ == "__main__":
    sys.exit(main())
