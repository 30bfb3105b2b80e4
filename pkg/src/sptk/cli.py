"""Command-line front end.

Usage::

    sptk decompose CONFIG [--out DIR]   reduced-order / boundary-layer report (JSON)
    sptk certify   CONFIG [--out DIR]   certificate constants and eps_star (JSON)
    sptk simulate  CONFIG [--out DIR]   full trajectory with functional (CSV)
    sptk sweep     CONFIG [--out DIR]   eps sweep (CSV) and slope verdict (JSON)

Exit codes: 0 success, 1 I/O or configuration error, 2 a stability
assumption fails (or a sweep misses its slope band).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from .certificate import dissipation_margin, forwarding_functional, synthesize_certificate
from .config import Config, load_config
from .decomposition import decompose
from .errors import AssumptionError, SptkError
from .numerics import is_hurwitz, spectral_abscissa
from .tikhonov import (
    default_dt,
    default_horizon,
    epsilon_sweep,
    fixed_ic,
    perturbed_growth_bound,
    scaled_ic,
    simulate_full,
)

logger = logging.getLogger("sptk")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ASSUMPTION = 2


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def dump_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2) + "\n"


def _spectrum(A) -> list:
    eig = np.linalg.eigvals(A)
    order = np.lexsort((eig.imag, eig.real))
    return [[float(e.real), float(e.imag)] for e in eig[order]]


def decompose_report(config: Config) -> tuple[dict, bool]:
    """Report dict plus whether every assumption holds."""
    sys_ = config.system
    dec = decompose(sys_)
    reduced_ok = is_hurwitz(dec.A2_tilde)
    bound = perturbed_growth_bound(sys_, dec, 0.0)
    coupling = dec.coupling
    report = {
        "command": "decompose",
        "system": {"builder": sys_.labels.get("builder", "explicit"),
                   "n_z": sys_.n_z, "n_w": sys_.n_w, "m1": sys_.m1, "m2": sys_.m2},
        "M": dec.M,
        "A2_tilde": dec.A2_tilde,
        "quasi_steady_map": dec.quasi_steady_map,
        "coupling_matrix": coupling,
        "coupling_scalar": float(coupling[0, 0]) if coupling.shape == (1, 1) else None,
        "spectrum_A1": _spectrum(sys_.A1),
        "spectrum_A2_tilde": _spectrum(dec.A2_tilde),
        "omega1": bound.omega1,
        "K1": bound.K1,
        "spectral_abscissa_A2_tilde": spectral_abscissa(dec.A2_tilde),
        "assumptions": {
            "boundary_layer_exponentially_stable": True,
            "reduced_order_exponentially_stable": bool(reduced_ok),
        },
    }
    return report, reduced_ok


def _certificate(config: Config):
    dec = decompose(config.system)
    cert = synthesize_certificate(config.system, dec, config.Q1, config.Q2)
    return dec, cert


def certify_report(config: Config) -> dict:
    dec, cert = _certificate(config)
    bound = perturbed_growth_bound(config.system, dec, 0.0)
    c_z, c_w = dissipation_margin(cert, cert.eps_star)
    return {
        "command": "certify",
        **cert.as_dict(),
        "c_z": c_z,
        "c_w": c_w,
        "growth_bound": {"omega1": bound.omega1, "K1": bound.K1,
                         "eps_max": bound.eps_max},
    }


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def simulate_csv(config: Config) -> str:
    if config.simulation is None:
        raise SptkError("config has no 'simulation' section")
    sim = config.simulation
    sys_ = config.system
    dec, cert = _certificate(config)
    if sim.eps >= cert.eps_star:
        logger.warning("eps = %g is not below eps_star = %g; decay of the "
                       "functional is not guaranteed", sim.eps, cert.eps_star)
    t_final = sim.t_final if sim.t_final is not None else default_horizon(dec)
    dt = sim.dt if sim.dt is not None else default_dt(sim.eps, t_final)
    if dt > t_final:
        raise SptkError("simulation.dt must not exceed t_final")
    z0 = np.ones(sys_.n_z) if sim.z0 is None else sim.z0
    w0 = np.ones(sys_.n_w) if sim.w0 is None else sim.w0
    traj = simulate_full(sys_, sim.eps, z0, w0, t_final, dt)
    z, w = traj.states[:, :sys_.n_z], traj.states[:, sys_.n_z:]
    wfun = forwarding_functional(cert, dec, sim.eps, z, w)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"z_{i + 1}" for i in range(sys_.n_z)]
                    + [f"w_{i + 1}" for i in range(sys_.n_w)] + ["Wfun"])
    for t, row, v in zip(traj.times, traj.states, wfun):
        writer.writerow([_fmt(t)] + [_fmt(x) for x in row] + [_fmt(v)])
    return buf.getvalue()


def _threads() -> int:
    raw = os.environ.get("SPTK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring non-integer SPTK_THREADS=%r", raw)
        return 1


def sweep_outputs(config: Config):
    if config.sweep is None:
        raise SptkError("config has no 'sweep' section")
    spec = config.sweep
    dec, cert = _certificate(config)
    if spec.mode == "state_scaling":
        rule = scaled_ic(config.system, spec.ic_scale)
    else:
        rule = fixed_ic(config.system, spec.ic_scale)
    result = epsilon_sweep(config.system, dec, cert, spec.eps_values, rule,
                           t_final=spec.t_final, mode=spec.mode,
                           max_workers=_threads())
    return result.to_csv(), result.summary()


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(outputs: list[tuple[str, str, str]], out: Optional[str]) -> None:
    """``outputs`` holds ``(filename, text, stream)`` with stream stdout/stderr."""
    if out is None:
        for _, text, stream in outputs:
            (sys.stdout if stream == "stdout" else sys.stderr).write(text)
        return
    for name, text, _ in outputs:
        _write_atomic(Path(out) / name, text)


def run(command: str, config_path: str, out: Optional[str] = None) -> int:
    config = load_config(config_path)
    if command == "decompose":
        report, ok = decompose_report(config)
        _emit([("decompose.json", dump_json(report), "stdout")], out)
        if not ok:
            logger.error("A2_tilde is not Hurwitz: the reduced-order system "
                         "is not exponentially stable")
            return EXIT_ASSUMPTION
        return EXIT_OK
    if command == "certify":
        _emit([("certify.json", dump_json(certify_report(config)), "stdout")], out)
        return EXIT_OK
    if command == "simulate":
        _emit([("trajectory.csv", simulate_csv(config), "stdout")], out)
        return EXIT_OK
    if command == "sweep":
        table, summary = sweep_outputs(config)
        _emit([("sweep.csv", table, "stdout"),
               ("sweep.json", dump_json(summary), "stderr")], out)
        if not summary["pass"]:
            logger.error("fitted slope %.4g is outside [0.75, 1.25]", summary["slope"])
            return EXIT_ASSUMPTION
        return EXIT_OK
    raise ValueError(f"unknown command {command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sptk",
        description="Singular-perturbation analysis of coupled fast/slow linear systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "decompose": "reduced-order and boundary-layer decomposition",
        "certify": "Lyapunov certificate and eps_star",
        "simulate": "simulate the full system and the functional",
        "sweep": "eps sweep with log-log slope verdict",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to a JSON config file")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="write output files into DIR instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="sptk: %(levelname)s: %(message)s",
                        stream=sys.stderr)
    try:
        return run(args.command, args.config, args.out)
    except AssumptionError as exc:
        print(f"sptk: assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_ERROR
    except (SptkError, ValueError, ArithmeticError, OSError) as exc:
        print(f"sptk: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
