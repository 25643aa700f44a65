"""Command-line interface.

Subcommands: constants, moment2, moment1, critical-scan, simulate, spectrum.
Each run emits one JSON object per line (or CSV rows with --csv); records
carry the command, the resolved parameters, the results, and wall-clock
timing unless --no-timing is given.  With a fixed seed and --no-timing the
output is byte-identical across runs.

Flag values are resolved in the order: explicit flag, --config JSON file,
HYPCELL_SEED environment variable (seed only), builtin default.

Exit codes: 0 success, 2 usage, 3 domain error, 4 I/O or config error,
5 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import disc, mcsim, moments
from .errors import ConvergenceError, DomainError
from .hypgeo import ModelParams, ball_volume, critical_intensity, \
    segment_constant

_DEFAULT_SEED = 12345
_DEFAULT_N = 100000
_DEFAULT_TOL = 1e-8


@dataclass
class RunRecord:
    command: str
    params: dict
    result: dict
    wall_time_ms: float | None = None

    def payload(self, include_timing: bool) -> dict:
        obj = {"command": self.command, "params": self.params,
               "result": self.result}
        if include_timing and self.wall_time_ms is not None:
            obj["wall_time_ms"] = self.wall_time_ms
        return obj


class _Usage(Exception):
    pass


def _parse_radius(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise _Usage(f"bad radius {text!r}") from None
    if not value > 0.0:
        raise _Usage("radius must be positive")
    return value


def _parse_radius_list(text: str) -> list[float]:
    values = []
    for piece in text.split(","):
        value = _parse_radius(piece.strip())
        if math.isinf(value):
            raise _Usage("critical-scan radii must be finite")
        values.append(value)
    return values


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, 1000.0 * (time.perf_counter() - t0)


def cmd_constants(d: int) -> list[RunRecord]:
    result = {
        "gamma_c": critical_intensity(d),
        "c_d": segment_constant(d),
        "euclidean_limit_constant": moments.euclidean_limit_constant(d),
        "critical_divergence_constant":
            moments.critical_divergence_constant(d),
        "euclidean_second_moment_at_gamma_1":
            moments.euclidean_second_moment(d, 1.0),
    }
    return [RunRecord("constants", {"d": d}, result)]


def cmd_moment2(d: int, gamma: float, R: float, method: str, tol: float,
                seed: int, n: int) -> list[RunRecord]:
    params = ModelParams(d, gamma)
    base = {"d": d, "gamma": gamma,
            "R": R if math.isfinite(R) else "inf", "tol": tol}
    if method == "all":
        methods = ["direct", "mc"]
        if math.isinf(R):
            methods = ["spectral"] + (
                ["residue"] if d % 2 == 1 else []) + methods
    else:
        methods = [method]
    records = []
    values = {}
    for name in methods:
        if name == "spectral":
            if math.isfinite(R):
                raise DomainError(
                    "the spectral route computes the untruncated moment; "
                    "omit the truncation radius")
            report, ms = _timed(
                lambda: moments.second_moment_spectral(params, rel_tol=tol))
        elif name == "residue":
            if math.isfinite(R):
                raise DomainError(
                    "the residue route computes the untruncated moment; "
                    "omit the truncation radius")
            report, ms = _timed(
                lambda: moments.second_moment_residue(params))
        elif name == "direct":
            report, ms = _timed(
                lambda: moments.second_moment_direct(
                    params, R=R, rel_tol=max(tol, 1e-6)))
        elif name == "mc":
            est, ms = _timed(
                lambda: mcsim.two_point_is_estimator(params, R, n, seed))
            values["mc"] = est.mean
            records.append(RunRecord(
                "moment2", {**base, "method": "mc", "seed": seed, "n": n},
                {"method": "mc", "value": est.mean,
                 "std_error": est.std_error, "n": est.n}, ms))
            continue
        else:
            raise _Usage(f"unknown method {name!r}")
        values[name] = report.value
        records.append(RunRecord("moment2", {**base, "method": name},
                                 report.to_dict(), ms))
    if len(values) > 1:
        vals = list(values.values())
        spread = (max(vals) - min(vals)) / max(abs(min(vals)), 1e-300)
        records.append(RunRecord(
            "moment2", base,
            {"summary": True, "methods": sorted(values),
             "max_rel_spread": spread}))
    return records


def cmd_moment1(d: int, gamma: float, R: float, tol: float) -> \
        list[RunRecord]:
    params = ModelParams(d, gamma)
    report, ms = _timed(lambda: moments.first_moment(params, R, rel_tol=tol))
    base = {"d": d, "gamma": gamma,
            "R": R if math.isfinite(R) else "inf", "tol": tol}
    return [RunRecord("moment1", base, report.to_dict(), ms)]


def cmd_critical_scan(d: int, radii: list[float], tol: float) -> \
        list[RunRecord]:
    params = ModelParams(d, critical_intensity(d))
    records = []
    seconds = {}
    for R in radii:
        def compute(R=R):
            trunc = moments.truncated_second_moment_critical(
                d, R, rel_tol=tol)
            m1 = moments.first_moment(params, R)
            return trunc, m1
        (trunc, m1), ms = _timed(compute)
        seconds[R] = trunc.value
        variance = trunc.value - m1.value ** 2
        records.append(RunRecord(
            "critical-scan", {"d": d, "R": R, "tol": tol},
            {"second_moment": trunc.value,
             "second_moment_error": trunc.error_estimate,
             "first_moment": m1.value, "variance": variance,
             "variance_over_R3": variance / R ** 3}, ms))
    for R in radii:
        if 2.0 * R in seconds:
            records.append(RunRecord(
                "critical-scan", {"d": d, "R_low": R, "R_high": 2.0 * R},
                {"second_moment_ratio": seconds[2.0 * R] / seconds[R]}))
    return records


def cmd_simulate(d: int, gamma: float, R: float, seed: int, n: int,
                 svg_path: str | None) -> list[RunRecord]:
    if math.isinf(R):
        raise _Usage("simulate needs a finite ball radius --R")
    params = ModelParams(d, gamma)

    def compute():
        sample = mcsim.sample_process(params, R, seed)
        p, u = sample.arrays()
        rng = mcsim._stream(seed, 1)
        radii = mcsim._radii_from_sinh_density(rng.random(n), d, R)
        dirs = mcsim._unit_directions(rng, n, d)
        if p.size:
            inside = ~mcsim._separates(radii, dirs, p, u).any(axis=1)
        else:
            inside = np.ones(n, dtype=bool)
        frac = float(inside.mean())
        vol = ball_volume(d, R)
        # boundary ring probes for cell-boundedness within the window
        ring_dirs = mcsim._unit_directions(mcsim._stream(seed, 2), 512, d)
        ring_r = np.full(512, R * (1.0 - 1e-9))
        if p.size:
            touches = bool(
                (~mcsim._separates(ring_r, ring_dirs, p, u).any(axis=1))
                .any())
        else:
            touches = True
        return sample, frac, vol, touches

    (sample, frac, vol, touches), ms = _timed(compute)
    result = {
        "n_hyperplanes": len(sample.hyperplanes),
        "cell_volume_estimate": vol * frac,
        "cell_volume_std_error":
            vol * math.sqrt(max(frac * (1.0 - frac), 0.0) / n),
        "touches_boundary": touches,
    }
    if svg_path is not None:
        if d != 2:
            raise _Usage("SVG rendering is only available for d = 2")
        try:
            with open(svg_path, "w", encoding="utf-8") as fh:
                fh.write(disc.svg_document(sample))
        except OSError as exc:
            raise exc
        result["svg"] = svg_path
    return [RunRecord("simulate",
                      {"d": d, "gamma": gamma, "R": R, "seed": seed, "n": n},
                      result, ms)]


def cmd_spectrum(d: int, gamma: float, lambdas: list[float]) -> \
        list[RunRecord]:
    params = ModelParams(d, gamma)
    integrand = moments.SpectralIntegrand(params)
    records = []
    for lam in lambdas:
        if lam < 0.0:
            raise DomainError("lambda grid must be non-negative")
        value = float(integrand(np.array([lam]))[0])
        records.append(RunRecord(
            "spectrum", {"d": d, "gamma": gamma, "lam": lam},
            {"integrand": value,
             "weighted_integrand": integrand.prefactor * value,
             "transform": moments.spherical_transform_closed(params, lam)}))
    return records


def _emit(records: list[RunRecord], use_csv: bool, include_timing: bool,
          out) -> None:
    if not use_csv:
        for rec in records:
            out.write(json.dumps(rec.payload(include_timing)) + "\n")
        return
    rows = []
    columns = ["command"]
    for rec in records:
        row = {"command": rec.command, **rec.params, **rec.result}
        if include_timing and rec.wall_time_ms is not None:
            row["wall_time_ms"] = rec.wall_time_ms
        for key in row:
            if key not in columns:
                columns.append(key)
        rows.append(row)
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(str(row.get(col, "")) for col in columns) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypcell",
        description="Zero-cell volume moments of hyperbolic hyperplane "
                    "tessellations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--R", type=str, default=None)
        p.add_argument("--method", type=str, default=None,
                       choices=["spectral", "residue", "direct", "mc", "all"])
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--svg", type=str, default=None)
        p.add_argument("--lambdas", type=str, default=None)
        p.add_argument("--csv", action="store_true")
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--no-timing", action="store_true", dest="no_timing")
        return p

    for name in ("constants", "moment2", "moment1", "critical-scan",
                 "simulate", "spectrum"):
        add(name)
    return parser


def _resolve(args, config, key, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    config = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 4
        if not isinstance(config, dict):
            print("config error: expected a JSON object", file=sys.stderr)
            return 4

    env_seed = os.environ.get("HYPCELL_SEED")
    seed_default = _DEFAULT_SEED
    if env_seed is not None:
        try:
            seed_default = int(env_seed)
        except ValueError:
            print(f"usage error: bad HYPCELL_SEED {env_seed!r}",
                  file=sys.stderr)
            return 2

    try:
        d = int(_resolve(args, config, "d", 2))
        gamma = _resolve(args, config, "gamma", None)
        tol = float(_resolve(args, config, "tol", _DEFAULT_TOL))
        seed = int(_resolve(args, config, "seed", seed_default))
        n = int(_resolve(args, config, "n", _DEFAULT_N))
        method = _resolve(args, config, "method", "all")
        radius_text = _resolve(args, config, "R", None)
        svg_path = _resolve(args, config, "svg", None)
        if d < 2:
            raise _Usage("dimension must be an integer >= 2")
        if tol <= 0.0 or n < 1:
            raise _Usage("tolerance and sample count must be positive")

        if args.command == "constants":
            records = cmd_constants(d)
        elif args.command == "moment2":
            if gamma is None:
                raise _Usage("moment2 needs --gamma")
            R = math.inf if radius_text is None \
                else _parse_radius(str(radius_text))
            records = cmd_moment2(d, float(gamma), R, method, tol, seed, n)
        elif args.command == "moment1":
            if gamma is None:
                raise _Usage("moment1 needs --gamma")
            R = math.inf if radius_text is None \
                else _parse_radius(str(radius_text))
            records = cmd_moment1(d, float(gamma), R, tol)
        elif args.command == "critical-scan":
            if radius_text is None:
                raise _Usage("critical-scan needs --R (comma-separated)")
            records = cmd_critical_scan(
                d, _parse_radius_list(str(radius_text)),
                max(tol, 1e-6))
        elif args.command == "simulate":
            if gamma is None or radius_text is None:
                raise _Usage("simulate needs --gamma and --R")
            R = _parse_radius(str(radius_text))
            records = cmd_simulate(d, float(gamma), R, seed,
                                   min(n, 1 << 20), svg_path)
        elif args.command == "spectrum":
            if gamma is None:
                raise _Usage("spectrum needs --gamma")
            if args.lambdas is not None:
                lambdas = [float(x) for x in str(args.lambdas).split(",")]
            else:
                lambdas = list(np.geomspace(0.01, 100.0, 41))
            records = cmd_spectrum(d, float(gamma), lambdas)
        else:  # pragma: no cover
            raise _Usage(f"unknown command {args.command!r}")
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 5

    _emit(records, args.csv, not args.no_timing, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
