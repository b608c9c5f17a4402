"""Command-line front end.

Subcommands: ``bounds``, ``verify``, ``scan`` and ``check-identities``.
Options may also come from a ``key = value`` file given with ``--config``;
command-line flags take precedence over the file.  Artifacts go to
``--out`` (or stdout), log messages to stderr.

Exit status: 0 success, 1 a requested check failed, 2 invalid
configuration, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from .frame_bounds import (
    DEFAULT_GRID_RES,
    PhaseModeError,
    default_shape_grid,
    frame_bounds_gram,
    frame_bounds_janssen,
    scan_lattices,
    scan_to_csv,
    verify_theorem_main,
)
from .identities import run_all
from .lattice import Lattice, LatticeError, hexagonal_lattice, square_lattice
from .quadrature import QuadratureError
from .summation import DEFAULT_TARGET_TAIL, ConvergenceError
from .windows import WindowError, parse_window_spec

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2, 3

log = logging.getLogger("gaborbounds")


class ConfigError(ValueError):
    pass


# option name -> (type, default)
OPTIONS = {
    "window": (str, "hermite:1"),
    "lattice": (str, "square"),
    "volume": (float, 0.5),
    "grid_res": (int, DEFAULT_GRID_RES),
    "tail": (float, DEFAULT_TARGET_TAIL),
    "section_radius": (float, 6.0),
    "method": (str, None),
    "out": (str, None),
    "format": (str, None),
    "density": (float, 2.0),
    "shape_n": (int, 11),
    "threads": (int, None),
    "quick": (bool, False),
}


def _parse_bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def read_config(path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment, dashes in keys map to underscores."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in OPTIONS:
            raise ConfigError(f"{path}:{no}: unknown or malformed entry {line!r}")
        kind = OPTIONS[key][0]
        value = value.strip()
        try:
            out[key] = _parse_bool(value) if kind is bool else kind(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{no}: bad value for {key}: {value!r}") from exc
    return out


def read_matrix(path) -> np.ndarray:
    """Generator matrix from JSON (``{"M": [[...]]}`` or a bare nested list) or whitespace text."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read matrix {path}: {exc}") from exc
    try:
        data = json.loads(text)
        M = data["M"] if isinstance(data, dict) else data
    except (json.JSONDecodeError, KeyError, TypeError):
        try:
            M = np.loadtxt(io.StringIO(text), ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"cannot parse matrix in {path}") from exc
    return np.asarray(M, dtype=float)


def build_lattice(spec: str, volume: float) -> Lattice:
    if spec == "square":
        return square_lattice(volume)
    if spec == "hexagonal":
        return hexagonal_lattice(volume)
    if spec.startswith("matrix:"):
        return Lattice(read_matrix(spec[len("matrix:"):]))
    raise ConfigError(f"unknown lattice spec {spec!r}")


def _common(p):
    p.add_argument("--config", help="key = value file; flags override its entries")
    p.add_argument("--window", help="hermite:N | hermite:N1,N2 | gaussian | sampled:PATH")
    p.add_argument("--lattice", help="square | hexagonal | matrix:PATH")
    p.add_argument("--volume", type=float, help="volume for the square/hexagonal presets")
    p.add_argument("--grid-res", dest="grid_res", type=int, help="initial grid resolution")
    p.add_argument("--tail", type=float, help="target tail of lattice sums")
    p.add_argument("--section-radius", dest="section_radius", type=float,
                   help="radius of the Gram finite section")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("-v", "--verbose", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaborbounds", description=__doc__.split("\n")[0],
                                     argument_default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="frame bounds of one window and lattice",
                       argument_default=argparse.SUPPRESS)
    _common(p)
    p.add_argument("--method", choices=["janssen", "gram", "both"])

    p = sub.add_parser("verify", help="check the odd-window obstruction at volume 2^-d",
                       argument_default=argparse.SUPPRESS)
    _common(p)

    p = sub.add_parser("scan", help="bounds over a grid of lattice shapes",
                       argument_default=argparse.SUPPRESS)
    _common(p)
    p.add_argument("--method", choices=["auto", "janssen", "gram"])
    p.add_argument("--density", type=float)
    p.add_argument("--shape-n", dest="shape_n", type=int, help="points per shape axis")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("check-identities", help="run the identity suites",
                       argument_default=argparse.SUPPRESS)
    _common(p)
    p.add_argument("--quick", action="store_true")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, the config file and explicit flags (in increasing priority)."""
    cfg = {k: v for k, (_, v) in OPTIONS.items()}
    given = vars(args)
    if given.get("config"):
        cfg.update(read_config(given["config"]))
    for k, v in given.items():
        if k in OPTIONS and v is not None:
            cfg[k] = v
    cfg["command"] = given["command"]
    cfg["verbose"] = bool(given.get("verbose"))
    command = cfg["command"]
    if cfg["method"] is None:
        cfg["method"] = {"bounds": "janssen", "scan": "auto"}.get(command)
    allowed = {"bounds": ("janssen", "gram", "both"), "scan": ("auto", "janssen", "gram")}
    if command in allowed and cfg["method"] not in allowed[command]:
        raise ConfigError(f"method {cfg['method']!r} is not valid for {command}")
    if cfg["format"] is None:
        cfg["format"] = "csv" if command == "scan" else "json"
    if cfg["format"] not in ("json", "csv"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    for key in ("volume", "tail", "section_radius", "density"):
        if not cfg[key] > 0:
            raise ConfigError(f"{key} must be positive")
    if cfg["grid_res"] < 1 or cfg["shape_n"] < 6:
        raise ConfigError("grid_res must be >= 1 and shape_n >= 6")
    return cfg


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _bounds_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "A", "B", "converged", "grid_res", "truncation_radius"])
    for r in results:
        w.writerow([r.method, repr(r.lower_A), repr(r.upper_B), str(r.converged).lower(),
                    r.grid_res, repr(r.truncation_radius)])
    return buf.getvalue()


def _window_lattice(cfg):
    L = build_lattice(cfg["lattice"], cfg["volume"])
    g = parse_window_spec(cfg["window"], L.dim_d)
    if g.dim_d != L.dim_d:
        raise ConfigError(f"window dimension {g.dim_d} differs from lattice dimension {L.dim_d}")
    return g, L


def cmd_bounds(cfg) -> int:
    g, L = _window_lattice(cfg)
    methods = ["janssen", "gram"] if cfg["method"] == "both" else [cfg["method"]]
    results = []
    for m in methods:
        log.info("computing %s bounds for %s", m, g.label)
        if m == "janssen":
            results.append(frame_bounds_janssen(g, L, cfg["grid_res"], cfg["tail"]))
        else:
            results.append(frame_bounds_gram(g, L, cfg["section_radius"]))
    if cfg["format"] == "csv":
        text = _bounds_csv(results)
    elif len(results) == 1:
        text = _dump(results[0].to_dict())
    else:
        text = _dump({"window": g.label, "results": [r.to_dict() for r in results]})
    _emit(text, cfg["out"])
    return EXIT_OK if all(r.converged for r in results) else EXIT_NONCONVERGED


def cmd_verify(cfg) -> int:
    g, L = _window_lattice(cfg)
    report = verify_theorem_main(g, L, cfg["grid_res"], cfg["tail"])
    payload = report.to_dict()
    payload["window"] = g.label
    payload["lattice"] = L.to_dict()
    if cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = ["hypotheses_met", "phi_at_zero", "lower_A", "upper_B", "passed", "conclusion"]
        w.writerow(keys)
        w.writerow([payload[k] for k in keys])
        text = buf.getvalue()
    else:
        text = _dump(payload)
    _emit(text, cfg["out"])
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_scan(cfg) -> int:
    g = parse_window_spec(cfg["window"], 1)
    taus, hs = default_shape_grid(cfg["shape_n"])
    rows = scan_lattices(g, cfg["density"], taus, hs, cfg["method"], cfg["grid_res"],
                         cfg["tail"], cfg["section_radius"], cfg["threads"])
    if cfg["format"] == "csv":
        text = scan_to_csv(rows)
    else:
        text = _dump([{"s": r.s, "tau": r.tau, "h": r.h, "A": r.A, "B": r.B,
                       "converged": r.converged, "error": r.error} for r in rows])
    _emit(text, cfg["out"])
    return EXIT_OK if all(r.converged for r in rows) else EXIT_NONCONVERGED


def cmd_identities(cfg) -> int:
    summary = run_all(cfg["quick"])
    if cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "passed", "max_residual", "tolerance", "cases"])
        for s in summary["suites"]:
            w.writerow([s["name"], str(s["passed"]).lower(), repr(s["max_residual"]),
                        repr(s["tolerance"]), s["cases"]])
        text = buf.getvalue()
    else:
        text = _dump(summary)
    _emit(text, cfg["out"])
    for s in summary["suites"]:
        if not s["passed"]:
            log.warning("suite %s failed: %s", s["name"], s["detail"])
    return EXIT_OK if summary["passed"] else EXIT_FAILED


COMMANDS = {"bounds": cmd_bounds, "verify": cmd_verify, "scan": cmd_scan,
            "check-identities": cmd_identities}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        print(f"gaborbounds: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if cfg["verbose"] else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[cfg["command"]](cfg)
    except (ConfigError, WindowError, LatticeError, PhaseModeError) as exc:
        print(f"gaborbounds: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, QuadratureError) as exc:
        print(f"gaborbounds: not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except ValueError as exc:
        print(f"gaborbounds: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
