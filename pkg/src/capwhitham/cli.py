"""Command-line front end.

Subcommands: ``dispersion``, ``periodic``, ``depression``, ``nanopteron``,
``stability-map``, ``verify``.  All outputs are CSV/JSON written under
``--out``; every file gets a JSON sidecar carrying the config hash, package
version and kernel backend, and identical configs produce byte-identical
files.  Configuration is a flat ``key = value`` text file (``--config``)
with command-line flags taking precedence.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 numerical failure.
"""

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, verify
from .backend import BACKEND
from .depression import default_grid, remainder_scaling, solve_depression
from .dispersion import BondParams, K_eps, ScalingParams, k_crit, m_beta, m_beta_derivs
from .errors import CapWhithamError
from .modstab import stability_map
from .nanopteron import beale_iterate, make_workspace, unscale
from .periodic import solve_periodic

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    """Flat configuration shared by all commands; round-trips losslessly."""

    beta: float = 0.1
    epsilon: float = 0.2
    eps_list: tuple = ()
    L: float = 100.0
    N: int = 0                      # 0 selects the per-command default
    tol: float = 1e-12
    max_iter: int = 100
    amplitude: float = 0.02
    harmonics: int = 32
    k_range: tuple = (0.0, 10.0, 0.01)
    resolution: tuple = (64, 64)
    seed: int = verify.DEFAULT_SEED
    out: str = "out"
    only: str = ""

    def validate(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.eps_list and (sorted(self.eps_list, reverse=True) != list(self.eps_list)):
            raise ValueError("eps-list must be sorted in decreasing order")
        if self.eps_list == () and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        return self

    def to_text(self):
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def hash(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def _format_value(val):
    if isinstance(val, tuple):
        return ":".join(repr(v) for v in val)
    return repr(val)


def _parse_value(name, text):
    text = text.strip()
    if name in ("eps_list",):
        if not text:
            return ()
        return tuple(float(t) for t in text.replace(":", ",").split(",") if t)
    if name in ("k_range",):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("k-range must be A:B:STEP")
        return tuple(float(p) for p in parts)
    if name in ("resolution",):
        parts = text.lower().replace(":", "x").split("x")
        if len(parts) != 2:
            raise ValueError("resolution must be RxC")
        return tuple(int(p) for p in parts)
    if name in ("N", "max_iter", "harmonics", "seed"):
        return int(text)
    if name in ("out", "only"):
        return text
    return float(text)


def load_config_file(path):
    overrides = {}
    valid = {f.name for f in fields(RunConfig)}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in valid:
            raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
        overrides[key] = _parse_value(key, value)
    return overrides


def parse_config(args):
    overrides = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            overrides[f.name] = flag
    return RunConfig(**overrides).validate()


# -- output helpers ----------------------------------------------------------------


def _write_sidecar(path, config, extra=None):
    meta = {"config_hash": config.hash(), "version": __version__, "backend": BACKEND}
    if extra:
        meta.update(extra)
    with open(str(path) + ".json", "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows, config, extra=None):
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    _write_sidecar(path, config, extra)


def _fmt(value):
    if isinstance(value, str):
        return value
    return f"{value:.16g}"


def _write_json(path, payload, config, extra=None):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_sidecar(path, config, extra)


def _profile_rows(x, values):
    return zip(x, values)


# -- commands ----------------------------------------------------------------------


def cmd_dispersion(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    params = BondParams(config.beta)
    a, b, step = config.k_range
    n_rows = int(round((b - a) / step)) + 1
    ks = a + step * np.arange(n_rows)

    kc = float("nan")
    keps = float("nan")
    if params.weak:
        kc = k_crit(params, 1.0)
        keps = K_eps(params, ScalingParams.from_epsilon(params, config.epsilon))
    rows = [
        (k, m_beta(params, k), m_beta_derivs(params, k, 1), m_beta_derivs(params, k, 2),
         kc, keps)
        for k in ks
    ]
    _write_csv(
        out / "dispersion.csv",
        ["k", "m_beta", "dm_beta", "d2m_beta", "k_crit", "K_eps"],
        rows,
        config,
        {"kind": "dispersion", "beta": config.beta, "epsilon": config.epsilon},
    )
    return EXIT_OK


def cmd_periodic(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    params = BondParams(config.beta)
    if not params.weak:
        print("periodic: requires the weak regime (beta < 1/3)", file=sys.stderr)
        return EXIT_USAGE
    scaling = ScalingParams.from_epsilon(params, config.epsilon)
    wave = solve_periodic(
        params, scaling, config.amplitude, n_harmonics=config.harmonics, tol=config.tol
    )
    _write_json(out / "periodic.json", wave.to_dict(), config, {"kind": "periodic-wave"})
    return EXIT_OK


def cmd_depression(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    params = BondParams(config.beta)
    if not params.strong:
        print("depression: requires the strong regime (beta > 1/3)", file=sys.stderr)
        return EXIT_USAGE
    scaling = ScalingParams.from_epsilon(params, config.epsilon)
    grid = default_grid(config.epsilon, config.N) if config.N else default_grid(config.epsilon)
    sol = solve_depression(params, scaling, grid=grid)

    meta = {"kind": "depression", "beta": config.beta, "epsilon": config.epsilon,
            "L": grid.half_length, "N": grid.n_points}
    x = grid.x
    _write_csv(out / "w.csv", ["x", "value"], _profile_rows(x, sol.w.values), config, meta)
    _write_csv(out / "leading.csv", ["x", "value"],
               _profile_rows(x, sol.leading.values), config, meta)
    _write_csv(out / "remainder.csv", ["x", "value"],
               _profile_rows(x, sol.remainder_values), config, meta)

    payload = {
        "beta": config.beta,
        "epsilon": config.epsilon,
        "c": scaling.c,
        "residual": sol.residual,
        "newton_iterations": sol.newton_iterations,
        "norms": {
            "R_l2_scaled": sol.remainder_norm(0),
            "R_d1_l2_scaled": sol.remainder_norm(1),
        },
    }
    if config.eps_list:
        slope, norms = remainder_scaling(params, list(config.eps_list))
        payload["remainder_fit"] = {"exponent": slope, "norms": norms}
    _write_json(out / "depression.json", payload, config, {"kind": "depression-meta"})
    return EXIT_OK


def cmd_nanopteron(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    params = BondParams(config.beta)
    if not params.weak:
        print("nanopteron: requires the weak regime (beta < 1/3)", file=sys.stderr)
        return EXIT_USAGE
    scaling = ScalingParams.from_epsilon(params, config.epsilon)
    ws = make_workspace(params, scaling, target_l=config.L,
                        target_n=config.N or None)
    sol = beale_iterate(ws, tol=config.tol, max_iter=config.max_iter,
                        n_harmonics=config.harmonics)
    phys = unscale(sol)

    meta = {"kind": "nanopteron", "beta": config.beta, "epsilon": config.epsilon,
            "L": ws.grid.half_length, "N": ws.grid.n_points}
    _write_csv(out / "w.csv", ["x", "value"], _profile_rows(phys.x, phys.w), config, meta)
    _write_csv(out / "core.csv", ["x", "value"], _profile_rows(phys.x, phys.core), config, meta)
    _write_csv(out / "ripple.csv", ["x", "value"],
               _profile_rows(phys.x, phys.ripple), config, meta)

    eps = config.epsilon
    payload = {
        "beta": config.beta,
        "epsilon": eps,
        "c": scaling.c,
        "a": sol.a,
        "K": sol.wave.K,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "norms": {
            "R_l2": sol.R.l2(),
            "R_weighted": sol.R.weighted_norm(0, 0.1),
            "a_over_eps4": abs(sol.a) / eps**4,
        },
        "history": [{"dR": dr, "da": da} for dr, da in sol.history],
    }
    _write_json(out / "nanopteron.json", payload, config, {"kind": "nanopteron-meta"})
    return EXIT_OK


def cmd_stability_map(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    a, b, _ = config.k_range
    smap = stability_map(k_range=(max(a, 1e-3), b), resolution=config.resolution)
    rows = []
    for i, beta in enumerate(smap.betas):
        for j, k in enumerate(smap.ks):
            rows.append(
                (beta, k, k * np.sqrt(beta), smap.delta_bf[i, j], smap.delta_mi[i, j],
                 smap.verdicts[i, j])
            )
    _write_csv(
        out / "stability_map.csv",
        ["beta", "k", "k_sqrt_beta", "delta_bf", "delta_mi", "verdict"],
        rows,
        config,
        {"kind": "stability-map"},
    )
    summary = {
        "verdict_counts": smap.verdict_counts(),
        "k_crit_curve": [{"beta": b_, "k": k_} for b_, k_ in smap.curve],
    }
    _write_json(out / "stability_summary.json", summary, config, {"kind": "stability-summary"})
    return EXIT_OK


def cmd_verify(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    results = verify.run(only=config.only or None, seed=config.seed)
    report = verify.report_dict(results)
    _write_json(out / "verify.json", report, config, {"kind": "verify-report"})
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY_FAILED


COMMANDS = {
    "dispersion": cmd_dispersion,
    "periodic": cmd_periodic,
    "depression": cmd_depression,
    "nanopteron": cmd_nanopteron,
    "stability-map": cmd_stability_map,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="capwhitham",
        description="Traveling-wave solvers for the gravity-capillary Whitham equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="flat key = value config file")
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--eps-list", dest="eps_list",
                       type=lambda t: _parse_value("eps_list", t), default=None)
        p.add_argument("--L", type=float, default=None)
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        p.add_argument("--amplitude", type=float, default=None)
        p.add_argument("--harmonics", type=int, default=None)
        p.add_argument("--k-range", dest="k_range",
                       type=lambda t: _parse_value("k_range", t), default=None)
        p.add_argument("--resolution",
                       type=lambda t: _parse_value("resolution", t), default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--only", default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = parse_config(args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](config)
    except CapWhithamError as exc:
        diagnostic = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(diagnostic, sort_keys=True), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
