"""Command line front end.

Every run resolves a flat configuration (defaults, then ``--config``, then
explicit flags), validates it, and writes CSV/JSON files whose first line
or ``meta`` block records the configuration hash and package version.

Exit codes: 0 success, 1 a validation check failed, 2 invalid
configuration, 3 quadrature failure, 4 truncation warning.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .asymptotics import disk_prediction, mu_from_gamma, theorem1_prediction, theorem2_expansion
from .counting import LazyRadialSpectrum, counting_curve
from .galerkin import TruncationSpec, assemble_full, cluster_near, sandwich_check
from .kernels import QuadratureError
from .schemas import SchemaError, validate_config
from .symbols import Cutoff, HermitianSymbolMatrix, RadialSymbol, metric_to_u, tq_symbol
from .toeplitz import MagneticContext, TruncationWarning, quadratic_form_eigs, toeplitz_eigs_radial

DEFAULTS = {
    "mode": "eigs", "kind": "gaussian", "b": 1.0, "q": 0, "beta": 1.0, "gamma": 1.0,
    "rho": 1.0, "tau": 1.0, "radius": 1.0, "K": 200, "k_min": 2, "sign": "+",
    "amplitude": 0.02, "lambda_min": 1e-4, "lambda_max": 1e-3, "lambda_steps": 10,
    "prediction": "theorem", "out": ".", "threads": 1, "seed": 0,
}

SUBCOMMANDS = {
    "eigs": {"mode": "eigs"},
    "thm1": {"mode": "compare", "kind": "disk"},
    "thm2": {"mode": "compare", "kind": "gaussian"},
    "thm3": {"mode": "counting", "kind": "power_decay"},
    "lemma-disk": {"mode": "compare", "kind": "disk", "prediction": "lemma"},
    "sandwich": {"mode": "galerkin", "kind": "gaussian", "K": 40},
}

_FLAGS = [
    ("--mode", str, "mode"), ("--kind", str, "kind"), ("--b", float, "b"), ("--q", int, "q"),
    ("--beta", float, "beta"), ("--gamma", float, "gamma"), ("--rho", float, "rho"),
    ("--tau", float, "tau"), ("--radius", float, "radius"), ("--K", int, "K"),
    ("--k-min", int, "k_min"), ("--Q", int, "Q"), ("--sign", str, "sign"),
    ("--amplitude", float, "amplitude"), ("--lambda-min", float, "lambda_min"),
    ("--lambda-max", float, "lambda_max"), ("--lambda-steps", int, "lambda_steps"),
    ("--out", str, "out"), ("--threads", int, "threads"), ("--seed", int, "seed"),
]


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def resolve_config(overrides, base=None, preset=None):
    """Merge defaults, a preset, a config-file dict and flag overrides, then validate."""
    user = dict(base or {})
    validate_config(user)
    cfg = dict(DEFAULTS)
    cfg.update(preset or {})
    cfg.update(user)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if cfg["mode"] == "galerkin":
        cfg.setdefault("Q", cfg["q"] + 3)
    validate_config(cfg)
    if cfg.get("Q") is not None and cfg["Q"] < cfg["q"] + 2:
        raise SchemaError("Q: must be at least q + 2")
    if cfg["lambda_min"] > cfg["lambda_max"]:
        raise SchemaError("lambda_min: must not exceed lambda_max")
    return cfg


# ---------------------------------------------------------------------------
# symbol families

def _symbol(cfg, ctx):
    kind = cfg["kind"]
    if kind == "gaussian":
        return RadialSymbol.term(1.0, 0.0, cfg["gamma"], cfg["beta"])
    if kind == "disk":
        return RadialSymbol.indicator(cfg["radius"])
    if kind == "symbol":
        if "symbol" not in cfg:
            raise SchemaError("symbol: required for kind 'symbol'")
        return RadialSymbol.from_dict(cfg["symbol"])
    if kind == "power_decay":
        # tau r^-rho outside the radius, capped at its boundary value inside
        R, rho, tau = cfg["radius"], cfg["rho"], cfg["tau"]
        psi = (RadialSymbol.term(tau, -0.5 * rho, 0.0, 1.0, Cutoff("outside", R))
               + RadialSymbol.constant(tau * R ** -rho, Cutoff("inside", R)))
        m = HermitianSymbolMatrix.scalar(psi.scaled(1.0 / ctx.landau_level(cfg["q"])))
        return tq_symbol(m, cfg["q"], ctx.b)
    raise SchemaError(f"kind: {kind!r} does not describe a scalar symbol")


def _metric(cfg):
    if cfg["kind"] == "metric":
        if "metric" not in cfg:
            raise SchemaError("metric: required for kind 'metric'")
        return HermitianSymbolMatrix.from_dict(cfg["metric"])
    if cfg["kind"] == "gaussian":
        p = RadialSymbol.term(cfg["amplitude"], 0.0, cfg["gamma"], cfg["beta"])
        return HermitianSymbolMatrix.scalar(p)
    raise SchemaError(f"kind: {cfg['kind']!r} does not describe a metric")


def _meta(cfg):
    # the output directory does not affect results and is left out
    shown = {k: v for k, v in cfg.items() if k != "out"}
    return {"config": shown, "config_hash": config_hash(shown), "version": __version__}


def _out(cfg, name):
    os.makedirs(cfg["out"], exist_ok=True)
    return os.path.join(cfg["out"], name)


# ---------------------------------------------------------------------------
# modes

def _run_eigs(cfg, ctx):
    q, K, th = cfg["q"], cfg["K"], cfg["threads"]
    if cfg["kind"] == "metric":
        seq = quadratic_form_eigs(ctx, metric_to_u(_metric(cfg)), q, K, th)
        seq.values = [v * 0.5 for v in seq.values]
        seq.meta = {**_meta(cfg), "operator": "PqWPq"}
        seq.to_csv(_out(cfg, "eigs.csv"))
        return 0
    seq = toeplitz_eigs_radial(ctx, _symbol(cfg, ctx), q, K, th)
    seq.meta = {**_meta(cfg), "operator": "toeplitz_radial"}
    seq.to_csv(_out(cfg, "eigs.csv"), indexed=True)
    return 0


def _prediction(cfg, ctx):
    if cfg["kind"] == "gaussian":
        return theorem2_expansion(cfg["beta"], mu_from_gamma(cfg["gamma"], cfg["beta"], ctx.b))
    if cfg["kind"] == "disk":
        return theorem1_prediction(cfg["radius"], ctx.b)
    raise SchemaError(f"kind: no asymptotic expansion for {cfg['kind']!r}")


def _run_asymp(cfg, ctx):
    exp = _prediction(cfg, ctx)
    with open(_out(cfg, "expansion.json"), "w") as fh:
        json.dump({"meta": _meta(cfg), "expansion": exp.to_dict()}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _run_compare(cfg, ctx):
    K, k_min = cfg["K"], cfg["k_min"]
    if k_min >= K:
        raise SchemaError("k_min: must be below K")
    lemma = cfg["prediction"] == "lemma"
    if lemma and cfg["kind"] != "disk":
        raise SchemaError("prediction: 'lemma' needs kind 'disk'")
    seq = toeplitz_eigs_radial(ctx, _symbol(cfg, ctx), cfg["q"], K, cfg["threads"])
    rho = 0.5 * ctx.b * cfg["radius"] ** 2
    exp = None if lemma else _prediction(cfg, ctx)
    lines = ["# " + json.dumps(_meta(cfg), sort_keys=True),
             "k,ln_nu_numeric,ln_nu_predicted,residual,residual_over_log_k"]
    # the lemma is stated per index k, the theorems for the sorted sequence
    values = seq.indexed if lemma else seq.values
    for k in range(k_min, K):
        v = values[k]
        num = v.ln() if v.sign > 0 else -math.inf
        pred = disk_prediction(cfg["q"], rho, k).ln() if lemma else exp(k)
        res = num - pred
        lines.append(f"{k},{num!r},{pred!r},{res!r},{res / math.log(k)!r}")
    with open(_out(cfg, "compare.csv"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def _run_counting(cfg, ctx):
    V = _symbol(cfg, ctx)
    spectrum = LazyRadialSpectrum(ctx, V, cfg["q"])
    lambdas = np.geomspace(cfg["lambda_min"], cfg["lambda_max"], cfg["lambda_steps"])
    kind = cfg["kind"]
    if kind == "power_decay":
        pred, params = "thm3", {"b": ctx.b, "psi": V}
    elif kind == "gaussian":
        pred, params = "thm2", {"beta": cfg["beta"], "mu": mu_from_gamma(cfg["gamma"], cfg["beta"], ctx.b)}
    elif kind == "disk":
        pred, params = "thm1", {}
    else:
        raise SchemaError(f"kind: no counting prediction for {kind!r}")
    curve = counting_curve(spectrum, lambdas, pred, params, _meta(cfg))
    curve.to_csv(_out(cfg, "counting.csv"))
    return 0


def _run_galerkin(cfg, ctx):
    q = cfg["q"]
    spec = TruncationSpec(cfg["Q"], cfg["K"], q)
    m = _metric(cfg)
    sign = 1 if cfg["sign"] == "+" else -1
    report = sandwich_check(ctx, m, q, spec, sign=sign, threads=cfg["threads"])
    report.meta.update(_meta(cfg))
    report.to_json(_out(cfg, "sandwich.json"))
    shifts = cluster_near(ctx, assemble_full(ctx, m, spec, sign, cfg["threads"]), q)
    shifts.meta = {**_meta(cfg), "operator": "galerkin_cluster"}
    shifts.to_csv(_out(cfg, "cluster.csv"))
    return 0 if report.passed else 1


MODES = {"eigs": _run_eigs, "asymp": _run_asymp, "compare": _run_compare,
         "counting": _run_counting, "galerkin": _run_galerkin}


def run(cfg):
    """Execute a resolved configuration; returns the exit status."""
    ctx = MagneticContext(cfg["b"])
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", TruncationWarning)
            status = MODES[cfg["mode"]](cfg, ctx)
    except SchemaError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    trunc = [w for w in caught if issubclass(w.category, TruncationWarning)]
    for w in caught:
        if w not in trunc:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    if trunc:
        for w in trunc:
            print(f"truncation warning: {w.message}", file=sys.stderr)
        return 4
    return status


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="landau-bt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ["run", *SUBCOMMANDS]:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        for flag, typ, dest in _FLAGS:
            p.add_argument(flag, type=typ, dest=dest, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {dest: getattr(args, dest) for _, _, dest in _FLAGS}
    try:
        base = None
        if args.config:
            with open(args.config) as fh:
                base = json.load(fh)
        cfg = resolve_config(overrides, base, SUBCOMMANDS.get(args.command))
    except (SchemaError, json.JSONDecodeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
