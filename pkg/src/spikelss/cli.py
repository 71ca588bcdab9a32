"""Command-line front end.

Verbs: clt, simulate, hypgeom, density-check, selftest. A JSON config file
supplies defaults and command-line flags override it field by field.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import clt, density, ensemble, hypmatrix, jack, schemas, selftest
from .models import Spike, SpikedModel, parse_spikes
from .numerics import DEFAULT_QUAD_N
from .output import render
from .statistics import LinearStatistic, parse_statistic

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("clt", "simulate", "hypgeom", "density-check", "selftest")


class ConfigError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spikelss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", help="write the document here instead of stdout")
    common.add_argument("--series-k", type=int, help="fixed series degree (default: adaptive)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=["A", "B", "C"])
    model.add_argument("--n", type=int)
    model.add_argument("--m", type=int)
    model.add_argument("--m1", type=int)
    model.add_argument("--m2", type=int)
    model.add_argument("--spikes", help="value:multiplicity pairs, e.g. 3.0:2,1.5:1")
    model.add_argument("--stat", help="x | x2 | log | exp:t | poly:c0,c1,...")
    model.add_argument("--quad-n", type=int)
    model.add_argument("--trials", type=int)
    model.add_argument("--seed", type=int)
    model.add_argument("--workers", type=int)

    sub.add_parser("clt", parents=[common, model], help="limiting mean and variance")

    sim = sub.add_parser("simulate", parents=[common, model], help="Monte Carlo check of the CLT")
    sim.add_argument("--dump-samples", help="write raw statistic values, one per line")
    sim.add_argument("--max-z", type=float, help="mean tolerance in standard errors")
    sim.add_argument("--var-low", type=float)
    sim.add_argument("--var-high", type=float)
    sim.add_argument("--min-ks", type=float, help="minimum KS p-value")

    hyp = sub.add_parser("hypgeom", parents=[common], help="series vs determinant vs contour")
    hyp.add_argument("--a", type=_float_list, help="comma-separated numerator parameters")
    hyp.add_argument("--b", type=_float_list, help="comma-separated denominator parameters")
    hyp.add_argument("--alpha", type=float)
    hyp.add_argument("--x", type=_float_list, help="nonzero values of the rank-r argument")
    hyp.add_argument("--mults", type=_int_list, help="multiplicities of the x values")
    hyp.add_argument("--y", type=_float_list, help="values of the full-rank argument")
    hyp.add_argument("--contour", action="store_true", help="also evaluate the contour form")
    hyp.add_argument("--contour-nodes", type=int)
    hyp.add_argument("--epsilon", type=float, help="spread repeated x by this to compare")
    hyp.add_argument("--random-n", type=int, help="draw a random instance of this size")
    hyp.add_argument("--random-r", type=int)
    hyp.add_argument("--random-seed", type=int)

    den = sub.add_parser("density-check", parents=[common, model], help="density normalization and moments")
    den.add_argument("--mode", choices=["normalization", "moments", "both", "support"])
    den.add_argument("--density-n", type=int, help="quadrature nodes per axis")

    sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    return parser


def _set(cfg: dict, block: str, key: str, value) -> None:
    if value is not None:
        cfg.setdefault(block, {})[key] = value


def merge_config(args: argparse.Namespace) -> dict:
    """Config file values overridden by any flags given."""
    cfg: dict = {}
    if getattr(args, "config", None) is not None:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    cfg = copy.deepcopy(cfg)
    cfg["command"] = args.command
    g = lambda name: getattr(args, name, None)  # noqa: E731
    _set(cfg, "output", "format", g("format"))
    _set(cfg, "output", "path", g("out"))
    _set(cfg, "output", "dump_samples", g("dump_samples"))
    _set(cfg, "model", "kind", g("model"))
    for key in ("n", "m", "m1", "m2", "spikes"):
        _set(cfg, "model", key, g(key))
    if g("stat") is not None:
        cfg["statistic"] = g("stat")
    _set(cfg, "numeric", "quad_n", g("quad_n"))
    _set(cfg, "numeric", "trials", g("trials"))
    _set(cfg, "numeric", "seed", g("seed"))
    _set(cfg, "numeric", "workers", g("workers"))
    _set(cfg, "numeric", "series_k", g("series_k"))
    _set(cfg, "tolerances", "max_abs_z", g("max_z"))
    _set(cfg, "tolerances", "var_ratio_low", g("var_low"))
    _set(cfg, "tolerances", "var_ratio_high", g("var_high"))
    _set(cfg, "tolerances", "min_ks_pvalue", g("min_ks"))
    for key in ("a", "b", "alpha", "x", "mults", "y", "contour_nodes", "epsilon"):
        _set(cfg, "hypgeom", key, g(key))
    if g("contour"):
        _set(cfg, "hypgeom", "contour", True)
    _set(cfg, "random", "n", g("random_n"))
    _set(cfg, "random", "r", g("random_r"))
    _set(cfg, "random", "seed", g("random_seed"))
    _set(cfg, "density", "mode", g("mode"))
    _set(cfg, "density", "quad_n", g("density_n"))
    try:
        schemas.validate_config(cfg)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc
    return cfg


def model_from_config(cfg: dict) -> SpikedModel:
    block = cfg.get("model")
    if not block or "kind" not in block or "n" not in block:
        raise ConfigError("a model block with kind and n is required")
    raw = block.get("spikes", [])
    try:
        if isinstance(raw, str):
            spikes = parse_spikes(raw)
        else:
            spikes = tuple(sorted((Spike(float(s["value"]), int(s.get("multiplicity", 1))) for s in raw),
                                  key=lambda s: -s.value))
        return SpikedModel(block["kind"], block["n"], block.get("m"), block.get("m1"),
                           block.get("m2"), spikes)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def statistic_from_config(cfg: dict) -> LinearStatistic:
    raw = cfg.get("statistic", "x")
    try:
        if isinstance(raw, str):
            return parse_statistic(raw)
        return LinearStatistic(raw["form"], tuple(raw.get("params", ())))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _numeric(cfg: dict, key: str, default):
    return cfg.get("numeric", {}).get(key, default)


def _spike_rows(model: SpikedModel, res: clt.CLTResult) -> list[dict]:
    rows = []
    pos = 0
    for s, sp in zip(model.spikes, res.saddles):
        rows.append({"value": s.value, "multiplicity": s.multiplicity, "z0": sp.z0,
                     "sqrt_branch": sp.sqrt_branch, "regime": sp.regime, "mu_bar": res.mu_bars[pos]})
        pos += s.multiplicity
    return rows


def cmd_clt(cfg: dict) -> dict:
    model, f = model_from_config(cfg), statistic_from_config(cfg)
    N = _numeric(cfg, "quad_n", DEFAULT_QUAD_N)
    res = clt.clt_params(model, f, N)
    return {
        "command": "clt",
        "model": model.describe(),
        "statistic": f.label(),
        "a": res.support.a,
        "b": res.support.b,
        "mu": res.mu,
        "sigma2": res.sigma2,
        "spikes": _spike_rows(model, res),
        "mean_offset": res.mean_offset,
        "predicted_mean_for_n": res.predicted_mean(model.n),
        "predicted_sd": math.sqrt(res.sigma2),
        "quad_n": N,
        "warnings": res.warnings,
    }


def _samples_path(cfg: dict) -> str | None:
    out = cfg.get("output", {})
    dump = out.get("dump_samples", False)
    if dump is True:
        base = out.get("path")
        return f"{base}.samples.txt" if base else "samples.txt"
    return dump or None


def cmd_simulate(cfg: dict) -> dict:
    model, f = model_from_config(cfg), statistic_from_config(cfg)
    tol = ensemble.MCTolerances(**cfg.get("tolerances", {}))
    try:
        mc = ensemble.MCConfig(model, f, _numeric(cfg, "trials", 1000), _numeric(cfg, "seed", 0),
                               _numeric(cfg, "workers", 1), _numeric(cfg, "quad_n", DEFAULT_QUAD_N), tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rep = ensemble.run_mc(mc)
    path = _samples_path(cfg)
    if path:
        ensemble.dump_samples(path, rep.samples)
    pred = rep.prediction
    return {
        "command": "simulate",
        "model": model.describe(),
        "statistic": f.label(),
        "trials": mc.trials,
        "seed": mc.seed,
        "workers": mc.workers,
        "predicted": {"mean": rep.predicted_mean, "var": rep.predicted_var, "mu": pred.mu,
                      "sigma2": pred.sigma2, "mu_bars": pred.mu_bars},
        "empirical": {"mean": rep.empirical_mean, "mean_stderr": rep.mean_stderr,
                      "var": rep.empirical_var, "var_stderr": rep.var_stderr},
        "mean_z_score": rep.mean_z_score,
        "var_ratio": rep.var_ratio,
        "ks_statistic": rep.ks_statistic,
        "ks_pvalue": rep.ks_pvalue,
        "tolerances": {"max_abs_z": tol.max_abs_z, "var_ratio_low": tol.var_ratio_low,
                       "var_ratio_high": tol.var_ratio_high, "min_ks_pvalue": tol.min_ks_pvalue},
        "checks": rep.checks(tol),
        "passed": rep.passed(tol),
        "flags": rep.flags,
        "samples_path": path,
    }


def random_instance(n: int, r: int, seed: int, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Distinct decreasing ``x`` (r values) and distinct ``y`` with max|x| max|y| < 0.5."""
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(0.1, 0.7, r))[::-1] * scale
    y = rng.uniform(-0.7, 0.7, n) / scale
    return x, y


def _group(values: list[float], mults: list[int] | None) -> tuple[list[float], list[int]]:
    if mults is not None:
        if len(mults) != len(values):
            raise ConfigError("mults must match x in length")
        return values, mults
    distinct: list[float] = []
    counts: list[int] = []
    for v in sorted(values, reverse=True):
        if distinct and v == distinct[-1]:
            counts[-1] += 1
        else:
            distinct.append(v)
            counts.append(1)
    return distinct, counts


def _rel_diff(u, v) -> float | None:
    if u is None or v is None:
        return None
    return abs(u - v) / max(abs(v), 1e-300)


def cmd_hypgeom(cfg: dict) -> dict:
    block = cfg.get("hypgeom", {})
    rnd = cfg.get("random")
    a, b = block.get("a", []), block.get("b", [])
    alpha = block.get("alpha", 1.0)
    if "y" in block:
        y = np.asarray(block["y"], dtype=float)
        xs = [v for v in block.get("x", []) if v != 0]
    elif rnd:
        n = rnd.get("n", 4)
        x_arr, y = random_instance(n, rnd.get("r", 2), rnd.get("seed", 0), rnd.get("scale", 1.0))
        xs = x_arr.tolist()
    else:
        raise ConfigError("hypgeom needs y values or a random block")
    n = len(y)
    distinct, mults = _group(xs, block.get("mults"))
    r = sum(mults)
    if r > n:
        raise ConfigError("rank of x exceeds the size of y")
    try:
        spec = jack.HypgeomSpec(tuple(a), tuple(b), alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if spec.p > spec.q + 1:
        raise ConfigError("divergent series: p > q + 1")
    expanded = np.repeat(distinct, mults) if r else np.zeros(0)
    full = np.zeros(n)
    full[:r] = expanded
    K = _numeric(cfg, "series_k", None)
    if K is not None:
        val, tail = jack.mhg_series(spec, full, y, K)
    else:
        val, tail, K = jack.mhg_series_auto(spec, full, y, tol=block.get("tolerance", 1e-12))
    series = float(np.real(val))

    det = contour = perturbed = None
    eps = block.get("epsilon")
    if alpha == 1.0:
        if r == 0:
            det = 1.0
        elif all(k == 1 for k in mults):
            det = float(hypmatrix.mhg_det_distinct(spec, distinct, y))
        else:
            det = float(hypmatrix.mhg_det_mult(spec, hypmatrix.MultSpectrum(tuple(distinct), tuple(mults)), y))
            if eps:
                spread = [v - j * eps for v, k in zip(distinct, mults) for j in range(k)]
                perturbed = float(hypmatrix.mhg_det_distinct(spec, spread, y))
    if block.get("contour"):
        if r == 0:
            contour = 1.0
        else:
            nodes = block.get("contour_nodes", {1: 128, 2: 64}.get(r, 24))
            ctr = hypmatrix.default_contour(y, nodes)
            value = hypmatrix.mhg_contour(spec, hypmatrix.RankRArgument(tuple(expanded), n), y, ctr,
                                         max(int(K), 30))
            contour = float(np.real(value))
    rel = {"determinant_vs_series": _rel_diff(det, series),
           "contour_vs_series": _rel_diff(contour, series),
           "contour_vs_determinant": _rel_diff(contour, det),
           "perturbed_vs_multiplicity": _rel_diff(perturbed, det)}
    return {
        "command": "hypgeom", "a": list(a), "b": list(b), "alpha": alpha, "n": n,
        "x": list(map(float, distinct)), "mults": list(mults), "y": y.tolist(),
        "series": {"value": series, "tail_estimate": float(np.max(tail)), "K": int(K)},
        "determinant": det, "contour": contour, "perturbed_distinct": perturbed,
        "epsilon": eps, "rel_diff": {k: v for k, v in rel.items() if v is not None},
    }


def _moment_table(model: SpikedModel, trials: int, seed: int, N: int) -> list[dict]:
    if model.kind in ("A", "B"):
        spread = 1.0 + (float(np.max(model.values)) if model.kind == "A" and model.r else 0.0)
        nodes, weights = density._laguerre_rule(N, spread)
    else:
        t, w = np.polynomial.legendre.leggauss(N)
        nodes, weights = 0.5 * (t + 1), 0.5 * w
    tests = {"sum": lambda p: p.sum(axis=-1), "sum_squares": lambda p: (p ** 2).sum(axis=-1)}
    quad = {k: 0.0 for k in tests}
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            pt = np.array([nodes[i], nodes[j]])
            wd = weights[i] * weights[j] * density.joint_density(model, pt)
            for k, g in tests.items():
                quad[k] += wd * float(g(pt))
    pts = []
    for t in range(trials):
        e = ensemble.sample_model(model, ensemble.trial_rng(seed, t))
        pts.append(e / (1 + e) if model.kind == "C" else e)
    pts = np.array(pts)
    rows = []
    for k, g in tests.items():
        v = g(pts)
        se = float(v.std(ddof=1) / math.sqrt(len(v)))
        rows.append({"name": k, "quadrature": quad[k], "monte_carlo": float(v.mean()),
                     "stderr": se, "z_score": (float(v.mean()) - quad[k]) / se})
    return rows


def cmd_density_check(cfg: dict) -> dict:
    model = model_from_config(cfg)
    block = cfg.get("density", {})
    mode = block.get("mode", "normalization")
    if model.n > 6:
        raise ConfigError("density checks are limited to n <= 6")
    if mode != "support" and model.n != 2:
        raise ConfigError("normalization and moment quadrature need n = 2")
    N = block.get("quad_n", 60)
    seed = _numeric(cfg, "seed", 0)
    sample = ensemble.sample_model(model, ensemble.trial_rng(seed, 0))
    pts = sample / (1 + sample) if model.kind == "C" else sample
    support_ok = bool(np.all(pts > 0) and (model.kind != "C" or np.all(pts < 1)))
    perm_ok = density.joint_density(model, pts) == density.joint_density(model, pts[::-1])
    norm = density.normalization_integral(model, N) if mode in ("normalization", "both") else None
    moments = (_moment_table(model, _numeric(cfg, "trials", 2000), seed, N)
               if mode in ("moments", "both") else [])
    return {
        "command": "density-check", "model": model.describe(), "mode": mode,
        "normalization": norm, "quad_n": N, "permutation_invariant": bool(perm_ok),
        "support_ok": support_ok, "moments": moments,
    }


def cmd_selftest(cfg: dict) -> dict:
    results = selftest.run_selftest()
    width = max(len(f"{r.module}/{r.name}") for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {f'{r.module}/{r.name}':<{width}}  {r.detail}",
              file=sys.stderr)
    return {"command": "selftest",
            "results": [{"module": r.module, "name": r.name, "passed": r.passed, "detail": r.detail}
                        for r in results],
            "passed": all(r.passed for r in results)}


HANDLERS = {"clt": cmd_clt, "simulate": cmd_simulate, "hypgeom": cmd_hypgeom,
            "density-check": cmd_density_check, "selftest": cmd_selftest}


def _fail(kind: str, message: str, code: int) -> int:
    doc = {"error": {"kind": kind, "message": message, "exit_code": code}}
    sys.stderr.write(json.dumps(doc) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_config(args)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    fmt = cfg.get("output", {}).get("format", "json")
    try:
        doc = HANDLERS[args.command](cfg)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        return _fail("numerical", f"{type(exc).__name__}: {exc}", EXIT_NUMERIC)
    text = render(doc, fmt)
    schemas.validate_document(json.loads(render(doc, "json")))
    path = cfg.get("output", {}).get("path")
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)
    if args.command == "selftest" and not doc["passed"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
