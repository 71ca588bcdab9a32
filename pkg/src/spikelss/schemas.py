"""JSON Schemas for run configurations and emitted documents."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

NUM = {"type": ["number", "null"]}
INT = {"type": "integer"}
STR = {"type": "string"}
BOOL = {"type": "boolean"}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


def _arr(items: dict) -> dict:
    return {"type": "array", "items": items}


SPIKE = _obj({"value": {"type": "number", "exclusiveMinimum": 0},
              "multiplicity": {"type": "integer", "minimum": 1}}, ["value"])

MODEL_BLOCK = _obj({
    "kind": {"enum": ["A", "B", "C"]},
    "n": {"type": "integer", "minimum": 1},
    "m": {"type": "integer", "minimum": 1},
    "m1": {"type": "integer", "minimum": 1},
    "m2": {"type": "integer", "minimum": 1},
    "spikes": {"oneOf": [STR, _arr(SPIKE)]},
})

STATISTIC_BLOCK = {"oneOf": [
    STR,
    _obj({"form": {"enum": ["linear", "power", "log", "exp", "poly"]},
          "params": _arr({"type": "number"})}, ["form"]),
]}

NUMERIC_BLOCK = _obj({
    "quad_n": {"type": "integer", "minimum": 2},
    "series_k": {"type": "integer", "minimum": 1},
    "trials": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
    "workers": {"type": "integer", "minimum": 1},
})

OUTPUT_BLOCK = _obj({
    "format": {"enum": ["json", "csv"]},
    "path": STR,
    "dump_samples": {"oneOf": [BOOL, STR]},
})

HYPGEOM_BLOCK = _obj({
    "a": _arr({"type": "number"}),
    "b": _arr({"type": "number"}),
    "alpha": {"type": "number", "exclusiveMinimum": 0},
    "x": _arr({"type": "number"}),
    "mults": _arr({"type": "integer", "minimum": 1}),
    "y": _arr({"type": "number"}),
    "contour": BOOL,
    "contour_nodes": {"type": "integer", "minimum": 8},
    "epsilon": {"type": "number", "exclusiveMinimum": 0},
    "tolerance": {"type": "number", "exclusiveMinimum": 0},
})

RANDOM_BLOCK = _obj({
    "n": {"type": "integer", "minimum": 1},
    "r": {"type": "integer", "minimum": 0},
    "seed": {"type": "integer", "minimum": 0},
    "scale": {"type": "number", "exclusiveMinimum": 0},
})

DENSITY_BLOCK = _obj({
    "mode": {"enum": ["normalization", "moments", "both", "support"]},
    "quad_n": {"type": "integer", "minimum": 4},
    "trials": {"type": "integer", "minimum": 1},
})

TOLERANCE_BLOCK = _obj({
    "max_abs_z": {"type": "number", "exclusiveMinimum": 0},
    "var_ratio_low": {"type": "number", "exclusiveMinimum": 0},
    "var_ratio_high": {"type": "number", "exclusiveMinimum": 0},
    "min_ks_pvalue": {"type": "number", "minimum": 0, "maximum": 1},
})

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "spikelss run configuration",
    **_obj({
        "command": {"enum": ["clt", "simulate", "hypgeom", "density-check", "selftest"]},
        "model": MODEL_BLOCK,
        "statistic": STATISTIC_BLOCK,
        "numeric": NUMERIC_BLOCK,
        "output": OUTPUT_BLOCK,
        "hypgeom": HYPGEOM_BLOCK,
        "random": RANDOM_BLOCK,
        "density": DENSITY_BLOCK,
        "tolerances": TOLERANCE_BLOCK,
    }),
}

MODEL_DOC = _obj({
    "kind": {"enum": ["A", "B", "C"]}, "n": INT, "m": INT, "m1": INT, "m2": INT,
    "spikes": _arr(_obj({"value": {"type": "number"}, "multiplicity": INT}, ["value", "multiplicity"])),
}, ["kind", "n", "spikes"])

SPIKE_DOC = _obj({
    "value": {"type": "number"}, "multiplicity": INT, "z0": NUM, "sqrt_branch": NUM,
    "regime": {"enum": ["subcritical", "critical", "supercritical"]}, "mu_bar": NUM,
}, ["value", "multiplicity", "z0", "sqrt_branch", "regime", "mu_bar"])

CLT_DOC = _obj({
    "command": {"const": "clt"}, "model": MODEL_DOC, "statistic": STR,
    "a": NUM, "b": NUM, "mu": NUM, "sigma2": NUM, "spikes": _arr(SPIKE_DOC),
    "mean_offset": NUM, "predicted_mean_for_n": NUM, "predicted_sd": NUM,
    "quad_n": INT, "warnings": _arr(STR),
}, ["command", "model", "statistic", "a", "b", "mu", "sigma2", "spikes",
    "predicted_mean_for_n", "predicted_sd"])

SIMULATE_DOC = _obj({
    "command": {"const": "simulate"}, "model": MODEL_DOC, "statistic": STR,
    "trials": INT, "seed": INT, "workers": INT,
    "predicted": _obj({"mean": NUM, "var": NUM, "mu": NUM, "sigma2": NUM, "mu_bars": _arr(NUM)}),
    "empirical": _obj({"mean": NUM, "mean_stderr": NUM, "var": NUM, "var_stderr": NUM}),
    "mean_z_score": NUM, "var_ratio": NUM, "ks_statistic": NUM, "ks_pvalue": NUM,
    "tolerances": TOLERANCE_BLOCK,
    "checks": _obj({"mean": BOOL, "variance": BOOL, "normality": BOOL}),
    "passed": BOOL, "flags": _arr(STR), "samples_path": {"type": ["string", "null"]},
}, ["command", "model", "statistic", "trials", "seed", "predicted", "empirical",
    "mean_z_score", "var_ratio", "ks_statistic", "ks_pvalue", "checks", "passed"])

HYPGEOM_DOC = _obj({
    "command": {"const": "hypgeom"}, "a": _arr({"type": "number"}), "b": _arr({"type": "number"}),
    "alpha": {"type": "number"}, "n": INT, "x": _arr({"type": "number"}), "mults": _arr(INT),
    "y": _arr({"type": "number"}),
    "series": _obj({"value": NUM, "tail_estimate": NUM, "K": INT}),
    "determinant": NUM, "contour": NUM, "perturbed_distinct": NUM, "epsilon": NUM,
    "rel_diff": {"type": "object", "additionalProperties": NUM},
}, ["command", "a", "b", "alpha", "n", "x", "y", "series", "determinant", "contour", "rel_diff"])

DENSITY_DOC = _obj({
    "command": {"const": "density-check"}, "model": MODEL_DOC, "mode": STR,
    "normalization": NUM, "quad_n": {"type": ["integer", "null"]},
    "permutation_invariant": BOOL, "support_ok": BOOL,
    "moments": _arr(_obj({"name": STR, "quadrature": NUM, "monte_carlo": NUM,
                          "stderr": NUM, "z_score": NUM})),
}, ["command", "model", "mode", "normalization", "permutation_invariant"])

SELFTEST_DOC = _obj({
    "command": {"const": "selftest"},
    "results": _arr(_obj({"module": STR, "name": STR, "passed": BOOL, "detail": STR},
                         ["module", "name", "passed"])),
    "passed": BOOL,
}, ["command", "results", "passed"])

ERROR_DOC = _obj({"error": _obj({"kind": {"enum": ["config", "numerical"]}, "message": STR,
                                 "exit_code": INT}, ["kind", "message", "exit_code"])}, ["error"])

DOCUMENT_SCHEMAS = {
    "clt": CLT_DOC,
    "simulate": SIMULATE_DOC,
    "hypgeom": HYPGEOM_DOC,
    "density-check": DENSITY_DOC,
    "selftest": SELFTEST_DOC,
    "error": ERROR_DOC,
}


def validate_config(cfg: dict) -> None:
    jsonschema.validate(cfg, CONFIG_SCHEMA)


def validate_document(doc: dict) -> None:
    key = "error" if "error" in doc else doc.get("command")
    if key not in DOCUMENT_SCHEMAS:
        raise jsonschema.ValidationError(f"unknown document type {key!r}")
    jsonschema.validate(doc, DOCUMENT_SCHEMAS[key])


def export(directory) -> list[Path]:
    """Write the config and document schemas as JSON files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    p = directory / "config.schema.json"
    p.write_text(json.dumps(CONFIG_SCHEMA, indent=2) + "\n")
    paths.append(p)
    for name, schema in DOCUMENT_SCHEMAS.items():
        p = directory / f"{name}.schema.json"
        p.write_text(json.dumps({"$schema": "http://json-schema.org/draft-07/schema#", **schema},
                                indent=2) + "\n")
        paths.append(p)
    return paths
