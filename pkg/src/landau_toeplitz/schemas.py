"""JSON schemas for symbols and experiment configurations."""

import jsonschema

TERM_SCHEMA = {
    "type": "object",
    "properties": {
        "c": {"type": "number"},
        "a": {"type": "number"},
        "gamma": {"type": "number", "minimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["c"],
    "additionalProperties": False,
}

SYMBOL_SCHEMA = {
    "type": "object",
    "properties": {
        "terms": {"type": "array", "items": TERM_SCHEMA},
        "cutoff": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["none", "inside", "outside"]},
                "radius": {"type": "number", "minimum": 0},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
    },
    "required": ["terms"],
    "additionalProperties": False,
}

METRIC_SCHEMA = {
    "type": "object",
    "properties": {k: SYMBOL_SCHEMA for k in ("m11", "m22", "m12_re", "m12_im")},
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": ["eigs", "asymp", "compare", "counting", "galerkin"]},
        "kind": {"enum": ["gaussian", "power_decay", "disk", "symbol", "metric"]},
        "b": {"type": "number", "exclusiveMinimum": 0},
        "q": {"type": "integer", "minimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "rho": {"type": "number", "exclusiveMinimum": 0},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "m": {"type": "integer", "minimum": 0},
        "delta": {"type": "number"},
        "K": {"type": "integer", "minimum": 1},
        "k_min": {"type": "integer", "minimum": 1},
        "k_max": {"type": "integer", "minimum": 1},
        "Q": {"type": "integer", "minimum": 0},
        "sign": {"enum": ["+", "-"]},
        "prediction": {"enum": ["theorem", "lemma"]},
        "amplitude": {"type": "number"},
        "lambda_min": {"type": "number", "exclusiveMinimum": 0},
        "lambda_max": {"type": "number", "exclusiveMinimum": 0},
        "lambda_steps": {"type": "integer", "minimum": 1},
        "symbol": SYMBOL_SCHEMA,
        "metric": METRIC_SCHEMA,
        "out": {"type": "string"},
        "threads": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
    "additionalProperties": False,
}


class SchemaError(ValueError):
    """Configuration or symbol failed schema validation."""


def _validate(instance, schema):
    try:
        jsonschema.validate(instance, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {exc.message}") from None


def validate_symbol(d):
    _validate(d, SYMBOL_SCHEMA)


def validate_metric(d):
    _validate(d, METRIC_SCHEMA)


def validate_config(d):
    _validate(d, CONFIG_SCHEMA)
