//! JSON Schema of the configuration document, printed by `--print-schema`.

use serde_json::{json, Value};

fn seed(description: &str) -> Value {
    json!({"type": "integer", "minimum": 0, "description": description})
}

fn quantities(default: &str) -> Value {
    json!({
        "type": "array",
        "items": {"enum": ["observable", "fidelity"]},
        "default": ["observable", "fidelity"],
        "description": default,
    })
}

fn recurrence() -> Value {
    json!({
        "type": "object",
        "additionalProperties": false,
        "properties": {
            "u": {"type": "number", "default": 0.1, "description": "closeness radius, in units of ||A|| for observables"},
            "delta": {"type": "number", "default": 0.05, "description": "minimum residence time of a recurrence"},
            "dt": {"type": "number", "description": "grid step; defaults to pi / (10 max|E|)"},
            "t_max": {"type": "number", "default": 1000.0, "description": "scan horizon"},
            "quantities": quantities("quantities to scan (spin pipelines only)"),
        },
    })
}

pub fn schema() -> Value {
    let orders = |default: Value, hi: usize| {
        json!({"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": hi}, "default": default})
    };
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "equilibria experiment",
        "type": "object",
        "additionalProperties": false,
        "properties": {
            "pipeline": {
                "enum": ["model", "quench", "moments", "genericity", "tails", "recur", "fermion", "fig1", "fig2", "bounds"],
                "description": "optional; must match the subcommand when present",
            },
            "seed": {"type": "integer", "minimum": 0, "default": 1, "description": "root seed; streams without an explicit seed derive from it; --seed overrides"},
            "out": {"type": "string", "description": "output directory; --out overrides; default results/<pipeline>"},
            "model": {
                "description": "Hamiltonian",
                "oneOf": [
                    {
                        "type": "object",
                        "additionalProperties": false,
                        "required": ["type", "L"],
                        "properties": {
                            "type": {"const": "spin_chain"},
                            "L": {"type": "integer", "minimum": 2, "maximum": 16},
                            "n_up": {"type": "integer", "description": "up spins; defaults to L/2"},
                            "J1": {"type": "number", "default": -1.0},
                            "g1": {"type": "number", "default": 1.0},
                            "J2": {"type": "number", "default": -0.2},
                            "g2": {"type": "number", "default": 0.5},
                            "boundary": {"enum": ["periodic", "open"], "default": "periodic"},
                        },
                    },
                    {
                        "type": "object",
                        "additionalProperties": false,
                        "required": ["type", "dim"],
                        "properties": {
                            "type": {"const": "gue"},
                            "dim": {"type": "integer", "minimum": 1},
                            "seed": seed("matrix seed"),
                        },
                    },
                    {
                        "type": "object",
                        "additionalProperties": false,
                        "required": ["type", "levels"],
                        "properties": {
                            "type": {"const": "levels"},
                            "levels": {"type": "array", "items": {"type": "number"}, "description": "non-decreasing; the computational basis is the eigenbasis"},
                        },
                    },
                ],
            },
            "state": {
                "description": "initial state",
                "oneOf": [
                    {"type": "object", "properties": {"type": {"enum": ["neel", "neel_symmetric", "domainwall_translated"]}}, "required": ["type"], "additionalProperties": false},
                    {"type": "object", "properties": {"type": {"const": "haar"}, "seed": seed("state seed")}, "required": ["type"], "additionalProperties": false},
                    {"type": "object", "properties": {"type": {"const": "basis"}, "index": {"type": "integer"}}, "required": ["type", "index"], "additionalProperties": false},
                    {"type": "object", "properties": {"type": {"const": "eigenstate"}, "index": {"type": "integer", "default": 0}}, "required": ["type"], "additionalProperties": false},
                    {
                        "type": "object",
                        "properties": {
                            "type": {"const": "amplitudes"},
                            "re": {"type": "array", "items": {"type": "number"}},
                            "im": {"type": "array", "items": {"type": "number"}},
                        },
                        "required": ["type", "re"],
                        "additionalProperties": false,
                    },
                ],
            },
            "observable": {
                "description": "observable A",
                "oneOf": [
                    {"type": "object", "properties": {"type": {"const": "sigma_z"}, "site": {"type": "integer", "minimum": 1, "description": "1-based"}}, "required": ["type", "site"], "additionalProperties": false},
                    {"type": "object", "properties": {"type": {"enum": ["identity", "projector"]}}, "required": ["type"], "additionalProperties": false},
                    {"type": "object", "properties": {"type": {"const": "gue"}, "seed": seed("matrix seed")}, "required": ["type"], "additionalProperties": false},
                    {
                        "type": "object",
                        "properties": {
                            "type": {"const": "matrix"},
                            "re": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                            "im": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                        },
                        "required": ["type", "re"],
                        "additionalProperties": false,
                    },
                ],
            },
            "sampling": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "horizon": {"type": "number", "description": "T; defaults to 1e4 * 2 pi / g_min"},
                    "n_samples": {"type": "integer", "default": 100000},
                    "seed": seed("sampling seed"),
                    "bins": {"type": "integer", "default": 60},
                },
            },
            "moments": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "orders": orders(json!([1, 2, 3, 4]), 4),
                    "tolerance": {"type": "number", "description": "resonance tolerance; defaults to 1e-10 ||H||"},
                    "sample": {"type": "boolean", "default": true, "description": "add sampled estimates"},
                    "quantities": quantities("quantities to report"),
                },
            },
            "recurrence": recurrence(),
            "tails": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "points": {"type": "integer", "default": 20, "description": "grid delta_k = k delta_max / points"},
                    "quantities": quantities("quantities to report"),
                },
            },
            "series": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "t_max": {"type": "number", "default": 20.0},
                    "points": {"type": "integer", "default": 401},
                },
            },
            "genericity": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "q_max": {"type": "integer", "minimum": 1, "maximum": 3, "default": 3},
                    "tolerance": {"type": "number", "description": "defaults to 1e-10 ||H||"},
                    "populated_only": {"type": "boolean", "default": false, "description": "check only levels the state populates"},
                },
            },
            "fig1": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "horizons": {"type": "array", "items": {"type": "number"}, "default": [1.0, 10.0, 100.0]},
                    "include_default": {"type": "boolean", "default": true, "description": "append T = 1e4 * 2 pi / g_min"},
                },
            },
            "fig2": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "sizes": {"type": "array", "items": {"type": "integer"}, "default": [6, 8, 10, 12]},
                    "states": {
                        "type": "array",
                        "items": {"enum": ["neel", "neel_symmetric", "domainwall_translated"]},
                        "default": ["neel", "neel_symmetric", "domainwall_translated"],
                    },
                    "eigenstate_control": {"type": "boolean", "default": true},
                },
            },
            "bounds": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "setups": {"type": "integer", "default": 30},
                    "dims": {"type": "array", "items": {"type": "integer"}, "default": [4, 8, 16, 32]},
                    "orders": orders(json!([2, 4]), 4),
                    "trace_orders": {"type": "array", "items": {"type": "integer", "minimum": 2}, "default": [2, 3, 4, 5, 6]},
                },
            },
            "fermion": {
                "type": "object",
                "additionalProperties": false,
                "required": ["model"],
                "properties": {
                    "model": {
                        "oneOf": [
                            {"type": "object", "properties": {"M": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}}, "required": ["M"], "additionalProperties": false},
                            {
                                "type": "object",
                                "properties": {"type": {"const": "generic_extended"}, "L": {"type": "integer", "minimum": 2}, "seed": seed("model seed")},
                                "required": ["type", "L"],
                                "additionalProperties": false,
                            },
                        ],
                    },
                    "state": {
                        "oneOf": [
                            {"type": "object", "properties": {"type": {"const": "random_slater"}, "particles": {"type": "integer", "description": "defaults to L/2"}, "seed": seed("orbital seed")}, "required": ["type"], "additionalProperties": false},
                            {"type": "object", "properties": {"type": {"const": "sites"}, "sites": {"type": "array", "items": {"type": "integer"}, "description": "0-based"}}, "required": ["type", "sites"], "additionalProperties": false},
                            {"type": "object", "properties": {"type": {"const": "modes"}, "modes": {"type": "array", "items": {"type": "integer"}}}, "required": ["type", "modes"], "additionalProperties": false},
                        ],
                    },
                    "pairs": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}, "description": "0-based (m, n); defaults to (0,0), (0,1), (0,L/2)"},
                    "orders": orders(json!([2, 4]), 4),
                    "sample": {"type": "boolean", "default": false},
                    "recurrence": recurrence(),
                    "extensivity_threshold": {"type": "number", "default": 4.0, "description": "max|O_jk| sqrt(L) above this is reported as localized"},
                },
            },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, Pipeline};

    /// Every key of `value` must be declared at the same place in `schema`.
    fn covered(value: &Value, schema: &Value, path: &str) {
        let Value::Object(map) = value else { return };
        let mut props = serde_json::Map::new();
        if let Some(Value::Object(p)) = schema.get("properties") {
            props.extend(p.clone());
        }
        for alt in schema.get("oneOf").and_then(Value::as_array).into_iter().flatten() {
            if let Some(Value::Object(p)) = alt.get("properties") {
                props.extend(p.clone());
            }
        }
        for (k, v) in map {
            let sub = props.get(k).unwrap_or_else(|| panic!("{path}.{k} is not in the schema"));
            covered(v, sub, &format!("{path}.{k}"));
        }
    }

    #[test]
    fn schema_documents_every_field() {
        let s = schema();
        for p in [Pipeline::Quench, Pipeline::Fermion] {
            let mut cfg = ExperimentConfig::builtin(p);
            cfg.out = Some("x".into());
            if let Some(f) = cfg.fermion.as_mut() {
                f.pairs = Some(vec![(0, 1)]);
                f.recurrence = Some(Default::default());
            }
            covered(&serde_json::to_value(&cfg).unwrap(), &s, "");
        }
    }
}
