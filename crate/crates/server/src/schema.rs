//! Payload schemas served at `GET /schema` (JSON Schema, draft 2020-12).

use serde_json::{json, Value};

pub fn schema() -> Value {
    let element = json!({
        "description": "lattice: integer array; free group: reduced word like \"abA\" (\"\" or \"1\" is the identity); heisenberg: [a, b, 2c]",
        "anyOf": [
            {"type": "array", "items": {"type": "integer"}},
            {"type": "string", "pattern": "^([a-zA-Z]*|1)$"}
        ]
    });
    let shape = json!({"type": "array", "items": {"$ref": "#/$defs/element"}});
    let group = json!({
        "description": "{\"lattice\": d}, {\"free\": n} or \"heisenberg\"",
        "anyOf": [
            {"type": "object", "properties": {"lattice": {"type": "integer", "minimum": 1}}, "required": ["lattice"]},
            {"type": "object", "properties": {"free": {"type": "integer", "minimum": 1}}, "required": ["free"]},
            {"const": "heisenberg"}
        ]
    });
    let mv = json!({
        "type": "object",
        "description": "swap across the translate gS: a leaves the support, b enters (either orientation is accepted)",
        "properties": {"g": {"$ref": "#/$defs/element"}, "a": {"$ref": "#/$defs/element"}, "b": {"$ref": "#/$defs/element"}},
        "required": ["g", "a", "b"]
    });
    let state = json!({
        "type": "object",
        "properties": {
            "id": {"type": "string"},
            "group": {"$ref": "#/$defs/group"},
            "s": {"$ref": "#/$defs/shape"},
            "t": {"$ref": "#/$defs/shape"},
            "support": {"$ref": "#/$defs/shape"},
            "history_len": {"type": "integer"},
            "has_family": {"type": "boolean"}
        }
    });
    let create = json!({
        "type": "object",
        "properties": {
            "group": {"$ref": "#/$defs/group"},
            "s": {"$ref": "#/$defs/shape"},
            "t": {"$ref": "#/$defs/shape", "description": "defaults to the translated lax corners of S"},
            "geometry": {"description": "\"std-lattice\", \"tree-convex\", \"heisenberg-exp\" or {\"order-lower-sets\": order}"},
            "initial": {"$ref": "#/$defs/shape"},
            "family": {"type": "object", "description": "TEP family, needed for independence probes"},
            "moves": {"type": "array", "items": {"$ref": "#/$defs/move"}, "description": "replayed in order after creation"}
        },
        "required": ["group", "s", "initial"]
    });
    let error = json!({
        "type": "object",
        "properties": {"error": {"type": "string"}, "detail": {}},
        "required": ["error"]
    });
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$defs": {
            "element": element, "shape": shape, "group": group, "move": mv,
            "state": state, "create_session": create, "error": error,
        },
        "endpoints": {
            "POST /sessions": {"body": "create_session", "201": {"id": "string", "state": "state"}, "errors": [400, 409, 422]},
            "GET /sessions/{id}": {"200": "state", "errors": [404]},
            "DELETE /sessions/{id}": {"204": null, "errors": [404]},
            "GET /sessions/{id}/moves": {"200": {"moves": [{"move": "move", "leaving": "element", "entering": "element"}]}, "errors": [404]},
            "POST /sessions/{id}/moves": {"body": "move", "200": "state", "errors": [400, 404, 409]},
            "POST /sessions/{id}/undo": {"200": "state", "errors": [404, 409]},
            "GET /sessions/{id}/history": {"200": "create_session", "errors": [404]},
            "GET /sessions/{id}/independence?budget=N": {"200": {"independent": "boolean", "support_size": "integer"}, "errors": [400, 404, 409, 413]},
            "GET /sessions/{id}/component?limit=N": {"200": {"size": "integer", "exhausted": true}, "errors": [400, 404, 413]},
            "POST /sessions/{id}/component/jobs?limit=N": {"202": {"job": "string", "status": "running"}, "errors": [400, 404]},
            "GET /jobs/{id}": {"200": {"job": "string", "status": "running | done | failed", "report": {"size": "integer", "exhausted": "boolean", "budget": "integer"}}, "errors": [404]},
            "GET /schema": {"200": "this document"}
        }
    })
}
