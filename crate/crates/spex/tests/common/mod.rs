//! Shared test helpers: binary invocation and a minimal validator covering
//! the JSON Schema subset the shipped schemas use (type, properties,
//! required, items, enum, additionalProperties).

use std::process::{Command, Output};

use serde_json::Value;

pub fn spex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spex"))
        .args(args)
        .output()
        .expect("spawn spex binary")
}

pub fn spex_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spex"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn spex binary")
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn type_matches(ty: &str, value: &Value) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "integer" => value.as_number().is_some_and(|n| n.is_i64() || n.is_u64()),
        "number" => value.is_number(),
        other => panic!("unsupported schema type {other:?}"),
    }
}

/// Validate `value` against the schema subset; returns the path of the
/// first violation.
pub fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(allowed) = schema.get("enum") {
        let options = allowed.as_array().expect("enum is an array");
        if !options.iter().any(|opt| opt == value) {
            return Err(format!("{path}: {value} not in enum {allowed}"));
        }
        return Ok(());
    }
    if let Some(ty) = schema.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(t, value),
            Value::Array(ts) => ts
                .iter()
                .any(|t| type_matches(t.as_str().expect("type entries are strings"), value)),
            other => panic!("unsupported type spec {other:?}"),
        };
        if !ok {
            return Err(format!("{path}: {value} does not match type {ty}"));
        }
    }
    if value.is_null() {
        return Ok(());
    }
    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().expect("required entries are strings");
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required key {key:?}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        let additional = schema.get("additionalProperties").and_then(Value::as_bool);
        for (key, sub) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub_schema) => validate(sub_schema, sub, &format!("{path}.{key}"))?,
                None => {
                    if additional == Some(false) {
                        return Err(format!("{path}: unexpected key {key:?}"));
                    }
                }
            }
        }
    }
    if let Some(arr) = value.as_array() {
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in arr.iter().enumerate() {
                validate(item_schema, item, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

pub fn assert_valid(schema_text: &str, value: &Value) {
    let schema: Value = serde_json::from_str(schema_text).expect("schema parses");
    if let Err(msg) = validate(&schema, value, "$") {
        panic!("schema violation: {msg}\nvalue: {value:#}");
    }
}
