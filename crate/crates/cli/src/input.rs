//! Versioned JSON input files.
//!
//! Every file is an object carrying `"schema": 1` next to the fields of the
//! wrapped type. Other versions, a missing tag and unknown fields are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

pub fn parse_versioned<T: DeserializeOwned + serde::Serialize>(text: &str, what: &str) -> Result<T, CliError> {
    let bad = |why: String| CliError::Schema(format!("{what}: {why}"));
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let Value::Object(mut obj) = v else { return Err(bad("expected a JSON object".into())) };
    match obj.remove("schema") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(bad(format!("unsupported schema version {other}"))),
        None => return Err(bad("missing \"schema\" field".into())),
    }
    let value: T = serde_json::from_value(Value::Object(obj.clone())).map_err(|e| bad(e.to_string()))?;
    // Round-tripping exposes fields the type silently ignored.
    if let Value::Object(back) = serde_json::to_value(&value).map_err(|e| bad(e.to_string()))? {
        if let Some(k) = obj.keys().find(|k| !back.contains_key(*k)) {
            return Err(bad(format!("unknown field {k:?}")));
        }
    }
    Ok(value)
}

pub fn read_versioned<T: DeserializeOwned + serde::Serialize>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_versioned(&text, what)
}

/// `value` wrapped with the current schema tag.
pub fn versioned<T: serde::Serialize>(value: &T) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), SCHEMA_VERSION.into());
    if let Ok(Value::Object(fields)) = serde_json::to_value(value) {
        obj.extend(fields);
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use iwasawa_core::kida::TowerData;

    const TOWER: &str = r#"{"schema": 1, "p": 3, "degree": 1, "delta": 0, "primes": [],
        "lambda_K": 2, "mu_K": 0, "theta_ok": true}"#;

    #[test]
    fn accepts_version_one() {
        let t: TowerData = parse_versioned(TOWER, "tower").unwrap();
        assert_eq!((t.lambda_k, t.degree), (2, 1));
        assert_eq!(versioned(&t)["schema"], 1);
    }

    #[test]
    fn rejects_other_versions_and_shapes() {
        for text in [
            TOWER.replace("\"schema\": 1", "\"schema\": 2"),
            TOWER.replace("\"schema\": 1,", ""),
            TOWER.replace("\"degree\"", "\"degre\""),
            TOWER.replace("\"theta_ok\": true", "\"theta_ok\": true, \"extra\": 0"),
            "[1, 2]".into(),
            "{\"schema\": 1,".into(),
        ] {
            assert!(matches!(parse_versioned::<TowerData>(&text, "tower"), Err(CliError::Schema(_))), "{text}");
        }
    }
}
