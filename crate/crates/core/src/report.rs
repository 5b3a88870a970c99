//! JSON and text output with 17 significant digits for every float.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// `{:.16e}`: enough digits to round-trip an `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn reformat(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => match n.as_f64() {
            Some(x) if x.is_finite() => {
                Value::Number(fmt17(x).parse::<Number>().expect("formatted float parses"))
            }
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(reformat).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, reformat(v))).collect()),
        other => other,
    }
}

/// Serializes `value` with every float written as `d.dddddddddddddddde±x`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    serde_json::to_string_pretty(&reformat(v)).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        x: f64,
        n: usize,
        v: Vec<f64>,
    }

    #[test]
    fn floats_round_trip_with_17_digits() {
        let s = Sample { x: 0.1 + 0.2, n: 3, v: vec![1.0, -2.5e-300] };
        let text = to_json(&s).unwrap();
        assert!(text.contains("3.0000000000000004e-1"), "{text}");
        assert!(text.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1 + 0.2);
        assert_eq!(back["v"][1].as_f64().unwrap(), -2.5e-300);
    }
}
