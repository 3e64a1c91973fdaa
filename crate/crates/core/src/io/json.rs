//! Deterministic JSON: keys sorted, floats rounded to 12 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        v => v,
    }
}

/// Pretty JSON with sorted keys and rounded floats; non-finite floats become `null`.
pub fn to_canonical_value<T: Serialize>(x: &T) -> Result<Value> {
    let v = serde_json::to_value(x).map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    Ok(round_value(v))
}

pub fn to_canonical_json<T: Serialize>(x: &T) -> Result<String> {
    let v = to_canonical_value(x)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(-1.234567890123456e-7), -1.23456789012e-7);
    }

    #[test]
    fn keys_sorted_and_stable() {
        let mut m = HashMap::new();
        for (k, v) in [("zeta", 1.0), ("alpha", 2.0 / 3.0), ("mid", f64::INFINITY)] {
            m.insert(k, v);
        }
        let s = to_canonical_json(&m).unwrap();
        assert_eq!(s, "{\n  \"alpha\": 0.666666666667,\n  \"mid\": null,\n  \"zeta\": 1.0\n}\n");
    }
}
