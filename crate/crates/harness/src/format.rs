//! Fixed textual forms for artifact numbers.

use serde_json::{Number, Value};

/// 17 significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// JSON number with 17 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str::<Number>(&sci(x)).map(Value::Number).expect("formatted float parses")
}

/// Rewrites every non-integer number in `v` to the 17-digit form.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

/// Pretty JSON text with a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
