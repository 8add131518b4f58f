//! Byte-stable float formatting and structured output helpers.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// 17 significant digits in scientific notation; round-trips every `f64`.
/// Non-finite values print as `nan`, `inf`, `-inf`; `-0` prints as `0`.
pub fn f17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:.16e}", if x == 0.0 { 0.0 } else { x })
    }
}

/// Short human-readable float.
pub fn short(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.6e}")
    }
}

/// A float serialized as a JSON number with 17 significant digits
/// (`null` when not finite).
#[derive(Clone, Copy, Debug)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(f17(self.0)).map_err(S::Error::custom)?.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn f17_vec(v: &[f64]) -> Vec<F17> {
    v.iter().map(|x| F17(*x)).collect()
}

/// One JSON line.
pub fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("output records serialize");
    s.push('\n');
    s
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
