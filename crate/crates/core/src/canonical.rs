//! Canonical JSON: object keys sorted, no insignificant whitespace, floats
//! rounded to 9 significant digits and printed in shortest round-trip form.
//! Equal values always serialize to equal bytes.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

/// Significant digits kept for floating-point numbers.
pub const FLOAT_DIGITS: usize = 9;

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

pub fn to_vec<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    to_string(value).map(String::into_bytes)
}

/// Formats `x` rounded to [`FLOAT_DIGITS`] significant digits.
pub fn format_float(x: f64) -> String {
    let rounded: f64 = format!("{:.*e}", FLOAT_DIGITS - 1, x).parse().expect("formatted float parses");
    // fold -0.0 into 0.0
    let rounded = rounded + 0.0;
    format!("{rounded:?}")
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                write!(out, "{n}").expect("write to String");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            out.push('{');
            for (i, (k, item)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(std::f64::consts::FRAC_1_SQRT_2), "0.707106781");
        assert_eq!(format_float(-0.0), "0.0");
        assert_eq!(format_float(1.23456789012e-20), "1.23456789e-20");
        assert_eq!(format_float(123456789.6), "123456790.0");
    }

    #[test]
    fn sorted_compact() {
        let v = json!({"b": [1, 2.25, "x\"y"], "a": {"z": null, "c": true}});
        assert_eq!(to_string(&v).unwrap(), r#"{"a":{"c":true,"z":null},"b":[1,2.25,"x\"y"]}"#);
    }

    #[test]
    fn output_reparses() {
        let v = json!({"x": 0.1 + 0.2, "y": -3.0e-7});
        let s = to_string(&v).unwrap();
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.3);
        assert_eq!(to_string(&back).unwrap(), s);
    }
}
