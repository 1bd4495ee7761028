//! Byte-stable JSON: object keys sorted, floats written with 17 significant
//! digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// `v` with 17 significant digits, trailing zeros trimmed; positional for
/// exponents in `[-5, 17)`, scientific otherwise.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let mut s = format!("{v:.decimals$}");
        if s.contains('.') {
            let trimmed = s.trim_end_matches('0').len();
            s.truncate(trimmed);
            if s.ends_with('.') {
                s.push('0');
            }
        } else {
            s.push_str(".0");
        }
        s
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

struct StableFormatter;

impl Formatter for StableFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes through `serde_json::Value` (whose maps are ordered) and writes
/// compactly with [`format_f64`] for every float.
pub fn to_stable_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut out, StableFormatter))?;
    Ok(String::from_utf8(out).expect("JSON is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_f64(3.0), "3.0");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(-2.5), "-2.5");
        assert_eq!(format_f64(1e-12), "9.9999999999999998e-13");
        assert_eq!(format_f64(1.5e20), "1.5e20");
        assert_eq!(format_f64(123456.0), "123456.0");
        assert_eq!(format_f64(0.0), "0.0");
        for v in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, 6.02e23, -7.25e-7, 123456789.123] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn keys_sorted() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: u32,
            mid: Vec<f64>,
        }
        let s = to_stable_json(&S { zeta: 0.5, alpha: 3, mid: vec![1.0, 0.2] }).unwrap();
        assert_eq!(s, r#"{"alpha":3,"mid":[1.0,0.20000000000000001],"zeta":0.5}"#);
    }
}
