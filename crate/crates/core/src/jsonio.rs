//! JSON emission with floats at 17 significant digits.
//!
//! Seventeen digits pin down an f64 exactly, so payloads round-trip
//! bit-for-bit and repeated runs are byte-identical.

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

use crate::error::{Error, Result};

struct SigDigits(CompactFormatter);

impl Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{}", fmt_f64(value as f64))
    }
}

/// One f64 at 17 significant digits in scientific form, valid as a JSON
/// number.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serialize with the fixed-width float formatter.
pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SigDigits(CompactFormatter));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.0, 0.5, 1.0 / 3.0, -0.155_389_912_205_533_33, 1e-300, 6.02e23] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn serializes_numbers_in_scientific_form() {
        #[derive(serde::Serialize)]
        struct P {
            x: f64,
            n: u32,
        }
        let s = to_string(&P { x: 0.5, n: 3 }).unwrap();
        assert_eq!(s, r#"{"x":5.0000000000000000e-1,"n":3}"#);
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap(), 0.5);
    }
}
