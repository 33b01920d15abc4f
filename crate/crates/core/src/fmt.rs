//! Float formatting shared by every serialized report.
//!
//! Values are rounded to 15 significant digits and then written in their
//! shortest round-trip form, so identical inputs give byte-identical output.

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub const SIGNIFICANT_DIGITS: usize = 15;

/// Rounds to 15 significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Text form used in CSV/TSV output and matrix dumps.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        let r = round_sig(x);
        // normalise -0
        if r == 0.0 {
            "0".to_string()
        } else if r.is_finite() && !(1e-5..1e15).contains(&r.abs()) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

pub fn ser_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&round_sig(*x))?;
    }
    seq.end()
}

/// Complex vectors serialize as `[[re, im], ...]`.
pub fn ser_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[round_sig(z.re), round_sig(z.im)])?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig(-2.5), -2.5);
        assert!(round_sig(f64::NAN).is_nan());
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(2.75), "2.75");
        assert_eq!(format_float(1e-13), "1e-13");
        assert_eq!(format_float(1e-13 / 3.0), "3.33333333333333e-14");
        assert_eq!(format_float(0.001), "0.001");
    }
}
