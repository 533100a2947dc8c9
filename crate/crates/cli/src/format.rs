use polycond::numlin::C64;

use crate::error::{CliError, CliResult};

/// Default number of significant digits; enough to round-trip any f64.
pub const DEFAULT_DIGITS: usize = 17;

/// Scientific notation with `digits` significant digits; `inf`, `-inf`, `nan` otherwise.
pub fn num(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{:.*e}", digits.max(1) - 1, v)
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt(v: Option<f64>, digits: usize, missing: &str) -> String {
    v.map_or_else(|| missing.to_string(), |x| num(x, digits))
}

pub fn complex(z: C64, digits: usize) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", num(z.re, digits), sign, num(z.im.abs(), digits))
}

/// Parses `re`, `imi`, `re+imi`, `re-imi` (also with `j`), e.g. `1`, `-2.5i`, `1e-3-4i`, `i`.
pub fn parse_complex(text: &str) -> CliResult<C64> {
    let bad = || CliError::Parse(format!("invalid complex literal '{text}' (expected re, imi or re+imi)"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(C64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_at_default_digits() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 6.02214076e23, -0.0] {
            let s = num(v, DEFAULT_DIGITS);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(num(f64::INFINITY, 5), "inf");
        assert_eq!(num(0.6, 4), "6.000e-1");
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("1", C64::new(1.0, 0.0)),
            ("-2.5", C64::new(-2.5, 0.0)),
            ("i", C64::new(0.0, 1.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("3i", C64::new(0.0, 3.0)),
            ("1+2i", C64::new(1.0, 2.0)),
            ("1-2j", C64::new(1.0, -2.0)),
            ("-1e-3+4e2i", C64::new(-1e-3, 4e2)),
            ("2e+1-1e-2i", C64::new(20.0, -0.01)),
            ("1+i", C64::new(1.0, 1.0)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for s in ["", "x", "1+", "1+2", "i+1", "nan"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }
}
