//! Parsing of complex literals of the form `a+bi` (no spaces), e.g. `2i`,
//! `0.3+0.1i`, `-1.5-2e-3i`, `1`, `i`, `-i`.

use anyhow::{bail, Result};
use num_complex::Complex64;

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        bail!("empty complex literal");
    }
    if s.contains(char::is_whitespace) {
        bail!("complex literal '{s}' must not contain spaces");
    }
    if !s.ends_with('i') {
        // purely real
        return Ok(Complex64::new(parse_real(s)?, 0.0));
    }
    let body = &s[..s.len() - 1];
    // find the sign that splits real and imaginary parts: the last '+'/'-'
    // that is not the leading sign and not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }
    match split {
        None => {
            // purely imaginary: "2i", "i", "-i"
            let im = match body {
                "" => 1.0,
                "-" => -1.0,
                "+" => 1.0,
                other => parse_real(other)?,
            };
            Ok(Complex64::new(0.0, im))
        }
        Some(idx) => {
            let re = parse_real(&body[..idx])?;
            let im_str = &body[idx..];
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                other => parse_real(other)?,
            };
            Ok(Complex64::new(re, im))
        }
    }
}

fn parse_real(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| anyhow::anyhow!("invalid real literal '{s}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-1.5").unwrap(), Complex64::new(-1.5, 0.0));
        assert_eq!(
            parse_complex("0.3+0.1i").unwrap(),
            Complex64::new(0.3, 0.1)
        );
        assert_eq!(
            parse_complex("-1.5-2i").unwrap(),
            Complex64::new(-1.5, -2.0)
        );
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2e-4i").unwrap(),
            Complex64::new(1e-3, 2e-4)
        );
        assert_eq!(parse_complex("0.5+i").unwrap(), Complex64::new(0.5, 1.0));
        assert!(parse_complex("1 + 2i").is_err());
        assert!(parse_complex("abc").is_err());
    }
}
