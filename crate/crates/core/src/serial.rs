//! JSON-facing representations: complex numbers as `{re, im}` objects and
//! matrices as row-major arrays of rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{AlgebraElement, CartanElement};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C64 {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<C64> for Complex64 {
    fn from(z: C64) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<CartanElement> for Vec<C64> {
    fn from(h: CartanElement) -> Self {
        h.diag().iter().copied().map(C64::from).collect()
    }
}

impl TryFrom<Vec<C64>> for CartanElement {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        CartanElement::new(v.into_iter().map(Complex64::from).collect())
    }
}

impl From<AlgebraElement> for Vec<Vec<C64>> {
    fn from(x: AlgebraElement) -> Self {
        matrix_rows(&x)
    }
}

impl TryFrom<Vec<Vec<C64>>> for AlgebraElement {
    type Error = Error;
    fn try_from(rows: Vec<Vec<C64>>) -> Result<Self> {
        element_from_rows(&rows)
    }
}

/// `#[serde(with = "crate::serial::complex")]` for `Complex64` fields.
pub mod complex {
    use super::C64;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        C64::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        C64::deserialize(d).map(Complex64::from)
    }
}

/// Same as [`complex`] for `Vec<Complex64>`.
pub mod complex_vec {
    use super::C64;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().copied().map(C64::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Vec::<C64>::deserialize(d).map(|v| v.into_iter().map(Complex64::from).collect())
    }
}

/// Row-major matrix of `{re, im}` entries.
pub fn matrix_rows(x: &AlgebraElement) -> Vec<Vec<C64>> {
    let n = x.n();
    (0..n)
        .map(|i| (0..n).map(|j| C64::from(x.entry(i, j))).collect())
        .collect()
}

pub fn element_from_rows(rows: &[Vec<C64>]) -> Result<AlgebraElement> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().copied().map(Complex64::from).collect())
        .collect();
    AlgebraElement::from_rows(&rows)
}

/// Formats `a+bi` with the shortest round-tripping decimal for each part.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (whitespace ignored,
/// exponents allowed).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let parse_f = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(parse_f(&s)?, 0.0));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_txt, im_txt) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_txt {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse_f(t)?,
    };
    let re = if re_txt.is_empty() { 0.0 } else { parse_f(re_txt)? };
    Ok(Complex64::new(re, im))
}

/// Comma-separated list of complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidInput(format!("cannot parse real number {t:?}")))
        })
        .collect()
}
