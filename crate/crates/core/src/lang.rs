//! Text form of functions and complex literals.
//!
//! ```text
//! expr    := "0" | term (" + " term)*
//! term    := "mono" " A=" complex " n=" int
//!          | "km" " A=" complex " z0=" complex " n=" int " lam=" complex
//! complex := real | real "i" | real ("+"|"-") real "i" | "i" | "-i"
//! ```
//!
//! Keys inside a term may appear in any order; `km` defaults missing keys to
//! `A=1 z0=0 n=0 lam=0`. Complex literals never contain spaces.

use num_traits::Zero;

use crate::error::FockError;
use crate::funcrep::{FnExpr, KernelMonomial, C64};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

impl From<SyntaxError> for FockError {
    fn from(e: SyntaxError) -> Self {
        FockError::Usage(e.to_string())
    }
}

fn syntax(position: usize, message: impl Into<String>) -> SyntaxError {
    SyntaxError {
        position,
        message: message.into(),
    }
}

fn parse_real(text: &str, position: usize) -> std::result::Result<f64, SyntaxError> {
    let v: f64 = text
        .parse()
        .map_err(|_| syntax(position, format!("invalid number `{text}`")))?;
    if !v.is_finite() {
        return Err(syntax(position, format!("non-finite literal `{text}`")));
    }
    Ok(v)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (exponents allowed, e.g. `1e-3-2.5E+1i`).
pub fn parse_complex(text: &str) -> std::result::Result<C64, SyntaxError> {
    parse_complex_at(text, 0)
}

fn parse_complex_at(text: &str, offset: usize) -> std::result::Result<C64, SyntaxError> {
    if text.is_empty() {
        return Err(syntax(offset, "empty complex literal"));
    }
    let Some(body) = text.strip_suffix('i') else {
        return Ok(C64::new(parse_real(text, offset)?, 0.0));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse_real(t, offset + re_text.len())?,
    };
    let re = if re_text.is_empty() { 0.0 } else { parse_real(re_text, offset)? };
    Ok(C64::new(re, im))
}

/// Canonical `a+bi` form; parses back to the identical value.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", z.re, sign, z.im.abs())
}

/// Parses a function expression.
pub fn parse_function(text: &str) -> std::result::Result<FnExpr, SyntaxError> {
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(FnExpr::zero());
    }
    let mut terms = Vec::new();
    let mut cursor = text.len() - text.trim_start().len();
    for chunk in trimmed.split(" + ") {
        terms.push(parse_term(chunk, cursor)?);
        cursor += chunk.len() + 3;
    }
    Ok(FnExpr::from_terms_raw(terms))
}

fn parse_term(chunk: &str, offset: usize) -> std::result::Result<KernelMonomial, SyntaxError> {
    let mut words = chunk.split(' ').filter(|w| !w.is_empty());
    let head = words.next().ok_or_else(|| syntax(offset, "empty term"))?;
    let mut amplitude = C64::new(1.0, 0.0);
    let mut root = C64::zero();
    let mut degree = 0u32;
    let mut rate = C64::zero();
    let allowed: &[&str] = match head {
        "mono" => &["A", "n"],
        "km" => &["A", "z0", "n", "lam"],
        other => return Err(syntax(offset, format!("unknown term kind `{other}` (expected `mono` or `km`)"))),
    };
    for word in words {
        let pos = offset + word.as_ptr() as usize - chunk.as_ptr() as usize;
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| syntax(pos, format!("expected key=value, got `{word}`")))?;
        if !allowed.contains(&key) {
            return Err(syntax(pos, format!("key `{key}` not allowed in `{head}`")));
        }
        let vpos = pos + key.len() + 1;
        match key {
            "A" => amplitude = parse_complex_at(value, vpos)?,
            "z0" => root = parse_complex_at(value, vpos)?,
            "lam" => rate = parse_complex_at(value, vpos)?,
            "n" => {
                degree = value
                    .parse()
                    .map_err(|_| syntax(vpos, format!("invalid degree `{value}`")))?
            }
            _ => unreachable!(),
        }
    }
    Ok(KernelMonomial {
        amplitude,
        root,
        degree,
        rate,
    })
}

/// Canonical text of an expression.
pub fn print_function(f: &FnExpr) -> String {
    if f.terms().is_empty() {
        return "0".to_string();
    }
    f.terms()
        .iter()
        .map(|t| {
            if t.root.is_zero() && t.rate.is_zero() {
                format!("mono A={} n={}", format_complex(t.amplitude), t.degree)
            } else {
                format!(
                    "km A={} z0={} n={} lam={}",
                    format_complex(t.amplitude),
                    format_complex(t.root),
                    t.degree,
                    format_complex(t.rate)
                )
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), c(-2.5, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("0.7-0.3i").unwrap(), c(0.7, -0.3));
        assert_eq!(parse_complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("1e-3-2.5E+1i").unwrap(), c(1e-3, -25.0));
        assert_eq!(parse_complex("-1e-3+i").unwrap(), c(-1e-3, 1.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("inf").is_err());
        assert!(parse_complex("1+nani").is_err());
    }

    #[test]
    fn function_examples() {
        let f = parse_function("mono A=1 n=2").unwrap();
        assert_eq!(f.evaluate(c(3.0, 0.0)).unwrap(), c(9.0, 0.0));

        let g = parse_function("km A=1 z0=1+0i n=1 lam=-1+0i").unwrap();
        let w = c(2.0, 0.5);
        let want = (w - 1.0) * (-(w - 1.0)).exp();
        assert!((g.evaluate(w).unwrap() - want).norm() < 1e-15);

        let h = parse_function("km A=1 z0=0 n=0 lam=0.7-0.3i + mono A=2 n=3").unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.evaluate(C64::zero()).unwrap(), c(1.0, 0.0));
        let w = c(0.2, -0.4);
        let want = (c(0.7, -0.3) * w).exp() + 2.0 * w * w * w;
        assert!((h.evaluate(w).unwrap() - want).norm() < 1e-15);

        assert!(parse_function("0").unwrap().is_zero());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_function("mono A=1 n=2 + poly A=1").unwrap_err();
        assert_eq!(e.position, 15);
        let e = parse_function("km A=1 z0=1+0j").unwrap_err();
        assert_eq!(e.position, 10);
        let e = parse_function("mono A=1 lam=2").unwrap_err();
        assert_eq!(e.position, 9);
        assert!(parse_function("mono A=1e999 n=1").is_err());
        assert!(parse_function("mono A=1 n=-1").is_err());
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn printer_round_trips(terms in prop::collection::vec((arb_c(), arb_c(), 0u32..9, arb_c()), 0..5)) {
            let f = FnExpr::from_terms_raw(terms.into_iter().map(|(a, z0, n, l)| KernelMonomial {
                amplitude: a, root: z0, degree: n, rate: l,
            }).collect());
            let text = print_function(&f);
            let back = parse_function(&text).unwrap();
            prop_assert_eq!(print_function(&back), text);
            prop_assert_eq!(back, f);
        }
    }
}
