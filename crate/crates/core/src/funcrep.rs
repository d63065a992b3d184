//! Entire functions as finite sums of kernel monomials
//! `A·(w−z₀)^n·e^{λ(w−z₀)}`, plus truncated Taylor series.
//!
//! The family is closed under differentiation, argument shifts and
//! subtraction of Taylor polynomials, and it contains every extremal
//! function the verification suites need.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{domain, FockError, Result};

pub type C64 = Complex64;

/// Highest derivative order handled symbolically.
pub const MAX_DERIVATIVE_ORDER: usize = 12;
/// Longest Taylor expansion produced by [`FnExpr::taylor_coeffs_at`].
pub const MAX_SERIES_LEN: usize = 500;
/// Exponent magnitude above which evaluation switches to log form.
pub const LOG_PATH_THRESHOLD: f64 = 700.0;

/// `w ↦ amplitude · (w − root)^degree · exp(rate · (w − root))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelMonomial {
    pub amplitude: C64,
    pub root: C64,
    pub degree: u32,
    pub rate: C64,
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl KernelMonomial {
    pub fn new(amplitude: C64, root: C64, degree: u32, rate: C64) -> Result<Self> {
        if !(finite(amplitude) && finite(root) && finite(rate)) {
            return Err(domain("KernelMonomial", "non-finite field"));
        }
        Ok(Self {
            amplitude,
            root,
            degree,
            rate,
        })
    }

    /// `amplitude · w^degree`.
    pub fn monomial(amplitude: C64, degree: u32) -> Self {
        Self {
            amplitude,
            root: C64::zero(),
            degree,
            rate: C64::zero(),
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.root == other.root && self.degree == other.degree && self.rate == other.rate
    }

    /// (ln |term|, arg term) at `w`, or `None` where the term vanishes.
    fn log_polar(&self, w: C64) -> Option<(f64, f64)> {
        if self.amplitude.is_zero() {
            return None;
        }
        let u = w - self.root;
        let (ln_u, arg_u) = if self.degree == 0 {
            (0.0, 0.0)
        } else if u.is_zero() {
            return None;
        } else {
            (u.norm().ln(), u.arg())
        };
        let e = self.rate * u;
        let n = self.degree as f64;
        Some((
            self.amplitude.norm().ln() + n * ln_u + e.re,
            self.amplitude.arg() + n * arg_u + e.im,
        ))
    }

    #[inline]
    fn direct(&self, w: C64) -> C64 {
        let u = w - self.root;
        let poly = if self.degree == 0 { C64::new(1.0, 0.0) } else { u.powi(self.degree as i32) };
        self.amplitude * poly * (self.rate * u).exp()
    }

    #[inline]
    fn exponent_real(&self, w: C64) -> f64 {
        (self.rate * (w - self.root)).re
    }
}

/// A value represented as `value · e^{ln_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub ln_scale: f64,
    pub value: C64,
}

impl Scaled {
    pub fn ln_abs(&self) -> f64 {
        if self.value.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.ln_scale + self.value.norm().ln()
        }
    }

    pub fn to_complex(&self, op: &'static str) -> Result<C64> {
        if self.value.is_zero() {
            return Ok(C64::zero());
        }
        let ln = self.ln_abs();
        if ln > f64::MAX.ln() {
            return Err(FockError::Range { op, ln_value: ln });
        }
        Ok(self.value * self.ln_scale.exp())
    }
}

/// Finite linear combination of kernel monomials; the empty sum is zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FnExpr {
    terms: Vec<KernelMonomial>,
}

impl From<KernelMonomial> for FnExpr {
    fn from(term: KernelMonomial) -> Self {
        Self::from_terms(vec![term])
    }
}

impl FnExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds an expression, merging terms of identical shape and dropping
    /// zero amplitudes.
    pub fn from_terms(terms: Vec<KernelMonomial>) -> Self {
        let mut out: Vec<KernelMonomial> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.iter_mut().find(|o| o.same_shape(&t)) {
                Some(o) => o.amplitude += t.amplitude,
                None => out.push(t),
            }
        }
        out.retain(|t| !t.amplitude.is_zero());
        Self { terms: out }
    }

    /// Same as [`FnExpr::from_terms`] but keeps the given order and zero terms.
    pub fn from_terms_raw(terms: Vec<KernelMonomial>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[KernelMonomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude.is_zero())
    }

    pub fn add(&self, other: &FnExpr) -> FnExpr {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn sub(&self, other: &FnExpr) -> FnExpr {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Root shared by every term, if there is one.
    pub fn common_root(&self) -> Option<C64> {
        let first = self.terms.first()?.root;
        self.terms.iter().all(|t| t.root == first).then_some(first)
    }

    /// `Σ A(w−z₀)^n e^{λ(w−z₀)}` with a log-form fallback for large exponents.
    pub fn evaluate(&self, w: C64) -> Result<C64> {
        let mut sum = C64::zero();
        let mut safe = true;
        for t in &self.terms {
            if t.exponent_real(w).abs() > LOG_PATH_THRESHOLD {
                safe = false;
                break;
            }
            sum += t.direct(w);
        }
        if safe && finite(sum) {
            return Ok(sum);
        }
        self.evaluate_scaled(w, C64::zero()).to_complex("evaluate")
    }

    /// `f(w) + offset` as a scaled value; never overflows.
    pub fn evaluate_scaled(&self, w: C64, offset: C64) -> Scaled {
        let mut parts: Vec<(f64, f64)> = self.terms.iter().filter_map(|t| t.log_polar(w)).collect();
        if !offset.is_zero() {
            parts.push((offset.norm().ln(), offset.arg()));
        }
        let Some(max) = parts.iter().map(|p| p.0).reduce(f64::max) else {
            return Scaled {
                ln_scale: 0.0,
                value: C64::zero(),
            };
        };
        let value = parts.iter().map(|&(ln, arg)| C64::from_polar((ln - max).exp(), arg)).sum();
        Scaled { ln_scale: max, value }
    }

    /// ln |f(w) + offset|, −∞ at zeros.
    pub fn ln_abs_with_offset(&self, w: C64, offset: C64) -> f64 {
        let mut sum = offset;
        let mut safe = true;
        for t in &self.terms {
            if t.exponent_real(w).abs() > LOG_PATH_THRESHOLD {
                safe = false;
                break;
            }
            sum += t.direct(w);
        }
        if safe && finite(sum) {
            let norm = sum.norm();
            if norm > 1e-290 || norm == 0.0 {
                return norm.ln();
            }
        }
        self.evaluate_scaled(w, offset).ln_abs()
    }

    /// Exact symbolic derivative (product rule, like terms merged).
    pub fn derivative(&self) -> FnExpr {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.degree > 0 {
                out.push(KernelMonomial {
                    amplitude: t.amplitude * t.degree as f64,
                    degree: t.degree - 1,
                    ..*t
                });
            }
            if !t.rate.is_zero() {
                out.push(KernelMonomial {
                    amplitude: t.amplitude * t.rate,
                    ..*t
                });
            }
        }
        Self::from_terms(out)
    }

    pub fn nth_derivative(&self, n: usize) -> Result<FnExpr> {
        if n > MAX_DERIVATIVE_ORDER {
            return Err(FockError::UnsupportedOrder {
                order: n,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        let mut f = self.clone();
        for _ in 0..n {
            f = f.derivative();
        }
        Ok(f)
    }

    /// `f^{(n)}(z)` by repeated symbolic differentiation.
    pub fn nth_derivative_at(&self, z: C64, n: usize) -> Result<C64> {
        self.nth_derivative(n)?.evaluate(z)
    }

    /// First `m` Taylor coefficients about `center`, with a tail bound on
    /// `Σ_{k≥m} |a_k| ρ^k` for the working radius `rho`.
    pub fn taylor_coeffs_at(&self, center: C64, m: usize, rho: f64) -> Result<CoeffSeries> {
        if m > MAX_SERIES_LEN {
            return Err(FockError::Usage(format!(
                "series length {m} exceeds the maximum {MAX_SERIES_LEN}"
            )));
        }
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(domain("taylor_coeffs_at", format!("invalid working radius {rho}")));
        }
        let mut coeffs = vec![C64::zero(); m];
        let mut ln_tail_parts: Vec<f64> = Vec::new();
        for t in &self.terms {
            let d = center - t.root;
            let shift = t.rate * d;
            if shift.re > LOG_PATH_THRESHOLD {
                return Err(FockError::Range {
                    op: "taylor_coeffs_at",
                    ln_value: t.amplitude.norm().ln() + shift.re,
                });
            }
            let amp = t.amplitude * shift.exp();
            let n = t.degree as usize;
            // (u + d)^n = Σ_i C(n,i) d^{n−i} u^i
            let mut poly = vec![C64::zero(); n + 1];
            let mut binom = 1.0;
            for (i, slot) in poly.iter_mut().enumerate() {
                *slot = binom * pow_or_one(d, n - i);
                binom = binom * (n - i) as f64 / (i + 1) as f64;
            }
            let mut exp_series = vec![C64::zero(); m];
            let mut e = C64::new(1.0, 0.0);
            for (j, slot) in exp_series.iter_mut().enumerate() {
                *slot = e;
                e = e * t.rate / (j + 1) as f64;
            }
            for (k, c) in coeffs.iter_mut().enumerate() {
                let mut acc = C64::zero();
                for (i, p) in poly.iter().enumerate().take(k + 1) {
                    acc += p * exp_series[k - i];
                }
                *c += amp * acc;
            }
            if amp.is_zero() {
                continue;
            }
            let x = t.rate.norm() * rho;
            for (i, p) in poly.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let j_start = m as i64 - i as i64;
                let ln_rem = ln_exp_remainder(x, j_start);
                if ln_rem.is_finite() {
                    let ln_rho_i = if i == 0 { 0.0 } else { i as f64 * rho.ln() };
                    ln_tail_parts.push(amp.norm().ln() + p.norm().ln() + ln_rho_i + ln_rem);
                }
            }
        }
        Ok(CoeffSeries {
            center,
            coeffs,
            tail_bound: log_sum_exp(&ln_tail_parts).exp(),
            radius: rho,
        })
    }

    /// `f − T_n(f, z)`: removes the degree-(n−1) Taylor polynomial at `z`.
    pub fn subtract_taylor(&self, z: C64, n: usize) -> Result<FnExpr> {
        if n > MAX_DERIVATIVE_ORDER {
            return Err(FockError::UnsupportedOrder {
                order: n,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        if n == 0 {
            return Ok(self.clone());
        }
        let series = self.taylor_coeffs_at(z, n, 0.0)?;
        let mut terms = self.terms.clone();
        for (k, c) in series.coeffs.iter().enumerate() {
            terms.push(KernelMonomial {
                amplitude: -c,
                root: z,
                degree: k as u32,
                rate: C64::zero(),
            });
        }
        Ok(Self::from_terms(terms))
    }

    /// `w ↦ f(z + w)`.
    pub fn shift_argument(&self, z: C64) -> FnExpr {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| KernelMonomial {
                    root: t.root - z,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: C64) -> FnExpr {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| KernelMonomial {
                    amplitude: t.amplitude * c,
                    ..*t
                })
                .collect(),
        }
    }
}

fn pow_or_one(d: C64, k: usize) -> C64 {
    if k == 0 {
        C64::new(1.0, 0.0)
    } else {
        d.powi(k as i32)
    }
}

/// ln of a bound on `Σ_{j≥start} x^j / j!`.
fn ln_exp_remainder(x: f64, start: i64) -> f64 {
    if start <= 0 {
        return x;
    }
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let j = start as f64;
    let ln_first = j * x.ln() - crate::specfun::ln_gamma(j + 1.0).unwrap_or(f64::INFINITY);
    if x < j + 1.0 {
        ln_first - (1.0 - x / (j + 1.0)).ln()
    } else {
        x
    }
}

pub(crate) fn log_sum_exp(parts: &[f64]) -> f64 {
    let max = parts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + parts.iter().map(|p| (p - max).exp()).sum::<f64>().ln()
}

/// Truncated Taylor expansion about `center` with a certified bound on the
/// omitted part over `|w − center| ≤ radius`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffSeries {
    pub center: C64,
    pub coeffs: Vec<C64>,
    pub tail_bound: f64,
    pub radius: f64,
}

impl CoeffSeries {
    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, w: C64) -> C64 {
        let u = w - self.center;
        self.coeffs.iter().rev().fold(C64::zero(), |acc, c| acc * u + c)
    }

    /// Polynomial `Σ coeffs[k] (w − center)^k` as an expression.
    pub fn to_fnexpr(&self) -> FnExpr {
        FnExpr::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| KernelMonomial {
                    amplitude: *c,
                    root: self.center,
                    degree: k as u32,
                    rate: C64::zero(),
                })
                .collect(),
        )
    }
}

/// `K_α(·, z)(w) = e^{α z̄ w}`.
pub fn reproducing_kernel(alpha: f64, z: C64) -> FnExpr {
    KernelMonomial {
        amplitude: C64::new(1.0, 0.0),
        root: C64::zero(),
        degree: 0,
        rate: alpha * z.conj(),
    }
    .into()
}
