//! Fock norms, the reproducing kernel and the pointwise growth bound.
//!
//! Norms follow `‖f‖_{p,α}^p = (pα/2π) ∬ |f|^p e^{−pα|w|²/2} dA` for every
//! p, so at p = 2 this is `∫|f|² dμ_α = Σ |a_k|² k!/α^k`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{domain, FockError, Result};
use crate::funcrep::{log_sum_exp, CoeffSeries, FnExpr, KernelMonomial, C64, MAX_SERIES_LEN};
use crate::quad::{complex_plane_integral, fock_integral, reproducing_cutoff, QuadratureSpec, TAIL_SHARE};
use crate::report::{Inputs, Predicate, Theorem, VerificationReport};
use crate::specfun::{ln_gamma, PosReal};

/// Relative truncation level for the coefficient norm.
const SERIES_REL_TOL: f64 = 1e-18;
/// Coefficient tails above this share of the sum are a divergence report.
const SERIES_GIVE_UP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockParams {
    pub alpha: PosReal,
    pub p: f64,
}

impl FockParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        let alpha = PosReal::new(alpha)?;
        if !(p.is_finite() && p >= 1.0) {
            return Err(domain("FockParams", format!("exponent p must be finite and >= 1, got {p}")));
        }
        Ok(Self { alpha, p })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.get()
    }
}

/// A norm with its propagated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub error: f64,
}

impl NormValue {
    pub fn rel_error(&self) -> f64 {
        if self.value > 0.0 {
            self.error / self.value
        } else {
            0.0
        }
    }
}

/// ln of `Σ_k |a_k|² k!/α^k` over the given coefficients about 0.
fn ln_coeff_sum(coeffs: &[C64], alpha: f64) -> f64 {
    let ln_alpha = alpha.ln();
    let mut ln_half_weight = 0.0;
    let mut parts = Vec::with_capacity(coeffs.len());
    for (k, a) in coeffs.iter().enumerate() {
        if k > 0 {
            ln_half_weight += 0.5 * ((k as f64).ln() - ln_alpha);
        }
        let m = a.norm();
        if m > 0.0 {
            parts.push(2.0 * (m.ln() + ln_half_weight));
        }
    }
    log_sum_exp(&parts)
}

/// ln of a majorant of `Σ_{k≥m} |a_k|² k!/α^k` built from termwise bounds
/// `|a_k| ≤ Σ |A e^{−λz₀}| C(n,i) |z₀|^{n−i} |λ|^{k−i}/(k−i)!`.
fn ln_coeff_tail(f: &FnExpr, alpha: f64, m: usize) -> Result<f64> {
    struct Piece {
        ln_c: f64,
        i: usize,
        ln_rate: f64,
    }
    let mut pieces = Vec::new();
    for t in f.terms() {
        if t.amplitude.is_zero() {
            continue;
        }
        let d = -t.root;
        let ln_amp = t.amplitude.norm().ln() + (t.rate * d).re;
        let n = t.degree as usize;
        let ln_rate = if t.rate.is_zero() { f64::NEG_INFINITY } else { t.rate.norm().ln() };
        let mut ln_binom = 0.0;
        for i in 0..=n {
            let ln_d = if n == i { 0.0 } else { (n - i) as f64 * d.norm().ln() };
            if ln_d > f64::NEG_INFINITY {
                pieces.push(Piece {
                    ln_c: ln_amp + ln_binom + ln_d,
                    i,
                    ln_rate,
                });
            }
            ln_binom += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
    }
    let max_i = pieces.iter().map(|pc| pc.i).max().unwrap_or(0);
    let ln_alpha = alpha.ln();
    let mut acc: Vec<f64> = Vec::new();
    let mut prev: Option<f64> = None;
    for k in m..m + 20_000 {
        let mut parts = Vec::with_capacity(pieces.len());
        for pc in &pieces {
            if k < pc.i {
                continue;
            }
            let j = k - pc.i;
            if j > 0 && pc.ln_rate == f64::NEG_INFINITY {
                continue;
            }
            let ln_pow = if j == 0 { 0.0 } else { j as f64 * pc.ln_rate };
            parts.push(pc.ln_c + ln_pow - ln_gamma(j as f64 + 1.0)?);
        }
        let ln_b = log_sum_exp(&parts);
        if ln_b == f64::NEG_INFINITY {
            // Only polynomial pieces remain and all are below degree k.
            if pieces.iter().all(|pc| pc.ln_rate == f64::NEG_INFINITY || k < pc.i) {
                return Ok(log_sum_exp(&acc));
            }
            continue;
        }
        let ln_t = 2.0 * ln_b + ln_gamma(k as f64 + 1.0)? - k as f64 * ln_alpha;
        acc.push(ln_t);
        if let Some(p) = prev {
            let ln_q = ln_t - p;
            // Ratios of these majorant terms decay like 1/k once past the peak.
            if ln_q < 0.5f64.ln() && k > m.max(max_i) + 2 {
                let q = ln_q.exp();
                acc.push(ln_t + (q / (1.0 - q)).ln());
                return Ok(log_sum_exp(&acc));
            }
        }
        prev = Some(ln_t);
    }
    Ok(f64::INFINITY)
}

/// `‖f‖_{2,α}` from Taylor coefficients about 0, summed in log space, with
/// the omitted tail certified by a coefficient majorant.
pub fn norm2_exact(f: &FnExpr, alpha: PosReal) -> Result<NormValue> {
    let alpha = alpha.get();
    if f.is_zero() {
        return Ok(NormValue { value: 0.0, error: 0.0 });
    }
    let mut m = 32;
    loop {
        let series = f.taylor_coeffs_at(C64::zero(), m, 0.0)?;
        let ln_sum = ln_coeff_sum(&series.coeffs, alpha);
        let ln_tail = ln_coeff_tail(f, alpha, m)?;
        let rel = if ln_sum == f64::NEG_INFINITY {
            if ln_tail == f64::NEG_INFINITY {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (ln_tail - ln_sum).exp()
        };
        if rel <= SERIES_REL_TOL || (m == MAX_SERIES_LEN && rel <= SERIES_GIVE_UP) {
            return finish_norm2(ln_sum, ln_tail, m);
        }
        if m == MAX_SERIES_LEN {
            return Err(FockError::Divergence {
                terms: m,
                tail: ln_tail.exp(),
            });
        }
        m = (2 * m).min(MAX_SERIES_LEN);
    }
}

fn finish_norm2(ln_sum: f64, ln_tail: f64, terms: usize) -> Result<NormValue> {
    if ln_sum == f64::NEG_INFINITY {
        return Ok(NormValue { value: 0.0, error: 0.0 });
    }
    let value = (0.5 * ln_sum).exp();
    if !value.is_finite() {
        return Err(FockError::Range {
            op: "norm2_exact",
            ln_value: 0.5 * ln_sum,
        });
    }
    // √(S+T) − √S ≤ T/(2√S), plus rounding of the log-space sum.
    let tail_err = 0.5 * (ln_tail - 0.5 * ln_sum).exp();
    let rounding = 4.0 * f64::EPSILON * (terms as f64).sqrt() * value;
    Ok(NormValue {
        value,
        error: tail_err + rounding,
    })
}

/// `‖·‖_{2,α}` of a coefficient series about 0, taken as the polynomial it
/// stores (the truncated part is not included).
pub fn norm2_exact_series(series: &CoeffSeries, alpha: PosReal) -> Result<NormValue> {
    if !series.center.is_zero() {
        return Err(FockError::Usage("norm2_exact_series needs coefficients about 0".into()));
    }
    finish_norm2(ln_coeff_sum(&series.coeffs, alpha.get()), f64::NEG_INFINITY, series.coeffs.len())
}

/// `‖f‖_{p,α}` by quadrature, with the error propagated through the p-th root.
pub fn norm_p(f: &FnExpr, params: FockParams, spec: &QuadratureSpec) -> Result<NormValue> {
    let q = fock_integral(f, params.p, params.alpha(), spec, C64::zero())?;
    let value = q.value.powf(1.0 / params.p);
    let error = if q.value > 0.0 {
        value * (q.error / q.value) / params.p
    } else {
        q.error.powf(1.0 / params.p)
    };
    Ok(NormValue { value, error })
}

/// ln `‖w^n‖_{p,α}` in closed form: `(2^{np/2} (αp)^{−np/2} Γ(np/2+1))^{1/p}`.
pub fn ln_monomial_norm_p(n: u32, params: FockParams) -> Result<f64> {
    let p = params.p;
    let h = n as f64 * p / 2.0;
    Ok((h * std::f64::consts::LN_2 - h * (params.alpha() * p).ln() + ln_gamma(h + 1.0)?) / p)
}

pub fn monomial_norm_p(n: u32, params: FockParams) -> Result<f64> {
    Ok(ln_monomial_norm_p(n, params)?.exp())
}

/// `k_z(w) = e^{αwz̄ − α|z|²/2}`, stored with root `z` so that
/// `k_z = e^{α|z|²/2} e^{αz̄(w−z)}`.
pub fn normalized_kernel(z: C64, alpha: PosReal) -> Result<FnExpr> {
    let a = alpha.get();
    let ln_amp = a * z.norm_sqr() / 2.0;
    if ln_amp > crate::funcrep::LOG_PATH_THRESHOLD {
        return Err(FockError::Range {
            op: "normalized_kernel",
            ln_value: ln_amp,
        });
    }
    let term = KernelMonomial::new(C64::new(ln_amp.exp(), 0.0), z, 0, a * z.conj())?;
    Ok(FnExpr::from_terms(vec![term]))
}

/// A complex quadrature value with its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub value: C64,
    pub error: f64,
    pub cutoff: f64,
}

/// `(α/π) ∬ e^{αzw̄} f(w) e^{−α|w|²} dA(w)` by polar quadrature.
pub fn reproducing_apply(f: &FnExpr, z: C64, alpha: PosReal, spec: &QuadratureSpec) -> Result<ComplexValue> {
    spec.validate()?;
    let a = alpha.get();
    let h = |w: C64| -> C64 {
        let s = f.evaluate_scaled(w, C64::zero());
        if s.value.is_zero() {
            return C64::zero();
        }
        let e = a * z * w.conj();
        s.value * C64::new(s.ln_scale + e.re - a * w.norm_sqr(), e.im).exp()
    };
    // A loose first pass sizes the absolute tail target.
    let (r0, _) = reproducing_cutoff(f, z, a, 1e-3)?;
    let (rough, ..) = complex_plane_integral(h, 2.0 * a, r0, 1.0, &spec.with_tol(1e-4))?;
    let target = TAIL_SHARE * spec.target_tol * (1.0 + rough.norm());
    let (radius, tail) = reproducing_cutoff(f, z, a, target)?;
    let (value, err, ..) = complex_plane_integral(h, 2.0 * a, radius, 1.0, spec)?;
    Ok(ComplexValue {
        value,
        error: err + tail,
        cutoff: radius,
    })
}

/// Pass threshold used for every quadrature-backed bound.
pub fn bound_tolerance(rel_error: f64) -> f64 {
    1e-8 + 3.0 * rel_error
}

/// `|f(z)| ≤ e^{α|z|²/2} ‖f‖_{p,α}`.
pub fn pointwise_bound_check(f: &FnExpr, z: C64, params: FockParams, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let norm = norm_p(f, params, spec)?;
    let ln_lhs = f.ln_abs_with_offset(z, C64::zero());
    let ln_rhs = params.alpha() * z.norm_sqr() / 2.0 + norm.value.ln();
    let inputs = Inputs::new()
        .function("f", f)
        .complex("z", z)
        .num("alpha", params.alpha())
        .num("p", params.p);
    Ok(VerificationReport::check_ln(
        Theorem::Zhuhe,
        inputs,
        ln_lhs,
        ln_rhs,
        Predicate::AtMost(bound_tolerance(norm.rel_error())),
        format!("norm_rel_err={:.3e}", norm.rel_error()),
    ))
}
