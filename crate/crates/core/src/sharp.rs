//! Sharp pointwise derivative constants, their extremal functions and the
//! checks that compare both sides of each inequality.

use std::f64::consts::PI;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, FockError, Result};
use crate::focknorm::{bound_tolerance, ln_monomial_norm_p, norm2_exact, norm_p, FockParams, NormValue};
use crate::funcrep::{FnExpr, KernelMonomial, C64, MAX_DERIVATIVE_ORDER};
use crate::quad::{fock_integral, QuadratureSpec};
use crate::report::{Inputs, Predicate, Theorem, VerificationReport};
use crate::sample::disc_point;
use crate::specfun::{ln_gamma, ln_kummer_1f1_n1, PosReal};

/// Tolerance for checks whose both sides come from exact coefficient sums.
pub const EXACT_TOL: f64 = 1e-10;
/// Perturbations per Taylor-minimality check.
pub const MINIMALITY_TRIALS: usize = 20;

/// A constant kept in log form; `value` is `+∞` when it overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constant {
    pub ln_value: f64,
    pub value: f64,
    pub overflow: bool,
}

impl Constant {
    fn from_ln(ln_value: f64) -> Self {
        let value = ln_value.exp();
        Self {
            ln_value,
            value,
            overflow: !value.is_finite(),
        }
    }
}

/// What a check is expected to show.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// The inequality, with the quadrature-aware tolerance.
    Bound,
    /// Equality within the given relative tolerance.
    Equality(f64),
}

/// How the norm on the right-hand side is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormPath {
    Quadrature,
    /// Coefficient sum; only valid at p = 2.
    Exact,
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_DERIVATIVE_ORDER {
        return Err(FockError::UnsupportedOrder {
            order: n,
            max: MAX_DERIVATIVE_ORDER,
        });
    }
    Ok(())
}

/// ln of `(αp/2)^{n/2} n! / Γ^{1/p}(1 + np/2)`.
fn ln_core_constant(n: usize, params: FockParams) -> Result<f64> {
    check_order(n)?;
    let p = params.p;
    let nf = n as f64;
    let ln_scale = if n == 0 { 0.0 } else { nf / 2.0 * (params.alpha() * p / 2.0).ln() };
    Ok(ln_scale + ln_gamma(nf + 1.0)? - ln_gamma(1.0 + nf * p / 2.0)? / p)
}

/// `c_n(|z|) = (αp/2)^{n/2} n! e^{α|z|²/2} / Γ^{1/p}(1 + np/2)`.
pub fn constant_thm1(n: usize, params: FockParams, z_abs: f64) -> Result<Constant> {
    if !(z_abs.is_finite() && z_abs >= 0.0) {
        return Err(domain("constant_thm1", format!("|z| must be finite and nonnegative, got {z_abs}")));
    }
    Ok(Constant::from_ln(ln_core_constant(n, params)? + params.alpha() * z_abs * z_abs / 2.0))
}

/// `(αp)^{n/2} n! / (2^{n/2} Γ^{1/p}(1 + np/2))`; the z = 0 case of
/// [`constant_thm1`], built from the same expression.
pub fn constant_nulla(n: usize, params: FockParams) -> Result<Constant> {
    constant_thm1(n, params, 0.0)
}

/// `(w − z)^n e^{αz̄(w−z)}`, which attains equality in [`constant_thm1`].
pub fn extremal_thm1(n: u32, alpha: PosReal, z: C64) -> FnExpr {
    FnExpr::from_terms_raw(vec![KernelMonomial {
        amplitude: C64::new(1.0, 0.0),
        root: z,
        degree: n,
        rate: alpha.get() * z.conj(),
    }])
}

/// `|f^{(n)}(z)|` in log form, exact zero as −∞.
fn ln_derivative_abs(f: &FnExpr, z: C64, n: usize) -> Result<f64> {
    check_order(n)?;
    let d = f.nth_derivative(n)?;
    Ok(d.ln_abs_with_offset(z, C64::zero()))
}

fn norm_on_path(f: &FnExpr, params: FockParams, spec: &QuadratureSpec, path: NormPath) -> Result<NormValue> {
    match path {
        NormPath::Quadrature => norm_p(f, params, spec),
        NormPath::Exact => {
            if params.p != 2.0 {
                return Err(FockError::Usage(format!("the exact norm path needs p = 2, got p = {}", params.p)));
            }
            norm2_exact(f, params.alpha)
        }
    }
}

fn predicate(expect: Expectation, norm: NormValue, path: NormPath) -> Predicate {
    match expect {
        Expectation::Bound => Predicate::AtMost(match path {
            NormPath::Quadrature => bound_tolerance(norm.rel_error()),
            NormPath::Exact => EXACT_TOL,
        }),
        Expectation::Equality(tol) => Predicate::Equals(tol),
    }
}

fn path_name(path: NormPath) -> &'static str {
    match path {
        NormPath::Quadrature => "quadrature",
        NormPath::Exact => "exact",
    }
}

fn base_inputs(f: &FnExpr, n: usize, params: FockParams, z: C64, path: NormPath) -> Inputs {
    Inputs::new()
        .function("f", f)
        .int("n", n as i64)
        .num("alpha", params.alpha())
        .num("p", params.p)
        .complex("z", z)
        .text("path", path_name(path))
}

/// `|f^{(n)}(z)| ≤ c_n(|z|) ‖f − T_n(f,z)‖_{p,α}`; for n = 1 also the
/// weaker bound with `‖f‖` in place of the remainder norm.
pub fn verify_thm1(
    f: &FnExpr,
    n: usize,
    params: FockParams,
    z: C64,
    spec: &QuadratureSpec,
    path: NormPath,
    expect: Expectation,
) -> Result<Vec<VerificationReport>> {
    let ln_lhs = ln_derivative_abs(f, z, n)?;
    let remainder = f.subtract_taylor(z, n)?;
    let norm = norm_on_path(&remainder, params, spec, path)?;
    let c = constant_thm1(n, params, z.norm())?;
    let mut out = vec![VerificationReport::check_ln(
        Theorem::Thm1,
        base_inputs(f, n, params, z, path),
        ln_lhs,
        c.ln_value + norm.value.ln(),
        predicate(expect, norm, path),
        format!("norm_rel_err={:.3e}", norm.rel_error()),
    )];
    if n == 1 {
        let full = norm_on_path(f, params, spec, path)?;
        let a = params.alpha() * z.norm_sqr() / 2.0;
        // c_1(0) (e^{α|z|²/2} + e^{α|z|²}) ‖f‖
        let ln_factor = a + (1.0 + a.exp()).ln();
        let ln_rhs = constant_thm1(1, params, 0.0)?.ln_value + ln_factor + full.value.ln();
        let mut r = VerificationReport::check_ln(
            Theorem::Dera1,
            base_inputs(f, n, params, z, path),
            ln_lhs,
            ln_rhs,
            predicate(Expectation::Bound, full, path),
            "",
        );
        r.notes = format!("{}; slack={:.6e}", r.notes, 1.0 - r.ratio);
        out.push(r);
    }
    Ok(out)
}

/// `√(α^n n! ₁F₁(1+n; 1; α|z|²))`.
pub fn constant_thm2(n: usize, alpha: PosReal, z_abs: f64) -> Result<Constant> {
    check_order(n)?;
    let a = alpha.get();
    let x = a * z_abs * z_abs;
    let ln_sq = n as f64 * a.ln() + ln_gamma(n as f64 + 1.0)? + ln_kummer_1f1_n1(n, x)?;
    Ok(Constant::from_ln(ln_sq / 2.0))
}

/// `α^n e^{αz̄w} w^n`.
pub fn extremal_thm2(n: u32, alpha: PosReal, z: C64) -> FnExpr {
    let a = alpha.get();
    FnExpr::from_terms_raw(vec![KernelMonomial {
        amplitude: C64::new(a.powi(n as i32), 0.0),
        root: C64::zero(),
        degree: n,
        rate: a * z.conj(),
    }])
}

/// The ₁F₁ bound on the exact path, plus a Taylor-minimality check: random
/// polynomials of degree below `n` added to `T_n(f,0)` never shrink the
/// remainder norm.
pub fn verify_thm2(f: &FnExpr, n: usize, alpha: PosReal, z: C64, seed: u64, expect: Expectation) -> Result<Vec<VerificationReport>> {
    let ln_lhs = ln_derivative_abs(f, z, n)?;
    let remainder = f.subtract_taylor(C64::zero(), n)?;
    let norm = norm2_exact(&remainder, alpha)?;
    let c = constant_thm2(n, alpha, z.norm())?;
    let inputs = || {
        Inputs::new()
            .function("f", f)
            .int("n", n as i64)
            .num("alpha", alpha.get())
            .complex("z", z)
    };
    let pred = match expect {
        Expectation::Bound => Predicate::AtMost(EXACT_TOL + 3.0 * norm.rel_error()),
        Expectation::Equality(tol) => Predicate::Equals(tol),
    };
    let mut out = vec![VerificationReport::check_ln(
        Theorem::Thm2,
        inputs().text("check", "bound"),
        ln_lhs,
        c.ln_value + norm.value.ln(),
        pred,
        "",
    )];
    if n > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = norm.value.max(1e-300);
        let mut best = f64::INFINITY;
        for _ in 0..MINIMALITY_TRIALS {
            let terms = (0..n)
                .map(|k| {
                    // Keep each perturbation comparable to the remainder.
                    let c_k = (k as f64 / 2.0 * (alpha.get().ln()) - 0.5 * ln_gamma(k as f64 + 1.0).unwrap_or(0.0)).exp();
                    KernelMonomial::monomial(disc_point(&mut rng, 1.0) * (scale * c_k), k as u32)
                })
                .collect();
            let perturbed = remainder.sub(&FnExpr::from_terms(terms));
            best = best.min(norm2_exact(&perturbed, alpha)?.value);
        }
        out.push(VerificationReport::check(
            Theorem::Thm2,
            inputs().text("check", "taylor-minimality").int("seed", seed as i64).int("trials", MINIMALITY_TRIALS as i64),
            norm.value,
            best,
            Predicate::AtMost(1e-12),
            "lhs=remainder norm, rhs=smallest perturbed norm",
        ));
    }
    Ok(out)
}

/// `|f^{(n)}(z)| ≤ C_p ‖f(z + ·)‖_{p,α}`; reported as the `nulla` case at
/// z = 0 and as the shifted case otherwise.
pub fn verify_nulla(
    f: &FnExpr,
    n: usize,
    params: FockParams,
    z: C64,
    spec: &QuadratureSpec,
    path: NormPath,
    expect: Expectation,
) -> Result<VerificationReport> {
    let ln_lhs = ln_derivative_abs(f, z, n)?;
    let shifted = if z.is_zero() { f.clone() } else { f.shift_argument(z) };
    let norm = norm_on_path(&shifted, params, spec, path)?;
    let c = constant_nulla(n, params)?;
    let theorem = if z.is_zero() { Theorem::Nulla } else { Theorem::Corollary };
    Ok(VerificationReport::check_ln(
        theorem,
        base_inputs(f, n, params, z, path),
        ln_lhs,
        c.ln_value + norm.value.ln(),
        predicate(expect, norm, path),
        format!("norm_rel_err={:.3e}", norm.rel_error()),
    ))
}

/// Both sides of the z = 0 bound for `A w^n` in closed form: `|A| n!` against
/// `C_p |A| ‖w^n‖_{p,α}`.
pub fn nulla_closed_form(amplitude: C64, n: usize, params: FockParams, tol: f64) -> Result<VerificationReport> {
    check_order(n)?;
    let ln_a = amplitude.norm().ln();
    let ln_lhs = ln_a + ln_gamma(n as f64 + 1.0)?;
    let ln_rhs = constant_nulla(n, params)?.ln_value + ln_a + ln_monomial_norm_p(n as u32, params)?;
    let inputs = Inputs::new()
        .complex("A", amplitude)
        .int("n", n as i64)
        .num("alpha", params.alpha())
        .num("p", params.p)
        .text("path", "closed-form");
    Ok(VerificationReport::check_ln(Theorem::Nulla, inputs, ln_lhs, ln_rhs, Predicate::Equals(tol), ""))
}

/// `(2e)^{n/2} Γ^{1/p}(1 + np/2) / (np)^{n/2}`.
pub fn zhu_ratio(n: usize, params: FockParams) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let p = params.p;
    let ln = nf / 2.0 * (2f64.ln() + 1.0) + ln_gamma(1.0 + nf * p / 2.0)? / p - nf / 2.0 * (nf * p).ln();
    Ok(ln.exp())
}

/// A plane integral with its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralValue {
    pub value: f64,
    pub error: f64,
}

/// `I(s) = ∬ |(w−z)^n e^{α(w−z)z̄} + s|^p e^{−pα|w|²/2} dA(w)`, without the
/// normalising prefactor.
pub fn example_i(s: f64, n: u32, params: FockParams, z: C64, spec: &QuadratureSpec) -> Result<IntegralValue> {
    let f = extremal_thm1(n, params.alpha, z);
    let q = fock_integral(&f, params.p, params.alpha(), spec, C64::new(s, 0.0))?;
    let scale = 2.0 * PI / (params.p * params.alpha());
    Ok(IntegralValue {
        value: q.value * scale,
        error: q.error * scale,
    })
}

/// `I′(0) = (−1)^n 2π α^{n−1} e^{−pα|z|²/2} (αp/2)^{−np/2} Γ(1+np/2) Re(z^n) / n!`.
pub fn example_iprime0(n: u32, params: FockParams, z: C64) -> Result<f64> {
    let re = z.powu(n).re;
    if re == 0.0 {
        log::warn!("Re(z^n) = 0 at z = {z}, n = {n}: I'(0) vanishes");
        return Ok(0.0);
    }
    let (a, p, nf) = (params.alpha(), params.p, n as f64);
    let ln = (2.0 * PI).ln() + (nf - 1.0) * a.ln() - p * a * z.norm_sqr() / 2.0 - nf * p / 2.0 * (a * p / 2.0).ln()
        + ln_gamma(1.0 + nf * p / 2.0)?
        - ln_gamma(nf + 1.0)?
        + re.abs().ln();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 } * re.signum();
    Ok(sign * ln.exp())
}

/// Step for the central difference of `I` at 0.
pub const EXAMPLE_STEP: f64 = 1e-4;

/// Finite-difference check of `I′(0)` and a sign-directed step showing
/// `I(s) < I(0)`, i.e. `‖f‖ < ‖f − f(z)‖` for `f = extremal + s`.
pub fn verify_example(n: u32, params: FockParams, z: C64, spec: &QuadratureSpec) -> Result<Vec<VerificationReport>> {
    if n == 0 {
        return Err(FockError::Usage("the example needs n >= 1".into()));
    }
    let h = EXAMPLE_STEP;
    let i0 = example_i(0.0, n, params, z, spec)?;
    let ip = example_i(h, n, params, z, spec)?;
    let im = example_i(-h, n, params, z, spec)?;
    let fd = (ip.value - im.value) / (2.0 * h);
    let closed = example_iprime0(n, params, z)?;
    let inputs = || {
        Inputs::new()
            .int("n", n as i64)
            .num("alpha", params.alpha())
            .num("p", params.p)
            .complex("z", z)
    };
    let mut out = Vec::new();
    if closed == 0.0 {
        let scale = i0.value.max(1.0);
        let ok = fd.abs() <= 1e-6 * scale;
        out.push(VerificationReport::verdict(
            Theorem::Example,
            inputs().text("check", "derivative").num("h", h),
            fd.abs(),
            0.0,
            1e-6 * scale,
            ok,
            "zero-derivative case: Re(z^n) = 0",
        ));
        return Ok(out);
    }
    out.push(VerificationReport::check(
        Theorem::Example,
        inputs().text("check", "derivative").num("h", h),
        fd,
        closed,
        Predicate::Equals(1e-3),
        format!("central difference vs closed form; I(0)={:.12e}", i0.value),
    ));
    // Step against the slope, sized from the curvature of the same samples.
    let curvature = ((ip.value + im.value - 2.0 * i0.value) / (h * h)).abs();
    let mut step = if curvature > 0.0 { 0.5 * closed.abs() / curvature } else { 0.1 };
    step = step.min(0.1);
    let s = -closed.signum() * step;
    let is = example_i(s, n, params, z, spec)?;
    let below = is.value + is.error < i0.value - i0.error;
    out.push(VerificationReport::verdict(
        Theorem::Example,
        inputs().text("check", "descent").num("s", s),
        is.value,
        i0.value,
        is.error + i0.error,
        below,
        "lhs=I(s), rhs=I(0); pass iff I(s) < I(0) beyond quadrature error",
    ));
    Ok(out)
}

/// `(s, I(s))` samples on a uniform grid, for plotting.
pub fn example_curve(n: u32, params: FockParams, z: C64, s_max: f64, points: usize, spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(FockError::Usage("need at least two sample points".into()));
    }
    (0..points)
        .map(|k| {
            let s = -s_max + 2.0 * s_max * k as f64 / (points - 1) as f64;
            Ok((s, example_i(s, n, params, z, spec)?.value))
        })
        .collect()
}
