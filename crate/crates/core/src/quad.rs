//! Gaussian-weight quadrature over the complex plane in polar form.
//!
//! Angles use the uniform trapezoid rule (spectrally accurate for smooth
//! periodic integrands); radii use composite Gauss–Legendre on `[0, R]`.
//! The cutoff `R` comes from an explicit tail majorant and accuracy is
//! estimated by doubling both node counts.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{domain, FockError, Result};
use crate::funcrep::{FnExpr, C64};
use crate::specfun::ln_gamma;

const MAX_GL_NODES: usize = 512;
const GL_PANEL: usize = 256;
const MAX_ANGULAR: usize = 4096;
const MAX_RADIAL: usize = 2048;
/// Rounding floor added to every reported error, relative to the value.
const ROUNDING_FLOOR: f64 = 1e-14;
/// Fraction of the target tolerance granted to the truncated tail. The
/// Gaussian makes a tiny share cheap, so truncation never dominates.
pub(crate) const TAIL_SHARE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Cutoff {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub angular_nodes: usize,
    pub radial_nodes: usize,
    pub cutoff: Cutoff,
    pub target_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            angular_nodes: 64,
            radial_nodes: 96,
            cutoff: Cutoff::Auto,
            target_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.angular_nodes < 4 || !self.angular_nodes.is_multiple_of(2) {
            return Err(domain("QuadratureSpec", format!("angular nodes must be even and >= 4, got {}", self.angular_nodes)));
        }
        if self.radial_nodes < 8 {
            return Err(domain("QuadratureSpec", format!("radial nodes must be >= 8, got {}", self.radial_nodes)));
        }
        if !(self.target_tol > 0.0 && self.target_tol <= 1e-2) {
            return Err(domain("QuadratureSpec", format!("target tolerance must lie in (0, 1e-2], got {}", self.target_tol)));
        }
        if let Cutoff::Fixed(r) = self.cutoff {
            if !(r.is_finite() && r > 0.0) {
                return Err(domain("QuadratureSpec", format!("cutoff must be positive, got {r}")));
            }
        }
        Ok(())
    }

    /// Same spec with both node counts doubled.
    pub fn doubled(&self) -> Self {
        Self {
            angular_nodes: 2 * self.angular_nodes,
            radial_nodes: 2 * self.radial_nodes,
            ..*self
        }
    }

    pub fn with_tol(&self, target_tol: f64) -> Self {
        Self { target_tol, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodesWeights {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre P_n(x) and P'_n(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes (increasing) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Result<NodesWeights> {
    if n == 0 || n > MAX_GL_NODES {
        return Err(domain("gauss_legendre", format!("node count must be in 1..={MAX_GL_NODES}, got {n}")));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Chebyshev-like initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FockError::Internal(format!("Newton iteration for Legendre root {i} of {n} did not converge")));
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(NodesWeights { nodes, weights })
}

/// Cached rule shared read-only across workers.
pub fn gauss_legendre_cached(n: usize) -> Result<Arc<NodesWeights>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<NodesWeights>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().expect("node cache poisoned").get(&n) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_legendre(n)?);
    cache.lock().expect("node cache poisoned").insert(n, rule.clone());
    Ok(rule)
}

/// Composite Gauss–Legendre nodes and weights on [0, radius].
fn radial_rule(radius: f64, total_nodes: usize) -> Result<Vec<(f64, f64)>> {
    let panels = total_nodes.div_ceil(GL_PANEL).max(1);
    let per_panel = total_nodes.div_ceil(panels);
    let rule = gauss_legendre_cached(per_panel)?;
    let width = radius / panels as f64;
    let mut out = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    Ok(out)
}

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadValue {
    pub value: f64,
    pub error: f64,
    pub cutoff: f64,
    pub angular_nodes: usize,
    pub radial_nodes: usize,
}

/// Polynomial growth certificate `|g(r)| ≤ constant · (1 + r)^degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub constant: f64,
    pub degree: f64,
}

/// ln of an upper bound on the upper incomplete gamma Γ(s, x), s > 0.
fn ln_upper_gamma_bound(s: f64, x: f64) -> f64 {
    if s <= 1.0 {
        if x <= 0.0 {
            return ln_gamma(s).unwrap_or(f64::INFINITY);
        }
        return (s - 1.0) * x.ln() - x;
    }
    if x > s - 1.0 + 1.0 {
        (s - 1.0) * x.ln() - x - (1.0 - (s - 1.0) / x).ln()
    } else {
        ln_gamma(s).unwrap_or(f64::INFINITY)
    }
}

/// ln of a bound on `∫_R^∞ (1+r)^q e^{L r − a (r−c)²} r dr`, or +∞ when
/// `R` is not past the peak region (`R < r* + 1`).
pub(crate) fn ln_gaussian_tail(q: f64, rate: f64, a: f64, c: f64, radius: f64) -> f64 {
    let peak = c + rate / (2.0 * a);
    let t = radius - peak;
    if t < 1.0 {
        return f64::INFINITY;
    }
    let constant = rate * c + rate * rate / (4.0 * a);
    let s = (q + 2.0) / 2.0;
    (q + 1.0) * (2.0 + peak).ln() + constant + 0.5f64.ln() - s * a.ln() + ln_upper_gamma_bound(s, a * t * t)
}

/// Smallest radius on a fine grid whose tail bound is below `ln_target`.
fn find_cutoff(tail: impl Fn(f64) -> f64, start: f64, step: f64, max: f64, ln_target: f64) -> Result<f64> {
    let mut r = start;
    loop {
        let ln_tail = tail(r);
        if ln_tail <= ln_target {
            return Ok(r);
        }
        if r >= max {
            return Err(FockError::Cutoff {
                tail: ln_tail.exp(),
                target: ln_target.exp(),
                radius: r,
            });
        }
        r = (r + step).min(max);
    }
}

trait Accum: Copy + Zero + Add<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl Accum for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accum for C64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// `∫₀^R mean_θ h(center + r e^{iθ}) · r dr` for fixed node counts.
fn polar_pass<T: Accum>(center: C64, radius: f64, m: usize, n: usize, h: &impl Fn(C64) -> T) -> Result<T> {
    let rule = radial_rule(radius, n)?;
    let dirs: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)).collect();
    let inv_m = 1.0 / m as f64;
    let mut total = T::zero();
    for (r, w) in rule {
        let mut ring = T::zero();
        for d in &dirs {
            ring = ring + h(center + d * r);
        }
        total = total + ring * (inv_m * w * r);
    }
    Ok(total)
}

struct Adaptive<T> {
    value: T,
    change: f64,
    m: usize,
    n: usize,
}

/// Doubles (M, N) until successive passes agree to `tol` relative.
/// `floor` is an absolute scale added to the magnitude in the stopping test.
fn polar_adaptive<T: Accum>(
    center: C64,
    radius: f64,
    spec: &QuadratureSpec,
    tol: f64,
    floor: f64,
    h: impl Fn(C64) -> T,
) -> Result<Adaptive<T>> {
    let (mut m, mut n) = (spec.angular_nodes, spec.radial_nodes);
    let mut prev = polar_pass(center, radius, m, n, &h)?;
    loop {
        let (m2, n2) = (2 * m, 2 * n);
        let next = polar_pass(center, radius, m2, n2, &h)?;
        let change = (next + prev * -1.0).magnitude();
        let done = change <= tol * (next.magnitude() + floor) || m2 >= MAX_ANGULAR || n2 >= MAX_RADIAL;
        if done {
            return Ok(Adaptive {
                value: next,
                change,
                m: m2,
                n: n2,
            });
        }
        prev = next;
        m = m2;
        n = n2;
    }
}

fn check_p_alpha(op: &'static str, p: f64, alpha: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(domain(op, format!("exponent p must be finite and >= 1, got {p}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(domain(op, format!("weight alpha must be finite and positive, got {alpha}")));
    }
    Ok(())
}

/// `∫₀^∞ g(r) e^{−pαr²/2} r dr` with a certified cutoff for `growth`.
///
/// The cutoff makes the tail below `target_tol / 2` in absolute terms; the
/// returned error adds the node-doubling change.
pub fn radial_gaussian_integral(
    g: impl Fn(f64) -> f64,
    p: f64,
    alpha: f64,
    growth: GrowthBound,
    spec: &QuadratureSpec,
) -> Result<QuadValue> {
    check_p_alpha("radial_gaussian_integral", p, alpha)?;
    spec.validate()?;
    let a = p * alpha / 2.0;
    let ln_c = growth.constant.ln();
    let tail = |r: f64| ln_c + ln_gaussian_tail(growth.degree, 0.0, a, 0.0, r);
    let radius = match spec.cutoff {
        Cutoff::Fixed(r) => r,
        Cutoff::Auto => {
            let max = 50.0 / (p * alpha).sqrt();
            find_cutoff(tail, 1.0, 0.05 / a.sqrt(), max.max(1.0), (TAIL_SHARE * spec.target_tol).ln())?
        }
    };
    let tail_abs = tail(radius).exp().min(f64::MAX);
    let integrate = |n: usize| -> Result<f64> {
        Ok(radial_rule(radius, n)?.into_iter().map(|(r, w)| w * g(r) * (-a * r * r).exp() * r).sum())
    };
    let mut n = spec.radial_nodes;
    let mut prev = integrate(n)?;
    loop {
        let next = integrate(2 * n)?;
        let change = (next - prev).abs();
        n *= 2;
        if change <= spec.target_tol / 2.0 || n >= MAX_RADIAL {
            let tail_term = if tail_abs.is_finite() { tail_abs } else { 0.0 };
            return Ok(QuadValue {
                value: next,
                error: change + tail_term + ROUNDING_FLOOR * next.abs(),
                cutoff: radius,
                angular_nodes: 1,
                radial_nodes: n,
            });
        }
        prev = next;
    }
}

/// Majorant data for `|f(c + u)| ≤ K (1+|u|)^m e^{Λ|u|}`.
struct Majorant {
    ln_k: f64,
    degree: f64,
    rate: f64,
}

fn majorant(f: &FnExpr, center: C64, offset: C64) -> Majorant {
    let mut parts = Vec::new();
    if offset.norm() > 0.0 {
        parts.push(offset.norm().ln());
    }
    let mut degree = 0.0f64;
    let mut rate = 0.0f64;
    for t in f.terms() {
        if t.amplitude.norm() == 0.0 {
            continue;
        }
        let d = (center - t.root).norm();
        let lam = t.rate.norm();
        parts.push(t.amplitude.norm().ln() + t.degree as f64 * (1.0 + d).ln() + lam * d);
        degree = degree.max(t.degree as f64);
        rate = rate.max(lam);
    }
    Majorant {
        ln_k: crate::funcrep::log_sum_exp(&parts),
        degree,
        rate,
    }
}

/// Polar center used for a function: the common root when there is one.
pub fn polar_center(f: &FnExpr) -> C64 {
    f.common_root().unwrap_or_else(C64::zero)
}

/// `(pα/2π) ∬ |f(w) + s|^p e^{−pα|w|²/2} dA(w)`.
///
/// Polar coordinates are centred at the common root of `f` when all terms
/// share one, which makes every kernel-monomial extremal radially symmetric.
/// `target_tol` is relative: the tail is certified below `target_tol/2` of
/// the value and node doubling stops at a relative change of `target_tol`.
pub fn fock_integral(f: &FnExpr, p: f64, alpha: f64, spec: &QuadratureSpec, offset: C64) -> Result<QuadValue> {
    check_p_alpha("fock_integral", p, alpha)?;
    spec.validate()?;
    let center = polar_center(f);
    let maj = majorant(f, center, offset);
    let zero = QuadValue {
        value: 0.0,
        error: 0.0,
        cutoff: 0.0,
        angular_nodes: spec.angular_nodes,
        radial_nodes: spec.radial_nodes,
    };
    if maj.ln_k == f64::NEG_INFINITY {
        return Ok(zero);
    }
    let a = p * alpha / 2.0;
    let c_abs = center.norm();
    let ln_pref = (p * alpha).ln();
    let tail = |r: f64| ln_pref + p * maj.ln_k + ln_gaussian_tail(maj.degree * p, p * maj.rate, a, c_abs, r);
    let integrand = |w: C64| -> f64 {
        let ln_abs = f.ln_abs_with_offset(w, offset);
        if ln_abs == f64::NEG_INFINITY {
            return 0.0;
        }
        (p * ln_abs - a * w.norm_sqr()).exp()
    };
    let peak = c_abs + p * maj.rate / (2.0 * a);
    let step = 0.05 / a.sqrt();
    let radius = match spec.cutoff {
        Cutoff::Fixed(r) => r,
        Cutoff::Auto => {
            let max = peak + 1.0 + 60.0 / (p * alpha).sqrt();
            // Coarse pass on a generous disc to size the relative target.
            let generous = peak + 1.0 + ((2.0 * ((1.0 / spec.target_tol).ln() + 60.0)) / a).sqrt();
            let rough = polar_pass(center, generous.min(max), spec.angular_nodes, spec.radial_nodes, &integrand)? * (p * alpha);
            if rough <= 0.0 {
                return Ok(zero);
            }
            let ln_target = (TAIL_SHARE * spec.target_tol * rough).ln();
            find_cutoff(tail, peak + 1.0, step, max, ln_target)?
        }
    };
    let result = polar_adaptive(center, radius, spec, spec.target_tol, 0.0, integrand)?;
    let value = result.value * (p * alpha);
    if !value.is_finite() {
        return Err(FockError::Range {
            op: "fock_integral",
            ln_value: f64::INFINITY,
        });
    }
    let tail_abs = tail(radius).exp();
    let tail_term = if tail_abs.is_finite() { tail_abs } else { 0.0 };
    Ok(QuadValue {
        value,
        error: result.change * (p * alpha) + tail_term + ROUNDING_FLOOR * value,
        cutoff: radius,
        angular_nodes: result.m,
        radial_nodes: result.n,
    })
}

/// `prefactor · ∫₀^R mean_θ h(r e^{iθ}) r dr` for an integrand that already
/// carries its Gaussian factor. Doubling stops at a change of
/// `target_tol · (|value| + floor)`.
pub(crate) fn complex_plane_integral(
    h: impl Fn(C64) -> C64,
    prefactor: f64,
    radius: f64,
    floor: f64,
    spec: &QuadratureSpec,
) -> Result<(C64, f64, usize, usize)> {
    let result = polar_adaptive(C64::zero(), radius, spec, spec.target_tol, floor / prefactor, h)?;
    let value = result.value * prefactor;
    Ok((value, result.change * prefactor + ROUNDING_FLOOR * value.norm(), result.m, result.n))
}

/// Cutoff for `∬ e^{α z w̄} f(w) e^{−α|w|²} dA` below `abs_tol`.
pub(crate) fn reproducing_cutoff(f: &FnExpr, z: C64, alpha: f64, abs_tol: f64) -> Result<(f64, f64)> {
    let maj = majorant(f, C64::zero(), C64::zero());
    if maj.ln_k == f64::NEG_INFINITY {
        return Ok((1.0, 0.0));
    }
    let rate = maj.rate + alpha * z.norm();
    let ln_pref = (2.0 * alpha).ln();
    let tail = |r: f64| ln_pref + maj.ln_k + ln_gaussian_tail(maj.degree, rate, alpha, 0.0, r);
    let peak = rate / (2.0 * alpha);
    let max = peak + 1.0 + 60.0 / alpha.sqrt();
    let r = find_cutoff(tail, peak + 1.0, 0.05 / alpha.sqrt(), max, abs_tol.ln())?;
    Ok((r, tail(r).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::KernelMonomial;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);

        let r2 = gauss_legendre(2).unwrap();
        let x = 1.0 / 3.0f64.sqrt();
        assert!((r2.nodes[0] + x).abs() < 1e-15 && (r2.nodes[1] - x).abs() < 1e-15);
        assert!(r2.weights.iter().all(|w| (w - 1.0).abs() < 1e-15));

        let r3 = gauss_legendre(3).unwrap();
        let x = (0.6f64).sqrt();
        assert!((r3.nodes[0] + x).abs() < 1e-15 && r3.nodes[1] == 0.0 && (r3.nodes[2] - x).abs() < 1e-15);
        assert!((r3.weights[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((r3.weights[0] - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_rejects_bad_counts() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(513).is_err());
    }

    #[test]
    fn gauss_legendre_structure_and_exactness() {
        for n in [4usize, 7, 16, 33, 96, 128, 256, 512] {
            let r = gauss_legendre(n).unwrap();
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]), "n={n} not increasing");
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let total: f64 = r.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n} sum {total}");
            for &x in &r.nodes {
                // Residual measured as the Newton step it implies; the raw
                // residual of P_n carries O(n ε |P'_n|) evaluation rounding.
                let (p, dp) = legendre_with_derivative(n, x);
                assert!((p / dp).abs() <= 1e-15, "n={n}");
                if n <= 33 {
                    assert!(p.abs() <= 1e-14, "n={n}");
                }
            }
            let odd: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(2 * n as i32 - 1)).sum();
            assert!(odd.abs() < 1e-15, "n={n} odd moment {odd}");
            let even: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(2 * n as i32 - 2)).sum();
            assert!((even - 2.0 / (2.0 * n as f64 - 1.0)).abs() < 1e-13, "n={n} even moment {even}");
        }
    }

    #[test]
    fn radial_examples() {
        let spec = QuadratureSpec::default();
        for (p, alpha) in [(1.0, 1.0), (2.0, 0.5), (3.0, 2.0), (1.7, 1.3)] {
            let one = radial_gaussian_integral(|_| 1.0, p, alpha, GrowthBound { constant: 1.0, degree: 0.0 }, &spec).unwrap();
            assert!((one.value - 1.0 / (p * alpha)).abs() < 1e-12, "{one:?}");
        }
        // g = r^{np}, n = 2, p = 3, α = 1: pα ∫ = 2^{np/2}(αp)^{-np/2} Γ(1+np/2)
        let (n, p, alpha) = (2.0, 3.0, 1.0);
        let v = radial_gaussian_integral(|r| r.powf(n * p), p, alpha, GrowthBound { constant: 1.0, degree: n * p }, &spec).unwrap();
        let closed = 2f64.powf(n * p / 2.0) * (alpha * p).powf(-n * p / 2.0) * crate::specfun::gamma(1.0 + n * p / 2.0).unwrap();
        assert!((p * alpha * v.value - closed).abs() < 1e-10 * closed);
        assert!((closed - 48.0 / 27.0).abs() < 1e-14);

        let sq = radial_gaussian_integral(|r| r * r, 2.0, 1.0, GrowthBound { constant: 1.0, degree: 2.0 }, &spec).unwrap();
        assert!((sq.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn radial_cutoff_error_when_tail_cannot_be_certified() {
        let spec = QuadratureSpec::default();
        let huge = GrowthBound { constant: 1e300, degree: 400.0 };
        assert!(matches!(
            radial_gaussian_integral(|_| 1.0, 1.0, 1.0, huge, &spec.with_tol(1e-10)),
            Err(FockError::Cutoff { .. })
        ));
    }

    #[test]
    fn fock_integral_examples() {
        let spec = QuadratureSpec::default();
        let one = FnExpr::from(KernelMonomial::monomial(c(1.0, 0.0), 0));
        for (p, alpha) in [(1.0, 1.0), (2.5, 0.7), (4.0, 2.0)] {
            let v = fock_integral(&one, p, alpha, &spec, C64::zero()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12, "{v:?}");
        }
        let w = FnExpr::from(KernelMonomial::monomial(c(1.0, 0.0), 1));
        let v = fock_integral(&w, 2.0, 1.0, &spec, C64::zero()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);

        // normalized kernel k_z stored around its own root
        let (z, alpha, p) = (c(0.7, 0.3), 1.3, 1.7);
        let kz = FnExpr::from(KernelMonomial::new(c((alpha * z.norm_sqr() / 2.0).exp(), 0.0), z, 0, alpha * z.conj()).unwrap());
        let v = fock_integral(&kz, p, alpha, &spec, C64::zero()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10, "{v:?}");
        // same function, stored around 0 (off-centre polar grid)
        let kz0 = FnExpr::from(KernelMonomial::new(c((-alpha * z.norm_sqr() / 2.0).exp(), 0.0), C64::zero(), 0, alpha * z.conj()).unwrap());
        let v0 = fock_integral(&kz0, p, alpha, &spec, C64::zero()).unwrap();
        assert!((v0.value - 1.0).abs() < 1e-9, "{v0:?}");
    }

    #[test]
    fn fock_integral_zero_function() {
        let v = fock_integral(&FnExpr::zero(), 3.0, 1.0, &QuadratureSpec::default(), C64::zero()).unwrap();
        assert_eq!(v.value, 0.0);
        let s = fock_integral(&FnExpr::zero(), 3.0, 1.0, &QuadratureSpec::default(), c(2.0, 0.0)).unwrap();
        assert!((s.value - 8.0).abs() < 1e-11);
    }

    #[test]
    fn spec_validation() {
        let bad = QuadratureSpec {
            angular_nodes: 5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec {
            target_tol: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(QuadratureSpec::default().validate().is_ok());
    }
}
