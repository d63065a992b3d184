//! Scalar special functions: Γ, ln Γ, the confluent hypergeometric value
//! ₁F₁(1+n; 1; x) and Laguerre polynomials.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, FockError, Result};

/// A strictly positive, finite real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
#[serde(transparent)]
pub struct PosReal(f64);

impl PosReal {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(domain("PosReal", format!("expected a finite positive value, got {value}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for PosReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const ZETA_TERMS: usize = 48;

/// ζ(k) for k = 2..ZETA_TERMS+1, via Euler–Maclaurin with 20 explicit terms.
fn zeta_table() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_2, B_4, ..., B_10
        const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
        const N: f64 = 20.0;
        let mut out = [0.0; ZETA_TERMS];
        for (slot, k) in out.iter_mut().zip(2..) {
            let s = k as f64;
            // Sum small terms first.
            let mut sum = 0.0;
            for n in (1..20).rev() {
                sum += (n as f64).powf(-s);
            }
            let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
            // rising product s(s+1)...(s+2j-2) / (2j)!
            let mut rising = s;
            let mut fact = 2.0;
            for (j, b) in BERNOULLI.iter().enumerate() {
                let j = j + 1;
                if j > 1 {
                    let base = s + (2 * j - 3) as f64;
                    rising *= base * (base + 1.0);
                    fact *= ((2 * j - 1) * (2 * j)) as f64;
                }
                tail += b / fact * rising * N.powf(-s - (2 * j - 1) as f64);
            }
            *slot = sum + tail;
        }
        out
    })
}

/// ln Γ(1+t) for |t| ≤ 1/4 from the zeta series; keeps full relative
/// accuracy near the roots of ln Γ at 1 and 2.
fn ln_gamma_1p_series(t: f64) -> f64 {
    let zeta = zeta_table();
    let mut acc = 0.0;
    let mut power = t; // (-t)^(k-1) sign tracked below
    for (i, z) in zeta.iter().enumerate() {
        let k = (i + 2) as f64;
        power *= -t;
        acc += z * power / k;
    }
    // power started at t then multiplied by -t each step: (-1)^(k-1) t^k.
    // The series term is ζ(k)(-t)^k / k = (-1)^k ζ(k) t^k / k.
    -EULER_GAMMA * t - acc
}

fn lanczos_sum(x: f64) -> f64 {
    // x here is already shifted by -1.
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if (x - 1.0).abs() <= 0.25 {
        return ln_gamma_1p_series(x - 1.0);
    }
    if (x - 2.0).abs() <= 0.25 {
        let t = x - 2.0;
        return t.ln_1p() + ln_gamma_1p_series(t);
    }
    if x < 0.5 {
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln()
}

/// ln Γ(x) for finite x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain("ln_gamma", format!("argument must be finite and positive, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// Γ(x) for finite x > 0. Integer arguments up to 22 are exact products.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain("gamma", format!("argument must be finite and positive, got {x}")));
    }
    if x.fract() == 0.0 && x <= 22.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    if x > 171.0 {
        let ln = ln_gamma_unchecked(x);
        if ln > f64::MAX.ln() {
            return Err(FockError::Range { op: "gamma", ln_value: ln });
        }
        return Ok(ln.exp());
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (xm + 0.5));
    Ok((2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(xm))
}

/// Laguerre polynomial L_n(x) by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("laguerre", format!("non-finite argument {x}")));
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

const KUMMER_MAX_TERMS: usize = 100_000;

/// Sum of the ₁F₁(1+n;1;x) series as (mantissa, ln scale), rescaling the
/// running sum whenever it grows past 1e280.
fn kummer_scaled(n: usize, x: f64) -> (f64, f64) {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    let nf = n as f64;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (1.0 + nf + kf) * x / ((1.0 + kf) * (1.0 + kf));
        sum += term;
        if sum > 1e280 {
            sum *= 1e-280;
            term *= 1e-280;
            ln_scale += 280.0 * std::f64::consts::LN_10;
        }
        // Terms rise while k < ~sqrt(n x) + x, then fall geometrically.
        if term < 1e-17 * sum && kf + 1.0 > x {
            break;
        }
    }
    (sum, ln_scale)
}

fn check_kummer_args(n: usize, x: f64) -> Result<()> {
    let _ = n;
    if !(x.is_finite() && x >= 0.0) {
        return Err(domain("kummer_1f1_n1", format!("argument must be finite and non-negative, got {x}")));
    }
    Ok(())
}

/// ₁F₁(1+n; 1; x) for x ≥ 0 by direct positive-term summation.
pub fn kummer_1f1_n1(n: usize, x: f64) -> Result<f64> {
    check_kummer_args(n, x)?;
    let (sum, ln_scale) = kummer_scaled(n, x);
    let ln = sum.ln() + ln_scale;
    if ln > f64::MAX.ln() {
        return Err(FockError::Range { op: "kummer_1f1_n1", ln_value: ln });
    }
    Ok(if ln_scale == 0.0 { sum } else { ln.exp() })
}

/// ln ₁F₁(1+n; 1; x), finite for every x the series can reach.
pub fn ln_kummer_1f1_n1(n: usize, x: f64) -> Result<f64> {
    check_kummer_args(n, x)?;
    let (sum, ln_scale) = kummer_scaled(n, x);
    Ok(sum.ln() + ln_scale)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // reference values kept as published
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_trivial_points() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-14);
    }

    #[test]
    fn ln_gamma_matches_high_precision_values() {
        // 40-digit reference values.
        let refs = [
            (0.001, 6.907_178_885_383_853_682_5),
            (0.1, 2.252_712_651_734_205_959_9),
            (0.75, 0.203_280_951_431_295_371_48),
            (0.9, 0.066_376_239_734_742_971_189),
            (1.1, -0.049_872_441_259_839_724_148),
            (1.25, -0.098_271_836_421_813_161_464),
            (1.461_632_144_968_362_2, -0.121_486_290_535_849_608_1),
            (1.9, -0.038_984_275_923_083_330_039),
            (2.1, 0.045_437_738_544_485_135_896),
            (2.5, 0.284_682_870_472_919_159_63),
            (3.7, 1.428_072_326_665_387_921_9),
            (10.5, 13.940_625_219_403_763_633),
            (57.3, 173.563_868_279_691_430_42),
            (123.456, 469.605_547_129_929_468_73),
            (200.0, 857.933_669_825_857_436_82),
        ];
        for (x, want) in refs {
            let got = ln_gamma(x).unwrap();
            assert!(rel(got, want) <= 1e-13, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn ln_gamma_rejects_bad_input() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
        assert!(ln_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(3.0).unwrap(), 2.0);
        assert_eq!(gamma(11.0).unwrap(), 3_628_800.0);
        assert!(rel(gamma(1.5).unwrap(), PI.sqrt() / 2.0) < 1e-14);
        let mut fact = 1.0;
        for k in 1..=20 {
            assert_eq!(gamma(k as f64).unwrap(), fact);
            fact *= k as f64;
        }
    }

    #[test]
    fn gamma_overflow_carries_log() {
        match gamma(200.0) {
            Err(FockError::Range { ln_value, .. }) => assert!(rel(ln_value, 857.933_669_825_857_4) < 1e-13),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn gamma_functional_equation() {
        let mut x = 0.013;
        while x < 50.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x={x}");
            x += 0.137;
        }
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 7.0).unwrap(), 1.0);
        assert_eq!(laguerre(1, 3.0).unwrap(), -2.0);
        // L2(x) = (x^2 - 4x + 2)/2
        let direct = |x: f64| (x * x - 4.0 * x + 2.0) / 2.0;
        assert!((laguerre(2, -1.0).unwrap() - 3.5).abs() < 1e-15);
        for x in [-3.0, -0.5, 0.0, 1.7, 4.2] {
            assert!((laguerre(2, x).unwrap() - direct(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn kummer_values() {
        assert_eq!(kummer_1f1_n1(5, 0.0).unwrap(), 1.0);
        assert!(rel(kummer_1f1_n1(0, 2.0).unwrap(), 2.0f64.exp()) < 1e-14);
        assert!(rel(kummer_1f1_n1(1, 1.0).unwrap(), 2.0 * std::f64::consts::E) < 1e-14);
        assert!(kummer_1f1_n1(1, -0.1).is_err());
    }

    #[test]
    fn kummer_matches_laguerre_transform() {
        for n in 0..=10 {
            for i in 0..100 {
                let x = 10.0 * i as f64 / 99.0;
                let oracle = x.exp() * laguerre(n, -x).unwrap();
                let got = kummer_1f1_n1(n, x).unwrap();
                assert!(rel(got, oracle) <= 1e-12, "n={n} x={x}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn kummer_log_form_survives_overflow() {
        let ln = ln_kummer_1f1_n1(3, 800.0).unwrap();
        let oracle = 800.0 + laguerre(3, -800.0).unwrap().ln();
        assert!(rel(ln, oracle) < 1e-12);
        assert!(matches!(kummer_1f1_n1(3, 800.0), Err(FockError::Range { .. })));
    }

    #[test]
    fn kummer_increasing_in_x() {
        for n in 0..6 {
            let mut last = kummer_1f1_n1(n, 0.0).unwrap();
            for i in 1..200 {
                let v = kummer_1f1_n1(n, 0.05 * i as f64).unwrap();
                assert!(v > last);
                last = v;
            }
        }
    }
}
