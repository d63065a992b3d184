//! Seeded random test functions.

use rand::Rng;

use crate::funcrep::{FnExpr, KernelMonomial, C64};

pub const MAX_TERMS: usize = 5;
pub const MAX_DEGREE: u32 = 3;

/// Uniform point of the closed disc of the given radius.
pub fn disc_point(rng: &mut impl Rng, radius: f64) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if z.norm_sqr() <= 1.0 {
            return z * radius;
        }
    }
}

/// 1 to 5 kernel monomials with amplitude, root and rate in the unit disc and
/// degree at most 3.
pub fn random_fnexpr(rng: &mut impl Rng) -> FnExpr {
    let count = rng.gen_range(1..=MAX_TERMS);
    let terms = (0..count)
        .map(|_| KernelMonomial {
            amplitude: disc_point(rng, 1.0),
            root: disc_point(rng, 1.0),
            degree: rng.gen_range(0..=MAX_DEGREE),
            rate: disc_point(rng, 1.0),
        })
        .collect();
    FnExpr::from_terms(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_and_bounded() {
        let a: Vec<FnExpr> = (0..20).map({
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            move |_| random_fnexpr(&mut rng)
        }).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in &a {
            assert_eq!(*f, random_fnexpr(&mut rng));
            assert!(!f.terms().is_empty() && f.terms().len() <= MAX_TERMS);
            for t in f.terms() {
                assert!(t.amplitude.norm() <= 1.0 && t.root.norm() <= 1.0 && t.rate.norm() <= 1.0);
                assert!(t.degree <= MAX_DEGREE);
            }
        }
    }
}
