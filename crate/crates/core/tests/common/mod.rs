#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wdvv_core::algebra::{rat, Poly};
use wdvv_core::exprlang::parse_polynomial;
use wdvv_core::frobenius::Potential;

pub const SOL1: &str = "1/4*u2^2*u3^2 + 1/60*u3^5";
/// Second polynomial listed next to the first quasihomogeneous solution.
pub const SOL1B: &str = "1/6*u2^3*u3 + 1/6*u2^2*u3^3 + 1/210*u3^7";
pub const SOL2: &str = "1/6*u2^3*u3^2 + 1/20*u2^2*u3^5 + 1/3960*u3^11";

pub fn deformation(text: &str) -> Poly {
    parse_polynomial(text, 3).unwrap()
}

pub fn potential(text: &str) -> Potential {
    Potential::with_deformation(&deformation(text)).unwrap()
}

/// Random polynomial with small rational coefficients and each exponent at
/// most `max_exp`.
pub fn arb_poly(n: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (-6i64..=6, 1i64..=4, prop::collection::vec(0..=max_exp, n)),
        0..=max_terms,
    )
    .prop_map(move |terms| Poly::from_terms(n, terms.into_iter().map(|(p, q, e)| (rat(p, q), e))))
}

/// Random `f(u2, u3)` of total degree between 3 and `max_deg`.
pub fn random_deformation(rng: &mut ChaCha8Rng, max_deg: u32) -> Poly {
    let mut terms = Vec::new();
    for d in 3..=max_deg {
        for a in 0..=d {
            if rng.gen_bool(0.5) {
                let c = rng.gen_range(-4i64..=4);
                if c != 0 {
                    terms.push((rat(c, rng.gen_range(1..=3)), vec![0, a, d - a]));
                }
            }
        }
    }
    Poly::from_terms(3, terms)
}

/// Random deformations of degree at most five that break WDVV.
pub fn non_solutions(count: usize, seed: u64) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let f = random_deformation(&mut rng, 5);
        if !wdvv_core::frobenius::dubrovin_residual(&f).is_zero() {
            out.push(f);
        }
    }
    out
}
