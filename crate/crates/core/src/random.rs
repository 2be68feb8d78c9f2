//! Seeded random instance generators for tests and property suites.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::forms::{self, Eps, Isometry, QuadraticForm};
use crate::formations::QuasiFormation;
use crate::matrix::Mat;
use crate::ring::Ring;
use crate::snf;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random unimodular integer matrix: a product of elementary shears and
/// signed permutations, with entry growth kept small.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> Mat {
    let mut m = Mat::identity(Ring::Z, n);
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        match rng.gen_range(0..3) {
            0 => {
                // row_i += c row_j
                let c = BigInt::from(rng.gen_range(-2i64..=2));
                let mut e = Mat::identity(Ring::Z, n);
                e.set(i, j, c);
                m = e.mm(&m);
            }
            1 => {
                let mut e = Mat::identity(Ring::Z, n);
                e.set(i, i, BigInt::from(0));
                e.set(j, j, BigInt::from(0));
                e.set(i, j, BigInt::from(1));
                e.set(j, i, BigInt::from(-1));
                m = e.mm(&m);
            }
            _ => {
                let mut e = Mat::identity(Ring::Z, n);
                e.set(i, i, BigInt::from(-1));
                m = e.mm(&m);
            }
        }
    }
    m
}

/// A random matrix with entries drawn uniformly from `[-bound, bound]`.
pub fn entries_in(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Mat {
    let mut m = Mat::zero(Ring::Z, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, BigInt::from(rng.gen_range(-bound..=bound)));
        }
    }
    m
}

/// A random primitive half-rank summand of `Z^(2k)` with entries in
/// `[-bound, bound]`, by rejection sampling.
pub fn primitive_half_rank(rng: &mut ChaCha8Rng, k: usize, bound: i64) -> Mat {
    loop {
        let cand = entries_in(rng, 2 * k, k, bound);
        if snf::is_primitive(&cand).unwrap_or(false) {
            return cand;
        }
    }
}

/// A random skew quasi-formation on the standard hyperbolic form
/// `H_-(Z^g)`, with the standard Lagrangian and a random primitive `V`.
pub fn skew_quasi_formation(rng: &mut ChaCha8Rng, g: usize, bound: i64) -> QuasiFormation {
    let h = forms::hyperbolic(g, Eps::Minus, Ring::Z);
    let id = Mat::identity(Ring::Z, g);
    let z = Mat::zero(Ring::Z, g, g);
    let l = id.vstack(&z).unwrap();
    loop {
        let v = primitive_half_rank(rng, g, bound);
        if let Ok(x) = QuasiFormation::new(h.clone(), l.clone(), v) {
            return x;
        }
    }
}

/// A random automorphism of a form, as a composition of transvections when
/// available, else a pullback check loop over small unimodular candidates.
pub fn automorphism(rng: &mut ChaCha8Rng, v: &QuadraticForm, attempts: usize) -> Isometry {
    for _ in 0..attempts {
        let g = unimodular(rng, v.rank(), 6);
        if let Ok(iso) = Isometry::new(v.clone(), v.clone(), g) {
            return iso;
        }
    }
    Isometry::identity(v)
}

/// A random isometric copy of `v`: the pullback of `theta` along a random
/// unimodular matrix, together with the isometry onto `v`.
pub fn isometric_copy(rng: &mut ChaCha8Rng, v: &QuadraticForm, steps: usize) -> (QuadraticForm, Isometry) {
    let g = unimodular(rng, v.rank(), steps);
    let theta = g.transpose().mm(&v.theta).mm(&g);
    let w = QuadraticForm::new(v.ring, v.epsilon, theta).unwrap();
    let iso = Isometry::new(w.clone(), v.clone(), g).unwrap();
    (w, iso)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodular_is_unimodular() {
        let mut r = rng(7);
        for n in 1..=5 {
            let m = unimodular(&mut r, n, 12);
            assert!(m.is_unimodular());
        }
    }

    #[test]
    fn skew_generator_produces_valid_formations() {
        let mut r = rng(42);
        for g in 1..=4 {
            let x = skew_quasi_formation(&mut r, g, 5);
            x.validate().unwrap();
        }
    }
}
