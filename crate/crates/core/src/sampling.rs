//! Seeded random rational data.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{ratio, Rational};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Range of sample coordinates: numerators in `[-num_bound, num_bound]`,
/// denominators in `1..=max_den`.
#[derive(Clone, Copy, Debug)]
pub struct SampleRange {
    pub num_bound: i64,
    pub max_den: i64,
}

impl Default for SampleRange {
    fn default() -> Self {
        SampleRange { num_bound: 10, max_den: 8 }
    }
}

impl SampleRange {
    pub fn rational(&self, rng: &mut Rng) -> Rational {
        let n = rng.random_range(-self.num_bound..=self.num_bound);
        let d = rng.random_range(1..=self.max_den);
        ratio(n, d)
    }

    pub fn nonzero_rational(&self, rng: &mut Rng) -> Rational {
        loop {
            let v = self.rational(rng);
            if !num_traits::Zero::is_zero(&v) {
                return v;
            }
        }
    }

    pub fn point(&self, rng: &mut Rng, n: usize) -> Vec<Rational> {
        (0..n).map(|_| self.rational(rng)).collect()
    }

    /// Points with coordinates in `[-1, 1]`.
    pub fn unit_point(rng: &mut Rng, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|_| {
                let d = rng.random_range(1..=16i64);
                ratio(rng.random_range(-d..=d), d)
            })
            .collect()
    }

    pub fn points(&self, rng: &mut Rng, n: usize, count: usize) -> Vec<Vec<Rational>> {
        (0..count).map(|_| self.point(rng, n)).collect()
    }
}
