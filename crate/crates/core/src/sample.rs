//! Deterministic random rationals for sampling checks.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::Chart;
use crate::symexpr::Rational;

/// Seeded source of small rationals.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// `a/b` with `|a| ≤ 7`, `1 ≤ b ≤ 5`.
    pub fn rational(&mut self) -> Rational {
        let a: i64 = self.rng.gen_range(-7..=7);
        let b: i64 = self.rng.gen_range(1..=5);
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != Rational::from_integer(BigInt::from(0)) {
                return r;
            }
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Random point with nonzero parameter values.
    pub fn point(&mut self, chart: &Chart) -> Vec<Rational> {
        (0..chart.len())
            .map(|i| {
                if chart.is_param(i) {
                    self.nonzero_rational()
                } else {
                    self.rational()
                }
            })
            .collect()
    }
}
