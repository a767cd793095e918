//! Seeded generators for random rational instances.
//!
//! Entries are small-denominator rationals so that exact arithmetic stays
//! cheap. The generator is ChaCha8, whose stream is stable across platforms.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::RMatrix;
use crate::model::{Channel, InputDistribution, UtilityMatrix};
use crate::rational::{int, Rational};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_simplex_point<R: Rng>(rng: &mut R, len: usize, max_weight: u32) -> Vec<Rational> {
    loop {
        let w: Vec<u32> = (0..len).map(|_| rng.gen_range(0..=max_weight)).collect();
        let total: u32 = w.iter().sum();
        if total > 0 {
            return w
                .into_iter()
                .map(|x| Rational::new((x as i64).into(), (total as i64).into()))
                .collect();
        }
    }
}

/// Column-stochastic `rows x cols` matrix with integer weights in `0..=max_weight` per column.
pub fn stochastic_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_weight: u32) -> RMatrix {
    let columns: Vec<Vec<Rational>> = (0..cols)
        .map(|_| random_simplex_point(rng, rows, max_weight))
        .collect();
    RMatrix::from_fn(rows, cols, |i, j| columns[j][i].clone())
}

pub fn channel<R: Rng>(rng: &mut R, outputs: usize, inputs: usize) -> Channel {
    Channel::new(stochastic_matrix(rng, outputs, inputs, 4)).expect("generated matrix is stochastic")
}

/// Integer utilities in `-range..=range`.
pub fn utility<R: Rng>(rng: &mut R, inputs: usize, outputs: usize, range: i64) -> UtilityMatrix {
    UtilityMatrix::new(RMatrix::from_fn(inputs, outputs, |_, _| int(rng.gen_range(-range..=range))))
}

/// Strictly positive distribution with weights in `1..=6` before normalization.
pub fn distribution<R: Rng>(rng: &mut R, n: usize) -> InputDistribution {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = w.iter().sum();
    InputDistribution::new(w.into_iter().map(|x| Rational::new(x.into(), total.into())).collect())
        .expect("positive weights summing to one")
}

/// Probability vector of the given length (some entries may be zero, but not all).
pub fn weights<R: Rng>(rng: &mut R, len: usize) -> Vec<Rational> {
    let w = random_simplex_point(rng, len, 4);
    debug_assert!(!w.iter().all(Zero::is_zero));
    w
}
