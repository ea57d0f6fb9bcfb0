//! Seeded sampling of small-integer rational data.
//!
//! All randomness flows from explicit `u64` seeds through ChaCha8, so runs are
//! reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{inverse, rank, Matrix};
use crate::{Rational, RationalMatrix};

/// Entries are drawn from `-SMALL..=SMALL`.
pub const SMALL: i64 = 5;

/// Retries for rank-exact sampling before giving up.
pub const MAX_RETRIES: u64 = 32;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with stream indices (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: &[u64]) -> u64 {
    let mut x = seed;
    for &s in stream {
        x = x
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(s.wrapping_mul(0xBF58_476D_1CE4_E5B9));
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x ^= x >> 31;
    }
    x
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    Rational::from_integer(rng.random_range(-SMALL..=SMALL).into())
}

pub fn small_vector(rng: &mut impl Rng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| small_rational(rng)).collect()
}

pub fn small_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> RationalMatrix {
    Matrix::new(rows, cols, small_vector(rng, rows * cols)).expect("shape")
}

/// A random `rows × cols` matrix of rank exactly `rank_target`, as
/// `Σ_{i<s} u_i v_iᵀ` with small-integer `u_i`, `v_i`. Retries with the
/// incremented seed until the rank check passes.
pub fn rank_exact_matrix(
    rows: usize,
    cols: usize,
    rank_target: usize,
    seed: u64,
) -> Result<RationalMatrix> {
    if rank_target > rows.min(cols) {
        return Err(Error::Precondition(format!(
            "rank {rank_target} impossible for a {rows}x{cols} matrix"
        )));
    }
    for attempt in 0..MAX_RETRIES {
        let mut r = rng(seed.wrapping_add(attempt));
        let u = small_matrix(&mut r, rows, rank_target);
        let v = small_matrix(&mut r, rank_target, cols);
        let m = u.mul(&v)?;
        if rank(&m) == rank_target {
            return Ok(m);
        }
    }
    Err(Error::Sampling(format!(
        "no rank-{rank_target} {rows}x{cols} matrix after {MAX_RETRIES} retries"
    )))
}

/// A random invertible `n × n` matrix with entries in `-SMALL..=SMALL`.
pub fn invertible_matrix(n: usize, seed: u64) -> Result<RationalMatrix> {
    for attempt in 0..MAX_RETRIES {
        let m = small_matrix(&mut rng(seed.wrapping_add(attempt)), n, n);
        if inverse(&m).is_ok() {
            return Ok(m);
        }
    }
    Err(Error::Sampling(format!(
        "no invertible {n}x{n} matrix after {MAX_RETRIES} retries"
    )))
}

/// A random injective `rows × cols` matrix (`rows ≥ cols`).
pub fn injective_matrix(rows: usize, cols: usize, seed: u64) -> Result<RationalMatrix> {
    rank_exact_matrix(rows, cols, cols, seed)
}
