//! Partitions, semistandard tableaux and Littlewood–Richardson coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Default cap on `|λ|` for the tableau-enumeration oracle.
pub const DEFAULT_SSYT_CAP: usize = 12;

/// A weakly decreasing sequence of positive integers, stored without
/// trailing zeros. The empty sequence is the empty partition.
///
/// Ordered by size, then reverse lexicographically, so `(2)` precedes `(1,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Validates `parts`; trailing zeros are dropped.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The one-row partition `(d)`, indexing the symmetric power `S^d`.
    pub fn row(d: usize) -> Self {
        if d == 0 {
            Self::empty()
        } else {
            Partition(vec![d])
        }
    }

    /// The one-column partition `(1^d)`, indexing the exterior power.
    pub fn column(d: usize) -> Self {
        Partition(vec![1; d])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Whether the Young diagram of `self` fits inside that of `other`.
    pub fn fits_in(&self, other: &Partition) -> bool {
        self.len() <= other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.part(0);
        Partition(
            (1..=first)
                .map(|j| self.0.iter().filter(|&&p| p >= j).count())
                .collect(),
        )
    }

    pub fn is_row(&self) -> bool {
        self.len() == 1
    }

    pub fn is_column(&self) -> bool {
        self.0.iter().all(|&p| p == 1)
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Comma-separated parts; the empty string is `()`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("bad part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// All partitions of size at most `max_size` with at most `max_length`
/// parts, in the [`Partition`] order.
pub fn partitions_up_to(max_size: usize, max_length: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for size in 0..=max_size {
        let mut current = Vec::new();
        partitions_of(size, size, max_length, &mut current, &mut out);
    }
    out
}

fn partitions_of(
    remaining: usize,
    max_part: usize,
    max_length: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    if current.len() == max_length {
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        partitions_of(remaining - part, part, max_length, current, out);
        current.pop();
    }
}

/// Dimension of `S_λ(K^n)` by the product formula
/// `∏_{i<j≤n} (λ_i − λ_j + j − i) / (j − i)`.
pub fn schur_dimension(lambda: &Partition, n: usize) -> u128 {
    if lambda.len() > n {
        return 0;
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= BigUint::from(lambda.part(i) - lambda.part(j) + j - i);
            den *= BigUint::from(j - i);
        }
    }
    (num / den).to_u128().expect("Schur dimension exceeds u128")
}

/// Number of semistandard Young tableaux of shape `λ` with entries in
/// `1..=n`, by exhaustive enumeration. Refuses `|λ| > cap`.
pub fn ssyt_count(lambda: &Partition, n: usize, cap: usize) -> Result<u128> {
    if lambda.size() > cap {
        return Err(Error::OracleTooLarge {
            size: lambda.size(),
            cap,
        });
    }
    let cells: Vec<(usize, usize)> = lambda
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
        .collect();
    let mut grid: Vec<Vec<usize>> = lambda.parts().iter().map(|&l| vec![0; l]).collect();
    Ok(fill_ssyt(&cells, 0, n, &mut grid))
}

fn fill_ssyt(cells: &[(usize, usize)], k: usize, n: usize, grid: &mut [Vec<usize>]) -> u128 {
    let Some(&(i, j)) = cells.get(k) else {
        return 1;
    };
    let left = if j > 0 { grid[i][j - 1] } else { 1 };
    let above = if i > 0 { grid[i - 1][j] + 1 } else { 1 };
    let mut total = 0;
    for e in left.max(above)..=n {
        grid[i][j] = e;
        total += fill_ssyt(cells, k + 1, n, grid);
    }
    grid[i][j] = 0;
    total
}

/// Littlewood–Richardson coefficient `N_{μνλ}`: the multiplicity of `S_λ`
/// in `S_μ ⊗ S_ν`.
///
/// Counts semistandard fillings of the skew shape `λ/μ` with content `ν`
/// whose reverse reading word (right to left, top to bottom) is a lattice
/// word.
pub fn lr_coefficient(mu: &Partition, nu: &Partition, lambda: &Partition) -> u64 {
    if lambda.size() != mu.size() + nu.size() || !mu.fits_in(lambda) || nu.len() > lambda.len() {
        return 0;
    }
    if nu.is_empty() {
        return u64::from(mu == lambda);
    }
    let rows = lambda.len();
    let mut grid: Vec<Vec<usize>> = (0..rows).map(|i| vec![0; lambda.part(i)]).collect();
    let mut counts = vec![0usize; nu.len() + 1];
    let mut cells = Vec::with_capacity(nu.size());
    for i in 0..rows {
        for j in (mu.part(i)..lambda.part(i)).rev() {
            cells.push((i, j));
        }
    }
    let mut search = LrSearch {
        mu,
        lambda,
        nu,
        cells: &cells,
        grid: &mut grid,
        counts: &mut counts,
    };
    search.count(0)
}

struct LrSearch<'a> {
    mu: &'a Partition,
    lambda: &'a Partition,
    nu: &'a Partition,
    cells: &'a [(usize, usize)],
    grid: &'a mut [Vec<usize>],
    counts: &'a mut [usize],
}

impl LrSearch<'_> {
    fn count(&mut self, k: usize) -> u64 {
        let Some(&(i, j)) = self.cells.get(k) else {
            return 1;
        };
        // Entries weakly increase to the right: bounded by the right neighbour.
        let upper = if j + 1 < self.lambda.part(i) {
            self.grid[i][j + 1]
        } else {
            self.nu.len()
        };
        // Columns strictly increase downward within the skew shape.
        let lower = if i > 0 && j >= self.mu.part(i - 1) {
            self.grid[i - 1][j] + 1
        } else {
            1
        };
        let mut total = 0;
        for e in lower..=upper.min(i + 1) {
            if self.counts[e] == self.nu.part(e - 1) {
                continue;
            }
            if e > 1 && self.counts[e] + 1 > self.counts[e - 1] {
                continue;
            }
            self.counts[e] += 1;
            self.grid[i][j] = e;
            total += self.count(k + 1);
            self.counts[e] -= 1;
        }
        self.grid[i][j] = 0;
        total
    }
}
