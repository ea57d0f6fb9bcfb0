//! Polynomial functors as formal sums of Schur functors.
//!
//! In characteristic zero every polynomial functor is a finite direct sum of
//! Schur functors, so a functor is a constant part `P(0)` together with a
//! multiset of nonempty partitions. Subobjects and quotients are both
//! multiplicity containment.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{lr_coefficient, partitions_up_to, schur_dimension, Partition};
use crate::Rational;

/// Default cap on summand degree for dimension polynomials and shifts.
pub const DEFAULT_DEGREE_CAP: usize = 12;

/// Degree of a functor or polynomial; the zero object has degree −∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolynomialFunctor {
    constant_dim: u128,
    // Never contains the empty partition or a zero multiplicity.
    summands: BTreeMap<Partition, u128>,
}

impl PolynomialFunctor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(dim: u128) -> Self {
        PolynomialFunctor {
            constant_dim: dim,
            summands: BTreeMap::new(),
        }
    }

    pub fn schur(lambda: Partition) -> Self {
        let mut p = Self::zero();
        p.add(lambda, 1);
        p
    }

    /// `T² = S² ⊕ Λ²`.
    pub fn tensor_square() -> Self {
        let mut p = Self::zero();
        p.add(Partition::row(2), 1);
        p.add(Partition::column(2), 1);
        p
    }

    pub fn from_parts(
        constant_dim: u128,
        summands: impl IntoIterator<Item = (Partition, u128)>,
    ) -> Self {
        let mut p = Self::constant(constant_dim);
        for (lambda, m) in summands {
            p.add(lambda, m);
        }
        p
    }

    /// Adds `m` copies of `S_λ`; the empty partition adds to the constant part.
    pub fn add(&mut self, lambda: Partition, m: u128) {
        if m == 0 {
            return;
        }
        if lambda.is_empty() {
            self.constant_dim += m;
        } else {
            *self.summands.entry(lambda).or_insert(0) += m;
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant_dim += other.constant_dim;
        for (l, &m) in &other.summands {
            out.add(l.clone(), m);
        }
        out
    }

    pub fn constant_dim(&self) -> u128 {
        self.constant_dim
    }

    pub fn summands(&self) -> &BTreeMap<Partition, u128> {
        &self.summands
    }

    pub fn multiplicity(&self, lambda: &Partition) -> u128 {
        if lambda.is_empty() {
            self.constant_dim
        } else {
            self.summands.get(lambda).copied().unwrap_or(0)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant_dim == 0 && self.summands.is_empty()
    }

    pub fn degree(&self) -> Degree {
        let top = self.summands.keys().map(Partition::size).max();
        match (top, self.constant_dim) {
            (Some(d), _) => Degree::Finite(d),
            (None, c) if c > 0 => Degree::Finite(0),
            _ => Degree::NegInfinity,
        }
    }

    fn max_summand_size(&self) -> usize {
        self.summands.keys().map(Partition::size).max().unwrap_or(0)
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        let degree = self.max_summand_size();
        if degree > cap {
            return Err(Error::CapExceeded { degree, cap });
        }
        Ok(())
    }

    /// The degree-`i` part; `i = 0` is the constant part.
    pub fn homogeneous_component(&self, i: usize) -> Self {
        if i == 0 {
            return Self::constant(self.constant_dim);
        }
        PolynomialFunctor {
            constant_dim: 0,
            summands: self
                .summands
                .iter()
                .filter(|(l, _)| l.size() == i)
                .map(|(l, &m)| (l.clone(), m))
                .collect(),
        }
    }

    /// `dim P(K^n)` evaluated directly from Schur dimensions.
    pub fn dimension_at(&self, n: usize) -> u128 {
        self.constant_dim
            + self
                .summands
                .iter()
                .map(|(l, &m)| m * schur_dimension(l, n))
                .sum::<u128>()
    }

    pub fn dimension_polynomial(&self) -> Result<DimensionPolynomial> {
        self.dimension_polynomial_capped(DEFAULT_DEGREE_CAP)
    }

    pub fn dimension_polynomial_capped(&self, cap: usize) -> Result<DimensionPolynomial> {
        self.check_cap(cap)?;
        let mut total =
            DimensionPolynomial::constant(Rational::from_integer(BigInt::from(self.constant_dim)));
        for (lambda, &m) in &self.summands {
            let scaled = schur_polynomial(lambda).scale(&Rational::from_integer(BigInt::from(m)));
            total = total.add(&scaled);
        }
        Ok(total)
    }

    pub fn shift(&self, u: usize) -> Result<Self> {
        self.shift_capped(u, DEFAULT_DEGREE_CAP)
    }

    /// The functor `V ↦ P(K^u ⊕ V)`.
    ///
    /// `S_λ(K^u ⊕ V) = ⊕_{μ,ν} (S_μ(K^u) ⊗ S_ν(V))^{N_{μνλ}}`, so `S_λ`
    /// contributes `Σ_μ N_{μνλ} dim S_μ(K^u)` copies of `S_ν`; the `ν = ()`
    /// term is `dim S_λ(K^u)` copies of the constant.
    pub fn shift_capped(&self, u: usize, cap: usize) -> Result<Self> {
        self.check_cap(cap)?;
        let mut out = Self::constant(self.constant_dim);
        for (lambda, &m) in &self.summands {
            let size = lambda.size();
            let inside: Vec<Partition> = partitions_up_to(size, lambda.len())
                .into_iter()
                .filter(|p| p.fits_in(lambda))
                .collect();
            for nu in &inside {
                let mut copies = 0u128;
                for mu in inside
                    .iter()
                    .filter(|mu| mu.size() + nu.size() == size && mu.len() <= u)
                {
                    let c = lr_coefficient(mu, nu, lambda);
                    if c > 0 {
                        copies += u128::from(c) * schur_dimension(mu, u);
                    }
                }
                out.add(nu.clone(), m * copies);
            }
        }
        Ok(out)
    }

    /// Multiplicity-wise containment, including the constant part.
    pub fn is_subobject(&self, of: &Self) -> bool {
        self.constant_dim <= of.constant_dim
            && self.summands.iter().all(|(l, &m)| m <= of.multiplicity(l))
    }

    /// The well-founded order: `self ≺ other` iff they differ and, at the
    /// largest degree `e` where the homogeneous parts differ, `self_e` is a
    /// quotient of `other_e`.
    pub fn precedes(&self, other: &Self) -> bool {
        if self == other {
            return false;
        }
        let top = self.max_summand_size().max(other.max_summand_size());
        for e in (0..=top).rev() {
            let a = self.homogeneous_component(e);
            let b = other.homogeneous_component(e);
            if a != b {
                return a.is_subobject(&b);
            }
        }
        unreachable!("distinct functors differ in some degree")
    }

    pub fn is_pure(&self) -> bool {
        self.constant_dim == 0
    }
}

impl fmt::Display for PolynomialFunctor {
    /// `c + m1*[λ1] + m2*[λ2] …`, summands in partition order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant_dim)?;
        for (l, m) in &self.summands {
            write!(f, " + {m}*[{l}]")?;
        }
        Ok(())
    }
}

impl FromStr for PolynomialFunctor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Self::zero();
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in functor {s:?}")));
            }
            let (mult, rest) = match term.split_once('*') {
                Some((m, r)) => (parse_u128(m.trim())?, r.trim()),
                None if term.starts_with('[') => (1, term),
                None => {
                    p.constant_dim += parse_u128(term)?;
                    continue;
                }
            };
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected [parts] in {term:?}")))?;
            p.add(inner.parse()?, mult);
        }
        Ok(p)
    }
}

fn parse_u128(s: &str) -> Result<u128> {
    s.parse()
        .map_err(|_| Error::Parse(format!("expected a nonnegative integer, got {s:?}")))
}

/// Polynomial in one variable `n` with rational coefficients, lowest degree
/// first and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimensionPolynomial {
    coefficients: Vec<Rational>,
}

impl DimensionPolynomial {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        DimensionPolynomial { coefficients }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn degree(&self) -> Degree {
        match self.coefficients.len() {
            0 => Degree::NegInfinity,
            l => Degree::Finite(l - 1),
        }
    }

    pub fn evaluate(&self, n: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * n + c)
    }

    pub fn evaluate_at(&self, n: usize) -> Rational {
        self.evaluate(&Rational::from_integer(BigInt::from(n)))
    }

    fn add(&self, other: &Self) -> Self {
        let len = self.coefficients.len().max(other.coefficients.len());
        Self::new(
            (0..len)
                .map(|i| {
                    let a = self
                        .coefficients
                        .get(i)
                        .cloned()
                        .unwrap_or_else(Rational::zero);
                    let b = other
                        .coefficients
                        .get(i)
                        .cloned()
                        .unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }

    fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coefficients.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `(n + shift) / div`.
    fn mul_linear(&self, shift: i64, div: u64) -> Self {
        let shift = Rational::from_integer(BigInt::from(shift));
        let div = Rational::from_integer(BigInt::from(div));
        let mut out = vec![Rational::zero(); self.coefficients.len() + 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            out[i + 1] += a / &div;
            out[i] += a * &shift / &div;
        }
        Self::new(out)
    }
}

impl fmt::Display for DimensionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "n")?,
                1 => write!(f, "({c})*n")?,
                _ if c.is_one() => write!(f, "n^{i}")?,
                _ => write!(f, "({c})*n^{i}")?,
            }
        }
        Ok(())
    }
}

/// `dim S_λ(K^n)` as a polynomial in `n`: the product over cells `(i, j)`
/// of `(n + j − i) / hook(i, j)`. It vanishes at `n < len(λ)` through the
/// factor of the cell in row `n + 1`, column 1.
fn schur_polynomial(lambda: &Partition) -> DimensionPolynomial {
    let conj = lambda.conjugate();
    let mut poly = DimensionPolynomial::constant(Rational::one());
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            let hook = (row - j - 1) + (conj.part(j) - i - 1) + 1;
            poly = poly.mul_linear(j as i64 - i as i64, hook as u64);
        }
    }
    poly
}
