//! Concrete points of `T^d`, `S^d`, `Λ^d` and their direct sums.
//!
//! Basis conventions (fixed, used for all I/O):
//! - `TENSOR(d)`: multi-indices `(i_1..i_d)` in lexicographic order, i.e.
//!   row-major with leg 1 slowest.
//! - `SYM(d)`: weakly increasing multi-indices in lexicographic order. The
//!   basis vector for a multiset embeds into `T^d` as the sum of its distinct
//!   orderings with coefficient 1, so coordinate `α` of a symmetric tensor is
//!   its entry at the sorted index `α`.
//! - `EXT(d)`: strictly increasing multi-indices in lexicographic order,
//!   embedded with permutation signs.
//! - `CONST(k)`: `k` coordinates on which every linear map acts trivially.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, RowSpace};
use crate::polyfun::PolynomialFunctor;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Tensor(usize),
    Sym(usize),
    Ext(usize),
    Const(usize),
}

impl Atom {
    /// Number of tensor legs; zero for constants.
    pub fn legs(&self) -> usize {
        match *self {
            Atom::Tensor(d) | Atom::Sym(d) | Atom::Ext(d) => d,
            Atom::Const(_) => 0,
        }
    }

    pub fn dim(&self, n: usize) -> usize {
        match *self {
            Atom::Tensor(d) => n.pow(d as u32),
            Atom::Sym(d) => binomial(n + d - 1, d),
            Atom::Ext(d) => binomial(n, d),
            Atom::Const(k) => k,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Atom::Tensor(0) | Atom::Sym(0) | Atom::Ext(0) => Err(Error::Precondition(
                "tensor, symmetric and exterior atoms need degree at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    components: Vec<Atom>,
    n: usize,
}

impl SpaceDescriptor {
    pub fn new(components: Vec<Atom>, n: usize) -> Result<Self> {
        for a in &components {
            a.validate()?;
        }
        Ok(SpaceDescriptor { components, n })
    }

    pub fn single(atom: Atom, n: usize) -> Result<Self> {
        Self::new(vec![atom], n)
    }

    /// Evaluable descriptor for a functor built from symmetric powers `(d)`,
    /// exterior powers `(1^d)` and a constant part.
    pub fn from_functor(p: &PolynomialFunctor, n: usize) -> Result<Self> {
        let mut components = Vec::new();
        if p.constant_dim() > 0 {
            components.push(Atom::Const(p.constant_dim() as usize));
        }
        for (lambda, &m) in p.summands() {
            let atom = if lambda.is_row() {
                Atom::Sym(lambda.size())
            } else if lambda.is_column() {
                Atom::Ext(lambda.size())
            } else {
                return Err(Error::UnsupportedFunctor(format!(
                    "S_({lambda}) is neither a symmetric nor an exterior power"
                )));
            };
            components.extend(std::iter::repeat_n(atom, m as usize));
        }
        Self::new(components, n)
    }

    pub fn components(&self) -> &[Atom] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_n(&self, n: usize) -> Self {
        SpaceDescriptor {
            components: self.components.clone(),
            n,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|a| a.dim(self.n)).sum()
    }

    /// Coordinate offset of each atom.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.components
            .iter()
            .map(|a| {
                let o = acc;
                acc += a.dim(self.n);
                o
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorPoint<T> {
    space: SpaceDescriptor,
    coords: Vec<T>,
}

impl<T: Scalar> TensorPoint<T> {
    pub fn new(space: SpaceDescriptor, coords: Vec<T>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for a space of dimension {}",
                coords.len(),
                space.dim()
            )));
        }
        Ok(TensorPoint { space, coords })
    }

    pub fn zero(space: SpaceDescriptor) -> Self {
        let coords = vec![T::zero(); space.dim()];
        TensorPoint { space, coords }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Coordinates of atom `index`.
    pub fn atom_coords(&self, index: usize) -> &[T] {
        let o = self.space.offsets()[index];
        let len = self.space.components[index].dim(self.space.n);
        &self.coords[o..o + len]
    }

    /// The atom's coordinates as a full `n^d` tensor.
    pub fn atom_as_tensor(&self, index: usize) -> Result<Vec<T>> {
        let atom = *self
            .space
            .components
            .get(index)
            .ok_or_else(|| Error::Precondition(format!("no atom {index}")))?;
        let n = self.space.n;
        let c = self.atom_coords(index);
        match atom {
            Atom::Tensor(_) => Ok(c.to_vec()),
            Atom::Sym(d) => Ok(embed_sym(c, n, d)),
            Atom::Ext(d) => Ok(embed_ext(c, n, d)),
            Atom::Const(_) => Err(Error::NoFlattening),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch(
                "points live in different spaces".into(),
            ));
        }
        Ok(TensorPoint {
            space: self.space.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        TensorPoint {
            space: self.space.clone(),
            coords: self.coords.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }
}

/// Decomposes a row-major index of `T^d(K^n)` into its multi-index.
fn digits(mut idx: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for k in (0..d).rev() {
        out[k] = idx % n;
        idx /= n;
    }
    out
}

fn undigits(ix: &[usize], n: usize) -> usize {
    ix.iter().fold(0, |acc, &i| acc * n + i)
}

fn multisets(n: usize, d: usize, strict: bool) -> Vec<Vec<usize>> {
    fn go(
        start: usize,
        n: usize,
        d: usize,
        strict: bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(if strict { i + 1 } else { i }, n, d, strict, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, d, strict, &mut Vec::new(), &mut out);
    out
}

/// Weakly increasing multi-indices of length `d` over `0..n`, in basis order.
pub fn sym_basis(n: usize, d: usize) -> Vec<Vec<usize>> {
    multisets(n, d, false)
}

/// Strictly increasing multi-indices of length `d` over `0..n`, in basis order.
pub fn ext_basis(n: usize, d: usize) -> Vec<Vec<usize>> {
    multisets(n, d, true)
}

fn basis_lookup(basis: &[Vec<usize>]) -> HashMap<&[usize], usize> {
    basis
        .iter()
        .enumerate()
        .map(|(k, b)| (b.as_slice(), k))
        .collect()
}

/// Sign of the permutation sorting `ix`, or `None` on a repeated index.
fn sort_sign(ix: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut sorted = ix.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let inversions = (0..ix.len())
        .flat_map(|i| (i + 1..ix.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| ix[i] > ix[j])
        .count();
    Some((sorted, inversions % 2 == 1))
}

fn embed_sym<T: Scalar>(coords: &[T], n: usize, d: usize) -> Vec<T> {
    let basis = sym_basis(n, d);
    let lookup = basis_lookup(&basis);
    (0..n.pow(d as u32))
        .map(|idx| {
            let mut ix = digits(idx, n, d);
            ix.sort_unstable();
            coords[lookup[ix.as_slice()]].clone()
        })
        .collect()
}

fn embed_ext<T: Scalar>(coords: &[T], n: usize, d: usize) -> Vec<T> {
    let basis = ext_basis(n, d);
    let lookup = basis_lookup(&basis);
    (0..n.pow(d as u32))
        .map(|idx| match sort_sign(&digits(idx, n, d)) {
            Some((sorted, odd)) => {
                let c = coords[lookup[sorted.as_slice()]].clone();
                if odd {
                    -c
                } else {
                    c
                }
            }
            None => T::zero(),
        })
        .collect()
}

/// Tensor positions of basis multi-indices; reading a symmetric or
/// alternating tensor at these positions recovers its coordinates.
fn basis_positions(n: usize, basis: &[Vec<usize>]) -> Vec<usize> {
    basis.iter().map(|ix| undigits(ix, n)).collect()
}

/// Applies `phi` (`m × n`) to leg `leg` of a tensor with the given shape.
pub(crate) fn mode_product<T: Scalar>(
    data: &[T],
    shape: &[usize],
    leg: usize,
    phi: &Matrix<T>,
) -> (Vec<T>, Vec<usize>) {
    let n = shape[leg];
    let m = phi.rows();
    let outer: usize = shape[..leg].iter().product();
    let inner: usize = shape[leg + 1..].iter().product();
    let mut out = vec![T::zero(); outer * m * inner];
    for o in 0..outer {
        for k in 0..n {
            for i in 0..inner {
                let x = &data[(o * n + k) * inner + i];
                if x.is_zero() {
                    continue;
                }
                for r in 0..m {
                    let a = phi.get(r, k);
                    if !a.is_zero() {
                        let idx = (o * m + r) * inner + i;
                        out[idx] = out[idx].clone() + a.clone() * x.clone();
                    }
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[leg] = m;
    (out, new_shape)
}

fn apply_to_tensor<T: Scalar>(t: &[T], n: usize, d: usize, phi: &Matrix<T>) -> Vec<T> {
    let mut data = t.to_vec();
    let mut shape = vec![n; d];
    for leg in 0..d {
        let (next, s) = mode_product(&data, &shape, leg, phi);
        data = next;
        shape = s;
    }
    data
}

/// `P(φ)(p)`: `φ^{⊗d}` on tensor atoms, the induced maps on symmetric and
/// exterior atoms, the identity on constants.
pub fn apply_map<T: Scalar>(p: &TensorPoint<T>, phi: &Matrix<T>) -> Result<TensorPoint<T>> {
    let n = p.space.n;
    if phi.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "map has {} columns but the point lives over K^{n}",
            phi.cols()
        )));
    }
    let m = phi.rows();
    let space = p.space.with_n(m);
    let mut coords = Vec::with_capacity(space.dim());
    for (k, atom) in p.space.components.iter().enumerate() {
        match *atom {
            Atom::Const(_) => coords.extend_from_slice(p.atom_coords(k)),
            Atom::Tensor(d) => coords.extend(apply_to_tensor(p.atom_coords(k), n, d, phi)),
            Atom::Sym(d) | Atom::Ext(d) => {
                let t = apply_to_tensor(&p.atom_as_tensor(k)?, n, d, phi);
                let basis = if matches!(atom, Atom::Sym(_)) {
                    sym_basis(m, d)
                } else {
                    ext_basis(m, d)
                };
                coords.extend(basis_positions(m, &basis).into_iter().map(|i| t[i].clone()));
            }
        }
    }
    TensorPoint::new(space, coords)
}

/// The `n × n^{d−1}` matrix of the leg-`leg` flattening (1-based) of atom
/// `atom_index`; columns follow the remaining legs in lexicographic order.
pub fn flattening<T: Scalar>(
    p: &TensorPoint<T>,
    atom_index: usize,
    leg: usize,
) -> Result<Matrix<T>> {
    let atom = *p
        .space
        .components
        .get(atom_index)
        .ok_or_else(|| Error::Precondition(format!("no atom {atom_index}")))?;
    let d = atom.legs();
    if d == 0 {
        return Err(Error::NoFlattening);
    }
    if leg == 0 || leg > d {
        return Err(Error::Precondition(format!("leg {leg} outside 1..={d}")));
    }
    let n = p.space.n;
    let t = p.atom_as_tensor(atom_index)?;
    let cols = n.pow(d as u32 - 1);
    let mut m = Matrix::zeros(n, cols);
    for (idx, v) in t.into_iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let ix = digits(idx, n, d);
        let rest: Vec<usize> = ix
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != leg - 1)
            .map(|(_, &i)| i)
            .collect();
        m.set(ix[leg - 1], undigits(&rest, n), v);
    }
    Ok(m)
}

/// RREF basis of the minimal subspace `U_p ⊆ K^n` with `p ∈ P(U_p)`: the sum
/// of the column spaces of every flattening of every atom.
pub fn minimal_subspace<T: Scalar>(p: &TensorPoint<T>) -> Result<Vec<Vec<T>>> {
    let n = p.space.n;
    let mut span = RowSpace::new(n);
    for (k, atom) in p.space.components.iter().enumerate() {
        for leg in 1..=atom.legs() {
            if span.is_full() {
                break;
            }
            let f = flattening(p, k, leg)?;
            for j in 0..f.cols() {
                let col = f.column(j);
                if col.iter().any(|x| !x.is_zero()) {
                    span.insert(&col);
                }
            }
        }
    }
    Ok(span.basis())
}

/// Membership in the `d`-th subspace variety: `dim U_p ≤ d`.
pub fn subspace_variety_member<T: Scalar>(p: &TensorPoint<T>, d: usize) -> Result<bool> {
    Ok(minimal_subspace(p)?.len() <= d)
}
