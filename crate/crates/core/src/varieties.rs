//! Built-in Vec-varieties and Jacobian-criterion singularity tests.
//!
//! Four families are available:
//!
//! | name                   | ambient   | equations        | parametrization              |
//! |------------------------|-----------|------------------|------------------------------|
//! | `matrices_rank_le`     | `T²`      | `(r+1)`-minors   | `Σ_{i≤r} u_i ⊗ v_i`          |
//! | `sym_matrices_rank_le` | `S²`      | `(r+1)`-minors   | `Σ_{i≤r} u_i · u_i`          |
//! | `slice_rank_le`        | `T^d`     | none             | `Σ_k σ_k(v_k ⊗ T_k)`         |
//! | `border_rank_le_2`     | `T^d`     | none             | `a_1⊗…⊗a_d + b_1⊗…⊗b_d`      |
//!
//! Minor gradients come from cofactor expansion. For the symmetric family the
//! coordinate `x_{ij}` (`i < j`) feeds both matrix entries `(i, j)` and
//! `(j, i)`, so its partial derivative is the sum of the two cofactors.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::point_to_json;
use crate::linalg::{determinant, rank, rref, Matrix, RowSpace};
use crate::sampling::{derive_seed, rank_exact_matrix, rng, small_vector};
use crate::tensor::{sym_basis, Atom, SpaceDescriptor, TensorPoint};
use crate::{Rational, RationalMatrix, RationalPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    MatricesRankLe { r: usize },
    SymMatricesRankLe { r: usize },
    SliceRankLe { r: usize, d: usize },
    BorderRankLe2 { d: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VarietyParams {
    pub r: Option<usize>,
    pub d: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    name: String,
    family: Family,
}

pub const NAMES: [&str; 4] = [
    "matrices_rank_le",
    "sym_matrices_rank_le",
    "slice_rank_le",
    "border_rank_le_2",
];

pub fn builtin_variety(name: &str, params: VarietyParams) -> Result<VarietySpec> {
    let need = |v: Option<usize>, what: &str| {
        v.ok_or_else(|| Error::Precondition(format!("{name} needs parameter {what}")))
    };
    let family = match name {
        "matrices_rank_le" => Family::MatricesRankLe {
            r: need(params.r, "r")?,
        },
        "sym_matrices_rank_le" => Family::SymMatricesRankLe {
            r: need(params.r, "r")?,
        },
        "slice_rank_le" => Family::SliceRankLe {
            r: need(params.r, "r")?,
            d: need(params.d, "d")?,
        },
        "border_rank_le_2" => Family::BorderRankLe2 {
            d: need(params.d, "d")?,
        },
        other => return Err(Error::UnknownVariety(other.to_string())),
    };
    match family {
        Family::SliceRankLe { d, .. } | Family::BorderRankLe2 { d } if d == 0 => {
            return Err(Error::Precondition(
                "tensor order d must be at least 1".into(),
            ));
        }
        _ => {}
    }
    Ok(VarietySpec {
        name: name.to_string(),
        family,
    })
}

/// Parses `"matrices_rank_le:r=2"`, `"slice_rank_le:r=1,d=3"`, ….
pub fn parse_variety(s: &str) -> Result<VarietySpec> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = VarietyParams::default();
    for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {kv:?}")))?;
        let v: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad value in {kv:?}")))?;
        match k.trim() {
            "r" => params.r = Some(v),
            "d" => params.d = Some(v),
            other => return Err(Error::Parse(format!("unknown parameter {other:?}"))),
        }
    }
    builtin_variety(name.trim(), params)
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::MatricesRankLe { r } | Family::SymMatricesRankLe { r } => {
                write!(f, "{}:r={r}", self.name)
            }
            Family::SliceRankLe { r, d } => write!(f, "{}:r={r},d={d}", self.name),
            Family::BorderRankLe2 { d } => write!(f, "{}:d={d}", self.name),
        }
    }
}

/// An `(r+1) × (r+1)` minor on the given row and column indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl VarietySpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn ambient_atom(&self) -> Atom {
        match self.family {
            Family::MatricesRankLe { .. } => Atom::Tensor(2),
            Family::SymMatricesRankLe { .. } => Atom::Sym(2),
            Family::SliceRankLe { d, .. } | Family::BorderRankLe2 { d } => Atom::Tensor(d),
        }
    }

    pub fn ambient(&self, n: usize) -> SpaceDescriptor {
        SpaceDescriptor::single(self.ambient_atom(), n).expect("built-in atoms are valid")
    }

    pub fn has_equations(&self) -> bool {
        self.determinantal_rank().is_some()
    }

    pub fn has_parametrization(&self) -> bool {
        true
    }

    /// `r` for the two determinantal families.
    pub fn determinantal_rank(&self) -> Option<usize> {
        match self.family {
            Family::MatricesRankLe { r } | Family::SymMatricesRankLe { r } => Some(r),
            _ => None,
        }
    }

    /// `dim X(K^n)` where known.
    pub fn dim_law(&self, n: usize) -> Option<usize> {
        match self.family {
            Family::MatricesRankLe { r } if n >= r => Some(2 * r * n - r * r),
            Family::MatricesRankLe { .. } => Some(n * n),
            Family::SymMatricesRankLe { r } if n >= r => {
                Some(r * n - r * (r.saturating_sub(1)) / 2)
            }
            Family::SymMatricesRankLe { .. } => Some(n * (n + 1) / 2),
            _ => None,
        }
    }

    /// Generators of the ideal at `K^n`, rows and columns each in
    /// lexicographic order.
    pub fn equations(&self, n: usize) -> Result<Vec<Minor>> {
        let r = self
            .determinantal_rank()
            .ok_or_else(|| Error::ParametrizationOnly(self.to_string()))?;
        let subsets = combinations(n, r + 1);
        Ok(subsets
            .iter()
            .flat_map(|rows| {
                subsets.iter().map(move |cols| Minor {
                    rows: rows.clone(),
                    cols: cols.clone(),
                })
            })
            .collect())
    }

    /// Coordinate of matrix entry `(i, j)` in the ambient space at `K^n`.
    fn coord_of(&self, n: usize, i: usize, j: usize) -> usize {
        match self.family {
            Family::SymMatricesRankLe { .. } => {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                // Row `a` of the weakly increasing pairs starts at `a·n − a(a−1)/2`.
                a * n - a * a.saturating_sub(1) / 2 + (b - a)
            }
            _ => i * n + j,
        }
    }

    fn check_space(&self, p: &RationalPoint) -> Result<()> {
        if p.space() != &self.ambient(p.space().n()) {
            return Err(Error::ShapeMismatch(format!(
                "point does not live in the ambient space of {self}"
            )));
        }
        Ok(())
    }

    /// The `n × n` matrix of a point of `T²` or `S²`.
    pub fn matrix_view(&self, p: &RationalPoint) -> Result<RationalMatrix> {
        self.check_space(p)?;
        if !self.has_equations() {
            return Err(Error::ParametrizationOnly(self.to_string()));
        }
        let n = p.space().n();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, p.coords()[self.coord_of(n, i, j)].clone());
            }
        }
        Ok(m)
    }

    /// The point of the ambient space with the given matrix (symmetric for
    /// the symmetric family).
    pub fn point_from_matrix(&self, m: &RationalMatrix) -> Result<RationalPoint> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::ShapeMismatch("expected a square matrix".into()));
        }
        let space = self.ambient(n);
        let mut coords = vec![Rational::from_integer(0.into()); space.dim()];
        for i in 0..n {
            for j in 0..n {
                if self.family_is_sym() && m.get(i, j) != m.get(j, i) {
                    return Err(Error::Precondition("matrix is not symmetric".into()));
                }
                coords[self.coord_of(n, i, j)] = m.get(i, j).clone();
            }
        }
        TensorPoint::new(space, coords)
    }

    fn family_is_sym(&self) -> bool {
        matches!(self.family, Family::SymMatricesRankLe { .. })
    }

    /// Membership by rank: all `(r+1)`-minors vanish iff `rank ≤ r`.
    pub fn contains_by_rank(&self, p: &RationalPoint) -> Result<bool> {
        let r = self
            .determinantal_rank()
            .ok_or_else(|| Error::ParametrizationOnly(self.to_string()))?;
        Ok(rank(&self.matrix_view(p)?) <= r)
    }

    /// Sparse gradient of a minor: `(coordinate, ∂f/∂x)` pairs, cofactors
    /// accumulated per coordinate.
    pub fn minor_gradient(&self, minor: &Minor, m: &RationalMatrix) -> Result<Vec<Rational>> {
        let n = m.rows();
        let dim = self.ambient(n).dim();
        let mut g = vec![Rational::from_integer(0.into()); dim];
        let k = minor.rows.len();
        for a in 0..k {
            let rows: Vec<usize> = minor
                .rows
                .iter()
                .enumerate()
                .filter(|&(x, _)| x != a)
                .map(|(_, &v)| v)
                .collect();
            for b in 0..k {
                let cols: Vec<usize> = minor
                    .cols
                    .iter()
                    .enumerate()
                    .filter(|&(x, _)| x != b)
                    .map(|(_, &v)| v)
                    .collect();
                let mut c = determinant(&m.select(&rows, &cols))?;
                if (a + b) % 2 == 1 {
                    c = -c;
                }
                let idx = self.coord_of(n, minor.rows[a], minor.cols[b]);
                g[idx] += c;
            }
        }
        Ok(g)
    }
}

pub fn minor_value(minor: &Minor, m: &RationalMatrix) -> Result<Rational> {
    determinant(&m.select(&minor.rows, &minor.cols))
}

/// Whether every equation generator vanishes at `p`.
pub fn is_member(x: &VarietySpec, p: &RationalPoint) -> Result<bool> {
    let eqs = x.equations(p.space().n())?;
    let m = x.matrix_view(p)?;
    for e in &eqs {
        if !num_traits::Zero::is_zero(&minor_value(e, &m)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact Jacobian `(∂f_i/∂x_j)` at `p`: one row per generator.
pub fn jacobian_at(x: &VarietySpec, p: &RationalPoint) -> Result<RationalMatrix> {
    if !is_member(x, p)? {
        return Err(Error::NotMember(x.to_string()));
    }
    let m = x.matrix_view(p)?;
    let rows = x
        .equations(p.space().n())?
        .iter()
        .map(|e| x.minor_gradient(e, &m))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows, p.space().dim())
}

/// Rank of [`jacobian_at`], streaming gradient rows into an echelon basis
/// instead of materializing the matrix.
pub fn jacobian_rank(x: &VarietySpec, p: &RationalPoint) -> Result<usize> {
    let m = x.matrix_view(p)?;
    let n = p.space().n();
    let mut span = RowSpace::new(p.space().dim());
    for e in x.equations(n)? {
        let value = minor_value(&e, &m)?;
        if !num_traits::Zero::is_zero(&value) {
            return Err(Error::NotMember(x.to_string()));
        }
        if !span.is_full() {
            let g = x.minor_gradient(&e, &m)?;
            if g.iter().any(|v| !num_traits::Zero::is_zero(v)) {
                span.insert(&g);
            }
        }
    }
    Ok(span.dim())
}

/// Jacobian rank of a determinantal family from a rank factorization.
///
/// At `M = A·C` of rank exactly `r` (`A` is `n × r`, `C` is `r × n`) every
/// `r`-minor factors as `det A[I',:] · det C[:,J']`, so the gradient of the
/// minor on `(I, J)` is `a_I ⊗ c_J` with `(a_I)_i = ±det A[I∖i, :]`. For
/// general matrices the Jacobian is a Kronecker product and its rank is
/// `dim span{a_I} · dim span{c_J}`. For symmetric `M` both spans agree and
/// the rows are the symmetrized products `a_I · a_J` in `S²` coordinates.
/// At rank `< r` every cofactor vanishes. The vectors `a_I` annihilate the
/// column space of `A`, so their span has dimension at most `n − r`.
pub fn factored_jacobian_rank(x: &VarietySpec, p: &RationalPoint) -> Result<usize> {
    let r = x
        .determinantal_rank()
        .ok_or_else(|| Error::ParametrizationOnly(x.to_string()))?;
    let m = x.matrix_view(p)?;
    let n = m.rows();
    let s = rank(&m);
    if s > r {
        return Err(Error::NotMember(x.to_string()));
    }
    if s < r {
        return Ok(0);
    }
    let pivots = crate::linalg::pivot_columns(&m);
    let left = cofactor_span(&m.select_cols(&pivots), r)?;
    if x.family_is_sym() {
        let mut span = RowSpace::new(x.ambient(n).dim());
        for (i, u) in left.iter().enumerate() {
            for w in &left[i..] {
                let mut v = vec![Rational::from_integer(0.into()); span.ambient_dim()];
                for a in 0..n {
                    for b in a..n {
                        let mut e = &u[a] * &w[b];
                        if a != b {
                            e += &u[b] * &w[a];
                        }
                        v[x.coord_of(n, a, b)] = e;
                    }
                }
                span.insert(&v);
            }
        }
        return Ok(span.dim());
    }
    let c = rref(&m).select_rows(&(0..r).collect::<Vec<_>>());
    let right = cofactor_span(&c.transpose(), r)?;
    Ok(left.len() * right.len())
}

/// Basis of the span of `(a_I)_i = (−1)^{pos(i)} det A[I∖i, :]` over
/// `(r+1)`-subsets `I`, for `A` of shape `n × r` and rank `r`.
fn cofactor_span(a: &RationalMatrix, r: usize) -> Result<Vec<Vec<Rational>>> {
    let n = a.rows();
    let all_cols: Vec<usize> = (0..r).collect();
    let mut span = RowSpace::new(n);
    let bound = n - r;
    for subset in combinations(n, r + 1) {
        if span.dim() == bound {
            break;
        }
        let mut v = vec![Rational::from_integer(0.into()); n];
        for (pos, &i) in subset.iter().enumerate() {
            let rest: Vec<usize> = subset.iter().copied().filter(|&k| k != i).collect();
            let d = determinant(&a.select(&rest, &all_cols))?;
            v[i] = if pos % 2 == 1 { -d } else { d };
        }
        span.insert(&v);
    }
    Ok(span.basis())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityReport {
    pub point: RationalPoint,
    pub ambient_dim: usize,
    pub variety_dim: usize,
    pub jacobian_rank: usize,
    pub is_singular: bool,
}

impl SingularityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "point": point_to_json(&self.point),
            "ambient_dim": self.ambient_dim,
            "variety_dim": self.variety_dim,
            "jacobian_rank": self.jacobian_rank,
            "codimension": self.ambient_dim - self.variety_dim,
            "is_singular": self.is_singular,
        })
    }
}

/// Jacobian criterion: `p` is singular iff the Jacobian rank is below the
/// codimension. The built-in equation families are irreducible, so the
/// local dimension is `dim_law(n)`.
pub fn is_singular(x: &VarietySpec, p: &RationalPoint) -> Result<SingularityReport> {
    let n = p.space().n();
    if !x.has_equations() {
        return Err(Error::ParametrizationOnly(x.to_string()));
    }
    let variety_dim = x.dim_law(n).ok_or_else(|| Error::DimLawUndefined {
        name: x.to_string(),
        n,
    })?;
    let jacobian_rank = jacobian_rank(x, p)?;
    let ambient_dim = p.space().dim();
    Ok(SingularityReport {
        point: p.clone(),
        ambient_dim,
        variety_dim,
        jacobian_rank,
        is_singular: jacobian_rank < ambient_dim - variety_dim,
    })
}

/// A seeded point of `x(K^n)` whose matrix has rank exactly `s`
/// (determinantal families only). Symmetric samples are `Σ ±u_i u_iᵀ`.
pub fn sample_rank_exact(x: &VarietySpec, n: usize, s: usize, seed: u64) -> Result<RationalPoint> {
    match x.family {
        Family::MatricesRankLe { .. } => x.point_from_matrix(&rank_exact_matrix(n, n, s, seed)?),
        Family::SymMatricesRankLe { .. } => {
            for attempt in 0..crate::sampling::MAX_RETRIES {
                let mut g = rng(seed.wrapping_add(attempt));
                let mut m: RationalMatrix = Matrix::zeros(n, n);
                for _ in 0..s {
                    let u = small_vector(&mut g, n);
                    let sign = if rand::Rng::random_bool(&mut g, 0.5) {
                        1
                    } else {
                        -1
                    };
                    for i in 0..n {
                        for j in 0..n {
                            let v = m.get(i, j).clone()
                                + &u[i] * &u[j] * Rational::from_integer(sign.into());
                            m.set(i, j, v);
                        }
                    }
                }
                if rank(&m) == s {
                    return x.point_from_matrix(&m);
                }
            }
            Err(Error::Sampling(format!(
                "no rank-{s} symmetric {n}x{n} matrix"
            )))
        }
        _ => Err(Error::ParametrizationOnly(x.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    pub rank: usize,
    pub seed: u64,
    pub jacobian_rank: usize,
    pub is_singular: bool,
    pub expected_singular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingLocusReport {
    pub r: usize,
    pub n: usize,
    pub samples: Vec<SampleRecord>,
    pub counterexamples: Vec<SampleRecord>,
    pub passed: bool,
}

impl SingLocusReport {
    pub fn to_json(&self) -> Value {
        let rec = |s: &SampleRecord| {
            json!({
                "rank": s.rank,
                "seed": s.seed,
                "jacobian_rank": s.jacobian_rank,
                "is_singular": s.is_singular,
                "expected_singular": s.expected_singular,
            })
        };
        json!({
            "r": self.r,
            "n": self.n,
            "sample_count": self.samples.len(),
            "samples": self.samples.iter().map(rec).collect::<Vec<_>>(),
            "counterexamples": self.counterexamples.iter().map(rec).collect::<Vec<_>>(),
            "passed": self.passed,
        })
    }
}

/// Checks that the singular locus of rank-`≤ r` `n × n` matrices is the
/// rank-`≤ r−1` locus: `sample_count` seeded points of each rank `0..=r`.
pub fn verify_sing_locus_determinantal(
    r: usize,
    n: usize,
    sample_count: usize,
    seed: u64,
) -> Result<SingLocusReport> {
    if r == 0 || n <= r {
        return Err(Error::Precondition(format!(
            "need n > r >= 1, got r={r}, n={n}"
        )));
    }
    let x = builtin_variety(
        "matrices_rank_le",
        VarietyParams {
            r: Some(r),
            d: None,
        },
    )?;
    let jobs: Vec<(usize, usize)> = (0..=r)
        .flat_map(|s| (0..sample_count).map(move |t| (s, t)))
        .collect();
    let samples = jobs
        .par_iter()
        .map(|&(s, t)| {
            let sample_seed = derive_seed(seed, &[s as u64, t as u64]);
            let p = sample_rank_exact(&x, n, s, sample_seed)?;
            let report = is_singular(&x, &p)?;
            Ok(SampleRecord {
                rank: s,
                seed: sample_seed,
                jacobian_rank: report.jacobian_rank,
                is_singular: report.is_singular,
                expected_singular: s < r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counterexamples: Vec<SampleRecord> = samples
        .iter()
        .filter(|s| s.is_singular != s.expected_singular)
        .cloned()
        .collect();
    Ok(SingLocusReport {
        r,
        n,
        passed: counterexamples.is_empty(),
        samples,
        counterexamples,
    })
}

/// A polynomial map from a parameter vector onto a dense subset of `X(K^n)`.
///
/// Each term is a tensor product of parameter blocks (a block with `k` legs
/// holds `n^k` parameters) whose concatenated legs are then moved to
/// `placement[c]`.
#[derive(Clone, Debug)]
pub struct Parametrization {
    n: usize,
    legs: usize,
    num_params: usize,
    terms: Vec<Term>,
    symmetric_output: bool,
}

#[derive(Clone, Debug)]
struct Term {
    blocks: Vec<(usize, usize)>,
    placement: Vec<usize>,
}

impl Parametrization {
    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn output_dim(&self) -> usize {
        if self.symmetric_output {
            Atom::Sym(self.legs).dim(self.n)
        } else {
            self.n.pow(self.legs as u32)
        }
    }

    fn term_tensor(&self, term: &Term, factors: &[Vec<Rational>]) -> Vec<Rational> {
        let n = self.n;
        let mut acc = vec![Rational::from_integer(1.into())];
        for f in factors {
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for a in &acc {
                for b in f {
                    next.push(a * b);
                }
            }
            acc = next;
        }
        let total = n.pow(self.legs as u32);
        let mut out = vec![Rational::from_integer(0.into()); total];
        let identity = term.placement.iter().enumerate().all(|(c, &t)| c == t);
        for (idx, v) in acc.into_iter().enumerate() {
            if num_traits::Zero::is_zero(&v) {
                continue;
            }
            let target = if identity {
                idx
            } else {
                let mut ix = vec![0; self.legs];
                let mut rest = idx;
                for c in (0..self.legs).rev() {
                    ix[term.placement[c]] = rest % n;
                    rest /= n;
                }
                ix.iter().fold(0, |a, &i| a * n + i)
            };
            out[target] += v;
        }
        out
    }

    fn project(&self, t: Vec<Rational>) -> Vec<Rational> {
        if !self.symmetric_output {
            return t;
        }
        let n = self.n;
        sym_basis(n, self.legs)
            .iter()
            .map(|ix| t[ix.iter().fold(0, |a, &i| a * n + i)].clone())
            .collect()
    }

    fn block<'a>(&self, params: &'a [Rational], (offset, legs): (usize, usize)) -> &'a [Rational] {
        &params[offset..offset + self.n.pow(legs as u32)]
    }

    pub fn evaluate(&self, params: &[Rational]) -> Result<Vec<Rational>> {
        if params.len() != self.num_params {
            return Err(Error::ShapeMismatch(format!(
                "{} parameters, expected {}",
                params.len(),
                self.num_params
            )));
        }
        let mut total = vec![Rational::from_integer(0.into()); self.n.pow(self.legs as u32)];
        for term in &self.terms {
            let factors: Vec<Vec<Rational>> = term
                .blocks
                .iter()
                .map(|&b| self.block(params, b).to_vec())
                .collect();
            for (a, b) in total.iter_mut().zip(self.term_tensor(term, &factors)) {
                *a += b;
            }
        }
        Ok(self.project(total))
    }

    /// Exact Jacobian (output coordinates × parameters), by the product rule
    /// over the blocks of each term.
    pub fn jacobian(&self, params: &[Rational]) -> Result<RationalMatrix> {
        if params.len() != self.num_params {
            return Err(Error::ShapeMismatch("parameter count".into()));
        }
        let mut columns =
            vec![vec![Rational::from_integer(0.into()); self.output_dim()]; self.num_params];
        for term in &self.terms {
            for (pos, &(offset, legs)) in term.blocks.iter().enumerate() {
                let len = self.n.pow(legs as u32);
                for t in 0..len {
                    let factors: Vec<Vec<Rational>> = term
                        .blocks
                        .iter()
                        .enumerate()
                        .map(|(k, &b)| {
                            if k == pos {
                                let mut e = vec![Rational::from_integer(0.into()); len];
                                e[t] = Rational::from_integer(1.into());
                                e
                            } else {
                                self.block(params, b).to_vec()
                            }
                        })
                        .collect();
                    let d = self.project(self.term_tensor(term, &factors));
                    for (a, b) in columns[offset + t].iter_mut().zip(d) {
                        *a += b;
                    }
                }
            }
        }
        Matrix::from_columns(&columns, self.output_dim())
    }
}

impl VarietySpec {
    pub fn parametrization(&self, n: usize) -> Result<Parametrization> {
        let identity = |legs: usize| (0..legs).collect::<Vec<_>>();
        let vector_terms = |count: usize, per_term: usize, start: usize| -> Vec<Term> {
            (0..count)
                .map(|i| Term {
                    blocks: (0..per_term)
                        .map(|k| (start + (i * per_term + k) * n, 1))
                        .collect(),
                    placement: identity(per_term),
                })
                .collect()
        };
        Ok(match self.family {
            Family::MatricesRankLe { r } => Parametrization {
                n,
                legs: 2,
                num_params: 2 * r * n,
                terms: vector_terms(r, 2, 0),
                symmetric_output: false,
            },
            Family::SymMatricesRankLe { r } => Parametrization {
                n,
                legs: 2,
                num_params: r * n,
                terms: (0..r)
                    .map(|i| Term {
                        blocks: vec![(i * n, 1), (i * n, 1)],
                        placement: identity(2),
                    })
                    .collect(),
                symmetric_output: true,
            },
            Family::BorderRankLe2 { d } => Parametrization {
                n,
                legs: d,
                num_params: 2 * d * n,
                terms: vector_terms(2, d, 0),
                symmetric_output: false,
            },
            Family::SliceRankLe { r, d } => {
                // Term k puts its vector in leg i_k = (k mod d) + 1; the other
                // legs keep their relative order.
                let per_term = n + n.pow(d as u32 - 1);
                let terms = (0..r)
                    .map(|k| {
                        let slot = k % d;
                        let placement = (0..d)
                            .map(|c| match c {
                                0 => slot,
                                c if c <= slot => c - 1,
                                c => c,
                            })
                            .collect();
                        let base = k * per_term;
                        let mut blocks = vec![(base, 1)];
                        if d > 1 {
                            blocks.push((base + n, d - 1));
                        }
                        Term { blocks, placement }
                    })
                    .collect();
                Parametrization {
                    n,
                    legs: d,
                    num_params: r * per_term,
                    terms,
                    symmetric_output: false,
                }
            }
        })
    }
}

fn sample_params(par: &Parametrization, seed: u64) -> Vec<Rational> {
    small_vector(&mut rng(seed), par.num_params())
}

/// Image of a seeded small-integer parameter vector.
pub fn parametrize_sample(x: &VarietySpec, n: usize, seed: u64) -> Result<RationalPoint> {
    let par = x.parametrization(n)?;
    TensorPoint::new(x.ambient(n), par.evaluate(&sample_params(&par, seed))?)
}

/// Rank of the parametrization Jacobian at a seeded parameter point: a lower
/// bound for `dim X(K^n)`, attained at generic parameters.
pub fn generic_dimension_lower_bound(x: &VarietySpec, n: usize, seed: u64) -> Result<usize> {
    let par = x.parametrization(n)?;
    Ok(rank(&par.jacobian(&sample_params(&par, seed))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inverse;

    fn var(s: &str) -> VarietySpec {
        parse_variety(s).unwrap()
    }

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn mat_point(x: &VarietySpec, n: usize, v: &[i64]) -> RationalPoint {
        x.point_from_matrix(&Matrix::from_i64(n, n, v).unwrap())
            .unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!(
            var("matrices_rank_le:r=2").family(),
            Family::MatricesRankLe { r: 2 }
        );
        assert_eq!(
            var("border_rank_le_2:d=3").family(),
            Family::BorderRankLe2 { d: 3 }
        );
        assert_eq!(
            var("slice_rank_le:r=1,d=3").to_string(),
            "slice_rank_le:r=1,d=3"
        );
        assert!(matches!(
            parse_variety("nope:r=1"),
            Err(Error::UnknownVariety(_))
        ));
        assert!(parse_variety("matrices_rank_le").is_err());
        assert!(parse_variety("matrices_rank_le:q=1").is_err());
    }

    #[test]
    fn generator_counts() {
        let x = var("matrices_rank_le:r=1");
        let eqs = x.equations(2).unwrap();
        assert_eq!(
            eqs,
            vec![Minor {
                rows: vec![0, 1],
                cols: vec![0, 1]
            }]
        );
        assert_eq!(var("matrices_rank_le:r=2").equations(4).unwrap().len(), 16);
        assert!(matches!(
            var("border_rank_le_2:d=3").equations(2),
            Err(Error::ParametrizationOnly(_))
        ));
    }

    #[test]
    fn sym_coordinates() {
        let x = var("sym_matrices_rank_le:r=1");
        let n = 3;
        let basis = sym_basis(n, 2);
        for i in 0..n {
            for j in 0..n {
                let k = x.coord_of(n, i, j);
                let mut s = [i, j];
                s.sort();
                assert_eq!(basis[k], s.to_vec());
            }
        }
    }

    #[test]
    fn membership_examples() {
        let x1 = var("matrices_rank_le:r=1");
        assert!(is_member(&x1, &mat_point(&x1, 2, &[1, 0, 0, 0])).unwrap());
        assert!(!is_member(&x1, &mat_point(&x1, 2, &[1, 0, 0, 1])).unwrap());
        let x2 = var("matrices_rank_le:r=2");
        assert!(is_member(&x2, &mat_point(&x2, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0])).unwrap());
        let b = var("border_rank_le_2:d=3");
        let p = parametrize_sample(&b, 2, 1).unwrap();
        assert!(matches!(
            is_member(&b, &p),
            Err(Error::ParametrizationOnly(_))
        ));
    }

    #[test]
    fn jacobian_examples() {
        let x1 = var("matrices_rank_le:r=1");
        let zero = mat_point(&x1, 2, &[0, 0, 0, 0]);
        assert_eq!(
            jacobian_at(&x1, &zero).unwrap(),
            RationalMatrix::zeros(1, 4)
        );
        let e11 = mat_point(&x1, 2, &[1, 0, 0, 0]);
        let j = jacobian_at(&x1, &e11).unwrap();
        assert_eq!(rank(&j), 1);
        // ∂det/∂x_22 = x_11 = 1.
        assert_eq!(j.row(0), &[q(0), q(0), q(0), q(1)]);
        let x2 = var("matrices_rank_le:r=2");
        let rank1 = mat_point(&x2, 3, &[1, 2, 3, 2, 4, 6, -1, -2, -3]);
        assert!(jacobian_at(&x2, &rank1).unwrap().is_zero());
        assert!(matches!(
            jacobian_at(&x1, &mat_point(&x1, 2, &[1, 0, 0, 1])),
            Err(Error::NotMember(_))
        ));
    }

    /// ∂det/∂x_ij is the (j, i) entry of the adjugate, `adj = det · M⁻¹`.
    #[test]
    fn determinant_gradient_is_adjugate_transpose() {
        for n in 2..=3 {
            let x = var(&format!("matrices_rank_le:r={}", n - 1));
            for seed in 0..5 {
                let m = crate::sampling::invertible_matrix(n, seed).unwrap();
                let inv = inverse(&m).unwrap();
                let det = determinant(&m).unwrap();
                let minor = Minor {
                    rows: (0..n).collect(),
                    cols: (0..n).collect(),
                };
                let g = x.minor_gradient(&minor, &m).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(g[i * n + j], &det * inv.get(j, i));
                    }
                }
            }
        }
    }

    #[test]
    fn singularity_examples() {
        let x1 = var("matrices_rank_le:r=1");
        assert!(
            is_singular(&x1, &mat_point(&x1, 2, &[0, 0, 0, 0]))
                .unwrap()
                .is_singular
        );
        let x2 = var("matrices_rank_le:r=2");
        let smooth = is_singular(&x2, &mat_point(&x2, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0])).unwrap();
        assert!(!smooth.is_singular);
        assert_eq!(smooth.jacobian_rank, 1);
        let sing = is_singular(&x2, &mat_point(&x2, 3, &[1, 0, 0, 0, 0, 0, 0, 0, 0])).unwrap();
        assert!(sing.is_singular);
    }

    #[test]
    fn singular_locus_small_cases() {
        for (r, n) in [(1, 2), (1, 3), (2, 4)] {
            let rep = verify_sing_locus_determinantal(r, n, 50, 1).unwrap();
            assert!(rep.passed, "r={r} n={n}: {:?}", rep.counterexamples);
            assert_eq!(rep.samples.len(), 50 * (r + 1));
        }
        assert!(verify_sing_locus_determinantal(2, 2, 5, 1).is_err());
    }

    #[test]
    fn factored_rank_matches_explicit() {
        for name in ["matrices_rank_le", "sym_matrices_rank_le"] {
            for r in 1..=2 {
                let x = var(&format!("{name}:r={r}"));
                for n in r + 1..=4 {
                    for s in 0..=r {
                        for seed in 0..4 {
                            let p = sample_rank_exact(&x, n, s, seed).unwrap();
                            assert_eq!(
                                factored_jacobian_rank(&x, &p).unwrap(),
                                jacobian_rank(&x, &p).unwrap()
                            );
                            assert_eq!(
                                jacobian_rank(&x, &p).unwrap(),
                                rank(&jacobian_at(&x, &p).unwrap())
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn member_and_rank_criterion_agree() {
        for name in ["matrices_rank_le:r=1", "sym_matrices_rank_le:r=2"] {
            let x = var(name);
            for seed in 0..10 {
                for s in 0..=3 {
                    let p = sample_rank_exact(&x, 3, s, seed).unwrap();
                    assert_eq!(is_member(&x, &p).unwrap(), x.contains_by_rank(&p).unwrap());
                }
            }
        }
    }

    #[test]
    fn parametrization_samples() {
        let b = var("border_rank_le_2:d=3");
        let p = parametrize_sample(&b, 2, 9).unwrap();
        assert_eq!(
            p.space(),
            &SpaceDescriptor::single(Atom::Tensor(3), 2).unwrap()
        );
        let x = var("matrices_rank_le:r=2");
        for seed in 0..10 {
            let p = parametrize_sample(&x, 4, seed).unwrap();
            assert!(rank(&x.matrix_view(&p).unwrap()) <= 2);
            assert!(is_member(&x, &p).unwrap());
        }
        let s = var("sym_matrices_rank_le:r=2");
        for seed in 0..10 {
            assert!(is_member(&s, &parametrize_sample(&s, 4, seed).unwrap()).unwrap());
        }
    }

    #[test]
    fn slice_rank_one_is_vector_times_tensor() {
        let x = var("slice_rank_le:r=1,d=3");
        let p = parametrize_sample(&x, 3, 4).unwrap();
        // v ⊗ T has a rank-1 leg-1 flattening.
        let f = crate::tensor::flattening(&p, 0, 1).unwrap();
        assert_eq!(rank(&f), 1);
    }

    #[test]
    fn parametrization_jacobian_matches_finite_differences() {
        // Multilinear in each block, so a unit difference quotient per
        // parameter is exact for blocks used once; for repeated blocks use
        // the symmetric quotient (f(x+e) − f(x−e)) / 2.
        for name in [
            "matrices_rank_le:r=2",
            "sym_matrices_rank_le:r=2",
            "slice_rank_le:r=2,d=3",
            "border_rank_le_2:d=3",
        ] {
            let x = var(name);
            let par = x.parametrization(3).unwrap();
            let params = sample_params(&par, 11);
            let j = par.jacobian(&params).unwrap();
            for k in 0..par.num_params() {
                let mut plus = params.clone();
                plus[k] += q(1);
                let mut minus = params.clone();
                minus[k] -= q(1);
                let fp = par.evaluate(&plus).unwrap();
                let fm = par.evaluate(&minus).unwrap();
                for (row, (a, b)) in fp.iter().zip(&fm).enumerate() {
                    assert_eq!(j.get(row, k), &((a - b) / q(2)), "{name} param {k}");
                }
            }
        }
    }

    #[test]
    fn dimension_bounds() {
        assert_eq!(
            generic_dimension_lower_bound(&var("matrices_rank_le:r=1"), 3, 1).unwrap(),
            5
        );
        assert_eq!(
            generic_dimension_lower_bound(&var("border_rank_le_2:d=3"), 2, 1).unwrap(),
            8
        );
        assert_eq!(
            generic_dimension_lower_bound(&var("matrices_rank_le:r=2"), 5, 1).unwrap(),
            16
        );
        let s = var("sym_matrices_rank_le:r=2");
        for n in 2..=5 {
            assert_eq!(
                generic_dimension_lower_bound(&s, n, 3).unwrap(),
                s.dim_law(n).unwrap()
            );
        }
    }

    #[test]
    fn slice_rank_is_superlinear() {
        let x = var("slice_rank_le:r=1,d=3");
        let dims: Vec<i64> = (2..=5)
            .map(|n| generic_dimension_lower_bound(&x, n, 1).unwrap() as i64)
            .collect();
        for w in dims.windows(3) {
            assert!(w[2] - 2 * w[1] + w[0] > 0, "{dims:?}");
        }
    }
}
