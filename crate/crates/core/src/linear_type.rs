//! Linear-type profiles, the stability bound `F(d, c)`, the dimension law
//! for linear-type varieties and the tangent-space dichotomy.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::apply_map;
use crate::varieties::{
    factored_jacobian_rank, generic_dimension_lower_bound, Family, VarietySpec,
};
use crate::{Rational, RationalMatrix, RationalPoint};

/// Exact binomial coefficient; the scan never gets near `u128` overflow for
/// the `d` this crate supports.
fn choose(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Minimal `k` such that `lhs(k') > d(d+k') + c` for every `k' ≥ k`.
///
/// `lhs` must have nondecreasing forward differences. The scan stops at the
/// first `k` where the inequality holds and `lhs(k+1) − lhs(k) ≥ d`: from
/// then on the left side grows at least as fast as the right side, so the
/// inequality persists. Walking back from there while it still holds gives
/// the minimum.
fn eventual_threshold(d: u128, c: u128, lhs: impl Fn(u128) -> u128) -> u128 {
    let holds = |k: u128| lhs(k) > d * (d + k) + c;
    let mut k = 0;
    while !(holds(k) && lhs(k + 1) - lhs(k) >= d) {
        k += 1;
    }
    while k > 0 && holds(k - 1) {
        k -= 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdcBound {
    pub d: usize,
    pub c: usize,
    pub n0: usize,
    pub n1: usize,
    /// `(d', n_{d'})` for `2 ≤ d' ≤ d`.
    pub branch_values: Vec<(usize, usize)>,
    pub f: usize,
}

impl FdcBound {
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "c": self.c,
            "n0": self.n0,
            "n1": self.n1,
            "branch_values": self
                .branch_values
                .iter()
                .map(|&(dp, v)| json!({"length": dp, "value": v}))
                .collect::<Vec<_>>(),
            "F": self.f,
        })
    }
}

pub fn fdc_bound(d: usize, c: usize) -> Result<FdcBound> {
    if d == 0 {
        return Err(Error::Precondition("F(d, c) needs d >= 1".into()));
    }
    let (dd, cc) = (d as u128, c as u128);
    let n0 = eventual_threshold(dd, cc, |k| choose(k + 1, 2)) as usize;
    let n1 = eventual_threshold(dd, cc, |k| (dd + 1) * k) as usize;
    let branch_values: Vec<(usize, usize)> = (2..=d)
        .map(|dp| {
            (
                dp,
                eventual_threshold(dd, cc, |k| choose(k, dp as u128)) as usize,
            )
        })
        .collect();
    let f = branch_values
        .iter()
        .map(|&(_, v)| v)
        .chain([n0, n1])
        .max()
        .unwrap_or(0);
    Ok(FdcBound {
        d,
        c,
        n0,
        n1,
        branch_values,
        f,
    })
}

/// `(d, c, dim X(K^d))` for a linear-type variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearTypeProfile {
    pub d: usize,
    pub c: usize,
    pub dim_at_d: usize,
}

impl LinearTypeProfile {
    pub fn to_json(&self) -> Value {
        json!({"d": self.d, "c": self.c, "dim_at_d": self.dim_at_d})
    }
}

/// Profile of a built-in variety. The determinantal families are images of
/// `(S¹)^d` alone, so `c = 0`; `d` is the number of vector parameters and
/// `dim_at_d` is the generic parametrization rank at `K^d`.
pub fn profile_for(x: &VarietySpec, seed: u64) -> Result<LinearTypeProfile> {
    let d = match x.family() {
        Family::MatricesRankLe { r } => 2 * r,
        Family::SymMatricesRankLe { r } => r,
        _ => {
            return Err(Error::Precondition(format!(
                "no linear-type profile is built in for {x}"
            )))
        }
    };
    Ok(LinearTypeProfile {
        d,
        c: 0,
        dim_at_d: generic_dimension_lower_bound(x, d, seed)?,
    })
}

pub fn dim_formula(profile: &LinearTypeProfile, n: usize) -> Result<usize> {
    if n < profile.d {
        return Err(Error::Precondition(format!(
            "dimension law needs n >= d = {}, got {n}",
            profile.d
        )));
    }
    Ok(profile.dim_at_d + profile.d * (n - profile.d))
}

/// `[I_m; 0]`, the inclusion `K^m → K^n` onto the first coordinates.
pub fn standard_inclusion(m: usize, n: usize) -> Result<RationalMatrix> {
    if m > n {
        return Err(Error::Precondition(format!(
            "cannot include K^{m} into K^{n}"
        )));
    }
    let mut phi = Matrix::zeros(n, m);
    for i in 0..m {
        phi.set(i, i, Rational::from_integer(1.into()));
    }
    Ok(phi)
}

/// Dimension of the Zariski tangent space of `X(K^n)` at the zero-padded
/// image of `p ∈ X(K^m)`.
pub fn tangent_dimension(x: &VarietySpec, p: &RationalPoint, n: usize) -> Result<usize> {
    tangent_dimension_along(x, p, &standard_inclusion(p.space().n(), n)?)
}

/// Same as [`tangent_dimension`] for an arbitrary injective `φ: K^m → K^n`.
pub fn tangent_dimension_along(
    x: &VarietySpec,
    p: &RationalPoint,
    phi: &RationalMatrix,
) -> Result<usize> {
    if crate::linalg::rank(phi) != phi.cols() {
        return Err(Error::NotInjective {
            rank: crate::linalg::rank(phi),
            cols: phi.cols(),
        });
    }
    let q = apply_map(p, phi)?;
    Ok(q.space().dim() - factored_jacobian_rank(x, &q)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Tangent dimension equals the variety dimension: `p` stays smooth.
    Equality,
    /// A positive gap that does not depend on `k` (degree-one tangent part
    /// of the same slope). Flagged since it only shows up through the range
    /// scanned.
    ConstantGap,
    Strict,
    Mixed,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Equality => "equality",
            Branch::ConstantGap => "constant_gap",
            Branch::Strict => "strict",
            Branch::Mixed => "mixed",
        }
    }

    fn classify(gaps: &[usize]) -> Branch {
        if gaps.iter().all(|&g| g == 0) {
            Branch::Equality
        } else if gaps.iter().all(|&g| g > 0) {
            if gaps.windows(2).all(|w| w[0] == w[1]) {
                Branch::ConstantGap
            } else {
                Branch::Strict
            }
        } else {
            Branch::Mixed
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyRow {
    pub k: usize,
    pub n: usize,
    pub tangent_dim: usize,
    pub formula_dim: usize,
}

impl DichotomyRow {
    pub fn gap(&self) -> usize {
        self.tangent_dim - self.formula_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyReport {
    pub profile: LinearTypeProfile,
    pub fdc: usize,
    pub rows: Vec<DichotomyRow>,
    pub branch: Branch,
    /// `Some(true)` when `p` is singular in `X(K^{d+F})`; `None` when
    /// `k_max < F`.
    pub singular_at_fdc: Option<bool>,
    /// Whether every `k ≥ F` in range sits on the same side of the dichotomy.
    pub consistent_beyond_fdc: Option<bool>,
    pub flagged: bool,
}

impl DichotomyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "profile": self.profile.to_json(),
            "F": self.fdc,
            "rows": self.rows.iter().map(|r| json!({
                "k": r.k,
                "n": r.n,
                "tangent_dim": r.tangent_dim,
                "formula_dim": r.formula_dim,
                "gap": r.gap(),
            })).collect::<Vec<_>>(),
            "branch": self.branch.as_str(),
            "singular_at_F": self.singular_at_fdc,
            "consistent_beyond_F": self.consistent_beyond_fdc,
            "flagged": self.flagged,
        })
    }
}

/// Compares the tangent dimension at `p ∈ X(K^d)`, viewed in `X(K^{d+k})`,
/// with the dimension law for `k = 0..=k_max`.
pub fn singular_dichotomy_check(
    x: &VarietySpec,
    profile: &LinearTypeProfile,
    p: &RationalPoint,
    k_max: usize,
) -> Result<DichotomyReport> {
    if p.space().n() != profile.d {
        return Err(Error::Precondition(format!(
            "point must live at K^d with d = {}",
            profile.d
        )));
    }
    if !x.contains_by_rank(p)? {
        return Err(Error::NotMember(x.to_string()));
    }
    let fdc = fdc_bound(profile.d, profile.c)?.f;
    let rows = (0..=k_max)
        .map(|k| {
            let n = profile.d + k;
            let tangent_dim = tangent_dimension(x, p, n)?;
            let formula_dim = dim_formula(profile, n)?;
            if tangent_dim < formula_dim {
                return Err(Error::Precondition(format!(
                    "tangent dimension {tangent_dim} below variety dimension {formula_dim} at n = {n}"
                )));
            }
            Ok(DichotomyRow {
                k,
                n,
                tangent_dim,
                formula_dim,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<usize> = rows.iter().map(DichotomyRow::gap).collect();
    let branch = Branch::classify(&gaps);
    let beyond: Vec<usize> = gaps.iter().skip(fdc).copied().collect();
    Ok(DichotomyReport {
        profile: *profile,
        fdc,
        singular_at_fdc: gaps.get(fdc).map(|&g| g > 0),
        consistent_beyond_fdc: (!beyond.is_empty())
            .then(|| beyond.iter().all(|&g| g > 0) || beyond.iter().all(|&g| g == 0)),
        flagged: branch == Branch::ConstantGap,
        rows,
        branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::injective_matrix;
    use crate::varieties::{is_singular, parse_variety, sample_rank_exact};

    fn var(s: &str) -> VarietySpec {
        parse_variety(s).unwrap()
    }

    #[test]
    fn fdc_examples() {
        let b = fdc_bound(1, 0).unwrap();
        assert_eq!((b.n0, b.n1, b.f), (3, 2, 3));
        assert!(b.branch_values.is_empty());
        let b = fdc_bound(2, 0).unwrap();
        assert_eq!((b.n0, b.n1, b.f), (5, 5, 7));
        assert_eq!(b.branch_values, vec![(2, 7)]);
        assert!(fdc_bound(0, 0).is_err());
    }

    #[test]
    fn n1_closed_form() {
        for d in 1..=5 {
            for c in 0..=5 {
                assert_eq!(fdc_bound(d, c).unwrap().n1, d * d + c + 1);
            }
        }
    }

    #[test]
    fn threshold_walks_back_past_certification_point() {
        // lhs = 3k against d = 1, c = 0: holds from k = 1 on, certified at 1.
        assert_eq!(eventual_threshold(1, 0, |k| 3 * k), 1);
        // Quadratic lhs only overtakes late.
        assert_eq!(eventual_threshold(2, 0, |k| choose(k + 1, 2)), 5);
    }

    #[test]
    fn dim_formula_examples() {
        for r in 1..=2 {
            let x = var(&format!("matrices_rank_le:r={r}"));
            let prof = profile_for(&x, 1).unwrap();
            assert_eq!(
                prof,
                LinearTypeProfile {
                    d: 2 * r,
                    c: 0,
                    dim_at_d: 3 * r * r
                }
            );
            for n in prof.d..=prof.d + 3 {
                assert_eq!(dim_formula(&prof, n).unwrap(), 2 * r * n - r * r);
                assert_eq!(
                    dim_formula(&prof, n).unwrap(),
                    generic_dimension_lower_bound(&x, n, 2).unwrap()
                );
            }
            assert!(dim_formula(&prof, prof.d - 1).is_err());
        }
        let s = var("sym_matrices_rank_le:r=2");
        let prof = profile_for(&s, 1).unwrap();
        assert_eq!(
            prof,
            LinearTypeProfile {
                d: 2,
                c: 0,
                dim_at_d: 3
            }
        );
        assert_eq!(dim_formula(&prof, 5).unwrap(), 2 * 5 - 1);
    }

    #[test]
    fn tangent_examples() {
        let x1 = var("matrices_rank_le:r=1");
        let e11 = x1
            .point_from_matrix(&Matrix::from_i64(2, 2, &[1, 0, 0, 0]).unwrap())
            .unwrap();
        assert_eq!(tangent_dimension(&x1, &e11, 3).unwrap(), 5);
        let zero = x1.point_from_matrix(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(tangent_dimension(&x1, &zero, 3).unwrap(), 9);
        let x2 = var("matrices_rank_le:r=2");
        let e11 = x2
            .point_from_matrix(&Matrix::from_i64(2, 2, &[1, 0, 0, 0]).unwrap())
            .unwrap();
        assert_eq!(tangent_dimension(&x2, &e11, 4).unwrap(), 16);
    }

    #[test]
    fn tangent_dimension_is_embedding_independent() {
        for name in ["matrices_rank_le:r=1", "sym_matrices_rank_le:r=2"] {
            let x = var(name);
            for seed in 0..6 {
                let p = sample_rank_exact(&x, 3, (seed % 2) as usize, seed).unwrap();
                let phi = injective_matrix(5, 3, seed).unwrap();
                assert_eq!(
                    tangent_dimension(&x, &p, 5).unwrap(),
                    tangent_dimension_along(&x, &p, &phi).unwrap()
                );
            }
        }
    }

    #[test]
    fn dichotomy_examples() {
        let x = var("matrices_rank_le:r=1");
        let prof = profile_for(&x, 1).unwrap();
        let p = sample_rank_exact(&x, 2, 1, 3).unwrap();
        let rep = singular_dichotomy_check(&x, &prof, &p, 8).unwrap();
        assert_eq!(rep.branch, Branch::Equality);
        assert_eq!(rep.singular_at_fdc, Some(false));
        let zero = sample_rank_exact(&x, 2, 0, 3).unwrap();
        let rep = singular_dichotomy_check(&x, &prof, &zero, 8).unwrap();
        assert_eq!(rep.branch, Branch::Strict);
        assert!(rep.rows[1..].iter().all(|r| r.gap() > 0));
        assert_eq!(rep.consistent_beyond_fdc, Some(true));

        let x2 = var("matrices_rank_le:r=2");
        let prof2 = profile_for(&x2, 1).unwrap();
        let p = x2
            .point_from_matrix(
                &Matrix::from_i64(4, 4, &[0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap(),
            )
            .unwrap();
        let rep = singular_dichotomy_check(&x2, &prof2, &p, 3).unwrap();
        assert_eq!(rep.branch, Branch::Equality);
        assert_eq!(rep.singular_at_fdc, None);
    }

    #[test]
    fn dichotomy_matches_jacobian_criterion() {
        let x = var("sym_matrices_rank_le:r=2");
        let prof = profile_for(&x, 1).unwrap();
        let fdc = fdc_bound(prof.d, prof.c).unwrap().f;
        for s in 0..=2 {
            let p = sample_rank_exact(&x, 2, s, 7).unwrap();
            let rep = singular_dichotomy_check(&x, &prof, &p, fdc).unwrap();
            let embedded = apply_map(&p, &standard_inclusion(2, 4).unwrap()).unwrap();
            assert_eq!(
                rep.singular_at_fdc,
                Some(is_singular(&x, &embedded).unwrap().is_singular)
            );
        }
    }
}
