//! Weak resolutions `ρ: Ω(K^n) → X(K^n)` for the determinantal families.
//!
//! A point of `Ω` is an injective `φ: K^d → K^n` together with a point `z`
//! of a smooth model `Z` over `X(K^d)`, taken up to the `GL_d` action
//! `(φ, z) ~ (φg, g⁻¹z)`. Orbits are represented by the unique `φ` in
//! reduced column echelon form.
//!
//! * `matrices_rank_le(r)`: `d = 2r` and `Z = {(p, U, W) : p ∈ U ⊗ W}` with
//!   `U, W ⊂ K^d` of dimension `r`.
//! * `sym_matrices_rank_le(r)`: `d = r` and `Z = S²(K^r)`.
//!
//! `ρ(φ, z) = T(φ)(p)` where `p` is the tensor part of `z`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{matrix_from_json, matrix_to_json, point_from_json, point_to_json};
use crate::linalg::{column_echelon_with_pivots, rank, rref, Matrix};
use crate::sampling::{derive_seed, injective_matrix, rng, small_matrix};
use crate::tensor::{apply_map, minimal_subspace};
use crate::varieties::{Family, VarietySpec};
use crate::{Rational, RationalMatrix, RationalPoint};

/// The resolution-space component of an [`OmegaPoint`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZPoint {
    /// `p0 ∈ U ⊗ W`; `U` and `W` are stored as `r × d` row bases in RREF.
    Incidence {
        p0: RationalPoint,
        u_basis: RationalMatrix,
        w_basis: RationalMatrix,
    },
    Symmetric {
        p0: RationalPoint,
    },
}

impl ZPoint {
    pub fn p0(&self) -> &RationalPoint {
        match self {
            ZPoint::Incidence { p0, .. } | ZPoint::Symmetric { p0 } => p0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaPoint {
    pub phi: RationalMatrix,
    pub z: ZPoint,
}

impl OmegaPoint {
    pub fn to_json(&self) -> Value {
        let z = match &self.z {
            ZPoint::Incidence {
                p0,
                u_basis,
                w_basis,
            } => json!({
                "kind": "incidence",
                "p0": point_to_json(p0),
                "u_basis": matrix_to_json(u_basis),
                "w_basis": matrix_to_json(w_basis),
            }),
            ZPoint::Symmetric { p0 } => json!({"kind": "symmetric", "p0": point_to_json(p0)}),
        };
        json!({"phi": matrix_to_json(&self.phi), "z": z})
    }

    /// Reads the JSON produced by [`OmegaPoint::to_json`]. The result is not
    /// validated; pass it through [`canonicalize`] before use.
    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |v: &Value, k: &str| -> Result<Value> {
            v.get(k)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("missing field {k:?}")))
        };
        let z = field(v, "z")?;
        let p0 = point_from_json(&field(&z, "p0")?)?;
        let d = p0.space().n();
        let phi = matrix_from_json(&field(v, "phi")?, d)?;
        let z = match z.get("kind").and_then(Value::as_str) {
            Some("incidence") => ZPoint::Incidence {
                u_basis: matrix_from_json(&field(&z, "u_basis")?, d)?,
                w_basis: matrix_from_json(&field(&z, "w_basis")?, d)?,
                p0,
            },
            Some("symmetric") => ZPoint::Symmetric { p0 },
            other => return Err(Error::Parse(format!("unknown z kind {other:?}"))),
        };
        Ok(OmegaPoint { phi, z })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Model {
    r: usize,
    d: usize,
    symmetric: bool,
}

fn model(x: &VarietySpec) -> Result<Model> {
    match x.family() {
        Family::MatricesRankLe { r } => Ok(Model {
            r,
            d: 2 * r,
            symmetric: false,
        }),
        Family::SymMatricesRankLe { r } => Ok(Model {
            r,
            d: r,
            symmetric: true,
        }),
        _ => Err(Error::Precondition(format!("no resolution model for {x}"))),
    }
}

/// Resolution dimension `d` of a determinantal family.
pub fn resolution_dim(x: &VarietySpec) -> Result<usize> {
    Ok(model(x)?.d)
}

fn rref_rows(m: &RationalMatrix) -> RationalMatrix {
    let k = rank(m);
    rref(m).select_rows(&(0..k).collect::<Vec<_>>())
}

fn span_contains(basis: &RationalMatrix, vectors: &RationalMatrix) -> bool {
    let stacked = Matrix::from_rows(
        basis
            .row_vectors()
            .into_iter()
            .chain(vectors.row_vectors())
            .collect(),
        basis.cols(),
    )
    .expect("equal widths");
    rank(&stacked) == rank(basis)
}

fn check_z(x: &VarietySpec, m: Model, z: &ZPoint) -> Result<()> {
    let p0 = z.p0();
    if p0.space() != &x.ambient(m.d) {
        return Err(Error::ShapeMismatch(format!(
            "z must live in the ambient space of {x} at K^{}",
            m.d
        )));
    }
    let m0 = x.matrix_view(p0)?;
    match (z, m.symmetric) {
        (
            ZPoint::Incidence {
                u_basis, w_basis, ..
            },
            false,
        ) => {
            for b in [u_basis, w_basis] {
                if b.rows() != m.r || b.cols() != m.d || rank(b) != m.r {
                    return Err(Error::Precondition(format!(
                        "U and W need {} independent vectors in K^{}",
                        m.r, m.d
                    )));
                }
            }
            if !span_contains(u_basis, &m0.transpose()) || !span_contains(w_basis, &m0) {
                return Err(Error::Precondition("p0 does not lie in U ⊗ W".into()));
            }
            Ok(())
        }
        (ZPoint::Symmetric { .. }, true) => {
            if rank(&m0) > m.r {
                return Err(Error::NotMember(x.to_string()));
            }
            Ok(())
        }
        _ => Err(Error::Precondition(format!("wrong kind of z for {x}"))),
    }
}

/// Brings `φ` to reduced column echelon form `φg` and transports `z` to
/// `g⁻¹z`, so that `ρ` is unchanged. With `S` the pivot rows, `g⁻¹ = φ_S`;
/// it acts on `p0` through the functor and on the row bases of `U`, `W` by
/// `u ↦ φ_S u`, that is `U_basis ↦ U_basis · φ_Sᵀ`.
pub fn canonicalize(x: &VarietySpec, phi: &RationalMatrix, z: &ZPoint) -> Result<OmegaPoint> {
    let m = model(x)?;
    if phi.cols() != m.d {
        return Err(Error::ShapeMismatch(format!(
            "phi must have {} columns",
            m.d
        )));
    }
    check_z(x, m, z)?;
    let (canonical, pivots) = column_echelon_with_pivots(phi)?;
    let g_inv = phi.select_rows(&pivots);
    let p0 = apply_map(z.p0(), &g_inv)?;
    let z = match z {
        ZPoint::Incidence {
            u_basis, w_basis, ..
        } => ZPoint::Incidence {
            p0,
            u_basis: rref_rows(&u_basis.mul(&g_inv.transpose())?),
            w_basis: rref_rows(&w_basis.mul(&g_inv.transpose())?),
        },
        ZPoint::Symmetric { .. } => ZPoint::Symmetric { p0 },
    };
    Ok(OmegaPoint { phi: canonical, z })
}

/// `ρ(φ, z) = T(φ)(p0)`, membership-checked.
pub fn rho(x: &VarietySpec, omega: &OmegaPoint) -> Result<RationalPoint> {
    let m = model(x)?;
    check_z(x, m, &omega.z)?;
    let p = apply_map(omega.z.p0(), &omega.phi)?;
    if !x.contains_by_rank(&p)? {
        return Err(Error::NotMember(x.to_string()));
    }
    Ok(p)
}

/// `(ψφ, z)` re-canonicalized, for injective `ψ: K^n → K^m`.
pub fn push(x: &VarietySpec, omega: &OmegaPoint, psi: &RationalMatrix) -> Result<OmegaPoint> {
    canonicalize(x, &psi.mul(&omega.phi)?, &omega.z)
}

fn columns_matrix(basis: &[Vec<Rational>], n: usize) -> Result<RationalMatrix> {
    Matrix::from_columns(basis, n)
}

/// `z` for the point `p0 = σ(p)` at `K^d`, with `U`, `W` its exact column
/// and row spaces (full rank case).
fn exact_z(x: &VarietySpec, m: Model, p0: RationalPoint) -> Result<ZPoint> {
    if m.symmetric {
        return Ok(ZPoint::Symmetric { p0 });
    }
    let m0 = x.matrix_view(&p0)?;
    Ok(ZPoint::Incidence {
        u_basis: rref_rows(&m0.transpose()),
        w_basis: rref_rows(&m0),
        p0,
    })
}

/// The explicit inverse of `ρ` over the locus where `rank p = r` and
/// `dim U_p = d`. `φ_p` spans `U_p` and is the identity on the
/// lexicographically first coordinate `d`-subset `S` on which `U_p`
/// projects isomorphically; `z` comes from projecting `p` onto `S`.
pub fn local_inverse(x: &VarietySpec, p: &RationalPoint) -> Result<OmegaPoint> {
    let m = model(x)?;
    let n = p.space().n();
    let mat = x.matrix_view(p)?;
    let s = rank(&mat);
    if s != m.r {
        return Err(Error::OutsideIsomorphismLocus(format!(
            "rank {s} differs from r = {}",
            m.r
        )));
    }
    let up = minimal_subspace(p)?;
    if up.len() != m.d {
        return Err(Error::OutsideIsomorphismLocus(format!(
            "minimal subspace has dimension {}, expected {}",
            up.len(),
            m.d
        )));
    }
    let (phi, pivots) = column_echelon_with_pivots(&columns_matrix(&up, n)?)?;
    let sigma = Matrix::identity(n).select_rows(&pivots);
    let p0 = apply_map(p, &sigma)?;
    Ok(OmegaPoint {
        phi,
        z: exact_z(x, m, p0)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub target: RationalPoint,
    pub preimages_found: Vec<OmegaPoint>,
    pub distinct: bool,
}

impl FiberReport {
    pub fn to_json(&self) -> Value {
        json!({
            "target": point_to_json(&self.target),
            "preimages_found": self.preimages_found.iter().map(OmegaPoint::to_json).collect::<Vec<_>>(),
            "preimage_count": self.preimages_found.len(),
            "distinct": self.distinct,
        })
    }
}

/// Extends the rows of `basis` (`k × dim`, independent) to `target`
/// independent rows with seeded random vectors.
fn complete_rows(basis: &RationalMatrix, target: usize, seed: u64) -> Result<RationalMatrix> {
    let dim = basis.cols();
    for attempt in 0..crate::sampling::MAX_RETRIES {
        let extra = small_matrix(
            &mut rng(seed.wrapping_add(attempt)),
            target - basis.rows(),
            dim,
        );
        let rows: Vec<Vec<Rational>> = basis
            .row_vectors()
            .into_iter()
            .chain(extra.row_vectors())
            .collect();
        let full = Matrix::from_rows(rows, dim)?;
        if rank(&full) == target {
            return Ok(full);
        }
    }
    Err(Error::Sampling(format!(
        "could not complete a basis to dimension {target}"
    )))
}

/// Seeded search for distinct canonical preimages of `p ∈ X(K^n)`. Each
/// trial completes `U_p` to a random `d`-dimensional space, and for the
/// incidence model completes the column and row spaces of the projected
/// point to random `r`-dimensional `U`, `W`.
pub fn fiber_probe(
    x: &VarietySpec,
    p: &RationalPoint,
    trials: usize,
    seed: u64,
) -> Result<FiberReport> {
    let m = model(x)?;
    let n = p.space().n();
    if n < m.d {
        return Err(Error::Precondition(format!("need n >= d = {}", m.d)));
    }
    if !x.contains_by_rank(p)? {
        return Err(Error::NotMember(x.to_string()));
    }
    let up = minimal_subspace(p)?;
    let up_rows = Matrix::from_rows(up, n)?;
    let mut found: BTreeMap<String, OmegaPoint> = BTreeMap::new();
    for t in 0..trials {
        let trial_seed = derive_seed(seed, &[t as u64]);
        let b = complete_rows(&up_rows, m.d, derive_seed(trial_seed, &[0]))?;
        let (phi, pivots) = column_echelon_with_pivots(&b.transpose())?;
        let sigma = Matrix::identity(n).select_rows(&pivots);
        let p0 = apply_map(p, &sigma)?;
        let z = if m.symmetric {
            ZPoint::Symmetric { p0 }
        } else {
            let m0 = x.matrix_view(&p0)?;
            let u = complete_rows(
                &rref_rows(&m0.transpose()),
                m.r,
                derive_seed(trial_seed, &[1]),
            )?;
            let w = complete_rows(&rref_rows(&m0), m.r, derive_seed(trial_seed, &[2]))?;
            ZPoint::Incidence {
                p0,
                u_basis: rref_rows(&u),
                w_basis: rref_rows(&w),
            }
        };
        let omega = canonicalize(x, &phi, &z)?;
        if &rho(x, &omega)? != p {
            return Err(Error::Precondition(
                "constructed preimage does not map back".into(),
            ));
        }
        found.entry(omega.to_json().to_string()).or_insert(omega);
    }
    let preimages_found: Vec<OmegaPoint> = found.into_values().collect();
    Ok(FiberReport {
        target: p.clone(),
        distinct: preimages_found.len() >= 2,
        preimages_found,
    })
}

/// A seeded canonical point of `Ω(K^n)` with `rank p0 = r` and
/// `U_{p0} = K^d`, so its image lies in the isomorphism locus whenever
/// `φ` is injective.
pub fn sample_omega(x: &VarietySpec, n: usize, seed: u64) -> Result<OmegaPoint> {
    let m = model(x)?;
    if n < m.d {
        return Err(Error::Precondition(format!("need n >= d = {}", m.d)));
    }
    let phi = injective_matrix(n, m.d, derive_seed(seed, &[0]))?;
    let z = if m.symmetric {
        let p0 = crate::varieties::sample_rank_exact(x, m.d, m.r, derive_seed(seed, &[1]))?;
        ZPoint::Symmetric { p0 }
    } else {
        let u = injective_matrix(m.d, m.r, derive_seed(seed, &[1]))?.transpose();
        let w = injective_matrix(m.d, m.r, derive_seed(seed, &[2]))?.transpose();
        let core = crate::sampling::invertible_matrix(m.r, derive_seed(seed, &[3]))?;
        let m0 = u.transpose().mul(&core)?.mul(&w)?;
        ZPoint::Incidence {
            p0: x.point_from_matrix(&m0)?,
            u_basis: rref_rows(&u),
            w_basis: rref_rows(&w),
        }
    };
    canonicalize(x, &phi, &z)
}
