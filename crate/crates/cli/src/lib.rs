//! Command-line front end for `vecvar`.
//!
//! Every subcommand prints one JSON document
//! `{"status": "ok" | "error", "payload": …, "diagnostics": […]}` with
//! sorted keys. Exit codes: 0 on success, 1 on a domain error, 2 on a usage
//! error.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use vecvar::io::{
    functor_to_json, matrix_from_json, matrix_to_json, parse_functor, point_from_json,
    point_to_json, rational_to_json, vector_to_json,
};
use vecvar::linalg::{kernel_basis, rank, rref};
use vecvar::linear_type::{
    dim_formula, fdc_bound, profile_for, singular_dichotomy_check, standard_inclusion,
    tangent_dimension,
};
use vecvar::partitions::{
    lr_coefficient, partitions_up_to, schur_dimension, ssyt_count, DEFAULT_SSYT_CAP,
};
use vecvar::polyfun::DEFAULT_DEGREE_CAP;
use vecvar::resolution::{canonicalize, fiber_probe, local_inverse, rho, sample_omega, OmegaPoint};
use vecvar::tensor::{apply_map, flattening, minimal_subspace, subspace_variety_member};
use vecvar::varieties::{
    generic_dimension_lower_bound, is_member, is_singular, jacobian_at, parametrize_sample,
    parse_variety, sample_rank_exact, verify_sing_locus_determinantal, VarietySpec,
};
use vecvar::{Error, Partition, PolynomialFunctor, RationalMatrix, RationalPoint};

#[derive(Parser, Debug)]
#[command(
    name = "vecvar",
    version,
    about = "Exact computations with polynomial functors and Vec-varieties"
)]
pub struct Cli {
    /// Write the result document to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Littlewood-Richardson coefficient N_{mu nu lambda}.
    Lrcoef {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// dim S_lambda(K^n), or a table over all partitions up to a size.
    Schurdim(SchurdimArgs),
    /// Dimension polynomial, degree and homogeneous parts of a functor.
    Dimpoly {
        #[arg(long)]
        functor: String,
        /// Also report the degree-i homogeneous component.
        #[arg(long)]
        component: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        cap: usize,
    },
    /// Schur decomposition of the shift V -> P(K^u + V).
    Shift {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        u: usize,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        cap: usize,
    },
    /// Whether Q precedes P in the well-founded order, and whether Q is a subobject of P.
    Precedes {
        #[arg(long)]
        q: String,
        #[arg(long)]
        p: String,
    },
    /// Minimal defining subspace of a tensor point.
    Minsub {
        #[command(flatten)]
        point: PointArg,
        /// Apply this n' x n matrix first (JSON array of rows, a file, or -).
        #[arg(long)]
        map: Option<String>,
        /// Also report the flattening at ATOM,LEG (0-based atom, 1-based leg).
        #[arg(long, value_name = "ATOM,LEG")]
        flattening: Option<String>,
        /// Test membership in the subspace variety of dimension D.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Evaluate the defining equations at a point.
    Member {
        #[arg(long)]
        variety: String,
        #[command(flatten)]
        point: PointArg,
    },
    /// Jacobian-criterion singularity test.
    Singular {
        #[arg(long)]
        variety: String,
        #[command(flatten)]
        point: PointArg,
        /// Include the Jacobian matrix and its reduced row echelon form.
        #[arg(long)]
        jacobian: bool,
        /// Include a basis of the Zariski tangent space.
        #[arg(long)]
        tangent_basis: bool,
    },
    /// Sample the singular-locus law for rank-<= r matrices.
    VerifySing {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Omit per-sample records from the payload.
        #[arg(long)]
        summary: bool,
    },
    /// The stability bound F(d, c).
    Fdc {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        c: usize,
    },
    /// Dimension of X(K^n): closed-form law, linear-type formula and generic rank.
    Dimlaw {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Tangent dimension against the dimension law for a point of X(K^d).
    Dichotomy {
        #[arg(long)]
        variety: String,
        #[command(flatten)]
        point: OptPointArg,
        /// Sample a point of this rank instead of reading one.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest k to scan; defaults to F(d, c).
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Local inverse of the resolution at a point.
    Resolve {
        #[arg(long, alias = "family")]
        variety: String,
        #[command(flatten)]
        point: PointArg,
        /// Ambient dimension; checked against the point when given.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Canonical form of a resolution point and its image.
    Invert {
        #[arg(long, alias = "family")]
        variety: String,
        /// OmegaPoint JSON (inline, a file, or -).
        #[arg(long)]
        omega: String,
    },
    /// Search for distinct preimages of a point under the resolution.
    Fiber {
        #[arg(long, alias = "family")]
        variety: String,
        #[command(flatten)]
        point: PointArg,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Seeded sample points.
    Sample {
        #[arg(long)]
        variety: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Sample a matrix of exactly this rank (determinantal families).
        #[arg(long)]
        rank: Option<usize>,
        /// Sample a point of the resolution space instead.
        #[arg(long, conflicts_with = "rank")]
        omega: bool,
    },
}

#[derive(Args, Debug)]
pub struct SchurdimArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    n: usize,
    /// Cross-check against the tableau-count oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_SSYT_CAP)]
    oracle_cap: usize,
    /// Table mode: every partition of size at most this.
    #[arg(long, conflicts_with = "lambda")]
    max_size: Option<usize>,
    #[arg(long, requires = "max_size")]
    max_length: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PointArg {
    /// TensorPoint JSON (inline, a file, or -).
    #[arg(long, conflicts_with = "matrix")]
    point: Option<String>,
    /// Square matrix shortcut for the determinantal families.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args, Debug)]
pub struct OptPointArg {
    #[arg(long, conflicts_with_all = ["matrix", "rank"])]
    point: Option<String>,
    #[arg(long, conflicts_with = "rank")]
    matrix: Option<String>,
}

/// What a run produced: the exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let (code, document) = match execute(&cli.command) {
        Ok(payload) => (
            0,
            json!({"status": "ok", "payload": payload, "diagnostics": []}),
        ),
        Err(e) => (
            1,
            json!({"status": "error", "payload": null, "diagnostics": [e.to_string()]}),
        ),
    };
    let text = serde_json::to_string_pretty(&document).expect("JSON values serialize") + "\n";
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: 1,
                stdout: String::new(),
                stderr: format!("cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}

type CliResult<T> = std::result::Result<T, Error>;

/// Inline JSON, `-` for standard input, or a file path.
fn read_source(arg: &str) -> CliResult<String> {
    let t = arg.trim();
    if t == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("reading stdin: {e}")))?;
        Ok(s)
    } else if t.starts_with('{') || t.starts_with('[') {
        Ok(t.to_string())
    } else {
        std::fs::read_to_string(t).map_err(|e| Error::Parse(format!("reading {t}: {e}")))
    }
}

fn read_json(arg: &str) -> CliResult<Value> {
    serde_json::from_str(&read_source(arg)?).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a JSON input that may also be a whole result document written by
/// an earlier command; in that case the payload (or its `key` field) is used.
fn read_input(arg: &str, key: &str) -> CliResult<Value> {
    let v = read_json(arg)?;
    match (v.get("status"), v.get("payload")) {
        (Some(_), Some(payload)) => Ok(payload.get(key).unwrap_or(payload).clone()),
        _ => Ok(v),
    }
}

fn read_matrix(arg: &str) -> CliResult<RationalMatrix> {
    matrix_from_json(&read_json(arg)?, 0)
}

fn read_functor(arg: &str) -> CliResult<PolynomialFunctor> {
    if arg.trim() == "-" {
        parse_functor(&read_source(arg)?)
    } else {
        parse_functor(arg)
    }
}

fn partition(s: &str) -> CliResult<Partition> {
    s.parse()
}

fn resolve_point(
    point: Option<&String>,
    matrix: Option<&String>,
    variety: Option<&VarietySpec>,
) -> CliResult<Option<RationalPoint>> {
    match (point, matrix) {
        (Some(p), _) => Ok(Some(point_from_json(&read_input(p, "point")?)?)),
        (None, Some(m)) => {
            let x =
                variety.ok_or_else(|| Error::Precondition("--matrix needs --variety".into()))?;
            Ok(Some(x.point_from_matrix(&read_matrix(m)?)?))
        }
        (None, None) => Ok(None),
    }
}

fn required_point(arg: &PointArg, variety: Option<&VarietySpec>) -> CliResult<RationalPoint> {
    resolve_point(arg.point.as_ref(), arg.matrix.as_ref(), variety)?
        .ok_or_else(|| Error::Precondition("a point is required (--point or --matrix)".into()))
}

fn basis_json(basis: &[Vec<vecvar::Rational>]) -> Value {
    Value::Array(basis.iter().map(|v| vector_to_json(v)).collect())
}

fn functor_json(p: &PolynomialFunctor) -> Value {
    json!({"functor": functor_to_json(p), "text": p.to_string()})
}

fn execute(command: &Command) -> CliResult<Value> {
    match command {
        Command::Lrcoef { mu, nu, lambda } => Ok(json!({
            "coefficient": lr_coefficient(&partition(mu)?, &partition(nu)?, &partition(lambda)?),
        })),
        Command::Schurdim(a) => schurdim(a),
        Command::Dimpoly {
            functor,
            component,
            cap,
        } => {
            let p = read_functor(functor)?;
            let poly = p.dimension_polynomial_capped(*cap)?;
            let mut out = json!({
                "degree": p.degree().to_string(),
                "is_pure": p.is_pure(),
                "coefficients": poly.coefficients().iter().map(rational_to_json).collect::<Vec<_>>(),
                "polynomial": poly.to_string(),
            });
            if let Some(i) = component {
                out["component"] = functor_json(&p.homogeneous_component(*i));
            }
            Ok(out)
        }
        Command::Shift { functor, u, cap } => Ok(functor_json(
            &read_functor(functor)?.shift_capped(*u, *cap)?,
        )),
        Command::Precedes { q, p } => {
            let (q, p) = (read_functor(q)?, read_functor(p)?);
            Ok(json!({"precedes": q.precedes(&p), "is_subobject": q.is_subobject(&p)}))
        }
        Command::Minsub {
            point,
            map,
            flattening: flat,
            d,
        } => {
            let mut p = required_point(point, None)?;
            let mut out = json!({});
            if let Some(m) = map {
                p = apply_map(&p, &read_matrix(m)?)?;
                out["image"] = point_to_json(&p);
            }
            let basis = minimal_subspace(&p)?;
            out["dim"] = json!(basis.len());
            out["basis"] = basis_json(&basis);
            if let Some(spec) = flat {
                let (atom, leg) = spec
                    .split_once(',')
                    .and_then(|(a, l)| Some((a.trim().parse().ok()?, l.trim().parse().ok()?)))
                    .ok_or_else(|| Error::Parse(format!("expected ATOM,LEG, got {spec:?}")))?;
                out["flattening"] = matrix_to_json(&flattening(&p, atom, leg)?);
            }
            if let Some(d) = d {
                out["subspace_variety_member"] = json!(subspace_variety_member(&p, *d)?);
            }
            Ok(out)
        }
        Command::Member { variety, point } => {
            let x = parse_variety(variety)?;
            let p = required_point(point, Some(&x))?;
            Ok(json!({"variety": x.to_string(), "is_member": is_member(&x, &p)?}))
        }
        Command::Singular {
            variety,
            point,
            jacobian,
            tangent_basis,
        } => {
            let x = parse_variety(variety)?;
            let p = required_point(point, Some(&x))?;
            let mut out = is_singular(&x, &p)?.to_json();
            if *jacobian || *tangent_basis {
                let j = jacobian_at(&x, &p)?;
                if *jacobian {
                    out["jacobian"] = matrix_to_json(&j);
                    let reduced = rref(&j);
                    out["jacobian_rref"] =
                        matrix_to_json(&reduced.select_rows(&(0..rank(&j)).collect::<Vec<_>>()));
                }
                if *tangent_basis {
                    out["tangent_basis"] = basis_json(&kernel_basis(&j));
                }
            }
            Ok(out)
        }
        Command::VerifySing {
            r,
            n,
            samples,
            seed,
            summary,
        } => {
            let report = verify_sing_locus_determinantal(*r, *n, *samples, *seed)?;
            let mut out = report.to_json();
            if *summary {
                out.as_object_mut().expect("object").remove("samples");
            }
            Ok(out)
        }
        Command::Fdc { d, c } => Ok(fdc_bound(*d, *c)?.to_json()),
        Command::Dimlaw { variety, n, seed } => {
            let x = parse_variety(variety)?;
            let mut out = json!({
                "variety": x.to_string(),
                "n": n,
                "dim_law": x.dim_law(*n),
                "generic_rank": generic_dimension_lower_bound(&x, *n, *seed)?,
            });
            if let Ok(profile) = profile_for(&x, *seed) {
                out["profile"] = profile.to_json();
                out["dim_formula"] = dim_formula(&profile, *n).map_or(Value::Null, |v| json!(v));
            }
            Ok(out)
        }
        Command::Dichotomy {
            variety,
            point,
            rank: sample_rank,
            seed,
            k_max,
        } => {
            let x = parse_variety(variety)?;
            let profile = profile_for(&x, seed.unwrap_or(0))?;
            let p = match (
                resolve_point(point.point.as_ref(), point.matrix.as_ref(), Some(&x))?,
                sample_rank,
            ) {
                (Some(p), _) => p,
                (None, Some(s)) => {
                    let seed =
                        seed.ok_or_else(|| Error::Precondition("--rank needs --seed".into()))?;
                    sample_rank_exact(&x, profile.d, *s, seed)?
                }
                (None, None) => {
                    return Err(Error::Precondition(
                        "give --point, --matrix or --rank".into(),
                    ))
                }
            };
            let k_max = match k_max {
                Some(k) => *k,
                None => fdc_bound(profile.d, profile.c)?.f,
            };
            let mut out = singular_dichotomy_check(&x, &profile, &p, k_max)?.to_json();
            out["point"] = point_to_json(&p);
            let at_2d = apply_map(&p, &standard_inclusion(profile.d, 2 * profile.d)?)?;
            out["tangent_dim_at_2d"] = json!(tangent_dimension(&x, &p, 2 * profile.d)?);
            out["singular_at_2d"] = json!(is_singular(&x, &at_2d)?.is_singular);
            Ok(out)
        }
        Command::Resolve { variety, point, n } => {
            let x = parse_variety(variety)?;
            let p = required_point(point, Some(&x))?;
            if let Some(n) = n {
                if p.space().n() != *n {
                    return Err(Error::ShapeMismatch(format!(
                        "point lives at n = {}, not {n}",
                        p.space().n()
                    )));
                }
            }
            Ok(local_inverse(&x, &p)?.to_json())
        }
        Command::Invert { variety, omega } => {
            let x = parse_variety(variety)?;
            let raw = OmegaPoint::from_json(&read_input(omega, "omega")?)?;
            let canonical = canonicalize(&x, &raw.phi, &raw.z)?;
            Ok(json!({
                "omega": canonical.to_json(),
                "image": point_to_json(&rho(&x, &canonical)?),
            }))
        }
        Command::Fiber {
            variety,
            point,
            trials,
            seed,
        } => {
            let x = parse_variety(variety)?;
            let p = required_point(point, Some(&x))?;
            Ok(fiber_probe(&x, &p, *trials, *seed)?.to_json())
        }
        Command::Sample {
            variety,
            n,
            seed,
            rank: sample_rank,
            omega,
        } => {
            let x = parse_variety(variety)?;
            if *omega {
                let w = sample_omega(&x, *n, *seed)?;
                return Ok(json!({"omega": w.to_json(), "image": point_to_json(&rho(&x, &w)?)}));
            }
            let p = match sample_rank {
                Some(s) => sample_rank_exact(&x, *n, *s, *seed)?,
                None => parametrize_sample(&x, *n, *seed)?,
            };
            Ok(json!({"point": point_to_json(&p)}))
        }
    }
}

fn schurdim(a: &SchurdimArgs) -> CliResult<Value> {
    let row = |lambda: &Partition| -> CliResult<Value> {
        let dim = schur_dimension(lambda, a.n);
        let mut v =
            json!({"partition": lambda.to_string(), "n": a.n, "dimension": dim.to_string()});
        if a.oracle {
            let count = ssyt_count(lambda, a.n, a.oracle_cap)?;
            v["oracle"] = json!(count.to_string());
            v["agrees"] = json!(count == dim);
        }
        Ok(v)
    };
    match (&a.lambda, a.max_size) {
        (Some(l), _) => row(&partition(l)?),
        (None, Some(size)) => {
            let rows = partitions_up_to(size, a.max_length.unwrap_or(size))
                .iter()
                .map(row)
                .collect::<CliResult<Vec<_>>>()?;
            Ok(json!({"rows": rows}))
        }
        (None, None) => Err(Error::Precondition("give --lambda or --max-size".into())),
    }
}
