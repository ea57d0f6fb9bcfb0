//! Acceptance suite: one PASS/FAIL line per criterion. The process exits
//! nonzero when a criterion fails that is not listed in `UNATTAINABLE`.
//! Run with `cargo test -p vecvar --test acceptance`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use vecvar::linalg::{rank, Matrix};
use vecvar::linear_type::{fdc_bound, profile_for, singular_dichotomy_check, standard_inclusion};
use vecvar::partitions::{lr_coefficient, partitions_up_to, schur_dimension};
use vecvar::resolution::{fiber_probe, local_inverse, resolution_dim, rho, sample_omega};
use vecvar::sampling::{derive_seed, injective_matrix, rng, small_vector};
use vecvar::tensor::{apply_map, minimal_subspace, subspace_variety_member};
use vecvar::varieties::{
    generic_dimension_lower_bound, is_singular, parametrize_sample, parse_variety,
    sample_rank_exact, verify_sing_locus_determinantal,
};
use vecvar::{
    Atom, Partition, PolynomialFunctor, Rational, RationalPoint, SpaceDescriptor, TensorPoint,
};

/// Wall-clock budget for the two timed criteria.
const TIME_BUDGET: Duration = Duration::from_secs(60);
/// Samples per configuration in the singular-locus law.
const SING_SAMPLES: usize = 100;
/// Round-trip samples per family.
const ROUND_TRIP_SAMPLES: usize = 100;
/// Functoriality pairs per atom type.
const FUNCTORIALITY_PAIRS: u64 = 50;
/// Border-rank-2 seeds and the minimum number attaining the generic value.
const BORDER_SEEDS: u64 = 50;
const BORDER_GENERIC_MIN: usize = 45;
/// Validity window above each branch threshold.
const FDC_WINDOW: u128 = 20;
/// Points per determinantal family in the dichotomy check.
const DICHOTOMY_POINTS: u64 = 50;

/// Criteria whose literal statement cannot hold. Number 7 asks for a
/// six-dimensional minimal subspace inside K^5. These still run and print
/// FAIL; they do not fail the test target.
const UNATTAINABLE: &[usize] = &[7];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Branch = (String, u128, Box<dyn Fn(u128) -> u128>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lr_dimension_identity() -> Outcome {
    let start = Instant::now();
    let parts = partitions_up_to(6, 6);
    let mut checked = 0;
    for lambda in &parts {
        for a in 1..=3 {
            for b in 1..=3 {
                let mut sum: u128 = 0;
                for mu in parts.iter().filter(|m| m.size() <= lambda.size()) {
                    for nu in parts
                        .iter()
                        .filter(|n| n.size() + mu.size() == lambda.size())
                    {
                        let c = lr_coefficient(mu, nu, lambda) as u128;
                        if c > 0 {
                            sum += c * schur_dimension(mu, a) * schur_dimension(nu, b);
                        }
                    }
                }
                let lhs = schur_dimension(lambda, a + b);
                check(lhs == sum, || {
                    format!("λ={lambda} a={a} b={b}: {lhs} != {sum}")
                })?;
                checked += 1;
            }
        }
    }
    let t = start.elapsed();
    check(t < TIME_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{checked} identities, {t:.2?}"))
}

fn shift_of_tensor_square() -> Outcome {
    let t2 = PolynomialFunctor::tensor_square();
    for u in 1..=3u128 {
        let s = t2.shift(u as usize).map_err(|e| e.to_string())?;
        let mut expected = PolynomialFunctor::constant(u * u);
        expected.add(Partition::row(1), 2 * u);
        expected.add(Partition::row(2), 1);
        expected.add(Partition::column(2), 1);
        check(s == expected, || format!("u={u}: got {s}"))?;
    }
    Ok("u = 1, 2, 3".into())
}

fn singular_locus_law() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for (r, n) in [(1, 2), (1, 3), (2, 3), (2, 4)] {
        let rep =
            verify_sing_locus_determinantal(r, n, SING_SAMPLES, 1).map_err(|e| e.to_string())?;
        check(rep.passed, || {
            format!(
                "(r={r}, n={n}): {} misclassified",
                rep.counterexamples.len()
            )
        })?;
        total += rep.samples.len();
    }
    let t = start.elapsed();
    check(t < TIME_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{total} samples, 0 misclassified, {t:.2?}"))
}

fn dimension_law() -> Outcome {
    for r in 1..=2 {
        let x = parse_variety(&format!("matrices_rank_le:r={r}")).unwrap();
        for n in r..=5 {
            for seed in 1..=5 {
                let got = generic_dimension_lower_bound(&x, n, seed).map_err(|e| e.to_string())?;
                let want = 2 * r * n - r * r;
                check(got == want, || {
                    format!("r={r} n={n} seed={seed}: {got} != {want}")
                })?;
            }
        }
    }
    Ok("r ∈ {1,2}, n ∈ {r..5}, seeds 1..5".into())
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Independent scan: the threshold is one past the last failure in a range
/// much larger than any threshold that can occur for the tested `(d, c)`.
fn scan_threshold(d: u128, c: u128, lhs: &dyn Fn(u128) -> u128) -> u128 {
    const HORIZON: u128 = 400;
    let holds = |k: u128| lhs(k) > d * (d + k) + c;
    (0..HORIZON)
        .filter(|&k| !holds(k))
        .max()
        .map_or(0, |k| k + 1)
}

fn fdc_values() -> Outcome {
    for (d, c, expected) in [(1usize, 0usize, 3usize), (2, 0, 7)] {
        let got = fdc_bound(d, c).map_err(|e| e.to_string())?;
        let (dd, cc) = (d as u128, c as u128);
        let mut branches: Vec<Branch> = vec![
            ("n0".into(), got.n0 as u128, Box::new(|k| binom(k + 1, 2))),
            ("n1".into(), got.n1 as u128, Box::new(move |k| (dd + 1) * k)),
        ];
        for &(dp, v) in &got.branch_values {
            branches.push((
                format!("n{dp}"),
                v as u128,
                Box::new(move |k| binom(k, dp as u128)),
            ));
        }
        let mut oracle_max = 0;
        for (name, value, lhs) in &branches {
            let oracle = scan_threshold(dd, cc, lhs.as_ref());
            check(*value == oracle, || {
                format!("d={d} c={c} {name}: {value} != oracle {oracle}")
            })?;
            let holds = |k: u128| lhs(k) > dd * (dd + k) + cc;
            if *value > 0 {
                check(!holds(value - 1), || {
                    format!("d={d} {name}: holds below threshold")
                })?;
            }
            check((*value..value + FDC_WINDOW).all(holds), || {
                format!("d={d} {name}: window fails")
            })?;
            oracle_max = oracle_max.max(oracle);
        }
        check(got.f == expected && got.f as u128 == oracle_max, || {
            format!(
                "F({d},{c}) = {} (expected {expected}, oracle {oracle_max})",
                got.f
            )
        })?;
    }
    for d in 1..=3 {
        let values: Vec<usize> = (0..=5).map(|c| fdc_bound(d, c).unwrap().f).collect();
        check(values.windows(2).all(|w| w[0] <= w[1]), || {
            format!("d={d}: not monotone {values:?}")
        })?;
    }
    Ok("F(1,0)=3, F(2,0)=7, monotone in c".into())
}

fn resolution_round_trips() -> Outcome {
    let mut lines = Vec::new();
    for (name, n) in [
        ("matrices_rank_le:r=2", 5usize),
        ("sym_matrices_rank_le:r=2", 4),
    ] {
        let x = parse_variety(name).unwrap();
        let r = x.determinantal_rank().unwrap();
        let d = resolution_dim(&x).unwrap();
        let mut admissible = 0;
        let mut seed = 0;
        while admissible < ROUND_TRIP_SAMPLES {
            let p = sample_rank_exact(&x, n, r, seed).map_err(|e| e.to_string())?;
            seed += 1;
            if minimal_subspace(&p).unwrap().len() != d {
                continue;
            }
            let w = local_inverse(&x, &p).map_err(|e| e.to_string())?;
            check(rho(&x, &w).map_err(|e| e.to_string())? == p, || {
                format!("{name}: ρ∘inverse ≠ id")
            })?;
            admissible += 1;
        }
        for s in 0..ROUND_TRIP_SAMPLES as u64 {
            let w = sample_omega(&x, n, s).map_err(|e| e.to_string())?;
            let back = local_inverse(&x, &rho(&x, &w).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            check(back == w, || format!("{name} seed {s}: inverse∘ρ ≠ id"))?;
        }
        lines.push(format!("{name}: {admissible} of {seed} samples admissible"));
    }
    let x = parse_variety("matrices_rank_le:r=2").unwrap();
    let p = sample_rank_exact(&x, 5, 1, 11).map_err(|e| e.to_string())?;
    let rep = fiber_probe(&x, &p, 8, 3).map_err(|e| e.to_string())?;
    check(rep.distinct && rep.preimages_found.len() >= 2, || {
        "rank-1 fiber has a single preimage".into()
    })?;
    lines.push(format!(
        "rank-1 fiber: {} preimages",
        rep.preimages_found.len()
    ));
    Ok(lines.join("; "))
}

fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>], n: usize) -> bool {
    let ra = if a.is_empty() {
        0
    } else {
        rank(&Matrix::from_rows(a.to_vec(), n).unwrap())
    };
    let rb = if b.is_empty() {
        0
    } else {
        rank(&Matrix::from_rows(b.to_vec(), n).unwrap())
    };
    let both: Vec<Vec<Rational>> = a.iter().chain(b).cloned().collect();
    let rab = if both.is_empty() {
        0
    } else {
        rank(&Matrix::from_rows(both, n).unwrap())
    };
    ra == rb && rb == rab
}

fn random_point(space: SpaceDescriptor, seed: u64) -> RationalPoint {
    let coords = small_vector(&mut rng(seed), space.dim());
    TensorPoint::new(space, coords).unwrap()
}

fn dim_u(p: &RationalPoint) -> usize {
    minimal_subspace(p).unwrap().len()
}

fn minimal_subspace_checks() -> Outcome {
    // Functoriality U_{P(φ)p} = φ(U_p) for injective φ: K^4 → K^6, with p
    // pushed in from K^2 so that U_p is a proper subspace.
    for atom in [Atom::Tensor(3), Atom::Sym(3), Atom::Ext(2)] {
        for s in 0..FUNCTORIALITY_PAIRS {
            let q = random_point(
                SpaceDescriptor::single(atom, 2).unwrap(),
                derive_seed(s, &[0]),
            );
            let psi = injective_matrix(4, 2, derive_seed(s, &[1])).unwrap();
            let p = apply_map(&q, &psi).unwrap();
            let phi = injective_matrix(6, 4, derive_seed(s, &[2])).unwrap();
            let image = apply_map(&p, &phi).unwrap();
            let pushed: Vec<Vec<Rational>> = minimal_subspace(&p)
                .unwrap()
                .iter()
                .map(|u| phi.mul_vec(u).unwrap())
                .collect();
            check(
                same_span(&minimal_subspace(&image).unwrap(), &pushed, 6),
                || format!("{atom:?} seed {s}: U of image differs from φ(U)"),
            )?;
        }
    }
    // Semicontinuity along p_t = q + t·w: for generic w the dimension at
    // t != 0 is at least dim U_q and the same for every nonzero t; for w over
    // U_q it never exceeds dim U_q.
    let b = parse_variety("border_rank_le_2:d=3").unwrap();
    let ts: Vec<Rational> = [1, 2, 3, 5, 7]
        .iter()
        .map(|&v| Rational::from_integer(v.into()))
        .collect();
    let mut spots = 0;
    for m in 2..=4 {
        for s in 0..5u64 {
            let psi = injective_matrix(5, m, derive_seed(s, &[m as u64, 7])).unwrap();
            let q = apply_map(&parametrize_sample(&b, m, s).unwrap(), &psi).unwrap();
            let k = dim_u(&q);
            check(subspace_variety_member(&q, k).unwrap(), || {
                "q not in its own stratum".into()
            })?;
            check(
                k == 0 || !subspace_variety_member(&q, k - 1).unwrap(),
                || "stratum too small".into(),
            )?;
            let inside = apply_map(
                &random_point(SpaceDescriptor::single(Atom::Tensor(3), m).unwrap(), s + 99),
                &psi,
            )
            .unwrap();
            let outside = random_point(q.space().clone(), s + 199);
            let generic: Vec<usize> = ts
                .iter()
                .map(|t| dim_u(&q.add(&outside.scale(t)).unwrap()))
                .collect();
            check(generic.iter().all(|&g| g >= k && g == generic[0]), || {
                format!("m={m} seed {s}: dims {generic:?} against dim U_q = {k}")
            })?;
            for t in &ts {
                check(dim_u(&q.add(&inside.scale(t)).unwrap()) <= k, || {
                    format!("m={m} seed {s}: dimension jumped inside the stratum")
                })?;
            }
            spots += 1;
        }
    }
    // Border rank 2: U_p is spanned by the six factor vectors.
    let generic_count = |n: usize, target: usize| -> Result<usize, String> {
        let mut hits = 0;
        for s in 0..BORDER_SEEDS {
            let d = dim_u(&parametrize_sample(&b, n, s).unwrap());
            check(d <= 6, || format!("n={n} seed {s}: dim U = {d} > 6"))?;
            hits += usize::from(d == target);
        }
        Ok(hits)
    };
    let at5 = generic_count(5, 6)?;
    let saturated5 = generic_count(5, 5)?;
    let at6 = generic_count(6, 6)?;
    let summary = format!(
        "functoriality 3×{FUNCTORIALITY_PAIRS} ok, {spots} semicontinuity spots ok; \
         border rank in K^5: dim U = 6 for {at5}/{BORDER_SEEDS}, dim U = 5 for {saturated5}/{BORDER_SEEDS}; \
         in K^6: dim U = 6 for {at6}/{BORDER_SEEDS}"
    );
    check(at5 >= BORDER_GENERIC_MIN, || {
        format!("{summary}. U_p is a subspace of K^5, so dim U_p = 6 cannot occur at n = 5")
    })?;
    Ok(summary)
}

fn border_rank_spot_value() -> Outcome {
    let b = parse_variety("border_rank_le_2:d=3").unwrap();
    let got = generic_dimension_lower_bound(&b, 2, 1).map_err(|e| e.to_string())?;
    check(got == 8, || format!("got {got}"))?;
    Ok("dim = 8 = dim (K^2)^{⊗3}".into())
}

fn dichotomy_agreement() -> Outcome {
    let mut lines = Vec::new();
    for r in 1..=2usize {
        let x = parse_variety(&format!("matrices_rank_le:r={r}")).unwrap();
        let profile = profile_for(&x, 1).map_err(|e| e.to_string())?;
        let d = profile.d;
        let f = fdc_bound(d, profile.c).unwrap().f;
        let results: Vec<Result<(bool, bool), String>> = (0..DICHOTOMY_POINTS)
            .into_par_iter()
            .map(|s| {
                let p =
                    sample_rank_exact(&x, d, (s as usize) % (r + 1), derive_seed(s, &[r as u64]))
                        .map_err(|e| e.to_string())?;
                let rep =
                    singular_dichotomy_check(&x, &profile, &p, f).map_err(|e| e.to_string())?;
                let embedded = apply_map(&p, &standard_inclusion(d, 2 * d).unwrap()).unwrap();
                let sing = is_singular(&x, &embedded)
                    .map_err(|e| e.to_string())?
                    .is_singular;
                Ok((rep.singular_at_fdc.unwrap(), sing))
            })
            .collect();
        let mut disagreements = 0;
        let mut singular = 0;
        for res in results {
            let (a, b) = res?;
            if a != b {
                disagreements += 1;
            }
            if b {
                singular += 1;
            }
        }
        check(disagreements == 0, || {
            format!("r={r}: {disagreements} disagreements")
        })?;
        lines.push(format!(
            "r={r} (d={d}, F={f}): {singular} singular of {DICHOTOMY_POINTS}"
        ));
    }
    Ok(lines.join("; "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("LR/dimension identity", lr_dimension_identity),
        ("shift of the tensor square", shift_of_tensor_square),
        ("singular locus of rank varieties", singular_locus_law),
        ("dimension law 2rn - r^2", dimension_law),
        ("stability bound F(d, c)", fdc_values),
        ("resolution round trips and fibers", resolution_round_trips),
        ("minimal subspaces", minimal_subspace_checks),
        ("border rank 2 spot value", border_rank_spot_value),
        ("dichotomy vs Jacobian criterion", dichotomy_agreement),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    let unexpected: Vec<usize> = failed
        .iter()
        .copied()
        .filter(|i| !UNATTAINABLE.contains(i))
        .collect();
    if !failed.is_empty() && unexpected.is_empty() {
        println!("only criteria known to be unattainable as stated failed: {failed:?}");
    }
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
