//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{m, random_system, v, FAMILIES};
use ifslab::algebra::unital_algebra_closure;
use ifslab::attractor::{affine_hull_dim, box_count_auto, chaos_game, max_distance_to_affine};
use ifslab::dimension::{
    affinity_dim, affinity_dim_truncated, jsr_bracket, partition_function, singular_value_function, DimMethod, Word,
};
use ifslab::gallery::{
    coincidence_check, direct_sum_hypothesis, example2_matrix, example2_relations, golden_ratio, make_example1,
    make_example2, make_example3_scalars, make_simple, pu_distinct_count, simon_solomyak_lambda,
};
use ifslab::invariant::{
    admits_invariant_subspace, dimension_bound, generic_orbit_check, minimal_invariant_affine_subspace,
    random_translations, AffineIfs, AffineMap,
};
use ifslab::rng;
use ifslab::{RealVector, SquareMatrix, Tolerance};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn distinct_pair(r: &mut rng::SeededRng, d: usize) -> (RealVector, RealVector) {
    loop {
        let a = rng::gaussian_vector(r, d);
        let b = rng::gaussian_vector(r, d);
        if (&a - &b).norm() > 0.1 {
            return (a, b);
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut proper = 0;
    for i in 0..200u64 {
        let d = 2 + (i % 4) as usize;
        let n = 2 + ((i / 4) % 2) as usize;
        let family = FAMILIES[((i / 8) % 5) as usize];
        let ifs = random_system(1000 + i, d, n, family, 0.2, 0.95);
        let b = e(dimension_bound(&ifs, &tol()))?;
        ensure(b.holds && b.subspace_dim <= b.bound.min(d), || {
            format!("system {i} ({family:?}, d={d}, N={n}): dim X = {} but bound {}", b.subspace_dim, b.bound)
        })?;
        if b.subspace_dim < d {
            proper += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("200/200 systems within (N-1)D, {proper} with a proper subspace, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    let mut r = rng::seeded(2);
    let (v1, v2) = distinct_pair(&mut r, 2);
    let case = e(make_simple(0.7, &v1, &v2))?;
    let b = e(dimension_bound(&case.ifs, &tol()))?;
    ensure(b.algebra_dim == 1 && b.subspace_dim == 1, || format!("D = {}, dim X = {}", b.algebra_dim, b.subspace_dim))?;
    let closed = 2f64.ln() / (1.0 / 0.7f64).ln();
    let bisected = e(affinity_dim_truncated(&case.ifs.linear_parts(), 4, 1e-12))?.upper;
    ensure((closed - bisected).abs() <= 1e-6, || format!("closed form {closed} vs bisection {bisected}"))?;
    let cloud = e(chaos_game(&case.ifs, 200_100, 100, 7, &tol()))?;
    let est = e(box_count_auto(&cloud))?;
    ensure((0.9..=1.1).contains(&est.slope), || format!("box-count slope {}", est.slope))?;
    let x = e(minimal_invariant_affine_subspace(&case.ifs, &tol()))?;
    let dist = e(max_distance_to_affine(&cloud, &x))?;
    ensure(dist <= 1e-7, || format!("max distance to X {dist}"))?;
    Ok(format!("dim_aff {bisected:.9} (closed {closed:.9}), slope {:.4}, max distance {dist:.2e}", est.slope))
}

fn criterion_3() -> Outcome {
    let mut r = rng::seeded(3);
    let phi = r.gen_range(0.1..3.0);
    let psi = r.gen_range(0.1..3.0);
    let (v1, v2) = distinct_pair(&mut r, 4);
    let case = e(make_example1(0.1, phi, psi, &v1, &v2))?;
    let b = e(dimension_bound(&case.ifs, &tol()))?;
    ensure(b.algebra_dim == 2 && b.subspace_dim <= 2, || format!("D = {}, dim X = {}", b.algebra_dim, b.subspace_dim))?;
    let aff = e(affinity_dim(&case.ifs.linear_parts(), 6, 1e-12))?;
    ensure(aff.method == DimMethod::SimilarityExact, || format!("method {:?}", aff.method))?;
    ensure((aff.upper - 2.5).abs() <= 1e-9, || format!("dim_aff {}", aff.upper))?;
    let cloud = e(chaos_game(&case.ifs, 100_100, 100, 3, &tol()))?;
    let est = e(box_count_auto(&cloud))?;
    ensure(est.slope <= 2.1, || format!("box-count slope {}", est.slope))?;
    Ok(format!("D = 2, dim X = {}, dim_aff = {}, slope {:.4}", b.subspace_dim, aff.upper, est.slope))
}

fn criterion_4() -> Outcome {
    let rel = example2_relations();
    ensure(rel.all(), || format!("relations {rel:?}"))?;
    let mut r = rng::seeded(4);
    let base = e(make_example2(
        (0.85, 0.8),
        (0.01, -0.004),
        (0.006, 0.01),
        &rng::gaussian_vector(&mut r, 4),
        &rng::gaussian_vector(&mut r, 4),
    ))?;
    let alg = e(unital_algebra_closure(&base.ifs.linear_parts(), &tol()))?;
    ensure(alg.dim() == 3, || format!("D = {}", alg.dim()))?;
    let scalar = [example2_matrix(0.85, 0.0, 0.0), example2_matrix(0.85, 0.0, 0.0)];
    let upper = e(affinity_dim_truncated(&scalar, 6, 1e-10))?.upper;
    ensure(upper > 3.0, || format!("depth-6 upper bound {upper}"))?;
    let mut worst = 0;
    for i in 0..20 {
        let ifs = e(base.ifs.with_translations(&random_translations(40, i, 2, 4)))?;
        let x = e(minimal_invariant_affine_subspace(&ifs, &tol()))?;
        worst = worst.max(x.dim());
    }
    ensure(worst <= 3, || format!("dim X reached {worst}"))?;
    Ok(format!("relations exact, D = 3, depth-6 upper bound {upper:.4} > 3, max dim X over 20 tuples = {worst}"))
}

fn criterion_5() -> Outcome {
    let case = e(make_example3_scalars(&[0.8, 0.9], 2, &[v(&[0.0, 0.0]), v(&[1.0, -0.5])]))?;
    let hyp = e(direct_sum_hypothesis(&[SquareMatrix::scalar(1, 0.8), SquareMatrix::scalar(1, 0.9)], 2))?;
    ensure(hyp.threshold < hyp.lsr_lower && hyp.holds(), || format!("hypothesis {hyp:?}"))?;
    ensure((hyp.threshold - 0.5f64.sqrt()).abs() < 1e-15, || format!("threshold {}", hyp.threshold))?;
    ensure((hyp.pressure_witness - 1.28).abs() < 1e-12 && hyp.pressure_witness > 1.0, || {
        format!("witness {}", hyp.pressure_witness)
    })?;
    ensure(hyp.min_k == 1 && hyp.k > hyp.min_k, || format!("k = {}, (N-1)d^2 = {}", hyp.k, hyp.min_k))?;
    let p1 = e(partition_function(&case.ifs.linear_parts(), 2.0, 1))?;
    let x = e(minimal_invariant_affine_subspace(&case.ifs, &tol()))?;
    ensure(x.dim() <= 1 && case.ifs.dim() == 2, || format!("dim X = {} in R^{}", x.dim(), case.ifs.dim()))?;
    Ok(format!(
        "2^(-1/2) = {:.6} < lsr lower {}, N lsr^k = {:.2} > 1, P_1(2) = {p1:.2}, dim X = {} in R^2",
        hyp.threshold,
        hyp.lsr_lower,
        hyp.pressure_witness,
        x.dim()
    ))
}

fn criterion_6() -> Outcome {
    let lambda = simon_solomyak_lambda();
    let j = e(Word::from_one_based(&[2, 1, 1], 2))?;
    let k = e(Word::from_one_based(&[1, 2, 2], 2))?;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let mut r = rng::stream(60, i);
        let (v1, v2) = (rng::gaussian_vector(&mut r, 2), rng::gaussian_vector(&mut r, 2));
        worst = worst.max(e(coincidence_check(lambda, &j, &k, &v1, &v2))?);
    }
    ensure(worst <= 1e-12, || format!("discrepancy {worst}"))?;
    Ok(format!("max discrepancy over 50 pairs x 10 probes = {worst:.2e}"))
}

/// Distinct values of `sum c_r beta^-r` in floating point, merged when
/// closer than `1e-9`.
fn float_distinct(n: usize) -> u64 {
    let inv = 1.0 / golden_ratio();
    let mut vals: Vec<f64> = (0..1u32 << n)
        .map(|mask| (0..n).filter(|r| mask >> r & 1 == 1).map(|r| inv.powi(r as i32)).sum())
        .collect();
    vals.sort_by(f64::total_cmp);
    1 + vals.windows(2).filter(|w| w[1] - w[0] > 1e-9).count() as u64
}

fn criterion_7() -> Outcome {
    let first: Vec<u64> = (1..=3).map(|n| pu_distinct_count(n).unwrap()).collect();
    ensure(first == [2, 4, 7], || format!("counts {first:?}"))?;
    for n in 1..=12 {
        let exact = e(pu_distinct_count(n))?;
        let float = float_distinct(n);
        ensure(exact == float, || format!("n = {n}: exact {exact}, floating {float}"))?;
    }
    let mut prev = e(pu_distinct_count(3))?;
    let mut max_ratio: f64 = 0.0;
    for n in 4..=20 {
        let c = e(pu_distinct_count(n))?;
        let ratio = c as f64 / prev as f64;
        ensure(ratio < 2.0, || format!("n = {n}: ratio {ratio}"))?;
        max_ratio = max_ratio.max(ratio);
        prev = c;
    }
    Ok(format!("counts 2, 4, 7; exact = floating for n <= 12; max ratio for 4..=20 is {max_ratio:.4}, count(20) = {prev}"))
}

fn criterion_8() -> Outcome {
    let irreducible = [SquareMatrix::rotation(1.0).scale(0.5), SquareMatrix::diag(&[0.5, 0.25])];
    let homothety = [SquareMatrix::scalar(2, 0.7), SquareMatrix::scalar(2, 0.7)];
    let mut counts = [0usize; 2];
    for (slot, mats) in [&irreducible, &homothety].iter().enumerate() {
        for i in 0..100 {
            let maps = mats
                .iter()
                .zip(random_translations(80 + slot as u64 * 1000, i, 2, 2))
                .map(|(a, t)| AffineMap::new(a.clone(), t).unwrap())
                .collect();
            let ifs = e(AffineIfs::certified(maps, 4))?;
            if e(admits_invariant_subspace(&ifs, 1, &tol()))? {
                counts[slot] += 1;
            }
        }
    }
    ensure(counts[0] == 0, || format!("irreducible pair in Z_1 for {} tuples", counts[0]))?;
    ensure(counts[1] == 100, || format!("homothety pair in Z_1 for only {} tuples", counts[1]))?;
    let gi = e(generic_orbit_check(&irreducible, 1, 32, 8, &tol()))?;
    let gh = e(generic_orbit_check(&homothety, 1, 32, 8, &tol()))?;
    ensure(!gi.holds_generically && gh.holds_generically, || format!("generic checks {gi:?} / {gh:?}"))?;
    Ok(format!(
        "irreducible: 0/100 in Z_1, orbit dim {}; homothety: 100/100 in Z_1, orbit dim {}",
        gi.max_orbit_dim, gh.max_orbit_dim
    ))
}

fn criterion_9() -> Outcome {
    let mut by_dim = [0usize; 6];
    for i in 0..50u64 {
        let d = 2 + (i % 4) as usize;
        let n = 2 + ((i / 4) % 2) as usize;
        let family = FAMILIES[((i / 3) % 5) as usize];
        let ifs = random_system(9000 + i, d, n, family, 0.4, 0.9);
        let x = e(minimal_invariant_affine_subspace(&ifs, &tol()))?;
        let cloud = e(chaos_game(&ifs, 10_100, 100, i, &tol()))?;
        let hull = e(affine_hull_dim(&cloud, &tol()))?;
        ensure(hull == x.dim(), || format!("system {i} ({family:?}, d={d}, N={n}): hull {hull}, dim X {}", x.dim()))?;
        by_dim[x.dim()] += 1;
    }
    Ok(format!("50/50 match; systems by dim X (0..=5): {by_dim:?}"))
}

/// Singular values of a 2x2 matrix in closed form.
fn sv2(a: &[f64; 4]) -> (f64, f64) {
    let fro2 = a.iter().map(|x| x * x).sum::<f64>();
    let det = (a[0] * a[3] - a[1] * a[2]).abs();
    let s1 = ((fro2 + ((fro2 - 2.0 * det) * (fro2 + 2.0 * det)).max(0.0).sqrt()) / 2.0).sqrt();
    (s1, if s1 > 0.0 { det / s1 } else { 0.0 })
}

fn phi2(a: &[f64; 4], s: f64) -> f64 {
    let (s1, s2) = sv2(a);
    if s <= 1.0 {
        s1.powf(s)
    } else if s <= 2.0 {
        s1 * s2.powf(s - 1.0)
    } else {
        (s1 * s2).powf(s / 2.0)
    }
}

fn mul2(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

fn criterion_10() -> Outcome {
    let mut r = rng::seeded(10);
    for pair in 0..500 {
        let d = 2 + pair % 3;
        let a = rng::gaussian_matrix(&mut r, d);
        let b = rng::gaussian_matrix(&mut r, d);
        let ab = &a * &b;
        for k in 0..9 {
            let s = k as f64 * d as f64 / 8.0 + if k == 8 { 0.5 } else { 0.0 };
            let lhs = e(singular_value_function(&ab, s))?;
            let rhs = e(singular_value_function(&a, s))? * e(singular_value_function(&b, s))?;
            ensure(lhs <= rhs * (1.0 + 1e-10), || format!("pair {pair}, s = {s}: {lhs} > {rhs}"))?;
        }
    }
    let singles = [
        SquareMatrix::diag(&[0.9, 0.1]),
        SquareMatrix::rotation(0.4).scale(0.8),
        m(&[&[0.6, 0.2], &[0.2, -0.3]]),
    ];
    let mut worst_gap: f64 = 0.0;
    for a in &singles {
        let rho = ifslab::linalg::spectral_radius(a);
        let b = e(jsr_bracket(std::slice::from_ref(a), 32))?;
        let gap = (b.upper - rho).abs().max((b.lower - rho).abs());
        ensure(gap <= 1e-3, || format!("bracket [{}, {}] vs rho {rho}", b.lower, b.upper))?;
        worst_gap = worst_gap.max(gap);
    }
    let mats: Vec<[f64; 4]> = (0..3).map(|_| {
        let g = rng::gaussian_matrix(&mut r, 2).scale(0.4);
        [g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1)]
    })
    .collect();
    let sq: Vec<SquareMatrix> = mats.iter().map(|a| m(&[&a[..2], &a[2..]])).collect();
    let mut worst_rel: f64 = 0.0;
    for s in [0.3, 1.0, 1.7, 2.4] {
        let mut brute = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let p = mul2(&mul2(&mul2(&mats[i], &mats[j]), &mats[k]), &mats[l]);
                        brute += phi2(&p, s);
                    }
                }
            }
        }
        let got = e(partition_function(&sq, s, 4))?;
        let rel = (got - brute).abs() / brute;
        ensure(rel <= 1e-12, || format!("s = {s}: {got} vs brute force {brute}"))?;
        worst_rel = worst_rel.max(rel);
    }
    Ok(format!(
        "phi submultiplicative on 500 pairs x 9 s-values; jsr gap {worst_gap:.1e}; partition rel error {worst_rel:.1e}"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("dimension bound sweep over 200 random systems", criterion_1),
        ("two homotheties of ratio 0.7 in the plane", criterion_2),
        ("block rotations in R^4 with epsilon = 0.1", criterion_3),
        ("nilpotent relations and the three-dimensional algebra", criterion_4),
        ("direct sums of scalars 0.8 and 0.9 with k = 2", criterion_5),
        ("golden-ratio composition coincidence", criterion_6),
        ("distinct golden-ratio sums", criterion_7),
        ("invariant-line dichotomy for two linear pairs", criterion_8),
        ("affine hull of sampled attractor equals dim X", criterion_9),
        ("numerical cross-checks", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS ({secs:.2} s) {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL ({secs:.2} s) {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
