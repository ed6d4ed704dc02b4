use std::collections::HashSet;

use ifslab::attractor::{affine_hull_dim, chaos_game, max_distance_to_affine};
use ifslab::dimension::Word;
use ifslab::gallery::{
    coincidence_analytic, coincidence_check, complex_similarity_lambda, composition_discrepancy, evaluate, example2_relations, golden_ratio,
    polynomial_roots, pu_growth_table, GoldenInt, Manifest,
};
use ifslab::invariant::minimal_invariant_affine_subspace;
use ifslab::{RealVector, Tolerance};
use proptest::prelude::*;

/// Distinct values of `sum_{r<n} c_r beta^(n-1-r)` level by level, each
/// value held as `(p, q)` meaning `p beta + q` via `beta^k = F_k beta + F_(k-1)`.
fn distinct_counts_by_level(max_n: usize) -> Vec<usize> {
    let mut level: HashSet<(i64, i64)> = HashSet::from([(0, 0), (0, 1)]);
    let mut out = vec![level.len()];
    for _ in 1..max_n {
        // beta (p beta + q) = (p + q) beta + p
        level = level
            .iter()
            .flat_map(|&(p, q)| [(p + q, p), (p + q, p + 1)])
            .collect();
        out.push(level.len());
    }
    out
}

#[test]
fn distinct_counts_match_level_oracle() {
    let oracle = distinct_counts_by_level(24);
    let table = pu_growth_table(24).unwrap();
    for row in &table {
        assert_eq!(row.count as usize, oracle[row.n - 1], "n = {}", row.n);
    }
    assert_eq!(table[..6].iter().map(|r| r.count).collect::<Vec<_>>(), [2, 4, 7, 12, 20, 33]);
    let beta = golden_ratio();
    for row in &table[11..] {
        let ratio = row.ratio.unwrap();
        assert!(ratio >= beta - 0.05 && ratio < 2.0, "n = {}: {ratio}", row.n);
    }
}

#[test]
fn golden_integers_follow_the_field_rules() {
    let beta = golden_ratio();
    assert_eq!(GoldenInt::BETA * GoldenInt::BETA, GoldenInt::BETA + GoldenInt::ONE);
    assert_eq!(GoldenInt::BETA * GoldenInt::BETA_INV, GoldenInt::ONE);
    for n in 0..30 {
        let exact = GoldenInt::BETA.pow(n).to_f64();
        assert!((exact - beta.powi(n as i32)).abs() <= 1e-12 * exact);
    }
}

#[test]
fn quartic_roots_have_small_residuals() {
    let roots = polynomial_roots(&[1.0, 1.0, 1.0, -1.0, 1.0]).unwrap();
    assert_eq!(roots.len(), 4);
    for z in &roots {
        let val = (z * z * z * z + z * z * z + z * z - z + 1.0).norm();
        assert!(val < 1e-12, "{z}: residual {val}");
    }
    let lambda = complex_similarity_lambda().unwrap();
    assert!(lambda.im > 0.0 && lambda.norm() < 0.5f64.sqrt());
    assert!((lambda.norm() - 0.6814).abs() < 1e-4);
}

#[test]
fn nilpotent_relations_hold() {
    assert!(example2_relations().all());
}

fn word() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..=10).prop_flat_map(|n| (prop::collection::vec(1usize..=2, n), prop::collection::vec(1usize..=2, n)))
}

fn vector(d: usize) -> impl Strategy<Value = RealVector> {
    prop::collection::vec(-3.0f64..3.0, d).prop_map(|x| RealVector::new(x).unwrap())
}

proptest! {
    #[test]
    fn coincidence_matches_closed_form(lambda in 0.05f64..0.95, (j, k) in word(), (v1, v2) in (2usize..=4).prop_flat_map(|d| (vector(d), vector(d)))) {
        let jw = Word::from_one_based(&j, 2).unwrap();
        let kw = Word::from_one_based(&k, 2).unwrap();
        let got = coincidence_check(lambda, &jw, &kw, &v1, &v2).unwrap();
        let want = coincidence_analytic(lambda, &jw, &kw, &v1, &v2).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * (1.0 + (&v2 - &v1).norm()), "{got} vs {want}");
    }
}

#[test]
fn manifest_cases_pass_and_samples_span_the_invariant_subspace() {
    let tol = Tolerance::default();
    let hull_tol = Tolerance::new(1e-6, "hull").unwrap();
    let manifest = Manifest::bundled();
    for name in manifest.names() {
        let case = manifest.build(name).unwrap();
        let eval = evaluate(&case, 8, &tol).unwrap();
        assert!(eval.passed(), "{name}: {:?}", eval.checks);
        let x = minimal_invariant_affine_subspace(&case.ifs, &tol).unwrap();
        let cloud = chaos_game(&case.ifs, 20_000, 200, 0, &tol).unwrap();
        assert!(max_distance_to_affine(&cloud, &x).unwrap() <= 1e-6, "{name}");
        assert_eq!(affine_hull_dim(&cloud, &hull_tol).unwrap(), x.dim(), "{name}");
    }
}

#[test]
fn coinciding_compositions_in_the_bundled_case() {
    let case = Manifest::bundled().build("simon-solomyak").unwrap();
    let j = Word::from_one_based(&[2, 1, 1], 2).unwrap();
    let k = Word::from_one_based(&[1, 2, 2], 2).unwrap();
    assert!(composition_discrepancy(&case.ifs, &j, &k).unwrap() <= 1e-12);
    let swapped = Word::from_one_based(&[1, 1, 2], 2).unwrap();
    assert!(composition_discrepancy(&case.ifs, &j, &swapped).unwrap() > 1e-3);
}
