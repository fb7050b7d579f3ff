//! The acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`). All equalities are over exact rationals,
//! so every check is zero-tolerance.

use std::collections::BTreeMap;

use forest_cumulants::cli::model_check;
use forest_cumulants::colouring::colouring_sign_sum;
use forest_cumulants::cumulants::{
    compositions, degree_bound_of_forest, expand_ls_classical, expand_main, kappa_of_forest,
    lhs_product, verify, verify_path_fg, ClassicalVariant, CumulantEngine, Law,
};
use forest_cumulants::expr::{Expr, Shape, Slot};
use forest_cumulants::forests::{
    enumerate_reduced_forests, enumerate_reduced_trees, is_mixing_forest,
    is_strongly_mixing_forest, w_of_forest, ForestWeight, ReducedForest, Tree,
};
use forest_cumulants::paths::{path_f, path_g};
use forest_cumulants::sequences::enumerate_sequences;

const CAP: usize = 12;

fn shape(sizes: &[u32]) -> Shape {
    Shape::new(sizes.to_vec()).unwrap()
}

fn gen(g: u32, p: u32) -> Expr {
    Expr::generator(Slot::new(g, p))
}

fn shapes_up_to(total: usize) -> Vec<Shape> {
    (1..=total)
        .flat_map(compositions)
        .map(|sizes| Shape::new(sizes).unwrap())
        .collect()
}

fn sweep(law: Law, max_total: usize) {
    for sh in shapes_up_to(max_total) {
        let report = verify(law, &sh, CAP).unwrap();
        assert!(
            report.equal,
            "{law} failed on shape {sh}: {:?}",
            report.mismatch
        );
    }
}

/// Golden counts on shape (2,1): 8 reduced forests, 6 mixing, 5 strongly
/// mixing, and the mixing weight multiset {0,1,1,1,2,2}.
#[test]
fn acceptance_01_golden_counts() {
    let sh = shape(&[2, 1]);
    let forests = enumerate_reduced_forests(&sh.slots()).unwrap();
    assert_eq!(forests.len(), 8);
    let mixing: Vec<_> = forests
        .iter()
        .filter(|f| is_mixing_forest(f, &sh))
        .collect();
    assert_eq!(mixing.len(), 6);
    let strong = forests
        .iter()
        .filter(|f| is_strongly_mixing_forest(f, &sh))
        .count();
    assert_eq!(strong, 5);
    let mut weights: Vec<usize> = mixing
        .iter()
        .map(|f| w_of_forest(f, &sh).finite().unwrap())
        .collect();
    weights.sort_unstable();
    assert_eq!(weights, vec![0, 1, 1, 1, 2, 2]);
    println!("PASS 01: golden counts on shape (2,1): 8 / 6 / 5, weights {{0,1,1,1,2,2}}");
}

/// The six-term expansion of (a11 * a12) . a21, transcribed term by term,
/// equals the mixing-forest expansion and the product itself.
#[test]
fn acceptance_02_six_term_expansion() {
    let sh = shape(&[2, 1]);
    let mut e = CumulantEngine::new();
    let (a, b, c) = (gen(1, 1), gen(1, 2), gen(2, 1));

    let t1 = a.star(&b).star(&c);
    let t2 = e.kappa(&[a.clone(), c.clone()]).unwrap().star(&b);
    let t3 = e.kappa(&[b.clone(), c.clone()]).unwrap().star(&a);
    let t4 = e.kappa(&[a.clone(), b.clone(), c.clone()]).unwrap();
    let inner_ac = e.kappa(&[a.clone(), c.clone()]).unwrap();
    let t5 = e.kappa(&[inner_ac, b.clone()]).unwrap();
    let inner_bc = e.kappa(&[b.clone(), c.clone()]).unwrap();
    let t6 = e.kappa(&[inner_bc, a.clone()]).unwrap();
    let transcription = &(&(&(&(&t1 - &t2) - &t3) - &t4) + &t5) + &t6;

    let expansion = expand_main(&sh);
    assert_eq!(expansion, transcription);
    assert_eq!(expansion, lhs_product(&sh));
    println!("PASS 02: six-term expansion reproduced exactly on shape (2,1)");
}

/// The mixing-forest expansion equals the mixed product on every shape
/// with at most six slots.
#[test]
fn acceptance_03_main_identity_to_six_slots() {
    sweep(Law::Main, 6);
    println!("PASS 03: main identity exact on all shapes with <= 6 slots");
}

/// The strongly-mixing expansion equals the dual cumulant of the group
/// star products, and stays valid with the multiplications swapped, on
/// every shape with at most five slots.
#[test]
fn acceptance_04_analogue_and_dual_to_five_slots() {
    sweep(Law::LsAnalogue, 5);
    sweep(Law::DualAnalogue, 5);
    sweep(Law::DualMain, 5);
    println!("PASS 04: analogue and swapped-product identities exact on <= 5 slots");
}

/// Both classical expansions hold on every shape with at most six slots,
/// including the transcribed three-partition example on shape (2,1).
#[test]
fn acceptance_05_classical_to_six_slots() {
    sweep(Law::LsClassicalDot, 6);
    sweep(Law::LsClassicalStar, 6);

    let sh = shape(&[2, 1]);
    let (lhs, rhs) = expand_ls_classical(&sh, ClassicalVariant::DotCombined);
    let mut e = CumulantEngine::new();
    let (a, b, c) = (gen(1, 1), gen(1, 2), gen(2, 1));
    let transcription = &(&e.kappa(&[a.clone(), c.clone()]).unwrap().dot(&b)
        + &e.kappa(&[b.clone(), c.clone()]).unwrap().dot(&a))
        + &e.kappa(&[a.clone(), b.clone(), c.clone()]).unwrap();
    assert_eq!(rhs, transcription);
    assert_eq!(lhs, transcription);
    assert_eq!(lhs, e.kappa(&[a.star(&b), c]).unwrap());
    println!("PASS 05: classical expansions exact on <= 6 slots, example reproduced");
}

/// The colouring-weighted sum over all reduced forests recovers the mixed
/// product on every shape with at most five slots.
#[test]
fn acceptance_06_colouring_weighted_sum_to_five_slots() {
    sweep(Law::PropColouring, 5);
    println!("PASS 06: colouring-weighted sum exact on <= 5 slots");
}

/// For every reduced forest on every shape with at most five slots the
/// signed colouring count collapses to (-1)^w for mixing forests and to 0
/// otherwise.
#[test]
fn acceptance_07_colouring_sign_collapse_to_five_slots() {
    for sh in shapes_up_to(5) {
        for f in enumerate_reduced_forests(&sh.slots()).unwrap() {
            let sum = colouring_sign_sum(&f, &sh);
            match w_of_forest(&f, &sh) {
                ForestWeight::Finite(w) => {
                    assert_eq!(sum, if w % 2 == 0 { 1 } else { -1 }, "forest {f} on {sh}")
                }
                ForestWeight::Infinite => assert_eq!(sum, 0, "forest {f} on {sh}"),
            }
        }
    }
    println!("PASS 07: signed colouring sums collapse to (-1)^w or 0 on <= 5 slots");
}

/// The sequence-to-coloured-forest bijection round-trips with matching
/// lengths and cumulants on every shape with at most four slots, and the
/// three sequences hitting the nested pair cumulant on shape (2,2)
/// collapse to that single signed term.
#[test]
fn acceptance_08_bijection_to_four_slots() {
    sweep(Law::SeqBijection, 4);

    let sh = shape(&[2, 2]);
    let mut e = CumulantEngine::new();
    let left_pair = e.kappa(&[gen(1, 1), gen(2, 1)]).unwrap();
    let right_pair = e.kappa(&[gen(1, 2), gen(2, 2)]).unwrap();
    let target = e.kappa(&[left_pair.clone(), right_pair.clone()]).unwrap();

    let mut hits = Vec::new();
    let mut collapse = Expr::zero();
    for w in enumerate_sequences(&sh, true) {
        let value = forest_cumulants::sequences::kappa_of_sequence(&w);
        if value == target || value == target.neg() {
            let signed = if w.length() % 2 == 0 {
                value
            } else {
                value.neg()
            };
            collapse = collapse.add(&signed);
            hits.push(w.length());
        }
    }
    hits.sort_unstable();
    assert_eq!(hits, vec![2, 3, 3], "three sequences reach the nested pair");
    // The survivors cancel down to one signed occurrence, the sign being
    // (-1)^w of the corresponding tree (three internal vertices).
    assert_eq!(collapse, target.neg());
    let tree = ReducedForest::new(vec![Tree::internal(vec![
        Tree::internal(vec![Tree::leaf(Slot::new(1, 1)), Tree::leaf(Slot::new(2, 1))]).unwrap(),
        Tree::internal(vec![Tree::leaf(Slot::new(1, 2)), Tree::leaf(Slot::new(2, 2))]).unwrap(),
    ])
    .unwrap()]);
    assert_eq!(w_of_forest(&tree, &sh), ForestWeight::Finite(3));
    assert_eq!(kappa_of_forest(&tree), target);
    println!("PASS 08: bijection exact on <= 4 slots, triple collapses to one signed term");
}

/// The mixing-partition cumulant sum equals minus the signed sum over
/// nested upward sequences on every shape with at most four slots.
#[test]
fn acceptance_09_sequence_resummation_to_four_slots() {
    sweep(Law::PropMixingSeq, 4);
    println!("PASS 09: sequence resummation exact on <= 4 slots");
}

/// The path recursion agrees with its closed form on arities up to four
/// with coordinates up to four, vanishes off the orthant, and is -1 at the
/// origin.
#[test]
fn acceptance_10_path_functions() {
    for arity in 1..=4 {
        let report = verify_path_fg(arity, 4);
        assert!(report.equal, "arity {arity}: {:?}", report.mismatch);
        assert_eq!(path_f(&vec![0; arity]), -1);
    }
    assert_eq!(path_f(&[-1, 2]), 0);
    assert_eq!(path_g(&[-1, 2]), 0);
    assert_eq!(path_f(&[3, -2, 1, 0]), 0);
    println!("PASS 10: path recursion matches closed form on arity <= 4, coords <= 4");
}

/// Root deletion halves: forests on n labeled leaves number exactly twice
/// the trees, for 2 <= n <= 6.
#[test]
fn acceptance_11_halving_counts() {
    for n in 2..=6u32 {
        let slots = shape(&[n]).slots();
        let trees = enumerate_reduced_trees(&slots).unwrap().len();
        let forests = enumerate_reduced_forests(&slots).unwrap().len();
        assert_eq!(forests, 2 * trees, "{n} leaves");
    }
    println!("PASS 11: forest count = 2 x tree count for 2..6 leaves");
}

/// Every law with a model check holds exactly in the falling-factorial
/// polynomial model, on all shapes with at most four slots, under twenty
/// seeded degree-<=3 assignments each.
#[test]
fn acceptance_12_model_soundness_to_four_slots() {
    let laws = [
        Law::Main,
        Law::LsAnalogue,
        Law::LsClassicalDot,
        Law::LsClassicalStar,
        Law::MomentCumulant,
    ];
    for sh in shapes_up_to(4) {
        for law in laws {
            model_check(law, &sh, 42, 20, false)
                .unwrap_or_else(|e| panic!("{law} on {sh}: {e}"));
        }
    }
    println!("PASS 12: model soundness exact, 20 seeded assignments per law and shape");
}

/// Degree-bound arithmetic: additivity over component trees and the
/// endpoint formulas for bare forests and single trees, for all forests
/// with at most six leaves.
#[test]
fn acceptance_13_degree_bound_arithmetic() {
    for n in 1..=6u32 {
        let sh = shape(&[n]);
        let slots = sh.slots();
        let degrees: BTreeMap<Slot, i64> = slots
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, (i as i64 % 3) + 1))
            .collect();
        let total: i64 = degrees.values().sum();
        for f in enumerate_reduced_forests(&slots).unwrap() {
            let bound = degree_bound_of_forest(&f, &degrees);
            if f.tree_count() == slots.len() {
                assert_eq!(bound, total, "bare forest on {n} leaves");
            }
            if f.tree_count() == 1 {
                assert_eq!(bound, total - 2 * slots.len() as i64 + 2);
            }
            let per_tree: i64 = f
                .trees()
                .iter()
                .map(|t| degree_bound_of_forest(&ReducedForest::new(vec![t.clone()]), &degrees))
                .sum();
            assert_eq!(bound, per_tree, "additivity on {f}");
        }
    }
    println!("PASS 13: degree bound additive with exact endpoints up to 6 leaves");
}
