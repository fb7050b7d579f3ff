//! The two cumulant functionals and the expanders and verifiers for the
//! identities that connect them.
//!
//! `kappa` is defined by inverting the moment-cumulant system: the star
//! product of its arguments minus, over every partition with at least two
//! blocks, the dot product of the block cumulants. `kappa_star` swaps the
//! roles of the two multiplications. Everything downstream (forest
//! expansions, classical Leonov-Shiryaev style sums, colouring-weighted
//! sums, sequence cumulants) reduces to those two recursions over exact
//! rational expressions, so every law check is a zero-tolerance equality of
//! canonical forms.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::colouring::colouring_sign_sum;
use crate::expr::{product, Coeff, Expr, Op, Shape, Slot};
use crate::forests::{
    enumerate_reduced_forests, enumerate_reduced_trees, is_mixing_forest,
    is_strongly_mixing_forest, reduced_counts, w_of_forest, ReducedForest, Tree,
};
use crate::partitions::{enumerate_set_partitions, is_mixing_partition, is_strongly_mixing, SetPartition};
use crate::paths::{path_f, path_g};
use crate::sequences::{enumerate_sequences, kappa_of_sequence_with, phi, phi_inverse};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CumulantError {
    #[error("cumulants need at least one argument")]
    EmptyArguments,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error(
        "shape total {total} exceeds the size cap {cap} (roughly {estimate} reduced forests); \
         raise the cap explicitly to proceed"
    )]
    CapExceeded {
        total: usize,
        cap: usize,
        estimate: u128,
    },
    #[error("law '{0}' is checked on a coordinate grid, not on a shape")]
    NeedsGrid(&'static str),
}

/// Shared memo for cumulant recursions. The cache is keyed by the sorted
/// argument multiset, which both cumulants are symmetric in; reuse across a
/// whole expansion is what keeps exhaustive sweeps fast.
#[derive(Default)]
pub struct CumulantEngine {
    plain: HashMap<Vec<Expr>, Expr>,
    dual: HashMap<Vec<Expr>, Expr>,
}

impl CumulantEngine {
    pub fn new() -> CumulantEngine {
        CumulantEngine::default()
    }

    /// `kappa(x) = x`; otherwise the star product of the arguments minus
    /// the dot-combined block cumulants over all coarser partitions.
    pub fn kappa(&mut self, args: &[Expr]) -> Result<Expr, CumulantError> {
        if args.is_empty() {
            return Err(CumulantError::EmptyArguments);
        }
        Ok(self.compute(args, false))
    }

    /// The dual recursion, with the two multiplications exchanged.
    pub fn kappa_star(&mut self, args: &[Expr]) -> Result<Expr, CumulantError> {
        if args.is_empty() {
            return Err(CumulantError::EmptyArguments);
        }
        Ok(self.compute(args, true))
    }

    fn compute(&mut self, args: &[Expr], dual: bool) -> Expr {
        if args.len() == 1 {
            return args[0].clone();
        }
        let mut key = args.to_vec();
        key.sort();
        let memo = if dual { &self.dual } else { &self.plain };
        if let Some(hit) = memo.get(&key) {
            return hit.clone();
        }
        let (moment_op, combine_op) = if dual {
            (Op::Dot, Op::Star)
        } else {
            (Op::Star, Op::Dot)
        };
        let mut result = product(moment_op, key.iter().cloned());
        for rgs in crate::partitions::restricted_growth_strings(key.len()) {
            let blocks = crate::partitions::group_by_rgs(&key, &rgs);
            if blocks.len() < 2 {
                continue;
            }
            let factors: Vec<Expr> = blocks.iter().map(|b| self.compute(b, dual)).collect();
            result = result.sub(&product(combine_op, factors));
        }
        let memo = if dual { &mut self.dual } else { &mut self.plain };
        memo.insert(key, result.clone());
        result
    }
}

/// One-shot `kappa` with a fresh engine.
pub fn kappa(args: &[Expr]) -> Result<Expr, CumulantError> {
    CumulantEngine::new().kappa(args)
}

/// One-shot `kappa_star` with a fresh engine.
pub fn kappa_star(args: &[Expr]) -> Result<Expr, CumulantError> {
    CumulantEngine::new().kappa_star(args)
}

fn generators(slots: &[Slot]) -> Vec<Expr> {
    slots.iter().map(|&s| Expr::generator(s)).collect()
}

/// Per-block cumulants of a partition combined under `combine`.
pub fn kappa_of_partition(nu: &SetPartition, combine: Op) -> Expr {
    kappa_of_partition_with(&mut CumulantEngine::new(), nu, combine, false)
}

pub fn kappa_star_of_partition(nu: &SetPartition, combine: Op) -> Expr {
    kappa_of_partition_with(&mut CumulantEngine::new(), nu, combine, true)
}

pub fn kappa_of_partition_with(
    engine: &mut CumulantEngine,
    nu: &SetPartition,
    combine: Op,
    dual: bool,
) -> Expr {
    let factors: Vec<Expr> = nu
        .blocks()
        .iter()
        .map(|b| engine.compute(&generators(b), dual))
        .collect();
    product(combine, factors)
}

/// The forest cumulant: leaves stand for themselves, every internal vertex
/// applies `kappa` to its children, and root values are star-combined.
pub fn kappa_of_forest(f: &ReducedForest) -> Expr {
    kappa_of_forest_with(&mut CumulantEngine::new(), f, false)
}

/// Dual forest cumulant: `kappa_star` at the vertices, roots dot-combined.
pub fn kappa_star_of_forest(f: &ReducedForest) -> Expr {
    kappa_of_forest_with(&mut CumulantEngine::new(), f, true)
}

pub fn kappa_of_forest_with(engine: &mut CumulantEngine, f: &ReducedForest, dual: bool) -> Expr {
    let combine = if dual { Op::Dot } else { Op::Star };
    let roots: Vec<Expr> = f
        .trees()
        .iter()
        .map(|t| vertex_value(engine, t, dual))
        .collect();
    product(combine, roots)
}

fn vertex_value(engine: &mut CumulantEngine, t: &Tree, dual: bool) -> Expr {
    match t {
        Tree::Leaf(s) => Expr::generator(*s),
        Tree::Internal(children) => {
            let args: Vec<Expr> = children
                .iter()
                .map(|c| vertex_value(engine, c, dual))
                .collect();
            engine.compute(&args, dual)
        }
    }
}

/// Star products within each group.
pub fn group_star_products(shape: &Shape) -> Vec<Expr> {
    (1..=shape.group_count() as u32)
        .map(|g| product(Op::Star, generators(&shape.group_slots(g))))
        .collect()
}

/// Dot products within each group.
pub fn group_dot_products(shape: &Shape) -> Vec<Expr> {
    (1..=shape.group_count() as u32)
        .map(|g| product(Op::Dot, generators(&shape.group_slots(g))))
        .collect()
}

/// The left-hand side of the main expansion: the dot product over groups of
/// the star products within groups.
pub fn lhs_product(shape: &Shape) -> Expr {
    product(Op::Dot, group_star_products(shape))
}

/// The multiplication-swapped left-hand side.
pub fn dual_lhs_product(shape: &Shape) -> Expr {
    product(Op::Star, group_dot_products(shape))
}

fn signed(e: Expr, sign: i64) -> Expr {
    if sign >= 0 {
        e
    } else {
        e.neg()
    }
}

fn sum_over_forests(
    shape: &Shape,
    dual: bool,
    keep: impl Fn(&ReducedForest) -> bool,
) -> (Expr, usize) {
    let mut engine = CumulantEngine::new();
    let mut total = Expr::zero();
    let mut summands = 0usize;
    for f in enumerate_reduced_forests(&shape.slots()).expect("shapes are nonempty") {
        if !keep(&f) {
            continue;
        }
        let sign = w_of_forest(&f, shape)
            .sign()
            .expect("kept forests are mixing");
        total = total.add(&signed(kappa_of_forest_with(&mut engine, &f, dual), sign));
        summands += 1;
    }
    (total, summands)
}

/// Signed sum of forest cumulants over all mixing reduced forests.
pub fn expand_main(shape: &Shape) -> Expr {
    sum_over_forests(shape, false, |f| is_mixing_forest(f, shape)).0
}

/// Signed sum over strongly-mixing reduced forests; equals the dual
/// cumulant of the per-group star products.
pub fn expand_ls_analogue(shape: &Shape) -> Expr {
    sum_over_forests(shape, false, |f| is_strongly_mixing_forest(f, shape)).0
}

/// The multiplication-swapped main expansion (dual forest cumulants).
pub fn expand_dual_main(shape: &Shape) -> Expr {
    sum_over_forests(shape, true, |f| is_mixing_forest(f, shape)).0
}

/// The multiplication-swapped analogue expansion.
pub fn expand_dual_analogue(shape: &Shape) -> Expr {
    sum_over_forests(shape, true, |f| is_strongly_mixing_forest(f, shape)).0
}

/// Groups the main expansion by the component partition: over every
/// partition of the slots, the star product over blocks of the signed sums
/// of mixing-tree cumulants on each block.
pub fn expand_grouped(shape: &Shape) -> Expr {
    let mut engine = CumulantEngine::new();
    let mut inner_cache: HashMap<Vec<Slot>, Expr> = HashMap::new();
    let mut total = Expr::zero();
    for nu in enumerate_set_partitions(&shape.slots()).expect("shapes are nonempty") {
        let mut factors = Vec::with_capacity(nu.block_count());
        let mut vanished = false;
        for block in nu.blocks() {
            let inner = inner_cache
                .entry(block.clone())
                .or_insert_with(|| {
                    let mut sum = Expr::zero();
                    for t in enumerate_reduced_trees(block).expect("blocks are nonempty") {
                        let single = ReducedForest::new(vec![t]);
                        if let Some(sign) = w_of_forest(&single, shape).sign() {
                            sum = sum.add(&signed(
                                kappa_of_forest_with(&mut engine, &single, false),
                                sign,
                            ));
                        }
                    }
                    sum
                })
                .clone();
            if inner.is_zero() {
                vanished = true;
                break;
            }
            factors.push(inner);
        }
        if !vanished {
            total = total.add(&product(Op::Star, factors));
        }
    }
    total
}

/// Which of the two classical expansions to produce. The variant names the
/// product combining the block cumulants on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalVariant {
    /// `kappa` of the per-group star products equals the dot-combined block
    /// cumulants over strongly-mixing partitions.
    DotCombined,
    /// `kappa_star` of the per-group dot products equals the star-combined
    /// dual block cumulants over strongly-mixing partitions.
    StarCombined,
}

/// Both sides of the classical expansion, for comparison.
pub fn expand_ls_classical(shape: &Shape, variant: ClassicalVariant) -> (Expr, Expr) {
    let mut engine = CumulantEngine::new();
    let (lhs, combine, dual) = match variant {
        ClassicalVariant::DotCombined => (
            engine
                .kappa(&group_star_products(shape))
                .expect("shapes have groups"),
            Op::Dot,
            false,
        ),
        ClassicalVariant::StarCombined => (
            engine
                .kappa_star(&group_dot_products(shape))
                .expect("shapes have groups"),
            Op::Star,
            true,
        ),
    };
    let mut rhs = Expr::zero();
    for nu in strongly_mixing_partitions(shape) {
        rhs = rhs.add(&kappa_of_partition_with(&mut engine, &nu, combine, dual));
    }
    (lhs, rhs)
}

fn strongly_mixing_partitions(shape: &Shape) -> Vec<SetPartition> {
    enumerate_set_partitions(&shape.slots())
        .expect("shapes are nonempty")
        .filter(|nu| is_strongly_mixing(nu, shape))
        .collect()
}

/// The colouring-weighted sum over all reduced forests: each forest
/// cumulant is scaled by its signed count of gap-free weakly-mixing
/// colourings.
pub fn expand_prop_colouring(shape: &Shape) -> (Expr, usize) {
    let mut engine = CumulantEngine::new();
    let mut total = Expr::zero();
    let mut summands = 0usize;
    for f in enumerate_reduced_forests(&shape.slots()).expect("shapes are nonempty") {
        summands += 1;
        let weight = colouring_sign_sum(&f, shape);
        if weight == 0 {
            continue;
        }
        let term = kappa_of_forest_with(&mut engine, &f, false)
            .scale(&Coeff::from_integer(weight.into()));
        total = total.add(&term);
    }
    (total, summands)
}

/// Degree bound of a forest cumulant under a per-slot degree map: the total
/// degree minus twice the leaf count plus twice the number of trees.
pub fn degree_bound_of_forest(f: &ReducedForest, degrees: &BTreeMap<Slot, i64>) -> i64 {
    let leaves = f.leaves();
    let total: i64 = leaves
        .iter()
        .map(|s| degrees.get(s).copied().unwrap_or(0))
        .sum();
    total - 2 * leaves.len() as i64 + 2 * f.tree_count() as i64
}

/// Every law the verifier knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    MomentCumulant,
    MomentCumulantStar,
    Main,
    LsAnalogue,
    LsClassicalDot,
    LsClassicalStar,
    Grouped,
    DualMain,
    DualAnalogue,
    PropColouring,
    PropMixingSeq,
    SeqBijection,
    PathFg,
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::MomentCumulant => "moment-cumulant",
            Law::MomentCumulantStar => "moment-cumulant-star",
            Law::Main => "main",
            Law::LsAnalogue => "ls-analogue",
            Law::LsClassicalDot => "ls-classical-dot",
            Law::LsClassicalStar => "ls-classical-star",
            Law::Grouped => "grouped",
            Law::DualMain => "dual-main",
            Law::DualAnalogue => "dual-analogue",
            Law::PropColouring => "prop-colouring",
            Law::PropMixingSeq => "prop-mixing-seq",
            Law::SeqBijection => "seq-bijection",
            Law::PathFg => "path-fg",
        }
    }

    pub fn all() -> &'static [Law] {
        &[
            Law::MomentCumulant,
            Law::MomentCumulantStar,
            Law::Main,
            Law::LsAnalogue,
            Law::LsClassicalDot,
            Law::LsClassicalStar,
            Law::Grouped,
            Law::DualMain,
            Law::DualAnalogue,
            Law::PropColouring,
            Law::PropMixingSeq,
            Law::SeqBijection,
            Law::PathFg,
        ]
    }

    pub fn parse(name: &str) -> Option<Law> {
        Law::all().iter().copied().find(|l| l.name() == name)
    }
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// First point of disagreement between two expressions, rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub witness: String,
    pub lhs_value: String,
    pub rhs_value: String,
}

/// Outcome of one law check. `equal` holds exactly when the two sides agree
/// as canonical expressions (or, for the structural laws, when every check
/// passed).
#[derive(Debug, Clone)]
pub struct LawReport {
    pub law: Law,
    pub shape: Option<Shape>,
    pub lhs: Option<Expr>,
    pub rhs: Option<Expr>,
    pub equal: bool,
    /// Canonical term counts of the two fully expanded sides.
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    /// Structural summand counts (forests, partitions, sequences, grid
    /// points) before expansion.
    pub lhs_summands: usize,
    pub rhs_summands: usize,
    pub mismatch: Option<Mismatch>,
    pub millis: u128,
}

impl LawReport {
    fn from_sides(
        law: Law,
        shape: &Shape,
        lhs: Expr,
        rhs: Expr,
        lhs_summands: usize,
        rhs_summands: usize,
        started: Instant,
    ) -> LawReport {
        let mismatch = lhs.first_difference(&rhs).map(|(term, a, b)| Mismatch {
            witness: term.to_string(),
            lhs_value: a.to_string(),
            rhs_value: b.to_string(),
        });
        LawReport {
            law,
            shape: Some(shape.clone()),
            equal: mismatch.is_none(),
            lhs_terms: lhs.term_count(),
            rhs_terms: rhs.term_count(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            lhs_summands,
            rhs_summands,
            mismatch,
            millis: started.elapsed().as_millis(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "law": self.law.name(),
            "shape": self.shape.as_ref().map(|s| s.sizes().to_vec()),
            "equal": self.equal,
            "lhs_terms": self.lhs_terms,
            "rhs_terms": self.rhs_terms,
            "lhs_summands": self.lhs_summands,
            "rhs_summands": self.rhs_summands,
            "mismatch": self.mismatch.as_ref().map(|m| json!({
                "witness": m.witness,
                "lhs": m.lhs_value,
                "rhs": m.rhs_value,
            })),
            "millis": self.millis,
        })
    }
}

/// Checks one law on one shape, refusing shapes above the cap with a size
/// estimate instead of running for hours.
pub fn verify(law: Law, shape: &Shape, cap: usize) -> Result<LawReport, VerifyError> {
    let total = shape.total();
    if total > cap {
        return Err(VerifyError::CapExceeded {
            total,
            cap,
            estimate: reduced_counts(total).1,
        });
    }
    let started = Instant::now();
    let mut engine = CumulantEngine::new();
    let report = match law {
        Law::PathFg => return Err(VerifyError::NeedsGrid("path-fg")),
        Law::MomentCumulant => {
            let slots = shape.slots();
            let lhs = product(Op::Star, generators(&slots));
            let mut rhs = Expr::zero();
            let mut count = 0usize;
            for nu in enumerate_set_partitions(&slots).expect("nonempty") {
                rhs = rhs.add(&kappa_of_partition_with(&mut engine, &nu, Op::Dot, false));
                count += 1;
            }
            LawReport::from_sides(law, shape, lhs, rhs, 1, count, started)
        }
        Law::MomentCumulantStar => {
            let slots = shape.slots();
            let lhs = product(Op::Dot, generators(&slots));
            let mut rhs = Expr::zero();
            let mut count = 0usize;
            for nu in enumerate_set_partitions(&slots).expect("nonempty") {
                rhs = rhs.add(&kappa_of_partition_with(&mut engine, &nu, Op::Star, true));
                count += 1;
            }
            LawReport::from_sides(law, shape, lhs, rhs, 1, count, started)
        }
        Law::Main => {
            let (rhs, count) = sum_over_forests(shape, false, |f| is_mixing_forest(f, shape));
            LawReport::from_sides(law, shape, lhs_product(shape), rhs, 1, count, started)
        }
        Law::DualMain => {
            let (rhs, count) = sum_over_forests(shape, true, |f| is_mixing_forest(f, shape));
            LawReport::from_sides(law, shape, dual_lhs_product(shape), rhs, 1, count, started)
        }
        Law::LsAnalogue => {
            let lhs = engine
                .kappa_star(&group_star_products(shape))
                .expect("shapes have groups");
            let (rhs, count) =
                sum_over_forests(shape, false, |f| is_strongly_mixing_forest(f, shape));
            LawReport::from_sides(law, shape, lhs, rhs, 1, count, started)
        }
        Law::DualAnalogue => {
            let lhs = engine
                .kappa(&group_dot_products(shape))
                .expect("shapes have groups");
            let (rhs, count) =
                sum_over_forests(shape, true, |f| is_strongly_mixing_forest(f, shape));
            LawReport::from_sides(law, shape, lhs, rhs, 1, count, started)
        }
        Law::LsClassicalDot | Law::LsClassicalStar => {
            let variant = if law == Law::LsClassicalDot {
                ClassicalVariant::DotCombined
            } else {
                ClassicalVariant::StarCombined
            };
            let (lhs, rhs) = expand_ls_classical(shape, variant);
            let count = strongly_mixing_partitions(shape).len();
            LawReport::from_sides(law, shape, lhs, rhs, 1, count, started)
        }
        Law::Grouped => {
            let rhs = expand_grouped(shape);
            let count = enumerate_set_partitions(&shape.slots())
                .expect("nonempty")
                .count();
            LawReport::from_sides(law, shape, lhs_product(shape), rhs, 1, count, started)
        }
        Law::PropColouring => {
            let (rhs, count) = expand_prop_colouring(shape);
            LawReport::from_sides(law, shape, lhs_product(shape), rhs, 1, count, started)
        }
        Law::PropMixingSeq => {
            let mut lhs = Expr::zero();
            let mut lhs_count = 0usize;
            for nu in enumerate_set_partitions(&shape.slots()).expect("nonempty") {
                if is_mixing_partition(&nu, shape) {
                    lhs = lhs.add(&kappa_of_partition_with(&mut engine, &nu, Op::Dot, false));
                    lhs_count += 1;
                }
            }
            let mut rhs = Expr::zero();
            let mut rhs_count = 0usize;
            for w in enumerate_sequences(shape, true) {
                let sign = if w.length() % 2 == 0 { 1 } else { -1 };
                rhs = rhs.add(&signed(kappa_of_sequence_with(&mut engine, &w), -sign));
                rhs_count += 1;
            }
            LawReport::from_sides(law, shape, lhs, rhs, lhs_count, rhs_count, started)
        }
        Law::SeqBijection => return Ok(verify_seq_bijection(shape, started)),
    };
    Ok(report)
}

/// Structural check of the sequence-to-coloured-forest bijection on one
/// shape: round trips, length preservation, cumulant preservation, and
/// exact image.
fn verify_seq_bijection(shape: &Shape, started: Instant) -> LawReport {
    let mut engine = CumulantEngine::new();
    let sequences = enumerate_sequences(shape, true);
    let mut failure: Option<Mismatch> = None;
    let mut images = std::collections::BTreeSet::new();

    for w in &sequences {
        let (forest, colouring) = match phi(w) {
            Ok(pair) => pair,
            Err(e) => {
                failure = Some(Mismatch {
                    witness: w.to_string(),
                    lhs_value: "phi".into(),
                    rhs_value: e.to_string(),
                });
                break;
            }
        };
        if colouring.length() as usize != w.length() {
            failure = Some(Mismatch {
                witness: w.to_string(),
                lhs_value: format!("length {}", w.length()),
                rhs_value: format!("colouring length {}", colouring.length()),
            });
            break;
        }
        let seq_kappa = kappa_of_sequence_with(&mut engine, w);
        let forest_kappa = kappa_of_forest_with(&mut engine, &forest, false);
        if seq_kappa != forest_kappa {
            failure = Some(Mismatch {
                witness: w.to_string(),
                lhs_value: seq_kappa.to_string(),
                rhs_value: forest_kappa.to_string(),
            });
            break;
        }
        match phi_inverse(&forest, &colouring) {
            Ok(back) if &back == w => {}
            Ok(back) => {
                failure = Some(Mismatch {
                    witness: w.to_string(),
                    lhs_value: w.to_string(),
                    rhs_value: back.to_string(),
                });
                break;
            }
            Err(e) => {
                failure = Some(Mismatch {
                    witness: w.to_string(),
                    lhs_value: "phi_inverse".into(),
                    rhs_value: e.to_string(),
                });
                break;
            }
        }
        images.insert((forest, colouring));
    }

    // Image must be exactly the weakly-mixing colourings of positive length.
    let mut expected = 0usize;
    if failure.is_none() {
        for f in enumerate_reduced_forests(&shape.slots()).expect("nonempty") {
            for c in crate::colouring::enumerate_colourings(
                &f,
                shape,
                crate::colouring::ColouringFilter::WeaklyMixing,
            ) {
                if c.length() >= 1 {
                    expected += 1;
                    if failure.is_none() && !images.contains(&(f.clone(), c.clone())) {
                        failure = Some(Mismatch {
                            witness: format!("{f}"),
                            lhs_value: "coloured forest not reached".into(),
                            rhs_value: format!("length {}", c.length()),
                        });
                    }
                }
            }
        }
        if failure.is_none() && images.len() != expected {
            failure = Some(Mismatch {
                witness: "image size".into(),
                lhs_value: images.len().to_string(),
                rhs_value: expected.to_string(),
            });
        }
    }

    LawReport {
        law: Law::SeqBijection,
        shape: Some(shape.clone()),
        lhs: None,
        rhs: None,
        equal: failure.is_none(),
        lhs_terms: sequences.len(),
        rhs_terms: expected,
        lhs_summands: sequences.len(),
        rhs_summands: expected,
        mismatch: failure,
        millis: started.elapsed().as_millis(),
    }
}

/// Compares the path recursion against its closed form on the full grid
/// `{0..max_coord}^arity`, plus a belt of points with one negative
/// coordinate.
pub fn verify_path_fg(arity: usize, max_coord: i64) -> LawReport {
    let started = Instant::now();
    let mut checked = 0usize;
    let mut failure = None;

    let mut point = vec![0i64; arity];
    'grid: loop {
        let (f, g) = (path_f(&point), path_g(&point));
        checked += 1;
        if f != g {
            failure = Some(Mismatch {
                witness: format!("{point:?}"),
                lhs_value: f.to_string(),
                rhs_value: g.to_string(),
            });
            break;
        }
        let mut i = 0;
        loop {
            if i == arity {
                break 'grid;
            }
            point[i] += 1;
            if point[i] <= max_coord {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
    if failure.is_none() {
        for axis in 0..arity {
            let mut point = vec![1i64; arity];
            point[axis] = -1;
            checked += 1;
            if path_f(&point) != 0 || path_g(&point) != 0 {
                failure = Some(Mismatch {
                    witness: format!("{point:?}"),
                    lhs_value: path_f(&point).to_string(),
                    rhs_value: path_g(&point).to_string(),
                });
                break;
            }
        }
    }

    LawReport {
        law: Law::PathFg,
        shape: None,
        lhs: None,
        rhs: None,
        equal: failure.is_none(),
        lhs_terms: checked,
        rhs_terms: checked,
        lhs_summands: checked,
        rhs_summands: checked,
        mismatch: failure,
        millis: started.elapsed().as_millis(),
    }
}

/// All compositions (ordered tuples of positive parts) of `total`, in
/// lexicographic order; the sweep order of `--max-size`.
pub fn compositions(total: usize) -> Vec<Vec<u32>> {
    fn rec(remaining: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=remaining {
            prefix.push(part as u32);
            rec(remaining - part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::coeff;
    use crate::parse::parse_expr;

    fn shape(sizes: &[u32]) -> Shape {
        Shape::new(sizes.to_vec()).unwrap()
    }

    fn gen(g: u32, p: u32) -> Expr {
        Expr::generator(Slot::new(g, p))
    }

    #[test]
    fn kappa_base_cases() {
        let a = gen(1, 1);
        let b = gen(1, 2);
        assert_eq!(kappa(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(kappa(&[a.clone(), b.clone()]).unwrap(), &a.star(&b) - &a.dot(&b));
        assert_eq!(kappa(&[]), Err(CumulantError::EmptyArguments));
    }

    #[test]
    fn kappa_three_arguments() {
        let (a, b, c) = (gen(1, 1), gen(1, 2), gen(1, 3));
        let grand = parse_expr(
            "(* a1_1 a1_2 a1_3) - (. (* a1_1 a1_2) a1_3) - (. (* a1_1 a1_3) a1_2) \
             - (. (* a1_2 a1_3) a1_1) + 2 (. a1_1 a1_2 a1_3)",
        )
        .unwrap();
        assert_eq!(kappa(&[a, b, c]).unwrap(), grand);
    }

    #[test]
    fn kappa_star_base_cases() {
        let a = gen(1, 1);
        let b = gen(2, 1);
        assert_eq!(kappa_star(std::slice::from_ref(&a)).unwrap(), a);
        let pair = kappa_star(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(pair, &a.dot(&b) - &a.star(&b));
        assert_eq!(pair, kappa(&[a, b]).unwrap().neg());
    }

    /// The dual cumulant of a star pair against a third element expands to
    /// the five-term strongly-mixing sum.
    #[test]
    fn kappa_star_of_star_pair() {
        let mut engine = CumulantEngine::new();
        let (a, b, c) = (gen(1, 1), gen(1, 2), gen(2, 1));
        let lhs = engine.kappa_star(&[a.clone().star(&b), c.clone()]).unwrap();

        let k_ac = engine.kappa(&[a.clone(), c.clone()]).unwrap();
        let k_bc = engine.kappa(&[b.clone(), c.clone()]).unwrap();
        let k_abc = engine.kappa(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let nested_ac = engine.kappa(&[k_ac.clone(), b.clone()]).unwrap();
        let nested_bc = engine.kappa(&[k_bc.clone(), a.clone()]).unwrap();
        let expected = &(&(&nested_ac + &nested_bc) - &k_ac.star(&b)) - &(&k_bc.star(&a) + &k_abc);
        assert_eq!(lhs, expected);
        // And it is exactly the strongly-mixing forest expansion.
        assert_eq!(lhs, expand_ls_analogue(&shape(&[2, 1])));
    }

    #[test]
    fn kappa_is_multilinear() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (a, b, c) = (gen(1, 1), gen(1, 2), gen(2, 1));
        for _ in 0..10 {
            let p = coeff(rng.gen_range(-4..=4));
            let q = coeff(rng.gen_range(-4..=4));
            let mixed = &a.scale(&p) + &b.scale(&q);
            let lhs = kappa(&[mixed, c.clone()]).unwrap();
            let rhs = &kappa(&[a.clone(), c.clone()])
                .unwrap()
                .scale(&p)
                + &kappa(&[b.clone(), c.clone()]).unwrap().scale(&q);
            assert_eq!(lhs, rhs);
            let lhs_star = kappa_star(&[&a.scale(&p) + &b.scale(&q), c.clone()]).unwrap();
            let rhs_star = &kappa_star(&[a.clone(), c.clone()])
                .unwrap()
                .scale(&p)
                + &kappa_star(&[b.clone(), c.clone()]).unwrap().scale(&q);
            assert_eq!(lhs_star, rhs_star);
        }
    }

    #[test]
    fn kappa_of_partition_examples() {
        let sh = shape(&[2, 1]);
        let slots = sh.slots();
        let singles = SetPartition::new(slots.iter().map(|&s| vec![s]).collect());
        assert_eq!(
            kappa_of_partition(&singles, Op::Dot),
            product(Op::Dot, generators(&slots))
        );
        let one_block = SetPartition::new(vec![slots.clone()]);
        assert_eq!(
            kappa_of_partition(&one_block, Op::Dot),
            kappa(&generators(&slots)).unwrap()
        );
        let split = SetPartition::new(vec![
            vec![slots[0], slots[2]],
            vec![slots[1]],
        ]);
        let expected = kappa(&[gen(1, 1), gen(2, 1)]).unwrap().dot(&gen(1, 2));
        assert_eq!(kappa_of_partition(&split, Op::Dot), expected);
    }

    #[test]
    fn forest_cumulants_on_figure_shape() {
        let sh = shape(&[2, 1]);
        let bare = ReducedForest::new(sh.slots().into_iter().map(Tree::leaf).collect());
        assert_eq!(
            kappa_of_forest(&bare),
            product(Op::Star, generators(&sh.slots()))
        );

        let pair = Tree::internal(vec![
            Tree::leaf(Slot::new(1, 1)),
            Tree::leaf(Slot::new(1, 2)),
        ])
        .unwrap();
        let forest = ReducedForest::new(vec![pair.clone(), Tree::leaf(Slot::new(2, 1))]);
        let expected = kappa(&[gen(1, 1), gen(1, 2)]).unwrap().star(&gen(2, 1));
        assert_eq!(kappa_of_forest(&forest), expected);

        let nested = ReducedForest::new(vec![
            Tree::internal(vec![pair, Tree::leaf(Slot::new(2, 1))]).unwrap(),
        ]);
        let inner = kappa(&[gen(1, 1), gen(1, 2)]).unwrap();
        assert_eq!(
            kappa_of_forest(&nested),
            kappa(&[inner, gen(2, 1)]).unwrap()
        );
    }

    #[test]
    fn lhs_products() {
        assert_eq!(lhs_product(&shape(&[1])), gen(1, 1));
        assert_eq!(lhs_product(&shape(&[1, 1])), gen(1, 1).dot(&gen(2, 1)));
        assert_eq!(
            lhs_product(&shape(&[2, 1])),
            gen(1, 1).star(&gen(1, 2)).dot(&gen(2, 1))
        );
        assert_eq!(dual_lhs_product(&shape(&[1, 1])), gen(1, 1).star(&gen(2, 1)));
    }

    #[test]
    fn main_expansion_small_cases() {
        assert_eq!(expand_main(&shape(&[1])), gen(1, 1));
        // Single group: only the bare forest is mixing.
        let sh = shape(&[3]);
        assert_eq!(expand_main(&sh), product(Op::Star, generators(&sh.slots())));
        // All-singleton groups reduce to the plain dot product.
        for sizes in [&[1, 1][..], &[1, 1, 1][..]] {
            let sh = shape(sizes);
            assert_eq!(expand_main(&sh), product(Op::Dot, generators(&sh.slots())));
        }
        assert_eq!(expand_main(&shape(&[2, 1])), lhs_product(&shape(&[2, 1])));
    }

    /// The six-term expansion of the figure shape, transcribed term by term.
    #[test]
    fn main_expansion_matches_transcription() {
        let sh = shape(&[2, 1]);
        let mut engine = CumulantEngine::new();
        let (a, b, c) = (gen(1, 1), gen(1, 2), gen(2, 1));
        let k = |engine: &mut CumulantEngine, args: &[Expr]| engine.kappa(args).unwrap();

        let t1 = a.star(&b).star(&c);
        let t2 = k(&mut engine, &[a.clone(), c.clone()]).star(&b);
        let t3 = k(&mut engine, &[b.clone(), c.clone()]).star(&a);
        let t4 = k(&mut engine, &[a.clone(), b.clone(), c.clone()]);
        let inner_ac = k(&mut engine, &[a.clone(), c.clone()]);
        let t5 = k(&mut engine, &[inner_ac, b.clone()]);
        let inner_bc = k(&mut engine, &[b.clone(), c.clone()]);
        let t6 = k(&mut engine, &[inner_bc, a.clone()]);

        let transcription = &(&(&(&(&t1 - &t2) - &t3) - &t4) + &t5) + &t6;
        assert_eq!(expand_main(&sh), transcription);
        assert_eq!(transcription, lhs_product(&sh));
    }

    #[test]
    fn ls_analogue_small_cases() {
        let sh = shape(&[1, 1]);
        let (a, b) = (gen(1, 1), gen(2, 1));
        assert_eq!(expand_ls_analogue(&sh), &a.dot(&b) - &a.star(&b));
        // Single group: the bare forest alone is strongly mixing.
        let sh = shape(&[4]);
        assert_eq!(
            expand_ls_analogue(&sh),
            product(Op::Star, generators(&sh.slots()))
        );
    }

    #[test]
    fn dual_expansions_small_cases() {
        let sh = shape(&[1, 1]);
        assert_eq!(expand_dual_main(&sh), dual_lhs_product(&sh));
        let sh = shape(&[2, 1]);
        assert_eq!(expand_dual_main(&sh), dual_lhs_product(&sh));
        assert_eq!(
            expand_dual_analogue(&sh),
            kappa(&group_dot_products(&sh)).unwrap()
        );
    }

    /// The classical expansion on the figure shape, transcribed: the three
    /// strongly-mixing partitions with dot-combined cumulants.
    #[test]
    fn classical_expansion_matches_transcription() {
        let sh = shape(&[2, 1]);
        let (lhs, rhs) = expand_ls_classical(&sh, ClassicalVariant::DotCombined);
        let mut engine = CumulantEngine::new();
        let (a, b, c) = (gen(1, 1), gen(1, 2), gen(2, 1));
        let expected = &(&engine.kappa(&[a.clone(), c.clone()]).unwrap().dot(&b)
            + &engine.kappa(&[b.clone(), c.clone()]).unwrap().dot(&a))
            + &engine.kappa(&[a.clone(), b.clone(), c.clone()]).unwrap();
        assert_eq!(rhs, expected);
        assert_eq!(lhs, expected);
        // The left side is the cumulant of the group star products.
        assert_eq!(
            lhs,
            engine.kappa(&[a.star(&b), c]).unwrap()
        );
    }

    #[test]
    fn classical_single_pair_is_trivial() {
        let sh = shape(&[1, 1]);
        for variant in [ClassicalVariant::DotCombined, ClassicalVariant::StarCombined] {
            let (lhs, rhs) = expand_ls_classical(&sh, variant);
            assert_eq!(lhs, rhs);
            assert_eq!(rhs.term_count(), 2);
        }
    }

    #[test]
    fn grouped_expansion_small_cases() {
        assert_eq!(expand_grouped(&shape(&[1, 1])), lhs_product(&shape(&[1, 1])));
        assert_eq!(expand_grouped(&shape(&[2, 1])), expand_main(&shape(&[2, 1])));
        assert_eq!(expand_grouped(&shape(&[2, 2])), lhs_product(&shape(&[2, 2])));
    }

    #[test]
    fn degree_bound_arithmetic() {
        let sh = shape(&[2, 2]);
        let slots = sh.slots();
        let degrees: BTreeMap<Slot, i64> = slots
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, (i + 1) as i64))
            .collect();
        let total: i64 = degrees.values().sum();

        let bare = ReducedForest::new(slots.iter().copied().map(Tree::leaf).collect());
        assert_eq!(degree_bound_of_forest(&bare, &degrees), total);

        for f in enumerate_reduced_forests(&slots).unwrap() {
            let bound = degree_bound_of_forest(&f, &degrees);
            if f.tree_count() == 1 {
                assert_eq!(bound, total - 2 * slots.len() as i64 + 2);
            }
            let per_tree: i64 = f
                .trees()
                .iter()
                .map(|t| {
                    degree_bound_of_forest(&ReducedForest::new(vec![t.clone()]), &degrees)
                })
                .sum();
            assert_eq!(bound, per_tree, "additivity on {f}");
        }
    }

    #[test]
    fn verify_reports_on_figure_shape() {
        let sh = shape(&[2, 1]);
        let report = verify(Law::Main, &sh, 7).unwrap();
        assert!(report.equal);
        assert_eq!(report.rhs_summands, 6);
        assert_eq!(report.lhs_terms, 1);
        assert!(report.mismatch.is_none());

        let report = verify(Law::PropColouring, &sh, 7).unwrap();
        assert!(report.equal);
        assert_eq!(report.rhs_summands, 8);

        let report = verify(Law::MomentCumulant, &shape(&[3]), 7).unwrap();
        assert!(report.equal);
        assert_eq!(report.rhs_summands, 5);
    }

    #[test]
    fn verify_respects_cap() {
        let err = verify(Law::Main, &shape(&[5, 3]), 7).unwrap_err();
        match err {
            VerifyError::CapExceeded { total, cap, estimate } => {
                assert_eq!(total, 8);
                assert_eq!(cap, 7);
                assert!(estimate > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn composition_order_is_lexicographic() {
        assert_eq!(
            compositions(3),
            vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]
        );
        assert_eq!(compositions(5).len(), 16);
    }

    #[test]
    fn path_grid_report() {
        let report = verify_path_fg(3, 3);
        assert!(report.equal);
        assert_eq!(report.lhs_summands, 64 + 3);
    }

    #[test]
    fn seq_bijection_report() {
        let report = verify(Law::SeqBijection, &shape(&[2, 1]), 7).unwrap();
        assert!(report.equal, "mismatch: {:?}", report.mismatch);
        assert!(report.lhs_summands > 0);
        assert_eq!(report.lhs_summands, report.rhs_summands);
    }
}
