//! Command-line front end: enumeration, expansion, verification and the
//! polynomial-model checks, with deterministic text or JSON output.
//!
//! Exit codes: 0 success, 1 a law failed, 2 usage error, 3 size cap
//! exceeded. JSON goes to stdout, diagnostics to stderr.

use std::collections::BTreeMap;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::colouring::{enumerate_colourings, ColouringFilter};
use crate::cumulants::{
    self, compositions, dual_lhs_product, expand_dual_analogue, expand_dual_main,
    expand_ls_analogue, expand_ls_classical, expand_main, group_dot_products,
    group_star_products, kappa_of_partition_with, ClassicalVariant, CumulantEngine, Law,
    LawReport, VerifyError,
};
use crate::expr::{product, Expr, Op, Shape, Slot};
use crate::forests::{
    enumerate_reduced_forests, enumerate_reduced_trees, is_mixing_forest,
    is_strongly_mixing_forest, reduced_counts, w_of_forest, ReducedForest,
};
use crate::latex;
use crate::model::{self, evaluate, model_kappa, model_kappa_star, Poly};
use crate::partitions::{
    enumerate_set_partitions, is_mixing_partition, is_strongly_mixing, SetPartition,
};
use crate::sequences::enumerate_sequences;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LAW_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

const DEFAULT_CAP: usize = 7;

#[derive(Parser, Debug)]
#[command(
    name = "forest-cumulants",
    version,
    about = "Exact cumulant calculus for an algebra with two multiplications"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Partitions,
    Forests,
    Trees,
    Colourings,
    Sequences,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    All,
    Mixing,
    #[value(name = "strongly-mixing")]
    StronglyMixing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stream combinatorial objects over a shape, with a final count line.
    Enumerate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Replace the default size cap of 7 slots.
        #[arg(long = "unsafe-cap")]
        unsafe_cap: Option<usize>,
    },
    /// Render the signed expansion of a law over a shape.
    Expand {
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, default_value = "main")]
        law: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long = "unsafe-cap")]
        unsafe_cap: Option<usize>,
    },
    /// Check laws exactly, over one shape or a sweep of all compositions.
    Verify {
        #[arg(long)]
        law: String,
        #[arg(long, value_parser = parse_shape)]
        shape: Option<Shape>,
        /// Sweep every composition of every total up to this size.
        #[arg(long)]
        max_size: Option<usize>,
        /// Grid arity for the path-function law.
        #[arg(long)]
        arity: Option<usize>,
        /// Grid coordinate bound for the path-function law.
        #[arg(long)]
        max_coord: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long = "unsafe-cap")]
        unsafe_cap: Option<usize>,
    },
    /// Evaluate both sides of a law in the polynomial model under seeded
    /// random assignments.
    Model {
        #[arg(long)]
        law: String,
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Negate the right-hand side first (negative-control hook).
        #[arg(long, hide = true)]
        corrupt_sign: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long = "unsafe-cap")]
        unsafe_cap: Option<usize>,
    },
}

fn parse_shape(input: &str) -> Result<Shape, String> {
    let sizes: Result<Vec<u32>, _> = input.split(',').map(|p| p.trim().parse()).collect();
    let sizes = sizes.map_err(|e| format!("bad shape '{input}': {e}"))?;
    Shape::new(sizes).map_err(|e| e.to_string())
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn cap_error(shape: &Shape, cap: usize) -> i32 {
    let estimate = reduced_counts(shape.total()).1;
    let amount = if estimate == u128::MAX {
        "astronomically many".to_string()
    } else {
        format!("roughly {estimate}")
    };
    eprintln!(
        "error: shape {shape} has {} slots, above the cap of {cap} \
         ({amount} reduced forests); pass --unsafe-cap to override",
        shape.total()
    );
    EXIT_CAP
}

fn check_cap(shape: &Shape, unsafe_cap: Option<usize>) -> Result<usize, i32> {
    let cap = unsafe_cap.unwrap_or(DEFAULT_CAP);
    if shape.total() > cap {
        Err(cap_error(shape, cap))
    } else {
        Ok(cap)
    }
}

/// Laws with a signed-sum expansion the `expand` command can render.
fn expandable(law: &str) -> bool {
    matches!(
        law,
        "main" | "ls-analogue" | "dual-main" | "dual-analogue" | "moment-cumulant"
            | "moment-cumulant-star"
    )
}

/// Expands a law selection string, accepting the family aliases.
fn select_laws(selector: &str) -> Option<Vec<Law>> {
    match selector {
        "dual" => Some(vec![Law::DualMain, Law::DualAnalogue]),
        "ls-classical" => Some(vec![Law::LsClassicalDot, Law::LsClassicalStar]),
        name => Law::parse(name).map(|l| vec![l]),
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Enumerate {
            kind,
            shape,
            filter,
            format,
            unsafe_cap,
        } => cmd_enumerate(kind, &shape, filter, format, unsafe_cap),
        Command::Expand {
            shape,
            law,
            format,
            unsafe_cap,
        } => cmd_expand(&shape, &law, format, unsafe_cap),
        Command::Verify {
            law,
            shape,
            max_size,
            arity,
            max_coord,
            format,
            unsafe_cap,
        } => cmd_verify(&law, shape, max_size, arity, max_coord, format, unsafe_cap),
        Command::Model {
            law,
            shape,
            seed,
            trials,
            corrupt_sign,
            format,
            unsafe_cap,
        } => cmd_model(&law, &shape, seed, trials, corrupt_sign, format, unsafe_cap),
    }
}

struct Listing {
    texts: Vec<String>,
    jsons: Vec<Value>,
}

impl Listing {
    fn push(&mut self, text: String, json: Value) {
        self.texts.push(text);
        self.jsons.push(json);
    }
}

fn cmd_enumerate(
    kind: Kind,
    shape: &Shape,
    filter: Filter,
    format: Format,
    unsafe_cap: Option<usize>,
) -> i32 {
    if let Err(code) = check_cap(shape, unsafe_cap) {
        return code;
    }
    if format == Format::Latex {
        return usage_error("enumerate supports text and json output");
    }
    let mut listing = Listing {
        texts: Vec::new(),
        jsons: Vec::new(),
    };
    match kind {
        Kind::Partitions => {
            let keep = |nu: &SetPartition| match filter {
                Filter::All => true,
                Filter::Mixing => is_mixing_partition(nu, shape),
                Filter::StronglyMixing => is_strongly_mixing(nu, shape),
            };
            for nu in enumerate_set_partitions(&shape.slots()).expect("nonempty shape") {
                if keep(&nu) {
                    listing.push(nu.to_string(), nu.to_json());
                }
            }
        }
        Kind::Forests | Kind::Trees => {
            let forests: Vec<ReducedForest> = if kind == Kind::Trees {
                enumerate_reduced_trees(&shape.slots())
                    .expect("nonempty shape")
                    .into_iter()
                    .map(|t| ReducedForest::new(vec![t]))
                    .collect()
            } else {
                enumerate_reduced_forests(&shape.slots()).expect("nonempty shape")
            };
            for f in forests {
                let keep = match filter {
                    Filter::All => true,
                    Filter::Mixing => is_mixing_forest(&f, shape),
                    Filter::StronglyMixing => is_strongly_mixing_forest(&f, shape),
                };
                if keep {
                    let weight = match w_of_forest(&f, shape) {
                        crate::forests::ForestWeight::Finite(w) => format!("w={w}"),
                        crate::forests::ForestWeight::Infinite => "w=inf".to_string(),
                    };
                    listing.push(
                        format!("{f}  [{weight}]"),
                        json!({"forest": f.to_json(), "w": w_of_forest(&f, shape).finite()}),
                    );
                }
            }
        }
        Kind::Colourings => {
            let colour_filter = match filter {
                Filter::All => ColouringFilter::GapFree,
                Filter::Mixing => ColouringFilter::WeaklyMixing,
                Filter::StronglyMixing => {
                    return usage_error(
                        "colourings support the filters 'all' (gap-free) and 'mixing' (weakly-mixing)",
                    )
                }
            };
            for f in enumerate_reduced_forests(&shape.slots()).expect("nonempty shape") {
                for c in enumerate_colourings(&f, shape, colour_filter) {
                    let assignments: Vec<String> = c
                        .colours()
                        .iter()
                        .map(|(id, colour)| {
                            format!("{}={colour}", crate::colouring::vertex_id_string(id))
                        })
                        .collect();
                    listing.push(
                        format!("{f} :: {}", assignments.join(",")),
                        json!({"forest": f.to_json(), "colours": c.to_json(), "length": c.length()}),
                    );
                }
            }
        }
        Kind::Sequences => {
            let require_mixing = match filter {
                Filter::All => false,
                Filter::Mixing => true,
                Filter::StronglyMixing => {
                    return usage_error(
                        "sequences support the filters 'all' and 'mixing' (mixing first level)",
                    )
                }
            };
            for w in enumerate_sequences(shape, require_mixing) {
                listing.push(w.to_string(), w.to_json());
            }
        }
    }

    match format {
        Format::Text => {
            for line in &listing.texts {
                println!("{line}");
            }
            println!("count: {}", listing.texts.len());
        }
        Format::Json => {
            let out = json!({
                "kind": format!("{kind:?}").to_lowercase(),
                "shape": shape.sizes().to_vec(),
                "filter": match filter {
                    Filter::All => "all",
                    Filter::Mixing => "mixing",
                    Filter::StronglyMixing => "strongly-mixing",
                },
                "count": listing.jsons.len(),
                "items": listing.jsons,
            });
            println!("{out}");
        }
        Format::Latex => unreachable!("rejected above"),
    }
    EXIT_OK
}

/// The expanded canonical expression of a law's signed sum.
fn expansion_of(law: &str, shape: &Shape) -> Expr {
    match law {
        "main" => expand_main(shape),
        "ls-analogue" => expand_ls_analogue(shape),
        "dual-main" => expand_dual_main(shape),
        "dual-analogue" => expand_dual_analogue(shape),
        "moment-cumulant" => {
            let mut engine = CumulantEngine::new();
            let mut out = Expr::zero();
            for nu in enumerate_set_partitions(&shape.slots()).expect("nonempty shape") {
                out = out.add(&kappa_of_partition_with(&mut engine, &nu, Op::Dot, false));
            }
            out
        }
        "moment-cumulant-star" => {
            let mut engine = CumulantEngine::new();
            let mut out = Expr::zero();
            for nu in enumerate_set_partitions(&shape.slots()).expect("nonempty shape") {
                out = out.add(&kappa_of_partition_with(&mut engine, &nu, Op::Star, true));
            }
            out
        }
        other => unreachable!("unexpandable law {other}"),
    }
}

/// The unexpanded signed summands of a law, in kappa notation.
fn latex_summands(law: &str, shape: &Shape) -> Vec<(i64, String)> {
    let forest_sum = |strong: bool, dual: bool| -> Vec<(i64, String)> {
        enumerate_reduced_forests(&shape.slots())
            .expect("nonempty shape")
            .into_iter()
            .filter(|f| {
                if strong {
                    is_strongly_mixing_forest(f, shape)
                } else {
                    is_mixing_forest(f, shape)
                }
            })
            .map(|f| {
                let sign = w_of_forest(&f, shape).sign().expect("mixing forests");
                (sign, latex::latex_forest_cumulant(&f, dual))
            })
            .collect()
    };
    match law {
        "main" => forest_sum(false, false),
        "ls-analogue" => forest_sum(true, false),
        "dual-main" => forest_sum(false, true),
        "dual-analogue" => forest_sum(true, true),
        "moment-cumulant" => enumerate_set_partitions(&shape.slots())
            .expect("nonempty shape")
            .map(|nu| (1, latex::latex_partition_cumulant(&nu, Op::Dot, false)))
            .collect(),
        "moment-cumulant-star" => enumerate_set_partitions(&shape.slots())
            .expect("nonempty shape")
            .map(|nu| (1, latex::latex_partition_cumulant(&nu, Op::Star, true)))
            .collect(),
        other => unreachable!("unexpandable law {other}"),
    }
}

fn cmd_expand(shape: &Shape, law: &str, format: Format, unsafe_cap: Option<usize>) -> i32 {
    if !expandable(law) {
        return usage_error(&format!(
            "law '{law}' has no expansion form; expandable laws: main, ls-analogue, \
             dual-main, dual-analogue, moment-cumulant, moment-cumulant-star"
        ));
    }
    if let Err(code) = check_cap(shape, unsafe_cap) {
        return code;
    }
    match format {
        Format::Latex => {
            let summands = latex_summands(law, shape);
            println!("{}", latex::latex_signed_sum(&summands));
        }
        Format::Text => {
            println!("{}", expansion_of(law, shape));
        }
        Format::Json => {
            let e = expansion_of(law, shape);
            let terms: Vec<Value> = e
                .iter()
                .map(|(t, c)| json!({"coeff": c.to_string(), "term": t.to_string()}))
                .collect();
            let out = json!({
                "law": law,
                "shape": shape.sizes().to_vec(),
                "term_count": e.term_count(),
                "expr": e.to_string(),
                "terms": terms,
            });
            println!("{out}");
        }
    }
    EXIT_OK
}

fn report_text(report: &LawReport) -> String {
    let status = if report.equal { "PASS" } else { "FAIL" };
    let shape = report
        .shape
        .as_ref()
        .map(|s| s.to_string())
        .unwrap_or_else(|| "-".to_string());
    let mut line = format!(
        "{status} {} shape={shape} lhs_terms={} rhs_terms={} summands={}/{} millis={}",
        report.law, report.lhs_terms, report.rhs_terms, report.lhs_summands,
        report.rhs_summands, report.millis
    );
    if let Some(m) = &report.mismatch {
        line.push_str(&format!(
            "  mismatch at {} (lhs {}, rhs {})",
            m.witness, m.lhs_value, m.rhs_value
        ));
    }
    line
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    law_selector: &str,
    shape: Option<Shape>,
    max_size: Option<usize>,
    arity: Option<usize>,
    max_coord: Option<i64>,
    format: Format,
    unsafe_cap: Option<usize>,
) -> i32 {
    let Some(laws) = select_laws(law_selector) else {
        return usage_error(&format!("unknown law '{law_selector}'"));
    };
    if format == Format::Latex {
        return usage_error("verify supports text and json output");
    }
    let cap = unsafe_cap.unwrap_or(DEFAULT_CAP);

    let mut reports: Vec<LawReport> = Vec::new();
    for law in laws {
        if law == Law::PathFg {
            let (Some(arity), Some(max_coord)) = (arity, max_coord) else {
                return usage_error("law path-fg needs --arity and --max-coord");
            };
            reports.push(cumulants::verify_path_fg(arity, max_coord));
            continue;
        }
        let shapes: Vec<Shape> = match (&shape, max_size) {
            (Some(s), None) => vec![s.clone()],
            (None, Some(n)) => {
                if n > cap {
                    eprintln!(
                        "error: --max-size {n} is above the cap of {cap}; \
                         pass --unsafe-cap to override"
                    );
                    return EXIT_CAP;
                }
                (1..=n)
                    .flat_map(compositions)
                    .map(|sizes| Shape::new(sizes).expect("compositions are valid"))
                    .collect()
            }
            _ => {
                return usage_error("pass exactly one of --shape or --max-size");
            }
        };
        for s in shapes {
            match cumulants::verify(law, &s, cap) {
                Ok(report) => reports.push(report),
                Err(VerifyError::CapExceeded { .. }) => return cap_error(&s, cap),
                Err(VerifyError::NeedsGrid(name)) => {
                    return usage_error(&format!("law {name} needs --arity and --max-coord"))
                }
            }
        }
    }

    let all_equal = reports.iter().all(|r| r.equal);
    match format {
        Format::Json => {
            let out = Value::Array(reports.iter().map(LawReport::to_json).collect());
            println!("{out}");
        }
        _ => {
            for r in &reports {
                println!("{}", report_text(r));
            }
        }
    }
    if all_equal {
        EXIT_OK
    } else {
        EXIT_LAW_VIOLATED
    }
}

/// Laws the model command can evaluate, with both sides built symbolically
/// and the left side recomputed directly on polynomials as a third route.
fn model_sides(law: Law, shape: &Shape) -> Option<(Expr, Expr)> {
    let mut engine = CumulantEngine::new();
    let sides = match law {
        Law::Main => (cumulants::lhs_product(shape), expand_main(shape)),
        Law::DualMain => (dual_lhs_product(shape), expand_dual_main(shape)),
        Law::LsAnalogue => (
            engine.kappa_star(&group_star_products(shape)).expect("groups"),
            expand_ls_analogue(shape),
        ),
        Law::DualAnalogue => (
            engine.kappa(&group_dot_products(shape)).expect("groups"),
            expand_dual_analogue(shape),
        ),
        Law::LsClassicalDot => expand_ls_classical(shape, ClassicalVariant::DotCombined),
        Law::LsClassicalStar => expand_ls_classical(shape, ClassicalVariant::StarCombined),
        Law::MomentCumulant => {
            let slots = shape.slots();
            let gens: Vec<Expr> = slots.iter().map(|&s| Expr::generator(s)).collect();
            (product(Op::Star, gens), expansion_of("moment-cumulant", shape))
        }
        Law::MomentCumulantStar => {
            let slots = shape.slots();
            let gens: Vec<Expr> = slots.iter().map(|&s| Expr::generator(s)).collect();
            (
                product(Op::Dot, gens),
                expansion_of("moment-cumulant-star", shape),
            )
        }
        _ => return None,
    };
    Some(sides)
}

/// The left side computed directly in the model, never through `Expr`.
fn model_direct_lhs(law: Law, shape: &Shape, assignment: &BTreeMap<Slot, Poly>) -> Poly {
    let group_polys = |op: Op| -> Vec<Poly> {
        (1..=shape.group_count() as u32)
            .map(|g| {
                let mut polys = shape.group_slots(g).into_iter().map(|s| assignment[&s].clone());
                let first = polys.next().expect("groups are nonempty");
                polys.fold(first, |acc, p| match op {
                    Op::Star => model::star(&acc, &p),
                    Op::Dot => model::dot(&acc, &p),
                })
            })
            .collect()
    };
    let fold = |items: Vec<Poly>, op: Op| -> Poly {
        let mut iter = items.into_iter();
        let first = iter.next().expect("nonempty");
        iter.fold(first, |acc, p| match op {
            Op::Star => model::star(&acc, &p),
            Op::Dot => model::dot(&acc, &p),
        })
    };
    match law {
        Law::Main => fold(group_polys(Op::Star), Op::Dot),
        Law::DualMain => fold(group_polys(Op::Dot), Op::Star),
        Law::LsAnalogue => model_kappa_star(&group_polys(Op::Star)).expect("groups"),
        Law::DualAnalogue => model_kappa(&group_polys(Op::Dot)).expect("groups"),
        Law::LsClassicalDot => model_kappa(&group_polys(Op::Star)).expect("groups"),
        Law::LsClassicalStar => model_kappa_star(&group_polys(Op::Dot)).expect("groups"),
        Law::MomentCumulant => {
            let all: Vec<Poly> = shape.slots().iter().map(|s| assignment[s].clone()).collect();
            fold(all, Op::Star)
        }
        Law::MomentCumulantStar => {
            let all: Vec<Poly> = shape.slots().iter().map(|s| assignment[s].clone()).collect();
            fold(all, Op::Dot)
        }
        _ => unreachable!("filtered by model_sides"),
    }
}

fn random_assignment(rng: &mut ChaCha8Rng, shape: &Shape) -> BTreeMap<Slot, Poly> {
    shape
        .slots()
        .into_iter()
        .map(|slot| {
            let degree = rng.gen_range(0..=3usize);
            let coeffs = (0..=degree)
                .map(|_| {
                    crate::expr::Coeff::new(
                        rng.gen_range(-6i64..=6).into(),
                        rng.gen_range(1i64..=4).into(),
                    )
                })
                .collect();
            (slot, Poly::from_coeffs(coeffs))
        })
        .collect()
}

fn echo_assignment(assignment: &BTreeMap<Slot, Poly>) -> String {
    assignment
        .iter()
        .map(|(s, p)| format!("{s} -> {p}"))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Informational only: how the observed forest-cumulant degrees compare to
/// the structural bound under this assignment's degrees.
fn degree_diagnostic(shape: &Shape, assignment: &BTreeMap<Slot, Poly>) {
    let degrees: BTreeMap<Slot, i64> = assignment
        .iter()
        .map(|(&s, p)| (s, p.degree().map_or(0, |d| d as i64)))
        .collect();
    let mut engine = CumulantEngine::new();
    let mut worst: Option<i64> = None;
    let mut forests = 0usize;
    for f in enumerate_reduced_forests(&shape.slots()).expect("nonempty shape") {
        if !is_mixing_forest(&f, shape) {
            continue;
        }
        forests += 1;
        let value = cumulants::kappa_of_forest_with(&mut engine, &f, false);
        let poly = evaluate(&value, assignment).expect("assignment is total");
        if let Some(actual) = poly.degree() {
            let slack = cumulants::degree_bound_of_forest(&f, &degrees) - actual as i64;
            worst = Some(worst.map_or(slack, |w: i64| w.min(slack)));
        }
    }
    match worst {
        Some(w) => eprintln!(
            "diagnostic: over {forests} mixing forests the bound minus the observed \
             degree is at least {w} (informational, not asserted)"
        ),
        None => eprintln!("diagnostic: all forest cumulants vanished under this assignment"),
    }
}

/// Runs one law through the model under `trials` seeded assignments,
/// comparing the evaluated symbolic sides and the direct model computation.
/// Returns the first failing trial, rendered with its assignment.
pub fn model_check(
    law: Law,
    shape: &Shape,
    seed: u64,
    trials: usize,
    corrupt_sign: bool,
) -> Result<(), String> {
    let Some((lhs, rhs)) = model_sides(law, shape) else {
        return Err(format!("law '{}' has no model check", law.name()));
    };
    let rhs = if corrupt_sign { rhs.neg() } else { rhs };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let assignment = random_assignment(&mut rng, shape);
        let lhs_value = evaluate(&lhs, &assignment).expect("assignment is total");
        let rhs_value = evaluate(&rhs, &assignment).expect("assignment is total");
        let direct = model_direct_lhs(law, shape, &assignment);
        if lhs_value != rhs_value || lhs_value != direct {
            return Err(format!(
                "trial {trial}: lhs={lhs_value} rhs={rhs_value} direct={direct} under {}",
                echo_assignment(&assignment)
            ));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_model(
    law_selector: &str,
    shape: &Shape,
    seed: u64,
    trials: usize,
    corrupt_sign: bool,
    format: Format,
    unsafe_cap: Option<usize>,
) -> i32 {
    let Some(laws) = select_laws(law_selector) else {
        return usage_error(&format!("unknown law '{law_selector}'"));
    };
    if let Err(code) = check_cap(shape, unsafe_cap) {
        return code;
    }
    if format == Format::Latex {
        return usage_error("model supports text and json output");
    }

    let mut results = Vec::new();
    for law in laws {
        if law == Law::Main && trials > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            degree_diagnostic(shape, &random_assignment(&mut rng, shape));
        }
        if !matches!(
            law,
            Law::Main
                | Law::DualMain
                | Law::LsAnalogue
                | Law::DualAnalogue
                | Law::LsClassicalDot
                | Law::LsClassicalStar
                | Law::MomentCumulant
                | Law::MomentCumulantStar
        ) {
            return usage_error(&format!("law '{}' has no model check", law.name()));
        }
        let failed = model_check(law, shape, seed, trials, corrupt_sign).err();
        results.push((law, failed));
    }

    let ok = results.iter().all(|(_, f)| f.is_none());
    match format {
        Format::Json => {
            let out: Vec<Value> = results
                .iter()
                .map(|(law, failed)| {
                    json!({
                        "law": law.name(),
                        "shape": shape.sizes().to_vec(),
                        "seed": seed,
                        "trials": trials,
                        "equal": failed.is_none(),
                        "failure": failed,
                    })
                })
                .collect();
            println!("{}", Value::Array(out));
        }
        _ => {
            for (law, failed) in &results {
                match failed {
                    None => println!(
                        "PASS {} shape={shape} seed={seed}: {trials}/{trials} assignments agree",
                        law.name()
                    ),
                    Some(msg) => println!("FAIL {} shape={shape} seed={seed}: {msg}", law.name()),
                }
            }
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_LAW_VIOLATED
    }
}
