//! LaTeX rendering: expanded expressions, and unexpanded signed cumulant
//! sums in the nested kappa notation.

use num_traits::{One, Signed};

use crate::expr::{Expr, Op, Term};
use crate::forests::{ReducedForest, Tree};
use crate::partitions::SetPartition;

fn kappa_symbol(dual: bool) -> &'static str {
    if dual {
        "\\kappa^{\\ast}"
    } else {
        "\\kappa"
    }
}

/// A canonical term, with child products parenthesized.
pub fn latex_term(t: &Term) -> String {
    match t {
        Term::Leaf(s) => s.latex(),
        Term::Node(op, children) => children
            .iter()
            .map(|c| match c {
                Term::Leaf(s) => s.latex(),
                node => format!("\\left( {} \\right)", latex_term(node)),
            })
            .collect::<Vec<_>>()
            .join(&format!(" {} ", op.latex())),
    }
}

/// An expanded expression as a signed sum of terms.
pub fn latex_expr(e: &Expr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (t, c)) in e.iter().enumerate() {
        let negative = c.is_negative();
        let magnitude = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if !magnitude.is_one() {
            out.push_str(&format!("{magnitude} \\, "));
        }
        out.push_str(&latex_term(t));
    }
    out
}

fn latex_tree(t: &Tree, dual: bool) -> String {
    match t {
        Tree::Leaf(s) => s.latex(),
        Tree::Internal(children) => {
            let inner: Vec<String> = children.iter().map(|c| latex_tree(c, dual)).collect();
            format!("{}\\left( {} \\right)", kappa_symbol(dual), inner.join(", "))
        }
    }
}

/// The unexpanded forest cumulant: root cumulants joined by the combining
/// product (star for the plain form, dot for the dual).
pub fn latex_forest_cumulant(f: &ReducedForest, dual: bool) -> String {
    let combine = if dual { Op::Dot } else { Op::Star };
    f.trees()
        .iter()
        .map(|t| latex_tree(t, dual))
        .collect::<Vec<_>>()
        .join(&format!(" {} ", combine.latex()))
}

/// The unexpanded partition cumulant: per-block cumulants joined under
/// `combine`; singleton blocks collapse to their slot.
pub fn latex_partition_cumulant(nu: &SetPartition, combine: Op, dual: bool) -> String {
    nu.blocks()
        .iter()
        .map(|b| {
            if b.len() == 1 {
                b[0].latex()
            } else {
                let inner: Vec<String> = b.iter().map(|s| s.latex()).collect();
                format!("{}\\left( {} \\right)", kappa_symbol(dual), inner.join(", "))
            }
        })
        .collect::<Vec<_>>()
        .join(&format!(" {} ", combine.latex()))
}

/// Joins signed summands into one display line.
pub fn latex_signed_sum(summands: &[(i64, String)]) -> String {
    if summands.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (sign, body)) in summands.iter().enumerate() {
        if i == 0 {
            if *sign < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if *sign < 0 { " - " } else { " + " });
        }
        out.push_str(body);
    }
    out
}
