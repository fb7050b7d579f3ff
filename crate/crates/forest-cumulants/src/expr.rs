//! Canonical normal forms and exact arithmetic for the free commutative
//! algebra with two multiplications `*` and `.`.
//!
//! Elements are finite rational-linear combinations of [`Term`]s. A term is
//! an alternating product tree over [`Slot`]s: no node has a child with the
//! same operation (same-op children are flattened), single-child nodes are
//! collapsed, and children are kept sorted under a fixed total order. Two
//! terms are equal iff they are structurally identical, so expression
//! equality is plain coefficient-wise comparison.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact coefficient type; no floating point anywhere.
pub type Coeff = BigRational;

/// Convenience constructor for integer coefficients.
pub fn coeff(n: i64) -> Coeff {
    Coeff::from_integer(n.into())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    /// A product node must have at least one child.
    #[error("product node with no children")]
    EmptyNode,
}

/// One distinguishable generator `a_j^i`: `group` is the multiset index `i`,
/// `position` the index `j` inside it. Both are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    group: u32,
    position: u32,
}

impl Slot {
    /// Panics if either index is zero; slots are always 1-based.
    pub fn new(group: u32, position: u32) -> Slot {
        assert!(group >= 1 && position >= 1, "slot indices are 1-based");
        Slot { group, position }
    }

    pub fn group(&self) -> u32 {
        self.group
    }

    pub fn position(&self) -> u32 {
        self.position
    }

    /// Text label, e.g. `a2_1` for group 2, position 1.
    pub fn label(&self) -> String {
        format!("a{}_{}", self.group, self.position)
    }

    /// LaTeX label `a_{position}^{group}`.
    pub fn latex(&self) -> String {
        format!("a_{{{}}}^{{{}}}", self.position, self.group)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}_{}", self.group, self.position)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("shape must contain at least one group")]
    Empty,
    #[error("group sizes must be positive")]
    ZeroGroup,
}

/// Group sizes `(k_1, ..., k_n)`; expands to the slot set
/// `{(i, j) : i in [n], j in [k_i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    sizes: Vec<u32>,
}

impl Shape {
    pub fn new(sizes: Vec<u32>) -> Result<Shape, ShapeError> {
        if sizes.is_empty() {
            return Err(ShapeError::Empty);
        }
        if sizes.contains(&0) {
            return Err(ShapeError::ZeroGroup);
        }
        Ok(Shape { sizes })
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn group_count(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of slots.
    pub fn total(&self) -> usize {
        self.sizes.iter().map(|&k| k as usize).sum()
    }

    /// All slots in their canonical (group, position) order.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::with_capacity(self.total());
        for (i, &k) in self.sizes.iter().enumerate() {
            for j in 1..=k {
                out.push(Slot::new(i as u32 + 1, j));
            }
        }
        out
    }

    /// Slots of one group (1-based index).
    pub fn group_slots(&self, group: u32) -> Vec<Slot> {
        let k = self.sizes[(group - 1) as usize];
        (1..=k).map(|j| Slot::new(group, j)).collect()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The two commutative multiplications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Star,
    Dot,
}

impl Op {
    pub fn symbol(&self) -> char {
        match self {
            Op::Star => '*',
            Op::Dot => '.',
        }
    }

    pub fn latex(&self) -> &'static str {
        match self {
            Op::Star => "\\ast",
            Op::Dot => "\\cdot",
        }
    }
}

/// A canonical product tree. Use [`Term::leaf`] and [`Term::node`] to build
/// one; the constructors enforce flattening, collapsing and child order, so
/// every reachable value is in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Leaf(Slot),
    Node(Op, Vec<Term>),
}

impl Term {
    pub fn leaf(slot: Slot) -> Term {
        Term::Leaf(slot)
    }

    /// Canonicalizing node constructor: collapses single children, flattens
    /// children that carry the same operation, and sorts.
    pub fn node(op: Op, children: Vec<Term>) -> Result<Term, ExprError> {
        if children.is_empty() {
            return Err(ExprError::EmptyNode);
        }
        if children.len() == 1 {
            return Ok(children.into_iter().next().unwrap());
        }
        let mut flat = Vec::with_capacity(children.len());
        for child in children {
            match child {
                Term::Node(child_op, grand) if child_op == op => flat.extend(grand),
                other => flat.push(other),
            }
        }
        flat.sort();
        Ok(Term::Node(op, flat))
    }

    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        self.collect_slots(&mut out);
        out
    }

    fn collect_slots(&self, out: &mut Vec<Slot>) {
        match self {
            Term::Leaf(s) => out.push(*s),
            Term::Node(_, children) => {
                for c in children {
                    c.collect_slots(out);
                }
            }
        }
    }

    /// Checks every canonical-form invariant; used by tests as a validator.
    pub fn validate_canonical(&self) -> Result<(), String> {
        match self {
            Term::Leaf(_) => Ok(()),
            Term::Node(op, children) => {
                if children.len() < 2 {
                    return Err(format!("node with {} children", children.len()));
                }
                for pair in children.windows(2) {
                    if pair[0] > pair[1] {
                        return Err("children out of order".into());
                    }
                }
                for c in children {
                    if let Term::Node(child_op, _) = c {
                        if child_op == op {
                            return Err("same-op child not flattened".into());
                        }
                    }
                    c.validate_canonical()?;
                }
                Ok(())
            }
        }
    }
}

// Canonical total order: Leaf < Node; leaves by slot; nodes by
// (op, child count, lexicographic children).
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Leaf(a), Term::Leaf(b)) => a.cmp(b),
            (Term::Leaf(_), Term::Node(..)) => Ordering::Less,
            (Term::Node(..), Term::Leaf(_)) => Ordering::Greater,
            (Term::Node(op_a, ch_a), Term::Node(op_b, ch_b)) => op_a
                .cmp(op_b)
                .then(ch_a.len().cmp(&ch_b.len()))
                .then_with(|| ch_a.cmp(ch_b)),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Leaf(s) => write!(f, "{s}"),
            Term::Node(op, children) => {
                write!(f, "({}", op.symbol())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An unconstrained product tree, the input type of [`RawTerm::canonicalize`].
/// Handy for parsers and for tests that feed deliberately messy trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTerm {
    Leaf(Slot),
    Node(Op, Vec<RawTerm>),
}

impl RawTerm {
    /// Bottom-up normalization into a canonical [`Term`].
    pub fn canonicalize(&self) -> Result<Term, ExprError> {
        match self {
            RawTerm::Leaf(s) => Ok(Term::Leaf(*s)),
            RawTerm::Node(op, children) => {
                let done: Result<Vec<Term>, ExprError> =
                    children.iter().map(|c| c.canonicalize()).collect();
                Term::node(*op, done?)
            }
        }
    }
}

/// A finite rational-linear combination of canonical terms. Zero
/// coefficients are never stored, so structural equality is semantic
/// equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    terms: BTreeMap<Term, Coeff>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The generator embedding: a single slot with coefficient 1.
    pub fn generator(slot: Slot) -> Expr {
        Expr::from_term(Term::leaf(slot))
    }

    pub fn from_term(term: Term) -> Expr {
        let mut terms = BTreeMap::new();
        terms.insert(term, Coeff::one());
        Expr { terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, term: &Term) -> Coeff {
        self.terms.get(term).cloned().unwrap_or_else(Coeff::zero)
    }

    fn insert(&mut self, term: Term, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(term) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (t, c) in other.iter() {
            out.insert(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (t, c) in other.iter() {
            out.insert(t.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t.clone(), -c.clone()))
            .collect();
        Expr { terms }
    }

    pub fn scale(&self, q: &Coeff) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t.clone(), c * q))
            .collect();
        Expr { terms }
    }

    /// Bilinear extension of the termwise product under `op`.
    pub fn multiply(&self, op: Op, other: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (t1, c1) in self.iter() {
            for (t2, c2) in other.iter() {
                let term = Term::node(op, vec![t1.clone(), t2.clone()])
                    .expect("two children is never empty");
                out.insert(term, c1 * c2);
            }
        }
        out
    }

    pub fn star(&self, other: &Expr) -> Expr {
        self.multiply(Op::Star, other)
    }

    pub fn dot(&self, other: &Expr) -> Expr {
        self.multiply(Op::Dot, other)
    }

    /// First term (in canonical order) on which two expressions differ,
    /// with both coefficients. `None` when the expressions are equal.
    pub fn first_difference(&self, other: &Expr) -> Option<(Term, Coeff, Coeff)> {
        let mut keys: Vec<&Term> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let a = self.coefficient(k);
            let b = other.coefficient(k);
            if a != b {
                return Some((k.clone(), a, b));
            }
        }
        None
    }

    /// Canonical-form validator for tests: no zero coefficients, every term
    /// canonical.
    pub fn validate_canonical(&self) -> Result<(), String> {
        for (t, c) in self.iter() {
            if c.is_zero() {
                return Err("stored zero coefficient".into());
            }
            t.validate_canonical()?;
        }
        Ok(())
    }
}

/// Product of a nonempty sequence of expressions under `op`.
pub fn product(op: Op, factors: impl IntoIterator<Item = Expr>) -> Expr {
    let mut iter = factors.into_iter();
    let first = iter.next().expect("product of an empty sequence");
    iter.fold(first, |acc, f| acc.multiply(op, &f))
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl fmt::Display for Expr {
    /// Signed-sum rendering in canonical term order, e.g.
    /// `(* a1_1 a1_2) - 2 (. a1_1 a1_2)`. The zero expression prints `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if !magnitude.is_one() {
                write!(f, "{magnitude} ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}
