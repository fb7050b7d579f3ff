//! A concrete algebra with two multiplications, used as a numeric oracle:
//! single-variable rational polynomials under the ordinary product and
//! under the product transported through the falling-factorial basis map.
//!
//! The basis map sends `x^n` to `x(x-1)...(x-n+1)`. It is linear but not
//! multiplicative, so the transported product genuinely differs from the
//! ordinary one (for instance `x * x = x^2 + x` there), which keeps the
//! model from collapsing the two multiplications.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::{Coeff, Expr, Op, Slot, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("no polynomial assigned to slot {0}")]
    MissingSlot(String),
    #[error("cumulants need at least one argument")]
    EmptyArguments,
}

/// Dense univariate polynomial over exact rationals; trailing zeros are
/// always trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Coeff>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn from_coeffs(coeffs: Vec<Coeff>) -> Poly {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Coeff) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// The variable `x`.
    pub fn x() -> Poly {
        Poly::from_coeffs(vec![Coeff::zero(), Coeff::one()])
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficient(&self, power: usize) -> Coeff {
        self.coeffs.get(power).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coefficient(i) + other.coefficient(i))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Coeff) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Coeff::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl std::fmt::Display for Poly {
    /// Highest power first, e.g. `3/2 x^2 - x + 5`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for power in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[power];
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let magnitude = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = power == 0 || !magnitude.is_one();
            if show_coeff {
                write!(f, "{magnitude}")?;
                if power > 0 {
                    write!(f, " ")?;
                }
            }
            match power {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{power}")?,
            }
        }
        Ok(())
    }
}

/// The falling factorial `x(x-1)...(x-n+1)` as an ordinary polynomial.
pub fn falling_factorial(n: usize) -> Poly {
    let mut out = Poly::constant(Coeff::one());
    for k in 0..n {
        let factor = Poly::from_coeffs(vec![-Coeff::from_integer((k as i64).into()), Coeff::one()]);
        out = out.mul(&factor);
    }
    out
}

/// The basis map: `x^n` goes to the `n`-th falling factorial, extended
/// linearly.
pub fn phi(p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (n, c) in p.coeffs.iter().enumerate() {
        out = out.add(&falling_factorial(n).scale(c));
    }
    out
}

/// Inverse basis map: expand in the falling-factorial basis (peeling the
/// monic leading term degree by degree) and reinterpret the coordinates as
/// monomial coefficients.
pub fn phi_inverse(p: &Poly) -> Poly {
    let mut rest = p.clone();
    let mut coords: BTreeMap<usize, Coeff> = BTreeMap::new();
    while let Some(deg) = rest.degree() {
        let lead = rest.coefficient(deg);
        rest = rest.sub(&falling_factorial(deg).scale(&lead));
        coords.insert(deg, lead);
        debug_assert!(rest.degree().is_none_or(|d| d < deg));
    }
    let len = coords.keys().next_back().map_or(0, |d| d + 1);
    let mut coeffs = vec![Coeff::zero(); len];
    for (deg, c) in coords {
        coeffs[deg] = c;
    }
    Poly::from_coeffs(coeffs)
}

/// Ordinary polynomial product: the dot multiplication of the model.
pub fn dot(p: &Poly, q: &Poly) -> Poly {
    p.mul(q)
}

/// Transported product: multiply in the falling-factorial basis. Being a
/// transported ring product it is commutative and associative.
pub fn star(p: &Poly, q: &Poly) -> Poly {
    phi_inverse(&phi(p).mul(&phi(q)))
}

/// Interprets an expression in the model under a slot assignment.
pub fn evaluate(e: &Expr, assignment: &BTreeMap<Slot, Poly>) -> Result<Poly, ModelError> {
    let mut out = Poly::zero();
    for (term, coeff) in e.iter() {
        out = out.add(&evaluate_term(term, assignment)?.scale(coeff));
    }
    Ok(out)
}

fn evaluate_term(t: &Term, assignment: &BTreeMap<Slot, Poly>) -> Result<Poly, ModelError> {
    match t {
        Term::Leaf(s) => assignment
            .get(s)
            .cloned()
            .ok_or_else(|| ModelError::MissingSlot(s.label())),
        Term::Node(op, children) => {
            let mut values = children.iter().map(|c| evaluate_term(c, assignment));
            let mut acc = values.next().expect("nodes have children")?;
            for v in values {
                let v = v?;
                acc = match op {
                    Op::Star => star(&acc, &v),
                    Op::Dot => dot(&acc, &v),
                };
            }
            Ok(acc)
        }
    }
}

/// The cumulant recursion run directly on model elements; an oracle for the
/// symbolic expansions that never touches `Expr`.
pub fn model_kappa(args: &[Poly]) -> Result<Poly, ModelError> {
    model_cumulant(args, false)
}

pub fn model_kappa_star(args: &[Poly]) -> Result<Poly, ModelError> {
    model_cumulant(args, true)
}

fn model_cumulant(args: &[Poly], dual: bool) -> Result<Poly, ModelError> {
    if args.is_empty() {
        return Err(ModelError::EmptyArguments);
    }
    if args.len() == 1 {
        return Ok(args[0].clone());
    }
    let moment = |items: &[Poly]| {
        let mut acc = items[0].clone();
        for p in &items[1..] {
            acc = if dual { dot(&acc, p) } else { star(&acc, p) };
        }
        acc
    };
    let combine = |factors: &[Poly]| {
        let mut acc = factors[0].clone();
        for p in &factors[1..] {
            acc = if dual { star(&acc, p) } else { dot(&acc, p) };
        }
        acc
    };
    let mut result = moment(args);
    for rgs in crate::partitions::restricted_growth_strings(args.len()) {
        let blocks = crate::partitions::group_by_rgs(args, &rgs);
        if blocks.len() < 2 {
            continue;
        }
        let factors: Result<Vec<Poly>, ModelError> =
            blocks.iter().map(|b| model_cumulant(b, dual)).collect();
        result = result.sub(&combine(&factors?));
    }
    Ok(result)
}
