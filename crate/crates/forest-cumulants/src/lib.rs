//! Exact cumulant calculus for a commutative algebra carrying two
//! multiplications, written `*` and `.`.
//!
//! The crate builds canonical normal forms for the free algebra on
//! distinguishable generators ([`expr`]), enumerates the combinatorial
//! objects that index its cumulant expansions (set partitions, reduced
//! forests and their colourings, upward partition sequences), and verifies
//! the identities tying everything together by exhaustive expansion with
//! exact rational arithmetic ([`cumulants`]). A polynomial model with a
//! falling-factorial transported product ([`model`]) provides a numeric
//! second opinion, and [`cli`] exposes the whole thing as a command line
//! tool.

pub mod cli;
pub mod colouring;
pub mod cumulants;
pub mod expr;
pub mod forests;
pub mod latex;
pub mod model;
pub mod parse;
pub mod partitions;
pub mod paths;
pub mod sequences;

pub use expr::{Expr, Op, Shape, Slot, Term};
pub use forests::{ReducedForest, Tree};
pub use partitions::SetPartition;
