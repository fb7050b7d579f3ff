//! Text grammar for terms and expressions.
//!
//! ```text
//! expr  := "0" | signed (("+"|"-") signed)*
//! signed := [rational] term          (coefficient 1 may be omitted)
//! term  := slot | "(" op term term+ ")"
//! op    := "*" | "."
//! slot  := "a" GROUP "_" POS         (decimal positive integers)
//! ```
//!
//! Rendering (the `Display` impls in [`crate::expr`]) always emits canonical
//! order, and `parse_expr(render(e)) == e`.

use crate::expr::{Coeff, Expr, Op, RawTerm, Slot, Term};
use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Cursor<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Cursor<'a> {
        Cursor { input, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        Ok(self.input[start..self.pos].parse().expect("digits"))
    }

    fn positive(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        let n = self.integer()?;
        let n: u32 = n.try_into().map_err(|_| ParseError {
            pos: at,
            msg: "index too large".into(),
        })?;
        if n == 0 {
            return Err(ParseError {
                pos: at,
                msg: "index must be positive".into(),
            });
        }
        Ok(n)
    }

    fn slot(&mut self) -> Result<Slot, ParseError> {
        self.expect('a')?;
        let group = self.positive()?;
        self.expect('_')?;
        let position = self.positive()?;
        Ok(Slot::new(group, position))
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('a') => Ok(RawTerm::Leaf(self.slot()?)),
            Some('(') => {
                self.bump();
                self.skip_ws();
                let op = match self.peek() {
                    Some('*') => Op::Star,
                    Some('.') => Op::Dot,
                    _ => return Err(self.error("expected '*' or '.'")),
                };
                self.bump();
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(')') => {
                            if children.len() < 2 {
                                return Err(self.error("product needs at least two factors"));
                            }
                            self.bump();
                            break;
                        }
                        Some(_) => children.push(self.term()?),
                        None => return Err(self.error("unterminated product")),
                    }
                }
                Ok(RawTerm::Node(op, children))
            }
            _ => Err(self.error("expected a slot or '('")),
        }
    }

    // "p" or "p/q"; only called when a digit is already in view.
    fn rational(&mut self) -> Result<Coeff, ParseError> {
        let numer = self.integer()?;
        if self.peek() == Some('/') {
            self.bump();
            let at = self.pos;
            let denom = self.integer()?;
            if denom == BigInt::from(0) {
                return Err(ParseError {
                    pos: at,
                    msg: "zero denominator".into(),
                });
            }
            Ok(Coeff::new(numer, denom))
        } else {
            Ok(Coeff::from_integer(numer))
        }
    }
}

/// Parses a single canonical term.
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(input);
    let raw = cur.term()?;
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.error("trailing input"));
    }
    raw.canonicalize().map_err(|e| ParseError {
        pos: 0,
        msg: e.to_string(),
    })
}

/// Parses a signed sum of coefficients and terms into an expression.
pub fn parse_expr(input: &str) -> Result<Expr, ParseError> {
    let mut cur = Cursor::new(input);
    cur.skip_ws();
    if cur.peek() == Some('0') {
        cur.bump();
        cur.skip_ws();
        if cur.peek().is_some() {
            return Err(cur.error("trailing input after 0"));
        }
        return Ok(Expr::zero());
    }
    let mut out = Expr::zero();
    let mut first = true;
    loop {
        cur.skip_ws();
        let sign = match cur.peek() {
            Some('-') => {
                cur.bump();
                -Coeff::one()
            }
            Some('+') if !first => {
                cur.bump();
                Coeff::one()
            }
            Some(_) if first => Coeff::one(),
            None if first => return Err(cur.error("empty expression")),
            None => break,
            Some(c) => return Err(cur.error(format!("unexpected '{c}'"))),
        };
        cur.skip_ws();
        let magnitude = match cur.peek() {
            Some(c) if c.is_ascii_digit() => cur.rational()?,
            _ => Coeff::one(),
        };
        cur.skip_ws();
        let raw = cur.term()?;
        let term = raw.canonicalize().map_err(|e| ParseError {
            pos: cur.pos,
            msg: e.to_string(),
        })?;
        out = out.add(&Expr::from_term(term).scale(&(sign * magnitude)));
        first = false;
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{coeff, Expr, Op, Slot, Term};

    fn s(g: u32, p: u32) -> Slot {
        Slot::new(g, p)
    }

    #[test]
    fn parses_flat_star() {
        let t = parse_term("(* a1_1 a1_2 a2_1)").unwrap();
        assert_eq!(
            t,
            Term::node(
                Op::Star,
                vec![Term::leaf(s(1, 1)), Term::leaf(s(1, 2)), Term::leaf(s(2, 1))]
            )
            .unwrap()
        );
    }

    #[test]
    fn renders_nested_dot() {
        let star = Term::node(Op::Star, vec![Term::leaf(s(1, 1)), Term::leaf(s(1, 2))]).unwrap();
        let t = Term::node(Op::Dot, vec![star, Term::leaf(s(2, 1))]).unwrap();
        // Leaves sort before nested products; parsing accepts any order.
        assert_eq!(t.to_string(), "(. a2_1 (* a1_1 a1_2))");
        assert_eq!(parse_term("(. (* a1_1 a1_2) a2_1)").unwrap(), t);
        assert_eq!(parse_term("(. a2_1 (* a1_1 a1_2))").unwrap(), t);
    }

    #[test]
    fn expr_round_trip_with_coefficients() {
        let e = parse_expr("2 a1_1 + 1/2 (* a1_1 a2_1) - a2_1").unwrap();
        assert_eq!(e.coefficient(&Term::leaf(s(1, 1))), coeff(2));
        assert_eq!(e.coefficient(&Term::leaf(s(2, 1))), coeff(-1));
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        assert_eq!(parse_expr("0").unwrap(), Expr::zero());
        assert_eq!(Expr::zero().to_string(), "0");
    }

    #[test]
    fn like_terms_combine() {
        let e = parse_expr("a1_1 + a1_1").unwrap();
        assert_eq!(e.coefficient(&Term::leaf(s(1, 1))), coeff(2));
    }

    #[test]
    fn error_positions() {
        let err = parse_term("(* a1_1)").unwrap_err();
        assert_eq!(err.pos, 7);
        let err = parse_term("(* a1_1 b2)").unwrap_err();
        assert_eq!(err.pos, 8);
        let err = parse_expr("a0_1").unwrap_err();
        assert_eq!(err.pos, 1);
        let err = parse_expr("1/0 a1_1").unwrap_err();
        assert_eq!(err.pos, 2);
    }
}
