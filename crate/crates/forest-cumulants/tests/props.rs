//! Property-based checks of the algebraic core: canonicalization,
//! bilinear arithmetic, and the text round trip.

use proptest::prelude::*;

use forest_cumulants::expr::{coeff, Expr, Op, RawTerm, Slot};
use forest_cumulants::parse::parse_expr;

fn slot_strategy() -> impl Strategy<Value = Slot> {
    (1u32..=3, 1u32..=3).prop_map(|(g, p)| Slot::new(g, p))
}

fn raw_term_strategy() -> impl Strategy<Value = RawTerm> {
    let leaf = slot_strategy().prop_map(RawTerm::Leaf);
    leaf.prop_recursive(3, 12, 3, |inner| {
        (
            prop_oneof![Just(Op::Star), Just(Op::Dot)],
            prop::collection::vec(inner, 1..=3),
        )
            .prop_map(|(op, children)| RawTerm::Node(op, children))
    })
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    prop::collection::vec((raw_term_strategy(), -3i64..=3), 0..=3).prop_map(|pairs| {
        let mut out = Expr::zero();
        for (raw, c) in pairs {
            let term = raw.canonicalize().expect("nonempty children");
            out = out.add(&Expr::from_term(term).scale(&coeff(c)));
        }
        out
    })
}

fn shuffle_raw(raw: &RawTerm) -> RawTerm {
    match raw {
        RawTerm::Leaf(s) => RawTerm::Leaf(*s),
        RawTerm::Node(op, children) => {
            let mut rotated: Vec<RawTerm> = children.iter().map(shuffle_raw).collect();
            let by = 1.min(rotated.len().saturating_sub(1));
            rotated.rotate_left(by);
            RawTerm::Node(*op, rotated)
        }
    }
}

proptest! {
    /// Canonicalization is idempotent and ignores child order.
    #[test]
    fn normalize_idempotent_and_order_free(raw in raw_term_strategy()) {
        let canon = raw.canonicalize().unwrap();
        canon.validate_canonical().unwrap();
        let again = RawTerm::from_canonical(&canon).canonicalize().unwrap();
        prop_assert_eq!(&again, &canon);
        let shuffled = shuffle_raw(&raw).canonicalize().unwrap();
        prop_assert_eq!(&shuffled, &canon);
    }

    /// Both multiplications are commutative and associative, and
    /// distribute over addition; results stay canonical.
    #[test]
    fn multiplication_laws(
        x in expr_strategy(),
        y in expr_strategy(),
        z in expr_strategy(),
        op in prop_oneof![Just(Op::Star), Just(Op::Dot)],
    ) {
        let xy = x.multiply(op, &y);
        prop_assert_eq!(&xy, &y.multiply(op, &x));
        prop_assert_eq!(
            xy.multiply(op, &z),
            x.multiply(op, &y.multiply(op, &z))
        );
        let sum_first = (&y + &z).multiply(op, &x);
        let distributed = &y.multiply(op, &x) + &z.multiply(op, &x);
        prop_assert_eq!(&sum_first, &distributed);
        sum_first.validate_canonical().unwrap();
        (&x - &x).validate_canonical().unwrap();
        prop_assert!((&x - &x).is_zero());
    }

    /// Rendering and parsing are mutually inverse on canonical input.
    #[test]
    fn parse_render_round_trip(e in expr_strategy()) {
        let rendered = e.to_string();
        let parsed = parse_expr(&rendered).unwrap();
        prop_assert_eq!(parsed, e);
    }
}

/// Helper used above: re-wrap a canonical term as a raw tree.
trait FromCanonical {
    fn from_canonical(term: &forest_cumulants::expr::Term) -> RawTerm;
}

impl FromCanonical for RawTerm {
    fn from_canonical(term: &forest_cumulants::expr::Term) -> RawTerm {
        match term {
            forest_cumulants::expr::Term::Leaf(s) => RawTerm::Leaf(*s),
            forest_cumulants::expr::Term::Node(op, children) => RawTerm::Node(
                *op,
                children.iter().map(RawTerm::from_canonical).collect(),
            ),
        }
    }
}
