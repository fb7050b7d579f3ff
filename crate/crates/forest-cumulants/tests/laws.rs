//! Cross-module identities that back the per-operation contracts but sit
//! outside the acceptance list: the two moment-cumulant round trips and
//! the partition-grouped reformulation of the forest expansion.

use forest_cumulants::cumulants::{compositions, expand_grouped, expand_main, lhs_product, verify, Law};
use forest_cumulants::expr::Shape;

fn shapes_up_to(total: usize) -> Vec<Shape> {
    (1..=total)
        .flat_map(compositions)
        .map(|sizes| Shape::new(sizes).unwrap())
        .collect()
}

/// Star products invert through dot-combined cumulants and dot products
/// through star-combined dual cumulants, on up to six slots. The grouping
/// plays no role here, so one group per total suffices.
#[test]
fn moment_cumulant_round_trips() {
    for n in 1..=6u32 {
        let sh = Shape::new(vec![n]).unwrap();
        for law in [Law::MomentCumulant, Law::MomentCumulantStar] {
            let report = verify(law, &sh, 8).unwrap();
            assert!(report.equal, "{law} on {n} slots: {:?}", report.mismatch);
        }
    }
    // And with nontrivial groupings, which only reorder the slot labels.
    for sh in shapes_up_to(4) {
        for law in [Law::MomentCumulant, Law::MomentCumulantStar] {
            assert!(verify(law, &sh, 8).unwrap().equal);
        }
    }
}

/// The partition-grouped double sum agrees with both the flat forest
/// expansion and the product itself on every shape with at most five
/// slots.
#[test]
fn grouped_reformulation_to_five_slots() {
    for sh in shapes_up_to(5) {
        let grouped = expand_grouped(&sh);
        assert_eq!(grouped, expand_main(&sh), "grouped vs main on {sh}");
        assert_eq!(grouped, lhs_product(&sh), "grouped vs product on {sh}");
    }
}
