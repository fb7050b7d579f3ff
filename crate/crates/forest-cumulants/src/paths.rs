//! Signed counting of lattice paths with steps in `{0,1}^r \ {0}`.
//!
//! `path_f` sums `(-1)^(|path| + 1)` over all such paths from the origin to
//! a point, computed by recursion over the last step; `path_g` is the
//! closed form it must agree with.

use std::collections::HashMap;

/// Recursive form: zero off the nonnegative orthant, -1 at the origin, and
/// otherwise minus the sum over all nonempty step sets of the value one
/// step back. Memoized per call.
pub fn path_f(point: &[i64]) -> i64 {
    assert!(!point.is_empty(), "arity must be at least one");
    let mut memo = HashMap::new();
    path_f_memo(point, &mut memo)
}

fn path_f_memo(point: &[i64], memo: &mut HashMap<Vec<i64>, i64>) -> i64 {
    if point.iter().any(|&x| x < 0) {
        return 0;
    }
    if point.iter().all(|&x| x == 0) {
        return -1;
    }
    if let Some(&v) = memo.get(point) {
        return v;
    }
    let r = point.len();
    let mut total: i64 = 0;
    for mask in 1u32..(1 << r) {
        let prev: Vec<i64> = point
            .iter()
            .enumerate()
            .map(|(i, &x)| if mask & (1 << i) != 0 { x - 1 } else { x })
            .collect();
        total -= path_f_memo(&prev, memo);
    }
    memo.insert(point.to_vec(), total);
    total
}

/// Closed form: `-(-1)^(x_1 + ... + x_r)` on the nonnegative orthant, zero
/// elsewhere.
pub fn path_g(point: &[i64]) -> i64 {
    assert!(!point.is_empty(), "arity must be at least one");
    if point.iter().any(|&x| x < 0) {
        return 0;
    }
    let parity: i64 = point.iter().sum();
    if parity % 2 == 0 {
        -1
    } else {
        1
    }
}
