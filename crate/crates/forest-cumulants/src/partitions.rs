//! Set partitions of the slot set and their classification: mixing,
//! strongly-mixing, and row partitions.

use std::collections::BTreeSet;

use serde_json::Value;
use thiserror::Error;

use crate::expr::{Shape, Slot};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("ground set must be nonempty")]
    EmptyGround,
}

/// A set partition in canonical form: blocks sorted by their minimal slot,
/// slots sorted within each block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<Slot>>,
}

impl SetPartition {
    /// Builds a canonical partition from arbitrary block order.
    /// Callers are responsible for disjointness and coverage.
    pub fn new(mut blocks: Vec<Vec<Slot>>) -> SetPartition {
        for b in &mut blocks {
            b.sort();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        SetPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<Slot>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground(&self) -> Vec<Slot> {
        let mut all: Vec<Slot> = self.blocks.iter().flatten().copied().collect();
        all.sort();
        all
    }

    /// True when every block is a singleton.
    pub fn is_identity(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// JSON rendering: a list of lists of slot labels, canonical order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.blocks
                .iter()
                .map(|b| Value::Array(b.iter().map(|s| Value::String(s.label())).collect()))
                .collect(),
        )
    }
}

impl std::fmt::Display for SetPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let slots: Vec<String> = b.iter().map(|s| s.label()).collect();
                slots.join(" ")
            })
            .collect();
        write!(f, "{{{}}}", blocks.join(" | "))
    }
}

/// Enumerates partitions of an abstract `n`-element set as restricted growth
/// strings: `assignment[i]` is the block index of element `i`, and block
/// indices appear in first-use order. The iteration order is deterministic
/// (lexicographic on the growth string).
pub fn restricted_growth_strings(n: usize) -> impl Iterator<Item = Vec<usize>> {
    RgsIter::new(n)
}

struct RgsIter {
    n: usize,
    current: Option<Vec<usize>>,
}

impl RgsIter {
    fn new(n: usize) -> RgsIter {
        RgsIter {
            n,
            current: if n == 0 { None } else { Some(vec![0; n]) },
        }
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.take()?;
        let out = current.clone();
        // Advance: find the rightmost position that can still grow.
        let mut next = current;
        let n = self.n;
        let mut i = n;
        loop {
            if i <= 1 {
                break;
            }
            i -= 1;
            let max_here = next[..i].iter().copied().max().unwrap_or(0);
            if next[i] <= max_here {
                next[i] += 1;
                for v in next[i + 1..].iter_mut() {
                    *v = 0;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        self.current = None;
        Some(out)
    }
}

/// Groups items according to a restricted growth string.
pub fn group_by_rgs<T: Clone>(items: &[T], rgs: &[usize]) -> Vec<Vec<T>> {
    let block_count = rgs.iter().copied().max().map_or(0, |m| m + 1);
    let mut blocks: Vec<Vec<T>> = vec![Vec::new(); block_count];
    for (item, &b) in items.iter().zip(rgs) {
        blocks[b].push(item.clone());
    }
    blocks
}

/// All set partitions of the given ground set, canonical form, each exactly
/// once. The count is the Bell number of the ground size.
pub fn enumerate_set_partitions(
    ground: &[Slot],
) -> Result<impl Iterator<Item = SetPartition>, PartitionError> {
    if ground.is_empty() {
        return Err(PartitionError::EmptyGround);
    }
    let mut sorted = ground.to_vec();
    sorted.sort();
    Ok(restricted_growth_strings(sorted.len())
        .map(move |rgs| SetPartition::new(group_by_rgs(&sorted, &rgs))))
}

/// All partitions of the blocks of `nu`, each block treated as an atom.
/// Yields, for each partition, the grouped blocks (a vector of groups of
/// block indices into `nu.blocks()`).
pub fn partitions_of_blocks(nu: &SetPartition) -> impl Iterator<Item = Vec<Vec<usize>>> {
    let n = nu.block_count();
    let indices: Vec<usize> = (0..n).collect();
    restricted_growth_strings(n).map(move |rgs| group_by_rgs(&indices, &rgs))
}

/// A row partition has exactly two blocks and every group lies entirely
/// inside one of them.
pub fn is_row_partition(lambda: &SetPartition, shape: &Shape) -> bool {
    if lambda.block_count() != 2 {
        return false;
    }
    let sides: Vec<BTreeSet<Slot>> = lambda
        .blocks()
        .iter()
        .map(|b| b.iter().copied().collect())
        .collect();
    (1..=shape.group_count() as u32).all(|g| {
        let slots = shape.group_slots(g);
        sides
            .iter()
            .any(|side| slots.iter().all(|s| side.contains(s)))
    })
}

/// Mixing: some block meets at least two distinct groups.
pub fn is_mixing_partition(nu: &SetPartition, _shape: &Shape) -> bool {
    nu.blocks().iter().any(|b| {
        let mut groups = b.iter().map(|s| s.group());
        let first = groups.next().expect("blocks are nonempty");
        groups.any(|g| g != first)
    })
}

/// Strongly-mixing, decided by connectivity: build the graph on groups with
/// an edge wherever a block meets two groups; `nu` is strongly-mixing iff
/// that graph is connected (always, for a single group).
pub fn is_strongly_mixing(nu: &SetPartition, shape: &Shape) -> bool {
    let n = shape.group_count();
    if n == 1 {
        return true;
    }
    // Union-find over groups (0-based).
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for b in nu.blocks() {
        let first = (b[0].group() - 1) as usize;
        for s in &b[1..] {
            let g = (s.group() - 1) as usize;
            let (ra, rb) = (find(&mut parent, first), find(&mut parent, g));
            parent[ra] = rb;
        }
    }
    let root = find(&mut parent, 0);
    (1..n).all(|g| find(&mut parent, g) == root)
}

/// Strongly-mixing, decided by the literal definition: scan all two-block
/// row partitions (generated from group-level bipartitions) and reject `nu`
/// as soon as one absorbs every block.
pub fn is_strongly_mixing_by_row_scan(nu: &SetPartition, shape: &Shape) -> bool {
    let n = shape.group_count();
    if n == 1 {
        // No two-block row partition exists: one part would be empty.
        return true;
    }
    // Proper subsets of the groups containing group 1 cover each of the
    // 2^(n-1) - 1 bipartitions exactly once.
    let full = (1u64 << (n - 1)) - 1;
    for mask in 0..full {
        let mut left: BTreeSet<Slot> = shape.group_slots(1).into_iter().collect();
        for g in 2..=n as u32 {
            if mask & (1 << (g - 2)) != 0 {
                left.extend(shape.group_slots(g));
            }
        }
        let absorbed = nu.blocks().iter().all(|b| {
            let inside = b.iter().filter(|s| left.contains(s)).count();
            inside == 0 || inside == b.len()
        });
        if absorbed {
            return false;
        }
    }
    true
}

/// Bell numbers by the standard recurrence; the independent oracle for
/// enumeration counts.
pub fn bell_number(n: usize) -> u128 {
    let mut bell: Vec<u128> = vec![1]; // bell[0] = 1
    for m in 0..n {
        // bell[m + 1] = sum_k C(m, k) * bell[k]
        let mut next: u128 = 0;
        let mut binom: u128 = 1;
        for (k, b) in bell.iter().enumerate() {
            if k > 0 {
                binom = binom * (m as u128 - k as u128 + 1) / k as u128;
            }
            next += binom * b;
        }
        bell.push(next);
    }
    bell[n]
}
