//! Series-reduced leaf-labeled forests: enumeration, mixing classification,
//! the weight `w_F`, component partitions and root deletion.

use serde_json::Value;
use thiserror::Error;

use crate::expr::{Shape, Slot};
use crate::partitions::{
    group_by_rgs, is_strongly_mixing, restricted_growth_strings, SetPartition,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("leaf set must be nonempty")]
    EmptyLeafSet,
    #[error("internal vertices need at least two children")]
    TooFewChildren,
    #[error("operation requires a single tree, not a forest")]
    NotASingleTree,
    #[error("operation requires a tree with an internal root")]
    BareLeaf,
    #[error("child index {0} out of range")]
    ChildIndex(usize),
}

/// One rooted tree in which every internal vertex has at least two children.
/// Children are kept sorted by their minimal leaf, so equal trees are
/// structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf(Slot),
    Internal(Vec<Tree>),
}

impl Tree {
    pub fn leaf(slot: Slot) -> Tree {
        Tree::Leaf(slot)
    }

    pub fn internal(mut children: Vec<Tree>) -> Result<Tree, ForestError> {
        if children.len() < 2 {
            return Err(ForestError::TooFewChildren);
        }
        children.sort_by_key(Tree::min_leaf);
        Ok(Tree::Internal(children))
    }

    pub fn min_leaf(&self) -> Slot {
        match self {
            Tree::Leaf(s) => *s,
            Tree::Internal(children) => children[0].min_leaf(),
        }
    }

    pub fn leaves(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out.sort();
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Slot>) {
        match self {
            Tree::Leaf(s) => out.push(*s),
            Tree::Internal(children) => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Internal(children) => {
                1 + children.iter().map(Tree::internal_count).sum::<usize>()
            }
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Internal(children) => {
                1 + children.iter().map(Tree::height).max().unwrap_or(0)
            }
        }
    }

    fn is_mixing(&self, _shape: &Shape) -> bool {
        match self {
            Tree::Leaf(_) => true,
            Tree::Internal(children) => {
                let bottom = children.iter().all(|c| matches!(c, Tree::Leaf(_)));
                if bottom {
                    let mut groups: Vec<u32> =
                        children.iter().map(|c| c.min_leaf().group()).collect();
                    groups.sort_unstable();
                    groups.dedup();
                    groups.len() >= 2
                } else {
                    children.iter().all(|c| c.is_mixing(_shape))
                }
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Tree::Leaf(s) => Value::String(s.label()),
            Tree::Internal(children) => {
                Value::Array(children.iter().map(Tree::to_json).collect())
            }
        }
    }
}

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tree::Leaf(s) => write!(f, "{s}"),
            Tree::Internal(children) => {
                write!(f, "k(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A reduced forest: component trees sorted by their minimal leaf.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedForest {
    trees: Vec<Tree>,
}

impl ReducedForest {
    pub fn new(mut trees: Vec<Tree>) -> ReducedForest {
        trees.sort_by_key(Tree::min_leaf);
        ReducedForest { trees }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn leaves(&self) -> Vec<Slot> {
        let mut out: Vec<Slot> = self.trees.iter().flat_map(|t| t.leaves()).collect();
        out.sort();
        out
    }

    pub fn internal_count(&self) -> usize {
        self.trees.iter().map(Tree::internal_count).sum()
    }

    /// The single component tree, when there is exactly one.
    pub fn as_single_tree(&self) -> Result<&Tree, ForestError> {
        if self.trees.len() == 1 {
            Ok(&self.trees[0])
        } else {
            Err(ForestError::NotASingleTree)
        }
    }

    /// JSON encoding: nested arrays with slot labels at the leaves.
    pub fn to_json(&self) -> Value {
        Value::Array(self.trees.iter().map(Tree::to_json).collect())
    }
}

impl std::fmt::Display for ReducedForest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `w_F`: the number of internal vertices for mixing forests, infinity
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForestWeight {
    Finite(usize),
    Infinite,
}

impl ForestWeight {
    pub fn finite(&self) -> Option<usize> {
        match self {
            ForestWeight::Finite(w) => Some(*w),
            ForestWeight::Infinite => None,
        }
    }

    /// `(-1)^w`; only defined for finite weights.
    pub fn sign(&self) -> Option<i64> {
        self.finite().map(|w| if w % 2 == 0 { 1 } else { -1 })
    }
}

impl std::ops::Add for ForestWeight {
    type Output = ForestWeight;
    fn add(self, rhs: ForestWeight) -> ForestWeight {
        match (self, rhs) {
            (ForestWeight::Finite(a), ForestWeight::Finite(b)) => ForestWeight::Finite(a + b),
            _ => ForestWeight::Infinite,
        }
    }
}

/// All series-reduced rooted trees with the given labeled leaf set. A tree
/// on two or more leaves is a root whose children realize a partition of
/// the leaf set into at least two blocks, one subtree per block.
pub fn enumerate_reduced_trees(leaves: &[Slot]) -> Result<Vec<Tree>, ForestError> {
    if leaves.is_empty() {
        return Err(ForestError::EmptyLeafSet);
    }
    let mut sorted = leaves.to_vec();
    sorted.sort();
    let mut out = trees_on(&sorted);
    out.sort();
    Ok(out)
}

fn trees_on(leaves: &[Slot]) -> Vec<Tree> {
    if leaves.len() == 1 {
        return vec![Tree::Leaf(leaves[0])];
    }
    let mut out = Vec::new();
    for rgs in restricted_growth_strings(leaves.len()) {
        let blocks = group_by_rgs(leaves, &rgs);
        if blocks.len() < 2 {
            continue;
        }
        let per_block: Vec<Vec<Tree>> = blocks.iter().map(|b| trees_on(b)).collect();
        for combo in cartesian(&per_block) {
            out.push(Tree::internal(combo).expect("at least two blocks"));
        }
    }
    out
}

/// All reduced forests on the leaf set: a partition of the leaves with a
/// reduced tree placed on every block.
pub fn enumerate_reduced_forests(leaves: &[Slot]) -> Result<Vec<ReducedForest>, ForestError> {
    if leaves.is_empty() {
        return Err(ForestError::EmptyLeafSet);
    }
    let mut sorted = leaves.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    for rgs in restricted_growth_strings(sorted.len()) {
        let blocks = group_by_rgs(&sorted, &rgs);
        let per_block: Vec<Vec<Tree>> = blocks.iter().map(|b| trees_on(b)).collect();
        for combo in cartesian(&per_block) {
            out.push(ReducedForest::new(combo));
        }
    }
    out.sort();
    Ok(out)
}

fn cartesian(choices: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    let mut out = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for opt in options {
                let mut row = prefix.clone();
                row.push(opt.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Mixing: every internal vertex whose children are all leaves has children
/// from at least two distinct groups. A forest of bare leaves is mixing.
pub fn is_mixing_forest(f: &ReducedForest, shape: &Shape) -> bool {
    f.trees().iter().all(|t| t.is_mixing(shape))
}

pub fn w_of_forest(f: &ReducedForest, shape: &Shape) -> ForestWeight {
    if is_mixing_forest(f, shape) {
        ForestWeight::Finite(f.internal_count())
    } else {
        ForestWeight::Infinite
    }
}

/// The inductive weight of a single tree, by height: 0 for a bare leaf, 1
/// or infinity at height one depending on whether the root mixes groups,
/// and one plus the children's weights above that. Serves as a cross-check
/// against the vertex-count definition.
pub fn w_of_tree_inductive(t: &Tree, _shape: &Shape) -> ForestWeight {
    match t {
        Tree::Leaf(_) => ForestWeight::Finite(0),
        Tree::Internal(children) => {
            if children.iter().all(|c| matches!(c, Tree::Leaf(_))) {
                let mut groups: Vec<u32> =
                    children.iter().map(|c| c.min_leaf().group()).collect();
                groups.sort_unstable();
                groups.dedup();
                if groups.len() >= 2 {
                    ForestWeight::Finite(1)
                } else {
                    ForestWeight::Infinite
                }
            } else {
                let sum = children
                    .iter()
                    .map(|c| w_of_tree_inductive(c, _shape))
                    .fold(ForestWeight::Finite(0), |a, b| a + b);
                sum + ForestWeight::Finite(1)
            }
        }
    }
}

/// The component partition: one block per tree, holding its leaves.
pub fn nu_of_forest(f: &ReducedForest) -> SetPartition {
    SetPartition::new(f.trees().iter().map(|t| t.leaves()).collect())
}

/// Strongly-mixing: mixing, and the component partition is strongly-mixing.
pub fn is_strongly_mixing_forest(f: &ReducedForest, shape: &Shape) -> bool {
    is_mixing_forest(f, shape) && is_strongly_mixing(&nu_of_forest(f), shape)
}

/// Deletes the root of a single tree, leaving the forest of its subtrees.
pub fn root_deletion(f: &ReducedForest) -> Result<ReducedForest, ForestError> {
    let tree = f.as_single_tree()?;
    match tree {
        Tree::Leaf(_) => Err(ForestError::BareLeaf),
        Tree::Internal(children) => Ok(ReducedForest::new(children.clone())),
    }
}

/// Inverse of [`root_deletion`]: joins the forest's trees under a new root.
pub fn root_attachment(f: &ReducedForest) -> Result<ReducedForest, ForestError> {
    let root = Tree::internal(f.trees().to_vec())?;
    Ok(ReducedForest::new(vec![root]))
}

/// Counts of reduced trees and forests on `n` labeled leaves, by the
/// root-deletion recurrences; the independent oracle for enumeration counts
/// and the size estimate behind the CLI cap. Saturates instead of
/// overflowing, since oversized shapes only ever reach the estimate path.
pub fn reduced_counts(n: usize) -> (u128, u128) {
    // trees[k], forests[k]; forests[0] = 1 (empty forest) for the convolution.
    let mut trees: Vec<u128> = vec![0; n + 1];
    let mut forests: Vec<u128> = vec![1; 1];
    forests.resize(n + 1, 0);
    for m in 1..=n {
        // Forests on [m] with >= 2 trees: the tree containing leaf 1 uses k
        // leaves in total, chosen among the other m - 1.
        let mut multi: u128 = 0;
        for k in 1..m {
            let summand = binomial(m - 1, k - 1)
                .saturating_mul(trees[k])
                .saturating_mul(forests[m - k]);
            multi = multi.saturating_add(summand);
        }
        trees[m] = if m == 1 { 1 } else { multi };
        forests[m] = trees[m].saturating_add(multi);
    }
    (trees[n], forests[n])
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    out
}
