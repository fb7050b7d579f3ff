//! Nested upward sequences of partitions, their cumulants, and the
//! bijection onto coloured reduced forests.
//!
//! A sequence stacks partitions: the first level partitions the slot set
//! and every later level partitions the previous level's blocks. Nested
//! means no level is the all-singletons partition of what it refines, so
//! every level performs at least one merge and sequences on `n` slots have
//! length below `n`.

use std::collections::BTreeMap;

use serde_json::Value;
use thiserror::Error;

use crate::colouring::{Colouring, VertexId};
use crate::cumulants::CumulantEngine;
use crate::expr::{product, Expr, Op, Shape, Slot};
use crate::forests::{ReducedForest, Tree};
use crate::partitions::{
    enumerate_set_partitions, group_by_rgs, is_mixing_partition, restricted_growth_strings,
    SetPartition,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("a sequence needs at least one level")]
    Empty,
    #[error("level {0} is not a canonical partition of the level below")]
    MalformedLevel(usize),
    #[error("level {0} is the identity partition, sequences must be nested")]
    IdentityLevel(usize),
    #[error("the first level must be a mixing partition")]
    NotMixing,
    #[error("the length-0 colouring has no corresponding sequence")]
    ZeroLength,
    #[error("colouring is not gap-free on the forest")]
    BadColouring,
}

/// Index partition: blocks of `0..n`, sorted within blocks and by minimum.
type Level = Vec<Vec<usize>>;

fn is_canonical_level(level: &Level, n: usize) -> bool {
    let mut seen = vec![false; n];
    for block in level {
        if block.is_empty() || !block.windows(2).all(|w| w[0] < w[1]) {
            return false;
        }
        for &i in block {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
    }
    seen.into_iter().all(|s| s) && level.windows(2).all(|w| w[0][0] < w[1][0])
}

/// A nested upward sequence over a fixed slot ground set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpwardSequence {
    ground: Vec<Slot>,
    levels: Vec<Level>,
}

impl UpwardSequence {
    pub fn from_levels(ground: Vec<Slot>, levels: Vec<Level>) -> Result<UpwardSequence, SequenceError> {
        if levels.is_empty() {
            return Err(SequenceError::Empty);
        }
        let mut below = ground.len();
        for (i, level) in levels.iter().enumerate() {
            if !is_canonical_level(level, below) {
                return Err(SequenceError::MalformedLevel(i + 1));
            }
            if level.len() == below {
                return Err(SequenceError::IdentityLevel(i + 1));
            }
            below = level.len();
        }
        Ok(UpwardSequence { ground, levels })
    }

    pub fn length(&self) -> usize {
        self.levels.len()
    }

    pub fn ground(&self) -> &[Slot] {
        &self.ground
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// The first level as a partition of the slot set.
    pub fn first_level_partition(&self) -> SetPartition {
        SetPartition::new(
            self.levels[0]
                .iter()
                .map(|block| block.iter().map(|&i| self.ground[i]).collect())
                .collect(),
        )
    }

    /// JSON: a list of levels; the first holds slot labels, later ones hold
    /// indices into the previous level's block list.
    pub fn to_json(&self) -> Value {
        let mut out = Vec::with_capacity(self.levels.len());
        for (i, level) in self.levels.iter().enumerate() {
            let level_json: Vec<Value> = level
                .iter()
                .map(|block| {
                    Value::Array(
                        block
                            .iter()
                            .map(|&j| {
                                if i == 0 {
                                    Value::String(self.ground[j].label())
                                } else {
                                    Value::Number(j.into())
                                }
                            })
                            .collect(),
                    )
                })
                .collect();
            out.push(Value::Array(level_json));
        }
        Value::Array(out)
    }
}

impl std::fmt::Display for UpwardSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, level) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, " -> ")?;
            }
            let blocks: Vec<String> = level
                .iter()
                .map(|block| {
                    let items: Vec<String> = block
                        .iter()
                        .map(|&j| {
                            if i == 0 {
                                self.ground[j].label()
                            } else {
                                j.to_string()
                            }
                        })
                        .collect();
                    items.join(" ")
                })
                .collect();
            write!(f, "{{{}}}", blocks.join(" | "))?;
        }
        Ok(())
    }
}

/// All nested upward sequences over the shape's slots, every length, in a
/// deterministic order. With `require_mixing_start` only sequences whose
/// first level is a mixing partition are produced.
pub fn enumerate_sequences(shape: &Shape, require_mixing_start: bool) -> Vec<UpwardSequence> {
    let ground = shape.slots();
    let n = ground.len();
    let mut out = Vec::new();
    for first in partitions_of_indices(n) {
        if first.len() == n {
            continue; // identity level
        }
        if require_mixing_start {
            let as_slots = SetPartition::new(
                first
                    .iter()
                    .map(|block| block.iter().map(|&i| ground[i]).collect())
                    .collect(),
            );
            if !is_mixing_partition(&as_slots, shape) {
                continue;
            }
        }
        let block_count = first.len();
        let mut prefix = vec![first];
        extend(&ground, &mut prefix, block_count, &mut out);
    }
    out
}

fn extend(
    ground: &[Slot],
    prefix: &mut Vec<Level>,
    below: usize,
    out: &mut Vec<UpwardSequence>,
) {
    out.push(UpwardSequence {
        ground: ground.to_vec(),
        levels: prefix.clone(),
    });
    for level in partitions_of_indices(below) {
        if level.len() == below {
            continue;
        }
        let next_count = level.len();
        prefix.push(level);
        extend(ground, prefix, next_count, out);
        prefix.pop();
    }
}

fn partitions_of_indices(n: usize) -> Vec<Level> {
    let indices: Vec<usize> = (0..n).collect();
    restricted_growth_strings(n)
        .map(|rgs| group_by_rgs(&indices, &rgs))
        .collect()
}

/// The cumulant of a sequence: apply the per-block cumulant level by level,
/// innermost first, then combine whatever remains with the star product.
/// One-element blocks collapse silently since the cumulant of a single
/// argument is that argument.
pub fn kappa_of_sequence(w: &UpwardSequence) -> Expr {
    let mut engine = CumulantEngine::new();
    kappa_of_sequence_with(&mut engine, w)
}

pub fn kappa_of_sequence_with(engine: &mut CumulantEngine, w: &UpwardSequence) -> Expr {
    let mut elements: Vec<Expr> = w.ground().iter().map(|&s| Expr::generator(s)).collect();
    for level in w.levels() {
        let mut next = Vec::with_capacity(level.len());
        for block in level {
            let args: Vec<Expr> = block.iter().map(|&i| elements[i].clone()).collect();
            next.push(engine.kappa(&args).expect("blocks are nonempty"));
        }
        elements = next;
    }
    product(Op::Star, elements)
}

enum Scratch {
    Leaf(Slot),
    Vertex { colour: u32, children: Vec<Scratch> },
}

impl Scratch {
    fn min_leaf(&self) -> Slot {
        match self {
            Scratch::Leaf(s) => *s,
            Scratch::Vertex { children, .. } => {
                children.iter().map(Scratch::min_leaf).min().unwrap()
            }
        }
    }

    fn freeze(mut self, id: VertexId, colours: &mut BTreeMap<VertexId, u32>) -> Tree {
        match &mut self {
            Scratch::Leaf(s) => {
                colours.insert(id, 0);
                Tree::leaf(*s)
            }
            Scratch::Vertex { colour, children } => {
                colours.insert(id.clone(), *colour);
                children.sort_by_key(Scratch::min_leaf);
                let frozen: Vec<Tree> = std::mem::take(children)
                    .into_iter()
                    .enumerate()
                    .map(|(i, child)| {
                        let mut child_id = id.clone();
                        child_id.push(i);
                        child.freeze(child_id, colours)
                    })
                    .collect();
                Tree::internal(frozen).expect("vertices keep at least two children")
            }
        }
    }
}

/// Maps a sequence with mixing first level to a reduced forest with a
/// gap-free weakly-mixing colouring: one vertex per block per level,
/// coloured by the level, with single-child vertices dissolved.
pub fn phi(w: &UpwardSequence) -> Result<(ReducedForest, Colouring), SequenceError> {
    // Mixing start keeps the colouring weakly-mixing; reject otherwise.
    let shape_free = w
        .levels()
        .first()
        .map(|level| {
            level.iter().any(|block| {
                let mut groups = block.iter().map(|&i| w.ground()[i].group());
                let first = groups.next().expect("nonempty block");
                groups.any(|g| g != first)
            })
        })
        .unwrap_or(false);
    if !shape_free {
        return Err(SequenceError::NotMixing);
    }

    let mut entities: Vec<Scratch> = w.ground().iter().map(|&s| Scratch::Leaf(s)).collect();
    for (i, level) in w.levels().iter().enumerate() {
        let mut taken: Vec<Option<Scratch>> = entities.into_iter().map(Some).collect();
        let mut next = Vec::with_capacity(level.len());
        for block in level {
            let mut children: Vec<Scratch> = block
                .iter()
                .map(|&j| taken[j].take().expect("blocks are disjoint"))
                .collect();
            if children.len() == 1 {
                next.push(children.pop().unwrap());
            } else {
                next.push(Scratch::Vertex {
                    colour: (i + 1) as u32,
                    children,
                });
            }
        }
        entities = next;
    }

    entities.sort_by_key(Scratch::min_leaf);
    let mut colours = BTreeMap::new();
    let trees: Vec<Tree> = entities
        .into_iter()
        .enumerate()
        .map(|(t, scratch)| scratch.freeze(vec![t], &mut colours))
        .collect();
    Ok((ReducedForest::new(trees), Colouring::new(colours)))
}

/// Reconstructs the sequence from a coloured forest. Level by level, the
/// blocks are read off the vertices carrying that colour; units whose
/// parent sits above the level pass through as singletons.
pub fn phi_inverse(
    f: &ReducedForest,
    c: &Colouring,
) -> Result<UpwardSequence, SequenceError> {
    validate_colouring(f, c)?;
    let r = c.length();
    if r == 0 {
        return Err(SequenceError::ZeroLength);
    }

    // Units, initially the leaves in slot order.
    let ground = f.leaves();
    let mut unit_ids: Vec<VertexId> = {
        let mut leaves: Vec<(Slot, VertexId)> = Vec::new();
        for (t, tree) in f.trees().iter().enumerate() {
            collect_leaves_with_ids(tree, vec![t], &mut leaves);
        }
        leaves.sort();
        leaves.into_iter().map(|(_, id)| id).collect()
    };

    let mut levels = Vec::with_capacity(r as usize);
    for colour in 1..=r {
        // Group unit indices by their parent when the parent carries the
        // current colour; everything else passes through untouched.
        let mut merged: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        let mut blocks_in_order: Vec<(usize, Option<VertexId>)> = Vec::new();
        for (j, id) in unit_ids.iter().enumerate() {
            let parent: Option<VertexId> =
                (id.len() > 1).then(|| id[..id.len() - 1].to_vec());
            match parent {
                Some(p) if c.colour(&p) == Some(colour) => {
                    let entry = merged.entry(p.clone()).or_default();
                    if entry.is_empty() {
                        blocks_in_order.push((j, Some(p)));
                    }
                    entry.push(j);
                }
                _ => blocks_in_order.push((j, None)),
            }
        }
        blocks_in_order.sort_by_key(|(first, _)| *first);
        let mut level: Level = Vec::with_capacity(blocks_in_order.len());
        let mut next_units: Vec<VertexId> = Vec::with_capacity(blocks_in_order.len());
        for (first, parent) in blocks_in_order {
            match parent {
                Some(p) => {
                    level.push(merged[&p].clone());
                    next_units.push(p);
                }
                None => {
                    level.push(vec![first]);
                    next_units.push(unit_ids[first].clone());
                }
            }
        }
        levels.push(level);
        unit_ids = next_units;
    }
    UpwardSequence::from_levels(ground, levels)
}

fn collect_leaves_with_ids(tree: &Tree, id: VertexId, out: &mut Vec<(Slot, VertexId)>) {
    match tree {
        Tree::Leaf(s) => out.push((*s, id)),
        Tree::Internal(children) => {
            for (i, child) in children.iter().enumerate() {
                let mut child_id = id.clone();
                child_id.push(i);
                collect_leaves_with_ids(child, child_id, out);
            }
        }
    }
}

fn validate_colouring(f: &ReducedForest, c: &Colouring) -> Result<(), SequenceError> {
    let mut count = 0usize;
    for (t, tree) in f.trees().iter().enumerate() {
        count += validate_vertex(tree, vec![t], c)?;
    }
    if count != c.colours().len() {
        return Err(SequenceError::BadColouring);
    }
    let r = c.length();
    let mut used = vec![false; (r + 1) as usize];
    for &v in c.colours().values() {
        used[v as usize] = true;
    }
    if !used.into_iter().all(|u| u) {
        return Err(SequenceError::BadColouring);
    }
    Ok(())
}

fn validate_vertex(tree: &Tree, id: VertexId, c: &Colouring) -> Result<usize, SequenceError> {
    let own = c.colour(&id).ok_or(SequenceError::BadColouring)?;
    match tree {
        Tree::Leaf(_) => {
            if own != 0 {
                return Err(SequenceError::BadColouring);
            }
            Ok(1)
        }
        Tree::Internal(children) => {
            let mut count = 1;
            for (i, child) in children.iter().enumerate() {
                let mut child_id = id.clone();
                child_id.push(i);
                let child_colour = c.colour(&child_id).ok_or(SequenceError::BadColouring)?;
                if child_colour >= own {
                    return Err(SequenceError::BadColouring);
                }
                count += validate_vertex(child, child_id, c)?;
            }
            Ok(count)
        }
    }
}

/// Convenience: all partitions of the shape's slots that are mixing.
pub fn mixing_partitions(shape: &Shape) -> Vec<SetPartition> {
    enumerate_set_partitions(&shape.slots())
        .expect("shapes are nonempty")
        .filter(|nu| is_mixing_partition(nu, shape))
        .collect()
}
