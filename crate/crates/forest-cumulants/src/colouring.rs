//! Vertex colourings of reduced forests: gap-free and weakly-mixing
//! enumeration, the signed colouring sum, projections onto root subtrees,
//! and the colour transport along root deletion.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::expr::Shape;
use crate::forests::{ForestError, ReducedForest, Tree};

/// A vertex address: the tree index followed by child indices along the
/// path from that root.
pub type VertexId = Vec<usize>;

pub fn vertex_id_string(id: &VertexId) -> String {
    id.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// A total vertex -> colour map for one forest. Leaves always carry 0;
/// colours strictly increase from every leaf toward its root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Colouring {
    colours: BTreeMap<VertexId, u32>,
}

impl Colouring {
    pub fn new(colours: BTreeMap<VertexId, u32>) -> Colouring {
        Colouring { colours }
    }

    pub fn colours(&self) -> &BTreeMap<VertexId, u32> {
        &self.colours
    }

    pub fn colour(&self, id: &VertexId) -> Option<u32> {
        self.colours.get(id).copied()
    }

    /// The length `r`: the largest colour in use.
    pub fn length(&self) -> u32 {
        self.colours.values().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .colours
            .iter()
            .map(|(id, c)| (vertex_id_string(id), Value::Number((*c).into())))
            .collect();
        Value::Object(map)
    }
}

/// Which colourings to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColouringFilter {
    GapFree,
    WeaklyMixing,
}

struct VertexInfo {
    id: VertexId,
    child_ids: Vec<VertexId>,
    /// Distinct leaf groups directly below, when every child is a leaf.
    bottom_groups: Option<usize>,
}

fn collect_internal(tree: &Tree, id: VertexId, out: &mut Vec<VertexInfo>) {
    if let Tree::Internal(children) = tree {
        let child_ids: Vec<VertexId> = (0..children.len())
            .map(|i| {
                let mut c = id.clone();
                c.push(i);
                c
            })
            .collect();
        let bottom = children.iter().all(|c| matches!(c, Tree::Leaf(_)));
        let bottom_groups = bottom.then(|| {
            let mut groups: Vec<u32> = children.iter().map(|c| c.min_leaf().group()).collect();
            groups.sort_unstable();
            groups.dedup();
            groups.len()
        });
        for (child, child_id) in children.iter().zip(&child_ids) {
            collect_internal(child, child_id.clone(), out);
        }
        out.push(VertexInfo {
            id,
            child_ids,
            bottom_groups,
        });
    }
}

fn leaf_ids(tree: &Tree, id: VertexId, out: &mut Vec<VertexId>) {
    match tree {
        Tree::Leaf(_) => out.push(id),
        Tree::Internal(children) => {
            for (i, c) in children.iter().enumerate() {
                let mut child_id = id.clone();
                child_id.push(i);
                leaf_ids(c, child_id, out);
            }
        }
    }
}

/// All colourings of `f` passing the filter, in a deterministic order.
///
/// Leaves are fixed at 0 and internal vertices take colours strictly above
/// all their children; gap-freeness bounds the palette by the number of
/// internal vertices. The weakly-mixing filter additionally requires a
/// 1-coloured vertex whose (necessarily leaf) children meet two distinct
/// groups, except for the unique length-0 colouring which qualifies by not
/// using colour 1 at all.
pub fn enumerate_colourings(
    f: &ReducedForest,
    shape: &Shape,
    filter: ColouringFilter,
) -> Vec<Colouring> {
    let _ = shape;
    let mut internal = Vec::new();
    let mut leaves = Vec::new();
    for (t, tree) in f.trees().iter().enumerate() {
        // Post-order: children are listed before their parents.
        collect_internal(tree, vec![t], &mut internal);
        leaf_ids(tree, vec![t], &mut leaves);
    }
    let base: BTreeMap<VertexId, u32> = leaves.into_iter().map(|id| (id, 0)).collect();
    let cap = internal.len() as u32;

    let mut out = Vec::new();
    let mut assignment: Vec<u32> = vec![0; internal.len()];
    assign(&internal, 0, cap, &mut assignment, &base, filter, &mut out);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn assign(
    internal: &[VertexInfo],
    idx: usize,
    cap: u32,
    assignment: &mut Vec<u32>,
    base: &BTreeMap<VertexId, u32>,
    filter: ColouringFilter,
    out: &mut Vec<Colouring>,
) {
    if idx == internal.len() {
        let mut colours = base.clone();
        for (info, &c) in internal.iter().zip(assignment.iter()) {
            colours.insert(info.id.clone(), c);
        }
        let candidate = Colouring::new(colours);
        if !is_gap_free(&candidate) {
            return;
        }
        if filter == ColouringFilter::WeaklyMixing && !is_weakly_mixing(internal, &candidate) {
            return;
        }
        out.push(candidate);
        return;
    }
    // Children precede parents, so their colours are already chosen.
    let info = &internal[idx];
    let floor = info
        .child_ids
        .iter()
        .map(|cid| {
            base.get(cid).copied().unwrap_or_else(|| {
                let pos = internal
                    .iter()
                    .position(|v| &v.id == cid)
                    .expect("child is an internal vertex");
                assignment[pos]
            })
        })
        .max()
        .unwrap_or(0);
    for colour in (floor + 1)..=cap {
        assignment[idx] = colour;
        assign(internal, idx + 1, cap, assignment, base, filter, out);
    }
    assignment[idx] = 0;
}

fn is_gap_free(c: &Colouring) -> bool {
    let r = c.length();
    let mut used = vec![false; (r + 1) as usize];
    for &v in c.colours().values() {
        used[v as usize] = true;
    }
    used.into_iter().all(|u| u)
}

fn is_weakly_mixing(internal: &[VertexInfo], c: &Colouring) -> bool {
    if c.length() == 0 {
        return true;
    }
    internal.iter().any(|info| {
        c.colour(&info.id) == Some(1) && info.bottom_groups.is_some_and(|g| g >= 2)
    })
}

/// The signed colouring sum over all gap-free weakly-mixing colourings.
pub fn colouring_sign_sum(f: &ReducedForest, shape: &Shape) -> i64 {
    enumerate_colourings(f, shape, ColouringFilter::WeaklyMixing)
        .iter()
        .map(|c| if c.length() % 2 == 0 { 1 } else { -1 })
        .sum()
}

/// Restriction of a single-tree colouring to the `i`-th root subtree, with
/// the used colours relabeled order-isomorphically down to `{0, ..., l}`.
pub fn project_colouring(
    f: &ReducedForest,
    c: &Colouring,
    i: usize,
) -> Result<(ReducedForest, Colouring), ForestError> {
    let tree = f.as_single_tree()?;
    let children = match tree {
        Tree::Leaf(_) => return Err(ForestError::BareLeaf),
        Tree::Internal(children) => children,
    };
    let subtree = children.get(i).ok_or(ForestError::ChildIndex(i))?;
    let sub_forest = ReducedForest::new(vec![subtree.clone()]);

    // Addresses [0, i, rest...] become [0, rest...].
    let mut induced: BTreeMap<VertexId, u32> = BTreeMap::new();
    for (id, &colour) in c.colours() {
        if id.len() >= 2 && id[0] == 0 && id[1] == i {
            let mut new_id = vec![0];
            new_id.extend_from_slice(&id[2..]);
            induced.insert(new_id, colour);
        }
    }
    let mut used: Vec<u32> = induced.values().copied().collect();
    used.sort_unstable();
    used.dedup();
    let relabel: BTreeMap<u32, u32> = used
        .into_iter()
        .enumerate()
        .map(|(rank, colour)| (colour, rank as u32))
        .collect();
    let projected = induced
        .into_iter()
        .map(|(id, colour)| (id, relabel[&colour]))
        .collect();
    Ok((sub_forest, Colouring::new(projected)))
}

/// Transports a colouring along root deletion: the root colour disappears
/// and every other vertex keeps its colour, shortening the length by one.
pub fn root_deletion_colouring(
    f: &ReducedForest,
    c: &Colouring,
) -> Result<(ReducedForest, Colouring), ForestError> {
    let forest = crate::forests::root_deletion(f)?;
    let mut colours = BTreeMap::new();
    for (id, &colour) in c.colours() {
        if id.len() >= 2 {
            // [0, i, rest...] -> [i, rest...]; subtree order is preserved.
            colours.insert(id[1..].to_vec(), colour);
        }
    }
    Ok((forest, Colouring::new(colours)))
}

/// Inverse transport: reattach a root above the forest, coloured one past
/// the previous maximum.
pub fn root_attachment_colouring(
    f: &ReducedForest,
    c: &Colouring,
) -> Result<(ReducedForest, Colouring), ForestError> {
    let tree = crate::forests::root_attachment(f)?;
    let mut colours: BTreeMap<VertexId, u32> = BTreeMap::new();
    for (id, &colour) in c.colours() {
        let mut new_id = vec![0];
        new_id.extend_from_slice(id);
        colours.insert(new_id, colour);
    }
    colours.insert(vec![0], c.length() + 1);
    Ok((tree, Colouring::new(colours)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Shape, Slot};
    use crate::forests::{
        enumerate_reduced_forests, enumerate_reduced_trees, is_mixing_forest, w_of_forest,
    };

    fn shape(sizes: &[u32]) -> Shape {
        Shape::new(sizes.to_vec()).unwrap()
    }

    fn s(g: u32, p: u32) -> Slot {
        Slot::new(g, p)
    }

    fn leaf(g: u32, p: u32) -> Tree {
        Tree::leaf(s(g, p))
    }

    #[test]
    fn bare_forest_has_unique_colouring() {
        let sh = shape(&[2, 1]);
        let bare = ReducedForest::new(sh.slots().into_iter().map(Tree::leaf).collect());
        let all = enumerate_colourings(&bare, &sh, ColouringFilter::GapFree);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].length(), 0);
        // Length zero qualifies as weakly-mixing by not using colour 1.
        let wm = enumerate_colourings(&bare, &sh, ColouringFilter::WeaklyMixing);
        assert_eq!(wm.len(), 1);
    }

    #[test]
    fn height_one_tree_has_unique_colouring() {
        let sh = shape(&[2, 1]);
        let star = Tree::internal(sh.slots().into_iter().map(Tree::leaf).collect()).unwrap();
        let f = ReducedForest::new(vec![star]);
        let all = enumerate_colourings(&f, &sh, ColouringFilter::GapFree);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].length(), 1);
        assert_eq!(all[0].colour(&vec![0]), Some(1));
    }

    /// The nine-leaf tree whose root subtrees use colours {0,2,4} and
    /// {0,1,3,4} admits the displayed length-5 colouring, and its
    /// projections relabel onto {0,1,2} and {0,1,2,3}.
    #[test]
    fn projection_relabels_order_isomorphically() {
        let sh = shape(&[9]);
        let t1 = Tree::internal(vec![
            Tree::internal(vec![leaf(1, 1), leaf(1, 2)]).unwrap(),
            leaf(1, 3),
            leaf(1, 4),
        ])
        .unwrap();
        let v1 = Tree::internal(vec![leaf(1, 5), leaf(1, 6), leaf(1, 7)]).unwrap();
        let v3 = Tree::internal(vec![v1, leaf(1, 8)]).unwrap();
        let t2 = Tree::internal(vec![v3, leaf(1, 9)]).unwrap();
        let tree = ReducedForest::new(vec![Tree::internal(vec![t1, t2]).unwrap()]);

        let mut colours: BTreeMap<VertexId, u32> = BTreeMap::new();
        colours.insert(vec![0], 5);
        colours.insert(vec![0, 0], 4);
        colours.insert(vec![0, 0, 0], 2);
        colours.insert(vec![0, 1], 4);
        colours.insert(vec![0, 1, 0], 3);
        colours.insert(vec![0, 1, 0, 0], 1);
        for leaf_id in [
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 1],
            vec![0, 0, 2],
            vec![0, 1, 0, 0, 0],
            vec![0, 1, 0, 0, 1],
            vec![0, 1, 0, 0, 2],
            vec![0, 1, 0, 1],
            vec![0, 1, 1],
        ] {
            colours.insert(leaf_id, 0);
        }
        let displayed = Colouring::new(colours);
        assert_eq!(displayed.length(), 5);

        let enumerated = enumerate_colourings(&tree, &sh, ColouringFilter::GapFree);
        assert!(enumerated.contains(&displayed));

        let (_, p0) = project_colouring(&tree, &displayed, 0).unwrap();
        assert_eq!(p0.length(), 2);
        assert_eq!(p0.colour(&vec![0]), Some(2));
        assert_eq!(p0.colour(&vec![0, 0]), Some(1));

        let (_, p1) = project_colouring(&tree, &displayed, 1).unwrap();
        assert_eq!(p1.length(), 3);
        assert_eq!(p1.colour(&vec![0]), Some(3));
        assert_eq!(p1.colour(&vec![0, 0]), Some(2));
        assert_eq!(p1.colour(&vec![0, 0, 0]), Some(1));

        assert_eq!(
            project_colouring(&tree, &displayed, 2),
            Err(ForestError::ChildIndex(2))
        );
    }

    #[test]
    fn projection_of_height_one_subtree() {
        let sh = shape(&[2, 2]);
        let inner = Tree::internal(vec![leaf(1, 1), leaf(2, 1)]).unwrap();
        let tree = ReducedForest::new(vec![
            Tree::internal(vec![inner, leaf(1, 2), leaf(2, 2)]).unwrap(),
        ]);
        for c in enumerate_colourings(&tree, &sh, ColouringFilter::GapFree) {
            let (_, p) = project_colouring(&tree, &c, 0).unwrap();
            assert_eq!(p.length(), 1);
            assert_eq!(p.colour(&vec![0]), Some(1));
        }
    }

    #[test]
    fn sign_sums_on_figure_shape() {
        let sh = shape(&[2, 1]);
        for f in enumerate_reduced_forests(&sh.slots()).unwrap() {
            let sum = colouring_sign_sum(&f, &sh);
            match w_of_forest(&f, &sh).finite() {
                Some(w) => assert_eq!(sum, if w % 2 == 0 { 1 } else { -1 }, "forest {f}"),
                None => assert_eq!(sum, 0, "forest {f}"),
            }
        }
        let star = Tree::internal(sh.slots().into_iter().map(Tree::leaf).collect()).unwrap();
        assert_eq!(colouring_sign_sum(&ReducedForest::new(vec![star]), &sh), -1);
        let bare = ReducedForest::new(sh.slots().into_iter().map(Tree::leaf).collect());
        assert_eq!(colouring_sign_sum(&bare, &sh), 1);
    }

    /// Root deletion shortens every gap-free colouring by exactly one and
    /// round-trips with reattachment (all trees on at most five leaves).
    #[test]
    fn root_deletion_colouring_round_trip() {
        let sh = shape(&[3, 2]);
        for t in enumerate_reduced_trees(&sh.slots()).unwrap() {
            if matches!(t, Tree::Leaf(_)) {
                continue;
            }
            let single = ReducedForest::new(vec![t]);
            for c in enumerate_colourings(&single, &sh, ColouringFilter::GapFree) {
                let (forest, fc) = root_deletion_colouring(&single, &c).unwrap();
                assert_eq!(fc.length() + 1, c.length());
                let (back_tree, back_c) = root_attachment_colouring(&forest, &fc).unwrap();
                assert_eq!(back_tree, single);
                assert_eq!(back_c, c);
            }
        }
    }

    /// For mixing trees of height at least two, projection onto each root
    /// subtree is onto: every gap-free colouring of the subtree arises.
    #[test]
    fn projections_are_surjective_for_mixing_trees() {
        for sizes in [&[2, 2][..], &[3, 2][..], &[2, 1, 1][..]] {
            let sh = shape(sizes);
            for t in enumerate_reduced_trees(&sh.slots()).unwrap() {
                let single = ReducedForest::new(vec![t.clone()]);
                if !is_mixing_forest(&single, &sh) || t.height() < 2 {
                    continue;
                }
                let arity = match &t {
                    Tree::Internal(children) => children.len(),
                    Tree::Leaf(_) => unreachable!(),
                };
                let colourings = enumerate_colourings(&single, &sh, ColouringFilter::GapFree);
                for i in 0..arity {
                    let mut seen = std::collections::BTreeSet::new();
                    let mut sub_forest = None;
                    for c in &colourings {
                        let (sub, p) = project_colouring(&single, c, i).unwrap();
                        sub_forest = Some(sub);
                        seen.insert(p);
                    }
                    let sub = sub_forest.unwrap();
                    let expected: std::collections::BTreeSet<Colouring> =
                        enumerate_colourings(&sub, &sh, ColouringFilter::GapFree)
                            .into_iter()
                            .collect();
                    assert_eq!(seen, expected, "subtree {i} of {t}");
                }
            }
        }
    }
}
