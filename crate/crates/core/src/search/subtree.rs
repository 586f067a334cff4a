use std::cmp::Ordering;
use std::sync::Arc;

use crate::tree::{BooleanTree, SplitRule, TreeTopology};

/// Effective tree below a node: a leaf, or a split with two subtrees.
#[derive(Debug, PartialEq, Eq)]
pub(crate) enum SubTree {
    Leaf(usize),
    Split {
        features: Box<[usize]>,
        threshold: usize,
        left: Arc<SubTree>,
        right: Arc<SubTree>,
    },
}

impl SubTree {
    pub fn split(
        features: &[usize],
        threshold: usize,
        left: Arc<SubTree>,
        right: Arc<SubTree>,
    ) -> Arc<SubTree> {
        Arc::new(SubTree::Split {
            features: features.into(),
            threshold,
            left,
            right,
        })
    }
}

/// Pre-order comparison matching [`BooleanTree::shape`]: leaves before splits,
/// rules by feature list then threshold, then left and right subtrees.
pub(crate) fn shape_cmp(a: &SubTree, b: &SubTree) -> Ordering {
    match (a, b) {
        (SubTree::Leaf(x), SubTree::Leaf(y)) => x.cmp(y),
        (SubTree::Leaf(_), SubTree::Split { .. }) => Ordering::Less,
        (SubTree::Split { .. }, SubTree::Leaf(_)) => Ordering::Greater,
        (
            SubTree::Split {
                features: fa,
                threshold: ta,
                left: la,
                right: ra,
            },
            SubTree::Split {
                features: fb,
                threshold: tb,
                left: lb,
                right: rb,
            },
        ) => fa
            .cmp(fb)
            .then(ta.cmp(tb))
            .then_with(|| shape_cmp(la, lb))
            .then_with(|| shape_cmp(ra, rb)),
    }
}

/// A subtree with its integer cost and selected-feature count.
#[derive(Debug, Clone)]
pub(crate) struct Solved {
    pub cost: i64,
    pub features: u32,
    pub tree: Arc<SubTree>,
}

impl Solved {
    pub fn leaf(cost: i64, label: usize) -> Self {
        Solved {
            cost,
            features: 0,
            tree: Arc::new(SubTree::Leaf(label)),
        }
    }

    /// Total order used for every tie-break: cost, feature count, shape.
    pub fn key_cmp(&self, other: &Solved) -> Ordering {
        self.cost
            .cmp(&other.cost)
            .then(self.features.cmp(&other.features))
            .then_with(|| shape_cmp(&self.tree, &other.tree))
    }
}

/// Keeps the smaller of `best` and `cand` under [`Solved::key_cmp`].
pub(crate) fn keep_best(best: &mut Option<Solved>, cand: Solved) -> bool {
    match best {
        Some(b) if b.key_cmp(&cand) != Ordering::Greater => false,
        _ => {
            *best = Some(cand);
            true
        }
    }
}

/// Places `sub` at the root of a depth-`depth` maximal tree.
pub(crate) fn to_boolean_tree(sub: &SubTree, depth: usize, n_features: usize) -> BooleanTree {
    let topo = TreeTopology::new(depth);
    let mut rules = vec![SplitRule::inactive(); topo.n_branch()];
    let mut labels = vec![None; topo.n_leaves()];
    let first_leaf = topo.leaves().start;
    let mut stack = vec![(1usize, sub)];
    while let Some((t, node)) = stack.pop() {
        match node {
            SubTree::Leaf(k) => {
                let leaf = if topo.is_leaf(t) {
                    t
                } else {
                    topo.leftmost_leaf(t)
                };
                labels[leaf - first_leaf] = Some(*k);
            }
            SubTree::Split {
                features,
                threshold,
                left,
                right,
            } => {
                assert!(!topo.is_leaf(t), "subtree deeper than the tree");
                rules[t - 1] = SplitRule {
                    features: features.to_vec(),
                    threshold: *threshold,
                    active: true,
                };
                stack.push((2 * t, left));
                stack.push((2 * t + 1, right));
            }
        }
    }
    BooleanTree::new(depth, n_features, rules, labels)
        .expect("search produced a structurally valid tree")
}
