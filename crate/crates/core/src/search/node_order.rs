//! Depth-first branch-and-bound that fixes one branch node at a time in
//! breadth-first order, with an explicit partial-tree state and bound.

use std::cmp::Ordering;
use std::sync::Arc;
use std::time::Instant;

use super::bitset::Bits;
use super::candidates::distinct_splits;
use super::data::SearchData;
use super::{Clock, SolveResult, SolveStats, SolveStatus, TracePoint};
use crate::dataset::BinaryDataset;
use crate::error::Result;
use crate::objective::{self, ObjectiveKind, Sense};
use crate::rational::{int, Rational};
use crate::tree::{BooleanTree, HyperParams, SplitRule, TreeTopology};

struct Context {
    data: SearchData,
    hp: HyperParams,
    topo: TreeTopology,
    class_counts: Vec<usize>,
}

/// A partial tree: rules fixed for the branch nodes before `next` (in
/// breadth-first order) and the training instances reaching every node
/// whose ancestors are all fixed.
#[derive(Clone)]
pub struct SearchNode {
    ctx: Arc<Context>,
    rules: Vec<Option<SplitRule>>,
    regions: Vec<Option<Bits>>,
    next: usize,
}

impl SearchNode {
    pub fn root(train: &BinaryDataset, hp: &HyperParams) -> Self {
        let data = SearchData::new(train);
        let topo = TreeTopology::new(hp.depth);
        let mut regions = vec![None; topo.n_nodes() + 1];
        regions[1] = Some(data.all.clone());
        SearchNode {
            ctx: Arc::new(Context {
                data,
                hp: hp.clone(),
                topo,
                class_counts: train.class_counts().to_vec(),
            }),
            rules: vec![None; topo.n_branch()],
            regions,
            next: 1,
        }
    }

    /// Branch node whose rule is decided next, or `None` once all are fixed.
    pub fn next_node(&self) -> Option<usize> {
        (self.next <= self.ctx.topo.n_branch()).then_some(self.next)
    }

    pub fn is_complete(&self) -> bool {
        self.next_node().is_none()
    }

    pub fn rule(&self, t: usize) -> Option<&SplitRule> {
        self.rules[t - 1].as_ref()
    }

    /// Training indices reaching node `t`, if all its ancestors are fixed.
    pub fn region(&self, t: usize) -> Option<Vec<usize>> {
        self.regions[t].as_ref().map(|r| r.iter().collect())
    }

    /// Features used by the fixed active rules.
    pub fn committed_features(&self) -> usize {
        self.rules
            .iter()
            .flatten()
            .filter(|r| r.active)
            .map(|r| r.features.len())
            .sum()
    }

    /// Fixes the next branch node's rule. An inactive rule also fixes every
    /// descendant as inactive and sends the whole region to the leftmost leaf.
    pub fn decide(&self, rule: SplitRule) -> SearchNode {
        let t = self.next_node().expect("decide on a complete node");
        let topo = &self.ctx.topo;
        let mut child = self.clone();
        let region = child.regions[t]
            .clone()
            .expect("region of the next node is known");
        if rule.active {
            let right = right_side(&self.ctx.data, &region, &rule);
            child.regions[2 * t] = Some(region.and_not(&right));
            child.regions[2 * t + 1] = Some(right);
            child.rules[t - 1] = Some(rule);
        } else {
            let mut stack = vec![t];
            while let Some(u) = stack.pop() {
                if !topo.is_leaf(u) {
                    child.rules[u - 1] = Some(SplitRule::inactive());
                    stack.push(2 * u);
                    stack.push(2 * u + 1);
                }
            }
            child.regions[topo.leftmost_leaf(t)] = Some(region);
        }
        while child.next <= topo.n_branch() && child.rules[child.next - 1].is_some() {
            child.next += 1;
        }
        child
    }

    /// Leaves whose region is final.
    fn determined_leaves(&self) -> impl Iterator<Item = &Bits> + '_ {
        self.ctx
            .topo
            .leaves()
            .filter_map(move |t| self.regions[t].as_ref())
    }

    /// Misclassified members per true class when `tree` labels the leaf regions.
    fn class_errors(&self, tree: &BooleanTree) -> Vec<u64> {
        let data = &self.ctx.data;
        let mut errors = vec![0u64; data.n_classes];
        for t in self.ctx.topo.leaves() {
            let (Some(region), Some(label)) = (&self.regions[t], tree.leaf_label(t)) else {
                continue;
            };
            for (k, mask) in data.class_masks.iter().enumerate() {
                if k != label {
                    errors[k] += region.and_count(mask) as u64;
                }
            }
        }
        errors
    }

    /// Complete node as a labeled tree, labels chosen optimally for `obj`.
    pub fn to_tree(&self, obj: &ObjectiveKind) -> Option<BooleanTree> {
        if !self.is_complete() {
            return None;
        }
        let topo = &self.ctx.topo;
        let first_leaf = topo.leaves().start;
        let mut labels = vec![None; topo.n_leaves()];
        let counts: Vec<(usize, Vec<usize>)> = topo
            .leaves()
            .filter_map(|t| {
                self.regions[t]
                    .as_ref()
                    .map(|r| (t, self.ctx.data.counts(r)))
            })
            .collect();
        match obj {
            ObjectiveKind::F1 => {
                let chosen = best_f1_labeling(
                    &counts.iter().map(|(_, c)| c.as_slice()).collect::<Vec<_>>(),
                    self.ctx.class_counts[1],
                )
                .1;
                for ((t, _), positive) in counts.iter().zip(chosen) {
                    labels[t - first_leaf] = Some(positive as usize);
                }
            }
            _ => {
                for (t, c) in &counts {
                    labels[t - first_leaf] =
                        Some(leaf_loss(obj, c, &self.ctx.class_counts, self.ctx.data.n).1);
                }
            }
        }
        let rules = self
            .rules
            .iter()
            .map(|r| r.clone().unwrap_or_else(SplitRule::inactive))
            .collect();
        let tree = BooleanTree::new(topo.depth(), self.ctx.data.n_features, rules, labels).ok()?;
        Some(tree.canonicalize())
    }
}

fn right_side(data: &SearchData, region: &Bits, rule: &SplitRule) -> Bits {
    Bits::from_indices(
        data.n,
        region.iter().filter(|&i| {
            let count = rule
                .features
                .iter()
                .filter(|&&f| data.columns[f].contains(i))
                .count();
            count > rule.threshold
        }),
    )
}

/// Smallest loss contribution of one leaf and the label achieving it.
fn leaf_loss(
    obj: &ObjectiveKind,
    counts: &[usize],
    class_counts: &[usize],
    n: usize,
) -> (Rational, usize) {
    let weight = |k: usize| -> Rational {
        match obj {
            ObjectiveKind::Accuracy | ObjectiveKind::F1 => {
                Rational::new(1.into(), (n as i64).into())
            }
            ObjectiveKind::CostSensitive { c_fp, c_fn } => {
                let c = if k == 0 { c_fp } else { c_fn };
                c / int(n as i64)
            }
            ObjectiveKind::BalancedAccuracy => {
                Rational::new(1.into(), (2 * class_counts[k] as i64).into())
            }
        }
    };
    let mut best: Option<(Rational, usize)> = None;
    for label in 0..counts.len() {
        let loss: Rational = (0..counts.len())
            .filter(|&k| k != label)
            .map(|k| weight(k) * int(counts[k] as i64))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| loss < *b) {
            best = Some((loss, label));
        }
    }
    best.unwrap_or((int(0), 0))
}

/// Best F1 over labelings of the given leaves when every other positive is
/// predicted correctly and no other negative is predicted positive. Leaves
/// are labeled positive in decreasing order of their positive rate.
fn best_f1_labeling(leaves: &[&[usize]], positives: usize) -> (Rational, Vec<bool>) {
    let mut order: Vec<usize> = (0..leaves.len()).collect();
    // a/b > c/d  <=>  a*d > c*b
    order.sort_by(|&i, &j| {
        let (ni, pi) = (leaves[i][0], leaves[i][1]);
        let (nj, pj) = (leaves[j][0], leaves[j][1]);
        (pj * (ni + pi)).cmp(&(pi * (nj + pj))).then(i.cmp(&j))
    });
    let missing: usize = leaves.iter().map(|c| c[1]).sum();
    let free_tp = positives - missing;
    let f1 = |tp: usize, fn_: usize, fp: usize| -> Rational {
        let den = 2 * tp + fn_ + fp;
        if den == 0 {
            int(0)
        } else {
            Rational::new(((2 * tp) as i64).into(), (den as i64).into())
        }
    };
    let (mut tp, mut fn_, mut fp) = (free_tp, missing, 0usize);
    let mut best = (f1(tp, fn_, fp), 0usize);
    for (taken, &i) in order.iter().enumerate() {
        tp += leaves[i][1];
        fn_ -= leaves[i][1];
        fp += leaves[i][0];
        let value = f1(tp, fn_, fp);
        if value > best.0 {
            best = (value, taken + 1);
        }
    }
    let mut labels = vec![false; leaves.len()];
    for &i in &order[..best.1] {
        labels[i] = true;
    }
    (best.0, labels)
}

/// Admissible bound on the loss of any completion of `node`: the optimal
/// loss of every leaf whose region is final plus `alpha` per committed
/// feature; undecided regions contribute nothing. The loss is the objective
/// itself when minimized and `1 - objective` when maximized. For F1 the
/// undecided regions are assumed classified perfectly.
pub fn lower_bound(node: &SearchNode, obj: &ObjectiveKind) -> Rational {
    let ctx = &node.ctx;
    let penalty = &ctx.hp.alpha * int(node.committed_features() as i64);
    let counts: Vec<Vec<usize>> = node
        .determined_leaves()
        .map(|r| ctx.data.counts(r))
        .collect();
    let leaf_part = match obj {
        ObjectiveKind::F1 => {
            let refs: Vec<&[usize]> = counts.iter().map(Vec::as_slice).collect();
            int(1) - best_f1_labeling(&refs, ctx.class_counts[1]).0
        }
        _ => counts
            .iter()
            .map(|c| leaf_loss(obj, c, &ctx.class_counts, ctx.data.n).0)
            .sum(),
    };
    leaf_part + penalty
}

fn loss_to_objective(obj: &ObjectiveKind, loss: &Rational) -> Rational {
    match obj.sense() {
        Sense::Minimize => loss.clone(),
        Sense::Maximize => int(1) - loss,
    }
}

struct Dfs<'a> {
    obj: &'a ObjectiveKind,
    train: &'a BinaryDataset,
    clock: &'a Clock,
    min_leaf: usize,
    best: Option<(Rational, BooleanTree)>,
    best_errors: Vec<u64>,
    nodes: u64,
    updates: u64,
    trace: Vec<TracePoint>,
    root_bound: Rational,
}

impl Dfs<'_> {
    fn visit(&mut self, node: &SearchNode) -> Result<()> {
        if self.clock.expired() {
            return Ok(());
        }
        self.nodes += 1;
        let Some(t) = node.next_node() else {
            let tree = node.to_tree(self.obj).expect("complete node");
            let value = objective::evaluate(self.obj, &node.ctx.hp.alpha, &tree, self.train)?;
            let replace = match &self.best {
                None => true,
                Some((bv, bt)) => {
                    self.obj.better(&value, bv)
                        || (value == *bv && tree.tie_break_cmp(bt) == Ordering::Less)
                }
            };
            if replace {
                self.updates += 1;
                self.trace.push(TracePoint {
                    elapsed: self.clock.elapsed(),
                    objective: value.clone(),
                    dual_bound: loss_to_objective(self.obj, &self.root_bound),
                });
                self.best_errors = node.class_errors(&tree);
                self.best = Some((value, tree));
            }
            return Ok(());
        };
        let region = node.regions[t].clone().expect("next node has a region");
        let mut choices = vec![SplitRule::inactive()];
        if region.count() >= 2 * self.min_leaf {
            let cands = distinct_splits(
                &node.ctx.data,
                &region,
                node.ctx.hp.f_max,
                self.min_leaf,
                |_, _, _| true,
                || self.clock.expired(),
            );
            let Some(mut cands) = cands else {
                return Ok(());
            };
            cands.sort_by(|a, b| {
                (a.features.len(), &a.features, a.threshold).cmp(&(
                    b.features.len(),
                    &b.features,
                    b.threshold,
                ))
            });
            choices.extend(
                cands
                    .into_iter()
                    .map(|c| SplitRule::new(c.features, c.threshold)),
            );
        }
        for rule in choices {
            let child = node.decide(rule);
            if let Some((bv, _)) = &self.best {
                let incumbent_loss = match self.obj.sense() {
                    Sense::Minimize => bv.clone(),
                    Sense::Maximize => int(1) - bv,
                };
                if lower_bound(&child, self.obj) > incumbent_loss {
                    continue;
                }
            }
            self.visit(&child)?;
        }
        Ok(())
    }
}

pub(crate) fn solve_node_order(
    train: &BinaryDataset,
    hp: &HyperParams,
    obj: &ObjectiveKind,
    clock: &Clock,
) -> Result<SolveResult> {
    let start = Instant::now();
    let root = SearchNode::root(train, hp);
    let root_bound = lower_bound(&root, obj);
    let mut dfs = Dfs {
        obj,
        train,
        clock,
        min_leaf: hp.s_min.max(1),
        best: None,
        best_errors: Vec::new(),
        nodes: 0,
        updates: 0,
        trace: Vec::new(),
        root_bound: root_bound.clone(),
    };
    // The single-leaf tree is always feasible and seeds the incumbent.
    let mut leaf_node = root.clone();
    while !leaf_node.is_complete() {
        leaf_node = leaf_node.decide(SplitRule::inactive());
    }
    let leaf_tree = leaf_node.to_tree(obj).expect("complete node");
    dfs.best_errors = leaf_node.class_errors(&leaf_tree);
    let leaf_value = objective::evaluate(obj, &hp.alpha, &leaf_tree, train)?;
    dfs.best = Some((leaf_value, leaf_tree));
    dfs.visit(&root)?;
    let (objective, tree) = dfs.best.expect("seeded incumbent");
    let timed_out = clock.aborted();
    let dual_bound = if timed_out {
        loss_to_objective(obj, &root_bound)
    } else {
        objective.clone()
    };
    Ok(SolveResult::new(
        tree,
        objective,
        dual_bound,
        if timed_out {
            SolveStatus::FeasibleTimeLimit
        } else {
            SolveStatus::Optimal
        },
        dfs.best_errors,
        SolveStats {
            nodes: dfs.nodes,
            elapsed: start.elapsed(),
            incumbent_updates: dfs.updates,
            trace: dfs.trace,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_labeling_takes_best_prefix() {
        // leaf A: 1 neg / 3 pos, leaf B: 4 neg / 1 pos; 6 positives overall.
        let (value, labels) = best_f1_labeling(&[&[1, 3], &[4, 1]], 6);
        // A positive: tp = 2 + 3, fn = 1, fp = 1 -> 10/12
        assert_eq!(value, Rational::new(5.into(), 6.into()));
        assert_eq!(labels, vec![true, false]);
    }
}
