//! Exhaustive enumeration of every rule assignment; the reference the
//! branch-and-bound engines are tested against.

use std::cmp::Ordering;
use std::time::Instant;

use super::{SolveResult, SolveStats, SolveStatus};
use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::objective::{self, ObjectiveKind};
use crate::rational::{int, Rational};
use crate::tree::{BooleanTree, HyperParams, SplitRule, TreeTopology};

/// Largest number of candidate trees [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Every rule a single active node may use: `1 <= |S| <= f_max`, `b < |S|`.
pub fn node_rules(n_features: usize, f_max: usize) -> Vec<SplitRule> {
    let mut out = Vec::new();
    let mut subset = Vec::new();
    fn walk(start: usize, n: usize, cap: usize, subset: &mut Vec<usize>, out: &mut Vec<SplitRule>) {
        for f in start..n {
            subset.push(f);
            for b in 0..subset.len() {
                out.push(SplitRule::new(subset.clone(), b));
            }
            if subset.len() < cap {
                walk(f + 1, n, cap, subset, out);
            }
            subset.pop();
        }
    }
    walk(0, n_features, f_max, &mut subset, &mut out);
    out
}

/// Number of trees enumerated for depth `depth` with `rules` active choices
/// per node plus "inactive": `T(d) = 1 + rules * T(d-1)^2`, `T(0) = 1`.
pub fn space_size(depth: usize, rules: usize) -> Option<u128> {
    let mut t: u128 = 1;
    for _ in 0..depth {
        t = (rules as u128)
            .checked_mul(t.checked_mul(t)?)?
            .checked_add(1)?;
    }
    Some(t)
}

/// Enumerates every tree and returns the best one under the objective with
/// the usual tie-break (fewer features, then smaller pre-order shape).
pub fn brute_force(
    train: &BinaryDataset,
    hp: &HyperParams,
    obj: &ObjectiveKind,
) -> Result<SolveResult> {
    hp.validate()?;
    obj.validate_for(train)?;
    if hp.f_max > train.n_features() {
        return Err(Error::HyperParams(format!(
            "F_max {} exceeds the {} features",
            hp.f_max,
            train.n_features()
        )));
    }
    let rules = node_rules(train.n_features(), hp.f_max);
    let size = space_size(hp.depth, rules.len()).unwrap_or(u128::MAX);
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::SpaceTooLarge(size));
    }
    let start = Instant::now();
    let topo = TreeTopology::new(hp.depth);
    let mut state = Enumeration {
        train,
        hp,
        obj,
        topo: &topo,
        rules: &rules,
        current: vec![SplitRule::inactive(); topo.n_branch()],
        best: None,
        visited: 0,
    };
    state.assign(1)?;
    let visited = state.visited;
    let (objective, tree) = state.best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no tree gives every leaf at least {} instances",
            hp.s_min
        ))
    })?;
    let mut class_errors = vec![0u64; train.n_classes()];
    for i in 0..train.n() {
        if tree.predict(train.row(i))? != train.label(i) {
            class_errors[train.label(i)] += 1;
        }
    }
    Ok(SolveResult {
        tree,
        dual_bound: objective.clone(),
        objective,
        gap: int(0),
        status: SolveStatus::Optimal,
        class_errors,
        stats: SolveStats {
            nodes: visited,
            elapsed: start.elapsed(),
            incumbent_updates: 0,
            trace: Vec::new(),
        },
    })
}

struct Enumeration<'a> {
    train: &'a BinaryDataset,
    hp: &'a HyperParams,
    obj: &'a ObjectiveKind,
    topo: &'a TreeTopology,
    rules: &'a [SplitRule],
    current: Vec<SplitRule>,
    best: Option<(Rational, BooleanTree)>,
    visited: u64,
}

impl Enumeration<'_> {
    fn assign(&mut self, t: usize) -> Result<()> {
        if t > self.topo.n_branch() {
            self.visited += 1;
            return self.evaluate();
        }
        self.current[t - 1] = SplitRule::inactive();
        self.assign(t + 1)?;
        if t > 1 && !self.current[t / 2 - 1].active {
            return Ok(());
        }
        for r in 0..self.rules.len() {
            self.current[t - 1] = self.rules[r].clone();
            self.assign(t + 1)?;
        }
        self.current[t - 1] = SplitRule::inactive();
        Ok(())
    }

    fn evaluate(&mut self) -> Result<()> {
        let topo = self.topo;
        let n_classes = self.train.n_classes();
        let first_leaf = topo.leaves().start;
        let unlabeled = BooleanTree::unchecked(
            self.hp.depth,
            self.train.n_features(),
            self.current.clone(),
            vec![None; topo.n_leaves()],
        )?;
        let mut counts = vec![vec![0usize; n_classes]; topo.n_leaves()];
        for (x, &y) in self.train.rows().iter().zip(self.train.labels()) {
            counts[unlabeled.route(x)? - first_leaf][y] += 1;
        }
        let reachable = unlabeled.reachable_leaves();
        for &leaf in &reachable {
            if counts[leaf - first_leaf].iter().sum::<usize>() < self.hp.s_min {
                return Ok(());
            }
        }
        let labelings: Vec<Vec<Option<usize>>> = match self.obj {
            ObjectiveKind::F1 => {
                let populated: Vec<usize> = reachable
                    .iter()
                    .copied()
                    .filter(|&l| counts[l - first_leaf].iter().sum::<usize>() > 0)
                    .collect();
                (0..1u64 << populated.len())
                    .map(|mask| {
                        let mut labels = vec![None; topo.n_leaves()];
                        for &leaf in &reachable {
                            labels[leaf - first_leaf] = Some(0);
                        }
                        for (j, &leaf) in populated.iter().enumerate() {
                            labels[leaf - first_leaf] = Some((mask >> j & 1) as usize);
                        }
                        labels
                    })
                    .collect()
            }
            _ => {
                let mut labels = vec![None; topo.n_leaves()];
                for &leaf in &reachable {
                    labels[leaf - first_leaf] = Some(self.leaf_label(&counts[leaf - first_leaf]));
                }
                vec![labels]
            }
        };
        for labels in labelings {
            let tree = BooleanTree::new(
                self.hp.depth,
                self.train.n_features(),
                self.current.clone(),
                labels,
            )?;
            let value = objective::evaluate(self.obj, &self.hp.alpha, &tree, self.train)?;
            let replace = match &self.best {
                None => true,
                Some((bv, bt)) => {
                    self.obj.better(&value, bv)
                        || (value == *bv && tree.tie_break_cmp(bt) == Ordering::Less)
                }
            };
            if replace {
                self.best = Some((value, tree));
            }
        }
        Ok(())
    }

    /// Label with the smallest weighted error in a leaf; smallest id on ties.
    fn leaf_label(&self, counts: &[usize]) -> usize {
        let class_counts = self.train.class_counts();
        let weight = |k: usize| -> Rational {
            match self.obj {
                ObjectiveKind::Accuracy | ObjectiveKind::F1 => int(1),
                ObjectiveKind::CostSensitive { c_fp, c_fn } => {
                    if k == 0 {
                        c_fp.clone()
                    } else {
                        c_fn.clone()
                    }
                }
                ObjectiveKind::BalancedAccuracy => {
                    Rational::new(1.into(), (class_counts[k] as i64).into())
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
        best.map_or(0, |(_, l)| l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_features_three_per_node_gives_fifty_five_rules() {
        assert_eq!(node_rules(5, 3).len(), 55);
        assert_eq!(space_size(1, 55), Some(56));
        assert_eq!(space_size(2, 55), Some(1 + 55 * 56 * 56));
    }
}
