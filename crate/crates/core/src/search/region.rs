//! Memoized branch-and-bound over (instance set, remaining depth) for
//! objectives that add up over leaves.

use std::sync::atomic::{AtomicI64, AtomicU64, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;

use super::bitset::Bits;
use super::candidates::{distinct_splits, for_each_split, Candidate};
use super::data::{CostModel, SearchData};
use super::subtree::{keep_best, Solved, SubTree};
use super::Clock;

const MEMO_CAP: usize = 4_000_000;

#[derive(Clone)]
enum Memo {
    Exact(Solved),
    /// The optimum is at least this cost.
    Lower(i64),
}

pub(crate) struct RegionSearch<'a> {
    data: &'a SearchData,
    costs: &'a CostModel,
    f_max: usize,
    min_leaf: usize,
    clock: &'a Clock,
    memo: DashMap<(Bits, u8), Memo>,
    pub nodes: AtomicU64,
}

/// Result of a root-level search: the best tree found and, when the search
/// was cut short, a lower bound on what remained unexplored.
pub(crate) struct RootOutcome {
    pub best: Option<Solved>,
    pub open_bound: Option<i64>,
}

struct Scored {
    cand: Candidate,
    lb_left: i64,
    lb_right: i64,
    greedy: i64,
}

impl<'a> RegionSearch<'a> {
    pub fn new(
        data: &'a SearchData,
        costs: &'a CostModel,
        f_max: usize,
        s_min: usize,
        clock: &'a Clock,
    ) -> Self {
        RegionSearch {
            data,
            costs,
            f_max,
            min_leaf: s_min.max(1),
            clock,
            memo: DashMap::new(),
            nodes: AtomicU64::new(0),
        }
    }

    pub fn leaf(&self, region: &Bits) -> Solved {
        let (cost, label) = self.costs.leaf(&self.data.counts(region));
        Solved::leaf(cost, label)
    }

    /// Admissible bound for a region that may still be split.
    pub fn quick_bound(&self, region: &Bits, leaf_cost: i64) -> i64 {
        if leaf_cost == 0 {
            return 0;
        }
        leaf_cost.min(self.costs.feature + self.costs.conflict_cost(self.data, region))
    }

    fn can_split(&self, region: &Bits) -> bool {
        region.count() >= 2 * self.min_leaf
    }

    /// Best subtree of depth at most `depth` for `region` with cost at most `ub`.
    pub fn solve(&self, region: &Bits, depth: usize, ub: i64) -> Option<Solved> {
        if ub < 0 {
            return None;
        }
        let leaf = self.leaf(region);
        if depth == 0 || leaf.cost == 0 || !self.can_split(region) {
            return (leaf.cost <= ub).then_some(leaf);
        }
        let key = (region.clone(), depth as u8);
        if let Some(entry) = self.memo.get(&key) {
            match &*entry {
                Memo::Exact(s) => return (s.cost <= ub).then(|| s.clone()),
                Memo::Lower(l) if *l > ub => return None,
                Memo::Lower(_) => {}
            }
        }
        let bound = self.quick_bound(region, leaf.cost);
        if bound > ub {
            self.store(key, Memo::Lower(bound));
            return None;
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let result = if depth == 1 {
            self.depth_one(region, leaf, ub)
        } else {
            self.deeper(region, depth, leaf, ub, false).best
        };
        if !self.clock.aborted() {
            let entry = match &result {
                Some(s) => Memo::Exact(s.clone()),
                None => Memo::Lower(ub + 1),
            };
            self.store(key, entry);
        }
        result
    }

    fn store(&self, key: (Bits, u8), entry: Memo) {
        if self.memo.len() >= MEMO_CAP {
            return;
        }
        match self.memo.entry(key) {
            dashmap::mapref::entry::Entry::Occupied(mut o) => {
                let replace = match (o.get(), &entry) {
                    (Memo::Exact(_), _) => false,
                    (Memo::Lower(_), Memo::Exact(_)) => true,
                    (Memo::Lower(old), Memo::Lower(new)) => new > old,
                };
                if replace {
                    o.insert(entry);
                }
            }
            dashmap::mapref::entry::Entry::Vacant(v) => {
                v.insert(entry);
            }
        }
    }

    fn size_cap(&self, ub: i64) -> usize {
        if self.costs.feature == 0 {
            self.f_max
        } else {
            self.f_max.min((ub / self.costs.feature).max(0) as usize)
        }
    }

    /// One split with two leaves, evaluated directly from class counts.
    fn depth_one(&self, region: &Bits, leaf: Solved, ub: i64) -> Option<Solved> {
        let counts = self.data.counts(region);
        let m: usize = counts.iter().sum();
        let mut cur = ub.min(leaf.cost);
        let mut best = (leaf.cost <= ub).then_some(leaf);
        let mut right_counts = vec![0usize; counts.len()];
        let mut left_counts = vec![0usize; counts.len()];
        let mut visits = 0u32;
        for_each_split(
            self.data,
            region,
            self.size_cap(cur),
            |features, b, right| {
                visits = visits.wrapping_add(1);
                if visits % 4096 == 0 && self.clock.expired() {
                    return false;
                }
                let fc = self.costs.feature * features.len() as i64;
                if fc > cur {
                    return true;
                }
                for (k, mask) in self.data.class_masks.iter().enumerate() {
                    right_counts[k] = right.and_count(mask);
                    left_counts[k] = counts[k] - right_counts[k];
                }
                let rm: usize = right_counts.iter().sum();
                if rm < self.min_leaf || m - rm < self.min_leaf {
                    return true;
                }
                let (lc, ll) = self.costs.leaf(&left_counts);
                let (rc, rl) = self.costs.leaf(&right_counts);
                let cost = fc + lc + rc;
                if cost > cur {
                    return true;
                }
                let cand = Solved {
                    cost,
                    features: features.len() as u32,
                    tree: SubTree::split(
                        features,
                        b,
                        std::sync::Arc::new(SubTree::Leaf(ll)),
                        std::sync::Arc::new(SubTree::Leaf(rl)),
                    ),
                };
                if keep_best(&mut best, cand) {
                    cur = cost;
                }
                true
            },
        );
        best
    }

    fn scored_candidates(&self, region: &Bits, depth: usize, cur: i64) -> Option<Vec<Scored>> {
        let cands = distinct_splits(
            self.data,
            region,
            self.size_cap(cur),
            self.min_leaf,
            |size, _, _| self.costs.feature * size as i64 <= cur,
            || self.clock.expired(),
        )?;
        let mut scored: Vec<Scored> = cands
            .into_iter()
            .filter_map(|cand| {
                let fc = self.costs.feature * cand.features.len() as i64;
                let left_leaf = self.leaf(&cand.left).cost;
                let right_leaf = self.leaf(&cand.right).cost;
                let (lb_left, lb_right) = if depth > 1 {
                    (
                        self.quick_bound(&cand.left, left_leaf),
                        self.quick_bound(&cand.right, right_leaf),
                    )
                } else {
                    (left_leaf, right_leaf)
                };
                (fc + lb_left + lb_right <= cur).then_some(Scored {
                    greedy: fc + left_leaf + right_leaf,
                    cand,
                    lb_left,
                    lb_right,
                })
            })
            .collect();
        scored.sort_by(|a, b| {
            a.greedy
                .cmp(&b.greedy)
                .then_with(|| a.cand.features.len().cmp(&b.cand.features.len()))
                .then_with(|| a.cand.features.cmp(&b.cand.features))
                .then(a.cand.threshold.cmp(&b.cand.threshold))
        });
        Some(scored)
    }

    fn candidate_bound(&self, s: &Scored) -> i64 {
        self.costs.feature * s.cand.features.len() as i64 + s.lb_left + s.lb_right
    }

    /// Completes one candidate split within `cur`, or reports it cannot beat `cur`.
    fn expand(&self, s: &Scored, depth: usize, cur: i64) -> Option<Solved> {
        if self.candidate_bound(s) > cur {
            return None;
        }
        let fc = self.costs.feature * s.cand.features.len() as i64;
        let left = self.solve(&s.cand.left, depth - 1, cur - fc - s.lb_right)?;
        let right = self.solve(&s.cand.right, depth - 1, cur - fc - left.cost)?;
        Some(Solved {
            cost: fc + left.cost + right.cost,
            features: s.cand.features.len() as u32 + left.features + right.features,
            tree: SubTree::split(&s.cand.features, s.cand.threshold, left.tree, right.tree),
        })
    }

    /// Search over all splits of `region` with subtrees of depth `depth - 1`.
    pub fn deeper(
        &self,
        region: &Bits,
        depth: usize,
        leaf: Solved,
        ub: i64,
        parallel: bool,
    ) -> RootOutcome {
        let start_cur = ub.min(leaf.cost);
        let leaf_bound = self.quick_bound(region, leaf.cost);
        let mut best = (leaf.cost <= ub).then_some(leaf);
        let Some(scored) = self.scored_candidates(region, depth, start_cur) else {
            return RootOutcome {
                best,
                open_bound: Some(leaf_bound),
            };
        };
        if !parallel {
            let mut cur = start_cur;
            let mut open: Option<i64> = None;
            for (i, s) in scored.iter().enumerate() {
                let sol = if self.clock.expired() {
                    None
                } else {
                    self.expand(s, depth, cur)
                };
                if let Some(sol) = sol {
                    if keep_best(&mut best, sol) {
                        cur = best.as_ref().map_or(cur, |b| b.cost);
                    }
                }
                if self.clock.aborted() {
                    open = scored[i..].iter().map(|s| self.candidate_bound(s)).min();
                    break;
                }
            }
            return RootOutcome {
                best,
                open_bound: open,
            };
        }

        let cur = AtomicI64::new(start_cur);
        let results: Vec<(Option<Solved>, Option<i64>)> = scored
            .par_iter()
            .map(|s| {
                let lb = self.candidate_bound(s);
                if self.clock.expired() {
                    return (None, Some(lb));
                }
                let snapshot = cur.load(Ordering::Acquire);
                let sol = self.expand(s, depth, snapshot);
                if let Some(sol) = &sol {
                    cur.fetch_min(sol.cost, Ordering::AcqRel);
                }
                let open = self.clock.aborted().then_some(lb);
                (sol, open)
            })
            .collect();
        let mut open: Option<i64> = None;
        for (sol, lb) in results {
            if let Some(sol) = sol {
                keep_best(&mut best, sol);
            }
            if let Some(lb) = lb {
                open = Some(open.map_or(lb, |o: i64| o.min(lb)));
            }
        }
        RootOutcome {
            best,
            open_bound: open,
        }
    }

    /// Root entry: like [`RegionSearch::solve`] but parallel over root splits
    /// and reporting the unexplored bound when interrupted.
    pub fn root(&self, region: &Bits, depth: usize, ub: i64, parallel: bool) -> RootOutcome {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let leaf = self.leaf(region);
        if leaf.cost == 0 || !self.can_split(region) {
            return RootOutcome {
                best: (leaf.cost <= ub).then_some(leaf),
                open_bound: None,
            };
        }
        if depth == 1 {
            let best = self.depth_one(region, leaf, ub);
            let open = self
                .clock
                .aborted()
                .then(|| self.quick_bound(region, self.leaf(region).cost));
            return RootOutcome {
                best,
                open_bound: open,
            };
        }
        self.deeper(region, depth, leaf, ub, parallel)
    }
}
