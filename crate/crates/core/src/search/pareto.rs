//! F1 search: per (region, depth) fronts of non-dominated (FN, FP, features)
//! triples, combined bottom-up and scored exactly at the root.

use std::cmp::Ordering as CmpOrdering;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;

use super::bitset::Bits;
use super::candidates::distinct_splits;
use super::data::SearchData;
use super::subtree::{shape_cmp, SubTree};
use super::Clock;
use crate::rational::{int, Rational};

#[derive(Debug, Clone)]
pub(crate) struct Point {
    pub fn_: u32,
    pub fp: u32,
    pub features: u32,
    pub tree: Arc<SubTree>,
}

impl Point {
    fn order(&self, other: &Point) -> CmpOrdering {
        (self.fn_, self.fp, self.features)
            .cmp(&(other.fn_, other.fp, other.features))
            .then_with(|| shape_cmp(&self.tree, &other.tree))
    }

    fn dominated_by(&self, q: &Point) -> bool {
        q.fn_ <= self.fn_ && q.fp <= self.fp && q.features <= self.features
    }
}

/// Keeps the points not weakly dominated by an earlier point in
/// `(fn, fp, features, shape)` order.
fn prune(mut points: Vec<Point>) -> Vec<Point> {
    points.sort_by(Point::order);
    let mut kept: Vec<Point> = Vec::new();
    for p in points {
        if !kept.iter().any(|q| p.dominated_by(q)) {
            kept.push(p);
        }
    }
    kept
}

pub(crate) struct FrontSearch<'a> {
    data: &'a SearchData,
    f_max: usize,
    min_leaf: usize,
    max_features: u32,
    clock: &'a Clock,
    memo: DashMap<(Bits, u8), Arc<Vec<Point>>>,
    pub nodes: AtomicU64,
}

impl<'a> FrontSearch<'a> {
    pub fn new(
        data: &'a SearchData,
        f_max: usize,
        s_min: usize,
        max_features: u32,
        clock: &'a Clock,
    ) -> Self {
        FrontSearch {
            data,
            f_max,
            min_leaf: s_min.max(1),
            max_features,
            clock,
            memo: DashMap::new(),
            nodes: AtomicU64::new(0),
        }
    }

    fn leaves(&self, region: &Bits) -> Vec<Point> {
        let counts = self.data.counts(region);
        vec![
            Point {
                fn_: counts[1] as u32,
                fp: 0,
                features: 0,
                tree: Arc::new(SubTree::Leaf(0)),
            },
            Point {
                fn_: 0,
                fp: counts[0] as u32,
                features: 0,
                tree: Arc::new(SubTree::Leaf(1)),
            },
        ]
    }

    /// Front of every subtree of depth at most `depth` on `region`. When the
    /// clock runs out the front may be incomplete but every point is a valid
    /// subtree.
    pub fn front(&self, region: &Bits, depth: usize, parallel: bool) -> Arc<Vec<Point>> {
        let counts = self.data.counts(region);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth == 0 || pure || region.count() < 2 * self.min_leaf {
            return Arc::new(prune(self.leaves(region)));
        }
        let key = (region.clone(), depth as u8);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let cap = self.f_max.min(self.max_features as usize);
        let cands = distinct_splits(
            self.data,
            region,
            cap,
            self.min_leaf,
            |_, _, _| true,
            || self.clock.expired(),
        );
        let mut points = self.leaves(region);
        if let Some(cands) = cands {
            let expand = |c: &super::candidates::Candidate| -> Vec<Point> {
                if self.clock.expired() {
                    return Vec::new();
                }
                let size = c.features.len() as u32;
                let left = self.front(&c.left, depth - 1, false);
                let right = self.front(&c.right, depth - 1, false);
                let mut out = Vec::new();
                for l in left.iter() {
                    for r in right.iter() {
                        let features = size + l.features + r.features;
                        if features > self.max_features {
                            continue;
                        }
                        out.push(Point {
                            fn_: l.fn_ + r.fn_,
                            fp: l.fp + r.fp,
                            features,
                            tree: SubTree::split(
                                &c.features,
                                c.threshold,
                                l.tree.clone(),
                                r.tree.clone(),
                            ),
                        });
                    }
                }
                prune(out)
            };
            let parts: Vec<Vec<Point>> = if parallel {
                cands.par_iter().map(expand).collect()
            } else {
                cands.iter().map(expand).collect()
            };
            for part in parts {
                points.extend(part);
                if points.len() > 4096 {
                    points = prune(points);
                }
            }
        }
        let front = Arc::new(prune(points));
        if !self.clock.aborted() {
            self.memo.insert(key, front.clone());
        }
        front
    }
}

/// Exact F1 of a point given the number of positives.
pub(crate) fn f1_of(p: &Point, positives: usize) -> Rational {
    let tp = positives as i64 - p.fn_ as i64;
    let den = 2 * tp + p.fn_ as i64 + p.fp as i64;
    if den == 0 {
        return int(0);
    }
    Rational::new((2 * tp).into(), den.into())
}

/// Best point under `F1 - alpha * features`, then fewer features, then shape.
pub(crate) fn select<'p>(
    points: impl IntoIterator<Item = &'p Point>,
    positives: usize,
    alpha: &Rational,
) -> Option<(Rational, &'p Point)> {
    let mut best: Option<(Rational, &Point)> = None;
    for p in points {
        let value = f1_of(p, positives) - alpha * int(p.features as i64);
        let better = match &best {
            None => true,
            Some((bv, bp)) => match value.cmp(bv) {
                CmpOrdering::Greater => true,
                CmpOrdering::Less => false,
                CmpOrdering::Equal => {
                    p.features
                        .cmp(&bp.features)
                        .then_with(|| shape_cmp(&p.tree, &bp.tree))
                        == CmpOrdering::Less
                }
            },
        };
        if better {
            best = Some((value, p));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(fn_: u32, fp: u32, features: u32) -> Point {
        Point {
            fn_,
            fp,
            features,
            tree: Arc::new(SubTree::Leaf(0)),
        }
    }

    #[test]
    fn prune_drops_weakly_dominated_points() {
        let kept = prune(vec![
            pt(2, 0, 0),
            pt(0, 3, 0),
            pt(1, 1, 1),
            pt(2, 1, 1),
            pt(0, 3, 0),
            pt(0, 0, 4),
        ]);
        let triples: Vec<_> = kept.iter().map(|p| (p.fn_, p.fp, p.features)).collect();
        assert_eq!(triples, vec![(0, 0, 4), (0, 3, 0), (1, 1, 1), (2, 0, 0)]);
    }

    #[test]
    fn f1_matches_definition() {
        // 4 positives, FN=1, FP=2: 2*3 / (2*3 + 1 + 2) = 6/9
        assert_eq!(f1_of(&pt(1, 2, 0), 4), Rational::new(2.into(), 3.into()));
    }
}
