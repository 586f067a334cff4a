//! Exact search for optimal Boolean-rule trees under a wall-clock budget.
//!
//! The default engine works on instance sets: the best subtree of a given
//! depth for a set of training instances does not depend on how the set was
//! reached, so results are memoized per (set, depth) and shared between
//! branches. F1, which does not add up over leaves, keeps per-set fronts of
//! non-dominated (FN, FP, features) triples instead. A node-order engine that
//! fixes branch nodes one at a time and a brute-force enumerator are kept as
//! independent references.

mod bitset;
mod brute;
mod candidates;
mod data;
mod node_order;
mod pareto;
mod region;
mod subtree;

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use num_traits::Signed;

pub use brute::{brute_force, node_rules, space_size, BRUTE_FORCE_LIMIT};
pub use node_order::{lower_bound, SearchNode};

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::objective::{self, ObjectiveKind};
use crate::rational::{int, Rational};
use crate::tree::{BooleanTree, HyperParams};
use bitset::Bits;
use data::{CostModel, SearchData};
use pareto::FrontSearch;
use region::RegionSearch;
use subtree::{keep_best, to_boolean_tree, Solved, SubTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    FeasibleTimeLimit,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::FeasibleTimeLimit => "FeasibleTimeLimit",
            SolveStatus::Infeasible => "Infeasible",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Incumbent objective and dual bound at the moment the incumbent changed.
#[derive(Debug, Clone)]
pub struct TracePoint {
    pub elapsed: Duration,
    pub objective: Rational,
    pub dual_bound: Rational,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub elapsed: Duration,
    pub incumbent_updates: u64,
    pub trace: Vec<TracePoint>,
}

impl SolveStats {
    pub fn nodes_per_second(&self) -> f64 {
        let secs = self.elapsed.as_secs_f64();
        if secs > 0.0 {
            self.nodes as f64 / secs
        } else {
            0.0
        }
    }

    /// `seconds,objective,dual_bound` rows with a header.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("seconds,objective,dual_bound\n");
        for p in &self.trace {
            out.push_str(&format!(
                "{:.6},{},{}\n",
                p.elapsed.as_secs_f64(),
                crate::rational::to_f64(&p.objective),
                crate::rational::to_f64(&p.dual_bound)
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub tree: BooleanTree,
    pub objective: Rational,
    pub dual_bound: Rational,
    /// `|objective - dual_bound| / max(1, |objective|)`.
    pub gap: Rational,
    pub status: SolveStatus,
    /// Misclassified training instances per true class, as tallied by the
    /// search from its own instance partition.
    pub class_errors: Vec<u64>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub(crate) fn new(
        tree: BooleanTree,
        objective: Rational,
        dual_bound: Rational,
        status: SolveStatus,
        class_errors: Vec<u64>,
        stats: SolveStats,
    ) -> Self {
        let gap = if status == SolveStatus::Optimal {
            int(0)
        } else {
            let scale = objective.abs().max(int(1));
            (&objective - &dual_bound).abs() / scale
        };
        SolveResult {
            tree,
            objective,
            dual_bound,
            gap,
            status,
            class_errors,
            stats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Memoized search over instance sets (fronts for F1).
    #[default]
    Region,
    /// Depth-first search fixing branch nodes in breadth-first order.
    NodeOrder,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Wall-clock budget; `None` means unlimited.
    pub budget: Option<Duration>,
    pub workers: usize,
    pub engine: Engine,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: None,
            workers: 1,
            engine: Engine::Region,
        }
    }
}

/// Deadline shared by all workers. Once expired it stays expired.
pub(crate) struct Clock {
    start: Instant,
    deadline: Option<Instant>,
    aborted: AtomicBool,
}

impl Clock {
    pub fn new(budget: Option<Duration>) -> Self {
        let start = Instant::now();
        Clock {
            start,
            deadline: budget.and_then(|b| start.checked_add(b)),
            aborted: AtomicBool::new(false),
        }
    }

    pub fn expired(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return true;
        }
        match self.deadline {
            Some(d) if Instant::now() >= d => {
                self.aborted.store(true, Ordering::Relaxed);
                true
            }
            _ => false,
        }
    }

    /// Whether any check has seen the deadline pass.
    pub fn aborted(&self) -> bool {
        self.aborted.load(Ordering::Relaxed)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

/// Solves within `budget` using `workers` threads with the default engine.
pub fn solve(
    train: &BinaryDataset,
    hp: &HyperParams,
    obj: &ObjectiveKind,
    budget: Duration,
    workers: usize,
) -> Result<SolveResult> {
    if budget.is_zero() {
        return Err(Error::HyperParams("budget must be positive".into()));
    }
    solve_with(
        train,
        hp,
        obj,
        &SolveOptions {
            budget: Some(budget),
            workers,
            engine: Engine::Region,
        },
    )
}

pub fn solve_with(
    train: &BinaryDataset,
    hp: &HyperParams,
    obj: &ObjectiveKind,
    opts: &SolveOptions,
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
    if opts.budget.is_some_and(|b| b.is_zero()) {
        return Err(Error::HyperParams("budget must be positive".into()));
    }
    if train.n() < hp.s_min.max(1) {
        return Err(Error::Infeasible(format!(
            "{} training instances cannot fill a leaf of at least {}",
            train.n(),
            hp.s_min
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::HyperParams(format!("worker pool: {e}")))?;
    let clock = Clock::new(opts.budget);
    let result = pool.install(|| match (opts.engine, obj) {
        (Engine::NodeOrder, _) => node_order::solve_node_order(train, hp, obj, &clock),
        (Engine::Region, ObjectiveKind::F1) => solve_f1(train, hp, &clock, opts.workers > 1),
        (Engine::Region, _) => solve_separable(train, hp, obj, &clock, opts.workers > 1),
    })?;
    let recomputed = objective::evaluate(obj, &hp.alpha, &result.tree, train)?;
    assert_eq!(
        recomputed, result.objective,
        "search objective disagrees with the objective recomputed from predictions"
    );
    Ok(result)
}

fn solve_separable(
    train: &BinaryDataset,
    hp: &HyperParams,
    obj: &ObjectiveKind,
    clock: &Clock,
    parallel: bool,
) -> Result<SolveResult> {
    let data = SearchData::new(train);
    let costs = CostModel::new(obj, &hp.alpha, train, hp.f_max, hp.depth)?;
    let search = RegionSearch::new(&data, &costs, hp.f_max, hp.s_min, clock);
    let root_leaf = search.leaf(&data.all);
    let root_bound = search.quick_bound(&data.all, root_leaf.cost);
    let mut best: Solved = root_leaf;
    let mut updates = 1u64;
    let mut trace = vec![TracePoint {
        elapsed: clock.elapsed(),
        objective: costs.to_objective(best.cost),
        dual_bound: costs.to_objective(root_bound),
    }];
    let mut dual_cost = None;
    if clock.expired() {
        dual_cost = Some(root_bound);
    } else {
        for depth in 1..=hp.depth {
            let outcome = search.root(&data.all, depth, best.cost, parallel);
            if let Some(found) = outcome.best {
                let mut slot = Some(best.clone());
                if keep_best(&mut slot, found) {
                    best = slot.expect("kept");
                    updates += 1;
                    trace.push(TracePoint {
                        elapsed: clock.elapsed(),
                        objective: costs.to_objective(best.cost),
                        dual_bound: costs.to_objective(root_bound),
                    });
                }
            }
            if clock.aborted() {
                dual_cost = Some(if depth == hp.depth {
                    outcome.open_bound.map_or(best.cost, |b| b.min(best.cost))
                } else {
                    root_bound
                });
                break;
            }
        }
    }
    let tree = to_boolean_tree(&best.tree, hp.depth, train.n_features()).canonicalize();
    let mut class_errors = vec![0; data.n_classes];
    subtree_errors(&data, &best.tree, &data.all, &mut class_errors);
    let objective = costs.to_objective(best.cost);
    let (status, dual_bound) = match dual_cost {
        None => (SolveStatus::Optimal, objective.clone()),
        Some(c) => (SolveStatus::FeasibleTimeLimit, costs.to_objective(c)),
    };
    Ok(SolveResult::new(
        tree,
        objective,
        dual_bound,
        status,
        class_errors,
        SolveStats {
            nodes: search.nodes.load(Ordering::Relaxed),
            elapsed: clock.elapsed(),
            incumbent_updates: updates,
            trace,
        },
    ))
}

/// Adds the members of `region` that `sub` misclassifies to `errors`, by true class.
fn subtree_errors(data: &SearchData, sub: &SubTree, region: &Bits, errors: &mut [u64]) {
    match sub {
        SubTree::Leaf(label) => {
            for (k, mask) in data.class_masks.iter().enumerate() {
                if k != *label {
                    errors[k] += region.and_count(mask) as u64;
                }
            }
        }
        SubTree::Split {
            features,
            threshold,
            left,
            right,
        } => {
            let above = region.iter().filter(|&i| {
                features
                    .iter()
                    .filter(|&&f| data.columns[f].contains(i))
                    .count()
                    > *threshold
            });
            let goes_right = Bits::from_indices(data.n, above);
            subtree_errors(data, left, &region.and_not(&goes_right), errors);
            subtree_errors(data, right, &goes_right, errors);
        }
    }
}

fn solve_f1(
    train: &BinaryDataset,
    hp: &HyperParams,
    clock: &Clock,
    parallel: bool,
) -> Result<SolveResult> {
    let data = SearchData::new(train);
    let counts = train.class_counts();
    let (neg, pos) = (counts[0] as i64, counts[1] as i64);
    let structural = hp.f_max as u64 * ((1u64 << hp.depth) - 1);
    // A tree with k features scores at most 1 - alpha * k and must beat the
    // all-positive leaf, whose F1 is 2P / (2P + N).
    let max_features = if hp.alpha.is_positive() {
        let baseline = Rational::new((2 * pos).into(), (2 * pos + neg).into());
        let k = ((int(1) - baseline) / &hp.alpha).floor().to_integer();
        num_traits::ToPrimitive::to_u64(&k)
            .unwrap_or(u64::MAX)
            .min(structural)
    } else {
        structural
    };
    let search = FrontSearch::new(
        &data,
        hp.f_max,
        hp.s_min,
        max_features.min(u32::MAX as u64) as u32,
        clock,
    );
    let mut best: Option<(Rational, pareto::Point)> = None;
    let mut updates = 0u64;
    let mut trace = Vec::new();
    let consider =
        |points: &[pareto::Point], best: &mut Option<(Rational, pareto::Point)>| -> bool {
            let Some((value, p)) = pareto::select(points, pos as usize, &hp.alpha) else {
                return false;
            };
            let replace = match best {
                None => true,
                Some((bv, bp)) => {
                    value > *bv
                        || (value == *bv
                            && p.features
                                .cmp(&bp.features)
                                .then_with(|| subtree::shape_cmp(&p.tree, &bp.tree))
                                .is_lt())
                }
            };
            if replace {
                *best = Some((value, p.clone()));
            }
            replace
        };
    let upper = int(1);
    let root_leaves = search.front(&data.all, 0, false);
    if consider(&root_leaves, &mut best) {
        updates += 1;
        trace.push(TracePoint {
            elapsed: clock.elapsed(),
            objective: best.as_ref().expect("set").0.clone(),
            dual_bound: upper.clone(),
        });
    }
    let mut timed_out = clock.expired();
    if !timed_out {
        for depth in 1..=hp.depth {
            let front = search.front(&data.all, depth, parallel);
            if consider(&front, &mut best) {
                updates += 1;
                trace.push(TracePoint {
                    elapsed: clock.elapsed(),
                    objective: best.as_ref().expect("set").0.clone(),
                    dual_bound: upper.clone(),
                });
            }
            if clock.aborted() {
                timed_out = true;
                break;
            }
        }
    }
    let (objective, point) = best.ok_or_else(|| Error::Infeasible("no feasible tree".into()))?;
    let tree = to_boolean_tree(&point.tree, hp.depth, train.n_features()).canonicalize();
    let (status, dual_bound) = if timed_out {
        (SolveStatus::FeasibleTimeLimit, upper.max(objective.clone()))
    } else {
        (SolveStatus::Optimal, objective.clone())
    };
    let class_errors = vec![u64::from(point.fp), u64::from(point.fn_)];
    Ok(SolveResult::new(
        tree,
        objective,
        dual_bound,
        status,
        class_errors,
        SolveStats {
            nodes: search.nodes.load(Ordering::Relaxed),
            elapsed: clock.elapsed(),
            incumbent_updates: updates,
            trace,
        },
    ))
}
