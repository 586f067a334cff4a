use std::collections::BTreeMap;

use num_traits::Zero;

use super::model::*;
use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::metrics;
use crate::rational::{int, is_integral_within, ratio, render_decimal, Rational};
use crate::tree::BooleanTree;

/// Variable values by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, Rational>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every variable of `m` set to zero.
    pub fn zeros(m: &ModelSpec) -> Self {
        Assignment {
            values: m
                .variables()
                .iter()
                .map(|v| (v.name.clone(), Rational::zero()))
                .collect(),
        }
    }

    pub fn set(&mut self, name: impl Into<String>, value: Rational) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.values.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in the model's variable order.
    fn dense(&self, m: &ModelSpec) -> Result<Vec<Rational>> {
        m.variables()
            .iter()
            .map(|v| {
                self.values.get(&v.name).cloned().ok_or_else(|| {
                    Error::Data(format!("assignment is missing variable '{}'", v.name))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Constraint,
    Bound,
    Integrality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub name: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
    pub objective: Rational,
}

impl CheckReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, name: &str) -> bool {
        self.violations.iter().any(|v| v.name == name)
    }
}

pub fn tolerance() -> Rational {
    ratio(1, 1_000_000)
}

fn dot(terms: &Terms, x: &[Rational]) -> Rational {
    terms
        .iter()
        .fold(Rational::zero(), |acc, (v, c)| acc + c * &x[*v])
}

fn satisfied(lhs: &Rational, sense: ConstraintSense, rhs: &Rational, tol: &Rational) -> bool {
    match sense {
        ConstraintSense::Le => *lhs <= rhs + tol,
        ConstraintSense::Ge => *lhs >= rhs - tol,
        ConstraintSense::Eq => (lhs - rhs) <= *tol && (rhs - lhs) <= *tol,
    }
}

/// Evaluates every bound, integrality requirement and constraint of `m` at `a`
/// (tolerance 1e-6) and the objective exactly.
pub fn check_assignment(m: &ModelSpec, a: &Assignment) -> Result<CheckReport> {
    for name in a.values.keys() {
        if !m.has_variable(name) {
            return Err(Error::UnknownVariable(name.clone()));
        }
    }
    let x = a.dense(m)?;
    let tol = tolerance();
    let mut violations = Vec::new();
    for (v, value) in m.variables().iter().zip(&x) {
        let below = *value < &v.lower - &tol;
        let above = v.upper.as_ref().is_some_and(|u| *value > u + &tol);
        if below || above {
            violations.push(Violation {
                kind: ViolationKind::Bound,
                name: v.name.clone(),
                detail: format!("value {} outside bounds", render_decimal(value)),
            });
        }
        if v.kind != VarKind::Continuous && !is_integral_within(value, &tol) {
            let what = if v.kind == VarKind::Binary {
                "non-integral binary"
            } else {
                "non-integral integer"
            };
            violations.push(Violation {
                kind: ViolationKind::Integrality,
                name: v.name.clone(),
                detail: format!("{what} {} = {}", v.name, render_decimal(value)),
            });
        }
    }
    for c in m.constraints() {
        let lhs = dot(&c.terms, &x);
        if !satisfied(&lhs, c.sense, &c.rhs, &tol) {
            violations.push(Violation {
                kind: ViolationKind::Constraint,
                name: c.name.clone(),
                detail: format!(
                    "{} {} {} violated",
                    render_decimal(&lhs),
                    c.sense.symbol(),
                    render_decimal(&c.rhs)
                ),
            });
        }
    }
    for q in m.quadratic() {
        let lhs = dot(&q.linear, &x)
            + q.quadratic
                .iter()
                .fold(Rational::zero(), |acc, (u, v, c)| acc + c * &x[*u] * &x[*v]);
        if !satisfied(&lhs, q.sense, &q.rhs, &tol) {
            violations.push(Violation {
                kind: ViolationKind::Constraint,
                name: q.name.clone(),
                detail: format!(
                    "{} {} {} violated",
                    render_decimal(&lhs),
                    q.sense.symbol(),
                    render_decimal(&q.rhs)
                ),
            });
        }
    }
    let objective = &m.objective().constant + dot(&m.objective().terms, &x);
    Ok(CheckReport {
        violations,
        objective,
    })
}

/// The assignment that represents `tree` on the model's training data.
pub fn encode_tree(m: &ModelSpec, tree: &BooleanTree, train: &BinaryDataset) -> Result<Assignment> {
    let layout = m.layout();
    if tree.depth() != layout.depth || tree.n_features() != layout.n_features {
        return Err(Error::Tree(format!(
            "tree has depth {} over {} features, model expects depth {} over {}",
            tree.depth(),
            tree.n_features(),
            layout.depth,
            layout.n_features
        )));
    }
    if train.n() != layout.n_instances || train.n_classes() != layout.n_classes {
        return Err(Error::Data("training set does not match the model".into()));
    }
    let topo = tree.topology();
    let mut a = Assignment::zeros(m);
    let one = int(1);
    for t in topo.branch_nodes() {
        let rule = tree.rule(t);
        if !rule.active {
            continue;
        }
        a.set(d_name(t), one.clone());
        a.set(b_name(t), int(rule.threshold as i64));
        for &f in &rule.features {
            a.set(a_name(t, f), one.clone());
        }
    }
    for t in tree.reachable_leaves() {
        a.set(l_name(t), one.clone());
        if let Some(k) = tree.leaf_label(t) {
            a.set(c_name(t, k), one.clone());
        }
    }
    let n_leaves = topo.n_leaves();
    let first = topo.leaves().start;
    let mut per_leaf = vec![vec![0i64; layout.n_classes]; n_leaves];
    let mut predictions = Vec::with_capacity(train.n());
    for i in 0..train.n() {
        let leaf = tree.route(train.row(i))?;
        a.set(z_name(i, leaf), one.clone());
        per_leaf[leaf - first][train.label(i)] += 1;
        predictions.push(tree.leaf_label(leaf).ok_or(Error::UnlabeledLeaf(leaf))?);
    }
    let per_class = m.has_variable(&ek_name(first, 0));
    for t in topo.leaves() {
        let counts = &per_leaf[t - first];
        let total: i64 = counts.iter().sum();
        a.set(n_name(t), int(total));
        for (k, &count) in counts.iter().enumerate() {
            a.set(m_name(k, t), int(count));
        }
        let label = tree.leaf_label(t);
        if per_class {
            if let Some(k) = label {
                a.set(ek_name(t, k), int(total - counts[k]));
            }
        } else {
            let err = label.map_or(0, |k| total - counts[k]);
            a.set(e_name(t), int(err));
        }
    }
    if m.has_variable(F1_NAME) {
        let cm = metrics::confusion(train.labels(), &predictions, train.n_classes())?;
        a.set(F1_NAME, metrics::f1(&cm)?);
    }
    Ok(a)
}
