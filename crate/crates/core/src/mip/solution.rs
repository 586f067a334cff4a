use std::fs;
use std::path::Path;

use super::check::{check_assignment, Assignment, ViolationKind};
use super::model::*;
use crate::error::{Error, Result};
use crate::rational::{parse_decimal, ratio, Rational};
use crate::tree::{BooleanTree, SplitRule, TreeTopology};

/// Reads "name value" lines ('#' starts a comment); unmentioned variables are 0.
pub fn parse_solution(m: &ModelSpec, text: &str) -> Result<Assignment> {
    let mut a = Assignment::zeros(m);
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::format(
                idx + 1,
                format!("expected 'name value', found '{line}'"),
            ));
        };
        if !m.has_variable(name) {
            return Err(Error::UnknownVariable(name.to_string()));
        }
        let value = parse_decimal(value)
            .ok_or_else(|| Error::format(idx + 1, format!("bad value '{value}'")))?;
        a.set(name, value);
    }
    Ok(a)
}

pub fn load_solution(m: &ModelSpec, path: impl AsRef<Path>) -> Result<Assignment> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_solution(m, &text)
}

fn value(a: &Assignment, name: &str) -> Rational {
    a.get(name).cloned().unwrap_or_default()
}

/// Decodes a feasible assignment into a canonical tree.
pub fn extract_tree(m: &ModelSpec, a: &Assignment) -> Result<BooleanTree> {
    let report = check_assignment(m, a)?;
    if let Some(v) = report
        .violations
        .iter()
        .find(|v| v.kind == ViolationKind::Integrality)
    {
        return Err(Error::NonIntegral(v.detail.clone()));
    }
    if !report.feasible() {
        let names: Vec<&str> = report.violations.iter().map(|v| v.name.as_str()).collect();
        return Err(Error::Infeasible(format!("violated: {}", names.join(", "))));
    }
    let layout = m.layout();
    let topo = TreeTopology::new(layout.depth);
    let half = ratio(1, 2);
    let mut rules = Vec::with_capacity(topo.n_branch());
    for t in topo.branch_nodes() {
        if value(a, &d_name(t)) <= half {
            rules.push(SplitRule::inactive());
            continue;
        }
        let features: Vec<usize> = (0..layout.n_features)
            .filter(|&f| value(a, &a_name(t, f)) > half)
            .collect();
        let threshold = value(a, &b_name(t)).round().to_integer();
        let threshold = usize::try_from(threshold)
            .map_err(|_| Error::Tree(format!("node {t}: negative threshold")))?;
        if !features.is_empty() && threshold >= features.len() {
            return Err(Error::Tree(format!(
                "node {t}: threshold {threshold} is vacuous for {} selected features",
                features.len()
            )));
        }
        rules.push(SplitRule {
            features,
            threshold,
            active: true,
        });
    }
    let mut labels = Vec::with_capacity(topo.n_leaves());
    for t in topo.leaves() {
        if value(a, &l_name(t)) <= half {
            labels.push(None);
            continue;
        }
        let chosen: Vec<usize> = (0..layout.n_classes)
            .filter(|&k| value(a, &c_name(t, k)) > half)
            .collect();
        match chosen.as_slice() {
            [k] => labels.push(Some(*k)),
            [] => labels.push(None),
            _ => {
                return Err(Error::Tree(format!(
                    "leaf {t} carries {} labels",
                    chosen.len()
                )))
            }
        }
    }
    let tree =
        BooleanTree::unchecked(layout.depth, layout.n_features, rules, labels)?.canonicalize();
    tree.validate()?;
    Ok(tree)
}
