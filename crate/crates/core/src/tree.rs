//! Maximal-depth trees whose branch nodes test "at most `b` of the features in `S` are set".
//!
//! Nodes are numbered heap-style: the root is 1, node `t` has children `2t`
//! and `2t + 1`, branch nodes are `1..2^D` and leaves are `2^D..2^(D+1)`.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::Signed;

use crate::dataset::write_atomic;
use crate::error::{Error, Result};
use crate::rational::Rational;

const FORMAT_HEADER: &str = "booltree-model 1";

/// Index sets of the depth-`D` maximal tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeTopology {
    depth: usize,
}

impl TreeTopology {
    pub fn new(depth: usize) -> Self {
        TreeTopology { depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_nodes(&self) -> usize {
        (1 << (self.depth + 1)) - 1
    }

    pub fn branch_nodes(&self) -> std::ops::Range<usize> {
        1..(1 << self.depth)
    }

    pub fn leaves(&self) -> std::ops::Range<usize> {
        (1 << self.depth)..(1 << (self.depth + 1))
    }

    pub fn n_branch(&self) -> usize {
        (1 << self.depth) - 1
    }

    pub fn n_leaves(&self) -> usize {
        1 << self.depth
    }

    pub fn is_leaf(&self, t: usize) -> bool {
        t >= (1 << self.depth)
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        (t > 1).then_some(t / 2)
    }

    /// Level of `t` with the root at 0.
    pub fn level(t: usize) -> usize {
        (usize::BITS - 1 - t.leading_zeros()) as usize
    }

    /// Ancestors from the parent up to the root.
    pub fn ancestors(&self, t: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut u = t;
        while u > 1 {
            u /= 2;
            out.push(u);
        }
        out
    }

    /// Ancestors whose left branch lies on the path to `t`.
    pub fn left_ancestors(&self, t: usize) -> Vec<usize> {
        self.path_ancestors(t, 0)
    }

    /// Ancestors whose right branch lies on the path to `t`.
    pub fn right_ancestors(&self, t: usize) -> Vec<usize> {
        self.path_ancestors(t, 1)
    }

    fn path_ancestors(&self, t: usize, side: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut u = t;
        while u > 1 {
            if u % 2 == side {
                out.push(u / 2);
            }
            u /= 2;
        }
        out
    }

    /// Branch nodes whose split makes leaf `t` exist: the parent, plus every
    /// higher ancestor from which `t` is reached by going left only once below it.
    pub fn potential_parents(&self, t: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut u = t;
        while u > 1 {
            out.push(u / 2);
            if u % 2 == 1 {
                break;
            }
            u /= 2;
        }
        out
    }

    /// Leaf reached from `t` by always going left.
    pub fn leftmost_leaf(&self, t: usize) -> usize {
        t << (self.depth - Self::level(t))
    }
}

/// Branch rule: go left iff at most `threshold` features of `features` are 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitRule {
    pub features: Vec<usize>,
    pub threshold: usize,
    pub active: bool,
}

impl SplitRule {
    pub fn inactive() -> Self {
        SplitRule {
            features: Vec::new(),
            threshold: 0,
            active: false,
        }
    }

    /// Active rule; features are sorted and deduplicated.
    pub fn new(mut features: Vec<usize>, threshold: usize) -> Self {
        features.sort_unstable();
        features.dedup();
        SplitRule {
            features,
            threshold,
            active: true,
        }
    }

    pub fn goes_left(&self, x: &[u8]) -> bool {
        !self.active || self.count(x) <= self.threshold
    }

    pub fn count(&self, x: &[u8]) -> usize {
        self.features.iter().map(|&f| x[f] as usize).sum()
    }

    pub fn describe(&self) -> String {
        if !self.active {
            return "inactive".to_string();
        }
        let terms: Vec<String> = self
            .features
            .iter()
            .map(|f| format!("f{}", f + 1))
            .collect();
        format!("{} <= {}", terms.join(" + "), self.threshold)
    }
}

/// Pre-order token of a tree's effective structure, used for canonical tie-breaks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeToken {
    Leaf(Option<usize>),
    Split(Vec<usize>, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanTree {
    depth: usize,
    n_features: usize,
    rules: Vec<SplitRule>,
    leaf_labels: Vec<Option<usize>>,
}

impl BooleanTree {
    /// Validated constructor. `rules[t - 1]` belongs to branch node `t`,
    /// `leaf_labels[t - 2^D]` to leaf `t`.
    pub fn new(
        depth: usize,
        n_features: usize,
        rules: Vec<SplitRule>,
        leaf_labels: Vec<Option<usize>>,
    ) -> Result<Self> {
        let tree = Self::unchecked(depth, n_features, rules, leaf_labels)?;
        tree.validate()?;
        Ok(tree)
    }

    /// Only checks vector shapes; see [`BooleanTree::canonicalize`].
    pub fn unchecked(
        depth: usize,
        n_features: usize,
        rules: Vec<SplitRule>,
        leaf_labels: Vec<Option<usize>>,
    ) -> Result<Self> {
        if depth == 0 || depth > 20 {
            return Err(Error::Tree(format!("depth {depth} out of range 1..=20")));
        }
        let topo = TreeTopology::new(depth);
        if rules.len() != topo.n_branch() {
            return Err(Error::Tree(format!(
                "{} rules for {} branch nodes",
                rules.len(),
                topo.n_branch()
            )));
        }
        if leaf_labels.len() != topo.n_leaves() {
            return Err(Error::Tree(format!(
                "{} leaf labels for {} leaves",
                leaf_labels.len(),
                topo.n_leaves()
            )));
        }
        Ok(BooleanTree {
            depth,
            n_features,
            rules,
            leaf_labels,
        })
    }

    /// Tree with every branch node inactive and one label on the leftmost leaf.
    pub fn constant(depth: usize, n_features: usize, label: usize) -> Self {
        let topo = TreeTopology::new(depth);
        let mut labels = vec![None; topo.n_leaves()];
        labels[0] = Some(label);
        BooleanTree {
            depth,
            n_features,
            rules: vec![SplitRule::inactive(); topo.n_branch()],
            leaf_labels: labels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in self.topology().branch_nodes() {
            let rule = self.rule(t);
            if !rule.active {
                if !rule.features.is_empty() || rule.threshold != 0 {
                    return Err(Error::Tree(format!(
                        "node {t}: inactive node carries a rule"
                    )));
                }
                continue;
            }
            if t > 1 && !self.rule(t / 2).active {
                return Err(Error::Tree(format!(
                    "node {t}: active below an inactive parent"
                )));
            }
            if rule.features.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Tree(format!(
                    "node {t}: features not sorted and distinct"
                )));
            }
            if let Some(&f) = rule.features.iter().find(|&&f| f >= self.n_features) {
                return Err(Error::Tree(format!(
                    "node {t}: feature f{} beyond {} features",
                    f + 1,
                    self.n_features
                )));
            }
            let cap = rule.features.len().saturating_sub(1);
            if rule.threshold > cap {
                return Err(Error::Tree(format!(
                    "node {t}: threshold {} exceeds {cap} for {} features",
                    rule.threshold,
                    rule.features.len()
                )));
            }
        }
        let reachable = self.reachable_leaves();
        for t in self.topology().leaves() {
            let label = self.leaf_label(t);
            match (reachable.contains(&t), label) {
                (true, None) => return Err(Error::UnlabeledLeaf(t)),
                (false, Some(_)) => {
                    return Err(Error::Tree(format!(
                        "leaf {t}: unreachable leaf carries a label"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn topology(&self) -> TreeTopology {
        TreeTopology::new(self.depth)
    }

    pub fn rule(&self, t: usize) -> &SplitRule {
        &self.rules[t - 1]
    }

    pub fn rules(&self) -> &[SplitRule] {
        &self.rules
    }

    pub fn leaf_label(&self, t: usize) -> Option<usize> {
        self.leaf_labels[t - (1 << self.depth)]
    }

    pub fn leaf_labels(&self) -> &[Option<usize>] {
        &self.leaf_labels
    }

    pub fn total_features(&self) -> usize {
        self.rules
            .iter()
            .filter(|r| r.active)
            .map(|r| r.features.len())
            .sum()
    }

    pub fn max_rule_size(&self) -> usize {
        self.rules
            .iter()
            .map(|r| r.features.len())
            .max()
            .unwrap_or(0)
    }

    /// Leaf reached by `x`: at an active node go left iff the rule holds,
    /// at an inactive node always go left.
    pub fn route(&self, x: &[u8]) -> Result<usize> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let first_leaf = 1 << self.depth;
        let mut t = 1;
        while t < first_leaf {
            t = if self.rule(t).goes_left(x) {
                2 * t
            } else {
                2 * t + 1
            };
        }
        Ok(t)
    }

    pub fn predict(&self, x: &[u8]) -> Result<usize> {
        let leaf = self.route(x)?;
        self.leaf_label(leaf).ok_or(Error::UnlabeledLeaf(leaf))
    }

    /// Leaves that can receive instances given the active/inactive pattern.
    pub fn reachable_leaves(&self) -> Vec<usize> {
        let topo = self.topology();
        let mut out = Vec::new();
        let mut stack = vec![1usize];
        while let Some(t) = stack.pop() {
            if topo.is_leaf(t) {
                out.push(t);
            } else if self.rule(t).active {
                stack.push(2 * t + 1);
                stack.push(2 * t);
            } else {
                out.push(topo.leftmost_leaf(t));
            }
        }
        out.sort_unstable();
        out
    }

    /// Pre-order tokens of the effective tree; an inactive subtree is its leftmost leaf.
    pub fn shape(&self) -> Vec<ShapeToken> {
        let topo = self.topology();
        let mut out = Vec::new();
        let mut stack = vec![1usize];
        while let Some(t) = stack.pop() {
            if topo.is_leaf(t) {
                out.push(ShapeToken::Leaf(self.leaf_label(t)));
            } else if self.rule(t).active {
                let r = self.rule(t);
                out.push(ShapeToken::Split(r.features.clone(), r.threshold));
                stack.push(2 * t + 1);
                stack.push(2 * t);
            } else {
                out.push(ShapeToken::Leaf(self.leaf_label(topo.leftmost_leaf(t))));
            }
        }
        out
    }

    /// Tie-break order among trees of equal objective: fewer features, then
    /// lexicographically smaller pre-order shape.
    pub fn tie_break_cmp(&self, other: &BooleanTree) -> Ordering {
        self.total_features()
            .cmp(&other.total_features())
            .then_with(|| self.shape().cmp(&other.shape()))
    }

    /// Sorts feature sets, clears everything below inactive nodes and drops
    /// labels from unreachable leaves. Idempotent.
    pub fn canonicalize(&self) -> BooleanTree {
        let topo = self.topology();
        let mut rules = self.rules.clone();
        for t in topo.branch_nodes() {
            let parent_off = t > 1 && !rules[t / 2 - 1].active;
            let rule = &mut rules[t - 1];
            if parent_off {
                rule.active = false;
            }
            if rule.active {
                rule.features.sort_unstable();
                rule.features.dedup();
            } else {
                rule.features.clear();
                rule.threshold = 0;
            }
        }
        let mut tree = BooleanTree {
            depth: self.depth,
            n_features: self.n_features,
            rules,
            leaf_labels: self.leaf_labels.clone(),
        };
        let reachable = tree.reachable_leaves();
        let first_leaf = 1 << self.depth;
        for (i, label) in tree.leaf_labels.iter_mut().enumerate() {
            if !reachable.contains(&(first_leaf + i)) {
                *label = None;
            }
        }
        tree
    }

    /// Depth of an equivalent univariate tree: each level contributes
    /// `2^(m - 1)` where `m` is the largest rule size among its active nodes.
    pub fn equivalent_univariate_depth(&self) -> Result<u64> {
        if !self.rules.iter().any(|r| r.active) {
            return Err(Error::Tree("no active split".into()));
        }
        let mut total = 0u64;
        for level in 0..self.depth {
            let widest = ((1usize << level)..(1usize << (level + 1)))
                .map(|t| self.rule(t))
                .filter(|r| r.active)
                .map(|r| r.features.len())
                .max()
                .unwrap_or(0);
            if widest > 0 {
                total += 1u64 << (widest - 1);
            }
        }
        Ok(total)
    }

    /// Levels (root = 1) that hold at least one active split.
    pub fn active_levels(&self) -> usize {
        (0..self.depth)
            .filter(|&level| {
                ((1usize << level)..(1usize << (level + 1))).any(|t| self.rule(t).active)
            })
            .count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER}");
        let _ = writeln!(out, "depth {}", self.depth);
        let _ = writeln!(out, "features {}", self.n_features);
        for t in self.topology().branch_nodes() {
            let r = self.rule(t);
            if r.active {
                let feats: Vec<String> = r.features.iter().map(|f| format!("f{}", f + 1)).collect();
                let sep = if feats.is_empty() { "" } else { " " };
                let _ = writeln!(
                    out,
                    "node {t} split {}{sep}le {}",
                    feats.join(" "),
                    r.threshold
                );
            } else {
                let _ = writeln!(out, "node {t} inactive");
            }
        }
        for t in self.topology().leaves() {
            match self.leaf_label(t) {
                Some(k) => {
                    let _ = writeln!(out, "leaf {t} label {k}");
                }
                None => {
                    let _ = writeln!(out, "leaf {t} none");
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, l)) if l == FORMAT_HEADER => {}
            Some((n, l)) => {
                return Err(Error::format(
                    n,
                    format!("expected '{FORMAT_HEADER}', found '{l}'"),
                ))
            }
            None => return Err(Error::format(0, "empty model file")),
        }
        let mut header_value = |key: &str| -> Result<usize> {
            let (n, l) = lines
                .next()
                .ok_or_else(|| Error::format(0, format!("missing '{key}'")))?;
            let mut tokens = l.split_whitespace();
            if tokens.next() != Some(key) {
                return Err(Error::format(n, format!("expected '{key}'")));
            }
            tokens
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::format(n, format!("bad '{key}' value")))
        };
        let depth = header_value("depth")?;
        let n_features = header_value("features")?;
        if depth == 0 || depth > 20 {
            return Err(Error::format(2, format!("depth {depth} out of range")));
        }
        let topo = TreeTopology::new(depth);
        let mut rules: Vec<Option<SplitRule>> = vec![None; topo.n_branch()];
        let mut labels: Vec<Option<Option<usize>>> = vec![None; topo.n_leaves()];
        for (n, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let id: usize = tokens
                .get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::format(n, "missing node id"))?;
            match tokens[0] {
                "node" => {
                    if !topo.branch_nodes().contains(&id) {
                        return Err(Error::format(n, format!("node {id} is not a branch node")));
                    }
                    let rule = match tokens.get(2).copied() {
                        Some("inactive") if tokens.len() == 3 => SplitRule::inactive(),
                        Some("split") => {
                            parse_rule(&tokens[3..]).map_err(|m| Error::format(n, m))?
                        }
                        _ => return Err(Error::format(n, "expected 'inactive' or 'split'")),
                    };
                    if rules[id - 1].replace(rule).is_some() {
                        return Err(Error::format(n, format!("node {id} given twice")));
                    }
                }
                "leaf" => {
                    if !topo.leaves().contains(&id) {
                        return Err(Error::format(n, format!("{id} is not a leaf")));
                    }
                    let label = match (tokens.get(2).copied(), tokens.get(3)) {
                        (Some("none"), None) => None,
                        (Some("label"), Some(k)) => {
                            Some(k.parse().map_err(|_| Error::format(n, "bad label"))?)
                        }
                        _ => return Err(Error::format(n, "expected 'label <k>' or 'none'")),
                    };
                    if labels[id - topo.leaves().start].replace(label).is_some() {
                        return Err(Error::format(n, format!("leaf {id} given twice")));
                    }
                }
                other => return Err(Error::format(n, format!("unknown record '{other}'"))),
            }
        }
        let rules = rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| Error::format(0, format!("node {} missing", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or_else(|| {
                    Error::format(0, format!("leaf {} missing", i + topo.leaves().start))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BooleanTree::new(depth, n_features, rules, labels)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_text().as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

fn parse_rule(tokens: &[&str]) -> std::result::Result<SplitRule, String> {
    let le = tokens
        .iter()
        .position(|&t| t == "le")
        .ok_or("missing 'le'")?;
    if le + 2 != tokens.len() {
        return Err("expected exactly one threshold after 'le'".into());
    }
    let mut features = Vec::with_capacity(le);
    for tok in &tokens[..le] {
        let f: usize = tok
            .strip_prefix('f')
            .and_then(|v| v.parse().ok())
            .filter(|&f| f >= 1)
            .ok_or_else(|| format!("bad feature '{tok}'"))?;
        features.push(f - 1);
    }
    let threshold = tokens[le + 1]
        .parse()
        .map_err(|_| "bad threshold".to_string())?;
    Ok(SplitRule {
        features,
        threshold,
        active: true,
    })
}

/// Search hyperparameters: depth `D`, per-node feature cap, minimum leaf support
/// and the per-feature complexity weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperParams {
    pub depth: usize,
    pub f_max: usize,
    pub s_min: usize,
    pub alpha: Rational,
}

impl HyperParams {
    pub fn new(depth: usize, f_max: usize, s_min: usize, alpha: Rational) -> Result<Self> {
        let hp = HyperParams {
            depth,
            f_max,
            s_min,
            alpha,
        };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::HyperParams("depth must be at least 1".into()));
        }
        if self.depth > 20 {
            return Err(Error::HyperParams("depth above 20 is not supported".into()));
        }
        if self.f_max == 0 {
            return Err(Error::HyperParams("F_max must be at least 1".into()));
        }
        if self.alpha.is_negative() {
            return Err(Error::HyperParams("alpha must be non-negative".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_one_tree() -> BooleanTree {
        BooleanTree::new(
            1,
            5,
            vec![SplitRule::new(vec![0, 1, 2], 1)],
            vec![Some(0), Some(1)],
        )
        .unwrap()
    }

    /// Root "f1 + f2 <= 0", its right child "f4 + f5 <= 1".
    fn example_two_tree() -> BooleanTree {
        BooleanTree::new(
            2,
            5,
            vec![
                SplitRule::new(vec![0, 1], 0),
                SplitRule::inactive(),
                SplitRule::new(vec![3, 4], 1),
            ],
            vec![Some(0), None, Some(0), Some(1)],
        )
        .unwrap()
    }

    #[test]
    fn depth_two_index_sets() {
        let topo = TreeTopology::new(2);
        assert_eq!(topo.n_nodes(), 7);
        assert_eq!(topo.branch_nodes(), 1..4);
        assert_eq!(topo.leaves(), 4..8);
        let mut a6 = topo.ancestors(6);
        a6.sort_unstable();
        assert_eq!(a6, vec![1, 3]);
        assert_eq!(topo.left_ancestors(6), vec![3]);
        assert_eq!(topo.right_ancestors(6), vec![1]);
        let mut lp4 = topo.potential_parents(4);
        lp4.sort_unstable();
        assert_eq!(lp4, vec![1, 2]);
        assert_eq!(topo.potential_parents(5), vec![2]);
    }

    #[test]
    fn ancestor_sets_partition() {
        let topo = TreeTopology::new(4);
        for t in 2..topo.n_nodes() + 1 {
            let mut both: Vec<usize> = topo.left_ancestors(t);
            both.extend(topo.right_ancestors(t));
            both.sort_unstable();
            let mut all = topo.ancestors(t);
            all.sort_unstable();
            assert_eq!(both, all, "node {t}");
        }
    }

    #[test]
    fn example_one_routing() {
        let tree = example_one_tree();
        assert_eq!(tree.route(&[0, 0, 0, 1, 0]).unwrap(), 2);
        assert_eq!(tree.predict(&[0, 0, 0, 1, 0]).unwrap(), 0);
        assert_eq!(tree.route(&[1, 1, 1, 0, 1]).unwrap(), 3);
        assert_eq!(tree.predict(&[1, 1, 1, 0, 1]).unwrap(), 1);
        assert!(matches!(
            tree.route(&[1, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn example_two_routing_goes_right_twice() {
        let tree = example_two_tree();
        assert_eq!(tree.route(&[1, 0, 0, 1, 1]).unwrap(), 7);
        assert_eq!(tree.predict(&[1, 0, 0, 1, 1]).unwrap(), 1);
        assert_eq!(tree.route(&[0, 0, 1, 1, 1]).unwrap(), 4);
    }

    #[test]
    fn inactive_tree_sends_everything_left() {
        let tree = BooleanTree::constant(3, 4, 1);
        for x in [[0, 0, 0, 0], [1, 1, 1, 1], [1, 0, 1, 0]] {
            assert_eq!(tree.route(&x).unwrap(), 8);
            assert_eq!(tree.predict(&x).unwrap(), 1);
        }
    }

    #[test]
    fn univariate_depth_formula() {
        assert_eq!(example_two_tree().equivalent_univariate_depth().unwrap(), 4);
        let root = BooleanTree::new(
            1,
            5,
            vec![SplitRule::new(vec![0, 2, 4], 1)],
            vec![Some(0), Some(1)],
        )
        .unwrap();
        assert_eq!(root.equivalent_univariate_depth().unwrap(), 4);
        let uni = BooleanTree::new(
            3,
            3,
            (0..7).map(|i| SplitRule::new(vec![i % 3], 0)).collect(),
            (0..8).map(|i| Some(i % 2)).collect(),
        )
        .unwrap();
        assert_eq!(uni.equivalent_univariate_depth().unwrap(), 3);
        assert!(BooleanTree::constant(2, 3, 0)
            .equivalent_univariate_depth()
            .is_err());
    }

    #[test]
    fn canonicalize_sorts_and_clears() {
        let raw = BooleanTree::unchecked(
            2,
            4,
            vec![
                SplitRule {
                    features: vec![3, 1, 2],
                    threshold: 1,
                    active: true,
                },
                SplitRule::inactive(),
                SplitRule::inactive(),
            ],
            vec![Some(0), Some(1), Some(1), Some(0)],
        )
        .unwrap();
        let canon = raw.canonicalize();
        assert_eq!(canon.rule(1).features, vec![1, 2, 3]);
        assert_eq!(canon.leaf_labels(), &[Some(0), None, Some(1), None]);
        assert_eq!(canon.canonicalize(), canon);

        let inactive_root = BooleanTree::unchecked(
            2,
            4,
            vec![
                SplitRule::inactive(),
                SplitRule::new(vec![0], 0),
                SplitRule::new(vec![1], 0),
            ],
            vec![Some(1), Some(0), Some(0), Some(1)],
        )
        .unwrap();
        let canon = inactive_root.canonicalize();
        assert!(canon.rules().iter().all(|r| !r.active));
        assert_eq!(canon.leaf_labels(), &[Some(1), None, None, None]);
        canon.validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        for tree in [
            example_one_tree(),
            example_two_tree(),
            BooleanTree::constant(2, 3, 1),
        ] {
            let text = tree.to_text();
            assert_eq!(BooleanTree::from_text(&text).unwrap(), tree);
            assert_eq!(BooleanTree::from_text(&text).unwrap().to_text(), text);
        }
        assert!(example_one_tree()
            .to_text()
            .contains("node 1 split f1 f2 f3 le 1"));
    }

    #[test]
    fn load_rejects_bad_files() {
        assert!(BooleanTree::from_text("").is_err());
        let bad = "booltree-model 1\ndepth 1\nfeatures 5\nnode 1 split f1 f2 le 2\nleaf 2 label 0\nleaf 3 label 1\n";
        let err = BooleanTree::from_text(bad).unwrap_err().to_string();
        assert!(err.contains("node 1"), "{err}");
        let missing =
            "booltree-model 1\ndepth 1\nfeatures 5\nnode 1 split f1 le 0\nleaf 2 label 0\n";
        assert!(BooleanTree::from_text(missing).is_err());
        let unlabeled = "booltree-model 1\ndepth 1\nfeatures 5\nnode 1 split f1 le 0\nleaf 2 label 0\nleaf 3 none\n";
        assert!(matches!(
            BooleanTree::from_text(unlabeled),
            Err(Error::UnlabeledLeaf(3))
        ));
    }

    #[test]
    fn hyperparams_validation() {
        use crate::rational::{int, ratio};
        assert!(HyperParams::new(0, 3, 1, int(0)).is_err());
        assert!(HyperParams::new(2, 0, 1, int(0)).is_err());
        assert!(HyperParams::new(2, 3, 1, ratio(-1, 100)).is_err());
        assert!(HyperParams::new(2, 3, 0, ratio(1, 100)).is_ok());
    }
}
