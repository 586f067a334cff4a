use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::bitset::Bits;
use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveKind, Sense};
use crate::rational::{int, Rational};

/// Column-major bitset view of a training set.
pub(crate) struct SearchData {
    pub n: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub columns: Vec<Bits>,
    pub class_masks: Vec<Bits>,
    pub all: Bits,
    /// Group id per instance for groups of identical rows holding more than one class.
    conflict_group: Vec<Option<u32>>,
}

impl SearchData {
    pub fn new(data: &BinaryDataset) -> Self {
        let n = data.n();
        let columns = (0..data.n_features())
            .map(|f| Bits::from_indices(n, (0..n).filter(|&i| data.row(i)[f] == 1)))
            .collect();
        let class_masks = (0..data.n_classes())
            .map(|k| Bits::from_indices(n, (0..n).filter(|&i| data.label(i) == k)))
            .collect();
        let mut groups: HashMap<&[u8], Vec<usize>> = HashMap::new();
        for i in 0..n {
            groups.entry(data.row(i)).or_default().push(i);
        }
        let mut conflict_group = vec![None; n];
        let mut members: Vec<&Vec<usize>> = groups.values().collect();
        members.sort();
        let mut next = 0u32;
        for group in members {
            let first = data.label(group[0]);
            if group.iter().any(|&i| data.label(i) != first) {
                for &i in group {
                    conflict_group[i] = Some(next);
                }
                next += 1;
            }
        }
        SearchData {
            n,
            n_features: data.n_features(),
            n_classes: data.n_classes(),
            columns,
            class_masks,
            all: Bits::full(n),
            conflict_group,
        }
    }

    pub fn counts(&self, region: &Bits) -> Vec<usize> {
        self.class_masks
            .iter()
            .map(|m| region.and_count(m))
            .collect()
    }

    pub fn has_conflicts(&self) -> bool {
        self.conflict_group.iter().any(Option::is_some)
    }

    /// Per conflict group, class counts of its members inside `region`.
    pub fn conflict_counts(&self, region: &Bits) -> Vec<Vec<usize>> {
        let mut by_group: HashMap<u32, Vec<usize>> = HashMap::new();
        for i in region.iter() {
            if let Some(g) = self.conflict_group[i] {
                by_group.entry(g).or_insert_with(|| vec![0; self.n_classes])[self.label_of(i)] += 1;
            }
        }
        by_group.into_values().collect()
    }

    fn label_of(&self, i: usize) -> usize {
        self.class_masks
            .iter()
            .position(|m| m.contains(i))
            .unwrap_or(0)
    }
}

/// Integer-scaled separable objective: a misclassified instance of class `k`
/// costs `weights[k]`, a selected feature costs `feature`; the objective is
/// `constant ± cost / scale`.
#[derive(Debug, Clone)]
pub(crate) struct CostModel {
    pub weights: Vec<i64>,
    pub feature: i64,
    pub scale: i64,
    pub constant: Rational,
    pub sense: Sense,
}

const COST_LIMIT: i64 = 1 << 60;

impl CostModel {
    pub fn new(
        kind: &ObjectiveKind,
        alpha: &Rational,
        data: &BinaryDataset,
        f_max: usize,
        depth: usize,
    ) -> Result<Self> {
        let n = data.n() as i64;
        let counts = data.class_counts();
        let (weights, constant): (Vec<Rational>, Rational) = match kind {
            ObjectiveKind::Accuracy => (
                vec![Rational::new(1.into(), n.into()); data.n_classes()],
                int(0),
            ),
            ObjectiveKind::CostSensitive { c_fp, c_fn } => {
                (vec![c_fp / int(n), c_fn / int(n)], int(0))
            }
            ObjectiveKind::BalancedAccuracy => {
                let neg = counts[0] as i64;
                let pos = counts[1] as i64;
                (
                    vec![
                        Rational::new(1.into(), (2 * neg).into()),
                        Rational::new(1.into(), (2 * pos).into()),
                    ],
                    int(1),
                )
            }
            ObjectiveKind::F1 => {
                return Err(Error::Objective("F1 is not separable over leaves".into()))
            }
        };
        let mut scale = BigInt::one();
        for w in weights.iter().chain(std::iter::once(alpha)) {
            scale = scale.lcm(w.denom());
        }
        let to_int = |r: &Rational| -> Option<i64> {
            (r * Rational::from_integer(scale.clone()))
                .to_integer()
                .to_i64()
        };
        let overflow = || {
            Error::HyperParams("objective weights too fine-grained for exact integer search".into())
        };
        let weights: Vec<i64> = weights
            .iter()
            .map(to_int)
            .collect::<Option<_>>()
            .ok_or_else(overflow)?;
        let feature = to_int(alpha).ok_or_else(overflow)?;
        let scale_i = scale.to_i64().ok_or_else(overflow)?;
        weights
            .iter()
            .try_fold(0i64, |acc, &w| acc.checked_add(w.checked_mul(n)?))
            .and_then(|c| {
                let nodes = (1i64 << depth.min(40)).checked_mul(f_max as i64)?;
                c.checked_add(feature.checked_mul(nodes)?)
            })
            .filter(|&c| c < COST_LIMIT)
            .ok_or_else(overflow)?;
        Ok(CostModel {
            weights,
            feature,
            scale: scale_i,
            constant,
            sense: kind.sense(),
        })
    }

    /// Cheapest label for a leaf with these class counts (smallest id on ties) and its cost.
    pub fn leaf(&self, counts: &[usize]) -> (i64, usize) {
        let mut total = 0i64;
        let mut best_keep = -1i64;
        let mut label = 0;
        for (k, (&c, &w)) in counts.iter().zip(&self.weights).enumerate() {
            let v = w * c as i64;
            total += v;
            if v > best_keep {
                best_keep = v;
                label = k;
            }
        }
        (total - best_keep, label)
    }

    /// Cost of instances that no tree can separate (identical rows, different classes).
    pub fn conflict_cost(&self, data: &SearchData, region: &Bits) -> i64 {
        if !data.has_conflicts() {
            return 0;
        }
        data.conflict_counts(region)
            .iter()
            .map(|c| self.leaf(c).0)
            .sum()
    }

    pub fn to_objective(&self, cost: i64) -> Rational {
        let part = Rational::new(cost.into(), self.scale.into());
        match self.sense {
            Sense::Minimize => &self.constant + part,
            Sense::Maximize => &self.constant - part,
        }
    }
}
