//! Training objectives and their exact evaluation on a fixed tree.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::metrics::{self, ConfusionMatrix};
use crate::rational::{int, parse_decimal, render_decimal, Rational};
use crate::tree::BooleanTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveKind {
    Accuracy,
    CostSensitive { c_fp: Rational, c_fn: Rational },
    BalancedAccuracy,
    F1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl ObjectiveKind {
    pub fn cost_sensitive(c_fp: Rational, c_fn: Rational) -> Result<Self> {
        let kind = ObjectiveKind::CostSensitive { c_fp, c_fn };
        kind.validate_costs()?;
        Ok(kind)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Accuracy => "accuracy",
            ObjectiveKind::CostSensitive { .. } => "cost-sensitive",
            ObjectiveKind::BalancedAccuracy => "balanced-accuracy",
            ObjectiveKind::F1 => "f1",
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            ObjectiveKind::Accuracy | ObjectiveKind::CostSensitive { .. } => Sense::Minimize,
            ObjectiveKind::BalancedAccuracy | ObjectiveKind::F1 => Sense::Maximize,
        }
    }

    pub fn requires_binary(&self) -> bool {
        !matches!(self, ObjectiveKind::Accuracy)
    }

    fn validate_costs(&self) -> Result<()> {
        if let ObjectiveKind::CostSensitive { c_fp, c_fn } = self {
            if !c_fp.is_positive() || !c_fn.is_positive() {
                return Err(Error::HyperParams(
                    "misclassification costs must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// Checks costs and class count against a training set.
    pub fn validate_for(&self, data: &BinaryDataset) -> Result<()> {
        self.validate_costs()?;
        if self.requires_binary() && data.n_classes() != 2 {
            return Err(Error::Objective(format!(
                "{} needs exactly 2 classes, data has {}",
                self.name(),
                data.n_classes()
            )));
        }
        let counts = data.class_counts();
        match self {
            ObjectiveKind::BalancedAccuracy if counts.iter().any(|&c| c == 0) => {
                Err(Error::Degenerate(
                    "balanced accuracy needs both classes in the training set".into(),
                ))
            }
            ObjectiveKind::F1 if counts[1] == 0 => Err(Error::Degenerate(
                "F1 needs a positive instance in the training set".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `a` is strictly better than `b` under this objective's sense.
    pub fn better(&self, a: &Rational, b: &Rational) -> bool {
        match self.sense() {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }

    /// Objective value from a training confusion matrix and total feature count.
    pub fn value(
        &self,
        cm: &ConfusionMatrix,
        alpha: &Rational,
        features: usize,
    ) -> Result<Rational> {
        let penalty = alpha * int(features as i64);
        let n = cm.total();
        if n == 0 {
            return Err(Error::Degenerate(
                "objective on an empty training set".into(),
            ));
        }
        Ok(match self {
            ObjectiveKind::Accuracy => Rational::new(cm.errors().into(), n.into()) + penalty,
            ObjectiveKind::CostSensitive { c_fp, c_fn } => {
                metrics::mec(cm, c_fp, c_fn)? / int(n as i64) + penalty
            }
            ObjectiveKind::BalancedAccuracy => metrics::balanced_accuracy(cm)? - penalty,
            ObjectiveKind::F1 => metrics::f1(cm)? - penalty,
        })
    }

    /// The metric used to compare models on held-out data, and whether larger is better.
    pub fn selection_metric(&self, cm: &ConfusionMatrix) -> Result<(Rational, bool)> {
        Ok(match self {
            ObjectiveKind::Accuracy => (metrics::accuracy(cm)?, true),
            ObjectiveKind::CostSensitive { c_fp, c_fn } => (metrics::mec(cm, c_fp, c_fn)?, false),
            ObjectiveKind::BalancedAccuracy => (metrics::balanced_accuracy(cm)?, true),
            ObjectiveKind::F1 => (metrics::f1(cm)?, true),
        })
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveKind::CostSensitive { c_fp, c_fn } => {
                write!(
                    f,
                    "cost-sensitive:{}:{}",
                    render_decimal(c_fp),
                    render_decimal(c_fn)
                )
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    /// `accuracy`, `balanced-accuracy`, `f1`, or `cost-sensitive:<C_FP>:<C_FN>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "accuracy" | "acc" => return Ok(ObjectiveKind::Accuracy),
            "balanced-accuracy" | "balanced" | "ba" => return Ok(ObjectiveKind::BalancedAccuracy),
            "f1" => return Ok(ObjectiveKind::F1),
            _ => {}
        }
        let mut parts = lower.split(':');
        if matches!(parts.next(), Some("cost-sensitive" | "cs" | "mec")) {
            let c_fp = parts.next().and_then(parse_decimal);
            let c_fn = parts.next().and_then(parse_decimal);
            if let (Some(c_fp), Some(c_fn), None) = (c_fp, c_fn, parts.next()) {
                return ObjectiveKind::cost_sensitive(c_fp, c_fn);
            }
            return Err(Error::Config(format!(
                "expected cost-sensitive:<C_FP>:<C_FN>, got '{s}'"
            )));
        }
        Err(Error::Config(format!("unknown objective '{s}'")))
    }
}

pub fn training_confusion(tree: &BooleanTree, data: &BinaryDataset) -> Result<ConfusionMatrix> {
    let predictions = data
        .rows()
        .iter()
        .map(|x| tree.predict(x))
        .collect::<Result<Vec<_>>>()?;
    metrics::confusion(data.labels(), &predictions, data.n_classes())
}

/// Objective value of `tree` on `data`, computed from predictions.
pub fn evaluate(
    kind: &ObjectiveKind,
    alpha: &Rational,
    tree: &BooleanTree,
    data: &BinaryDataset,
) -> Result<Rational> {
    let cm = training_confusion(tree, data)?;
    kind.value(&cm, alpha, tree.total_features())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn parses_objective_names() {
        assert_eq!(
            "accuracy".parse::<ObjectiveKind>().unwrap(),
            ObjectiveKind::Accuracy
        );
        assert_eq!("F1".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::F1);
        assert_eq!(
            "cost-sensitive:2:0.5".parse::<ObjectiveKind>().unwrap(),
            ObjectiveKind::CostSensitive {
                c_fp: int(2),
                c_fn: ratio(1, 2)
            }
        );
        assert!("cost-sensitive:0:1".parse::<ObjectiveKind>().is_err());
        assert!("cost-sensitive:1".parse::<ObjectiveKind>().is_err());
        assert!("gini".parse::<ObjectiveKind>().is_err());
        let cs = ObjectiveKind::cost_sensitive(int(3), ratio(1, 4)).unwrap();
        assert_eq!(cs.to_string().parse::<ObjectiveKind>().unwrap(), cs);
    }

    #[test]
    fn values_follow_formulas() {
        let cm = metrics::confusion(&[1, 1, 0, 0], &[1, 0, 1, 0], 2).unwrap();
        let alpha = ratio(1, 100);
        assert_eq!(
            ObjectiveKind::Accuracy.value(&cm, &alpha, 3).unwrap(),
            ratio(1, 2) + ratio(3, 100)
        );
        let cs = ObjectiveKind::cost_sensitive(int(2), int(1)).unwrap();
        assert_eq!(cs.value(&cm, &int(0), 0).unwrap(), ratio(3, 4));
        assert_eq!(
            ObjectiveKind::BalancedAccuracy
                .value(&cm, &int(0), 0)
                .unwrap(),
            ratio(1, 2)
        );
        assert_eq!(
            ObjectiveKind::F1.value(&cm, &alpha, 1).unwrap(),
            ratio(1, 2) - ratio(1, 100)
        );
    }
}
