//! Confusion matrices and the evaluation metrics, all in exact rationals.
//!
//! Label 1 is the positive class.

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// `counts[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl BinaryCounts {
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }
}

pub fn confusion(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Data(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::Data(format!(
                "label {} outside 0..{n_classes}",
                t.max(p)
            )));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.n_classes()).map(|k| self.counts[k][k]).sum()
    }

    pub fn errors(&self) -> u64 {
        self.total() - self.correct()
    }

    /// TP/FN/FP/TN; only defined for two classes.
    pub fn binary(&self) -> Result<BinaryCounts> {
        if self.n_classes() != 2 {
            return Err(Error::Objective(format!(
                "binary counts need 2 classes, matrix has {}",
                self.n_classes()
            )));
        }
        Ok(BinaryCounts {
            tp: self.counts[1][1],
            fn_: self.counts[1][0],
            fp: self.counts[0][1],
            tn: self.counts[0][0],
        })
    }
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<Rational> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::Degenerate(
            "accuracy of an empty evaluation set".into(),
        ));
    }
    Ok(Rational::new(cm.correct().into(), n.into()))
}

/// `1 - (FN/n⁺ + FP/n⁻) / 2`.
pub fn balanced_accuracy(cm: &ConfusionMatrix) -> Result<Rational> {
    let b = cm.binary()?;
    if b.positives() == 0 || b.negatives() == 0 {
        return Err(Error::Degenerate(
            "balanced accuracy needs both classes present".into(),
        ));
    }
    let miss_pos = Rational::new(b.fn_.into(), b.positives().into());
    let miss_neg = Rational::new(b.fp.into(), b.negatives().into());
    Ok(int(1) - (miss_pos + miss_neg) / int(2))
}

/// `2(n⁺ - FN) / (2n⁺ - FN + FP)`.
pub fn f1(cm: &ConfusionMatrix) -> Result<Rational> {
    let b = cm.binary()?;
    if b.positives() == 0 {
        return Err(Error::Degenerate(
            "F1 needs at least one positive instance".into(),
        ));
    }
    let num = 2 * b.tp;
    let den = 2 * b.positives() - b.fn_ + b.fp;
    Ok(Rational::new(num.into(), den.into()))
}

/// `C_FP·FP + C_FN·FN`.
pub fn mec(cm: &ConfusionMatrix, c_fp: &Rational, c_fn: &Rational) -> Result<Rational> {
    let b = cm.binary()?;
    Ok(c_fp * int(b.fp as i64) + c_fn * int(b.fn_ as i64))
}
