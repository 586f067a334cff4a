//! Supervised binarization: entropy/MDL discretization of continuous columns
//! followed by one-hot encoding.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{write_atomic, BinaryDataset, ColumnValues, LabelMap, RawDataset};
use crate::error::{Error, Result};

/// Weighted-entropy comparisons closer than this are treated as ties.
const TIE_EPS: f64 = 1e-12;

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn distinct_classes(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c > 0).count()
}

/// MDL-accepted cut points for one feature, ascending.
///
/// Boundaries are midpoints between adjacent distinct values, skipped when
/// both values carry the same single class. The entropy-minimizing boundary
/// (smallest threshold on ties) is kept when its information gain clears
/// `(log2(N-1) + delta) / N`, and both halves are split recursively.
pub fn mdlp_cuts(values: &[f64], labels: &[usize]) -> Result<Vec<f64>> {
    if values.len() != labels.len() {
        return Err(Error::Data(format!(
            "{} values but {} labels",
            values.len(),
            labels.len()
        )));
    }
    if values.len() < 2 {
        return Err(Error::Data("MDLP needs at least two samples".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let sorted_labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);

    let mut cuts = Vec::new();
    split_range(
        &sorted_values,
        &sorted_labels,
        n_classes,
        0,
        values.len(),
        &mut cuts,
    );
    Ok(cuts)
}

fn split_range(
    values: &[f64],
    labels: &[usize],
    n_classes: usize,
    lo: usize,
    hi: usize,
    cuts: &mut Vec<f64>,
) {
    let n = hi - lo;
    if n < 2 {
        return;
    }
    let mut total = vec![0usize; n_classes];
    for &y in &labels[lo..hi] {
        total[y] += 1;
    }
    let ent_s = entropy(&total, n);
    if ent_s == 0.0 {
        return;
    }

    // Runs of equal values with their single class, if pure.
    let mut runs: Vec<(usize, usize, Option<usize>)> = Vec::new();
    let mut start = lo;
    while start < hi {
        let mut end = start + 1;
        while end < hi && values[end] == values[start] {
            end += 1;
        }
        let first = labels[start];
        let pure = labels[start..end]
            .iter()
            .all(|&y| y == first)
            .then_some(first);
        runs.push((start, end, pure));
        start = end;
    }

    let mut left = vec![0usize; n_classes];
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for pair in runs.windows(2) {
        let (a_start, a_end, a_pure) = pair[0];
        let (_, _, b_pure) = pair[1];
        for &y in &labels[a_start..a_end] {
            left[y] += 1;
        }
        if a_pure.is_some() && a_pure == b_pure {
            continue;
        }
        let n_left = a_end - lo;
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let weighted = (n_left as f64 / n as f64) * entropy(&left, n_left)
            + ((n - n_left) as f64 / n as f64) * entropy(&right, n - n_left);
        if best.as_ref().is_none_or(|(e, _, _)| weighted < e - TIE_EPS) {
            best = Some((weighted, a_end, left.clone()));
        }
    }
    let Some((weighted, cut_at, left)) = best else {
        return;
    };
    let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
    let n_left = cut_at - lo;
    let ent_l = entropy(&left, n_left);
    let ent_r = entropy(&right, n - n_left);
    let k = distinct_classes(&total) as f64;
    let k1 = distinct_classes(&left) as f64;
    let k2 = distinct_classes(&right) as f64;
    let gain = ent_s - weighted;
    let delta = (3f64.powf(k) - 2.0).log2() - (k * ent_s - k1 * ent_l - k2 * ent_r);
    let threshold = ((n as f64 - 1.0).log2() + delta) / n as f64;
    if gain <= threshold {
        return;
    }
    split_range(values, labels, n_classes, lo, cut_at, cuts);
    cuts.push((values[cut_at - 1] + values[cut_at]) / 2.0);
    split_range(values, labels, n_classes, cut_at, hi, cuts);
}

/// One-hot columns in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneHot {
    pub categories: Vec<String>,
    pub columns: Vec<Vec<u8>>,
}

pub fn one_hot(values: &[String]) -> OneHot {
    let mut categories: Vec<String> = Vec::new();
    for v in values {
        if !categories.contains(v) {
            categories.push(v.clone());
        }
    }
    let columns = categories
        .iter()
        .map(|c| values.iter().map(|v| u8::from(v == c)).collect())
        .collect();
    OneHot {
        categories,
        columns,
    }
}

/// How one original column is turned into binary columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureEncoding {
    /// Already 0/1; copied through.
    Binary {
        name: String,
    },
    /// Interval membership over `cuts`; `cuts.len() + 1` columns.
    Intervals {
        name: String,
        cuts: Vec<f64>,
    },
    /// One column per category; unseen categories encode as all zeros.
    Categories {
        name: String,
        categories: Vec<String>,
    },
    Dropped {
        name: String,
        reason: String,
    },
}

impl FeatureEncoding {
    pub fn name(&self) -> &str {
        match self {
            FeatureEncoding::Binary { name }
            | FeatureEncoding::Intervals { name, .. }
            | FeatureEncoding::Categories { name, .. }
            | FeatureEncoding::Dropped { name, .. } => name,
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        match self {
            FeatureEncoding::Binary { name } => vec![name.clone()],
            FeatureEncoding::Intervals { name, cuts } => {
                let mut out = Vec::with_capacity(cuts.len() + 1);
                out.push(format!("{name}<={}", cuts[0]));
                for w in cuts.windows(2) {
                    out.push(format!("{}<{name}<={}", w[0], w[1]));
                }
                out.push(format!("{name}>{}", cuts[cuts.len() - 1]));
                out
            }
            FeatureEncoding::Categories { name, categories } => {
                categories.iter().map(|c| format!("{name}={c}")).collect()
            }
            FeatureEncoding::Dropped { .. } => Vec::new(),
        }
    }

    fn encode(&self, values: &ColumnValues) -> Result<Vec<Vec<u8>>> {
        match (self, values) {
            (FeatureEncoding::Dropped { .. }, _) => Ok(Vec::new()),
            (FeatureEncoding::Binary { name }, ColumnValues::Continuous(v)) => {
                let col = v
                    .iter()
                    .enumerate()
                    .map(|(row, &x)| match x {
                        x if x == 0.0 => Ok(0),
                        x if x == 1.0 => Ok(1),
                        _ => Err(Error::Cell {
                            row: row + 1,
                            column: name.clone(),
                            message: format!("{x} is not binary"),
                        }),
                    })
                    .collect::<Result<Vec<u8>>>()?;
                Ok(vec![col])
            }
            (FeatureEncoding::Intervals { cuts, .. }, ColumnValues::Continuous(v)) => {
                let mut cols = vec![vec![0u8; v.len()]; cuts.len() + 1];
                for (row, &x) in v.iter().enumerate() {
                    let bin = cuts.partition_point(|&c| c < x);
                    cols[bin][row] = 1;
                }
                Ok(cols)
            }
            (FeatureEncoding::Categories { categories, .. }, ColumnValues::Categorical(v)) => {
                Ok(categories
                    .iter()
                    .map(|c| v.iter().map(|x| u8::from(x == c)).collect())
                    .collect())
            }
            (FeatureEncoding::Categories { categories, .. }, ColumnValues::Continuous(v)) => {
                let rendered: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                Ok(categories
                    .iter()
                    .map(|c| rendered.iter().map(|x| u8::from(x == c)).collect())
                    .collect())
            }
            (enc, _) => Err(Error::Data(format!(
                "column '{}' does not have the kind it was fitted with",
                enc.name()
            ))),
        }
    }
}

/// Fitted binarization, serializable as pretty-printed JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarizationMap {
    pub label_name: String,
    pub classes: LabelMap,
    pub features: Vec<FeatureEncoding>,
}

fn fit_column(name: &str, values: &ColumnValues, labels: &[usize]) -> Result<FeatureEncoding> {
    let encoding = match values {
        ColumnValues::Continuous(v) => {
            let distinct: HashSet<u64> = v.iter().map(|x| x.to_bits()).collect();
            let binary = v.iter().all(|&x| x == 0.0 || x == 1.0);
            if distinct.len() < 2 {
                FeatureEncoding::Dropped {
                    name: name.to_string(),
                    reason: "constant".into(),
                }
            } else if binary {
                FeatureEncoding::Binary {
                    name: name.to_string(),
                }
            } else {
                let cuts = mdlp_cuts(v, labels)?;
                if cuts.is_empty() {
                    FeatureEncoding::Dropped {
                        name: name.to_string(),
                        reason: "no accepted cut".into(),
                    }
                } else {
                    FeatureEncoding::Intervals {
                        name: name.to_string(),
                        cuts,
                    }
                }
            }
        }
        ColumnValues::Categorical(v) => {
            let categories = one_hot(v).categories;
            if categories.len() < 2 {
                FeatureEncoding::Dropped {
                    name: name.to_string(),
                    reason: "single category".into(),
                }
            } else {
                FeatureEncoding::Categories {
                    name: name.to_string(),
                    categories,
                }
            }
        }
    };
    Ok(encoding)
}

/// Fits cut points and category lists on `raw` (normally the training rows only).
pub fn fit_binarizer(raw: &RawDataset, classes: &LabelMap) -> Result<BinarizationMap> {
    let labels = classes.encode(&raw.labels)?;
    let features = raw
        .columns
        .par_iter()
        .map(|c| fit_column(&c.name, &c.values, &labels))
        .collect::<Result<Vec<_>>>()?;
    if features
        .iter()
        .all(|f| matches!(f, FeatureEncoding::Dropped { .. }))
    {
        return Err(Error::NoSignal);
    }
    Ok(BinarizationMap {
        label_name: raw.label_name.clone(),
        classes: classes.clone(),
        features,
    })
}

/// Fits on all rows of `raw` and encodes them.
pub fn binarize_dataset(
    raw: &RawDataset,
    positive: Option<&str>,
) -> Result<(BinaryDataset, BinarizationMap)> {
    let classes = LabelMap::fit(&raw.labels, positive)?;
    let map = fit_binarizer(raw, &classes)?;
    let data = map.apply(raw)?;
    Ok((data, map))
}

impl BinarizationMap {
    pub fn column_names(&self) -> Vec<String> {
        self.features
            .iter()
            .flat_map(FeatureEncoding::column_names)
            .collect()
    }

    pub fn apply(&self, raw: &RawDataset) -> Result<BinaryDataset> {
        let mut columns: Vec<Vec<u8>> = Vec::new();
        for enc in &self.features {
            if matches!(enc, FeatureEncoding::Dropped { .. }) {
                continue;
            }
            let column = raw
                .column(enc.name())
                .ok_or_else(|| Error::UnknownColumn(enc.name().to_string()))?;
            columns.extend(enc.encode(&column.values)?);
        }
        let n = raw.n_rows();
        let rows = (0..n)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        BinaryDataset::new(
            self.column_names(),
            self.classes.names.clone(),
            rows,
            self.classes.encode(&raw.labels)?,
        )
    }

    pub fn to_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("map serializes");
        text.push('\n');
        text
    }

    pub fn from_text(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format(e.line(), e.to_string()))
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
