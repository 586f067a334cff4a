//! Labeled tabular data: raw CSV tables, binary feature matrices and
//! reproducible train/validation/test splits.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Categorical,
}

/// Per-column kind overrides for [`load_csv`].
pub type Schema = BTreeMap<String, ColumnKind>;

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Continuous(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Continuous(v) => v.len(),
            ColumnValues::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnValues::Continuous(_) => ColumnKind::Continuous,
            ColumnValues::Categorical(_) => ColumnKind::Categorical,
        }
    }

    fn select(&self, rows: &[usize]) -> ColumnValues {
        match self {
            ColumnValues::Continuous(v) => {
                ColumnValues::Continuous(rows.iter().map(|&i| v[i]).collect())
            }
            ColumnValues::Categorical(v) => {
                ColumnValues::Categorical(rows.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }

    fn render(&self, row: usize) -> String {
        match self {
            ColumnValues::Continuous(v) => format!("{}", v[row]),
            ColumnValues::Categorical(v) => v[row].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: ColumnValues,
}

/// A table before binarization. Every column has `n_rows` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub label_name: String,
    pub columns: Vec<Column>,
    pub labels: Vec<String>,
}

impl RawDataset {
    pub fn new(
        label_name: impl Into<String>,
        columns: Vec<Column>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Data("empty label column".into()));
        }
        for column in &columns {
            if column.values.len() != n {
                return Err(Error::Data(format!(
                    "column '{}' has {} entries, expected {n}",
                    column.name,
                    column.values.len()
                )));
            }
        }
        Ok(RawDataset {
            label_name: label_name.into(),
            columns,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn select_rows(&self, rows: &[usize]) -> RawDataset {
        RawDataset {
            label_name: self.label_name.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    values: c.values.select(rows),
                })
                .collect(),
            labels: rows.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// Reads a comma-separated file with a header row. Columns whose every cell parses
/// as a finite number are continuous; anything else is categorical unless
/// `schema` says otherwise.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    schema: Option<&Schema>,
) -> Result<RawDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, label_column, schema)
}

pub fn parse_csv(text: &str, label_column: &str, schema: Option<&Schema>) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::Csv("missing header row".into()));
    }
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::UnknownColumn(label_column.to_string()))?;
    if let Some(schema) = schema {
        for name in schema.keys() {
            if !header.contains(name) {
                return Err(Error::UnknownColumn(name.clone()));
            }
        }
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => Error::Csv(format!(
                "ragged row {}: expected {expected_len} fields, found {len}",
                row + 1
            )),
            _ => Error::Csv(e.to_string()),
        })?;
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Cell {
                    row: row + 1,
                    column: header[j].clone(),
                    message: "missing value".into(),
                });
            }
            cells[j].push(cell.to_string());
        }
    }

    let labels = cells[label_idx].clone();
    if labels.is_empty() {
        return Err(Error::Data("empty label column".into()));
    }
    let mut columns = Vec::with_capacity(header.len() - 1);
    for (j, name) in header.iter().enumerate() {
        if j == label_idx {
            continue;
        }
        let declared = schema.and_then(|s| s.get(name)).copied();
        let values = match declared {
            Some(ColumnKind::Categorical) => ColumnValues::Categorical(cells[j].clone()),
            Some(ColumnKind::Continuous) => {
                let mut parsed = Vec::with_capacity(cells[j].len());
                for (row, cell) in cells[j].iter().enumerate() {
                    parsed.push(parse_number(cell).ok_or_else(|| Error::Cell {
                        row: row + 1,
                        column: name.clone(),
                        message: format!("'{cell}' is not a number"),
                    })?);
                }
                ColumnValues::Continuous(parsed)
            }
            None => match cells[j]
                .iter()
                .map(|c| parse_number(c))
                .collect::<Option<Vec<f64>>>()
            {
                Some(parsed) => ColumnValues::Continuous(parsed),
                None => ColumnValues::Categorical(cells[j].clone()),
            },
        };
        columns.push(Column {
            name: name.clone(),
            values,
        });
    }
    let raw = RawDataset::new(label_column, columns, labels)?;
    let distinct: std::collections::HashSet<&String> = raw.labels.iter().collect();
    if distinct.len() < 2 {
        return Err(Error::FewerThanTwoClasses);
    }
    Ok(raw)
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Writes `raw` with the label as the last column.
pub fn write_csv(raw: &RawDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = raw.columns.iter().map(|c| c.name.as_str()).collect();
    header.push(&raw.label_name);
    writer
        .write_record(&header)
        .map_err(|e| Error::Csv(e.to_string()))?;
    for row in 0..raw.n_rows() {
        let mut record: Vec<String> = raw.columns.iter().map(|c| c.values.render(row)).collect();
        record.push(raw.labels[row].clone());
        writer
            .write_record(&record)
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    write_atomic(path.as_ref(), &bytes)
}

/// Writes via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Dense class ids `0..K`. Labels that are all non-negative integers are ordered
/// numerically (so a `0`/`1` file keeps `1` as the positive class); otherwise
/// classes are numbered in order of first appearance. `positive` moves one raw
/// label to id 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub names: Vec<String>,
}

impl LabelMap {
    pub fn fit(labels: &[String], positive: Option<&str>) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        for label in labels {
            if !names.contains(label) {
                names.push(label.clone());
            }
        }
        if names.len() < 2 {
            return Err(Error::FewerThanTwoClasses);
        }
        if names.iter().all(|n| n.parse::<u64>().is_ok()) {
            names.sort_by_key(|n| n.parse::<u64>().unwrap_or(0));
        }
        if let Some(pos) = positive {
            let idx = names
                .iter()
                .position(|n| n == pos)
                .ok_or_else(|| Error::Data(format!("positive label '{pos}' does not occur")))?;
            let name = names.remove(idx);
            names.insert(1, name);
        }
        Ok(LabelMap { names })
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn encode(&self, labels: &[String]) -> Result<Vec<usize>> {
        labels
            .iter()
            .enumerate()
            .map(|(row, l)| {
                self.id(l).ok_or_else(|| Error::Cell {
                    row: row + 1,
                    column: "label".into(),
                    message: format!("unknown class '{l}'"),
                })
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Binary feature matrix with dense labels. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    feature_names: Vec<String>,
    class_names: Vec<String>,
    rows: Vec<Vec<u8>>,
    labels: Vec<usize>,
    class_counts: Vec<usize>,
}

impl BinaryDataset {
    pub fn new(
        feature_names: Vec<String>,
        class_names: Vec<String>,
        rows: Vec<Vec<u8>>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if class_names.len() < 2 {
            return Err(Error::FewerThanTwoClasses);
        }
        let width = feature_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|&v| v > 1) {
                return Err(Error::Cell {
                    row: i + 1,
                    column: feature_names[j].clone(),
                    message: format!("value {} is not binary", row[j]),
                });
            }
        }
        let mut class_counts = vec![0; class_names.len()];
        for (i, &y) in labels.iter().enumerate() {
            if y >= class_names.len() {
                return Err(Error::Data(format!(
                    "label {y} of row {} out of range",
                    i + 1
                )));
            }
            class_counts[y] += 1;
        }
        Ok(BinaryDataset {
            feature_names,
            class_names,
            rows,
            labels,
            class_counts,
        })
    }

    /// Unnamed dataset, for tests and generated data.
    pub fn from_rows(rows: Vec<Vec<u8>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let feature_names = (1..=width).map(|f| format!("f{f}")).collect();
        let class_names = (0..n_classes).map(|k| k.to_string()).collect();
        BinaryDataset::new(feature_names, class_names, rows, labels)
    }

    /// Interprets a raw table whose feature columns contain only 0 and 1.
    pub fn from_raw(raw: &RawDataset, labels: &LabelMap) -> Result<Self> {
        let mut columns = Vec::with_capacity(raw.columns.len());
        for column in &raw.columns {
            let bits: Option<Vec<u8>> = match &column.values {
                ColumnValues::Continuous(v) => v
                    .iter()
                    .map(|&x| match x {
                        x if x == 0.0 => Some(0),
                        x if x == 1.0 => Some(1),
                        _ => None,
                    })
                    .collect(),
                ColumnValues::Categorical(v) => v
                    .iter()
                    .map(|s| match s.as_str() {
                        "0" => Some(0),
                        "1" => Some(1),
                        _ => None,
                    })
                    .collect(),
            };
            columns.push(bits.ok_or_else(|| {
                Error::Data(format!(
                    "column '{}' is not binary; run `binarize` first",
                    column.name
                ))
            })?);
        }
        let n = raw.n_rows();
        let rows = (0..n)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        BinaryDataset::new(
            raw.columns.iter().map(|c| c.name.clone()).collect(),
            labels.names.clone(),
            rows,
            labels.encode(&raw.labels)?,
        )
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Rows at `indices`, keeping the full class space.
    pub fn subset(&self, indices: &[usize]) -> BinaryDataset {
        let rows: Vec<Vec<u8>> = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        let mut class_counts = vec![0; self.n_classes()];
        for &y in &labels {
            class_counts[y] += 1;
        }
        BinaryDataset {
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
            rows,
            labels,
            class_counts,
        }
    }

    pub fn write_csv(&self, label_name: &str, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(label_name);
        writer
            .write_record(&header)
            .map_err(|e| Error::Csv(e.to_string()))?;
        for (row, &y) in self.rows.iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(self.class_names[y].clone());
            writer
                .write_record(&record)
                .map_err(|e| Error::Csv(e.to_string()))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
        write_atomic(path.as_ref(), &bytes)
    }
}

/// Loads an already-binary CSV.
pub fn load_binary_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    positive: Option<&str>,
) -> Result<BinaryDataset> {
    let raw = load_csv(path, label_column, None)?;
    let labels = LabelMap::fit(&raw.labels, positive)?;
    BinaryDataset::from_raw(&raw, &labels)
}

/// Three disjoint index sets covering `0..n`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Shuffles `0..n` with a seeded ChaCha stream; validation and test get
/// `floor(f * n)` rows each and training takes the remainder.
pub fn split_dataset(n: usize, fractions: (f64, f64, f64), seed: u64) -> Result<DatasetSplit> {
    let (f_train, f_val, f_test) = fractions;
    if !(f_train > 0.0 && f_val > 0.0 && f_test > 0.0) {
        return Err(Error::Split("fractions must be positive".into()));
    }
    if (f_train + f_val + f_test - 1.0).abs() > 1e-9 {
        return Err(Error::Split(format!(
            "fractions sum to {}, not 1",
            f_train + f_val + f_test
        )));
    }
    let n_val = (f_val * n as f64).floor() as usize;
    let n_test = (f_test * n as f64).floor() as usize;
    if n_val == 0 || n_test == 0 || n_val + n_test >= n {
        return Err(Error::Split(format!(
            "{n} rows cannot fill three non-empty parts"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut validation = order[..n_val].to_vec();
    let mut test = order[n_val..n_val + n_test].to_vec();
    let mut train = order[n_val + n_test..].to_vec();
    validation.sort_unstable();
    test.sort_unstable();
    train.sort_unstable();
    Ok(DatasetSplit {
        train,
        validation,
        test,
        seed,
    })
}

impl DatasetSplit {
    /// Every part is the full range; used when a dataset is too small to split.
    pub fn whole(n: usize) -> Self {
        let all: Vec<usize> = (0..n).collect();
        DatasetSplit {
            train: all.clone(),
            validation: all.clone(),
            test: all,
            seed: 0,
        }
    }

    pub fn to_manifest(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {}", self.seed);
        for (name, part) in [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ] {
            let list: Vec<String> = part.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{name} {}", list.join(" "));
        }
        out
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut parts: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut seed = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let key = tokens.next().unwrap_or_default();
            let values: std::result::Result<Vec<usize>, _> =
                tokens.map(str::parse::<usize>).collect();
            let values = values.map_err(|e| Error::format(lineno + 1, e.to_string()))?;
            match key {
                "seed" => seed = values.first().map(|&s| s as u64),
                "train" | "validation" | "test" => {
                    parts.insert(key, values);
                }
                other => return Err(Error::format(lineno + 1, format!("unknown key '{other}'"))),
            }
        }
        let mut take = |k: &str| {
            parts
                .remove(k)
                .ok_or_else(|| Error::format(0, format!("missing '{k}' line")))
        };
        Ok(DatasetSplit {
            train: take("train")?,
            validation: take("validation")?,
            test: take("test")?,
            seed: seed.unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "f1,f2,f3,f4,f5,class\n\
        0,0,0,1,0,0\n0,0,1,0,1,0\n0,1,0,0,0,0\n0,1,1,0,1,1\n1,0,0,1,0,0\n\
        1,1,0,1,1,1\n1,0,1,0,0,1\n1,1,1,0,1,1\n1,1,1,0,0,1\n1,1,1,1,1,1\n";

    #[test]
    fn loads_ten_row_table() {
        let raw = parse_csv(TABLE, "class", None).unwrap();
        assert_eq!(raw.n_rows(), 10);
        assert_eq!(raw.columns.len(), 5);
        assert!(raw
            .columns
            .iter()
            .all(|c| c.values.kind() == ColumnKind::Continuous));
    }

    #[test]
    fn single_class_is_rejected() {
        let err = parse_csv("a,y\n1,x\n2,x\n", "y", None).unwrap_err();
        assert!(matches!(err, Error::FewerThanTwoClasses));
        assert_eq!(err.to_string(), "fewer than two classes");
    }

    #[test]
    fn declared_numeric_column_reports_cell() {
        let mut schema = Schema::new();
        schema.insert("a".into(), ColumnKind::Continuous);
        let err = parse_csv("a,y\n1,p\nseven,q\n", "y", Some(&schema)).unwrap_err();
        match err {
            Error::Cell { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "a");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_missing_and_unknown_columns() {
        assert!(matches!(
            parse_csv("a,y\n1,p\n2\n", "y", None),
            Err(Error::Csv(_))
        ));
        assert!(matches!(
            parse_csv("a,y\n1,p\n,q\n", "y", None),
            Err(Error::Cell { .. })
        ));
        assert!(matches!(
            parse_csv("a,y\n1,p\n", "z", None),
            Err(Error::UnknownColumn(_))
        ));
        let mut schema = Schema::new();
        schema.insert("b".into(), ColumnKind::Categorical);
        assert!(matches!(
            parse_csv("a,y\n1,p\n2,q\n", "y", Some(&schema)),
            Err(Error::UnknownColumn(_))
        ));
        assert!(matches!(parse_csv("a,y\n", "y", None), Err(Error::Data(_))));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_csv("/nonexistent/data.csv", "y", None),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn mixed_column_is_categorical() {
        let raw = parse_csv("a,b,y\n1,red,p\n2,3,q\n", "y", None).unwrap();
        assert_eq!(raw.columns[0].values.kind(), ColumnKind::Continuous);
        assert_eq!(raw.columns[1].values.kind(), ColumnKind::Categorical);
    }

    #[test]
    fn label_map_orders_integers_numerically() {
        let labels: Vec<String> = ["1", "0", "1"].iter().map(|s| s.to_string()).collect();
        let map = LabelMap::fit(&labels, None).unwrap();
        assert_eq!(map.names, vec!["0", "1"]);
        let labels: Vec<String> = ["yes", "no", "maybe"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let map = LabelMap::fit(&labels, None).unwrap();
        assert_eq!(map.names, vec!["yes", "no", "maybe"]);
        let map = LabelMap::fit(&labels, Some("maybe")).unwrap();
        assert_eq!(map.names, vec!["yes", "maybe", "no"]);
    }

    #[test]
    fn binary_dataset_rejects_non_binary() {
        assert!(BinaryDataset::from_rows(vec![vec![0, 2]], vec![0], 2).is_err());
        assert!(BinaryDataset::from_rows(vec![vec![0, 1]], vec![2], 2).is_err());
        let d = BinaryDataset::from_rows(vec![vec![0, 1], vec![1, 1]], vec![0, 1], 2).unwrap();
        assert_eq!(d.class_counts(), &[1, 1]);
    }

    #[test]
    fn split_sizes_follow_floor_rule() {
        let s = split_dataset(100, (0.5, 0.25, 0.25), 0).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.len(), s.test.len()),
            (50, 25, 25)
        );
        let s = split_dataset(10, (0.5, 0.25, 0.25), 3).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (6, 2, 2));
    }

    #[test]
    fn split_is_seed_deterministic() {
        let a = split_dataset(57, (0.5, 0.25, 0.25), 11).unwrap();
        let b = split_dataset(57, (0.5, 0.25, 0.25), 11).unwrap();
        assert_eq!(a, b);
        let c = split_dataset(57, (0.5, 0.25, 0.25), 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_rejects_bad_fractions() {
        assert!(split_dataset(100, (0.5, 0.25, 0.2), 0).is_err());
        assert!(split_dataset(100, (0.5, 0.5, 0.0), 0).is_err());
        assert!(split_dataset(3, (0.5, 0.25, 0.25), 0).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let s = split_dataset(20, (0.5, 0.25, 0.25), 4).unwrap();
        assert_eq!(DatasetSplit::from_manifest(&s.to_manifest()).unwrap(), s);
    }
}
