//! Repeated-split benchmark over a hyperparameter grid.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{default_budget, BenchmarkConfig};
use super::datasets;
use crate::binarize::{fit_binarizer, BinarizationMap};
use crate::dataset::{
    load_csv, parse_csv, split_dataset, write_atomic, BinaryDataset, DatasetSplit, LabelMap,
    RawDataset,
};
use crate::error::{Error, Result};
use crate::metrics;
use crate::objective::{self, training_confusion, ObjectiveKind};
use crate::rational::{parse_rational, render_decimal, to_f64, Rational};
use crate::search::{solve, SolveStatus};
use crate::tree::{BooleanTree, HyperParams};

/// One solve on one split, scored on all three parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub n: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub seed: u64,
    pub depth: usize,
    pub f_max: usize,
    pub s_min: usize,
    pub alpha: String,
    pub objective_kind: String,
    /// Selection metric of the objective (accuracy, MEC, balanced accuracy or F1).
    pub metric: String,
    pub train_metric: f64,
    pub validation_metric: f64,
    pub test_metric: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// Exact training objective as `p/q`.
    pub objective: String,
    pub gap: f64,
    pub status: String,
    pub wall_seconds: f64,
    pub selected: bool,
    /// Relative to the output directory.
    pub model_file: String,
}

impl RunRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Data(format!("run record: {e}")))
    }

    pub fn objective_exact(&self) -> Result<Rational> {
        parse_rational(&self.objective)
            .ok_or_else(|| Error::Data(format!("bad objective '{}'", self.objective)))
    }

    pub fn alpha_exact(&self) -> Result<Rational> {
        parse_rational(&self.alpha)
            .ok_or_else(|| Error::Data(format!("bad alpha '{}'", self.alpha)))
    }
}

/// Best grid point for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub seed: u64,
    pub record: RunRecord,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    pub records: Vec<RunRecord>,
    pub selections: Vec<Selection>,
    pub summary_csv: String,
    pub summary_text: String,
}

fn load_raw(cfg: &BenchmarkConfig) -> Result<RawDataset> {
    match (&cfg.data.builtin, &cfg.data.path) {
        (Some(b), _) if b == "monk1" => datasets::monk1(),
        (Some(b), _) if b == "example1" => parse_csv(&datasets::example_one_csv(), "class", None),
        (_, Some(p)) => load_csv(p, &cfg.data.label, None),
        _ => Err(Error::Config("no data source".into())),
    }
}

/// Training, validation and test sets for one seed, plus the fitted map when
/// the input needed binarization.
pub struct SeedData {
    pub split: DatasetSplit,
    pub map: Option<BinarizationMap>,
    pub train: BinaryDataset,
    pub validation: BinaryDataset,
    pub test: BinaryDataset,
}

fn seed_data(
    cfg: &BenchmarkConfig,
    raw: &RawDataset,
    classes: &LabelMap,
    split: DatasetSplit,
) -> Result<SeedData> {
    let part = |rows: &[usize]| raw.select_rows(rows);
    if cfg.data.binary {
        let all = BinaryDataset::from_raw(raw, classes)?;
        return Ok(SeedData {
            train: all.subset(&split.train),
            validation: all.subset(&split.validation),
            test: all.subset(&split.test),
            split,
            map: None,
        });
    }
    let map = fit_binarizer(&part(&split.train), classes)?;
    Ok(SeedData {
        train: map.apply(&part(&split.train))?,
        validation: map.apply(&part(&split.validation))?,
        test: map.apply(&part(&split.test))?,
        split,
        map: Some(map),
    })
}

fn seed_split(cfg: &BenchmarkConfig, n: usize, seed: u64) -> Result<DatasetSplit> {
    if cfg.no_split {
        let mut s = DatasetSplit::whole(n);
        s.seed = seed;
        Ok(s)
    } else {
        split_dataset(n, (0.5, 0.25, 0.25), seed)
    }
}

fn model_name(seed: u64, depth: usize, f_max: usize, alpha: &Rational) -> String {
    format!(
        "models/seed{seed}-d{depth}-f{f_max}-a{}.model",
        render_decimal(alpha)
    )
}

fn metric_name(obj: &ObjectiveKind) -> &'static str {
    match obj {
        ObjectiveKind::Accuracy => "accuracy",
        ObjectiveKind::CostSensitive { .. } => "mec",
        ObjectiveKind::BalancedAccuracy => "balanced-accuracy",
        ObjectiveKind::F1 => "f1",
    }
}

/// Selection metric, whether higher is better, and accuracy.
fn score(
    obj: &ObjectiveKind,
    tree: &BooleanTree,
    data: &BinaryDataset,
) -> Result<(Rational, bool, Rational)> {
    let cm = training_confusion(tree, data)?;
    let (metric, higher_better) = obj.selection_metric(&cm)?;
    Ok((metric, higher_better, metrics::accuracy(&cm)?))
}

/// Runs the whole grid for every seed, writing into `out_dir`:
/// `runs.jsonl` (rewritten after every run), `splits/seed<s>.txt`,
/// `maps/seed<s>.json` when binarizing, one model per run under `models/`,
/// and `summary.csv` / `summary.txt` at the end.
pub fn run_benchmark(
    cfg: &BenchmarkConfig,
    out_dir: &Path,
    mut on_record: impl FnMut(&RunRecord),
) -> Result<BenchmarkOutcome> {
    let raw = load_raw(cfg)?;
    let classes = LabelMap::fit(&raw.labels, cfg.data.positive.as_deref())?;
    for sub in ["splits", "maps", "models"] {
        fs::create_dir_all(out_dir.join(sub)).map_err(|e| Error::io(out_dir.join(sub), e))?;
    }
    let mut records: Vec<RunRecord> = Vec::new();
    let mut selections = Vec::new();
    let runs_path = out_dir.join("runs.jsonl");
    let flush = |records: &[RunRecord]| -> Result<()> {
        let text: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
        write_atomic(&runs_path, text.as_bytes())
    };
    for &seed in &cfg.seeds {
        let split = seed_split(cfg, raw.n_rows(), seed)?;
        write_atomic(
            &out_dir.join(format!("splits/seed{seed}.txt")),
            split.to_manifest().as_bytes(),
        )?;
        let data = seed_data(cfg, &raw, &classes, split)?;
        if let Some(map) = &data.map {
            map.save(out_dir.join(format!("maps/seed{seed}.json")))?;
        }
        let budget = cfg.budget.unwrap_or_else(|| default_budget(data.train.n()));
        let mut best: Option<(usize, Rational)> = None;
        for &depth in &cfg.depths {
            for alpha in &cfg.alphas {
                for &f_max in &cfg.f_maxes {
                    if f_max > data.train.n_features() {
                        continue;
                    }
                    let hp = HyperParams::new(depth, f_max, cfg.s_min, alpha.clone())?;
                    let result = solve(&data.train, &hp, &cfg.objective, budget, cfg.workers)?;
                    let model_file = model_name(seed, depth, f_max, alpha);
                    result.tree.save(out_dir.join(&model_file))?;
                    let (train_metric, _, train_acc) =
                        score(&cfg.objective, &result.tree, &data.train)?;
                    let (val_metric, higher_better, _) =
                        score(&cfg.objective, &result.tree, &data.validation)?;
                    let (test_metric, _, test_acc) =
                        score(&cfg.objective, &result.tree, &data.test)?;
                    let improves = match &best {
                        None => true,
                        Some((_, v)) if higher_better => val_metric > *v,
                        Some((_, v)) => val_metric < *v,
                    };
                    if improves {
                        best = Some((records.len(), val_metric.clone()));
                    }
                    let record = RunRecord {
                        dataset: cfg.name.clone(),
                        n: raw.n_rows(),
                        n_features: data.train.n_features(),
                        n_classes: classes.len(),
                        seed,
                        depth,
                        f_max,
                        s_min: cfg.s_min,
                        alpha: render_decimal(alpha),
                        objective_kind: cfg.objective.to_string(),
                        metric: metric_name(&cfg.objective).into(),
                        train_metric: to_f64(&train_metric),
                        validation_metric: to_f64(&val_metric),
                        test_metric: to_f64(&test_metric),
                        train_accuracy: to_f64(&train_acc),
                        test_accuracy: to_f64(&test_acc),
                        objective: result.objective.to_string(),
                        gap: to_f64(&result.gap),
                        status: result.status.to_string(),
                        wall_seconds: result.stats.elapsed.as_secs_f64(),
                        selected: false,
                        model_file,
                    };
                    on_record(&record);
                    records.push(record);
                    flush(&records)?;
                }
            }
        }
        let (idx, _) = best.ok_or_else(|| {
            Error::Config(format!(
                "no grid point fits the {} binarized features",
                data.train.n_features()
            ))
        })?;
        records[idx].selected = true;
        selections.push(Selection {
            seed,
            record: records[idx].clone(),
        });
        flush(&records)?;
    }
    let (summary_csv, summary_text) = summary_tables(&selections);
    write_atomic(&out_dir.join("summary.csv"), summary_csv.as_bytes())?;
    write_atomic(&out_dir.join("summary.txt"), summary_text.as_bytes())?;
    Ok(BenchmarkOutcome {
        records,
        selections,
        summary_csv,
        summary_text,
    })
}

const SUMMARY_HEADER: [&str; 13] = [
    "dataset",
    "|I|",
    "|F|",
    "|K|",
    "seed",
    "depth",
    "f_max",
    "alpha",
    "metric",
    "train",
    "validation",
    "test",
    "status",
];

fn summary_rows(selections: &[Selection]) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = selections
        .iter()
        .map(|s| {
            let r = &s.record;
            vec![
                r.dataset.clone(),
                r.n.to_string(),
                r.n_features.to_string(),
                r.n_classes.to_string(),
                r.seed.to_string(),
                r.depth.to_string(),
                r.f_max.to_string(),
                r.alpha.clone(),
                r.metric.clone(),
                format!("{:.4}", r.train_metric),
                format!("{:.4}", r.validation_metric),
                format!("{:.4}", r.test_metric),
                r.status.clone(),
            ]
        })
        .collect();
    if let Some(first) = selections.first() {
        let k = selections.len() as f64;
        let mean =
            |f: fn(&RunRecord) -> f64| selections.iter().map(|s| f(&s.record)).sum::<f64>() / k;
        let features: Vec<usize> = selections.iter().map(|s| s.record.n_features).collect();
        let (lo, hi) = (
            features.iter().min().copied().unwrap_or(0),
            features.iter().max().copied().unwrap_or(0),
        );
        let optimal = selections
            .iter()
            .filter(|s| s.record.status == SolveStatus::Optimal.as_str())
            .count();
        rows.push(vec![
            first.record.dataset.clone(),
            first.record.n.to_string(),
            if lo == hi {
                lo.to_string()
            } else {
                format!("{lo}-{hi}")
            },
            first.record.n_classes.to_string(),
            "mean".into(),
            String::new(),
            String::new(),
            String::new(),
            first.record.metric.clone(),
            format!("{:.4}", mean(|r| r.train_metric)),
            format!("{:.4}", mean(|r| r.validation_metric)),
            format!("{:.4}", mean(|r| r.test_metric)),
            format!("{optimal}/{} optimal", selections.len()),
        ]);
    }
    rows
}

/// Selected run per seed and their mean, as CSV and as an aligned table.
/// Wall times are left out so the tables are reproducible.
pub fn summary_tables(selections: &[Selection]) -> (String, String) {
    let rows = summary_rows(selections);
    let mut csv = SUMMARY_HEADER.join(",");
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let mut widths: Vec<usize> = SUMMARY_HEADER.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut text = String::new();
    let line = |cells: Vec<&str>, text: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(text, "{}", padded.join("  ").trim_end());
    };
    line(SUMMARY_HEADER.to_vec(), &mut text);
    line(
        widths
            .iter()
            .map(|&w| &"--------------------------------"[..w.min(32)])
            .collect(),
        &mut text,
    );
    for row in &rows {
        line(row.iter().map(String::as_str).collect(), &mut text);
    }
    (csv, text)
}

/// Recomputes every record's training objective from its saved model, the
/// saved split manifest and (when present) the saved binarization map.
/// Returns the number of records checked.
pub fn reverify(cfg: &BenchmarkConfig, out_dir: &Path) -> Result<usize> {
    let raw = load_raw(cfg)?;
    let classes = LabelMap::fit(&raw.labels, cfg.data.positive.as_deref())?;
    let path = out_dir.join("runs.jsonl");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut checked = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let record = RunRecord::from_json_line(line)?;
        let manifest_path = out_dir.join(format!("splits/seed{}.txt", record.seed));
        let manifest =
            fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let split = DatasetSplit::from_manifest(&manifest)?;
        let train_raw = raw.select_rows(&split.train);
        let train = if cfg.data.binary {
            BinaryDataset::from_raw(&train_raw, &classes)?
        } else {
            BinarizationMap::load(out_dir.join(format!("maps/seed{}.json", record.seed)))?
                .apply(&train_raw)?
        };
        let tree = BooleanTree::load(out_dir.join(PathBuf::from(&record.model_file)))?;
        let value = objective::evaluate(&cfg.objective, &record.alpha_exact()?, &tree, &train)?;
        if value != record.objective_exact()? {
            return Err(Error::Data(format!(
                "{}: recorded objective {} but recomputed {}",
                record.model_file, record.objective, value
            )));
        }
        if record.status == SolveStatus::Optimal.as_str() && record.gap != 0.0 {
            return Err(Error::Data(format!(
                "{}: optimal run with gap {}",
                record.model_file, record.gap
            )));
        }
        checked += 1;
    }
    Ok(checked)
}
