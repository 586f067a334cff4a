use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use booltree::binarize::{binarize_dataset, BinarizationMap};
use booltree::dataset::{load_binary_csv, load_csv, write_atomic, BinaryDataset};
use booltree::harness::{default_budget, reverify, run_benchmark, BenchmarkConfig};
use booltree::metrics::{self, ConfusionMatrix};
use booltree::mip::{build_model, extract_tree, load_solution, read_lp, write_lp};
use booltree::objective::{evaluate, training_confusion, ObjectiveKind};
use booltree::rational::{parse_rational, render_decimal, to_f64, Rational};
use booltree::search::{solve, SolveStatus};
use booltree::tree::{BooleanTree, HyperParams};
use booltree::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// Optimal classification trees with multivariate Boolean-rule splits.
#[derive(Parser)]
#[command(name = "booltree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discretize and one-hot encode a CSV file. The output's label column
    /// holds class ids; the map records their names.
    Binarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "class")]
        label: String,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the fitted binarization map (JSON).
        #[arg(long)]
        map: PathBuf,
        /// Raw label that becomes class 1.
        #[arg(long)]
        positive: Option<String>,
    },
    /// Learn a tree from a binarized CSV file.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        hp: HpArgs,
        /// Wall-clock limit in seconds; defaults by training-set size.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, env = "BOOLTREE_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the mixed-integer model for this training set.
        #[arg(long)]
        emit_lp: Option<PathBuf>,
        /// Incumbent/bound trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also write the run report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Predict every row of a binarized CSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Label column to ignore if present.
        #[arg(long, default_value = "class")]
        label: String,
        /// Binarization map whose class names replace class ids in the output.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report accuracy, balanced accuracy, F1, MEC and the confusion matrix.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "accuracy")]
        objective: String,
        #[arg(long, default_value = "0")]
        alpha: String,
    },
    /// Run the split/grid/selection protocol from a TOML config.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "BOOLTREE_WORKERS")]
        workers: Option<usize>,
        /// Override the config's split setting and use every row everywhere.
        #[arg(long)]
        no_split: bool,
    },
    /// Write the mixed-integer model in LP format.
    EmitLp {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        hp: HpArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn an external solver's solution of an emitted LP file into a model.
    SolveExternal {
        #[arg(long)]
        lp: PathBuf,
        /// "name value" lines; unlisted variables are zero.
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Binarized CSV file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "class")]
    label: String,
    #[arg(long)]
    positive: Option<String>,
}

#[derive(Args)]
struct HpArgs {
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    f_max: usize,
    #[arg(long, default_value_t = 1)]
    s_min: usize,
    #[arg(long, default_value = "0")]
    alpha: String,
    /// accuracy, balanced-accuracy, f1 or cost-sensitive:<C_FP>:<C_FN>.
    #[arg(long, default_value = "accuracy")]
    objective: String,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = match error.downcast_ref::<Error>() {
            Some(Error::HyperParams(_) | Error::Config(_) | Error::Objective(_)) => EXIT_USAGE,
            Some(Error::Infeasible(_) | Error::NonIntegral(_)) => EXIT_INFEASIBLE,
            _ if error.downcast_ref::<Usage>().is_some() => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure { code, error }
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn hyper_params(hp: &HpArgs) -> Result<(HyperParams, ObjectiveKind), Failure> {
    let alpha =
        parse_rational(&hp.alpha).ok_or_else(|| usage(format!("bad --alpha '{}'", hp.alpha)))?;
    let params = HyperParams::new(hp.depth, hp.f_max, hp.s_min, alpha)?;
    let objective: ObjectiveKind = hp.objective.parse()?;
    Ok((params, objective))
}

fn workers(requested: Option<usize>) -> usize {
    requested
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Binarize {
            input,
            label,
            out,
            map,
            positive,
        } => {
            let raw = load_csv(&input, &label, None)?;
            let (data, fitted) = binarize_dataset(&raw, positive.as_deref())?;
            let ids = (0..data.n_classes()).map(|k| k.to_string()).collect();
            let data = BinaryDataset::new(
                data.feature_names().to_vec(),
                ids,
                data.rows().to_vec(),
                data.labels().to_vec(),
            )?;
            data.write_csv(&label, &out)?;
            fitted.save(&map)?;
            eprintln!(
                "binarized {} rows: {} columns -> {} binary features",
                data.n(),
                raw.columns.len(),
                data.n_features()
            );
            Ok(0)
        }
        Command::Train {
            data,
            hp,
            budget,
            workers: requested,
            out,
            emit_lp,
            trace,
            report,
        } => {
            let (params, objective) = hyper_params(&hp)?;
            let train = load_binary_csv(&data.data, &data.label, data.positive.as_deref())?;
            let budget = match budget {
                Some(s) if s.is_finite() && s > 0.0 => Duration::from_secs_f64(s),
                Some(s) => return Err(usage(format!("--budget must be positive, got {s}")).into()),
                None => default_budget(train.n()),
            };
            if let Some(lp) = &emit_lp {
                write_lp(&build_model(&train, &params, &objective)?, lp)?;
            }
            let result = solve(&train, &params, &objective, budget, workers(requested))?;
            result.tree.save(&out)?;
            if let Some(path) = &trace {
                write_atomic(path, result.stats.trace_csv().as_bytes())?;
            }
            let cm = training_confusion(&result.tree, &train)?;
            let line = serde_json::json!({
                "dataset": data.data.display().to_string(),
                "n": train.n(),
                "n_features": train.n_features(),
                "n_classes": train.n_classes(),
                "depth": params.depth,
                "f_max": params.f_max,
                "s_min": params.s_min,
                "alpha": render_decimal(&params.alpha),
                "objective_kind": objective.to_string(),
                "objective": result.objective.to_string(),
                "objective_value": to_f64(&result.objective),
                "dual_bound": result.dual_bound.to_string(),
                "gap": to_f64(&result.gap),
                "status": result.status.to_string(),
                "train_accuracy": to_f64(&metrics::accuracy(&cm)?),
                "nodes": result.stats.nodes,
                "nodes_per_second": result.stats.nodes_per_second(),
                "incumbent_updates": result.stats.incumbent_updates,
                "wall_seconds": result.stats.elapsed.as_secs_f64(),
                "model": out.display().to_string(),
            })
            .to_string();
            println!("{line}");
            if let Some(path) = &report {
                write_atomic(path, format!("{line}\n").as_bytes())?;
            }
            Ok(match result.status {
                SolveStatus::Optimal => 0,
                SolveStatus::FeasibleTimeLimit => EXIT_BUDGET,
                SolveStatus::Infeasible => EXIT_INFEASIBLE,
            })
        }
        Command::Predict {
            model,
            data,
            label,
            map,
            out,
        } => {
            let tree = BooleanTree::load(&model)?;
            let rows = read_feature_rows(&data, &label)?;
            let names = match &map {
                Some(path) => Some(BinarizationMap::load(path)?.classes.names),
                None => None,
            };
            let mut text = String::from("prediction\n");
            for (i, x) in rows.iter().enumerate() {
                let k = tree.predict(x).with_context(|| format!("row {}", i + 1))?;
                let shown = names
                    .as_ref()
                    .and_then(|n| n.get(k))
                    .cloned()
                    .unwrap_or_else(|| k.to_string());
                text.push_str(&shown);
                text.push('\n');
            }
            match out {
                Some(path) => write_atomic(&path, text.as_bytes())?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Evaluate {
            model,
            data,
            objective,
            alpha,
        } => {
            let tree = BooleanTree::load(&model)?;
            let set = load_binary_csv(&data.data, &data.label, data.positive.as_deref())?;
            let objective: ObjectiveKind = objective.parse()?;
            let alpha =
                parse_rational(&alpha).ok_or_else(|| usage(format!("bad --alpha '{alpha}'")))?;
            let cm = training_confusion(&tree, &set)?;
            print!("{}", evaluation_report(&cm, &objective)?);
            match evaluate(&objective, &alpha, &tree, &set) {
                Ok(v) => println!("objective {} = {}", objective, render_decimal(&v)),
                Err(e) => println!("objective {objective}: {e}"),
            }
            Ok(0)
        }
        Command::Benchmark {
            config,
            out,
            workers: requested,
            no_split,
        } => {
            let mut cfg = BenchmarkConfig::load(&config)?;
            if let Some(w) = requested {
                cfg.workers = w.max(1);
            }
            cfg.no_split |= no_split;
            let outcome = run_benchmark(&cfg, &out, |r| {
                eprintln!(
                    "seed {} depth {} f_max {} alpha {}: {} train {:.4} validation {:.4} test {:.4} ({:.2}s)",
                    r.seed, r.depth, r.f_max, r.alpha, r.status, r.train_metric, r.validation_metric, r.test_metric, r.wall_seconds
                );
            })?;
            let checked = reverify(&cfg, &out)?;
            eprintln!("re-verified {checked} run records");
            print!("{}", outcome.summary_text);
            let timed_out = outcome
                .records
                .iter()
                .any(|r| r.status != SolveStatus::Optimal.as_str());
            Ok(if timed_out { EXIT_BUDGET } else { 0 })
        }
        Command::EmitLp { data, hp, out } => {
            let (params, objective) = hyper_params(&hp)?;
            let train = load_binary_csv(&data.data, &data.label, data.positive.as_deref())?;
            let model = build_model(&train, &params, &objective)?;
            write_lp(&model, &out)?;
            eprintln!(
                "{} variables, {} constraints written to {}",
                model.variables().len(),
                model.constraints().len() + model.quadratic().len(),
                out.display()
            );
            Ok(0)
        }
        Command::SolveExternal { lp, solution, out } => {
            let model = read_lp(&lp)?;
            let assignment = load_solution(&model, &solution)?;
            let tree = extract_tree(&model, &assignment)?;
            tree.save(&out)?;
            eprintln!("{}", tree.to_text().trim_end());
            Ok(0)
        }
    }
}

/// Reads a 0/1 CSV, dropping `label` if it is a column.
fn read_feature_rows(path: &Path, label: &str) -> anyhow::Result<Vec<Vec<u8>>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("{}", path.display()))?;
    let header = reader.headers()?.clone();
    let label_idx = header.iter().position(|h| h == label);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len());
        for (j, cell) in record.iter().enumerate() {
            if Some(j) == label_idx {
                continue;
            }
            row.push(match cell.trim() {
                "0" => 0,
                "1" => 1,
                other => bail!(
                    "row {}, column '{}': expected 0 or 1, found '{other}'",
                    i + 1,
                    &header[j]
                ),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(anyhow!("{}: no data rows", path.display()));
    }
    Ok(rows)
}

fn evaluation_report(cm: &ConfusionMatrix, objective: &ObjectiveKind) -> anyhow::Result<String> {
    let mut out = String::new();
    let show = |r: booltree::Result<Rational>| {
        r.map_or_else(|e| format!("n/a ({e})"), |v| render_decimal(&v))
    };
    out.push_str(&format!("accuracy {}\n", show(metrics::accuracy(cm))));
    if cm.n_classes() == 2 {
        let (c_fp, c_fn) = match objective {
            ObjectiveKind::CostSensitive { c_fp, c_fn } => (c_fp.clone(), c_fn.clone()),
            _ => (
                Rational::from_integer(1.into()),
                Rational::from_integer(1.into()),
            ),
        };
        out.push_str(&format!(
            "balanced-accuracy {}\n",
            show(metrics::balanced_accuracy(cm))
        ));
        out.push_str(&format!("f1 {}\n", show(metrics::f1(cm))));
        out.push_str(&format!(
            "mec({}:{}) {}\n",
            render_decimal(&c_fp),
            render_decimal(&c_fn),
            show(metrics::mec(cm, &c_fp, &c_fn))
        ));
    }
    out.push_str("confusion (rows: true class, columns: predicted)\n");
    for (k, row) in cm.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&format!("  {k}: {}\n", cells.join(" ")));
    }
    Ok(out)
}
