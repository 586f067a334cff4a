use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use booltree::harness::datasets::example_one_csv;

const EXAMPLE_ONE_SOLUTION: &str = "\
a_1_f1 1
a_1_f2 1
a_1_f3 1
b_1 1
d_1 1
l_2 1
l_3 1
c_2_0 1
c_3_1 1
z_1_2 1
z_2_2 1
z_3_2 1
z_4_3 1
z_5_2 1
z_6_3 1
z_7_3 1
z_8_3 1
z_9_3 1
z_10_3 1
N_2 4
N_3 6
M_0_2 4
M_1_3 6
e_2 0
e_3 0
";

fn booltree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_booltree"))
        .args(args)
        .env_remove("BOOLTREE_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("example1.csv"), example_one_csv()).unwrap();
        Workspace { dir }
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn train_solves_example_one_and_predicts_its_classes() {
    let ws = Workspace::new();
    let (data, model) = (ws.file("example1.csv"), ws.file("tree.model"));
    let out = booltree(&[
        "train", "--data", path(&data), "--depth", "1", "--f-max", "3", "--budget", "10", "--workers", "1", "--out",
        path(&model),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["objective"], "0");
    assert_eq!(report["status"], "Optimal");
    assert_eq!(report["train_accuracy"], 1.0);
    assert!(fs::read_to_string(&model).unwrap().contains("split f1 f2 f3 le 1"));

    let out = booltree(&["predict", "--model", path(&model), "--data", path(&data)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "prediction\n0\n0\n0\n1\n0\n1\n1\n1\n1\n1\n");

    let out = booltree(&["evaluate", "--model", path(&model), "--data", path(&data), "--objective", "f1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("accuracy 1\n"), "{text}");
    assert!(text.contains("f1 1\n"), "{text}");
    assert!(text.contains("objective f1 = 1"), "{text}");
}

#[test]
fn binarize_train_predict_pipeline_keeps_class_names() {
    let ws = Workspace::new();
    let mut csv = String::from("x,colour,class\n");
    for i in 0..40 {
        let x = (i * 7) % 11;
        let colour = ["red", "green", "blue"][i % 3];
        let positive = x > 5 || colour == "red";
        csv.push_str(&format!("{x},{colour},{}\n", if positive { "yes" } else { "no" }));
    }
    fs::write(ws.file("raw.csv"), &csv).unwrap();
    let (bin, map, model) = (ws.file("bin.csv"), ws.file("map.json"), ws.file("tree.model"));
    let out = booltree(&[
        "binarize", "--input", path(&ws.file("raw.csv")), "--out", path(&bin), "--map", path(&map), "--positive", "yes",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = booltree(&[
        "train", "--data", path(&bin), "--depth", "2", "--f-max", "2", "--budget", "30", "--out", path(&model),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = booltree(&["predict", "--model", path(&model), "--data", path(&bin), "--map", path(&map)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let expected: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    let got: Vec<String> = stdout(&out).lines().skip(1).map(String::from).collect();
    assert_eq!(got, expected);
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let ws = Workspace::new();
    let data = ws.file("example1.csv");
    let model = ws.file("m.model");
    let base = ["train", "--data", path(&data), "--out", path(&model), "--f-max", "2"];

    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        booltree(&args)
    };
    assert_eq!(code(&with(&["--depth", "0"])), 1);
    assert_eq!(code(&with(&["--depth", "1", "--alpha", "abc"])), 1);
    assert_eq!(code(&with(&["--depth", "1", "--objective", "hinge"])), 1);
    assert_eq!(code(&booltree(&["no-such-command"])), 1);

    let missing = ws.file("missing.csv");
    let out = booltree(&["train", "--data", path(&missing), "--out", path(&model), "--depth", "1", "--f-max", "1"]);
    assert_eq!(code(&out), 2);

    assert_eq!(code(&with(&["--depth", "1", "--s-min", "20"])), 3);

    let out = with(&["--depth", "2", "--budget", "0.000000001"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["status"], "FeasibleTimeLimit");
    assert!(model.exists());
}

#[test]
fn emitted_lp_and_external_solution_round_trip() {
    let ws = Workspace::new();
    let (data, lp, sol, model) = (ws.file("example1.csv"), ws.file("m.lp"), ws.file("m.sol"), ws.file("ext.model"));
    let out = booltree(&["emit-lp", "--data", path(&data), "--depth", "1", "--f-max", "3", "--out", path(&lp)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("\\") || text.to_lowercase().contains("minimize"), "{text}");

    fs::write(&sol, EXAMPLE_ONE_SOLUTION).unwrap();
    let out = booltree(&["solve-external", "--lp", path(&lp), "--solution", path(&sol), "--out", path(&model)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let trained = ws.file("trained.model");
    let out = booltree(&[
        "train", "--data", path(&data), "--depth", "1", "--f-max", "3", "--out", path(&trained), "--emit-lp",
        path(&ws.file("train.lp")),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&model).unwrap(), fs::read_to_string(&trained).unwrap());
    assert_eq!(fs::read_to_string(ws.file("train.lp")).unwrap(), text);

    fs::write(&sol, EXAMPLE_ONE_SOLUTION.replace("z_4_3 1", "z_4_2 1")).unwrap();
    let out = booltree(&["solve-external", "--lp", path(&lp), "--solution", path(&sol), "--out", path(&model)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("route_left_4_2_1"), "{}", stderr(&out));

    fs::write(&sol, EXAMPLE_ONE_SOLUTION.replace("d_1 1", "d_1 0.4")).unwrap();
    let out = booltree(&["solve-external", "--lp", path(&lp), "--solution", path(&sol), "--out", path(&model)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("non-integral binary"), "{}", stderr(&out));

    fs::write(&sol, "bogus_var 1\n").unwrap();
    let out = booltree(&["solve-external", "--lp", path(&lp), "--solution", path(&sol), "--out", path(&model)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn benchmark_writes_reproducible_summaries() {
    let ws = Workspace::new();
    let config = ws.file("bench.toml");
    fs::write(
        &config,
        r#"
name = "example1"
seeds = [0, 1]
no_split = true

[data]
path = "example1.csv"
positive = "1"
binary = true

[grid]
depth = [1, 2]
alpha = ["0", "1/100"]
f_max = [1, 3]
"#,
    )
    .unwrap();
    let mut summaries = Vec::new();
    for workers in ["1", "2", "8"] {
        let out_dir = ws.file(&format!("out{workers}"));
        let out = booltree(&["benchmark", "--config", path(&config), "--out", path(&out_dir), "--workers", workers]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(stderr(&out).contains("re-verified 16 run records"), "{}", stderr(&out));
        assert!(stdout(&out).contains("example1"));
        summaries.push(fs::read(out_dir.join("summary.csv")).unwrap());
    }
    assert!(summaries.windows(2).all(|w| w[0] == w[1]));

    fs::write(&config, "name = \"x\"\n").unwrap();
    let out = booltree(&["benchmark", "--config", path(&config), "--out", path(&ws.file("bad"))]);
    assert_eq!(code(&out), 1);
}
