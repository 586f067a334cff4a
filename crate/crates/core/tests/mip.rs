mod common;

use booltree::metrics::confusion;
use booltree::mip::{
    build_model, check_assignment, ek_name, emit_lp, encode_tree, extract_tree, parse_lp,
    parse_solution, Assignment, ViolationKind,
};
use booltree::objective::ObjectiveKind;
use booltree::rational::{int, ratio};
use booltree::search::{solve_with, SolveOptions};
use booltree::tree::{BooleanTree, HyperParams, SplitRule};
use booltree::Error;
use common::{all_objectives, example_one, oracle_instance, ORACLE_INSTANCES};

const EXAMPLE_ONE_SOLUTION: &str = "\
# root rule: at most one of f1, f2, f3
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

fn example_one_model() -> booltree::mip::ModelSpec {
    let hp = HyperParams::new(1, 3, 1, int(0)).unwrap();
    build_model(&example_one(), &hp, &ObjectiveKind::Accuracy).unwrap()
}

#[test]
fn solver_trees_encode_to_feasible_assignments_with_equal_objective() {
    for seed in 0..ORACLE_INSTANCES {
        let (data, hp) = oracle_instance(seed);
        for obj in all_objectives() {
            let res = solve_with(&data, &hp, &obj, &SolveOptions::default()).unwrap();
            let model = build_model(&data, &hp, &obj).unwrap();
            let a = encode_tree(&model, &res.tree, &data).unwrap();
            let report = check_assignment(&model, &a).unwrap();
            assert!(
                report.feasible(),
                "seed {seed} {}: {:?}",
                obj.name(),
                report.violations
            );
            assert_eq!(
                report.objective,
                res.objective,
                "seed {seed} {}",
                obj.name()
            );
        }
    }
}

#[test]
fn per_class_error_variables_match_prediction_counts() {
    for seed in 0..30 {
        let (data, hp) = oracle_instance(seed);
        let obj = ObjectiveKind::BalancedAccuracy;
        let res = solve_with(&data, &hp, &obj, &SolveOptions::default()).unwrap();
        let model = build_model(&data, &hp, &obj).unwrap();
        let a = encode_tree(&model, &res.tree, &data).unwrap();
        let sum = |k: usize| {
            res.tree
                .topology()
                .leaves()
                .map(|t| a.get(&ek_name(t, k)).cloned().unwrap_or_default())
                .fold(int(0), |acc, v| acc + v)
        };
        let predictions: Vec<usize> = data
            .rows()
            .iter()
            .map(|x| res.tree.predict(x).unwrap())
            .collect();
        let counts = confusion(data.labels(), &predictions, 2)
            .unwrap()
            .binary()
            .unwrap();
        assert_eq!(sum(0), int(counts.fn_ as i64));
        assert_eq!(sum(1), int(counts.fp as i64));
    }
}

#[test]
fn hand_written_example_one_solution_decodes_to_the_solver_tree() {
    let model = example_one_model();
    let a = parse_solution(&model, EXAMPLE_ONE_SOLUTION).unwrap();
    let report = check_assignment(&model, &a).unwrap();
    assert!(report.feasible(), "{:?}", report.violations);
    assert_eq!(report.objective, int(0));
    let tree = extract_tree(&model, &a).unwrap();
    let hp = HyperParams::new(1, 3, 1, int(0)).unwrap();
    let solved = solve_with(
        &example_one(),
        &hp,
        &ObjectiveKind::Accuracy,
        &SolveOptions::default(),
    )
    .unwrap();
    assert_eq!(tree, solved.tree);
    assert_eq!(tree.rule(1), &SplitRule::new(vec![0, 1, 2], 1));
}

#[test]
fn misrouted_instance_is_rejected_by_constraint_name() {
    let model = example_one_model();
    let text = EXAMPLE_ONE_SOLUTION
        .replace("z_4_3 1", "z_4_2 1")
        .replace("N_2 4", "N_2 5")
        .replace("N_3 6", "N_3 5")
        .replace("M_1_3 6", "M_1_3 5\nM_1_2 1");
    let a = parse_solution(&model, &text).unwrap();
    let report = check_assignment(&model, &a).unwrap();
    assert!(
        report.violated("route_left_4_2_1"),
        "{:?}",
        report.violations
    );
    match extract_tree(&model, &a) {
        Err(Error::Infeasible(msg)) => assert!(msg.contains("route_left_4_2_1"), "{msg}"),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn fractional_binary_is_rejected() {
    let model = example_one_model();
    let text = EXAMPLE_ONE_SOLUTION.replace("d_1 1", "d_1 0.4");
    let a = parse_solution(&model, &text).unwrap();
    let report = check_assignment(&model, &a).unwrap();
    assert!(report
        .violations
        .iter()
        .any(|v| v.kind == ViolationKind::Integrality && v.detail.contains("non-integral binary")));
    let err = extract_tree(&model, &a).unwrap_err();
    assert!(matches!(err, Error::NonIntegral(_)));
    assert!(err.to_string().contains("non-integral binary"), "{err}");
}

#[test]
fn unknown_variable_in_solution_is_rejected() {
    let model = example_one_model();
    let err = parse_solution(&model, "a_9_f1 1\n").unwrap_err();
    assert!(matches!(err, Error::UnknownVariable(name) if name == "a_9_f1"));
}

#[test]
fn lp_text_round_trips_every_objective() {
    let data = example_one();
    let hp = HyperParams::new(2, 2, 1, ratio(1, 100)).unwrap();
    for obj in all_objectives() {
        let model = build_model(&data, &hp, &obj).unwrap();
        let text = emit_lp(&model);
        let back = parse_lp(&text).unwrap();
        assert_eq!(emit_lp(&back), text, "{}", obj.name());
        let res = solve_with(&data, &hp, &obj, &SolveOptions::default()).unwrap();
        let a = encode_tree(&back, &res.tree, &data).unwrap();
        let report = check_assignment(&back, &a).unwrap();
        assert!(report.feasible(), "{}: {:?}", obj.name(), report.violations);
        assert_eq!(report.objective, res.objective);
    }
}

#[test]
fn encoded_assignments_decode_to_the_same_tree() {
    for seed in 0..30 {
        let (data, hp) = oracle_instance(seed);
        let obj = ObjectiveKind::Accuracy;
        let res = solve_with(&data, &hp, &obj, &SolveOptions::default()).unwrap();
        let model = build_model(&data, &hp, &obj).unwrap();
        let a = encode_tree(&model, &res.tree, &data).unwrap();
        let back: BooleanTree = extract_tree(&model, &a).unwrap();
        let predictions = |t: &BooleanTree| -> Vec<usize> {
            data.rows().iter().map(|x| t.predict(x).unwrap()).collect()
        };
        assert_eq!(predictions(&back), predictions(&res.tree), "seed {seed}");
        assert_eq!(back.total_features(), res.tree.total_features());
    }
}

#[test]
fn empty_assignment_violates_instance_assignment() {
    let model = example_one_model();
    let report = check_assignment(&model, &Assignment::zeros(&model)).unwrap();
    assert!(report.violated("assign_1"));
}
