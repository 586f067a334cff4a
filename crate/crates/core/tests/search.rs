mod common;

use std::time::Duration;

use booltree::metrics::{balanced_accuracy, confusion, f1};
use booltree::objective::ObjectiveKind;
use booltree::rational::{int, ratio};
use booltree::search::{
    brute_force, lower_bound, solve, solve_with, Engine, SearchNode, SolveOptions, SolveStatus,
};
use booltree::tree::{HyperParams, SplitRule};
use common::{all_objectives, example_one, oracle_instance, random_dataset, EXAMPLE_ONE_CLASSES, ORACLE_INSTANCES};

fn unlimited(engine: Engine, workers: usize) -> SolveOptions {
    SolveOptions {
        budget: None,
        workers,
        engine,
    }
}

#[test]
fn example_one_three_feature_rule_is_optimal() {
    let data = example_one();
    let hp = HyperParams::new(1, 3, 1, int(0)).unwrap();
    let res = solve(
        &data,
        &hp,
        &ObjectiveKind::Accuracy,
        Duration::from_secs(10),
        1,
    )
    .unwrap();
    assert_eq!(res.objective, int(0));
    assert_eq!(res.status, SolveStatus::Optimal);
    assert_eq!(res.tree.rule(1), &SplitRule::new(vec![0, 1, 2], 1));
    let predictions: Vec<usize> = data
        .rows()
        .iter()
        .map(|x| res.tree.predict(x).unwrap())
        .collect();
    assert_eq!(predictions, EXAMPLE_ONE_CLASSES);
}

#[test]
fn example_one_univariate_cannot_reach_zero() {
    let data = example_one();
    let hp = HyperParams::new(1, 1, 1, int(0)).unwrap();
    let res = solve(
        &data,
        &hp,
        &ObjectiveKind::Accuracy,
        Duration::from_secs(10),
        1,
    )
    .unwrap();
    let oracle = brute_force(&data, &hp, &ObjectiveKind::Accuracy).unwrap();
    assert!(res.objective > int(0));
    assert_eq!(res.objective, oracle.objective);
}

#[test]
fn pure_labels_give_inactive_root() {
    let data = booltree::dataset::BinaryDataset::from_rows(
        vec![vec![0, 1], vec![1, 0], vec![1, 1]],
        vec![1, 1, 1],
        2,
    )
    .unwrap();
    let hp = HyperParams::new(2, 2, 1, ratio(1, 100)).unwrap();
    for engine in [Engine::Region, Engine::NodeOrder] {
        let res = solve_with(&data, &hp, &ObjectiveKind::Accuracy, &unlimited(engine, 1)).unwrap();
        assert_eq!(res.objective, int(0));
        assert!(!res.tree.rule(1).active);
    }
    let oracle = brute_force(&data, &hp, &ObjectiveKind::Accuracy).unwrap();
    assert_eq!(oracle.objective, int(0));
    assert!(!oracle.tree.rule(1).active);
}

#[test]
fn tiny_budget_returns_valid_incumbent() {
    let data = random_dataset(7, 60, 12);
    let hp = HyperParams::new(3, 3, 1, ratio(1, 1000)).unwrap();
    for obj in all_objectives() {
        let res = solve(&data, &hp, &obj, Duration::from_nanos(1), 2).unwrap();
        assert_eq!(res.status, SolveStatus::FeasibleTimeLimit, "{obj}");
        assert!(res.gap >= int(0));
        res.tree.validate().unwrap();
    }
}

#[test]
fn zero_budget_is_rejected() {
    let hp = HyperParams::new(1, 1, 1, int(0)).unwrap();
    assert!(solve(
        &example_one(),
        &hp,
        &ObjectiveKind::Accuracy,
        Duration::ZERO,
        1
    )
    .is_err());
}

#[test]
fn support_larger_than_data_is_infeasible() {
    let hp = HyperParams::new(1, 1, 11, int(0)).unwrap();
    let err = solve(
        &example_one(),
        &hp,
        &ObjectiveKind::Accuracy,
        Duration::from_secs(1),
        1,
    )
    .unwrap_err();
    assert!(matches!(err, booltree::Error::Infeasible(_)));
}

#[test]
fn engines_match_brute_force() {
    for seed in 0..40u64 {
        let data = random_dataset(seed, 14, 4);
        let depth = 1 + (seed % 2) as usize;
        let f_max = 1 + (seed / 2 % 2) as usize;
        let s_min = 1 + (seed % 3) as usize;
        let alpha = [int(0), ratio(1, 50)][(seed / 4 % 2) as usize].clone();
        let hp = HyperParams::new(depth, f_max, s_min, alpha).unwrap();
        for obj in all_objectives() {
            let oracle = brute_force(&data, &hp, &obj).unwrap();
            for engine in [Engine::Region, Engine::NodeOrder] {
                let res = solve_with(&data, &hp, &obj, &unlimited(engine, 1)).unwrap();
                assert_eq!(
                    res.objective, oracle.objective,
                    "seed {seed} {obj} {engine:?}"
                );
                assert_eq!(res.status, SolveStatus::Optimal);
            }
        }
    }
}

#[test]
fn region_engine_agrees_with_brute_force_tree_on_ties() {
    for seed in 100..130u64 {
        let data = random_dataset(seed, 12, 4);
        let hp = HyperParams::new(2, 2, 1, int(0)).unwrap();
        for obj in all_objectives() {
            let oracle = brute_force(&data, &hp, &obj).unwrap();
            let res = solve_with(&data, &hp, &obj, &unlimited(Engine::Region, 1)).unwrap();
            assert_eq!(res.tree, oracle.tree, "seed {seed} {obj}");
        }
    }
}

#[test]
fn worker_count_does_not_change_the_tree() {
    for seed in 200..215u64 {
        let data = random_dataset(seed, 40, 8);
        let hp = HyperParams::new(2, 2, 1, ratio(1, 100)).unwrap();
        for obj in all_objectives() {
            let one = solve_with(&data, &hp, &obj, &unlimited(Engine::Region, 1)).unwrap();
            for workers in [2, 8] {
                let many =
                    solve_with(&data, &hp, &obj, &unlimited(Engine::Region, workers)).unwrap();
                assert_eq!(one.tree, many.tree, "seed {seed} {obj} workers {workers}");
            }
        }
    }
}

#[test]
fn bound_is_zero_at_root_and_exact_at_leaves() {
    let data = example_one();
    let hp = HyperParams::new(1, 3, 1, int(0)).unwrap();
    let root = SearchNode::root(&data, &hp);
    assert_eq!(lower_bound(&root, &ObjectiveKind::Accuracy), int(0));
    let done = root.decide(SplitRule::new(vec![0, 1, 2], 1));
    assert!(done.is_complete());
    assert_eq!(lower_bound(&done, &ObjectiveKind::Accuracy), int(0));
    let single = root.decide(SplitRule::new(vec![0], 0));
    // f1 = 0 holds e1..e4 (one positive), f1 = 1 holds e5..e10 (one negative).
    assert_eq!(lower_bound(&single, &ObjectiveKind::Accuracy), ratio(2, 10));
}

#[test]
fn univariate_limit_gives_single_feature_rules() {
    for seed in 0..ORACLE_INSTANCES {
        let (data, hp) = oracle_instance(seed);
        let hp = HyperParams::new(hp.depth, 1, hp.s_min, hp.alpha.clone()).unwrap();
        for obj in all_objectives() {
            let res = solve_with(&data, &hp, &obj, &unlimited(Engine::Region, 1)).unwrap();
            assert!(res.tree.rules().iter().all(|r| r.features.len() <= 1), "seed {seed}");
            assert_eq!(res.objective, brute_force(&data, &hp, &obj).unwrap().objective);
        }
    }
}

#[test]
fn internal_error_tallies_match_predictions() {
    for seed in 0..ORACLE_INSTANCES {
        let (data, hp) = oracle_instance(seed);
        for obj in all_objectives() {
            for engine in [Engine::Region, Engine::NodeOrder] {
                let res = solve_with(&data, &hp, &obj, &unlimited(engine, 1)).unwrap();
                let predictions: Vec<usize> = data.rows().iter().map(|x| res.tree.predict(x).unwrap()).collect();
                let counts = confusion(data.labels(), &predictions, 2).unwrap().binary().unwrap();
                assert_eq!(res.class_errors, vec![counts.fp, counts.fn_], "seed {seed} {engine:?}");
            }
        }
    }
}

#[test]
fn unpenalized_rate_objectives_equal_confusion_metrics() {
    for seed in 0..ORACLE_INSTANCES {
        let (data, hp) = oracle_instance(seed);
        let hp = HyperParams::new(hp.depth, hp.f_max, hp.s_min, int(0)).unwrap();
        for obj in [ObjectiveKind::BalancedAccuracy, ObjectiveKind::F1] {
            let res = solve_with(&data, &hp, &obj, &unlimited(Engine::Region, 1)).unwrap();
            let predictions: Vec<usize> = data.rows().iter().map(|x| res.tree.predict(x).unwrap()).collect();
            let cm = confusion(data.labels(), &predictions, 2).unwrap();
            let direct = match obj {
                ObjectiveKind::F1 => f1(&cm).unwrap(),
                _ => balanced_accuracy(&cm).unwrap(),
            };
            assert_eq!(res.objective, direct, "seed {seed} {}", obj.name());
        }
    }
}
