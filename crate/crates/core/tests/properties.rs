mod common;

use booltree::dataset::{load_binary_csv, split_dataset, BinaryDataset};
use booltree::objective::{evaluate, ObjectiveKind, Sense};
use booltree::rational::{int, ratio, Rational};
use booltree::search::{lower_bound, SearchNode};
use booltree::tree::{BooleanTree, HyperParams, SplitRule, TreeTopology};
use common::{all_objectives, random_dataset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random rule over `n_features`: inactive, or a non-empty subset with a valid threshold.
fn random_rule(rng: &mut ChaCha8Rng, n_features: usize, max_size: usize) -> SplitRule {
    if rng.gen_bool(0.2) {
        return SplitRule::inactive();
    }
    let size = rng.gen_range(1..=max_size.min(n_features));
    let mut features: Vec<usize> = (0..n_features).collect();
    for i in 0..size {
        let j = rng.gen_range(i..n_features);
        features.swap(i, j);
    }
    features.truncate(size);
    let threshold = rng.gen_range(0..size);
    SplitRule::new(features, threshold)
}

/// Random tree that only nests active rules under active parents, with
/// labels on every leaf including unreachable ones.
fn random_raw_tree(seed: u64) -> BooleanTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(1..=3);
    let n_features = rng.gen_range(1..=5);
    let topo = TreeTopology::new(depth);
    let mut rules: Vec<SplitRule> = Vec::with_capacity(topo.n_branch());
    for t in topo.branch_nodes() {
        let rule = random_rule(&mut rng, n_features, 3);
        let parent_on = t == 1 || rules[t / 2 - 1].active;
        rules.push(if parent_on { rule } else { SplitRule::inactive() });
    }
    let labels = (0..topo.n_leaves()).map(|_| Some(rng.gen_range(0..2))).collect();
    BooleanTree::unchecked(depth, n_features, rules, labels).unwrap()
}

fn random_tree(seed: u64) -> BooleanTree {
    random_raw_tree(seed).canonicalize()
}

fn random_row(seed: u64, n_features: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_features).map(|_| rng.gen_range(0..2)).collect()
}

/// The unique leaf whose left ancestors all send `x` left and whose right
/// ancestors all apply an active rule sending `x` right.
fn leaf_by_path_conditions(tree: &BooleanTree, x: &[u8]) -> Vec<usize> {
    let topo = tree.topology();
    topo.leaves()
        .filter(|&t| {
            topo.left_ancestors(t).iter().all(|&s| tree.rule(s).goes_left(x))
                && topo.right_ancestors(t).iter().all(|&s| {
                    let r = tree.rule(s);
                    r.active && r.count(x) > r.threshold
                })
        })
        .collect()
}

fn loss(obj: &ObjectiveKind, value: &Rational) -> Rational {
    match obj.sense() {
        Sense::Minimize => value.clone(),
        Sense::Maximize => int(1) - value,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn routing_matches_path_conditions(tree_seed in any::<u64>(), row_seed in any::<u64>()) {
        let tree = random_tree(tree_seed);
        let x = random_row(row_seed, tree.n_features());
        let leaves = leaf_by_path_conditions(&tree, &x);
        prop_assert_eq!(leaves.len(), 1);
        prop_assert_eq!(tree.route(&x).unwrap(), leaves[0]);
        prop_assert!(tree.reachable_leaves().contains(&leaves[0]));
    }

    #[test]
    fn canonicalize_is_idempotent_and_keeps_predictions(tree_seed in any::<u64>(), row_seed in any::<u64>()) {
        let tree = random_tree(tree_seed);
        tree.validate().unwrap();
        prop_assert_eq!(tree.canonicalize(), tree.clone());
        let x = random_row(row_seed, tree.n_features());
        let raw = random_raw_tree(tree_seed);
        prop_assert_eq!(raw.route(&x).unwrap(), tree.route(&x).unwrap());
        prop_assert_eq!(raw.predict(&x).unwrap(), tree.predict(&x).unwrap());
    }

    #[test]
    fn model_text_round_trips(tree_seed in any::<u64>()) {
        let tree = random_tree(tree_seed);
        prop_assert_eq!(BooleanTree::from_text(&tree.to_text()).unwrap(), tree);
    }

    #[test]
    fn univariate_trees_have_their_active_depth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let depth = rng.gen_range(1..=4);
        let topo = TreeTopology::new(depth);
        let rules = (0..topo.n_branch()).map(|_| random_rule(&mut rng, 4, 1)).collect();
        let labels = (0..topo.n_leaves()).map(|_| Some(0)).collect();
        let tree = BooleanTree::unchecked(depth, 4, rules, labels).unwrap().canonicalize();
        prop_assume!(tree.rules().iter().any(|r| r.active));
        let active_levels = (0..depth)
            .filter(|&level| ((1usize << level)..(1usize << (level + 1))).any(|t| tree.rule(t).active))
            .count() as u64;
        prop_assert_eq!(tree.equivalent_univariate_depth().unwrap(), active_levels);
    }

    #[test]
    fn splits_partition_the_rows(n in 4usize..200, seed in any::<u64>()) {
        let s = split_dataset(n, (0.5, 0.25, 0.25), seed).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(s.validation.len(), n / 4);
        prop_assert_eq!(s.test.len(), n / 4);
        prop_assert_eq!(split_dataset(n, (0.5, 0.25, 0.25), seed).unwrap(), s);
    }

    #[test]
    fn binary_csv_round_trips(seed in any::<u64>()) {
        let data = random_dataset(seed, 30, 6);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        data.write_csv("class", &path).unwrap();
        let back = load_binary_csv(&path, "class", Some("1")).unwrap();
        prop_assert_eq!(back.rows(), data.rows());
        prop_assert_eq!(back.labels(), data.labels());
        prop_assert_eq!(back.feature_names(), data.feature_names());
    }

    #[test]
    fn search_node_children_partition_the_parent(seed in any::<u64>()) {
        let data = random_dataset(seed, 20, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hp = HyperParams::new(2, 2, 1, int(0)).unwrap();
        let mut node = SearchNode::root(&data, &hp);
        while let Some(t) = node.next_node() {
            let rule = random_rule(&mut rng, data.n_features(), 2);
            let parent = node.region(t).unwrap();
            node = node.decide(rule.clone());
            if !rule.active {
                continue;
            }
            let left = node.region(2 * t).unwrap();
            let right = node.region(2 * t + 1).unwrap();
            let mut both: Vec<usize> = left.iter().chain(&right).copied().collect();
            both.sort_unstable();
            prop_assert_eq!(&both, &parent);
            prop_assert!(left.iter().all(|&i| rule.goes_left(data.row(i))));
            prop_assert!(right.iter().all(|&i| !rule.goes_left(data.row(i))));
        }
    }

    #[test]
    fn lower_bound_grows_along_paths_and_is_exact_at_the_end(seed in any::<u64>(), alpha_idx in 0usize..3) {
        let data = random_dataset(seed, 20, 5);
        let alpha = [int(0), ratio(1, 50), ratio(1, 10)][alpha_idx].clone();
        let hp = HyperParams::new(2, 2, 1, alpha.clone()).unwrap();
        for obj in all_objectives() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
            let mut node = SearchNode::root(&data, &hp);
            let mut bound = lower_bound(&node, &obj);
            while node.next_node().is_some() {
                node = node.decide(random_rule(&mut rng, data.n_features(), 2));
                let next = lower_bound(&node, &obj);
                prop_assert!(next >= bound, "{}: {} < {}", obj.name(), next, bound);
                bound = next;
            }
            let tree = node.to_tree(&obj).unwrap();
            let value = evaluate(&obj, &alpha, &tree, &data).unwrap();
            prop_assert_eq!(bound, loss(&obj, &value), "{}", obj.name());
        }
    }
}

#[test]
fn class_counts_follow_labels() {
    let data = BinaryDataset::from_rows(vec![vec![0], vec![1], vec![1]], vec![1, 0, 1], 2).unwrap();
    assert_eq!(data.class_counts(), &[1, 2]);
}
