#![allow(dead_code)]

use booltree::dataset::BinaryDataset;
use booltree::objective::ObjectiveKind;
use booltree::rational::ratio;
use booltree::tree::HyperParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The 10-instance, 5-feature table whose classes follow "at least two of f1, f2, f3".
pub fn example_one() -> BinaryDataset {
    let rows = vec![
        vec![0, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 1],
        vec![0, 1, 0, 0, 0],
        vec![0, 1, 1, 0, 1],
        vec![1, 0, 0, 1, 0],
        vec![1, 1, 0, 1, 1],
        vec![1, 0, 1, 0, 0],
        vec![1, 1, 1, 0, 1],
        vec![1, 1, 1, 0, 0],
        vec![1, 1, 1, 1, 1],
    ];
    BinaryDataset::from_rows(rows, vec![0, 0, 0, 1, 0, 1, 1, 1, 1, 1], 2).unwrap()
}

pub const EXAMPLE_ONE_CLASSES: [usize; 10] = [0, 0, 0, 1, 0, 1, 1, 1, 1, 1];

/// Random binary dataset with both classes present.
pub fn random_dataset(seed: u64, max_n: usize, max_features: usize) -> BinaryDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(4..=max_n);
        let f = rng.gen_range(2..=max_features);
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|_| (0..f).map(|_| rng.gen_range(0..2)).collect())
            .collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        if labels.contains(&0) && labels.contains(&1) {
            return BinaryDataset::from_rows(rows, labels, 2).unwrap();
        }
    }
}

pub fn all_objectives() -> Vec<ObjectiveKind> {
    vec![
        ObjectiveKind::Accuracy,
        ObjectiveKind::cost_sensitive(ratio(1, 1), ratio(3, 1)).unwrap(),
        ObjectiveKind::BalancedAccuracy,
        ObjectiveKind::F1,
    ]
}

/// Number of random instances in the solver-versus-enumeration suites.
pub const ORACLE_INSTANCES: u64 = 100;

/// A small random instance: n <= 20, at most 5 features, depth <= 2, F_max <= 2.
pub fn oracle_instance(seed: u64) -> (BinaryDataset, HyperParams) {
    let data = random_dataset(seed, 20, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let depth = rng.gen_range(1..=2);
    let f_max = rng.gen_range(1..=2);
    let s_min = if rng.gen_bool(0.25) { 2 } else { 1 };
    let alpha = [ratio(0, 1), ratio(1, 50), ratio(1, 10)][rng.gen_range(0..3)].clone();
    (data, HyperParams::new(depth, f_max, s_min, alpha).unwrap())
}
