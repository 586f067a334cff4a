//! Enumeration of Boolean-rule splits of a region with bit-sliced counters.

use std::collections::HashMap;

use super::bitset::Bits;
use super::data::SearchData;

/// Calls `visit(features, threshold, right)` for every rule with
/// `1 <= |S| <= max_size` and `0 <= b < |S|`, in lexicographic order of `S`
/// then increasing `b`. `right` holds the region members with more than `b`
/// of the features set. Features constant on the region are skipped: they
/// only reproduce partitions of smaller rules. Stops early when `visit`
/// returns false; returns false in that case.
pub(crate) fn for_each_split(
    data: &SearchData,
    region: &Bits,
    max_size: usize,
    mut visit: impl FnMut(&[usize], usize, &Bits) -> bool,
) -> bool {
    let m = region.count();
    let features: Vec<usize> = (0..data.n_features)
        .filter(|&f| {
            let c = region.and_count(&data.columns[f]);
            c > 0 && c < m
        })
        .collect();
    let max_size = max_size.min(features.len());
    if max_size == 0 {
        return true;
    }
    // levels[s][j]: members with at least j of the first s chosen features set.
    let mut levels: Vec<Vec<Bits>> = (0..=max_size)
        .map(|s| (0..=s).map(|_| Bits::empty(data.n)).collect())
        .collect();
    levels[0][0].copy_from(region);
    let mut chosen = Vec::with_capacity(max_size);
    descend(
        data,
        &features,
        0,
        &mut levels,
        &mut chosen,
        max_size,
        &mut visit,
    )
}

fn descend(
    data: &SearchData,
    features: &[usize],
    start: usize,
    levels: &mut [Vec<Bits>],
    chosen: &mut Vec<usize>,
    max_size: usize,
    visit: &mut impl FnMut(&[usize], usize, &Bits) -> bool,
) -> bool {
    let s = chosen.len();
    for p in start..features.len() {
        let f = features[p];
        let col = &data.columns[f];
        let (lower, upper) = levels.split_at_mut(s + 1);
        let prev = &lower[s];
        let next = &mut upper[0];
        next[0].copy_from(&prev[0]);
        for j in 1..=s {
            next[j].copy_from(&prev[j]);
            next[j].or_and_assign(&prev[j - 1], col);
        }
        next[s + 1] = prev[s].and(col);
        chosen.push(f);
        for b in 0..=s {
            if !visit(chosen, b, &levels[s + 1][b + 1]) {
                return false;
            }
        }
        if s + 1 < max_size && !descend(data, features, p + 1, levels, chosen, max_size, visit) {
            return false;
        }
        chosen.pop();
    }
    true
}

/// A split kept for deeper search, with its two sides.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub features: Vec<usize>,
    pub threshold: usize,
    pub left: Bits,
    pub right: Bits,
}

impl Candidate {
    fn rank(&self) -> (usize, &[usize], usize) {
        (self.features.len(), &self.features, self.threshold)
    }
}

/// Splits of `region` whose sides both hold at least `min_side` members, one
/// per distinct unordered partition: the one with the fewest features, then
/// smallest feature list, then smallest threshold. `keep` can veto a split
/// from its feature count and sides before it is stored.
pub(crate) fn distinct_splits(
    data: &SearchData,
    region: &Bits,
    max_size: usize,
    min_side: usize,
    mut keep: impl FnMut(usize, &Bits, &Bits) -> bool,
    mut interrupted: impl FnMut() -> bool,
) -> Option<Vec<Candidate>> {
    let m = region.count();
    let anchor = region.first();
    let mut seen: HashMap<Bits, usize> = HashMap::new();
    let mut out: Vec<Candidate> = Vec::new();
    let mut visits = 0u32;
    let complete = for_each_split(data, region, max_size, |features, b, right| {
        visits = visits.wrapping_add(1);
        if visits % 1024 == 0 && interrupted() {
            return false;
        }
        let rm = right.count();
        if rm < min_side || m - rm < min_side {
            return true;
        }
        let left = region.and_not(right);
        if !keep(features.len(), &left, right) {
            return true;
        }
        let canonical = match anchor {
            Some(a) if right.contains(a) => right.clone(),
            _ => left.clone(),
        };
        let cand = Candidate {
            features: features.to_vec(),
            threshold: b,
            left,
            right: right.clone(),
        };
        match seen.get(&canonical) {
            Some(&idx) => {
                if cand.rank() < out[idx].rank() {
                    out[idx] = cand;
                }
            }
            None => {
                seen.insert(canonical, out.len());
                out.push(cand);
            }
        }
        true
    });
    complete.then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::BinaryDataset;

    fn brute_count(x: &[u8], features: &[usize]) -> usize {
        features.iter().map(|&f| x[f] as usize).sum()
    }

    #[test]
    fn enumerates_every_rule_with_correct_sides() {
        let rows: Vec<Vec<u8>> = (0..32u32)
            .map(|v| (0..5).map(|b| ((v >> b) & 1) as u8).collect())
            .collect();
        let labels = (0..32).map(|i| i % 2).collect();
        let ds = BinaryDataset::from_rows(rows.clone(), labels, 2).unwrap();
        let data = SearchData::new(&ds);
        let mut seen = Vec::new();
        for_each_split(&data, &data.all, 3, |s, b, right| {
            for (i, x) in rows.iter().enumerate() {
                assert_eq!(
                    right.contains(i),
                    brute_count(x, s) > b,
                    "S={s:?} b={b} row {i}"
                );
            }
            seen.push((s.to_vec(), b));
            true
        });
        // 5 + 10*2 + 10*3 rules
        assert_eq!(seen.len(), 55);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn constant_features_are_skipped_and_partitions_deduplicated() {
        // f3 is constant; f1 and f2 are identical.
        let rows = vec![vec![0, 0, 1], vec![1, 1, 1], vec![0, 0, 1], vec![1, 1, 1]];
        let ds = BinaryDataset::from_rows(rows, vec![0, 1, 0, 1], 2).unwrap();
        let data = SearchData::new(&ds);
        let cands = distinct_splits(&data, &data.all, 3, 1, |_, _, _| true, || false).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].features, vec![0]);
        assert_eq!(cands[0].threshold, 0);
    }
}
