//! Small datasets that ship with the library.

use crate::dataset::{BinaryDataset, Column, ColumnValues, RawDataset};
use crate::error::Result;

/// Ten instances over five binary features; the class is 1 exactly when at
/// least two of the first three features are set.
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
    BinaryDataset::from_rows(rows, vec![0, 0, 0, 1, 0, 1, 1, 1, 1, 1], 2)
        .expect("fixed table is valid")
}

/// `example_one` as CSV text with columns `f1..f5,class`.
pub fn example_one_csv() -> String {
    let data = example_one();
    let mut out = String::from("f1,f2,f3,f4,f5,class\n");
    for (row, label) in data.rows().iter().zip(data.labels()) {
        let cells: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&format!("{},{label}\n", cells.join(",")));
    }
    out
}

const MONK_LEVELS: [usize; 6] = [3, 3, 2, 3, 4, 2];

/// The full MONK-1 attribute space (432 rows) labeled by its target concept
/// `a1 == a2 or a5 == 1`. Attributes are categorical with values `1..=k`.
pub fn monk1() -> Result<RawDataset> {
    let mut values: Vec<Vec<String>> = vec![Vec::new(); MONK_LEVELS.len()];
    let mut labels = Vec::new();
    let total: usize = MONK_LEVELS.iter().product();
    for code in 0..total {
        let mut rest = code;
        let mut attrs = [0usize; 6];
        for (j, &k) in MONK_LEVELS.iter().enumerate().rev() {
            attrs[j] = rest % k + 1;
            rest /= k;
        }
        for (j, &a) in attrs.iter().enumerate() {
            values[j].push(a.to_string());
        }
        let class = attrs[0] == attrs[1] || attrs[4] == 1;
        labels.push(u8::from(class).to_string());
    }
    let columns = values
        .into_iter()
        .enumerate()
        .map(|(j, v)| Column {
            name: format!("a{}", j + 1),
            values: ColumnValues::Categorical(v),
        })
        .collect();
    RawDataset::new("class", columns, labels)
}
