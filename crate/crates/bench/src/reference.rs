//! Published results for report annotation. These values are quoted, not
//! computed by this crate.

use std::sync::OnceLock;

const PUBLISHED_CSV: &str = include_str!("../reference/published.csv");

/// Which published table a value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    /// Original features, default settings, all seven methods.
    Original,
    /// Datasets A to E at `k = 3, 5, 7`.
    KSweep,
    /// Features doubled with uniform noise.
    Contrived,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublishedValue {
    pub table: Table,
    pub metric: &'static str,
    pub method: &'static str,
    /// Dataset letter, or `MEAN` for the row mean.
    pub dataset: &'static str,
    pub k: Option<usize>,
    pub value: f64,
}

/// Method columns of the published tables, in table order.
pub const PUBLISHED_METHODS: [&str; 7] = ["oexnrule", "knn", "wknn", "rknn", "rf", "ote", "svm"];

pub fn published() -> &'static [PublishedValue] {
    static VALUES: OnceLock<Vec<PublishedValue>> = OnceLock::new();
    VALUES.get_or_init(|| {
        PUBLISHED_CSV
            .lines()
            .skip(1)
            .filter(|l| !l.is_empty())
            .map(|line| {
                let f: Vec<&'static str> = line.split(',').collect();
                PublishedValue {
                    table: match f[0] {
                        "original" => Table::Original,
                        "k_sweep" => Table::KSweep,
                        "contrived" => Table::Contrived,
                        other => panic!("unknown table {other:?} in published.csv"),
                    },
                    metric: f[1],
                    method: f[2],
                    dataset: f[3],
                    k: if f[4].is_empty() {
                        None
                    } else {
                        Some(f[4].parse().expect("k"))
                    },
                    value: f[5].parse().expect("value"),
                }
            })
            .collect()
    })
}

pub fn lookup(table: Table, metric: &str, method: &str, dataset: char, k: Option<usize>) -> Option<f64> {
    let mut buf = [0u8; 4];
    let dataset = dataset.encode_utf8(&mut buf);
    published()
        .iter()
        .find(|v| v.table == table && v.metric == metric && v.method == method && v.dataset == dataset && v.k == k)
        .map(|v| v.value)
}
