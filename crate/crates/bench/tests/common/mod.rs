#![allow(dead_code)]

use std::path::{Path, PathBuf};

use oexnrule_bench::config::{DatasetSource, ExperimentConfig, Method};
use rand::{Rng, SeedableRng};

/// Two noisy Gaussian-ish blobs in `p` dimensions, label column `class`
/// holding `yes`/`no`.
pub fn write_blobs(dir: &Path, name: &str, n: usize, p: usize, seed: u64) -> PathBuf {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut text = String::new();
    for j in 0..p {
        text.push_str(&format!("x{j},"));
    }
    text.push_str("class\n");
    for i in 0..n {
        let positive = i % 3 != 0;
        for _ in 0..p {
            let centre = if positive { 1.0 } else { -1.0 };
            let v: f64 = centre + rng.gen_range(-2.0..2.0);
            text.push_str(&format!("{v},"));
        }
        text.push_str(if positive { "yes\n" } else { "no\n" });
    }
    let path = dir.join(format!("{name}.csv"));
    std::fs::write(&path, text).unwrap();
    path
}

pub fn source(path: PathBuf) -> DatasetSource {
    DatasetSource {
        id: None,
        path,
        label_column: "class".parse().unwrap(),
        positive_label: "yes".into(),
    }
}

/// Small, fast configuration over the given datasets.
pub fn small_config(datasets: Vec<DatasetSource>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        datasets,
        methods: Method::ALL.to_vec(),
        repeats: 6,
        k_values: vec![3, 5],
        master_seed: 42,
        workers: 2,
        ..Default::default()
    };
    cfg.ensemble.n_models = 24;
    cfg
}

/// Every file in `dir` as (name, bytes), sorted by name.
pub fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
