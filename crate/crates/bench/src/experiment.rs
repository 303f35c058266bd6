//! Repeated-split benchmark runs.
//!
//! Seeds, for a dataset with id `d` and repeat `r` (0-based):
//!
//! * split: `derive_seed(master, [PURPOSE_SPLIT, name_counter(d), r])`
//! * ensemble: `derive_seed(master, [PURPOSE_ENSEMBLE, name_counter(d), r])`,
//!   the same for every `k`
//! * noise columns: `derive_seed(master, [PURPOSE_CONTRIVED, name_counter(d)])`,
//!   drawn once per dataset
//!
//! so results depend only on the configuration, never on scheduling.

use std::collections::BTreeMap;

use oexnrule::data::{add_contrived_features, load_csv, split, Dataset, SplitPair, Standardizer};
use oexnrule::ensemble::{fit, EnsembleConfig};
use oexnrule::metrics::MetricRecord;
use oexnrule::neighbors::{knn_predict, wknn_predict, LabeledView, Vote};
use oexnrule::rng::{derive_seed, name_counter, PURPOSE_CONTRIVED, PURPOSE_ENSEMBLE, PURPOSE_SPLIT};
use rayon::prelude::*;

use crate::config::{DatasetSource, ExperimentConfig, Method};
use crate::error::BenchError;
use crate::report::{aggregate, DatasetFailure, DatasetInfo, ExperimentReport, Provenance, RunRecord};

pub fn split_seed(master: u64, dataset: &str, repeat: usize) -> u64 {
    derive_seed(master, &[PURPOSE_SPLIT, name_counter(dataset), repeat as u64])
}

pub fn ensemble_seed(master: u64, dataset: &str, repeat: usize) -> u64 {
    derive_seed(master, &[PURPOSE_ENSEMBLE, name_counter(dataset), repeat as u64])
}

pub fn contrived_seed(master: u64, dataset: &str) -> u64 {
    derive_seed(master, &[PURPOSE_CONTRIVED, name_counter(dataset)])
}

/// Loads a dataset as the experiment sees it, noise columns included.
pub fn prepare_dataset(source: &DatasetSource, cfg: &ExperimentConfig) -> Result<Dataset, BenchError> {
    let id = source.id();
    let wrap = |source| BenchError::Dataset { id: id.clone(), source };
    let ds = load_csv(&source.path, &source.label_column, &source.positive_label)
        .map_err(wrap)?
        .with_id(id.clone());
    if cfg.contrived {
        let count = ds.n_features();
        return add_contrived_features(&ds, count, contrived_seed(cfg.master_seed, &id)).map_err(wrap);
    }
    Ok(ds)
}

/// Runs every configured dataset on a pool of `cfg.workers` threads.
///
/// A dataset that fails to load, or fails in any repeat, is listed under
/// `failures` and contributes no records; the other datasets still run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    let mut failures = Vec::new();
    let mut loaded = Vec::new();
    for source in &cfg.datasets {
        match prepare_dataset(source, cfg) {
            Ok(ds) => loaded.push((source.id(), ds)),
            Err(e) => failures.push(DatasetFailure {
                dataset: source.id(),
                message: e.to_string(),
            }),
        }
    }

    let tasks: Vec<(usize, usize)> = (0..loaded.len())
        .flat_map(|d| (0..cfg.repeats).map(move |r| (d, r)))
        .collect();
    let outcomes: Vec<Result<Vec<RunRecord>, BenchError>> = tasks
        .par_iter()
        .map(|&(d, r)| {
            let (id, ds) = &loaded[d];
            run_repeat(cfg, id, ds, r)
        })
        .collect();

    let mut failed = vec![None; loaded.len()];
    let mut records = Vec::new();
    for (&(d, _), outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(rs) => records.extend(rs),
            Err(e) => {
                failed[d].get_or_insert(e.to_string());
            }
        }
    }

    let mut datasets = Vec::new();
    for ((id, ds), failure) in loaded.iter().zip(failed) {
        if let Some(message) = failure {
            failures.push(DatasetFailure {
                dataset: id.clone(),
                message,
            });
            records.retain(|r| &r.dataset != id);
            continue;
        }
        datasets.push(DatasetInfo {
            id: id.clone(),
            digest: ds.digest(),
            n_rows: ds.n_rows(),
            n_features: ds.n_features(),
            class_counts: ds.class_counts(),
            subspace_size: cfg.ensemble.subspace.resolve(ds.n_features()).ok(),
        });
    }

    let position: BTreeMap<String, usize> = cfg.datasets.iter().enumerate().map(|(i, s)| (s.id(), i)).collect();
    records.sort_by(|a, b| {
        position[&a.dataset]
            .cmp(&position[&b.dataset])
            .then(a.method.cmp(&b.method))
            .then(a.k.cmp(&b.k))
            .then(a.repeat.cmp(&b.repeat))
    });

    let mut split_digests: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for rec in &records {
        let list = split_digests.entry(rec.dataset.clone()).or_default();
        if list.len() == rec.repeat {
            list.push(rec.split_digest.clone());
        }
    }

    let aggregates = aggregate(&records);
    Ok(ExperimentReport {
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: cfg.master_seed,
            config: cfg.clone(),
            datasets,
            split_digests,
        },
        records,
        aggregates,
        failures,
    })
}

/// One repeat of one dataset: a single split shared by every method and k.
fn run_repeat(cfg: &ExperimentConfig, id: &str, ds: &Dataset, repeat: usize) -> Result<Vec<RunRecord>, BenchError> {
    let wrap = |source| BenchError::Dataset {
        id: id.to_string(),
        source,
    };
    let pair = split(ds, cfg.train_fraction, split_seed(cfg.master_seed, id, repeat)).map_err(wrap)?;
    let digest = pair.digest();
    let SplitPair { train, test, .. } = if cfg.standardize {
        let scaler = Standardizer::fit(&pair.train);
        SplitPair {
            train: scaler.transform(&pair.train).map_err(wrap)?,
            test: scaler.transform(&pair.test).map_err(wrap)?,
            ..pair
        }
    } else {
        pair
    };

    let mut out = Vec::with_capacity(cfg.methods.len() * cfg.k_values.len());
    for &method in &cfg.methods {
        for &k in &cfg.k_values {
            let votes = predict_method(
                cfg,
                method,
                k,
                &train,
                &test,
                ensemble_seed(cfg.master_seed, id, repeat),
            )
            .map_err(wrap)?;
            let labels: Vec<u8> = votes.iter().map(|v| v.label).collect();
            let probs: Vec<f64> = votes.iter().map(|v| v.fraction).collect();
            out.push(RunRecord {
                dataset: id.to_string(),
                method,
                k,
                repeat,
                split_digest: digest.clone(),
                metrics: MetricRecord::compute(test.labels(), &labels, &probs).map_err(wrap)?,
            });
        }
    }
    Ok(out)
}

fn predict_method(
    cfg: &ExperimentConfig,
    method: Method,
    k: usize,
    train: &Dataset,
    test: &Dataset,
    seed: u64,
) -> oexnrule::Result<Vec<Vote>> {
    let view = LabeledView::from(train);
    match method {
        Method::OExNRule => {
            let config = EnsembleConfig {
                n_models: cfg.ensemble.n_models,
                select_fraction: cfg.ensemble.select_fraction,
                k,
                subspace: cfg.ensemble.subspace,
                distance: cfg.distance,
                seed,
                resample: true,
            };
            let model = fit(train, &config)?;
            if !model.selection_is_optimal() {
                return Err(oexnrule::Error::InvalidArgument(
                    "kept base models do not all rank ahead of the dropped ones".into(),
                ));
            }
            model.vote_rows(test)
        }
        Method::Knn => (0..test.n_rows())
            .map(|i| knn_predict(view, test.row(i), k, cfg.distance))
            .collect(),
        Method::Wknn => (0..test.n_rows())
            .map(|i| wknn_predict(view, test.row(i), k, cfg.distance))
            .collect(),
    }
}
