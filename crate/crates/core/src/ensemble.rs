//! The optimal extended neighbourhood rule ensemble.
//!
//! `fit` draws `B` bootstrap samples, each with a random feature subspace,
//! scores an ExNRule learner on every sample by its out-of-bag error, ranks
//! the learners by `(oob_error, ordinal)` and keeps the best `B'`. Prediction
//! is a majority vote over the kept learners.
//!
//! Learners are instance based, so a fitted model keeps the training set and
//! each learner is just its sample. Base model `b` (1-based) draws its sample
//! from `derive_seed(seed, [PURPOSE_BOOTSTRAP, b])`, which makes a fit
//! independent of how many threads build it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{auto_subspace_size, BootstrapSample, Dataset, MatrixView};
use crate::error::{Error, Result};
use crate::neighbors::{chain_vote, walk_chain, DistanceSpec, LabeledView, Vote};
use crate::rng::{derive_seed, PURPOSE_BOOTSTRAP};

/// Size of the random feature subspace `p'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubspaceSize {
    /// `floor(sqrt(p))`, at least 1.
    #[default]
    Auto,
    Fixed(usize),
}

impl SubspaceSize {
    pub fn resolve(self, n_features: usize) -> Result<usize> {
        match self {
            SubspaceSize::Auto => Ok(auto_subspace_size(n_features)),
            SubspaceSize::Fixed(m) if (1..=n_features).contains(&m) => Ok(m),
            SubspaceSize::Fixed(m) => Err(Error::InvalidArgument(format!(
                "subspace size {m} not in [1, {n_features}]"
            ))),
        }
    }
}

impl fmt::Display for SubspaceSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceSize::Auto => f.write_str("auto"),
            SubspaceSize::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for SubspaceSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SubspaceSize::Auto);
        }
        s.parse()
            .map(SubspaceSize::Fixed)
            .map_err(|_| Error::InvalidArgument(format!("subspace size must be \"auto\" or an integer, got {s:?}")))
    }
}

impl Serialize for SubspaceSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SubspaceSize::Auto => s.serialize_str("auto"),
            SubspaceSize::Fixed(m) => s.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for SubspaceSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(m) => Ok(SubspaceSize::Fixed(m)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Base models built (`B`).
    pub n_models: usize,
    /// Share of base models kept; `B' = round(select_fraction * B)`, clamped
    /// to `[1, B]`.
    pub select_fraction: f64,
    /// Chain length.
    pub k: usize,
    pub subspace: SubspaceSize,
    pub distance: DistanceSpec,
    pub seed: u64,
    /// With `false` every base model uses all training rows exactly once
    /// instead of a bootstrap sample. Only the feature subspace stays random
    /// and no model gets an OOB score.
    pub resample: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_models: 500,
            select_fraction: 0.25,
            k: 3,
            subspace: SubspaceSize::Auto,
            distance: DistanceSpec::EUCLIDEAN,
            seed: 0,
            resample: true,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_models == 0 {
            return Err(Error::InvalidArgument("ensemble needs at least one base model".into()));
        }
        if !(self.select_fraction > 0.0 && self.select_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "select fraction {} not in (0, 1]",
                self.select_fraction
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(())
    }

    /// `B'`.
    pub fn n_selected(&self) -> usize {
        let raw = (self.select_fraction * self.n_models as f64).round() as usize;
        raw.clamp(1, self.n_models.max(1))
    }

    pub fn sample_seed(&self, ordinal: usize) -> u64 {
        derive_seed(self.seed, &[PURPOSE_BOOTSTRAP, ordinal as u64])
    }

    pub(crate) fn draw_sample(
        &self,
        n_rows: usize,
        n_features: usize,
        p_prime: usize,
        seed: u64,
    ) -> Result<BootstrapSample> {
        if self.resample {
            BootstrapSample::draw(n_rows, n_features, p_prime, seed)
        } else {
            BootstrapSample::full_bag(n_rows, n_features, p_prime, seed)
        }
    }
}

/// One ExNRule learner: its sample, OOB error and 1-based build ordinal.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseModel {
    pub sample: BootstrapSample,
    /// `None` when the sample left no row out of bag.
    pub oob_error: Option<f64>,
    pub ordinal: usize,
}

/// Ranking entry for one base model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelScore {
    pub ordinal: usize,
    pub oob_error: Option<f64>,
}

impl From<&BaseModel> for ModelScore {
    fn from(m: &BaseModel) -> Self {
        ModelScore {
            ordinal: m.ordinal,
            oob_error: m.oob_error,
        }
    }
}

/// Ascending OOB error, then ascending ordinal; unscored models last.
pub fn rank_order(a: &ModelScore, b: &ModelScore) -> Ordering {
    match (a.oob_error, b.oob_error) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
    .then(a.ordinal.cmp(&b.ordinal))
}

/// Whether every selected model ranks strictly ahead of every rejected one.
pub fn selection_is_optimal(selected: &[ModelScore], rejected: &[ModelScore]) -> bool {
    let worst_kept = selected.iter().max_by(|a, b| rank_order(a, b));
    let best_dropped = rejected.iter().min_by(|a, b| rank_order(a, b));
    match (worst_kept, best_dropped) {
        (Some(w), Some(b)) => rank_order(w, b) == Ordering::Less,
        _ => true,
    }
}

/// Misclassification rate of the sample's ExNRule learner on its OOB rows,
/// or `None` when there are none.
pub fn oob_error(sample: &BootstrapSample, train: &Dataset, config: &EnsembleConfig) -> Result<Option<f64>> {
    let projected = train.project_columns(&sample.feature_subset);
    oob_error_projected(sample, &projected, train, config)
}

fn oob_error_projected(
    sample: &BootstrapSample,
    projected: &[f64],
    train: &Dataset,
    config: &EnsembleConfig,
) -> Result<Option<f64>> {
    if sample.oob.is_empty() {
        return Ok(None);
    }
    if sample.in_bag.len() < config.k {
        return Err(Error::NotEnoughCandidates {
            needed: config.k,
            available: sample.in_bag.len(),
        });
    }
    let width = sample.feature_subset.len();
    let view = LabeledView::new(MatrixView::new(projected, train.n_rows(), width)?, train.labels())?;
    let wrong = sample
        .oob
        .iter()
        .filter(|&&r| {
            let x0 = &projected[r * width..(r + 1) * width];
            let chain = walk_chain(view, &sample.in_bag, x0, config.k, config.distance);
            chain_vote(&chain.labels).label != train.labels()[r]
        })
        .count();
    Ok(Some(wrong as f64 / sample.oob.len() as f64))
}

struct Voter {
    model: BaseModel,
    projected: Vec<f64>,
}

impl fmt::Debug for Voter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.model.fmt(f)
    }
}

impl Voter {
    fn new(model: BaseModel, train: &Dataset) -> Self {
        let projected = train.project_columns(&model.sample.feature_subset);
        Voter { model, projected }
    }

    fn vote(&self, train: &Dataset, x0: &[f64], config: &EnsembleConfig) -> u8 {
        let cols = &self.model.sample.feature_subset;
        let query: Vec<f64> = cols.iter().map(|&j| x0[j]).collect();
        let features = MatrixView::new(&self.projected, train.n_rows(), cols.len())
            .expect("projection shape fixed at construction");
        let view = LabeledView::new(features, train.labels()).expect("labels match rows");
        let chain = walk_chain(view, &self.model.sample.in_bag, &query, config.k, config.distance);
        chain_vote(&chain.labels).label
    }
}

/// A fitted ensemble: the training set, the `B'` best base models in rank
/// order, and the score of every base model built.
#[derive(Debug)]
pub struct OExNRuleModel {
    train: Dataset,
    config: EnsembleConfig,
    subspace_size: usize,
    voters: Vec<Voter>,
    scores: Vec<ModelScore>,
}

/// Fits on the current rayon pool.
pub fn fit(train: &Dataset, config: &EnsembleConfig) -> Result<OExNRuleModel> {
    config.validate()?;
    let n = train.n_rows();
    if n < config.k + 1 {
        return Err(Error::NotEnoughCandidates {
            needed: config.k + 1,
            available: n,
        });
    }
    let p_prime = config.subspace.resolve(train.n_features())?;
    let mut built: Vec<(BaseModel, Vec<f64>)> = (1..=config.n_models)
        .into_par_iter()
        .map(|ordinal| {
            let seed = config.sample_seed(ordinal);
            let sample = config.draw_sample(n, train.n_features(), p_prime, seed)?;
            let projected = train.project_columns(&sample.feature_subset);
            let oob_error = oob_error_projected(&sample, &projected, train, config)?;
            Ok((
                BaseModel {
                    sample,
                    oob_error,
                    ordinal,
                },
                projected,
            ))
        })
        .collect::<Result<_>>()?;
    built.sort_by(|a, b| rank_order(&(&a.0).into(), &(&b.0).into()));
    let scores = built.iter().map(|(m, _)| m.into()).collect();
    built.truncate(config.n_selected());
    let voters = built
        .into_iter()
        .map(|(model, projected)| Voter { model, projected })
        .collect();
    Ok(OExNRuleModel {
        train: train.clone(),
        config: *config,
        subspace_size: p_prime,
        voters,
        scores,
    })
}

/// Fits on a dedicated pool of `workers` threads.
pub fn fit_with_workers(train: &Dataset, config: &EnsembleConfig, workers: usize) -> Result<OExNRuleModel> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| fit(train, config))
}

impl OExNRuleModel {
    /// Reassembles a model from stored parts; the samples are redrawn from
    /// their seeds.
    pub(crate) fn from_parts(
        train: Dataset,
        config: EnsembleConfig,
        selected: Vec<BaseModel>,
        scores: Vec<ModelScore>,
    ) -> Result<Self> {
        let subspace_size = config.subspace.resolve(train.n_features())?;
        let voters = selected.into_iter().map(|m| Voter::new(m, &train)).collect();
        Ok(OExNRuleModel {
            train,
            config,
            subspace_size,
            voters,
            scores,
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    /// `p'` used by every base model.
    pub fn subspace_size(&self) -> usize {
        self.subspace_size
    }

    /// Selected base models, best first.
    pub fn selected(&self) -> impl ExactSizeIterator<Item = &BaseModel> {
        self.voters.iter().map(|v| &v.model)
    }

    pub fn n_selected(&self) -> usize {
        self.voters.len()
    }

    /// Scores of all `B` base models in rank order; the first `B'` are the
    /// selected ones.
    pub fn scores(&self) -> &[ModelScore] {
        &self.scores
    }

    /// Recomputes the selection check from the stored scores.
    pub fn selection_is_optimal(&self) -> bool {
        let kept: Vec<ModelScore> = self.selected().map(ModelScore::from).collect();
        let dropped: Vec<ModelScore> = self
            .scores
            .iter()
            .filter(|s| !kept.iter().any(|k| k.ordinal == s.ordinal))
            .copied()
            .collect();
        kept.len() == self.config.n_selected() && selection_is_optimal(&kept, &dropped)
    }

    /// Label emitted by each selected base model, best-ranked first.
    pub fn base_votes(&self, x0: &[f64]) -> Result<Vec<u8>> {
        if x0.len() != self.train.n_features() {
            return Err(Error::LengthMismatch {
                left: x0.len(),
                right: self.train.n_features(),
            });
        }
        Ok(self
            .voters
            .iter()
            .map(|v| v.vote(&self.train, x0, &self.config))
            .collect())
    }

    /// Majority label and class-1 vote share over the selected models. An
    /// even split goes to the best-ranked model's label.
    pub fn vote(&self, x0: &[f64]) -> Result<Vote> {
        Ok(aggregate_votes(&self.base_votes(x0)?))
    }

    pub fn predict(&self, x0: &[f64]) -> Result<u8> {
        Ok(self.vote(x0)?.label)
    }

    /// Share of selected base models voting class 1.
    pub fn predict_proba(&self, x0: &[f64]) -> Result<f64> {
        Ok(self.vote(x0)?.fraction)
    }

    /// Votes for every row of `rows`, in parallel on the current pool.
    pub fn vote_rows(&self, rows: &Dataset) -> Result<Vec<Vote>> {
        (0..rows.n_rows())
            .into_par_iter()
            .map(|i| self.vote(rows.row(i)))
            .collect()
    }
}

/// Second-stage majority vote over labels listed best-ranked first.
pub fn aggregate_votes(votes: &[u8]) -> Vote {
    chain_vote(votes)
}
