//! Accuracy, Cohen's kappa and the binary Brier score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(Error::InvalidArgument("metric over zero observations".into()));
    }
    Ok(())
}

/// Fraction of positions where the labels agree.
pub fn accuracy(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    check_lengths(y_true.len(), y_pred.len())?;
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Cohen's kappa `(p_o - p_e) / (1 - p_e)` with chance agreement from the
/// product of marginals. When `p_e = 1` the result is 1 for perfect
/// agreement and 0 otherwise. Not clamped: disagreement worse than chance
/// gives negative values.
pub fn cohen_kappa(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    check_lengths(y_true.len(), y_pred.len())?;
    let n = y_true.len() as f64;
    let mut agree = 0usize;
    let mut rows = [0usize; 2];
    let mut cols = [0usize; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::InvalidArgument(format!("labels must be 0 or 1, got ({t}, {p})")));
        }
        agree += usize::from(t == p);
        rows[usize::from(t)] += 1;
        cols[usize::from(p)] += 1;
    }
    let p_o = agree as f64 / n;
    let p_e = (rows[0] * cols[0] + rows[1] * cols[1]) as f64 / (n * n);
    if p_e == 1.0 {
        return Ok(if p_o == 1.0 { 1.0 } else { 0.0 });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Mean of `(p_i - y_i)^2` with `p_i` the predicted probability of class 1.
pub fn brier_score(y_true: &[u8], p_hat: &[f64]) -> Result<f64> {
    check_lengths(y_true.len(), p_hat.len())?;
    if let Some((index, &value)) = p_hat.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(Error::ProbabilityOutOfRange { index, value });
    }
    let sum: f64 = y_true
        .iter()
        .zip(p_hat)
        .map(|(&y, &p)| (p - f64::from(y)).powi(2))
        .sum();
    Ok(sum / y_true.len() as f64)
}

/// Test-set scores of one fitted method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub accuracy: f64,
    pub kappa: f64,
    pub brier: f64,
    pub n_test: usize,
}

impl MetricRecord {
    pub fn compute(y_true: &[u8], y_pred: &[u8], p_hat: &[f64]) -> Result<Self> {
        Ok(MetricRecord {
            accuracy: accuracy(y_true, y_pred)?,
            kappa: cohen_kappa(y_true, y_pred)?,
            brier: brier_score(y_true, p_hat)?,
            n_test: y_true.len(),
        })
    }
}

/// The three metrics by name, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Kappa,
    Brier,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Accuracy, Metric::Kappa, Metric::Brier];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Kappa => "kappa",
            Metric::Brier => "brier",
        }
    }

    pub fn of(self, r: &MetricRecord) -> f64 {
        match self {
            Metric::Accuracy => r.accuracy,
            Metric::Kappa => r.kappa,
            Metric::Brier => r.brier,
        }
    }

    pub fn higher_is_better(self) -> bool {
        !matches!(self, Metric::Brier)
    }
}
