//! Minkowski distances and the three instance-based prediction rules:
//! classical kNN, inverse-distance weighted kNN and the extended
//! neighbourhood rule (ExNRule) chain.
//!
//! All searches are exhaustive scans. Ties in distance go to the smaller row
//! index everywhere.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MatrixView};
use crate::error::{Error, Result};

/// Additive guard in the inverse-distance weight `1 / (d + WEIGHT_EPSILON)`.
pub const WEIGHT_EPSILON: f64 = 1e-12;

/// Minkowski exponent `q >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DistanceSpec {
    exponent: f64,
}

impl DistanceSpec {
    pub const EUCLIDEAN: DistanceSpec = DistanceSpec { exponent: 2.0 };
    pub const MANHATTAN: DistanceSpec = DistanceSpec { exponent: 1.0 };

    pub fn new(exponent: f64) -> Result<Self> {
        if exponent.is_finite() && exponent >= 1.0 {
            Ok(DistanceSpec { exponent })
        } else {
            Err(Error::InvalidArgument(format!(
                "Minkowski exponent must be finite and >= 1, got {exponent}"
            )))
        }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Distance between two equally long slices; lengths are not checked.
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let pairs = a.iter().zip(b);
        if self.exponent == 2.0 {
            pairs.map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        } else if self.exponent == 1.0 {
            pairs.map(|(x, y)| (x - y).abs()).sum()
        } else {
            let q = self.exponent;
            pairs.map(|(x, y)| (x - y).abs().powf(q)).sum::<f64>().powf(q.recip())
        }
    }
}

impl Default for DistanceSpec {
    fn default() -> Self {
        DistanceSpec::EUCLIDEAN
    }
}

impl TryFrom<f64> for DistanceSpec {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        DistanceSpec::new(q)
    }
}

impl From<DistanceSpec> for f64 {
    fn from(d: DistanceSpec) -> f64 {
        d.exponent
    }
}

/// `[sum_j |a_j - b_j|^q]^(1/q)`.
pub fn minkowski_distance(a: &[f64], b: &[f64], spec: DistanceSpec) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("distance between empty vectors".into()));
    }
    Ok(spec.eval(a, b))
}

/// Features plus labels of a training set, borrowed.
#[derive(Clone, Copy, Debug)]
pub struct LabeledView<'a> {
    features: MatrixView<'a>,
    labels: &'a [u8],
}

impl<'a> LabeledView<'a> {
    pub fn new(features: MatrixView<'a>, labels: &'a [u8]) -> Result<Self> {
        if features.n_rows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.n_rows(),
                right: labels.len(),
            });
        }
        Ok(LabeledView { features, labels })
    }

    pub fn features(&self) -> MatrixView<'a> {
        self.features
    }

    pub fn labels(&self) -> &'a [u8] {
        self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }
}

impl<'a> From<&'a Dataset> for LabeledView<'a> {
    fn from(ds: &'a Dataset) -> Self {
        LabeledView {
            features: ds.features(),
            labels: ds.labels(),
        }
    }
}

/// A class decision and the share of support for class 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vote {
    pub label: u8,
    /// Vote (or weight) share of class 1, in `[0, 1]`.
    pub fraction: f64,
}

/// The `k` points visited by the extended neighbourhood rule, in visit order.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborChain {
    /// Row index of each visited point.
    pub indices: Vec<usize>,
    /// Position of each visited point within the candidate list. Always
    /// pairwise distinct; `indices` repeats only when the candidate list
    /// itself repeats a row.
    pub positions: Vec<usize>,
    pub labels: Vec<u8>,
    /// Distance covered by each step: query to first point, then point to
    /// point.
    pub step_distances: Vec<f64>,
}

fn check_query(features: &MatrixView<'_>, x0: &[f64], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if x0.len() != features.n_cols() {
        return Err(Error::LengthMismatch {
            left: x0.len(),
            right: features.n_cols(),
        });
    }
    Ok(())
}

#[inline]
fn closer(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Less) => true,
        Some(Ordering::Greater) => false,
        _ => (a.1, a.2) < (b.1, b.2),
    }
}

/// Walks `k` steps from `x0`: each step moves to the unvisited candidate
/// nearest to the current point.
///
/// `candidate_rows` is a multiset of rows of `features`. Visiting a position
/// removes that position only, so a repeated row can be visited again at
/// distance 0. Ties go to the smaller row index, then the earlier position.
pub fn exnrule_chain(
    train: LabeledView<'_>,
    candidate_rows: &[usize],
    x0: &[f64],
    k: usize,
    spec: DistanceSpec,
) -> Result<NeighborChain> {
    let features = train.features;
    check_query(&features, x0, k)?;
    if candidate_rows.len() < k {
        return Err(Error::NotEnoughCandidates {
            needed: k,
            available: candidate_rows.len(),
        });
    }
    if let Some(&bad) = candidate_rows.iter().find(|&&r| r >= features.n_rows()) {
        return Err(Error::InvalidArgument(format!(
            "candidate row {bad} out of range for {} rows",
            features.n_rows()
        )));
    }
    Ok(walk_chain(train, candidate_rows, x0, k, spec))
}

/// `exnrule_chain` without argument checks, for callers that validated once.
pub(crate) fn walk_chain(
    train: LabeledView<'_>,
    candidate_rows: &[usize],
    x0: &[f64],
    k: usize,
    spec: DistanceSpec,
) -> NeighborChain {
    let features = train.features;
    let mut remaining: Vec<usize> = (0..candidate_rows.len()).collect();
    let mut chain = NeighborChain {
        indices: Vec::with_capacity(k),
        positions: Vec::with_capacity(k),
        labels: Vec::with_capacity(k),
        step_distances: Vec::with_capacity(k),
    };
    let mut current = x0;
    for _ in 0..k {
        let mut best_slot = 0;
        let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
        for (slot, &pos) in remaining.iter().enumerate() {
            let row = candidate_rows[pos];
            let key = (spec.eval(current, features.row(row)), row, pos);
            if closer(key, best) {
                best = key;
                best_slot = slot;
            }
        }
        remaining.swap_remove(best_slot);
        let (d, row, pos) = best;
        chain.indices.push(row);
        chain.positions.push(pos);
        chain.labels.push(train.labels[row]);
        chain.step_distances.push(d);
        current = features.row(row);
    }
    chain
}

/// Majority vote of chain labels; an even split goes to the first label.
pub fn chain_vote(labels: &[u8]) -> Vote {
    let ones = labels.iter().filter(|&&l| l == 1).count();
    let twice = 2 * ones;
    let label = match twice.cmp(&labels.len()) {
        Ordering::Greater => 1,
        Ordering::Less => 0,
        Ordering::Equal => labels[0],
    };
    Vote {
        label,
        fraction: ones as f64 / labels.len() as f64,
    }
}

/// ExNRule prediction using every training row as a candidate.
pub fn exnrule_predict(train: LabeledView<'_>, x0: &[f64], k: usize, spec: DistanceSpec) -> Result<Vote> {
    let rows: Vec<usize> = (0..train.n_rows()).collect();
    exnrule_predict_among(train, &rows, x0, k, spec)
}

/// ExNRule prediction restricted to a candidate multiset of rows.
pub fn exnrule_predict_among(
    train: LabeledView<'_>,
    candidate_rows: &[usize],
    x0: &[f64],
    k: usize,
    spec: DistanceSpec,
) -> Result<Vote> {
    let chain = exnrule_chain(train, candidate_rows, x0, k, spec)?;
    Ok(chain_vote(&chain.labels))
}

/// The `k` rows nearest to `x0` as `(distance, row)`, nearest first.
pub fn nearest_rows(features: MatrixView<'_>, x0: &[f64], k: usize, spec: DistanceSpec) -> Result<Vec<(f64, usize)>> {
    check_query(&features, x0, k)?;
    if features.n_rows() < k {
        return Err(Error::NotEnoughCandidates {
            needed: k,
            available: features.n_rows(),
        });
    }
    let mut all: Vec<(f64, usize)> = (0..features.n_rows())
        .map(|r| (spec.eval(x0, features.row(r)), r))
        .collect();
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, order);
        all.truncate(k);
    }
    all.sort_unstable_by(order);
    Ok(all)
}

/// Classical kNN: majority of the `k` nearest rows, an even split going to
/// the single nearest row's class.
pub fn knn_predict(train: LabeledView<'_>, x0: &[f64], k: usize, spec: DistanceSpec) -> Result<Vote> {
    let nearest = nearest_rows(train.features, x0, k, spec)?;
    let labels: Vec<u8> = nearest.iter().map(|&(_, r)| train.labels[r]).collect();
    Ok(chain_vote(&labels))
}

/// Inverse-distance weighted kNN with weights `1 / (d + WEIGHT_EPSILON)`.
///
/// `fraction` is class 1's share of the total weight. Equal weight sums go to
/// the nearest row's class.
pub fn wknn_predict(train: LabeledView<'_>, x0: &[f64], k: usize, spec: DistanceSpec) -> Result<Vote> {
    let nearest = nearest_rows(train.features, x0, k, spec)?;
    let mut sums = [0.0f64; 2];
    for &(d, r) in &nearest {
        sums[usize::from(train.labels[r])] += (d + WEIGHT_EPSILON).recip();
    }
    let label = match sums[1].partial_cmp(&sums[0]) {
        Some(Ordering::Greater) => 1,
        Some(Ordering::Less) => 0,
        _ => train.labels[nearest[0].1],
    };
    Ok(Vote {
        label,
        fraction: sums[1] / (sums[0] + sums[1]),
    })
}
