//! Datasets, train/test splitting, contrived noise features and
//! bootstrap-with-subspace resampling.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{child_seed, seeded_rng};

/// Row-major view of a real matrix.
#[derive(Clone, Copy, Debug)]
pub struct MatrixView<'a> {
    data: &'a [f64],
    n_rows: usize,
    n_cols: usize,
}

impl<'a> MatrixView<'a> {
    pub fn new(data: &'a [f64], n_rows: usize, n_cols: usize) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: n_rows * n_cols,
            });
        }
        Ok(MatrixView { data, n_rows, n_cols })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn as_slice(&self) -> &'a [f64] {
        self.data
    }
}

/// A binary classification dataset: `n` rows of `p` real features and a
/// class code in `{0, 1}` per row.
#[derive(Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    id: Option<String>,
}

impl fmt::Debug for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dataset")
            .field("id", &self.id)
            .field("n_rows", &self.n_rows)
            .field("n_features", &self.n_features)
            .field("class_counts", &self.class_counts())
            .finish()
    }
}

impl Dataset {
    /// Builds a dataset from a row-major feature buffer.
    ///
    /// Rejects non-finite features, labels outside `{0, 1}` and shape
    /// mismatches. Feature names default to `x1..xp` when `feature_names` is
    /// empty.
    pub fn new(features: Vec<f64>, n_features: usize, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::InvalidArgument("dataset needs at least one feature".into()));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len() * n_features,
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite feature value at row {}, column {}",
                pos / n_features,
                pos % n_features
            )));
        }
        if let Some(pos) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidArgument(format!(
                "label {} at row {pos} is not a class code in {{0, 1}}",
                labels[pos]
            )));
        }
        let feature_names = if feature_names.is_empty() {
            (1..=n_features).map(|j| format!("x{j}")).collect()
        } else if feature_names.len() != n_features {
            return Err(Error::LengthMismatch {
                left: feature_names.len(),
                right: n_features,
            });
        } else {
            feature_names
        };
        Ok(Dataset {
            n_rows: labels.len(),
            features,
            n_features,
            labels,
            feature_names,
            id: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: p,
            });
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        Dataset::new(rows.concat(), p, labels, Vec::new())
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn features(&self) -> MatrixView<'_> {
        MatrixView {
            data: &self.features,
            n_rows: self.n_rows,
            n_cols: self.n_features,
        }
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// `[count of class 0, count of class 1]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        for &r in rows {
            features.extend_from_slice(self.row(r));
        }
        Dataset {
            features,
            n_rows: rows.len(),
            n_features: self.n_features,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            feature_names: self.feature_names.clone(),
            id: self.id.clone(),
        }
    }

    /// Row-major copy of the given columns for every row.
    pub fn project_columns(&self, columns: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_rows * columns.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            out.extend(columns.iter().map(|&j| row[j]));
        }
        out
    }

    /// SHA-256 over shape, feature bit patterns and labels, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_rows as u64).to_le_bytes());
        h.update((self.n_features as u64).to_le_bytes());
        for v in &self.features {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update(&self.labels);
        hex::encode(h.finalize())
    }
}

/// Which CSV column holds the class label.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "#{i}"),
            LabelColumn::Name(n) => write!(f, "{n:?}"),
        }
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// All-digit strings select by 0-based index, anything else by name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

const MISSING_MARKERS: [&str; 4] = ["", "?", "NA", "NaN"];

/// Loads a comma-separated file with a header line.
pub fn load_csv(path: &Path, label: &LabelColumn, positive_label: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let ds = read_csv(file, label, positive_label)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(ds.with_id(id))
}

/// Parses CSV text: header line, `,` separator, `.` decimal point.
///
/// Every non-label column must parse as a finite real number. The label
/// column may hold at most two distinct values; rows equal to
/// `positive_label` become class 1, all others class 0. Row numbers in errors
/// are 0-based data rows (the header is not counted).
pub fn read_csv<R: Read>(reader: R, label: &LabelColumn, positive_label: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = match label {
        LabelColumn::Index(i) if *i < header.len() => *i,
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::LabelColumnNotFound(label.to_string()))?,
        _ => return Err(Error::LabelColumnNotFound(label.to_string())),
    };
    if header.len() < 2 {
        return Err(Error::InvalidArgument(
            "csv needs a label column and at least one feature column".into(),
        ));
    }
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (j, field) in record.iter().enumerate() {
            if MISSING_MARKERS.contains(&field) {
                return Err(Error::MissingValue {
                    row,
                    column: header[j].clone(),
                });
            }
            if j == label_idx {
                raw_labels.push(field.to_string());
                continue;
            }
            let value = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: header[j].clone(),
                    value: field.to_string(),
                })?;
            features.push(value);
        }
    }

    let distinct: BTreeSet<&str> = raw_labels.iter().map(String::as_str).collect();
    let values: Vec<String> = distinct.iter().map(|s| s.to_string()).collect();
    if distinct.len() > 2 || distinct.is_empty() {
        return Err(Error::LabelCardinality { values });
    }
    if distinct.len() == 2 && !distinct.contains(positive_label) {
        return Err(Error::UnknownPositiveLabel {
            label: positive_label.to_string(),
            values,
        });
    }
    let labels = raw_labels.iter().map(|l| u8::from(l == positive_label)).collect();
    Dataset::new(features, feature_names.len(), labels, feature_names)
}

/// A train/test partition of one source dataset.
#[derive(Clone, Debug)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    /// Source rows of `train`, ascending.
    pub train_rows: Vec<usize>,
    /// Source rows of `test`, ascending.
    pub test_rows: Vec<usize>,
    pub split_seed: u64,
}

impl SplitPair {
    /// Short hex digest of the partition, for checking that several methods
    /// consumed the same split.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.train_rows.len() as u64).to_le_bytes());
        for &r in self.train_rows.iter().chain(&self.test_rows) {
            h.update((r as u64).to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// Redraws allowed when a training partition comes out single-class.
pub const MAX_SPLIT_ATTEMPTS: usize = 100;

/// Training rows for a split of `n` rows: `round(train_fraction * n)`.
pub fn train_size(n: usize, train_fraction: f64) -> usize {
    (train_fraction * n as f64).round() as usize
}

/// Uniform random split without replacement (not stratified).
///
/// The first attempt uses `seed` directly; if the training part holds only
/// one class the split is redrawn with `child_seed(seed, attempt)`.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<SplitPair> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} not in (0, 1)"
        )));
    }
    let counts = ds.class_counts();
    if counts.iter().any(|&c| c < 2) {
        return Err(Error::InvalidArgument(format!(
            "split needs at least two rows per class, class counts are {counts:?}"
        )));
    }
    let n = ds.n_rows();
    let n_train = train_size(n, train_fraction);
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} leaves an empty partition for n = {n}"
        )));
    }
    for attempt in 0..MAX_SPLIT_ATTEMPTS {
        let draw_seed = if attempt == 0 {
            seed
        } else {
            child_seed(seed, attempt as u64)
        };
        let mut rng = seeded_rng(draw_seed);
        let mut train_rows = index::sample(&mut rng, n, n_train).into_vec();
        train_rows.sort_unstable();
        let first = ds.labels()[train_rows[0]];
        if train_rows.iter().all(|&r| ds.labels()[r] == first) {
            continue;
        }
        let mut in_train = vec![false; n];
        for &r in &train_rows {
            in_train[r] = true;
        }
        let test_rows: Vec<usize> = (0..n).filter(|&r| !in_train[r]).collect();
        return Ok(SplitPair {
            train: ds.select_rows(&train_rows),
            test: ds.select_rows(&test_rows),
            train_rows,
            test_rows,
            split_seed: seed,
        });
    }
    Err(Error::DegenerateSplit {
        attempts: MAX_SPLIT_ATTEMPTS,
    })
}

/// Appends `count` columns of i.i.d. uniform `[0, 1)` noise.
///
/// Values are generated row by row, new columns left to right.
pub fn add_contrived_features(ds: &Dataset, count: usize, seed: u64) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "contrived feature count must be at least 1".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let p = ds.n_features() + count;
    let mut features = Vec::with_capacity(ds.n_rows() * p);
    for i in 0..ds.n_rows() {
        features.extend_from_slice(ds.row(i));
        features.extend((0..count).map(|_| rng.gen::<f64>()));
    }
    let mut names = ds.feature_names().to_vec();
    names.extend((1..=count).map(|j| format!("contrived_{j}")));
    let out = Dataset::new(features, p, ds.labels().to_vec(), names)?;
    Ok(match ds.id() {
        Some(id) => out.with_id(id),
        None => out,
    })
}

/// Per-column z-scoring fitted on a training set.
#[derive(Clone, Debug)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    /// Constant columns get scale 1 so they map to 0.
    pub fn fit(train: &Dataset) -> Self {
        let n = train.n_rows() as f64;
        let p = train.n_features();
        let mut means = vec![0.0; p];
        for i in 0..train.n_rows() {
            for (m, v) in means.iter_mut().zip(train.row(i)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; p];
        for i in 0..train.n_rows() {
            for ((s, v), m) in vars.iter_mut().zip(train.row(i)).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let scales = vars
            .into_iter()
            .map(|s| {
                let sd = (s / (n - 1.0).max(1.0)).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { means, scales }
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.n_features() != self.means.len() {
            return Err(Error::LengthMismatch {
                left: ds.n_features(),
                right: self.means.len(),
            });
        }
        let mut features = Vec::with_capacity(ds.n_rows() * ds.n_features());
        for i in 0..ds.n_rows() {
            features.extend(
                ds.row(i)
                    .iter()
                    .zip(self.means.iter().zip(&self.scales))
                    .map(|(v, (m, s))| (v - m) / s),
            );
        }
        let out = Dataset::new(
            features,
            ds.n_features(),
            ds.labels().to_vec(),
            ds.feature_names().to_vec(),
        )?;
        Ok(match ds.id() {
            Some(id) => out.with_id(id),
            None => out,
        })
    }
}

/// Default subspace size for `p` features: `floor(sqrt(p))`, at least 1.
pub fn auto_subspace_size(p: usize) -> usize {
    let mut m = (p as f64).sqrt() as usize;
    while m * m > p {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= p {
        m += 1;
    }
    m.max(1)
}

/// One bootstrap sample together with its random feature subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BootstrapSample {
    /// `n` source rows drawn with replacement, in draw order.
    pub in_bag: Vec<usize>,
    /// `p'` distinct columns, ascending.
    pub feature_subset: Vec<usize>,
    /// Rows never drawn, ascending.
    pub oob: Vec<usize>,
    pub sample_seed: u64,
}

impl BootstrapSample {
    /// Draws `n_rows` row indices with replacement, then `p_prime` of
    /// `n_features` columns without replacement, from one generator.
    pub fn draw(n_rows: usize, n_features: usize, p_prime: usize, seed: u64) -> Result<Self> {
        check_sample_shape(n_rows, n_features, p_prime)?;
        let mut rng = seeded_rng(seed);
        let in_bag: Vec<usize> = (0..n_rows).map(|_| rng.gen_range(0..n_rows)).collect();
        let feature_subset = draw_subset(&mut rng, n_features, p_prime);
        let mut seen = vec![false; n_rows];
        for &r in &in_bag {
            seen[r] = true;
        }
        let oob = (0..n_rows).filter(|&r| !seen[r]).collect();
        Ok(BootstrapSample {
            in_bag,
            feature_subset,
            oob,
            sample_seed: seed,
        })
    }

    /// Every row exactly once (`in_bag = [0, n)`, empty OOB); only the
    /// feature subspace is random.
    pub fn full_bag(n_rows: usize, n_features: usize, p_prime: usize, seed: u64) -> Result<Self> {
        check_sample_shape(n_rows, n_features, p_prime)?;
        let mut rng = seeded_rng(seed);
        Ok(BootstrapSample {
            in_bag: (0..n_rows).collect(),
            feature_subset: draw_subset(&mut rng, n_features, p_prime),
            oob: Vec::new(),
            sample_seed: seed,
        })
    }
}

fn check_sample_shape(n_rows: usize, n_features: usize, p_prime: usize) -> Result<()> {
    if n_rows == 0 {
        return Err(Error::InvalidArgument("cannot resample an empty dataset".into()));
    }
    if p_prime == 0 || p_prime > n_features {
        return Err(Error::InvalidArgument(format!(
            "subspace size {p_prime} not in [1, {n_features}]"
        )));
    }
    Ok(())
}

fn draw_subset<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    let mut cols = index::sample(rng, n, m).into_vec();
    cols.sort_unstable();
    cols
}

/// Bootstrap sample of a training set.
pub fn draw_bootstrap(train: &Dataset, p_prime: usize, seed: u64) -> Result<BootstrapSample> {
    BootstrapSample::draw(train.n_rows(), train.n_features(), p_prime, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let labels = (0..n).map(|i| (i % 2) as u8).collect();
        Dataset::from_rows(&rows, labels).unwrap()
    }

    #[test]
    fn minimal_csv() {
        let ds = read_csv("x,y\n0.5,1".as_bytes(), &LabelColumn::Name("y".into()), "1").unwrap();
        assert_eq!(ds.n_rows(), 1);
        assert_eq!(ds.n_features(), 1);
        assert_eq!(ds.labels(), &[1]);
        assert_eq!(ds.row(0), &[0.5]);
    }

    #[test]
    fn csv_label_by_index_and_order_kept() {
        let text = "cls,a,b\nP,1,2\nN,3,4\nP,5,6\n";
        let ds = read_csv(text.as_bytes(), &LabelColumn::Index(0), "P").unwrap();
        assert_eq!(ds.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(ds.labels(), &[1, 0, 1]);
        assert_eq!(ds.row(1), &[3.0, 4.0]);
        assert_eq!(ds.class_counts(), [1, 2]);
    }

    #[test]
    fn csv_errors() {
        let by_name = |n: &str| LabelColumn::Name(n.into());
        let err = read_csv("a,y\n1,0\nfoo,1\n".as_bytes(), &by_name("y"), "1").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, ref column, .. } if column == "a"));

        let err = read_csv("a,y\n1,0\n?,1\n".as_bytes(), &by_name("y"), "1").unwrap_err();
        assert!(matches!(err, Error::MissingValue { row: 1, .. }));

        let err = read_csv("a,y\n1,0\n2,1\n3,2\n".as_bytes(), &by_name("y"), "1").unwrap_err();
        assert!(matches!(err, Error::LabelCardinality { ref values } if values.len() == 3));

        let err = read_csv("a,y\n1,0\n2,1\n".as_bytes(), &by_name("y"), "yes").unwrap_err();
        assert!(matches!(err, Error::UnknownPositiveLabel { .. }));

        let err = read_csv("a,y\n1,0\n".as_bytes(), &by_name("z"), "1").unwrap_err();
        assert!(matches!(err, Error::LabelColumnNotFound(_)));

        let err = read_csv("a,y\n1,0\n2\n".as_bytes(), &by_name("y"), "1").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 1, .. }));

        let err = read_csv("a,y\ninf,0\n".as_bytes(), &by_name("y"), "1").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn split_sizes_and_partition() {
        let ds = toy(10);
        let sp = split(&ds, 0.7, 3).unwrap();
        assert_eq!(sp.train.n_rows(), 7);
        assert_eq!(sp.test.n_rows(), 3);
        let mut all: Vec<usize> = sp.train_rows.iter().chain(&sp.test_rows).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        for (k, &r) in sp.train_rows.iter().enumerate() {
            assert_eq!(sp.train.row(k), ds.row(r));
        }
    }

    #[test]
    fn split_is_deterministic() {
        let ds = toy(40);
        let a = split(&ds, 0.7, 99).unwrap();
        let b = split(&ds, 0.7, 99).unwrap();
        assert_eq!(a.train_rows, b.train_rows);
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        assert_eq!(a.digest(), b.digest());
        let c = split(&ds, 0.7, 100).unwrap();
        assert_ne!(a.train_rows, c.train_rows);
    }

    #[test]
    fn ilpd_sized_split() {
        assert_eq!(train_size(583, 0.7), 408);
        let ds = toy(583);
        let sp = split(&ds, 0.7, 1).unwrap();
        assert_eq!((sp.train.n_rows(), sp.test.n_rows()), (408, 175));
    }

    #[test]
    fn split_rejections() {
        let ds = toy(10);
        assert!(split(&ds, 0.0, 1).is_err());
        assert!(split(&ds, 1.0, 1).is_err());
        let one_per_class = Dataset::from_rows(&[vec![0.0], vec![1.0], vec![2.0]], vec![0, 1, 1]).unwrap();
        assert!(split(&one_per_class, 0.5, 1).is_err());
    }

    #[test]
    fn degenerate_split_reports_attempts() {
        let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let ds = Dataset::from_rows(&rows, vec![0, 0, 1, 1]).unwrap();
        // train size 1 can never hold both classes
        let err = split(&ds, 0.2, 5).unwrap_err();
        assert!(matches!(
            err,
            Error::DegenerateSplit {
                attempts: MAX_SPLIT_ATTEMPTS
            }
        ));
    }

    #[test]
    fn contrived_columns() {
        let ds = toy(62).with_id("toy");
        let out = add_contrived_features(&ds, 2, 11).unwrap();
        assert_eq!(out.n_features(), 4);
        assert_eq!(out.n_rows(), 62);
        assert_eq!(out.id(), Some("toy"));
        assert_eq!(out.labels(), ds.labels());
        for i in 0..ds.n_rows() {
            assert_eq!(&out.row(i)[..2], ds.row(i));
            assert!(out.row(i)[2..].iter().all(|v| (0.0..1.0).contains(v)));
        }
        assert_eq!(out, add_contrived_features(&ds, 2, 11).unwrap());
        assert!(add_contrived_features(&ds, 0, 11).is_err());
    }

    #[test]
    fn contrived_column_means() {
        let ds = Dataset::new(vec![0.0; 10_000], 1, vec![0; 10_000], vec![]).unwrap();
        let out = add_contrived_features(&ds, 3, 2024).unwrap();
        for j in 1..4 {
            let mean = (0..out.n_rows()).map(|i| out.row(i)[j]).sum::<f64>() / 10_000.0;
            assert!((0.45..=0.55).contains(&mean), "column {j} mean {mean}");
        }
    }

    #[test]
    fn subspace_size_rule() {
        assert_eq!(auto_subspace_size(1), 1);
        assert_eq!(auto_subspace_size(3), 1);
        assert_eq!(auto_subspace_size(4), 2);
        assert_eq!(auto_subspace_size(7), 2);
        assert_eq!(auto_subspace_size(14), 3);
        assert_eq!(auto_subspace_size(29), 5);
        assert_eq!(auto_subspace_size(80), 8);
        assert_eq!(auto_subspace_size(81), 9);
    }

    #[test]
    fn bootstrap_single_row() {
        let ds = Dataset::from_rows(&[vec![1.0]], vec![1]).unwrap();
        let s = draw_bootstrap(&ds, 1, 0).unwrap();
        assert_eq!(s.in_bag, vec![0]);
        assert_eq!(s.feature_subset, vec![0]);
        assert!(s.oob.is_empty());
    }

    #[test]
    fn bootstrap_subspace_of_29() {
        let s = BootstrapSample::draw(36, 29, auto_subspace_size(29), 8).unwrap();
        assert_eq!(s.feature_subset.len(), 5);
        assert!(s.feature_subset.windows(2).all(|w| w[0] < w[1]));
        assert!(s.feature_subset.iter().all(|&c| c < 29));
    }

    #[test]
    fn bootstrap_rejects_bad_subspace() {
        assert!(BootstrapSample::draw(5, 3, 0, 1).is_err());
        assert!(BootstrapSample::draw(5, 3, 4, 1).is_err());
        assert!(BootstrapSample::draw(0, 3, 1, 1).is_err());
    }

    #[test]
    fn oob_fraction_monte_carlo() {
        let draws = 10_000;
        let total: usize = (0..draws)
            .map(|b| BootstrapSample::draw(100, 4, 2, child_seed(77, b)).unwrap().oob.len())
            .sum();
        let mean = total as f64 / (draws as f64 * 100.0);
        // (1 - 1/100)^100
        let expected = 0.99f64.powi(100);
        assert!((mean - expected).abs() < 0.01, "mean oob fraction {mean}");
        assert!((mean - 0.368).abs() < 0.01);
    }

    #[test]
    fn standardizer_centres_training_columns() {
        let ds = toy(20);
        let st = Standardizer::fit(&ds);
        let z = st.transform(&ds).unwrap();
        for j in 0..2 {
            let mean = (0..20).map(|i| z.row(i)[j]).sum::<f64>() / 20.0;
            let var = (0..20).map(|i| z.row(i)[j].powi(2)).sum::<f64>() / 19.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
        let constant = Dataset::from_rows(&[vec![2.0], vec![2.0]], vec![0, 1]).unwrap();
        let z = Standardizer::fit(&constant).transform(&constant).unwrap();
        assert_eq!(z.row(0), &[0.0]);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![1.0, f64::NAN], 1, vec![0, 1], vec![]).is_err());
        assert!(Dataset::new(vec![1.0, 2.0], 1, vec![0, 2], vec![]).is_err());
        assert!(Dataset::new(vec![1.0, 2.0, 3.0], 1, vec![0, 1], vec![]).is_err());
        assert!(Dataset::new(vec![], 0, vec![], vec![]).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = toy(5);
        let b = toy(5);
        assert_eq!(a.digest(), b.digest());
        let c = a.select_rows(&[0, 1, 2, 3]);
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
