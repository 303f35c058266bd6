//! Plain-text model files.
//!
//! A fitted ensemble is stored as its configuration, a digest of the
//! training set and one record per base model; the training rows themselves
//! are not stored. Loading needs the same training set again and redraws
//! every selected sample from its seed. See `docs/model-format.md`.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::Dataset;
use crate::ensemble::{BaseModel, EnsembleConfig, ModelScore, OExNRuleModel};
use crate::error::{Error, Result};
use crate::neighbors::DistanceSpec;

pub const MAGIC: &str = "oexnrule-model";
pub const VERSION: u32 = 1;

const UNSCORED: &str = "unscored";

fn fmt_error(e: Option<f64>) -> String {
    e.map_or_else(|| UNSCORED.to_string(), |v| v.to_string())
}

/// Renders `model` in the text format. The output depends only on the model.
pub fn to_string(model: &OExNRuleModel) -> String {
    let c = model.config();
    let train = model.train();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} v{VERSION}");
    out.push_str("[config]\n");
    let _ = writeln!(out, "n_models = {}", c.n_models);
    let _ = writeln!(out, "select_fraction = {}", c.select_fraction);
    let _ = writeln!(out, "k = {}", c.k);
    let _ = writeln!(out, "subspace = {}", c.subspace);
    let _ = writeln!(out, "distance_exponent = {}", c.distance.exponent());
    let _ = writeln!(out, "seed = {}", c.seed);
    let _ = writeln!(out, "resample = {}", c.resample);
    out.push_str("[dataset]\n");
    let _ = writeln!(out, "digest = {}", train.digest());
    let _ = writeln!(out, "n_rows = {}", train.n_rows());
    let _ = writeln!(out, "n_features = {}", train.n_features());
    let _ = writeln!(out, "[selected {}]", model.n_selected());
    out.push_str("# ordinal sample_seed oob_error\n");
    for m in model.selected() {
        let _ = writeln!(out, "{} {} {}", m.ordinal, m.sample.sample_seed, fmt_error(m.oob_error));
    }
    let rejected = &model.scores()[model.n_selected()..];
    let _ = writeln!(out, "[rejected {}]", rejected.len());
    out.push_str("# ordinal oob_error\n");
    for s in rejected {
        let _ = writeln!(out, "{} {}", s.ordinal, fmt_error(s.oob_error));
    }
    out
}

pub fn save(model: &OExNRuleModel, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path, train: Dataset) -> Result<OExNRuleModel> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_str(&text, train)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Result<&'a str> {
        for (i, raw) in self.inner.by_ref() {
            self.line = i + 1;
            let t = raw.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(t);
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::ModelFormat {
            line: self.line,
            message: message.into(),
        }
    }

    fn expect(&mut self, exact: &str) -> Result<()> {
        let t = self.next_content()?;
        if t == exact {
            Ok(())
        } else {
            Err(self.err(format!("expected {exact:?}, found {t:?}")))
        }
    }

    fn value<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let t = self.next_content()?;
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| self.err(format!("expected `{key} = ...`, found {t:?}")))?;
        if k.trim() != key {
            return Err(self.err(format!("expected key {key:?}, found {:?}", k.trim())));
        }
        v.trim()
            .parse()
            .map_err(|_| self.err(format!("bad value for {key}: {:?}", v.trim())))
    }

    fn section_count(&mut self, name: &str) -> Result<usize> {
        let t = self.next_content()?;
        t.strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .and_then(|s| s.strip_prefix(name))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| self.err(format!("expected `[{name} <count>]`, found {t:?}")))
    }

    fn fields(&mut self, count: usize) -> Result<Vec<&'a str>> {
        let t = self.next_content()?;
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() == count {
            Ok(f)
        } else {
            Err(self.err(format!("expected {count} fields, found {t:?}")))
        }
    }
}

fn parse_error(lines: &Lines<'_>, s: &str) -> Result<Option<f64>> {
    if s == UNSCORED {
        return Ok(None);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| (0.0..=1.0).contains(v))
        .map(Some)
        .ok_or_else(|| lines.err(format!("bad oob error {s:?}")))
}

fn parse_num<T: std::str::FromStr>(lines: &Lines<'_>, s: &str) -> Result<T> {
    s.parse().map_err(|_| lines.err(format!("bad number {s:?}")))
}

/// Parses a model file and rebuilds the model against `train`, which must be
/// the dataset the model was fitted on.
pub fn from_str(text: &str, train: Dataset) -> Result<OExNRuleModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    lines.expect(&format!("{MAGIC} v{VERSION}"))?;
    lines.expect("[config]")?;
    let config = EnsembleConfig {
        n_models: lines.value("n_models")?,
        select_fraction: lines.value("select_fraction")?,
        k: lines.value("k")?,
        subspace: lines.value("subspace")?,
        distance: DistanceSpec::new(lines.value("distance_exponent")?)?,
        seed: lines.value("seed")?,
        resample: lines.value("resample")?,
    };
    config.validate()?;
    lines.expect("[dataset]")?;
    let digest: String = lines.value("digest")?;
    let n_rows: usize = lines.value("n_rows")?;
    let n_features: usize = lines.value("n_features")?;
    if digest != train.digest() || n_rows != train.n_rows() || n_features != train.n_features() {
        return Err(Error::DigestMismatch {
            expected: digest,
            found: train.digest(),
        });
    }
    let p_prime = config.subspace.resolve(n_features)?;

    let n_selected = lines.section_count("selected")?;
    if n_selected != config.n_selected() {
        return Err(lines.err(format!(
            "{n_selected} selected records, configuration implies {}",
            config.n_selected()
        )));
    }
    let mut selected = Vec::with_capacity(n_selected);
    for _ in 0..n_selected {
        let f = lines.fields(3)?;
        let ordinal: usize = parse_num(&lines, f[0])?;
        let seed: u64 = parse_num(&lines, f[1])?;
        let oob_error = parse_error(&lines, f[2])?;
        let sample = config.draw_sample(n_rows, n_features, p_prime, seed)?;
        selected.push(BaseModel {
            sample,
            oob_error,
            ordinal,
        });
    }
    let n_rejected = lines.section_count("rejected")?;
    if n_selected + n_rejected != config.n_models {
        return Err(lines.err(format!(
            "{} records for {} base models",
            n_selected + n_rejected,
            config.n_models
        )));
    }
    let mut scores: Vec<ModelScore> = selected.iter().map(ModelScore::from).collect();
    for _ in 0..n_rejected {
        let f = lines.fields(2)?;
        scores.push(ModelScore {
            ordinal: parse_num(&lines, f[0])?,
            oob_error: parse_error(&lines, f[1])?,
        });
    }
    if let Ok(extra) = lines.next_content() {
        return Err(lines.err(format!("trailing content {extra:?}")));
    }
    OExNRuleModel::from_parts(train, config, selected, scores)
}
