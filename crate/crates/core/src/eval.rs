//! Corresponding-colour datasets and ΔE94 scoring.
//!
//! A dataset is a CSV file `sample_id,Xs,Ys,Zs,Xd,Yd,Zd` next to a JSON
//! sidecar with the same stem:
//!
//! ```json
//! {"name": "LamRigg", "scale": "0-100", "src_wp": [109.85, 100, 35.58],
//!  "dst_wp": [98.07, 100, 118.23], "source_provenance": "..."}
//! ```
//!
//! Values are divided by 100 for the `0-100` scale. Each side is then divided
//! by its white point's `Y`, so both whites end up at `Y = 1`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cmf::CmfSet;
use crate::colorimetry::Tristimulus;
use crate::error::{Error, Result};
use crate::lab::{delta_e94, xyz_to_lab};
use crate::method::Method;

pub const CSV_HEADER: [&str; 7] = ["sample_id", "Xs", "Ys", "Zs", "Xd", "Yd", "Zd"];

/// Largest tolerated `|Y − 1|` of a white point after the declared scaling.
pub const WHITE_Y_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    #[serde(rename = "0-1")]
    Unit,
    #[serde(rename = "0-100")]
    Percent,
}

impl Scale {
    pub fn factor(self) -> f64 {
        match self {
            Scale::Unit => 1.0,
            Scale::Percent => 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub name: String,
    pub scale: Scale,
    pub src_wp: [f64; 3],
    pub dst_wp: [f64; 3],
    #[serde(default)]
    pub source_provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondingPair {
    pub sample_id: String,
    pub src_xyz: Tristimulus,
    pub dst_xyz: Tristimulus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondingDataset {
    pub name: String,
    /// File stem the pairs came from; several files may share one `name`.
    pub file: String,
    pub src_wp: Tristimulus,
    pub dst_wp: Tristimulus,
    pub pairs: Vec<CorrespondingPair>,
    pub source_provenance: String,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn scaled_white(path: &Path, label: &str, raw: [f64; 3], scale: Scale) -> Result<Tristimulus> {
    let wp = Tristimulus::from_array(raw).scale(scale.factor());
    if !wp.is_finite() || (wp.y - 1.0).abs() > WHITE_Y_TOLERANCE {
        return Err(Error::Scale {
            path: path.to_path_buf(),
            message: format!("{label} Y is {} after {scale:?} scaling, expected about 1", wp.y),
        });
    }
    Ok(wp)
}

/// Loads `path` and its `.json` sidecar.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<CorrespondingDataset> {
    let path = path.as_ref();
    let meta_path = sidecar_path(path);
    let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: DatasetMeta =
        serde_json::from_str(&meta_text).map_err(|e| Error::schema(&meta_path, e.to_string()))?;

    let src_wp = scaled_white(&meta_path, "src_wp", meta.src_wp, meta.scale)?;
    let dst_wp = scaled_white(&meta_path, "dst_wp", meta.dst_wp, meta.scale)?;
    let (ks, kd) = (meta.scale.factor() / src_wp.y, meta.scale.factor() / dst_wp.y);

    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::schema(
            path,
            format!("header is `{}`, expected `{}`", header.iter().collect::<Vec<_>>().join(","), CSV_HEADER.join(",")),
        ));
    }

    let mut pairs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let mut v = [0.0; 6];
        for (k, slot) in v.iter_mut().enumerate() {
            let field = &record[k + 1];
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::schema(path, format!("row {}: `{field}` is not a finite number", row + 1)))?;
        }
        pairs.push(CorrespondingPair {
            sample_id: record[0].to_string(),
            src_xyz: Tristimulus::new(v[0], v[1], v[2]).scale(ks),
            dst_xyz: Tristimulus::new(v[3], v[4], v[5]).scale(kd),
        });
    }
    if pairs.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }

    Ok(CorrespondingDataset {
        name: meta.name,
        file: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        src_wp: src_wp.scale(1.0 / src_wp.y),
        dst_wp: dst_wp.scale(1.0 / dst_wp.y),
        pairs,
        source_provenance: meta.source_provenance,
    })
}

/// Loads every `*.csv` in `dir` in file-name order. Files that fail to load
/// are returned alongside the error instead of aborting the scan.
pub fn load_dataset_dir(dir: impl AsRef<Path>) -> Result<(Vec<CorrespondingDataset>, Vec<(PathBuf, Error)>)> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
        .collect();
    paths.sort();
    let mut loaded = Vec::new();
    let mut errors = Vec::new();
    for path in paths {
        match load_dataset(&path) {
            Ok(ds) => loaded.push(ds),
            Err(e) => errors.push((path, e)),
        }
    }
    Ok((loaded, errors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub sample_id: String,
    pub delta_e94: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub sample_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResult {
    pub name: String,
    pub file: String,
    pub scores: Vec<PairScore>,
    pub failures: Vec<PairFailure>,
}

impl DatasetResult {
    pub fn mean(&self) -> Option<f64> {
        (!self.scores.is_empty()).then(|| self.scores.iter().map(|s| s.delta_e94).sum::<f64>() / self.scores.len() as f64)
    }
}

/// Scores `predict` against the experimental destinations of `ds`. Lab values
/// are referenced to the dataset's destination white, with the experimental
/// colour as the CIE94 reference.
pub fn evaluate<F>(ds: &CorrespondingDataset, mut predict: F) -> DatasetResult
where
    F: FnMut(Tristimulus) -> Result<Tristimulus>,
{
    let mut scores = Vec::with_capacity(ds.pairs.len());
    let mut failures = Vec::new();
    for pair in &ds.pairs {
        let scored = predict(pair.src_xyz).and_then(|pred| {
            let reference = xyz_to_lab(pair.dst_xyz, ds.dst_wp)?;
            let sample = xyz_to_lab(pred, ds.dst_wp)?;
            Ok(delta_e94(&reference, &sample))
        });
        match scored {
            Ok(d) => scores.push(PairScore { sample_id: pair.sample_id.clone(), delta_e94: d }),
            Err(e) => failures.push(PairFailure { sample_id: pair.sample_id.clone(), error: e.to_string() }),
        }
    }
    DatasetResult { name: ds.name.clone(), file: ds.file.clone(), scores, failures }
}

/// [`evaluate`] with `method` prepared for the dataset's white points at full
/// adaptation. A preparation failure marks every pair as failed.
pub fn evaluate_method(method: Method, cmf: &CmfSet, ds: &CorrespondingDataset) -> DatasetResult {
    match method.prepare(cmf, ds.src_wp, ds.dst_wp, 1.0) {
        Ok(cat) => evaluate(ds, |xyz| cat.transform(xyz)),
        Err(e) => DatasetResult {
            name: ds.name.clone(),
            file: ds.file.clone(),
            scores: Vec::new(),
            failures: ds
                .pairs
                .iter()
                .map(|p| PairFailure { sample_id: p.sample_id.clone(), error: e.to_string() })
                .collect(),
        },
    }
}

pub fn is_mccann(name: &str) -> bool {
    name.eq_ignore_ascii_case("mccann")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub mean: Option<f64>,
    pub count: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Keyed by dataset name; files sharing a name are pooled.
    pub per_dataset: BTreeMap<String, DatasetSummary>,
    /// Mean over every scored pair of every dataset.
    pub weighted_mean_all: Option<f64>,
    pub weighted_mean_no_mccann: Option<f64>,
    /// `file/sample_id` and its ΔE94.
    pub per_pair: Vec<PairScore>,
    pub failures: Vec<PairFailure>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn summarize(results: &[DatasetResult]) -> EvalReport {
    let mut pooled: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    let mut per_pair = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        let entry = pooled.entry(r.name.clone()).or_default();
        entry.0.extend(r.scores.iter().map(|s| s.delta_e94));
        entry.1 += r.failures.len();
        per_pair.extend(
            r.scores.iter().map(|s| PairScore { sample_id: format!("{}/{}", r.file, s.sample_id), delta_e94: s.delta_e94 }),
        );
        failures.extend(
            r.failures.iter().map(|f| PairFailure { sample_id: format!("{}/{}", r.file, f.sample_id), error: f.error.clone() }),
        );
    }
    let all = || results.iter().flat_map(|r| r.scores.iter().map(move |s| (r, s.delta_e94)));
    EvalReport {
        per_dataset: pooled
            .into_iter()
            .map(|(name, (scores, failed))| {
                (name, DatasetSummary { mean: mean(scores.iter().copied()), count: scores.len(), failed })
            })
            .collect(),
        weighted_mean_all: mean(all().map(|(_, d)| d)),
        weighted_mean_no_mccann: mean(all().filter(|(r, _)| !is_mccann(&r.name)).map(|(_, d)| d)),
        per_pair,
        failures,
    }
}
