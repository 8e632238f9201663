//! Image ingestion: directory scans, split manifests, decoding and data-matrix
//! assembly.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use edrm_core::{DenseMatrix, DenseVector, ImageShape, Label};
use image::imageops::FilterType;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{create_parent, Error, Result};

pub const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];
const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::Usage(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub path: PathBuf,
    pub label: Label,
    pub split: Split,
}

/// Ordered sample listing with split assignments.
///
/// Paths are held absolute in memory and written relative to the manifest's
/// directory on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub records: Vec<SampleRecord>,
    pub created_at: DateTime<Utc>,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    edrm_manifest: u32,
    seed: u64,
    created_at: DateTime<Utc>,
    config_hash: String,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    path: String,
    label: String,
    split: Split,
}

impl Manifest {
    pub fn new(records: Vec<SampleRecord>, seed: u64) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(&r.path) {
                return Err(Error::Usage(format!(
                    "duplicate path in manifest: {}",
                    r.path.display()
                )));
            }
        }
        let mut manifest = Self {
            records,
            created_at: Utc::now(),
            seed,
            config_hash: String::new(),
        };
        manifest.config_hash = manifest.compute_config_hash();
        Ok(manifest)
    }

    /// Appends another manifest's records, keeping this manifest's seed.
    pub fn merge(self, other: Manifest) -> Result<Self> {
        let mut records = self.records;
        records.extend(other.records);
        Self::new(records, self.seed)
    }

    pub fn count(&self, label: Label, split: Split) -> usize {
        self.records
            .iter()
            .filter(|r| r.label == label && r.split == split)
            .count()
    }

    pub fn select(
        &self,
        split: Split,
        label: Option<Label>,
    ) -> impl Iterator<Item = &SampleRecord> {
        self.records
            .iter()
            .filter(move |r| r.split == split && label.is_none_or(|l| r.label == l))
    }

    /// Hash of the seed and the per-(label, split) counts.
    pub fn compute_config_hash(&self) -> String {
        let mut counts: BTreeMap<(Label, Split), usize> = BTreeMap::new();
        for r in &self.records {
            *counts.entry((r.label, r.split)).or_default() += 1;
        }
        let mut hasher = Sha256::new();
        hasher.update(format!("seed={};", self.seed));
        for ((label, split), n) in counts {
            hasher.update(format!("{label}/{split}={n};"));
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        create_parent(path)?;
        let base = manifest_dir(path)?;
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let header = HeaderLine {
            edrm_manifest: MANIFEST_VERSION,
            seed: self.seed,
            created_at: self.created_at,
            config_hash: self.config_hash.clone(),
        };
        let mut lines = vec![serde_json::to_string(&header).expect("header serializes")];
        for r in &self.records {
            let absolute = absolute(&r.path)?;
            let rel = pathdiff::diff_paths(&absolute, &base).unwrap_or(absolute);
            let rel = rel.to_str().ok_or_else(|| {
                Error::Usage(format!("path is not valid UTF-8: {}", r.path.display()))
            })?;
            lines.push(
                serde_json::to_string(&RecordLine {
                    path: rel.replace('\\', "/"),
                    label: r.label.to_string(),
                    split: r.split,
                })
                .expect("record serializes"),
            );
        }
        for line in lines {
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let base = manifest_dir(path)?;
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let bad = |line: usize, message: String| Error::Manifest {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = BufReader::new(file).lines();
        let header: HeaderLine = match lines.next() {
            Some(line) => {
                let line = line.map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&line).map_err(|e| bad(1, e.to_string()))?
            }
            None => return Err(bad(1, "empty manifest".into())),
        };
        if header.edrm_manifest != MANIFEST_VERSION {
            return Err(bad(
                1,
                format!("unsupported manifest version {}", header.edrm_manifest),
            ));
        }
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: RecordLine =
                serde_json::from_str(&line).map_err(|e| bad(i + 2, e.to_string()))?;
            let label = rec
                .label
                .parse()
                .map_err(|e: edrm_core::Error| bad(i + 2, e.to_string()))?;
            records.push(SampleRecord {
                path: normalize(&base.join(&rec.path)),
                label,
                split: rec.split,
            });
        }
        let mut manifest = Manifest::new(records, header.seed)?;
        manifest.created_at = header.created_at;
        manifest.config_hash = header.config_hash;
        Ok(manifest)
    }
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| Error::io(path, e))
}

fn manifest_dir(manifest_path: &Path) -> Result<PathBuf> {
    let dir = manifest_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    Ok(normalize(&absolute(dir)?))
}

/// Lexically resolves `.` and `..` components.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push(c);
                }
            }
            other => out.push(other),
        }
    }
    out
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

/// Every PNG/JPEG file under `root`, recursively, sorted by path.
pub fn scan_directory(root: &Path, label: Label, split: Split) -> Result<Vec<SampleRecord>> {
    let root = absolute(root)?;
    let meta = fs::metadata(&root).map_err(|e| Error::io(&root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            &root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    let mut paths = Vec::new();
    for entry in walkdir::WalkDir::new(&root) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(&root).to_path_buf();
            Error::io(&path, e.into())
        })?;
        if entry.file_type().is_file() && has_image_extension(entry.path()) {
            paths.push(normalize(entry.path()));
        }
    }
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|path| SampleRecord { path, label, split })
        .collect())
}

/// Seeded shuffle, then the first `train_count` records go to train and the
/// next `val_count` to validation. Remaining records are dropped.
pub fn build_split_manifest(
    mut records: Vec<SampleRecord>,
    train_count: usize,
    val_count: usize,
    seed: u64,
) -> Result<Manifest> {
    if train_count + val_count > records.len() {
        return Err(Error::Usage(format!(
            "requested {train_count} train + {val_count} validation samples but only {} available",
            records.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records.shuffle(&mut rng);
    records.truncate(train_count + val_count);
    for (i, r) in records.iter_mut().enumerate() {
        r.split = if i < train_count {
            Split::Train
        } else {
            Split::Validation
        };
    }
    Manifest::new(records, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResizePolicy {
    #[default]
    Reject,
    Bilinear,
}

impl FromStr for ResizePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject" => Ok(Self::Reject),
            "bilinear" => Ok(Self::Bilinear),
            other => Err(Error::Usage(format!("unknown resize policy {other:?}"))),
        }
    }
}

/// How raw images become vectors: fixed `H × W × 3`, 8-bit values scaled into
/// `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PixelConfig {
    pub shape: ImageShape,
    pub resize: ResizePolicy,
}

impl PixelConfig {
    pub fn new(height: u32, width: u32, resize: ResizePolicy) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Usage(
                "image height and width must be positive".into(),
            ));
        }
        Ok(Self {
            shape: ImageShape::new(height, width, 3),
            resize,
        })
    }

    pub fn for_shape(shape: ImageShape, resize: ResizePolicy) -> Result<Self> {
        if shape.channels != 3 {
            return Err(Error::Usage(format!(
                "only 3-channel images are supported, got {}",
                shape.channels
            )));
        }
        Self::new(shape.height, shape.width, resize)
    }
}

/// Decodes an image to RGB and flattens it as `(y·W + x)·3 + c`, dividing each
/// byte by 255.
pub fn decode_and_flatten(path: &Path, cfg: &PixelConfig) -> Result<DenseVector> {
    let reader = image::ImageReader::open(path)
        .and_then(|r| r.with_guessed_format())
        .map_err(|e| Error::io(path, e))?;
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    let mut rgb = img.to_rgb8();
    let (h, w) = (cfg.shape.height, cfg.shape.width);
    if rgb.dimensions() != (w, h) {
        match cfg.resize {
            ResizePolicy::Reject => {
                return Err(Error::Shape {
                    path: path.to_path_buf(),
                    width: w,
                    height: h,
                    found_width: rgb.width(),
                    found_height: rgb.height(),
                })
            }
            ResizePolicy::Bilinear => {
                rgb = image::imageops::resize(&rgb, w, h, FilterType::Triangle)
            }
        }
    }
    let values = rgb
        .into_raw()
        .into_iter()
        .map(|b| f64::from(b) / 255.0)
        .collect();
    Ok(DenseVector::new(values)?)
}

/// Decodes every path in order, in parallel. Failures are collected rather
/// than stopping at the first one.
pub fn decode_all(paths: &[&Path], cfg: &PixelConfig) -> Result<Vec<DenseVector>> {
    let results: Vec<Result<DenseVector>> = paths
        .par_iter()
        .map(|p| decode_and_flatten(p, cfg))
        .collect();
    let mut vectors = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok(v) => vectors.push(v),
            Err(e) => failures.push((path.to_path_buf(), e.to_string())),
        }
    }
    if failures.is_empty() {
        Ok(vectors)
    } else {
        Err(Error::Ingest { failures })
    }
}

/// One image per column, with per-column labels and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub matrix: DenseMatrix,
    pub labels: Vec<Label>,
    pub paths: Vec<PathBuf>,
}

impl LabeledMatrix {
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a SampleRecord>,
        cfg: &PixelConfig,
    ) -> Result<Self> {
        let records: Vec<&SampleRecord> = records.into_iter().collect();
        if records.is_empty() {
            return Err(edrm_core::Error::InvalidInput("no samples selected".into()).into());
        }
        let paths: Vec<&Path> = records.iter().map(|r| r.path.as_path()).collect();
        let columns = decode_all(&paths, cfg)?;
        Ok(Self {
            matrix: DenseMatrix::from_columns(&columns)?,
            labels: records.iter().map(|r| r.label).collect(),
            paths: records.iter().map(|r| r.path.clone()).collect(),
        })
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

/// Columns for one (split, label) slice of the manifest, in manifest order.
pub fn build_labeled_matrix(
    manifest: &Manifest,
    split: Split,
    label: Label,
    cfg: &PixelConfig,
) -> Result<LabeledMatrix> {
    let selected: Vec<&SampleRecord> = manifest.select(split, Some(label)).collect();
    if selected.is_empty() {
        return Err(edrm_core::Error::InvalidInput(format!(
            "manifest has no {label} samples in the {split} split"
        ))
        .into());
    }
    LabeledMatrix::from_records(selected, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_resolves_parent_components() {
        assert_eq!(
            normalize(Path::new("/a/b/../c/./d")),
            PathBuf::from("/a/c/d")
        );
        assert_eq!(normalize(Path::new("a/../../b")), PathBuf::from("../b"));
    }

    #[test]
    fn extension_filter() {
        assert!(has_image_extension(Path::new("x/y.PNG")));
        assert!(has_image_extension(Path::new("y.jpeg")));
        assert!(!has_image_extension(Path::new("notes.txt")));
        assert!(!has_image_extension(Path::new("png")));
    }

    #[test]
    fn split_parsing() {
        assert_eq!("val".parse::<Split>().unwrap(), Split::Validation);
        assert!("dev".parse::<Split>().is_err());
        assert!("nearest".parse::<ResizePolicy>().is_err());
    }

    #[test]
    fn pixel_config_requires_three_channels() {
        assert!(PixelConfig::for_shape(ImageShape::new(4, 4, 1), ResizePolicy::Reject).is_err());
        assert_eq!(PixelConfig::default().shape, ImageShape::new(512, 512, 3));
    }
}
