//! Image exports that make a decision inspectable: class means, eigenimages
//! and per-pixel difference heatmaps.

use std::fs;
use std::path::{Path, PathBuf};

use edrm_core::layout::{abs_difference, to_u8, Scaling};
use edrm_core::{DecisionTrace, DenseVector, ImageShape, Label, Model};
use image::{ImageFormat, RgbImage};

use crate::error::{create_parent, Error, Result};
use crate::report::{TraceDocument, TraceRecord};

/// Turns a flat `H·W·3` vector back into an RGB image.
pub fn unflatten(values: &[f64], shape: ImageShape, scaling: Scaling) -> Result<RgbImage> {
    if shape.channels != 3 || values.len() != shape.dim() {
        return Err(edrm_core::Error::InvalidInput(format!(
            "cannot render {} values as a {}x{}x{} RGB image",
            values.len(),
            shape.height,
            shape.width,
            shape.channels
        ))
        .into());
    }
    Ok(
        RgbImage::from_raw(shape.width, shape.height, to_u8(values, scaling))
            .expect("buffer length checked above"),
    )
}

pub fn write_png(img: &RgbImage, path: &Path) -> Result<()> {
    create_parent(path)?;
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::io(path, std::io::Error::other(other)),
        })
}

pub fn export_mean_image(model: &Model, class: Label, path: &Path) -> Result<()> {
    let img = unflatten(model.mean(class).as_slice(), model.shape(), Scaling::MinMax)?;
    write_png(&img, path)
}

/// Renders column `index` of a class's principal-component basis.
pub fn export_eigenimage(model: &Model, class: Label, index: usize, path: &Path) -> Result<()> {
    let Model::Pca(pca) = model else {
        return Err(edrm_core::Error::InvalidInput("eigenimages need a pca model".into()).into());
    };
    let basis = pca.subspace(class).basis();
    if index >= basis.cols() {
        return Err(edrm_core::Error::InvalidInput(format!(
            "eigenimage index {index} out of range for r = {}",
            basis.cols()
        ))
        .into());
    }
    let img = unflatten(basis.column(index), model.shape(), Scaling::MinMax)?;
    write_png(&img, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub trace: DecisionTrace,
    pub heatmap_positive: PathBuf,
    pub heatmap_negative: PathBuf,
    pub trace_path: PathBuf,
}

/// Classifies `x` and writes `|x − mean|` heatmaps for both classes plus the
/// trace as JSON into `out_dir`.
pub fn explain_decision(model: &Model, x: &DenseVector, out_dir: &Path) -> Result<Explanation> {
    let trace = model.classify(x)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let heatmap = |class: Label| -> Result<PathBuf> {
        let diff = abs_difference(x.as_slice(), model.mean(class).as_slice());
        let path = out_dir.join(format!("heatmap_{class}.png"));
        write_png(&unflatten(&diff, model.shape(), Scaling::MinMax)?, &path)?;
        Ok(path)
    };
    let heatmap_positive = heatmap(Label::Positive)?;
    let heatmap_negative = heatmap(Label::Negative)?;

    let trace_path = out_dir.join("trace.json");
    let doc = TraceDocument {
        trace: TraceRecord::from(&trace),
    };
    let text = serde_json::to_string_pretty(&doc).expect("trace serializes");
    fs::write(&trace_path, text + "\n").map_err(|e| Error::io(&trace_path, e))?;

    Ok(Explanation {
        trace,
        heatmap_positive,
        heatmap_negative,
        trace_path,
    })
}
