//! Explainable statistical detectors for fixed-size RGB images.
//!
//! Two binary classifiers live here:
//!
//! * a pixel-space nearest-class-mean detector ([`detector::MeanDistanceModel`]), and
//! * a per-class subspace detector ([`detector::PcaDetectorModel`]) that gives each
//!   class its own principal-component basis and compares a sample against each
//!   class mean inside that class's subspace.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches the file
//! system, image codecs or threads lives in the companion `edrm` crate. Heavy
//! kernels are routed through [`linalg::Kernels`] so a caller can parallelise
//! them without changing a single bit of the output.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod detector;
pub mod error;
pub mod format;
pub mod layout;
pub mod linalg;
pub mod metrics;

pub use detector::{
    ClassSubspace, DecisionTrace, ImageShape, Label, MeanDistanceModel, Method, Model,
    PcaDetectorModel,
};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use metrics::{ConfusionMatrix, MetricFlags, MetricsReport};
