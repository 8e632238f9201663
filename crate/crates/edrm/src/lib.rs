//! File formats, image ingestion, reports, explanation exports and the `edrm`
//! command line for the detectors in [`edrm_core`].

pub mod cli;
pub mod dataset;
pub mod error;
pub mod explain;
pub mod model_io;
pub mod parallel;
pub mod report;

pub use error::{Error, Result};
