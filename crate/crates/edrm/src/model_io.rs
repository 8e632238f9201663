use std::fs;
use std::path::Path;

use edrm_core::{format, Model};

use crate::error::{create_parent, Error, Result};

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    create_parent(path)?;
    fs::write(path, format::encode(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(format::decode(&bytes)?)
}
