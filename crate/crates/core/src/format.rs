//! Binary model files.
//!
//! Little-endian layout:
//!
//! ```text
//! "EDRM"            4 bytes magic
//! version           u32
//! method            u8   (1 = mean, 2 = pca)
//! centered          u8   (0 / 1, always 0 for mean)
//! height/width/ch   u32 × 3
//! r                 u32  (0 for mean)
//! mean_pos, mean_neg                                f64 × N each
//! u_pos, u_neg (column-major), proj_pos, proj_neg   pca only
//! crc32             u32 over every preceding byte
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::detector::{
    ClassSubspace, ImageShape, MeanDistanceModel, Method, Model, PcaDetectorModel,
};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};

pub const MAGIC: [u8; 4] = *b"EDRM";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 26;
const CRC_LEN: usize = 4;

const TAG_MEAN: u8 = 1;
const TAG_PCA: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelHeader {
    pub version: u32,
    pub method: Method,
    pub centered: bool,
    pub shape: ImageShape,
    pub r: u32,
}

pub fn encode(model: &Model) -> Vec<u8> {
    let shape = model.shape();
    let (tag, centered, r) = match model {
        Model::Mean(_) => (TAG_MEAN, false, 0u32),
        Model::Pca(m) => (TAG_PCA, m.centered(), m.r() as u32),
    };
    let n = shape.dim();
    let floats = match model {
        Model::Mean(_) => 2 * n,
        Model::Pca(_) => 2 * n + 2 * n * r as usize + 2 * r as usize,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * floats + CRC_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(tag);
    out.push(u8::from(centered));
    for dim in [shape.height, shape.width, shape.channels, r] {
        out.extend_from_slice(&dim.to_le_bytes());
    }

    let mut put = |values: &[f64]| {
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    };
    match model {
        Model::Mean(m) => {
            put(m.mean(crate::Label::Positive).as_slice());
            put(m.mean(crate::Label::Negative).as_slice());
        }
        Model::Pca(m) => {
            let (pos, neg) = (
                m.subspace(crate::Label::Positive),
                m.subspace(crate::Label::Negative),
            );
            put(pos.mean().as_slice());
            put(neg.mean().as_slice());
            put(pos.basis().as_col_major());
            put(neg.basis().as_col_major());
            put(pos.projected_mean().as_slice());
            put(neg.projected_mean().as_slice());
        }
    }

    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Parses and checks the fixed-size header. Does not verify the checksum.
pub fn read_header(bytes: &[u8]) -> Result<ModelHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(format!(
            "truncated header: {} bytes, need {HEADER_LEN}",
            bytes.len()
        )));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::format(format!("bad magic bytes {:?}", &bytes[..4])));
    }
    let word =
        |at: usize| u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]]);
    let version = word(4);
    if version != FORMAT_VERSION {
        return Err(Error::format(format!(
            "unsupported format version {version} (this build reads version {FORMAT_VERSION})"
        )));
    }
    let method = match bytes[8] {
        TAG_MEAN => Method::Mean,
        TAG_PCA => Method::Pca,
        other => return Err(Error::format(format!("unknown method tag {other}"))),
    };
    let centered = match bytes[9] {
        0 => false,
        1 => true,
        other => return Err(Error::format(format!("invalid centered flag {other}"))),
    };
    let shape = ImageShape::new(word(10), word(14), word(18));
    let r = word(22);
    if shape.height == 0 || shape.width == 0 || shape.channels == 0 {
        return Err(Error::format("image dimensions must be nonzero"));
    }
    match method {
        Method::Mean if r != 0 || centered => {
            return Err(Error::format("mean model must have r = 0 and no centering"))
        }
        Method::Pca if r == 0 => return Err(Error::format("pca model must have r >= 1")),
        _ => {}
    }
    Ok(ModelHeader {
        version,
        method,
        centered,
        shape,
        r,
    })
}

/// Stored checksum and the checksum recomputed over the body.
pub fn checksums(bytes: &[u8]) -> Result<(u32, u32)> {
    if bytes.len() < HEADER_LEN + CRC_LEN {
        return Err(Error::format("file too short to carry a checksum"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - CRC_LEN);
    let stored = u32::from_le_bytes([tail[0], tail[1], tail[2], tail[3]]);
    Ok((stored, crc32fast::hash(body)))
}

pub fn decode(bytes: &[u8]) -> Result<Model> {
    let header = read_header(bytes)?;
    let (stored, computed) = checksums(bytes)?;
    if stored != computed {
        return Err(Error::format(format!(
            "checksum mismatch: stored {stored:08x}, computed {computed:08x}"
        )));
    }

    let n = header.shape.dim();
    let r = header.r as usize;
    let floats = match header.method {
        Method::Mean => Some(2 * n),
        Method::Pca => n
            .checked_mul(r)
            .and_then(|nr| nr.checked_mul(2))
            .and_then(|x| x.checked_add(2 * n + 2 * r)),
    };
    let body = &bytes[HEADER_LEN..bytes.len() - CRC_LEN];
    match floats.and_then(|f| f.checked_mul(8)) {
        Some(len) if len == body.len() => {}
        Some(len) => {
            return Err(Error::format(format!(
                "payload is {} bytes, header implies {len}",
                body.len()
            )))
        }
        None => return Err(Error::format("header dimensions overflow")),
    }

    let mut cursor = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]));
    let mut take = |count: usize| -> Vec<f64> { cursor.by_ref().take(count).collect() };
    let vector = |values: Vec<f64>| DenseVector::new(values).map_err(corrupt);

    let model = match header.method {
        Method::Mean => Model::Mean(
            MeanDistanceModel::from_parts(vector(take(n))?, vector(take(n))?, header.shape)
                .map_err(corrupt)?,
        ),
        Method::Pca => {
            let mean_pos = vector(take(n))?;
            let mean_neg = vector(take(n))?;
            let u_pos = DenseMatrix::from_col_major(n, r, take(n * r)).map_err(corrupt)?;
            let u_neg = DenseMatrix::from_col_major(n, r, take(n * r)).map_err(corrupt)?;
            let proj_pos = vector(take(r))?;
            let proj_neg = vector(take(r))?;
            let pos = ClassSubspace::from_parts(mean_pos, u_pos, proj_pos).map_err(corrupt)?;
            let neg = ClassSubspace::from_parts(mean_neg, u_neg, proj_neg).map_err(corrupt)?;
            Model::Pca(
                PcaDetectorModel::from_subspaces(pos, neg, header.centered, header.shape)
                    .map_err(corrupt)?,
            )
        }
    };
    Ok(model)
}

fn corrupt(e: Error) -> Error {
    Error::format(format!("corrupt payload: {e}"))
}
