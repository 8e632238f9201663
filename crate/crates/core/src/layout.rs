//! Flat pixel layout and 8-bit rendering of real-valued images.
//!
//! Pixel `(y, x, c)` of an `H × W × C` image lives at `(y·W + x)·C + c`.

use alloc::vec::Vec;

use crate::detector::ImageShape;

pub fn flat_index(shape: ImageShape, y: u32, x: u32, c: u32) -> usize {
    debug_assert!(y < shape.height && x < shape.width && c < shape.channels);
    (y as usize * shape.width as usize + x as usize) * shape.channels as usize + c as usize
}

/// Inverse of [`flat_index`].
pub fn pixel_of(shape: ImageShape, index: usize) -> (u32, u32, u32) {
    let c = index % shape.channels as usize;
    let pixel = index / shape.channels as usize;
    (
        (pixel / shape.width as usize) as u32,
        (pixel % shape.width as usize) as u32,
        c as u32,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// Maps the minimum to 0 and the maximum to 255; constant input maps to 0.
    MinMax,
    /// Treats values as unit-interval intensities, clamping outside `[0, 1]`.
    Absolute,
}

pub fn to_u8(values: &[f64], scaling: Scaling) -> Vec<u8> {
    match scaling {
        Scaling::MinMax => {
            let (lo, hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            if hi.partial_cmp(&lo) != Some(core::cmp::Ordering::Greater) {
                return alloc::vec![0; values.len()];
            }
            let span = hi - lo;
            values
                .iter()
                .map(|&v| libm::round((v - lo) / span * 255.0) as u8)
                .collect()
        }
        Scaling::Absolute => values
            .iter()
            .map(|&v| libm::round(v.clamp(0.0, 1.0) * 255.0) as u8)
            .collect(),
    }
}

/// `|x - y|` entrywise.
pub fn abs_difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).collect()
}
