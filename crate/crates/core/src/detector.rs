//! The nearest-class-mean detector and the per-class subspace detector.
//!
//! Both are binary: `Positive` is the condition class, `Negative` the normal
//! class. Ties always resolve to `Negative`.

use alloc::borrow::Cow;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{
    self, mean_vector, project, squared_distance, thin_svd_snapshot_with, DenseMatrix, DenseVector,
    Kernels, Sequential,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Positive, Label::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            other => Err(Error::invalid(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mean,
    Pca,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mean => "mean",
            Method::Pca => "pca",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Method::Mean),
            "pca" => Ok(Method::Pca),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Height, width and channel count of the images a model was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImageShape {
    pub height: u32,
    pub width: u32,
    pub channels: u32,
}

impl ImageShape {
    pub const fn new(height: u32, width: u32, channels: u32) -> Self {
        Self {
            height,
            width,
            channels,
        }
    }

    pub fn dim(&self) -> usize {
        self.height as usize * self.width as usize * self.channels as usize
    }
}

impl Default for ImageShape {
    fn default() -> Self {
        Self::new(512, 512, 3)
    }
}

/// Result of classifying one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionTrace {
    pub label: Label,
    pub d_pos: f64,
    pub d_neg: f64,
    /// `d_neg - d_pos`; positive margins favour the positive class.
    pub margin: f64,
    pub method: Method,
}

impl DecisionTrace {
    fn new(d_pos: f64, d_neg: f64, method: Method) -> Self {
        let label = if d_pos < d_neg {
            Label::Positive
        } else {
            Label::Negative
        };
        Self {
            label,
            d_pos,
            d_neg,
            margin: d_neg - d_pos,
            method,
        }
    }
}

fn check_training_pair(x_pos: &DenseMatrix, x_neg: &DenseMatrix, shape: ImageShape) -> Result<()> {
    for x in [x_pos, x_neg] {
        if x.rows() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                found: x.rows(),
            });
        }
    }
    Ok(())
}

fn check_dim(expected: usize, x: &DenseVector) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.dim(),
        });
    }
    Ok(())
}

/// Pixel-space nearest-class-mean detector.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDistanceModel {
    mean_pos: DenseVector,
    mean_neg: DenseVector,
    shape: ImageShape,
}

impl MeanDistanceModel {
    pub fn train(x_pos: &DenseMatrix, x_neg: &DenseMatrix, shape: ImageShape) -> Result<Self> {
        check_training_pair(x_pos, x_neg, shape)?;
        Self::from_parts(mean_vector(x_pos)?, mean_vector(x_neg)?, shape)
    }

    pub fn from_parts(
        mean_pos: DenseVector,
        mean_neg: DenseVector,
        shape: ImageShape,
    ) -> Result<Self> {
        check_dim(shape.dim(), &mean_pos)?;
        check_dim(shape.dim(), &mean_neg)?;
        Ok(Self {
            mean_pos,
            mean_neg,
            shape,
        })
    }

    /// Euclidean distance to each class mean; positive iff strictly closer to
    /// the positive mean.
    pub fn classify(&self, x: &DenseVector) -> Result<DecisionTrace> {
        check_dim(self.shape.dim(), x)?;
        let d_pos = linalg::euclidean_distance(x, &self.mean_pos)?;
        let d_neg = linalg::euclidean_distance(x, &self.mean_neg)?;
        Ok(DecisionTrace::new(d_pos, d_neg, Method::Mean))
    }

    pub fn mean(&self, class: Label) -> &DenseVector {
        match class {
            Label::Positive => &self.mean_pos,
            Label::Negative => &self.mean_neg,
        }
    }

    pub fn shape(&self) -> ImageShape {
        self.shape
    }
}

/// One class's half of the subspace detector: raw mean, leading left singular
/// vectors, and the mean's coordinates in that basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSubspace {
    mean: DenseVector,
    basis: DenseMatrix,
    projected_mean: DenseVector,
}

impl ClassSubspace {
    /// Fits the first `r` components of one class matrix (one image per column).
    ///
    /// Uncentered, the SVD runs on the raw columns; centered, on the columns minus
    /// the class mean. Either way the projected mean is `basisᵀ · mean` of the
    /// raw class mean.
    pub fn fit<K: Kernels + ?Sized>(
        kernels: &K,
        x: &DenseMatrix,
        r: usize,
        centered: bool,
        class: Label,
    ) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("number of components must be at least 1"));
        }
        let mean = mean_vector(x)?;
        let data = if centered {
            let mut values = x.as_col_major().to_vec();
            for col in values.chunks_exact_mut(x.rows()) {
                for (v, m) in col.iter_mut().zip(mean.as_slice()) {
                    *v -= m;
                }
            }
            Cow::Owned(DenseMatrix::from_col_major_unchecked(
                x.rows(),
                x.cols(),
                values,
            ))
        } else {
            Cow::Borrowed(x)
        };
        if data.is_zero() {
            return Err(Error::Rank {
                class,
                rank: 0,
                requested: r,
            });
        }
        let svd = thin_svd_snapshot_with(kernels, &data)?;
        if r > svd.rank() {
            return Err(Error::Rank {
                class,
                rank: svd.rank(),
                requested: r,
            });
        }
        let basis = svd.u.leading_columns(r)?;
        let projected_mean = project(&basis, &mean)?;
        Ok(Self {
            mean,
            basis,
            projected_mean,
        })
    }

    /// Reassembles a subspace from stored parts, checking dimensions only.
    pub fn from_parts(
        mean: DenseVector,
        basis: DenseMatrix,
        projected_mean: DenseVector,
    ) -> Result<Self> {
        check_dim(basis.rows(), &mean)?;
        check_dim(basis.cols(), &projected_mean)?;
        Ok(Self {
            mean,
            basis,
            projected_mean,
        })
    }

    pub fn mean(&self) -> &DenseVector {
        &self.mean
    }

    /// `N × r`, orthonormal columns.
    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn projected_mean(&self) -> &DenseVector {
        &self.projected_mean
    }

    pub fn components(&self) -> usize {
        self.basis.cols()
    }

    /// Squared distance between `basisᵀx` and the projected mean.
    pub fn squared_distance(&self, x: &DenseVector) -> Result<f64> {
        let coeffs = project(&self.basis, x)?;
        squared_distance(coeffs.as_slice(), self.projected_mean.as_slice())
    }
}

/// Per-class subspace detector: each class keeps its own basis and the sample
/// is compared with each class mean inside that class's subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaDetectorModel {
    pos: ClassSubspace,
    neg: ClassSubspace,
    centered: bool,
    shape: ImageShape,
}

impl PcaDetectorModel {
    pub fn train(
        x_pos: &DenseMatrix,
        x_neg: &DenseMatrix,
        r: usize,
        centered: bool,
        shape: ImageShape,
    ) -> Result<Self> {
        Self::train_with(&Sequential, x_pos, x_neg, r, centered, shape)
    }

    pub fn train_with<K: Kernels + ?Sized>(
        kernels: &K,
        x_pos: &DenseMatrix,
        x_neg: &DenseMatrix,
        r: usize,
        centered: bool,
        shape: ImageShape,
    ) -> Result<Self> {
        check_training_pair(x_pos, x_neg, shape)?;
        let pos = ClassSubspace::fit(kernels, x_pos, r, centered, Label::Positive)?;
        let neg = ClassSubspace::fit(kernels, x_neg, r, centered, Label::Negative)?;
        Self::from_subspaces(pos, neg, centered, shape)
    }

    pub fn from_subspaces(
        pos: ClassSubspace,
        neg: ClassSubspace,
        centered: bool,
        shape: ImageShape,
    ) -> Result<Self> {
        check_dim(shape.dim(), pos.mean())?;
        check_dim(shape.dim(), neg.mean())?;
        if pos.components() != neg.components() {
            return Err(Error::invalid(format!(
                "class subspaces disagree on r: {} vs {}",
                pos.components(),
                neg.components()
            )));
        }
        Ok(Self {
            pos,
            neg,
            centered,
            shape,
        })
    }

    /// Projects `x` onto each class basis and compares the distances to the
    /// projected class means. Positive iff strictly closer to the positive one.
    pub fn classify(&self, x: &DenseVector) -> Result<DecisionTrace> {
        check_dim(self.shape.dim(), x)?;
        let d_pos = libm::sqrt(self.pos.squared_distance(x)?);
        let d_neg = libm::sqrt(self.neg.squared_distance(x)?);
        Ok(DecisionTrace::new(d_pos, d_neg, Method::Pca))
    }

    pub fn subspace(&self, class: Label) -> &ClassSubspace {
        match class {
            Label::Positive => &self.pos,
            Label::Negative => &self.neg,
        }
    }

    pub fn r(&self) -> usize {
        self.pos.components()
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn shape(&self) -> ImageShape {
        self.shape
    }
}

/// Any trained detector.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Mean(MeanDistanceModel),
    Pca(PcaDetectorModel),
}

impl Model {
    pub fn method(&self) -> Method {
        match self {
            Model::Mean(_) => Method::Mean,
            Model::Pca(_) => Method::Pca,
        }
    }

    pub fn shape(&self) -> ImageShape {
        match self {
            Model::Mean(m) => m.shape(),
            Model::Pca(m) => m.shape(),
        }
    }

    pub fn classify(&self, x: &DenseVector) -> Result<DecisionTrace> {
        match self {
            Model::Mean(m) => m.classify(x),
            Model::Pca(m) => m.classify(x),
        }
    }

    /// Raw pixel-space class mean.
    pub fn mean(&self, class: Label) -> &DenseVector {
        match self {
            Model::Mean(m) => m.mean(class),
            Model::Pca(m) => m.subspace(class).mean(),
        }
    }

    /// Classifies a batch, keeping input order.
    pub fn classify_all<'a, I>(&self, xs: I) -> Result<Vec<DecisionTrace>>
    where
        I: IntoIterator<Item = &'a DenseVector>,
    {
        xs.into_iter().map(|x| self.classify(x)).collect()
    }
}

impl From<MeanDistanceModel> for Model {
    fn from(m: MeanDistanceModel) -> Self {
        Model::Mean(m)
    }
}

impl From<PcaDetectorModel> for Model {
    fn from(m: PcaDetectorModel) -> Self {
        Model::Pca(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const TINY: ImageShape = ImageShape::new(1, 2, 2);

    fn v(values: &[f64]) -> DenseVector {
        DenseVector::from_slice(values).unwrap()
    }

    fn cols(columns: &[[f64; 4]]) -> DenseMatrix {
        DenseMatrix::from_columns(columns).unwrap()
    }

    #[test]
    fn mean_model_single_image_per_class() {
        let m = MeanDistanceModel::train(&cols(&[[1.0, 2.0, 3.0, 4.0]]), &cols(&[[0.0; 4]]), TINY)
            .unwrap();
        assert_eq!(m.mean(Label::Positive).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean(Label::Negative).as_slice(), &[0.0; 4]);
    }

    #[test]
    fn mean_model_symmetric_class_has_zero_mean() {
        let m = MeanDistanceModel::train(
            &cols(&[[1.0, -2.0, 0.5, 3.0], [-1.0, 2.0, -0.5, -3.0]]),
            &cols(&[[1.0; 4]]),
            TINY,
        )
        .unwrap();
        assert_eq!(m.mean(Label::Positive).as_slice(), &[0.0; 4]);
    }

    #[test]
    fn mean_model_decisions_and_tie() {
        let m = MeanDistanceModel::train(&cols(&[[1.0; 4]]), &cols(&[[-1.0; 4]]), TINY).unwrap();
        let t = m.classify(&v(&[1.0; 4])).unwrap();
        assert_eq!((t.label, t.d_pos), (Label::Positive, 0.0));
        let t = m.classify(&v(&[-1.0; 4])).unwrap();
        assert_eq!((t.label, t.d_neg), (Label::Negative, 0.0));
        let t = m.classify(&v(&[0.0; 4])).unwrap();
        assert_eq!(t.d_pos, t.d_neg);
        assert_eq!(t.label, Label::Negative);
        assert_eq!(t.margin, 0.0);
        assert!(matches!(
            m.classify(&v(&[0.0; 3])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mean_model_rejects_row_mismatch() {
        let small = DenseMatrix::from_columns(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(
            MeanDistanceModel::train(&small, &cols(&[[0.0; 4]]), TINY),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_one_class_rejects_two_components() {
        let img = [0.2, 0.8, 0.4, 0.6];
        let x_pos = cols(&[img, img, img]);
        let x_neg = cols(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let model = PcaDetectorModel::train(&x_pos, &x_neg, 1, false, TINY).unwrap();
        let sub = model.subspace(Label::Positive);
        let norm = v(&img).norm();
        for (u, x) in sub.basis().column(0).iter().zip(img) {
            assert!((u - x / norm).abs() < 1e-12);
        }
        assert!((sub.projected_mean().as_slice()[0] - norm).abs() < 1e-12);

        let err = PcaDetectorModel::train(&x_pos, &x_neg, 2, false, TINY).unwrap_err();
        assert_eq!(
            err,
            Error::Rank {
                class: Label::Positive,
                rank: 1,
                requested: 2
            }
        );
    }

    #[test]
    fn centered_single_sample_has_rank_zero() {
        let x = cols(&[[0.2, 0.8, 0.4, 0.6]]);
        let err = ClassSubspace::fit(&Sequential, &x, 1, true, Label::Negative).unwrap_err();
        assert!(matches!(err, Error::Rank { rank: 0, .. }));
    }

    #[test]
    fn pca_classifies_class_means_and_ties() {
        let x_pos = cols(&[[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]);
        let x_neg = cols(&[[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        let model = PcaDetectorModel::train(&x_pos, &x_neg, 2, false, TINY).unwrap();
        let t = model.classify(&v(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        assert_eq!(t.d_pos, 0.0);
        assert_eq!(t.label, Label::Positive);
        let t = model.classify(&v(&[0.0, 0.0, 0.5, 0.5])).unwrap();
        assert_eq!(t.d_neg, 0.0);
        assert_eq!(t.label, Label::Negative);
        // symmetric point: equal distances fall to the negative branch
        let t = model.classify(&v(&[0.5, 0.5, 0.5, 0.5])).unwrap();
        assert_eq!(t.d_pos, t.d_neg);
        assert_eq!(t.label, Label::Negative);
    }

    #[test]
    fn zero_components_is_invalid() {
        let x = cols(&[[1.0, 0.0, 0.0, 0.0]]);
        assert!(matches!(
            PcaDetectorModel::train(&x, &x, 0, false, TINY),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn model_enum_dispatch() {
        let mean = MeanDistanceModel::from_parts(v(&[1.0; 4]), v(&[0.0; 4]), TINY).unwrap();
        let model = Model::from(mean);
        assert_eq!(model.method(), Method::Mean);
        let traces = model.classify_all(&[v(&[1.0; 4]), v(&[0.0; 4])]).unwrap();
        assert_eq!(
            traces.iter().map(|t| t.label).collect::<Vec<_>>(),
            vec![Label::Positive, Label::Negative]
        );
        assert_eq!("positive".parse::<Label>().unwrap(), Label::Positive);
        assert!("maybe".parse::<Label>().is_err());
    }
}
