//! Binary confusion matrices and the four summary metrics.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::detector::Label;
use crate::error::{Error, Result};

/// Counts with the positive (condition) class as the reference class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub false_neg: u64,
    pub false_pos: u64,
    pub true_neg: u64,
}

impl ConfusionMatrix {
    pub const fn new(true_pos: u64, false_neg: u64, false_pos: u64, true_neg: u64) -> Self {
        Self {
            true_pos,
            false_neg,
            false_pos,
            true_neg,
        }
    }

    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::invalid(format!(
                "{} truth labels but {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::invalid("no predictions to tabulate"));
        }
        let mut cm = Self::default();
        for (t, p) in truth.iter().zip(predicted) {
            cm.record(*t, *p);
        }
        Ok(cm)
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Positive, Label::Positive) => self.true_pos += 1,
            (Label::Positive, Label::Negative) => self.false_neg += 1,
            (Label::Negative, Label::Positive) => self.false_pos += 1,
            (Label::Negative, Label::Negative) => self.true_neg += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }

    pub fn metrics(&self) -> Result<MetricsReport> {
        MetricsReport::from_confusion(self)
    }
}

/// Set when a metric's denominator is zero; the metric itself is then reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MetricFlags {
    pub undefined_precision: bool,
    pub undefined_recall: bool,
    pub undefined_f1: bool,
}

impl MetricFlags {
    pub fn names(&self) -> Vec<&'static str> {
        [
            (self.undefined_precision, "undefined_precision"),
            (self.undefined_recall, "undefined_recall"),
            (self.undefined_f1, "undefined_f1"),
        ]
        .into_iter()
        .filter_map(|(set, name)| set.then_some(name))
        .collect()
    }

    pub fn is_empty(&self) -> bool {
        !(self.undefined_precision || self.undefined_recall || self.undefined_f1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub flags: MetricFlags,
}

impl MetricsReport {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Result<Self> {
        let total = cm.total();
        if total == 0 {
            return Err(Error::invalid("confusion matrix is empty"));
        }
        let mut flags = MetricFlags::default();
        let ratio = |num: u64, den: u64, flag: &mut bool| {
            if den == 0 {
                *flag = true;
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let accuracy = (cm.true_pos + cm.true_neg) as f64 / total as f64;
        let precision = ratio(
            cm.true_pos,
            cm.true_pos + cm.false_pos,
            &mut flags.undefined_precision,
        );
        let recall = ratio(
            cm.true_pos,
            cm.true_pos + cm.false_neg,
            &mut flags.undefined_recall,
        );
        let f1 = if precision + recall == 0.0 {
            flags.undefined_f1 = true;
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Ok(Self {
            accuracy,
            precision,
            recall,
            f1,
            flags,
        })
    }

    /// `[accuracy, precision, recall, f1]`.
    pub fn values(&self) -> [f64; 4] {
        [self.accuracy, self.precision, self.recall, self.f1]
    }

    pub fn rounded_2dp(&self) -> [f64; 4] {
        self.values().map(round_2dp)
    }
}

/// Round half-up to two decimals. A small guard absorbs binary representation
/// error so that e.g. `0.895` becomes `0.90`.
pub fn round_2dp(x: f64) -> f64 {
    let scaled = x * 100.0;
    let guard = 1e-9 * libm::fabs(scaled).max(1.0);
    if x >= 0.0 {
        libm::floor(scaled + 0.5 + guard) / 100.0
    } else {
        -libm::floor(-scaled + 0.5 + guard) / 100.0
    }
}

/// Table formatting: values with an exact three-decimal expansion keep all
/// three decimals (`0.895`), everything else is rounded half-up to two (`0.73`).
pub fn table_cell(x: f64) -> String {
    let milli = x * 1000.0;
    let exact_3dp = libm::fabs(milli - libm::round(milli)) < 1e-9 * libm::fabs(milli).max(1.0);
    if exact_3dp && (libm::round(milli) as i64) % 10 != 0 {
        format!("{x:.3}")
    } else {
        format!("{:.2}", round_2dp(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn perfect_predictions() {
        let mut truth = vec![Label::Positive; 10];
        truth.extend([Label::Negative; 10]);
        let cm = ConfusionMatrix::from_predictions(&truth, &truth).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(10, 0, 0, 10));
    }

    #[test]
    fn flipped_predictions_swap_cells() {
        let truth = [
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Positive,
            Label::Negative,
        ];
        let pred = [
            Label::Positive,
            Label::Negative,
            Label::Negative,
            Label::Positive,
            Label::Positive,
        ];
        let flipped: Vec<Label> = pred
            .iter()
            .map(|l| match l {
                Label::Positive => Label::Negative,
                Label::Negative => Label::Positive,
            })
            .collect();
        let a = ConfusionMatrix::from_predictions(&truth, &pred).unwrap();
        let b = ConfusionMatrix::from_predictions(&truth, &flipped).unwrap();
        assert_eq!((a.true_pos, a.false_neg), (b.false_neg, b.true_pos));
        assert_eq!((a.true_neg, a.false_pos), (b.false_pos, b.true_neg));
    }

    #[test]
    fn tabulation_errors() {
        assert!(ConfusionMatrix::from_predictions(&[], &[]).is_err());
        assert!(ConfusionMatrix::from_predictions(&[Label::Positive], &[]).is_err());
        assert!(ConfusionMatrix::default().metrics().is_err());
    }

    #[test]
    fn zero_denominator_policy() {
        let m = ConfusionMatrix::new(0, 5, 0, 5).metrics().unwrap();
        assert_eq!(m.accuracy, 0.5);
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        assert!(m.flags.undefined_precision);
        assert!(!m.flags.undefined_recall);
        assert_eq!(m.flags.names(), ["undefined_precision", "undefined_f1"]);
    }

    #[test]
    fn reference_confusion_matrices() {
        let resnet = ConfusionMatrix::new(29, 21, 0, 150).metrics().unwrap();
        assert_eq!(resnet.accuracy, 0.895);
        assert_eq!(resnet.rounded_2dp(), [0.9, 1.0, 0.58, 0.73]);
        let stats = ConfusionMatrix::new(44, 6, 15, 135).metrics().unwrap();
        assert_eq!(stats.rounded_2dp(), [0.9, 0.75, 0.88, 0.81]);
        assert!(stats.flags.is_empty());
    }

    #[test]
    fn half_up_rounding_and_cells() {
        assert_eq!(round_2dp(0.895), 0.9);
        assert_eq!(round_2dp(0.7342), 0.73);
        assert_eq!(round_2dp(0.125), 0.13);
        assert_eq!(round_2dp(0.0), 0.0);
        assert_eq!(table_cell(0.895), "0.895");
        assert_eq!(table_cell(0.9), "0.90");
        assert_eq!(table_cell(1.0), "1.00");
        assert_eq!(table_cell(58.0 / 79.0), "0.73");
        assert_eq!(table_cell(44.0 / 59.0), "0.75");
    }
}
