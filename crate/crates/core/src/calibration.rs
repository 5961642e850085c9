//! Confusion matrices estimated on a calibration split, and the vote
//! weights and conditional probabilities derived from them.

use std::fmt::Write as _;

use crate::belief::AppriouParams;
use crate::error::{FusionError, Result};
use crate::frame::{check_class, Frame};
use crate::vote::VoteWeights;

/// Counts of (true class, predicted class) pairs for one source.
/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    source: String,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(source: impl Into<String>, n: usize) -> Self {
        Self {
            source: source.into(),
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn from_counts(source: impl Into<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = counts.len();
        if n == 0 {
            return Err(FusionError::Empty("confusion matrix"));
        }
        if let Some(row) = counts.iter().find(|r| r.len() != n) {
            return Err(FusionError::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        Ok(Self {
            source: source.into(),
            counts,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn record(&mut self, truth: usize, predicted: usize) -> Result<()> {
        check_class(truth, self.n())?;
        check_class(predicted, self.n())?;
        self.counts[truth][predicted] += 1;
        Ok(())
    }

    pub fn row_sum(&self, truth: usize) -> u64 {
        self.counts[truth].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Fraction of class-`truth` samples predicted correctly; 0 for an
    /// empty row.
    pub fn success_rate(&self, truth: usize) -> f64 {
        self.rate(truth, truth)
    }

    /// Empirical `P(predicted | truth)`; 0 for an empty row.
    pub fn rate(&self, truth: usize, predicted: usize) -> f64 {
        let row = self.row_sum(truth);
        if row == 0 {
            0.0
        } else {
            self.counts[truth][predicted] as f64 / row as f64
        }
    }

    /// Overall fraction of correct predictions; 0 when empty.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let diag: u64 = (0..self.n()).map(|i| self.counts[i][i]).sum();
        diag as f64 / total as f64
    }

    /// CSV with a header of predicted labels and one row per true label.
    pub fn to_csv(&self, frame: &Frame) -> Result<String> {
        if frame.len() != self.n() {
            return Err(FusionError::FrameMismatch {
                expected: frame.len(),
                found: self.n(),
            });
        }
        let mut out = String::from("true_class");
        for label in frame.labels() {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (label, row) in frame.labels().iter().zip(&self.counts) {
            out.push_str(label);
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Tallies `(truth, predicted)` pairs into a confusion matrix.
pub fn build_confusion(
    source: impl Into<String>,
    preds: &[(usize, usize)],
    frame: &Frame,
) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::zeros(source, frame.len());
    for &(truth, predicted) in preds {
        cm.record(truth, predicted)?;
    }
    Ok(cm)
}

fn common_size(cms: &[ConfusionMatrix]) -> Result<usize> {
    let n = cms
        .first()
        .ok_or(FusionError::Empty("confusion matrix list"))?
        .n();
    if let Some(cm) = cms.iter().find(|cm| cm.n() != n) {
        return Err(FusionError::FrameMismatch {
            expected: n,
            found: cm.n(),
        });
    }
    Ok(n)
}

/// Per-class success rates of every source, normalized so the whole matrix
/// sums to one.
pub fn vote_weights(cms: &[ConfusionMatrix]) -> Result<VoteWeights> {
    let n = common_size(cms)?;
    let raw: Vec<Vec<f64>> = cms
        .iter()
        .map(|cm| (0..n).map(|k| cm.success_rate(k)).collect())
        .collect();
    let total: f64 = raw.iter().flatten().sum();
    if total <= 0.0 {
        return Err(FusionError::NoCorrectSource);
    }
    VoteWeights::new(
        raw.into_iter()
            .map(|row| row.into_iter().map(|w| w / total).collect())
            .collect(),
    )
}

/// `p(S_j/C_i)` as the probability that source `j` answers `C_i` when the
/// truth is `C_i`, with `R_j = 1 / max_i p` and unit discounts.
pub fn conditional_probs(cms: &[ConfusionMatrix]) -> Result<AppriouParams> {
    let n = common_size(cms)?;
    let cond_prob = cms
        .iter()
        .map(|cm| (0..n).map(|i| cm.success_rate(i)).collect())
        .collect();
    AppriouParams::new(cond_prob)
}

/// `p(S_j = observed_j | C_i)` for every source `j` and hypothesis `i`,
/// read from the full confusion rows. The diagonal of
/// [`conditional_probs`] is the special case `observed_j = i`.
pub fn label_likelihoods(cms: &[ConfusionMatrix], observed: &[usize]) -> Result<Vec<Vec<f64>>> {
    let n = common_size(cms)?;
    if observed.len() != cms.len() {
        return Err(FusionError::DimensionMismatch {
            expected: cms.len(),
            found: observed.len(),
        });
    }
    observed
        .iter()
        .zip(cms)
        .map(|(&label, cm)| {
            check_class(label, n)?;
            Ok((0..n).map(|i| cm.rate(i, label)).collect())
        })
        .collect()
}
