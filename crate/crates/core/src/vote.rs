//! Voting over symbolic source decisions.
//!
//! Each source contributes the indicator of the class it chose; the tally is
//! the (optionally weighted) sum of indicators. Three decision rules read the
//! tally: plain majority, absolute majority, and the thresholded rule
//! `M_k = max_i M_i >= c·m + b`. All of them fall back to
//! [`Decision::Conflict`] when no single class wins.

use crate::error::{FusionError, Result};
use crate::frame::{check_class, Decision, Frame};

/// Normalized reliability weights, one row per source and one column per class.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteWeights {
    alpha: Vec<Vec<f64>>,
}

impl VoteWeights {
    /// Entries must lie in `[0, 1]` and sum to one over the whole matrix.
    pub fn new(alpha: Vec<Vec<f64>>) -> Result<Self> {
        let cols = alpha.first().map_or(0, Vec::len);
        if alpha.is_empty() || cols == 0 {
            return Err(FusionError::Empty("weight matrix"));
        }
        if let Some(row) = alpha.iter().find(|r| r.len() != cols) {
            return Err(FusionError::WeightShape {
                rows: alpha.len(),
                cols: row.len(),
                expected_rows: alpha.len(),
                expected_cols: cols,
            });
        }
        let mut total = 0.0;
        for &w in alpha.iter().flatten() {
            if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                return Err(FusionError::InvalidWeights(format!(
                    "weight {w} outside [0, 1]"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(FusionError::InvalidWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn sources(&self) -> usize {
        self.alpha.len()
    }

    pub fn classes(&self) -> usize {
        self.alpha[0].len()
    }

    pub fn get(&self, source: usize, class: usize) -> f64 {
        self.alpha[source][class]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.alpha
    }
}

/// Per-class vote totals `M_k^E`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteTally {
    counts: Vec<f64>,
    m_sources: usize,
    weighted: bool,
}

impl VoteTally {
    pub fn from_counts(counts: Vec<f64>, m_sources: usize) -> Self {
        Self {
            counts,
            m_sources,
            weighted: false,
        }
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn m_sources(&self) -> usize {
        self.m_sources
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    /// Index of the unique strict maximum, if any class has a vote.
    fn unique_max(&self) -> Option<usize> {
        let mut best = None;
        let mut best_value = f64::NEG_INFINITY;
        let mut tied = false;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > best_value {
                best = Some(k);
                best_value = c;
                tied = false;
            } else if c == best_value {
                tied = true;
            }
        }
        if tied || best_value <= 0.0 {
            None
        } else {
            best
        }
    }
}

/// Indicator vector of `label` over the frame.
pub fn indicator(label: usize, frame: &Frame) -> Result<Vec<f64>> {
    frame.check_class(label)?;
    let mut v = vec![0.0; frame.len()];
    v[label] = 1.0;
    Ok(v)
}

/// Sums the sources' indicators, weighting source `j`'s vote for `k` by
/// `alpha[j][k]` when weights are given.
pub fn tally(labels: &[usize], frame: &Frame, weights: Option<&VoteWeights>) -> Result<VoteTally> {
    let n = frame.len();
    for &label in labels {
        check_class(label, n)?;
    }
    if let Some(w) = weights {
        if w.sources() != labels.len() || w.classes() != n {
            return Err(FusionError::WeightShape {
                rows: w.sources(),
                cols: w.classes(),
                expected_rows: labels.len(),
                expected_cols: n,
            });
        }
    }
    let mut counts = vec![0.0; n];
    for (j, &label) in labels.iter().enumerate() {
        counts[label] += weights.map_or(1.0, |w| w.get(j, label));
    }
    Ok(VoteTally {
        counts,
        m_sources: labels.len(),
        weighted: weights.is_some(),
    })
}

/// Class with the unique largest tally; ties and empty votes are a conflict.
pub fn decide_majority(t: &VoteTally) -> Decision {
    t.unique_max().map_or(Decision::Conflict, Decision::Class)
}

/// Class voted by strictly more than half of the sources.
pub fn decide_absolute_majority(t: &VoteTally) -> Result<Decision> {
    if t.weighted {
        return Err(FusionError::WeightedAbsoluteMajority);
    }
    let half = t.m_sources as f64 / 2.0;
    Ok(t.counts
        .iter()
        .position(|&c| c > half)
        .map_or(Decision::Conflict, Decision::Class))
}

/// Unique maximum that also reaches `c·m + b`.
///
/// `b` stands for the tally-dependent offset of the general rule and is
/// taken as a constant.
pub fn decide_threshold(t: &VoteTally, c: f64, b: f64) -> Result<Decision> {
    if !(0.0..=1.0).contains(&c) {
        return Err(FusionError::ThresholdOutOfRange(c));
    }
    let bar = c * t.m_sources as f64 + b;
    Ok(match t.unique_max() {
        Some(k) if t.counts[k] >= bar => Decision::Class(k),
        _ => Decision::Conflict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(n: usize) -> Frame {
        Frame::new((0..n).map(|i| format!("c{i}"))).unwrap()
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(indicator(1, &frame(3)).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(indicator(0, &frame(1)).unwrap(), vec![1.0]);
        assert_eq!(
            indicator(5, &frame(6)).unwrap(),
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
        );
        assert!(matches!(
            indicator(3, &frame(3)),
            Err(FusionError::ClassOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn tally_examples() {
        let f = frame(3);
        let t = tally(&[0, 0, 1], &f, None).unwrap();
        assert_eq!(t.counts(), &[2.0, 1.0, 0.0]);
        assert_eq!(t.m_sources(), 3);

        let n = 3;
        let uniform = VoteWeights::new(vec![vec![1.0 / (2.0 * n as f64); n]; 2]).unwrap();
        let t = tally(&[0, 1], &f, Some(&uniform)).unwrap();
        let sixth = 1.0 / 6.0;
        assert!((t.counts()[0] - sixth).abs() < 1e-15);
        assert!((t.counts()[1] - sixth).abs() < 1e-15);
        assert_eq!(t.counts()[2], 0.0);
        assert!(t.counts().iter().sum::<f64>() <= 1.0);

        let empty = tally(&[], &f, None).unwrap();
        assert_eq!(empty.counts(), &[0.0, 0.0, 0.0]);
        assert_eq!(decide_majority(&empty), Decision::Conflict);
    }

    #[test]
    fn tally_errors() {
        let f = frame(2);
        assert!(tally(&[0, 2], &f, None).is_err());
        let w = VoteWeights::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert!(matches!(
            tally(&[0, 1, 1], &f, Some(&w)),
            Err(FusionError::WeightShape { .. })
        ));
        assert!(VoteWeights::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(VoteWeights::new(vec![vec![0.5], vec![0.25, 0.25]]).is_err());
    }

    #[test]
    fn majority_examples() {
        assert_eq!(
            decide_majority(&VoteTally::from_counts(vec![2.0, 1.0], 3)),
            Decision::Class(0)
        );
        assert_eq!(
            decide_majority(&VoteTally::from_counts(vec![1.0, 1.0], 2)),
            Decision::Conflict
        );
        assert_eq!(
            decide_majority(&VoteTally::from_counts(vec![0.0, 0.0, 0.0], 0)),
            Decision::Conflict
        );
    }

    #[test]
    fn absolute_majority_examples() {
        let abs = |c: Vec<f64>, m| decide_absolute_majority(&VoteTally::from_counts(c, m)).unwrap();
        assert_eq!(abs(vec![2.0, 1.0], 3), Decision::Class(0));
        assert_eq!(abs(vec![2.0, 2.0], 4), Decision::Conflict);
        assert_eq!(abs(vec![1.0, 1.0, 1.0, 1.0], 4), Decision::Conflict);

        let f = frame(2);
        let w = VoteWeights::new(vec![vec![0.5, 0.5]]).unwrap();
        let weighted = tally(&[0], &f, Some(&w)).unwrap();
        assert!(matches!(
            decide_absolute_majority(&weighted),
            Err(FusionError::WeightedAbsoluteMajority)
        ));
    }

    #[test]
    fn threshold_examples() {
        let th = |c: Vec<f64>, m, cc, b| decide_threshold(&VoteTally::from_counts(c, m), cc, b);
        assert_eq!(
            th(vec![3.0, 0.0, 0.0], 3, 0.5, 0.0).unwrap(),
            Decision::Class(0)
        );
        assert_eq!(
            th(vec![1.0, 1.0, 1.0], 3, 0.0, 0.0).unwrap(),
            Decision::Conflict
        );
        assert_eq!(th(vec![2.0, 1.0], 3, 1.0, 0.0).unwrap(), Decision::Conflict);
        assert!(matches!(
            th(vec![2.0, 1.0], 3, 1.5, 0.0),
            Err(FusionError::ThresholdOutOfRange(_))
        ));
        assert!(th(vec![2.0, 1.0], 3, -0.1, 0.0).is_err());
    }

    #[test]
    fn odd_binary_votes_never_conflict() {
        let f = frame(2);
        for m in (1..=7).step_by(2) {
            for mask in 0u32..(1 << m) {
                let labels: Vec<usize> = (0..m).map(|j| (mask >> j & 1) as usize).collect();
                let t = tally(&labels, &f, None).unwrap();
                assert_ne!(decide_absolute_majority(&t).unwrap(), Decision::Conflict);
            }
        }
    }

    proptest! {
        #[test]
        fn tally_is_permutation_invariant(
            labels in prop::collection::vec(0usize..4, 0..9),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let f = frame(4);
            let mut shuffled = labels.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(
                tally(&labels, &f, None).unwrap(),
                tally(&shuffled, &f, None).unwrap()
            );
        }

        #[test]
        fn absolute_implies_majority(labels in prop::collection::vec(0usize..4, 0..9)) {
            let t = tally(&labels, &frame(4), None).unwrap();
            if decide_majority(&t) == Decision::Conflict {
                prop_assert_eq!(decide_absolute_majority(&t).unwrap(), Decision::Conflict);
            }
        }
    }
}
