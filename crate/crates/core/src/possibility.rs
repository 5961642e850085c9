//! Possibility distributions over a frame and their combination.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FusionError, Result};
use crate::frame::{argmax_lowest, Decision, FocalSet, SourceOutput};

/// Membership degrees `π(C_i)` with `max π = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PossibilityDistribution {
    pi: Vec<f64>,
}

impl PossibilityDistribution {
    /// Accepts an already normalized distribution.
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        check_degrees(&pi)?;
        let max = pi.iter().cloned().fold(0.0, f64::max);
        if (max - 1.0).abs() > 1e-9 {
            return Err(FusionError::InvalidParameter(format!(
                "possibility distribution must reach 1, max is {max}"
            )));
        }
        Ok(Self { pi })
    }

    /// Divides raw membership scores by their maximum. An all-zero vector
    /// becomes total ignorance (every class fully possible).
    pub fn from_scores(scores: &[f64]) -> Result<Self> {
        check_degrees(scores)?;
        Ok(Self {
            pi: normalize_by_max(scores.to_vec()),
        })
    }

    pub fn from_output(output: &SourceOutput) -> Result<Self> {
        match output {
            SourceOutput::Numeric(scores) => Self::from_scores(scores),
            SourceOutput::Symbolic(_) => Err(FusionError::WrongOutputKind {
                expected: "numeric",
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.pi
    }

    fn check_frame(&self, a: FocalSet) -> Result<()> {
        if a.width() == self.len() {
            Ok(())
        } else {
            Err(FusionError::FrameMismatch {
                expected: self.len(),
                found: a.width(),
            })
        }
    }
}

fn check_degrees(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(FusionError::Empty("possibility distribution"));
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(FusionError::InvalidScore {
                index,
                value,
                reason: "not finite",
            });
        }
        if value < 0.0 {
            return Err(FusionError::InvalidScore {
                index,
                value,
                reason: "negative",
            });
        }
    }
    Ok(())
}

fn normalize_by_max(mut values: Vec<f64>) -> Vec<f64> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        for v in &mut values {
            *v /= max;
        }
    } else {
        values.iter_mut().for_each(|v| *v = 1.0);
    }
    values
}

/// `to_possibility`: score vector → normalized distribution.
pub fn to_possibility(output: &SourceOutput) -> Result<PossibilityDistribution> {
    PossibilityDistribution::from_output(output)
}

/// `Π(A) = max_{C_i ∈ A} π(C_i)`, with `Π(∅) = 0`.
pub fn possibility_measure(d: &PossibilityDistribution, a: FocalSet) -> Result<f64> {
    d.check_frame(a)?;
    Ok(a.classes().map(|i| d.pi[i]).fold(0.0, f64::max))
}

/// `N(A) = 1 − Π(A^c)`.
pub fn necessity_measure(d: &PossibilityDistribution, a: FocalSet) -> Result<f64> {
    Ok(1.0 - possibility_measure(d, a.complement())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinationOperator {
    Min,
    Max,
    Mean,
    Median,
}

impl CombinationOperator {
    pub const ALL: [CombinationOperator; 4] = [Self::Min, Self::Max, Self::Mean, Self::Median];

    pub fn name(self) -> &'static str {
        match self {
            Self::Min => "min",
            Self::Max => "max",
            Self::Mean => "mean",
            Self::Median => "median",
        }
    }

    fn apply(self, column: &mut [f64]) -> f64 {
        match self {
            Self::Min => column.iter().cloned().fold(f64::INFINITY, f64::min),
            Self::Max => column.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            Self::Mean => column.iter().sum::<f64>() / column.len() as f64,
            Self::Median => {
                column.sort_by(f64::total_cmp);
                let mid = column.len() / 2;
                if column.len() % 2 == 1 {
                    column[mid]
                } else {
                    0.5 * (column[mid - 1] + column[mid])
                }
            }
        }
    }
}

impl fmt::Display for CombinationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombinationOperator {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FusionError::InvalidParameter(format!("unknown operator `{s}`")))
    }
}

/// Classwise combination followed by a single renormalization.
pub fn combine(
    dists: &[PossibilityDistribution],
    op: CombinationOperator,
) -> Result<PossibilityDistribution> {
    let first = dists
        .first()
        .ok_or(FusionError::Empty("distribution list"))?;
    let n = first.len();
    if let Some(d) = dists.iter().find(|d| d.len() != n) {
        return Err(FusionError::FrameMismatch {
            expected: n,
            found: d.len(),
        });
    }
    let mut column = Vec::with_capacity(dists.len());
    let raw = (0..n)
        .map(|i| {
            column.clear();
            column.extend(dists.iter().map(|d| d.pi[i]));
            op.apply(&mut column)
        })
        .collect();
    Ok(PossibilityDistribution {
        pi: normalize_by_max(raw),
    })
}

/// Most possible class; ties go to the lowest index.
pub fn decide_possibilistic(d: &PossibilityDistribution) -> Decision {
    argmax_lowest(&d.pi).map_or(Decision::Conflict, Decision::Class)
}
