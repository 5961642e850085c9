//! Frame of discernment, focal sets, source outputs and decisions.

use std::collections::HashSet;
use std::fmt;

use crate::error::{FusionError, Result};

/// Largest supported frame. Keeps the full power set at 2^16 subsets.
pub const MAX_CLASSES: usize = 16;

/// An ordered set of mutually exclusive class names.
///
/// Class `i` (zero-based) is the `i`-th label passed to [`Frame::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(FusionError::EmptyFrame);
        }
        if labels.len() > MAX_CLASSES {
            return Err(FusionError::TooManyClasses {
                got: labels.len(),
                max: MAX_CLASSES,
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if label.is_empty() {
                return Err(FusionError::EmptyLabel);
            }
            if !seen.insert(label.as_str()) {
                return Err(FusionError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, class: usize) -> Option<&str> {
        self.labels.get(class).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check_class(&self, class: usize) -> Result<()> {
        check_class(class, self.len())
    }

    /// The whole frame `D`.
    pub fn full(&self) -> FocalSet {
        FocalSet::full(self.len())
    }

    pub fn empty_set(&self) -> FocalSet {
        FocalSet::empty(self.len())
    }

    pub fn singleton(&self, class: usize) -> Result<FocalSet> {
        FocalSet::singleton(class, self.len())
    }

    /// Every subset of the frame, in bit order (∅ first, D last).
    pub fn power_set(&self) -> impl Iterator<Item = FocalSet> {
        FocalSet::all(self.len())
    }
}

pub(crate) fn check_class(class: usize, n: usize) -> Result<()> {
    if class < n {
        Ok(())
    } else {
        Err(FusionError::ClassOutOfRange { index: class, n })
    }
}

/// A subset of a frame of `width` classes, stored as a bit set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FocalSet {
    width: u8,
    bits: u16,
}

fn full_mask(width: usize) -> u16 {
    ((1u32 << width) - 1) as u16
}

impl FocalSet {
    pub fn empty(width: usize) -> Self {
        debug_assert!(width <= MAX_CLASSES);
        Self {
            width: width as u8,
            bits: 0,
        }
    }

    pub fn full(width: usize) -> Self {
        debug_assert!(width <= MAX_CLASSES);
        Self {
            width: width as u8,
            bits: full_mask(width),
        }
    }

    pub fn singleton(class: usize, width: usize) -> Result<Self> {
        check_class(class, width)?;
        Ok(Self {
            width: width as u8,
            bits: 1 << class,
        })
    }

    /// Builds a set from raw bits; bits above `width` are rejected.
    pub fn from_bits(bits: u16, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_CLASSES {
            return Err(FusionError::TooManyClasses {
                got: width,
                max: MAX_CLASSES,
            });
        }
        if bits & !full_mask(width) != 0 {
            return Err(FusionError::ClassOutOfRange {
                index: 15 - bits.leading_zeros() as usize,
                n: width,
            });
        }
        Ok(Self {
            width: width as u8,
            bits,
        })
    }

    pub fn from_classes<I: IntoIterator<Item = usize>>(classes: I, width: usize) -> Result<Self> {
        let mut set = Self::empty(width);
        for class in classes {
            check_class(class, width)?;
            set.bits |= 1 << class;
        }
        Ok(set)
    }

    /// All `2^width` subsets in increasing bit order.
    pub fn all(width: usize) -> impl Iterator<Item = FocalSet> {
        let w = width as u8;
        (0..=full_mask(width) as u32).map(move |bits| FocalSet {
            width: w,
            bits: bits as u16,
        })
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_full(self) -> bool {
        self.bits == full_mask(self.width())
    }

    pub fn cardinality(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(self, class: usize) -> bool {
        class < self.width() && self.bits & (1 << class) != 0
    }

    pub fn is_subset_of(self, other: FocalSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn intersects(self, other: FocalSet) -> bool {
        self.bits & other.bits != 0
    }

    /// Complement relative to the whole frame.
    pub fn complement(self) -> FocalSet {
        FocalSet {
            width: self.width,
            bits: !self.bits & full_mask(self.width()),
        }
    }

    pub fn intersection(self, other: FocalSet) -> Result<FocalSet> {
        self.same_frame(other)?;
        Ok(self.intersect_unchecked(other))
    }

    pub fn union(self, other: FocalSet) -> Result<FocalSet> {
        self.same_frame(other)?;
        Ok(FocalSet {
            width: self.width,
            bits: self.bits | other.bits,
        })
    }

    /// Member classes in increasing order.
    pub fn classes(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.width()).filter(move |i| bits & (1 << i) != 0)
    }

    pub(crate) fn intersect_unchecked(self, other: FocalSet) -> FocalSet {
        FocalSet {
            width: self.width,
            bits: self.bits & other.bits,
        }
    }

    pub(crate) fn same_frame(self, other: FocalSet) -> Result<()> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(FusionError::FrameMismatch {
                expected: self.width(),
                found: other.width(),
            })
        }
    }
}

impl fmt::Debug for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        for (i, class) in self.classes().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "C{}", class + 1)?;
        }
        f.write_str("}")
    }
}

/// What one classifier reports about one sample.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceOutput {
    /// One score in `[0, 1]` per class.
    Numeric(Vec<f64>),
    /// The class the source decided.
    Symbolic(usize),
}

impl SourceOutput {
    pub fn numeric(scores: Vec<f64>, frame: &Frame) -> Result<Self> {
        validate_scores(&scores, frame.len())?;
        Ok(SourceOutput::Numeric(scores))
    }

    pub fn symbolic(class: usize, frame: &Frame) -> Result<Self> {
        frame.check_class(class)?;
        Ok(SourceOutput::Symbolic(class))
    }

    pub fn scores(&self) -> Option<&[f64]> {
        match self {
            SourceOutput::Numeric(s) => Some(s),
            SourceOutput::Symbolic(_) => None,
        }
    }

    pub fn label(&self) -> Option<usize> {
        match self {
            SourceOutput::Symbolic(c) => Some(*c),
            SourceOutput::Numeric(_) => None,
        }
    }
}

pub(crate) fn validate_scores(scores: &[f64], n: usize) -> Result<()> {
    if scores.len() != n {
        return Err(FusionError::DimensionMismatch {
            expected: n,
            found: scores.len(),
        });
    }
    for (index, &value) in scores.iter().enumerate() {
        if !value.is_finite() {
            return Err(FusionError::InvalidScore {
                index,
                value,
                reason: "not finite",
            });
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(FusionError::InvalidScore {
                index,
                value,
                reason: "outside [0, 1]",
            });
        }
    }
    Ok(())
}

/// Outcome of a fusion rule: a class of the frame, or the extra conflict
/// class `C_{n+1}` standing for total uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    /// Zero-based class index.
    Class(usize),
    Conflict,
}

impl Decision {
    pub fn class(self) -> Option<usize> {
        match self {
            Decision::Class(c) => Some(c),
            Decision::Conflict => None,
        }
    }

    pub fn is_conflict(self) -> bool {
        matches!(self, Decision::Conflict)
    }
}

/// Index of the largest value, ties to the lowest index. `None` if empty.
pub(crate) fn argmax_lowest(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
