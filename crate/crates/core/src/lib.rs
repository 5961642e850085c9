//! Decision-level fusion of classifier outputs.
//!
//! Three families of combination are provided over a shared [`Frame`] of
//! exclusive classes:
//!
//! - [`vote`]: plain, absolute-majority, thresholded and weighted voting over
//!   symbolic decisions;
//! - [`possibility`]: possibility distributions built from numeric scores,
//!   combined with min / max / mean / median;
//! - [`belief`]: sparse mass functions, the Appriou and Denœux mass models,
//!   the unnormalized conjunctive rule and the pignistic decision.
//!
//! [`calibration`] turns held-out predictions into confusion matrices, vote
//! weights and conditional probabilities, and [`bench`] runs the seeded
//! three-way-split comparison protocol on synthetic or loaded datasets.

pub mod belief;
pub mod bench;
pub mod calibration;
pub mod error;
pub mod frame;
pub mod possibility;
pub mod vote;

pub use error::{FusionError, Result};
pub use frame::{Decision, FocalSet, Frame, SourceOutput, MAX_CLASSES};
