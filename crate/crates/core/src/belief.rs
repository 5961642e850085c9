//! Belief functions on a frame: sparse mass functions, the Appriou and
//! Denœux mass models, the unnormalized conjunctive rule and pignistic
//! decision.
//!
//! Mass functions are kept open-world: the conjunctive rule never
//! renormalizes, so the empty set may carry mass and `m(∅)` measures the
//! conflict between the combined sources.

use std::collections::BTreeMap;

use crate::error::{FusionError, Result};
use crate::frame::{argmax_lowest, check_class, Decision, FocalSet, Frame};

/// Tolerance on `Σ m(A) = 1`.
pub const MASS_TOLERANCE: f64 = 1e-9;
/// Combined focal elements at or below this mass are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Default discount for the distance model.
pub const DEFAULT_DENOEUX_ALPHA: f64 = 0.95;

/// A basic belief assignment over the subsets of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    width: usize,
    focal: BTreeMap<FocalSet, f64>,
}

impl MassFunction {
    /// Builds a mass function from `(set, mass)` pairs. Repeated sets are
    /// summed, zero masses dropped; negative masses and totals away from one
    /// are rejected.
    pub fn new<I>(width: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let mut focal = BTreeMap::new();
        for (set, mass) in entries {
            if set.width() != width {
                return Err(FusionError::FrameMismatch {
                    expected: width,
                    found: set.width(),
                });
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(FusionError::InvalidMass(format!(
                    "mass {mass} on {set:?} is not a non-negative number"
                )));
            }
            *focal.entry(set).or_insert(0.0) += mass;
        }
        focal.retain(|_, m| *m > 0.0);
        let mf = Self { width, focal };
        let total = mf.total();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(FusionError::InvalidMass(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(mf)
    }

    /// Total ignorance: `m(D) = 1`.
    pub fn vacuous(frame: &Frame) -> Self {
        Self::vacuous_width(frame.len())
    }

    pub(crate) fn vacuous_width(width: usize) -> Self {
        Self {
            width,
            focal: BTreeMap::from([(FocalSet::full(width), 1.0)]),
        }
    }

    /// All mass on a single set.
    pub fn categorical(set: FocalSet) -> Self {
        Self {
            width: set.width(),
            focal: BTreeMap::from([(set, 1.0)]),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mass(&self, set: FocalSet) -> f64 {
        self.focal.get(&set).copied().unwrap_or(0.0)
    }

    /// Focal elements in increasing bit order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.focal.iter().map(|(&s, &m)| (s, m))
    }

    pub fn len(&self) -> usize {
        self.focal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focal.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.focal.values().sum()
    }

    fn check_set(&self, set: FocalSet) -> Result<()> {
        if set.width() == self.width {
            Ok(())
        } else {
            Err(FusionError::FrameMismatch {
                expected: self.width,
                found: set.width(),
            })
        }
    }
}

/// Unnormalized conjunctive rule: `m(A) = Σ_{B∩C=A} m1(B)·m2(C)`.
pub fn conjunctive_combine(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    if m1.width != m2.width {
        return Err(FusionError::FrameMismatch {
            expected: m1.width,
            found: m2.width,
        });
    }
    let mut focal = BTreeMap::new();
    for (&b, &mb) in &m1.focal {
        for (&c, &mc) in &m2.focal {
            *focal.entry(b.intersect_unchecked(c)).or_insert(0.0) += mb * mc;
        }
    }
    focal.retain(|_, m| *m > PRUNE_THRESHOLD);
    Ok(MassFunction {
        width: m1.width,
        focal,
    })
}

/// Left fold of [`conjunctive_combine`] starting from the vacuous mass.
pub fn combine_all<'a, I>(width: usize, masses: I) -> Result<MassFunction>
where
    I: IntoIterator<Item = &'a MassFunction>,
{
    masses
        .into_iter()
        .try_fold(MassFunction::vacuous_width(width), |acc, m| {
            conjunctive_combine(&acc, m)
        })
}

/// Mass on the empty set.
pub fn conflict_mass(m: &MassFunction) -> f64 {
    m.mass(FocalSet::empty(m.width))
}

/// `Bel(A) = Σ_{∅≠B⊆A} m(B)`.
pub fn belief(m: &MassFunction, a: FocalSet) -> Result<f64> {
    m.check_set(a)?;
    Ok(m.focal_elements()
        .filter(|(b, _)| !b.is_empty() && b.is_subset_of(a))
        .map(|(_, mass)| mass)
        .sum())
}

/// `Pl(A) = Σ_{B∩A≠∅} m(B)`.
pub fn plausibility(m: &MassFunction, a: FocalSet) -> Result<f64> {
    m.check_set(a)?;
    Ok(m.focal_elements()
        .filter(|(b, _)| b.intersects(a))
        .map(|(_, mass)| mass)
        .sum())
}

/// Pignistic probabilities: each non-empty focal element spreads its mass
/// evenly over its members, and the result is conditioned on `¬∅`.
pub fn pignistic(m: &MassFunction) -> Result<Vec<f64>> {
    let conflict = conflict_mass(m);
    let free = 1.0 - conflict;
    if free <= PRUNE_THRESHOLD {
        return Err(FusionError::TotalConflict);
    }
    let mut betp = vec![0.0; m.width];
    for (set, mass) in m.focal_elements().filter(|(s, _)| !s.is_empty()) {
        let share = mass / set.cardinality() as f64;
        for class in set.classes() {
            betp[class] += share;
        }
    }
    // divide by the non-conflicting mass actually stored so the output sums
    // to one even when pruning dropped dust
    let stored = m.total() - conflict;
    for p in &mut betp {
        *p /= stored;
    }
    Ok(betp)
}

/// Class maximizing the pignistic probability, lowest index on ties;
/// [`Decision::Conflict`] when all mass is on ∅.
pub fn decide_pignistic(m: &MassFunction) -> Decision {
    match pignistic(m) {
        Ok(betp) => argmax_lowest(&betp).map_or(Decision::Conflict, Decision::Class),
        Err(_) => Decision::Conflict,
    }
}

// ---------------------------------------------------------------------------
// Appriou probabilistic model

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AppriouVariant {
    /// `m(C_i^c) = α / (1 + R·p)`; the three masses sum to one.
    #[default]
    Corrected,
    /// `m(C_i^c) = α·R / (1 + R·p)` as commonly printed; only sums to one for
    /// `R = 1`, so the masses are renormalized before use.
    AsPrinted,
}

/// The three raw masses of one Appriou mass function, before any
/// renormalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppriouMasses {
    pub singleton: f64,
    pub complement: f64,
    pub ignorance: f64,
}

impl AppriouMasses {
    pub fn total(&self) -> f64 {
        self.singleton + self.complement + self.ignorance
    }
}

/// Raw Appriou masses for conditional probability `p`, normalization `r`
/// and discount `alpha`.
pub fn appriou_masses(p: f64, r: f64, alpha: f64, variant: AppriouVariant) -> AppriouMasses {
    let denom = 1.0 + r * p;
    let complement = match variant {
        AppriouVariant::Corrected => alpha / denom,
        AppriouVariant::AsPrinted => alpha * r / denom,
    };
    AppriouMasses {
        singleton: alpha * r * p / denom,
        complement,
        ignorance: 1.0 - alpha,
    }
}

/// Parameters of the Appriou model for `m` sources over `n` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct AppriouParams {
    cond_prob: Vec<Vec<f64>>,
    r: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    variant: AppriouVariant,
}

impl AppriouParams {
    /// Derives `R_j = 1 / max_i p(S_j/C_i)` from the probabilities and uses
    /// `alpha = 1` everywhere.
    pub fn new(cond_prob: Vec<Vec<f64>>) -> Result<Self> {
        let alpha = cond_prob.iter().map(|row| vec![1.0; row.len()]).collect();
        Self::with_alpha(cond_prob, alpha)
    }

    pub fn with_alpha(cond_prob: Vec<Vec<f64>>, alpha: Vec<Vec<f64>>) -> Result<Self> {
        let n = cond_prob.first().map_or(0, Vec::len);
        if cond_prob.is_empty() || n == 0 {
            return Err(FusionError::Empty("conditional probability matrix"));
        }
        let shape_ok =
            |m: &Vec<Vec<f64>>| m.len() == cond_prob.len() && m.iter().all(|r| r.len() == n);
        if !shape_ok(&cond_prob) || !shape_ok(&alpha) {
            return Err(FusionError::InvalidParameter(
                "conditional probabilities and discounts must share an m x n shape".into(),
            ));
        }
        for &v in cond_prob.iter().chain(&alpha).flatten() {
            if !(0.0..=1.0).contains(&v) {
                return Err(FusionError::InvalidParameter(format!(
                    "value {v} outside [0, 1]"
                )));
            }
        }
        let r = cond_prob
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let max = row.iter().cloned().fold(0.0, f64::max);
                if max > 0.0 {
                    Ok(1.0 / max)
                } else {
                    Err(FusionError::UndefinedNormalization { source_index: j })
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            cond_prob,
            r,
            alpha,
            variant: AppriouVariant::Corrected,
        })
    }

    pub fn with_variant(mut self, variant: AppriouVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn sources(&self) -> usize {
        self.cond_prob.len()
    }

    pub fn classes(&self) -> usize {
        self.cond_prob[0].len()
    }

    pub fn cond_prob(&self) -> &[Vec<f64>] {
        &self.cond_prob
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn variant(&self) -> AppriouVariant {
        self.variant
    }
}

/// Mass function `m_ij` of source `j` about hypothesis `C_i`, with focal
/// elements `{C_i}`, `C_i^c` and `D`.
pub fn appriou_mass(
    frame: &Frame,
    source: usize,
    class: usize,
    params: &AppriouParams,
) -> Result<MassFunction> {
    if params.classes() != frame.len() {
        return Err(FusionError::FrameMismatch {
            expected: frame.len(),
            found: params.classes(),
        });
    }
    if source >= params.sources() {
        return Err(FusionError::InvalidParameter(format!(
            "source {source} out of range for {} sources",
            params.sources()
        )));
    }
    frame.check_class(class)?;
    let raw = appriou_masses(
        params.cond_prob[source][class],
        params.r[source],
        params.alpha[source][class],
        params.variant,
    );
    let scale = match params.variant {
        AppriouVariant::Corrected => 1.0,
        AppriouVariant::AsPrinted => raw.total(),
    };
    let singleton = frame.singleton(class)?;
    MassFunction::new(
        frame.len(),
        [
            (singleton, raw.singleton / scale),
            (singleton.complement(), raw.complement / scale),
            (frame.full(), raw.ignorance / scale),
        ],
    )
}

// ---------------------------------------------------------------------------
// Denœux distance model

/// Labelled prototypes for the evidential k-nearest-neighbour model.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    n_classes: usize,
    dim: usize,
    features: Vec<Vec<f64>>,
    classes: Vec<usize>,
    gamma: Vec<f64>,
    alpha: f64,
    k: usize,
}

impl TrainingSet {
    pub fn new(
        n_classes: usize,
        prototypes: Vec<(Vec<f64>, usize)>,
        gamma: Vec<f64>,
        alpha: f64,
        k: usize,
    ) -> Result<Self> {
        if prototypes.is_empty() {
            return Err(FusionError::Empty("training set"));
        }
        let dim = prototypes[0].0.len();
        let mut features = Vec::with_capacity(prototypes.len());
        let mut classes = Vec::with_capacity(prototypes.len());
        for (x, c) in prototypes {
            if x.len() != dim {
                return Err(FusionError::DimensionMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(FusionError::InvalidParameter(
                    "prototype features must be finite".into(),
                ));
            }
            check_class(c, n_classes)?;
            features.push(x);
            classes.push(c);
        }
        if gamma.len() != n_classes {
            return Err(FusionError::DimensionMismatch {
                expected: n_classes,
                found: gamma.len(),
            });
        }
        if gamma.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(FusionError::InvalidParameter(
                "every gamma must be positive and finite".into(),
            ));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(FusionError::InvalidParameter(format!(
                "discount {alpha} outside [0, 1]"
            )));
        }
        if k == 0 || k > features.len() {
            return Err(FusionError::InvalidParameter(format!(
                "k = {k} must lie in [1, {}]",
                features.len()
            )));
        }
        Ok(Self {
            n_classes,
            dim,
            features,
            classes,
            gamma,
            alpha,
            k,
        })
    }

    /// Like [`TrainingSet::new`] with `γ_i` set to the inverse of the mean
    /// pairwise distance between prototypes of class `i` (see
    /// [`default_gamma`]).
    pub fn with_default_gamma(
        n_classes: usize,
        prototypes: Vec<(Vec<f64>, usize)>,
        alpha: f64,
        k: usize,
    ) -> Result<Self> {
        let gamma = default_gamma(n_classes, &prototypes)?;
        Self::new(n_classes, prototypes, gamma, alpha, k)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn prototype(&self, t: usize) -> Option<(&[f64], usize)> {
        self.features
            .get(t)
            .map(|x| (x.as_slice(), self.classes[t]))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(FusionError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            })
        }
    }

    /// Indices of the `k` prototypes closest to `x`, nearest first; equal
    /// distances go to the lower index.
    pub fn nearest(&self, x: &[f64]) -> Result<Vec<usize>> {
        self.check_dim(x)?;
        let mut order: Vec<(f64, usize)> = self
            .features
            .iter()
            .enumerate()
            .map(|(t, p)| (squared_distance(x, p), t))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < order.len() {
            order.select_nth_unstable_by(self.k - 1, cmp);
            order.truncate(self.k);
        }
        order.sort_by(cmp);
        Ok(order.into_iter().map(|(_, t)| t).collect())
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn mean_pairwise_distance(points: &[&[f64]]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            sum += squared_distance(a, b).sqrt();
            pairs += 1;
        }
    }
    Some(sum / pairs as f64)
}

/// `γ_i = 1 / mean pairwise Euclidean distance` among prototypes of class
/// `i`. Classes with fewer than two prototypes use the mean over all
/// prototypes; a zero mean distance yields `γ = 1`.
pub fn default_gamma(n_classes: usize, prototypes: &[(Vec<f64>, usize)]) -> Result<Vec<f64>> {
    let mut by_class: Vec<Vec<&[f64]>> = vec![Vec::new(); n_classes];
    for (x, c) in prototypes {
        check_class(*c, n_classes)?;
        by_class[*c].push(x);
    }
    let mut global: Option<Option<f64>> = None;
    let invert = |d: Option<f64>| match d {
        Some(d) if d > 0.0 => 1.0 / d,
        _ => 1.0,
    };
    Ok(by_class
        .iter()
        .map(|points| match mean_pairwise_distance(points) {
            Some(d) => invert(Some(d)),
            None => {
                let all = global.get_or_insert_with(|| {
                    let every: Vec<&[f64]> = prototypes.iter().map(|(x, _)| x.as_slice()).collect();
                    mean_pairwise_distance(&every)
                });
                invert(*all)
            }
        })
        .collect())
}

/// `φ_i(d) = exp(−γ_i d²)`.
pub fn phi(gamma: f64, distance: f64) -> f64 {
    (-gamma * distance * distance).exp()
}

/// Simple support function induced on `x` by prototype `t`:
/// `m({C_t}) = α·φ(d(x, x_t))`, rest on `D`.
pub fn denoeux_mass(x: &[f64], t: usize, ts: &TrainingSet) -> Result<MassFunction> {
    ts.check_dim(x)?;
    let (proto, class) = ts.prototype(t).ok_or_else(|| {
        FusionError::InvalidParameter(format!("prototype {t} out of range for {}", ts.len()))
    })?;
    let d = squared_distance(x, proto).sqrt();
    let support = ts.alpha * phi(ts.gamma[class], d);
    MassFunction::new(
        ts.n_classes,
        [
            (FocalSet::singleton(class, ts.n_classes)?, support),
            (FocalSet::full(ts.n_classes), 1.0 - support),
        ],
    )
}

/// Conjunctive combination of the support functions of the `k` nearest
/// prototypes of `x`.
pub fn denoeux_classify_mass(x: &[f64], ts: &TrainingSet) -> Result<MassFunction> {
    let nearest = ts.nearest(x)?;
    let masses = nearest
        .into_iter()
        .map(|t| denoeux_mass(x, t, ts))
        .collect::<Result<Vec<_>>>()?;
    combine_all(ts.n_classes, &masses)
}
