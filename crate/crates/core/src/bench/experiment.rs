//! The comparison protocol: repeated random three-way splits, calibration on
//! held-out data, evaluation of every requested fusion method on the test
//! part, and averaging over trials.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{FusionSettings, SimConfig};
use super::dataset::{Dataset, Sample};
use super::sim::{rng_for, simulate};
use crate::belief::{
    appriou_mass, combine_all, conflict_mass, decide_pignistic, denoeux_classify_mass,
    AppriouParams, MassFunction, TrainingSet,
};
use crate::calibration::{build_confusion, label_likelihoods, vote_weights, ConfusionMatrix};
use crate::error::{FusionError, Result};
use crate::frame::{Decision, Frame};
use crate::possibility::{
    combine, decide_possibilistic, CombinationOperator, PossibilityDistribution,
};
use crate::vote::{
    decide_absolute_majority, decide_majority, decide_threshold, tally, VoteWeights,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Unique-maximum vote on symbolic outputs.
    VoteMajority,
    /// More than half of the sources.
    VoteAbsolute,
    /// Unweighted vote with the `c·m + b` threshold from the settings.
    VoteThreshold,
    /// Vote weighted by calibrated per-class success rates.
    VoteWeighted,
    /// Possibility distributions from numeric scores.
    Possibility(CombinationOperator),
    /// Appriou model on symbolic outputs, conjunctive rule, pignistic decision.
    BeliefAppriou,
    /// Evidential k-NN on the concatenated numeric outputs.
    BeliefDenoeux,
}

impl Method {
    /// The methods compared in the default report.
    pub fn standard(settings: &FusionSettings) -> Vec<Method> {
        vec![
            Method::VoteMajority,
            Method::VoteAbsolute,
            Method::VoteWeighted,
            Method::Possibility(settings.possibility.operator),
            Method::BeliefAppriou,
            Method::BeliefDenoeux,
        ]
    }

    pub fn name(self) -> String {
        match self {
            Method::VoteMajority => "vote_majority".into(),
            Method::VoteAbsolute => "vote_absolute".into(),
            Method::VoteThreshold => "vote_threshold".into(),
            Method::VoteWeighted => "vote_weighted".into(),
            Method::Possibility(op) => format!("possibility_{op}"),
            Method::BeliefAppriou => "belief_appriou".into(),
            Method::BeliefDenoeux => "belief_denoeux".into(),
        }
    }

    fn is_belief(self) -> bool {
        matches!(self, Method::BeliefAppriou | Method::BeliefDenoeux)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match s.as_str() {
            "vote_majority" => Method::VoteMajority,
            "vote_absolute" => Method::VoteAbsolute,
            "vote_threshold" => Method::VoteThreshold,
            "vote_weighted" => Method::VoteWeighted,
            "belief_appriou" => Method::BeliefAppriou,
            "belief_denoeux" => Method::BeliefDenoeux,
            other => match other.strip_prefix("possibility_") {
                Some(op) => Method::Possibility(
                    op.parse()
                        .map_err(|_| FusionError::UnknownMethod(s.clone()))?,
                ),
                None => return Err(FusionError::UnknownMethod(s)),
            },
        })
    }
}

/// Parses a comma-separated method list. `all` expands to
/// [`Method::standard`] and a bare `possibility` uses the configured
/// operator. Duplicates are dropped.
pub fn parse_methods(list: &str, settings: &FusionSettings) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parsed = match item.to_ascii_lowercase().as_str() {
            "all" => Method::standard(settings),
            "possibility" => vec![Method::Possibility(settings.possibility.operator)],
            _ => vec![item.parse()?],
        };
        for m in parsed {
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
    }
    if methods.is_empty() {
        return Err(FusionError::Empty("method list"));
    }
    Ok(methods)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub accuracy: f64,
    /// Recall per true class; `null` if the class never reached a test split.
    pub per_class: IndexMap<String, Option<f64>>,
    /// Fraction of test samples decided as the conflict class.
    pub conflict_rate: f64,
    /// Mean `m(∅)` of the fused mass; `null` for non-belief methods.
    pub mean_conflict_mass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    /// Accuracy of the source alone on the test splits.
    pub accuracy: f64,
    pub per_class: IndexMap<String, Option<f64>>,
    /// Accuracy estimated on the first (source-calibration) split.
    pub reliability_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub n_trials: usize,
    pub methods: IndexMap<String, MethodReport>,
    pub sources: IndexMap<String, SourceSummary>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        let rates = report
            .methods
            .values()
            .flat_map(|m| {
                [
                    Some(m.accuracy),
                    Some(m.conflict_rate),
                    m.mean_conflict_mass,
                ]
            })
            .chain(
                report
                    .methods
                    .values()
                    .flat_map(|m| m.per_class.values().copied()),
            )
            .chain(
                report
                    .sources
                    .values()
                    .flat_map(|s| s.per_class.values().copied()),
            )
            .flatten();
        for r in rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(FusionError::InvalidConfig(format!(
                    "rate {r} outside [0, 1]"
                )));
            }
        }
        Ok(report)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.get(&method.name())
    }

    /// Plain-text table of overall accuracies.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        for (id, s) in &self.sources {
            out.push_str(&format!(
                "{:<22} {:>7.2}%\n",
                format!("source:{id}"),
                100.0 * s.accuracy
            ));
        }
        for (name, m) in &self.methods {
            out.push_str(&format!(
                "{:<22} {:>7.2}%   conflict {:>6.2}%\n",
                name,
                100.0 * m.accuracy,
                100.0 * m.conflict_rate
            ));
        }
        out
    }
}

/// Decision counts for one method (or source) on one test split.
#[derive(Debug, Clone, Default)]
struct Tally {
    correct: Vec<u64>,
    seen: Vec<u64>,
    conflicts: u64,
    conflict_mass: f64,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            correct: vec![0; n],
            seen: vec![0; n],
            ..Default::default()
        }
    }

    fn record(&mut self, truth: usize, decision: Decision) {
        self.seen[truth] += 1;
        match decision {
            Decision::Class(k) if k == truth => self.correct[truth] += 1,
            Decision::Conflict => self.conflicts += 1,
            _ => {}
        }
    }

    fn total(&self) -> u64 {
        self.seen.iter().sum()
    }

    fn accuracy(&self) -> f64 {
        self.correct.iter().sum::<u64>() as f64 / self.total() as f64
    }

    fn class_rate(&self, k: usize) -> Option<f64> {
        (self.seen[k] > 0).then(|| self.correct[k] as f64 / self.seen[k] as f64)
    }
}

struct TrialOutcome {
    methods: Vec<Tally>,
    sources: Vec<Tally>,
    source_estimates: Vec<f64>,
}

/// Artifacts fitted on the fusion-calibration split.
struct Calibrated {
    confusion: Vec<ConfusionMatrix>,
    weights: Option<VoteWeights>,
    training: Option<TrainingSet>,
}

fn confusions(dataset: &Dataset, part: &[usize]) -> Result<Vec<ConfusionMatrix>> {
    let frame = dataset.frame();
    dataset
        .source_ids()
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let preds: Vec<(usize, usize)> = part
                .iter()
                .map(|&i| {
                    let s = &dataset.samples()[i];
                    (s.truth, s.reports[j].label)
                })
                .collect();
            build_confusion(id.clone(), &preds, frame)
        })
        .collect()
}

fn calibrate(
    dataset: &Dataset,
    part: &[usize],
    methods: &[Method],
    settings: &FusionSettings,
) -> Result<Calibrated> {
    let confusion = confusions(dataset, part)?;
    let weights = if methods.contains(&Method::VoteWeighted) {
        Some(vote_weights(&confusion)?)
    } else {
        None
    };
    let training = if methods.contains(&Method::BeliefDenoeux) {
        let prototypes = part
            .iter()
            .map(|&i| {
                let s = &dataset.samples()[i];
                (s.feature_vector(), s.truth)
            })
            .collect::<Vec<_>>();
        let k = settings.denoeux.k.min(prototypes.len());
        Some(TrainingSet::with_default_gamma(
            dataset.frame().len(),
            prototypes,
            settings.denoeux.alpha,
            k,
        )?)
    } else {
        None
    };
    Ok(Calibrated {
        confusion,
        weights,
        training,
    })
}

/// Fused Appriou mass for one sample: `n` mass functions per source, one
/// per hypothesis, with `p(S_j/C_i)` the calibrated likelihood of the label
/// source `j` actually gave. Sources whose label never occurred during
/// calibration contribute nothing.
fn appriou_fusion(
    frame: &Frame,
    sample: &Sample,
    confusion: &[ConfusionMatrix],
    settings: &FusionSettings,
) -> Result<MassFunction> {
    let likelihoods = label_likelihoods(confusion, &sample.labels())?;
    let mut masses = Vec::with_capacity(likelihoods.len() * frame.len());
    for row in likelihoods {
        let params = match AppriouParams::new(vec![row]) {
            Ok(p) => p.with_variant(settings.appriou.variant()),
            Err(FusionError::UndefinedNormalization { .. }) => continue,
            Err(e) => return Err(e),
        };
        for class in 0..frame.len() {
            masses.push(appriou_mass(frame, 0, class, &params)?);
        }
    }
    combine_all(frame.len(), &masses)
}

fn decide(
    method: Method,
    dataset: &Dataset,
    sample: &Sample,
    cal: &Calibrated,
    settings: &FusionSettings,
) -> Result<(Decision, Option<f64>)> {
    let frame = dataset.frame();
    Ok(match method {
        Method::VoteMajority => (
            decide_majority(&tally(&sample.labels(), frame, None)?),
            None,
        ),
        Method::VoteAbsolute => (
            decide_absolute_majority(&tally(&sample.labels(), frame, None)?)?,
            None,
        ),
        Method::VoteThreshold => (
            decide_threshold(
                &tally(&sample.labels(), frame, None)?,
                settings.vote.c,
                settings.vote.b,
            )?,
            None,
        ),
        Method::VoteWeighted => {
            let t = tally(&sample.labels(), frame, cal.weights.as_ref())?;
            (decide_majority(&t), None)
        }
        Method::Possibility(op) => {
            let dists = sample
                .reports
                .iter()
                .map(|r| PossibilityDistribution::from_scores(&r.scores))
                .collect::<Result<Vec<_>>>()?;
            (decide_possibilistic(&combine(&dists, op)?), None)
        }
        Method::BeliefAppriou => {
            let m = appriou_fusion(frame, sample, &cal.confusion, settings)?;
            (decide_pignistic(&m), Some(conflict_mass(&m)))
        }
        Method::BeliefDenoeux => {
            let ts = cal
                .training
                .as_ref()
                .expect("training set fitted for denoeux");
            let m = denoeux_classify_mass(&sample.feature_vector(), ts)?;
            (decide_pignistic(&m), Some(conflict_mass(&m)))
        }
    })
}

fn run_trial(
    dataset: &Dataset,
    methods: &[Method],
    settings: &FusionSettings,
    seed: u64,
    trial: usize,
) -> Result<TrialOutcome> {
    let len = dataset.len();
    let third = len / 3;
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut rng_for(seed, trial as u64 + 1));
    let (source_part, rest) = order.split_at(third);
    let (fusion_part, test_part) = rest.split_at(third);

    let n = dataset.frame().len();
    let source_estimates = confusions(dataset, source_part)?
        .iter()
        .map(ConfusionMatrix::accuracy)
        .collect();
    let cal = calibrate(dataset, fusion_part, methods, settings)?;

    let mut method_tallies = vec![Tally::new(n); methods.len()];
    let mut source_tallies = vec![Tally::new(n); dataset.source_ids().len()];
    for &i in test_part {
        let sample = &dataset.samples()[i];
        for (t, report) in source_tallies.iter_mut().zip(&sample.reports) {
            t.record(sample.truth, Decision::Class(report.label));
        }
        for (t, &method) in method_tallies.iter_mut().zip(methods) {
            let (decision, conflict) = decide(method, dataset, sample, &cal, settings)?;
            t.record(sample.truth, decision);
            t.conflict_mass += conflict.unwrap_or(0.0);
        }
    }
    Ok(TrialOutcome {
        methods: method_tallies,
        sources: source_tallies,
        source_estimates,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

fn per_class(frame: &Frame, tallies: &[&Tally]) -> IndexMap<String, Option<f64>> {
    frame
        .labels()
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let rates: Vec<f64> = tallies.iter().filter_map(|t| t.class_rate(k)).collect();
            let avg = (!rates.is_empty()).then(|| mean(rates.into_iter()));
            (label.clone(), avg)
        })
        .collect()
}

/// Runs `n_trials` random splits of `dataset` and averages the per-trial
/// rates. Trials run in parallel; each owns the RNG stream `trial + 1` of
/// `seed`, and results are merged in trial order.
pub fn evaluate(
    dataset: &Dataset,
    methods: &[Method],
    settings: &FusionSettings,
    seed: u64,
    n_trials: usize,
) -> Result<ExperimentReport> {
    if methods.is_empty() {
        return Err(FusionError::Empty("method list"));
    }
    if n_trials == 0 {
        return Err(FusionError::InvalidConfig(
            "n_trials must be at least 1".into(),
        ));
    }
    settings.validate()?;
    if dataset.len() / 3 == 0 {
        return Err(FusionError::TooSmallToSplit(dataset.len()));
    }
    let outcomes = (0..n_trials)
        .into_par_iter()
        .map(|trial| run_trial(dataset, methods, settings, seed, trial))
        .collect::<Result<Vec<_>>>()?;

    let frame = dataset.frame();
    let methods_report = methods
        .iter()
        .enumerate()
        .map(|(idx, method)| {
            let tallies: Vec<&Tally> = outcomes.iter().map(|o| &o.methods[idx]).collect();
            let report = MethodReport {
                accuracy: mean(tallies.iter().map(|t| t.accuracy())),
                per_class: per_class(frame, &tallies),
                conflict_rate: mean(
                    tallies
                        .iter()
                        .map(|t| t.conflicts as f64 / t.total() as f64),
                ),
                mean_conflict_mass: method
                    .is_belief()
                    .then(|| mean(tallies.iter().map(|t| t.conflict_mass / t.total() as f64))),
            };
            (method.name(), report)
        })
        .collect();
    let sources = dataset
        .source_ids()
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let tallies: Vec<&Tally> = outcomes.iter().map(|o| &o.sources[j]).collect();
            let summary = SourceSummary {
                accuracy: mean(tallies.iter().map(|t| t.accuracy())),
                per_class: per_class(frame, &tallies),
                reliability_estimate: mean(outcomes.iter().map(|o| o.source_estimates[j])),
            };
            (id.clone(), summary)
        })
        .collect();
    Ok(ExperimentReport {
        seed,
        n_trials,
        methods: methods_report,
        sources,
    })
}

/// Simulates the configured scenario and evaluates it.
pub fn run_experiment(config: &SimConfig, methods: &[Method]) -> Result<ExperimentReport> {
    let dataset = simulate(config)?;
    evaluate(
        &dataset,
        methods,
        &config.fusion,
        config.seed,
        config.n_trials,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::SourceProfile;

    fn scenario(reliability: f64, n_samples: usize) -> SimConfig {
        SimConfig {
            classes: vec!["a".into(), "b".into(), "c".into()],
            priors: vec![0.4, 0.4, 0.2],
            sources: (0..3)
                .map(|j| SourceProfile {
                    id: format!("s{j}"),
                    reliability: vec![reliability; 3],
                    temperature: 0.2,
                })
                .collect(),
            n_samples,
            n_trials: 2,
            seed: 5,
            fusion: Default::default(),
        }
    }

    #[test]
    fn method_names_parse_back() {
        let settings = FusionSettings::default();
        let mut all = Method::standard(&settings);
        all.push(Method::VoteThreshold);
        all.extend(CombinationOperator::ALL.map(Method::Possibility));
        for m in all {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!(
            parse_methods("vote-majority, possibility ,all", &settings)
                .unwrap()
                .len(),
            6
        );
        assert!(parse_methods("", &settings).is_err());
        assert!(parse_methods("vote_borda", &settings).is_err());
        assert!(parse_methods("possibility_sum", &settings).is_err());
    }

    #[test]
    fn perfect_sources_are_perfectly_fused() {
        let config = scenario(1.0, 90);
        let methods = Method::standard(&config.fusion);
        let report = run_experiment(&config, &methods).unwrap();
        let majority = report.method(Method::VoteMajority).unwrap();
        assert_eq!(majority.accuracy, 1.0);
        assert_eq!(majority.conflict_rate, 0.0);
        for m in report.methods.values() {
            assert_eq!(m.conflict_rate, 0.0);
        }
        for s in report.sources.values() {
            assert_eq!(s.accuracy, 1.0);
            assert_eq!(s.reliability_estimate, 1.0);
        }
    }

    #[test]
    fn report_is_deterministic_and_rates_are_bounded() {
        let config = scenario(0.6, 300);
        let methods = Method::standard(&config.fusion);
        let a = run_experiment(&config, &methods).unwrap();
        let b = run_experiment(&config, &methods).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.n_trials, 2);
        for m in a.methods.values() {
            assert!((0.0..=1.0).contains(&m.accuracy));
            assert!((0.0..=1.0).contains(&m.conflict_rate));
        }
        assert!(a
            .method(Method::VoteMajority)
            .unwrap()
            .mean_conflict_mass
            .is_none());
        let mass = a
            .method(Method::BeliefDenoeux)
            .unwrap()
            .mean_conflict_mass
            .unwrap();
        assert!((0.0..=1.0).contains(&mass));
        assert_eq!(
            ExperimentReport::from_json(&a.to_json().unwrap()).unwrap(),
            a
        );
    }

    #[test]
    fn too_small_dataset_is_rejected() {
        let config = scenario(0.9, 2);
        assert!(matches!(
            run_experiment(&config, &[Method::VoteMajority]),
            Err(FusionError::TooSmallToSplit(2))
        ));
        let config = scenario(0.9, 30);
        assert!(run_experiment(&config, &[]).is_err());
    }

    #[test]
    fn threshold_method_uses_settings() {
        let mut config = scenario(0.7, 300);
        config.fusion.vote.c = 1.0;
        let r = run_experiment(&config, &[Method::VoteThreshold, Method::VoteMajority]).unwrap();
        // c = 1 demands unanimity, so it conflicts at least as often
        let strict = r.method(Method::VoteThreshold).unwrap();
        let plain = r.method(Method::VoteMajority).unwrap();
        assert!(strict.conflict_rate >= plain.conflict_rate);
    }
}
