//! Randomized checkers for preference axioms and a grid classifier for
//! bracketing regions.
//!
//! Checkers never claim an axiom holds: a clean run is reported as
//! [`AxiomVerdict::NoViolationFound`]. Every trial draws from its own
//! ChaCha stream keyed by `(seed, trial)`, so reports do not depend on how
//! trials are scheduled across threads.

mod checks;
mod classify;
mod sampler;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::index::UtilityIndex;
use crate::lottery::JointLottery;
use crate::model::{compare, ModelSpec, Preference, ReprError, Verdict, DEFAULT_BAND};

pub use classify::{classify_bracketing, BracketingLabel, BracketingReport, SourceRegion};
pub use sampler::{InjectedCase, SamplerConfig};

use sampler::Trial;

/// Largest number of counterexamples kept in a report.
pub const MAX_STORED_COUNTEREXAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error("sampler exhausted: only {found} of {trials} trials met the preconditions")]
    PreconditionSamplerExhausted { found: usize, trials: usize },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
}

/// A total comparator over joint lotteries.
pub trait PreferenceOracle: Sync {
    fn compare(&self, p: &JointLottery, q: &JointLottery) -> Result<Preference, ReprError>;

    /// Smallest outcome the oracle can evaluate in either source.
    fn outcome_floor(&self) -> f64 {
        f64::NEG_INFINITY
    }
}

/// Oracle backed by a representation model and a fixed indifference band.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOracle {
    pub model: ModelSpec,
    pub band: f64,
}

impl ModelOracle {
    pub fn new(model: ModelSpec) -> Self {
        Self {
            model,
            band: DEFAULT_BAND,
        }
    }
}

impl PreferenceOracle for ModelOracle {
    fn compare(&self, p: &JointLottery, q: &JointLottery) -> Result<Preference, ReprError> {
        compare(&self.model, p, q, self.band)
    }

    fn outcome_floor(&self) -> f64 {
        self.model.outcome_floor()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxiomId {
    Monotonicity,
    Independence,
    BiIndependence,
    CorrelationNeglect,
    MultilinearIndependence,
    ConditionalIndependence,
    WeakMultilinearIndependence,
    CorrelationConsistency,
    ForwardCorrelationConsistency,
    BroadBracketingNoRisk,
    Symmetry,
    HistoryIndependence,
    Stationarity,
    Recursivity,
    CorrelationAversion,
    LongRunRiskAversion,
    OrdinalDominance,
    /// Riskless rankings agree with `u(x1) + beta u(x2)`.
    DiscountedUtilityNoRisk { u: UtilityIndex, beta: f64 },
}

impl AxiomId {
    /// Every axiom that needs no extra parameters.
    pub const PARAMETERLESS: [AxiomId; 17] = [
        AxiomId::Monotonicity,
        AxiomId::Independence,
        AxiomId::BiIndependence,
        AxiomId::CorrelationNeglect,
        AxiomId::MultilinearIndependence,
        AxiomId::ConditionalIndependence,
        AxiomId::WeakMultilinearIndependence,
        AxiomId::CorrelationConsistency,
        AxiomId::ForwardCorrelationConsistency,
        AxiomId::BroadBracketingNoRisk,
        AxiomId::Symmetry,
        AxiomId::HistoryIndependence,
        AxiomId::Stationarity,
        AxiomId::Recursivity,
        AxiomId::CorrelationAversion,
        AxiomId::LongRunRiskAversion,
        AxiomId::OrdinalDominance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::Monotonicity => "Monotonicity",
            AxiomId::Independence => "Independence",
            AxiomId::BiIndependence => "BiIndependence",
            AxiomId::CorrelationNeglect => "CorrelationNeglect",
            AxiomId::MultilinearIndependence => "MultilinearIndependence",
            AxiomId::ConditionalIndependence => "ConditionalIndependence",
            AxiomId::WeakMultilinearIndependence => "WeakMultilinearIndependence",
            AxiomId::CorrelationConsistency => "CorrelationConsistency",
            AxiomId::ForwardCorrelationConsistency => "ForwardCorrelationConsistency",
            AxiomId::BroadBracketingNoRisk => "BroadBracketingNoRisk",
            AxiomId::Symmetry => "Symmetry",
            AxiomId::HistoryIndependence => "HistoryIndependence",
            AxiomId::Stationarity => "Stationarity",
            AxiomId::Recursivity => "Recursivity",
            AxiomId::CorrelationAversion => "CorrelationAversion",
            AxiomId::LongRunRiskAversion => "LongRunRiskAversion",
            AxiomId::OrdinalDominance => "OrdinalDominance",
            AxiomId::DiscountedUtilityNoRisk { .. } => "DiscountedUtilityNoRisk",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

impl FromStr for AxiomId {
    type Err = String;

    /// Case- and separator-insensitive: `bi-independence`, `BiIndependence`
    /// and `bi_independence` all parse. `DiscountedUtilityNoRisk` needs a
    /// candidate index and cannot be parsed from a name alone.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = squash(s);
        AxiomId::PARAMETERLESS
            .iter()
            .find(|a| squash(a.name()) == key)
            .cloned()
            .ok_or_else(|| format!("unknown axiom {s:?}"))
    }
}

/// One recorded oracle query.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub left: String,
    pub right: String,
    pub verdict: Verdict,
}

/// The lotteries and verdicts of a failing tuple.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Counterexample {
    pub lotteries: Vec<(String, JointLottery)>,
    pub comparisons: Vec<Comparison>,
    pub alpha: Option<f64>,
    pub note: String,
}

impl Counterexample {
    pub(crate) fn record(
        &mut self,
        a_name: &str,
        a: &JointLottery,
        b_name: &str,
        b: &JointLottery,
        verdict: Verdict,
    ) {
        for (name, lottery) in [(a_name, a), (b_name, b)] {
            match self.lotteries.iter().find(|(n, _)| n == name) {
                Some((_, existing)) => debug_assert_eq!(existing, lottery, "name {name} reused"),
                None => self.lotteries.push((name.to_string(), lottery.clone())),
            }
        }
        self.comparisons.push(Comparison {
            left: a_name.to_string(),
            right: b_name.to_string(),
            verdict,
        });
    }

    pub fn lottery(&self, name: &str) -> Option<&JointLottery> {
        self.lotteries.iter().find(|(n, _)| n == name).map(|(_, l)| l)
    }

    /// Re-run every recorded comparison and check the verdicts reproduce.
    pub fn reverify(&self, oracle: &dyn PreferenceOracle) -> bool {
        self.comparisons.iter().all(|c| {
            match (self.lottery(&c.left), self.lottery(&c.right)) {
                (Some(a), Some(b)) => oracle
                    .compare(a, b)
                    .map(|p| p.verdict == c.verdict)
                    .unwrap_or(false),
                _ => false,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomVerdict {
    NoViolationFound,
    Violated,
}

impl fmt::Display for AxiomVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomVerdict::NoViolationFound => "NoViolationFound",
            AxiomVerdict::Violated => "Violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub trials: usize,
    /// Trials whose tuple met the axiom's preconditions.
    pub tuples: usize,
    /// Tuples whose strict antecedent failed, so the axiom held trivially.
    pub vacuous: usize,
    pub violation_count: usize,
    /// The first violations in trial order, at most
    /// [`MAX_STORED_COUNTEREXAMPLES`].
    pub violations: Vec<Counterexample>,
    pub verdict: AxiomVerdict,
}

impl AxiomReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} tuples from {} trials, {} vacuous, {} violations)",
            self.axiom, self.verdict, self.tuples, self.trials, self.vacuous, self.violation_count
        )
    }
}

pub(crate) enum Outcome {
    Skipped,
    Held,
    /// Preconditions met but the strict antecedent failed.
    Vacuous,
    Violated(Counterexample),
}

pub(crate) struct Setup<'a> {
    pub oracle: &'a dyn PreferenceOracle,
    pub cfg: &'a SamplerConfig,
    pub grid: Vec<f64>,
}

impl<'a> Setup<'a> {
    pub fn trial(&self, stream: u64) -> Trial<'_> {
        Trial::new(
            self.oracle,
            &self.grid,
            &self.cfg.mixture_weights,
            self.cfg.max_support,
            self.cfg.seed,
            stream,
        )
    }

    /// Run `n` indexed trials in parallel and fold the outcomes in index order.
    pub fn run<F>(&self, axiom: AxiomId, n: usize, f: F) -> Result<AxiomReport, AxiomError>
    where
        F: Fn(&mut Trial<'_>, usize) -> Outcome + Sync,
    {
        let outcomes: Vec<Outcome> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut trial = self.trial(k as u64);
                f(&mut trial, k)
            })
            .collect();
        let mut tuples = 0;
        let mut vacuous = 0;
        let mut violation_count = 0;
        let mut violations = Vec::new();
        for outcome in outcomes {
            match outcome {
                Outcome::Skipped => {}
                Outcome::Held => tuples += 1,
                Outcome::Vacuous => {
                    tuples += 1;
                    vacuous += 1;
                }
                Outcome::Violated(cx) => {
                    tuples += 1;
                    violation_count += 1;
                    if violations.len() < MAX_STORED_COUNTEREXAMPLES {
                        violations.push(cx);
                    }
                }
            }
        }
        if violation_count == 0 && tuples < required_tuples(n) {
            return Err(AxiomError::PreconditionSamplerExhausted { found: tuples, trials: n });
        }
        Ok(AxiomReport {
            axiom,
            trials: n,
            tuples,
            vacuous,
            violation_count,
            violations,
            verdict: if violation_count > 0 {
                AxiomVerdict::Violated
            } else {
                AxiomVerdict::NoViolationFound
            },
        })
    }
}

/// A clean report needs at least one tuple per 20 trials.
fn required_tuples(trials: usize) -> usize {
    trials.div_ceil(20).max(1)
}

/// Sample tuples meeting the axiom's preconditions and test its conclusion
/// against `oracle`.
pub fn check_axiom(
    axiom: &AxiomId,
    oracle: &dyn PreferenceOracle,
    cfg: &SamplerConfig,
) -> Result<AxiomReport, AxiomError> {
    cfg.validate().map_err(AxiomError::InvalidConfig)?;
    let grid = cfg.points(oracle.outcome_floor());
    if grid.len() < 2 {
        return Err(AxiomError::InvalidConfig(
            "fewer than two grid points inside the oracle's domain".into(),
        ));
    }
    let setup = Setup { oracle, cfg, grid };
    checks::run(axiom, &setup)
}
