//! Grid detection of the outcomes at which one source's conditional
//! preference looks past the other source's narrow certainty equivalent.

use std::fmt;

use rayon::prelude::*;

use crate::lottery::{JointLottery, Source};
use crate::model::Verdict;

use super::sampler::{SamplerConfig, Trial};
use super::{AxiomError, PreferenceOracle};

/// Grid estimate of one bracketing region.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceRegion {
    /// Source whose outcomes index the region.
    pub source: Source,
    pub tested: Vec<f64>,
    /// Grid points with a witness `(p, q) !~ (p', q)` for narrowly
    /// indifferent `p ~ p'`.
    pub witnesses: Vec<f64>,
    /// Witnesses widened to grid cells and merged.
    pub cells: Vec<(f64, f64)>,
}

impl SourceRegion {
    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn is_full(&self) -> bool {
        !self.tested.is_empty() && self.witnesses.len() == self.tested.len()
    }

    fn describe(&self) -> String {
        if self.is_empty() {
            return "narrow (no witness found)".into();
        }
        let cells: Vec<String> = self
            .cells
            .iter()
            .map(|(a, b)| format!("({a}, {b})"))
            .collect();
        format!(
            "{} of {} grid points broad: {}",
            self.witnesses.len(),
            self.tested.len(),
            cells.join(" u ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BracketingLabel {
    BroadEverywhere,
    NarrowSource1,
    NarrowSource2,
    NarrowBoth,
    /// Partial regions in both sources, with their cell estimates.
    Mixed {
        h1: Vec<(f64, f64)>,
        h2: Vec<(f64, f64)>,
    },
}

impl fmt::Display for BracketingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketingLabel::BroadEverywhere => f.write_str("BroadEverywhere"),
            BracketingLabel::NarrowSource1 => f.write_str("NarrowSource1"),
            BracketingLabel::NarrowSource2 => f.write_str("NarrowSource2"),
            BracketingLabel::NarrowBoth => f.write_str("NarrowBoth"),
            BracketingLabel::Mixed { h1, h2 } => write!(f, "Mixed(H1 = {h1:?}, H2 = {h2:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketingReport {
    /// Source-1 outcomes at which source-2 risk is not bracketed narrowly.
    pub sigma1: SourceRegion,
    /// Source-2 outcomes at which source-1 risk is not bracketed narrowly.
    pub sigma2: SourceRegion,
    pub label: BracketingLabel,
}

impl BracketingReport {
    pub fn summary(&self) -> String {
        format!(
            "label: {}\nsigma1: {}\nsigma2: {}",
            self.label,
            self.sigma1.describe(),
            self.sigma2.describe()
        )
    }
}

fn cells(witnesses: &[f64], tested: &[f64], step: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut prev_index: Option<usize> = None;
    for &w in witnesses {
        let idx = tested.iter().position(|&x| x == w).expect("witness is a tested point");
        let cell = (w - step / 2.0, w + step / 2.0);
        match (out.last_mut(), prev_index) {
            (Some(last), Some(p)) if p + 1 == idx => last.1 = cell.1,
            _ => out.push(cell),
        }
        prev_index = Some(idx);
    }
    out
}

/// Search for a witness at the fixed outcome `z` of `fixed`: a lottery `p`
/// in the other source and its narrow certainty equivalent `delta_t`, with
/// `(p, z)` and `(delta_t, z)` ranked strictly. Returns whether one was found
/// and whether any calibration succeeded.
fn witness_at(t: &mut Trial<'_>, fixed: Source, z: f64, attempts: usize) -> (bool, bool) {
    let varied = fixed.other();
    let dz = t.degenerate(fixed, z);
    let mut calibrated = false;
    for _ in 0..attempts {
        let k = rand::Rng::gen_range(&mut t.rng, 2..=t.max_support.max(2));
        let p = t.marginal_of_size(varied, k);
        if p.is_degenerate() {
            continue;
        }
        let Some(ce) = t.narrow_ce(&p) else { continue };
        calibrated = true;
        let sure = t.degenerate(varied, ce);
        let (a, b): (JointLottery, JointLottery) = (t.pair(varied, &p, &dz), t.pair(varied, &sure, &dz));
        if let Ok(pref) = t.oracle.compare(&a, &b) {
            if pref.verdict != Verdict::Indifferent {
                return (true, true);
            }
        }
    }
    (false, calibrated)
}

fn region(
    oracle: &dyn PreferenceOracle,
    cfg: &SamplerConfig,
    grid: &[f64],
    fixed: Source,
) -> (SourceRegion, bool) {
    let tested: Vec<f64> = grid[1..grid.len() - 1].to_vec();
    let attempts = (cfg.trials / (2 * tested.len().max(1))).clamp(4, 250);
    let offset = match fixed {
        Source::One => 0,
        Source::Two => 1 << 32,
    };
    let found: Vec<(bool, bool)> = tested
        .par_iter()
        .enumerate()
        .map(|(k, &z)| {
            let mut t = Trial::new(
                oracle,
                grid,
                &cfg.mixture_weights,
                cfg.max_support,
                cfg.seed,
                offset + k as u64,
            );
            witness_at(&mut t, fixed, z, attempts)
        })
        .collect();
    let any_calibrated = found.iter().any(|f| f.1);
    let witnesses: Vec<f64> = tested
        .iter()
        .zip(&found)
        .filter(|(_, f)| f.0)
        .map(|(&z, _)| z)
        .collect();
    let cells = cells(&witnesses, &tested, cfg.step);
    (
        SourceRegion {
            source: fixed,
            tested,
            witnesses,
            cells,
        },
        any_calibrated,
    )
}

/// Estimate both bracketing regions on the interior points of the
/// configured grid and summarize them.
pub fn classify_bracketing(
    oracle: &dyn PreferenceOracle,
    cfg: &SamplerConfig,
) -> Result<BracketingReport, AxiomError> {
    cfg.validate().map_err(AxiomError::InvalidConfig)?;
    let grid = cfg.points(oracle.outcome_floor());
    if grid.len() < 3 {
        return Err(AxiomError::InvalidConfig(
            "need at least three grid points inside the oracle's domain".into(),
        ));
    }
    let (sigma1, ok1) = region(oracle, cfg, &grid, Source::One);
    let (sigma2, ok2) = region(oracle, cfg, &grid, Source::Two);
    if !ok1 && !ok2 {
        return Err(AxiomError::PreconditionSamplerExhausted {
            found: 0,
            trials: cfg.trials,
        });
    }
    let label = match (sigma1.is_empty(), sigma2.is_empty()) {
        (true, true) => BracketingLabel::NarrowBoth,
        (true, false) => BracketingLabel::NarrowSource2,
        (false, true) => BracketingLabel::NarrowSource1,
        (false, false) if sigma1.is_full() && sigma2.is_full() => BracketingLabel::BroadEverywhere,
        (false, false) => BracketingLabel::Mixed {
            h1: sigma1.cells.clone(),
            h2: sigma2.cells.clone(),
        },
    };
    Ok(BracketingReport {
        sigma1,
        sigma2,
        label,
    })
}
