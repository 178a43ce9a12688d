//! Representation families over joint lotteries and the preference
//! comparator built on top of them.

use std::fmt;

use thiserror::Error;

use crate::index::{self, check_crra, sweep_interval, BivariateIndex, IndexError, UtilityIndex};
use crate::lottery::{JointLottery, LotteryError, MarginalLottery, Source};

/// Default relative indifference band used by [`compare`].
pub const DEFAULT_BAND: f64 = 1e-9;

const AFFINE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReprError {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("lambda-mixture model is only defined on product lotteries")]
    NonProductLottery,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
}

/// Finite union of disjoint open intervals not containing 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpenSet1D {
    intervals: Vec<(f64, f64)>,
}

impl OpenSet1D {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self, ReprError> {
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(lo, hi) in &intervals {
            if lo.is_nan() || hi.is_nan() || !(lo < hi) {
                return Err(ReprError::InvalidModel(format!(
                    "open interval ({lo}, {hi}) is empty"
                )));
            }
            if lo < 0.0 && 0.0 < hi {
                return Err(ReprError::InvalidModel(format!(
                    "open set may not contain 0, but ({lo}, {hi}) does"
                )));
            }
        }
        if intervals.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(ReprError::InvalidModel(
                "open set intervals overlap".into(),
            ));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Strict membership: boundary points are outside.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
    }

    /// Finite endpoints of the intervals.
    pub fn boundary(&self) -> Vec<f64> {
        let mut points: Vec<f64> = self
            .intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .filter(|x| x.is_finite())
            .collect();
        points.dedup();
        points
    }
}

/// One representation family together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Eu {
        w: BivariateIndex,
    },
    EuCn {
        w: BivariateIndex,
    },
    Nb {
        w: BivariateIndex,
        v1: UtilityIndex,
        v2: UtilityIndex,
    },
    Bib {
        w: BivariateIndex,
        v2: UtilityIndex,
    },
    Fib {
        w: BivariateIndex,
        v1: UtilityIndex,
    },
    BibCn {
        w: BivariateIndex,
        v2: UtilityIndex,
    },
    FibCn {
        w: BivariateIndex,
        v1: UtilityIndex,
    },
    GbibCn {
        w: BivariateIndex,
        v1: UtilityIndex,
        v2: UtilityIndex,
        h2: OpenSet1D,
    },
    GfibCn {
        w: BivariateIndex,
        v1: UtilityIndex,
        v2: UtilityIndex,
        h1: OpenSet1D,
    },
    /// Expected discounted utility `E u(x) + beta E u(y)`.
    Edu {
        u: UtilityIndex,
        beta: f64,
    },
    /// Kihlstrom-Mirman: `E phi((u(x) + beta u(y)) / (1 + beta))`.
    Km {
        u: UtilityIndex,
        beta: f64,
        phi: UtilityIndex,
    },
    /// `sum_x phi(u(x) + beta u(CE_{phi o u}(P_{2|x}))) P_1(x)`.
    KmBib {
        phi: UtilityIndex,
        u: UtilityIndex,
        beta: f64,
    },
    /// Two-period CRRA-CES KM-BIB, reported in certainty-equivalent units.
    CrraCesKmBib {
        rho: f64,
        alpha: f64,
        beta: f64,
    },
    /// `lambda E u(x + y) + (1 - lambda) (E u(x) + E u(y))` on product lotteries.
    LambdaMix {
        u: UtilityIndex,
        lambda: f64,
    },
}

impl ModelSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ModelSpec::Eu { .. } => "eu",
            ModelSpec::EuCn { .. } => "eu_cn",
            ModelSpec::Nb { .. } => "nb",
            ModelSpec::Bib { .. } => "bib",
            ModelSpec::Fib { .. } => "fib",
            ModelSpec::BibCn { .. } => "bib_cn",
            ModelSpec::FibCn { .. } => "fib_cn",
            ModelSpec::GbibCn { .. } => "gbib_cn",
            ModelSpec::GfibCn { .. } => "gfib_cn",
            ModelSpec::Edu { .. } => "edu",
            ModelSpec::Km { .. } => "km",
            ModelSpec::KmBib { .. } => "km_bib",
            ModelSpec::CrraCesKmBib { .. } => "crra_ces_kmbib",
            ModelSpec::LambdaMix { .. } => "lambda_mix",
        }
    }

    /// Check scalar parameter ranges.
    pub fn check(&self) -> Result<(), ReprError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ReprError::InvalidModel(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        match self {
            ModelSpec::Edu { beta, .. } | ModelSpec::Km { beta, .. } | ModelSpec::KmBib { beta, .. } => {
                unit("beta", *beta)
            }
            ModelSpec::LambdaMix { lambda, .. } => unit("lambda", *lambda),
            ModelSpec::CrraCesKmBib { rho, alpha, beta } => {
                check_crra(*rho, *alpha, *beta).map_err(ReprError::from)
            }
            _ => Ok(()),
        }
    }

    /// Whether the family lives on consumption streams (`R+` outcomes).
    pub fn is_time_family(&self) -> bool {
        matches!(
            self,
            ModelSpec::Edu { .. }
                | ModelSpec::Km { .. }
                | ModelSpec::KmBib { .. }
                | ModelSpec::CrraCesKmBib { .. }
        )
    }

    /// Lower bound of the outcomes the model can evaluate, across both sources.
    pub fn outcome_floor(&self) -> f64 {
        let w_floor = |w: &BivariateIndex| {
            let (a, _, c, _) = w.domain();
            a.max(c)
        };
        let v_floor = |v: &UtilityIndex| v.domain().0;
        let floor = match self {
            ModelSpec::Eu { w } | ModelSpec::EuCn { w } => w_floor(w),
            ModelSpec::Nb { w, v1, v2 }
            | ModelSpec::GbibCn { w, v1, v2, .. }
            | ModelSpec::GfibCn { w, v1, v2, .. } => w_floor(w).max(v_floor(v1)).max(v_floor(v2)),
            ModelSpec::Bib { w, v2 } | ModelSpec::BibCn { w, v2 } => w_floor(w).max(v_floor(v2)),
            ModelSpec::Fib { w, v1 } | ModelSpec::FibCn { w, v1 } => w_floor(w).max(v_floor(v1)),
            ModelSpec::LambdaMix { u, .. } => v_floor(u),
            _ => 0.0,
        };
        if self.is_time_family() {
            floor.max(0.0)
        } else {
            floor
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family_name())
    }
}

fn require_nonnegative(p: &JointLottery) -> Result<(), ReprError> {
    match p.atoms().iter().find(|a| a.x < 0.0 || a.y < 0.0) {
        Some(a) => Err(ReprError::DomainViolation(format!(
            "negative consumption ({}, {}) in a time-preference model",
            a.x, a.y
        ))),
        None => Ok(()),
    }
}

fn bracket_source2(
    w: &BivariateIndex,
    p1: &MarginalLottery,
    y: f64,
) -> Result<f64, ReprError> {
    let mut total = 0.0;
    for &(x, px) in p1.atoms() {
        total += w.eval(x, y)? * px;
    }
    Ok(total)
}

fn bracket_source1(
    w: &BivariateIndex,
    x: f64,
    p2: &MarginalLottery,
) -> Result<f64, ReprError> {
    let mut total = 0.0;
    for &(y, py) in p2.atoms() {
        total += w.eval(x, y)? * py;
    }
    Ok(total)
}

/// The utility `V(P)` of a joint lottery under `model`.
pub fn evaluate(model: &ModelSpec, p: &JointLottery) -> Result<f64, ReprError> {
    match model {
        ModelSpec::Eu { w } => {
            let mut total = 0.0;
            for a in p.atoms() {
                total += w.eval(a.x, a.y)? * a.p;
            }
            Ok(total)
        }
        ModelSpec::EuCn { w } => {
            let (p1, p2) = (p.marginal(Source::One), p.marginal(Source::Two));
            let mut total = 0.0;
            for &(x, px) in p1.atoms() {
                total += bracket_source1(w, x, &p2)? * px;
            }
            Ok(total)
        }
        ModelSpec::Nb { w, v1, v2 } => {
            let c1 = v1.ce(&p.marginal(Source::One))?;
            let c2 = v2.ce(&p.marginal(Source::Two))?;
            Ok(w.eval(c1, c2)?)
        }
        ModelSpec::Bib { w, v2 } => {
            let mut total = 0.0;
            for &(x, px) in p.marginal(Source::One).atoms() {
                let c2 = v2.ce(&p.conditional(Source::One, x)?)?;
                total += w.eval(x, c2)? * px;
            }
            Ok(total)
        }
        ModelSpec::Fib { w, v1 } => {
            let mut total = 0.0;
            for &(y, py) in p.marginal(Source::Two).atoms() {
                let c1 = v1.ce(&p.conditional(Source::Two, y)?)?;
                total += w.eval(c1, y)? * py;
            }
            Ok(total)
        }
        ModelSpec::BibCn { w, v2 } => {
            let c2 = v2.ce(&p.marginal(Source::Two))?;
            bracket_source2(w, &p.marginal(Source::One), c2)
        }
        ModelSpec::FibCn { w, v1 } => {
            let c1 = v1.ce(&p.marginal(Source::One))?;
            bracket_source1(w, c1, &p.marginal(Source::Two))
        }
        ModelSpec::GbibCn { w, v1, v2, h2 } => {
            let p1 = p.marginal(Source::One);
            let c2 = v2.ce(&p.marginal(Source::Two))?;
            if h2.contains(c2) {
                bracket_source2(w, &p1, c2)
            } else {
                Ok(w.eval(v1.ce(&p1)?, c2)?)
            }
        }
        ModelSpec::GfibCn { w, v1, v2, h1 } => {
            let p2 = p.marginal(Source::Two);
            let c1 = v1.ce(&p.marginal(Source::One))?;
            if h1.contains(c1) {
                bracket_source1(w, c1, &p2)
            } else {
                Ok(w.eval(c1, v2.ce(&p2)?)?)
            }
        }
        ModelSpec::Edu { u, beta } => {
            require_nonnegative(p)?;
            let mut total = 0.0;
            for a in p.atoms() {
                total += (u.eval(a.x)? + beta * u.eval(a.y)?) * a.p;
            }
            Ok(total)
        }
        ModelSpec::Km { u, beta, phi } => {
            require_nonnegative(p)?;
            let mut total = 0.0;
            for a in p.atoms() {
                let lifetime = (u.eval(a.x)? + beta * u.eval(a.y)?) / (1.0 + beta);
                total += phi.eval(lifetime)? * a.p;
            }
            Ok(total)
        }
        ModelSpec::KmBib { phi, u, beta } => {
            require_nonnegative(p)?;
            let risk = UtilityIndex::compose(phi.clone(), u.clone());
            let mut total = 0.0;
            for &(x, px) in p.marginal(Source::One).atoms() {
                let c2 = risk.ce(&p.conditional(Source::One, x)?)?;
                total += phi.eval(u.eval(x)? + beta * u.eval(c2)?)? * px;
            }
            Ok(total)
        }
        ModelSpec::CrraCesKmBib { rho, alpha, beta } => {
            require_nonnegative(p)?;
            if (*rho < 0.0 || *alpha < 0.0) && p.atoms().iter().any(|a| a.x == 0.0 || a.y == 0.0) {
                return Err(ReprError::DomainViolation(
                    "zero consumption with a negative CRRA exponent".into(),
                ));
            }
            let mut total = 0.0;
            for &(x, px) in p.marginal(Source::One).atoms() {
                let cond = p.conditional(Source::One, x)?;
                let future = power_mean(*alpha, cond.atoms().iter().copied());
                total += index::ces(*rho, *beta, x, future).powf(*alpha) * px;
            }
            Ok(total.powf(1.0 / alpha))
        }
        ModelSpec::LambdaMix { u, lambda } => {
            if !p.is_product() {
                return Err(ReprError::NonProductLottery);
            }
            let (p1, p2) = (p.marginal(Source::One), p.marginal(Source::Two));
            let mut broad = 0.0;
            for &(x, px) in p1.atoms() {
                for &(y, py) in p2.atoms() {
                    broad += u.eval(x + y)? * px * py;
                }
            }
            let mut narrow = 0.0;
            for &(x, px) in p1.atoms() {
                narrow += u.eval(x)? * px;
            }
            for &(y, py) in p2.atoms() {
                narrow += u.eval(y)? * py;
            }
            Ok(lambda * broad + (1.0 - lambda) * narrow)
        }
    }
}

/// `(E c^alpha)^(1/alpha)` over `(c, p)` pairs; exact for degenerate input.
pub(crate) fn power_mean(alpha: f64, atoms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let atoms: Vec<(f64, f64)> = atoms.collect();
    if let [(c, _)] = atoms.as_slice() {
        return *c;
    }
    atoms
        .iter()
        .map(|&(c, p)| c.powf(alpha) * p)
        .sum::<f64>()
        .powf(1.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    StrictlyPrefers,
    Indifferent,
    StrictlyDispreferred,
}

impl Verdict {
    pub fn flip(self) -> Verdict {
        match self {
            Verdict::StrictlyPrefers => Verdict::StrictlyDispreferred,
            Verdict::Indifferent => Verdict::Indifferent,
            Verdict::StrictlyDispreferred => Verdict::StrictlyPrefers,
        }
    }

    /// Weak preference `>=`.
    pub fn at_least(self) -> bool {
        self != Verdict::StrictlyDispreferred
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::StrictlyPrefers => "StrictlyPrefers",
            Verdict::Indifferent => "Indifferent",
            Verdict::StrictlyDispreferred => "StrictlyDispreferred",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of comparing two lotteries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preference {
    pub verdict: Verdict,
    pub utilities: (f64, f64),
    pub band: f64,
}

impl Preference {
    /// Classify a pair of utilities: indifference iff
    /// `|a - b| <= band * max(1, |a|, |b|)`.
    pub fn from_utilities(a: f64, b: f64, band: f64) -> Self {
        let scale = 1f64.max(a.abs()).max(b.abs());
        let verdict = if (a - b).abs() <= band * scale {
            Verdict::Indifferent
        } else if a > b {
            Verdict::StrictlyPrefers
        } else {
            Verdict::StrictlyDispreferred
        };
        Self {
            verdict,
            utilities: (a, b),
            band,
        }
    }
}

pub fn compare(
    model: &ModelSpec,
    p: &JointLottery,
    q: &JointLottery,
    band: f64,
) -> Result<Preference, ReprError> {
    let a = evaluate(model, p)?;
    let b = evaluate(model, q)?;
    Ok(Preference::from_utilities(a, b, band))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub worst_deviation: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub family: &'static str,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_deviation(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.worst_deviation)
            .fold(0.0, f64::max)
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = sweep_interval(lo, hi);
    (0..n)
        .map(|k| a + (b - a) * (k as f64 + 0.5) / n as f64)
        .collect()
}

fn check_monotone_index(name: &str, f: &UtilityIndex, n: usize) -> ValidationCheck {
    let (lo, hi) = f.domain();
    let xs = grid(lo, hi, n);
    let mut failure = None;
    let mut prev: Option<f64> = None;
    for &x in &xs {
        match f.eval(x) {
            Ok(v) => {
                if prev.is_some_and(|p| !(v > p)) {
                    failure = Some(format!("not strictly increasing at {x}"));
                    break;
                }
                prev = Some(v);
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    ValidationCheck {
        name: format!("{name} strictly increasing"),
        passed: failure.is_none(),
        worst_deviation: 0.0,
        detail: failure.unwrap_or_else(|| format!("{n} grid points")),
    }
}

fn check_monotone_bivariate(w: &BivariateIndex, n: usize) -> ValidationCheck {
    let (lo1, hi1, lo2, hi2) = w.domain();
    let xs = grid(lo1, hi1, n);
    let ys = grid(lo2, hi2, n);
    let mut failure = None;
    'outer: for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let here = match w.eval(x, y) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e.to_string());
                    break 'outer;
                }
            };
            let right = xs.get(i + 1).map(|&x2| w.eval(x2, y));
            let up = ys.get(j + 1).map(|&y2| w.eval(x, y2));
            for next in [right, up].into_iter().flatten() {
                match next {
                    Ok(v) if v > here => {}
                    Ok(_) => {
                        failure = Some(format!("w not strictly increasing near ({x}, {y})"));
                        break 'outer;
                    }
                    Err(e) => {
                        failure = Some(e.to_string());
                        break 'outer;
                    }
                }
            }
        }
    }
    ValidationCheck {
        name: "w strictly increasing in each argument".into(),
        passed: failure.is_none(),
        worst_deviation: 0.0,
        detail: failure.unwrap_or_else(|| format!("{n}x{n} grid")),
    }
}

/// Fit `slice ~ a * v + b` through the first and last grid points and report
/// the worst relative deviation on the grid.
fn affine_slice_check(
    label: String,
    xs: &[f64],
    slice: impl Fn(f64) -> Result<f64, IndexError>,
    v: &UtilityIndex,
) -> ValidationCheck {
    let fit = || -> Result<(f64, f64, f64), IndexError> {
        let (xa, xb) = (xs[0], xs[xs.len() - 1]);
        let (va, vb) = (v.eval(xa)?, v.eval(xb)?);
        let a = (slice(xb)? - slice(xa)?) / (vb - va);
        let b = slice(xa)? - a * va;
        let mut worst = 0.0f64;
        for &x in xs {
            let actual = slice(x)?;
            let dev = (actual - (a * v.eval(x)? + b)).abs() / 1f64.max(actual.abs());
            worst = worst.max(dev);
        }
        Ok((a, b, worst))
    };
    match fit() {
        Ok((a, b, worst)) => ValidationCheck {
            passed: a > 0.0 && worst <= AFFINE_TOLERANCE,
            worst_deviation: worst,
            detail: format!("fitted a = {a}, b = {b}"),
            name: label,
        },
        Err(e) => ValidationCheck {
            passed: false,
            worst_deviation: f64::INFINITY,
            detail: e.to_string(),
            name: label,
        },
    }
}

/// Check index monotonicity on a grid of `resolution` points per axis and,
/// for the generalized families, the positive-affine boundary condition.
pub fn validate_model(model: &ModelSpec, resolution: usize) -> ValidationReport {
    let n = resolution.max(3);
    let mut checks = Vec::new();
    if let Err(e) = model.check() {
        checks.push(ValidationCheck {
            name: "parameters".into(),
            passed: false,
            worst_deviation: 0.0,
            detail: e.to_string(),
        });
    }
    let mut w_of = None;
    let mut indices: Vec<(&str, &UtilityIndex)> = Vec::new();
    match model {
        ModelSpec::Eu { w } | ModelSpec::EuCn { w } => w_of = Some(w),
        ModelSpec::Nb { w, v1, v2 }
        | ModelSpec::GbibCn { w, v1, v2, .. }
        | ModelSpec::GfibCn { w, v1, v2, .. } => {
            w_of = Some(w);
            indices.push(("v1", v1));
            indices.push(("v2", v2));
        }
        ModelSpec::Bib { w, v2 } | ModelSpec::BibCn { w, v2 } => {
            w_of = Some(w);
            indices.push(("v2", v2));
        }
        ModelSpec::Fib { w, v1 } | ModelSpec::FibCn { w, v1 } => {
            w_of = Some(w);
            indices.push(("v1", v1));
        }
        ModelSpec::Edu { u, .. } | ModelSpec::LambdaMix { u, .. } => indices.push(("u", u)),
        ModelSpec::Km { u, phi, .. } | ModelSpec::KmBib { phi, u, .. } => {
            indices.push(("u", u));
            indices.push(("phi", phi));
        }
        ModelSpec::CrraCesKmBib { .. } => {}
    }
    if let Some(w) = w_of {
        checks.push(check_monotone_bivariate(w, n));
    }
    for (name, f) in indices {
        checks.push(check_monotone_index(name, f, n));
    }
    match model {
        ModelSpec::GbibCn { w, v1, h2, .. } => {
            let (lo1, hi1, _, _) = w.domain();
            let (vlo, vhi) = v1.domain();
            let xs = grid(lo1.max(vlo), hi1.min(vhi), n);
            for y in h2.boundary() {
                checks.push(affine_slice_check(
                    format!("w(., {y}) positive affine in v1"),
                    &xs,
                    |x| w.eval(x, y),
                    v1,
                ));
            }
        }
        ModelSpec::GfibCn { w, v2, h1, .. } => {
            let (_, _, lo2, hi2) = w.domain();
            let (vlo, vhi) = v2.domain();
            let ys = grid(lo2.max(vlo), hi2.min(vhi), n);
            for x in h1.boundary() {
                checks.push(affine_slice_check(
                    format!("w({x}, .) positive affine in v2"),
                    &ys,
                    |y| w.eval(x, y),
                    v2,
                ));
            }
        }
        _ => {}
    }
    ValidationReport {
        family: model.family_name(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lottery::OutcomeSpace;

    fn plus() -> BivariateIndex {
        BivariateIndex::sum(UtilityIndex::identity())
    }

    fn nn() -> OutcomeSpace {
        OutcomeSpace::nonnegative()
    }

    #[test]
    fn narrow_bracketing_multilinear_example() {
        let nb = ModelSpec::Nb {
            w: plus(),
            v1: UtilityIndex::sqrt(),
            v2: UtilityIndex::sqrt(),
        };
        let p = JointLottery::degenerate(25.0, 4.5f64.powi(2), nn()).unwrap();
        assert!((evaluate(&nb, &p).unwrap() - 45.25).abs() < 1e-12);
    }

    #[test]
    fn eu_at_degenerate_lottery() {
        let w = BivariateIndex::custom("xy", (0.0, f64::INFINITY, 0.0, f64::INFINITY), |x, y| {
            x * y + x + y
        });
        let eu = ModelSpec::Eu { w };
        let p = JointLottery::degenerate(2.0, 3.0, nn()).unwrap();
        assert_eq!(evaluate(&eu, &p).unwrap(), 11.0);
    }

    #[test]
    fn bib_uses_conditional_certainty_equivalent() {
        let w = BivariateIndex::custom("x+y^2", (0.0, f64::INFINITY, 0.0, f64::INFINITY), |x, y| {
            x + y * y
        });
        let bib = ModelSpec::Bib {
            w: w.clone(),
            v2: UtilityIndex::sqrt(),
        };
        let p = JointLottery::new([(1.0, 2.0, 0.5), (1.0, 3.0, 0.5)], nn()).unwrap();
        let ce = ((2f64.sqrt() + 3f64.sqrt()) / 2.0).powi(2);
        let expected = w.eval(1.0, ce).unwrap();
        assert!((evaluate(&bib, &p).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn time_families_reject_negative_consumption() {
        let edu = ModelSpec::Edu {
            u: UtilityIndex::identity(),
            beta: 0.9,
        };
        let p = JointLottery::degenerate(-1.0, 1.0, OutcomeSpace::unbounded()).unwrap();
        assert!(matches!(evaluate(&edu, &p), Err(ReprError::DomainViolation(_))));
    }

    #[test]
    fn lambda_mix_needs_product_lottery() {
        let model = ModelSpec::LambdaMix {
            u: UtilityIndex::identity(),
            lambda: 0.5,
        };
        let r2 = OutcomeSpace::unbounded();
        let diag = JointLottery::new([(0.0, 0.0, 0.5), (1.0, 1.0, 0.5)], r2).unwrap();
        assert_eq!(evaluate(&model, &diag), Err(ReprError::NonProductLottery));
        let point = JointLottery::degenerate(1.0, 2.0, r2).unwrap();
        assert_eq!(evaluate(&model, &point).unwrap(), 0.5 * 3.0 + 0.5 * 3.0);
    }

    #[test]
    fn comparator_band() {
        let pref = Preference::from_utilities(1.0, 1.0 + 1e-10, DEFAULT_BAND);
        assert_eq!(pref.verdict, Verdict::Indifferent);
        let pref = Preference::from_utilities(1e6, 1e6 + 1e-4, DEFAULT_BAND);
        assert_eq!(pref.verdict, Verdict::Indifferent);
        let pref = Preference::from_utilities(2.0, 1.0, DEFAULT_BAND);
        assert_eq!(pref.verdict, Verdict::StrictlyPrefers);
        assert_eq!(pref.verdict.flip(), Verdict::StrictlyDispreferred);
    }

    #[test]
    fn open_sets() {
        let h = OpenSet1D::new(vec![(2.0, 5.0), (-3.0, -1.0)]).unwrap();
        assert!(h.contains(3.0) && h.contains(-2.0));
        assert!(!h.contains(2.0) && !h.contains(0.0));
        assert_eq!(h.boundary(), vec![-3.0, -1.0, 2.0, 5.0]);
        assert!(OpenSet1D::new(vec![(-1.0, 1.0)]).is_err());
        assert!(OpenSet1D::new(vec![(1.0, 3.0), (2.0, 4.0)]).is_err());
        assert!(OpenSet1D::new(vec![(0.0, f64::INFINITY)]).is_ok());
    }

    fn gbib(w: BivariateIndex, h: Vec<(f64, f64)>) -> ModelSpec {
        ModelSpec::GbibCn {
            w,
            v1: UtilityIndex::identity(),
            v2: UtilityIndex::identity(),
            h2: OpenSet1D::new(h).unwrap(),
        }
    }

    #[test]
    fn gbib_boundary_validation() {
        let additive = gbib(plus(), vec![(2.0, 5.0)]);
        let report = validate_model(&additive, 50);
        assert!(report.passed(), "{report:?}");

        let nonneg = (0.0, f64::INFINITY, 0.0, f64::INFINITY);
        let product = gbib(BivariateIndex::custom("x+xy", nonneg, |x, y| x * y + 1e-3 * x + y), vec![(2.0, 5.0)]);
        let report = validate_model(&product, 50);
        assert!(report.passed(), "{report:?}");
        let fit = report.checks.iter().find(|c| c.name.starts_with("w(., 2)")).unwrap();
        assert!(fit.detail.contains("a = 2.001"), "{}", fit.detail);

        let square = gbib(BivariateIndex::custom("x^2+y", nonneg, |x, y| x * x + y), vec![(2.0, 5.0)]);
        let report = validate_model(&square, 50);
        assert!(!report.passed());
        assert!(report.worst_deviation() > 1e-3);
    }

    #[test]
    fn validation_flags_bad_parameters() {
        let edu = ModelSpec::Edu {
            u: UtilityIndex::sqrt(),
            beta: 1.5,
        };
        assert!(!validate_model(&edu, 10).passed());
        let flat = BivariateIndex::custom("flat-ish", (0.0, 1.0, 0.0, 1.0), |x, _| x);
        let eu = ModelSpec::Eu { w: flat };
        assert!(!validate_model(&eu, 10).passed());
    }
}
