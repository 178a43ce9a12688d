//! Finite-support lotteries over two sources of outcomes.
//!
//! A [`JointLottery`] is a probability measure with finite support on
//! `X1 x X2`; a [`MarginalLottery`] is the one-source counterpart. Both are
//! immutable and canonical: outcomes are rounded to 12 significant digits,
//! duplicate outcomes are merged, atoms are sorted, and probabilities are
//! renormalized to sum to one.

use std::fmt;

use thiserror::Error;

/// Tolerance on `|sum(p) - 1|` accepted (and renormalized) at construction.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Relative tolerance used by [`JointLottery::is_product`].
pub const PRODUCT_TOLERANCE: f64 = 1e-12;

const CDF_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LotteryError {
    #[error("lottery has empty support")]
    EmptySupport,
    #[error("probabilities sum to {0}, which is not within 1e-9 of 1")]
    ProbabilitySumOutOfTolerance(f64),
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("outcome {value} lies outside [{lo}, {hi}] in source {which}")]
    OutcomeOutOfBounds {
        which: Source,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("outcome {0} is not in the support of the marginal")]
    OutcomeNotInSupport(f64),
    #[error("lotteries are defined on different outcome spaces")]
    SpaceMismatch,
    #[error("expected a lottery in source {expected}, found source {found}")]
    SourceMismatch { expected: Source, found: Source },
    #[error("invalid outcome space: {0}")]
    InvalidSpace(String),
    #[error("mixture weight {0} is outside [0, 1]")]
    InvalidWeight(f64),
}

/// One of the two coordinates of an outcome profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    One,
    Two,
}

impl Source {
    pub fn other(self) -> Source {
        match self {
            Source::One => Source::Two,
            Source::Two => Source::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Source::One => 1,
            Source::Two => 2,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Round to 12 significant decimal digits so that outcomes produced by
/// different arithmetic paths compare bit-equal.
pub fn canonical(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// The outcome box `[lo1, hi1] x [lo2, hi2]`; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeSpace {
    pub lo1: f64,
    pub hi1: f64,
    pub lo2: f64,
    pub hi2: f64,
}

impl Default for OutcomeSpace {
    fn default() -> Self {
        Self::unbounded()
    }
}

impl OutcomeSpace {
    pub fn new(lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> Result<Self, LotteryError> {
        for (lo, hi, which) in [(lo1, hi1, Source::One), (lo2, hi2, Source::Two)] {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(LotteryError::InvalidSpace(format!(
                    "source {which} needs lo < hi, got [{lo}, {hi}]"
                )));
            }
            if !(lo <= 0.0 && 0.0 <= hi) {
                return Err(LotteryError::InvalidSpace(format!(
                    "source {which} interval [{lo}, {hi}] must contain 0"
                )));
            }
        }
        Ok(Self { lo1, hi1, lo2, hi2 })
    }

    /// `R x R`.
    pub fn unbounded() -> Self {
        Self {
            lo1: f64::NEG_INFINITY,
            hi1: f64::INFINITY,
            lo2: f64::NEG_INFINITY,
            hi2: f64::INFINITY,
        }
    }

    /// `R+ x R+`, the consumption setting.
    pub fn nonnegative() -> Self {
        Self {
            lo1: 0.0,
            hi1: f64::INFINITY,
            lo2: 0.0,
            hi2: f64::INFINITY,
        }
    }

    pub fn bounds(&self, source: Source) -> (f64, f64) {
        match source {
            Source::One => (self.lo1, self.hi1),
            Source::Two => (self.lo2, self.hi2),
        }
    }

    pub fn contains(&self, source: Source, x: f64) -> bool {
        let (lo, hi) = self.bounds(source);
        lo <= x && x <= hi
    }

    fn check(&self, source: Source, value: f64) -> Result<(), LotteryError> {
        if self.contains(source, value) {
            Ok(())
        } else {
            let (lo, hi) = self.bounds(source);
            Err(LotteryError::OutcomeOutOfBounds {
                which: source,
                value,
                lo,
                hi,
            })
        }
    }
}

fn check_prob(p: f64) -> Result<(), LotteryError> {
    if p.is_finite() && p >= 0.0 {
        Ok(())
    } else {
        Err(LotteryError::InvalidProbability(p))
    }
}

/// Divide by the sum unless it is already one up to rounding, which keeps
/// construction idempotent on lotteries it produced.
fn rescale<'a>(ps: impl Iterator<Item = &'a mut f64>) {
    let ps: Vec<&mut f64> = ps.collect();
    let sum: f64 = ps.iter().map(|p| **p).sum();
    if (sum - 1.0).abs() > 64.0 * f64::EPSILON {
        for p in ps {
            *p /= sum;
        }
    }
}

fn normalize(total: f64) -> Result<(), LotteryError> {
    if (total - 1.0).abs() > PROB_TOLERANCE {
        Err(LotteryError::ProbabilitySumOutOfTolerance(total))
    } else {
        Ok(())
    }
}

/// An atom `(x, y)` of a joint lottery with its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointAtom {
    pub x: f64,
    pub y: f64,
    pub p: f64,
}

/// Result of comparing a lottery with a degenerate outcome profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    DominatesPoint,
    DominatedByPoint,
    Neither,
}

/// Finite-support probability measure on `X1 x X2`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLottery {
    atoms: Vec<JointAtom>,
    space: OutcomeSpace,
}

impl JointLottery {
    /// Build a lottery from `(x, y, p)` triples.
    ///
    /// Outcomes are canonicalized and merged; zero-probability entries are
    /// dropped. The probabilities must sum to one within [`PROB_TOLERANCE`]
    /// and are then renormalized unless already one up to rounding.
    pub fn new<I>(entries: I, space: OutcomeSpace) -> Result<Self, LotteryError>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let mut atoms = Vec::new();
        let mut total = 0.0;
        for (x, y, p) in entries {
            check_prob(p)?;
            let (x, y) = (canonical(x), canonical(y));
            space.check(Source::One, x)?;
            space.check(Source::Two, y)?;
            total += p;
            if p > 0.0 {
                atoms.push(JointAtom { x, y, p });
            }
        }
        if atoms.is_empty() {
            return Err(LotteryError::EmptySupport);
        }
        normalize(total)?;
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let mut merged: Vec<JointAtom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.x == atom.x && last.y == atom.y => last.p += atom.p,
                _ => merged.push(atom),
            }
        }
        rescale(merged.iter_mut().map(|a| &mut a.p));
        Ok(Self {
            atoms: merged,
            space,
        })
    }

    pub fn degenerate(x: f64, y: f64, space: OutcomeSpace) -> Result<Self, LotteryError> {
        Self::new([(x, y, 1.0)], space)
    }

    pub fn atoms(&self) -> &[JointAtom] {
        &self.atoms
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Probability of the outcome profile `(x, y)`; zero off the support.
    pub fn prob(&self, x: f64, y: f64) -> f64 {
        let (x, y) = (canonical(x), canonical(y));
        self.atoms
            .iter()
            .find(|a| a.x == x && a.y == y)
            .map_or(0.0, |a| a.p)
    }

    pub fn expectation(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| f(a.x, a.y) * a.p).sum()
    }

    fn coord(atom: &JointAtom, source: Source) -> f64 {
        match source {
            Source::One => atom.x,
            Source::Two => atom.y,
        }
    }

    /// The marginal lottery `P_i`.
    pub fn marginal(&self, source: Source) -> MarginalLottery {
        let (lo, hi) = self.space.bounds(source);
        let entries = self.atoms.iter().map(|a| (Self::coord(a, source), a.p));
        MarginalLottery::new(entries, source, lo, hi)
            .expect("marginal of a valid lottery is valid")
    }

    /// The conditional distribution in the other source given outcome `x` in
    /// `source`, i.e. `P_{-i|x}(y) = P(x, y) / P_i(x)`.
    pub fn conditional(&self, source: Source, x: f64) -> Result<MarginalLottery, LotteryError> {
        let x = canonical(x);
        let other = source.other();
        let slice: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .filter(|a| Self::coord(a, source) == x)
            .map(|a| (Self::coord(a, other), a.p))
            .collect();
        if slice.is_empty() {
            return Err(LotteryError::OutcomeNotInSupport(x));
        }
        let mass: f64 = slice.iter().map(|(_, p)| p).sum();
        let (lo, hi) = self.space.bounds(other);
        MarginalLottery::new(slice.into_iter().map(|(y, p)| (y, p / mass)), other, lo, hi)
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, alpha: f64, other: &JointLottery) -> Result<JointLottery, LotteryError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(LotteryError::InvalidWeight(alpha));
        }
        if self.space != other.space {
            return Err(LotteryError::SpaceMismatch);
        }
        let left = self.atoms.iter().map(|a| (a.x, a.y, alpha * a.p));
        let right = other.atoms.iter().map(|a| (a.x, a.y, (1.0 - alpha) * a.p));
        JointLottery::new(left.chain(right), self.space)
    }

    /// The product lottery `(p, q)` with `P(x, y) = p(x) q(y)`.
    pub fn product(p: &MarginalLottery, q: &MarginalLottery) -> Result<JointLottery, LotteryError> {
        if p.source != Source::One {
            return Err(LotteryError::SourceMismatch {
                expected: Source::One,
                found: p.source,
            });
        }
        if q.source != Source::Two {
            return Err(LotteryError::SourceMismatch {
                expected: Source::Two,
                found: q.source,
            });
        }
        let space = OutcomeSpace {
            lo1: p.lo,
            hi1: p.hi,
            lo2: q.lo,
            hi2: q.hi,
        };
        let entries = p
            .atoms
            .iter()
            .flat_map(|&(x, px)| q.atoms.iter().map(move |&(y, qy)| (x, y, px * qy)));
        JointLottery::new(entries, space)
    }

    /// Whether `P(x, y) = P_1(x) P_2(y)` on the grid of marginal supports,
    /// within [`PRODUCT_TOLERANCE`] relative.
    pub fn is_product(&self) -> bool {
        let p1 = self.marginal(Source::One);
        let p2 = self.marginal(Source::Two);
        p1.atoms.iter().all(|&(x, px)| {
            p2.atoms.iter().all(|&(y, qy)| {
                let joint = self.prob(x, y);
                let prod = px * qy;
                (joint - prod).abs() <= PRODUCT_TOLERANCE * joint.abs().max(prod.abs())
            })
        })
    }

    /// `P * (a1, a2)`: every atom gains `a_i` in source `i`, capped at the
    /// upper bound of the outcome space.
    pub fn shift_clamped(&self, a1: f64, a2: f64) -> Result<JointLottery, LotteryError> {
        for a in [a1, a2] {
            if a.is_nan() || a < 0.0 {
                return Err(LotteryError::InvalidSpace(format!(
                    "sure gains must be nonnegative, got {a}"
                )));
            }
        }
        let entries = self
            .atoms
            .iter()
            .map(|a| ((a.x + a1).min(self.space.hi1), (a.y + a2).min(self.space.hi2), a.p));
        JointLottery::new(entries, self.space)
    }

    /// Compare against the degenerate lottery at `(x1, x2)`: `P` dominates the
    /// point when `P` differs from it and every marginal support point is
    /// weakly above it in both sources.
    pub fn dominance(&self, x1: f64, x2: f64) -> Dominance {
        let (x1, x2) = (canonical(x1), canonical(x2));
        if self.atoms.len() == 1 && self.atoms[0].x == x1 && self.atoms[0].y == x2 {
            return Dominance::Neither;
        }
        if self.atoms.iter().all(|a| a.x >= x1 && a.y >= x2) {
            Dominance::DominatesPoint
        } else if self.atoms.iter().all(|a| a.x <= x1 && a.y <= x2) {
            Dominance::DominatedByPoint
        } else {
            Dominance::Neither
        }
    }

    /// Distribution of the total `x + y`, reported as a source-1 lottery on
    /// the summed bounds.
    pub fn money_aggregate(&self) -> MarginalLottery {
        let lo = self.space.lo1 + self.space.lo2;
        let hi = self.space.hi1 + self.space.hi2;
        MarginalLottery::new(
            self.atoms.iter().map(|a| (a.x + a.y, a.p)),
            Source::One,
            lo,
            hi,
        )
        .expect("aggregate of a valid lottery is valid")
    }
}

/// Finite-support probability measure on one source.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalLottery {
    atoms: Vec<(f64, f64)>,
    source: Source,
    lo: f64,
    hi: f64,
}

impl MarginalLottery {
    pub fn new<I>(entries: I, source: Source, lo: f64, hi: f64) -> Result<Self, LotteryError>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut atoms = Vec::new();
        let mut total = 0.0;
        for (x, p) in entries {
            check_prob(p)?;
            let x = canonical(x);
            if !(lo <= x && x <= hi) {
                return Err(LotteryError::OutcomeOutOfBounds {
                    which: source,
                    value: x,
                    lo,
                    hi,
                });
            }
            total += p;
            if p > 0.0 {
                atoms.push((x, p));
            }
        }
        if atoms.is_empty() {
            return Err(LotteryError::EmptySupport);
        }
        normalize(total)?;
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => merged.push((x, p)),
            }
        }
        rescale(merged.iter_mut().map(|a| &mut a.1));
        Ok(Self {
            atoms: merged,
            source,
            lo,
            hi,
        })
    }

    /// A marginal in `source` using that source's bounds from `space`.
    pub fn on<I>(space: &OutcomeSpace, source: Source, entries: I) -> Result<Self, LotteryError>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let (lo, hi) = space.bounds(source);
        Self::new(entries, source, lo, hi)
    }

    pub fn degenerate(space: &OutcomeSpace, source: Source, x: f64) -> Result<Self, LotteryError> {
        Self::on(space, source, [(x, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn support(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.0)
    }

    pub fn min(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn prob(&self, x: f64) -> f64 {
        let x = canonical(x);
        self.atoms.iter().find(|a| a.0 == x).map_or(0.0, |a| a.1)
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn expectation(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, p)| f(x) * p).sum()
    }

    /// Same distribution relabelled as a lottery in `source` with new bounds.
    pub fn relabel(&self, source: Source, lo: f64, hi: f64) -> Result<Self, LotteryError> {
        Self::new(self.atoms.iter().copied(), source, lo, hi)
    }

    pub fn mix(&self, alpha: f64, other: &MarginalLottery) -> Result<MarginalLottery, LotteryError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(LotteryError::InvalidWeight(alpha));
        }
        if self.source != other.source || self.lo != other.lo || self.hi != other.hi {
            return Err(LotteryError::SpaceMismatch);
        }
        let left = self.atoms.iter().map(|&(x, p)| (x, alpha * p));
        let right = other.atoms.iter().map(|&(x, p)| (x, (1.0 - alpha) * p));
        MarginalLottery::new(left.chain(right), self.source, self.lo, self.hi)
    }

    /// `p * delta_a`, capped at the upper bound.
    pub fn shift_clamped(&self, a: f64) -> Result<MarginalLottery, LotteryError> {
        if a.is_nan() || a < 0.0 {
            return Err(LotteryError::InvalidSpace(format!(
                "sure gains must be nonnegative, got {a}"
            )));
        }
        let hi = self.hi;
        MarginalLottery::new(
            self.atoms.iter().map(|&(x, p)| ((x + a).min(hi), p)),
            self.source,
            self.lo,
            self.hi,
        )
    }

    fn cdf_at(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.0 <= t)
            .map(|a| a.1)
            .sum()
    }

    /// Weak first-order stochastic dominance: `F_self <= F_other` everywhere.
    pub fn fosd_weak(&self, other: &MarginalLottery) -> bool {
        self.atoms
            .iter()
            .chain(other.atoms.iter())
            .all(|&(t, _)| self.cdf_at(t) <= other.cdf_at(t) + CDF_SLACK)
    }

    /// Weak dominance together with `self != other`.
    pub fn fosd_strict(&self, other: &MarginalLottery) -> bool {
        self.fosd_weak(other) && !self.same_distribution(other)
    }

    /// Equality of distributions up to [`CDF_SLACK`] in every atom.
    pub fn same_distribution(&self, other: &MarginalLottery) -> bool {
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() <= CDF_SLACK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> OutcomeSpace {
        OutcomeSpace::unbounded()
    }

    fn joint(entries: &[(f64, f64, f64)]) -> JointLottery {
        JointLottery::new(entries.iter().copied(), r2()).unwrap()
    }

    fn m(source: Source, entries: &[(f64, f64)]) -> MarginalLottery {
        MarginalLottery::on(&r2(), source, entries.iter().copied()).unwrap()
    }

    #[test]
    fn construction_normalizes_and_merges() {
        let p = joint(&[(1.0, 2.0, 0.5), (1.0, 3.0, 0.5)]);
        assert_eq!(p.len(), 2);
        assert_eq!(p.atoms().iter().map(|a| a.p).sum::<f64>(), 1.0);

        let merged = joint(&[(0.0, 0.0, 0.3), (0.0, 0.0, 0.7)]);
        assert_eq!(merged.atoms(), &[JointAtom { x: 0.0, y: 0.0, p: 1.0 }]);

        let bad = JointLottery::new([(1.0, 2.0, 0.5), (1.0, 3.0, 0.4)], r2());
        assert!(matches!(bad, Err(LotteryError::ProbabilitySumOutOfTolerance(_))));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            JointLottery::new(Vec::<(f64, f64, f64)>::new(), r2()),
            Err(LotteryError::EmptySupport)
        );
        let boxed = OutcomeSpace::new(0.0, 10.0, 0.0, 10.0).unwrap();
        assert!(matches!(
            JointLottery::degenerate(11.0, 1.0, boxed),
            Err(LotteryError::OutcomeOutOfBounds { which: Source::One, .. })
        ));
        assert!(matches!(
            JointLottery::new([(0.0, 0.0, -0.5), (1.0, 1.0, 1.5)], r2()),
            Err(LotteryError::InvalidProbability(_))
        ));
        assert!(OutcomeSpace::new(1.0, 2.0, 0.0, 1.0).is_err());
        assert!(OutcomeSpace::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn canonical_rounding_merges_float_noise() {
        let p = joint(&[(0.1 + 0.2, 1.0, 0.5), (0.3, 1.0, 0.5)]);
        assert!(p.is_degenerate());
        assert_eq!(canonical(-0.0), 0.0);
        assert_eq!(canonical(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn marginals() {
        let p = joint(&[(1.0, 2.0, 0.5), (1.0, 3.0, 0.5)]);
        assert_eq!(p.marginal(Source::One).atoms(), &[(1.0, 1.0)]);

        let q = joint(&[(0.0, 5.0, 0.5), (3.0, 5.0, 0.5)]);
        assert_eq!(q.marginal(Source::Two).atoms(), &[(5.0, 1.0)]);

        let pm = m(Source::One, &[(0.0, 0.25), (4.0, 0.75)]);
        let qm = m(Source::Two, &[(1.0, 0.5), (2.0, 0.5)]);
        let prod = JointLottery::product(&pm, &qm).unwrap();
        assert_eq!(prod.marginal(Source::Two), qm);
    }

    #[test]
    fn conditionals() {
        let p = joint(&[(1.0, 2.0, 0.5), (1.0, 3.0, 0.5)]);
        let c = p.conditional(Source::One, 1.0).unwrap();
        assert_eq!(c.atoms(), &[(2.0, 0.5), (3.0, 0.5)]);
        assert_eq!(c.source(), Source::Two);

        let q = joint(&[(0.0, 0.0, 0.25), (2.0, 7.0, 0.75)]);
        assert_eq!(q.conditional(Source::One, 2.0).unwrap().atoms(), &[(7.0, 1.0)]);
        assert_eq!(
            q.conditional(Source::One, 5.0),
            Err(LotteryError::OutcomeNotInSupport(5.0))
        );
        assert_eq!(q.conditional(Source::Two, 7.0).unwrap().atoms(), &[(2.0, 1.0)]);
    }

    #[test]
    fn mixtures() {
        let p = joint(&[(1.0, 2.0, 0.5), (5.0, 6.0, 0.5)]);
        let q = joint(&[(1.0, 2.0, 0.5), (9.0, 9.0, 0.5)]);
        assert_eq!(p.mix(1.0, &q).unwrap(), p);
        let half = p.mix(0.5, &q).unwrap();
        assert_eq!(
            half,
            joint(&[(1.0, 2.0, 0.5), (5.0, 6.0, 0.25), (9.0, 9.0, 0.25)])
        );

        let zero = JointLottery::degenerate(0.0, 0.0, r2()).unwrap();
        let one = JointLottery::degenerate(1.0, 1.0, r2()).unwrap();
        let diag = zero.mix(0.5, &one).unwrap();
        assert!(zero.is_product());
        assert!(!diag.is_product());

        let boxed = OutcomeSpace::new(0.0, 10.0, 0.0, 10.0).unwrap();
        let other = JointLottery::degenerate(1.0, 1.0, boxed).unwrap();
        assert_eq!(zero.mix(0.5, &other), Err(LotteryError::SpaceMismatch));
        assert_eq!(zero.mix(1.5, &one), Err(LotteryError::InvalidWeight(1.5)));
    }

    #[test]
    fn products() {
        let p = m(Source::One, &[(1.0, 1.0)]);
        let q = m(Source::Two, &[(2.0, 0.5), (3.0, 0.5)]);
        let prod = JointLottery::product(&p, &q).unwrap();
        assert_eq!(prod, joint(&[(1.0, 2.0, 0.5), (1.0, 3.0, 0.5)]));
        assert!(prod.is_product());
        assert!(matches!(
            JointLottery::product(&q, &p),
            Err(LotteryError::SourceMismatch { .. })
        ));
    }

    #[test]
    fn clamped_shift() {
        let boxed = OutcomeSpace::new(0.0, 10.0, 0.0, 10.0).unwrap();
        let p = JointLottery::new([(9.0, 1.0, 0.5), (3.0, 3.0, 0.5)], boxed).unwrap();
        assert_eq!(p.shift_clamped(0.0, 0.0).unwrap(), p);
        let shifted = p.shift_clamped(2.0, 0.0).unwrap();
        let expected = JointLottery::new([(10.0, 1.0, 0.5), (5.0, 3.0, 0.5)], boxed).unwrap();
        assert_eq!(shifted, expected);
        // Clamping can merge atoms.
        let merged = p.shift_clamped(20.0, 20.0).unwrap();
        assert!(merged.is_degenerate());
        assert!(p.shift_clamped(-1.0, 0.0).is_err());
    }

    #[test]
    fn dominance_cases() {
        let p = joint(&[(1.0, 2.0, 0.5), (1.0, 3.0, 0.5)]);
        assert_eq!(p.dominance(1.0, 2.0), Dominance::DominatesPoint);
        assert_eq!(p.dominance(1.0, 3.0), Dominance::DominatedByPoint);
        assert_eq!(p.dominance(1.0, 2.5), Dominance::Neither);
        let point = JointLottery::degenerate(1.0, 2.0, r2()).unwrap();
        assert_eq!(point.dominance(1.0, 2.0), Dominance::Neither);
        let cross = joint(&[(0.0, 5.0, 0.5), (3.0, 0.0, 0.5)]);
        assert_eq!(cross.dominance(1.0, 1.0), Dominance::Neither);
    }

    #[test]
    fn fosd_cases() {
        let p = m(Source::One, &[(2.5, 0.25), (-7.5, 0.75)]);
        let q = m(Source::One, &[(2.4, 0.25), (-7.6, 0.75)]);
        assert!(p.fosd_weak(&p));
        assert!(!p.fosd_strict(&p));
        assert!(p.fosd_strict(&q));
        assert!(!q.fosd_weak(&p));
        let one = m(Source::One, &[(1.0, 1.0)]);
        let zero = m(Source::One, &[(0.0, 1.0)]);
        assert!(one.fosd_strict(&zero));
    }

    #[test]
    fn money_aggregation() {
        let b = m(Source::One, &[(10.0, 0.25), (0.0, 0.75)]);
        let c = m(Source::Two, &[(-7.5, 1.0)]);
        let bc = JointLottery::product(&b, &c).unwrap().money_aggregate();
        assert_eq!(bc, m(Source::One, &[(2.5, 0.25), (-7.5, 0.75)]));

        let a = m(Source::One, &[(2.4, 1.0)]);
        let d = m(Source::Two, &[(-10.0, 0.75), (0.0, 0.25)]);
        let ad = JointLottery::product(&a, &d).unwrap().money_aggregate();
        assert_eq!(ad, m(Source::One, &[(2.4, 0.25), (-7.6, 0.75)]));
        assert!(bc.fosd_strict(&ad));
    }
}
