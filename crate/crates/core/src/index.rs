//! Regular utility indices and certainty equivalents.
//!
//! A [`UtilityIndex`] is a continuous, strictly increasing function on an
//! interval of the real line. Boundedness is not required. Every index
//! carries a positive affine wrapper `scale * f(x) + offset` so that
//! [`UtilityIndex::affine`] is closed over all families.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lottery::MarginalLottery;

const BISECTION_MAX_ITER: usize = 200;
const MONOTONE_SWEEP_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("argument {value} outside the index domain [{lo}, {hi}]")]
    DomainViolation { value: f64, lo: f64, hi: f64 },
    #[error("value {value} outside the index range ({lo}, {hi})")]
    RangeViolation { value: f64, lo: f64, hi: f64 },
    #[error("affine scale must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("invalid index parameter: {0}")]
    InvalidParameter(String),
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type BivariateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The parametric shape of an index before its affine wrapper.
#[derive(Clone)]
pub enum IndexKind {
    /// `x^gamma` on `[0, inf)`.
    Power { gamma: f64 },
    /// `(1 - exp(-a x)) / a`, constant absolute risk aversion `a`.
    Exponential { a: f64 },
    /// `a x + b`.
    Linear { a: f64, b: f64 },
    /// `sqrt(x)` for gains, `-lambda sqrt(-x)` for losses.
    LossAverseSqrt { lambda: f64 },
    /// Piecewise-linear interpolation through strictly increasing knots.
    Tabulated { knots: Vec<(f64, f64)> },
    /// `outer(inner(x))`.
    Compose {
        outer: Box<UtilityIndex>,
        inner: Box<UtilityIndex>,
    },
    /// A caller-supplied increasing function; inverted by bisection.
    Custom {
        name: String,
        f: ScalarFn,
        lo: f64,
        hi: f64,
    },
}

impl fmt::Debug for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexKind::Power { gamma } => write!(f, "Power({gamma})"),
            IndexKind::Exponential { a } => write!(f, "Exponential({a})"),
            IndexKind::Linear { a, b } => write!(f, "Linear({a}, {b})"),
            IndexKind::LossAverseSqrt { lambda } => write!(f, "LossAverseSqrt({lambda})"),
            IndexKind::Tabulated { knots } => write!(f, "Tabulated({knots:?})"),
            IndexKind::Compose { outer, inner } => write!(f, "Compose({outer:?}, {inner:?})"),
            IndexKind::Custom { name, lo, hi, .. } => write!(f, "Custom({name}, [{lo}, {hi}])"),
        }
    }
}

impl PartialEq for IndexKind {
    fn eq(&self, other: &Self) -> bool {
        use IndexKind::*;
        match (self, other) {
            (Power { gamma: a }, Power { gamma: b }) => a == b,
            (Exponential { a: x }, Exponential { a: y }) => x == y,
            (Linear { a, b }, Linear { a: c, b: d }) => a == c && b == d,
            (LossAverseSqrt { lambda: a }, LossAverseSqrt { lambda: b }) => a == b,
            (Tabulated { knots: a }, Tabulated { knots: b }) => a == b,
            (Compose { outer: a, inner: b }, Compose { outer: c, inner: d }) => a == c && b == d,
            (Custom { f: a, .. }, Custom { f: b, .. }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityIndex {
    kind: IndexKind,
    scale: f64,
    offset: f64,
}

impl UtilityIndex {
    fn wrap(kind: IndexKind) -> Self {
        Self {
            kind,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn power(gamma: f64) -> Result<Self, IndexError> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(IndexError::InvalidParameter(format!(
                "power exponent must be positive, got {gamma}"
            )));
        }
        Ok(Self::wrap(IndexKind::Power { gamma }))
    }

    pub fn sqrt() -> Self {
        Self::wrap(IndexKind::Power { gamma: 0.5 })
    }

    pub fn exponential(a: f64) -> Result<Self, IndexError> {
        if !(a.is_finite() && a != 0.0) {
            return Err(IndexError::InvalidParameter(format!(
                "exponential coefficient must be nonzero, got {a}"
            )));
        }
        Ok(Self::wrap(IndexKind::Exponential { a }))
    }

    pub fn linear(a: f64, b: f64) -> Result<Self, IndexError> {
        if !(a.is_finite() && a > 0.0 && b.is_finite()) {
            return Err(IndexError::InvalidParameter(format!(
                "linear index needs a > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self::wrap(IndexKind::Linear { a, b }))
    }

    pub fn identity() -> Self {
        Self::wrap(IndexKind::Linear { a: 1.0, b: 0.0 })
    }

    pub fn loss_averse_sqrt(lambda: f64) -> Result<Self, IndexError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(IndexError::InvalidParameter(format!(
                "loss aversion must be positive, got {lambda}"
            )));
        }
        Ok(Self::wrap(IndexKind::LossAverseSqrt { lambda }))
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self, IndexError> {
        if knots.len() < 2 {
            return Err(IndexError::InvalidParameter(
                "a table needs at least two knots".into(),
            ));
        }
        let increasing = knots
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        if !increasing || knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(IndexError::InvalidParameter(
                "table knots must be finite and strictly increasing in both coordinates".into(),
            ));
        }
        Ok(Self::wrap(IndexKind::Tabulated { knots }))
    }

    /// Wrap a caller-supplied function on `[lo, hi]`. Strict monotonicity is
    /// checked on a grid sweep of the (clipped) domain.
    pub fn custom(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, IndexError> {
        if !(lo < hi) {
            return Err(IndexError::InvalidParameter(format!(
                "custom index needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        let index = Self::wrap(IndexKind::Custom {
            name: name.into(),
            f: Arc::new(f),
            lo,
            hi,
        });
        let (a, b) = sweep_interval(lo, hi);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=MONOTONE_SWEEP_POINTS {
            let x = a + (b - a) * k as f64 / MONOTONE_SWEEP_POINTS as f64;
            let v = index.eval(x)?;
            if !(v > prev) || !v.is_finite() {
                return Err(IndexError::InvalidParameter(format!(
                    "custom index is not strictly increasing near {x}"
                )));
            }
            prev = v;
        }
        Ok(index)
    }

    /// `outer(inner(x))`, e.g. the risk index `phi o u` of a KM-BIB agent.
    pub fn compose(outer: UtilityIndex, inner: UtilityIndex) -> Self {
        Self::wrap(IndexKind::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        })
    }

    /// `a * f + b` for `a > 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self, IndexError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(IndexError::NonpositiveScale(a));
        }
        if !b.is_finite() {
            return Err(IndexError::InvalidParameter(format!("affine shift {b}")));
        }
        Ok(Self {
            kind: self.kind.clone(),
            scale: self.scale * a,
            offset: self.offset * a + b,
        })
    }

    pub fn kind(&self) -> &IndexKind {
        &self.kind
    }

    /// `(scale, offset)` of the affine wrapper.
    pub fn affine_parts(&self) -> (f64, f64) {
        (self.scale, self.offset)
    }

    /// Closed domain `[lo, hi]`, possibly with infinite ends.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            IndexKind::Power { .. } => (0.0, f64::INFINITY),
            IndexKind::Exponential { .. }
            | IndexKind::Linear { .. }
            | IndexKind::LossAverseSqrt { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            IndexKind::Tabulated { knots } => (knots[0].0, knots[knots.len() - 1].0),
            IndexKind::Compose { inner, .. } => inner.domain(),
            IndexKind::Custom { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        lo <= x && x <= hi
    }

    fn base_eval(&self, x: f64) -> Result<f64, IndexError> {
        let (lo, hi) = self.domain();
        if !(lo <= x && x <= hi) {
            return Err(IndexError::DomainViolation { value: x, lo, hi });
        }
        Ok(match &self.kind {
            IndexKind::Power { gamma } => x.powf(*gamma),
            IndexKind::Exponential { a } => -(-a * x).exp_m1() / a,
            IndexKind::Linear { a, b } => a * x + b,
            IndexKind::LossAverseSqrt { lambda } => {
                if x >= 0.0 {
                    x.sqrt()
                } else {
                    -lambda * (-x).sqrt()
                }
            }
            IndexKind::Tabulated { knots } => interpolate(knots, x, |k| (k.0, k.1)),
            IndexKind::Compose { outer, inner } => outer.eval(inner.eval(x)?)?,
            IndexKind::Custom { f, .. } => f(x),
        })
    }

    fn base_inverse(&self, v: f64) -> Result<f64, IndexError> {
        let range_err = |lo: f64, hi: f64| IndexError::RangeViolation { value: v, lo, hi };
        if !v.is_finite() {
            return Err(range_err(f64::NEG_INFINITY, f64::INFINITY));
        }
        match &self.kind {
            IndexKind::Power { gamma } => {
                if v < 0.0 {
                    Err(range_err(0.0, f64::INFINITY))
                } else {
                    Ok(v.powf(1.0 / gamma))
                }
            }
            IndexKind::Exponential { a } => {
                let arg = -a * v;
                if arg <= -1.0 {
                    let bound = 1.0 / a;
                    Err(if *a > 0.0 {
                        range_err(f64::NEG_INFINITY, bound)
                    } else {
                        range_err(bound, f64::INFINITY)
                    })
                } else {
                    Ok(-arg.ln_1p() / a)
                }
            }
            IndexKind::Linear { a, b } => Ok((v - b) / a),
            IndexKind::LossAverseSqrt { lambda } => Ok(if v >= 0.0 {
                v * v
            } else {
                -(v / lambda) * (v / lambda)
            }),
            IndexKind::Tabulated { knots } => {
                let (lo, hi) = (knots[0].1, knots[knots.len() - 1].1);
                if !(lo <= v && v <= hi) {
                    return Err(range_err(lo, hi));
                }
                Ok(interpolate(knots, v, |k| (k.1, k.0)))
            }
            IndexKind::Compose { outer, inner } => inner.inverse(outer.inverse(v)?),
            IndexKind::Custom { lo, hi, .. } => self.bisect_inverse(v, *lo, *hi),
        }
    }

    /// Monotone bracketed bisection for indices without a closed-form inverse.
    fn bisect_inverse(&self, v: f64, lo: f64, hi: f64) -> Result<f64, IndexError> {
        let (mut a, mut b) = sweep_interval(lo, hi);
        let mut step = (b - a).max(1.0);
        while lo == f64::NEG_INFINITY && self.base_eval(a)? > v {
            a -= step;
            step *= 2.0;
            if !a.is_finite() {
                return Err(IndexError::RangeViolation { value: v, lo, hi });
            }
        }
        let mut step = (b - a).max(1.0);
        while hi == f64::INFINITY && self.base_eval(b)? < v {
            b += step;
            step *= 2.0;
            if !b.is_finite() {
                return Err(IndexError::RangeViolation { value: v, lo, hi });
            }
        }
        let (fa, fb) = (self.base_eval(a)?, self.base_eval(b)?);
        if !(fa <= v && v <= fb) {
            return Err(IndexError::RangeViolation {
                value: v,
                lo: fa,
                hi: fb,
            });
        }
        let tol = 1e-12 * (b - a);
        for _ in 0..BISECTION_MAX_ITER {
            if b - a <= tol {
                break;
            }
            let mid = 0.5 * (a + b);
            if self.base_eval(mid)? < v {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    pub fn eval(&self, x: f64) -> Result<f64, IndexError> {
        Ok(self.scale * self.base_eval(x)? + self.offset)
    }

    pub fn inverse(&self, v: f64) -> Result<f64, IndexError> {
        self.base_inverse((v - self.offset) / self.scale)
    }

    /// Certainty equivalent `f^{-1}(E_p f)`, kept inside the support hull.
    pub fn ce(&self, p: &MarginalLottery) -> Result<f64, IndexError> {
        for x in p.support() {
            if !self.in_domain(x) {
                let (lo, hi) = self.domain();
                return Err(IndexError::DomainViolation { value: x, lo, hi });
            }
        }
        if p.is_degenerate() {
            return Ok(p.min());
        }
        let mut expected = 0.0;
        for &(x, prob) in p.atoms() {
            expected += self.eval(x)? * prob;
        }
        Ok(self.inverse(expected)?.clamp(p.min(), p.max()))
    }
}

/// Forward or inverse application, as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub fn apply_index(f: &UtilityIndex, v: f64, direction: Direction) -> Result<f64, IndexError> {
    match direction {
        Direction::Forward => f.eval(v),
        Direction::Inverse => f.inverse(v),
    }
}

/// Finite working interval for sweeps over a possibly unbounded domain.
pub(crate) fn sweep_interval(lo: f64, hi: f64) -> (f64, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, lo.max(0.0) + 10.0),
        (false, true) => (hi.min(0.0) - 10.0, hi),
        (false, false) => (-10.0, 10.0),
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64, key: impl Fn(&(f64, f64)) -> (f64, f64)) -> f64 {
    let last = knots.len() - 1;
    let seg = knots
        .windows(2)
        .position(|w| t <= key(&w[1]).0)
        .unwrap_or(last - 1);
    let (x0, y0) = key(&knots[seg]);
    let (x1, y1) = key(&knots[seg + 1]);
    if t == x1 {
        return y1;
    }
    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
}

/// A utility index `w(x, y)` over outcome profiles, strictly increasing in
/// each argument.
#[derive(Clone)]
pub enum BivariateIndex {
    /// `u1(x) + beta * u2(y)`.
    Additive {
        u1: UtilityIndex,
        u2: UtilityIndex,
        beta: f64,
    },
    /// `u(x + y)`: money outcomes that are simply added up.
    Sum { u: UtilityIndex },
    /// `W^alpha / alpha` with `W = [(1 - beta) x^rho + beta y^rho]^(1/rho)`,
    /// an increasing transform of `[(1 - beta) x^rho + beta y^rho]^(alpha/rho)`.
    CesCrra { rho: f64, alpha: f64, beta: f64 },
    /// Bilinear interpolation on a rectangular grid.
    Grid {
        xs: Vec<f64>,
        ys: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    Custom {
        name: String,
        f: BivariateFn,
        domain: (f64, f64, f64, f64),
    },
}

impl fmt::Debug for BivariateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BivariateIndex::Additive { u1, u2, beta } => {
                write!(f, "Additive({u1:?}, {u2:?}, {beta})")
            }
            BivariateIndex::Sum { u } => write!(f, "Sum({u:?})"),
            BivariateIndex::CesCrra { rho, alpha, beta } => {
                write!(f, "CesCrra({rho}, {alpha}, {beta})")
            }
            BivariateIndex::Grid { xs, ys, .. } => {
                write!(f, "Grid({}x{})", xs.len(), ys.len())
            }
            BivariateIndex::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl PartialEq for BivariateIndex {
    fn eq(&self, other: &Self) -> bool {
        use BivariateIndex::*;
        match (self, other) {
            (
                Additive { u1, u2, beta },
                Additive {
                    u1: a,
                    u2: b,
                    beta: c,
                },
            ) => u1 == a && u2 == b && beta == c,
            (Sum { u }, Sum { u: v }) => u == v,
            (
                CesCrra { rho, alpha, beta },
                CesCrra {
                    rho: a,
                    alpha: b,
                    beta: c,
                },
            ) => rho == a && alpha == b && beta == c,
            (
                Grid { xs, ys, values },
                Grid {
                    xs: a,
                    ys: b,
                    values: c,
                },
            ) => xs == a && ys == b && values == c,
            (Custom { f, .. }, Custom { f: g, .. }) => Arc::ptr_eq(f, g),
            _ => false,
        }
    }
}

impl BivariateIndex {
    pub fn additive(u1: UtilityIndex, u2: UtilityIndex, beta: f64) -> Result<Self, IndexError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(IndexError::InvalidParameter(format!(
                "additive weight must be positive, got {beta}"
            )));
        }
        Ok(BivariateIndex::Additive { u1, u2, beta })
    }

    pub fn sum(u: UtilityIndex) -> Self {
        BivariateIndex::Sum { u }
    }

    pub fn ces_crra(rho: f64, alpha: f64, beta: f64) -> Result<Self, IndexError> {
        check_crra(rho, alpha, beta)?;
        Ok(BivariateIndex::CesCrra { rho, alpha, beta })
    }

    pub fn grid(xs: Vec<f64>, ys: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, IndexError> {
        let increasing = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&xs) || !increasing(&ys) {
            return Err(IndexError::InvalidParameter(
                "grid axes need at least two strictly increasing points".into(),
            ));
        }
        if values.len() != xs.len() || values.iter().any(|row| row.len() != ys.len()) {
            return Err(IndexError::InvalidParameter(
                "grid values must have shape xs.len() x ys.len()".into(),
            ));
        }
        let rows_ok = values.iter().all(|row| row.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = (0..ys.len()).all(|j| values.windows(2).all(|w| w[0][j] < w[1][j]));
        if !rows_ok || !cols_ok {
            return Err(IndexError::InvalidParameter(
                "grid values must be strictly increasing along both axes".into(),
            ));
        }
        Ok(BivariateIndex::Grid { xs, ys, values })
    }

    pub fn custom(
        name: impl Into<String>,
        domain: (f64, f64, f64, f64),
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BivariateIndex::Custom {
            name: name.into(),
            f: Arc::new(f),
            domain,
        }
    }

    /// `(lo1, hi1, lo2, hi2)`.
    pub fn domain(&self) -> (f64, f64, f64, f64) {
        match self {
            BivariateIndex::Additive { u1, u2, .. } => {
                let (a, b) = u1.domain();
                let (c, d) = u2.domain();
                (a, b, c, d)
            }
            BivariateIndex::Sum { u } => {
                let (lo, hi) = u.domain();
                if lo.is_finite() && lo >= 0.0 {
                    (lo, hi, 0.0, hi)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            BivariateIndex::CesCrra { .. } => (0.0, f64::INFINITY, 0.0, f64::INFINITY),
            BivariateIndex::Grid { xs, ys, .. } => {
                (xs[0], xs[xs.len() - 1], ys[0], ys[ys.len() - 1])
            }
            BivariateIndex::Custom { domain, .. } => *domain,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, IndexError> {
        match self {
            BivariateIndex::Additive { u1, u2, beta } => Ok(u1.eval(x)? + beta * u2.eval(y)?),
            BivariateIndex::Sum { u } => u.eval(x + y),
            BivariateIndex::CesCrra { rho, alpha, beta } => {
                for v in [x, y] {
                    if !(v >= 0.0) || (v == 0.0 && (*rho < 0.0 || *alpha < 0.0)) {
                        return Err(IndexError::DomainViolation {
                            value: v,
                            lo: 0.0,
                            hi: f64::INFINITY,
                        });
                    }
                }
                let agg = ces(*rho, *beta, x, y);
                Ok(agg.powf(*alpha) / alpha)
            }
            BivariateIndex::Grid { xs, ys, values } => {
                let (lo1, hi1, lo2, hi2) = self.domain();
                for (v, lo, hi) in [(x, lo1, hi1), (y, lo2, hi2)] {
                    if !(lo <= v && v <= hi) {
                        return Err(IndexError::DomainViolation { value: v, lo, hi });
                    }
                }
                let i = segment(xs, x);
                let j = segment(ys, y);
                let tx = (x - xs[i]) / (xs[i + 1] - xs[i]);
                let ty = (y - ys[j]) / (ys[j + 1] - ys[j]);
                let v00 = values[i][j];
                let v10 = values[i + 1][j];
                let v01 = values[i][j + 1];
                let v11 = values[i + 1][j + 1];
                Ok(v00 * (1.0 - tx) * (1.0 - ty)
                    + v10 * tx * (1.0 - ty)
                    + v01 * (1.0 - tx) * ty
                    + v11 * tx * ty)
            }
            BivariateIndex::Custom { f, domain, .. } => {
                let (lo1, hi1, lo2, hi2) = *domain;
                for (v, lo, hi) in [(x, lo1, hi1), (y, lo2, hi2)] {
                    if !(lo <= v && v <= hi) {
                        return Err(IndexError::DomainViolation { value: v, lo, hi });
                    }
                }
                Ok(f(x, y))
            }
        }
    }
}

/// The CES time aggregator `[(1 - beta) c^rho + beta m^rho]^(1/rho)`.
pub fn ces(rho: f64, beta: f64, c: f64, m: f64) -> f64 {
    ((1.0 - beta) * c.powf(rho) + beta * m.powf(rho)).powf(1.0 / rho)
}

pub(crate) fn check_crra(rho: f64, alpha: f64, beta: f64) -> Result<(), IndexError> {
    if !(rho < 1.0 && rho != 0.0 && alpha < 1.0 && alpha != 0.0 && beta > 0.0 && beta < 1.0) {
        return Err(IndexError::InvalidParameter(format!(
            "CRRA-CES needs rho < 1, rho != 0, alpha < 1, alpha != 0, 0 < beta < 1; \
             got rho = {rho}, alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(())
}

fn segment(axis: &[f64], t: f64) -> usize {
    axis.windows(2)
        .position(|w| t <= w[1])
        .unwrap_or(axis.len() - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lottery::{OutcomeSpace, Source};

    fn money(entries: &[(f64, f64)]) -> MarginalLottery {
        MarginalLottery::on(&OutcomeSpace::unbounded(), Source::One, entries.iter().copied())
            .unwrap()
    }

    #[test]
    fn loss_averse_forward() {
        let v = UtilityIndex::loss_averse_sqrt(2.0).unwrap();
        let got = apply_index(&v, -10.0, Direction::Forward).unwrap();
        assert!((got - (-2.0 * 10f64.sqrt())).abs() < 1e-12);
        assert!((got + 6.3245553).abs() < 1e-7);
    }

    #[test]
    fn identity_power_round_trips() {
        let id = UtilityIndex::power(1.0).unwrap();
        for v in [0.0, 0.5, 3.0, 1e6] {
            assert_eq!(id.eval(v).unwrap(), v);
            assert_eq!(id.inverse(v).unwrap(), v);
        }
    }

    #[test]
    fn tabulated_inverse_interpolates() {
        let t = UtilityIndex::tabulated(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]).unwrap();
        assert!((t.inverse(2.5).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(t.eval(1.5).unwrap(), 2.5);
        assert!(matches!(t.inverse(5.0), Err(IndexError::RangeViolation { .. })));
        assert!(matches!(t.eval(-1.0), Err(IndexError::DomainViolation { .. })));
        assert!(UtilityIndex::tabulated(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn certainty_equivalents() {
        let b = money(&[(10.0, 0.25), (0.0, 0.75)]);
        assert!((UtilityIndex::sqrt().ce(&b).unwrap() - 0.625).abs() < 1e-12);
        let d = money(&[(-10.0, 0.75), (0.0, 0.25)]);
        let v = UtilityIndex::loss_averse_sqrt(2.0).unwrap();
        assert!((v.ce(&d).unwrap() + 5.625).abs() < 1e-12);
        let point = money(&[(3.7, 1.0)]);
        assert_eq!(v.ce(&point).unwrap(), 3.7);
        assert!(matches!(
            UtilityIndex::sqrt().ce(&d),
            Err(IndexError::DomainViolation { .. })
        ));
    }

    #[test]
    fn affine_transform() {
        let f = UtilityIndex::power(0.5).unwrap();
        assert_eq!(f.affine(1.0, 0.0).unwrap(), f);
        assert_eq!(f.affine(3.0, -1.0).unwrap().eval(4.0).unwrap(), 5.0);
        assert_eq!(f.affine(0.0, 1.0), Err(IndexError::NonpositiveScale(0.0)));
        assert_eq!(f.affine(-2.0, 1.0), Err(IndexError::NonpositiveScale(-2.0)));
    }

    #[test]
    fn exponential_inverse_and_range() {
        let u = UtilityIndex::exponential(0.5).unwrap();
        for x in [-5.0, 0.0, 2.0, 7.5] {
            let v = u.eval(x).unwrap();
            assert!((u.inverse(v).unwrap() - x).abs() < 1e-12);
        }
        assert!(matches!(u.inverse(2.0), Err(IndexError::RangeViolation { .. })));
        let convex = UtilityIndex::exponential(-0.5).unwrap();
        assert!((convex.inverse(convex.eval(3.0).unwrap()).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn custom_index_bisects() {
        let cube = UtilityIndex::custom("cube", f64::NEG_INFINITY, f64::INFINITY, |x| x * x * x)
            .unwrap();
        assert!((cube.inverse(27.0).unwrap() - 3.0).abs() < 1e-9);
        assert!((cube.inverse(-1000.0).unwrap() + 10.0).abs() < 1e-9);
        assert!(UtilityIndex::custom("square", -1.0, 1.0, |x| x * x).is_err());
    }

    #[test]
    fn composition() {
        let u = UtilityIndex::sqrt();
        let phi = UtilityIndex::power(2.0).unwrap();
        let risk = UtilityIndex::compose(phi, u);
        // phi o sqrt is the identity on R+.
        let p = MarginalLottery::on(
            &OutcomeSpace::nonnegative(),
            Source::Two,
            [(1.0, 0.5), (9.0, 0.5)],
        )
        .unwrap();
        assert!((risk.ce(&p).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn bivariate_families() {
        let w = BivariateIndex::sum(UtilityIndex::identity());
        assert_eq!(w.eval(2.0, 3.0).unwrap(), 5.0);
        let add = BivariateIndex::additive(UtilityIndex::sqrt(), UtilityIndex::sqrt(), 0.5).unwrap();
        assert_eq!(add.eval(4.0, 16.0).unwrap(), 4.0);
        let ces = BivariateIndex::ces_crra(0.5, 0.5, 0.5).unwrap();
        assert!((ces.eval(4.0, 4.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(BivariateIndex::ces_crra(1.0, 0.5, 0.5).is_err());
        let neg = BivariateIndex::ces_crra(0.5, -2.0, 0.5).unwrap();
        assert!(neg.eval(2.0, 2.0).unwrap() < neg.eval(3.0, 2.0).unwrap());
        let grid = BivariateIndex::grid(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![vec![0.0, 1.0], vec![1.0, 3.0]],
        )
        .unwrap();
        assert_eq!(grid.eval(0.5, 0.5).unwrap(), 1.25);
        assert!(grid.eval(2.0, 0.0).is_err());
    }
}
