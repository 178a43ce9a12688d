//! Seeded sampling of lotteries on an outcome grid, and indifference
//! calibration by bisection.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lottery::{canonical, JointLottery, MarginalLottery, OutcomeSpace, Source};
use crate::model::{Preference, Verdict};

use super::{Counterexample, PreferenceOracle};

/// A tuple supplied by the caller and checked before any random trials.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectedCase {
    pub lotteries: Vec<JointLottery>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    /// Largest support size of a sampled marginal.
    pub max_support: usize,
    pub trials: usize,
    pub mixture_weights: Vec<f64>,
    pub injected: Vec<InjectedCase>,
}

impl SamplerConfig {
    /// Money outcomes on `[-10, 10]` in steps of 0.5.
    pub fn money() -> Self {
        Self {
            seed: 0,
            lo: -10.0,
            hi: 10.0,
            step: 0.5,
            max_support: 3,
            trials: 10_000,
            mixture_weights: vec![0.25, 0.5, 0.75],
            injected: Vec::new(),
        }
    }

    /// Consumption outcomes on `[0.1, 10]` in steps of 0.5.
    pub fn consumption() -> Self {
        Self {
            lo: 0.1,
            ..Self::money()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(format!("grid bounds [{}, {}] are not a finite interval", self.lo, self.hi));
        }
        if !(self.step > 0.0) {
            return Err(format!("grid step {} must be positive", self.step));
        }
        if self.max_support == 0 {
            return Err("max_support must be at least 1".into());
        }
        if self.mixture_weights.is_empty() || self.mixture_weights.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err("mixture weights must lie in (0, 1)".into());
        }
        Ok(())
    }

    /// Grid points inside `[max(lo, floor), hi]`.
    pub(crate) fn points(&self, floor: f64) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| canonical(self.lo + k as f64 * self.step))
            .filter(|&x| x >= floor && x <= self.hi)
            .collect()
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self::money()
    }
}

/// Per-trial sampling state; every comparison made through it is recorded
/// so a failing trial can be replayed.
pub(crate) struct Trial<'a> {
    pub oracle: &'a dyn PreferenceOracle,
    pub grid: &'a [f64],
    pub space: OutcomeSpace,
    pub reference: f64,
    pub weights: &'a [f64],
    pub max_support: usize,
    pub rng: ChaCha8Rng,
    pub witness: Counterexample,
}

impl<'a> Trial<'a> {
    pub fn new(
        oracle: &'a dyn PreferenceOracle,
        grid: &'a [f64],
        weights: &'a [f64],
        max_support: usize,
        seed: u64,
        stream: u64,
    ) -> Self {
        let space = if grid[0] >= 0.0 {
            OutcomeSpace::nonnegative()
        } else {
            OutcomeSpace::unbounded()
        };
        let reference = 0f64.clamp(grid[0], grid[grid.len() - 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            oracle,
            grid,
            space,
            reference,
            weights,
            max_support,
            rng,
            witness: Counterexample::default(),
        }
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn point(&mut self) -> f64 {
        *self.grid.choose(&mut self.rng).expect("nonempty grid")
    }

    /// Grid point in `[lo, hi]`, if any.
    pub fn point_in(&mut self, lo: f64, hi: f64) -> Option<f64> {
        let choices: Vec<f64> = self.grid.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
        choices.choose(&mut self.rng).copied()
    }

    pub fn distinct_points(&mut self, k: usize) -> Vec<f64> {
        self.grid
            .choose_multiple(&mut self.rng, k.min(self.grid.len()))
            .copied()
            .collect()
    }

    pub fn weights_for(&mut self, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| self.rng.gen_range(1..=9) as f64).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    pub fn support_size(&mut self) -> usize {
        self.rng.gen_range(1..=self.grid.len().min(self.max_support))
    }

    pub fn marginal(&mut self, source: Source) -> MarginalLottery {
        let k = self.support_size();
        self.marginal_of_size(source, k)
    }

    pub fn marginal_of_size(&mut self, source: Source, k: usize) -> MarginalLottery {
        let xs = self.distinct_points(k);
        let ps = self.weights_for(xs.len());
        MarginalLottery::on(&self.space, source, xs.into_iter().zip(ps))
            .expect("grid lotteries are valid")
    }

    pub fn degenerate(&self, source: Source, x: f64) -> MarginalLottery {
        MarginalLottery::degenerate(&self.space, source, x).expect("grid point in space")
    }

    pub fn product(&self, p: &MarginalLottery, q: &MarginalLottery) -> JointLottery {
        JointLottery::product(p, q).expect("marginals come from the same space")
    }

    pub fn point_lottery(&self, x: f64, y: f64) -> JointLottery {
        JointLottery::degenerate(x, y, self.space).expect("grid point in space")
    }

    /// Product lottery with the given marginal in `source` and `other` in the
    /// remaining source.
    pub fn pair(&self, source: Source, own: &MarginalLottery, other: &MarginalLottery) -> JointLottery {
        match source {
            Source::One => self.product(own, other),
            Source::Two => self.product(other, own),
        }
    }

    pub fn random_product(&mut self) -> JointLottery {
        let p = self.marginal(Source::One);
        let q = self.marginal(Source::Two);
        self.product(&p, &q)
    }

    /// Joint lottery with `1..=max_support + 1` atoms at random grid points.
    pub fn random_joint(&mut self) -> JointLottery {
        let k = self.rng.gen_range(1..=self.max_support + 1);
        let ps = self.weights_for(k);
        let atoms: Vec<(f64, f64, f64)> = ps
            .into_iter()
            .map(|p| (self.point(), self.point(), p))
            .collect();
        JointLottery::new(atoms, self.space).expect("grid lotteries are valid")
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn mix(&self, alpha: f64, p: &JointLottery, q: &JointLottery) -> JointLottery {
        p.mix(alpha, q).expect("same space and valid weight")
    }

    /// Compare and record. `None` when the oracle cannot evaluate.
    pub fn cmp(&mut self, a_name: &str, a: &JointLottery, b_name: &str, b: &JointLottery) -> Option<Verdict> {
        let pref = self.oracle.compare(a, b).ok()?;
        self.witness.record(a_name, a, b_name, b, pref.verdict);
        Some(pref.verdict)
    }

    /// Whether `a` and `b` stay strictly ranked with the band widened by
    /// `factor`, so that the gap survives scaling by a mixture weight.
    pub fn decisive(&self, a: &JointLottery, b: &JointLottery, factor: f64) -> bool {
        let Ok(pref) = self.oracle.compare(a, b) else {
            return false;
        };
        let (u, v) = pref.utilities;
        (u - v).abs() > factor * pref.band * 1f64.max(u.abs()).max(v.abs())
    }

    /// Utility difference `V(a) - V(b)` as reported by the oracle.
    fn gap(&self, a: &JointLottery, b: &JointLottery) -> Option<(f64, Preference)> {
        let pref = self.oracle.compare(a, b).ok()?;
        Some((pref.utilities.0 - pref.utilities.1, pref))
    }

    /// Find `t` in `[lo, hi]` with `make(t) ~ target`, assuming the value of
    /// `make(t)` increases in `t`. Bisects on the sign of the utility gap
    /// until the canonical outcome grid cannot resolve further.
    pub fn calibrate(
        &self,
        target: &JointLottery,
        mut lo: f64,
        mut hi: f64,
        make: impl Fn(f64) -> Option<JointLottery>,
    ) -> Option<(f64, JointLottery)> {
        let (d_lo, pref) = self.gap(&make(lo)?, target)?;
        if pref.verdict == Verdict::Indifferent {
            return Some((lo, make(lo)?));
        }
        let (d_hi, pref) = self.gap(&make(hi)?, target)?;
        if pref.verdict == Verdict::Indifferent {
            return Some((hi, make(hi)?));
        }
        if d_lo > 0.0 || d_hi < 0.0 {
            return None;
        }
        let (mut g_lo, mut g_hi) = (d_lo, d_hi);
        for _ in 0..200 {
            let mid = canonical(0.5 * (lo + hi));
            if mid <= lo || mid >= hi {
                break;
            }
            let (d, _) = self.gap(&make(mid)?, target)?;
            if d == 0.0 {
                lo = mid;
                g_lo = 0.0;
                break;
            }
            if d < 0.0 {
                lo = mid;
                g_lo = d;
            } else {
                hi = mid;
                g_hi = d;
            }
        }
        let t = if g_lo.abs() <= g_hi.abs() { lo } else { hi };
        let lottery = make(t)?;
        let (_, pref) = self.gap(&lottery, target)?;
        (pref.verdict == Verdict::Indifferent).then_some((t, lottery))
    }

    /// `t` such that `delta_t` is narrowly indifferent to `p` in its source,
    /// holding the other source at the reference outcome.
    pub fn narrow_ce(&self, p: &MarginalLottery) -> Option<f64> {
        let source = p.source();
        let reference = self.degenerate(source.other(), self.reference);
        let target = self.pair(source, p, &reference);
        if p.is_degenerate() {
            return Some(p.min());
        }
        let make = |t: f64| {
            let d = MarginalLottery::degenerate(&self.space, source, t).ok()?;
            Some(self.pair(source, &d, &reference))
        };
        self.calibrate(&target, p.min(), p.max(), make).map(|(t, _)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let money = SamplerConfig::money().points(f64::NEG_INFINITY);
        assert_eq!(money.len(), 41);
        assert_eq!(money[0], -10.0);
        assert_eq!(*money.last().unwrap(), 10.0);
        assert_eq!(SamplerConfig::money().points(0.0).len(), 21);
        let cons = SamplerConfig::consumption().points(0.0);
        assert_eq!(cons.len(), 20);
        assert_eq!(cons[0], 0.1);
        assert_eq!(*cons.last().unwrap(), 9.6);
    }

    #[test]
    fn validation() {
        assert!(SamplerConfig::money().validate().is_ok());
        let mut bad = SamplerConfig::money();
        bad.mixture_weights = vec![1.0];
        assert!(bad.validate().is_err());
    }
}
