//! One sampler per axiom. Each returns `None` when the drawn tuple misses the
//! axiom's preconditions.

use crate::index::UtilityIndex;
use crate::lottery::{Dominance, JointLottery, MarginalLottery, Source};
use crate::model::{Preference, Verdict, DEFAULT_BAND};

use super::sampler::{InjectedCase, Trial};
use super::{AxiomError, AxiomId, AxiomReport, Outcome, Setup};

pub(super) fn run(axiom: &AxiomId, s: &Setup<'_>) -> Result<AxiomReport, AxiomError> {
    let n = s.cfg.trials;
    let id = axiom.clone();
    let injected = &s.cfg.injected;
    let with_injected = |f: fn(&mut Trial<'_>) -> Option<Outcome>| {
        s.run(id.clone(), injected.len() + n, move |t, k| {
            wrap(match injected.get(k) {
                Some(case) => injected_four(t, case),
                None => f(t),
            })
        })
    };
    match axiom {
        AxiomId::Monotonicity => s.run(id, n, |t, _| wrap(monotonicity(t))),
        AxiomId::Independence => s.run(id, n, |t, _| wrap(independence(t))),
        AxiomId::BiIndependence => with_injected(bi_independence),
        AxiomId::CorrelationNeglect => s.run(id, n, |t, _| wrap(correlation_neglect(t))),
        AxiomId::MultilinearIndependence => with_injected(|t| multilinear(t, false)),
        AxiomId::ConditionalIndependence => s.run(id, n, |t, _| wrap(conditional_independence(t))),
        AxiomId::WeakMultilinearIndependence => s.run(id, n, |t, _| wrap(multilinear(t, true))),
        AxiomId::CorrelationConsistency => {
            s.run(id, n, |t, _| wrap(correlation_consistency(t, Source::One)))
        }
        AxiomId::ForwardCorrelationConsistency => {
            s.run(id, n, |t, _| wrap(correlation_consistency(t, Source::Two)))
        }
        AxiomId::BroadBracketingNoRisk => s.run(id, n, |t, _| wrap(broad_no_risk(t))),
        AxiomId::Symmetry | AxiomId::Stationarity => {
            s.run(id, n, |t, _| wrap(source_symmetry(t)))
        }
        AxiomId::HistoryIndependence => s.run(id, n, |t, _| wrap(history_independence(t))),
        AxiomId::Recursivity => s.run(id, n, |t, _| wrap(recursivity(t))),
        AxiomId::CorrelationAversion => {
            let tuples = ordered_pairs(&s.grid);
            let m = tuples.len();
            s.run(id, m * m, |t, k| {
                let ((x1, x2), (y1, y2)) = (tuples[k / m], tuples[k % m]);
                wrap(correlation_aversion(t, x1, x2, y1, y2))
            })
        }
        AxiomId::LongRunRiskAversion => {
            let tuples = ordered_pairs(&s.grid);
            s.run(id, tuples.len(), |t, k| {
                let (x1, x2) = tuples[k];
                wrap(long_run_risk_aversion(t, x1, x2))
            })
        }
        AxiomId::OrdinalDominance => s.run(id, n, |t, _| wrap(ordinal_dominance(t))),
        AxiomId::DiscountedUtilityNoRisk { u, beta } => {
            s.run(id, n, |t, _| wrap(discounted_utility(t, u, *beta)))
        }
    }
}

fn wrap(outcome: Option<Outcome>) -> Outcome {
    outcome.unwrap_or(Outcome::Skipped)
}

fn ordered_pairs(grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

fn conclude(t: &mut Trial<'_>, ok: bool, note: impl Into<String>) -> Outcome {
    if ok {
        Outcome::Held
    } else {
        let mut cx = std::mem::take(&mut t.witness);
        cx.note = note.into();
        Outcome::Violated(cx)
    }
}

/// The strict antecedent of an implication. An indifferent ranking makes the
/// tuple hold vacuously.
fn strict(v: Verdict) -> Result<Verdict, Outcome> {
    if v == Verdict::Indifferent {
        Err(Outcome::Vacuous)
    } else {
        Ok(v)
    }
}

/// For each mixture weight, `alpha A + (1 - alpha) C` must stand to
/// `alpha B + (1 - alpha) D` as `A` stands to `B`.
fn mixtures_preserve(
    t: &mut Trial<'_>,
    expected: Verdict,
    names: [&str; 4],
    [a, b, c, d]: [&JointLottery; 4],
    weights: &[f64],
) -> Option<Outcome> {
    let [na, nb, nc, nd] = names;
    let smallest = weights.iter().copied().fold(1.0, f64::min);
    if !t.decisive(a, b, 2.0 / smallest) {
        return None;
    }
    for &alpha in weights {
        let left = t.mix(alpha, a, c);
        let right = t.mix(alpha, b, d);
        let ln = format!("{alpha}*{na}+(1-{alpha})*{nc}");
        let rn = format!("{alpha}*{nb}+(1-{alpha})*{nd}");
        let v = t.cmp(&ln, &left, &rn, &right)?;
        if v != expected {
            t.witness.alpha = Some(alpha);
            return Some(conclude(
                t,
                false,
                format!("{na} vs {nb} is {expected} but the {alpha}-mixtures give {v}"),
            ));
        }
    }
    Some(Outcome::Held)
}

fn all_weights(t: &Trial<'_>) -> Vec<f64> {
    t.weights.to_vec()
}

fn monotonicity(t: &mut Trial<'_>) -> Option<Outcome> {
    let (x1, x2) = (t.point(), t.point());
    let above = t.coin();
    let k = t.support_size() + 1;
    let ps = t.weights_for(k);
    let (lo, hi) = (t.lo(), t.hi());
    let mut atoms = Vec::with_capacity(k);
    for p in ps {
        let (a, b) = if above {
            (t.point_in(x1, hi)?, t.point_in(x2, hi)?)
        } else {
            (t.point_in(lo, x1)?, t.point_in(lo, x2)?)
        };
        atoms.push((a, b, p));
    }
    let lottery = JointLottery::new(atoms, t.space).ok()?;
    let expected = match lottery.dominance(x1, x2) {
        Dominance::DominatesPoint => Verdict::StrictlyPrefers,
        Dominance::DominatedByPoint => Verdict::StrictlyDispreferred,
        Dominance::Neither => return None,
    };
    let point = t.point_lottery(x1, x2);
    let v = t.cmp("P", &lottery, "point", &point)?;
    Some(conclude(t, v == expected, format!("dominance implies {expected}, oracle says {v}")))
}

fn independence(t: &mut Trial<'_>) -> Option<Outcome> {
    let (p, q, r) = (t.random_product(), t.random_product(), t.random_product());
    let v = match strict(t.cmp("P", &p, "Q", &q)?) {
        Ok(v) => v,
        Err(o) => return Some(o),
    };
    let w = all_weights(t);
    mixtures_preserve(t, v, ["P", "Q", "R", "R"], [&p, &q, &r, &r], &w)
}

/// `S` with a random source-1 marginal and a calibrated sure source-2
/// outcome, indifferent to `target`.
fn calibrated_partner(
    t: &mut Trial<'_>,
    name: &str,
    target_name: &str,
    target: &JointLottery,
    fixed: &MarginalLottery,
) -> Option<JointLottery> {
    let source = fixed.source();
    let (lo, hi) = (t.lo(), t.hi());
    let (_, s) = t.calibrate(target, lo, hi, |u| {
        let d = MarginalLottery::degenerate(&t.space, source.other(), u).ok()?;
        Some(t.pair(source, fixed, &d))
    })?;
    let v = t.cmp(target_name, target, name, &s)?;
    (v == Verdict::Indifferent).then_some(s)
}

fn bi_independence(t: &mut Trial<'_>) -> Option<Outcome> {
    let (p, q, r) = (t.random_product(), t.random_product(), t.random_product());
    let pq = t.cmp("P", &p, "Q", &q)?;
    let s1 = t.marginal(Source::One);
    let s = calibrated_partner(t, "S", "R", &r, &s1)?;
    let v = match strict(pq) {
        Ok(v) => v,
        Err(o) => return Some(o),
    };
    let w = all_weights(t);
    mixtures_preserve(t, v, ["P", "Q", "R", "S"], [&p, &q, &r, &s], &w)
}

/// A caller-supplied `(P, Q, R, S)` tuple checked at its own weight.
fn injected_four(t: &mut Trial<'_>, case: &InjectedCase) -> Option<Outcome> {
    let [p, q, r, s] = case.lotteries.as_slice() else {
        return None;
    };
    let pq = t.cmp("P", p, "Q", q)?;
    if t.cmp("R", r, "S", s)? != Verdict::Indifferent {
        return None;
    }
    let v = match strict(pq) {
        Ok(v) => v,
        Err(o) => return Some(o),
    };
    mixtures_preserve(t, v, ["P", "Q", "R", "S"], [p, q, r, s], &[case.alpha])
}

fn correlation_neglect(t: &mut Trial<'_>) -> Option<Outcome> {
    let p = t.random_joint();
    let product = t.product(&p.marginal(Source::One), &p.marginal(Source::Two));
    let v = t.cmp("P", &p, "(P1,P2)", &product)?;
    Some(conclude(
        t,
        v == Verdict::Indifferent,
        format!("P vs its marginal product: {v}"),
    ))
}

/// Sure outcome narrowly indifferent to `p`, with the narrow indifference
/// recorded.
fn narrow_match(t: &mut Trial<'_>, name: &str, p: &MarginalLottery) -> Option<MarginalLottery> {
    let source = p.source();
    let ce = t.narrow_ce(p)?;
    let d = t.degenerate(source, ce);
    let reference = t.degenerate(source.other(), t.reference);
    let (a, b) = (t.pair(source, p, &reference), t.pair(source, &d, &reference));
    let v = t.cmp(&format!("{name}@ref"), &a, &format!("ce({name})@ref"), &b)?;
    (v == Verdict::Indifferent).then_some(d)
}

/// Two-point lottery in `source` narrowly indifferent to the sure outcome `u`.
fn narrow_spread(t: &mut Trial<'_>, name: &str, source: Source, u: f64) -> Option<MarginalLottery> {
    let Some(b) = t.point_in(t.lo(), u).filter(|&b| b < u) else {
        return Some(t.degenerate(source, u));
    };
    let wb = t.weights_for(2)[0];
    let reference = t.degenerate(source.other(), t.reference);
    let sure = t.degenerate(source, u);
    let target = t.pair(source, &sure, &reference);
    let space = t.space;
    let spread = |c: f64| MarginalLottery::on(&space, source, [(b, wb), (c, 1.0 - wb)]).ok();
    let (c, _) = t.calibrate(&target, u, t.hi(), |c| Some(t.pair(source, &spread(c)?, &reference)))?;
    let m = spread(c)?;
    let v = t.cmp(&format!("{name}@ref"), &t.pair(source, &m, &reference), &format!("delta_{u}@ref"), &target)?;
    (v == Verdict::Indifferent).then_some(m)
}

fn random_source(t: &mut Trial<'_>) -> Source {
    if t.coin() {
        Source::One
    } else {
        Source::Two
    }
}

/// Multilinear independence, or its weak form when `weak` is set: then the
/// unshared marginals must also be narrowly indifferent.
fn multilinear(t: &mut Trial<'_>, weak: bool) -> Option<Outcome> {
    let (i, j) = (random_source(t), random_source(t));
    let p = t.random_product();
    let p_shared = p.marginal(i);
    let r_other = if weak {
        narrow_match(t, "P_other", &p.marginal(i.other()))?
    } else {
        t.marginal(i.other())
    };
    let r = t.pair(i, &p_shared, &r_other);

    let q_shared = t.marginal(j);
    let s = calibrated_partner(t, "S", "R", &r, &q_shared)?;
    let u = s.marginal(j.other()).min();
    let q_other = if weak {
        narrow_spread(t, "Q_other", j.other(), u)?
    } else {
        t.marginal(j.other())
    };
    let q = t.pair(j, &q_shared, &q_other);

    let v = match strict(t.cmp("P", &p, "Q", &q)?) {
        Ok(v) => v,
        Err(o) => return Some(o),
    };
    let w = all_weights(t);
    mixtures_preserve(t, v, ["P", "Q", "R", "S"], [&p, &q, &r, &s], &w)
}

fn conditional_independence(t: &mut Trial<'_>) -> Option<Outcome> {
    let fixed_source = random_source(t);
    let varied = fixed_source.other();
    let s = t.marginal(fixed_source);
    let (p, q, r) = (t.marginal(varied), t.marginal(varied), t.marginal(varied));
    let (a, b, c) = (t.pair(varied, &p, &s), t.pair(varied, &q, &s), t.pair(varied, &r, &s));
    let v = match strict(t.cmp("(s,p)", &a, "(s,q)", &b)?) {
        Ok(v) => v,
        Err(o) => return Some(o),
    };
    let w = all_weights(t);
    mixtures_preserve(t, v, ["(s,p)", "(s,q)", "(s,r)", "(s,r)"], [&a, &b, &c, &c], &w)
}

/// Joint lottery whose `source` support avoids `excluded`.
fn joint_avoiding(t: &mut Trial<'_>, source: Source, excluded: &[f64]) -> Option<JointLottery> {
    let allowed: Vec<f64> = t.grid.iter().copied().filter(|x| !excluded.contains(x)).collect();
    if allowed.is_empty() {
        return None;
    }
    let k = t.support_size();
    let ps = t.weights_for(k);
    let mut atoms = Vec::with_capacity(k);
    for p in ps {
        let own = allowed[rand::Rng::gen_range(&mut t.rng, 0..allowed.len())];
        let other = t.point();
        atoms.push(match source {
            Source::One => (own, other, p),
            Source::Two => (other, own, p),
        });
    }
    JointLottery::new(atoms, t.space).ok()
}

/// Two couplings of the same 2x2 marginals, mixed with indifferent lotteries
/// whose `disjoint` support avoids theirs.
fn correlation_consistency(t: &mut Trial<'_>, disjoint: Source) -> Option<Outcome> {
    let xs = t.distinct_points(2);
    let ys = t.distinct_points(2);
    if xs.len() < 2 || ys.len() < 2 {
        return None;
    }
    let wx = t.weights_for(2)[0];
    let wy = t.weights_for(2)[0];
    let base = [
        (xs[0], ys[0], wx * wy),
        (xs[0], ys[1], wx * (1.0 - wy)),
        (xs[1], ys[0], (1.0 - wx) * wy),
        (xs[1], ys[1], (1.0 - wx) * (1.0 - wy)),
    ];
    let sign = [1.0, -1.0, -1.0, 1.0];
    let smallest = base.iter().map(|a| a.2).fold(f64::INFINITY, f64::min);
    let e = smallest * [0.25, 0.5, 0.75][rand::Rng::gen_range(&mut t.rng, 0..3)];
    let coupled = |dir: f64| {
        JointLottery::new(
            base.iter().zip(sign).map(|(&(x, y, p), s)| (x, y, p + dir * s * e)),
            t.space,
        )
        .ok()
    };
    let (p, q) = (coupled(1.0)?, coupled(-1.0)?);
    let pq = t.cmp("P", &p, "Q", &q)?;

    let excluded = match disjoint {
        Source::One => xs.clone(),
        Source::Two => ys.clone(),
    };
    let r = joint_avoiding(t, disjoint, &excluded)?;
    let c = t.point();
    if excluded.contains(&c) {
        return None;
    }
    let fixed = t.degenerate(disjoint, c);
    let s = calibrated_partner(t, "S", "R", &r, &fixed)?;
    let v = match strict(pq) {
        Ok(v) => v,
        Err(o) => return Some(o),
    };
    let w = all_weights(t);
    mixtures_preserve(t, v, ["P", "Q", "R", "S"], [&p, &q, &r, &s], &w)
}

fn broad_no_risk(t: &mut Trial<'_>) -> Option<Outcome> {
    let (x, y) = (t.point(), t.point());
    let pair = t.point_lottery(x, y);
    let first = JointLottery::degenerate(x + y, 0.0, t.space).ok()?;
    let second = JointLottery::degenerate(0.0, x + y, t.space).ok()?;
    let a = t.cmp("(x,y)", &pair, "(x+y,0)", &first)?;
    let b = t.cmp("(x,y)", &pair, "(0,x+y)", &second)?;
    Some(conclude(
        t,
        a == Verdict::Indifferent && b == Verdict::Indifferent,
        format!("(x,y) vs (x+y,0): {a}; (x,y) vs (0,x+y): {b}"),
    ))
}

/// The narrow preferences of the two sources agree.
fn source_symmetry(t: &mut Trial<'_>) -> Option<Outcome> {
    let p = t.marginal(Source::One);
    let q = t.marginal(Source::One);
    let (lo2, hi2) = t.space.bounds(Source::Two);
    let (p2, q2) = (p.relabel(Source::Two, lo2, hi2).ok()?, q.relabel(Source::Two, lo2, hi2).ok()?);
    let ref1 = t.degenerate(Source::One, t.reference);
    let ref2 = t.degenerate(Source::Two, t.reference);
    let first = t.cmp("(p,ref)", &t.product(&p, &ref2), "(q,ref)", &t.product(&q, &ref2))?;
    let second = t.cmp("(ref,p)", &t.product(&ref1, &p2), "(ref,q)", &t.product(&ref1, &q2))?;
    Some(conclude(
        t,
        first == second,
        format!("source 1 ranks p vs q {first}, source 2 ranks them {second}"),
    ))
}

fn history_independence(t: &mut Trial<'_>) -> Option<Outcome> {
    let (x, y) = (t.point(), t.point());
    let (p, q) = (t.marginal(Source::Two), t.marginal(Source::Two));
    let (dx, dy) = (t.degenerate(Source::One, x), t.degenerate(Source::One, y));
    let a = t.cmp("(x,p)", &t.product(&dx, &p), "(x,q)", &t.product(&dx, &q))?;
    let b = t.cmp("(y,p)", &t.product(&dy, &p), "(y,q)", &t.product(&dy, &q))?;
    Some(conclude(t, a == b, format!("after x: {a}; after y: {b}")))
}

/// `sum_i pi_i L_i` as one joint lottery.
fn mixture(t: &Trial<'_>, parts: &[(f64, &JointLottery)]) -> Option<JointLottery> {
    let atoms = parts
        .iter()
        .flat_map(|(w, l)| l.atoms().iter().map(move |a| (a.x, a.y, w * a.p)));
    JointLottery::new(atoms, t.space).ok()
}

/// Compare two mixtures of pairwise-ranked components. The left must be
/// weakly preferred, and indifferent when every component pair is. With
/// `strict_clause`, one strict component forces a strict mixture ranking.
fn mixture_dominance(
    t: &mut Trial<'_>,
    left: Vec<JointLottery>,
    right: Vec<JointLottery>,
    any_strict: bool,
    strict_clause: bool,
) -> Option<Outcome> {
    let pis = t.weights_for(left.len());
    let l = mixture(t, &pis.iter().copied().zip(left.iter()).collect::<Vec<_>>())?;
    let r = mixture(t, &pis.iter().copied().zip(right.iter()).collect::<Vec<_>>())?;
    let v = t.cmp("sum pi_i L_i", &l, "sum pi_i R_i", &r)?;
    let ok = match (any_strict, strict_clause) {
        (false, _) => v == Verdict::Indifferent,
        (true, true) => v == Verdict::StrictlyPrefers,
        (true, false) => v.at_least(),
    };
    Some(conclude(t, ok, format!("component rankings violated by mixtures: {v}")))
}

fn recursivity(t: &mut Trial<'_>) -> Option<Outcome> {
    let n = rand::Rng::gen_range(&mut t.rng, 2..=3);
    let pool = t.distinct_points(2 * n);
    if pool.len() < 2 * n {
        return None;
    }
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut any_strict = false;
    for i in 0..n {
        let (q, q2) = (t.marginal(Source::Two), t.marginal(Source::Two));
        let a = t.product(&t.degenerate(Source::One, pool[i]), &q);
        let b = t.product(&t.degenerate(Source::One, pool[n + i]), &q2);
        let v = t.cmp(&format!("L{i}"), &a, &format!("R{i}"), &b)?;
        any_strict |= v != Verdict::Indifferent;
        // All first-period outcomes are distinct, so orienting each pair
        // keeps the axiom's side conditions.
        if v == Verdict::StrictlyDispreferred {
            left.push(b);
            right.push(a);
        } else {
            left.push(a);
            right.push(b);
        }
    }
    mixture_dominance(t, left, right, any_strict, true)
}

fn correlation_aversion(t: &mut Trial<'_>, x1: f64, x2: f64, y1: f64, y2: f64) -> Option<Outcome> {
    let mixed = JointLottery::new([(x1, y2, 0.5), (x2, y1, 0.5)], t.space).ok()?;
    let extreme = JointLottery::new([(x1, y1, 0.5), (x2, y2, 0.5)], t.space).ok()?;
    let v = t.cmp("intermediate", &mixed, "extreme", &extreme)?;
    Some(conclude(t, v.at_least(), format!("intermediate paths vs extreme paths: {v}")))
}

fn long_run_risk_aversion(t: &mut Trial<'_>, x1: f64, x2: f64) -> Option<Outcome> {
    let coin = [(x1, 0.5), (x2, 0.5)];
    let p1 = MarginalLottery::on(&t.space, Source::One, coin).ok()?;
    let p2 = MarginalLottery::on(&t.space, Source::Two, coin).ok()?;
    let short = t.product(&p1, &p2);
    let long = JointLottery::new([(x1, x1, 0.5), (x2, x2, 0.5)], t.space).ok()?;
    let v = t.cmp("short-run", &short, "long-run", &long)?;
    Some(conclude(t, v.at_least(), format!("short-run vs long-run risk: {v}")))
}

/// Riskless pairs `L_i >= R_i`, either with a common first period on each
/// side or with pairwise distinct first periods. Most right-hand paths are
/// calibrated to exact indifference; some are lowered to a strict ranking.
fn ordinal_dominance(t: &mut Trial<'_>) -> Option<Outcome> {
    let n = rand::Rng::gen_range(&mut t.rng, 2..=3);
    let common = t.coin();
    let (firsts_l, firsts_r) = if common {
        let (a, b) = (t.point(), t.point());
        (vec![a; n], vec![b; n])
    } else {
        let l = t.distinct_points(n);
        let r = t.distinct_points(n);
        if l.len() < n || r.len() < n {
            return None;
        }
        (l, r)
    };
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut any_strict = false;
    for i in 0..n {
        let x2 = t.point();
        let a = t.point_lottery(firsts_l[i], x2);
        let y1 = firsts_r[i];
        let (lo, hi) = (t.lo(), t.hi());
        let (mut y2, _) = t.calibrate(&a, lo, hi, |y| JointLottery::degenerate(y1, y, t.space).ok())?;
        if rand::Rng::gen_bool(&mut t.rng, 0.25) {
            if let Some(lower) = t.point_in(lo, y2).filter(|&v| v < y2) {
                y2 = lower;
            }
        }
        let b = JointLottery::degenerate(y1, y2, t.space).ok()?;
        let v = t.cmp(&format!("L{i}"), &a, &format!("R{i}"), &b)?;
        if !v.at_least() {
            return None;
        }
        any_strict |= v == Verdict::StrictlyPrefers;
        left.push(a);
        right.push(b);
    }
    mixture_dominance(t, left, right, any_strict, false)
}

fn discounted_utility(t: &mut Trial<'_>, u: &UtilityIndex, beta: f64) -> Option<Outcome> {
    let (a1, a2, b1, b2) = (t.point(), t.point(), t.point(), t.point());
    let du = |x: f64, y: f64| Some(u.eval(x).ok()? + beta * u.eval(y).ok()?);
    let candidate = Preference::from_utilities(du(a1, a2)?, du(b1, b2)?, DEFAULT_BAND).verdict;
    let a = t.point_lottery(a1, a2);
    let b = t.point_lottery(b1, b2);
    let v = t.cmp("x", &a, "y", &b)?;
    Some(conclude(
        t,
        v == candidate,
        format!("discounted utility ranks {candidate}, oracle ranks {v}"),
    ))
}
