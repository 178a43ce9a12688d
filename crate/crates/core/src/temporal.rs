//! Finite-horizon consumption trees, their induced path lotteries, and
//! CRRA-CES recursive valuation.
//!
//! A [`TemporalTree`] starts with a chance move over period-1 nodes. Each node
//! carries the consumption of its period and a lottery over successor nodes.
//! Two trees with the same distribution over consumption paths can differ in
//! *when* uncertainty resolves, which Epstein-Zin valuation cares about and
//! KM-BIB valuation ignores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::check_crra;
use crate::lottery::{canonical, JointLottery, LotteryError, OutcomeSpace, PROB_TOLERANCE};

const HOMOGENEITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemporalError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("value is not homogeneous of degree one (relative error {0:e})")]
    NotHomogeneous(f64),
    #[error("value does not fit in f64 (natural log {0})")]
    Unrepresentable(f64),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub c: f64,
    #[serde(default)]
    pub children: Vec<(f64, TreeNode)>,
}

impl TreeNode {
    pub fn leaf(c: f64) -> Self {
        Self {
            c,
            children: Vec::new(),
        }
    }

    pub fn new(c: f64, children: Vec<(f64, TreeNode)>) -> Self {
        Self { c, children }
    }

    /// Deterministic chain `c[0] -> c[1] -> ...`.
    pub fn chain(cs: &[f64]) -> Self {
        let (&last, init) = cs.split_last().expect("chain needs at least one period");
        init.iter()
            .rev()
            .fold(TreeNode::leaf(last), |child, &c| TreeNode::new(c, vec![(1.0, child)]))
    }

    fn depth(&self) -> Option<usize> {
        if self.children.is_empty() {
            return Some(1);
        }
        let mut depths = self.children.iter().map(|(_, n)| n.depth());
        let first = depths.next()??;
        depths.all(|d| d == Some(first)).then_some(first + 1)
    }

    fn validate(&self) -> Result<(), TemporalError> {
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(TemporalError::InvalidTree(format!(
                "consumption {} must be finite and nonnegative",
                self.c
            )));
        }
        if !self.children.is_empty() {
            check_branches(&self.children)?;
            for (_, child) in &self.children {
                child.validate()?;
            }
        }
        Ok(())
    }

    fn normalize(&mut self) {
        normalize_branches(&mut self.children);
        for (_, child) in &mut self.children {
            child.normalize();
        }
    }

    fn paths(&self, prefix: &mut Vec<f64>, p: f64, out: &mut Vec<(Vec<f64>, f64)>) {
        prefix.push(self.c);
        if self.children.is_empty() {
            out.push((prefix.clone(), p));
        } else {
            for (q, child) in &self.children {
                child.paths(prefix, p * q, out);
            }
        }
        prefix.pop();
    }

    fn scaled(&self, k: f64) -> TreeNode {
        TreeNode {
            c: self.c * k,
            children: self
                .children
                .iter()
                .map(|(p, n)| (*p, n.scaled(k)))
                .collect(),
        }
    }

    fn collapse_from(&self, depth: usize) -> TreeNode {
        if depth > 0 {
            return TreeNode {
                c: self.c,
                children: self
                    .children
                    .iter()
                    .map(|(p, n)| (*p, n.collapse_from(depth - 1)))
                    .collect(),
            };
        }
        // Resolve everything below this node on entry to its first child.
        let mut paths = Vec::new();
        for (p, child) in &self.children {
            child.paths(&mut Vec::new(), *p, &mut paths);
        }
        TreeNode {
            c: self.c,
            children: paths.into_iter().map(|(cs, p)| (p, TreeNode::chain(&cs))).collect(),
        }
    }
}

fn check_branches(branches: &[(f64, TreeNode)]) -> Result<(), TemporalError> {
    if branches.is_empty() {
        return Err(TemporalError::InvalidTree("empty branch list".into()));
    }
    if let Some((p, _)) = branches.iter().find(|(p, _)| !(*p > 0.0 && *p <= 1.0 + PROB_TOLERANCE)) {
        return Err(TemporalError::InvalidTree(format!(
            "branch probability {p} must lie in (0, 1]"
        )));
    }
    let total: f64 = branches.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(TemporalError::InvalidTree(format!(
            "branch probabilities sum to {total}"
        )));
    }
    Ok(())
}

fn normalize_branches(branches: &mut [(f64, TreeNode)]) {
    let total: f64 = branches.iter().map(|(p, _)| p).sum();
    for (p, _) in branches.iter_mut() {
        *p /= total;
    }
}

/// A temporal lottery: a chance move over period-1 nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalTree {
    branches: Vec<(f64, TreeNode)>,
    horizon: usize,
}

impl TemporalTree {
    pub fn new(mut branches: Vec<(f64, TreeNode)>) -> Result<Self, TemporalError> {
        check_branches(&branches)?;
        for (_, node) in &branches {
            node.validate()?;
        }
        let horizon = TreeNode::new(0.0, branches.clone())
            .depth()
            .ok_or_else(|| TemporalError::InvalidTree("leaves at unequal depths".into()))?
            - 1;
        normalize_branches(&mut branches);
        for (_, node) in &mut branches {
            node.normalize();
        }
        Ok(Self { branches, horizon })
    }

    /// Tree whose period-1 node is known in advance.
    pub fn deterministic_root(root: TreeNode) -> Result<Self, TemporalError> {
        Self::new(vec![(1.0, root)])
    }

    pub fn chain(cs: &[f64]) -> Result<Self, TemporalError> {
        if cs.is_empty() {
            return Err(TemporalError::InvalidTree("empty consumption chain".into()));
        }
        Self::deterministic_root(TreeNode::chain(cs))
    }

    pub fn branches(&self) -> &[(f64, TreeNode)] {
        &self.branches
    }

    /// Number of periods.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The period-1 node when the root chance move is trivial.
    pub fn root_node(&self) -> Option<&TreeNode> {
        match self.branches.as_slice() {
            [(_, node)] => Some(node),
            _ => None,
        }
    }

    /// Every consumption stream scaled by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self, TemporalError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(TemporalError::DomainViolation(format!("scale {k} must be positive")));
        }
        Ok(Self {
            branches: self.branches.iter().map(|(p, n)| (*p, n.scaled(k))).collect(),
            horizon: self.horizon,
        })
    }

    /// Rewrite so that all uncertainty below period `depth` resolves on entry
    /// to period `depth + 1`. `depth = 0` is [`collapse_early`].
    pub fn collapse_from(&self, depth: usize) -> TemporalTree {
        let root = TreeNode::new(0.0, self.branches.clone()).collapse_from(depth);
        TemporalTree {
            branches: root.children,
            horizon: self.horizon,
        }
    }
}

/// Finite-support distribution over consumption paths of a common length.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLottery {
    paths: Vec<(Vec<f64>, f64)>,
}

impl PathLottery {
    pub fn new(entries: Vec<(Vec<f64>, f64)>) -> Result<Self, TemporalError> {
        let len = entries.first().map(|(cs, _)| cs.len()).unwrap_or(0);
        if len == 0 {
            return Err(TemporalError::InvalidTree("empty path lottery".into()));
        }
        let mut paths: Vec<(Vec<f64>, f64)> = Vec::with_capacity(entries.len());
        for (cs, p) in entries {
            if cs.len() != len {
                return Err(TemporalError::InvalidTree("paths of unequal length".into()));
            }
            if cs.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
                return Err(TemporalError::InvalidTree("negative consumption on a path".into()));
            }
            if !(p > 0.0) {
                return Err(TemporalError::InvalidTree(format!("path probability {p}")));
            }
            paths.push((cs.into_iter().map(canonical).collect(), p));
        }
        paths.sort_by(|a, b| cmp_paths(&a.0, &b.0));
        let mut merged: Vec<(Vec<f64>, f64)> = Vec::with_capacity(paths.len());
        for (cs, p) in paths {
            match merged.last_mut() {
                Some((last, q)) if *last == cs => *q += p,
                _ => merged.push((cs, p)),
            }
        }
        let total: f64 = merged.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(TemporalError::InvalidTree(format!(
                "path probabilities sum to {total}"
            )));
        }
        for (_, p) in &mut merged {
            *p /= total;
        }
        Ok(Self { paths: merged })
    }

    pub fn paths(&self) -> &[(Vec<f64>, f64)] {
        &self.paths
    }

    pub fn horizon(&self) -> usize {
        self.paths[0].0.len()
    }

    /// Probability of one exact consumption sequence.
    pub fn prob(&self, cs: &[f64]) -> f64 {
        let key: Vec<f64> = cs.iter().copied().map(canonical).collect();
        self.paths
            .iter()
            .find(|(p, _)| *p == key)
            .map_or(0.0, |(_, p)| *p)
    }

    /// Same paths, probabilities equal within `tol`.
    pub fn approx_eq(&self, other: &PathLottery, tol: f64) -> bool {
        self.paths.len() == other.paths.len()
            && self
                .paths
                .iter()
                .zip(&other.paths)
                .all(|((a, p), (b, q))| a == b && (p - q).abs() <= tol)
    }

    /// The tree that reveals information only through consumption: nodes are
    /// consumption histories.
    pub fn history_tree(&self) -> TemporalTree {
        let refs: Vec<(&[f64], f64)> = self.paths.iter().map(|(cs, p)| (cs.as_slice(), *p)).collect();
        TemporalTree {
            branches: history_branches(&refs),
            horizon: self.horizon(),
        }
    }

    /// Two-period path lottery as a joint lottery on `R+^2`.
    pub fn to_joint(&self) -> Result<JointLottery, TemporalError> {
        if self.horizon() != 2 {
            return Err(TemporalError::InvalidTree(format!(
                "joint lottery needs 2 periods, got {}",
                self.horizon()
            )));
        }
        Ok(JointLottery::new(
            self.paths.iter().map(|(cs, p)| (cs[0], cs[1], *p)),
            OutcomeSpace::nonnegative(),
        )?)
    }
}

fn cmp_paths(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Group sorted `(path, p)` pairs by their first element.
fn history_branches(paths: &[(&[f64], f64)]) -> Vec<(f64, TreeNode)> {
    let total: f64 = paths.iter().map(|(_, p)| p).sum();
    let mut out = Vec::new();
    let mut start = 0;
    while start < paths.len() {
        let head = paths[start].0[0];
        let end = start + paths[start..].iter().take_while(|(cs, _)| cs[0] == head).count();
        let group = &paths[start..end];
        let mass: f64 = group.iter().map(|(_, p)| p).sum();
        let children = if group[0].0.len() > 1 {
            let tails: Vec<(&[f64], f64)> = group.iter().map(|(cs, p)| (&cs[1..], *p)).collect();
            history_branches(&tails)
        } else {
            Vec::new()
        };
        out.push((mass / total, TreeNode::new(head, children)));
        start = end;
    }
    out
}

/// Distribution over root-to-leaf consumption paths.
pub fn induced_path_lottery(tree: &TemporalTree) -> PathLottery {
    let mut out = Vec::new();
    for (p, node) in &tree.branches {
        node.paths(&mut Vec::new(), *p, &mut out);
    }
    PathLottery::new(out).expect("a valid tree induces a valid path lottery")
}

/// All uncertainty resolved before period 1: one root branch per path.
pub fn collapse_early(tree: &TemporalTree) -> TemporalTree {
    tree.collapse_from(0)
}

/// Consumption starts at `c0` and grows by an iid factor each period;
/// growth is revealed in the period it is consumed. Paths have `steps + 1`
/// periods.
pub fn build_iid_tree(
    c0: f64,
    states: &[(f64, f64)],
    steps: usize,
) -> Result<TemporalTree, TemporalError> {
    if states.is_empty() || states.iter().any(|&(g, p)| !(g > 0.0) || !(p > 0.0)) {
        return Err(TemporalError::InvalidTree(
            "growth states need positive factors and probabilities".into(),
        ));
    }
    fn grow(c: f64, states: &[(f64, f64)], left: usize) -> TreeNode {
        if left == 0 {
            return TreeNode::leaf(c);
        }
        let children = states
            .iter()
            .map(|&(g, p)| (p, grow(canonical(c * g), states, left - 1)))
            .collect();
        TreeNode::new(c, children)
    }
    TemporalTree::deterministic_root(grow(c0, states, steps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeFamily {
    /// Epstein-Zin: conditions on the tree's information nodes.
    EpsteinZin,
    /// KM-BIB: conditions only on consumption histories.
    KmBib,
    /// Expected discounted CRRA utility over paths.
    Edu,
}

impl FromStr for TreeFamily {
    type Err = TemporalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ez" | "epsteinzin" => Ok(TreeFamily::EpsteinZin),
            "kmbib" => Ok(TreeFamily::KmBib),
            "edu" => Ok(TreeFamily::Edu),
            _ => Err(TemporalError::DegenerateParameters(format!(
                "unknown tree family {s:?} (expected ez, kmbib or edu)"
            ))),
        }
    }
}

impl fmt::Display for TreeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeFamily::EpsteinZin => "ez",
            TreeFamily::KmBib => "kmbib",
            TreeFamily::Edu => "edu",
        })
    }
}

/// CRRA-CES parameters: `1 / (1 - rho)` is the EIS, `1 - alpha` the RRA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrraParams {
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CrraParams {
    pub fn new(rho: f64, alpha: f64, beta: f64) -> Result<Self, TemporalError> {
        check_crra(rho, alpha, beta).map_err(|e| TemporalError::DegenerateParameters(e.to_string()))?;
        Ok(Self { rho, alpha, beta })
    }
}

/// `ln` of the `alpha` power mean of `exp(l)`, shifted so no term overflows.
fn log_power_mean(alpha: f64, atoms: &[(f64, f64)]) -> f64 {
    if let [(l, _)] = atoms {
        return *l;
    }
    let pick = if alpha > 0.0 { f64::max } else { f64::min };
    let reference = atoms.iter().map(|a| a.0).fold(atoms[0].0, pick);
    let s: f64 = atoms.iter().map(|&(l, p)| p * (alpha * (l - reference)).exp()).sum();
    reference + s.ln() / alpha
}

/// `ln [(1 - beta) c^rho + beta m^rho]^(1/rho)` from `ln c` and `ln m`; the
/// `expm1`/`ln_1p` pair keeps it accurate as `rho` approaches zero.
fn log_ces(prm: &CrraParams, lc: f64, lm: f64) -> f64 {
    let s = (1.0 - prm.beta) * (prm.rho * lc).exp_m1() + prm.beta * (prm.rho * lm).exp_m1();
    s.ln_1p() / prm.rho
}

fn log_node_value(node: &TreeNode, prm: &CrraParams) -> f64 {
    if node.children.is_empty() {
        return (1.0 - prm.beta).ln() / prm.rho + node.c.ln();
    }
    let children: Vec<(f64, f64)> = node
        .children
        .iter()
        .map(|(p, n)| (log_node_value(n, prm), *p))
        .collect();
    log_ces(prm, node.c.ln(), log_power_mean(prm.alpha, &children))
}

fn log_ez_value(branches: &[(f64, TreeNode)], prm: &CrraParams) -> f64 {
    let atoms: Vec<(f64, f64)> = branches
        .iter()
        .map(|(p, n)| (log_node_value(n, prm), *p))
        .collect();
    log_power_mean(prm.alpha, &atoms)
}

fn check_positive(paths: &PathLottery) -> Result<(), TemporalError> {
    if paths.paths().iter().any(|(cs, _)| cs.iter().any(|&c| c <= 0.0)) {
        return Err(TemporalError::DomainViolation(
            "CRRA valuation needs strictly positive consumption".into(),
        ));
    }
    Ok(())
}

/// Natural log of [`value_tree`]. Finite even when the value itself is
/// not representable, which happens when `(1 - beta)^(1/rho)` overflows.
fn log_value_tree(family: TreeFamily, tree: &TemporalTree, prm: &CrraParams) -> Result<f64, TemporalError> {
    CrraParams::new(prm.rho, prm.alpha, prm.beta)?;
    let paths = induced_path_lottery(tree);
    check_positive(&paths)?;
    Ok(match family {
        TreeFamily::EpsteinZin => log_ez_value(&tree.branches, prm),
        TreeFamily::KmBib => log_ez_value(&paths.history_tree().branches, prm),
        TreeFamily::Edu => {
            let mut total = 0.0;
            for (cs, p) in paths.paths() {
                let mut discount = 1.0;
                let mut sum = 0.0;
                for &c in cs {
                    sum += discount * c.powf(prm.rho);
                    discount *= prm.beta;
                }
                total += sum * p;
            }
            ((1.0 - prm.beta).ln() + total.ln()) / prm.rho
        }
    })
}

/// Recursive value of `tree`, in consumption units.
///
/// Nodes satisfy `U_t^rho = (1 - beta) c_t^rho + beta [E U_{t+1}^alpha]^(rho/alpha)`
/// with terminal `U_T^rho = (1 - beta) c_T^rho`, so a deterministic stream is
/// worth `[(1 - beta) sum_t beta^(t-1) c_t^rho]^(1/rho)`. The chance move at
/// the root is aggregated by the same power mean.
///
/// Fails with [`TemporalError::Unrepresentable`] when the value over- or
/// underflows `f64`, as it does for `rho` near zero.
pub fn value_tree(
    family: TreeFamily,
    tree: &TemporalTree,
    prm: &CrraParams,
) -> Result<f64, TemporalError> {
    let l = log_value_tree(family, tree, prm)?;
    let v = l.exp();
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(TemporalError::Unrepresentable(l))
    }
}

/// Fraction of consumption the agent would give up to have all uncertainty
/// resolve before period 1: `1 - U(tree) / U(collapse_early(tree))`.
///
/// Computed from log values, so it stays finite where [`value_tree`] cannot.
pub fn timing_premium(
    family: TreeFamily,
    tree: &TemporalTree,
    prm: &CrraParams,
) -> Result<f64, TemporalError> {
    let late = log_value_tree(family, tree, prm)?;
    let early = log_value_tree(family, &collapse_early(tree), prm)?;
    let doubled = log_value_tree(family, &tree.scaled(2.0)?, prm)?;
    let err = (doubled - std::f64::consts::LN_2 - late).abs();
    if !(err <= HOMOGENEITY_TOLERANCE) {
        return Err(TemporalError::NotHomogeneous(err));
    }
    Ok(-(late - early).exp_m1())
}
