//! JSON file formats for lotteries, indices, models, trees and reports.
//!
//! Infinite bounds are written as the strings `"inf"` and `"-inf"`.
//! Probabilities are read either as numbers or as `[num, den]` pairs and are
//! always written back as numbers, so `to_json(parse(s))` is the canonical
//! form of `s`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::axioms::{AxiomReport, BracketingReport, Counterexample, SourceRegion};
use crate::index::{BivariateIndex, IndexError, IndexKind, UtilityIndex};
use crate::lottery::{JointLottery, LotteryError, MarginalLottery, OutcomeSpace, Source};
use crate::model::{ModelSpec, OpenSet1D, ReprError};
use crate::temporal::{TemporalError, TemporalTree, TreeNode};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Model(#[from] ReprError),
    #[error(transparent)]
    Tree(#[from] TemporalError),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Schema(msg.into()))
}

fn number(v: &Value, what: &str) -> Result<f64, FormatError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| FormatError::Schema(format!("{what}: bad number"))),
        Value::String(s) => match s.trim() {
            "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
            "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
            other => other
                .parse()
                .map_err(|_| FormatError::Schema(format!("{what}: cannot read {other:?} as a number"))),
        },
        _ => schema(format!("{what}: expected a number, got {v}")),
    }
}

fn finite(v: &Value, what: &str) -> Result<f64, FormatError> {
    let x = number(v, what)?;
    if x.is_finite() {
        Ok(x)
    } else {
        schema(format!("{what} must be finite"))
    }
}

fn probability(v: &Value, what: &str) -> Result<f64, FormatError> {
    match v {
        Value::Array(pair) => match pair.as_slice() {
            [num, den] => {
                let (n, d) = (finite(num, what)?, finite(den, what)?);
                if d == 0.0 {
                    return schema(format!("{what}: zero denominator"));
                }
                Ok(n / d)
            }
            _ => schema(format!("{what}: a fraction is a [num, den] pair")),
        },
        other => finite(other, what),
    }
}

fn write_number(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

fn field<'a>(obj: &'a Value, key: &str, what: &str) -> Result<&'a Value, FormatError> {
    obj.get(key)
        .ok_or_else(|| FormatError::Schema(format!("{what}: missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array()
        .ok_or_else(|| FormatError::Schema(format!("{what}: expected an array")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, FormatError> {
    v.as_object()
        .ok_or_else(|| FormatError::Schema(format!("{what}: expected an object")))
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

// ---- lotteries ----

pub fn space_from_json(v: &Value) -> Result<OutcomeSpace, FormatError> {
    let get = |k: &str, default: f64| match v.get(k) {
        Some(x) => number(x, &format!("space.{k}")),
        None => Ok(default),
    };
    Ok(OutcomeSpace::new(
        get("lo1", f64::NEG_INFINITY)?,
        get("hi1", f64::INFINITY)?,
        get("lo2", f64::NEG_INFINITY)?,
        get("hi2", f64::INFINITY)?,
    )?)
}

pub fn space_to_json(s: &OutcomeSpace) -> Value {
    json!({
        "lo1": write_number(s.lo1),
        "hi1": write_number(s.hi1),
        "lo2": write_number(s.lo2),
        "hi2": write_number(s.hi2),
    })
}

pub fn lottery_from_json(v: &Value) -> Result<JointLottery, FormatError> {
    let space = match v.get("space") {
        Some(s) => space_from_json(s)?,
        None => OutcomeSpace::unbounded(),
    };
    let mut atoms = Vec::new();
    for (k, a) in array(field(v, "atoms", "lottery")?, "lottery.atoms")?.iter().enumerate() {
        let what = format!("lottery.atoms[{k}]");
        match array(a, &what)?.as_slice() {
            [x, y, p] => atoms.push((finite(x, &what)?, finite(y, &what)?, probability(p, &what)?)),
            _ => return schema(format!("{what}: expected [x, y, p]")),
        }
    }
    Ok(JointLottery::new(atoms, space)?)
}

pub fn lottery_to_json(l: &JointLottery) -> Value {
    json!({
        "space": space_to_json(l.space()),
        "atoms": l.atoms().iter().map(|a| json!([a.x, a.y, a.p])).collect::<Vec<_>>(),
    })
}

pub fn parse_lottery(text: &str) -> Result<JointLottery, FormatError> {
    lottery_from_json(&serde_json::from_str(text)?)
}

fn source_from_json(v: &Value) -> Result<Source, FormatError> {
    match v {
        Value::Number(n) if n.as_u64() == Some(1) => Ok(Source::One),
        Value::Number(n) if n.as_u64() == Some(2) => Ok(Source::Two),
        Value::String(s) if s == "1" => Ok(Source::One),
        Value::String(s) if s == "2" => Ok(Source::Two),
        _ => schema(format!("source must be 1 or 2, got {v}")),
    }
}

pub fn marginal_from_json(v: &Value) -> Result<MarginalLottery, FormatError> {
    let source = match v.get("source") {
        Some(s) => source_from_json(s)?,
        None => Source::One,
    };
    let lo = v.get("lo").map(|x| number(x, "marginal.lo")).transpose()?.unwrap_or(f64::NEG_INFINITY);
    let hi = v.get("hi").map(|x| number(x, "marginal.hi")).transpose()?.unwrap_or(f64::INFINITY);
    let mut atoms = Vec::new();
    for (k, a) in array(field(v, "atoms", "marginal")?, "marginal.atoms")?.iter().enumerate() {
        let what = format!("marginal.atoms[{k}]");
        match array(a, &what)?.as_slice() {
            [x, p] => atoms.push((finite(x, &what)?, probability(p, &what)?)),
            _ => return schema(format!("{what}: expected [x, p]")),
        }
    }
    Ok(MarginalLottery::new(atoms, source, lo, hi)?)
}

pub fn marginal_to_json(m: &MarginalLottery) -> Value {
    let (lo, hi) = m.bounds();
    json!({
        "source": m.source().index(),
        "lo": write_number(lo),
        "hi": write_number(hi),
        "atoms": m.atoms().iter().map(|(x, p)| json!([x, p])).collect::<Vec<_>>(),
    })
}

pub fn parse_marginal(text: &str) -> Result<MarginalLottery, FormatError> {
    marginal_from_json(&serde_json::from_str(text)?)
}

// ---- indices ----

fn param(params: &Value, key: &str, family: &str) -> Result<f64, FormatError> {
    finite(field(params, key, &format!("{family} index params"))?, &format!("{family}.{key}"))
}

pub fn index_from_json(v: &Value) -> Result<UtilityIndex, FormatError> {
    let family = field(v, "family", "index")?
        .as_str()
        .ok_or_else(|| FormatError::Schema("index family must be a string".into()))?;
    let empty = json!({});
    let params = v.get("params").unwrap_or(&empty);
    let base = match family {
        "power" => UtilityIndex::power(param(params, "gamma", family)?)?,
        "sqrt" => UtilityIndex::sqrt(),
        "exp" => UtilityIndex::exponential(param(params, "a", family)?)?,
        "linear" => UtilityIndex::linear(param(params, "a", family)?, param(params, "b", family)?)?,
        "identity" => UtilityIndex::identity(),
        "loss_sqrt" => UtilityIndex::loss_averse_sqrt(param(params, "lambda", family)?)?,
        "table" => {
            let mut knots = Vec::new();
            for (k, pair) in array(field(params, "knots", "table index params")?, "table.knots")?
                .iter()
                .enumerate()
            {
                let what = format!("table.knots[{k}]");
                match array(pair, &what)?.as_slice() {
                    [x, u] => knots.push((finite(x, &what)?, finite(u, &what)?)),
                    _ => return schema(format!("{what}: expected [x, u]")),
                }
            }
            UtilityIndex::tabulated(knots)?
        }
        "compose" => UtilityIndex::compose(
            index_from_json(field(params, "outer", "compose index params")?)?,
            index_from_json(field(params, "inner", "compose index params")?)?,
        ),
        other => return schema(format!("unknown index family {other:?}")),
    };
    let scale = v.get("scale").map(|s| finite(s, "index.scale")).transpose()?.unwrap_or(1.0);
    let offset = v.get("offset").map(|s| finite(s, "index.offset")).transpose()?.unwrap_or(0.0);
    if scale == 1.0 && offset == 0.0 {
        Ok(base)
    } else {
        Ok(base.affine(scale, offset)?)
    }
}

pub fn index_to_json(u: &UtilityIndex) -> Result<Value, FormatError> {
    let (family, params) = match u.kind() {
        IndexKind::Power { gamma } => ("power", json!({ "gamma": gamma })),
        IndexKind::Exponential { a } => ("exp", json!({ "a": a })),
        IndexKind::Linear { a, b } => ("linear", json!({ "a": a, "b": b })),
        IndexKind::LossAverseSqrt { lambda } => ("loss_sqrt", json!({ "lambda": lambda })),
        IndexKind::Tabulated { knots } => (
            "table",
            json!({ "knots": knots.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>() }),
        ),
        IndexKind::Compose { outer, inner } => (
            "compose",
            json!({ "outer": index_to_json(outer)?, "inner": index_to_json(inner)? }),
        ),
        IndexKind::Custom { name, .. } => {
            return schema(format!("custom index {name:?} has no file representation"))
        }
    };
    let mut out = json!({ "family": family, "params": params });
    let (scale, offset) = u.affine_parts();
    if scale != 1.0 || offset != 0.0 {
        out["scale"] = json!(scale);
        out["offset"] = json!(offset);
    }
    Ok(out)
}

pub fn bivariate_from_json(v: &Value) -> Result<BivariateIndex, FormatError> {
    let family = field(v, "family", "aggregator")?
        .as_str()
        .ok_or_else(|| FormatError::Schema("aggregator family must be a string".into()))?;
    let empty = json!({});
    let params = v.get("params").unwrap_or(&empty);
    let sub = |k: &str| index_from_json(field(params, k, &format!("{family} aggregator params"))?);
    Ok(match family {
        "sum" => BivariateIndex::sum(sub("u")?),
        "additive" => BivariateIndex::additive(sub("u1")?, sub("u2")?, param(params, "beta", family)?)?,
        "ces_crra" => BivariateIndex::ces_crra(
            param(params, "rho", family)?,
            param(params, "alpha", family)?,
            param(params, "beta", family)?,
        )?,
        "grid" => {
            let row = |v: &Value, what: &str| -> Result<Vec<f64>, FormatError> {
                array(v, what)?.iter().map(|x| finite(x, what)).collect()
            };
            let xs = row(field(params, "xs", "grid aggregator")?, "grid.xs")?;
            let ys = row(field(params, "ys", "grid aggregator")?, "grid.ys")?;
            let values = array(field(params, "values", "grid aggregator")?, "grid.values")?
                .iter()
                .map(|r| row(r, "grid.values"))
                .collect::<Result<_, _>>()?;
            BivariateIndex::grid(xs, ys, values)?
        }
        other => return schema(format!("unknown aggregator family {other:?}")),
    })
}

pub fn bivariate_to_json(w: &BivariateIndex) -> Result<Value, FormatError> {
    Ok(match w {
        BivariateIndex::Sum { u } => json!({ "family": "sum", "params": { "u": index_to_json(u)? } }),
        BivariateIndex::Additive { u1, u2, beta } => json!({
            "family": "additive",
            "params": { "u1": index_to_json(u1)?, "u2": index_to_json(u2)?, "beta": beta },
        }),
        BivariateIndex::CesCrra { rho, alpha, beta } => json!({
            "family": "ces_crra",
            "params": { "rho": rho, "alpha": alpha, "beta": beta },
        }),
        BivariateIndex::Grid { xs, ys, values } => json!({
            "family": "grid",
            "params": { "xs": xs, "ys": ys, "values": values },
        }),
        BivariateIndex::Custom { name, .. } => {
            return schema(format!("custom aggregator {name:?} has no file representation"))
        }
    })
}

// ---- models ----

fn open_set_from_json(v: Option<&Value>) -> Result<OpenSet1D, FormatError> {
    let Some(v) = v else {
        return Ok(OpenSet1D::empty());
    };
    let mut out = Vec::new();
    for (k, iv) in array(v, "H")?.iter().enumerate() {
        let what = format!("H[{k}]");
        match array(iv, &what)?.as_slice() {
            [a, b] => out.push((number(a, &what)?, number(b, &what)?)),
            _ => return schema(format!("{what}: expected [lo, hi]")),
        }
    }
    if out.is_empty() {
        return Ok(OpenSet1D::empty());
    }
    Ok(OpenSet1D::new(out)?)
}

fn open_set_to_json(h: &OpenSet1D) -> Value {
    Value::Array(
        h.intervals()
            .iter()
            .map(|&(a, b)| json!([write_number(a), write_number(b)]))
            .collect(),
    )
}

pub fn model_from_json(v: &Value) -> Result<ModelSpec, FormatError> {
    let family = field(v, "family", "model")?
        .as_str()
        .ok_or_else(|| FormatError::Schema("model family must be a string".into()))?;
    let empty = json!({});
    let indices = v.get("indices").unwrap_or(&empty);
    let params = v.get("params").unwrap_or(&empty);
    let idx = |k: &str| index_from_json(field(indices, k, &format!("{family} model indices"))?);
    let w = || bivariate_from_json(field(indices, "w", &format!("{family} model indices"))?);
    let p = |k: &str| param(params, k, family);
    let h = || open_set_from_json(v.get("H"));
    let model = match family {
        "eu" => ModelSpec::Eu { w: w()? },
        "eu_cn" => ModelSpec::EuCn { w: w()? },
        "nb" => ModelSpec::Nb {
            w: w()?,
            v1: idx("v1")?,
            v2: idx("v2")?,
        },
        "bib" => ModelSpec::Bib { w: w()?, v2: idx("v2")? },
        "fib" => ModelSpec::Fib { w: w()?, v1: idx("v1")? },
        "bib_cn" => ModelSpec::BibCn { w: w()?, v2: idx("v2")? },
        "fib_cn" => ModelSpec::FibCn { w: w()?, v1: idx("v1")? },
        "gbib_cn" => ModelSpec::GbibCn {
            w: w()?,
            v1: idx("v1")?,
            v2: idx("v2")?,
            h2: h()?,
        },
        "gfib_cn" => ModelSpec::GfibCn {
            w: w()?,
            v1: idx("v1")?,
            v2: idx("v2")?,
            h1: h()?,
        },
        "edu" => ModelSpec::Edu {
            u: idx("u")?,
            beta: p("beta")?,
        },
        "km" => ModelSpec::Km {
            u: idx("u")?,
            beta: p("beta")?,
            phi: idx("phi")?,
        },
        "km_bib" => ModelSpec::KmBib {
            phi: idx("phi")?,
            u: idx("u")?,
            beta: p("beta")?,
        },
        "crra_ces_kmbib" => ModelSpec::CrraCesKmBib {
            rho: p("rho")?,
            alpha: p("alpha")?,
            beta: p("beta")?,
        },
        "lambda_mix" => ModelSpec::LambdaMix {
            u: idx("u")?,
            lambda: p("lambda")?,
        },
        other => return schema(format!("unknown model family {other:?}")),
    };
    model.check()?;
    Ok(model)
}

pub fn model_to_json(m: &ModelSpec) -> Result<Value, FormatError> {
    let mut indices = Map::new();
    let mut params = Map::new();
    let mut h = None;
    let mut put = |k: &str, u: &UtilityIndex| -> Result<(), FormatError> {
        indices.insert(k.into(), index_to_json(u)?);
        Ok(())
    };
    match m {
        ModelSpec::Eu { w } | ModelSpec::EuCn { w } => {
            indices.insert("w".into(), bivariate_to_json(w)?);
        }
        ModelSpec::Nb { w, v1, v2 } => {
            put("v1", v1)?;
            put("v2", v2)?;
            indices.insert("w".into(), bivariate_to_json(w)?);
        }
        ModelSpec::Bib { w, v2 } | ModelSpec::BibCn { w, v2 } => {
            put("v2", v2)?;
            indices.insert("w".into(), bivariate_to_json(w)?);
        }
        ModelSpec::Fib { w, v1 } | ModelSpec::FibCn { w, v1 } => {
            put("v1", v1)?;
            indices.insert("w".into(), bivariate_to_json(w)?);
        }
        ModelSpec::GbibCn { w, v1, v2, h2: set } | ModelSpec::GfibCn { w, v1, v2, h1: set } => {
            put("v1", v1)?;
            put("v2", v2)?;
            indices.insert("w".into(), bivariate_to_json(w)?);
            h = Some(open_set_to_json(set));
        }
        ModelSpec::Edu { u, beta } => {
            put("u", u)?;
            params.insert("beta".into(), json!(beta));
        }
        ModelSpec::Km { u, beta, phi } | ModelSpec::KmBib { phi, u, beta } => {
            put("u", u)?;
            put("phi", phi)?;
            params.insert("beta".into(), json!(beta));
        }
        ModelSpec::CrraCesKmBib { rho, alpha, beta } => {
            params.insert("rho".into(), json!(rho));
            params.insert("alpha".into(), json!(alpha));
            params.insert("beta".into(), json!(beta));
        }
        ModelSpec::LambdaMix { u, lambda } => {
            put("u", u)?;
            params.insert("lambda".into(), json!(lambda));
        }
    }
    let mut out = json!({
        "family": m.family_name(),
        "indices": Value::Object(indices),
        "params": Value::Object(params),
    });
    if let Some(h) = h {
        out["H"] = h;
    }
    Ok(out)
}

pub fn parse_model(text: &str) -> Result<ModelSpec, FormatError> {
    model_from_json(&serde_json::from_str(text)?)
}

// ---- trees ----

fn node_from_json(v: &Value, path: &str) -> Result<TreeNode, FormatError> {
    let c = finite(field(v, "c", path)?, &format!("{path}.c"))?;
    let children = match v.get("children") {
        Some(ch) => branches_from_json(ch, &format!("{path}.children"))?,
        None => Vec::new(),
    };
    Ok(TreeNode::new(c, children))
}

fn branches_from_json(v: &Value, path: &str) -> Result<Vec<(f64, TreeNode)>, FormatError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let what = format!("{path}[{k}]");
            match array(b, &what)?.as_slice() {
                [p, node] => Ok((probability(p, &what)?, node_from_json(node, &what)?)),
                _ => schema(format!("{what}: expected [p, node]")),
            }
        })
        .collect()
}

/// A tree file is either a period-1 node `{"c", "children"}` or a chance
/// root `{"branches": [[p, node], ...]}` over period-1 nodes.
pub fn tree_from_json(v: &Value) -> Result<TemporalTree, FormatError> {
    object(v, "tree")?;
    if v.get("c").is_some() {
        Ok(TemporalTree::deterministic_root(node_from_json(v, "tree")?)?)
    } else {
        Ok(TemporalTree::new(branches_from_json(field(v, "branches", "tree")?, "tree.branches")?)?)
    }
}

fn node_to_json(n: &TreeNode) -> Value {
    if n.children.is_empty() {
        json!({ "c": n.c })
    } else {
        json!({
            "c": n.c,
            "children": n.children.iter().map(|(p, c)| json!([p, node_to_json(c)])).collect::<Vec<_>>(),
        })
    }
}

pub fn tree_to_json(t: &TemporalTree) -> Value {
    match t.root_node() {
        Some(node) => node_to_json(node),
        None => json!({
            "branches": t.branches().iter().map(|(p, n)| json!([p, node_to_json(n)])).collect::<Vec<_>>(),
        }),
    }
}

pub fn parse_tree(text: &str) -> Result<TemporalTree, FormatError> {
    tree_from_json(&serde_json::from_str(text)?)
}

// ---- reports ----

pub fn counterexample_to_json(cx: &Counterexample) -> Value {
    let lotteries: Map<String, Value> = cx
        .lotteries
        .iter()
        .map(|(n, l)| (n.clone(), lottery_to_json(l)))
        .collect();
    json!({
        "note": cx.note,
        "alpha": cx.alpha,
        "lotteries": Value::Object(lotteries),
        "comparisons": cx
            .comparisons
            .iter()
            .map(|c| json!({ "left": c.left, "right": c.right, "verdict": c.verdict.label() }))
            .collect::<Vec<_>>(),
    })
}

pub fn axiom_report_to_json(r: &AxiomReport) -> Value {
    json!({
        "axiom": r.axiom.name(),
        "verdict": r.verdict.to_string(),
        "trials": r.trials,
        "tuples": r.tuples,
        "vacuous": r.vacuous,
        "violation_count": r.violation_count,
        "violations": r.violations.iter().map(counterexample_to_json).collect::<Vec<_>>(),
    })
}

fn region_to_json(r: &SourceRegion) -> Value {
    json!({
        "source": r.source.index(),
        "tested": r.tested,
        "witnesses": r.witnesses,
        "cells": r.cells.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn bracketing_report_to_json(r: &BracketingReport) -> Value {
    json!({
        "label": r.label.to_string(),
        "sigma1": region_to_json(&r.sigma1),
        "sigma2": region_to_json(&r.sigma2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lottery_fractions_and_infinities() {
        let text = r#"{"space": {"lo1": "-inf", "hi1": "inf", "lo2": 0, "hi2": "inf"},
                       "atoms": [[1, 2, [1, 3]], [0, 5, [2, 3]]]}"#;
        let l = parse_lottery(text).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.space().lo2, 0.0);
        assert!((l.prob(1.0, 2.0) - 1.0 / 3.0).abs() < 1e-12);
        let out = lottery_to_json(&l);
        assert_eq!(out["space"]["hi1"], json!("inf"));
        assert_eq!(lottery_from_json(&out).unwrap(), l);
    }

    #[test]
    fn malformed_lottery_is_rejected() {
        assert!(parse_lottery("{\"atoms\": [[1, 2]]}").is_err());
        assert!(parse_lottery("{\"atoms\": [[1, 2, 0.4]]}").is_err());
        assert!(parse_lottery("not json").is_err());
    }

    #[test]
    fn model_round_trip() {
        let models = [
            r#"{"family": "nb", "indices": {"w": {"family": "sum", "params": {"u": {"family": "linear", "params": {"a": 1, "b": 0}}}},
                "v1": {"family": "loss_sqrt", "params": {"lambda": 2}}, "v2": {"family": "sqrt"}}}"#,
            r#"{"family": "gbib_cn", "indices": {"w": {"family": "additive", "params": {"u1": {"family": "power", "params": {"gamma": 0.5}},
                "u2": {"family": "exp", "params": {"a": 0.3}, "scale": 2, "offset": 1}, "beta": 1}},
                "v1": {"family": "power", "params": {"gamma": 0.5}}, "v2": {"family": "sqrt"}}, "H": [[2, 5], [7, "inf"]]}"#,
            r#"{"family": "crra_ces_kmbib", "params": {"rho": 0.5, "alpha": -9, "beta": 0.97}}"#,
            r#"{"family": "km_bib", "indices": {"phi": {"family": "compose", "params": {"outer": {"family": "power", "params": {"gamma": 0.6}},
                "inner": {"family": "table", "params": {"knots": [[0, 0], [1, 2], [4, 3]]}}}}, "u": {"family": "sqrt"}}, "params": {"beta": 0.9}}"#,
        ];
        for text in models {
            let m = parse_model(text).unwrap();
            let out = model_to_json(&m).unwrap();
            assert_eq!(model_from_json(&out).unwrap(), m, "{text}");
            assert_eq!(model_to_json(&model_from_json(&out).unwrap()).unwrap(), out);
        }
    }

    #[test]
    fn bad_models() {
        assert!(parse_model(r#"{"family": "nope"}"#).is_err());
        assert!(parse_model(r#"{"family": "edu", "indices": {"u": {"family": "sqrt"}}, "params": {"beta": 2}}"#).is_err());
        assert!(parse_model(r#"{"family": "eu", "indices": {}}"#).is_err());
    }

    #[test]
    fn tree_round_trip() {
        let node = r#"{"c": 1, "children": [[0.5, {"c": 1.1, "children": [[1, {"c": 1.2}]]}], [0.5, {"c": 0.9, "children": [[1, {"c": 0.8}]]}]]}"#;
        let chance = r#"{"branches": [[[1, 4], {"c": 2}], [[3, 4], {"c": 1}]]}"#;
        for text in [node, chance] {
            let t = parse_tree(text).unwrap();
            let out = tree_to_json(&t);
            assert_eq!(tree_from_json(&out).unwrap(), t);
        }
        assert_eq!(parse_tree(node).unwrap().horizon(), 3);
        assert!(parse_tree(r#"{"c": 1, "children": [[0.5, {"c": 2}]]}"#).is_err());
    }

    #[test]
    fn marginal_round_trip() {
        let m = parse_marginal(r#"{"source": 2, "lo": "-inf", "hi": "inf", "atoms": [[3, 0.5], [-1, 0.5]]}"#).unwrap();
        assert_eq!(m.source(), Source::Two);
        assert_eq!(marginal_from_json(&marginal_to_json(&m)).unwrap(), m);
    }
}
