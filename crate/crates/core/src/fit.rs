//! Binary-choice datasets and exhaustive grid fits under 0-1 loss.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::format::{parse_lottery, FormatError};
use crate::index::{BivariateIndex, IndexError, UtilityIndex};
use crate::lottery::JointLottery;
use crate::model::{compare, ModelSpec, Verdict, DEFAULT_BAND};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("dataset row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("dataset: {0}")]
    Csv(#[from] csv::Error),
    #[error("lottery file {path}: {source}")]
    Lottery { path: PathBuf, source: FormatError },
    #[error("dataset has no observations")]
    Empty,
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    A,
    B,
    Indifferent,
}

impl Choice {
    /// The verdict of `A` against `B` that this choice reveals.
    pub fn verdict(self) -> Verdict {
        match self {
            Choice::A => Verdict::StrictlyPrefers,
            Choice::B => Verdict::StrictlyDispreferred,
            Choice::Indifferent => Verdict::Indifferent,
        }
    }

    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::StrictlyPrefers => Choice::A,
            Verdict::StrictlyDispreferred => Choice::B,
            Verdict::Indifferent => Choice::Indifferent,
        }
    }
}

impl FromStr for Choice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Choice::A),
            "b" => Ok(Choice::B),
            "indifferent" | "i" | "=" => Ok(Choice::Indifferent),
            other => Err(format!("choice must be A, B or indifferent, got {other:?}")),
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Choice::A => "A",
            Choice::B => "B",
            Choice::Indifferent => "indifferent",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub a: JointLottery,
    pub b: JointLottery,
    pub choice: Choice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub id: String,
    pub observations: Vec<Observation>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChoiceDataset {
    /// Subjects in order of first appearance.
    pub subjects: Vec<Subject>,
}

impl ChoiceDataset {
    pub fn push(&mut self, subject: &str, obs: Observation) {
        match self.subjects.iter_mut().find(|s| s.id == subject) {
            Some(s) => s.observations.push(obs),
            None => self.subjects.push(Subject {
                id: subject.to_string(),
                observations: vec![obs],
            }),
        }
    }

    pub fn observation_count(&self) -> usize {
        self.subjects.iter().map(|s| s.observations.len()).sum()
    }

    /// Read a CSV with header `subject,lotteryA_path,lotteryB_path,choice`.
    /// Relative lottery paths resolve against the CSV's directory; each
    /// lottery file is parsed once.
    pub fn load(path: &Path) -> Result<Self, FitError> {
        let text = std::fs::read_to_string(path).map_err(|source| FitError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_csv(&text, base)
    }

    pub fn from_csv(text: &str, base: &Path) -> Result<Self, FitError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        let expected = ["subject", "lotteryA_path", "lotteryB_path", "choice"];
        if header.len() != 4 || header.iter().zip(expected).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
            return Err(FitError::Row {
                row: 1,
                msg: format!("header must be {}", expected.join(",")),
            });
        }
        let mut cache: BTreeMap<PathBuf, JointLottery> = BTreeMap::new();
        let mut load = |p: &str| -> Result<JointLottery, FitError> {
            let full = base.join(p);
            if let Some(l) = cache.get(&full) {
                return Ok(l.clone());
            }
            let text = std::fs::read_to_string(&full).map_err(|source| FitError::Io {
                path: full.clone(),
                source,
            })?;
            let l = parse_lottery(&text).map_err(|source| FitError::Lottery {
                path: full.clone(),
                source,
            })?;
            cache.insert(full, l.clone());
            Ok(l)
        };
        let mut data = ChoiceDataset::default();
        for (k, record) in reader.records().enumerate() {
            let record = record?;
            let row = k + 2;
            let choice = record[3]
                .parse::<Choice>()
                .map_err(|msg| FitError::Row { row, msg })?;
            if record[0].is_empty() {
                return Err(FitError::Row {
                    row,
                    msg: "empty subject id".into(),
                });
            }
            let obs = Observation {
                a: load(&record[1])?,
                b: load(&record[2])?,
                choice,
            };
            data.push(&record[0], obs);
        }
        if data.subjects.is_empty() {
            return Err(FitError::Empty);
        }
        Ok(data)
    }
}

/// A fitted family and the parameter grid it is searched over.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyGrid {
    /// EU with `w(x, y) = v(x + y)`, `v` the loss-averse square root.
    Eu { lambdas: Vec<f64> },
    /// Narrow bracketing with `w = x + y` and loss-averse square roots.
    Nb { lambdas: Vec<f64> },
    /// `lambda`-mixture of broad and narrow expected utility, with the
    /// loss-averse square root as `u`.
    LambdaMix { losses: Vec<f64>, mixes: Vec<f64> },
}

impl FamilyGrid {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyGrid::Eu { .. } => "eu",
            FamilyGrid::Nb { .. } => "nb",
            FamilyGrid::LambdaMix { .. } => "lambda_mix",
        }
    }

    pub fn parameter_count(&self) -> usize {
        match self {
            FamilyGrid::Eu { .. } | FamilyGrid::Nb { .. } => 1,
            FamilyGrid::LambdaMix { .. } => 2,
        }
    }

    /// Default grid for a family name.
    pub fn default_for(name: &str) -> Option<Self> {
        let losses = vec![1.0, 1.5, 2.0, 2.5, 3.0];
        match name {
            "eu" => Some(FamilyGrid::Eu { lambdas: losses }),
            "nb" => Some(FamilyGrid::Nb { lambdas: losses }),
            "lambda_mix" => Some(FamilyGrid::LambdaMix {
                losses,
                mixes: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            }),
            _ => None,
        }
    }

    pub fn defaults() -> Vec<Self> {
        ["eu", "nb", "lambda_mix"]
            .into_iter()
            .filter_map(Self::default_for)
            .collect()
    }

    /// Models in grid order, with their parameter assignments.
    fn candidates(&self) -> Result<Vec<(Vec<(String, f64)>, ModelSpec)>, IndexError> {
        let v = UtilityIndex::loss_averse_sqrt;
        let mut out = Vec::new();
        match self {
            FamilyGrid::Eu { lambdas } => {
                for &l in lambdas {
                    let w = BivariateIndex::sum(v(l)?);
                    out.push((vec![("lambda".into(), l)], ModelSpec::Eu { w }));
                }
            }
            FamilyGrid::Nb { lambdas } => {
                for &l in lambdas {
                    let model = ModelSpec::Nb {
                        w: BivariateIndex::sum(UtilityIndex::identity()),
                        v1: v(l)?,
                        v2: v(l)?,
                    };
                    out.push((vec![("lambda".into(), l)], model));
                }
            }
            FamilyGrid::LambdaMix { losses, mixes } => {
                for &l in losses {
                    for &m in mixes {
                        let model = ModelSpec::LambdaMix { u: v(l)?, lambda: m };
                        out.push((vec![("loss".into(), l), ("mix".into(), m)], model));
                    }
                }
            }
        }
        Ok(out)
    }

    fn is_empty(&self) -> bool {
        match self {
            FamilyGrid::Eu { lambdas } | FamilyGrid::Nb { lambdas } => lambdas.is_empty(),
            FamilyGrid::LambdaMix { losses, mixes } => losses.is_empty() || mixes.is_empty(),
        }
    }
}

/// Model prediction for one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Matches,
    Mismatch(Verdict),
    /// The model cannot evaluate one of the lotteries.
    OutOfDomain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: &'static str,
    pub params: Vec<(String, f64)>,
    pub violations: usize,
    /// Observations outside the family's domain. They count toward the
    /// loss, since the family does not explain them.
    pub skipped: usize,
    pub observations: usize,
    pub predictions: Vec<Prediction>,
}

impl FitResult {
    pub fn loss(&self) -> usize {
        self.violations + self.skipped
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectFit {
    pub subject: String,
    /// One best fit per searched family, in the order families were given.
    pub results: Vec<FitResult>,
    /// Index into `results` of the winning family.
    pub best: Option<usize>,
}

impl SubjectFit {
    pub fn best(&self) -> Option<&FitResult> {
        self.best.map(|k| &self.results[k])
    }
}

fn score(model: &ModelSpec, observations: &[Observation]) -> (usize, usize, Vec<Prediction>) {
    let mut violations = 0;
    let mut skipped = 0;
    let predictions = observations
        .iter()
        .map(|o| match compare(model, &o.a, &o.b, DEFAULT_BAND) {
            Ok(p) if p.verdict == o.choice.verdict() => Prediction::Matches,
            Ok(p) => {
                violations += 1;
                Prediction::Mismatch(p.verdict)
            }
            Err(e) => {
                log::debug!("{} cannot evaluate an observation: {e}", model.family_name());
                skipped += 1;
                Prediction::OutOfDomain
            }
        })
        .collect();
    (violations, skipped, predictions)
}

fn fit_family(grid: &FamilyGrid, observations: &[Observation]) -> Result<FitResult, FitError> {
    let mut best: Option<FitResult> = None;
    for (params, model) in grid.candidates()? {
        let (violations, skipped, predictions) = score(&model, observations);
        let candidate = FitResult {
            family: grid.name(),
            params,
            violations,
            skipped,
            observations: observations.len(),
            predictions,
        };
        // Strict improvement only: earlier grid points win ties.
        if best.as_ref().map_or(true, |b| candidate.loss() < b.loss()) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("nonempty grid"))
}

/// Fit every family to every subject. Families with empty grids are
/// dropped with a warning. The best family per subject minimizes the loss,
/// then the parameter count, then its position in `families`.
pub fn fit_dataset(data: &ChoiceDataset, families: &[FamilyGrid]) -> Result<Vec<SubjectFit>, FitError> {
    let active: Vec<&FamilyGrid> = families
        .iter()
        .filter(|f| {
            if f.is_empty() {
                log::warn!("family {} has an empty parameter grid and is omitted", f.name());
                false
            } else {
                true
            }
        })
        .collect();
    let mut out = Vec::with_capacity(data.subjects.len());
    for subject in &data.subjects {
        let results = active
            .iter()
            .map(|g| fit_family(g, &subject.observations))
            .collect::<Result<Vec<_>, _>>()?;
        let best = (0..results.len()).min_by_key(|&k| {
            (results[k].loss(), active[k].parameter_count(), k)
        });
        out.push(SubjectFit {
            subject: subject.id.clone(),
            results,
            best,
        });
    }
    Ok(out)
}

/// Bracketing reading of a fitted family.
pub fn bracketing_label(family: &str) -> &'static str {
    match family {
        "eu" => "broad",
        "nb" => "narrow",
        "lambda_mix" => "partial",
        _ => "unknown",
    }
}

fn fit_result_json(r: &FitResult) -> Value {
    let params: serde_json::Map<String, Value> =
        r.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "family": r.family,
        "params": Value::Object(params),
        "violations": r.violations,
        "skipped": r.skipped,
        "observations": r.observations,
    })
}

pub fn fits_to_json(fits: &[SubjectFit]) -> Value {
    json!({
        "tie_rule": "lowest loss, then fewer parameters, then family order; within a family, first grid point",
        "subjects": fits.iter().map(|s| json!({
            "subject": s.subject,
            "best": s.best().map(|b| b.family),
            "bracketing": s.best().map(|b| bracketing_label(b.family)),
            "results": s.results.iter().map(fit_result_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn render_fits(fits: &[SubjectFit]) -> String {
    let mut out = String::new();
    for s in fits {
        let best = s.best().map_or("none", |b| b.family);
        out.push_str(&format!("subject {}: best {} ({})\n", s.subject, best, bracketing_label(best)));
        for r in &s.results {
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "  {:<11} {:<20} violations {}/{} skipped {}\n",
                r.family,
                params.join(" "),
                r.violations,
                r.observations,
                r.skipped
            ));
        }
    }
    out.push_str("ties: lowest loss, then fewer parameters, then family order\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::tk1981_options;
    use crate::lottery::{MarginalLottery, OutcomeSpace, Source};

    fn product_pairs() -> Vec<(JointLottery, JointLottery)> {
        let [a, b, c, d] = tk1981_options();
        let prod = |p: &MarginalLottery, q: &MarginalLottery| JointLottery::product(p, q).unwrap();
        let space = OutcomeSpace::unbounded();
        let m = |s, atoms: &[(f64, f64)]| MarginalLottery::on(&space, s, atoms.iter().copied()).unwrap();
        let coin = m(Source::Two, &[(-4.0, 0.5), (6.0, 0.5)]);
        let sure = m(Source::Two, &[(0.5, 1.0)]);
        let w = m(Source::One, &[(3.0, 1.0)]);
        vec![
            (prod(&a, &d), prod(&b, &c)),
            (prod(&a, &c), prod(&b, &d)),
            (prod(&w, &coin), prod(&w, &sure)),
            (prod(&b, &coin), prod(&a, &sure)),
        ]
    }

    fn synthesize(model: &ModelSpec, subject: &str) -> ChoiceDataset {
        let mut data = ChoiceDataset::default();
        for (a, b) in product_pairs() {
            let v = compare(model, &a, &b, DEFAULT_BAND).unwrap().verdict;
            data.push(subject, Observation { a, b, choice: Choice::from_verdict(v) });
        }
        data
    }

    #[test]
    fn recovers_generating_family() {
        let v = UtilityIndex::loss_averse_sqrt(2.0).unwrap();
        let nb = ModelSpec::Nb {
            w: BivariateIndex::sum(UtilityIndex::identity()),
            v1: v.clone(),
            v2: v.clone(),
        };
        let fits = fit_dataset(&synthesize(&nb, "n"), &FamilyGrid::defaults()).unwrap();
        let best = fits[0].best().unwrap();
        assert_eq!(best.family, "nb");
        assert_eq!(best.violations, 0);

        let eu = ModelSpec::Eu { w: BivariateIndex::sum(v) };
        let fits = fit_dataset(&synthesize(&eu, "e"), &FamilyGrid::defaults()).unwrap();
        assert_eq!(fits[0].best().unwrap().family, "eu");
        assert_eq!(fits[0].best().unwrap().violations, 0);
        let nb_fit = fits[0].results.iter().find(|r| r.family == "nb").unwrap();
        assert!(nb_fit.violations > 0);
    }

    #[test]
    fn empty_grid_is_omitted() {
        let v = UtilityIndex::loss_averse_sqrt(2.0).unwrap();
        let eu = ModelSpec::Eu { w: BivariateIndex::sum(v) };
        let families = [FamilyGrid::Nb { lambdas: vec![] }, FamilyGrid::default_for("eu").unwrap()];
        let fits = fit_dataset(&synthesize(&eu, "e"), &families).unwrap();
        assert_eq!(fits[0].results.len(), 1);
        assert_eq!(fits[0].results[0].family, "eu");
    }

    #[test]
    fn ties_prefer_fewer_parameters() {
        // A riskless choice every family explains.
        let space = OutcomeSpace::unbounded();
        let mut data = ChoiceDataset::default();
        data.push(
            "t",
            Observation {
                a: JointLottery::degenerate(2.0, 2.0, space).unwrap(),
                b: JointLottery::degenerate(1.0, 1.0, space).unwrap(),
                choice: Choice::A,
            },
        );
        let families = [FamilyGrid::default_for("lambda_mix").unwrap(), FamilyGrid::default_for("nb").unwrap(), FamilyGrid::default_for("eu").unwrap()];
        let fits = fit_dataset(&data, &families).unwrap();
        assert_eq!(fits[0].best().unwrap().family, "nb");
        assert_eq!(fits[0].best().unwrap().params, vec![("lambda".to_string(), 1.0)]);
    }

    #[test]
    fn csv_loading() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.json"), r#"{"atoms": [[1, 1, 1]]}"#).unwrap();
        std::fs::write(dir.path().join("b.json"), r#"{"atoms": [[0, 0, 0.5], [3, 0, 0.5]]}"#).unwrap();
        let csv = "subject,lotteryA_path,lotteryB_path,choice\ns1,a.json,b.json,A\ns2,a.json,b.json,indifferent\ns1,b.json,a.json,B\n";
        let path = dir.path().join("data.csv");
        std::fs::write(&path, csv).unwrap();
        let data = ChoiceDataset::load(&path).unwrap();
        assert_eq!(data.subjects.len(), 2);
        assert_eq!(data.subjects[0].observations.len(), 2);
        assert_eq!(data.observation_count(), 3);

        std::fs::write(&path, "subject,lotteryA_path,lotteryB_path,choice\ns1,a.json,b.json,maybe\n").unwrap();
        assert!(matches!(ChoiceDataset::load(&path), Err(FitError::Row { row: 2, .. })));
        std::fs::write(&path, "subject,lotteryA_path,lotteryB_path,choice\ns1,a.json,missing.json,A\n").unwrap();
        assert!(ChoiceDataset::load(&path).is_err());
    }
}
