use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bracketlab::axioms::MAX_STORED_COUNTEREXAMPLES;
use bracketlab::fit::{fits_to_json, render_fits};
use bracketlab::format::{
    axiom_report_to_json, bracketing_report_to_json, index_from_json, parse_lottery,
    parse_marginal, parse_model, parse_tree, render,
};
use bracketlab::{
    check_axiom, classify_bracketing, compare, evaluate, fit_dataset, run_experiment,
    timing_premium, validate_model, value_tree, AxiomId, ChoiceDataset, CrraParams, Experiment,
    FamilyGrid, ModelOracle, ModelSpec, SamplerConfig, TreeFamily, DEFAULT_BAND,
};

const SEED_VAR: &str = "BRACKETLAB_SEED";

#[derive(Parser)]
#[command(name = "bracketlab", version, about = "Evaluate and test choice-bracketing preference models")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Utility of a lottery under a model.
    Eval { model: PathBuf, lottery: PathBuf },
    /// Certainty equivalent of a marginal lottery under an index.
    Ce { index: PathBuf, marginal: PathBuf },
    /// Compare two lotteries under a model.
    Compare {
        model: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BAND)]
        band: f64,
    },
    /// Run axiom checkers against a model.
    Axioms {
        model: PathBuf,
        /// Axiom to check; repeat for several. Defaults to all.
        #[arg(long = "axiom")]
        axioms: Vec<String>,
        #[command(flatten)]
        sampler: SamplerArgs,
        /// Write the full JSON report, counterexamples included, to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Estimate bracketing regions of a model, or classify the subjects of a
    /// choice dataset (a `.csv` file).
    ClassifyBracketing {
        input: PathBuf,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Fit model families to a choice dataset by 0-1 loss.
    Fit {
        dataset: PathBuf,
        /// Comma-separated families among eu, nb, lambda_mix.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
    },
    /// Run a scripted reproduction: tk1981, multilinear, rabin, timing or all.
    Experiment { name: String },
    /// Recursive value of a consumption tree.
    TreeValue {
        tree: PathBuf,
        #[command(flatten)]
        params: TreeArgs,
    },
    /// Share of consumption given up to have all risk resolve at once.
    TimingPremium {
        tree: PathBuf,
        #[command(flatten)]
        params: TreeArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Money,
    Consumption,
}

#[derive(Args)]
struct SamplerArgs {
    /// Sampler seed; falls back to $BRACKETLAB_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Outcome grid; consumption is used by default for time families.
    #[arg(long, value_enum)]
    grid: Option<Grid>,
}

#[derive(Args)]
struct TreeArgs {
    /// ez, kmbib or edu.
    #[arg(long)]
    family: String,
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
}

impl TreeArgs {
    fn parse(&self) -> Result<(TreeFamily, CrraParams)> {
        let family: TreeFamily = self.family.parse()?;
        Ok((family, CrraParams::new(self.rho, self.alpha, self.beta)?))
    }
}

/// Failures that map to exit code 1.
#[derive(Debug)]
struct ValidationFailure(String);

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> Result<ModelSpec> {
    let model = parse_model(&read(path)?).with_context(|| format!("model file {}", path.display()))?;
    let report = validate_model(&model, 64);
    if !report.passed() {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        return Err(ValidationFailure(format!(
            "model {} fails validation: {}",
            path.display(),
            failed.join("; ")
        ))
        .into());
    }
    Ok(model)
}

fn load_lottery(path: &Path) -> Result<bracketlab::JointLottery> {
    parse_lottery(&read(path)?).with_context(|| format!("lottery file {}", path.display()))
}

fn sampler_config(args: &SamplerArgs, model: &ModelSpec) -> Result<SamplerConfig> {
    let grid = args.grid.unwrap_or(if model.is_time_family() {
        Grid::Consumption
    } else {
        Grid::Money
    });
    let mut cfg = match grid {
        Grid::Money => SamplerConfig::money(),
        Grid::Consumption => SamplerConfig::consumption(),
    };
    cfg.seed = match (args.seed, std::env::var(SEED_VAR)) {
        (Some(s), _) => s,
        (None, Ok(v)) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_VAR}={v:?} is not an unsigned integer"))?,
        (None, Err(_)) => 0,
    };
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    Ok(cfg)
}

fn emit(json_mode: bool, value: serde_json::Value, text: String) {
    if json_mode {
        print!("{}", render(&value));
    } else {
        print!("{text}");
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let j = cli.json;
    match cli.command {
        Command::Eval { model, lottery } => {
            let m = load_model(&model)?;
            let l = load_lottery(&lottery)?;
            let v = evaluate(&m, &l).context("evaluation failed")?;
            emit(j, json!({ "family": m.family_name(), "value": v }), format!("{v}\n"));
        }
        Command::Ce { index, marginal } => {
            let text = read(&index)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("index file {}", index.display()))?;
            let u = index_from_json(&value).with_context(|| format!("index file {}", index.display()))?;
            let m = parse_marginal(&read(&marginal)?)
                .with_context(|| format!("marginal file {}", marginal.display()))?;
            let ce = u.ce(&m).context("certainty equivalent failed")?;
            emit(j, json!({ "ce": ce }), format!("{ce}\n"));
        }
        Command::Compare { model, a, b, band } => {
            let m = load_model(&model)?;
            let (la, lb) = (load_lottery(&a)?, load_lottery(&b)?);
            let p = compare(&m, &la, &lb, band).context("comparison failed")?;
            emit(
                j,
                json!({ "verdict": p.verdict.label(), "utilities": [p.utilities.0, p.utilities.1], "band": p.band }),
                format!("{}\nV(A) = {}\nV(B) = {}\n", p.verdict, p.utilities.0, p.utilities.1),
            );
        }
        Command::Axioms {
            model,
            axioms,
            sampler,
            report,
        } => {
            let m = load_model(&model)?;
            let cfg = sampler_config(&sampler, &m)?;
            let ids: Vec<AxiomId> = if axioms.is_empty() {
                AxiomId::PARAMETERLESS.to_vec()
            } else {
                axioms
                    .iter()
                    .map(|a| a.parse::<AxiomId>().map_err(anyhow::Error::msg))
                    .collect::<Result<_>>()?
            };
            let oracle = ModelOracle::new(m);
            let mut text = format!("seed {} trials {}\n", cfg.seed, cfg.trials);
            let mut entries = Vec::new();
            for id in &ids {
                match check_axiom(id, &oracle, &cfg) {
                    Ok(r) => {
                        text.push_str(&r.summary());
                        text.push('\n');
                        if let Some(cx) = r.violations.first() {
                            text.push_str(&format!("  first counterexample: {}\n", cx.note));
                            for c in &cx.comparisons {
                                text.push_str(&format!("    {} vs {}: {}\n", c.left, c.right, c.verdict));
                            }
                        }
                        entries.push(axiom_report_to_json(&r));
                    }
                    Err(e) => {
                        text.push_str(&format!("{id}: {e}\n"));
                        entries.push(json!({ "axiom": id.name(), "error": e.to_string() }));
                    }
                }
            }
            let value = json!({
                "seed": cfg.seed,
                "trials": cfg.trials,
                "stored_counterexamples_max": MAX_STORED_COUNTEREXAMPLES,
                "reports": entries,
            });
            if let Some(path) = report {
                std::fs::write(&path, render(&value))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            emit(j, value, text);
        }
        Command::ClassifyBracketing { input, sampler } => {
            if input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                let data = ChoiceDataset::load(&input)?;
                let fits = fit_dataset(&data, &FamilyGrid::defaults())?;
                emit(j, fits_to_json(&fits), render_fits(&fits));
            } else {
                let m = load_model(&input)?;
                let cfg = sampler_config(&sampler, &m)?;
                let r = classify_bracketing(&ModelOracle::new(m), &cfg)?;
                emit(j, bracketing_report_to_json(&r), format!("{}\n", r.summary()));
            }
        }
        Command::Fit { dataset, families } => {
            let data = ChoiceDataset::load(&dataset)?;
            let grids = if families.is_empty() {
                FamilyGrid::defaults()
            } else {
                families
                    .iter()
                    .map(|f| {
                        FamilyGrid::default_for(f.trim())
                            .with_context(|| format!("unknown family {f:?}; expected eu, nb or lambda_mix"))
                    })
                    .collect::<Result<_>>()?
            };
            let fits = fit_dataset(&data, &grids)?;
            emit(j, fits_to_json(&fits), render_fits(&fits));
        }
        Command::Experiment { name } => {
            let list: Vec<Experiment> = if name.eq_ignore_ascii_case("all") {
                Experiment::ALL.to_vec()
            } else {
                vec![name.parse::<Experiment>().map_err(anyhow::Error::msg)?]
            };
            let reports: Vec<_> = list.into_iter().map(run_experiment).collect();
            let passed = reports.iter().all(|r| r.passed());
            emit(
                j,
                json!({ "passed": passed, "experiments": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() }),
                reports.iter().map(|r| r.render()).collect(),
            );
            if !passed {
                return Ok(ExitCode::from(2));
            }
        }
        Command::TreeValue { tree, params } => {
            let t = parse_tree(&read(&tree)?).with_context(|| format!("tree file {}", tree.display()))?;
            let (family, prm) = params.parse()?;
            let v = value_tree(family, &t, &prm)?;
            emit(j, json!({ "family": family.to_string(), "value": v }), format!("{v}\n"));
        }
        Command::TimingPremium { tree, params } => {
            let t = parse_tree(&read(&tree)?).with_context(|| format!("tree file {}", tree.display()))?;
            let (family, prm) = params.parse()?;
            let v = timing_premium(family, &t, &prm)?;
            emit(j, json!({ "family": family.to_string(), "premium": v }), format!("{v}\n"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ValidationFailure>().is_none() {
                log::debug!("{e:?}");
            }
            ExitCode::from(1)
        }
    }
}
