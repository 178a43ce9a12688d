//! Two-source lottery algebra, bracketing and correlation-neglect preference
//! models, recursive valuation of consumption trees, and randomized axiom
//! checkers.

pub mod axioms;
pub mod experiments;
pub mod fit;
pub mod format;
pub mod index;
pub mod lottery;
pub mod model;
pub mod temporal;

pub use axioms::{
    check_axiom, classify_bracketing, AxiomError, AxiomId, AxiomReport, AxiomVerdict,
    BracketingLabel, BracketingReport, Comparison, Counterexample, InjectedCase, ModelOracle,
    PreferenceOracle, SamplerConfig, SourceRegion,
};
pub use experiments::{run_experiment, Experiment, ExperimentCheck, ExperimentReport};
pub use fit::{fit_dataset, ChoiceDataset, FamilyGrid, FitError, FitResult, SubjectFit};
pub use format::FormatError;
pub use index::{apply_index, BivariateIndex, Direction, IndexError, IndexKind, UtilityIndex};
pub use lottery::{
    canonical, Dominance, JointAtom, JointLottery, LotteryError, MarginalLottery, OutcomeSpace,
    Source,
};
pub use model::{
    compare, evaluate, validate_model, ModelSpec, OpenSet1D, Preference, ReprError,
    ValidationReport, Verdict, DEFAULT_BAND,
};
pub use temporal::{
    build_iid_tree, collapse_early, induced_path_lottery, timing_premium, value_tree, CrraParams,
    PathLottery, TemporalError, TemporalTree, TreeFamily, TreeNode,
};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
