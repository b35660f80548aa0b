//! Experiment orchestration: configs, offline training, multi-trial
//! evaluation, Wilcoxon comparisons and result files.

pub mod compare;
pub mod config;
pub mod report;
pub mod runner;
pub mod wilcoxon;

pub use compare::{
    build_comparison, compare_all, render_table, ComparisonCell, ComparisonRow, DEFAULT_ALPHA,
};
pub use config::{DeSettings, ExperimentConfig, ProblemSpec};
pub use report::{
    read_trials, write_report, write_tables, write_trials, COMPARISON_FILE, TABLE_FILE, TRIALS_FILE,
};
pub use runner::{
    evaluate, evaluate_outcomes, offline_train, run_trial, train_to_file, EpisodeLoss,
    LoadedProblem, RunSettings, TrainingReport, TrialOutcome, TrialResult, THREADS_ENV,
};
pub use wilcoxon::{
    exact_p, normal_p, signed_ranks, wilcoxon_signed_rank, WilcoxonResult, EXACT_MAX_N,
};
