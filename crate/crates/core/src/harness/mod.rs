//! Experiment driver, statistics, export and the one-dimensional demos.

pub mod demos;
pub mod experiment;
pub mod export;
pub mod stats;

pub use demos::{case_study_1d, offspring_distribution_demo, ShiftReport, ShiftSetup, SnapshotReport, SnapshotSetup};
pub use experiment::{
    run_experiment, summarize, AlgorithmSpec, CellSummary, ExperimentResult, ExperimentSpec, MeanRank, OutputPaths,
    RunRecord, StatsSummary,
};
pub use export::RawResults;
pub use stats::{mean_rank, wilcoxon_rank_sum, Mark, RankSumTest};
