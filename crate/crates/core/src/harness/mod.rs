//! Experiment specs, stale-value training, episode records and summaries.

pub mod config;
pub mod experiment;
pub mod records;
pub mod train;

pub use config::{AgentKind, AgentSpec, AlphaSetting, EnvSpec, ExperimentSpec, NoiseSpec, RunSpec, SweepSpec, TrainingSpec};
pub use experiment::{episode_seed, run_experiment, sweep_experiment, sweep_seed, train_stale_q, ExperimentOutcome};
pub use records::{
    read_records, read_records_file, summarize, summarize_records, write_records, write_records_file, EpisodeRecord,
    Metric, Summary, TableRow,
};
pub use train::{
    evaluate_greedy, q_learning_cartpole, DiscretizedQ, Discretizer, Provenance, QLearningConfig, StaleArtifact,
    StaleTable, TrainingMethod, TrainingReport,
};
