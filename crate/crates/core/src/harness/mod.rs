//! Experiment presets, replica orchestration and result files.

pub mod config;
pub mod output;
pub mod run;

pub use config::{
    CoverageSpec, ExperimentSpec, GridSpec, ModelSpec, Preset, RenormSpec, RunSpec, CONFIG_SCHEMA,
};
pub use output::{
    emit_outputs, plot_script, read_table, write_table, CoverageCsv, FileEntry, Manifest, ReplicaCsv, TableRow,
    TailRowCsv, TailSampleCsv, MANIFEST_SCHEMA, SEED_RULE,
};
pub use run::{
    aggregate_phase, aggregate_speed, coverage_probe, predicted_sign, run_experiment, run_walk_points,
    speed_curve, static_phase_diagram, CoverageResult, PhaseRow, ReplicaCounts, ReplicaRecord, ResultBody,
    RunResult, SpeedRow, WalkPoint, RESULT_SCHEMA,
};
