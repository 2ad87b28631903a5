//! Experiment runner around the core library: config parsing and
//! validation, per-kind experiment dispatch, and deterministic CSV/JSON
//! report emission.

pub mod config;
pub mod experiments;
pub mod report;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Configuration problems (parse errors, unknown keys or kinds, values
    /// out of range, systems that cannot be built). Exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem problems reading configs or writing reports. Exit code 3.
    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => 2,
            LabError::Io(_) => 3,
        }
    }
}

/// Load a config file, run the experiment, write both outputs.
pub fn run_config_file(path: &str) -> Result<report::RunOutcome, LabError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::Io(format!("reading {path}: {e}")))?;
    let config = config::ExperimentConfig::from_json(&text)?;
    let (outcome, wall_ms) = experiments::run(&config)?;
    report::write_outputs(&config, &outcome, wall_ms)?;
    Ok(outcome)
}
