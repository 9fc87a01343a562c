//! Orchestration behind the command-line tool: file formats, single-instance
//! reports and the Monte Carlo benchmark.

pub mod bench;
pub mod format;
pub mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::mdp::Violation;

/// Process exit codes used by the CLI.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed MDP file: {0}")]
    Parse(String),

    #[error("invalid MDP ({} violations):\n{}", .0.len(), format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("run {index} (seed {seed}): {reason}")]
    Run { index: usize, seed: u64, reason: String, code: i32 },

    #[error(transparent)]
    Core(#[from] crate::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use crate::Error as E;
        match self {
            HarnessError::Io { .. } | HarnessError::Parse(_) | HarnessError::Invalid(_) => {
                exit_code::VALIDATION
            }
            HarnessError::Run { code, .. } => *code,
            HarnessError::Core(e) if e.is_numerical() => exit_code::NUMERICAL,
            HarnessError::Core(E::InvalidArgument(_) | E::StateOutOfRange { .. }) => exit_code::USAGE,
            HarnessError::Core(_) => exit_code::VALIDATION,
        }
    }
}
