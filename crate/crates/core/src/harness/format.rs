//! On-disk formats: the JSON MDP file and the CSV convergence trace.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::bellman::ConvergenceTrace;
use crate::mdp::{validate, Mdp};

/// Rewards either per `(a, x)` (successor-independent) or per `(a, x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RewardTable {
    PerState(Vec<Vec<f64>>),
    PerTransition(Vec<Vec<Vec<f64>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpFile {
    pub num_states: usize,
    pub num_actions: usize,
    pub discount: f64,
    pub r_max: f64,
    pub rewards: RewardTable,
    pub transitions: Vec<Vec<Vec<f64>>>,
}

impl From<&Mdp> for MdpFile {
    fn from(mdp: &Mdp) -> Self {
        let rewards = match mdp.state_rewards() {
            Some(r) => RewardTable::PerState(r),
            None => RewardTable::PerTransition(mdp.rewards_nested()),
        };
        Self {
            num_states: mdp.num_states(),
            num_actions: mdp.num_actions(),
            discount: mdp.discount(),
            r_max: mdp.r_max(),
            rewards,
            transitions: mdp.transitions_nested(),
        }
    }
}

impl MdpFile {
    pub fn to_mdp(&self) -> Result<Mdp, HarnessError> {
        let mdp = match &self.rewards {
            RewardTable::PerState(r) => {
                Mdp::from_state_rewards(&self.transitions, r, self.discount, self.r_max)?
            }
            RewardTable::PerTransition(r) => {
                Mdp::from_nested(&self.transitions, r, self.discount, self.r_max)?
            }
        };
        if mdp.num_states() != self.num_states || mdp.num_actions() != self.num_actions {
            return Err(crate::Error::Dimension(format!(
                "file declares {} states and {} actions but tables are {} x {}",
                self.num_states,
                self.num_actions,
                mdp.num_actions(),
                mdp.num_states()
            ))
            .into());
        }
        Ok(mdp)
    }
}

/// Serialises an MDP. Floats use the shortest representation that parses
/// back to the identical `f64`.
pub fn mdp_to_json(mdp: &Mdp) -> String {
    let mut s = serde_json::to_string_pretty(&MdpFile::from(mdp)).expect("MDP file is always serialisable");
    s.push('\n');
    s
}

pub fn mdp_from_json(text: &str) -> Result<Mdp, HarnessError> {
    let file: MdpFile = serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    file.to_mdp()
}

pub fn write_mdp(path: &Path, mdp: &Mdp) -> Result<(), HarnessError> {
    write_text(path, &mdp_to_json(mdp))
}

/// Reads an MDP file and rejects it unless every invariant holds.
pub fn read_mdp(path: &Path) -> Result<Mdp, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mdp = mdp_from_json(&text)?;
    let violations = validate(&mdp);
    if !violations.is_empty() {
        return Err(HarnessError::Invalid(violations));
    }
    Ok(mdp)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub const TRACE_HEADER: &str = "k,sup_error,span_error,bound_sup,bound_span";

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Trace as CSV: header row then one row per Bellman sweep, LF endings,
/// empty cells for absent values.
pub fn trace_to_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            cell(r.sup_error),
            cell(r.span_error),
            cell(r.bound_sup),
            cell(r.bound_span)
        );
    }
    out
}
