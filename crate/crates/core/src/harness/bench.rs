//! Monte Carlo comparison of the solvers on generated instances.
//!
//! Run `i` uses seed `base_seed + i`. Runs execute on a rayon pool and are
//! collected in index order, so the summary does not depend on the worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::run_method;
use super::{exit_code, HarnessError};
use crate::bellman::Method;
use crate::ergodicity::{c_d_constant, ergodic_coefficient_m1};
use crate::generator::{random_mdp, GeneratorConfig};
use crate::mdp::{gain_bias_discounted, solve_exact, validate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub num_states: usize,
    pub num_actions: usize,
    pub discount: f64,
    pub rho: f64,
    pub r_max: f64,
    pub support: usize,
    pub target_state: usize,
    pub base_seed: u64,
    pub runs: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub methods: Vec<Method>,
}

impl BenchConfig {
    /// 100 states, 6 actions, `alpha = 0.995`, `rho = 0.1`, `tol = 1e-5`, comparing VI, GS and WDVF.
    pub fn benchmark(runs: usize, base_seed: u64) -> Self {
        let g = GeneratorConfig::benchmark(base_seed);
        Self {
            num_states: g.num_states,
            num_actions: g.num_actions,
            discount: g.discount,
            rho: g.rho,
            r_max: g.r_max,
            support: g.support,
            target_state: g.target_state,
            base_seed,
            runs,
            tol: 1e-5,
            max_iter: 100_000,
            methods: vec![Method::Vi, Method::GaussSeidel, Method::Wdvf],
        }
    }

    pub fn generator_config(&self, index: usize) -> GeneratorConfig {
        GeneratorConfig {
            num_states: self.num_states,
            num_actions: self.num_actions,
            discount: self.discount,
            rho: self.rho,
            r_max: self.r_max,
            seed: self.base_seed.wrapping_add(index as u64),
            target_state: self.target_state,
            support: self.support,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: Method,
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    pub min: usize,
    pub max: usize,
    pub converged_runs: usize,
}

impl MethodStats {
    pub fn from_counts(method: Method, counts: &[usize], converged_runs: usize) -> Self {
        let n = counts.len().max(1) as f64;
        let mean = counts.iter().sum::<usize>() as f64 / n;
        let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n;
        Self {
            method,
            mean,
            std_dev: var.sqrt(),
            min: counts.iter().copied().min().unwrap_or(0),
            max: counts.iter().copied().max().unwrap_or(0),
            converged_runs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub rho: f64,
    pub c_d: f64,
    pub iterations: BTreeMap<Method, usize>,
    pub converged: BTreeMap<Method, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub config: BenchConfig,
    pub runs: usize,
    pub methods: Vec<MethodStats>,
    pub per_run: Vec<RunRecord>,
}

impl BenchSummary {
    pub fn stats(&self, method: Method) -> Option<&MethodStats> {
        self.methods.iter().find(|s| s.method == method)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary is always serialisable");
        s.push('\n');
        s
    }

    /// `run,seed,<method>...` with iteration counts.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("run,seed");
        for m in &self.config.methods {
            out.push(',');
            out.push_str(m.as_str());
        }
        out.push('\n');
        for r in &self.per_run {
            out.push_str(&format!("{},{}", r.index, r.seed));
            for m in &self.config.methods {
                out.push_str(&format!(",{}", r.iterations[m]));
            }
            out.push('\n');
        }
        out
    }
}

/// Per-method sup-norm error sequences of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunErrors {
    pub errors: BTreeMap<Method, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub summary: BenchSummary,
    pub run_errors: Vec<RunErrors>,
}

impl BenchOutput {
    /// Mean of `|V_k - V*|_inf` across runs for each method, defined for the
    /// `k` every run reached.
    pub fn mean_error_curves(&self) -> BTreeMap<Method, Vec<f64>> {
        let mut curves = BTreeMap::new();
        for &m in &self.summary.config.methods {
            let seqs: Vec<&Vec<f64>> = self.run_errors.iter().map(|r| &r.errors[&m]).collect();
            let len = seqs.iter().map(|s| s.len()).min().unwrap_or(0);
            let curve = (0..len)
                .map(|k| seqs.iter().map(|s| s[k]).sum::<f64>() / seqs.len() as f64)
                .collect();
            curves.insert(m, curve);
        }
        curves
    }

    pub fn curve_csv(&self) -> String {
        let curves = self.mean_error_curves();
        let methods = &self.summary.config.methods;
        let rows = curves.values().map(Vec::len).max().unwrap_or(0);
        let mut out = String::from("k");
        for m in methods {
            out.push(',');
            out.push_str(m.as_str());
        }
        out.push('\n');
        for k in 0..rows {
            out.push_str(&k.to_string());
            for m in methods {
                out.push(',');
                if let Some(v) = curves[m].get(k) {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

fn run_one(config: &BenchConfig, index: usize) -> Result<(RunRecord, RunErrors), HarnessError> {
    let gen = config.generator_config(index);
    let fail = |reason: String, code: i32| HarnessError::Run { index, seed: gen.seed, reason, code };
    let mdp = random_mdp(&gen).map_err(|e| fail(e.to_string(), exit_code::USAGE))?;
    let violations = validate(&mdp);
    if !violations.is_empty() {
        return Err(fail(format!("{} invariant violations", violations.len()), exit_code::VALIDATION));
    }
    let numerical = |e: crate::Error| fail(e.to_string(), exit_code::NUMERICAL);
    let (v_star, _) = solve_exact(&mdp).map_err(numerical)?;
    let cert = ergodic_coefficient_m1(&mdp);
    let h_star = gain_bias_discounted(&mdp, &v_star, config.target_state.min(mdp.num_states() - 1))
        .map_err(numerical)?
        .bias;
    let v0 = vec![0.0; mdp.num_states()];
    let c_d = c_d_constant(&mdp, &v0, &h_star, cert.rho, cert.m).map_err(numerical)?;

    let mut record = RunRecord {
        index,
        seed: gen.seed,
        rho: cert.rho,
        c_d,
        iterations: BTreeMap::new(),
        converged: BTreeMap::new(),
    };
    let mut errors = BTreeMap::new();
    for &method in &config.methods {
        let trace = run_method(&mdp, method, &v_star, config.tol, config.max_iter).map_err(numerical)?;
        record.iterations.insert(method, trace.iterations());
        record.converged.insert(method, trace.converged());
        errors.insert(method, trace.records.iter().filter_map(|r| r.sup_error).collect());
    }
    Ok((record, RunErrors { errors }))
}

/// Runs the benchmark on at most `workers` threads (`None`: one per logical core).
pub fn run_bench(config: &BenchConfig, workers: Option<usize>) -> Result<BenchOutput, HarnessError> {
    if config.runs == 0 {
        return Err(crate::Error::InvalidArgument("runs must be at least 1".into()).into());
    }
    if !(config.tol > 0.0) {
        return Err(crate::Error::InvalidArgument(format!("tolerance must be positive, got {}", config.tol)).into());
    }
    if config.methods.is_empty() {
        return Err(crate::Error::InvalidArgument("no methods selected".into()).into());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<(RunRecord, RunErrors)> = pool.install(|| {
        (0..config.runs)
            .into_par_iter()
            .map(|i| run_one(config, i))
            .collect::<Result<_, _>>()
    })?;
    let (per_run, run_errors): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let methods = config
        .methods
        .iter()
        .map(|&m| {
            let counts: Vec<usize> = per_run.iter().map(|r| r.iterations[&m]).collect();
            let converged = per_run.iter().filter(|r| r.converged[&m]).count();
            MethodStats::from_counts(m, &counts, converged)
        })
        .collect();
    Ok(BenchOutput {
        summary: BenchSummary { config: config.clone(), runs: config.runs, methods, per_run },
        run_errors,
    })
}
