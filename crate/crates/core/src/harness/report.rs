//! Single-instance analyses behind `solve`, `mixing` and `bounds`.
//! All of them start from `V_0 = 0`.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::bellman::{
    average_reward_solve, gauss_seidel_iteration, value_iteration, wdqvf_iteration,
    wdvf_iteration, ConvergenceTrace, Method,
};
use crate::ergodicity::{
    default_mixing_horizon, ergodic_coefficient_m1, k_theta, mixing_time_empirical, vi_bound,
    wdqvf_bound, wdvf_bounds, ErgodicityProfile, MixingReport, AVERAGE_REWARD_MAX_ITER,
    AVERAGE_REWARD_TOL,
};
use crate::mdp::{q_from_values, solve_exact, Mdp, ValueFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub reference_state: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub method: Method,
    pub tol: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_sup_error: Option<f64>,
    pub final_span_error: Option<f64>,
    /// `None` when the MDP has no uniformly reachable state at one step.
    pub profile: Option<ErgodicityProfile>,
}

/// Fills the theoretical bound columns of `trace` for its method.
pub fn attach_bounds(trace: &mut ConvergenceTrace, mdp: &Mdp, profile: Option<&ErgodicityProfile>) {
    let alpha = mdp.discount();
    let r_max = mdp.r_max();
    match trace.method {
        Method::Vi => trace.attach_bounds(|k| (Some(vi_bound(r_max, alpha, k)), None)),
        Method::GaussSeidel => {}
        Method::Wdvf => {
            if let Some(p) = profile {
                trace.attach_bounds(|k| match k {
                    0 => (None, None),
                    k => {
                        let b = wdvf_bounds(p.c_d, alpha, p.beta, k - 1);
                        (Some(b.sup), Some(b.span))
                    }
                });
            }
        }
        Method::Wdqvf => {
            if let Some(p) = profile {
                trace.attach_bounds(|k| (wdqvf_bound(p.c_d, alpha, p.beta, k).ok(), None));
            }
        }
    }
}

/// Runs one method with stopping referenced to the exact optimum.
pub fn run_method(
    mdp: &Mdp,
    method: Method,
    v_star: &ValueFunction,
    tol: f64,
    max_iter: usize,
) -> crate::Result<ConvergenceTrace> {
    let v0 = vec![0.0; mdp.num_states()];
    let trace = match method {
        Method::Vi => value_iteration(mdp, &v0, tol, max_iter, Some(v_star))?.1,
        Method::GaussSeidel => gauss_seidel_iteration(mdp, &v0, tol, max_iter, Some(v_star))?.1,
        Method::Wdvf => wdvf_iteration(mdp, &v0, tol, max_iter, Some(v_star))?.1,
        Method::Wdqvf => {
            let q_star = q_from_values(mdp, v_star);
            wdqvf_iteration(mdp, &v0, tol, max_iter, Some(&q_star))?.1
        }
    };
    Ok(trace)
}

fn profile_or_none(mdp: &Mdp, z: usize, v_star: &ValueFunction) -> crate::Result<Option<ErgodicityProfile>> {
    if !ergodic_coefficient_m1(mdp).is_certified() {
        return Ok(None);
    }
    let v0 = vec![0.0; mdp.num_states()];
    ErgodicityProfile::with_optimum(mdp, &v0, z, v_star).map(Some)
}

pub fn solve(mdp: &Mdp, options: &SolveOptions) -> Result<(ConvergenceTrace, SolveResult), HarnessError> {
    mdp.check_state(options.reference_state)?;
    let (v_star, _) = solve_exact(mdp)?;
    let profile = profile_or_none(mdp, options.reference_state, &v_star)?;
    let mut trace = run_method(mdp, options.method, &v_star, options.tol, options.max_iter)?;
    attach_bounds(&mut trace, mdp, profile.as_ref());
    let last = trace.final_record().copied();
    let result = SolveResult {
        method: options.method,
        tol: options.tol,
        iterations: trace.iterations(),
        converged: trace.converged(),
        final_sup_error: last.and_then(|r| r.sup_error),
        final_span_error: last.and_then(|r| r.span_error),
        profile,
    };
    Ok((trace, result))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingAnalysis {
    pub gain: f64,
    pub reference_state: usize,
    pub rho: f64,
    pub beta: f64,
    pub c_d: f64,
    pub c_a: f64,
    /// `beta >= epsilon tau / (2 C_a + epsilon tau)`.
    pub beta_bound_holds: bool,
    pub theta: Option<f64>,
    pub k_theta: Option<f64>,
    pub report: MixingReport,
}

pub fn analyze_mixing(
    mdp: &Mdp,
    epsilon: f64,
    n_max: Option<usize>,
    theta: Option<f64>,
    z: usize,
) -> Result<MixingAnalysis, HarnessError> {
    mdp.check_state(z)?;
    let (v_star, _) = solve_exact(mdp)?;
    let profile = ErgodicityProfile::with_optimum(mdp, &vec![0.0; mdp.num_states()], z, &v_star)?;
    let avg = average_reward_solve(mdp, z, AVERAGE_REWARD_TOL, AVERAGE_REWARD_MAX_ITER)?;
    let c_a = profile.c_a.expect("average-reward solve succeeded above");
    let n_max = n_max.unwrap_or_else(|| default_mixing_horizon(epsilon, profile.beta));
    let report = mixing_time_empirical(mdp, &avg.policy, avg.gain, c_a, epsilon, n_max)?;
    let k = theta.map(|t| k_theta(t, mdp.discount(), profile.c_d, c_a, epsilon, report.tau));
    Ok(MixingAnalysis {
        gain: avg.gain,
        reference_state: z,
        rho: profile.rho,
        beta: profile.beta,
        c_d: profile.c_d,
        c_a,
        beta_bound_holds: profile.beta >= report.beta_lower,
        theta,
        k_theta: k,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: usize,
    pub vi: f64,
    pub wdvf_sup: Option<f64>,
    pub wdvf_span: Option<f64>,
    pub wdqvf: Option<f64>,
}

pub const BOUNDS_HEADER: &str = "k,vi_bound,wdvf_bound_sup,wdvf_bound_span,wdqvf_bound";

/// Profile plus a table of every bound for `k = 0..=max_k`.
pub fn bounds_table(
    mdp: &Mdp,
    max_k: usize,
    z: usize,
) -> Result<(ErgodicityProfile, Vec<BoundRow>), HarnessError> {
    let profile = ErgodicityProfile::compute(mdp, &vec![0.0; mdp.num_states()], z)?;
    let alpha = mdp.discount();
    let rows = (0..=max_k)
        .map(|k| {
            let wd = (k > 0).then(|| wdvf_bounds(profile.c_d, alpha, profile.beta, k - 1));
            BoundRow {
                k,
                vi: vi_bound(mdp.r_max(), alpha, k),
                wdvf_sup: wd.map(|b| b.sup),
                wdvf_span: wd.map(|b| b.span),
                wdqvf: wdqvf_bound(profile.c_d, alpha, profile.beta, k).ok(),
            }
        })
        .collect();
    Ok((profile, rows))
}

pub fn bounds_to_csv(rows: &[BoundRow]) -> String {
    let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            r.vi,
            cell(r.wdvf_sup),
            cell(r.wdvf_span),
            cell(r.wdqvf)
        ));
    }
    out
}
