//! Bellman operators and the iteration schemes built on them.
//!
//! Every driver counts one full Bellman sweep as one iteration, so trace
//! index `k` is comparable across methods. For the weighted-difference
//! schemes the estimate at index `k` is built from the classical iterates
//! `T^k[V_0]` and `T^{k-1}[V_0]`; index 0 is the initial estimate itself.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{argmax, span_distance, span_seminorm, sup_distance, sup_norm};
use crate::mdp::{Mdp, Policy, QFunction, ValueFunction};

/// `T[v](x) = max_a sum_y P_a(x,y)(R_a(x,y) + alpha v(y))`.
pub fn apply_t(mdp: &Mdp, v: &[f64]) -> ValueFunction {
    (0..mdp.num_states())
        .map(|x| {
            (0..mdp.num_actions())
                .map(|a| mdp.lookahead(a, x, v))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect::<Vec<_>>()
        .into()
}

/// `F[q](x,a) = sum_y P_a(x,y)(R_a(x,y) + alpha max_b q(y,b))`.
pub fn apply_f(mdp: &Mdp, q: &QFunction) -> QFunction {
    let best = q.max_over_actions();
    QFunction::from_fn(mdp.num_states(), mdp.num_actions(), |x, a| mdp.lookahead(a, x, &best))
}

/// Undiscounted backup `T_bar[h](x) = max_a sum_y P_a(x,y)(h(y) + R_a(x,y))`.
pub fn apply_t_bar(mdp: &Mdp, h: &[f64]) -> ValueFunction {
    (0..mdp.num_states())
        .map(|x| {
            (0..mdp.num_actions())
                .map(|a| mdp.expected_reward(a, x) + mdp.expectation(a, x, h))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect::<Vec<_>>()
        .into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Vi,
    GaussSeidel,
    Wdvf,
    Wdqvf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Vi, Method::GaussSeidel, Method::Wdvf, Method::Wdqvf];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Vi => "vi",
            Method::GaussSeidel => "gs",
            Method::Wdvf => "wdvf",
            Method::Wdqvf => "wdqvf",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vi" => Ok(Method::Vi),
            "gs" | "gauss_seidel" | "gauss-seidel" => Ok(Method::GaussSeidel),
            "wdvf" => Ok(Method::Wdvf),
            "wdqvf" => Ok(Method::Wdqvf),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// One row of a convergence trace. Errors are `None` when the run had no reference solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub sup_error: Option<f64>,
    pub span_error: Option<f64>,
    pub bound_sup: Option<f64>,
    pub bound_span: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub method: Method,
    pub tol: f64,
    pub records: Vec<TraceRecord>,
    /// First `k` satisfying the stopping rule, `None` if `max_iter` ran out.
    pub iterations_to_tol: Option<usize>,
}

impl ConvergenceTrace {
    fn new(method: Method, tol: f64) -> Self {
        Self { method, tol, records: Vec::new(), iterations_to_tol: None }
    }

    pub fn converged(&self) -> bool {
        self.iterations_to_tol.is_some()
    }

    /// Number of Bellman sweeps performed.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Fills `bound_sup` / `bound_span` from a per-index bound function.
    pub fn attach_bounds(&mut self, bounds: impl Fn(usize) -> (Option<f64>, Option<f64>)) {
        for r in &mut self.records {
            let (sup, span) = bounds(r.k);
            r.bound_sup = sup;
            r.bound_span = span;
        }
    }

    fn push(&mut self, k: usize, estimate: &[f64], reference: Option<&[f64]>) -> Option<f64> {
        let sup_error = reference.map(|r| sup_distance(estimate, r));
        let span_error = reference.map(|r| span_distance(estimate, r));
        self.records.push(TraceRecord { k, sup_error, span_error, bound_sup: None, bound_span: None });
        sup_error
    }
}

/// Classical iterates `T^k[V_0]` for `k = 0, 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct ClassicalIterates<'a> {
    mdp: &'a Mdp,
    next: ValueFunction,
}

impl<'a> ClassicalIterates<'a> {
    pub fn new(mdp: &'a Mdp, v0: &[f64]) -> Self {
        Self { mdp, next: v0.to_vec().into() }
    }
}

impl Iterator for ClassicalIterates<'_> {
    type Item = ValueFunction;

    fn next(&mut self) -> Option<ValueFunction> {
        let following = apply_t(self.mdp, &self.next);
        Some(std::mem::replace(&mut self.next, following))
    }
}

/// `(T^k[V_0] - alpha T^{k-1}[V_0]) / (1 - alpha)`, elementwise.
pub fn weighted_difference(current: &[f64], previous: &[f64], alpha: f64) -> Vec<f64> {
    current
        .iter()
        .zip(previous)
        .map(|(c, p)| (c - alpha * p) / (1.0 - alpha))
        .collect()
}

/// Weighted-difference value estimates `V_k` for `k = 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct WdvfIterates<'a> {
    classical: ClassicalIterates<'a>,
    previous: ValueFunction,
    alpha: f64,
}

impl<'a> WdvfIterates<'a> {
    pub fn new(mdp: &'a Mdp, v0: &[f64]) -> Self {
        let mut classical = ClassicalIterates::new(mdp, v0);
        let previous = classical.next().expect("classical iterates are unbounded");
        Self { classical, previous, alpha: mdp.discount() }
    }
}

impl Iterator for WdvfIterates<'_> {
    type Item = ValueFunction;

    fn next(&mut self) -> Option<ValueFunction> {
        let current = self.classical.next()?;
        let estimate = weighted_difference(&current, &self.previous, self.alpha);
        self.previous = current;
        Some(estimate.into())
    }
}

/// Weighted-difference Q estimates `Q_k` for `k = 1, 2, ...`, with `Q_0(x,a) = V_0(x)`.
#[derive(Debug, Clone)]
pub struct WdqvfIterates<'a> {
    mdp: &'a Mdp,
    previous: QFunction,
}

impl<'a> WdqvfIterates<'a> {
    pub fn new(mdp: &'a Mdp, v0: &[f64]) -> Self {
        Self { mdp, previous: QFunction::from_state_values(v0, mdp.num_actions()) }
    }
}

impl Iterator for WdqvfIterates<'_> {
    type Item = QFunction;

    fn next(&mut self) -> Option<QFunction> {
        let current = apply_f(self.mdp, &self.previous);
        let alpha = self.mdp.discount();
        let estimate = QFunction::from_fn(self.mdp.num_states(), self.mdp.num_actions(), |x, a| {
            (current.get(x, a) - alpha * self.previous.get(x, a)) / (1.0 - alpha)
        });
        self.previous = current;
        Some(estimate)
    }
}

/// Envelope for `V_{k+1} - V_k` given `c = T^{k-1}[V_0] - T^k[V_0]`:
/// `alpha (c(x) -/+ |c|_inf) / (1 - alpha)`. Returns `(lower, upper)`.
pub fn successive_difference_envelope(
    older: &[f64],
    newer: &[f64],
    alpha: f64,
) -> (Vec<f64>, Vec<f64>) {
    let c: Vec<f64> = older.iter().zip(newer).map(|(o, n)| o - n).collect();
    let c_sup = sup_norm(&c);
    let scale = alpha / (1.0 - alpha);
    let lower = c.iter().map(|c| scale * (c - c_sup)).collect();
    let upper = c.iter().map(|c| scale * (c + c_sup)).collect();
    (lower, upper)
}

fn check_run_args(mdp: &Mdp, v0: &[f64], tol: f64, reference_len: Option<usize>) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    mdp.check_len("initial value function", v0.len())?;
    if let Some(len) = reference_len {
        mdp.check_len("reference value function", len)?;
    }
    Ok(())
}

/// Threshold on `|V_{k} - V_{k-1}|_inf` that guarantees `|V_k - V*|_inf <= tol / 2`.
fn successive_threshold(tol: f64, alpha: f64) -> f64 {
    tol * (1.0 - alpha) / (2.0 * alpha)
}

/// Classical value iteration `V_k = T^k[v0]`.
///
/// With `v_star` the run stops at the first `k` whose sup-norm error is at
/// most `tol`; otherwise it stops once successive iterates differ by at most
/// `tol (1 - alpha) / (2 alpha)`. Running out of `max_iter` is not an error:
/// the trace is returned with `iterations_to_tol == None`.
pub fn value_iteration(
    mdp: &Mdp,
    v0: &[f64],
    tol: f64,
    max_iter: usize,
    v_star: Option<&[f64]>,
) -> Result<(ValueFunction, ConvergenceTrace)> {
    check_run_args(mdp, v0, tol, v_star.map(<[f64]>::len))?;
    let threshold = successive_threshold(tol, mdp.discount());
    let mut trace = ConvergenceTrace::new(Method::Vi, tol);
    let mut current = ValueFunction::new(v0.to_vec());
    let mut previous: Option<ValueFunction> = None;
    for k in 0..=max_iter {
        if k > 0 {
            let next = apply_t(mdp, &current);
            previous = Some(std::mem::replace(&mut current, next));
        }
        let error = trace.push(k, &current, v_star);
        let done = match error {
            Some(e) => e <= tol,
            None => previous.as_ref().is_some_and(|p| sup_distance(&current, p) <= threshold),
        };
        if done {
            trace.iterations_to_tol = Some(k);
            break;
        }
    }
    Ok((current, trace))
}

/// Gauss-Seidel value iteration: each sweep visits states in ascending order
/// and backs up in place, so later states see values already updated this sweep.
pub fn gauss_seidel_iteration(
    mdp: &Mdp,
    v0: &[f64],
    tol: f64,
    max_iter: usize,
    v_star: Option<&[f64]>,
) -> Result<(ValueFunction, ConvergenceTrace)> {
    check_run_args(mdp, v0, tol, v_star.map(<[f64]>::len))?;
    let threshold = successive_threshold(tol, mdp.discount());
    let mut trace = ConvergenceTrace::new(Method::GaussSeidel, tol);
    let mut v = v0.to_vec();
    for k in 0..=max_iter {
        let mut delta = None;
        if k > 0 {
            let mut change: f64 = 0.0;
            for x in 0..mdp.num_states() {
                let backup = (0..mdp.num_actions())
                    .map(|a| mdp.lookahead(a, x, &v))
                    .fold(f64::NEG_INFINITY, f64::max);
                change = change.max((backup - v[x]).abs());
                v[x] = backup;
            }
            delta = Some(change);
        }
        let error = trace.push(k, &v, v_star);
        let done = match error {
            Some(e) => e <= tol,
            None => delta.is_some_and(|d| d <= threshold),
        };
        if done {
            trace.iterations_to_tol = Some(k);
            break;
        }
    }
    Ok((v.into(), trace))
}

/// Weighted-difference value iteration.
///
/// Without `v_star` the run stops at the first `k >= 2` with
/// `|(T^k - T^{k-1}) - (T^{k-1} - T^{k-2})|_inf / (1 - alpha) <= tol`.
pub fn wdvf_iteration(
    mdp: &Mdp,
    v0: &[f64],
    tol: f64,
    max_iter: usize,
    v_star: Option<&[f64]>,
) -> Result<(ValueFunction, ConvergenceTrace)> {
    check_run_args(mdp, v0, tol, v_star.map(<[f64]>::len))?;
    let alpha = mdp.discount();
    let mut trace = ConvergenceTrace::new(Method::Wdvf, tol);
    let mut classical = ClassicalIterates::new(mdp, v0);
    // Last three classical iterates, newest last.
    let mut window: Vec<ValueFunction> = Vec::with_capacity(3);
    let mut estimate = ValueFunction::new(v0.to_vec());
    for k in 0..=max_iter {
        if window.len() == 3 {
            window.remove(0);
        }
        window.push(classical.next().expect("classical iterates are unbounded"));
        if k > 0 {
            estimate = weighted_difference(&window[window.len() - 1], &window[window.len() - 2], alpha).into();
        }
        let error = trace.push(k, &estimate, v_star);
        let done = match error {
            Some(e) => e <= tol,
            None if window.len() == 3 => {
                let curvature = (0..mdp.num_states())
                    .map(|x| ((window[2][x] - window[1][x]) - (window[1][x] - window[0][x])).abs())
                    .fold(0.0, f64::max);
                curvature / (1.0 - alpha) <= tol
            }
            None => false,
        };
        if done {
            trace.iterations_to_tol = Some(k);
            break;
        }
    }
    Ok((estimate, trace))
}

/// Weighted-difference Q iteration with `Q_0(x,a) = v0(x)`.
///
/// Errors are measured over all `(x, a)` pairs against `q_star`. The
/// self-stopping rule mirrors [`wdvf_iteration`] on the `F^k[Q_0]` iterates.
pub fn wdqvf_iteration(
    mdp: &Mdp,
    v0: &[f64],
    tol: f64,
    max_iter: usize,
    q_star: Option<&QFunction>,
) -> Result<(QFunction, ConvergenceTrace)> {
    check_run_args(mdp, v0, tol, None)?;
    if let Some(q) = q_star {
        if q.num_states() != mdp.num_states() || q.num_actions() != mdp.num_actions() {
            return Err(Error::Dimension("reference Q-function does not match the MDP".into()));
        }
    }
    let alpha = mdp.discount();
    let mut trace = ConvergenceTrace::new(Method::Wdqvf, tol);
    let mut window: Vec<QFunction> = vec![QFunction::from_state_values(v0, mdp.num_actions())];
    let mut estimate = window[0].clone();
    for k in 0..=max_iter {
        if k > 0 {
            let next = apply_f(mdp, window.last().expect("window is never empty"));
            if window.len() == 3 {
                window.remove(0);
            }
            window.push(next);
            let (cur, prev) = (&window[window.len() - 1], &window[window.len() - 2]);
            estimate = QFunction::from_fn(mdp.num_states(), mdp.num_actions(), |x, a| {
                (cur.get(x, a) - alpha * prev.get(x, a)) / (1.0 - alpha)
            });
        }
        let error = trace.push(k, estimate.values(), q_star.map(QFunction::values));
        let done = match error {
            Some(e) => e <= tol,
            None if window.len() == 3 => {
                let curvature = window[2]
                    .values()
                    .iter()
                    .zip(window[1].values())
                    .zip(window[0].values())
                    .map(|((c, b), a)| ((c - b) - (b - a)).abs())
                    .fold(0.0, f64::max);
                curvature / (1.0 - alpha) <= tol
            }
            None => false,
        };
        if done {
            trace.iterations_to_tol = Some(k);
            break;
        }
    }
    Ok((estimate, trace))
}

/// Running gain/bias estimates after `k` backups from `V_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainBiasEstimate {
    pub k: usize,
    pub reference_state: usize,
    pub h_k: ValueFunction,
    pub lambda_k: ValueFunction,
}

/// `h_k(x) = W^k(x) - W^k(z)` with `W = T` (discounted) or `T_bar`.
///
/// `lambda_k(x) = W^k(x) - W^{k-1}(x)`, plus `(1 - alpha) W^{k-1}(z)` in the
/// discounted case.
pub fn gain_bias_estimate(
    mdp: &Mdp,
    v0: &[f64],
    k: usize,
    z: usize,
    discounted: bool,
) -> Result<GainBiasEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("gain/bias estimates need k >= 1".into()));
    }
    mdp.check_state(z)?;
    mdp.check_len("initial value function", v0.len())?;
    let backup = |v: &[f64]| if discounted { apply_t(mdp, v) } else { apply_t_bar(mdp, v) };
    let mut previous = ValueFunction::new(v0.to_vec());
    let mut current = backup(&previous);
    for _ in 1..k {
        let next = backup(&current);
        previous = std::mem::replace(&mut current, next);
    }
    let anchor = current[z];
    let mut h_k: Vec<f64> = current.iter().map(|v| v - anchor).collect();
    h_k[z] = 0.0;
    let carry = if discounted { (1.0 - mdp.discount()) * previous[z] } else { 0.0 };
    let lambda_k = current.iter().zip(previous.iter()).map(|(c, p)| c - p + carry).collect::<Vec<_>>();
    Ok(GainBiasEstimate { k, reference_state: z, h_k: h_k.into(), lambda_k: lambda_k.into() })
}

/// Average-reward optimum for a unichain MDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRewardSolution {
    pub gain: f64,
    pub bias: ValueFunction,
    pub policy: Policy,
    pub reference_state: usize,
    pub iterations: usize,
}

/// Relative undiscounted iteration `h <- T_bar[h] - T_bar[h](z)` until the
/// per-state gain estimates `lambda_k = T_bar[h_{k-1}] - h_{k-1}` settle to a constant.
pub fn average_reward_solve(
    mdp: &Mdp,
    z: usize,
    tol: f64,
    max_iter: usize,
) -> Result<AverageRewardSolution> {
    mdp.check_state(z)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = mdp.num_states();
    let mut h = vec![0.0; n];
    let mut lambda_prev: Option<Vec<f64>> = None;
    for k in 1..=max_iter {
        let next = apply_t_bar(mdp, &h);
        let lambda: Vec<f64> = next.iter().zip(&h).map(|(t, h)| t - h).collect();
        let anchor = next[z];
        h = next.iter().map(|v| v - anchor).collect();
        h[z] = 0.0;
        let settled = lambda_prev
            .as_ref()
            .is_some_and(|prev| sup_distance(&lambda, prev) <= tol && span_seminorm(&lambda) <= tol);
        if settled {
            let gain = lambda.iter().sum::<f64>() / n as f64;
            let policy = greedy_undiscounted(mdp, &h);
            return Ok(AverageRewardSolution {
                gain,
                bias: h.into(),
                policy,
                reference_state: z,
                iterations: k,
            });
        }
        lambda_prev = Some(lambda);
    }
    Err(Error::IterationLimit { what: "average-reward iteration", limit: max_iter })
}

/// Greedy action under the undiscounted lookahead, lowest index on ties.
pub fn greedy_undiscounted(mdp: &Mdp, h: &[f64]) -> Policy {
    let mut q = vec![0.0; mdp.num_actions()];
    Policy::new(
        (0..mdp.num_states())
            .map(|x| {
                for (a, slot) in q.iter_mut().enumerate() {
                    *slot = mdp.expected_reward(a, x) + mdp.expectation(a, x, h);
                }
                argmax(&q)
            })
            .collect(),
    )
}
