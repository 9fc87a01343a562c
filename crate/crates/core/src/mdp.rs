//! Tabular MDP data model, norms, validation and the exact reference solvers.
//!
//! Transitions and rewards are stored densely with layout `(action, from, to)`.
//! The expected one-step reward `r_a(x) = sum_y P_a(x,y) R_a(x,y)` is cached at
//! construction since every backup needs it.

use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-sum tolerance used by [`validate`].
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Maximum residual accepted from a policy-evaluation linear solve.
pub const LINEAR_RESIDUAL_TOL: f64 = 1e-10;
/// Policy iteration cap; exceeding it indicates a bug, not a hard instance.
pub const POLICY_ITERATION_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    num_states: usize,
    num_actions: usize,
    transitions: Vec<f64>,
    rewards: Vec<f64>,
    expected_reward: Vec<f64>,
    discount: f64,
    r_max: f64,
}

impl Mdp {
    /// Builds an MDP from flat `(action, from, to)` tables.
    ///
    /// Only shapes are checked here. Content invariants (stochastic rows,
    /// reward range, discount range) are reported by [`validate`].
    pub fn new(
        num_states: usize,
        num_actions: usize,
        transitions: Vec<f64>,
        rewards: Vec<f64>,
        discount: f64,
        r_max: f64,
    ) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::Dimension(format!(
                "need at least one state and one action, got {num_states} states and {num_actions} actions"
            )));
        }
        let len = num_actions * num_states * num_states;
        if transitions.len() != len {
            return Err(Error::Dimension(format!(
                "transition table has {} entries, expected {len}",
                transitions.len()
            )));
        }
        if rewards.len() != len {
            return Err(Error::Dimension(format!(
                "reward table has {} entries, expected {len}",
                rewards.len()
            )));
        }
        let expected_reward = transitions
            .chunks_exact(num_states)
            .zip(rewards.chunks_exact(num_states))
            .map(|(p, r)| p.iter().zip(r).map(|(p, r)| p * r).sum())
            .collect();
        Ok(Self {
            num_states,
            num_actions,
            transitions,
            rewards,
            expected_reward,
            discount,
            r_max,
        })
    }

    /// Builds an MDP from nested `[a][x][y]` transition and reward tables.
    pub fn from_nested(
        transitions: &[Vec<Vec<f64>>],
        rewards: &[Vec<Vec<f64>>],
        discount: f64,
        r_max: f64,
    ) -> Result<Self> {
        let (num_actions, num_states) = nested_shape(transitions)?;
        let flat_p = flatten3(transitions, num_actions, num_states, "transitions")?;
        let flat_r = flatten3(rewards, num_actions, num_states, "rewards")?;
        Self::new(num_states, num_actions, flat_p, flat_r, discount, r_max)
    }

    /// Builds an MDP whose rewards do not depend on the successor state.
    /// `rewards[a][x]` is expanded across every `y`.
    pub fn from_state_rewards(
        transitions: &[Vec<Vec<f64>>],
        rewards: &[Vec<f64>],
        discount: f64,
        r_max: f64,
    ) -> Result<Self> {
        let (num_actions, num_states) = nested_shape(transitions)?;
        let flat_p = flatten3(transitions, num_actions, num_states, "transitions")?;
        if rewards.len() != num_actions || rewards.iter().any(|r| r.len() != num_states) {
            return Err(Error::Dimension(format!(
                "state rewards must be {num_actions} x {num_states}"
            )));
        }
        let flat_r = rewards
            .iter()
            .flat_map(|row| row.iter().flat_map(|&r| std::iter::repeat_n(r, num_states)))
            .collect();
        Self::new(num_states, num_actions, flat_p, flat_r, discount, r_max)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Same dynamics and rewards under a different discount factor.
    pub fn with_discount(&self, discount: f64) -> Self {
        Self { discount, ..self.clone() }
    }

    /// `P_a(x, .)` as a slice over successor states.
    #[inline]
    pub fn transition_row(&self, action: usize, state: usize) -> &[f64] {
        let start = (action * self.num_states + state) * self.num_states;
        &self.transitions[start..start + self.num_states]
    }

    #[inline]
    pub fn reward_row(&self, action: usize, state: usize) -> &[f64] {
        let start = (action * self.num_states + state) * self.num_states;
        &self.rewards[start..start + self.num_states]
    }

    pub fn transition(&self, action: usize, from: usize, to: usize) -> f64 {
        self.transition_row(action, from)[to]
    }

    pub fn reward(&self, action: usize, from: usize, to: usize) -> f64 {
        self.reward_row(action, from)[to]
    }

    /// Expected one-step reward `sum_y P_a(x,y) R_a(x,y)`.
    #[inline]
    pub fn expected_reward(&self, action: usize, state: usize) -> f64 {
        self.expected_reward[action * self.num_states + state]
    }

    /// `sum_y P_a(x,y) v(y)`.
    #[inline]
    pub fn expectation(&self, action: usize, state: usize, v: &[f64]) -> f64 {
        self.transition_row(action, state)
            .iter()
            .zip(v)
            .map(|(p, v)| p * v)
            .sum()
    }

    /// Discounted one-step lookahead `sum_y P_a(x,y) (R_a(x,y) + alpha v(y))`.
    #[inline]
    pub fn lookahead(&self, action: usize, state: usize, v: &[f64]) -> f64 {
        self.expected_reward(action, state) + self.discount * self.expectation(action, state, v)
    }

    /// Transition rows as nested `[a][x][y]` vectors.
    pub fn transitions_nested(&self) -> Vec<Vec<Vec<f64>>> {
        nest3(&self.transitions, self.num_actions, self.num_states)
    }

    pub fn rewards_nested(&self) -> Vec<Vec<Vec<f64>>> {
        nest3(&self.rewards, self.num_actions, self.num_states)
    }

    /// `Some(r[a][x])` when every reward row is constant along the successor state.
    pub fn state_rewards(&self) -> Option<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.num_actions);
        for a in 0..self.num_actions {
            let mut row = Vec::with_capacity(self.num_states);
            for x in 0..self.num_states {
                let r = self.reward_row(a, x);
                if r.iter().any(|&v| v != r[0]) {
                    return None;
                }
                row.push(r[0]);
            }
            out.push(row);
        }
        Some(out)
    }

    pub(crate) fn check_state(&self, state: usize) -> Result<()> {
        if state >= self.num_states {
            return Err(Error::StateOutOfRange { state, num_states: self.num_states });
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.num_states {
            return Err(Error::Dimension(format!(
                "{what} has length {len}, expected {}",
                self.num_states
            )));
        }
        Ok(())
    }
}

fn nested_shape(transitions: &[Vec<Vec<f64>>]) -> Result<(usize, usize)> {
    let num_actions = transitions.len();
    let num_states = transitions.first().map_or(0, Vec::len);
    if num_actions == 0 || num_states == 0 {
        return Err(Error::Dimension("empty transition table".into()));
    }
    Ok((num_actions, num_states))
}

fn flatten3(table: &[Vec<Vec<f64>>], na: usize, ns: usize, what: &str) -> Result<Vec<f64>> {
    let shape_ok = table.len() == na
        && table
            .iter()
            .all(|m| m.len() == ns && m.iter().all(|row| row.len() == ns));
    if !shape_ok {
        return Err(Error::Dimension(format!("{what} must be {na} x {ns} x {ns}")));
    }
    Ok(table.iter().flatten().flatten().copied().collect())
}

fn nest3(flat: &[f64], na: usize, ns: usize) -> Vec<Vec<Vec<f64>>> {
    (0..na)
        .map(|a| {
            (0..ns)
                .map(|x| {
                    let start = (a * ns + x) * ns;
                    flat[start..start + ns].to_vec()
                })
                .collect()
        })
        .collect()
}

/// A dense value table over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueFunction(Vec<f64>);

impl ValueFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(num_states: usize) -> Self {
        Self(vec![0.0; num_states])
    }

    pub fn constant(num_states: usize, value: f64) -> Self {
        Self(vec![value; num_states])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &[f64]) -> ValueFunction {
        Self(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    /// Pointwise `self + c`.
    pub fn shifted(&self, c: f64) -> ValueFunction {
        Self(self.0.iter().map(|v| v + c).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for ValueFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ValueFunction {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// A dense table over `(state, action)` pairs, stored state-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QFunction {
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
}

impl QFunction {
    pub fn zeros(num_states: usize, num_actions: usize) -> Self {
        Self { num_states, num_actions, values: vec![0.0; num_states * num_actions] }
    }

    /// `Q(x, a) = v(x)` for every action.
    pub fn from_state_values(v: &[f64], num_actions: usize) -> Self {
        let values = v
            .iter()
            .flat_map(|&x| std::iter::repeat_n(x, num_actions))
            .collect();
        Self { num_states: v.len(), num_actions, values }
    }

    pub fn from_fn(num_states: usize, num_actions: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(num_states * num_actions);
        for x in 0..num_states {
            for a in 0..num_actions {
                values.push(f(x, a));
            }
        }
        Self { num_states, num_actions, values }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.num_actions + action]
    }

    /// Values of every action at `state`.
    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.num_actions..(state + 1) * self.num_actions]
    }

    /// All entries, state-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x -> max_a Q(x, a)`.
    pub fn max_over_actions(&self) -> ValueFunction {
        (0..self.num_states)
            .map(|x| self.row(x).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect::<Vec<_>>()
            .into()
    }

    /// The greedy policy `mu_Q`, lowest action index on ties.
    pub fn greedy_policy(&self) -> Policy {
        Policy((0..self.num_states).map(|x| argmax(self.row(x))).collect())
    }

    /// Largest absolute entrywise difference.
    pub fn sup_distance(&self, other: &QFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Deterministic stationary policy: `state -> action`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Policy(Vec<usize>);

impl Policy {
    pub fn new(action_of: Vec<usize>) -> Self {
        Self(action_of)
    }

    pub fn constant(num_states: usize, action: usize) -> Self {
        Self(vec![action; num_states])
    }

    pub fn action(&self, state: usize) -> usize {
        self.0[state]
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Gain/bias decomposition relative to a reference state `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainBias {
    pub gain: f64,
    pub bias: ValueFunction,
    pub reference_state: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowSum { action: usize, state: usize, sum: f64 },
    Probability { action: usize, state: usize, to_state: usize, value: f64 },
    Reward { action: usize, state: usize, to_state: usize, value: f64 },
    Discount(f64),
    RewardCeiling(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { action, state, sum } => {
                write!(f, "(a={action}, x={state}): transition row sums to {sum}")
            }
            Violation::Probability { action, state, to_state, value } => {
                write!(f, "(a={action}, x={state}): P(y={to_state}) = {value} outside [0, 1]")
            }
            Violation::Reward { action, state, to_state, value } => {
                write!(f, "(a={action}, x={state}): R(y={to_state}) = {value} outside [0, r_max]")
            }
            Violation::Discount(d) => write!(f, "discount {d} outside (0, 1)"),
            Violation::RewardCeiling(r) => write!(f, "reward ceiling {r} is negative or not finite"),
        }
    }
}

/// Lists every broken MDP invariant. An empty list means the MDP is well formed.
pub fn validate(mdp: &Mdp) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(mdp.discount > 0.0 && mdp.discount < 1.0) {
        out.push(Violation::Discount(mdp.discount));
    }
    if !(mdp.r_max >= 0.0 && mdp.r_max.is_finite()) {
        out.push(Violation::RewardCeiling(mdp.r_max));
    }
    for a in 0..mdp.num_actions {
        for x in 0..mdp.num_states {
            let row = mdp.transition_row(a, x);
            for (y, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    out.push(Violation::Probability { action: a, state: x, to_state: y, value: p });
                }
            }
            let sum: f64 = row.iter().sum();
            if !((sum - 1.0).abs() <= ROW_SUM_TOL) {
                out.push(Violation::RowSum { action: a, state: x, sum });
            }
            for (y, &r) in mdp.reward_row(a, x).iter().enumerate() {
                if !(r >= 0.0 && r <= mdp.r_max) {
                    out.push(Violation::Reward { action: a, state: x, to_state: y, value: r });
                }
            }
        }
    }
    out
}

/// `max_x v(x) - min_x v(x)`.
pub fn span_seminorm(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if v.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `sup_norm(a - b)` without allocating.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// `span_seminorm(a - b)` without allocating.
pub fn span_distance(a: &[f64], b: &[f64]) -> f64 {
    let (lo, hi) = a
        .iter()
        .zip(b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
            let d = a - b;
            (lo.min(d), hi.max(d))
        });
    if a.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Index of the first maximal entry.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy action at every state for `sum_y P_a(x,y)(R_a(x,y) + alpha v(y))`.
pub fn greedy_policy(mdp: &Mdp, v: &[f64]) -> Policy {
    let mut lookahead = vec![0.0; mdp.num_actions];
    Policy(
        (0..mdp.num_states)
            .map(|x| {
                for (a, q) in lookahead.iter_mut().enumerate() {
                    *q = mdp.lookahead(a, x, v);
                }
                argmax(&lookahead)
            })
            .collect(),
    )
}

/// Exact value of a stationary policy by solving `(I - alpha P_mu) V = r_mu`.
pub fn policy_evaluation(mdp: &Mdp, policy: &Policy) -> Result<ValueFunction> {
    let n = mdp.num_states;
    if policy.len() != n {
        return Err(Error::Dimension(format!(
            "policy covers {} states, MDP has {n}",
            policy.len()
        )));
    }
    if let Some(&a) = policy.actions().iter().find(|&&a| a >= mdp.num_actions) {
        return Err(Error::InvalidArgument(format!("policy uses action {a} of {}", mdp.num_actions)));
    }
    let alpha = mdp.discount;
    let system = DMatrix::from_fn(n, n, |x, y| {
        let p = mdp.transition(policy.action(x), x, y);
        if x == y {
            1.0 - alpha * p
        } else {
            -alpha * p
        }
    });
    let rhs = DVector::from_iterator(n, (0..n).map(|x| mdp.expected_reward(policy.action(x), x)));
    let solution = system.lu().solve(&rhs).ok_or(Error::Singular)?;
    let v = ValueFunction(solution.iter().copied().collect());
    if !v.is_finite() {
        return Err(Error::Singular);
    }
    let residual = (0..n)
        .map(|x| (v[x] - mdp.lookahead(policy.action(x), x, &v)).abs())
        .fold(0.0, f64::max);
    if residual > LINEAR_RESIDUAL_TOL {
        return Err(Error::Singular);
    }
    Ok(v)
}

/// Optimal values and policy by policy iteration with exact evaluation.
pub fn solve_exact(mdp: &Mdp) -> Result<(ValueFunction, Policy)> {
    let n = mdp.num_states;
    let mut policy = greedy_policy(mdp, &vec![0.0; n]);
    for _ in 0..POLICY_ITERATION_CAP {
        let v = policy_evaluation(mdp, &policy)?;
        let mut changed = false;
        let mut next = policy.0.clone();
        for (x, action) in next.iter_mut().enumerate() {
            let current = mdp.lookahead(*action, x, &v);
            let slack = 1e-13 * (1.0 + current.abs());
            let mut best = current;
            for a in 0..mdp.num_actions {
                let q = mdp.lookahead(a, x, &v);
                if q > best + slack {
                    best = q;
                    *action = a;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok((v, policy));
        }
        policy = Policy(next);
    }
    Err(Error::IterationLimit { what: "policy iteration", limit: POLICY_ITERATION_CAP })
}

/// Optimal Q-function `Q*(x,a) = sum_y P_a(x,y)(R_a(x,y) + alpha V*(y))`.
pub fn q_from_values(mdp: &Mdp, v: &[f64]) -> QFunction {
    QFunction::from_fn(mdp.num_states, mdp.num_actions, |x, a| mdp.lookahead(a, x, v))
}

/// Discounted gain and bias: `h(x) = V*(x) - V*(z)`, `gain = (1 - alpha) V*(z)`.
pub fn gain_bias_discounted(mdp: &Mdp, v_star: &[f64], z: usize) -> Result<GainBias> {
    mdp.check_state(z)?;
    mdp.check_len("optimal value function", v_star.len())?;
    let anchor = v_star[z];
    let mut bias: Vec<f64> = v_star.iter().map(|v| v - anchor).collect();
    bias[z] = 0.0;
    Ok(GainBias {
        gain: (1.0 - mdp.discount) * anchor,
        bias: bias.into(),
        reference_state: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2 states, 1 action, P = [[0.9, 0.1], [0.1, 0.9]], r = [1, 0].
    pub(crate) fn two_state(alpha: f64) -> Mdp {
        Mdp::from_state_rewards(
            &[vec![vec![0.9, 0.1], vec![0.1, 0.9]]],
            &[vec![1.0, 0.0]],
            alpha,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn validate_accepts_well_formed() {
        assert!(validate(&two_state(0.5)).is_empty());
    }

    #[test]
    fn validate_flags_short_row() {
        let mdp = Mdp::from_state_rewards(
            &[vec![vec![0.9, 0.1], vec![0.08, 0.9]]],
            &[vec![1.0, 0.0]],
            0.5,
            1.0,
        )
        .unwrap();
        let v = validate(&mdp);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::RowSum { action: 0, state: 1, .. }));
    }

    #[test]
    fn validate_flags_reward_above_ceiling() {
        let mdp = Mdp::from_state_rewards(
            &[vec![vec![1.0, 0.0], vec![0.0, 1.0]]],
            &[vec![1.0, 0.0]],
            0.5,
            1.0,
        )
        .unwrap();
        assert!(validate(&mdp).is_empty());
        let mut rewards = mdp.rewards_nested();
        rewards[0][0][1] = 1.5;
        let bad = Mdp::from_nested(&mdp.transitions_nested(), &rewards, 0.5, 1.0).unwrap();
        let v = validate(&bad);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::Reward { action: 0, state: 0, to_state: 1, .. }));
    }

    #[test]
    fn shape_errors() {
        assert!(Mdp::new(0, 1, vec![], vec![], 0.5, 1.0).is_err());
        assert!(Mdp::new(2, 1, vec![0.5; 3], vec![0.0; 4], 0.5, 1.0).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(span_seminorm(&[5.0, 5.0, 5.0]), 0.0);
        assert_eq!(span_seminorm(&[1.0, 3.0, 2.0]), 2.0);
        assert_eq!(span_seminorm(&[0.0, 4.0, 1.0]), 4.0);
        assert_eq!(span_seminorm(&[-0.0, -4.0, -1.0]), 4.0);
        assert_eq!(sup_norm(&[0.0, 0.0]), 0.0);
        assert_eq!(sup_norm(&[-3.0, 2.0]), 3.0);
        assert_eq!(sup_norm(&[1e-5, -1e-6]), 1e-5);
    }

    #[test]
    fn greedy_single_action_and_dominance() {
        assert_eq!(greedy_policy(&two_state(0.5), &[3.0, -1.0]), Policy::constant(2, 0));
        let p = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let mdp = Mdp::from_state_rewards(
            &[p.clone(), p],
            &[vec![0.0, 0.0], vec![1.0, 1.0]],
            0.9,
            1.0,
        )
        .unwrap();
        assert_eq!(greedy_policy(&mdp, &[0.0, 0.0]), Policy::constant(2, 1));
    }

    #[test]
    fn greedy_ties_pick_lowest_action() {
        let p = vec![vec![1.0]];
        let mdp = Mdp::from_state_rewards(&[p.clone(), p.clone(), p], &vec![vec![0.5]; 3], 0.9, 1.0)
            .unwrap();
        assert_eq!(greedy_policy(&mdp, &[1.0]), Policy::constant(1, 0));
    }

    #[test]
    fn evaluation_examples() {
        let one = Mdp::from_state_rewards(&[vec![vec![1.0]]], &[vec![1.0]], 0.5, 1.0).unwrap();
        let v = policy_evaluation(&one, &Policy::constant(1, 0)).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-14);

        // (I - 0.5 P) V = [1, 0] solved by hand: V = [11/6, 1/6].
        let v = policy_evaluation(&two_state(0.5), &Policy::constant(2, 0)).unwrap();
        assert!((v[0] - 11.0 / 6.0).abs() < 1e-12);
        assert!((v[1] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn evaluation_rejects_bad_policy() {
        let mdp = two_state(0.5);
        assert!(policy_evaluation(&mdp, &Policy::constant(2, 1)).is_err());
        assert!(policy_evaluation(&mdp, &Policy::constant(3, 0)).is_err());
    }

    #[test]
    fn exact_solve_constant_rewards() {
        let p = vec![vec![0.3, 0.7], vec![0.6, 0.4]];
        let q = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let mdp =
            Mdp::from_state_rewards(&[p, q], &[vec![0.4, 0.4], vec![0.4, 0.4]], 0.8, 1.0).unwrap();
        let (v, _) = solve_exact(&mdp).unwrap();
        for x in v.iter() {
            assert!((x - 0.4 / 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_solve_matches_policy_enumeration() {
        // Two states, two actions; enumerate all four policies.
        let mdp = Mdp::from_state_rewards(
            &[
                vec![vec![0.9, 0.1], vec![0.2, 0.8]],
                vec![vec![0.1, 0.9], vec![0.7, 0.3]],
            ],
            &[vec![0.2, 1.0], vec![0.5, 0.3]],
            0.9,
            1.0,
        )
        .unwrap();
        let mut best: Option<(ValueFunction, Policy)> = None;
        for a0 in 0..2 {
            for a1 in 0..2 {
                let pol = Policy::new(vec![a0, a1]);
                let v = policy_evaluation(&mdp, &pol).unwrap();
                if best.as_ref().is_none_or(|(b, _)| v[0] + v[1] > b[0] + b[1]) {
                    best = Some((v, pol));
                }
            }
        }
        let (v_best, pol_best) = best.unwrap();
        let (v, pol) = solve_exact(&mdp).unwrap();
        assert_eq!(pol, pol_best);
        assert!(sup_distance(&v, &v_best) < 1e-12);
        assert_eq!(greedy_policy(&mdp, &v), pol_best);
    }

    #[test]
    fn gain_bias_examples() {
        let gb = gain_bias_discounted(&two_state(0.5), &[3.0, 3.0], 0).unwrap();
        assert!((gb.gain - 1.5).abs() < 1e-15);
        assert_eq!(&gb.bias[..], &[0.0, 0.0]);

        let v = policy_evaluation(&two_state(0.5), &Policy::constant(2, 0)).unwrap();
        let gb = gain_bias_discounted(&two_state(0.5), &v, 0).unwrap();
        assert!((gb.gain - 11.0 / 12.0).abs() < 1e-12);
        assert_eq!(gb.bias[0], 0.0);
        assert!((gb.bias[1] + 5.0 / 3.0).abs() < 1e-12);

        assert!(gain_bias_discounted(&two_state(0.5), &v, 2).is_err());
    }
}
