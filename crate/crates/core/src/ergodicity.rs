//! Ergodicity constants and the error bounds they drive.
//!
//! The certified coefficient `rho` is a uniform lower bound on the `m`-step
//! probability of reaching one common state `y_hat` under every policy
//! sequence. It yields the span-contraction rate `beta = (1 - rho)^(1/m)`,
//! and together with the leading constants `C_d` (discounted) and `C_a`
//! (undiscounted) it drives every bound in this module.

use serde::{Deserialize, Serialize};

use crate::bellman::{apply_t, apply_t_bar, average_reward_solve};
use crate::error::{Error, Result};
use crate::mdp::{gain_bias_discounted, solve_exact, span_distance, Mdp, Policy, ValueFunction};

/// Limit on the number of policy sequences [`ergodic_coefficient_brute`] will enumerate.
pub const BRUTE_FORCE_GUARD: f64 = 1e6;

/// Tolerance used when solving the average-reward problem for `C_a`.
pub const AVERAGE_REWARD_TOL: f64 = 1e-12;
pub const AVERAGE_REWARD_MAX_ITER: usize = 100_000;

/// Result of an ergodicity certification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub rho: f64,
    pub m: usize,
    pub target_state: usize,
}

impl Certificate {
    /// `rho > 0`: the assumption holds with these `(rho, m, target_state)`.
    pub fn is_certified(&self) -> bool {
        self.rho > 0.0
    }
}

/// `rho = max_y min_{x,a} P_a(x, y)`, lowest `y` on ties.
///
/// The bound is per `(x, a)`, so it certifies `m = 1` for every policy at once.
/// A zero result means no column is uniformly positive.
pub fn ergodic_coefficient_m1(mdp: &Mdp) -> Certificate {
    let n = mdp.num_states();
    let mut column_min = vec![f64::INFINITY; n];
    for a in 0..mdp.num_actions() {
        for x in 0..n {
            for (slot, &p) in column_min.iter_mut().zip(mdp.transition_row(a, x)) {
                *slot = slot.min(p);
            }
        }
    }
    let mut best = 0;
    for y in 1..n {
        if column_min[y] > column_min[best] {
            best = y;
        }
    }
    Certificate { rho: column_min[best].max(0.0), m: 1, target_state: best }
}

/// Exhaustive `m`-step certification over deterministic Markov policy
/// sequences `(mu_0, ..., mu_{m-1})`.
///
/// For each sequence the product kernel `P_{mu_0} ... P_{mu_{m-1}}` is formed
/// and the result is `max_y min_{x, sequence} [product]_{x y}`.
pub fn ergodic_coefficient_brute(mdp: &Mdp, m: usize) -> Result<Certificate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let n = mdp.num_states();
    let na = mdp.num_actions();
    let count = (na as f64).powf((n * m) as f64);
    if count > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded { count, guard: BRUTE_FORCE_GUARD });
    }
    let policies = all_policies(n, na);
    let kernels: Vec<Vec<f64>> = policies.iter().map(|p| policy_kernel(mdp, p)).collect();

    let mut column_min = vec![f64::INFINITY; n];
    let mut sequence = vec![0usize; m];
    loop {
        let mut product = kernels[sequence[0]].clone();
        for &idx in &sequence[1..] {
            product = mat_mul(&product, &kernels[idx], n);
        }
        for x in 0..n {
            for y in 0..n {
                column_min[y] = column_min[y].min(product[x * n + y]);
            }
        }
        // Odometer over sequences.
        let mut pos = 0;
        loop {
            if pos == m {
                let mut best = 0;
                for y in 1..n {
                    if column_min[y] > column_min[best] {
                        best = y;
                    }
                }
                return Ok(Certificate { rho: column_min[best].max(0.0), m, target_state: best });
            }
            sequence[pos] += 1;
            if sequence[pos] < policies.len() {
                break;
            }
            sequence[pos] = 0;
            pos += 1;
        }
    }
}

fn all_policies(n: usize, na: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..na).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

fn policy_kernel(mdp: &Mdp, actions: &[usize]) -> Vec<f64> {
    actions
        .iter()
        .enumerate()
        .flat_map(|(x, &a)| mdp.transition_row(a, x).iter().copied())
        .collect()
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Improved discount factor `(1 - rho)^(1/m)`.
pub fn beta(rho: f64, m: usize) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Uncertified(format!("rho = {rho} is not positive")));
    }
    if rho > 1.0 || m == 0 {
        return Err(Error::InvalidArgument(format!("need rho in (0, 1] and m >= 1, got rho = {rho}, m = {m}")));
    }
    Ok((1.0 - rho).powf(1.0 / m as f64))
}

fn leading_constant(
    mdp: &Mdp,
    v0: &[f64],
    h_star: &[f64],
    m: usize,
    rate: f64,
    backup: impl Fn(&Mdp, &[f64]) -> ValueFunction,
) -> Result<f64> {
    mdp.check_len("initial value function", v0.len())?;
    mdp.check_len("bias", h_star.len())?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let mut u = v0.to_vec();
    let mut w = h_star.to_vec();
    let mut best: f64 = 0.0;
    for ell in 0..m {
        if ell > 0 {
            u = backup(mdp, &u).into_inner();
            w = backup(mdp, &w).into_inner();
        }
        let span = span_distance(&u, &w);
        let denom = rate.powi(ell as i32);
        let term = if span == 0.0 { 0.0 } else { span / denom };
        best = best.max(term);
    }
    Ok(best)
}

/// `C_d = max_{l < m} |T^l[V_0] - T^l[h*]|_d / (alpha beta)^l`.
///
/// Zero only when `V_0` already differs from `h*` by a constant (degenerate case).
pub fn c_d_constant(mdp: &Mdp, v0: &[f64], h_star: &[f64], rho: f64, m: usize) -> Result<f64> {
    let rate = mdp.discount() * beta(rho, m)?;
    leading_constant(mdp, v0, h_star, m, rate, apply_t)
}

/// `C_a = max_{l < m} |T_bar^l[V_0] - T_bar^l[h*]|_d / beta^l`.
pub fn c_a_constant(mdp: &Mdp, v0: &[f64], h_star_avg: &[f64], rho: f64, m: usize) -> Result<f64> {
    let rate = beta(rho, m)?;
    leading_constant(mdp, v0, h_star_avg, m, rate, apply_t_bar)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WdvfBounds {
    pub span: f64,
    pub sup: f64,
}

/// Error bounds for the weighted-difference iterate `V_{k+1}`:
/// span `alpha (1 + beta) (alpha beta)^k C_d / (1 - alpha)` and
/// sup `2 C_d (alpha beta)^k / (1 - alpha)`.
pub fn wdvf_bounds(c_d: f64, alpha: f64, beta: f64, k: usize) -> WdvfBounds {
    let decay = (alpha * beta).powi(k as i32);
    WdvfBounds {
        span: alpha * (1.0 + beta) * decay * c_d / (1.0 - alpha),
        sup: 2.0 * c_d * decay / (1.0 - alpha),
    }
}

/// `|Q_k - Q*| <= 2 alpha C_d (alpha beta)^(k-2) / (1 - alpha)` for `k >= 2`.
pub fn wdqvf_bound(c_d: f64, alpha: f64, beta: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("Q-function bound needs k >= 2, got {k}")));
    }
    Ok(2.0 * alpha * c_d * (alpha * beta).powi(k as i32 - 2) / (1.0 - alpha))
}

/// Classical value-iteration bound `r_max alpha^k / (1 - alpha)`.
pub fn vi_bound(r_max: f64, alpha: f64, k: usize) -> f64 {
    r_max * alpha.powi(k as i32) / (1.0 - alpha)
}

/// `(2 C_a / n) beta / (1 - beta)`: bound on the `n`-step average-reward deviation.
pub fn avg_reward_deviation_bound(c_a: f64, beta: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if !(beta < 1.0) {
        return Err(Error::VacuousBound(beta));
    }
    Ok(2.0 * c_a / n as f64 * beta / (1.0 - beta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub epsilon: f64,
    pub tau: usize,
    pub n_max: usize,
    pub gain: f64,
    pub c_a: f64,
    /// `epsilon tau / (2 C_a + epsilon tau)`, a lower bound on beta.
    pub beta_lower: f64,
    /// `deviations[N - 1] = max_x |g_N(x) - gain|`.
    pub deviations: Vec<f64>,
}

/// Default search horizon `10 ceil(1 / (epsilon (1 - beta)))`.
pub fn default_mixing_horizon(epsilon: f64, beta: f64) -> usize {
    (10.0 * (1.0 / (epsilon * (1.0 - beta))).ceil()) as usize
}

/// Exact N-step average rewards `g_N = S_N / N`, `S_N = r_mu + P_mu S_{N-1}`, for `N = 1..=n_max`.
pub fn average_rewards(mdp: &Mdp, policy: &Policy, n_max: usize) -> Vec<ValueFunction> {
    let n = mdp.num_states();
    let mut total = vec![0.0; n];
    let mut out = Vec::with_capacity(n_max);
    for horizon in 1..=n_max {
        total = (0..n)
            .map(|x| {
                let a = policy.action(x);
                mdp.expected_reward(a, x) + mdp.expectation(a, x, &total)
            })
            .collect();
        out.push(total.iter().map(|s| s / horizon as f64).collect::<Vec<_>>().into());
    }
    out
}

/// Smallest `tau` such that `max_x |g_N(x) - gain| <= epsilon` for every `N` in `[tau, n_max]`.
///
/// Only the window up to `n_max` is checked.
pub fn mixing_time_empirical(
    mdp: &Mdp,
    policy: &Policy,
    gain: f64,
    c_a: f64,
    epsilon: f64,
    n_max: usize,
) -> Result<MixingReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if policy.len() != mdp.num_states() {
        return Err(Error::Dimension("policy does not cover every state".into()));
    }
    let deviations: Vec<f64> = average_rewards(mdp, policy, n_max)
        .iter()
        .map(|g| g.iter().fold(0.0, |m: f64, v| m.max((v - gain).abs())))
        .collect();
    let tau = match deviations.iter().rposition(|&d| d > epsilon) {
        None => 1,
        Some(i) if i + 1 == n_max => {
            return Err(Error::HorizonExhausted { n_max, suggested: 2 * n_max });
        }
        Some(i) => i + 2,
    };
    let et = epsilon * tau as f64;
    Ok(MixingReport {
        epsilon,
        tau,
        n_max,
        gain,
        c_a,
        beta_lower: et / (2.0 * c_a + et),
        deviations,
    })
}

/// Iteration predictor
/// `max{ log(theta (1 - alpha) / (2 C_d)) / log(alpha beta_lower) + 1, 1 }`
/// with `beta_lower = epsilon tau / (2 C_a + epsilon tau)`.
pub fn k_theta(theta: f64, alpha: f64, c_d: f64, c_a: f64, epsilon: f64, tau: usize) -> f64 {
    if !(c_d > 0.0) {
        return 1.0;
    }
    let ratio = theta * (1.0 - alpha) / (2.0 * c_d);
    if ratio >= 1.0 {
        return 1.0;
    }
    let et = epsilon * tau as f64;
    let rate = alpha * et / (2.0 * c_a + et);
    (ratio.ln() / rate.ln() + 1.0).max(1.0)
}

/// Every constant the bounds need for one MDP and starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityProfile {
    pub rho: f64,
    pub m: usize,
    pub target_state: usize,
    pub beta: f64,
    pub c_d: f64,
    /// `None` when the average-reward problem could not be solved.
    pub c_a: Option<f64>,
    /// `C_d == 0`: the starting point already is the bias up to a constant.
    pub degenerate: bool,
}

impl ErgodicityProfile {
    /// Certifies at `m = 1` and computes `C_d` (and `C_a` when possible) for `v0`,
    /// with reference state `z`.
    pub fn compute(mdp: &Mdp, v0: &[f64], z: usize) -> Result<Self> {
        let (v_star, _) = solve_exact(mdp)?;
        Self::with_optimum(mdp, v0, z, &v_star)
    }

    /// As [`ErgodicityProfile::compute`] with a known optimal value function.
    pub fn with_optimum(mdp: &Mdp, v0: &[f64], z: usize, v_star: &[f64]) -> Result<Self> {
        let cert = ergodic_coefficient_m1(mdp);
        let beta = beta(cert.rho, cert.m)?;
        let h_star = gain_bias_discounted(mdp, v_star, z)?.bias;
        let c_d = c_d_constant(mdp, v0, &h_star, cert.rho, cert.m)?;
        let c_a = match average_reward_solve(mdp, z, AVERAGE_REWARD_TOL, AVERAGE_REWARD_MAX_ITER) {
            Ok(avg) => Some(c_a_constant(mdp, v0, &avg.bias, cert.rho, cert.m)?),
            Err(_) => None,
        };
        Ok(Self {
            rho: cert.rho,
            m: cert.m,
            target_state: cert.target_state,
            beta,
            c_d,
            c_a,
            degenerate: c_d == 0.0,
        })
    }

    pub fn wdvf_bounds(&self, alpha: f64, k: usize) -> WdvfBounds {
        wdvf_bounds(self.c_d, alpha, self.beta, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{random_mdp, GeneratorConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chain(p: Vec<Vec<f64>>, r: Vec<f64>) -> Mdp {
        Mdp::from_state_rewards(&[p], &[r], 0.9, 1.0).unwrap()
    }

    fn seeded(seed: u64, n: usize, na: usize) -> Mdp {
        random_mdp(&GeneratorConfig {
            num_states: n,
            num_actions: na,
            discount: 0.95,
            rho: 0.1,
            r_max: 1.0,
            seed,
            target_state: n - 1,
            support: n,
        })
        .unwrap()
    }

    /// Minimum over Markov policy sequences of the probability of being at `y`
    /// after `m` steps, by backward recursion.
    fn min_reach(mdp: &Mdp, y: usize, m: usize) -> Vec<f64> {
        let n = mdp.num_states();
        let mut f: Vec<f64> = (0..n).map(|x| if x == y { 1.0 } else { 0.0 }).collect();
        for _ in 0..m {
            f = (0..n)
                .map(|x| {
                    (0..mdp.num_actions())
                        .map(|a| mdp.expectation(a, x, &f))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
        }
        f
    }

    fn min_reach_rho(mdp: &Mdp, m: usize) -> f64 {
        (0..mdp.num_states())
            .map(|y| min_reach(mdp, y, m).into_iter().fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    #[test]
    fn uniform_chain_coefficient() {
        let n = 5;
        let mdp = chain(vec![vec![0.2; n]; n], vec![0.0; n]);
        let cert = ergodic_coefficient_m1(&mdp);
        assert!((cert.rho - 0.2).abs() <= 1e-15);
        assert_eq!(cert.target_state, 0);
    }

    #[test]
    fn permutation_is_uncertified() {
        let mdp = chain(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.0, 1.0]);
        let cert = ergodic_coefficient_m1(&mdp);
        assert!(!cert.is_certified());
        assert!(matches!(beta(cert.rho, 1), Err(Error::Uncertified(_))));
    }

    #[test]
    fn generator_blend_is_certified() {
        for seed in 0..10 {
            let mdp = random_mdp(&GeneratorConfig::benchmark(seed)).unwrap();
            assert!(ergodic_coefficient_m1(&mdp).rho >= 0.1);
        }
    }

    #[test]
    fn brute_force_m1_matches_columnwise() {
        for seed in 0..5 {
            let mdp = seeded(seed, 4, 2);
            assert_eq!(ergodic_coefficient_brute(&mdp, 1).unwrap(), ergodic_coefficient_m1(&mdp));
        }
    }

    #[test]
    fn brute_force_single_action_is_matrix_square() {
        let p = vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![1.0, 0.0, 0.0]];
        let mdp = chain(p.clone(), vec![0.0; 3]);
        let mut best: f64 = 0.0;
        for y in 0..3 {
            let col_min = (0..3)
                .map(|x| (0..3).map(|z| p[x][z] * p[z][y]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            best = best.max(col_min);
        }
        assert_eq!(ergodic_coefficient_m1(&mdp).rho, 0.0);
        assert!((ergodic_coefficient_brute(&mdp, 2).unwrap().rho - best).abs() <= 1e-15);
    }

    #[test]
    fn brute_force_matches_min_reach_recursion() {
        for seed in 0..10 {
            let mdp = seeded(seed, 2, 2);
            for m in 1..=3 {
                let brute = ergodic_coefficient_brute(&mdp, m).unwrap().rho;
                assert!((brute - min_reach_rho(&mdp, m)).abs() <= 1e-14, "seed {seed}, m {m}");
            }
        }
        let mdp = seeded(3, 3, 2);
        assert!((ergodic_coefficient_brute(&mdp, 2).unwrap().rho - min_reach_rho(&mdp, 2)).abs() <= 1e-14);
    }

    #[test]
    fn brute_force_guard() {
        let mdp = seeded(0, 10, 4);
        assert!(matches!(ergodic_coefficient_brute(&mdp, 2), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn beta_values() {
        assert!((beta(0.1, 1).unwrap() - 0.9).abs() <= 1e-15);
        assert_eq!(beta(1.0, 1).unwrap(), 0.0);
        assert!((beta(0.19, 2).unwrap() - 0.9).abs() <= 1e-15);
        assert!(beta(0.0, 1).is_err());
    }

    #[test]
    fn leading_constants_single_term() {
        let mdp = chain(vec![vec![0.9, 0.1], vec![0.1, 0.9]], vec![1.0, 0.0]);
        let (v_star, _) = solve_exact(&mdp).unwrap();
        let h = gain_bias_discounted(&mdp, &v_star, 0).unwrap().bias;
        let c_d = c_d_constant(&mdp, &[0.0, 0.0], &h, 0.1, 1).unwrap();
        assert_eq!(c_d, crate::mdp::span_seminorm(&h));
        assert_eq!(c_d_constant(&mdp, &h, &h, 0.1, 1).unwrap(), 0.0);

        let avg = average_reward_solve(&mdp, 0, 1e-13, 100_000).unwrap();
        let c_a = c_a_constant(&mdp, &[0.0, 0.0], &avg.bias, 0.1, 1).unwrap();
        assert_eq!(c_a, crate::mdp::span_seminorm(&avg.bias));
        assert!(c_a > 0.0);
        assert_eq!(c_a_constant(&mdp, &avg.bias, &avg.bias, 0.1, 1).unwrap(), 0.0);
    }

    #[test]
    fn leading_constant_takes_the_worst_term() {
        let mdp = seeded(2, 4, 2);
        let (v_star, _) = solve_exact(&mdp).unwrap();
        let h = gain_bias_discounted(&mdp, &v_star, 0).unwrap().bias;
        let v0 = [0.0, 1.0, -2.0, 0.5];
        let rate = 0.95 * beta(0.1, 2).unwrap();
        let one = apply_t(&mdp, &v0);
        let one_h = apply_t(&mdp, &h);
        let expected = span_distance(&v0, &h).max(span_distance(&one, &one_h) / rate);
        assert!((c_d_constant(&mdp, &v0, &h, 0.1, 2).unwrap() - expected).abs() <= 1e-14);
    }

    #[test]
    fn bound_shapes() {
        let b = wdvf_bounds(0.0, 0.9, 0.5, 3);
        assert_eq!((b.span, b.sup), (0.0, 0.0));
        for k in 0..20 {
            let r = wdvf_bounds(1.3, 0.995, 0.9, k + 1).sup / wdvf_bounds(1.3, 0.995, 0.9, k).sup;
            assert!((r - 0.995 * 0.9).abs() <= 1e-14);
            if k >= 2 {
                let q = wdqvf_bound(1.3, 0.99, 0.8, k + 1).unwrap() / wdqvf_bound(1.3, 0.99, 0.8, k).unwrap();
                assert!((q - 0.99 * 0.8).abs() <= 1e-14);
            }
        }
        assert!((0.995f64 * 0.9 - 0.8955).abs() <= 1e-15);
        assert_eq!(wdqvf_bound(0.0, 0.9, 0.5, 4).unwrap(), 0.0);
        assert!((wdqvf_bound(2.0, 0.9, 0.5, 2).unwrap() - 2.0 * 0.9 * 2.0 / 0.1).abs() <= 1e-12);
        assert!(wdqvf_bound(1.0, 0.9, 0.5, 1).is_err());
        assert!((vi_bound(1.0, 0.995, 0) - 200.0).abs() <= 1e-9);
        assert_eq!(vi_bound(0.0, 0.995, 7), 0.0);
        assert!((vi_bound(1.0, 0.9, 6) / vi_bound(1.0, 0.9, 5) - 0.9).abs() <= 1e-14);
    }

    #[test]
    fn deviation_bound_shape() {
        assert_eq!(avg_reward_deviation_bound(0.0, 0.5, 3).unwrap(), 0.0);
        let a = avg_reward_deviation_bound(1.5, 0.7, 10).unwrap();
        let b = avg_reward_deviation_bound(1.5, 0.7, 20).unwrap();
        assert!((a / b - 2.0).abs() <= 1e-14);
        assert!(matches!(avg_reward_deviation_bound(1.0, 1.0, 5), Err(Error::VacuousBound(_))));
    }

    #[test]
    fn deviation_bound_dominates_exact_averages() {
        let p = vec![vec![0.5, 0.3, 0.2], vec![0.4, 0.1, 0.5], vec![0.6, 0.2, 0.2]];
        let mdp = chain(p, vec![1.0, 0.2, 0.6]);
        let cert = ergodic_coefficient_m1(&mdp);
        let avg = average_reward_solve(&mdp, 0, 1e-13, 100_000).unwrap();
        let c_a = c_a_constant(&mdp, &[0.0; 3], &avg.bias, cert.rho, 1).unwrap();
        let b = beta(cert.rho, 1).unwrap();
        for (i, g) in average_rewards(&mdp, &avg.policy, 500).iter().enumerate() {
            let dev = g.iter().fold(0.0f64, |m, v| m.max((v - avg.gain).abs()));
            assert!(dev <= avg_reward_deviation_bound(c_a, b, i + 1).unwrap() + 1e-9);
        }
    }

    #[test]
    fn mixing_time_trivial_cases() {
        let single = chain(vec![vec![1.0]], vec![0.7]);
        let report = mixing_time_empirical(&single, &Policy::constant(1, 0), 0.7, 0.0, 1e-3, 50).unwrap();
        assert_eq!(report.tau, 1);

        let p = vec![vec![0.3, 0.7], vec![0.8, 0.2]];
        let constant = Mdp::from_state_rewards(&[p.clone(), p], &[vec![0.4; 2], vec![0.4; 2]], 0.9, 1.0).unwrap();
        let report = mixing_time_empirical(&constant, &Policy::constant(2, 1), 0.4, 0.0, 0.01, 50).unwrap();
        assert_eq!(report.tau, 1);
    }

    #[test]
    fn mixing_time_horizon_exhausted() {
        let mdp = chain(vec![vec![0.99, 0.01], vec![0.01, 0.99]], vec![1.0, 0.0]);
        let err = mixing_time_empirical(&mdp, &Policy::constant(2, 0), 0.5, 1.0, 0.01, 20).unwrap_err();
        assert_eq!(err, Error::HorizonExhausted { n_max: 20, suggested: 40 });
    }

    #[test]
    fn mixing_time_matches_simulation() {
        let p = [[0.6, 0.4], [0.4, 0.6]];
        let r = [1.0, 0.0];
        let mdp = chain(p.iter().map(|r| r.to_vec()).collect(), r.to_vec());
        let epsilon = 0.01;
        let n_max = 200;
        let report = mixing_time_empirical(&mdp, &Policy::constant(2, 0), 0.5, 1.0, epsilon, n_max).unwrap();

        let trajectories = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut sums = vec![vec![0.0f64; n_max]; 2];
        for start in 0..2 {
            for _ in 0..trajectories {
                let (mut x, mut total) = (start, 0.0);
                for slot in sums[start].iter_mut() {
                    total += r[x];
                    *slot += total;
                    x = if rng.gen::<f64>() < p[x][0] { 0 } else { 1 };
                }
            }
        }
        let deviation = |n: usize| {
            (0..2)
                .map(|s| (sums[s][n - 1] / (trajectories as f64 * n as f64) - 0.5).abs())
                .fold(0.0, f64::max)
        };
        let simulated = (1..=n_max).rev().find(|&n| deviation(n) > epsilon).map_or(1, |n| n + 1);
        assert!(report.tau.abs_diff(simulated) <= 1, "exact {} vs simulated {simulated}", report.tau);
    }

    #[test]
    fn k_theta_clamps_and_grows_with_c_d() {
        assert_eq!(k_theta(1e9, 0.9, 1.0, 1.0, 0.01, 10), 1.0);
        assert_eq!(k_theta(1e-5, 0.9, 0.0, 1.0, 0.01, 10), 1.0);
        let a = k_theta(1e-5, 0.99, 1.0, 2.0, 0.01, 50);
        let b = k_theta(1e-5, 0.99, 2.0, 2.0, 0.01, 50);
        assert!(b > a && a > 1.0);
    }

    #[test]
    fn k_theta_iterations_suffice_under_the_lower_beta() {
        let (alpha, c_d, c_a, epsilon, tau, theta) = (0.99, 3.0, 2.0, 0.01, 40, 1e-5);
        let k = k_theta(theta, alpha, c_d, c_a, epsilon, tau);
        let et = epsilon * tau as f64;
        let beta_lower = et / (2.0 * c_a + et);
        let bound = wdvf_bounds(c_d, alpha, beta_lower, k.ceil() as usize - 1).sup;
        assert!(bound <= theta * (1.0 + 1e-12), "{bound} > {theta}");
    }

    #[test]
    fn profile_on_benchmark_instance() {
        let mdp = random_mdp(&GeneratorConfig::benchmark(3)).unwrap();
        let profile = ErgodicityProfile::compute(&mdp, &[0.0; 100], 0).unwrap();
        assert_eq!(profile.rho, 0.1);
        assert!((profile.beta - 0.9).abs() <= 1e-15);
        assert!(profile.c_d > 0.0 && !profile.degenerate);
        assert!(profile.c_a.is_some());
    }
}
