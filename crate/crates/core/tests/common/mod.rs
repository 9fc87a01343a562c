#![allow(dead_code)]

use wdvf::generator::{random_mdp, GeneratorConfig};
use wdvf::mdp::Mdp;

pub const DISCOUNTS: [f64; 3] = [0.9, 0.99, 0.995];

/// Instance `i` of a family of small 3-action MDPs with `n <= max_states`,
/// cycling through discounts, ergodic strengths and row supports.
pub fn small_instance(i: usize, max_states: usize, seed_offset: u64) -> Mdp {
    let n = 2 + (i * 7) % (max_states - 1);
    let support = match i % 3 {
        0 => n,
        1 => 3.min(n),
        _ => 1,
    };
    random_mdp(&GeneratorConfig {
        num_states: n,
        num_actions: 3,
        discount: DISCOUNTS[i % 3],
        rho: [0.1, 0.2, 0.35][(i / 3) % 3],
        r_max: 1.0,
        seed: seed_offset + i as u64,
        target_state: i % n,
        support,
    })
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn span(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Prints the verdict line and fails the test when `ok` is false.
pub fn verdict(id: &str, ok: bool, detail: &str) {
    println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}
