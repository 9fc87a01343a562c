mod common;

use proptest::prelude::*;

use wdvf::bellman::{apply_f, apply_t, apply_t_bar, wdvf_iteration, Method, WdqvfIterates, WdvfIterates};
use wdvf::ergodicity::{ergodic_coefficient_m1, ErgodicityProfile};
use wdvf::generator::{random_mdp, GeneratorConfig};
use wdvf::harness::format::{mdp_from_json, mdp_to_json, trace_to_csv};
use wdvf::harness::report::{attach_bounds, run_method};
use wdvf::mdp::{
    greedy_policy, policy_evaluation, q_from_values, solve_exact, span_seminorm, sup_distance, sup_norm,
    validate, Mdp, QFunction,
};

fn config() -> impl Strategy<Value = GeneratorConfig> {
    (1usize..12, 1usize..4, 0.5f64..0.99, 0.05f64..0.9, any::<u64>()).prop_flat_map(|(n, na, alpha, rho, seed)| {
        (1..=n, 0..n).prop_map(move |(support, target)| GeneratorConfig {
            num_states: n,
            num_actions: na,
            discount: alpha,
            rho,
            r_max: 1.0,
            seed,
            target_state: target,
            support,
        })
    })
}

fn instance() -> impl Strategy<Value = Mdp> {
    config().prop_map(|c| random_mdp(&c).unwrap())
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, n)
}

fn instance_with_values() -> impl Strategy<Value = (Mdp, Vec<f64>, Vec<f64>)> {
    instance().prop_flat_map(|m| {
        let n = m.num_states();
        (Just(m), values(n), values(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_satisfy_invariants(c in config()) {
        let mdp = random_mdp(&c).unwrap();
        prop_assert!(validate(&mdp).is_empty());
        prop_assert!(ergodic_coefficient_m1(&mdp).rho >= c.rho * (1.0 - 1e-12));
    }

    #[test]
    fn json_round_trip_is_exact(mdp in instance()) {
        prop_assert_eq!(mdp_from_json(&mdp_to_json(&mdp)).unwrap(), mdp);
    }

    #[test]
    fn span_seminorm_axioms(v in values(7), c in -100.0f64..100.0) {
        let s = span_seminorm(&v);
        prop_assert!(s >= 0.0);
        prop_assert!(s <= 2.0 * sup_norm(&v) + 1e-12);
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        prop_assert!((span_seminorm(&shifted) - s).abs() <= 1e-12);
        prop_assert_eq!(span_seminorm(&[c; 5]), 0.0);
    }

    #[test]
    fn bellman_operator_contracts_in_sup_norm((mdp, v1, v2) in instance_with_values()) {
        let lhs = sup_distance(&apply_t(&mdp, &v1), &apply_t(&mdp, &v2));
        prop_assert!(lhs <= mdp.discount() * sup_distance(&v1, &v2) + 1e-12);
    }

    #[test]
    fn bellman_operators_are_monotone((mdp, v1, v2) in instance_with_values()) {
        let lo: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a.min(*b)).collect();
        for op in [apply_t, apply_t_bar] {
            let (t_lo, t_v1) = (op(&mdp, &lo), op(&mdp, &v1));
            prop_assert!(t_lo.iter().zip(t_v1.iter()).all(|(a, b)| *a <= b + 1e-12));
        }
    }

    #[test]
    fn span_contracts_at_certified_rate((mdp, v1, v2) in instance_with_values()) {
        let rho = ergodic_coefficient_m1(&mdp).rho;
        let d: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a - b).collect();
        let t: Vec<f64> = apply_t(&mdp, &v1).iter().zip(apply_t(&mdp, &v2).iter()).map(|(a, b)| a - b).collect();
        prop_assert!(span_seminorm(&t) <= mdp.discount() * (1.0 - rho) * span_seminorm(&d) + 1e-12);
    }

    #[test]
    fn optimal_values_are_a_fixed_point(mdp in instance()) {
        let (v_star, policy) = solve_exact(&mdp).unwrap();
        prop_assert!(sup_distance(&apply_t(&mdp, &v_star), &v_star) <= 1e-10);
        let v_pi = policy_evaluation(&mdp, &policy).unwrap();
        let v_greedy = policy_evaluation(&mdp, &greedy_policy(&mdp, &v_star)).unwrap();
        prop_assert!(sup_distance(&v_greedy, &v_star) <= 1e-10);
        prop_assert!(sup_distance(&v_pi, &v_star) <= 1e-10);
        let q_star = q_from_values(&mdp, &v_star);
        prop_assert!(apply_f(&mdp, &q_star).sup_distance(&q_star) <= 1e-10);
    }

    #[test]
    fn greedy_q_iterate_is_one_backup_of_previous_wdvf_iterate(mdp in instance(), steps in 2usize..30) {
        let v0 = vec![0.0; mdp.num_states()];
        let qs: Vec<QFunction> = WdqvfIterates::new(&mdp, &v0).take(steps).collect();
        let vs: Vec<_> = WdvfIterates::new(&mdp, &v0).take(steps).collect();
        let scale = 1.0 / (1.0 - mdp.discount());
        for k in 1..steps {
            let backed_up = apply_t(&mdp, &vs[k - 1]);
            prop_assert!(sup_distance(&qs[k].max_over_actions(), &backed_up) <= 1e-10 * scale);
        }
    }

    #[test]
    fn wdvf_errors_stay_under_bounds(mdp in instance()) {
        let n = mdp.num_states();
        let (v_star, _) = solve_exact(&mdp).unwrap();
        let profile = ErgodicityProfile::with_optimum(&mdp, &vec![0.0; n], 0, &v_star).unwrap();
        let (_, mut trace) = wdvf_iteration(&mdp, &vec![0.0; n], 1e-9, 2000, Some(&v_star)).unwrap();
        attach_bounds(&mut trace, &mdp, Some(&profile));
        for r in trace.records.iter().skip(1) {
            prop_assert!(r.sup_error.unwrap() <= r.bound_sup.unwrap() + 1e-9);
            prop_assert!(r.span_error.unwrap() <= r.bound_span.unwrap() + 1e-9);
        }
    }

    #[test]
    fn trace_bound_columns_strictly_decrease(mdp in instance()) {
        let n = mdp.num_states();
        let (v_star, _) = solve_exact(&mdp).unwrap();
        let profile = ErgodicityProfile::with_optimum(&mdp, &vec![0.0; n], 0, &v_star).unwrap();
        prop_assume!(!profile.degenerate);
        let mut trace = run_method(&mdp, Method::Wdvf, &v_star, 1e-8, 500).unwrap();
        attach_bounds(&mut trace, &mdp, Some(&profile));
        let csv = trace_to_csv(&trace);
        let rows: Vec<Vec<&str>> = csv.lines().skip(2).map(|l| l.split(',').collect()).collect();
        for w in rows.windows(2) {
            for col in [3, 4] {
                let (a, b): (f64, f64) = (w[0][col].parse().unwrap(), w[1][col].parse().unwrap());
                prop_assert!(b < a || (a == 0.0 && b == 0.0));
            }
        }
    }

    #[test]
    fn every_method_reaches_the_optimum(mdp in instance()) {
        let (v_star, _) = solve_exact(&mdp).unwrap();
        for method in Method::ALL {
            let trace = run_method(&mdp, method, &v_star, 1e-6, 100_000).unwrap();
            prop_assert!(trace.converged());
            prop_assert!(trace.final_record().unwrap().sup_error.unwrap() <= 1e-6);
        }
    }
}
