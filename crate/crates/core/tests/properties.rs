use proptest::prelude::*;

use iscc::channel::{radar_mi_sue, radar_mi_tue};
use iscc::delay::{CloudPath, SueDelayBreakdown, SueTerms, TueDelayBreakdown, TueTerms};
use iscc::fixtures::toy_scenario;
use iscc::generator::{generate_scenario, GeneratorParams};
use iscc::io::{scenario_from_toml, scenario_to_toml};
use iscc::optimizer::{decode, dimensions, encode, evaluate, utility};
use iscc::partition::{cloud_admission_tue, solve_local_cloud, solve_local_edge, solve_local_edge_cloud};
use iscc::{PartitionSue, PartitionTue, SubframeAllocation};

fn tue_terms() -> impl Strategy<Value = TueTerms> {
    (1e5..9e5f64, 1e-7..1e-5f64, 1e-9..1e-5f64, 1e-8..1e-5f64).prop_map(|(d, l, a, e)| TueTerms {
        data_bits: d,
        local_s_per_bit: l,
        uplink_s_per_bit: a,
        edge_s_per_bit: e,
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn local_edge_split_balances_and_beats_any_split(t in tue_terms(), alpha in 0.0..=1.0f64) {
        let (p, b) = solve_local_edge(&t, 0.0);
        prop_assert!((0.0..=1.0).contains(&p.alpha) && p.kappa == 0.0);
        prop_assert!(close(b.t_u, b.t_b, 1e-9));
        let other = PartitionTue { alpha, beta: 1.0 - alpha, kappa: 0.0 };
        let cloud = CloudPath { backhaul_s_per_bit: 1.0, trip_s: 0.0 };
        let t_other = TueDelayBreakdown::compute(&t, &cloud, &other).t_total;
        prop_assert!(b.t_total <= t_other * (1.0 + 1e-12));
    }

    #[test]
    fn delay_scales_linearly_with_task_size(t in tue_terms(), scale in 0.1..10.0f64) {
        let (_, b) = solve_local_edge(&t, 0.0);
        let (_, b2) = solve_local_edge(&TueTerms { data_bits: t.data_bits * scale, ..t }, 0.0);
        prop_assert!(close(b2.t_total, b.t_total * scale, 1e-12));
    }

    #[test]
    fn three_way_split_balances_and_beats_any_split(
        t in tue_terms(),
        backhaul in 1e-9..1e-5f64,
        trip_frac in 0.0..1.0f64,
        a in 0.0..=1.0f64,
        b in 0.0..=1.0f64,
    ) {
        let (_, edge) = solve_local_edge(&t, 0.0);
        let trip = edge.t_edge * trip_frac;
        prop_assume!(cloud_admission_tue(&edge, trip));
        let cloud = CloudPath { backhaul_s_per_bit: backhaul, trip_s: trip };
        let (p, bd) = solve_local_edge_cloud(&t, &cloud).unwrap();
        prop_assert!(close(p.alpha + p.beta + p.kappa, 1.0, 1e-12));
        prop_assert!(close(bd.t_u, bd.t_b, 1e-9) && close(bd.t_u, bd.t_c, 1e-9));
        // any other point of the simplex
        let alpha = a;
        let beta = (1.0 - a) * b;
        let other = PartitionTue { alpha, beta, kappa: 1.0 - alpha - beta };
        let t_other = TueDelayBreakdown::compute(&t, &cloud, &other).t_total;
        prop_assert!(bd.t_total <= t_other * (1.0 + 1e-12));
        // and the cloud never hurts
        prop_assert!(bd.t_total <= edge.t_total * (1.0 + 1e-12));
    }

    #[test]
    fn forced_cloud_share_never_helps_when_not_admitted(
        t in tue_terms(),
        backhaul in 1e-9..1e-5f64,
        trip_factor in 1.0..5.0f64,
        kappa in 0.01..1.0f64,
        a in 0.0..=1.0f64,
    ) {
        let (_, edge) = solve_local_edge(&t, 0.0);
        let cloud = CloudPath { backhaul_s_per_bit: backhaul, trip_s: edge.t_edge * trip_factor };
        prop_assert!(!cloud_admission_tue(&edge, cloud.trip_s));
        let alpha = (1.0 - kappa) * a;
        let forced = PartitionTue { alpha, beta: 1.0 - kappa - alpha, kappa };
        let t_forced = TueDelayBreakdown::compute(&t, &cloud, &forced).t_total;
        prop_assert!(t_forced > edge.t_total);
    }

    #[test]
    fn sue_split_balances_and_beats_any_split(
        d in 1e5..9e5f64,
        local in 5e-7..5e-6f64,
        uplink in 1e-9..1e-5f64,
        trip_frac in 0.0..1.0f64,
        alpha in 0.0..=1.0f64,
    ) {
        let terms = SueTerms { data_bits: d, local_s_per_bit: local, uplink_s_per_bit: uplink, trip_s: d * local * trip_frac };
        let (p, b) = solve_local_cloud(&terms).unwrap();
        prop_assert!(close(p.alpha + p.kappa, 1.0, 1e-12));
        prop_assert!(close(b.t_u, b.t_c, 1e-9));
        let t_other = SueDelayBreakdown::compute(&terms, &PartitionSue { alpha, kappa: 1.0 - alpha }).t_total;
        prop_assert!(b.t_total <= t_other * (1.0 + 1e-12));
    }

    #[test]
    fn sue_offloading_never_helps_when_not_admitted(
        d in 1e5..9e5f64,
        local in 5e-7..5e-6f64,
        uplink in 1e-9..1e-5f64,
        trip_factor in 1.0..5.0f64,
        kappa in 0.01..1.0f64,
    ) {
        let terms = SueTerms { data_bits: d, local_s_per_bit: local, uplink_s_per_bit: uplink, trip_s: d * local * trip_factor };
        prop_assert!(solve_local_cloud(&terms).is_err());
        let local_only = SueDelayBreakdown::compute(&terms, &PartitionSue { alpha: 1.0, kappa: 0.0 }).t_total;
        let forced = SueDelayBreakdown::compute(&terms, &PartitionSue { alpha: 1.0 - kappa, kappa }).t_total;
        prop_assert!(forced > local_only);
    }

    #[test]
    fn decoded_positions_are_feasible(x in prop::collection::vec(-2.0..3.0f64, dimensions(4))) {
        let a = decode(&x);
        prop_assert!(a.validate(4).is_ok());
        prop_assert!((a.tau_b + a.tau_us + a.theta_us - 1.0).abs() <= 1e-12);
        for (t, th) in a.tau_ub.iter().zip(&a.theta_ub) {
            prop_assert!((t + th - 1.0).abs() <= 1e-12);
        }
        // decoding is idempotent through encode
        prop_assert_eq!(decode(&encode(&a)), a);
    }

    #[test]
    fn mi_is_linear_in_the_sensing_share(theta in 0.0..=1.0f64, theta_sat in 0.0..=1.0f64) {
        let s = toy_scenario(2, 2, 2);
        let full = SubframeAllocation::all_sensing(2);
        let a = SubframeAllocation {
            tau_ub: vec![1.0 - theta; 2],
            theta_ub: vec![theta; 2],
            tau_b: 1.0 - theta_sat,
            tau_us: 0.0,
            theta_us: theta_sat,
        };
        for k in 0..2 {
            let i_full = radar_mi_tue(&s, &full, 1, k).unwrap();
            prop_assert!(close(radar_mi_tue(&s, &a, 1, k).unwrap(), theta * i_full, 1e-12) || theta == 0.0);
            let i_sat = radar_mi_sue(&s, &full, k).unwrap();
            prop_assert!(close(radar_mi_sue(&s, &a, k).unwrap(), theta_sat * i_sat, 1e-12) || theta_sat == 0.0);
        }
    }

    #[test]
    fn more_sensing_never_lowers_mi(tau in 0.05..1.0f64, less in 0.0..1.0f64) {
        let s = toy_scenario(2, 2, 2);
        let a = SubframeAllocation::from_comm(vec![tau; 2], 0.5, 0.25);
        let b = SubframeAllocation::from_comm(vec![tau * less; 2], 0.5, 0.25);
        let ra = evaluate(&s, &a, 0.5).unwrap();
        let rb = evaluate(&s, &b, 0.5).unwrap();
        prop_assert!(rb.total_mi_bits >= ra.total_mi_bits);
    }

    #[test]
    fn utility_endpoints(mi in 1.0..1e9f64, t in 0.1..1e3f64) {
        prop_assert!(close(utility(mi, t, 0.0), 1.0 / t, 1e-12));
        prop_assert!(close(utility(mi, t, 1.0), mi, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generated_scenarios_survive_a_file_round_trip(seed in 0u64..1000) {
        let p = GeneratorParams { num_bs: 2, tues_per_bs: 2, num_sues: 3, ..GeneratorParams::default() };
        let s = generate_scenario(&p, seed).unwrap();
        let (back, pso) = scenario_from_toml(&scenario_to_toml(&s, None).unwrap()).unwrap();
        prop_assert!(pso.is_none());
        prop_assert_eq!(back, s);
    }
}
