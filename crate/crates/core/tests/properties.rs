#![allow(clippy::int_plus_one, clippy::needless_range_loop)]

mod common;

use proptest::prelude::*;
use vimetric::binpack::{best_fit_overflow, best_fit_overstuff, PackingInstance, Slot};
use vimetric::{
    best_fit_bound_check, closed_form_2x2, conditional_entropy, entropy, exact_metric,
    exact_n_by_2, exact_reduce, greedy_metric_bound, greedy_reduce, joint_entropy, vertex_joints,
    Distribution, DEFAULT_SIZE_CAP,
};

use common::{north_west_corner, permutations};

fn distribution(max_len: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, 1..=max_len)
        .prop_map(|w| Distribution::from_weights(w).unwrap())
}

fn ranged(lo: usize, hi: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, lo..=hi)
        .prop_map(|w| Distribution::from_weights(w).unwrap())
}

fn sized(len: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|w| Distribution::from_weights(w).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn exact_metric_identities(phi in distribution(4), psi in distribution(4)) {
        let r = exact_metric(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        let (hp, hq) = (entropy(&phi), entropy(&psi));
        prop_assert!(r.d >= 0.0);
        prop_assert!(close(r.d, 2.0 * r.w - hp - hq, 1e-10));
        prop_assert!(close(r.v_psi_phi, r.v_phi_psi + hp - hq, 1e-10));
        // A coupling is at least as uncertain as either marginal.
        prop_assert!(r.w >= hp.max(hq) - 1e-12);
        prop_assert!(close(joint_entropy(&r.argmin_joint), r.w, 1e-12));
        let back = exact_metric(&psi, &phi, DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(close(back.w, r.w, 1e-10));
    }

    #[test]
    fn exact_minimum_beats_every_north_west_corner(phi in distribution(4), psi in distribution(4)) {
        let r = exact_metric(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        for rows in permutations(phi.len()) {
            for cols in permutations(psi.len()) {
                let theta = north_west_corner(&phi, &psi, &rows, &cols);
                let e = vimetric::info::entropy_of(theta.as_slice());
                prop_assert!(r.w <= e + 1e-12, "W = {} but a corner coupling has {}", r.w, e);
            }
        }
    }

    #[test]
    fn north_west_corners_are_vertices(phi in distribution(4), psi in distribution(3)) {
        let vertices = vertex_joints(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        for v in &vertices {
            prop_assert!(v.support_size(0.0) <= phi.len() + psi.len() - 1);
            let (r, c) = (v.row_marginal(), v.col_marginal());
            for i in 0..phi.len() {
                prop_assert!(close(r[i], phi[i], 1e-12));
            }
            for j in 0..psi.len() {
                prop_assert!(close(c[j], psi[j], 1e-12));
            }
        }
        for rows in permutations(phi.len()) {
            for cols in permutations(psi.len()) {
                let theta = north_west_corner(&phi, &psi, &rows, &cols);
                let found = vertices.iter().any(|v| v.matrix().max_abs_diff(&theta) < 1e-12);
                prop_assert!(found, "corner coupling {:?} is not listed", theta);
            }
        }
    }

    #[test]
    fn closed_form_matches_enumeration(phi in sized(2), psi in sized(2)) {
        let c = closed_form_2x2(&phi, &psi).unwrap();
        let r = exact_metric(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(close(c.v, r.v_phi_psi, 1e-10));
        prop_assert!(close(conditional_entropy(&phi, &c.p).unwrap(), c.v, 1e-12));
        let out = c.p.push_forward(&phi).unwrap();
        prop_assert!(close(out[0], psi[0], 1e-12));
    }

    #[test]
    fn two_bin_solver_matches_enumeration(phi in distribution(6), psi in sized(2)) {
        let c = exact_n_by_2(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        let r = exact_metric(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(close(c.v, r.v_phi_psi, 1e-9));
        prop_assert!(close(conditional_entropy(&phi, &c.p).unwrap(), c.v, 1e-12));
        let out = c.p.push_forward(&phi).unwrap();
        prop_assert!(close(out[0], psi[0], 1e-9));
    }

    #[test]
    fn greedy_is_a_feasible_upper_bound(phi in distribution(8), psi in distribution(3)) {
        let t = greedy_metric_bound(&phi, &psi).unwrap();
        let out = t.p.push_forward(&phi).unwrap();
        for j in 0..psi.len() {
            prop_assert!(close(out[j], psi[j], 1e-9));
        }
        for i in 0..phi.len() {
            prop_assert!(close(t.p.row(i).iter().sum::<f64>(), 1.0, 1e-12));
        }
        prop_assert!(close(t.v_bound, conditional_entropy(&phi, &t.p).unwrap(), 1e-9));
        prop_assert!(close(t.d_bound, t.v_bound + t.u_bound, 1e-12));
        let exact = exact_metric(&phi, &psi, DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(t.v_bound >= exact.v_phi_psi - 1e-9);
        prop_assert!(t.d_bound >= exact.d - 1e-9);
    }

    #[test]
    fn greedy_rounds_are_consistent(phi in distribution(40), psi in distribution(10)) {
        let t = greedy_metric_bound(&phi, &psi).unwrap();
        let smaller = phi.len().min(psi.len());
        prop_assert!(t.rounds.len() <= smaller.max(2) - 1);
        for r in &t.rounds {
            prop_assert!(close(r.u - r.v, entropy(&r.phi) - entropy(&r.psi), 1e-10));
            prop_assert!(r.overflow.len() < r.m);
            let out = r.p.push_forward(&r.phi).unwrap();
            for j in 0..r.m {
                prop_assert!(close(out[j], r.psi[j], 1e-9));
            }
            for i in 0..r.q.rows() {
                prop_assert!(close(r.q.row(i).iter().sum::<f64>(), 1.0, 1e-9));
            }
        }
    }

    // With n >= m the smaller distribution supplies the bins, which are sorted
    // before packing.
    #[test]
    fn greedy_ignores_bin_order(phi in ranged(5, 12), psi in distribution(5), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let order = common::random_permutation(&mut rng, psi.len());
        let shuffled = psi.permuted(&order).unwrap();
        let a = greedy_metric_bound(&phi, &psi).unwrap();
        let b = greedy_metric_bound(&phi, &shuffled).unwrap();
        prop_assert!(close(a.d_bound, b.d_bound, 1e-10));
    }

    #[test]
    fn overflow_packing_never_overfills(items in distribution(30), caps in distribution(8)) {
        let instance = PackingInstance::new(items.as_slice().to_vec(), caps.as_slice().to_vec()).unwrap();
        let r = best_fit_overflow(&instance);
        for j in 0..caps.len() {
            prop_assert!(r.loads[j] <= caps[j] + 1e-9);
        }
        let overflow: f64 = r.overflow.iter().map(|&i| items[i]).sum();
        prop_assert!(close(overflow, r.unused_capacity(), 1e-9));
        // An item overflows only if it exceeds every final residual.
        let largest = r.slack.iter().copied().fold(0.0, f64::max);
        for &i in &r.overflow {
            prop_assert!(items[i] > largest);
        }
        prop_assert!(r.overflow.len() < caps.len().max(1));
    }

    #[test]
    fn overstuff_packing_places_everything(items in distribution(30), caps in distribution(8)) {
        let instance = PackingInstance::new(items.as_slice().to_vec(), caps.as_slice().to_vec()).unwrap();
        let r = best_fit_overstuff(&instance);
        prop_assert!(r.assignment.iter().all(|s| matches!(s, Slot::Bin(_))));
        prop_assert!(close(r.loads.iter().sum::<f64>(), 1.0, 1e-12));
        prop_assert!(close(r.excess.iter().sum::<f64>(), r.slack.iter().sum::<f64>(), 1e-12));
        prop_assert!(best_fit_bound_check(&items, &caps).unwrap().ok);
    }

    #[test]
    fn reduction_entropy_ordering(phi in distribution(9), m in 1usize..=3) {
        prop_assume!(m <= phi.len());
        let exact = exact_reduce(&phi, m, DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(exact.entropy <= (m as f64).ln() + 1e-12);
        prop_assert!(close(exact.distance, entropy(&phi) - exact.entropy, 1e-12));
        for presort in [false, true] {
            let g = greedy_reduce(&phi, m, presort).unwrap();
            prop_assert!(g.reduction.entropy <= exact.entropy + 1e-12);
            prop_assert!(g.rho <= g.rho_bound + 1e-12);
        }
    }
}
