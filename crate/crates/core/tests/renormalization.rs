use proptest::prelude::*;
use threebody::exact_diag::exact_diag_oracle;
use threebody::renorm::{
    beta, beta_closed_form, beta_partials, counterterm, delta_u3, log_log_slope,
    raw_second_order_shift, renormalized_second_order_shift, three_body_channel_sum,
    two_body_channel_sum, two_body_channel_sum_by_pairs, PerturbationSummary,
};

#[test]
fn renormalized_shift_is_pure_three_body() {
    let xi = 0.07;
    for cutoff in [2, 4, 8] {
        let channel = delta_u3(cutoff, xi, 1.0).unwrap();
        for n in [3u32, 4, 5] {
            let triples = (n * (n - 1) * (n - 2)) as f64 / 6.0;
            let shift = renormalized_second_order_shift(n, cutoff, xi, 1.0).unwrap();
            assert!(
                ((shift / triples - channel) / channel).abs() < 1e-12,
                "n={n} cutoff={cutoff}"
            );
        }
    }
}

#[test]
fn two_atoms_renormalize_to_zero() {
    for cutoff in [2, 4, 8] {
        let s = raw_second_order_shift(2, cutoff, 0.07, 1.0).unwrap()
            + counterterm(cutoff, 0.07, 1.0).unwrap();
        assert!(s.abs() < 1e-12);
        assert_eq!(
            renormalized_second_order_shift(2, cutoff, 0.07, 1.0).unwrap(),
            0.0
        );
    }
}

#[test]
fn summary_is_consistent() {
    let s = PerturbationSummary::compute(12).unwrap();
    assert_eq!(s.beta, beta(12).unwrap());
    assert!(
        (s.counterterm - two_body_channel_sum_by_pairs(12).unwrap()).abs() < 1e-12 * s.counterterm
    );
}

#[test]
fn partials_increase_toward_closed_form() {
    let p = beta_partials(60).unwrap();
    assert!(p.windows(2).all(|w| w[1] >= w[0]));
    assert!(*p.last().unwrap() <= beta_closed_form() + 1e-14);
    assert!(beta_closed_form() - p.last().unwrap() < 1e-3);
}

#[test]
fn three_body_tail_converges() {
    let limit = beta_closed_form() / 6.0;
    let points: Vec<(f64, f64)> = [4u32, 8, 12, 16]
        .iter()
        .map(|&c| (c as f64, limit - three_body_channel_sum(c).unwrap()))
        .collect();
    assert!(points.iter().all(|&(_, t)| t > 0.0));
    assert!(log_log_slope(&points).unwrap() < 0.0);
}

#[test]
fn diagonalization_isolates_induced_three_body_energy() {
    // E(3) − 3E(2) removes the two-body channel, leaving δU₃ + O(ξ³).
    let xi = 0.01;
    let e3 = exact_diag_oracle(3, 4, xi).unwrap().energy;
    let e2 = exact_diag_oracle(2, 4, xi).unwrap().energy;
    let expected = delta_u3(4, xi, 1.0).unwrap();
    let got = e3 - 3.0 * e2;
    assert!(
        ((got - expected) / expected).abs() < 0.05,
        "{got} vs {expected}"
    );
}

#[test]
fn diagonalization_residual_is_cubic() {
    let residual = |xi: f64| {
        let e = exact_diag_oracle(3, 4, xi).unwrap().energy;
        e - 3.0 * xi - raw_second_order_shift(3, 4, xi, 1.0).unwrap()
    };
    let ratio = residual(0.07) / residual(0.035);
    assert!((6.0..=10.0).contains(&ratio), "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shifts_scale_quadratically(u2 in 0.001f64..0.1, cutoff in 2u32..=5) {
        let a = raw_second_order_shift(4, cutoff, u2, 1.0).unwrap();
        let b = raw_second_order_shift(4, cutoff, 2.0 * u2, 1.0).unwrap();
        prop_assert!((b - 4.0 * a).abs() <= 1e-13 * b.abs());
    }

    #[test]
    fn two_body_routes_agree(cutoff in 1u32..=12) {
        let f = two_body_channel_sum(cutoff).unwrap();
        let p = two_body_channel_sum_by_pairs(cutoff).unwrap();
        prop_assert!((f - p).abs() <= 1e-12 * p.abs().max(1.0));
    }
}
