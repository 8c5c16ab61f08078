use proptest::prelude::*;
use threebody::dynamics::{
    amplitude, amplitude_from_energies, visibility, visibility_closed_form, CoherentStateSpec,
    LatticeEnvelope, SiteAverage,
};
use threebody::model::{hz_to_joules, CouplingSet};

fn couplings(u2_hz: f64, u3_hz: f64) -> CouplingSet {
    CouplingSet {
        xi: 0.07,
        u2: hz_to_joules(u2_hz),
        u3: hz_to_joules(u3_hz),
        hbar_omega: hz_to_joules(30e3),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #[test]
    fn visibility_bounded(nbar in 0.0f64..8.0, u2 in 100.0f64..5000.0, u3 in -500.0f64..500.0, t in 0.0f64..0.02) {
        let spec = CoherentStateSpec::new(nbar, 1e-12).unwrap();
        let v = visibility(t, &spec, &couplings(u2, u3));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn two_body_periodic(nbar in 0.1f64..6.0, u2 in 100.0f64..5000.0, frac in 0.0f64..3.0) {
        let spec = CoherentStateSpec::new(nbar, 1e-14).unwrap();
        let c = couplings(u2, 0.0);
        let t2 = c.t2().unwrap();
        let t = frac * t2;
        prop_assert!((visibility(t + t2, &spec, &c) - visibility(t, &spec, &c)).abs() <= 1e-10);
    }

    #[test]
    fn series_matches_closed_form(nbar in 0.0f64..6.0, u2 in 100.0f64..5000.0, frac in 0.0f64..4.0) {
        let spec = CoherentStateSpec::new(nbar, 1e-14).unwrap();
        let c = couplings(u2, 0.0);
        let t = frac * c.t2().unwrap();
        prop_assert!((visibility(t, &spec, &c) - visibility_closed_form(t, nbar, c.u2)).abs() <= 1e-10);
    }

    #[test]
    fn gap_and_energy_paths_agree(nbar in 0.0f64..6.0, u2 in 100.0f64..5000.0, u3 in -500.0f64..500.0, frac in 0.0f64..10.0) {
        let spec = CoherentStateSpec::new(nbar, 1e-12).unwrap();
        let c = couplings(u2, u3);
        let t = frac * c.t2().unwrap();
        prop_assert!((amplitude(t, &spec, &c) - amplitude_from_energies(t, &spec, &c)).norm() <= 1e-10);
    }

    #[test]
    fn rational_ratio_revives(q in 1i64..25, p in 1i64..25, negative in any::<bool>()) {
        prop_assume!(gcd(q, p) == 1);
        let spec = CoherentStateSpec::new(2.5, 1e-14).unwrap();
        let u2 = 1000.0 * q as f64;
        let u3 = 1000.0 * p as f64 * if negative { -1.0 } else { 1.0 };
        let c = couplings(u2, u3);
        let t = q as f64 * c.t2().unwrap();
        prop_assert!((amplitude(t, &spec, &c).norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn time_reversal(nbar in 0.0f64..6.0, u2 in 100.0f64..5000.0, u3 in -500.0f64..500.0, t in 0.0f64..0.01) {
        let spec = CoherentStateSpec::new(nbar, 1e-12).unwrap();
        let c = couplings(u2, u3);
        let r = CouplingSet { u2: -c.u2, u3: -c.u3, ..c };
        prop_assert_eq!(visibility(t, &spec, &c), visibility(t, &spec, &r));
    }

    #[test]
    fn flat_envelope_bitwise(u3 in -500.0f64..500.0, t in 0.0f64..0.01) {
        let spec = CoherentStateSpec::new(2.5, 1e-12).unwrap();
        let c = couplings(2000.0, u3);
        let avg = SiteAverage::compressed(&LatticeEnvelope::with_eps(0.0), &c).unwrap();
        prop_assert_eq!(avg.visibility(t, &spec).to_bits(), visibility(t, &spec, &c).to_bits());
    }

    #[test]
    fn truncation_monotone(nbar in 0.0f64..20.0, exp in 2i32..14) {
        let tol = 10f64.powi(-exp);
        let a = CoherentStateSpec::new(nbar, tol).unwrap();
        let b = CoherentStateSpec::new(nbar, tol / 2.0).unwrap();
        prop_assert!(b.n_max >= a.n_max);
        let mass: f64 = a.poisson_weights().iter().sum();
        prop_assert!(mass >= 1.0 - tol - 1e-15);
    }
}

#[test]
fn shell_compression_matches_full_site_sum() {
    let spec = CoherentStateSpec::new(2.5, 1e-12).unwrap();
    let c = couplings(2100.0, -197.6);
    let env = LatticeEnvelope::default();
    let full = SiteAverage::per_site(&env, &c).unwrap();
    let shells = SiteAverage::compressed(&env, &c).unwrap();
    assert_eq!(full.site_count(), shells.site_count());
    assert!(shells.group_count() < 1000);
    let t2 = c.t2().unwrap();
    for k in [0.0, 0.37, 1.0, 4.0, 9.5] {
        let t = k * t2;
        let d = (full.visibility(t, &spec) - shells.visibility(t, &spec)).abs();
        assert!(d <= 1e-6, "t = {k} t2: {d}");
    }
}

#[test]
fn inhomogeneity_damps_revivals() {
    let spec = CoherentStateSpec::new(2.5, 1e-12).unwrap();
    let c = couplings(2000.0, 0.0);
    let avg = SiteAverage::compressed(&LatticeEnvelope::default(), &c).unwrap();
    let t2 = c.t2().unwrap();
    let heights: Vec<f64> = (1..=6)
        .map(|k| avg.visibility(k as f64 * t2, &spec))
        .collect();
    assert!(heights.windows(2).all(|w| w[1] < w[0]), "{heights:?}");
}
