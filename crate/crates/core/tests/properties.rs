//! Property tests over random orders and arguments.

use proptest::prelude::*;
use turan_core::ousim::{sample_hitting_times, OUParams};
use turan_core::ratio::{bounds, capital_psi, ratio_cylinder, ratio_hermite, turan_margin};
use turan_core::specfun::{
    dnu, generator_residual, hermite, identity_residual, psi, recurrence_residual,
};
use turan_core::tolerances::*;
use turan_core::{Order, QuadratureConfig, SimConfig};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn values_are_positive(nu in -6.0f64..-0.05, x in -30.0f64..30.0) {
        let o = Order::new(nu).unwrap();
        let h = hermite(o, x, &cfg()).unwrap();
        let d = dnu(o, x, &cfg()).unwrap();
        prop_assert_eq!(h.value.sign(), 1);
        prop_assert_eq!(d.value.sign(), 1);
        prop_assert!(h.abs_err_log >= 0.0 && h.abs_err_log < 1e-10);
    }

    #[test]
    fn cylinder_identity_holds(nu in -5.0f64..-0.1, x in -30.0f64..30.0) {
        let r = identity_residual(Order::new(nu).unwrap(), x, &cfg()).unwrap();
        prop_assert!(r <= IDENTITY, "residual {}", r);
    }

    #[test]
    fn recurrence_holds(nu in -4.0f64..-0.3, x in -10.0f64..10.0) {
        let r = recurrence_residual(Order::new(nu).unwrap(), x, &cfg()).unwrap();
        prop_assert!(r <= RECURRENCE, "residual {}", r);
    }

    #[test]
    fn generator_equation_holds(
        nu in -4.0f64..-0.3,
        x in -10.0f64..10.0,
        mu in -1.0f64..1.0,
        sigma in 0.5f64..2.0,
    ) {
        let p = OUParams::new(mu, sigma).unwrap();
        let r = generator_residual(x, &p, Order::new(nu).unwrap(), &cfg()).unwrap();
        prop_assert!(r <= GENERATOR, "residual {}", r);
    }

    #[test]
    fn psi_derivatives_are_positive_and_increasing(
        nu in -3.0f64..-0.2,
        x in -5.0f64..5.0,
        k in 0u32..3,
    ) {
        let p = OUParams::default();
        let o = Order::new(nu).unwrap();
        let a = psi(k, x, &p, o, &cfg()).unwrap();
        let b = psi(k, x + 0.1, &p, o, &cfg()).unwrap();
        prop_assert_eq!(a.value.sign(), 1);
        prop_assert!(b.log_mag() > a.log_mag());
    }

    #[test]
    fn ratio_within_bounds_and_decreasing(nu in -5.0f64..-0.1, x in -30.0f64..29.0) {
        let o = Order::new(nu).unwrap();
        let (lo, hi) = bounds(o);
        let here = ratio_hermite(o, x, &cfg()).unwrap();
        let next = ratio_hermite(o, x + 1.0, &cfg()).unwrap();
        prop_assert!(here.r > lo && here.r < hi, "R = {}", here.r);
        prop_assert!(next.r < here.r);
        let m = turan_margin(o, x, &cfg()).unwrap();
        prop_assert!(m > 0.0 && m < 1.0 - nu / (nu - 1.0));
    }

    #[test]
    fn cylinder_ratio_is_rescaled_hermite_ratio(nu in -4.0f64..-0.2, x in -30.0f64..30.0) {
        let o = Order::new(nu).unwrap();
        let d = ratio_cylinder(o, x, &cfg()).unwrap().r;
        let h = ratio_hermite(o, x / std::f64::consts::SQRT_2, &cfg()).unwrap().r;
        prop_assert!(((d - h) / h).abs() <= 1e-10);
    }

    #[test]
    fn capital_psi_matches_scaled_ratio(
        nu in -4.0f64..-0.2,
        x in -10.0f64..10.0,
        mu in -1.0f64..1.0,
        sigma in 0.5f64..2.0,
    ) {
        let o = Order::new(nu).unwrap();
        let p = OUParams::new(mu, sigma).unwrap();
        let psi_v = capital_psi(x, &p, o, &cfg()).unwrap();
        let r = ratio_hermite(o, (mu - x) / sigma, &cfg()).unwrap().r;
        prop_assert!((psi_v * (nu - 1.0) / nu - r).abs() / r <= STEP2_IDENTITY);
        prop_assert!(psi_v > nu / (nu - 1.0) && psi_v < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn laplace_estimates_bounded_and_ordered(seed in any::<u64>(), x in -2.0f64..0.5) {
        let cfg = SimConfig { n_paths: 200, seed, ..SimConfig::default() };
        let s = sample_hitting_times(x, 1.0, &OUParams::default(), &cfg).unwrap();
        let mut prev = 1.0;
        for lambda in [0.0, -0.5, -1.0, -3.0] {
            let e = s.laplace(lambda).unwrap();
            prop_assert!(e.mean > 0.0 && e.mean <= 1.0);
            prop_assert!(e.mean <= prev);
            prev = e.mean;
        }
        prop_assert_eq!(s.n_hit() + s.n_censored(), 200);
    }
}
