//! Randomized invariants over the damping/frequency domain.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use wavegain::cli::fmt_num;
use wavegain::freq_response::{l2_stats, polar_params, profile_at, q_gain_at, sup_gain_at};
use wavegain::gain_bounds::{mode_constants, upper_l2};
use wavegain::modal::{modal_step, modal_transfer, DisturbanceSpec, ModalState};
use wavegain::{DampingParams, INV_SQRT_3};

fn damping() -> impl Strategy<Value = DampingParams> {
    (-3.0f64..0.5, 0.0f64..4.0).prop_map(|(ls, mu)| DampingParams::new(10f64.powf(ls), mu).unwrap())
}

fn omega() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn root_solves_the_characteristic_equation(p in damping(), w in omega()) {
        let pt = polar_params(p, w).unwrap();
        let l = pt.root();
        prop_assert!(pt.a > 0.0);
        let lhs = l * l * Complex64::new(1.0, p.sigma() * w);
        let rhs = Complex64::new(-w * w, p.mu() * w);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn profile_meets_boundary_data(p in damping(), w in omega()) {
        let pt = polar_params(p, w).unwrap();
        let (h, g) = profile_at(&pt, 0.0).unwrap();
        prop_assert!((h - 1.0).abs() < 1e-14 && g.abs() < 1e-14);
        let (h, g) = profile_at(&pt, 1.0).unwrap();
        prop_assert!(h.abs() < 1e-15 && g.abs() < 1e-15);
    }

    #[test]
    fn l2_gain_never_exceeds_sup_gain(p in damping(), w in omega()) {
        let a = sup_gain_at(p, w).unwrap();
        let q = q_gain_at(p, w).unwrap();
        prop_assert!(q <= a * (1.0 + 1e-12));
        let st = l2_stats(&polar_params(p, w).unwrap());
        prop_assert!(st.q1.hypot(st.q2) <= st.p * (1.0 + 1e-12));
    }

    #[test]
    fn amplification_is_at_least_one(p in damping(), n in 1u32..2000) {
        let m = mode_constants(p, n).unwrap();
        prop_assert!(m.amplification >= 1.0);
        prop_assert!(m.decay_rate() > 0.0);
        if p.mu_sigma() >= 1.0 {
            prop_assert_eq!(m.amplification, 1.0);
        }
    }

    #[test]
    fn l2_upper_bound_is_at_least_the_static_gain(p in damping()) {
        prop_assume!(p.sigma() > 0.01);
        prop_assert!(upper_l2(p) >= INV_SQRT_3);
    }

    #[test]
    fn modal_steps_compose(p in damping(), w in omega(), n in 1u32..40, dt in 0.01f64..1.0) {
        let d = DisturbanceSpec::sin(w);
        let s0 = ModalState::new(p, n, 0.3, 0.2, -0.1, d.value(0.3));
        let whole = modal_step(s0, p, &d, 2.0 * dt).unwrap();
        let half = modal_step(modal_step(s0, p, &d, dt).unwrap(), p, &d, dt).unwrap();
        let scale = 1.0 + whole.y.abs() + whole.y_dot.abs();
        prop_assert!((whole.y - half.y).abs() < 1e-10 * scale);
        prop_assert!((whole.y_dot - half.y_dot).abs() < 1e-10 * scale * (n as f64 * PI));
    }

    #[test]
    fn transfer_tends_to_static_coefficient(p in damping(), n in 1u32..100) {
        let h = modal_transfer(p, n, 0.0);
        prop_assert!((h.re - 2f64.sqrt() / (n as f64 * PI)).abs() < 1e-15);
        prop_assert_eq!(h.im, 0.0);
    }

    #[test]
    fn numbers_round_trip(x in proptest::num::f64::NORMAL) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}
