use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use qtraj_core::probability::{conserved_rate, rho_alt_direct, rho_alt_trajectory, BornProfile};
use qtraj_core::trajectory::{cassinian_orbit, integrate, IntegrateOptions};
use qtraj_core::wavefunction::{eval_psi, node_proximity, velocity};
use qtraj_core::QuantumState;

fn off_node(n: u32, z: Complex64) -> bool {
    node_proximity(&QuantumState::oscillator(n), z) > 1e-2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn velocity_matches_difference_quotient(n in 0u32..=6, re in -3.0f64..3.0, im in -2.0f64..2.0) {
        let z = Complex64::new(re, im);
        prop_assume!(off_node(n, z));
        let s = QuantumState::oscillator(n);
        let h = 1e-6;
        let dpsi = (eval_psi(&s, z + h, 0.0) - eval_psi(&s, z - h, 0.0)) / (2.0 * h);
        let expected = -Complex64::i() * dpsi / eval_psi(&s, z, 0.0);
        let v = velocity(&s, z, 0.0).unwrap();
        prop_assert!((v - expected).norm() <= 1e-6 * v.norm().max(1.0), "{v} vs {expected}");
    }

    #[test]
    fn conjugation_symmetry(n in 0u32..=6, re in -3.0f64..3.0, im in -2.0f64..2.0) {
        let z = Complex64::new(re, im);
        prop_assume!(off_node(n, z));
        let s = QuantumState::oscillator(n);
        let v = velocity(&s, z, 0.0).unwrap();
        let w = velocity(&s, z.conj(), 0.0).unwrap();
        prop_assert!((w + v.conj()).norm() <= 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn real_axis_velocity_is_imaginary(n in 0u32..=6, x in -4.0f64..4.0) {
        let z = Complex64::new(x, 0.0);
        prop_assume!(off_node(n, z));
        let v = velocity(&QuantumState::oscillator(n), z, 0.0).unwrap();
        prop_assert!(v.re.abs() <= 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn energy_rate_identity(n in 0u32..=4, re in -3.0f64..3.0, im in -2.0f64..2.0) {
        let z = Complex64::new(re, im);
        prop_assume!(off_node(n, z));
        let s = QuantumState::oscillator(n);
        let rate = conserved_rate(&s, 0.0, z).unwrap();
        let div = qtraj_core::continuity::divergence(&s, z).unwrap();
        prop_assert!((rate + div).abs() <= 1e-6 * rate.abs().max(div.abs()).max(1.0));
    }

    #[test]
    fn packet_center_moves_with_group_velocity(x0 in -2.0f64..2.0, k0 in -3.0f64..3.0, sigma in 0.3f64..2.0, t in 0.0f64..3.0) {
        let s = QuantumState::gaussian_packet(x0, k0, sigma).unwrap();
        let v = velocity(&s, Complex64::new(x0 + k0 * t, 0.0), t).unwrap();
        prop_assert!((v - Complex64::new(k0, 0.0)).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn forward_then_backward_returns(n in 0u32..=2, re in -2.0f64..2.0, im in 0.3f64..1.5, t_end in 0.2f64..2.0) {
        let z = Complex64::new(re, im);
        prop_assume!(off_node(n, z));
        let s = QuantumState::oscillator(n);
        let fwd = integrate(&s, z, 0.0, &IntegrateOptions::until(t_end, 1e-10));
        prop_assume!(fwd.as_ref().map(|t| !t.ends_at_pole).unwrap_or(false));
        let fwd = fwd.unwrap();
        let back = integrate(&s, fwd.end().x, t_end, &IntegrateOptions::until(0.0, 1e-10)).unwrap();
        prop_assert!((back.end().x - z).norm() < 1e-5, "returned to {}", back.end().x);
    }

    #[test]
    fn packet_trajectory_tracks_centroid(x0 in -2.0f64..2.0, k0 in -2.0f64..2.0, sigma in 0.5f64..1.5) {
        let s = QuantumState::gaussian_packet(x0, k0, sigma).unwrap();
        let traj = integrate(&s, Complex64::new(x0, 0.0), 0.0, &IntegrateOptions::until(2.0, 1e-10)).unwrap();
        for sample in &traj.samples {
            prop_assert!((sample.x - Complex64::new(x0 + k0 * sample.t, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn conserved_density_follows_inverse_speed_squared(b in 1.2f64..4.0) {
        let traj = cassinian_orbit(b, 1e-10).unwrap();
        let anchor = qtraj_core::probability::Anchor { t: traj.start().t, rho: 1.0 };
        let rho = qtraj_core::probability::rho_conserved(&traj, anchor).unwrap();
        let c = traj.start().v.norm_sqr();
        for (s, r) in traj.samples.iter().zip(&rho) {
            let expected = c / s.v.norm_sqr();
            prop_assert!((r - expected).abs() <= 1e-6 * expected);
        }
    }

    #[test]
    fn alternative_density_is_continued_psi_squared(b in 0.05f64..0.95, theta in 0.15f64..(PI - 0.15), flip in any::<bool>()) {
        let s = QuantumState::oscillator(1);
        let mut z = (1.0 - Complex64::from_polar(b, theta)).sqrt();
        if flip {
            z = -z.conj();
        }
        let born = BornProfile::reference(&s).unwrap();
        let a = rho_alt_trajectory(&s, z, &born, 1e-11).unwrap();
        let d = rho_alt_direct(&s, z).unwrap();
        prop_assert!((a - d).abs() <= 1e-6 * d);
    }
}

#[test]
fn ovals_with_large_invariant_have_double_period() {
    for b in [1.5, 3.0, 8.0] {
        let traj = cassinian_orbit(b, 1e-10).unwrap();
        assert!((traj.period.unwrap() - TAU).abs() < 1e-6, "b={b}: {:?}", traj.period);
        let half = traj.position_at(PI).unwrap();
        assert!((half + traj.start().x).norm() < 1e-6, "X(t+π) = -X(t)");
    }
}
