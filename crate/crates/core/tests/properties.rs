//! Randomised invariants of the mode model and Gaussian toolkit.

use std::f64::consts::PI;

use proptest::prelude::*;

use mirrorcut::experiments::{pair_negativity, second_moment_particles, InitialState, SparseInput};
use mirrorcut::experiments::entanglement_distribution;
use mirrorcut::{CavityGeometry, GaussianState, LogBase, ModePair, Side, SymplecticTransform, TruncationConfig};

const CUTOFF: usize = 12;

fn midpoint() -> (CavityGeometry, TruncationConfig, SymplecticTransform) {
    let g = CavityGeometry::midpoint(2.0).unwrap();
    let t = TruncationConfig::new(CUTOFF).unwrap();
    let s = SymplecticTransform::build(&g, t).unwrap();
    (g, t, s)
}

fn fraction() -> impl Strategy<Value = (u64, u64)> {
    (2u64..50).prop_flat_map(|den| (1..den, Just(den)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn side_lengths_sum_to_cavity((num, den) in fraction(), length in 0.1f64..10.0) {
        let g = CavityGeometry::new(length, num, den).unwrap();
        let total = g.side_length(Side::Left) + g.side_length(Side::Right);
        prop_assert!((total - length).abs() <= 1e-12 * length);
        prop_assert!(g.mirror_position() > 0.0 && g.mirror_position() < length);
    }

    #[test]
    fn log_bases_agree(s in 0.0f64..1.5, theta in 0.0f64..(2.0 * PI), n in 1usize..4, m in 1usize..4) {
        let (g, t, _) = midpoint();
        let input = SparseInput::TwoMode { k: 1, k2: 2, cov: mirrorcut::gaussian::two_mode_squeezed_cov(s, theta) };
        let e = pair_negativity(&g, t, &input, n, m, LogBase::E).unwrap().value;
        for base in [LogBase::Two, LogBase::Ten] {
            let other = pair_negativity(&g, t, &input, n, m, base).unwrap().value;
            prop_assert!((other * base.ln() - e).abs() <= 1e-12 * e.max(1.0));
            prop_assert_eq!(other > 0.0, e > 0.0);
        }
    }

    #[test]
    fn coherent_displacement_leaves_second_moments(k in 1usize..=2 * CUTOFF, rho in 0.0f64..3.0, phi in 0.0f64..(2.0 * PI)) {
        let (_, t, s) = midpoint();
        let vac = GaussianState::vacuum(t.input_modes()).unwrap();
        let plain = vac.apply_transform(&s).unwrap();
        let displaced = vac.set_coherent(k, rho, phi).unwrap().apply_transform(&s).unwrap();
        prop_assert_eq!(plain.cov(), displaced.cov());
        let pair = ModePair::new(1, CUTOFF + 1).unwrap();
        prop_assert_eq!(
            plain.reduce(pair).unwrap().log_negativity(LogBase::E).unwrap(),
            displaced.reduce(pair).unwrap().log_negativity(LogBase::E).unwrap()
        );
    }

    #[test]
    fn particle_number_survives_reduction(nbar in 0.0f64..3.0, s in 0.0f64..1.2, theta in 0.0f64..PI, n in 1usize..=CUTOFF) {
        let (g, t, tr) = midpoint();
        let input = GaussianState::vacuum(t.input_modes()).unwrap().set_squeezed_thermal(1, nbar, s, theta).unwrap();
        let out = input.apply_transform(&tr).unwrap();
        for side in Side::BOTH {
            let mode = t.output_mode(side, n).unwrap();
            let full = out.mean_particle_number(mode).unwrap();
            let reduced = out.reduce_modes(&[mode]).unwrap().mean_particle_number(1).unwrap();
            prop_assert!((full - reduced).abs() <= 1e-14 * full.abs().max(1.0));
            let sparse = SparseInput::SingleMode { k: 1, cov: mirrorcut::gaussian::squeezed_thermal_cov(nbar, s, theta) };
            let closed = second_moment_particles(&g, t, &sparse, side, n).unwrap();
            prop_assert!((full - closed).abs() <= 1e-11 * full.abs().max(1e-3));
        }
    }

    #[test]
    fn midpoint_sides_mirror(nbar in 0.0f64..3.0, s in 0.0f64..1.2, theta in 0.0f64..PI, n in 1usize..=CUTOFF) {
        let (g, t, _) = midpoint();
        let sparse = SparseInput::SingleMode { k: 1, cov: mirrorcut::gaussian::squeezed_thermal_cov(nbar, s, theta) };
        let left = second_moment_particles(&g, t, &sparse, Side::Left, n).unwrap();
        let right = second_moment_particles(&g, t, &sparse, Side::Right, n).unwrap();
        prop_assert!((left - right).abs() <= 1e-12 * left.abs().max(1e-3));
    }

    #[test]
    fn stripping_never_adds_entanglement(s in 0.0f64..1.5, theta in 0.0f64..(2.0 * PI)) {
        let (g, t, _) = midpoint();
        let tms = entanglement_distribution(&g, t, LogBase::E, InitialState::TwoModeSqueezed { s, theta }, 2).unwrap();
        let stripped = entanglement_distribution(&g, t, LogBase::E, InitialState::StrippedTwoModeSqueezed { s, theta }, 2).unwrap();
        prop_assert!(stripped.get(1, 1) <= tms.get(1, 1) + 1e-12);
    }

    #[test]
    fn json_round_trip(nbar in 0.0f64..3.0, s in 0.0f64..1.2, theta in 0.0f64..PI, rho in 0.0f64..2.0, phi in 0.0f64..PI) {
        let state = GaussianState::vacuum(3).unwrap()
            .set_squeezed_thermal(2, nbar, s, theta).unwrap()
            .set_two_mode_squeezed(1, 3, s, theta).unwrap()
            .set_coherent(2, rho, phi).unwrap();
        let back = GaussianState::from_json(&state.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, state);
    }
}
