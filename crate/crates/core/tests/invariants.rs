use proptest::prelude::*;

use susy_pep::bound::{self, analytic_pt_state, bound_spectrum, solve_bound_state};
use susy_pep::fitting::{fit_parameters, PresetParameters, SystemPreset, DEFAULT_BETA_BRACKET};
use susy_pep::observables::{
    cross_section_ratio, energy_sweep, rms_radius, zero_range_strength, CoordinateFactor, Description,
    DEFAULT_MATCHING_RADIUS,
};
use susy_pep::pipeline::Chain;
use susy_pep::poschl_teller::analytic_levels;
use susy_pep::{BoundState, ChannelConstants, Potential, RadialGrid};

fn deuteron_well(a: f64, b: f64) -> (Potential, ChannelConstants) {
    let ch = ChannelConstants::deuteron();
    (Potential::sech_squared(a, b, &ch).unwrap(), ch)
}

/// Five-point derivative, independent of the solver's own `du`.
fn five_point(u: &[f64], h: f64, k: usize) -> f64 {
    (u[k - 2] - 8.0 * u[k - 1] + 8.0 * u[k + 1] - u[k + 2]) / (12.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ground_state_is_annihilated_by_its_superpotential(a in 1.5f64..5.0, b in 0.6f64..2.0) {
        let (v, ch) = deuteron_well(a, b);
        let grid = RadialGrid::default();
        let s = solve_bound_state(&v, &ch, &grid, 0, bound::default_bracket(&v, &grid)).unwrap();
        let max_u = s.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let stop = grid.len() * 9 / 10;
        for k in 2..stop {
            // W / (hbar / sqrt(2 mu)) for the nodeless sech^2 state
            let x = b * grid.r(k);
            let w = b * ((a - 1.0) * x.tanh() - 1.0 / (x.sinh() * x.cosh()));
            let residual = five_point(&s.u, grid.step(), k) + w * s.u[k];
            prop_assert!(residual.abs() < 1e-5 * b * max_u, "r = {}: {residual}", grid.r(k));
        }
    }

    #[test]
    fn states_are_normalized_with_the_right_decay(a in 3.2f64..6.0, b in 0.6f64..2.0) {
        let (v, ch) = deuteron_well(a, b);
        let grid = RadialGrid::default();
        for n in 0..2 {
            let s = solve_bound_state(&v, &ch, &grid, n, bound::default_bracket(&v, &grid)).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-8);
            prop_assert_eq!(s.nodes, n);
            prop_assert!((s.kappa - (-s.energy / ch.hbar2_over_2mu).sqrt()).abs() < 1e-12);
            // u > 0 in the tail, decaying at kappa
            prop_assert!(*s.u.last().unwrap() > 0.0);
            let r_far = 0.6 * grid.r_max();
            if s.kappa * r_far < 25.0 {
                prop_assert!((s.decay_rate_at(r_far) - s.kappa).abs() < 1e-4 * s.kappa);
            }
        }
    }

    #[test]
    fn fit_round_trip(a in 3.1f64..5.0, b in 0.8f64..3.0) {
        let ch = ChannelConstants::deuteron();
        let grid = RadialGrid::default();
        let state = analytic_pt_state(a, b, &ch, &grid, 1).unwrap();
        let mut preset = SystemPreset::deuteron();
        preset.parameters = PresetParameters::Fitted {
            target_energy: state.energy,
            target_rms: rms_radius(&state, CoordinateFactor::Quarter),
        };
        let fit = fit_parameters(&preset, DEFAULT_BETA_BRACKET).unwrap();
        prop_assert!(((fit.a_tilde - a) / a).abs() < 1e-6, "{} vs {a}", fit.a_tilde);
        prop_assert!(((fit.beta - b) / b).abs() < 1e-6, "{} vs {b}", fit.beta);
    }

    #[test]
    fn ratio_ignores_sign_conventions(a in 3.2f64..4.5, b in 1.0f64..2.0) {
        let preset = SystemPreset::deuteron();
        let chain = Chain::build(&preset, a, b, None).unwrap();
        let t = chain.transfer_strengths();
        let flip = |s: &BoundState| BoundState { u: s.u.iter().map(|x| -x).collect(), ..s.clone() };
        let deep = zero_range_strength(&chain.source, &flip(&chain.deep_state), Description::Deep);
        let pep = zero_range_strength(chain.pep(), &flip(&chain.pep_state), Description::Pep);
        prop_assert_eq!(deep.d0, -t.deep.d0);
        prop_assert_eq!(
            cross_section_ratio(&deep, &pep).unwrap(),
            cross_section_ratio(&t.deep, &t.pep).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn partners_are_phase_equivalent(a in 3.3f64..4.8, b in 0.9f64..1.8) {
        let mut preset = SystemPreset::deuteron();
        preset.physical_node_count = 1;
        let chain = Chain::build(&preset, a, b, None).unwrap();
        let energies = energy_sweep(0.25, 20.0, 0.25);
        let cmp = chain.phase_shifts(&energies, DEFAULT_MATCHING_RADIUS).unwrap().comparison().unwrap();
        prop_assert!(cmp.max_difference_pep_rad < 0.01, "{}", cmp.max_difference_pep_rad);
        prop_assert!(cmp.max_difference_intermediate_rad > 0.01);
    }
}

#[test]
fn halving_the_step_moves_levels_by_less_than_a_microvolt() {
    // tested from 0.005 fm: on the 0.01 fm default the 481 MeV deuteron
    // level still moves by 2.5e-5 MeV
    for (a, b, ch) in [
        (3.146, 1.587, ChannelConstants::deuteron()),
        (3.2133, 0.6962, ChannelConstants::be11()),
        (5.945, 0.535, ChannelConstants::alpha_alpha()),
    ] {
        let v = Potential::sech_squared(a, b, &ch).unwrap();
        let coarse = RadialGrid::new(0.005, 35.0).unwrap();
        let fine = coarse.halved();
        let e_coarse = bound_spectrum(&v, &ch, &coarse).unwrap();
        let e_fine = bound_spectrum(&v, &ch, &fine).unwrap();
        assert_eq!(e_coarse.len(), e_fine.len());
        for (x, y) in e_coarse.iter().zip(&e_fine) {
            assert!((x.energy - y.energy).abs() < 1e-6, "A = {a}: {} vs {}", x.energy, y.energy);
        }
    }
}

#[test]
fn transfer_strength_converges_under_step_halving() {
    let preset = SystemPreset::deuteron();
    let coarse = Chain::build(&preset, 3.146, 1.587, None).unwrap().transfer_strengths();
    let fine_preset = preset.clone().with_grid(preset.grid.halved());
    let fine = Chain::build(&fine_preset, 3.146, 1.587, None).unwrap().transfer_strengths();
    for (c, f) in [(coarse.deep, fine.deep), (coarse.pep, fine.pep)] {
        assert!(((c.d0 - f.d0) / f.d0).abs() < 1e-3, "{} vs {}", c.d0, f.d0);
    }
}

#[test]
fn phase_curves_are_continuous_and_fall_off() {
    let chain = Chain::build(&SystemPreset::deuteron(), 3.146, 1.587, None).unwrap();
    let energies = energy_sweep(0.1, 20.0, 0.1);
    let phases = chain.phase_shifts(&energies, DEFAULT_MATCHING_RADIUS).unwrap();
    for curve in [&phases.deep, &phases.intermediate, &phases.pep] {
        for w in curve.deltas.windows(2) {
            assert!((w[1] - w[0]).abs() < std::f64::consts::FRAC_PI_2, "{}", curve.label);
        }
        assert!(curve.deltas.last() < curve.deltas.first(), "{}", curve.label);
    }
}

#[test]
fn radii_stay_together_within_the_phase_equivalent_family() {
    let d = Chain::build(&SystemPreset::deuteron(), 3.146, 1.587, None).unwrap().rms_radii();
    assert!((d.pep - d.deep).abs() / d.deep < 2e-3, "{d:?}");
    let b = Chain::from_preset(&SystemPreset::be11()).unwrap().rms_radii();
    assert!((b.pep - b.deep).abs() / b.deep < 0.02, "{b:?}");
    assert!((b.intermediate - b.deep).abs() / b.deep > 0.05, "{b:?}");
}

#[test]
fn numerical_levels_follow_the_closed_form() {
    let ch = ChannelConstants::alpha_alpha();
    let grid = RadialGrid::default();
    let v = Potential::sech_squared(5.945, 0.535, &ch).unwrap();
    let levels = bound_spectrum(&v, &ch, &grid).unwrap();
    assert_eq!(levels.len(), 3);
    for s in &levels {
        let exact = analytic_levels(5.945, 0.535, &ch, s.nodes).unwrap();
        assert!(((s.energy - exact) / exact).abs() < 1e-4);
    }
}
