mod common;

use proptest::prelude::*;

use common::{config_from_unit, eta_from_unit, rel, schemes, DRAWS};
use etpa_core::gating::{gated_efficiency_analytic, optimize_gate, PulseShape, DEFAULT_LIFETIME};
use etpa_core::ladder::{apply_step, baseline_scheme, LadderState};
use etpa_core::rates::{coefficients, per_pulse_rates, quantum_advantage};
use etpa_core::schemes::counts_pair;
use etpa_core::{
    bound, bound_probabilistic, bound_separation, bound_separation_highflux, parse_config,
    solve_bound_numeric, CrossSection, ExperimentConfig, LadderOptions, PumpMode, Role, Scheme, SchemeSpec,
    StepKind,
};

fn config() -> impl Strategy<Value = ExperimentConfig> {
    prop::array::uniform16(0.0..=1.0f64).prop_map(|u: [f64; DRAWS]| config_from_unit(&u))
}

fn config_and_eta() -> impl Strategy<Value = (ExperimentConfig, f64)> {
    (config(), 0.0..=1.0f64).prop_map(|(c, u)| (c, eta_from_unit(u)))
}

fn sigma() -> impl Strategy<Value = CrossSection> {
    (-4.0..8.0f64).prop_map(|e| CrossSection::from_gm(10f64.powf(e)))
}

proptest! {
    #[test]
    fn config_text_round_trip(c in config()) {
        let parsed = parse_config(&c.to_config_string()).unwrap();
        prop_assert_eq!(parsed, c);
    }

    #[test]
    fn rate_scaling_in_pairs(c in config(), factor in 1e-3..1e3f64) {
        let s = CrossSection::from_gm(100.0);
        let mut scaled = c.clone();
        scaled.pairs_per_pulse *= factor;
        let (a, b) = (per_pulse_rates(&c, s), per_pulse_rates(&scaled, s));
        prop_assert!(rel(b.ctpa, a.ctpa * factor * factor) <= 1e-12);
        prop_assert!(rel(b.etpa, a.etpa * factor) <= 1e-12);
        if a.hba > 0.0 {
            prop_assert!(rel(b.hba, a.hba * factor) <= 1e-12);
        }
    }

    #[test]
    fn coefficient_ratio_is_quantum_advantage(c in config(), s in sigma()) {
        let k = coefficients(&c, s);
        prop_assert!(rel(k.epsilon_e / k.epsilon_c, quantum_advantage(&c)) <= 1e-12);
    }

    #[test]
    fn arm_losses_are_symmetric(c in config(), s in sigma()) {
        let mut swapped = c.clone();
        std::mem::swap(&mut swapped.eta_s, &mut swapped.eta_i);
        let (a, b) = (per_pulse_rates(&c, s), per_pulse_rates(&swapped, s));
        prop_assert!(rel(a.ctpa, b.ctpa) <= 1e-15);
        prop_assert!(rel(a.etpa, b.etpa) <= 1e-15);
        prop_assert!(a.hba == b.hba || rel(a.hba, b.hba) <= 1e-15);
    }

    #[test]
    fn count_components_close((c, eta) in config_and_eta(), s in sigma()) {
        for scheme in schemes(eta) {
            for role in [Role::Signal, Role::Background] {
                let n = etpa_core::expected_counts(&c, SchemeSpec { scheme, role }, s).unwrap();
                prop_assert_eq!(n.etpa + n.ctpa + n.hba + n.dark, n.total);
            }
        }
    }

    #[test]
    fn separation_difference_is_etpa(c in config(), s in sigma()) {
        let (sig, bg) = counts_pair(&c, Scheme::SeparationDeterministic, s).unwrap();
        prop_assert_eq!(bg.etpa, 0.0);
        prop_assert_eq!((sig.ctpa, sig.hba, sig.dark), (bg.ctpa, bg.hba, bg.dark));
    }

    #[test]
    fn attenuation_background_scales_etpa((c, eta) in config_and_eta(), s in sigma()) {
        let (sig, bg) = counts_pair(&c, Scheme::Attenuation { eta }, s).unwrap();
        prop_assert!((bg.etpa - eta * sig.etpa).abs() <= 1e-15 * sig.etpa);
        prop_assert_eq!((sig.ctpa, sig.hba, sig.dark), (bg.ctpa, bg.hba, bg.dark));
    }

    #[test]
    fn counts_nondecreasing((c, eta) in config_and_eta(), s in sigma(), f in 1.0..100.0f64) {
        let mut more_pairs = c.clone();
        more_pairs.pairs_per_pulse *= f;
        let mut longer = c.clone();
        longer.integration_time *= f;
        let bigger = CrossSection::from_gm(s.gm() * f);
        for scheme in schemes(eta) {
            let base = counts_pair(&c, scheme, s).unwrap();
            for (cfg, sig) in [(&more_pairs, s), (&longer, s), (&c, bigger)] {
                let next = counts_pair(cfg, scheme, sig).unwrap();
                for (a, b) in [(base.0, next.0), (base.1, next.1)] {
                    prop_assert!(b.etpa >= a.etpa && b.ctpa >= a.ctpa && b.hba >= a.hba && b.dark >= a.dark);
                }
            }
        }
    }

    #[test]
    fn numeric_solver_matches_closed_forms((c, eta) in config_and_eta()) {
        for scheme in schemes(eta) {
            let closed = bound(&c, scheme).unwrap().gm();
            let numeric = solve_bound_numeric(&c, scheme).unwrap().gm();
            prop_assert!(rel(numeric, closed) <= 1e-6, "{scheme}: {numeric} vs {closed}");
        }
    }

    #[test]
    fn bounds_decrease_with_integration_time((c, eta) in config_and_eta()) {
        for scheme in schemes(eta) {
            let mut last = f64::INFINITY;
            for k in 0..8 {
                let mut cfg = c.clone();
                cfg.integration_time *= 10f64.powi(k);
                let b = bound(&cfg, scheme).unwrap().gm();
                prop_assert!(b < last);
                last = b;
            }
        }
    }

    #[test]
    fn bounds_decrease_with_pairs_towards_limit((c, eta) in config_and_eta()) {
        for scheme in schemes(eta) {
            let mut last = f64::INFINITY;
            for k in 0..10 {
                let mut cfg = c.clone();
                cfg.pairs_per_pulse = 10f64.powi(2 * k - 4);
                let b = bound(&cfg, scheme).unwrap().gm();
                prop_assert!(b < last, "{scheme} at N_P = {}", cfg.pairs_per_pulse);
                last = b;
            }
        }
        let mut flood = c.clone();
        flood.pairs_per_pulse = 1e30;
        flood.dark_count_rate = 0.0;
        flood.hba_cross_section = 0.0;
        let limit = bound_separation_highflux(&flood).gm();
        prop_assert!(rel(bound_separation(&flood).gm(), limit) <= 1e-6);
        prop_assert!(rel(bound_probabilistic(&flood).gm(), 4.0 * limit) <= 1e-6);
    }

    #[test]
    fn bounds_nondecreasing_in_dark_counts((c, eta) in config_and_eta(), f in 1.0..1e6f64) {
        let mut noisy = c.clone();
        noisy.dark_count_rate = (c.dark_count_rate + 1.0) * f;
        for scheme in schemes(eta) {
            prop_assert!(bound(&noisy, scheme).unwrap() >= bound(&c, scheme).unwrap());
        }
    }

    #[test]
    fn probabilistic_never_beats_separation(c in config()) {
        prop_assert!(bound_probabilistic(&c) >= bound_separation(&c));
    }

    #[test]
    fn analytic_gate_efficiency_monotone(
        eta_d in 0.01..=1.0f64,
        f_rep in 1e5..1e9f64,
        tau in 1e-10..1e-7f64,
        g in 0.01..0.99f64,
    ) {
        let a = gated_efficiency_analytic(eta_d, g, f_rep, tau);
        let b = gated_efficiency_analytic(eta_d, (g + 0.01).min(1.0), f_rep, tau);
        prop_assert!(a <= b && b <= eta_d * (1.0 + 1e-15));
        prop_assert!(a > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gate_optimization_never_hurts(c in config(), tau in 1e-10..1e-7f64) {
        prop_assume!(c.pump_mode == PumpMode::Pulsed);
        let opt = optimize_gate(&c, tau, PulseShape::Delta, Scheme::SeparationDeterministic).unwrap();
        prop_assert!(opt.bound <= opt.ungated_bound);
        prop_assert!(opt.width > 0.0 && opt.width <= 1.0);
    }

    #[test]
    fn ladder_steps_do_not_hurt(c in config(), f in 0.05..1.0f64) {
        let mut c = c;
        c.fourier_limited_entanglement_time = Some(c.entanglement_time * f);
        let opts = LadderOptions { default_lifetime: DEFAULT_LIFETIME };
        let start = LadderState { scheme: baseline_scheme(&c), config: c };
        let published = bound(&start.config, start.scheme).unwrap();
        let (best, step) = apply_step(&start, StepKind::BestMethod, &opts).unwrap();
        prop_assert!(step.resulting_bound <= published);
        for kind in [StepKind::TimeGating, StepKind::ZeroDark] {
            let before = bound(&best.config, best.scheme).unwrap();
            let (_, step) = apply_step(&best, kind, &opts).unwrap();
            prop_assert!(step.resulting_bound <= before, "{kind}");
        }
    }
}
