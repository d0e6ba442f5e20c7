mod common;

use common::schemes;
use etpa_core::config::builtin;
use etpa_core::{bound, simulate, CrossSection, Scheme};

#[test]
fn difference_at_bound_matches_threshold() {
    for name in ["geneva", "this_work"] {
        let c = builtin(name).unwrap();
        for scheme in schemes(0.5) {
            let b = bound(&c, scheme).unwrap();
            let r = simulate(&c, scheme, b, 100_000, 99).unwrap();
            let z = (r.mean_diff - r.analytic_threshold) / r.diff_std_error;
            assert!(z.abs() <= 3.0, "{name} {scheme}: z = {z}");
        }
    }
}

#[test]
fn sample_means_converge() {
    let c = builtin("oregon_sq").unwrap();
    for (scheme, gm) in [(Scheme::SeparationDeterministic, 0.0), (Scheme::Attenuation { eta: 0.3 }, 500.0)] {
        let r = simulate(&c, scheme, CrossSection::from_gm(gm), 20_000, 4).unwrap();
        let n = r.trials as f64;
        assert!((r.mean_s - r.analytic_s).abs() <= 5.0 * (r.analytic_s / n).sqrt());
        assert!((r.mean_b - r.analytic_b).abs() <= 5.0 * (r.analytic_b / n).sqrt());
    }
}

#[test]
fn small_count_regime() {
    let mut c = builtin("boulder_fs").unwrap();
    c.integration_time = 1e-2;
    let r = simulate(&c, Scheme::SeparationDeterministic, CrossSection::ZERO, 50_000, 8).unwrap();
    assert!(r.analytic_s < 30.0);
    let n = r.trials as f64;
    assert!((r.mean_s - r.analytic_s).abs() <= 5.0 * (r.analytic_s / n).sqrt());
    assert!(r.detect_fraction > 0.0 && r.detect_fraction < 1.0);
}

#[test]
fn same_seed_same_report() {
    let c = builtin("this_work").unwrap();
    let a = simulate(&c, Scheme::SeparationProbabilistic, CrossSection::from_gm(2.0), 3_000, 42).unwrap();
    let b = simulate(&c, Scheme::SeparationProbabilistic, CrossSection::from_gm(2.0), 3_000, 42).unwrap();
    let other = simulate(&c, Scheme::SeparationProbabilistic, CrossSection::from_gm(2.0), 3_000, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean_s, other.mean_s);
}
