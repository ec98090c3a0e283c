use proptest::prelude::*;
use twoslit_core::entanglement::{overlap_theta, schmidt_closed_form, source_normalization};
use twoslit_core::joint::purity;
use twoslit_core::params::SuperpositionCoeffs;
use twoslit_core::patterns::{default_pattern_grid, pattern};
use twoslit_core::{load_config, normalize, paper_defaults, StateKind};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn schmidt_between_one_and_two(a in 0.0f64..=1.0, theta in 0.0f64..=1.0) {
        let b = (1.0 - a * a).sqrt();
        let s = schmidt_closed_form(a, b, theta).unwrap();
        prop_assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&s), "S = {s}");
    }

    #[test]
    fn schmidt_symmetric_in_a_and_b(a in 0.0f64..=1.0, theta in 0.0f64..=1.0) {
        let b = (1.0 - a * a).sqrt();
        let s1 = schmidt_closed_form(a, b, theta).unwrap();
        let s2 = schmidt_closed_form(b, a, theta).unwrap();
        prop_assert!((s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn theta_is_a_symmetric_overlap(s1 in 0.1f64..20.0, s2 in 0.1f64..20.0) {
        let t = overlap_theta(s1, s2);
        prop_assert!(t > 0.0 && t <= 1.0 + 1e-15);
        prop_assert!((t - overlap_theta(s2, s1)).abs() < 1e-15);
    }

    #[test]
    fn purity_in_unit_interval(a in 0.0f64..=1.0) {
        let cfg = paper_defaults().with_real_a(a).unwrap();
        let p = purity(&cfg);
        prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
    }

    #[test]
    fn source_norm_positive(a in 0.0f64..=1.0, theta in 0.0f64..=1.0) {
        let c = SuperpositionCoeffs::from_real_a(a).unwrap();
        let n = source_normalization(&c, theta).unwrap();
        prop_assert!(n.is_finite() && n > 0.0);
    }
}

#[test]
fn printed_config_reloads_to_same_patterns() {
    let cfg = paper_defaults();
    let back = load_config(&cfg.to_config_string()).unwrap();
    assert_eq!(back, cfg);
    let grid = default_pattern_grid();
    let p1 = pattern(&normalize(&cfg).unwrap(), 0.0, &grid);
    let p2 = pattern(&normalize(&back).unwrap(), 0.0, &grid);
    assert_eq!(p1.values, p2.values);
}

#[test]
fn product_limit_collapses_kinds() {
    let st = normalize(&paper_defaults().with_real_a(1.0).unwrap()).unwrap();
    let grid = default_pattern_grid();
    let sup = pattern(&st, 0.3, &grid);
    let pro = pattern(&st.with_kind(StateKind::ProductA), 0.3, &grid);
    let mix = pattern(&st.with_kind(StateKind::Mixture), 0.3, &grid);
    for ((s, p), m) in sup.values.iter().zip(&pro.values).zip(&mix.values) {
        assert!((s - p).abs() <= 1e-14 * p.max(1e-300));
        assert!((s - m).abs() <= 1e-14 * m.max(1e-300));
    }
}
