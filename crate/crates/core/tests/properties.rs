//! Randomized invariants of the classifier.

use proptest::prelude::*;
use transurf::classify::{classify, PhiData, Route, Tag};
use transurf::curves::catalog::{catalog, catalog_pair, helix_companion, singular_companion, singular_helix, unit_helix};
use transurf::surface::{find_singular_points, ScanOptions, SelfSign, TranslationSurface};
use transurf::jets::Taylor;
use transurf::tolerances::Tolerances;

fn pair(name: &str) -> TranslationSurface {
    let (a, b) = catalog_pair(name).unwrap();
    TranslationSurface::new(a, b)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn phi_closed_form_matches_jet(u in -1.9f64..1.9, v in -1.9f64..1.9, which in 0usize..3) {
        let s = pair(["s0", "s1p", "s1m"][which]);
        let p = PhiData::new(&s.local(u, v).unwrap()).unwrap();
        let jet = p.phi.value();
        prop_assert!((jet - p.closed_value).abs() <= 1e-8 * jet.abs().max(1.0), "{} vs {}", jet, p.closed_value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn case_two_is_never_cuspidal_lips(a in 0.2f64..0.95, plus in any::<bool>()) {
        let sign = if plus { 1.0 } else { -1.0 };
        let s = TranslationSurface::new(singular_helix(a).unwrap(), helix_companion(a, sign).unwrap());
        let r = classify(&s, 0.0, 0.0, &Tolerances::default()).unwrap();
        prop_assert_eq!(r.case, Some(transurf::classify::DependentCase::II));
        prop_assert!(r.verdict != Tag::CuspidalLips);
        for route in &r.routes {
            prop_assert!(route.tag != Tag::CuspidalLips, "{:?}", route);
        }
    }

    #[test]
    fn case_three_is_never_cuspidal_lips(a in 0.2f64..0.95, plus in any::<bool>()) {
        let sign = if plus { 1.0 } else { -1.0 };
        let s = TranslationSurface::new(unit_helix(a).unwrap(), singular_companion(a, sign).unwrap());
        let r = classify(&s, 0.0, 0.0, &Tolerances::default()).unwrap();
        prop_assert_eq!(r.case, Some(transurf::classify::DependentCase::III));
        prop_assert!(r.routes.iter().all(|v| v.tag != Tag::CuspidalLips));
    }

    #[test]
    fn case_four_has_vanishing_hessian(a in 0.2f64..0.95, plus in any::<bool>()) {
        let sign = if plus { 1.0 } else { -1.0 };
        let s = TranslationSurface::new(singular_helix(a).unwrap(), singular_companion(a, sign).unwrap());
        let r = classify(&s, 0.0, 0.0, &Tolerances::default()).unwrap();
        let f = r.route(Route::FramedSurface).unwrap();
        prop_assert_eq!(f.tag, Tag::NeverD4);
        prop_assert!(f.value("max_abs_hess_lambda").unwrap() < 1e-8);
        prop_assert!(!matches!(r.verdict, Tag::D4Plus | Tag::D4Minus));
    }
}

/// Off-diagonal isolated singular points: x+ is a cross cap (or S1-)
/// exactly when x- is.
#[test]
fn plus_and_minus_self_translations_agree_off_the_diagonal() {
    let tol = Tolerances::default();
    for name in ["sin_curve", "self_s1p"] {
        let c = catalog(name).unwrap();
        let plus = TranslationSurface::self_translation(c.clone(), SelfSign::Plus);
        let minus = TranslationSurface::self_translation(c, SelfSign::Minus);
        let w = std::f64::consts::PI;
        let pts = find_singular_points(&plus, &ScanOptions::new([-w, w, -w, w], 48)).unwrap();
        let mut seen = 0;
        for p in pts.iter().filter(|p| p.isolated) {
            let a = classify(&plus, p.u, p.v, &tol).unwrap().verdict;
            let b = classify(&minus, p.u, p.v, &tol).unwrap().verdict;
            assert_eq!(a == Tag::CrossCap, b == Tag::CrossCap, "{name} at ({}, {})", p.u, p.v);
            assert_eq!(a == Tag::S1Minus, b == Tag::S1Minus, "{name} at ({}, {})", p.u, p.v);
            seen += 1;
        }
        assert!(seen > 0, "{name}");
    }
}
