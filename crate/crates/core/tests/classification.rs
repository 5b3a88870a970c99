//! Verdicts at constructed and catalog singular points.

use transurf::classify::{classify, DependentCase, Route, Tag};
use transurf::curves::catalog::{helix_companion, singular_companion, singular_helix, unit_helix};
use transurf::framedsurf::ThetaSource;
use transurf::surface::TranslationSurface;
use transurf::tolerances::Tolerances;

mod instances;

#[test]
fn constructed_case_one_verdicts() {
    let tol = Tolerances::default();
    for inst in instances::case_one().unwrap() {
        let r = classify(&inst.surface, inst.u, inst.v, &tol).unwrap();
        assert_eq!(r.case, Some(DependentCase::I), "{}", inst.label);
        assert_eq!(r.verdict, inst.expected, "{}: {:#?}", inst.label, r);
        assert!(matches!(r.theta, Some(ThetaSource::LimitExtension { .. })), "{}", inst.label);
    }
}

#[test]
fn every_check_reports_value_threshold_and_source() {
    let tol = Tolerances::default();
    for inst in instances::case_one().unwrap() {
        let r = classify(&inst.surface, inst.u, inst.v, &tol).unwrap();
        for v in &r.routes {
            for c in v.checks.iter().chain(&v.hypotheses) {
                assert!(c.value.is_finite() && c.threshold > 0.0 && !c.source.is_empty(), "{c:?}");
            }
        }
    }
}

#[test]
fn case_two_beaks_criterion_is_evaluated() {
    let s = TranslationSurface::new(singular_helix(0.6).unwrap(), helix_companion(0.6, -1.0).unwrap());
    let r = classify(&s, 0.0, 0.0, &Tolerances::default()).unwrap();
    assert_eq!(r.case, Some(DependentCase::II));
    let f = r.route(Route::FramedSurface).unwrap();
    for name in ["theta_u_minus_ell", "alpha_u", "p", "q"] {
        assert!(f.value(name).is_some(), "{name}");
    }
    assert!(matches!(f.tag, Tag::CuspidalBeaks | Tag::NeverCuspidalLips));
    assert!(r.verdict != Tag::CuspidalLips);
}

#[test]
fn case_three_and_four() {
    let tol = Tolerances::default();
    let s = TranslationSurface::new(unit_helix(0.6).unwrap(), singular_companion(0.6, 1.0).unwrap());
    let r = classify(&s, 0.0, 0.0, &tol).unwrap();
    assert_eq!(r.case, Some(DependentCase::III));
    assert!(r.route(Route::FramedSurface).unwrap().value("alpha_b_v").is_some());
    let s = TranslationSurface::new(singular_helix(0.6).unwrap(), singular_companion(0.6, 1.0).unwrap());
    let r = classify(&s, 0.0, 0.0, &tol).unwrap();
    assert_eq!((r.case, r.rank), (Some(DependentCase::IV), 0));
    assert_eq!(r.route(Route::FramedSurface).unwrap().tag, Tag::NeverD4);
}

#[test]
fn tightened_thresholds_do_not_change_clear_verdicts() {
    let mut tol = Tolerances::default();
    tol.apply("crit=1e-9").unwrap();
    for inst in instances::case_one().unwrap() {
        assert_eq!(classify(&inst.surface, inst.u, inst.v, &tol).unwrap().verdict, inst.expected);
    }
}
