//! Acceptance criteria 1-12: one PASS/FAIL line each, nonzero exit when any fails.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use transurf::app::{mesh, scan, RunConfig, SurfaceInput, IMAGE_MERGE_RADIUS};
use transurf::classify::{classify, PhiData, Route, Tag};
use transurf::curves::catalog::{catalog, catalog_pair, CATALOG_NAMES};
use transurf::surface::{distinct_images, find_singular_points, ScanOptions, SelfSign, TranslationSurface};
use transurf::tolerances::Tolerances;
use transurf::verify::{
    catalog_surfaces, frames_suite, jets_suite, lemma_suite, observed_order, reconstruction_error, ORDER_STEP,
};
use transurf::jets::Taylor;
use transurf::Result;

mod instances;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn near(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn criterion_1(tol: &Tolerances) -> Result<Outcome> {
    let (a, b) = catalog_pair("s0")?;
    let s = TranslationSurface::new(a, b);
    let pts = find_singular_points(&s, &ScanOptions::new([-2.0, 2.0, -2.0, 2.0], 48))?;
    let one = pts.len() == 1 && pts[0].u.abs() < 1e-8 && pts[0].v.abs() < 1e-8;
    let r = classify(&s, 0.0, 0.0, tol)?;
    let value = r.route(Route::Gfs).and_then(|g| g.value("s0_value")).unwrap_or(f64::NAN);
    outcome(
        one && near(value, -1.0, 1e-8) && r.verdict == Tag::CrossCap,
        format!("{} point(s), criterion value {value:.12}, verdict {:?}", pts.len(), r.verdict),
    )
}

fn criterion_2(tol: &Tolerances) -> Result<Outcome> {
    let (a, b) = catalog_pair("s1p")?;
    let r = classify(&TranslationSurface::new(a, b), 0.0, 0.0, tol)?;
    let g = r.route(Route::Gfs);
    let get = |n: &str| g.and_then(|g| g.value(n)).unwrap_or(f64::NAN);
    let (det, i1, i2) = (get("det_hess_phi"), get("eta_eta_x_nu1"), get("eta_eta_x_nu2"));
    outcome(
        near(det, -4.0, 1e-6) && near(i1, 0.0, 1e-8) && near(i2, 1.0, 1e-8) && r.verdict == Tag::S1Plus,
        format!("det Hess φ {det:.10}, independence ({i1:.3e}, {i2:.10}), verdict {:?}", r.verdict),
    )
}

fn criterion_3(tol: &Tolerances) -> Result<Outcome> {
    let (a, b) = catalog_pair("s1m")?;
    let s = TranslationSurface::new(a, b);
    let l = s.local(0.0, 0.0)?;
    let r = classify(&s, 0.0, 0.0, tol)?;
    let value = r.route(Route::Gfs).and_then(|g| g.value("frenet_s1_value")).unwrap_or(f64::NAN);
    let (t33, t21) = (l.t(3, 3), l.t(2, 1));
    outcome(
        near(t33, 1.0, 1e-8) && t21.abs() < 1e-8 && near(value, 1.0, 1e-6) && r.verdict == Tag::S1Minus,
        format!("t33 {t33:.12}, t21 {t21:.3e}, Frenet value {value:.10}, verdict {:?}", r.verdict),
    )
}

/// Isolated singular points of the sin self-translation, one per class mod 2π.
fn sin_isolated(s: &TranslationSurface) -> Result<(Vec<(f64, f64)>, bool)> {
    let pts = find_singular_points(s, &ScanOptions::new([-PI, PI, -PI, PI], 48))?;
    let period = |x: f64| x.rem_euclid(2.0 * PI);
    let same = |a: f64, b: f64| {
        let d = (period(a) - period(b)).abs();
        d.min(2.0 * PI - d) < 1e-6
    };
    let diagonal_ok = pts.iter().filter(|p| !p.isolated).all(|p| same(p.u, p.v));
    let mut reps: Vec<(f64, f64)> = Vec::new();
    for p in pts.iter().filter(|p| p.isolated) {
        if !reps.iter().any(|&(u, v)| same(u, p.u) && same(v, p.v)) {
            reps.push((p.u, p.v));
        }
    }
    let has_diagonal = pts.iter().filter(|p| !p.isolated).count() >= 8;
    Ok((reps, diagonal_ok && has_diagonal))
}

fn criterion_4(tol: &Tolerances) -> Result<Outcome> {
    let c = catalog("sin_curve")?;
    let plus = TranslationSurface::self_translation(c.clone(), SelfSign::Plus);
    let minus = TranslationSurface::self_translation(c.clone(), SelfSign::Minus);
    let (reps, diagonal) = sin_isolated(&plus)?;
    let (reps_minus, diagonal_minus) = sin_isolated(&minus)?;
    // ξφ in the unhalved normalization γ(u) + γ(v)
    let whole = TranslationSurface::new(c.clone(), c);
    let mut xi = Vec::new();
    for &(u, v) in &reps {
        let r = classify(&whole, u, v, tol)?;
        xi.push(r.route(Route::Gfs).and_then(|g| g.value("xi_phi")).unwrap_or(f64::NAN));
    }
    let xi_ok = xi.iter().all(|&x| near(x, -4.0, 1e-6));
    let n_plus = distinct_images(&plus, &reps, IMAGE_MERGE_RADIUS)?.len();
    let n_minus = distinct_images(&minus, &reps, IMAGE_MERGE_RADIUS)?.len();
    let mut origin = 0.0f64;
    for k in 0..64 {
        let u = -PI + 2.0 * PI * k as f64 / 63.0;
        origin = origin.max(minus.point(u, u)?.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let pass = diagonal
        && diagonal_minus
        && reps.len() == 4
        && reps_minus.len() == 4
        && xi_ok
        && n_plus == 2
        && n_minus == 4
        && origin < 1e-10;
    let xi_text: Vec<String> = reps.iter().zip(&xi).map(|((u, v), x)| format!("({u:.4},{v:.4}):{x:.8}")).collect();
    outcome(
        pass,
        format!(
            "diagonal {diagonal}/{diagonal_minus}, isolated {}/{}, ξφ [{}], images x+ {n_plus} x- {n_minus}, |x-(u,u)| ≤ {origin:.1e}",
            reps.len(),
            reps_minus.len(),
            xi_text.join(" ")
        ),
    )
}

fn criterion_5(tol: &Tolerances) -> Result<Outcome> {
    let c = catalog("self_s1p")?;
    let plus = classify(&TranslationSurface::self_translation(c.clone(), SelfSign::Plus), 0.0, PI, tol)?;
    let minus = classify(&TranslationSurface::self_translation(c, SelfSign::Minus), 0.0, PI, tol)?;
    let get = |r: &transurf::classify::ClassificationReport, n: &str| {
        r.route(Route::Gfs).and_then(|g| g.value(n)).unwrap_or(f64::NAN)
    };
    let (ind, disc) = (get(&plus, "frenet_independence"), get(&plus, "frenet_s1_value"));
    let ind_minus = get(&minus, "frenet_independence");
    outcome(
        near(ind, 2.0 * 2f64.sqrt(), 1e-6)
            && near(disc, -16.0, 1e-4)
            && plus.verdict == Tag::S1Plus
            && ind_minus.abs() < 1e-8
            && minus.verdict != Tag::S1Plus,
        format!(
            "x+: κ+κ̃t11 {ind:.10}, discriminant {disc:.8}, {:?}; x-: κ-κ̃t11 {ind_minus:.3e}, {:?}",
            plus.verdict, minus.verdict
        ),
    )
}

fn criterion_6(tol: &Tolerances) -> Result<Outcome> {
    let checks = frames_suite(tol, 32)?;
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    outcome(
        checks.iter().all(|c| c.pass) && worst < 1e-8,
        format!("{} checks on 32×32 grids, worst residual {worst:.3e}", checks.len()),
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut min_order = f64::INFINITY;
    for (name, s) in catalog_surfaces()? {
        if name.ends_with("Minus") {
            continue;
        }
        worst = worst.max(reconstruction_error(&s, Some(1e-3))?.frame);
        min_order = min_order.min(observed_order(&s, ORDER_STEP)?.0);
    }
    outcome(
        worst < 1e-6 && min_order >= 3.5,
        format!("worst |T_rec - T| {worst:.3e} at step 1e-3, smallest observed order {min_order:.3} (steps {ORDER_STEP}, {})", ORDER_STEP / 2.0),
    )
}

fn criterion_8() -> Result<Outcome> {
    let checks = jets_suite(200, 0x5eed)?;
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    outcome(
        checks.len() == 200 && worst < 1e-5,
        format!("{} probes, worst relative error {worst:.3e}", checks.len()),
    )
}

fn criterion_9(tol: &Tolerances) -> Result<Outcome> {
    let checks = lemma_suite(tol)?;
    // first five relations and first five Frenet θ identities
    let relation = |name: &str| name.rsplit("relation ").next().and_then(|n| n.parse::<usize>().ok());
    let wanted: Vec<_> = checks
        .iter()
        .filter(|c| c.name.contains("Frenet item") || c.name.contains("θ available") || relation(&c.name).is_some_and(|n| n <= 5))
        .collect();
    let worst = wanted.iter().map(|c| c.residual).fold(0.0, f64::max);
    outcome(
        !wanted.is_empty() && worst < 1e-6 && wanted.iter().all(|c| c.pass),
        format!("{} residuals at dependent points, worst {worst:.3e}", wanted.len()),
    )
}

fn criterion_10(tol: &Tolerances) -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst_value = 0.0f64;
    let mut worst_det = 0.0f64;
    let mut bad = Vec::new();
    let mut tested = 0;
    for name in CATALOG_NAMES {
        let c = catalog(name)?;
        for sign in [SelfSign::Plus, SelfSign::Minus] {
            let s = TranslationSurface::self_translation(c.clone(), sign);
            for _ in 0..8 {
                let (lo, hi) = c.domain;
                let u: f64 = rng.random_range(lo..hi);
                let l = s.local(u, u)?;
                if l.alpha.value().abs() < 1e-6 {
                    continue;
                }
                let phi = PhiData::new(&l)?;
                worst_value = worst_value.max(phi.s0_value.abs());
                worst_det = worst_det.max(phi.det_hessian().abs());
                let v = classify(&s, u, u, tol)?.verdict;
                if matches!(v, Tag::CrossCap | Tag::S1Plus | Tag::S1Minus) {
                    bad.push(format!("{name}/{sign:?}@{u:.4}: {v:?}"));
                }
                tested += 1;
            }
        }
    }
    outcome(
        worst_value < 1e-8 && worst_det < 1e-8 && bad.is_empty(),
        format!("{tested} diagonal points, worst criterion value {worst_value:.3e}, worst det Hess φ {worst_det:.3e}, offending {bad:?}"),
    )
}

fn criterion_11(tol: &Tolerances) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut agree = 0;
    let list = instances::case_one()?;
    for inst in &list {
        let r = classify(&inst.surface, inst.u, inst.v, tol)?;
        let f = r.route(Route::FramedSurface).map(|v| v.tag);
        let g = r.route(Route::GenericFrontal).map(|v| v.tag);
        let ok = f.is_some() && f == g && f != Some(Tag::Unclassified);
        agree += ok as usize;
        rows.push(format!(
            "{}: {:?}/{:?} (constructed as {:?})",
            inst.label,
            f.unwrap_or(Tag::Unclassified),
            g.unwrap_or(Tag::Unclassified),
            inst.expected
        ));
    }
    outcome(list.len() >= 5 && agree == list.len(), format!("{agree}/{} agree [{}]", list.len(), rows.join("; ")))
}

fn criterion_12() -> Result<Outcome> {
    let mut cfgs = Vec::new();
    let mut cfg = RunConfig::new(SurfaceInput::Named { name: "s0".into() });
    cfg.window = Some([-2.0, 2.0, -2.0, 2.0]);
    cfgs.push(cfg);
    let mut cfg = RunConfig::new(SurfaceInput::SelfTranslation {
        curve: transurf::app::CurveInput::new("@sin_curve", None),
        sign: SelfSign::Plus,
    });
    cfg.window = Some([-PI, PI, -PI, PI]);
    cfgs.push(cfg);
    let mut same = true;
    for cfg in &cfgs {
        let r1 = transurf::report::to_json(&scan(cfg)?.0)?;
        let r2 = transurf::report::to_json(&scan(cfg)?.0)?;
        same &= r1 == r2;
        let mut m = cfg.clone();
        m.grid = 33;
        same &= mesh(&m)? == mesh(&m)?;
    }
    outcome(same, format!("{} configurations, reports and OBJ byte-identical: {same}", cfgs.len()))
}

fn main() {
    let tol = Tolerances::default();
    let start = std::time::Instant::now();
    let criteria: Vec<(usize, Result<Outcome>)> = vec![
        (1, criterion_1(&tol)),
        (2, criterion_2(&tol)),
        (3, criterion_3(&tol)),
        (4, criterion_4(&tol)),
        (5, criterion_5(&tol)),
        (6, criterion_6(&tol)),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9(&tol)),
        (10, criterion_10(&tol)),
        (11, criterion_11(&tol)),
        (12, criterion_12()),
    ];
    let mut failed = 0;
    for (k, r) in criteria {
        let (pass, detail) = match r {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!("criterion {k:2}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 12 passed in {:.1?}", 12 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
