//! Invariant suites: jets against finite differences, frame-matrix
//! identities, integrability and reconstruction, the framed-surface
//! relations at dependent points, and the catalog example verdicts.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::classify::{classify, Tag};
use crate::curves::catalog::{catalog, catalog_pair, helix_companion, unit_helix, CATALOG_NAMES};
use crate::curves::{CurveJets, FramedCurve};
use crate::error::{Error, Result};
use crate::framedsurf::{frenet_theta_residuals, lemma_residuals, theta_at};
use crate::framefield::{integrability_residual, reconstruct, FrameField, MatrixField, ReconstructOptions};
use crate::jets::{Jet, Taylor};
use crate::surface::{find_singular_points, ScanOptions, SelfSign, TranslationSurface};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Jets,
    Frames,
    Compat,
    Lemma,
    Examples,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Jets, Suite::Frames, Suite::Compat, Suite::Lemma, Suite::Examples];

    /// `all` expands to every suite.
    pub fn parse_list(name: &str) -> Result<Vec<Suite>> {
        Ok(match name {
            "jets" => vec![Suite::Jets],
            "frames" => vec![Suite::Frames],
            "compat" => vec![Suite::Compat],
            "lemma" => vec![Suite::Lemma],
            "examples" => vec![Suite::Examples],
            "all" => Suite::ALL.to_vec(),
            other => {
                return Err(Error::Input(format!(
                    "unknown suite `{other}` (jets, frames, compat, lemma, examples, all)"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jets => "jets",
            Suite::Frames => "frames",
            Suite::Compat => "compat",
            Suite::Lemma => "lemma",
            Suite::Examples => "examples",
        }
    }
}

/// One verified quantity: passes when `residual < threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub suite: Suite,
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl VerifyCheck {
    fn new(suite: Suite, name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        VerifyCheck { suite, name: name.into(), residual, threshold, pass: residual < threshold }
    }

    /// A qualitative check, recorded as residual 0 or 1 against threshold 1/2.
    fn flag(suite: Suite, name: impl Into<String>, ok: bool) -> Self {
        Self::new(suite, name, if ok { 0.0 } else { 1.0 }, 0.5)
    }
}

pub fn run_suites(suites: &[Suite], tol: &Tolerances) -> Result<Vec<VerifyCheck>> {
    let mut out = Vec::new();
    for &s in suites {
        out.extend(match s {
            Suite::Jets => jets_suite(200, 0x5eed)?,
            Suite::Frames => frames_suite(tol, 32)?,
            Suite::Compat => compat_suite(tol)?,
            Suite::Lemma => lemma_suite(tol)?,
            Suite::Examples => examples_suite(tol)?,
        });
    }
    Ok(out)
}

/// Every pair built from the catalog: the three two-curve examples and
/// both self-translations of the two periodic curves.
pub fn catalog_surfaces() -> Result<Vec<(String, TranslationSurface)>> {
    let mut out = Vec::new();
    for name in ["s0", "s1p", "s1m"] {
        let (a, b) = catalog_pair(name)?;
        out.push((name.to_string(), TranslationSurface::new(a, b)));
    }
    for name in ["sin_curve", "self_s1p"] {
        for sign in [SelfSign::Plus, SelfSign::Minus] {
            out.push((format!("{name}/{sign:?}"), TranslationSurface::self_translation(catalog(name)?, sign)));
        }
    }
    Ok(out)
}

/// Richardson-extrapolated central difference of `f` at `x`.
fn richardson(f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
}

fn rel_err(jet: f64, fd: f64) -> f64 {
    (jet - fd).abs() / jet.abs().max(1.0)
}

type Elementary = (&'static str, fn(&Jet) -> Result<Jet>);

const ELEMENTARY: &[Elementary] = &[
    ("sin", |x| Ok(x.sin())),
    ("cos", |x| Ok(x.cos())),
    ("tan", |x| x.tan()),
    ("exp", |x| Ok(x.exp())),
    ("ln", |x| x.offset(2.0).ln()),
    ("sqrt", |x| x.offset(2.0).sqrt()),
    ("atan", |x| Ok(x.atan())),
    ("powi3", |x| x.powi(3)),
    ("powf2.5", |x| x.offset(2.0).powf(2.5)),
    ("recip", |x| x.offset(2.5).recip()),
    ("square", |x| Ok(x.square())),
];

/// Each derivative order `k ≥ 1` of a jet against the finite difference of
/// order `k - 1` at shifted points. Returns the worst relative error.
fn jet_vs_fd(eval: &dyn Fn(f64) -> Result<Jet>, x: f64) -> Result<f64> {
    let j = eval(x)?;
    let mut worst = 0.0f64;
    for k in 1..=j.order() {
        let f = |t: f64| -> Result<f64> { Ok(eval(t)?.deriv(k - 1)) };
        worst = worst.max(rel_err(j.deriv(k), richardson(&f, x, 1e-3)?));
    }
    Ok(worst)
}

fn curve_component(c: &CurveJets, which: usize) -> Jet {
    match which {
        0..=2 => c.gamma[which].clone(),
        3..=5 => c.nu1[which - 3].clone(),
        6..=8 => c.nu2[which - 6].clone(),
        9..=11 => c.mu[which - 9].clone(),
        12 => c.ell.clone(),
        13 => c.m.clone(),
        14 => c.n.clone(),
        _ => c.alpha.clone(),
    }
}

const COMPONENTS: [&str; 16] = [
    "x", "y", "z", "nu1.x", "nu1.y", "nu1.z", "nu2.x", "nu2.y", "nu2.z", "mu.x", "mu.y", "mu.z", "ell", "m", "n",
    "alpha",
];

/// `probes` random probes split between elementary functions of a
/// nonlinear inner function and components of catalog-curve jets.
pub fn jets_suite(probes: usize, seed: u64) -> Result<Vec<VerifyCheck>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let curves: Vec<FramedCurve> = CATALOG_NAMES.iter().map(|n| catalog(n)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(probes);
    for p in 0..probes {
        if p % 2 == 0 {
            let (name, f) = ELEMENTARY[rng.random_range(0..ELEMENTARY.len())];
            let x: f64 = rng.random_range(-0.9..0.9);
            let eval = |t: f64| -> Result<Jet> {
                let v = Jet::variable(t, 6);
                // inner function keeps every argument inside the domain
                f(&v.scale(0.7).add_t(&v.square().scale(0.2)))
            };
            out.push(VerifyCheck::new(Suite::Jets, format!("{name}@{x:.6}"), jet_vs_fd(&eval, x)?, 1e-5));
        } else {
            let c = &curves[rng.random_range(0..curves.len())];
            let which = rng.random_range(0..COMPONENTS.len());
            let (a, b) = c.domain;
            let t: f64 = rng.random_range(a + 0.05 * (b - a)..b - 0.05 * (b - a));
            let eval = |s: f64| -> Result<Jet> { Ok(curve_component(&c.jets(s)?, which)) };
            out.push(VerifyCheck::new(
                Suite::Jets,
                format!("{}.{}@{t:.6}", c.name, COMPONENTS[which]),
                jet_vs_fd(&eval, t)?,
                1e-5,
            ));
        }
    }
    Ok(out)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

/// SO(3) membership, both structure equations and the mixed identity on
/// an `n × n` grid of each catalog pair's domain.
pub fn frames_suite(tol: &Tolerances, n: usize) -> Result<Vec<VerifyCheck>> {
    let mut out = Vec::new();
    for (name, s) in catalog_surfaces()? {
        let field = FrameField::new(s.a.clone(), s.b.clone());
        let mut worst = [0.0f64; 4];
        for u in linspace(s.a.domain.0, s.a.domain.1, n) {
            for v in linspace(s.b.domain.0, s.b.domain.1, n) {
                let c = field.compatibility(u, v)?;
                for (w, r) in worst.iter_mut().zip([c.so3, c.eq_u, c.eq_v, c.eq_uv]) {
                    *w = w.max(r);
                }
            }
        }
        for (label, w) in ["so3", "t_u", "t_v", "t_uv"].iter().zip(worst) {
            out.push(VerifyCheck::new(Suite::Frames, format!("{name}: {label}"), w, tol.so3.max(1e-8)));
        }
    }
    Ok(out)
}

/// Result of one reconstruction run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReconstructionError {
    pub step: f64,
    /// Worst `|T_rec - T|` over the node grid.
    pub frame: f64,
    /// Worst position error of either curve.
    pub position: f64,
}

/// Integrates both curves of `s` from their curvatures and compares `T`
/// and the positions with the exact values on a 9 × 9 node grid.
pub fn reconstruction_error(s: &TranslationSurface, step: Option<f64>) -> Result<ReconstructionError> {
    let ua: Vec<f64> = linspace(s.a.domain.0, s.a.domain.1, 9).collect();
    let vb: Vec<f64> = linspace(s.b.domain.0, s.b.domain.1, 9).collect();
    let base = (ua[4], vb[4]);
    let field = FrameField::new(s.a.clone(), s.b.clone());
    let t0 = field.value(base.0, base.1)?;
    let fa = Matrix3::from_fn(|i, j| s.a.frame_at(base.0).map(|f| f[i][j]).unwrap_or(f64::NAN));
    let ca = |u: f64| s.a.curvature(u);
    let cb = |v: f64| s.b.curvature(v);
    let opts = ReconstructOptions { step: step.unwrap_or(1e-3), ..Default::default() };
    let rec = reconstruct(&ca, &cb, base, &t0, &fa, &ua, &vb, opts)?;
    let mut frame = 0.0f64;
    for (i, &u) in ua.iter().enumerate() {
        for (j, &v) in vb.iter().enumerate() {
            frame = frame.max((rec.frame_matrix(i, j) - field.value(u, v)?).amax());
        }
    }
    // both curves start from their exact frames, so positions are the
    // exact ones translated to the origin
    let mut position = 0.0f64;
    for (curve, nodes, pts) in [(&s.a, &ua, &rec.a.points), (&s.b, &vb, &rec.b.points)] {
        let p0 = curve.point(nodes[4])?;
        for (t, q) in nodes.iter().zip(pts) {
            let p = curve.point(*t)?;
            for k in 0..3 {
                position = position.max((q[k] - (p[k] - p0[k])).abs());
            }
        }
    }
    Ok(ReconstructionError { step: opts.step, frame, position })
}

/// Observed convergence order from two runs with steps `h` and `h/2`.
pub fn observed_order(s: &TranslationSurface, h: f64) -> Result<(f64, ReconstructionError, ReconstructionError)> {
    let e1 = reconstruction_error(s, Some(h))?;
    let e2 = reconstruction_error(s, Some(h / 2.0))?;
    Ok(((e1.frame / e2.frame).log2(), e1, e2))
}

/// Coarse step used for the convergence-order measurement.
pub const ORDER_STEP: f64 = 0.1;

/// Integrability of `T` alone (skew curvature matrices, mixed identity),
/// reconstruction at step 1e-3, and the observed RK4 order.
pub fn compat_suite(tol: &Tolerances) -> Result<Vec<VerifyCheck>> {
    let mut out = Vec::new();
    // the two self-translations of a curve share their frame matrix
    for (name, s) in catalog_surfaces()?.into_iter().filter(|(n, _)| !n.ends_with("Minus")) {
        let field = FrameField::new(s.a.clone(), s.b.clone());
        let window = [s.a.domain.0, s.a.domain.1, s.b.domain.0, s.b.domain.1];
        let (r, _, _) = integrability_residual(&field, window, 16)?;
        out.push(VerifyCheck::new(Suite::Compat, format!("{name}: integrability"), r, tol.pde));
        let e = reconstruction_error(&s, None)?;
        out.push(VerifyCheck::new(Suite::Compat, format!("{name}: reconstructed T"), e.frame, tol.recon));
        out.push(VerifyCheck::new(Suite::Compat, format!("{name}: reconstructed positions"), e.position, tol.recon));
        let (order, _, _) = observed_order(&s, ORDER_STEP)?;
        // passes when the order is at least 3.5
        out.push(VerifyCheck::new(Suite::Compat, format!("{name}: 3.5 - observed order"), 3.5 - order, 1e-300));
    }
    Ok(out)
}

/// Dependent singular points of unit-speed helix pairs: `(a, sign, v)`
/// with `u = 2·sign·atan v`.
pub const DEPENDENT_SAMPLES: &[(f64, f64, f64)] = &[
    (0.6, -1.0, 0.5),
    (0.6, -1.0, -0.7),
    (0.6, 1.0, 0.3),
    (0.8, -1.0, 1.2),
    (0.8, 1.0, -0.4),
    (0.45, 1.0, 0.9),
];

pub fn helix_pair(a: f64, sign: f64) -> Result<TranslationSurface> {
    Ok(TranslationSurface::new(unit_helix(a)?, helix_companion(a, sign)?))
}

/// The nine framed-surface relations and the first five Frenet `θ` identities.
pub fn lemma_suite(tol: &Tolerances) -> Result<Vec<VerifyCheck>> {
    let mut out = Vec::new();
    for &(a, sign, v) in DEPENDENT_SAMPLES {
        let s = helix_pair(a, sign)?;
        let u = 2.0 * sign * v.atan();
        let label = format!("helix({a}) sign {sign} at v={v}");
        let Some(th) = theta_at(&s, u, v, &tol.theta_options())?.available() else {
            out.push(VerifyCheck::flag(Suite::Lemma, format!("{label}: θ available"), false));
            continue;
        };
        let local = s.local(u, v)?;
        for (k, r) in lemma_residuals(&local, &th.jet).iter().enumerate() {
            if let Some(r) = r {
                out.push(VerifyCheck::new(Suite::Lemma, format!("{label}: relation {}", k + 1), r.abs(), tol.lemma));
            }
        }
        for (k, r) in frenet_theta_residuals(&s, &local, &th.jet)?.iter().enumerate().take(5) {
            if let Some(r) = r {
                out.push(VerifyCheck::new(Suite::Lemma, format!("{label}: Frenet item {}", k + 1), r.abs(), tol.lemma));
            }
        }
    }
    Ok(out)
}

/// Verdicts of the catalog examples.
pub fn examples_suite(tol: &Tolerances) -> Result<Vec<VerifyCheck>> {
    let mut out = Vec::new();
    for (name, want) in [("s0", Tag::CrossCap), ("s1p", Tag::S1Plus), ("s1m", Tag::S1Minus)] {
        let (a, b) = catalog_pair(name)?;
        let r = classify(&TranslationSurface::new(a, b), 0.0, 0.0, tol)?;
        out.push(VerifyCheck::flag(Suite::Examples, format!("{name} (0,0): {want:?} (got {:?})", r.verdict), r.verdict == want));
    }
    let s = TranslationSurface::self_translation(catalog("self_s1p")?, SelfSign::Plus);
    let r = classify(&s, 0.0, PI, tol)?;
    out.push(VerifyCheck::flag(
        Suite::Examples,
        format!("self_s1p plus (0,π): S1Plus (got {:?})", r.verdict),
        r.verdict == Tag::S1Plus,
    ));
    let s = TranslationSurface::self_translation(catalog("sin_curve")?, SelfSign::Plus);
    let pts = find_singular_points(&s, &ScanOptions::new([-PI, PI, -PI, PI], 48))?;
    let isolated: Vec<_> = pts.iter().filter(|p| p.isolated).collect();
    let mut all = !isolated.is_empty();
    for p in &isolated {
        all &= classify(&s, p.u, p.v, tol)?.verdict == Tag::CrossCap;
    }
    out.push(VerifyCheck::flag(
        Suite::Examples,
        format!("sin plus: {} isolated points, all CrossCap", isolated.len()),
        all,
    ));
    Ok(out)
}

/// Text summary, one line per check, followed by a totals line.
pub fn summary_text(checks: &[VerifyCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{} [{}] {}: residual {} (threshold {})\n",
            if c.pass { "ok  " } else { "FAIL" },
            c.suite.name(),
            c.name,
            crate::report::fmt17(c.residual),
            crate::report::fmt17(c.threshold)
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_agree_with_finite_differences() {
        for c in jets_suite(40, 7).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn reconstruction_converges_at_fourth_order() {
        let (a, b) = catalog_pair("s1m").unwrap();
        let s = TranslationSurface::new(a, b);
        let e = reconstruction_error(&s, None).unwrap();
        assert!(e.frame < 1e-6 && e.position < 1e-6, "{e:?}");
        let (order, e1, e2) = observed_order(&s, ORDER_STEP).unwrap();
        assert!(order > 3.5, "{order} {e1:?} {e2:?}");
    }
}
