//! Classification of singular points of translation surfaces.
//!
//! Three routes are implemented. The φ route (cross cap, S1±) works with
//! `φ = det(ξx, ηx, ηηx)`. The framed route (cases I to IV of the dependent
//! condition) uses the closed forms in `θ`. The generic route recomputes
//! the discriminant, the null field and the singular curve from scratch and
//! applies the standard front criteria; it serves as an independent check.

use nalgebra::{Matrix2, Matrix3x2, SMatrix, Vector2, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framedsurf::{
    theta_from_local, CaseQuantities, Framed, FsInvariants, Theta, ThetaAt, ThetaOptions, ThetaSource,
};
use crate::jets::{add3, cross, det3, dot, du3, dv3, scale3, values3, BiJet, Taylor, Vec3};
use crate::surface::{Local, TranslationSurface};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tag {
    CrossCap,
    S1Plus,
    S1Minus,
    CuspidalEdge,
    Swallowtail,
    CuspidalCrossCap,
    CuspidalBeaks,
    CuspidalLips,
    D4Plus,
    D4Minus,
    NeverCuspidalLips,
    NeverD4,
    RegularPoint,
    IndependentConditionDeferred,
    Unclassified,
}

impl Tag {
    fn conclusive(self) -> bool {
        self != Tag::Unclassified
    }

    /// Whether two route verdicts can both be true.
    fn compatible(self, other: Tag) -> bool {
        use Tag::*;
        match (self, other) {
            (a, b) if a == b => true,
            (Unclassified, _) | (_, Unclassified) => true,
            (NeverCuspidalLips, t) | (t, NeverCuspidalLips) => !matches!(t, CuspidalLips | CuspidalBeaks),
            (NeverD4, t) | (t, NeverD4) => !matches!(t, D4Plus | D4Minus),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Gfs,
    FramedSurface,
    GenericFrontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Test {
    NonZero,
    Zero,
    Negative,
    Positive,
    /// `|value| < threshold` where value is a difference of two computations.
    Agree,
}

/// One evaluated inequality.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub test: Test,
    pub threshold: f64,
    pub satisfied: bool,
    pub source: &'static str,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, test: Test, threshold: f64, source: &'static str) -> Self {
        let satisfied = match test {
            Test::NonZero => value.abs() > threshold,
            Test::Zero | Test::Agree => value.abs() < threshold,
            Test::Negative => value < -threshold,
            Test::Positive => value > threshold,
        };
        Check { name: name.into(), value, test, threshold, satisfied, source }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub route: Route,
    pub tag: Tag,
    pub checks: Vec<Check>,
    pub hypotheses: Vec<Check>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(route: Route) -> Self {
        Verdict { route, tag: Tag::Unclassified, checks: vec![], hypotheses: vec![], notes: vec![] }
    }

    fn check(&mut self, c: Check) -> bool {
        let ok = c.satisfied;
        self.checks.push(c);
        ok
    }

    fn hypothesis(&mut self, c: Check) -> bool {
        let ok = c.satisfied;
        self.hypotheses.push(c);
        ok
    }

    /// Value of a recorded check by name.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.checks.iter().chain(&self.hypotheses).find(|c| c.name == name).map(|c| c.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DependentCase {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub u: f64,
    pub v: f64,
    pub canonical: Option<(f64, f64)>,
    /// Rank of `dx`.
    pub rank: usize,
    /// `|μ × μ̃|`.
    pub dependence: f64,
    pub case: Option<DependentCase>,
    pub theta: Option<ThetaSource>,
    pub verdict: Tag,
    pub routes: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn route(&self, r: Route) -> Option<&Verdict> {
        self.routes.iter().find(|v| v.route == r)
    }
}

/// Numerical rank of `dx` at the point.
pub fn corank_rank(local: &Local, tol: &Tolerances) -> usize {
    let (smax, smin) = local.dx_singular_values();
    if smin > tol.rank {
        2
    } else if smax > tol.rank {
        1
    } else {
        0
    }
}

/// `φ = det(ξx, ηx, ηηx)` with `ξ = ∂u`, `η = -α̃ ∂u + α t33 ∂v`.
#[derive(Debug, Clone)]
pub struct PhiData {
    pub phi: BiJet,
    /// Closed-form value of `φ` at the point.
    pub closed_value: f64,
    /// `m(m̃t21 - ñt11) + n(m̃t22 - ñt12)`.
    pub s0_value: f64,
    /// Closed-form `φ_u` at a dependent point: `α⁴α̃²t33³·s0_value`.
    pub closed_phi_u: f64,
    pub closed_hessian: [[f64; 2]; 2],
    /// `(ηηx·ν1, ηηx·ν2)`.
    pub eta_eta_normal: [f64; 2],
    /// `(α̃m + α(m̃t11 + ñt21), α̃n + α(m̃t12 + ñt22))`.
    pub independence: [f64; 2],
    /// `|dx(η)|` at the point.
    pub kernel_residual: f64,
}

impl PhiData {
    pub fn new(local: &Local) -> Result<Self> {
        let (al, ab) = (&local.alpha, &local.alpha_b);
        let t33 = &local.t[2][2];
        let ca = ab.scale(-1.0);
        let cb = al.mul_t(t33);
        let apply = |x: &Vec3<BiJet>| -> Result<Vec3<BiJet>> {
            Ok(add3(&scale3(&du3(x)?, &ca), &scale3(&dv3(x)?, &cb)))
        };
        let eta_x = add3(&scale3(&local.x_u, &ca), &scale3(&local.x_v, &cb));
        let eta_eta_x = apply(&eta_x)?;
        let d = eta_eta_x[0].degree();
        let tr = |x: &Vec3<BiJet>| x.clone().map(|c| c.truncate(d));
        let phi = det3(&tr(&local.x_u), &tr(&eta_x), &eta_eta_x);

        let (ja, jb) = (&local.ja, &local.jb);
        let t = |i, j| local.t(i, j);
        let (a, b) = (al.value(), ab.value());
        let (l, m, n) = (ja.ell.value(), ja.m.value(), ja.n.value());
        let (mu, nu) = (ja.m.deriv(1), ja.n.deriv(1));
        let (lb, mb, nb) = (jb.ell.value(), jb.m.value(), jb.n.value());
        let (mbv, nbv) = (jb.m.deriv(1), jb.n.deriv(1));
        let (au, bv) = (al.partial(1, 0), ab.partial(0, 1));
        let tt = t(3, 3);

        let closed_value = -a.powi(3) * b.powi(3) * tt * (-m * t(3, 2) + n * t(3, 1))
            - a.powi(4) * b * b * tt.powi(3) * (mb * t(2, 3) - nb * t(1, 3));
        let s0_value = m * (mb * t(2, 1) - nb * t(1, 1)) + n * (mb * t(2, 2) - nb * t(1, 2));
        let closed_phi_u = a.powi(4) * b * b * tt.powi(3) * s0_value;

        let phi_uu = a.powi(3)
            * b
            * b
            * (-b * (l * (m * m + n * n) - n * mu + m * nu)
                + tt * a
                    * (l * (n * (-t(2, 1) * mb + t(1, 1) * nb) + m * (t(2, 2) * mb - t(1, 2) * nb))
                        + (t(2, 1) * mb - t(1, 1) * nb) * mu
                        + (t(2, 2) * mb - t(1, 2) * nb) * nu)
                + 8.0 * tt * ((m * t(2, 1) + n * t(2, 2)) * mb - (m * t(1, 1) + n * t(1, 2)) * nb) * au);
        let phi_uv = tt
            * b
            * a
            * a
            * (b * b
                * a
                * (l * (m * (t(1, 1) * mb + t(2, 1) * nb) + n * (t(1, 2) * mb + t(2, 2) * nb))
                    - (t(1, 2) * mb + t(2, 2) * nb) * mu
                    + (t(1, 1) * mb + t(2, 1) * nb) * nu)
                - b * a
                    * a
                    * (m * (t(2, 1) * (lb * nb - mbv) + t(1, 1) * (lb * mb + nbv))
                        + n * (t(2, 2) * (lb * nb - mbv) + t(1, 2) * (lb * mb + nbv)))
                + 2.0 * ((m * t(2, 1) + n * t(2, 2)) * mb - (m * t(1, 1) + n * t(1, 2)) * nb) * a * a * bv
                + 3.0 * (n * (t(1, 1) * mb + t(2, 1) * nb) - m * (t(1, 2) * mb + t(2, 2) * nb)) * b * b * au);
        let phi_vv = tt
            * b
            * b
            * a.powi(3)
            * (tt * a * (lb * (mb * mb + nb * nb) - nb * mbv + mb * nbv)
                + n * (b * (t(1, 1) * (-lb * nb + mbv) + t(2, 1) * (lb * mb + nbv))
                    + 6.0 * (t(1, 1) * mb + t(2, 1) * nb) * bv)
                + m * (-b * (t(1, 2) * (-lb * nb + mbv) + t(2, 2) * (lb * mb + nbv))
                    - 6.0 * (t(1, 2) * mb + t(2, 2) * nb) * bv));

        let nu1 = values3(&local.nu1);
        let nu2 = values3(&local.nu2);
        let eex = values3(&eta_eta_x);
        let d3 = |p: &[f64; 3], q: &[f64; 3]| p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        let ex = values3(&eta_x);
        Ok(PhiData {
            phi,
            closed_value,
            s0_value,
            closed_phi_u,
            closed_hessian: [[phi_uu, phi_uv], [phi_uv, phi_vv]],
            eta_eta_normal: [d3(&eex, &nu1), d3(&eex, &nu2)],
            independence: [
                b * m + a * (mb * t(1, 1) + nb * t(2, 1)),
                b * n + a * (mb * t(1, 2) + nb * t(2, 2)),
            ],
            kernel_residual: d3(&ex, &ex).sqrt(),
        })
    }

    pub fn det_hessian(&self) -> f64 {
        let h = self.phi.hessian();
        h[0][0] * h[1][1] - h[0][1] * h[1][0]
    }

    pub fn closed_det_hessian(&self) -> f64 {
        let h = &self.closed_hessian;
        h[0][0] * h[1][1] - h[0][1] * h[1][0]
    }
}

/// Curvature, torsion and their first derivatives of the underlying curves,
/// when both carry Frenet frames and pass the unit-speed gate at the point.
#[derive(Debug, Clone, Copy)]
struct FrenetData {
    k: f64,
    tau: f64,
    k_u: f64,
    kb: f64,
    taub: f64,
    kb_v: f64,
}

fn frenet_data(s: &TranslationSurface, local: &Local, tol: &Tolerances) -> Option<FrenetData> {
    if !(s.a.is_frenet() && s.b.is_frenet()) {
        return None;
    }
    // unit speed at the point with vanishing speed derivative
    let gate = |j: &crate::jets::Jet| (j.value().abs() - 1.0).abs() < tol.hyp && j.deriv(1).abs() < tol.hyp;
    if !(gate(&local.ja.alpha) && gate(&local.jb.alpha)) {
        return None;
    }
    let (ka, ta) = s.a.kappa_tau(local.u).ok()?;
    let (kb, tb) = s.b.kappa_tau(local.v).ok()?;
    Some(FrenetData {
        k: ka.value(),
        tau: ta.value(),
        k_u: ka.deriv(1),
        kb: kb.value(),
        taub: tb.value(),
        kb_v: kb.deriv(1),
    })
}

const SRC_S0: &str = "cross-cap criterion (ξφ ≠ 0)";
const SRC_S0_FRENET: &str = "cross-cap criterion, Frenet form (|t33| = 1, t21 ≠ 0)";
const SRC_S1: &str = "S1± criterion (critical φ, sign of det Hess φ)";
const SRC_S1_FRENET: &str = "S1± criterion, Frenet form";
const SRC_GFS: &str = "singular point of the translation surface";

/// Cross cap and S1± tests.
pub fn classify_gfs(s: &TranslationSurface, local: &Local, tol: &Tolerances) -> Result<Verdict> {
    let mut v = Verdict::new(Route::Gfs);
    let (a, b) = (local.alpha.value(), local.alpha_b.value());
    let t33 = local.t(3, 3);
    v.hypothesis(Check::new("alpha_a", a, Test::NonZero, tol.sing, SRC_GFS));
    v.hypothesis(Check::new("alpha_b", b, Test::NonZero, tol.sing, SRC_GFS));
    v.hypothesis(Check::new("one_minus_abs_t33", 1.0 - t33.abs(), Test::Zero, tol.dep, SRC_GFS));
    if !v.hypotheses.iter().all(|c| c.satisfied) {
        v.notes.push("φ route needs α α̃ ≠ 0 and |t33| = 1".into());
        return Ok(v);
    }
    let phi = PhiData::new(local)?;
    v.hypothesis(Check::new("kernel_residual", phi.kernel_residual, Test::Zero, tol.ker, SRC_GFS));
    let scale = 1.0 + phi.closed_phi_u.abs();
    v.check(Check::new(
        "phi_value_closed_minus_jet",
        phi.closed_value - phi.phi.value(),
        Test::Agree,
        1e-8 * (1.0 + phi.closed_value.abs()),
        SRC_S0,
    ));
    v.check(Check::new(
        "phi_u_closed_minus_jet",
        phi.closed_phi_u - phi.phi.partial(1, 0),
        Test::Agree,
        1e-6 * scale,
        SRC_S0,
    ));
    v.check(Check::new("phi_v", phi.phi.partial(0, 1), Test::Zero, tol.hyp, SRC_S0));
    let s0 = v.check(Check::new("s0_value", phi.s0_value, Test::NonZero, tol.crit, SRC_S0));
    v.check(Check::new("xi_phi", phi.phi.partial(1, 0), Test::NonZero, tol.crit, SRC_S0));
    let fr = frenet_data(s, local, tol);
    if fr.is_some() {
        let t21 = local.t(2, 1);
        let short = v.check(Check::new("frenet_t21", t21, Test::NonZero, tol.crit, SRC_S0_FRENET));
        if short != s0 {
            v.notes.push("Frenet cross-cap form disagrees with the general form".into());
            return Ok(v);
        }
    }
    if s0 {
        v.tag = Tag::CrossCap;
        return Ok(v);
    }

    // S1±
    let hj = phi.det_hessian();
    let hc = phi.closed_det_hessian();
    let mag = 1.0 + hj.abs().max(hc.abs());
    let h = phi.phi.hessian();
    for (name, jet, closed) in [
        ("phi_uu", h[0][0], phi.closed_hessian[0][0]),
        ("phi_uv", h[0][1], phi.closed_hessian[0][1]),
        ("phi_vv", h[1][1], phi.closed_hessian[1][1]),
    ] {
        if (jet - closed).abs() > tol.hess * (1.0 + jet.abs().max(closed.abs())) {
            return Err(Error::ClosedFormMismatch { quantity: name.into(), closed, jet });
        }
    }
    v.check(Check::new("det_hess_phi_closed_minus_jet", hc - hj, Test::Agree, tol.hess * mag, SRC_S1));
    let neg = hj < -tol.crit;
    let pos = hj > tol.crit;
    v.check(Check::new("det_hess_phi", hj, if pos { Test::Positive } else { Test::Negative }, tol.crit, SRC_S1));
    let eex = phi.eta_eta_normal;
    let ind = eex[0].hypot(eex[1]);
    let independent = v.check(Check::new("eta_eta_x_normal_norm", ind, Test::NonZero, tol.crit, SRC_S1));
    v.checks.push(Check::new("eta_eta_x_nu1", eex[0], Test::NonZero, tol.crit, SRC_S1));
    v.checks.push(Check::new("eta_eta_x_nu2", eex[1], Test::NonZero, tol.crit, SRC_S1));
    let f = -phi.alpha_product(local);
    v.check(Check::new(
        "independence_formula_minus_eta_eta_x",
        (f * phi.independence[0] - eex[0]).hypot(f * phi.independence[1] - eex[1]),
        Test::Agree,
        1e-8 * (1.0 + ind),
        SRC_S1,
    ));
    let general = if neg && independent {
        Tag::S1Plus
    } else if pos {
        Tag::S1Minus
    } else {
        Tag::Unclassified
    };

    if let Some(fd) = fr {
        let t11 = local.t(1, 1);
        let value = fd.tau * fd.taub * (fd.k * fd.k + fd.kb * fd.kb) * t11
            - fd.k * fd.kb * (fd.tau * fd.tau + fd.taub * fd.taub);
        let sign = (s.coef_a * s.coef_b).signum();
        let fi = fd.k + sign * fd.kb * t11;
        v.check(Check::new("frenet_s1_value", value, if value > 0.0 { Test::Positive } else { Test::Negative }, tol.crit, SRC_S1_FRENET));
        v.check(Check::new("frenet_independence", fi, Test::NonZero, tol.crit, SRC_S1_FRENET));
        let short = if value < -tol.crit && fi.abs() > tol.crit {
            Tag::S1Plus
        } else if value > tol.crit {
            Tag::S1Minus
        } else {
            Tag::Unclassified
        };
        if short != general {
            v.notes.push(format!("Frenet S1 form gives {short:?}, general form gives {general:?}"));
            return Ok(v);
        }
    }
    if general == Tag::Unclassified {
        v.notes.push("φ is critical but neither S1+ nor S1- conditions hold".into());
    }
    v.tag = general;
    Ok(v)
}

impl PhiData {
    fn alpha_product(&self, local: &Local) -> f64 {
        local.alpha.value() * local.alpha_b.value()
    }
}

/// `α_u ≡ 0` and `α̃_v ≡ 0` on 64 samples of each domain.
fn constant_speed(s: &TranslationSurface) -> (f64, f64) {
    let worst = |c: &crate::curves::FramedCurve| {
        c.sample_params()
            .iter()
            .filter_map(|&t| c.jets(t).ok())
            .map(|j| j.alpha.deriv(1).abs())
            .fold(0.0, f64::max)
    };
    (worst(&s.a) * s.coef_a.abs(), worst(&s.b) * s.coef_b.abs())
}

const SRC_I_EDGE: &str = "dependent case I: cuspidal edge";
const SRC_I_ST: &str = "dependent case I: swallowtail (constant speeds)";
const SRC_I_CCC: &str = "dependent case I: cuspidal cross cap (constant speeds)";
const SRC_I_DEG: &str = "dependent case I: degenerate point is neither lips nor beaks";
const SRC_I_FRENET: &str = "dependent case I, Frenet form";
const SRC_II: &str = "dependent case II: never lips; beaks criterion";
const SRC_III: &str = "dependent case III: never lips; beaks criterion";
const SRC_IV: &str = "dependent case IV: never D4±";

pub fn dependent_case(local: &Local, tol: &Tolerances) -> DependentCase {
    let a0 = local.alpha.value().abs() < tol.sing;
    let b0 = local.alpha_b.value().abs() < tol.sing;
    match (a0, b0) {
        (false, false) => DependentCase::I,
        (true, false) => DependentCase::II,
        (false, true) => DependentCase::III,
        (true, true) => DependentCase::IV,
    }
}

/// Cases I to IV from the closed forms in `θ`.
pub fn classify_dependent_framed(
    s: &TranslationSurface,
    local: &Local,
    framed: &Framed,
    tol: &Tolerances,
) -> Result<Verdict> {
    let mut v = Verdict::new(Route::FramedSurface);
    let q = CaseQuantities::new(local, framed);
    let lam = &framed.lambda;
    let big = &framed.big_lambda;
    match dependent_case(local, tol) {
        DependentCase::I => {
            let lu = big.partial(1, 0);
            let lv = big.partial(0, 1);
            v.check(Check::new("lambda_u_closed_minus_jet", q.t33 * q.p - lu, Test::Agree, 1e-8, SRC_I_EDGE));
            v.check(Check::new("lambda_v_closed_minus_jet", q.q - lv, Test::Agree, 1e-8, SRC_I_EDGE));
            let nondeg = q.p.hypot(q.q) > tol.crit;
            v.hypothesis(Check::new("grad_lambda_norm", q.p.hypot(q.q), Test::NonZero, tol.crit, SRC_I_EDGE));
            if !nondeg {
                v.check(Check::new("m_a", local.ja.m.value(), Test::Zero, tol.hyp, SRC_I_DEG));
                v.check(Check::new("n_a", local.ja.n.value(), Test::Zero, tol.hyp, SRC_I_DEG));
                v.tag = Tag::NeverCuspidalLips;
                v.notes.push("degenerate case I point: neither cuspidal lips nor cuspidal beaks".into());
                return Ok(v);
            }
            let front = v.check(Check::new("front", q.front, Test::NonZero, tol.crit, SRC_I_EDGE));
            let edge = v.check(Check::new("eta_lambda", q.edge, Test::NonZero, tol.crit, SRC_I_EDGE));
            let mut tag = if front && edge { Tag::CuspidalEdge } else { Tag::Unclassified };
            if tag == Tag::Unclassified {
                let (wa, wb) = constant_speed(s);
                let gate = v.hypothesis(Check::new("sup_abs_alpha_u", wa, Test::Zero, 1e-9, SRC_I_ST))
                    & v.hypothesis(Check::new("sup_abs_alpha_b_v", wb, Test::Zero, 1e-9, SRC_I_ST));
                if !gate {
                    v.notes.push("constant-speed hypothesis not met; deferring to the generic route".into());
                } else if front && !edge {
                    let h = big.hessian();
                    v.check(Check::new("lambda_uu_closed_minus_jet", q.lambda_uu - h[0][0], Test::Agree, 1e-6, SRC_I_ST));
                    v.check(Check::new("lambda_uv", h[0][1], Test::Zero, 1e-6, SRC_I_ST));
                    v.check(Check::new("lambda_vv_closed_minus_jet", q.lambda_vv - h[1][1], Test::Agree, 1e-6, SRC_I_ST));
                    let ee = q.alpha_b * q.alpha_b * q.lambda_uu + q.alpha * q.alpha * q.lambda_vv;
                    if v.check(Check::new("eta_eta_lambda", ee, Test::NonZero, tol.crit, SRC_I_ST)) {
                        tag = Tag::Swallowtail;
                    }
                } else if edge && !front {
                    let third = q.alpha * (q.theta_uv * q.q - q.theta_vv * q.t33 * q.p)
                        - q.alpha_b * q.t33 * (q.theta_uu * q.q - q.theta_uv * q.t33 * q.p - q.ell_u * q.q);
                    if v.check(Check::new("cuspidal_cross_cap_third", third, Test::NonZero, tol.crit, SRC_I_CCC)) {
                        tag = Tag::CuspidalCrossCap;
                    }
                }
            }
            // Frenet form, valid for unit-speed Frenet pairs with α = α̃ = 1
            if let Some(fd) = frenet_data(s, local, tol).filter(|_| {
                (q.alpha - 1.0).abs() < tol.hyp && (q.alpha_b - 1.0).abs() < tol.hyp
            }) {
                let t11 = local.t(1, 1);
                let first = fd.tau * (fd.k - fd.kb * t11);
                let second = fd.k + fd.kb * t11;
                let third = -fd.k_u * q.t33 + fd.kb_v * t11;
                let f1 = v.check(Check::new("frenet_first", first, Test::NonZero, tol.crit, SRC_I_FRENET));
                let f2 = v.check(Check::new("frenet_second", second, Test::NonZero, tol.crit, SRC_I_FRENET));
                let f3 = v.check(Check::new("frenet_third", third, Test::NonZero, tol.crit, SRC_I_FRENET));
                let short = match (f1, f2, f3) {
                    (true, true, _) => Tag::CuspidalEdge,
                    (true, false, true) => Tag::Swallowtail,
                    (false, true, true) => Tag::CuspidalCrossCap,
                    _ => Tag::Unclassified,
                };
                if short != tag {
                    v.notes.push(format!("Frenet form gives {short:?}, closed forms give {tag:?}"));
                    v.tag = Tag::Unclassified;
                    return Ok(v);
                }
            }
            v.tag = tag;
        }
        DependentCase::II => {
            let h = lam.hessian();
            let (au, ab) = (q.alpha_u, q.alpha_b);
            v.check(Check::new("lambda_uu_closed_minus_jet", 2.0 * au * ab * q.t33 * q.p - h[0][0], Test::Agree, 1e-6, SRC_II));
            v.check(Check::new("lambda_uv_closed_minus_jet", au * ab * q.q - h[0][1], Test::Agree, 1e-6, SRC_II));
            v.check(Check::new("lambda_vv", h[1][1], Test::Zero, 1e-6, SRC_II));
            let c1 = v.check(Check::new("theta_u_minus_ell", q.theta_u - q.ell, Test::NonZero, tol.crit, SRC_II));
            let c2 = v.check(Check::new("alpha_u", au, Test::NonZero, tol.crit, SRC_II));
            let c3 = v.check(Check::new("p", q.p, Test::NonZero, tol.crit, SRC_II));
            let c4 = v.check(Check::new("q", q.q, Test::NonZero, tol.crit, SRC_II));
            v.tag = if c1 && c2 && c3 && c4 { Tag::CuspidalBeaks } else { Tag::NeverCuspidalLips };
        }
        DependentCase::III => {
            let h = lam.hessian();
            let (a, bv) = (q.alpha, q.alpha_b_v);
            v.check(Check::new("lambda_vv_closed_minus_jet", 2.0 * a * bv * q.q - h[1][1], Test::Agree, 1e-6, SRC_III));
            v.check(Check::new("lambda_uv_closed_minus_jet", a * bv * q.t33 * q.p - h[0][1], Test::Agree, 1e-6, SRC_III));
            v.check(Check::new("lambda_uu", h[0][0], Test::Zero, 1e-6, SRC_III));
            let c1 = v.check(Check::new("theta_v", q.theta_v, Test::NonZero, tol.crit, SRC_III));
            let c2 = v.check(Check::new("alpha_b_v", bv, Test::NonZero, tol.crit, SRC_III));
            let c3 = v.check(Check::new("p", q.p, Test::NonZero, tol.crit, SRC_III));
            let c4 = v.check(Check::new("q", q.q, Test::NonZero, tol.crit, SRC_III));
            v.tag = if c1 && c2 && c3 && c4 { Tag::CuspidalBeaks } else { Tag::NeverCuspidalLips };
        }
        DependentCase::IV => {
            let h = lam.hessian();
            let worst = h[0][0].abs().max(h[0][1].abs()).max(h[1][1].abs());
            v.check(Check::new("max_abs_hess_lambda", worst, Test::Zero, tol.hyp, SRC_IV));
            v.tag = Tag::NeverD4;
        }
    }
    Ok(v)
}

const SRC_FRONT_EDGE: &str = "front criteria: cuspidal edge (front, ηλ ≠ 0)";
const SRC_FRONT_ST: &str = "front criteria: swallowtail (front, ηλ = 0, ηηλ ≠ 0)";
const SRC_FRONT_CCC: &str = "front criteria: cuspidal cross cap (ηλ ≠ 0, φ_x = 0, φ_x' ≠ 0)";
const SRC_LIPS_BEAKS: &str = "front criteria: cuspidal lips / beaks (sign of det Hess λ)";
const SRC_D4: &str = "front criteria: D4± (rank 0, sign of det Hess λ)";

/// Data of the generic route at one point.
struct GenericPoint {
    local: Local,
    framed: Framed,
    /// `det(x_u, x_v, bn)`.
    lambda: BiJet,
    eta: (BiJet, BiJet),
}

fn generic_point(s: &TranslationSurface, u: f64, v: f64, eta_from_u: bool, opts: &ThetaOptions) -> Result<Option<GenericPoint>> {
    let local = s.local_with_degree(u, v, 4)?;
    let theta = match theta_from_local(&local, opts)? {
        ThetaAt::Available(t) => t,
        ThetaAt::Unavailable(_) => return Ok(None),
    };
    Ok(Some(generic_from(local, theta, eta_from_u)))
}

fn generic_from(local: Local, theta: Theta, eta_from_u: bool) -> GenericPoint {
    let framed = Framed::new(&local, theta);
    let lambda = framed.lambda_direct(&local);
    let d = lambda.degree();
    let tr = |x: &Vec3<BiJet>| x.clone().map(|c| c.truncate(d));
    let (xu, xv) = (tr(&local.x_u), tr(&local.x_v));
    let uv = dot(&xu, &xv);
    let eta = if eta_from_u {
        (uv.scale(-1.0), dot(&xu, &xu))
    } else {
        (dot(&xv, &xv), uv.scale(-1.0))
    };
    GenericPoint { local, framed, lambda, eta }
}

impl GenericPoint {
    fn grad(&self) -> Vector2<f64> {
        let g = self.lambda.grad();
        Vector2::new(g[0], g[1])
    }

    fn eta_at(&self) -> Vector2<f64> {
        Vector2::new(self.eta.0.value(), self.eta.1.value())
    }

    /// `det(dx(δ'), bn, dbn(η))` with `δ'` the unit tangent of `λ = 0`
    /// oriented along `reference`.
    fn phi_x(&self, reference: Vector2<f64>) -> Result<(f64, Vector2<f64>)> {
        let g = self.grad();
        let mut tangent = Vector2::new(-g[1], g[0]) / g.norm();
        if tangent.dot(&reference) < 0.0 {
            tangent = -tangent;
        }
        let xu = values3(&self.local.x_u);
        let xv = values3(&self.local.x_v);
        let dx: [f64; 3] = std::array::from_fn(|i| tangent[0] * xu[i] + tangent[1] * xv[i]);
        let bn = values3(&self.framed.bn);
        let bnu = values3(&du3(&self.framed.bn)?);
        let bnv = values3(&dv3(&self.framed.bn)?);
        let e = self.eta_at();
        let dbn: [f64; 3] = std::array::from_fn(|i| e[0] * bnu[i] + e[1] * bnv[i]);
        let m = nalgebra::Matrix3::from_columns(&[Vector3::from(dx), Vector3::from(bn), Vector3::from(dbn)]);
        Ok((m.determinant(), tangent))
    }

    /// Smallest singular value of the differential of `(x, bn)`.
    fn legendrian_sigma_min(&self) -> Result<f64> {
        let xu = values3(&self.local.x_u);
        let xv = values3(&self.local.x_v);
        let bnu = values3(&du3(&self.framed.bn)?);
        let bnv = values3(&dv3(&self.framed.bn)?);
        let m = SMatrix::<f64, 6, 2>::from_fn(|r, c| {
            let col = if c == 0 { (&xu, &bnu) } else { (&xv, &bnv) };
            if r < 3 {
                col.0[r]
            } else {
                col.1[r - 3]
            }
        });
        let sv = m.singular_values();
        Ok(sv[0].min(sv[1]))
    }
}

/// Gauss-Newton onto the zero set of `x_u × x_v`, minimal-norm steps.
fn project_to_singular_set(s: &TranslationSurface, mut p: (f64, f64)) -> Result<(f64, f64)> {
    for _ in 0..40 {
        let l = s.local_with_degree(p.0, p.1, 1)?;
        let c = cross(&l.x_u, &l.x_v);
        let r = Vector3::new(c[0].value(), c[1].value(), c[2].value());
        if r.norm() < 1e-15 {
            break;
        }
        let j = Matrix3x2::from_fn(|i, k| if k == 0 { c[i].partial(1, 0) } else { c[i].partial(0, 1) });
        let svd = j.svd(true, true);
        let cutoff = 1e-10 * svd.singular_values.max();
        let step = -(svd.pseudo_inverse(cutoff).map_err(|e| Error::Input(e.to_string()))? * r);
        p = (p.0 + step[0], p.1 + step[1]);
        if step.norm() < 1e-16 {
            break;
        }
    }
    Ok(p)
}

/// Standard front criteria applied to `λ = det(x_u, x_v, bn)`.
pub fn classify_generic_frontal(
    s: &TranslationSurface,
    u: f64,
    v: f64,
    rank: usize,
    tol: &Tolerances,
) -> Result<Verdict> {
    let mut verdict = generic_frontal(s, u, v, rank, tol)?;
    if verdict.tag == Tag::Unclassified && verdict.notes.is_empty() {
        let failed: Vec<&str> = verdict.checks.iter().filter(|c| !c.satisfied).map(|c| c.name.as_str()).collect();
        verdict.notes.push(format!("no front criterion holds (unsatisfied: {})", failed.join(", ")));
    }
    Ok(verdict)
}

fn generic_frontal(s: &TranslationSurface, u: f64, v: f64, rank: usize, tol: &Tolerances) -> Result<Verdict> {
    let mut verdict = Verdict::new(Route::GenericFrontal);
    let opts = tol.theta_options();
    let l0 = s.local_with_degree(u, v, 1)?;
    let eta_from_u = values3(&l0.x_u).iter().map(|x| x * x).sum::<f64>()
        >= values3(&l0.x_v).iter().map(|x| x * x).sum::<f64>();
    let Some(p0) = generic_point(s, u, v, eta_from_u, &opts)? else {
        verdict.notes.push("θ unavailable".into());
        return Ok(verdict);
    };
    let sigma = p0.legendrian_sigma_min()?;
    let h = p0.lambda.hessian();
    let det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0];

    if rank == 0 {
        let front = verdict.check(Check::new("legendrian_sigma_min", sigma, Test::NonZero, tol.front, SRC_D4));
        verdict.check(Check::new("det_hess_lambda", det_h, if det_h > 0.0 { Test::Positive } else { Test::Negative }, tol.crit, SRC_D4));
        verdict.tag = if !front {
            Tag::Unclassified
        } else if det_h < -tol.crit {
            Tag::D4Plus
        } else if det_h > tol.crit {
            Tag::D4Minus
        } else {
            Tag::Unclassified
        };
        return Ok(verdict);
    }

    let g = p0.grad();
    let eta = &p0.eta;
    let eta_lambda = p0.lambda.along_field(&eta.0, &eta.1)?;
    let eta_eta_lambda = eta_lambda.along_field(&eta.0.truncate(eta_lambda.degree()), &eta.1.truncate(eta_lambda.degree()))?;
    let el = eta_lambda.value();
    let eel = eta_eta_lambda.value();
    let nondeg = verdict.hypothesis(Check::new("grad_lambda_norm", g.norm(), Test::NonZero, tol.crit, SRC_FRONT_EDGE));
    let front = verdict.check(Check::new("legendrian_sigma_min", sigma, Test::NonZero, tol.front, SRC_FRONT_EDGE));

    if !nondeg {
        verdict.check(Check::new("det_hess_lambda", det_h, if det_h > 0.0 { Test::Positive } else { Test::Negative }, tol.crit, SRC_LIPS_BEAKS));
        let ee = verdict.check(Check::new("eta_eta_lambda", eel, Test::NonZero, tol.crit, SRC_LIPS_BEAKS));
        verdict.tag = if !front {
            Tag::Unclassified
        } else if det_h > tol.crit {
            Tag::CuspidalLips
        } else if det_h < -tol.crit && ee {
            Tag::CuspidalBeaks
        } else {
            Tag::Unclassified
        };
        return Ok(verdict);
    }

    let edge = verdict.check(Check::new("eta_lambda", el, Test::NonZero, tol.crit, SRC_FRONT_EDGE));
    if edge {
        if front {
            verdict.tag = Tag::CuspidalEdge;
        }
        // φ_x along the singular curve
        let (phi0, tangent) = p0.phi_x(Vector2::new(-g[1], g[0]))?;
        let step = 1e-4;
        let mut ends = [0.0; 2];
        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
            let guess = (u + sign * step * tangent[0], v + sign * step * tangent[1]);
            let q = project_to_singular_set(s, guess)?;
            let Some(pq) = generic_point(s, q.0, q.1, eta_from_u, &opts)? else {
                verdict.notes.push("θ unavailable along the singular curve".into());
                return Ok(verdict);
            };
            let (val, _) = pq.phi_x(tangent)?;
            // parameter of the projected point along the tangent
            let dt = (q.0 - u) * tangent[0] + (q.1 - v) * tangent[1];
            ends[k] = val;
            if (dt - sign * step).abs() > 1e-2 * step {
                verdict.notes.push(format!("continuation drift {:.3e}", dt - sign * step));
            }
        }
        let dphi = (ends[0] - ends[1]) / (2.0 * step);
        let phi_zero = verdict.check(Check::new("phi_x", phi0, Test::Zero, tol.hyp, SRC_FRONT_CCC));
        let dphi_ok = verdict.check(Check::new("phi_x_derivative", dphi, Test::NonZero, 1e-6, SRC_FRONT_CCC));
        if front == phi_zero {
            verdict.notes.push("front test and φ_x disagree".into());
            verdict.tag = Tag::Unclassified;
            return Ok(verdict);
        }
        if phi_zero && dphi_ok {
            verdict.tag = Tag::CuspidalCrossCap;
        }
        return Ok(verdict);
    }
    let st = verdict.check(Check::new("eta_eta_lambda", eel, Test::NonZero, tol.crit, SRC_FRONT_ST));
    if front && st {
        verdict.tag = Tag::Swallowtail;
    }
    Ok(verdict)
}

/// Full pipeline at one point.
pub fn classify(s: &TranslationSurface, u: f64, v: f64, tol: &Tolerances) -> Result<ClassificationReport> {
    let local = s.local(u, v)?;
    let rank = corank_rank(&local, tol);
    let dependence = local.dependence();
    let mut report = ClassificationReport {
        u,
        v,
        canonical: s.canonical(u, v),
        rank,
        dependence,
        case: None,
        theta: None,
        verdict: Tag::Unclassified,
        routes: vec![],
        notes: vec![],
    };
    if rank == 2 {
        report.verdict = Tag::RegularPoint;
        return Ok(report);
    }
    if dependence >= tol.dep {
        report.verdict = Tag::IndependentConditionDeferred;
        report.notes.push("independent condition: see prior work".into());
        return Ok(report);
    }
    report.case = Some(dependent_case(&local, tol));

    if report.case == Some(DependentCase::I) {
        let g = classify_gfs(s, &local, tol)?;
        let tag = g.tag;
        report.routes.push(g);
        if tag.conclusive() {
            report.verdict = tag;
            return Ok(report);
        }
    }

    let local4 = s.local_with_degree(u, v, 4)?;
    let theta = match theta_from_local(&local4, &tol.theta_options())? {
        ThetaAt::Available(t) => t,
        ThetaAt::Unavailable(reason) => {
            report.notes.push(format!("theta_unavailable: {reason}"));
            return Ok(report);
        }
    };
    report.theta = Some(theta.source.clone());
    let framed = Framed::new(&local, theta);
    let fr = classify_dependent_framed(s, &local, &framed, tol)?;
    let gen = classify_generic_frontal(s, u, v, rank, tol)?;
    let (a, b) = (fr.tag, gen.tag);
    report.routes.push(fr);
    report.routes.push(gen);
    report.verdict = if !a.compatible(b) {
        report.notes.push(format!("routes disagree: framed {a:?}, generic {b:?}"));
        Tag::Unclassified
    } else if a.conclusive() && !matches!(a, Tag::NeverCuspidalLips | Tag::NeverD4) {
        a
    } else if b.conclusive() {
        b
    } else {
        a
    };
    Ok(report)
}

/// Framed-surface invariants at a point, closed form and direct, if `θ` exists.
pub fn fs_invariants_at(
    s: &TranslationSurface,
    u: f64,
    v: f64,
    tol: &Tolerances,
) -> Result<Option<(FsInvariants, FsInvariants)>> {
    let local = s.local_with_degree(u, v, 4)?;
    Ok(match theta_from_local(&local, &tol.theta_options())? {
        ThetaAt::Available(t) => {
            let f = Framed::new(&local, t);
            Some((f.invariants(&local), f.invariants_direct(&local)?))
        }
        ThetaAt::Unavailable(_) => None,
    })
}

/// Singular values of a 2×2 matrix, used for Hessian summaries.
pub fn hessian_eigen_signs(h: [[f64; 2]; 2]) -> (f64, f64) {
    let m = Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1]);
    let e = m.symmetric_eigen().eigenvalues;
    (e[0].min(e[1]), e[0].max(e[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::catalog::*;
    use crate::curves::FramedCurve;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn phi_closed_forms_match_jets_at_generic_dependent_point() {
        let a = FramedCurve::from_exprs("a", "(u + u^2, u^2/2, u^3)", Some("frenet"), (-1.0, 1.0), Default::default()).unwrap();
        let b = FramedCurve::from_exprs("b", "(2*v + v^2, v^3, v^2)", Some("frenet"), (-1.0, 1.0), Default::default()).unwrap();
        let s = TranslationSurface::new(a, b);
        let l = s.local(0.0, 0.0).unwrap();
        assert!(l.dependence() < 1e-14);
        assert!(l.alpha.partial(1, 0).abs() > 0.1);
        let p = PhiData::new(&l).unwrap();
        let h = p.phi.hessian();
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[i][j] - p.closed_hessian[i][j]).abs() < 1e-8 * (1.0 + h[i][j].abs()), "{i}{j}: {h:?} vs {:?}", p.closed_hessian);
            }
        }
        assert!((p.phi.partial(1, 0) - p.closed_phi_u).abs() < 1e-9);
    }

    #[test]
    fn phi_value_closed_form_holds_away_from_singular_points() {
        let (a, b) = catalog_pair("s1p").unwrap();
        let s = TranslationSurface::new(a, b);
        for &(u, v) in &[(0.3, -0.7), (1.1, 0.4)] {
            let l = s.local(u, v).unwrap();
            let p = PhiData::new(&l).unwrap();
            assert!((p.phi.value() - p.closed_value).abs() < 1e-9 * (1.0 + p.closed_value.abs()));
        }
    }

    #[test]
    fn paper_pairs() {
        let (a, b) = catalog_pair("s0").unwrap();
        let r = classify(&TranslationSurface::new(a, b), 0.0, 0.0, &tol()).unwrap();
        assert_eq!(r.verdict, Tag::CrossCap);
        assert!((r.routes[0].value("s0_value").unwrap() + 1.0).abs() < 1e-8);
        let (a, b) = catalog_pair("s1p").unwrap();
        let r = classify(&TranslationSurface::new(a, b), 0.0, 0.0, &tol()).unwrap();
        assert_eq!(r.verdict, Tag::S1Plus, "{r:#?}");
        let (a, b) = catalog_pair("s1m").unwrap();
        let r = classify(&TranslationSurface::new(a, b), 0.0, 0.0, &tol()).unwrap();
        assert_eq!(r.verdict, Tag::S1Minus, "{r:#?}");
    }

    fn dependent(a: FramedCurve, b: FramedCurve, u: f64, v: f64) -> ClassificationReport {
        let s = TranslationSurface::new(a, b);
        classify(&s, u, v, &tol()).unwrap()
    }

    #[test]
    fn case_one_instances_agree_between_routes() {
        let sigma = |sign: f64, v: f64| 2.0 * sign * v.atan();
        let cases = [
            (-1.0, 0.0, Tag::CuspidalEdge),
            (-1.0, 1.0, Tag::Swallowtail),
            (1.0, 1.0, Tag::CuspidalCrossCap),
            (1.0, 0.5, Tag::CuspidalEdge),
        ];
        for (sign, v, want) in cases {
            let r = dependent(unit_helix(0.6).unwrap(), helix_companion(0.6, sign).unwrap(), sigma(sign, v), v);
            assert_eq!(r.case, Some(DependentCase::I));
            assert_eq!(r.verdict, want, "{r:#?}");
            let f = r.route(Route::FramedSurface).unwrap().tag;
            let g = r.route(Route::GenericFrontal).unwrap().tag;
            assert_eq!(f, g, "{r:#?}");
        }
    }

    #[test]
    fn cases_two_to_four() {
        let r = dependent(singular_helix(0.6).unwrap(), helix_companion(0.6, -1.0).unwrap(), 0.0, 0.0);
        assert_eq!(r.case, Some(DependentCase::II));
        assert!(matches!(r.verdict, Tag::CuspidalBeaks | Tag::NeverCuspidalLips), "{r:#?}");
        let r = dependent(unit_helix(0.6).unwrap(), singular_companion(0.6, -1.0).unwrap(), 0.0, 0.0);
        assert_eq!(r.case, Some(DependentCase::III));
        let r = dependent(singular_helix(0.6).unwrap(), singular_companion(0.6, -1.0).unwrap(), 0.0, 0.0);
        assert_eq!(r.case, Some(DependentCase::IV));
        assert_eq!(r.rank, 0);
        let f = r.route(Route::FramedSurface).unwrap();
        assert_eq!(f.tag, Tag::NeverD4);
        assert!(f.checks[0].satisfied);
    }

    #[test]
    fn regular_and_independent_points() {
        let (a, b) = catalog_pair("s0").unwrap();
        let s = TranslationSurface::new(a, b);
        assert_eq!(classify(&s, 0.5, 0.2, &tol()).unwrap().verdict, Tag::RegularPoint);
        let r = dependent(singular_helix(0.6).unwrap(), unit_helix(0.6).unwrap(), 0.0, 1.0);
        assert_eq!(r.verdict, Tag::IndependentConditionDeferred);
    }
}
