//! Translation surfaces as framed surfaces: the angle field `θ` with
//! `t32 cos θ + t31 sin θ = 0`, the unit normal `bn = sin θ ν1 + cos θ ν2`,
//! the framed-surface invariants, the discriminant and the front test.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curves::expr::Expr;
use crate::error::{Error, Result};
use crate::jets::{
    add3, cross, det3, dot, du3, dv3, scale3, values3, BiJet, Taylor, Vec3,
};
use crate::surface::{Local, TranslationSurface};

#[derive(Debug, Clone, Copy)]
pub struct ThetaOptions {
    /// Allowed residual of `t32 cos θ + t31 sin θ`.
    pub theta_tol: f64,
    /// Agreement of directional limits (mod π) at zeros of `(t31, t32)`.
    pub theta_dir_tol: f64,
    /// Below this `hypot(t31, t32)` the limit extension is used.
    pub near_zero: f64,
    /// Number of directions on a half circle for the limit extension.
    pub directions: usize,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions { theta_tol: 1e-8, theta_dir_tol: 1e-6, near_zero: 1e-6, directions: 16 }
    }
}

/// How `θ` was obtained at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ThetaSource {
    ClosedForm { expression: String },
    Atan2Branch,
    LimitExtension { vanishing_order: usize, directions: usize, fit_residual: f64 },
}

/// `θ` with derivatives at one point.
#[derive(Debug, Clone)]
pub struct Theta {
    pub jet: BiJet,
    pub source: ThetaSource,
    /// `|t32 cos θ + t31 sin θ|` at the point.
    pub residual: f64,
}

/// Result of trying to build `θ` at a point. Unavailability is a value.
#[derive(Debug, Clone)]
pub enum ThetaAt {
    Available(Theta),
    Unavailable(String),
}

impl ThetaAt {
    pub fn available(self) -> Option<Theta> {
        match self {
            ThetaAt::Available(t) => Some(t),
            ThetaAt::Unavailable(_) => None,
        }
    }
}

/// A user-supplied `θ(u, v)`.
#[derive(Debug, Clone)]
pub struct ThetaExpr {
    pub source: String,
    expr: Expr,
}

impl ThetaExpr {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(ThetaExpr { source: src.to_string(), expr: Expr::parse(src, &["u", "v"])? })
    }

    pub fn eval(&self, u: f64, v: f64, degree: usize) -> Result<BiJet> {
        let (bu, bv) = (BiJet::var_u((u, v), degree), BiJet::var_v((u, v), degree));
        self.expr.eval(
            &|name| match name {
                "u" => Some(bu.clone()),
                "v" => Some(bv.clone()),
                _ => None,
            },
            &bu,
        )
    }
}

/// Degree of the frame-matrix jets used for the limit extension; one more
/// than the θ degree because dividing out the zero costs an order.
const EXTENSION_DEGREE: usize = 4;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn equation_residual(t: &[[BiJet; 3]; 3], theta: f64) -> f64 {
    (t[2][1].value() * theta.cos() + t[2][0].value() * theta.sin()).abs()
}

/// Builds `θ` at `(u, v)`.
///
/// Away from zeros of `(t31, t32)` this is `atan2(-t32, t31)`. At a zero,
/// `t31` and `t32` are restricted to lines through the point, the common
/// vanishing factor is divided out and the limits along all directions must
/// agree modulo π. The derivatives are then fitted from the directional jets.
pub fn theta_at(s: &TranslationSurface, u: f64, v: f64, opts: &ThetaOptions) -> Result<ThetaAt> {
    let local = s.local_with_degree(u, v, EXTENSION_DEGREE)?;
    theta_from_local(&local, opts)
}

pub fn theta_from_local(local: &Local, opts: &ThetaOptions) -> Result<ThetaAt> {
    let t = &local.t;
    let (t31, t32) = (&t[2][0], &t[2][1]);
    let degree = t31.degree();
    if t31.value().hypot(t32.value()) > opts.near_zero {
        let jet = t32.scale(-1.0).atan2(t31)?.truncate(degree.min(3));
        let residual = equation_residual(t, jet.value());
        return Ok(ThetaAt::Available(Theta { jet, source: ThetaSource::Atan2Branch, residual }));
    }
    extend_theta(local, opts)
}

fn extend_theta(local: &Local, opts: &ThetaOptions) -> Result<ThetaAt> {
    let (t31, t32) = (&local.t[2][0], &local.t[2][1]);
    let degree = t31.degree();
    let base = t31.base_point();
    let dirs: Vec<(f64, f64)> = (0..opts.directions)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / opts.directions as f64 + 0.1;
            (a.cos(), a.sin())
        })
        .collect();
    let restricted: Vec<_> = dirs.iter().map(|&d| (t31.along(d), t32.along(d))).collect();

    let magnitude = |k: usize| {
        restricted.iter().map(|(a, b)| a.deriv(k).hypot(b.deriv(k))).fold(0.0, f64::max)
    };
    let Some(k) = (1..degree).find(|&k| magnitude(k) > 1e-8) else {
        return Ok(ThetaAt::Unavailable(
            "t31 and t32 vanish to high order; no directional limit".into(),
        ));
    };
    let max_mag = magnitude(k);

    let mut thetas = Vec::new();
    for (d, (a, b)) in dirs.iter().zip(&restricted) {
        if a.deriv(k).hypot(b.deriv(k)) < 1e-3 * max_mag {
            continue;
        }
        let (a, b) = (a.divide_by_power(k)?, b.divide_by_power(k)?);
        thetas.push((*d, b.scale(-1.0).atan2(&a)?));
    }
    if thetas.len() < 3 {
        return Ok(ThetaAt::Unavailable("too few usable directions".into()));
    }
    let reference = thetas[0].1.value();
    let mut worst: f64 = 0.0;
    for (_, th) in thetas.iter_mut() {
        let shift = ((th.value() - reference) / std::f64::consts::PI).round();
        *th = th.offset(-shift * std::f64::consts::PI);
        worst = worst.max((th.value() - reference).abs());
    }
    if worst > opts.theta_dir_tol {
        return Ok(ThetaAt::Unavailable(format!(
            "no continuous θ: directional limits of atan2(-t32, t31) differ by {worst:.3e}"
        )));
    }

    let out_degree = (degree - k).min(3);
    let mut jet = BiJet::zero(base, out_degree);
    jet.set_partial(0, 0, thetas.iter().map(|(_, t)| t.value()).sum::<f64>() / thetas.len() as f64);
    let mut fit_residual: f64 = 0.0;
    for j in 1..=out_degree {
        let a = DMatrix::from_fn(thetas.len(), j + 1, |r, i| {
            let d = thetas[r].0;
            binomial(j, i) * d.0.powi(i as i32) * d.1.powi((j - i) as i32)
        });
        let b = DVector::from_fn(thetas.len(), |r, _| thetas[r].1.deriv(j));
        let x = a
            .clone()
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|e| Error::ThetaUnavailable { u: base.0, v: base.1, reason: e.to_string() })?;
        let scale = 1.0 + b.amax();
        fit_residual = fit_residual.max((&a * &x - &b).amax() / scale);
        for i in 0..=j {
            jet.set_partial(i, j - i, x[i]);
        }
    }
    if fit_residual > opts.theta_dir_tol {
        return Ok(ThetaAt::Unavailable(format!(
            "directional derivatives of θ are not those of a smooth function (misfit {fit_residual:.3e})"
        )));
    }
    let residual = equation_residual(&local.t, jet.value());
    Ok(ThetaAt::Available(Theta {
        jet,
        source: ThetaSource::LimitExtension {
            vanishing_order: k,
            directions: thetas.len(),
            fit_residual,
        },
        residual,
    }))
}

/// `θ` from a user expression, checked against the defining equation.
pub fn theta_from_expr(
    s: &TranslationSurface,
    expr: &ThetaExpr,
    u: f64,
    v: f64,
    opts: &ThetaOptions,
) -> Result<Theta> {
    let local = s.local_with_degree(u, v, 3)?;
    let jet = expr.eval(u, v, 3)?;
    let residual = equation_residual(&local.t, jet.value());
    if residual > opts.theta_tol {
        return Err(Error::ThetaResidual { u, v, residual });
    }
    Ok(Theta {
        jet,
        source: ThetaSource::ClosedForm { expression: expr.source.clone() },
        residual,
    })
}

/// One node of a θ grid dump.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThetaSample {
    pub u: f64,
    pub v: f64,
    /// NaN where θ is unavailable.
    pub theta: f64,
    pub residual: f64,
}

/// θ on an `n × n` grid, unwrapped modulo π along a serpentine path so
/// adjacent samples differ by less than π/2.
pub fn theta_grid(
    s: &TranslationSurface,
    window: [f64; 4],
    n: usize,
    opts: &ThetaOptions,
    user: Option<&ThetaExpr>,
) -> Result<Vec<ThetaSample>> {
    let n = n.max(2);
    let mut out = Vec::with_capacity(n * n);
    let mut last: Option<f64> = None;
    for j in 0..n {
        let v = window[2] + (window[3] - window[2]) * j as f64 / (n - 1) as f64;
        let cols: Vec<usize> = if j % 2 == 0 { (0..n).collect() } else { (0..n).rev().collect() };
        let mut row = Vec::with_capacity(n);
        for i in cols {
            let u = window[0] + (window[1] - window[0]) * i as f64 / (n - 1) as f64;
            let th = match user {
                Some(e) => Some(theta_from_expr(s, e, u, v, opts)?),
                None => theta_at(s, u, v, opts)?.available(),
            };
            let sample = match th {
                Some(th) => {
                    let mut value = th.jet.value();
                    if user.is_none() {
                        if let Some(prev) = last {
                            value -= ((value - prev) / std::f64::consts::PI).round() * std::f64::consts::PI;
                        }
                    }
                    last = Some(value);
                    ThetaSample { u, v, theta: value, residual: th.residual }
                }
                None => ThetaSample { u, v, theta: f64::NAN, residual: f64::NAN },
            };
            row.push((i, sample));
        }
        row.sort_by_key(|(i, _)| *i);
        out.extend(row.into_iter().map(|(_, s)| s));
    }
    Ok(out)
}

pub fn theta_csv(samples: &[ThetaSample]) -> String {
    let mut out = String::from("u,v,theta,residual\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::report::fmt17(s.u),
            crate::report::fmt17(s.v),
            crate::report::fmt17(s.theta),
            crate::report::fmt17(s.residual)
        ));
    }
    out
}

/// Invariants of the framed surface `(x, bn, μ)` with `bt = bn × μ`:
/// `x_u = a1 μ + b1 bt`, `x_v = a2 μ + b2 bt`, `bn_u = e1 μ + f1 bt`, and so on.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct FsInvariants {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub e1: f64,
    pub f1: f64,
    pub g1: f64,
    pub e2: f64,
    pub f2: f64,
    pub g2: f64,
    pub jf: f64,
    pub kf: f64,
    pub hf: f64,
}

impl FsInvariants {
    fn curvature(mut self) -> Self {
        self.jf = self.a1 * self.b2 - self.a2 * self.b1;
        self.kf = self.e1 * self.f2 - self.e2 * self.f1;
        self.hf = -0.5 * ((self.a1 * self.f2 - self.a2 * self.f1) - (self.b1 * self.e2 - self.b2 * self.e1));
        self
    }

    pub fn max_difference(&self, o: &FsInvariants) -> f64 {
        [
            self.a1 - o.a1,
            self.b1 - o.b1,
            self.a2 - o.a2,
            self.b2 - o.b2,
            self.e1 - o.e1,
            self.f1 - o.f1,
            self.g1 - o.g1,
            self.e2 - o.e2,
            self.f2 - o.f2,
            self.g2 - o.g2,
            self.jf - o.jf,
            self.kf - o.kf,
            self.hf - o.hf,
        ]
        .into_iter()
        .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Everything the framed route needs at one point.
#[derive(Debug, Clone)]
pub struct Framed {
    pub theta: Theta,
    pub sin: BiJet,
    pub cos: BiJet,
    pub bn: Vec3<BiJet>,
    pub bt: Vec3<BiJet>,
    /// `-t32 sin θ + t31 cos θ`.
    pub big_lambda: BiJet,
    /// `α α̃ Λ`.
    pub lambda: BiJet,
}

impl Framed {
    pub fn new(local: &Local, theta: Theta) -> Self {
        let d = theta.jet.degree().min(local.t[0][0].degree());
        let th = theta.jet.truncate(d);
        let (sin, cos) = (th.sin(), th.cos());
        let tr = |x: &Vec3<BiJet>| x.clone().map(|c| c.truncate(d));
        let (nu1, nu2) = (tr(&local.nu1), tr(&local.nu2));
        let bn = add3(&scale3(&nu1, &sin), &scale3(&nu2, &cos));
        let bt = add3(&scale3(&nu1, &cos), &scale3(&nu2, &sin.scale(-1.0)));
        let big_lambda = local.t[2][0].truncate(d).mul_t(&cos).sub_t(&local.t[2][1].truncate(d).mul_t(&sin));
        let lambda = local.alpha.truncate(d).mul_t(&local.alpha_b.truncate(d)).mul_t(&big_lambda);
        Framed { theta, sin, cos, bn, bt, big_lambda, lambda }
    }

    /// Closed-form invariants.
    pub fn invariants(&self, local: &Local) -> FsInvariants {
        let k = local.ja.curvature();
        let (s, c) = (self.sin.value(), self.cos.value());
        let (al, ab) = (local.alpha.value(), local.alpha_b.value());
        let g = self.theta.jet.grad();
        FsInvariants {
            a1: al,
            b1: 0.0,
            a2: ab * local.t(3, 3),
            b2: ab * self.big_lambda.value(),
            e1: k.m * s + k.n * c,
            f1: g[0] - k.ell,
            g1: k.n * s - k.m * c,
            e2: 0.0,
            f2: g[1],
            g2: 0.0,
            jf: 0.0,
            kf: 0.0,
            hf: 0.0,
        }
        .curvature()
    }

    /// The same invariants from dot products of the vector jets.
    pub fn invariants_direct(&self, local: &Local) -> Result<FsInvariants> {
        let mu = values3(&local.mu);
        let bt = values3(&self.bt);
        let d = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let (xu, xv) = (values3(&local.x_u), values3(&local.x_v));
        let (bnu, bnv) = (values3(&du3(&self.bn)?), values3(&dv3(&self.bn)?));
        let (btu, btv) = (values3(&du3(&self.bt)?), values3(&dv3(&self.bt)?));
        Ok(FsInvariants {
            a1: d(&xu, &mu),
            b1: d(&xu, &bt),
            a2: d(&xv, &mu),
            b2: d(&xv, &bt),
            e1: d(&bnu, &mu),
            f1: d(&bnu, &bt),
            g1: -d(&btu, &mu),
            e2: d(&bnv, &mu),
            f2: d(&bnv, &bt),
            g2: -d(&btv, &mu),
            jf: 0.0,
            kf: 0.0,
            hf: 0.0,
        }
        .curvature())
    }

    /// `det(x_u, x_v, bn)` from the vector jets.
    pub fn lambda_direct(&self, local: &Local) -> BiJet {
        let d = self.bn[0].degree();
        let tr = |x: &Vec3<BiJet>| x.clone().map(|c| c.truncate(d));
        det3(&tr(&local.x_u), &tr(&local.x_v), &self.bn)
    }

    /// `|bn|² - 1`, `bn·x_u`, `bn·x_v` at the point.
    pub fn normal_residual(&self, local: &Local) -> f64 {
        let bn = values3(&self.bn);
        let d = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        [d(&bn, &bn) - 1.0, d(&bn, &values3(&local.x_u)), d(&bn, &values3(&local.x_v))]
            .into_iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Unit normal of the Legendrian lift check: `bn × μ` equals `bt`.
    pub fn frame_residual(&self, local: &Local) -> f64 {
        let c = values3(&cross(&self.bn, &local.mu.clone().map(|x| x.truncate(self.bn[0].degree()))));
        let bt = values3(&self.bt);
        (0..3).fold(0.0, |m, i| m.max((c[i] - bt[i]).abs()))
    }

    /// `ν1·bn`-type sanity: `bn·μ = 0`.
    pub fn normal_dot_mu(&self, local: &Local) -> f64 {
        let d = self.bn[0].degree();
        dot(&self.bn, &local.mu.clone().map(|x| x.truncate(d))).value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontStatus {
    Front,
    FrontalOnly,
}

/// Legendrian-immersion test at a singular point: `H^F ≠ 0` at rank 1,
/// `K^F ≠ 0` at rank 0.
pub fn front_test(inv: &FsInvariants, rank: usize, front_tol: f64) -> (FrontStatus, f64) {
    let witness = if rank == 0 { inv.kf } else { inv.hf };
    let status = if witness.abs() > front_tol { FrontStatus::Front } else { FrontStatus::FrontalOnly };
    (status, witness)
}

/// Values at a dependent point used by the case criteria.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CaseQuantities {
    pub sin: f64,
    pub cos: f64,
    pub t33: f64,
    pub alpha: f64,
    pub alpha_b: f64,
    pub alpha_u: f64,
    pub alpha_b_v: f64,
    pub theta_u: f64,
    pub theta_v: f64,
    pub theta_uu: f64,
    pub theta_uv: f64,
    pub theta_vv: f64,
    pub ell: f64,
    pub ell_u: f64,
    /// `-n sin θ + m cos θ`, so `Λ_u = t33·P` at the point.
    pub p: f64,
    /// `(m̃ t12 + ñ t22) sin θ - (m̃ t11 + ñ t21) cos θ = Λ_v`.
    pub q: f64,
    /// `α θ_v - α̃ t33 (θ_u - ℓ)`.
    pub front: f64,
    /// `α̃ P - α Q`.
    pub edge: f64,
    /// Closed form of `Λ_uu`.
    pub lambda_uu: f64,
    /// Closed form of `Λ_vv`.
    pub lambda_vv: f64,
}

impl CaseQuantities {
    pub fn new(local: &Local, framed: &Framed) -> Self {
        let (ja, jb) = (&local.ja, &local.jb);
        let (s, c) = (framed.sin.value(), framed.cos.value());
        let t = |i, j| local.t(i, j);
        let (m, n) = (ja.m.value(), ja.n.value());
        let (mb, nb, lb) = (jb.m.value(), jb.n.value(), jb.ell.value());
        let (mbv, nbv) = (jb.m.deriv(1), jb.n.deriv(1));
        let th = &framed.theta.jet;
        let h = if th.degree() >= 2 { th.hessian() } else { [[f64::NAN; 2]; 2] };
        let p = -n * s + m * c;
        let q = (mb * t(1, 2) + nb * t(2, 2)) * s - (mb * t(1, 1) + nb * t(2, 1)) * c;
        let (al, ab) = (local.alpha.value(), local.alpha_b.value());
        let ell = ja.ell.value();
        CaseQuantities {
            sin: s,
            cos: c,
            t33: t(3, 3),
            alpha: al,
            alpha_b: ab,
            alpha_u: local.alpha.partial(1, 0),
            alpha_b_v: local.alpha_b.partial(0, 1),
            theta_u: th.partial(1, 0),
            theta_v: th.partial(0, 1),
            theta_uu: h[0][0],
            theta_uv: h[0][1],
            theta_vv: h[1][1],
            ell,
            ell_u: ja.ell.deriv(1),
            p,
            q,
            front: al * th.partial(0, 1) - ab * t(3, 3) * (th.partial(1, 0) - ell),
            edge: ab * p - al * q,
            lambda_uu: t(3, 3) * (-ja.n.deriv(1) * s + ja.m.deriv(1) * c),
            lambda_vv: ((mbv - lb * nb) * t(1, 2) + (nbv + lb * mb) * t(2, 2)) * s
                - ((mbv - lb * nb) * t(1, 1) + (nbv + lb * mb) * t(2, 1)) * c,
        }
    }
}

/// Residuals of the relations obtained by differentiating
/// `t32 cos θ + t31 sin θ = 0` at a dependent point. Entries 0..9 hold
/// relations (1)..(9); `None` when the needed derivatives are missing.
///
/// (7) is the `∂u∂u∂v` derivative reduced with (1), (2); it carries no `mn`
/// terms. (8) is the `∂u∂v∂v` derivative with `t11, t21` in the cosine
/// bracket and `t12, t22` in the sine bracket.
pub fn lemma_residuals(local: &Local, theta: &BiJet) -> [Option<f64>; 9] {
    let (ja, jb) = (&local.ja, &local.jb);
    let t = |i, j| local.t(i, j);
    let (s, c) = (theta.value().sin(), theta.value().cos());
    let (l, m, n) = (ja.ell.value(), ja.m.value(), ja.n.value());
    let (lu, mu, nu) = (ja.ell.deriv(1), ja.m.deriv(1), ja.n.deriv(1));
    let (muu, nuu) = (ja.m.deriv(2), ja.n.deriv(2));
    let (lb, mb, nb) = (jb.ell.value(), jb.m.value(), jb.n.value());
    let (lbv, mbv, nbv) = (jb.ell.deriv(1), jb.m.deriv(1), jb.n.deriv(1));
    let (mbvv, nbvv) = (jb.m.deriv(2), jb.n.deriv(2));
    let (thu, thv) = (theta.partial(1, 0), theta.partial(0, 1));
    let second = theta.degree() >= 2;
    let (thuu, thuv, thvv) = if second {
        (theta.partial(2, 0), theta.partial(1, 1), theta.partial(0, 2))
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let a1 = mb * t(1, 1) + nb * t(2, 1);
    let a2 = mb * t(1, 2) + nb * t(2, 2);
    let r1 = m * s + n * c;
    let r2 = -a2 * c - a1 * s;
    let r3 = (l * n + mu - 2.0 * n * thu) * s + (-l * m + nu + 2.0 * m * thu) * c;
    let r4 = ((l - thu) * a1 + thv * m * t(3, 3)) * c - ((l - thu) * a2 + thv * n * t(3, 3)) * s;
    let r5 = ((-mbv + lb * nb) * t(1, 2) - (lb * mb + nbv) * t(2, 2) - 2.0 * a1 * thv) * c
        + ((-mbv + lb * nb) * t(1, 1) - (lb * mb + nbv) * t(2, 1) + 2.0 * a2 * thv) * s;
    let mut out = [Some(r1), Some(r2), Some(r3), Some(r4), Some(r5), None, None, None, None];
    if second {
        let r6 = (3.0 * (thuu * m + thu * mu) - l * mu + nuu - 2.0 * lu * m) * c
            - (3.0 * (thuu * n + thu * nu) - l * nu - muu - 2.0 * lu * n) * s;
        let r7 = ((lu - thuu) * a1 + (thv * (l * n + mu) + 2.0 * thuv * m) * t(3, 3)) * c
            - ((lu - thuu) * a2 + (thv * (-l * m + nu) + 2.0 * thuv * n) * t(3, 3)) * s;
        let w = lb * nb - mbv;
        let z = lb * mb + nbv;
        let r8 = ((2.0 * thuv * mb - w * (thu - l)) * t(1, 1) + (2.0 * thuv * nb + z * (thu - l)) * t(2, 1)
            - thvv * m * t(3, 3))
            * c
            - ((2.0 * thuv * mb - w * (thu - l)) * t(1, 2) + (2.0 * thuv * nb + z * (thu - l)) * t(2, 2)
                - thvv * n * t(3, 3))
                * s;
        let y1 = lbv * nb - mbvv + 2.0 * lb * nbv;
        let y2 = lbv * mb + nbvv + 2.0 * lb * mbv;
        let r9 = (3.0 * (thv * w - thvv * mb) * t(1, 1) + y1 * t(1, 2) - 3.0 * (thv * z + thvv * nb) * t(2, 1)
            - y2 * t(2, 2))
            * c
            + (y1 * t(1, 1) - 3.0 * (thv * w - thvv * mb) * t(1, 2) - y2 * t(2, 1)
                + 3.0 * (thv * z + thvv * nb) * t(2, 2))
                * s;
        out[5] = Some(r6);
        out[6] = Some(r7);
        out[7] = Some(r8);
        out[8] = Some(r9);
    }
    out
}

/// The same relations specialised to arc-length Frenet frames, in terms of
/// curvature and torsion. Entries 0..9 hold items (1)..(9); item (1) is
/// reported as `sin θ`.
pub fn frenet_theta_residuals(s: &TranslationSurface, local: &Local, theta: &BiJet) -> Result<[Option<f64>; 9]> {
    let (ka, ta) = s.a.kappa_tau(local.u)?;
    let (kb, tb) = s.b.kappa_tau(local.v)?;
    let t = |i, j| local.t(i, j);
    let (k, tau, ku, tauu) = (ka.value(), ta.value(), ka.deriv(1), ta.deriv(1));
    let (kt, taut, ktv, tautv) = (kb.value(), tb.value(), kb.deriv(1), tb.deriv(1));
    let (thu, thv) = (theta.partial(1, 0), theta.partial(0, 1));
    let mut out = [
        Some(theta.value().sin()),
        Some(t(1, 2)),
        Some(thu - tau / 2.0),
        Some(kt * (tau - thu) * t(1, 1) + thv * k * t(3, 3)),
        Some(taut * t(2, 2) + 2.0 * t(1, 1) * thv),
        None,
        None,
        None,
        None,
    ];
    if theta.degree() >= 2 {
        let (thuu, thuv, thvv) = (theta.partial(2, 0), theta.partial(1, 1), theta.partial(0, 2));
        out[5] = Some(3.0 * thuu * k + 0.5 * tau * ku - 2.0 * tauu * k);
        out[6] = Some(kt * t(1, 1) * (thuu - tauu) - (thv * ku + 2.0 * thuv * k) * t(3, 3));
        out[7] = Some((2.0 * thuv * kt + ktv * (thu - tau)) * t(1, 1) - thvv * k * t(3, 3));
        out[8] = Some(3.0 * (thv * ktv + thvv * kt) * t(1, 1) + (tautv * kt + 2.0 * taut * ktv) * t(2, 2));
    }
    Ok(out)
}
