//! Translation surfaces `x(u, v) = a·γ(u) + b·γ̃(v)` and their singular sets.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{CurveJets, FramedCurve};
use crate::error::{Error, Result};
use crate::framefield::{matrix_jets, FrameField, MatrixJets};
use crate::jets::{scale3c, values3, BiJet, Jet, Taylor, Vec3, DEFAULT_DEGREE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfSign {
    Plus,
    Minus,
}

impl std::str::FromStr for SelfSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(SelfSign::Plus),
            "minus" | "-" => Ok(SelfSign::Minus),
            other => Err(Error::Input(format!("self sign must be plus or minus, got `{other}`"))),
        }
    }
}

/// `x(u, v) = coef_a·γ(u) + coef_b·γ̃(v)`, framed by the frame of curve A.
#[derive(Debug, Clone)]
pub struct TranslationSurface {
    pub a: FramedCurve,
    pub b: FramedCurve,
    pub coef_a: f64,
    pub coef_b: f64,
    pub self_sign: Option<SelfSign>,
}

impl TranslationSurface {
    pub fn new(a: FramedCurve, b: FramedCurve) -> Self {
        TranslationSurface { a, b, coef_a: 1.0, coef_b: 1.0, self_sign: None }
    }

    /// `(γ(u) ± γ(v)) / 2`.
    pub fn self_translation(c: FramedCurve, sign: SelfSign) -> Self {
        let s = match sign {
            SelfSign::Plus => 0.5,
            SelfSign::Minus => -0.5,
        };
        TranslationSurface { a: c.clone(), b: c, coef_a: 0.5, coef_b: s, self_sign: Some(sign) }
    }

    pub fn field(&self) -> FrameField {
        FrameField::new(self.a.clone(), self.b.clone())
    }

    pub fn point(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        let (p, q) = (self.a.point(u)?, self.b.point(v)?);
        Ok(std::array::from_fn(|i| self.coef_a * p[i] + self.coef_b * q[i]))
    }

    pub fn local(&self, u: f64, v: f64) -> Result<Local> {
        self.local_with_degree(u, v, DEFAULT_DEGREE)
    }

    pub fn local_with_degree(&self, u: f64, v: f64, degree: usize) -> Result<Local> {
        let ja = self.a.jets(u)?;
        let jb = self.b.jets(v)?;
        Ok(Local::new(ja, jb, self.coef_a, self.coef_b, degree))
    }

    /// Reduced parameters when both curves are periodic.
    pub fn canonical(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        match (self.a.period, self.b.period) {
            (Some(_), Some(_)) => Some((self.a.canonical(u), self.b.canonical(v))),
            _ => None,
        }
    }
}

/// Jets of every surface quantity at one parameter point.
#[derive(Debug, Clone)]
pub struct Local {
    pub u: f64,
    pub v: f64,
    pub coef_a: f64,
    pub coef_b: f64,
    /// Unscaled curve data.
    pub ja: CurveJets,
    pub jb: CurveJets,
    pub t: MatrixJets,
    /// Scaled speeds `coef·α`.
    pub alpha: BiJet,
    pub alpha_b: BiJet,
    pub x_u: Vec3<BiJet>,
    pub x_v: Vec3<BiJet>,
    pub nu1: Vec3<BiJet>,
    pub nu2: Vec3<BiJet>,
    pub mu: Vec3<BiJet>,
    pub mu_b: Vec3<BiJet>,
}

fn lift_u(x: &Vec3<Jet>, v0: f64, d: usize) -> Vec3<BiJet> {
    std::array::from_fn(|i| BiJet::from_u(&x[i], v0, d))
}

fn lift_v(x: &Vec3<Jet>, u0: f64, d: usize) -> Vec3<BiJet> {
    std::array::from_fn(|i| BiJet::from_v(&x[i], u0, d))
}

impl Local {
    pub fn new(ja: CurveJets, jb: CurveJets, coef_a: f64, coef_b: f64, degree: usize) -> Self {
        let (u, v) = (ja.t, jb.t);
        Local {
            u,
            v,
            coef_a,
            coef_b,
            t: matrix_jets(&ja, &jb, degree),
            alpha: BiJet::from_u(&ja.alpha, v, degree).scale(coef_a),
            alpha_b: BiJet::from_v(&jb.alpha, u, degree).scale(coef_b),
            x_u: scale3c(&lift_u(&ja.velocity, v, degree), coef_a),
            x_v: scale3c(&lift_v(&jb.velocity, u, degree), coef_b),
            nu1: lift_u(&ja.nu1, v, degree),
            nu2: lift_u(&ja.nu2, v, degree),
            mu: lift_u(&ja.mu, v, degree),
            mu_b: lift_v(&jb.mu, u, degree),
            ja,
            jb,
        }
    }

    pub fn t(&self, i: usize, j: usize) -> f64 {
        self.t[i - 1][j - 1].value()
    }

    /// `|μ × μ̃| = hypot(t31, t32)`.
    pub fn dependence(&self) -> f64 {
        self.t(3, 1).hypot(self.t(3, 2))
    }

    /// Singular values of `[x_u | x_v]`, largest first.
    pub fn dx_singular_values(&self) -> (f64, f64) {
        let (a, b) = (values3(&self.x_u), values3(&self.x_v));
        let m = nalgebra::Matrix3x2::new(a[0], b[0], a[1], b[1], a[2], b[2]);
        let s = m.singular_values();
        (s[0].max(s[1]), s[0].min(s[1]))
    }

    pub fn gfs(&self) -> GfsInvariants {
        let (al, ab) = (self.alpha.value(), self.alpha_b.value());
        let k = self.ja.curvature();
        GfsInvariants {
            first: [[0.0, 0.0, al], [ab * self.t(3, 1), ab * self.t(3, 2), ab * self.t(3, 3)]],
            second: [[k.ell, k.m, k.n], [0.0, 0.0, 0.0]],
            a: -al * ab * self.t(3, 2),
            b: al * ab * self.t(3, 1),
            c: 0.0,
        }
    }
}

/// Basic invariants of `(x, ν1, ν2)`: `x_u, x_v` and the frame derivatives
/// in the frame `(ν1, ν2, μ)`, and the coefficients of `x_u × x_v`.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct GfsInvariants {
    /// Rows `(a1, b1, c1)` and `(a2, b2, c2)`.
    pub first: [[f64; 3]; 2],
    /// Rows `(e1, f1, g1)` and `(e2, f2, g2)`.
    pub second: [[f64; 3]; 2],
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Which of the singularity conditions hold at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Condition {
    /// `α(u) = 0`.
    #[serde(rename = "i")]
    SingularA,
    /// `α̃(v) = 0`.
    #[serde(rename = "ii")]
    SingularB,
    /// `t31 = t32 = 0`.
    #[serde(rename = "iii")]
    Dependent,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::SingularA => "i",
            Condition::SingularB => "ii",
            Condition::Dependent => "iii",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dependence {
    Dependent,
    Independent,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SingularPoint {
    pub u: f64,
    pub v: f64,
    pub conditions: Vec<Condition>,
    pub dependence: Dependence,
    pub isolated: bool,
    /// Largest of the residuals of the conditions that hold.
    pub residual: f64,
    /// `(u, v)` reduced modulo the curve periods, when both are periodic.
    pub canonical: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// `[u0, u1, v0, v1]`.
    pub window: [f64; 4],
    pub grid: usize,
    pub sing_tol: f64,
    pub dep_tol: f64,
}

impl ScanOptions {
    pub fn new(window: [f64; 4], grid: usize) -> Self {
        ScanOptions { window, grid, sing_tol: 1e-8, dep_tol: 1e-8 }
    }

    fn spacing(&self) -> f64 {
        let n = (self.grid.max(2) - 1) as f64;
        ((self.window[1] - self.window[0]) / n).max((self.window[3] - self.window[2]) / n)
    }

    fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let n = (self.grid.max(2) - 1) as f64;
        (
            self.window[0] + (self.window[1] - self.window[0]) * i as f64 / n,
            self.window[2] + (self.window[3] - self.window[2]) * j as f64 / n,
        )
    }

    fn inside(&self, u: f64, v: f64) -> bool {
        let eps = 1e-9 * (1.0 + self.spacing());
        u >= self.window[0] - eps
            && u <= self.window[1] + eps
            && v >= self.window[2] - eps
            && v <= self.window[3] + eps
    }
}

fn pinv_step(j: &Matrix2<f64>, r: &Vector2<f64>) -> Vector2<f64> {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = 1e-10 * smax.max(1e-300);
    match svd.pseudo_inverse(cutoff) {
        Ok(p) => -(p * r),
        Err(_) => Vector2::zeros(),
    }
}

fn dependent_residual(s: &TranslationSurface, u: f64, v: f64) -> Result<(Vector2<f64>, Matrix2<f64>)> {
    let l = s.local_with_degree(u, v, 1)?;
    let (t31, t32) = (&l.t[2][0], &l.t[2][1]);
    Ok((
        Vector2::new(t31.value(), t32.value()),
        Matrix2::new(t31.partial(1, 0), t31.partial(0, 1), t32.partial(1, 0), t32.partial(0, 1)),
    ))
}

/// Damped Gauss-Newton on `(t31, t32) = 0` with a pseudo-inverse step,
/// so curve-shaped zero sets are approached orthogonally.
fn refine_dependent(s: &TranslationSurface, u: f64, v: f64, max_drift: f64) -> Option<(f64, f64, f64)> {
    let (mut p, mut r) = ((u, v), dependent_residual(s, u, v).ok()?);
    for _ in 0..60 {
        let step = pinv_step(&r.1, &r.0);
        if step.norm() < 1e-16 * (1.0 + p.0.abs() + p.1.abs()) {
            break;
        }
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let q = (p.0 + lam * step[0], p.1 + lam * step[1]);
            if let Ok(rq) = dependent_residual(s, q.0, q.1) {
                if rq.0.norm() < r.0.norm() || rq.0.norm() == 0.0 {
                    p = q;
                    r = rq;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !accepted || r.0.norm() == 0.0 {
            break;
        }
        if ((p.0 - u).powi(2) + (p.1 - v).powi(2)).sqrt() > max_drift {
            return None;
        }
    }
    Some((p.0, p.1, r.0.norm()))
}

/// Newton on a scalar speed function of one variable.
fn refine_speed(c: &FramedCurve, coef: f64, t: f64, max_drift: f64) -> Option<(f64, f64)> {
    let mut x = t;
    for _ in 0..60 {
        let j = c.jets(x).ok()?;
        let (f, df) = (coef * j.alpha.value(), coef * j.alpha.deriv(1));
        if f == 0.0 {
            break;
        }
        if df.abs() < 1e-300 {
            return None;
        }
        let step = -f / df;
        x += step;
        if (x - t).abs() > max_drift {
            return None;
        }
        if step.abs() < 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    let r = (coef * c.jets(x).ok()?.alpha.value()).abs();
    Some((x, r))
}

fn speed_zeros(c: &FramedCurve, coef: f64, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64> {
    let h = (hi - lo) / (n.max(2) - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|k| lo + h * k as f64).collect();
    let mut found: Vec<f64> = nodes
        .par_iter()
        .filter_map(|&t| {
            let j = c.jets(t).ok()?;
            let (f, df) = (coef * j.alpha.value(), coef * j.alpha.deriv(1));
            if df.abs() > 0.0 && (f / df).abs() <= 1.5 * h || f.abs() <= tol {
                refine_speed(c, coef, t, 3.0 * h).filter(|&(_, r)| r < tol).map(|(x, _)| x)
            } else {
                None
            }
        })
        .filter(|&x| x >= lo - 1e-9 && x <= hi + 1e-9)
        .collect();
    found.sort_by(f64::total_cmp);
    found.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * h);
    found
}

/// Locates the singular set in the window: isolated points and samples of
/// singular curves, each labelled with the conditions it satisfies.
pub fn find_singular_points(s: &TranslationSurface, opts: &ScanOptions) -> Result<Vec<SingularPoint>> {
    if opts.grid < 2 || !(opts.window[0] < opts.window[1] && opts.window[2] < opts.window[3]) {
        return Err(Error::Input(format!("bad scan window {:?} / grid {}", opts.window, opts.grid)));
    }
    let h = opts.spacing();
    let n = opts.grid;
    let nodes: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut dependent: Vec<(f64, f64, f64)> = nodes
        .par_iter()
        .filter_map(|&(i, j)| {
            let (u, v) = opts.node(i, j);
            let (r, jac) = dependent_residual(s, u, v).ok()?;
            if pinv_step(&jac, &r).norm() > 1.5 * h && r.norm() > opts.sing_tol {
                return None;
            }
            refine_dependent(s, u, v, 3.0 * h).filter(|p| p.2 < opts.sing_tol)
        })
        .collect();
    dependent.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let same = 1e-3 * h;
    let mut candidates: Vec<(f64, f64, bool)> = Vec::new();
    for (k, p) in dependent.iter().enumerate() {
        let mut distinct: Vec<(f64, f64)> = Vec::new();
        for (l, q) in dependent.iter().enumerate() {
            let d = (p.0 - q.0).hypot(p.1 - q.1);
            if l != k && d > same && d <= 3.0 * h && distinct.iter().all(|r| (r.0 - q.0).hypot(r.1 - q.1) > same) {
                distinct.push((q.0, q.1));
            }
        }
        if opts.inside(p.0, p.1) {
            candidates.push((p.0, p.1, distinct.len() < 2));
        }
    }

    let grid_v: Vec<f64> = (0..n).map(|j| opts.node(0, j).1).collect();
    let grid_u: Vec<f64> = (0..n).map(|i| opts.node(i, 0).0).collect();
    for u in speed_zeros(&s.a, s.coef_a, opts.window[0], opts.window[1], n, opts.sing_tol) {
        candidates.extend(grid_v.iter().map(|&v| (u, v, false)));
    }
    for v in speed_zeros(&s.b, s.coef_b, opts.window[2], opts.window[3], n, opts.sing_tol) {
        candidates.extend(grid_u.iter().map(|&u| (u, v, false)));
    }

    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut kept: Vec<(f64, f64, bool)> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| (k.0 - c.0).hypot(k.1 - c.1) > 3.0 * h) {
            kept.push(c);
        }
    }

    kept.into_iter()
        .map(|(u, v, isolated)| label_point(s, u, v, isolated, opts))
        .collect()
}

fn label_point(s: &TranslationSurface, u: f64, v: f64, isolated: bool, opts: &ScanOptions) -> Result<SingularPoint> {
    let l = s.local_with_degree(u, v, 1)?;
    let (ra, rb, rd) = (l.alpha.value().abs(), l.alpha_b.value().abs(), l.dependence());
    let mut conditions = Vec::new();
    let mut residual: f64 = 0.0;
    for (c, r, tol) in [
        (Condition::SingularA, ra, opts.sing_tol),
        (Condition::SingularB, rb, opts.sing_tol),
        (Condition::Dependent, rd, opts.sing_tol),
    ] {
        if r < tol {
            conditions.push(c);
            residual = residual.max(r);
        }
    }
    Ok(SingularPoint {
        u,
        v,
        conditions,
        dependence: if rd < opts.dep_tol { Dependence::Dependent } else { Dependence::Independent },
        isolated,
        residual,
        canonical: s.canonical(u, v),
    })
}

/// Result of testing whether `t31` and `t32` are linearly dependent as
/// functions on a region.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct AbDependence {
    pub dependent: bool,
    /// `σ_min / σ_max` of the sample matrix.
    pub ratio: f64,
    /// Unit `(A, B)` minimising `|A·t31 + B·t32|` over the sample.
    pub coefficients: [f64; 2],
}

/// Samples `t31, t32` on an `n × n` grid of the window and checks whether
/// a fixed combination `A·t31 + B·t32` vanishes identically.
pub fn ab_dependence_scan(s: &TranslationSurface, window: [f64; 4], n: usize, ratio_tol: f64) -> Result<AbDependence> {
    let n = n.max(8);
    let mut rows = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let u = window[0] + (window[1] - window[0]) * i as f64 / (n - 1) as f64;
            let v = window[2] + (window[3] - window[2]) * j as f64 / (n - 1) as f64;
            let l = s.local_with_degree(u, v, 0)?;
            rows.push(l.t(3, 1));
            rows.push(l.t(3, 2));
        }
    }
    let m = nalgebra::DMatrix::from_row_slice(n * n, 2, &rows);
    let svd = m.svd(false, true);
    let sv = &svd.singular_values;
    let (imax, imin) = if sv[0] >= sv[1] { (0, 1) } else { (1, 0) };
    let ratio = if sv[imax] > 0.0 { sv[imin] / sv[imax] } else { 0.0 };
    let vt = svd.v_t.unwrap();
    Ok(AbDependence {
        dependent: ratio < ratio_tol,
        ratio,
        coefficients: [vt[(imin, 0)], vt[(imin, 1)]],
    })
}

/// CSV of singular points: `u,v,conditions,dependence,isolated`.
pub fn singular_points_csv(points: &[SingularPoint]) -> String {
    let mut out = String::from("u,v,conditions,dependence,isolated\n");
    for p in points {
        let conds: Vec<&str> = p.conditions.iter().map(|c| c.label()).collect();
        let dep = match p.dependence {
            Dependence::Dependent => "dependent",
            Dependence::Independent => "independent",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            crate::report::fmt17(p.u),
            crate::report::fmt17(p.v),
            conds.join("|"),
            dep,
            p.isolated
        ));
    }
    out
}

/// Distinct images `x(p)` of the given parameter points, merged within `radius`.
pub fn distinct_images(s: &TranslationSurface, params: &[(f64, f64)], radius: f64) -> Result<Vec<[f64; 3]>> {
    let mut out: Vec<[f64; 3]> = Vec::new();
    for &(u, v) in params {
        let p = s.point(u, v)?;
        let near = |q: &[f64; 3]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt() < radius;
        if !out.iter().any(near) {
            out.push(p);
        }
    }
    Ok(out)
}
