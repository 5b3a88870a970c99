//! Framed space curves: a position `γ(t)` with an orthonormal pair
//! `(ν1, ν2)` normal to the velocity. `μ = ν1 × ν2` completes the frame.

pub mod catalog;
pub mod expr;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jets::{
    cross, derivative3, dot, norm, normalize, scale3, values3, Jet, Taylor, Vec3, DEFAULT_ORDER,
};
use expr::{format_triple, parse_triple, parse_triple_pair, Expr};

/// Variable names a curve expression may use (only one of them at a time).
pub const CURVE_VARS: &[&str] = &["t", "u", "v", "s"];

/// Samples used for construction-time checks.
pub const CHECK_SAMPLES: usize = 64;

type JetFn = dyn Fn(&Jet) -> Result<Vec3<Jet>> + Send + Sync;

/// A vector-valued function of one variable, evaluable on jets.
#[derive(Clone)]
pub enum VectorFn {
    Expr(Box<[Expr; 3]>),
    Native { label: String, f: Arc<JetFn> },
}

impl VectorFn {
    pub fn parse(src: &str) -> Result<Self> {
        let triple = parse_triple(src, CURVE_VARS)?;
        check_single_var(&triple)?;
        Ok(VectorFn::Expr(Box::new(triple)))
    }

    pub fn native(
        label: impl Into<String>,
        f: impl Fn(&Jet) -> Result<Vec3<Jet>> + Send + Sync + 'static,
    ) -> Self {
        VectorFn::Native { label: label.into(), f: Arc::new(f) }
    }

    pub fn eval(&self, t: &Jet) -> Result<Vec3<Jet>> {
        match self {
            VectorFn::Expr(e) => {
                let bind = |_: &str| Some(t.clone());
                Ok([e[0].eval(&bind, t)?, e[1].eval(&bind, t)?, e[2].eval(&bind, t)?])
            }
            VectorFn::Native { f, .. } => f(t),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            VectorFn::Expr(e) => format_triple(e),
            VectorFn::Native { label, .. } => label.clone(),
        }
    }
}

impl fmt::Debug for VectorFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

fn check_single_var(exprs: &[Expr]) -> Result<()> {
    let mut first: Option<String> = None;
    for e in exprs {
        for (name, offset) in e.free_vars() {
            match &first {
                None => first = Some(name),
                Some(f) if *f == name => {}
                Some(_) => return Err(Error::UnknownIdentifier { name, offset }),
            }
        }
    }
    Ok(())
}

/// How the normal pair is obtained.
#[derive(Clone, Debug)]
pub enum FrameSource {
    /// `ν1` = principal normal, `ν2` = binormal.
    Frenet,
    Explicit { nu1: VectorFn, nu2: VectorFn },
}

/// Curvature of a framed curve: `ν1' = ℓν2 + mμ`, `ν2' = -ℓν1 + nμ`,
/// `μ' = -mν1 - nν2`, `γ' = αμ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedCurvature {
    pub ell: f64,
    pub m: f64,
    pub n: f64,
    pub alpha: f64,
}

/// Everything a surface computation needs from a curve at one parameter.
#[derive(Debug, Clone)]
pub struct CurveJets {
    pub t: f64,
    pub gamma: Vec3<Jet>,
    pub velocity: Vec3<Jet>,
    pub nu1: Vec3<Jet>,
    pub nu2: Vec3<Jet>,
    pub mu: Vec3<Jet>,
    pub ell: Jet,
    pub m: Jet,
    pub n: Jet,
    pub alpha: Jet,
}

impl CurveJets {
    pub fn curvature(&self) -> FramedCurvature {
        FramedCurvature {
            ell: self.ell.value(),
            m: self.m.value(),
            n: self.n.value(),
            alpha: self.alpha.value(),
        }
    }

    /// Rows `ν1, ν2, μ`.
    pub fn frame(&self) -> [[f64; 3]; 3] {
        [values3(&self.nu1), values3(&self.nu2), values3(&self.mu)]
    }
}

/// Checks used when a curve is built.
#[derive(Debug, Clone, Copy)]
pub struct CurveChecks {
    pub frame_tol: f64,
    pub nondeg_tol: f64,
}

impl Default for CurveChecks {
    fn default() -> Self {
        CurveChecks { frame_tol: 1e-9, nondeg_tol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct FramedCurve {
    pub name: String,
    gamma: VectorFn,
    frame: FrameSource,
    pub domain: (f64, f64),
    /// Set when `γ` and the frame are periodic with this period.
    pub period: Option<f64>,
    order: usize,
    checks: CurveChecks,
    arc_length: bool,
}

impl FramedCurve {
    /// Builds and validates a framed curve on `domain`.
    pub fn new(
        name: impl Into<String>,
        gamma: VectorFn,
        frame: FrameSource,
        domain: (f64, f64),
        checks: CurveChecks,
    ) -> Result<Self> {
        if !(domain.0 < domain.1) {
            return Err(Error::Input(format!("empty domain {domain:?}")));
        }
        let mut c = FramedCurve {
            name: name.into(),
            gamma,
            frame,
            domain,
            period: None,
            order: DEFAULT_ORDER,
            checks,
            arc_length: false,
        };
        c.validate()?;
        c.arc_length = c.sample_params().iter().all(|&t| match c.jets_with_order(t, 1) {
            Ok(j) => (j.alpha.value() - 1.0).abs() < 1e-10,
            Err(_) => false,
        });
        Ok(c)
    }

    /// Parses `γ` and, unless `frame` is `None` (Frenet), the pair `ν1; ν2`.
    pub fn from_exprs(
        name: impl Into<String>,
        gamma: &str,
        frame: Option<&str>,
        domain: (f64, f64),
        checks: CurveChecks,
    ) -> Result<Self> {
        let g = VectorFn::parse(gamma)?;
        let frame = match frame {
            None => FrameSource::Frenet,
            Some(src) if src.trim().eq_ignore_ascii_case("frenet") => FrameSource::Frenet,
            Some(src) => {
                let (a, b) = parse_triple_pair(src, CURVE_VARS)?;
                let mut all: Vec<Expr> = Vec::new();
                if let VectorFn::Expr(e) = &g {
                    all.extend(e.iter().cloned());
                }
                all.extend(a.iter().cloned());
                all.extend(b.iter().cloned());
                check_single_var(&all)?;
                FrameSource::Explicit {
                    nu1: VectorFn::Expr(Box::new(a)),
                    nu2: VectorFn::Expr(Box::new(b)),
                }
            }
        };
        Self::new(name, g, frame, domain, checks)
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.max(3);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_frenet(&self) -> bool {
        matches!(self.frame, FrameSource::Frenet)
    }

    /// True when `|α - 1| < 1e-10` on a uniform sample of the domain.
    pub fn is_arc_length(&self) -> bool {
        self.arc_length
    }

    pub fn gamma_source(&self) -> &VectorFn {
        &self.gamma
    }

    pub fn frame_source(&self) -> &FrameSource {
        &self.frame
    }

    pub fn describe_gamma(&self) -> String {
        self.gamma.describe()
    }

    pub fn describe_frame(&self) -> String {
        match &self.frame {
            FrameSource::Frenet => "frenet".to_string(),
            FrameSource::Explicit { nu1, nu2 } => {
                format!("{}; {}", nu1.describe(), nu2.describe())
            }
        }
    }

    /// Uniform sample of the domain (including both ends).
    pub fn sample_params(&self) -> Vec<f64> {
        let (a, b) = self.domain;
        (0..CHECK_SAMPLES).map(|k| a + (b - a) * k as f64 / (CHECK_SAMPLES - 1) as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        for t in self.sample_params() {
            let j = self.jets_with_order(t, 2)?;
            let (n1, n2) = (values3(&j.nu1), values3(&j.nu2));
            let vel = values3(&j.velocity);
            let d = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let speed = d(&vel, &vel).sqrt().max(1.0);
            let residual = [
                (d(&n1, &n1) - 1.0).abs(),
                (d(&n2, &n2) - 1.0).abs(),
                d(&n1, &n2).abs(),
                d(&n1, &vel).abs() / speed,
                d(&n2, &vel).abs() / speed,
            ]
            .into_iter()
            .fold(0.0, f64::max);
            if residual > self.checks.frame_tol {
                return Err(Error::NotOrthonormal { curve: self.name.clone(), t, residual });
            }
        }
        Ok(())
    }

    /// Jets of every frame quantity at `t`, to the curve's order.
    pub fn jets(&self, t: f64) -> Result<CurveJets> {
        self.jets_with_order(t, self.order)
    }

    fn jets_with_order(&self, t: f64, order: usize) -> Result<CurveJets> {
        let extra = if self.is_frenet() { 3 } else { 1 };
        let tj = Jet::variable(t, order + extra);
        let gamma = self.gamma.eval(&tj)?;
        let velocity = derivative3(&gamma)?;
        let (nu1, nu2) = match &self.frame {
            FrameSource::Explicit { nu1, nu2 } => (nu1.eval(&tj)?, nu2.eval(&tj)?),
            FrameSource::Frenet => {
                let acc = derivative3(&velocity)?;
                let c = cross(&velocity, &acc);
                let cn = norm(&c).map_err(|_| self.degenerate(t, 0.0))?;
                if cn.value() < self.checks.nondeg_tol {
                    return Err(self.degenerate(t, cn.value()));
                }
                let b = scale3(&c, &cn.recip()?);
                let tangent = normalize(&velocity)?;
                (cross(&b, &tangent), b)
            }
        };
        let mu = cross(&nu1, &nu2);
        let dnu1 = derivative3(&nu1)?;
        let dnu2 = derivative3(&nu2)?;
        Ok(CurveJets {
            t,
            ell: dot(&dnu1, &nu2),
            m: dot(&dnu1, &mu),
            n: dot(&dnu2, &mu),
            alpha: dot(&velocity, &mu),
            gamma,
            velocity,
            nu1,
            nu2,
            mu,
        })
    }

    fn degenerate(&self, t: f64, cross: f64) -> Error {
        Error::NotNonDegenerate { curve: self.name.clone(), t, cross }
    }

    pub fn point(&self, t: f64) -> Result<[f64; 3]> {
        Ok(values3(&self.gamma.eval(&Jet::variable(t, 0))?))
    }

    pub fn curvature(&self, t: f64) -> Result<FramedCurvature> {
        Ok(self.jets_with_order(t, 1)?.curvature())
    }

    /// Rows `ν1, ν2, μ` at `t`.
    pub fn frame_at(&self, t: f64) -> Result<[[f64; 3]; 3]> {
        Ok(self.jets_with_order(t, 1)?.frame())
    }

    /// Curvature and torsion jets from the classical formulas
    /// `κ = |γ'×γ''|/|γ'|³`, `τ = det(γ',γ'',γ''')/|γ'×γ''|²`.
    pub fn kappa_tau(&self, t: f64) -> Result<(Jet, Jet)> {
        let tj = Jet::variable(t, self.order);
        let g = self.gamma.eval(&tj)?;
        let d1 = derivative3(&g)?;
        let d2 = derivative3(&d1)?;
        let d3 = derivative3(&d2)?;
        let c = cross(&d1, &d2);
        let cc = dot(&c, &c);
        if cc.value().sqrt() < self.checks.nondeg_tol {
            return Err(self.degenerate(t, cc.value().sqrt()));
        }
        let speed = norm(&d1)?;
        let kappa = cc.sqrt()?.try_div(&speed.powi(3)?)?;
        let tau = dot(&c, &d3).try_div(&cc)?;
        Ok((kappa, tau))
    }

    /// Reduces `t` into `[0, period)` when the curve is periodic.
    pub fn canonical(&self, t: f64) -> f64 {
        match self.period {
            Some(p) => {
                let r = t.rem_euclid(p);
                if (p - r).abs() < 1e-9 * p {
                    0.0
                } else {
                    r
                }
            }
            None => t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd(f: impl Fn(f64) -> f64, t: f64) -> f64 {
        // Richardson-extrapolated central difference
        let d = |h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
        let h = 1e-3;
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    #[test]
    fn framed_curvature_matches_finite_differences() {
        let c = catalog::catalog("sin_curve").unwrap();
        for &t in &[-2.0, -0.3, 0.4, 1.9] {
            let j = c.jets(t).unwrap();
            let nu1 = |s: f64| c.frame_at(s).unwrap()[0];
            let nu2 = |s: f64| c.frame_at(s).unwrap()[1];
            let f = c.frame_at(t).unwrap();
            let dn1: Vec<f64> = (0..3).map(|i| fd(|s| nu1(s)[i], t)).collect();
            let dn2: Vec<f64> = (0..3).map(|i| fd(|s| nu2(s)[i], t)).collect();
            let dg: Vec<f64> = (0..3).map(|i| fd(|s| c.point(s).unwrap()[i], t)).collect();
            let d = |a: &[f64], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            assert_relative_eq!(j.ell.value(), d(&dn1, &f[1]), epsilon = 1e-8);
            assert_relative_eq!(j.m.value(), d(&dn1, &f[2]), epsilon = 1e-8);
            assert_relative_eq!(j.n.value(), d(&dn2, &f[2]), epsilon = 1e-8);
            assert_relative_eq!(j.alpha.value(), d(&dg, &f[2]), epsilon = 1e-8);
        }
    }

    #[test]
    fn frenet_lift_has_expected_curvature() {
        for name in ["s1m_a", "s1m_b", "self_s1p"] {
            let c = catalog::catalog(name).unwrap();
            for &t in &[-1.0, 0.25, 1.5] {
                let j = c.jets(t).unwrap();
                let (k, tau) = c.kappa_tau(t).unwrap();
                let a = j.alpha.value();
                assert!(a > 0.0);
                assert_relative_eq!(j.ell.value(), a * tau.value(), epsilon = 1e-10);
                assert_relative_eq!(j.m.value(), -a * k.value(), epsilon = 1e-10);
                assert!(j.n.value().abs() < 1e-10);
                // μ is the unit tangent
                let v = values3(&j.velocity);
                let mu = values3(&j.mu);
                for i in 0..3 {
                    assert_relative_eq!(mu[i] * a, v[i], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn helices_have_constant_curvature() {
        let a = catalog::catalog("s1m_a").unwrap();
        let b = catalog::catalog("s1m_b").unwrap();
        assert!(a.is_arc_length() && b.is_arc_length());
        let (k, t) = a.kappa_tau(0.7).unwrap();
        assert_relative_eq!(k.value(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(t.value(), 1.0, epsilon = 1e-12);
        let (k, t) = b.kappa_tau(-0.4).unwrap();
        assert_relative_eq!(k.value(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(t.value(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_frames_are_rejected() {
        let e = FramedCurve::from_exprs(
            "bad",
            "(u, u^2, 0)",
            Some("(1, 0, 0); (0, 0, 1)"),
            (-1.0, 1.0),
            CurveChecks::default(),
        );
        assert!(matches!(e, Err(Error::NotOrthonormal { .. })));
        let flat = FramedCurve::from_exprs("line", "(u, 2*u, 0)", None, (-1.0, 1.0), CurveChecks::default());
        assert!(matches!(flat, Err(Error::NotNonDegenerate { .. })));
        let mixed = FramedCurve::from_exprs("mixed", "(u, v, 0)", None, (-1.0, 1.0), CurveChecks::default());
        assert!(matches!(mixed, Err(Error::UnknownIdentifier { .. })));
    }
}
