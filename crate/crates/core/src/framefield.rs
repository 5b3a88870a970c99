//! The frame matrix `T(u, v) = B(v)·A(u)ᵀ` relating the frames of two
//! framed curves, its compatibility equations, and reconstruction of the
//! curves from `T` and the speeds.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::curves::{CurveJets, FramedCurvature, FramedCurve};
use crate::error::{Error, Result};
use crate::jets::{BiJet, Taylor, DEFAULT_DEGREE};

/// Jets of the nine entries, `t[i][j] = (frame of B)_i · (frame of A)_j`.
pub type MatrixJets = [[BiJet; 3]; 3];

/// Anything that yields `T` with derivatives at a parameter point.
pub trait MatrixField: Send + Sync {
    fn jets(&self, u: f64, v: f64, degree: usize) -> Result<MatrixJets>;

    fn value(&self, u: f64, v: f64) -> Result<Matrix3<f64>> {
        Ok(values(&self.jets(u, v, 1)?))
    }
}

pub fn values(t: &MatrixJets) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| t[i][j].value())
}

fn partials(t: &MatrixJets, a: usize, b: usize) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| t[i][j].partial(a, b))
}

/// `F` with `d/dt (ν1, ν2, μ)ᵀ = F·(ν1, ν2, μ)ᵀ`.
pub fn curvature_matrix(k: &FramedCurvature) -> Matrix3<f64> {
    Matrix3::new(0.0, k.ell, k.m, -k.ell, 0.0, k.n, -k.m, -k.n, 0.0)
}

/// Builds the frame-matrix jets from curve jets at `u` (curve A) and `v` (curve B).
pub fn matrix_jets(a: &CurveJets, b: &CurveJets, degree: usize) -> MatrixJets {
    let lift_a = |x: &[crate::jets::Jet; 3]| x.clone().map(|c| BiJet::from_u(&c, b.t, degree));
    let lift_b = |x: &[crate::jets::Jet; 3]| x.clone().map(|c| BiJet::from_v(&c, a.t, degree));
    let fa = [lift_a(&a.nu1), lift_a(&a.nu2), lift_a(&a.mu)];
    let fb = [lift_b(&b.nu1), lift_b(&b.nu2), lift_b(&b.mu)];
    std::array::from_fn(|i| std::array::from_fn(|j| crate::jets::dot(&fb[i], &fa[j])))
}

/// The frame matrix of a pair of framed curves.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub a: FramedCurve,
    pub b: FramedCurve,
}

/// Worst-entry residuals of the structure equations at one point.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Compatibility {
    /// `|TᵀT - I|` and `|det T - 1|`.
    pub so3: f64,
    /// `|T_u + T·F(u)|`.
    pub eq_u: f64,
    /// `|T_v - F̃(v)·T|`.
    pub eq_v: f64,
    /// `|T_uv - T_v·Tᵀ·T_u|`.
    pub eq_uv: f64,
}

impl Compatibility {
    pub fn max(&self) -> f64 {
        self.so3.max(self.eq_u).max(self.eq_v).max(self.eq_uv)
    }
}

impl FrameField {
    pub fn new(a: FramedCurve, b: FramedCurve) -> Self {
        FrameField { a, b }
    }

    pub fn compatibility(&self, u: f64, v: f64) -> Result<Compatibility> {
        let ja = self.a.jets(u)?;
        let jb = self.b.jets(v)?;
        let t = matrix_jets(&ja, &jb, 2);
        let mut c = structural_residuals(&t);
        let (tm, tu, tv) = (values(&t), partials(&t, 1, 0), partials(&t, 0, 1));
        c.eq_u = (tu + tm * curvature_matrix(&ja.curvature())).amax();
        c.eq_v = (tv - curvature_matrix(&jb.curvature()) * tm).amax();
        Ok(c)
    }
}

impl MatrixField for FrameField {
    fn jets(&self, u: f64, v: f64, degree: usize) -> Result<MatrixJets> {
        Ok(matrix_jets(&self.a.jets(u)?, &self.b.jets(v)?, degree))
    }
}

/// A frame-matrix field given by a closure of the coordinate jets.
#[derive(Clone)]
pub struct FnMatrixField {
    f: Arc<dyn Fn(&BiJet, &BiJet) -> Result<MatrixJets> + Send + Sync>,
}

impl FnMatrixField {
    pub fn new(f: impl Fn(&BiJet, &BiJet) -> Result<MatrixJets> + Send + Sync + 'static) -> Self {
        FnMatrixField { f: Arc::new(f) }
    }
}

impl MatrixField for FnMatrixField {
    fn jets(&self, u: f64, v: f64, degree: usize) -> Result<MatrixJets> {
        (self.f)(&BiJet::var_u((u, v), degree), &BiJet::var_v((u, v), degree))
    }
}

/// Residuals that need only `T`: orthogonality, skew-symmetry of the
/// derived curvature matrices, and the mixed-derivative identity.
pub fn structural_residuals(t: &MatrixJets) -> Compatibility {
    let tm = values(t);
    let (tu, tv, tuv) = (partials(t, 1, 0), partials(t, 0, 1), partials(t, 1, 1));
    let so3 = (tm.transpose() * tm - Matrix3::identity()).amax().max((tm.determinant() - 1.0).abs());
    let f = -tm.transpose() * tu;
    let ft = tv * tm.transpose();
    Compatibility {
        so3,
        eq_u: (f + f.transpose()).amax(),
        eq_v: (ft + ft.transpose()).amax(),
        eq_uv: (tuv - tv * tm.transpose() * tu).amax(),
    }
}

/// Largest structural residual over a grid of the window `[u0,u1]×[v0,v1]`.
pub fn integrability_residual(
    field: &dyn MatrixField,
    window: [f64; 4],
    n: usize,
) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0, window[0], window[2]);
    for i in 0..n {
        for j in 0..n {
            let u = window[0] + (window[1] - window[0]) * i as f64 / (n - 1).max(1) as f64;
            let v = window[2] + (window[3] - window[2]) * j as f64 / (n - 1).max(1) as f64;
            let r = structural_residuals(&field.jets(u, v, 2)?).max();
            if r > worst.0 {
                worst = (r, u, v);
            }
        }
    }
    Ok(worst)
}

/// Nearest rotation in the Frobenius norm.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut u2 = u;
        u2.column_mut(2).neg_mut();
        r = u2 * vt;
    }
    r
}

/// Sampled frames (rows `ν1, ν2, μ`) and positions along one curve.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub params: Vec<f64>,
    pub frames: Vec<Matrix3<f64>>,
    pub points: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub struct ReconstructedPair {
    pub a: SampledCurve,
    pub b: SampledCurve,
}

impl ReconstructedPair {
    /// `T` at node `(i, j)`.
    pub fn frame_matrix(&self, i: usize, j: usize) -> Matrix3<f64> {
        self.b.frames[j] * self.a.frames[i].transpose()
    }
}

/// Curvature of one curve as a function of its parameter.
pub type CurvatureFn<'a> = &'a (dyn Fn(f64) -> Result<FramedCurvature> + Sync);

/// Settings for [`reconstruct`].
#[derive(Debug, Clone, Copy)]
pub struct ReconstructOptions {
    pub step: f64,
    pub min_step: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { step: 1e-3, min_step: 1e-12 }
    }
}

/// Integrates both curves from curvature data. `base` is `(u0, v0)`,
/// `t0 = T(u0, v0)` and `frame_a0` the frame of A at `u0` (any rotation
/// works if only `T` is wanted). Both curves start at the origin.
/// Node lists must be sorted and contain the base parameter.
pub fn reconstruct(
    curv_a: CurvatureFn,
    curv_b: CurvatureFn,
    base: (f64, f64),
    t0: &Matrix3<f64>,
    frame_a0: &Matrix3<f64>,
    u_nodes: &[f64],
    v_nodes: &[f64],
    opts: ReconstructOptions,
) -> Result<ReconstructedPair> {
    if !(opts.step > opts.min_step) || !opts.step.is_finite() {
        return Err(Error::StepUnderflow { min_step: opts.min_step });
    }
    let a = integrate_curve(curv_a, base.0, *frame_a0, u_nodes, opts)?;
    let b = integrate_curve(curv_b, base.1, t0 * frame_a0, v_nodes, opts)?;
    Ok(ReconstructedPair { a, b })
}

/// Checks integrability of a sampled field and reconstructs the curves.
/// `F` and `F̃` are read off `T` along the lines through the base point.
pub fn reconstruct_from_field(
    field: &dyn MatrixField,
    alpha_a: &(dyn Fn(f64) -> f64 + Sync),
    alpha_b: &(dyn Fn(f64) -> f64 + Sync),
    base: (f64, f64),
    u_nodes: &[f64],
    v_nodes: &[f64],
    pde_tol: f64,
    opts: ReconstructOptions,
) -> Result<ReconstructedPair> {
    for &u in u_nodes {
        for &v in v_nodes {
            let r = structural_residuals(&field.jets(u, v, 2)?);
            if r.max() > pde_tol {
                return Err(Error::NotIntegrable { residual: r.max(), u, v });
            }
        }
    }
    let curv_a = |u: f64| -> Result<FramedCurvature> {
        let t = field.jets(u, base.1, 1)?;
        let f = -values(&t).transpose() * partials(&t, 1, 0);
        Ok(FramedCurvature { ell: f[(0, 1)], m: f[(0, 2)], n: f[(1, 2)], alpha: alpha_a(u) })
    };
    let curv_b = |v: f64| -> Result<FramedCurvature> {
        let t = field.jets(base.0, v, 1)?;
        let f = partials(&t, 0, 1) * values(&t).transpose();
        Ok(FramedCurvature { ell: f[(0, 1)], m: f[(0, 2)], n: f[(1, 2)], alpha: alpha_b(v) })
    };
    let t0 = field.value(base.0, base.1)?;
    reconstruct(&curv_a, &curv_b, base, &t0, &Matrix3::identity(), u_nodes, v_nodes, opts)
}

fn integrate_curve(
    curv: CurvatureFn,
    t0: f64,
    frame0: Matrix3<f64>,
    nodes: &[f64],
    opts: ReconstructOptions,
) -> Result<SampledCurve> {
    let start = nodes
        .iter()
        .position(|&t| (t - t0).abs() <= 1e-12 * (1.0 + t0.abs()))
        .ok_or_else(|| Error::Input(format!("base parameter {t0} is not a node")))?;
    let n = nodes.len();
    let mut frames = vec![frame0; n];
    let mut points = vec![Vector3::zeros(); n];
    for dir in [1isize, -1] {
        let (mut r, mut p) = (frame0, Vector3::zeros());
        let mut k = start as isize;
        loop {
            let next = k + dir;
            if next < 0 || next >= n as isize {
                break;
            }
            let (ta, tb) = (nodes[k as usize], nodes[next as usize]);
            let span = tb - ta;
            let steps = (span.abs() / opts.step).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            if h.abs() < opts.min_step && span != 0.0 {
                return Err(Error::StepUnderflow { min_step: opts.min_step });
            }
            for s in 0..steps {
                let t = ta + h * s as f64;
                (r, p) = rk4_step(curv, t, h, &r, &p)?;
                r = nearest_rotation(&r);
            }
            frames[next as usize] = r;
            points[next as usize] = p;
            k = next;
        }
    }
    Ok(SampledCurve { params: nodes.to_vec(), frames, points })
}

fn rk4_step(
    curv: CurvatureFn,
    t: f64,
    h: f64,
    r: &Matrix3<f64>,
    p: &Vector3<f64>,
) -> Result<(Matrix3<f64>, Vector3<f64>)> {
    let rhs = |t: f64, r: &Matrix3<f64>| -> Result<(Matrix3<f64>, Vector3<f64>)> {
        let k = curv(t)?;
        Ok((curvature_matrix(&k) * r, r.row(2).transpose() * k.alpha))
    };
    let (k1r, k1p) = rhs(t, r)?;
    let (k2r, k2p) = rhs(t + h / 2.0, &(r + k1r * (h / 2.0)))?;
    let (k3r, k3p) = rhs(t + h / 2.0, &(r + k2r * (h / 2.0)))?;
    let (k4r, k4p) = rhs(t + h, &(r + k3r * h))?;
    Ok((
        r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0),
        p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0),
    ))
}

/// Frame-matrix jets at a point with the default degree.
pub fn frame_matrix_jets(field: &FrameField, u: f64, v: f64) -> Result<MatrixJets> {
    field.jets(u, v, DEFAULT_DEGREE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::catalog::{catalog, catalog_pair};

    #[test]
    fn catalog_pairs_satisfy_structure_equations() {
        let (a, b) = catalog_pair("s1m").unwrap();
        let f = FrameField::new(a, b);
        for &(u, v) in &[(0.0, 0.0), (0.3, -1.2), (2.0, 1.0)] {
            let c = f.compatibility(u, v).unwrap();
            assert!(c.max() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn explicit_rotation_field_rejects_twist() {
        // T = R_z(u·v) is orthogonal but T_u Tᵀ depends on v
        let twisted = FnMatrixField::new(|u, v| {
            let w = u.mul_t(v);
            let (c, s) = (w.cos(), w.sin());
            let z = u.constant_like(0.0);
            let one = u.constant_like(1.0);
            Ok([[c.clone(), s.scale(-1.0), z.clone()], [s, c, z.clone()], [z.clone(), z, one]])
        });
        let (r, _, _) = integrability_residual(&twisted, [-1.0, 1.0, -1.0, 1.0], 5).unwrap();
        assert!(r > 0.5);
        let a = catalog("sin_curve").unwrap();
        let f = FrameField::new(a.clone(), a);
        let (r, _, _) = integrability_residual(&f, [-3.0, 3.0, -3.0, 3.0], 7).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn nearest_rotation_is_orthogonal() {
        let m = Matrix3::new(1.0, 0.01, 0.0, 0.0, 1.0, -0.02, 0.003, 0.0, 0.98);
        let r = nearest_rotation(&m);
        assert!((r.transpose() * r - Matrix3::identity()).amax() < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
    }
}
