//! Named example curves, plus a few curve families built in code.

use std::f64::consts::PI;

use super::{CurveChecks, FrameSource, FramedCurve, VectorFn};
use crate::error::{Error, Result};
use crate::jets::{Jet, Taylor};

pub const CATALOG_NAMES: &[&str] =
    &["s0_a", "s0_b", "s1p_a", "s1p_b", "s1m_a", "s1m_b", "sin_curve", "self_s1p"];

struct Entry {
    gamma: &'static str,
    frame: Option<&'static str>,
    domain: (f64, f64),
    periodic: bool,
}

fn entry(name: &str) -> Option<Entry> {
    Some(match name {
        "s0_a" => Entry {
            gamma: "(u, u^2/2, 0)",
            frame: Some("(-u/sqrt(1 + u^2), 1/sqrt(1 + u^2), 0); (0, 0, 1)"),
            domain: (-2.0, 2.0),
            periodic: false,
        },
        "s0_b" | "s1p_b" => Entry {
            gamma: "(v, 0, v^2/2)",
            frame: Some("(v/sqrt(1 + v^2), 0, -1/sqrt(1 + v^2)); (0, 1, 0)"),
            domain: (-2.0, 2.0),
            periodic: false,
        },
        "s1p_a" => Entry {
            gamma: "(u, u^3/3, 0)",
            frame: Some("(-u^2/sqrt(1 + u^4), 1/sqrt(1 + u^4), 0); (0, 0, 1)"),
            domain: (-2.0, 2.0),
            periodic: false,
        },
        "s1m_a" => Entry {
            gamma: "(3*sqrt(10)/10*u/sqrt(2) - sqrt(10)/10*sin(sqrt(2)*u)/2, \
                     cos(sqrt(2)*u)/2, \
                     sqrt(10)/10*u/sqrt(2) + 3*sqrt(10)/10*sin(sqrt(2)*u)/2)",
            frame: None,
            domain: (-PI, PI),
            periodic: false,
        },
        "s1m_b" => Entry {
            gamma: "(v/sqrt(5), 2*cos(sqrt(5)*v)/5, 2*sin(sqrt(5)*v)/5)",
            frame: None,
            domain: (-PI, PI),
            periodic: false,
        },
        "sin_curve" => Entry {
            gamma: "(sin(u), -cos(u), -cos(2*u)/2)",
            frame: Some(
                "(-sin(u), cos(u), 0); \
                 (-sin(2*u)*cos(u)/sqrt(sin(2*u)^2 + 1), \
                  -sin(2*u)*sin(u)/sqrt(sin(2*u)^2 + 1), \
                  1/sqrt(sin(2*u)^2 + 1))",
            ),
            domain: (-PI, PI),
            periodic: true,
        },
        "self_s1p" => Entry {
            gamma: "((sin(u) + sin(2*u))/(2*sqrt(2)) - sin(3*u)/(6*sqrt(2)), \
                     -cos(2*u)/(2*sqrt(2)), \
                     sin(2*u)/(2*sqrt(2)))",
            frame: None,
            domain: (-PI, PI),
            periodic: true,
        },
        _ => return None,
    })
}

/// Looks up a named curve.
pub fn catalog(name: &str) -> Result<FramedCurve> {
    let e = entry(name).ok_or_else(|| Error::UnknownCatalogName(name.to_string()))?;
    let c = FramedCurve::from_exprs(name, e.gamma, e.frame, e.domain, CurveChecks::default())?;
    Ok(if e.periodic { c.with_period(2.0 * PI) } else { c })
}

/// The two curves of a named example pair.
pub fn catalog_pair(name: &str) -> Result<(FramedCurve, FramedCurve)> {
    match name {
        "s0" | "s1p" | "s1m" => Ok((catalog(&format!("{name}_a"))?, catalog(&format!("{name}_b"))?)),
        _ => Err(Error::UnknownCatalogName(name.to_string())),
    }
}

/// Unit-speed circular helix `(a cos t, a sin t, b t)` with `a² + b² = 1`,
/// carrying its Frenet frame. Curvature `a`, torsion `b`.
pub fn unit_helix(a: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    let g = VectorFn::native(format!("unit helix a={a}"), move |t| {
        Ok([t.cos().scale(a), t.sin().scale(a), t.scale(b)])
    });
    FramedCurve::new(format!("helix({a})"), g, FrameSource::Frenet, (-PI, PI), CurveChecks::default())
}

/// The unit-speed curve whose tangent at `t` equals the tangent of
/// [`unit_helix`] at `σ(t) = 2·sign·atan(t)`:
/// `(-sign·a·ln(1+t²), a(2 atan t - t), b t)`.
///
/// Paired with the helix, the tangent directions agree along the curve
/// `u = σ(v)` of the parameter plane.
pub fn helix_companion(a: f64, sign: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    let g = VectorFn::native(format!("helix companion a={a} sign={sign}"), move |t| {
        let l = t.square().offset(1.0).ln()?;
        Ok([l.scale(-sign * a), t.atan().scale(2.0).sub_t(t).scale(a), t.scale(b)])
    });
    FramedCurve::new(
        format!("helix_companion({a},{sign})"),
        g,
        FrameSource::Frenet,
        (-3.0, 3.0),
        CurveChecks::default(),
    )
}

/// `c·γ(t/c)` for the unit helix: same tangent at `t` as the helix at `t/c`.
pub fn scaled_helix(a: f64, c: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    let g = VectorFn::native(format!("scaled helix a={a} c={c}"), move |t| {
        let s = t.scale(1.0 / c);
        Ok([s.cos().scale(a * c), s.sin().scale(a * c), t.scale(b)])
    });
    FramedCurve::new(
        format!("scaled_helix({a},{c})"),
        g,
        FrameSource::Frenet,
        (-PI * c.abs(), PI * c.abs()),
        CurveChecks::default(),
    )
}

/// `∫ s·T(s) ds` for the unit helix tangent `T`: a framed curve whose
/// speed `α(s) = s` vanishes at 0 while the helix frame stays smooth.
pub fn singular_helix(a: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    let g = VectorFn::native(format!("singular helix a={a}"), move |t| {
        let (c, s) = (t.cos(), t.sin());
        Ok([
            t.mul_t(&c).sub_t(&s).scale(a),
            t.mul_t(&s).add_t(&c).scale(a),
            t.square().scale(b / 2.0),
        ])
    });
    let nu1 = VectorFn::native("helix normal", |t| {
        Ok([t.cos().scale(-1.0), t.sin().scale(-1.0), t.constant_like(0.0)])
    });
    let nu2 = VectorFn::native("helix binormal", move |t| {
        Ok([t.sin().scale(b), t.cos().scale(-b), t.constant_like(a)])
    });
    FramedCurve::new(
        format!("singular_helix({a})"),
        g,
        FrameSource::Explicit { nu1, nu2 },
        (-PI, PI),
        CurveChecks::default(),
    )
}

/// `∫ s·T(σ(s)) ds` with `σ(s) = 2·sign·atan(s)`; the companion of
/// [`singular_helix`] in the same way [`helix_companion`] pairs with the helix.
pub fn singular_companion(a: f64, sign: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    // s·(−a sinσ, a cosσ, b) with sinσ = 2·sign·s/(1+s²), cosσ = (1−s²)/(1+s²)
    let g = VectorFn::native(format!("singular companion a={a} sign={sign}"), move |t| {
        let q = t.square().offset(1.0);
        let x = t.sub_t(&t.atan()).scale(-2.0 * sign * a);
        let y = q.ln()?.scale(a).sub_t(&t.square().scale(a / 2.0));
        Ok([x, y, t.square().scale(b / 2.0)])
    });
    let nu1 = VectorFn::native("companion normal", move |t| {
        let q = t.square().offset(1.0).recip()?;
        let cos = t.square().scale(-1.0).offset(1.0).mul_t(&q);
        let sin = t.scale(2.0 * sign).mul_t(&q);
        Ok([cos.scale(-1.0), sin.scale(-1.0), t.constant_like(0.0)])
    });
    let nu2 = VectorFn::native("companion binormal", move |t| {
        let q = t.square().offset(1.0).recip()?;
        let cos = t.square().scale(-1.0).offset(1.0).mul_t(&q);
        let sin = t.scale(2.0 * sign).mul_t(&q);
        Ok([sin.scale(b), cos.scale(-b), t.constant_like(a)])
    });
    FramedCurve::new(
        format!("singular_companion({a},{sign})"),
        g,
        FrameSource::Explicit { nu1, nu2 },
        (-3.0, 3.0),
        CurveChecks::default(),
    )
}

/// Frame `(cos φ N + sin φ B, -sin φ N + cos φ B)` built from explicit
/// normal and binormal maps, with `φ(t) = rate·t`.
fn twisted(
    name: String,
    g: VectorFn,
    normal: impl Fn(&Jet) -> Result<[Jet; 3]> + Send + Sync + Clone + 'static,
    binormal: impl Fn(&Jet) -> Result<[Jet; 3]> + Send + Sync + Clone + 'static,
    rate: f64,
    domain: (f64, f64),
) -> Result<FramedCurve> {
    let (n1, b1) = (normal.clone(), binormal.clone());
    let nu1 = VectorFn::native(format!("{name} nu1"), move |t| {
        let (c, s) = (t.scale(rate).cos(), t.scale(rate).sin());
        let (n, b) = (n1(t)?, b1(t)?);
        Ok(std::array::from_fn(|i| n[i].mul_t(&c).add_t(&b[i].mul_t(&s))))
    });
    let nu2 = VectorFn::native(format!("{name} nu2"), move |t| {
        let (c, s) = (t.scale(rate).cos(), t.scale(rate).sin());
        let (n, b) = (normal(t)?, binormal(t)?);
        Ok(std::array::from_fn(|i| b[i].mul_t(&c).sub_t(&n[i].mul_t(&s))))
    });
    FramedCurve::new(name, g, FrameSource::Explicit { nu1, nu2 }, domain, CurveChecks::default())
}

fn helix_normal(t: &Jet) -> [Jet; 3] {
    [t.cos().scale(-1.0), t.sin().scale(-1.0), t.constant_like(0.0)]
}

fn helix_binormal(a: f64, t: &Jet) -> [Jet; 3] {
    let b = (1.0 - a * a).sqrt();
    [t.sin().scale(b), t.cos().scale(-b), t.constant_like(a)]
}

/// [`unit_helix`] with its Frenet frame rotated by the angle `rate·t`,
/// so that `n ≠ 0` and the frame is not a Frenet frame.
pub fn twisted_helix(a: f64, rate: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    let g = VectorFn::native(format!("unit helix a={a}"), move |t| {
        Ok([t.cos().scale(a), t.sin().scale(a), t.scale(b)])
    });
    twisted(
        format!("twisted_helix({a},{rate})"),
        g,
        |t| Ok(helix_normal(t)),
        move |t| Ok(helix_binormal(a, t)),
        rate,
        (-PI, PI),
    )
}

/// [`helix_companion`] with its Frenet frame rotated by `rate·t`.
pub fn twisted_companion(a: f64, sign: f64, rate: f64) -> Result<FramedCurve> {
    let b = (1.0 - a * a).sqrt();
    let g = VectorFn::native(format!("helix companion a={a} sign={sign}"), move |t| {
        let l = t.square().offset(1.0).ln()?;
        Ok([l.scale(-sign * a), t.atan().scale(2.0).sub_t(t).scale(a), t.scale(b)])
    });
    // Frenet frame of the companion at t is sign·(N, B) of the helix at σ(t)
    let sigma = move |t: &Jet| t.atan().scale(2.0 * sign);
    twisted(
        format!("twisted_companion({a},{sign},{rate})"),
        g,
        move |t| Ok(helix_normal(&sigma(t)).map(|x| x.scale(sign))),
        move |t| Ok(helix_binormal(a, &sigma(t)).map(|x| x.scale(sign))),
        rate,
        (-3.0, 3.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_catalog_entry_builds() {
        for name in CATALOG_NAMES {
            catalog(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(catalog("nope"), Err(Error::UnknownCatalogName(_))));
    }

    #[test]
    fn sin_curve_curvature_matches_closed_form() {
        let c = catalog("sin_curve").unwrap();
        for &u in &[-1.2, 0.3, 2.0] {
            let k = c.curvature(u).unwrap();
            let r = ((2.0 * u).sin().powi(2) + 1.0).sqrt();
            assert_relative_eq!(k.ell, (2.0 * u).sin() / r, epsilon = 1e-13);
            assert_relative_eq!(k.m, -1.0 / r, epsilon = 1e-13);
            assert_relative_eq!(k.n, -2.0 * (2.0 * u).cos() / (r * r), epsilon = 1e-13);
            assert_relative_eq!(k.alpha, r, epsilon = 1e-13);
        }
    }

    #[test]
    fn constructed_curves_are_unit_speed_with_matching_tangents() {
        let h = unit_helix(0.6).unwrap();
        assert!(h.is_arc_length());
        for sign in [1.0, -1.0] {
            let c = helix_companion(0.6, sign).unwrap();
            assert!(c.is_arc_length());
            for &v in &[-1.5, 0.0, 0.8] {
                let s = 2.0 * sign * f64::atan(v);
                let tc = c.frame_at(v).unwrap()[2];
                let th = h.frame_at(s).unwrap()[2];
                for i in 0..3 {
                    assert_relative_eq!(tc[i], th[i], epsilon = 1e-12);
                }
            }
        }
        let sh = singular_helix(0.6).unwrap();
        assert_relative_eq!(sh.curvature(0.7).unwrap().alpha, 0.7, epsilon = 1e-12);
        let sc = singular_companion(0.6, 1.0).unwrap();
        assert_relative_eq!(sc.curvature(-0.4).unwrap().alpha, -0.4, epsilon = 1e-12);
    }

    #[test]
    fn twisted_frames_are_adapted_and_twist_the_normal_curvature() {
        let h = twisted_helix(0.6, 0.7).unwrap();
        let k = h.curvature(0.4).unwrap();
        // m = -κ cos φ, n = -κ sin φ... up to sign, and |m|² + |n|² = κ²
        assert_relative_eq!(k.m.hypot(k.n), 0.6, epsilon = 1e-12);
        assert!(k.n.abs() > 0.1);
        assert_relative_eq!(k.alpha, 1.0, epsilon = 1e-12);
        let c = twisted_companion(0.6, -1.0, -0.4).unwrap();
        let kc = c.curvature(0.9).unwrap();
        assert_relative_eq!(kc.alpha, 1.0, epsilon = 1e-12);
        assert!(kc.n.abs() > 0.05);
    }
}
