//! Truncated Taylor arithmetic.
//!
//! [`Jet`] stores the derivatives `f, f', ..., f^(K)` of a one-variable
//! function at a base point; [`BiJet`] stores every partial derivative
//! `∂u^i ∂v^j f` with `i + j <= D` of a two-variable function. Both share
//! the [`Taylor`] trait, which supplies the elementary functions through
//! Faà di Bruno style composition.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Below this magnitude a divisor is treated as zero.
pub const DIVISION_EPS: f64 = 1e-12;

/// Default number of stored derivatives for curve jets.
pub const DEFAULT_ORDER: usize = 6;

/// Default total degree for surface jets.
pub const DEFAULT_DEGREE: usize = 3;

const MAX_ORDER: usize = 20;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Shared behaviour of [`Jet`] and [`BiJet`].
pub trait Taylor: Clone + fmt::Debug + Send + Sync {
    /// The function value at the base point.
    fn value(&self) -> f64;
    /// Highest derivative order that is stored.
    fn order(&self) -> usize;
    /// A constant with the same base point and order.
    fn constant_like(&self, c: f64) -> Self;
    fn add_t(&self, other: &Self) -> Self;
    fn sub_t(&self, other: &Self) -> Self;
    fn mul_t(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn offset(&self, c: f64) -> Self;

    /// `g ∘ self`, where `g_derivs[k]` is `g^(k)` at `self.value()`.
    fn compose(&self, g_derivs: &[f64]) -> Self {
        let n = self.order();
        debug_assert!(g_derivs.len() > n);
        let delta = self.offset(-self.value());
        let mut out = self.constant_like(g_derivs[0]);
        let mut power = self.constant_like(1.0);
        for (k, g) in g_derivs.iter().enumerate().take(n + 1).skip(1) {
            power = power.mul_t(&delta);
            out = out.add_t(&power.scale(g / factorial(k)));
        }
        out
    }

    fn recip(&self) -> Result<Self> {
        let x = self.value();
        if x.abs() <= DIVISION_EPS {
            return Err(Error::DegenerateDivision { divisor: x });
        }
        let n = self.order();
        let mut d = Vec::with_capacity(n + 1);
        let mut c = 1.0 / x;
        for k in 0..=n {
            d.push(c);
            c *= -((k + 1) as f64) / x;
        }
        Ok(self.compose(&d))
    }

    fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_t(&other.recip()?))
    }

    fn sin(&self) -> Self {
        let x = self.value();
        let d: Vec<f64> = (0..=self.order())
            .map(|k| (x + k as f64 * std::f64::consts::FRAC_PI_2).sin())
            .collect();
        self.compose(&d)
    }

    fn cos(&self) -> Self {
        let x = self.value();
        let d: Vec<f64> = (0..=self.order())
            .map(|k| (x + k as f64 * std::f64::consts::FRAC_PI_2).cos())
            .collect();
        self.compose(&d)
    }

    fn tan(&self) -> Result<Self> {
        self.sin().try_div(&self.cos())
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.order() + 1])
    }

    fn ln(&self) -> Result<Self> {
        let x = self.value();
        if x <= 0.0 {
            return Err(Error::Domain { function: "ln", argument: x });
        }
        let mut d = vec![x.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign * factorial(k - 1) / x.powi(k as i32));
        }
        Ok(self.compose(&d))
    }

    fn sqrt(&self) -> Result<Self> {
        let x = self.value();
        if x <= 0.0 {
            return Err(Error::Domain { function: "sqrt", argument: x });
        }
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut coef = 1.0;
        for k in 0..=self.order() {
            d.push(coef * x.powf(0.5 - k as f64));
            coef *= 0.5 - k as f64;
        }
        Ok(self.compose(&d))
    }

    /// Derivatives of `atan` come from the jet of `1 / (1 + x^2)`.
    fn atan(&self) -> Self {
        let x = self.value();
        let n = self.order();
        let mut d = vec![x.atan()];
        if n > 0 {
            let t = Jet::variable(x, n - 1);
            let q = (&t * &t).offset(1.0);
            let r = q.recip().expect("1 + x^2 never vanishes");
            d.extend_from_slice(r.derivs());
        }
        self.compose(&d)
    }

    /// `atan2(self, x)`: the angle of the point `(x, self)`.
    fn atan2(&self, x: &Self) -> Result<Self> {
        let (y0, x0) = (self.value(), x.value());
        if y0.hypot(x0) <= DIVISION_EPS {
            return Err(Error::OriginAtan2);
        }
        let num = x.scale(-y0).add_t(&self.scale(x0));
        let den = x.scale(x0).add_t(&self.scale(y0));
        let base = y0.atan2(x0);
        Ok(num.try_div(&den)?.atan().offset(base))
    }

    fn powi(&self, p: i32) -> Result<Self> {
        let mut acc = self.constant_like(1.0);
        for _ in 0..p.unsigned_abs() {
            acc = acc.mul_t(self);
        }
        if p < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    fn powf(&self, p: f64) -> Result<Self> {
        if p.fract() == 0.0 && p.abs() < 64.0 {
            return self.powi(p as i32);
        }
        Ok(self.ln()?.scale(p).exp())
    }

    fn square(&self) -> Self {
        self.mul_t(self)
    }
}

/// Derivatives of a one-variable function up to a fixed order.
#[derive(Clone, PartialEq)]
pub struct Jet {
    base: f64,
    d: Vec<f64>,
}

impl Jet {
    /// Builds a jet from derivative values `[f, f', f'', ...]`.
    pub fn from_derivs(base: f64, derivs: Vec<f64>) -> Self {
        assert!(!derivs.is_empty() && derivs.len() <= MAX_ORDER + 1);
        Jet { base, d: derivs }
    }

    /// The identity function `t` expanded at `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut d = vec![0.0; order + 1];
        d[0] = t0;
        if order > 0 {
            d[1] = 1.0;
        }
        Jet { base: t0, d }
    }

    pub fn constant(c: f64, t0: f64, order: usize) -> Self {
        let mut d = vec![0.0; order + 1];
        d[0] = c;
        Jet { base: t0, d }
    }

    pub fn base_point(&self) -> f64 {
        self.base
    }

    pub fn derivs(&self) -> &[f64] {
        &self.d
    }

    /// `f^(k)` at the base point.
    pub fn deriv(&self, k: usize) -> f64 {
        self.d[k]
    }

    /// The jet of `f'`; one order is lost.
    pub fn derivative(&self) -> Result<Jet> {
        if self.d.len() < 2 {
            return Err(Error::OrderExhausted);
        }
        Ok(Jet { base: self.base, d: self.d[1..].to_vec() })
    }

    /// The jet of `f(t) / (t - t0)^k` for a function vanishing to order `k`.
    /// The discarded low-order terms are assumed to be zero.
    pub fn divide_by_power(&self, k: usize) -> Result<Jet> {
        if self.d.len() <= k {
            return Err(Error::OrderExhausted);
        }
        let mut d = Vec::with_capacity(self.d.len() - k);
        for j in 0..self.d.len() - k {
            // f = t^k g  =>  f^(j+k)(0) = (j+k)!/j! g^(j)(0)
            d.push(self.d[j + k] * factorial(j) / factorial(j + k));
        }
        Ok(Jet { base: self.base, d })
    }

    /// Taylor polynomial evaluated at `t`.
    pub fn eval_at(&self, t: f64) -> f64 {
        let h = t - self.base;
        let mut acc = 0.0;
        let mut p = 1.0;
        for (k, d) in self.d.iter().enumerate() {
            acc += d * p / factorial(k);
            p *= h;
        }
        acc
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet { base: self.base, d: self.d[..=order.min(self.d.len() - 1)].to_vec() }
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet@{}{:?}", self.base, self.d)
    }
}

impl Taylor for Jet {
    fn value(&self) -> f64 {
        self.d[0]
    }

    fn order(&self) -> usize {
        self.d.len() - 1
    }

    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(c, self.base, self.order())
    }

    fn add_t(&self, o: &Self) -> Self {
        let n = self.d.len().min(o.d.len());
        Jet { base: self.base, d: (0..n).map(|k| self.d[k] + o.d[k]).collect() }
    }

    fn sub_t(&self, o: &Self) -> Self {
        let n = self.d.len().min(o.d.len());
        Jet { base: self.base, d: (0..n).map(|k| self.d[k] - o.d[k]).collect() }
    }

    fn mul_t(&self, o: &Self) -> Self {
        let n = self.d.len().min(o.d.len());
        let d = (0..n)
            .map(|k| (0..=k).map(|i| binomial(k, i) * self.d[i] * o.d[k - i]).sum())
            .collect();
        Jet { base: self.base, d }
    }

    fn scale(&self, c: f64) -> Self {
        Jet { base: self.base, d: self.d.iter().map(|x| x * c).collect() }
    }

    fn offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.d[0] += c;
        out
    }
}

/// Partial derivatives of a two-variable function up to a total degree.
#[derive(Clone, PartialEq)]
pub struct BiJet {
    base: (f64, f64),
    degree: usize,
    d: Vec<f64>,
}

fn bidx(i: usize, j: usize) -> usize {
    let s = i + j;
    s * (s + 1) / 2 + j
}

impl BiJet {
    pub fn zero(base: (f64, f64), degree: usize) -> Self {
        assert!(degree <= MAX_ORDER);
        BiJet { base, degree, d: vec![0.0; bidx(0, degree) + 1] }
    }

    pub fn constant(c: f64, base: (f64, f64), degree: usize) -> Self {
        let mut z = Self::zero(base, degree);
        z.d[0] = c;
        z
    }

    /// The coordinate function `u`.
    pub fn var_u(base: (f64, f64), degree: usize) -> Self {
        let mut z = Self::constant(base.0, base, degree);
        if degree > 0 {
            z.d[bidx(1, 0)] = 1.0;
        }
        z
    }

    /// The coordinate function `v`.
    pub fn var_v(base: (f64, f64), degree: usize) -> Self {
        let mut z = Self::constant(base.1, base, degree);
        if degree > 0 {
            z.d[bidx(0, 1)] = 1.0;
        }
        z
    }

    /// Lifts a jet in `u` (at `base.0`) to a function of `(u, v)`.
    pub fn from_u(j: &Jet, v0: f64, degree: usize) -> Self {
        let degree = degree.min(j.order());
        let mut z = Self::zero((j.base_point(), v0), degree);
        for i in 0..=degree {
            z.d[bidx(i, 0)] = j.deriv(i);
        }
        z
    }

    /// Lifts a jet in `v` (at `base.1`) to a function of `(u, v)`.
    pub fn from_v(j: &Jet, u0: f64, degree: usize) -> Self {
        let degree = degree.min(j.order());
        let mut z = Self::zero((u0, j.base_point()), degree);
        for k in 0..=degree {
            z.d[bidx(0, k)] = j.deriv(k);
        }
        z
    }

    pub fn base_point(&self) -> (f64, f64) {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `∂u^i ∂v^j f` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= self.degree, "partial ({i},{j}) exceeds degree {}", self.degree);
        self.d[bidx(i, j)]
    }

    pub fn set_partial(&mut self, i: usize, j: usize, x: f64) {
        self.d[bidx(i, j)] = x;
    }

    pub fn grad(&self) -> [f64; 2] {
        [self.partial(1, 0), self.partial(0, 1)]
    }

    pub fn hessian(&self) -> [[f64; 2]; 2] {
        let uv = self.partial(1, 1);
        [[self.partial(2, 0), uv], [uv, self.partial(0, 2)]]
    }

    /// `∂f/∂u`; one degree is lost.
    pub fn du(&self) -> Result<BiJet> {
        self.shifted(1, 0)
    }

    /// `∂f/∂v`; one degree is lost.
    pub fn dv(&self) -> Result<BiJet> {
        self.shifted(0, 1)
    }

    fn shifted(&self, a: usize, b: usize) -> Result<BiJet> {
        if self.degree == 0 {
            return Err(Error::OrderExhausted);
        }
        let mut z = Self::zero(self.base, self.degree - 1);
        for s in 0..=z.degree {
            for j in 0..=s {
                let i = s - j;
                z.d[bidx(i, j)] = self.d[bidx(i + a, j + b)];
            }
        }
        Ok(z)
    }

    /// Restriction to the line `base + s·dir`, as a jet in `s` at 0.
    pub fn along(&self, dir: (f64, f64)) -> Jet {
        let d = (0..=self.degree)
            .map(|k| {
                (0..=k)
                    .map(|i| {
                        binomial(k, i)
                            * dir.0.powi(i as i32)
                            * dir.1.powi((k - i) as i32)
                            * self.d[bidx(i, k - i)]
                    })
                    .sum()
            })
            .collect();
        Jet::from_derivs(0.0, d)
    }

    /// Directional derivative along the vector field with components `(a, b)`.
    pub fn along_field(&self, a: &BiJet, b: &BiJet) -> Result<BiJet> {
        Ok(a.mul_t(&self.du()?).add_t(&b.mul_t(&self.dv()?)))
    }

    pub fn truncate(&self, degree: usize) -> BiJet {
        let degree = degree.min(self.degree);
        BiJet { base: self.base, degree, d: self.d[..=bidx(0, degree)].to_vec() }
    }

    /// Taylor polynomial evaluated at `(u, v)`.
    pub fn eval_at(&self, u: f64, v: f64) -> f64 {
        let (hu, hv) = (u - self.base.0, v - self.base.1);
        let mut acc = 0.0;
        for s in 0..=self.degree {
            for j in 0..=s {
                let i = s - j;
                acc += self.d[bidx(i, j)] * hu.powi(i as i32) * hv.powi(j as i32)
                    / (factorial(i) * factorial(j));
            }
        }
        acc
    }
}

impl fmt::Debug for BiJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiJet@{:?}/{}{:?}", self.base, self.degree, self.d)
    }
}

impl Taylor for BiJet {
    fn value(&self) -> f64 {
        self.d[0]
    }

    fn order(&self) -> usize {
        self.degree
    }

    fn constant_like(&self, c: f64) -> Self {
        BiJet::constant(c, self.base, self.degree)
    }

    fn add_t(&self, o: &Self) -> Self {
        let degree = self.degree.min(o.degree);
        let n = bidx(0, degree) + 1;
        BiJet { base: self.base, degree, d: (0..n).map(|k| self.d[k] + o.d[k]).collect() }
    }

    fn sub_t(&self, o: &Self) -> Self {
        let degree = self.degree.min(o.degree);
        let n = bidx(0, degree) + 1;
        BiJet { base: self.base, degree, d: (0..n).map(|k| self.d[k] - o.d[k]).collect() }
    }

    fn mul_t(&self, o: &Self) -> Self {
        let degree = self.degree.min(o.degree);
        let mut z = BiJet::zero(self.base, degree);
        for s in 0..=degree {
            for j in 0..=s {
                let i = s - j;
                let mut acc = 0.0;
                for a in 0..=i {
                    for b in 0..=j {
                        acc += binomial(i, a)
                            * binomial(j, b)
                            * self.d[bidx(a, b)]
                            * o.d[bidx(i - a, j - b)];
                    }
                }
                z.d[bidx(i, j)] = acc;
            }
        }
        z
    }

    fn scale(&self, c: f64) -> Self {
        BiJet { base: self.base, degree: self.degree, d: self.d.iter().map(|x| x * c).collect() }
    }

    fn offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.d[0] += c;
        out
    }
}

macro_rules! impl_ops {
    ($t:ty) => {
        impl Add<&$t> for &$t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                self.add_t(o)
            }
        }
        impl Add<$t> for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                self.add_t(&o)
            }
        }
        impl Add<&$t> for $t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                self.add_t(o)
            }
        }
        impl Add<$t> for &$t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                self.add_t(&o)
            }
        }
        impl Sub<&$t> for &$t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                self.sub_t(o)
            }
        }
        impl Sub<$t> for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                self.sub_t(&o)
            }
        }
        impl Sub<&$t> for $t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                self.sub_t(o)
            }
        }
        impl Sub<$t> for &$t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                self.sub_t(&o)
            }
        }
        impl Mul<&$t> for &$t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                self.mul_t(o)
            }
        }
        impl Mul<$t> for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                self.mul_t(&o)
            }
        }
        impl Mul<&$t> for $t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                self.mul_t(o)
            }
        }
        impl Mul<$t> for &$t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                self.mul_t(&o)
            }
        }
        impl Mul<f64> for &$t {
            type Output = $t;
            fn mul(self, c: f64) -> $t {
                self.scale(c)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, c: f64) -> $t {
                self.scale(c)
            }
        }
        impl Mul<&$t> for f64 {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                o.scale(self)
            }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                o.scale(self)
            }
        }
        impl Add<f64> for &$t {
            type Output = $t;
            fn add(self, c: f64) -> $t {
                self.offset(c)
            }
        }
        impl Add<f64> for $t {
            type Output = $t;
            fn add(self, c: f64) -> $t {
                self.offset(c)
            }
        }
        impl Sub<f64> for $t {
            type Output = $t;
            fn sub(self, c: f64) -> $t {
                self.offset(-c)
            }
        }
        impl Div<f64> for &$t {
            type Output = $t;
            fn div(self, c: f64) -> $t {
                self.scale(1.0 / c)
            }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, c: f64) -> $t {
                self.scale(1.0 / c)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scale(-1.0)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scale(-1.0)
            }
        }
    };
}

impl_ops!(Jet);
impl_ops!(BiJet);

/// A vector in R^3 whose components are jets.
pub type Vec3<S> = [S; 3];

pub fn dot<S: Taylor>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a[0].mul_t(&b[0]).add_t(&a[1].mul_t(&b[1])).add_t(&a[2].mul_t(&b[2]))
}

pub fn cross<S: Taylor>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [
        a[1].mul_t(&b[2]).sub_t(&a[2].mul_t(&b[1])),
        a[2].mul_t(&b[0]).sub_t(&a[0].mul_t(&b[2])),
        a[0].mul_t(&b[1]).sub_t(&a[1].mul_t(&b[0])),
    ]
}

pub fn det3<S: Taylor>(a: &Vec3<S>, b: &Vec3<S>, c: &Vec3<S>) -> S {
    dot(a, &cross(b, c))
}

pub fn norm<S: Taylor>(a: &Vec3<S>) -> Result<S> {
    dot(a, a).sqrt()
}

pub fn normalize<S: Taylor>(a: &Vec3<S>) -> Result<Vec3<S>> {
    let r = norm(a)?.recip()?;
    Ok(scale3(a, &r))
}

pub fn scale3<S: Taylor>(a: &Vec3<S>, s: &S) -> Vec3<S> {
    [a[0].mul_t(s), a[1].mul_t(s), a[2].mul_t(s)]
}

pub fn scale3c<S: Taylor>(a: &Vec3<S>, c: f64) -> Vec3<S> {
    [a[0].scale(c), a[1].scale(c), a[2].scale(c)]
}

pub fn add3<S: Taylor>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0].add_t(&b[0]), a[1].add_t(&b[1]), a[2].add_t(&b[2])]
}

pub fn sub3<S: Taylor>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0].sub_t(&b[0]), a[1].sub_t(&b[1]), a[2].sub_t(&b[2])]
}

pub fn values3<S: Taylor>(a: &Vec3<S>) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

pub fn derivative3(a: &Vec3<Jet>) -> Result<Vec3<Jet>> {
    Ok([a[0].derivative()?, a[1].derivative()?, a[2].derivative()?])
}

pub fn du3(a: &Vec3<BiJet>) -> Result<Vec3<BiJet>> {
    Ok([a[0].du()?, a[1].du()?, a[2].du()?])
}

pub fn dv3(a: &Vec3<BiJet>) -> Result<Vec3<BiJet>> {
    Ok([a[0].dv()?, a[1].dv()?, a[2].dv()?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_product_matches_expansion() {
        // (1 + 2t)(3 - t + t^2) = 3 + 5t - t^2 + 2t^3 at t = 0.5
        let t = Jet::variable(0.5, 4);
        let p = (&t * 2.0) + 1.0;
        let q = (&t * &t) - &t + 3.0;
        let r = &p * &q;
        let f = |x: f64| 3.0 + 5.0 * x - x * x + 2.0 * x * x * x;
        assert_relative_eq!(r.value(), f(0.5), epsilon = 1e-14);
        assert_relative_eq!(r.deriv(1), 5.0 - 2.0 * 0.5 + 6.0 * 0.25, epsilon = 1e-14);
        assert_relative_eq!(r.deriv(2), -2.0 + 12.0 * 0.5, epsilon = 1e-14);
        assert_relative_eq!(r.deriv(3), 12.0, epsilon = 1e-13);
        assert_relative_eq!(r.deriv(4), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn elementary_functions_match_known_derivatives() {
        let t = Jet::variable(0.3, 5);
        let s = t.sin();
        let c = t.cos();
        for k in 0..=5 {
            let ph = 0.3 + k as f64 * std::f64::consts::FRAC_PI_2;
            assert_relative_eq!(s.deriv(k), ph.sin(), epsilon = 1e-13);
            assert_relative_eq!(c.deriv(k), ph.cos(), epsilon = 1e-13);
        }
        let e = (&t * 2.0).exp();
        for k in 0..=5 {
            assert_relative_eq!(e.deriv(k), 2f64.powi(k as i32) * 0.6f64.exp(), epsilon = 1e-12);
        }
        // d/dt atan t = 1/(1+t^2), second derivative -2t/(1+t^2)^2
        let a = t.atan();
        assert_relative_eq!(a.deriv(1), 1.0 / 1.09, epsilon = 1e-14);
        assert_relative_eq!(a.deriv(2), -0.6 / (1.09 * 1.09), epsilon = 1e-14);
        let r = t.sqrt().unwrap();
        assert_relative_eq!(r.deriv(2), -0.25 * 0.3f64.powf(-1.5), epsilon = 1e-12);
        let l = t.ln().unwrap();
        assert_relative_eq!(l.deriv(3), 2.0 / 0.027, epsilon = 1e-10);
    }

    #[test]
    fn sin_squared_plus_cos_squared_is_one() {
        let t = Jet::variable(1.1, 6);
        let w = (&t * &t).offset(0.2);
        let one = w.sin().square() + w.cos().square();
        assert_relative_eq!(one.value(), 1.0, epsilon = 1e-14);
        for k in 1..=6 {
            assert!(one.deriv(k).abs() < 1e-10, "k={k}: {}", one.deriv(k));
        }
    }

    #[test]
    fn atan2_matches_branch_and_derivative() {
        let t = Jet::variable(0.0, 3);
        let y = t.sin().offset(0.5);
        let x = t.cos().scale(-1.0);
        let a = y.atan2(&x).unwrap();
        assert_relative_eq!(a.value(), 0.5f64.atan2(-1.0), epsilon = 1e-15);
        let h = 1e-6;
        let f = |s: f64| (0.5 + s.sin()).atan2(-s.cos());
        assert_relative_eq!(a.deriv(1), (f(h) - f(-h)) / (2.0 * h), epsilon = 1e-8);
        let z = Jet::constant(0.0, 0.0, 2);
        assert!(matches!(z.atan2(&z), Err(Error::OriginAtan2)));
    }

    #[test]
    fn division_by_near_zero_is_reported() {
        let t = Jet::variable(0.0, 3);
        assert!(matches!(t.recip(), Err(Error::DegenerateDivision { .. })));
    }

    #[test]
    fn divide_by_power_recovers_quotient() {
        // sin t / t at 0: 1, 0, -1/3, 0
        let s = Jet::variable(0.0, 5).sin();
        let q = s.divide_by_power(1).unwrap();
        assert_relative_eq!(q.deriv(0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(q.deriv(2), -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn bijet_product_and_partials() {
        let base = (0.4, -0.7);
        let u = BiJet::var_u(base, 3);
        let v = BiJet::var_v(base, 3);
        // f = u^2 v + sin(u v)
        let f = &(&u * &u) * &v + (&u * &v).sin();
        let (a, b) = base;
        let w = a * b;
        assert_relative_eq!(f.value(), a * a * b + w.sin(), epsilon = 1e-14);
        assert_relative_eq!(f.partial(1, 0), 2.0 * a * b + b * w.cos(), epsilon = 1e-14);
        assert_relative_eq!(f.partial(0, 1), a * a + a * w.cos(), epsilon = 1e-14);
        assert_relative_eq!(f.partial(1, 1), 2.0 * a + w.cos() - w * w.sin(), epsilon = 1e-13);
        assert_relative_eq!(f.partial(2, 0), 2.0 * b - b * b * w.sin(), epsilon = 1e-13);
        assert_relative_eq!(
            f.partial(2, 1),
            2.0 - 2.0 * b * w.sin() - b * b * a * w.cos(),
            epsilon = 1e-12
        );
        let fu = f.du().unwrap();
        assert_eq!(fu.degree(), 2);
        assert_relative_eq!(fu.partial(1, 1), f.partial(2, 1), epsilon = 1e-15);
    }

    #[test]
    fn tensor_lift_and_restriction() {
        let ju = Jet::variable(0.2, 5).exp();
        let jv = Jet::variable(1.0, 5).cos();
        let f = BiJet::from_u(&ju, 1.0, 3) * BiJet::from_v(&jv, 0.2, 3);
        assert_relative_eq!(f.partial(2, 1), 0.2f64.exp() * -(1.0f64.sin()), epsilon = 1e-14);
        let line = f.along((1.0, 0.0));
        assert_relative_eq!(line.deriv(3), 0.2f64.exp() * 1.0f64.cos(), epsilon = 1e-14);
    }
}
