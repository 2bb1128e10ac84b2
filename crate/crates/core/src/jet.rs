//! Second-order forward-mode automatic differentiation.
//!
//! [`Jet`] carries a value, its gradient and its (packed, symmetric) Hessian
//! with respect to up to [`MAX_DIM`] independent variables. [`Jet1`] is the
//! one-variable specialisation used for ansatz profiles. Both implement
//! [`Real`], so closed-form expressions can be written once and evaluated on
//! plain `f64`, on `Jet1`, or on `Jet`.
//!
//! Every unary function goes through [`Real::chain`], which applies the
//! second-order chain rule
//! `(u∘g)'' = u''(g) ∇g ∇gᵀ + u'(g) ∇²g`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use nalgebra::{DMatrix, DVector};

/// Largest number of independent variables a [`Jet`] can track.
pub const MAX_DIM: usize = 8;

const PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Scalar types that support the elementary functions needed by the solution
/// families, with derivatives propagated through [`Real::chain`].
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// The underlying value.
    fn value(&self) -> f64;

    /// A constant (all derivatives zero).
    fn cst(c: f64) -> Self;

    /// Compose with a univariate function given its value and first two
    /// derivatives at `self.value()`.
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self;

    fn recip(self) -> Self {
        let v = self.value();
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    fn exp(self) -> Self {
        let e = self.value().exp();
        self.chain(e, e, e)
    }

    fn ln(self) -> Self {
        let v = self.value();
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    fn sqrt(self) -> Self {
        let s = self.value().sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.chain(c, -s, -c)
    }

    /// Real power with a real exponent. Negative bases give NaN, which the
    /// field layer reports as a domain error.
    fn powf(self, p: f64) -> Self {
        let v = self.value();
        let f0 = v.powf(p);
        let f1 = if p == 0.0 { 0.0 } else { p * v.powf(p - 1.0) };
        let f2 = if p == 0.0 || p == 1.0 {
            0.0
        } else {
            p * (p - 1.0) * v.powf(p - 2.0)
        };
        self.chain(f0, f1, f2)
    }

    fn powi(self, m: i32) -> Self {
        let v = self.value();
        let f0 = v.powi(m);
        let f1 = if m == 0 { 0.0 } else { m as f64 * v.powi(m - 1) };
        let f2 = if m == 0 || m == 1 {
            0.0
        } else {
            (m * (m - 1)) as f64 * v.powi(m - 2)
        };
        self.chain(f0, f1, f2)
    }

    /// Real `m`-th root for odd `m`, defined for negative arguments.
    fn odd_root(self, m: u32) -> Self {
        debug_assert!(m % 2 == 1, "odd_root needs an odd index");
        let v = self.value();
        let q = 1.0 / m as f64;
        let r = v.signum() * v.abs().powf(q);
        self.chain(r, q * r / v, q * (q - 1.0) * r / (v * v))
    }
}

impl Real for f64 {
    #[inline]
    fn value(&self) -> f64 {
        *self
    }

    #[inline]
    fn cst(c: f64) -> Self {
        c
    }

    #[inline]
    fn chain(self, f0: f64, _f1: f64, _f2: f64) -> Self {
        f0
    }

    fn odd_root(self, m: u32) -> Self {
        self.signum() * self.abs().powf(1.0 / m as f64)
    }
}

// ---------------------------------------------------------------------------
// Jet1
// ---------------------------------------------------------------------------

/// Value with first and second derivative in one variable.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet1 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet1 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet1 { v, d1, d2 }
    }

    /// The independent variable at `t`.
    pub const fn var(t: f64) -> Self {
        Jet1 { v: t, d1: 1.0, d2: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Real for Jet1 {
    #[inline]
    fn value(&self) -> f64 {
        self.v
    }

    #[inline]
    fn cst(c: f64) -> Self {
        Jet1::new(c, 0.0, 0.0)
    }

    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Jet1 {
            v: f0,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, o: Jet1) -> Jet1 {
        Jet1::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, o: Jet1) -> Jet1 {
        Jet1::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        Jet1::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet1) -> Jet1 {
        self * o.recip()
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet1 {
    type Output = Jet1;
    fn add(self, c: f64) -> Jet1 {
        Jet1::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet1 {
    type Output = Jet1;
    fn sub(self, c: f64) -> Jet1 {
        Jet1::new(self.v - c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(self, c: f64) -> Jet1 {
        Jet1::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl Div<f64> for Jet1 {
    type Output = Jet1;
    fn div(self, c: f64) -> Jet1 {
        Jet1::new(self.v / c, self.d1 / c, self.d2 / c)
    }
}

// ---------------------------------------------------------------------------
// Jet
// ---------------------------------------------------------------------------

/// Value, gradient and symmetric Hessian in up to [`MAX_DIM`] variables.
///
/// Constants have `dim == 0`; binary operations take the larger dimension of
/// their operands, so constants mix freely with seeded variables.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    dim: usize,
    v: f64,
    g: [f64; MAX_DIM],
    h: [f64; PACKED],
}

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet {
            dim: 0,
            v: c,
            g: [0.0; MAX_DIM],
            h: [0.0; PACKED],
        }
    }

    /// The `i`-th coordinate function of `dim` variables, evaluated at `x`.
    pub fn variable(dim: usize, i: usize, x: f64) -> Self {
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds MAX_DIM");
        assert!(i < dim);
        let mut j = Jet::constant(x);
        j.dim = dim;
        j.g[i] = 1.0;
        j
    }

    /// Seed all coordinate functions at the point `x`.
    pub fn seed(x: &[f64]) -> Vec<Jet> {
        (0..x.len()).map(|i| Jet::variable(x.len(), i, x[i])).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grad(&self) -> &[f64] {
        &self.g[..self.dim]
    }

    /// First partial derivative; zero beyond the tracked dimension.
    pub fn d(&self, i: usize) -> f64 {
        self.g[i]
    }

    /// Second partial derivative.
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.h[tri(i, j)]
    }

    pub fn gradient_vector(&self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| self.g[i])
    }

    /// The Hessian as a dense matrix; symmetric by construction.
    pub fn hessian_matrix(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| self.h[tri(i, j)])
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.g.iter().all(|x| x.is_finite()) && self.h.iter().all(|x| x.is_finite())
    }
}

impl Real for Jet {
    #[inline]
    fn value(&self) -> f64 {
        self.v
    }

    #[inline]
    fn cst(c: f64) -> Self {
        Jet::constant(c)
    }

    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = self;
        out.v = f0;
        for i in 0..self.dim {
            out.g[i] = f1 * self.g[i];
            for j in 0..=i {
                let t = tri(j, i);
                out.h[t] = f2 * self.g[i] * self.g[j] + f1 * self.h[t];
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self += o;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        let dim = self.dim.max(o.dim);
        self.dim = dim;
        self.v += o.v;
        for i in 0..o.dim {
            self.g[i] += o.g[i];
        }
        for t in 0..o.dim * (o.dim + 1) / 2 {
            self.h[t] += o.h[t];
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        self -= o;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, o: Jet) {
        let dim = self.dim.max(o.dim);
        self.dim = dim;
        self.v -= o.v;
        for i in 0..o.dim {
            self.g[i] -= o.g[i];
        }
        for t in 0..o.dim * (o.dim + 1) / 2 {
            self.h[t] -= o.h[t];
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let dim = self.dim.max(o.dim);
        let mut out = Jet::constant(self.v * o.v);
        out.dim = dim;
        for i in 0..dim {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..=i {
                let t = tri(j, i);
                out.h[t] = self.h[t] * o.v + self.v * o.h[t] + self.g[i] * o.g[j] + self.g[j] * o.g[i];
            }
        }
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, o: Jet) {
        *self = *self * o;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, c: f64) -> Jet {
        self.v -= c;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, c: f64) -> Jet {
        self.v *= c;
        for x in &mut self.g[..self.dim] {
            *x *= c;
        }
        for x in &mut self.h[..self.dim * (self.dim + 1) / 2] {
            *x *= c;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, c: f64) -> Jet {
        self * (1.0 / c)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Mul<Jet1> for f64 {
    type Output = Jet1;
    fn mul(self, j: Jet1) -> Jet1 {
        j * self
    }
}

impl Add<Jet1> for f64 {
    type Output = Jet1;
    fn add(self, j: Jet1) -> Jet1 {
        j + self
    }
}

impl Sub<Jet1> for f64 {
    type Output = Jet1;
    fn sub(self, j: Jet1) -> Jet1 {
        -j + self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn central_grad(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize) -> f64 {
        let h = 1e-5f64.max(1e-5 * x[i].abs());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    }

    fn sample<T: Real>(x: &[T]) -> T {
        let a = x[0] * x[1] + x[2].exp() * x[0].sin();
        let b = (x[1] * x[1] + 1.0).sqrt().ln() / (x[2] * x[2] + 2.0);
        a.powi(3) * 0.1 + b.powf(1.5) + (x[0] - 3.0).odd_root(3)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let x = [0.3, -1.2, 0.7];
        let j = sample(&Jet::seed(&x));
        let f = |p: &[f64]| sample(p);
        for i in 0..3 {
            assert_relative_eq!(j.d(i), central_grad(&f, &x, i), max_relative = 1e-6);
        }
    }

    #[test]
    fn hessian_matches_differences_of_gradient() {
        let x = [0.3, -1.2, 0.7];
        let j = sample(&Jet::seed(&x));
        for i in 0..3 {
            for k in 0..3 {
                let h = 1e-5;
                let mut xp = x;
                let mut xm = x;
                xp[k] += h;
                xm[k] -= h;
                let gp = sample(&Jet::seed(&xp)).d(i);
                let gm = sample(&Jet::seed(&xm)).d(i);
                assert_relative_eq!(j.dd(i, k), (gp - gm) / (2.0 * h), max_relative = 1e-6);
            }
        }
        let m = j.hessian_matrix(3);
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn jet1_agrees_with_jet_in_one_variable() {
        let f = |t: Jet1| (t * t + 1.0).recip() * t.exp();
        let g = |t: Jet| (t * t + 1.0).recip() * t.exp();
        let a = f(Jet1::var(0.4));
        let b = g(Jet::variable(1, 0, 0.4));
        assert_relative_eq!(a.v, b.value(), max_relative = 1e-15);
        assert_relative_eq!(a.d1, b.d(0), max_relative = 1e-15);
        assert_relative_eq!(a.d2, b.dd(0, 0), max_relative = 1e-14);
    }

    #[test]
    fn constants_mix_with_variables() {
        let x = Jet::seed(&[2.0, 3.0]);
        let y = Jet::constant(5.0) * x[0] + x[1] * 2.0 - 1.0;
        assert_eq!(y.value(), 15.0);
        assert_eq!(y.grad(), &[5.0, 2.0]);
        assert_eq!(y.dd(0, 1), 0.0);
    }

    #[test]
    fn odd_root_handles_negative_base() {
        let r = Jet1::var(-8.0).odd_root(3);
        assert_relative_eq!(r.v, -2.0, max_relative = 1e-15);
        assert_relative_eq!(r.d1, 1.0 / 12.0, max_relative = 1e-14);
    }
}
