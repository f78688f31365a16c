//! Truncated bivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients of a function of two variables
//! `(x, y)` about a base point, truncated after total degree [`ORDER`].
//! Arithmetic and the elementary functions propagate the coefficients
//! exactly, so partial derivatives come out to roundoff with no finite
//! differencing.
//!
//! Univariate jets (in arc length or a curve parameter) use the same type
//! with every `y` coefficient left at zero.
//!
//! Differentiating a jet ([`Jet::d_x`], [`Jet::d_y`]) lowers the number of
//! trustworthy orders by one. Products and compositions are exact up to the
//! lowest valid order among their inputs; callers track that themselves.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Highest total degree kept.
pub const ORDER: usize = 4;

/// Number of stored coefficients, `(ORDER + 1)(ORDER + 2) / 2`.
pub const LEN: usize = (ORDER + 1) * (ORDER + 2) / 2;

/// Position of the coefficient of `x^i y^j`.
#[inline]
pub const fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

const fn exponents() -> [(usize, usize); LEN] {
    let mut out = [(0, 0); LEN];
    let mut d = 0;
    while d <= ORDER {
        let mut j = 0;
        while j <= d {
            out[index(d - j, j)] = (d - j, j);
            j += 1;
        }
        d += 1;
    }
    out
}

const EXPONENTS: [(usize, usize); LEN] = exponents();

const FACTORIAL: [f64; ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Default for Jet {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        Self { c }
    }

    /// The independent variable `x` anchored at `x0`.
    pub const fn var_x(x0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x0;
        c[1] = 1.0;
        Self { c }
    }

    /// The independent variable `y` anchored at `y0`.
    pub const fn var_y(y0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = y0;
        c[2] = 1.0;
        Self { c }
    }

    /// Builds a univariate jet from its value and derivatives `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut c = [0.0; LEN];
        for (k, d) in derivs.iter().take(ORDER + 1).enumerate() {
            c[index(k, 0)] = d / FACTORIAL[k];
        }
        Self { c }
    }

    /// Builds a univariate jet from raw Taylor coefficients.
    pub fn from_taylor(coeffs: &[f64]) -> Self {
        let mut c = [0.0; LEN];
        for (k, a) in coeffs.iter().take(ORDER + 1).enumerate() {
            c[index(k, 0)] = *a;
        }
        Self { c }
    }

    /// Builds a bivariate jet from partial derivatives given as
    /// `(i, j, value)` triples for `∂^{i+j} f / ∂x^i ∂y^j`.
    pub fn from_partials(partials: &[(usize, usize, f64)]) -> Self {
        let mut c = [0.0; LEN];
        for &(i, j, d) in partials {
            if i + j <= ORDER {
                c[index(i, j)] = d / (FACTORIAL[i] * FACTORIAL[j]);
            }
        }
        Self { c }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of `x^i y^j`.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > ORDER {
            0.0
        } else {
            self.c[index(i, j)]
        }
    }

    /// Partial derivative `∂^{i+j} f / ∂x^i ∂y^j` at the base point.
    #[inline]
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * FACTORIAL[i.min(ORDER)] * FACTORIAL[j.min(ORDER)]
    }

    /// k-th derivative of a univariate jet.
    #[inline]
    pub fn deriv(&self, k: usize) -> f64 {
        self.partial(k, 0)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// Jet of `∂f/∂x`. The top-order coefficients become zero.
    pub fn d_x(&self) -> Self {
        let mut c = [0.0; LEN];
        for (k, &(i, j)) in EXPONENTS.iter().enumerate() {
            if i + j < ORDER {
                c[k] = (i + 1) as f64 * self.c[index(i + 1, j)];
            }
        }
        Self { c }
    }

    /// Jet of `∂f/∂y`. The top-order coefficients become zero.
    pub fn d_y(&self) -> Self {
        let mut c = [0.0; LEN];
        for (k, &(i, j)) in EXPONENTS.iter().enumerate() {
            if i + j < ORDER {
                c[k] = (j + 1) as f64 * self.c[index(i, j + 1)];
            }
        }
        Self { c }
    }

    /// Same jet with the constant term removed.
    fn increment(&self) -> Self {
        let mut c = self.c;
        c[0] = 0.0;
        Self { c }
    }

    /// Applies a scalar function given its derivatives `f(a0), f'(a0), ...,
    /// f^(ORDER)(a0)` at the constant term `a0` of `self`.
    pub fn apply(&self, derivs: [f64; ORDER + 1]) -> Self {
        let h = self.increment();
        let mut out = Self::constant(derivs[0]);
        let mut power = h;
        for (k, d) in derivs.iter().enumerate().skip(1) {
            out += power * (d / FACTORIAL[k]);
            if k < ORDER {
                power = power * h;
            }
        }
        out
    }

    /// Evaluates this jet's Taylor polynomial at the increments `(dx, dy)`.
    ///
    /// `dx` and `dy` are usually univariate jets in a curve parameter; their
    /// constant terms are ignored, so the result is the jet of
    /// `f(x0 + dx(s), y0 + dy(s))`.
    pub fn compose(&self, dx: &Jet, dy: &Jet) -> Self {
        let dx = dx.increment();
        let dy = dy.increment();
        let mut xp = [Self::constant(1.0); ORDER + 1];
        let mut yp = [Self::constant(1.0); ORDER + 1];
        for k in 1..=ORDER {
            xp[k] = xp[k - 1] * dx;
            yp[k] = yp[k - 1] * dy;
        }
        let mut out = Self::constant(0.0);
        for (k, &(i, j)) in EXPONENTS.iter().enumerate() {
            let a = self.c[k];
            if a != 0.0 {
                out += xp[i] * yp[j] * a;
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.value();
        let r = 1.0 / x;
        let r2 = r * r;
        self.apply([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2, 24.0 * r2 * r2 * r])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.apply([e; ORDER + 1])
    }

    pub fn ln(&self) -> Self {
        let x = self.value();
        let r = 1.0 / x;
        let r2 = r * r;
        self.apply([x.ln(), r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.apply([s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.apply([c, -s, -c, s, c])
    }

    pub fn sinh(&self) -> Self {
        let x = self.value();
        let (s, c) = (x.sinh(), x.cosh());
        self.apply([s, c, s, c, s])
    }

    pub fn cosh(&self) -> Self {
        let x = self.value();
        let (s, c) = (x.sinh(), x.cosh());
        self.apply([c, s, c, s, c])
    }

    pub fn tanh(&self) -> Self {
        self.sinh() * self.cosh().recip()
    }

    /// `self^p` for a real exponent; the base must be positive.
    pub fn powf(&self, p: f64) -> Self {
        let x = self.value();
        let mut derivs = [0.0; ORDER + 1];
        let mut coef = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            *d = coef * x.powf(p - k as f64);
            coef *= p - k as f64;
        }
        self.apply(derivs)
    }

    /// `self^n` by repeated multiplication; valid at any base for `n >= 0`.
    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut out = Self::constant(1.0);
        let mut base = *self;
        let mut n = n as u32;
        while n > 0 {
            if n & 1 == 1 {
                out = out * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (ka, &(ia, ja)) in EXPONENTS.iter().enumerate() {
            let a = self.c[ka];
            if a == 0.0 {
                continue;
            }
            let room = ORDER - (ia + ja);
            for (kb, &(ib, jb)) in EXPONENTS.iter().enumerate() {
                if ib + jb > room {
                    break;
                }
                c[index(ia + ib, ja + jb)] += a * rhs.c[kb];
            }
        }
        Jet { c }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for a in self.c.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

/// A point of ℝ³ carried as three jets.
pub type Jet3 = [Jet; 3];

pub fn dot3(a: &Jet3, b: &Jet3) -> Jet {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Jet3, b: &Jet3) -> Jet3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn scale3(a: &Jet3, s: Jet) -> Jet3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn map3(a: &Jet3, f: impl Fn(&Jet) -> Jet) -> Jet3 {
    [f(&a[0]), f(&a[1]), f(&a[2])]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn index_layout_is_dense() {
        let mut seen = [false; LEN];
        for &(i, j) in EXPONENTS.iter() {
            seen[index(i, j)] = true;
        }
        assert!(seen.iter().all(|s| *s));
        assert_eq!(EXPONENTS[index(2, 1)], (2, 1));
    }

    #[test]
    fn polynomial_partials() {
        // f = x^2 y + 3 x y^2 at (1, 2)
        let x = Jet::var_x(1.0);
        let y = Jet::var_y(2.0);
        let f = x * x * y + 3.0 * x * y * y;
        assert_eq!(f.value(), 2.0 + 12.0);
        assert_eq!(f.partial(1, 0), 2.0 * 2.0 + 3.0 * 4.0);
        assert_eq!(f.partial(0, 1), 1.0 + 12.0);
        assert_eq!(f.partial(1, 1), 2.0 + 12.0);
        assert_eq!(f.partial(2, 1), 2.0);
        assert_eq!(f.partial(1, 2), 6.0);
        assert_eq!(f.partial(3, 0), 0.0);
    }

    #[test]
    fn univariate_elementary_derivatives() {
        let x0 = 0.7;
        let x = Jet::var_x(x0);
        let s = x.sin();
        assert!(close(s.deriv(3), -x0.cos(), 1e-15));
        assert!(close(s.deriv(4), x0.sin(), 1e-15));
        let e = x.exp();
        assert!(close(e.deriv(4), x0.exp(), 1e-15));
        let l = x.ln();
        assert!(close(l.deriv(3), 2.0 / x0.powi(3), 1e-14));
        let r = x.sqrt();
        assert!(close(r.deriv(2), -0.25 * x0.powf(-1.5), 1e-14));
        // tanh' = 1 - tanh^2, tanh'' = -2 tanh (1 - tanh^2)
        let t = x.tanh();
        let tv = x0.tanh();
        assert!(close(t.deriv(1), 1.0 - tv * tv, 1e-14));
        assert!(close(t.deriv(2), -2.0 * tv * (1.0 - tv * tv), 1e-14));
        assert!(close(t.deriv(3), (1.0 - tv * tv) * (6.0 * tv * tv - 2.0), 1e-13));
    }

    #[test]
    fn powi_at_zero_base() {
        let x = Jet::var_x(0.0);
        let p = x.powi(2);
        assert_eq!(p.deriv(0), 0.0);
        assert_eq!(p.deriv(1), 0.0);
        assert_eq!(p.deriv(2), 2.0);
        assert_eq!(p.deriv(3), 0.0);
        assert!(p.is_finite());
    }

    #[test]
    fn derivative_then_compose_matches_chain_rule() {
        // f(x, y) = sin(x) * y^2, along x = s, y = 1 + 2 s
        let f = Jet::var_x(0.3).sin() * Jet::var_y(1.0).powi(2);
        let s = Jet::var_x(0.0);
        let g = f.compose(&s, &(s * 2.0));
        let direct = Jet::var_x(0.3).sin() * (Jet::var_x(0.0) * 2.0 + 1.0).powi(2);
        for k in 0..=ORDER {
            assert!(close(g.deriv(k), direct.deriv(k), 1e-13), "order {k}");
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Jet::var_x(1.3).cosh() + Jet::var_y(0.4);
        let b = Jet::var_y(0.4).exp() * Jet::var_x(1.3);
        let q = (a * b) / b;
        for k in 0..LEN {
            let (i, j) = EXPONENTS[k];
            assert!(close(q.partial(i, j), a.partial(i, j), 1e-12));
        }
    }
}
