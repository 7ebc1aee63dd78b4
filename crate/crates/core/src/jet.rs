//! Second-order forward-mode automatic differentiation in two variables.
//!
//! A [`Jet2`] carries a value, its gradient, and its (symmetric) Hessian, all
//! propagated exactly through arithmetic — no truncation error, unlike finite
//! differences. The manufactured solutions use jets to produce the source
//! terms (which need up to second derivatives of the prescribed fields) to
//! machine precision.
//!
//! `min`/`max` are supported for piecewise-smooth coefficients. An evaluation
//! that lands exactly on a tie keeps the (well-defined) value but marks the
//! derivative slots as unreliable via the `kink` flag; the flag propagates
//! through arithmetic and is dropped when a later strict comparison discards
//! the flagged operand (the clamp at the bottom of a ramp, for instance, is
//! smooth even where the inner ramp expression ties). [`jet_eval`] turns a
//! still-flagged result into an error rather than returning bogus
//! derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra as na;
use thiserror::Error;

/// Value, gradient, and Hessian of a scalar function of `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
    /// Derivative slots are unreliable (evaluation tied a `min`/`max`).
    pub kink: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JetError {
    #[error("evaluation point lies on a min/max kink; derivatives are not defined there")]
    NonDifferentiablePoint,
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Self { v, dx: 0.0, dy: 0.0, dxx: 0.0, dxy: 0.0, dyy: 0.0, kink: false }
    }

    /// Seed for the first coordinate: value `x0`, unit derivative in x.
    pub const fn var_x(x0: f64) -> Self {
        Self { v: x0, dx: 1.0, dy: 0.0, dxx: 0.0, dxy: 0.0, dyy: 0.0, kink: false }
    }

    /// Seed for the second coordinate: value `y0`, unit derivative in y.
    pub const fn var_y(y0: f64) -> Self {
        Self { v: y0, dx: 0.0, dy: 1.0, dxx: 0.0, dxy: 0.0, dyy: 0.0, kink: false }
    }

    pub fn grad(&self) -> na::Vector2<f64> {
        na::Vector2::new(self.dx, self.dy)
    }

    pub fn laplacian(&self) -> f64 {
        self.dxx + self.dyy
    }

    /// Chain rule through a scalar map with first and second derivatives
    /// `f1 = f'(v)`, `f2 = f''(v)`.
    fn chain(&self, fv: f64, f1: f64, f2: f64) -> Jet2 {
        Jet2 {
            v: fv,
            dx: f1 * self.dx,
            dy: f1 * self.dy,
            dxx: f1 * self.dxx + f2 * self.dx * self.dx,
            dxy: f1 * self.dxy + f2 * self.dx * self.dy,
            dyy: f1 * self.dyy + f2 * self.dy * self.dy,
            kink: self.kink,
        }
    }

    pub fn sin(self) -> Jet2 {
        self.chain(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(self) -> Jet2 {
        self.chain(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn exp(self) -> Jet2 {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(self) -> Jet2 {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn powi(self, n: i32) -> Jet2 {
        let f1 = f64::from(n) * self.v.powi(n - 1);
        let f2 = f64::from(n) * f64::from(n - 1) * self.v.powi(n - 2);
        self.chain(self.v.powi(n), f1, f2)
    }

    fn recip(self) -> Jet2 {
        let inv = 1.0 / self.v;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    /// Pointwise maximum. Strict comparisons pick a branch outright; a tie
    /// keeps the common value and flags the derivatives, unless both branches
    /// carry identical jets (then there is no kink at all).
    pub fn max(self, other: Jet2) -> Jet2 {
        if self.v > other.v {
            self
        } else if other.v > self.v {
            other
        } else if self == other {
            self
        } else {
            Jet2 { kink: true, ..self }
        }
    }

    /// Pointwise minimum; tie handling as in [`Jet2::max`].
    pub fn min(self, other: Jet2) -> Jet2 {
        if self.v < other.v {
            self
        } else if other.v < self.v {
            other
        } else if self == other {
            self
        } else {
            Jet2 { kink: true, ..self }
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
            kink: self.kink || o.kink,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
            kink: self.kink,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + 2.0 * self.dx * o.dx + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + 2.0 * self.dy * o.dy + self.v * o.dyy,
            kink: self.kink || o.kink,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, c: f64) -> Jet2 {
        Jet2 { v: self.v + c, ..self }
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, j: Jet2) -> Jet2 {
        j + self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, c: f64) -> Jet2 {
        self + (-c)
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, j: Jet2) -> Jet2 {
        -j + self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        Jet2 {
            v: self.v * c,
            dx: self.dx * c,
            dy: self.dy * c,
            dxx: self.dxx * c,
            dxy: self.dxy * c,
            dyy: self.dyy * c,
            kink: self.kink,
        }
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j * self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, c: f64) -> Jet2 {
        self * (1.0 / c)
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    fn div(self, j: Jet2) -> Jet2 {
        j.recip() * self
    }
}

/// Evaluate a scalar field at `(x, y)` with exact first and second
/// derivatives. Fails if the evaluation point sits exactly on a `min`/`max`
/// kink of the field.
pub fn jet_eval(
    field: impl Fn(Jet2, Jet2) -> Jet2,
    x: f64,
    y: f64,
) -> Result<Jet2, JetError> {
    let j = field(Jet2::var_x(x), Jet2::var_y(y));
    if j.kink {
        Err(JetError::NonDifferentiablePoint)
    } else {
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn sine_wave_derivatives() {
        let j = jet_eval(|x, _| (2.0 * PI * x).sin(), 0.0, 0.3).unwrap();
        assert_abs_diff_eq!(j.v, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dx, 2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(j.dy, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dxx, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn square_has_constant_second_derivative() {
        let j = jet_eval(|x, _| x * x, 1.7, 0.0).unwrap();
        assert_abs_diff_eq!(j.v, 1.7 * 1.7, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dx, 3.4, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dxx, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dxy, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn product_and_quotient_rules() {
        // f = x^2 y / (1 + y^2) at (2, 3): check against hand derivatives
        let f = |x: Jet2, y: Jet2| x.powi(2) * y / (1.0 + y * y);
        let j = jet_eval(f, 2.0, 3.0).unwrap();
        let denom = 10.0;
        assert_abs_diff_eq!(j.v, 4.0 * 3.0 / denom, epsilon = 1e-14);
        assert_abs_diff_eq!(j.dx, 2.0 * 2.0 * 3.0 / denom, epsilon = 1e-14);
        // d/dy [y/(1+y^2)] = (1 - y^2)/(1+y^2)^2 = -8/100
        assert_abs_diff_eq!(j.dy, 4.0 * (-8.0 / 100.0), epsilon = 1e-14);
        // d2/dy2 [y/(1+y^2)] = 2y(y^2-3)/(1+y^2)^3 = 36/1000
        assert_abs_diff_eq!(j.dyy, 4.0 * (36.0 / 1000.0), epsilon = 1e-13);
        assert_abs_diff_eq!(j.dxy, 2.0 * 2.0 * (-8.0 / 100.0), epsilon = 1e-13);
    }

    #[test]
    fn mixed_partial_matches_closed_form() {
        // psi = sin^2(2 pi x) sin^2(2 pi y); d2 psi / dx dy = 4 pi^2 sin(4 pi x) sin(4 pi y)
        let psi = |x: Jet2, y: Jet2| (2.0 * PI * x).sin().powi(2) * (2.0 * PI * y).sin().powi(2);
        let (x, y) = (0.337, 0.61);
        let j = jet_eval(psi, x, y).unwrap();
        let expect = 4.0 * PI * PI * (4.0 * PI * x).sin() * (4.0 * PI * y).sin();
        assert_abs_diff_eq!(j.dxy, expect, epsilon = 1e-11);
    }

    #[test]
    fn max_picks_strictly_larger_branch() {
        let f = |x: Jet2, y: Jet2| (3.0 * x - 1.0).max(3.0 * y - 1.0);
        let j = jet_eval(f, 0.5, 0.2).unwrap();
        assert_abs_diff_eq!(j.v, 0.5, epsilon = 1e-15);
        assert_eq!((j.dx, j.dy), (3.0, 0.0));
    }

    #[test]
    fn tie_with_distinct_slopes_is_an_error() {
        let f = |x: Jet2, y: Jet2| (3.0 * x - 1.0).max(3.0 * y - 1.0);
        assert_eq!(jet_eval(f, 0.5, 0.5), Err(JetError::NonDifferentiablePoint));
    }

    #[test]
    fn clamp_discards_inactive_kink() {
        // below the ramp the clamp at zero wins strictly, so the inner tie is harmless
        let f = |x: Jet2, y: Jet2| {
            Jet2::constant(1.0).min(Jet2::constant(0.0).max((3.0 * x - 1.0).max(3.0 * y - 1.0)))
        };
        let j = jet_eval(f, 0.2, 0.2).unwrap();
        assert_eq!(j.v, 0.0);
        assert_eq!((j.dx, j.dy, j.dxx), (0.0, 0.0, 0.0));
    }

    #[test]
    fn tie_between_identical_jets_is_smooth() {
        let f = |x: Jet2, _y: Jet2| x.max(x);
        let j = jet_eval(f, 0.4, 0.0).unwrap();
        assert_eq!((j.v, j.dx), (0.4, 1.0));
    }
}
