//! Small dense tensors and the algebraic operators of asymmetric elasticity.
//!
//! Conventions, used consistently across the crate:
//!
//! * displacement gradients are stored row-by-component: `(grad u)[a][b] = du_a/dx_b`;
//! * tensor divergence acts along rows: `(div sigma)_a = sum_b d(sigma[a][b])/dx_b`;
//! * the traction on a face with unit normal `n` is the matrix-vector product
//!   `(sigma n)_a = sum_b sigma[a][b] n_b`.
//!
//! The asymmetry operator [`asym`] extracts the skew part of a tensor as a
//! rotation vector (a single scalar in 2D, three components in 3D), and
//! [`asym_adjoint`] is its adjoint under the Frobenius / Euclidean pairing:
//! `<asym_adjoint(r), sigma>_F = <r, asym(sigma)>`. Composing them gives
//! `asym(asym_adjoint(r)) = 2 r`.
//!
//! [`compliance`] applies the inverse of the isotropic stiffness
//! `tau -> 2 mu tau + lambda tr(tau) I`; it stays bounded as `lambda -> inf`,
//! which is what makes the mixed formulation robust in the incompressible
//! limit.

use std::fmt;

/// Number of rotation components carried by a `d`-dimensional model.
pub fn rot_dim(d: usize) -> usize {
    match d {
        2 => 1,
        3 => 3,
        _ => panic!("unsupported dimension {d}"),
    }
}

/// Dense second-order tensor in dimension 2 or 3.
///
/// Entries outside the active `d x d` block are kept at zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Tensor2 {
    d: usize,
    m: [[f64; 3]; 3],
}

impl Tensor2 {
    pub fn zero(d: usize) -> Self {
        assert!(d == 2 || d == 3, "unsupported dimension {d}");
        Self { d, m: [[0.0; 3]; 3] }
    }

    pub fn identity(d: usize) -> Self {
        let mut t = Self::zero(d);
        for a in 0..d {
            t.m[a][a] = 1.0;
        }
        t
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zero(d);
        for a in 0..d {
            for b in 0..d {
                t.m[a][b] = f(a, b);
            }
        }
        t
    }

    /// 2D tensor from rows `[[m00, m01], [m10, m11]]`.
    pub fn from_rows_2d(rows: [[f64; 2]; 2]) -> Self {
        Self::from_fn(2, |a, b| rows[a][b])
    }

    /// 3D tensor from rows.
    pub fn from_rows_3d(rows: [[f64; 3]; 3]) -> Self {
        Self::from_fn(3, |a, b| rows[a][b])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a < self.d && b < self.d);
        self.m[a][b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        debug_assert!(a < self.d && b < self.d);
        self.m[a][b] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|a| self.m[a][a]).sum()
    }

    /// Frobenius inner product `<self, other>_F = sum_ab self[a][b] other[a][b]`.
    pub fn frob_inner(&self, other: &Tensor2) -> f64 {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let mut s = 0.0;
        for a in 0..self.d {
            for b in 0..self.d {
                s += self.m[a][b] * other.m[a][b];
            }
        }
        s
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_inner(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Tensor2 {
        let mut t = *self;
        for a in 0..self.d {
            for b in 0..self.d {
                t.m[a][b] *= s;
            }
        }
        t
    }

    pub fn add(&self, other: &Tensor2) -> Tensor2 {
        assert_eq!(self.d, other.d, "dimension mismatch");
        let mut t = *self;
        for a in 0..self.d {
            for b in 0..self.d {
                t.m[a][b] += other.m[a][b];
            }
        }
        t
    }

    pub fn sub(&self, other: &Tensor2) -> Tensor2 {
        self.add(&other.scale(-1.0))
    }
}

impl fmt::Debug for Tensor2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor2[{}d](", self.d)?;
        for a in 0..self.d {
            if a > 0 {
                write!(f, "; ")?;
            }
            for b in 0..self.d {
                if b > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.m[a][b])?;
            }
        }
        write!(f, ")")
    }
}

/// Rotation vector: one component in 2D, three in 3D.
#[derive(Clone, Copy, PartialEq)]
pub struct RotVec {
    d: usize,
    v: [f64; 3],
}

impl RotVec {
    pub fn zero(d: usize) -> Self {
        assert!(d == 2 || d == 3, "unsupported dimension {d}");
        Self { d, v: [0.0; 3] }
    }

    pub fn scalar_2d(r: f64) -> Self {
        Self { d: 2, v: [r, 0.0, 0.0] }
    }

    pub fn vector_3d(r: [f64; 3]) -> Self {
        Self { d: 3, v: r }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        rot_dim(self.d)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.len());
        self.v[i]
    }

    pub fn dot(&self, other: &RotVec) -> f64 {
        assert_eq!(self.d, other.d, "dimension mismatch");
        (0..self.len()).map(|i| self.v[i] * other.v[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl fmt::Debug for RotVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RotVec[{}d](", self.d)?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.v[i])?;
        }
        write!(f, ")")
    }
}

/// Asymmetry of a tensor, as a rotation vector.
///
/// In 2D this is the scalar `sigma[1][0] - sigma[0][1]`; in 3D, component `i`
/// is `sigma[i-1][i+1] - sigma[i+1][i-1]` with indices cycling mod 3. Skew
/// tensors are recovered fully, symmetric ones map to zero.
pub fn asym(sigma: &Tensor2) -> RotVec {
    match sigma.dim() {
        2 => RotVec::scalar_2d(sigma.get(1, 0) - sigma.get(0, 1)),
        3 => RotVec::vector_3d([
            sigma.get(2, 1) - sigma.get(1, 2),
            sigma.get(0, 2) - sigma.get(2, 0),
            sigma.get(1, 0) - sigma.get(0, 1),
        ]),
        _ => unreachable!(),
    }
}

/// Adjoint of [`asym`]: embeds a rotation vector as a skew tensor such that
/// `<asym_adjoint(r), sigma>_F = <r, asym(sigma)>` for every `sigma`.
///
/// In 3D this is the cross-product matrix of `r`; in 2D it is
/// `[[0, -r], [r, 0]]`.
pub fn asym_adjoint(r: &RotVec) -> Tensor2 {
    match r.dim() {
        2 => Tensor2::from_rows_2d([[0.0, -r.get(0)], [r.get(0), 0.0]]),
        3 => Tensor2::from_rows_3d([
            [0.0, -r.get(2), r.get(1)],
            [r.get(2), 0.0, -r.get(0)],
            [-r.get(1), r.get(0), 0.0],
        ]),
        _ => unreachable!(),
    }
}

/// 2D vector form of the adjoint: the unique vector field satisfying
/// `asym(grad u) = -div(asym_adjoint_vec(u))`, namely `u -> (-u_y, u_x)`.
///
/// It is the in-plane reduction of the 3D cross-product matrix acting between
/// displacement and rotation slots, and it is what the couple-stress flux of
/// the finite volume scheme is built from.
pub fn asym_adjoint_vec_2d(u: na::Vector2<f64>) -> na::Vector2<f64> {
    na::Vector2::new(-u.y, u.x)
}

/// Traction of the 2D skew tensor `asym_adjoint(r)` on the direction `n`:
/// `asym_adjoint(r) * n = r * (-n_y, n_x)`.
pub fn rot_traction_2d(r: f64, n: na::Vector2<f64>) -> na::Vector2<f64> {
    na::Vector2::new(-r * n.y, r * n.x)
}

/// Compliance: the inverse of `tau -> 2 mu tau + lambda tr(tau) I`, in closed
/// form
///
/// ```text
/// A sigma = (1/(2 mu)) (sigma - lambda/(d lambda + 2 mu) tr(sigma) I)
/// ```
///
/// `lambda` may be `f64::INFINITY`; the trace coefficient then tends to `1/d`
/// and the operator stays bounded, so no special incompressible branch is
/// needed downstream.
pub fn compliance(sigma: &Tensor2, mu: f64, lambda: f64) -> Tensor2 {
    assert!(mu > 0.0, "shear modulus must be positive");
    assert!(lambda >= 0.0, "lambda must be nonnegative");
    let d = sigma.dim() as f64;
    let c = if lambda.is_infinite() {
        1.0 / d
    } else {
        lambda / (d * lambda + 2.0 * mu)
    };
    let tr = sigma.trace();
    let mut out = Tensor2::zero(sigma.dim());
    for a in 0..sigma.dim() {
        for b in 0..sigma.dim() {
            let diag = if a == b { c * tr } else { 0.0 };
            out.set(a, b, (sigma.get(a, b) - diag) / (2.0 * mu));
        }
    }
    out
}

/// Isotropic stiffness `tau -> 2 mu tau + lambda tr(tau) I`, the inverse of
/// [`compliance`]. Requires finite `lambda`.
pub fn stiffness(tau: &Tensor2, mu: f64, lambda: f64) -> Tensor2 {
    assert!(mu > 0.0, "shear modulus must be positive");
    assert!(lambda.is_finite(), "stiffness needs a finite lambda");
    let tr = tau.trace();
    let mut out = Tensor2::zero(tau.dim());
    for a in 0..tau.dim() {
        for b in 0..tau.dim() {
            let diag = if a == b { lambda * tr } else { 0.0 };
            out.set(a, b, 2.0 * mu * tau.get(a, b) + diag);
        }
    }
    out
}

use nalgebra as na;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut impl Rng, d: usize) -> Tensor2 {
        Tensor2::from_fn(d, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_rot(rng: &mut impl Rng, d: usize) -> RotVec {
        match d {
            2 => RotVec::scalar_2d(rng.random_range(-1.0..1.0)),
            _ => RotVec::vector_3d([
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]),
        }
    }

    #[test]
    fn asym_of_2d_skew() {
        let t = Tensor2::from_rows_2d([[0.0, -1.0], [1.0, 0.0]]);
        assert_eq!(asym(&t).get(0), 2.0);
    }

    #[test]
    fn asym_of_identity_is_zero() {
        let r = asym(&Tensor2::identity(3));
        assert_eq!(r.norm(), 0.0);
    }

    #[test]
    fn asym_of_3d_single_entry() {
        // only sigma[0][1] = 1: the third rotation component sees -1
        let mut t = Tensor2::zero(3);
        t.set(0, 1, 1.0);
        let r = asym(&t);
        assert_eq!((r.get(0), r.get(1), r.get(2)), (0.0, 0.0, -1.0));
    }

    #[test]
    fn adjoint_3d_matrix_layout() {
        let m = asym_adjoint(&RotVec::vector_3d([1.0, 0.0, 0.0]));
        let expect = Tensor2::from_rows_3d([
            [0.0, 0.0, 0.0],
            [0.0, 0.0, -1.0],
            [0.0, 1.0, 0.0],
        ]);
        assert_eq!(m.sub(&expect).frob_norm(), 0.0);
    }

    #[test]
    fn adjoint_2d_matrix_layout() {
        let m = asym_adjoint(&RotVec::scalar_2d(1.0));
        let expect = Tensor2::from_rows_2d([[0.0, -1.0], [1.0, 0.0]]);
        assert_eq!(m.sub(&expect).frob_norm(), 0.0);
    }

    #[test]
    fn adjoint_pairing_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2usize, 3] {
            for _ in 0..10_000 {
                let r = random_rot(&mut rng, d);
                let s = random_tensor(&mut rng, d);
                let lhs = asym_adjoint(&r).frob_inner(&s);
                let rhs = r.dot(&asym(&s));
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn double_application_is_twice_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in [2usize, 3] {
            for _ in 0..1000 {
                let r = random_rot(&mut rng, d);
                let rr = asym(&asym_adjoint(&r));
                for i in 0..rr.len() {
                    assert_abs_diff_eq!(rr.get(i), 2.0 * r.get(i), epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn compliance_of_identity_3d() {
        // mu = lambda = 1, d = 3: stiffness maps I/5 to I, so compliance of I is I/5
        let a = compliance(&Tensor2::identity(3), 1.0, 1.0);
        let back = stiffness(&a, 1.0, 1.0);
        assert_abs_diff_eq!(back.sub(&Tensor2::identity(3)).frob_norm(), 0.0, epsilon = 1e-15);
        for i in 0..3 {
            assert_abs_diff_eq!(a.get(i, i), 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn compliance_lambda_zero_is_half_inv_mu() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_tensor(&mut rng, 2);
        let a = compliance(&s, 2.0, 0.0);
        assert_abs_diff_eq!(a.sub(&s.scale(0.25)).frob_norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn compliance_round_trip_large_lambda() {
        // The round trip A(C tau) = tau is algebraically exact for every
        // lambda. In floating point the intermediate C tau has entries of
        // magnitude ~lambda, so storing it already loses tau's unit-size
        // detail below ulp(lambda) ~ 2e-8 at lambda = 1e8 — no algorithm
        // seeing the rounded intermediate can do better. The defect is
        // therefore measured against the intermediate's size (the standard
        // backward-error normalization); for moderate lambda the plain
        // absolute tolerance is also enforced.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for d in [2usize, 3] {
            for &lambda in &[0.0, 1.0, 1e4, 1e8] {
                for _ in 0..1000 {
                    let tau = random_tensor(&mut rng, d);
                    let mu = rng.random_range(0.1..10.0);
                    let mid = stiffness(&tau, mu, lambda);
                    let back = compliance(&mid, mu, lambda);
                    let defect = back.sub(&tau).frob_norm();
                    assert!(
                        defect <= 1e-12 * mid.frob_norm().max(1.0),
                        "defect {defect:.3e} at lambda = {lambda:.0e}, d = {d}"
                    );
                    if lambda <= 1e2 {
                        assert!(defect <= 1e-12 * (1.0 + tau.frob_norm()));
                    }
                }
            }
        }
    }

    #[test]
    fn compliance_bounded_at_infinite_lambda() {
        let s = Tensor2::from_rows_2d([[3.0, 1.0], [-1.0, 5.0]]);
        let a = compliance(&s, 1.0, f64::INFINITY);
        // trace coefficient is exactly 1/2 in 2D, so A removes the trace part
        assert_abs_diff_eq!(a.trace(), 0.0, epsilon = 1e-14);
        assert!(a.frob_norm().is_finite());
    }
}
