//! Manufactured solutions for the convergence studies.
//!
//! Each case prescribes closed-form displacement and rotation fields together
//! with material coefficients, then derives every dependent quantity —
//! pressure, stress, boundary data, and the source terms the two
//! discretizations need — by exact differentiation ([`crate::jet`]). Nothing
//! is hand-differentiated, so a change to a prescribed field cannot go stale
//! anywhere else.
//!
//! The three cases:
//!
//! - **smooth**: a stream-function velocity field (exactly divergence free)
//!   with its own induced rotation, on a homogeneous material with
//!   parameterized `lambda`. Because the rotation is the induced one and
//!   `div u = 0` holds symbolically, the rotation-row sources vanish
//!   identically and the pressure is exactly zero for every `lambda`,
//!   including the near-incompressible regime — no `lambda`-scaled roundoff
//!   ever enters the right hand side.
//! - **heterogeneous**: displacement `N(x)/D(x)` where `D` jumps by a factor
//!   `kappa` on the upper-right quadrant and `N` vanishes on the interface.
//!   With `mu = lambda = D`, the stress `2 eps(N) + (div N) I` is the same
//!   expression in both regions, so the exact tractions are continuous across
//!   the interface while the displacement gradient jumps.
//! - **cosserat**: polynomial displacement and rotation with a micropolar
//!   length scale `ell` that ramps from 0 to 1 across the domain via
//!   `clamp(max(3x-1, 3y-1), 0, 1)` — identically zero in one corner region,
//!   saturated at one in the far region, with kink lines along
//!   x, y ∈ {1/3, 2/3} and the diagonal x = y inside the ramp band. Source
//!   evaluation is exact away from the kinks and falls back to the provably
//!   correct limit on the measure-zero set where a kinked factor is
//!   multiplied by an exact zero.
//!
//! All evaluation methods take the region tag of the cell containing the
//! point. Only the heterogeneous case reads it (tag 1 is the rescaled
//! quadrant); passing [`ManufacturedCase::region_tag`] is fine for points
//! known to lie strictly inside a region, but points exactly on the interface
//! must be resolved by the caller's mesh data, not by coordinate comparison.
//!
//! All cases satisfy `u = 0` on the whole boundary; the rotation trace is
//! generally nonzero there and is supplied to the finite volume scheme as
//! inhomogeneous Dirichlet data (it only enters the discrete equations where
//! the length scale is nonzero).

use std::f64::consts::PI;

use nalgebra as na;

use crate::jet::{jet_eval, Jet2};
use crate::mesh::{MeshFamily, Point2, Vector2};

/// Which manufactured problem to run, with its case parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CaseKind {
    /// Divergence-free smooth field; `lambda` is the (uniform) Lamé
    /// parameter, possibly very large.
    Smooth { lambda: f64 },
    /// Two-region material with stiffness ratio `kappa` on the upper-right
    /// quadrant.
    Heterogeneous { kappa: f64 },
    /// Micropolar problem with a ramped length scale. When
    /// `rotation_is_stress` is set, the prescribed polynomial is interpreted
    /// as the stress-scaled rotation `r = 2 mu r_s` instead of `r_s` itself.
    Cosserat { rotation_is_stress: bool },
}

#[derive(Clone, Copy, Debug)]
pub struct ManufacturedCase {
    pub kind: CaseKind,
}

/// Value, gradient, and (where needed) Laplacian of the prescribed fields at
/// one point, with the local material coefficients.
struct FieldJets {
    u1: Jet2,
    u2: Jet2,
    rs_v: f64,
    rs_dx: f64,
    rs_dy: f64,
    rs_lap: f64,
    mu: f64,
    /// `Some(lambda)` to derive the pressure `p = lambda div u` from the
    /// jets; `None` when the field is divergence free symbolically.
    lambda_p: Option<f64>,
}

fn seed(x: f64, y: f64) -> (Jet2, Jet2) {
    (Jet2::var_x(x), Jet2::var_y(y))
}

fn smooth_fields(x: f64, y: f64) -> (Jet2, Jet2, Jet2) {
    let (jx, jy) = seed(x, y);
    let tau = 2.0 * PI;
    let sx = (tau * jx).sin();
    let sy = (tau * jy).sin();
    let s2x = (2.0 * tau * jx).sin();
    let s2y = (2.0 * tau * jy).sin();
    let c2x = (2.0 * tau * jx).cos();
    let c2y = (2.0 * tau * jy).cos();
    let u1 = tau * sx * sx * s2y;
    let u2 = -tau * s2x * sy * sy;
    let rs = (tau * tau) * (c2x * sy * sy + sx * sx * c2y);
    (u1, u2, rs)
}

fn bubble(t: Jet2) -> Jet2 {
    t * (1.0 - t) * (0.5 - t)
}

fn het_numerators(x: f64, y: f64) -> (Jet2, Jet2) {
    let (jx, jy) = seed(x, y);
    let tau = 2.0 * PI;
    ((tau * jx).sin() * bubble(jy), (tau * jy).sin() * bubble(jx))
}

fn cosserat_displacement(x: f64, y: f64) -> (Jet2, Jet2) {
    let (jx, jy) = seed(x, y);
    let tau = 2.0 * PI;
    ((tau * jx).sin() * jy * (1.0 - jy), (tau * jy).sin() * jx * (1.0 - jx))
}

fn cosserat_rotation(x: f64, y: f64, rotation_is_stress: bool) -> Jet2 {
    let (jx, jy) = seed(x, y);
    let poly = jx * jy * (1.0 - jx) * (1.0 - jy);
    // mu = 1 here, so interpreting the polynomial as r = 2 mu r_s just
    // halves the rotation
    if rotation_is_stress {
        poly * 0.5
    } else {
        poly
    }
}

fn ell_ramp(jx: Jet2, jy: Jet2) -> Jet2 {
    let ramp = (3.0 * jx - 1.0).max(3.0 * jy - 1.0);
    Jet2::constant(1.0).min(Jet2::constant(0.0).max(ramp))
}

fn ell_ramp_value(x: f64, y: f64) -> f64 {
    (3.0 * x - 1.0).max(3.0 * y - 1.0).clamp(0.0, 1.0)
}

impl ManufacturedCase {
    pub fn new(kind: CaseKind) -> Self {
        ManufacturedCase { kind }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            CaseKind::Smooth { .. } => "smooth",
            CaseKind::Heterogeneous { .. } => "heterogeneous",
            CaseKind::Cosserat { .. } => "cosserat",
        }
    }

    /// Mesh family the case is designed for (region-aligned where needed).
    pub fn default_family(&self) -> MeshFamily {
        match self.kind {
            CaseKind::Smooth { .. } => MeshFamily::Uniform,
            CaseKind::Heterogeneous { .. } => MeshFamily::InterfaceHalf,
            CaseKind::Cosserat { .. } => MeshFamily::InterfaceThirds,
        }
    }

    /// Region tag of a point strictly inside one of the material regions.
    /// Matches the tags the mesh generators assign. Do not call it for
    /// points lying exactly on the interface — pass the containing cell's
    /// tag there instead.
    pub fn region_tag(&self, x: Point2) -> i32 {
        match self.kind {
            CaseKind::Heterogeneous { .. } => (x.x > 0.5 && x.y > 0.5) as i32,
            _ => 0,
        }
    }

    /// Region stiffness scale of the heterogeneous case (1 elsewhere).
    fn region_scale(&self, tag: i32) -> f64 {
        match self.kind {
            CaseKind::Heterogeneous { kappa } if tag != 0 => kappa,
            _ => 1.0,
        }
    }

    pub fn mu(&self, _x: Point2, tag: i32) -> f64 {
        match self.kind {
            CaseKind::Smooth { .. } | CaseKind::Cosserat { .. } => 1.0,
            CaseKind::Heterogeneous { .. } => self.region_scale(tag),
        }
    }

    pub fn lambda(&self, _x: Point2, tag: i32) -> f64 {
        match self.kind {
            CaseKind::Smooth { lambda } => lambda,
            CaseKind::Heterogeneous { .. } => self.region_scale(tag),
            CaseKind::Cosserat { .. } => 1.0,
        }
    }

    pub fn ell(&self, x: Point2, _tag: i32) -> f64 {
        match self.kind {
            CaseKind::Cosserat { .. } => ell_ramp_value(x.x, x.y),
            _ => 0.0,
        }
    }

    /// Gradient of the length scale. Panics if the point sits exactly on a
    /// kink line of the ramp — callers sample quadrature points and cell
    /// centroids, which the region-aligned meshes keep off those lines.
    pub fn grad_ell(&self, x: Point2, _tag: i32) -> Vector2 {
        match self.kind {
            CaseKind::Cosserat { .. } => {
                let j = jet_eval(|jx, jy| ell_ramp(jx, jy), x.x, x.y).unwrap_or_else(|_| {
                    panic!("length-scale gradient requested on a kink line at {x:?}")
                });
                j.grad()
            }
            _ => Vector2::zeros(),
        }
    }

    fn fields(&self, x: Point2, tag: i32) -> FieldJets {
        match self.kind {
            CaseKind::Smooth { .. } => {
                let (u1, u2, rs) = smooth_fields(x.x, x.y);
                FieldJets {
                    u1,
                    u2,
                    rs_v: rs.v,
                    rs_dx: rs.dx,
                    rs_dy: rs.dy,
                    rs_lap: rs.laplacian(),
                    mu: 1.0,
                    lambda_p: None,
                }
            }
            CaseKind::Heterogeneous { .. } => {
                let scale = self.region_scale(tag);
                let (n1, n2) = het_numerators(x.x, x.y);
                let (u1, u2) = (n1 / scale, n2 / scale);
                // the rotation is the one induced by u, so its jet is read
                // off the displacement jets (one derivative down)
                FieldJets {
                    rs_v: 0.5 * (u1.dy - u2.dx),
                    rs_dx: 0.5 * (u1.dxy - u2.dxx),
                    rs_dy: 0.5 * (u1.dyy - u2.dxy),
                    rs_lap: f64::NAN, // never needed: the length scale is zero
                    u1,
                    u2,
                    mu: scale,
                    lambda_p: Some(scale),
                }
            }
            CaseKind::Cosserat { rotation_is_stress } => {
                let (u1, u2) = cosserat_displacement(x.x, x.y);
                let rs = cosserat_rotation(x.x, x.y, rotation_is_stress);
                FieldJets {
                    u1,
                    u2,
                    rs_v: rs.v,
                    rs_dx: rs.dx,
                    rs_dy: rs.dy,
                    rs_lap: rs.laplacian(),
                    mu: 1.0,
                    lambda_p: Some(1.0),
                }
            }
        }
    }

    pub fn u(&self, x: Point2, tag: i32) -> Vector2 {
        let f = self.fields(x, tag);
        Vector2::new(f.u1.v, f.u2.v)
    }

    /// Micropolar rotation.
    pub fn r_s(&self, x: Point2, tag: i32) -> f64 {
        self.fields(x, tag).rs_v
    }

    /// Stress-scaled rotation `r = 2 mu r_s`, the cell unknown of the finite
    /// volume scheme.
    pub fn r(&self, x: Point2, tag: i32) -> f64 {
        let f = self.fields(x, tag);
        2.0 * f.mu * f.rs_v
    }

    /// Pressure `p = lambda div u` (exactly zero for the divergence-free
    /// case, at every `lambda`).
    pub fn p(&self, x: Point2, tag: i32) -> f64 {
        let f = self.fields(x, tag);
        match f.lambda_p {
            Some(lambda) => lambda * (f.u1.dx + f.u2.dy),
            None => 0.0,
        }
    }

    /// Exact stress `2 mu grad u + S* r + p I`.
    pub fn sigma(&self, x: Point2, tag: i32) -> na::Matrix2<f64> {
        let f = self.fields(x, tag);
        let p = match f.lambda_p {
            Some(lambda) => lambda * (f.u1.dx + f.u2.dy),
            None => 0.0,
        };
        let r = 2.0 * f.mu * f.rs_v;
        let two_mu = 2.0 * f.mu;
        na::Matrix2::new(
            two_mu * f.u1.dx + p,
            two_mu * f.u1.dy - r,
            two_mu * f.u2.dx + r,
            two_mu * f.u2.dy + p,
        )
    }

    /// Rotation flux `tau = S* u + ell^2 grad r` of the finite volume
    /// constitutive row.
    pub fn tau(&self, x: Point2, tag: i32) -> Vector2 {
        let f = self.fields(x, tag);
        let ell = self.ell(x, tag);
        let grad_r = 2.0 * f.mu * Vector2::new(f.rs_dx, f.rs_dy);
        Vector2::new(-f.u2.v, f.u1.v) + ell * ell * grad_r
    }

    /// Couple stress `omega_ell = 2 mu ell grad r_s` (zero wherever the
    /// length scale vanishes).
    pub fn omega(&self, x: Point2, tag: i32) -> Vector2 {
        let f = self.fields(x, tag);
        2.0 * f.mu * self.ell(x, tag) * Vector2::new(f.rs_dx, f.rs_dy)
    }

    /// Momentum source `f = -div sigma`.
    pub fn f(&self, x: Point2, tag: i32) -> Vector2 {
        let f = self.fields(x, tag);
        let two_mu = 2.0 * f.mu;
        let (p_x, p_y) = match f.lambda_p {
            Some(lambda) => (
                lambda * (f.u1.dxx + f.u2.dxy),
                lambda * (f.u1.dxy + f.u2.dyy),
            ),
            None => (0.0, 0.0),
        };
        Vector2::new(
            -(two_mu * (f.u1.dxx + f.u1.dyy) - two_mu * f.rs_dy + p_x),
            -(two_mu * (f.u2.dxx + f.u2.dyy) + two_mu * f.rs_dx + p_y),
        )
    }

    /// `2 ell (grad ell . grad t) + ell^2 lap t` for a target field with the
    /// given gradient and Laplacian — the pointwise divergence of
    /// `ell^2 grad t`. Exact on kink lines only when the kinked factor
    /// multiplies an exact zero (then the one-sided limits agree).
    fn ell_diffusion(&self, x: Point2, grad_t: Vector2, lap_t: f64) -> f64 {
        match self.kind {
            CaseKind::Cosserat { .. } => match jet_eval(|jx, jy| ell_ramp(jx, jy), x.x, x.y) {
                Ok(j) => 2.0 * j.v * j.grad().dot(&grad_t) + j.v * j.v * lap_t,
                Err(_) => {
                    let value = ell_ramp_value(x.x, x.y);
                    assert!(
                        value == 0.0 || grad_t == Vector2::zeros(),
                        "source evaluated on a length-scale kink at {x:?} where it is not defined"
                    );
                    value * value * lap_t
                }
            },
            _ => 0.0,
        }
    }

    /// Rotation-row source of the finite volume scheme, entering as
    /// `-|K| g` on the right hand side of
    /// `sum D tau_k - |K| r / mu = -|K| g`. Identically zero whenever the
    /// prescribed rotation is the induced one and `ell = 0`.
    pub fn g_tpsa(&self, x: Point2, tag: i32) -> f64 {
        let f = self.fields(x, tag);
        let s_gradu = f.u2.dx - f.u1.dy;
        let two_mu = 2.0 * f.mu;
        let base = 2.0 * f.rs_v + s_gradu;
        match self.kind {
            CaseKind::Cosserat { .. } => {
                let grad_r = two_mu * Vector2::new(f.rs_dx, f.rs_dy);
                base - self.ell_diffusion(x, grad_r, two_mu * f.rs_lap)
            }
            _ => base,
        }
    }

    /// Rotation-row source of the mixed finite element scheme:
    /// `g = -div(ell omega_ell) + S sigma`.
    pub fn g_mfem(&self, x: Point2, tag: i32) -> f64 {
        let f = self.fields(x, tag);
        let s_gradu = f.u2.dx - f.u1.dy;
        let two_mu = 2.0 * f.mu;
        let diffusion = match self.kind {
            CaseKind::Cosserat { .. } => {
                self.ell_diffusion(x, Vector2::new(f.rs_dx, f.rs_dy), f.rs_lap)
            }
            _ => 0.0,
        };
        -two_mu * diffusion + two_mu * (s_gradu + 2.0 * f.rs_v)
    }
}
