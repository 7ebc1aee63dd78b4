//! Four-field mixed finite elements on triangles: the two stress rows live in
//! BDM1, the scaled couple stress in RT0, and the displacement components and
//! the rotation are piecewise constants.  The two conservation rows are
//! negated during assembly, so the final saddle-point system is symmetric and
//! both the direct factorization and MINRES apply.  When the length scale
//! vanishes the couple-stress block decouples into a plain mass system,
//! forcing that field to zero strongly and leaving the three-field elasticity
//! method.
//!
//! Edge degrees of freedom follow one global orientation (lower vertex index
//! to higher), so normal traces are single-valued across neighbouring cells
//! and the assembled stress and couple-stress fields are H(div)-conforming by
//! construction.  The piecewise-constant spaces need no tabulated basis; the
//! vector-valued ones are built per cell by inverting the small matrix of
//! degree-of-freedom functionals against a monomial span, which keeps every
//! basis function exactly dual to its edge moments without any reference-map
//! bookkeeping.

use nalgebra as na;

use crate::material::MaterialField;
use crate::mesh::{Mesh, MeshGeometry, Point2, Vector2};
use crate::solver::{
    solve_linear_system, CsrMatrix, SolveMethod, SolveReport, SolverError, TripletMatrix,
};

/// Global numbering for the four coefficient blocks, in order: stress (4 per
/// edge: 2 rows x 2 edge moments), couple stress (1 per edge), displacement
/// (2 per cell), rotation (1 per cell).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FemSpaceLayout {
    pub n_edges: usize,
    pub n_cells: usize,
}

impl FemSpaceLayout {
    pub fn new(geo: &MeshGeometry) -> Self {
        FemSpaceLayout { n_edges: geo.faces.len(), n_cells: geo.cell_volume.len() }
    }

    /// Stress coefficient for one edge; `row` picks the stress row and
    /// `moment` the constant or linear normal-trace moment on the edge.
    pub fn stress_dof(&self, edge: usize, row: usize, moment: usize) -> usize {
        4 * edge + 2 * row + moment
    }

    pub fn couple_dof(&self, edge: usize) -> usize {
        4 * self.n_edges + edge
    }

    pub fn displacement_dof(&self, cell: usize, comp: usize) -> usize {
        5 * self.n_edges + 2 * cell + comp
    }

    pub fn rotation_dof(&self, cell: usize) -> usize {
        5 * self.n_edges + 2 * self.n_cells + cell
    }

    /// Five coefficients per edge plus three per cell.
    pub fn n_dofs(&self) -> usize {
        5 * self.n_edges + 3 * self.n_cells
    }
}

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Symmetric six-point triangle rule, exact through total degree four.
/// Barycentric coordinates; the weights sum to one.
const TRIANGLE_RULE: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_964_89;
    const B1: f64 = 0.108_103_018_168_070_23;
    const W1: f64 = 0.223_381_589_678_011_46;
    const A2: f64 = 0.091_576_213_509_770_74;
    const B2: f64 = 0.816_847_572_980_458_51;
    const W2: f64 = 0.109_951_743_655_321_87;
    [
        ([B1, A1, A1], W1),
        ([A1, B1, A1], W1),
        ([A1, A1, B1], W1),
        ([B2, A2, A2], W2),
        ([A2, B2, A2], W2),
        ([A2, A2, B2], W2),
    ]
};

/// Two-point Gauss rule on the unit interval (exact through cubics), as
/// (node, weight) pairs.
const EDGE_RULE: [(f64, f64); 2] =
    [(0.211_324_865_405_187_12, 0.5), (0.788_675_134_594_812_88, 0.5)];

/// Orthonormal Legendre moments on the unit interval: the constant and the
/// linear one.
fn legendre_moment(moment: usize, q: f64) -> f64 {
    match moment {
        0 => 1.0,
        _ => SQRT_3 * (2.0 * q - 1.0),
    }
}

pub(crate) fn triangle_quadrature(verts: &[Point2; 3], volume: f64) -> [(Point2, f64); 6] {
    TRIANGLE_RULE.map(|(b, w)| {
        let x = Point2::new(
            b[0] * verts[0].x + b[1] * verts[1].x + b[2] * verts[2].x,
            b[0] * verts[0].y + b[1] * verts[1].y + b[2] * verts[2].y,
        );
        (x, w * volume)
    })
}

/// Geometry of one oriented edge: the tangent runs from the lower-indexed
/// vertex to the higher-indexed one, and the normal is the tangent rotated
/// clockwise.  Both incident cells build their bases against this one frame,
/// which is what makes shared edge coefficients meaningful.
#[derive(Clone, Copy, Debug)]
struct EdgeFrame {
    lo: Point2,
    hi: Point2,
    length: f64,
    normal: Vector2,
}

impl EdgeFrame {
    fn new(lo: Point2, hi: Point2) -> Self {
        let d = hi - lo;
        let length = d.norm();
        let t = d / length;
        EdgeFrame { lo, hi, length, normal: Vector2::new(t.y, -t.x) }
    }

    /// Point at arclength fraction `q` from the lower vertex.
    fn point(&self, q: f64) -> Point2 {
        self.lo + (self.hi - self.lo) * q
    }
}

/// Vector-valued polynomial of degree one in scaled local coordinates
/// `(x - origin) / scale`; the columns of `coef` multiply 1, the local x,
/// and the local y.  The scaling keeps the degree-of-freedom matrices well
/// conditioned on small cells.
#[derive(Clone, Copy, Debug)]
struct VectorPoly {
    origin: Point2,
    scale: f64,
    coef: na::Matrix2x3<f64>,
}

impl VectorPoly {
    fn eval(&self, x: Point2) -> Vector2 {
        let l = (x - self.origin) / self.scale;
        Vector2::new(
            self.coef[(0, 0)] + self.coef[(0, 1)] * l.x + self.coef[(0, 2)] * l.y,
            self.coef[(1, 0)] + self.coef[(1, 1)] * l.x + self.coef[(1, 2)] * l.y,
        )
    }

    fn divergence(&self) -> f64 {
        (self.coef[(0, 1)] + self.coef[(1, 2)]) / self.scale
    }
}

/// The six vector monomials spanning linear vector fields in a cell's local
/// frame.
fn monomial_span(origin: Point2, scale: f64) -> [VectorPoly; 6] {
    std::array::from_fn(|j| {
        let mut coef = na::Matrix2x3::zeros();
        coef[(j / 3, j % 3)] = 1.0;
        VectorPoly { origin, scale, coef }
    })
}

/// Full linear normal-trace basis on one cell: basis `2*le + m` has unit
/// `m`-th Legendre moment on local edge `le` and zero moments on the other
/// edges, obtained by inverting the 6x6 matrix of moment functionals over the
/// monomial span.  Because an edge carries exactly the two moments that pin a
/// linear trace, zero moments mean a zero trace, and the basis is dual to the
/// shared edge coefficients.
fn bdm_basis(frames: &[EdgeFrame; 3], origin: Point2, scale: f64) -> [VectorPoly; 6] {
    let span = monomial_span(origin, scale);
    let mut dof = na::Matrix6::<f64>::zeros();
    for (le, frame) in frames.iter().enumerate() {
        for m in 0..2 {
            for (j, mono) in span.iter().enumerate() {
                let mut s = 0.0;
                for &(q, w) in &EDGE_RULE {
                    s += w * mono.eval(frame.point(q)).dot(&frame.normal) * legendre_moment(m, q);
                }
                dof[(2 * le + m, j)] = s;
            }
        }
    }
    let inv = dof
        .try_inverse()
        .expect("edge-moment functionals are independent on a nondegenerate triangle");
    std::array::from_fn(|i| {
        let mut coef = na::Matrix2x3::zeros();
        for j in 0..6 {
            coef[(j / 3, j % 3)] = inv[(j, i)];
        }
        VectorPoly { origin, scale, coef }
    })
}

/// Constant normal-trace basis on one cell: basis `le` has unit total flux
/// through local edge `le` and zero flux through the others; its divergence
/// is constant.  Span: the two constants plus the radial monomial.
fn rt_basis(frames: &[EdgeFrame; 3], origin: Point2, scale: f64) -> [VectorPoly; 3] {
    let span: [VectorPoly; 3] = std::array::from_fn(|j| {
        let mut coef = na::Matrix2x3::zeros();
        match j {
            0 => coef[(0, 0)] = 1.0,
            1 => coef[(1, 0)] = 1.0,
            _ => {
                coef[(0, 1)] = 1.0;
                coef[(1, 2)] = 1.0;
            }
        }
        VectorPoly { origin, scale, coef }
    });
    let mut dof = na::Matrix3::<f64>::zeros();
    for (le, frame) in frames.iter().enumerate() {
        for (j, mono) in span.iter().enumerate() {
            let mut s = 0.0;
            for &(q, w) in &EDGE_RULE {
                s += w * mono.eval(frame.point(q)).dot(&frame.normal);
            }
            dof[(le, j)] = frame.length * s;
        }
    }
    let inv = dof
        .try_inverse()
        .expect("flux functionals are independent on a nondegenerate triangle");
    std::array::from_fn(|i| {
        let mut coef = na::Matrix2x3::zeros();
        for (j, mono) in span.iter().enumerate() {
            coef += mono.coef * inv[(j, i)];
        }
        VectorPoly { origin, scale, coef }
    })
}

fn reference_frames() -> ([Point2; 3], [EdgeFrame; 3]) {
    let v = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    let frames =
        [EdgeFrame::new(v[0], v[1]), EdgeFrame::new(v[1], v[2]), EdgeFrame::new(v[0], v[2])];
    (v, frames)
}

/// Values and divergences of the six linear normal-trace basis functions on
/// the reference triangle with vertices (0,0), (1,0), (0,1).  Edges are
/// ordered (01), (12), (02) and oriented lower vertex to higher; basis
/// `2*le + m` is dual to the `m`-th Legendre moment on edge `le`.  (The
/// piecewise-constant spaces need no tabulation: their basis is the
/// constant 1.)
pub fn reference_bdm1(x: Point2) -> ([Vector2; 6], [f64; 6]) {
    let (v, frames) = reference_frames();
    let origin = Point2::new((v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0);
    let basis = bdm_basis(&frames, origin, 1.0);
    (
        std::array::from_fn(|i| basis[i].eval(x)),
        std::array::from_fn(|i| basis[i].divergence()),
    )
}

/// Values and divergences of the three constant normal-trace basis functions
/// on the reference triangle; basis `le` carries unit total flux through edge
/// `le`.  Divergences are constant with magnitude 1/|K|.
pub fn reference_rt0(x: Point2) -> ([Vector2; 3], [f64; 3]) {
    let (v, frames) = reference_frames();
    let origin = Point2::new((v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0);
    let basis = rt_basis(&frames, origin, 1.0);
    (
        std::array::from_fn(|i| basis[i].eval(x)),
        std::array::from_fn(|i| basis[i].divergence()),
    )
}

/// Everything the element loops need for one cell.
struct CellBasis {
    verts: [Point2; 3],
    volume: f64,
    /// Global face ids, in the same order as the local bases.
    faces: [usize; 3],
    bdm: [VectorPoly; 6],
    rt: [VectorPoly; 3],
}

impl CellBasis {
    fn quadrature(&self) -> [(Point2, f64); 6] {
        triangle_quadrature(&self.verts, self.volume)
    }
}

struct BoundaryEdge {
    face: usize,
    frame: EdgeFrame,
    /// +1 where the oriented edge normal already points out of the domain.
    out_sign: f64,
}

/// The discrete space on one mesh: global layout plus per-cell bases.
pub struct MfemSpace {
    pub layout: FemSpaceLayout,
    cells: Vec<CellBasis>,
    boundary: Vec<BoundaryEdge>,
}

impl MfemSpace {
    pub fn build(mesh: &Mesh, geo: &MeshGeometry) -> Self {
        let layout = FemSpaceLayout::new(geo);
        let cells = (0..mesh.cells.len())
            .map(|c| {
                let verts = mesh.cells[c].map(|v| mesh.vertices[v]);
                let faces = geo.cell_faces[c];
                let frames = faces.map(|f| {
                    let fv = geo.faces[f].verts;
                    EdgeFrame::new(mesh.vertices[fv[0]], mesh.vertices[fv[1]])
                });
                let scale = frames.iter().map(|f| f.length).fold(0.0, f64::max);
                let origin = geo.cell_centroid[c];
                CellBasis {
                    verts,
                    volume: geo.cell_volume[c],
                    faces,
                    bdm: bdm_basis(&frames, origin, scale),
                    rt: rt_basis(&frames, origin, scale),
                }
            })
            .collect();
        let boundary = geo
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_boundary())
            .map(|(k, f)| {
                let frame = EdgeFrame::new(mesh.vertices[f.verts[0]], mesh.vertices[f.verts[1]]);
                let out_sign = frame.normal.dot(&f.normal).signum();
                BoundaryEdge { face: k, frame, out_sign }
            })
            .collect();
        MfemSpace { layout, cells, boundary }
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// The degree-four volume rule on one cell, as (point, weight) pairs;
    /// the weights sum to the cell volume.
    pub fn quadrature(&self, cell: usize) -> [(Point2, f64); 6] {
        self.cells[cell].quadrature()
    }

    /// Assemble the symmetric saddle-point system.  Blocks, with the two
    /// conservation rows already negated:
    ///
    /// - stress row: compliance against stress, plus couplings to the cell
    ///   displacement through the stress divergence and to the cell rotation
    ///   through the asymmetry functional;
    /// - couple-stress row: a mass term scaled by 1/(2 mu), plus the coupling
    ///   to the rotation through `grad ell . omega + ell div omega`;
    /// - the transposes of those couplings, with right-hand side `-(f, u)`
    ///   and `-(g, r)`.
    ///
    /// Boundary displacement and rotation data are natural in this form and
    /// enter only the right-hand side; `assemble` takes them as zero, and
    /// [`Self::boundary_load`] produces the correction for nonzero data.
    pub fn assemble(
        &self,
        material: &MaterialField,
        ell: impl Fn(Point2) -> f64,
        grad_ell: impl Fn(Point2) -> Vector2,
        body_force: impl Fn(Point2) -> Vector2,
        body_couple: impl Fn(Point2) -> f64,
    ) -> MfemSystem {
        let n = self.layout.n_dofs();
        let mut matrix = TripletMatrix::new(n, n);
        let mut rhs = vec![0.0; n];
        for (c, cb) in self.cells.iter().enumerate() {
            let mu = material.mu[c];
            let inv_two_mu = 0.5 / mu;
            // Multiplier of the trace part in the compliance operator; tends
            // to 1/2 in the incompressible limit instead of blowing up, which
            // is where the method's pressure robustness comes from.
            let trace_weight = 1.0 / (2.0 + 2.0 * mu * material.inv_lambda(c));
            let quad = cb.quadrature();

            let sigma_dofs: [usize; 12] = std::array::from_fn(|k| {
                self.layout.stress_dof(cb.faces[(k % 6) / 2], k / 6, k % 2)
            });
            let couple_dofs: [usize; 3] =
                std::array::from_fn(|le| self.layout.couple_dof(cb.faces[le]));

            let bdm_at: [[Vector2; 6]; 6] =
                std::array::from_fn(|qi| std::array::from_fn(|i| cb.bdm[i].eval(quad[qi].0)));
            let rt_at: [[Vector2; 3]; 6] =
                std::array::from_fn(|qi| std::array::from_fn(|i| cb.rt[i].eval(quad[qi].0)));
            let bdm_div: [f64; 6] = std::array::from_fn(|i| cb.bdm[i].divergence());
            let rt_div: [f64; 3] = std::array::from_fn(|i| cb.rt[i].divergence());

            // Compliance block: (1/2mu) [ delta_ab phi_i . phi_j
            //                             - trace_weight phi_i[a] phi_j[b] ].
            for a in 0..2 {
                for b in 0..2 {
                    for i in 0..6 {
                        for j in 0..6 {
                            let mut s = 0.0;
                            for (qi, &(_, w)) in quad.iter().enumerate() {
                                let pi = bdm_at[qi][i];
                                let pj = bdm_at[qi][j];
                                let dot = if a == b { pi.dot(&pj) } else { 0.0 };
                                s += w * (dot - trace_weight * pi[a] * pj[b]);
                            }
                            matrix.push(sigma_dofs[6 * a + i], sigma_dofs[6 * b + j], inv_two_mu * s);
                        }
                    }
                }
            }

            // Couple-stress mass block.
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = 0.0;
                    for (qi, &(_, w)) in quad.iter().enumerate() {
                        s += w * rt_at[qi][i].dot(&rt_at[qi][j]);
                    }
                    matrix.push(couple_dofs[i], couple_dofs[j], inv_two_mu * s);
                }
            }

            // Stress-displacement coupling: the displacement component `a`
            // tests the divergence of stress row `a`.
            for a in 0..2 {
                for i in 0..6 {
                    let v = cb.volume * bdm_div[i];
                    let row = sigma_dofs[6 * a + i];
                    let col = self.layout.displacement_dof(c, a);
                    matrix.push(row, col, v);
                    matrix.push(col, row, v);
                }
            }

            // Stress-rotation coupling: minus the integral of the asymmetry
            // of the stress basis tensor (row 0 contributes -phi_y, row 1
            // contributes +phi_x).
            for a in 0..2 {
                for i in 0..6 {
                    let mut s = 0.0;
                    for (qi, &(_, w)) in quad.iter().enumerate() {
                        let phi = bdm_at[qi][i];
                        s += w * if a == 0 { -phi.y } else { phi.x };
                    }
                    let row = sigma_dofs[6 * a + i];
                    let col = self.layout.rotation_dof(c);
                    matrix.push(row, col, -s);
                    matrix.push(col, row, -s);
                }
            }

            // Couple-stress-rotation coupling, with the divergence of
            // `ell omega` expanded at the quadrature points so spatially
            // varying length scales are integrated consistently.
            for i in 0..3 {
                let mut s = 0.0;
                for (qi, &(x, w)) in quad.iter().enumerate() {
                    s += w * (grad_ell(x).dot(&rt_at[qi][i]) + ell(x) * rt_div[i]);
                }
                let row = couple_dofs[i];
                let col = self.layout.rotation_dof(c);
                matrix.push(row, col, s);
                matrix.push(col, row, s);
            }

            // Negated conservation right-hand sides.
            for &(x, w) in &quad {
                let f = body_force(x);
                rhs[self.layout.displacement_dof(c, 0)] -= w * f.x;
                rhs[self.layout.displacement_dof(c, 1)] -= w * f.y;
                rhs[self.layout.rotation_dof(c)] -= w * body_couple(x);
            }
        }
        MfemSystem { matrix: matrix.to_csr(), rhs, layout: self.layout }
    }

    /// Right-hand-side contribution of nonzero boundary displacement and
    /// rotation data.  Both are natural conditions here: they test the normal
    /// traces of the stress and couple-stress bases on the boundary, so no
    /// essential constraints are ever imposed on those fields.  Add the
    /// result to an assembled right-hand side.
    pub fn boundary_load(
        &self,
        ell: impl Fn(Point2) -> f64,
        boundary_u: impl Fn(Point2) -> Vector2,
        boundary_r: impl Fn(Point2) -> f64,
    ) -> Vec<f64> {
        let mut load = vec![0.0; self.layout.n_dofs()];
        for be in &self.boundary {
            for &(q, w) in &EDGE_RULE {
                let x = be.frame.point(q);
                let ub = boundary_u(x);
                for a in 0..2 {
                    for m in 0..2 {
                        load[self.layout.stress_dof(be.face, a, m)] +=
                            be.out_sign * be.frame.length * w * ub[a] * legendre_moment(m, q);
                    }
                }
                // The couple-stress basis has normal trace 1/length, so the
                // length factors cancel in its boundary term.
                load[self.layout.couple_dof(be.face)] +=
                    be.out_sign * w * ell(x) * boundary_r(x);
            }
        }
        load
    }

    pub fn displacement(&self, coeffs: &[f64], cell: usize) -> Vector2 {
        Vector2::new(
            coeffs[self.layout.displacement_dof(cell, 0)],
            coeffs[self.layout.displacement_dof(cell, 1)],
        )
    }

    pub fn rotation(&self, coeffs: &[f64], cell: usize) -> f64 {
        coeffs[self.layout.rotation_dof(cell)]
    }

    /// Stress tensor at a point of one cell (rows are force components).
    pub fn stress_at(&self, coeffs: &[f64], cell: usize, x: Point2) -> na::Matrix2<f64> {
        let cb = &self.cells[cell];
        let mut m = na::Matrix2::zeros();
        for a in 0..2 {
            for i in 0..6 {
                let coef = coeffs[self.layout.stress_dof(cb.faces[i / 2], a, i % 2)];
                let phi = cb.bdm[i].eval(x);
                m[(a, 0)] += coef * phi.x;
                m[(a, 1)] += coef * phi.y;
            }
        }
        m
    }

    pub fn couple_stress_at(&self, coeffs: &[f64], cell: usize, x: Point2) -> Vector2 {
        let cb = &self.cells[cell];
        let mut v = Vector2::zeros();
        for i in 0..3 {
            v += cb.rt[i].eval(x) * coeffs[self.layout.couple_dof(cb.faces[i])];
        }
        v
    }

    /// Divergence of the stress field on one cell; constant there, because
    /// cell bases have constant divergence.
    pub fn stress_divergence(&self, coeffs: &[f64], cell: usize) -> Vector2 {
        let cb = &self.cells[cell];
        let mut d = Vector2::zeros();
        for a in 0..2 {
            for i in 0..6 {
                d[a] += coeffs[self.layout.stress_dof(cb.faces[i / 2], a, i % 2)]
                    * cb.bdm[i].divergence();
            }
        }
        d
    }

    /// Largest couple-stress magnitude over all volume quadrature points.
    pub fn couple_stress_sup(&self, coeffs: &[f64]) -> f64 {
        let mut sup = 0.0f64;
        for c in 0..self.cells.len() {
            for &(x, _) in &self.cells[c].quadrature() {
                sup = sup.max(self.couple_stress_at(coeffs, c, x).norm());
            }
        }
        sup
    }

    /// Worst per-cell defect of discrete linear momentum conservation: the
    /// negated stress divergence must equal the cell average of the body
    /// force, because the displacement row enforces exactly that.
    pub fn momentum_residual(&self, coeffs: &[f64], body_force: impl Fn(Point2) -> Vector2) -> f64 {
        let mut worst = 0.0f64;
        for (c, cb) in self.cells.iter().enumerate() {
            let mut avg = Vector2::zeros();
            for &(x, w) in &cb.quadrature() {
                avg += body_force(x) * w;
            }
            avg /= cb.volume;
            let d = self.stress_divergence(coeffs, c) + avg;
            worst = worst.max(d.amax());
        }
        worst
    }

    /// Worst per-cell defect of the discrete angular balance: the cell
    /// average of `div(ell omega) - S(sigma) + g` must vanish, because the
    /// rotation row enforces exactly that.
    pub fn rotation_residual(
        &self,
        coeffs: &[f64],
        ell: impl Fn(Point2) -> f64,
        grad_ell: impl Fn(Point2) -> Vector2,
        body_couple: impl Fn(Point2) -> f64,
    ) -> f64 {
        let mut worst = 0.0f64;
        for (c, cb) in self.cells.iter().enumerate() {
            let div_omega: f64 = (0..3)
                .map(|i| coeffs[self.layout.couple_dof(cb.faces[i])] * cb.rt[i].divergence())
                .sum();
            let mut s = 0.0;
            for &(x, w) in &cb.quadrature() {
                let omega = self.couple_stress_at(coeffs, c, x);
                let sigma = self.stress_at(coeffs, c, x);
                let asymmetry = sigma[(1, 0)] - sigma[(0, 1)];
                s += w * (grad_ell(x).dot(&omega) + ell(x) * div_omega - asymmetry + body_couple(x));
            }
            worst = worst.max((s / cb.volume).abs());
        }
        worst
    }
}

/// Assembled symmetric linear system together with the layout it indexes.
pub struct MfemSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub layout: FemSpaceLayout,
}

/// Solution coefficients partitioned per [`FemSpaceLayout`], plus the solver
/// report.
pub struct MfemState {
    pub coeffs: Vec<f64>,
    pub report: SolveReport,
}

/// Solve an assembled system.  The matrix is symmetric indefinite, so both
/// the direct factorization and MINRES apply.
pub fn solve(system: &MfemSystem, method: SolveMethod) -> Result<MfemState, SolverError> {
    let (coeffs, report) = solve_linear_system(&system.matrix, &system.rhs, method)?;
    Ok(MfemState { coeffs, report })
}
