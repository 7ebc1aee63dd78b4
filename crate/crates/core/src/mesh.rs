//! Triangular meshes of the unit square, their face geometry, and a plain
//! text interchange format.
//!
//! Conventions used throughout the crate:
//!
//! - cells are counterclockwise vertex triples; clockwise input is silently
//!   reoriented, exactly degenerate cells are rejected;
//! - every edge becomes one [`Face`] record whose `cell_i` is the
//!   lower-indexed incident cell and whose unit normal points from `cell_i`
//!   to `cell_j` (outward on the boundary);
//! - `delta_i`/`delta_j` are the normal-projected distances from the incident
//!   cell centroids to the face centroid, the quantities the two-point flux
//!   approximation is built from.
//!
//! Four structured families cover the convergence studies: a uniform
//! diagonal split, a crisscross split, and two interface-aligned variants
//! whose cells are tagged by region or perturbed while keeping material
//! lines (x = 1/3, x = 2/3, their horizontal twins, and the diagonal x = y)
//! exactly along mesh edges.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra as na;
use thiserror::Error;

pub type Point2 = na::Point2<f64>;
pub type Vector2 = na::Vector2<f64>;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cell {cell} references vertex {vertex}, but there are only {n_vertices} vertices")]
    VertexOutOfRange { cell: usize, vertex: usize, n_vertices: usize },
    #[error("cell {cell} has zero area")]
    DegenerateCell { cell: usize },
    #[error("region tag list has {got} entries for {expected} cells")]
    TagCountMismatch { got: usize, expected: usize },
    #[error("family {family} requires {requirement}, got n = {n}")]
    InvalidResolution { family: MeshFamily, requirement: &'static str, n: usize },
}

/// Structured mesh families on the unit square with resolution parameter `n`
/// (squares per side before splitting).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFamily {
    /// Each grid square split along one diagonal, alternating direction
    /// checkerboard-fashion so that neighbouring cells mirror each other.
    Uniform,
    /// Each grid square split into four triangles around its center.
    Crisscross,
    /// Uniform split with cells tagged 1 in the quadrant x > 1/2, y > 1/2
    /// (requires even `n`).
    InterfaceHalf,
    /// Alternating diagonal split with deterministically perturbed interior
    /// vertices; the lines x, y ∈ {1/3, 2/3} and the diagonal x = y stay
    /// exactly on mesh edges (requires `n` divisible by 3).
    InterfaceThirds,
}

impl MeshFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MeshFamily::Uniform => "uniform",
            MeshFamily::Crisscross => "crisscross",
            MeshFamily::InterfaceHalf => "interface_half",
            MeshFamily::InterfaceThirds => "interface_thirds",
        }
    }
}

impl std::fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(MeshFamily::Uniform),
            "crisscross" => Ok(MeshFamily::Crisscross),
            "interface_half" => Ok(MeshFamily::InterfaceHalf),
            "interface_thirds" => Ok(MeshFamily::InterfaceThirds),
            other => Err(format!(
                "unknown mesh family `{other}` (expected uniform, crisscross, interface_half, or interface_thirds)"
            )),
        }
    }
}

/// A conforming triangle mesh: vertex coordinates, counterclockwise cells,
/// and one integer region tag per cell (0 where no region is distinguished).
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    pub cells: Vec<[usize; 3]>,
    pub region_tags: Vec<i32>,
}

/// One mesh edge together with everything flux assembly needs.
#[derive(Clone, Debug)]
pub struct Face {
    /// Endpoint vertex indices, sorted ascending.
    pub verts: [usize; 2],
    /// Lower-indexed incident cell.
    pub cell_i: usize,
    /// Higher-indexed incident cell; `None` on the boundary.
    pub cell_j: Option<usize>,
    /// Edge length.
    pub area: f64,
    /// Edge midpoint.
    pub centroid: Point2,
    /// Unit normal pointing from `cell_i` toward `cell_j` (outward on the
    /// boundary).
    pub normal: Vector2,
    /// Distance from the `cell_i` centroid to the face centroid, projected
    /// on the normal. Always positive.
    pub delta_i: f64,
    /// Same for `cell_j`; zero on the boundary.
    pub delta_j: f64,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.cell_j.is_none()
    }

    /// +1 if `cell` sees this face's normal as outward, -1 if inward.
    pub fn orientation(&self, cell: usize) -> f64 {
        if cell == self.cell_i {
            1.0
        } else {
            -1.0
        }
    }
}

/// Derived geometric data for a [`Mesh`].
#[derive(Clone, Debug)]
pub struct MeshGeometry {
    pub cell_volume: Vec<f64>,
    pub cell_centroid: Vec<Point2>,
    pub faces: Vec<Face>,
    /// Face index for each cell's local edges (v0v1, v1v2, v2v0).
    pub cell_faces: Vec<[usize; 3]>,
    /// Longest edge in the mesh.
    pub h_max: f64,
}

/// Extremal interior angles over all cells, in degrees.
#[derive(Clone, Copy, Debug)]
pub struct AngleReport {
    pub min_deg: f64,
    pub max_deg: f64,
    pub obtuse_cells: usize,
}

fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
}

impl Mesh {
    /// Validate and adopt raw mesh data. Clockwise cells are reoriented in
    /// place; an empty tag list is filled with zeros.
    pub fn new(
        vertices: Vec<Point2>,
        mut cells: Vec<[usize; 3]>,
        region_tags: Vec<i32>,
    ) -> Result<Self, MeshError> {
        for (c, cell) in cells.iter_mut().enumerate() {
            for &v in cell.iter() {
                if v >= vertices.len() {
                    return Err(MeshError::VertexOutOfRange {
                        cell: c,
                        vertex: v,
                        n_vertices: vertices.len(),
                    });
                }
            }
            let area = signed_area(vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]);
            if area < 0.0 {
                cell.swap(1, 2);
            } else if area.abs() < 1e-14 {
                return Err(MeshError::DegenerateCell { cell: c });
            }
        }
        let region_tags = if region_tags.is_empty() {
            vec![0; cells.len()]
        } else if region_tags.len() == cells.len() {
            region_tags
        } else {
            return Err(MeshError::TagCountMismatch {
                got: region_tags.len(),
                expected: cells.len(),
            });
        };
        Ok(Mesh { vertices, cells, region_tags })
    }

    /// The unit square split along its diagonal into two cells — the
    /// smallest mesh the discretizations run on, handy for hand-checkable
    /// matrices.
    pub fn two_triangle_unit_square() -> Mesh {
        Mesh::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 1.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![],
        )
        .expect("hard-coded mesh is valid")
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_points(&self, c: usize) -> [Point2; 3] {
        let [a, b, d] = self.cells[c];
        [self.vertices[a], self.vertices[b], self.vertices[d]]
    }

    /// Compute volumes, centroids, and the face table.
    pub fn geometry(&self) -> MeshGeometry {
        let n_cells = self.cells.len();
        let mut cell_volume = Vec::with_capacity(n_cells);
        let mut cell_centroid = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            let [a, b, d] = self.cell_points(c);
            cell_volume.push(signed_area(a, b, d));
            cell_centroid.push(Point2::from((a.coords + b.coords + d.coords) / 3.0));
        }

        let mut faces: Vec<Face> = Vec::new();
        let mut cell_faces = vec![[usize::MAX; 3]; n_cells];
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        for c in 0..n_cells {
            let cell = self.cells[c];
            for e in 0..3 {
                let (va, vb) = (cell[e], cell[(e + 1) % 3]);
                let key = [va.min(vb), va.max(vb)];
                match lookup.get(&key) {
                    Some(&f) => {
                        faces[f].cell_j = Some(c);
                        cell_faces[c][e] = f;
                    }
                    None => {
                        let (pa, pb) = (self.vertices[va], self.vertices[vb]);
                        let t = pb - pa;
                        let len = t.norm();
                        // cells are counterclockwise, so (t.y, -t.x) points
                        // out of cell c across this edge
                        let normal = Vector2::new(t.y, -t.x) / len;
                        let f = faces.len();
                        faces.push(Face {
                            verts: key,
                            cell_i: c,
                            cell_j: None,
                            area: len,
                            centroid: na::center(&pa, &pb),
                            normal,
                            delta_i: 0.0,
                            delta_j: 0.0,
                        });
                        lookup.insert(key, f);
                        cell_faces[c][e] = f;
                    }
                }
            }
        }
        for face in faces.iter_mut() {
            face.delta_i = (face.centroid - cell_centroid[face.cell_i]).dot(&face.normal);
            if let Some(j) = face.cell_j {
                face.delta_j = (cell_centroid[j] - face.centroid).dot(&face.normal);
            }
        }
        let h_max = faces.iter().map(|f| f.area).fold(0.0, f64::max);
        MeshGeometry { cell_volume, cell_centroid, faces, cell_faces, h_max }
    }

    /// Interior-angle statistics, mostly to demonstrate a family is not a
    /// right-triangle special case.
    pub fn angle_report(&self) -> AngleReport {
        let mut min_deg = f64::INFINITY;
        let mut max_deg = 0.0f64;
        let mut obtuse_cells = 0;
        for c in 0..self.cells.len() {
            let p = self.cell_points(c);
            let mut cell_max = 0.0f64;
            for k in 0..3 {
                let u = p[(k + 1) % 3] - p[k];
                let v = p[(k + 2) % 3] - p[k];
                let angle = u.angle(&v).to_degrees();
                min_deg = min_deg.min(angle);
                cell_max = cell_max.max(angle);
            }
            max_deg = max_deg.max(cell_max);
            if cell_max > 90.0 + 1e-12 {
                obtuse_cells += 1;
            }
        }
        AngleReport { min_deg, max_deg, obtuse_cells }
    }
}

/// Build one of the structured families at resolution `n`.
pub fn generate_structured(family: MeshFamily, n: usize) -> Result<Mesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidResolution { family, requirement: "n >= 1", n });
    }
    match family {
        MeshFamily::Uniform => uniform_mesh(n, |_| 0),
        MeshFamily::Crisscross => crisscross_mesh(n),
        MeshFamily::InterfaceHalf => {
            if n % 2 != 0 {
                return Err(MeshError::InvalidResolution { family, requirement: "even n", n });
            }
            uniform_mesh(n, |centroid| {
                if centroid.x > 0.5 && centroid.y > 0.5 {
                    1
                } else {
                    0
                }
            })
        }
        MeshFamily::InterfaceThirds => {
            if n % 3 != 0 {
                return Err(MeshError::InvalidResolution {
                    family,
                    requirement: "n divisible by 3",
                    n,
                })
            }
            thirds_mesh(n)
        }
    }
}

fn grid_vertices(n: usize) -> Vec<Point2> {
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point2::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    vertices
}

fn uniform_mesh(n: usize, tag: impl Fn(Point2) -> i32) -> Result<Mesh, MeshError> {
    let vertices = grid_vertices(n);
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            if (i + j) % 2 == 0 {
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            } else {
                cells.push([v00, v10, v01]);
                cells.push([v10, v11, v01]);
            }
        }
    }
    let tags = cells
        .iter()
        .map(|&[a, b, c]| {
            tag(Point2::from((vertices[a].coords + vertices[b].coords + vertices[c].coords) / 3.0))
        })
        .collect();
    Mesh::new(vertices, cells, tags)
}

fn crisscross_mesh(n: usize) -> Result<Mesh, MeshError> {
    let mut vertices = grid_vertices(n);
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let grid_len = vertices.len();
    for j in 0..n {
        for i in 0..n {
            vertices.push(Point2::new(
                (i as f64 + 0.5) / n as f64,
                (j as f64 + 0.5) / n as f64,
            ));
        }
    }
    let cid = |i: usize, j: usize| grid_len + j * n + i;
    let mut cells = Vec::with_capacity(4 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            let c = cid(i, j);
            cells.push([v00, v10, c]);
            cells.push([v10, v11, c]);
            cells.push([v11, v01, c]);
            cells.push([v01, v00, c]);
        }
    }
    Mesh::new(vertices, cells, vec![])
}

/// Deterministic per-vertex hash, used to perturb interior vertices
/// reproducibly (independent of iteration order).
pub(crate) fn vertex_hash(n: usize, i: usize, j: usize) -> u64 {
    let mut z = (n as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((i as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add((j as u64).wrapping_mul(0x94D0_49BB_1331_11EB));
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_interval(bits: u32) -> f64 {
    f64::from(bits) / f64::from(u32::MAX)
}

fn thirds_mesh(n: usize) -> Result<Mesh, MeshError> {
    let h = 1.0 / n as f64;
    // 0.12 h keeps every perturbed triangle non-degenerate with a wide
    // margin (worst-case area stays above 0.28 h^2 / 2) while producing
    // plenty of non-right, including obtuse, triangles.
    let amplitude = 0.12 * h;
    let third = n / 3;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let mut p = Point2::new(i as f64 / n as f64, j as f64 / n as f64);
            let boundary = i == 0 || i == n || j == 0 || j == n;
            let on_diagonal = i == j;
            let pin_x = boundary || on_diagonal || i == third || i == 2 * third;
            let pin_y = boundary || on_diagonal || j == third || j == 2 * third;
            if !(pin_x && pin_y) {
                let bits = vertex_hash(n, i, j);
                let dx = 2.0 * unit_interval(bits as u32) - 1.0;
                let dy = 2.0 * unit_interval((bits >> 32) as u32) - 1.0;
                if !pin_x {
                    p.x += amplitude * dx;
                }
                if !pin_y {
                    p.y += amplitude * dy;
                }
            }
            vertices.push(p);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            // Alternate the split direction for variety. Squares on the main
            // diagonal have even i + j, so the diagonal x = y is always a
            // run of mesh edges.
            if (i + j) % 2 == 0 {
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            } else {
                cells.push([v00, v10, v01]);
                cells.push([v10, v11, v01]);
            }
        }
    }
    Mesh::new(vertices, cells, vec![])
}

// ---------------------------------------------------------------------------
// text format
//
//   dim 2
//   vertices <N>
//   <x> <y>          (N lines)
//   cells <M>
//   <a> <b> <c>      (M lines)
//   tags <M>         (optional section)
//   <t>              (M lines)
//
// `#` starts a comment; blank lines are ignored.
// ---------------------------------------------------------------------------

/// Serialize a mesh in the canonical text form (see the module docs).
/// Writing, reading back, and writing again reproduces the bytes exactly.
pub fn format_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("dim 2\n");
    let _ = writeln!(out, "vertices {}", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(out, "{} {}", v.x, v.y);
    }
    let _ = writeln!(out, "cells {}", mesh.cells.len());
    for c in &mesh.cells {
        let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
    }
    if mesh.region_tags.iter().any(|&t| t != 0) {
        let _ = writeln!(out, "tags {}", mesh.region_tags.len());
        for t in &mesh.region_tags {
            let _ = writeln!(out, "{t}");
        }
    }
    out
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<(), MeshError> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn parse_mesh(text: &str) -> Result<Mesh, MeshError> {
    // (line number, content) with comments and blank lines stripped
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(k, line)| (k + 1, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty())
        .collect();
    let end_line = text.lines().count() + 1;
    let mut cursor = 0usize;
    let next = |what: &str, cursor: &mut usize| -> Result<(usize, &str), MeshError> {
        match lines.get(*cursor) {
            Some(&entry) => {
                *cursor += 1;
                Ok(entry)
            }
            None => Err(MeshError::Parse { line: end_line, msg: format!("missing {what}") }),
        }
    };

    let (line, header) = next("dim header", &mut cursor)?;
    if header != "dim 2" {
        return Err(MeshError::Parse { line, msg: format!("expected `dim 2`, got `{header}`") });
    }

    let n_vertices = parse_count(next("vertices header", &mut cursor)?, "vertices")?;
    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (line, body) = next("vertex coordinates", &mut cursor)?;
        let nums = parse_floats(line, body, 2)?;
        vertices.push(Point2::new(nums[0], nums[1]));
    }

    let n_cells = parse_count(next("cells header", &mut cursor)?, "cells")?;
    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let (line, body) = next("cell vertex indices", &mut cursor)?;
        let nums = parse_indices(line, body, 3)?;
        cells.push([nums[0], nums[1], nums[2]]);
    }

    let mut tags = Vec::new();
    if cursor < lines.len() {
        let n_tags = parse_count(next("tags header", &mut cursor)?, "tags")?;
        for _ in 0..n_tags {
            let (line, body) = next("region tag", &mut cursor)?;
            tags.push(body.parse::<i32>().map_err(|e| MeshError::Parse {
                line,
                msg: format!("bad region tag `{body}`: {e}"),
            })?);
        }
        if cursor < lines.len() {
            let (line, body) = lines[cursor];
            return Err(MeshError::Parse { line, msg: format!("unexpected trailing content `{body}`") });
        }
    }

    Mesh::new(vertices, cells, tags)
}

pub fn read_mesh(path: &Path) -> Result<Mesh, MeshError> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

fn parse_count((line, body): (usize, &str), keyword: &str) -> Result<usize, MeshError> {
    let mut parts = body.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(count), None) if k == keyword => {
            count.parse::<usize>().map_err(|e| MeshError::Parse {
                line,
                msg: format!("bad {keyword} count `{count}`: {e}"),
            })
        }
        _ => Err(MeshError::Parse { line, msg: format!("expected `{keyword} <count>`, got `{body}`") }),
    }
}

fn parse_floats(line: usize, body: &str, want: usize) -> Result<Vec<f64>, MeshError> {
    let nums: Result<Vec<f64>, _> = body.split_whitespace().map(str::parse).collect();
    match nums {
        Ok(nums) if nums.len() == want => Ok(nums),
        Ok(nums) => Err(MeshError::Parse {
            line,
            msg: format!("expected {want} numbers, got {}", nums.len()),
        }),
        Err(e) => Err(MeshError::Parse { line, msg: format!("bad number in `{body}`: {e}") }),
    }
}

fn parse_indices(line: usize, body: &str, want: usize) -> Result<Vec<usize>, MeshError> {
    let nums: Result<Vec<usize>, _> = body.split_whitespace().map(str::parse).collect();
    match nums {
        Ok(nums) if nums.len() == want => Ok(nums),
        Ok(nums) => Err(MeshError::Parse {
            line,
            msg: format!("expected {want} indices, got {}", nums.len()),
        }),
        Err(e) => Err(MeshError::Parse { line, msg: format!("bad index in `{body}`: {e}") }),
    }
}
