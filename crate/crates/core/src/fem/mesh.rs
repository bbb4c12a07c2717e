use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::geometry::families::FlatDomain;
use crate::geometry::{Immersion, ParamBox};

/// Simplicial mesh of a curve or surface embedded in `ℝᴺ`.
///
/// All cells share one arity: 2 vertices (segments) or 3 (triangles).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec<f64>>,
    cells: Vec<Vec<usize>>,
    boundary: Vec<usize>,
    params: Option<Vec<Vec<f64>>>,
}

impl Mesh {
    /// Build a mesh and validate it; the boundary is derived from topology.
    pub fn new(vertices: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if vertices.is_empty() || cells.is_empty() {
            return Err(invalid("mesh needs vertices and cells"));
        }
        let ambient = vertices[0].len();
        if ambient == 0 || vertices.iter().any(|v| v.len() != ambient) {
            return Err(invalid("vertices must share a positive ambient dimension"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(invalid("vertex coordinates must be finite"));
        }
        let arity = cells[0].len();
        if !(arity == 2 || arity == 3) || cells.iter().any(|c| c.len() != arity) {
            return Err(invalid("cells must all be segments or all be triangles"));
        }
        for (i, c) in cells.iter().enumerate() {
            if c.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::DegenerateCell {
                    cell: i,
                    reason: "vertex index out of range".into(),
                });
            }
        }
        let mut mesh = Mesh {
            vertices,
            cells,
            boundary: Vec::new(),
            params: None,
        };
        mesh.boundary = mesh.facet_boundary()?;
        mesh.validate()?;
        Ok(mesh)
    }

    /// Attach parameter-space coordinates, one per vertex.
    pub fn with_params(mut self, params: Vec<Vec<f64>>) -> Result<Self> {
        if params.len() != self.vertices.len() {
            return Err(invalid("one parameter point per vertex is required"));
        }
        self.params = Some(params);
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn params(&self) -> Option<&[Vec<f64>]> {
        self.params.as_deref()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Intrinsic dimension: 1 for curves, 2 for surfaces.
    pub fn intrinsic_dim(&self) -> usize {
        self.cells[0].len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertex(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(&self.vertices[i])
    }

    /// Edge vectors `x_a − x_0` of a cell as columns.
    pub fn cell_edges(&self, cell: usize) -> DMatrix<f64> {
        let c = &self.cells[cell];
        let origin = self.vertex(c[0]);
        let cols: Vec<DVector<f64>> = c[1..].iter().map(|&v| self.vertex(v) - &origin).collect();
        DMatrix::from_columns(&cols)
    }

    /// Induced metric `EᵀE` of the flat simplex.
    pub fn cell_metric(&self, cell: usize) -> DMatrix<f64> {
        let e = self.cell_edges(cell);
        e.transpose() * e
    }

    /// Length or area of a cell.
    pub fn cell_volume(&self, cell: usize) -> f64 {
        let det = self.cell_metric(cell).determinant().max(0.0);
        match self.intrinsic_dim() {
            1 => det.sqrt(),
            _ => 0.5 * det.sqrt(),
        }
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.cell_volume(c)).sum()
    }

    /// Longest edge.
    pub fn max_edge_length(&self) -> f64 {
        let mut h: f64 = 0.0;
        for c in &self.cells {
            for a in 0..c.len() {
                for b in a + 1..c.len() {
                    h = h.max((self.vertex(c[a]) - self.vertex(c[b])).norm());
                }
            }
        }
        h
    }

    fn facet_boundary(&self) -> Result<Vec<usize>> {
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in &self.cells {
            for skip in 0..c.len() {
                let mut facet: Vec<usize> = (0..c.len()).filter(|&a| a != skip).map(|a| c[a]).collect();
                facet.sort_unstable();
                *count.entry(facet).or_default() += 1;
            }
        }
        let mut boundary: Vec<usize> = Vec::new();
        for (facet, n) in count {
            match n {
                1 => boundary.extend(facet),
                2 => {}
                _ => return Err(invalid(format!("facet {facet:?} is shared by {n} cells"))),
            }
        }
        boundary.sort_unstable();
        boundary.dedup();
        Ok(boundary)
    }

    /// Check non-degeneracy and consistent orientation across shared facets.
    pub fn validate(&self) -> Result<()> {
        let scale = self.max_edge_length();
        let n = self.intrinsic_dim();
        for c in 0..self.cells.len() {
            let vol = self.cell_volume(c);
            if !(vol > 1e-12 * scale.powi(n as i32)) {
                return Err(Error::DegenerateCell {
                    cell: c,
                    reason: format!("induced volume {vol:e}"),
                });
            }
        }
        // An oriented facet may occur at most once; a shared facet appears
        // with opposite orientations in its two cells.
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for (ci, c) in self.cells.iter().enumerate() {
            let oriented: Vec<Vec<usize>> = match n {
                1 => vec![vec![c[0]], vec![usize::MAX, c[1]]],
                _ => vec![vec![c[0], c[1]], vec![c[1], c[2]], vec![c[2], c[0]]],
            };
            for f in oriented {
                if let Some(other) = seen.insert(f.clone(), ci) {
                    return Err(Error::DegenerateCell {
                        cell: ci,
                        reason: format!("orientation clashes with cell {other}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Write as OFF-style text: `OFF` for surfaces in ℝ³, `nOFF` otherwise.
    pub fn write_off<W: Write>(&self, mut out: W) -> Result<()> {
        let ambient = self.ambient_dim();
        if ambient == 3 && self.intrinsic_dim() == 2 {
            writeln!(out, "OFF")?;
        } else {
            writeln!(out, "nOFF")?;
            writeln!(out, "{ambient}")?;
        }
        writeln!(out, "{} {} 0", self.vertices.len(), self.cells.len())?;
        for v in &self.vertices {
            let line: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        for c in &self.cells {
            let line: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{} {}", c.len(), line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_off<R: BufRead>(input: R) -> Result<Mesh> {
        let mut tokens: Vec<String> = Vec::new();
        for line in input.lines() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("");
            tokens.extend(content.split_whitespace().map(str::to_string));
        }
        let mut it = tokens.into_iter();
        let parse_err = |m: &str| Error::Parse(format!("OFF: {m}"));
        let header = it.next().ok_or_else(|| parse_err("empty input"))?;
        let ambient = match header.as_str() {
            "OFF" => 3,
            "nOFF" => it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err("missing dimension"))?,
            other => return Err(parse_err(&format!("unknown header `{other}`"))),
        };
        let mut number = |what: &str| -> Result<usize> {
            it.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(&format!("expected {what}")))
        };
        let nv = number("vertex count")?;
        let nc = number("cell count")?;
        let _ = number("edge count")?;
        let mut rest = it;
        let mut real = |what: &str| -> Result<f64> {
            rest.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(&format!("expected {what}")))
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            vertices.push((0..ambient).map(|_| real("coordinate")).collect::<Result<Vec<f64>>>()?);
        }
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let k = real("cell size")? as usize;
            cells.push(
                (0..k)
                    .map(|_| real("vertex index").map(|x| x as usize))
                    .collect::<Result<Vec<usize>>>()?,
            );
        }
        Mesh::new(vertices, cells)
    }
}

/// Uniform mesh of `[0, length]` with both endpoints on the boundary.
pub fn mesh_interval(length: f64, cells: usize) -> Result<Mesh> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(invalid("interval length must be positive"));
    }
    if cells < 4 {
        return Err(invalid("an interval mesh needs at least 4 cells"));
    }
    let vertices = (0..=cells).map(|i| vec![length * i as f64 / cells as f64]).collect();
    let segs = (0..cells).map(|i| vec![i, i + 1]).collect();
    let params = (0..=cells).map(|i| vec![length * i as f64 / cells as f64]).collect();
    Mesh::new(vertices, segs)?.with_params(params)
}

/// Closed polygon inscribed in the circle of radius `radius`.
pub fn mesh_circle(radius: f64, cells: usize) -> Result<Mesh> {
    if !(radius > 0.0) || cells < 4 {
        return Err(invalid("circle mesh needs a positive radius and at least 4 cells"));
    }
    let vertices = (0..cells)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / cells as f64;
            vec![radius * t.cos(), radius * t.sin()]
        })
        .collect();
    let segs = (0..cells).map(|i| vec![i, (i + 1) % cells]).collect();
    Mesh::new(vertices, segs)
}

/// Uniform parameter grid on a curve immersion.
pub fn mesh_curve(im: &dyn Immersion, cells: usize) -> Result<Mesh> {
    if im.intrinsic_dim() != 1 {
        return Err(invalid("mesh_curve needs a curve"));
    }
    if cells < 4 {
        return Err(invalid("a curve mesh needs at least 4 cells"));
    }
    let d = im.domain();
    let params: Vec<Vec<f64>> = (0..=cells)
        .map(|i| vec![d.lower[0] + (d.upper[0] - d.lower[0]) * i as f64 / cells as f64])
        .collect();
    let vertices = params.iter().map(|p| im.position(p).as_slice().to_vec()).collect();
    let segs = (0..cells).map(|i| vec![i, i + 1]).collect();
    Mesh::new(vertices, segs)?.with_params(params)
}

/// `m × m` grid on a surface patch, each square split into two triangles;
/// `2m²` triangles in total.
pub fn mesh_patch(im: &dyn Immersion, m: usize) -> Result<Mesh> {
    if im.intrinsic_dim() != 2 {
        return Err(invalid("mesh_patch needs a surface"));
    }
    if m < 2 {
        return Err(invalid("patch resolution must be at least 2"));
    }
    let d = im.domain();
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    let mut params = Vec::with_capacity((m + 1) * (m + 1));
    for i in 0..=m {
        for j in 0..=m {
            let s = d.lower[0] + (d.upper[0] - d.lower[0]) * i as f64 / m as f64;
            let t = d.lower[1] + (d.upper[1] - d.lower[1]) * j as f64 / m as f64;
            params.push(vec![s, t]);
        }
    }
    let mut cells = Vec::with_capacity(2 * m * m);
    for i in 0..m {
        for j in 0..m {
            // Alternate the diagonal so the grid has no preferred direction.
            if (i + j) % 2 == 0 {
                cells.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                cells.push(vec![idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            } else {
                cells.push(vec![idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
                cells.push(vec![idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }
    lift(im, params, cells)
}

/// Unit-square patch in the plane.
pub fn mesh_unit_square(m: usize) -> Result<Mesh> {
    let square = FlatDomain::new(ParamBox::new(vec![0.0, 0.0], vec![1.0, 1.0])?);
    mesh_patch(&square, m)
}

fn lift(im: &dyn Immersion, params: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<Mesh> {
    let vertices = params.iter().map(|p| im.position(p).as_slice().to_vec()).collect();
    Mesh::new(vertices, cells)?.with_params(params)
}

/// Planar disk meshed by concentric rings; ring `r` carries `6r` vertices,
/// giving `6·rings²` triangles.
pub fn mesh_disk(radius: f64, rings: usize) -> Result<Mesh> {
    let (params, cells) = disk_parameters(radius, rings)?;
    Mesh::new(params.clone(), cells)?.with_params(params)
}

/// A disk of parameters of radius `radius` lifted through a graph-like
/// surface immersion, e.g. a cap of the bowl soliton.
pub fn mesh_disk_on(im: &dyn Immersion, radius: f64, rings: usize) -> Result<Mesh> {
    if im.intrinsic_dim() != 2 {
        return Err(invalid("mesh_disk_on needs a surface"));
    }
    let (params, cells) = disk_parameters(radius, rings)?;
    for p in &params {
        if !im.domain().contains(p) {
            return Err(invalid("disk does not fit in the immersion's parameter domain"));
        }
    }
    lift(im, params, cells)
}

fn disk_parameters(radius: f64, rings: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<usize>>)> {
    if !(radius > 0.0) || rings < 2 {
        return Err(invalid("disk mesh needs a positive radius and at least 2 rings"));
    }
    let start = |r: usize| if r == 0 { 0 } else { 1 + 3 * r * (r - 1) };
    let mut points = vec![vec![0.0, 0.0]];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for i in 0..6 * r {
            let t = 2.0 * PI * i as f64 / (6 * r) as f64;
            points.push(vec![rad * t.cos(), rad * t.sin()]);
        }
    }
    let mut cells = Vec::with_capacity(6 * rings * rings);
    for r in 1..=rings {
        let outer = |i: usize| start(r) + i % (6 * r);
        if r == 1 {
            for i in 0..6 {
                cells.push(vec![0, outer(i), outer(i + 1)]);
            }
            continue;
        }
        let inner_n = 6 * (r - 1);
        let inner = |i: usize| start(r - 1) + i % inner_n;
        // Walk both rings by angle, always advancing the one that lags.
        let (mut a, mut b) = (0usize, 0usize);
        while a < 6 * r || b < inner_n {
            let next_outer = (a + 1) as f64 / (6 * r) as f64;
            let next_inner = (b + 1) as f64 / inner_n as f64;
            if b >= inner_n || (a < 6 * r && next_outer <= next_inner) {
                cells.push(vec![inner(b), outer(a), outer(a + 1)]);
                a += 1;
            } else {
                cells.push(vec![inner(b), outer(a), inner(b + 1)]);
                b += 1;
            }
        }
    }
    Ok((points, cells))
}

/// Icosahedron subdivided `level` times and projected to the unit sphere;
/// `20·4^level` triangles.
pub fn mesh_icosphere(level: usize) -> Result<Mesh> {
    if level > 7 {
        return Err(invalid("icosphere level above 7 is out of desk scale"));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut points: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let normalize = |p: [f64; 3]| {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / r, p[1] / r, p[2] / r]
    };
    for p in points.iter_mut() {
        *p = normalize(*p);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, points: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let (p, q) = (points[a], points[b]);
                points.push(normalize([
                    (p[0] + q[0]) / 2.0,
                    (p[1] + q[1]) / 2.0,
                    (p[2] + q[2]) / 2.0,
                ]));
                points.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let ab = mid(f[0], f[1], &mut points);
            let bc = mid(f[1], f[2], &mut points);
            let ca = mid(f[2], f[0], &mut points);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    Mesh::new(
        points.into_iter().map(|p| p.to_vec()).collect(),
        faces.into_iter().map(|f| f.to_vec()).collect(),
    )
}

/// Periodic `m × m` grid on the Clifford torus `S¹(1/√2) × S¹(1/√2) ⊂ S³ ⊂ ℝ⁴`.
pub fn mesh_clifford_torus(m: usize) -> Result<Mesh> {
    if m < 4 {
        return Err(invalid("torus resolution must be at least 4"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let idx = |i: usize, j: usize| (i % m) * m + (j % m);
    let mut vertices = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let (s, t) = (2.0 * PI * i as f64 / m as f64, 2.0 * PI * j as f64 / m as f64);
            vertices.push(vec![r * s.cos(), r * s.sin(), r * t.cos(), r * t.sin()]);
        }
    }
    let mut cells = Vec::with_capacity(2 * m * m);
    for i in 0..m {
        for j in 0..m {
            cells.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            cells.push(vec![idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Mesh::new(vertices, cells)
}
