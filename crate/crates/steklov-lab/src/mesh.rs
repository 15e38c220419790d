//! Planar triangulations with an oriented boundary loop, plus piecewise
//! constant boundary data.
//!
//! The mesh format is text: a first line `nv nt`, then `nv` lines `x y`,
//! then `nt` lines `i j k` with 0-based vertex indices. The boundary is
//! always derived from triangle adjacency, never listed.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::{Error, Result};

/// Which built-in domain a mesh discretizes. Weights from the catalog bind
/// to a specific domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainTag {
    /// Unit square (0,1)^2.
    UnitSquare,
    /// Regular polygon inscribed in the unit circle.
    Disk,
    /// The box (-R, R) x (0, 2R); the bottom side carries the singular
    /// catalog weights.
    BoxDomain { half_width: f64 },
    /// Loaded from a file; no catalog binding.
    File,
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainTag::UnitSquare => write!(f, "square"),
            DomainTag::Disk => write!(f, "disk"),
            DomainTag::BoxDomain { half_width } => write!(f, "box(R={half_width})"),
            DomainTag::File => write!(f, "file"),
        }
    }
}

/// Per-triangle geometry cached at construction: area and the constant
/// gradients of the three hat functions.
#[derive(Debug, Clone)]
pub struct TriGeom {
    pub area: f64,
    /// grads[i] is the gradient of the hat function of local vertex i.
    pub grads: [[f64; 2]; 3],
}

/// An immutable planar triangulation with a single, counterclockwise,
/// closed boundary loop.
#[derive(Debug)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Triangles with positive signed area (counterclockwise).
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges as ordered vertex pairs; edge k runs from
    /// `boundary_edges[k][0]` to `boundary_edges[k][1]` and the loop is
    /// closed and counterclockwise.
    pub boundary_edges: Vec<[usize; 2]>,
    /// Arc length of each boundary edge.
    pub edge_lengths: Vec<f64>,
    /// Outward unit normal of each boundary edge.
    pub outward_normals: Vec<[f64; 2]>,
    pub domain: DomainTag,
    tri_geom: Vec<TriGeom>,
    perimeter: f64,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Builds a mesh from raw vertex and triangle lists, reorienting
    /// clockwise triangles, validating topology, and deriving the boundary
    /// loop. Fails on non-manifold edges, open or multiple boundary loops,
    /// and degenerate triangles.
    pub fn from_raw(
        vertices: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        domain: DomainTag,
    ) -> Result<Arc<Mesh>> {
        let nv = vertices.len();
        if nv < 3 || triangles.is_empty() {
            return Err(Error::MeshTopology(
                "mesh needs at least 3 vertices and 1 triangle".into(),
            ));
        }
        for (ti, t) in triangles.iter().enumerate() {
            for &v in t {
                if v >= nv {
                    return Err(Error::MeshTopology(format!(
                        "triangle {ti} references missing vertex {v} (have {nv})"
                    )));
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::MeshTopology(format!(
                    "triangle {ti} repeats a vertex"
                )));
            }
        }

        let (mut min_x, mut max_x, mut min_y, mut max_y) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for v in &vertices {
            min_x = min_x.min(v[0]);
            max_x = max_x.max(v[0]);
            min_y = min_y.min(v[1]);
            max_y = max_y.max(v[1]);
        }
        let bbox_area = (max_x - min_x) * (max_y - min_y);
        let threshold = 1e-14 * bbox_area;

        let mut tri_geom = Vec::with_capacity(triangles.len());
        for (ti, t) in triangles.iter_mut().enumerate() {
            let mut area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if area < 0.0 {
                t.swap(1, 2);
                area = -area;
            }
            if area <= threshold {
                return Err(Error::DegenerateTriangle {
                    index: ti,
                    area,
                    threshold,
                });
            }
            let [a, b, c] = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
            // Hat-function gradients: grad lambda_i = rot(opposite edge) / (2 area).
            let grads = [
                [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)],
                [(c[1] - a[1]) / (2.0 * area), (a[0] - c[0]) / (2.0 * area)],
                [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)],
            ];
            tri_geom.push(TriGeom { area, grads });
        }

        let mut used = vec![false; nv];
        for t in &triangles {
            for &v in t {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::MeshTopology(format!(
                "vertex {v} is not referenced by any triangle"
            )));
        }

        // Edges incident to exactly one triangle form the boundary; keep the
        // orientation they carry inside their (counterclockwise) triangle so
        // the interior lies on the left.
        let mut incidence: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for t in &triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                match incidence.get_mut(&key) {
                    Some(entry) => {
                        entry.0 += 1;
                        if entry.0 > 2 {
                            return Err(Error::MeshTopology(format!(
                                "edge ({},{}) shared by more than two triangles",
                                key.0, key.1
                            )));
                        }
                    }
                    None => {
                        incidence.insert(key, (1, [a, b]));
                    }
                }
            }
        }
        let mut oriented: Vec<[usize; 2]> = incidence
            .values()
            .filter(|(count, _)| *count == 1)
            .map(|(_, e)| *e)
            .collect();
        oriented.sort_unstable();
        if oriented.is_empty() {
            return Err(Error::MeshTopology("mesh has no boundary".into()));
        }

        let mut next: HashMap<usize, usize> = HashMap::with_capacity(oriented.len());
        for e in &oriented {
            if next.insert(e[0], e[1]).is_some() {
                return Err(Error::MeshTopology(format!(
                    "boundary vertex {} has two outgoing boundary edges",
                    e[0]
                )));
            }
        }
        let start = oriented.iter().map(|e| e[0]).min().unwrap();
        let mut loop_edges = Vec::with_capacity(oriented.len());
        let mut cur = start;
        loop {
            let Some(&nxt) = next.get(&cur) else {
                return Err(Error::MeshTopology(format!(
                    "boundary loop is open at vertex {cur}"
                )));
            };
            loop_edges.push([cur, nxt]);
            cur = nxt;
            if cur == start {
                break;
            }
            if loop_edges.len() > oriented.len() {
                return Err(Error::MeshTopology("boundary loop does not close".into()));
            }
        }
        if loop_edges.len() != oriented.len() {
            return Err(Error::MeshTopology(
                "boundary has more than one connected loop".into(),
            ));
        }

        let loop_area: f64 = loop_edges
            .iter()
            .map(|e| {
                let a = vertices[e[0]];
                let b = vertices[e[1]];
                0.5 * (a[0] * b[1] - b[0] * a[1])
            })
            .sum();
        if loop_area <= 0.0 {
            return Err(Error::MeshTopology(
                "boundary loop is not counterclockwise".into(),
            ));
        }

        let mut edge_lengths = Vec::with_capacity(loop_edges.len());
        let mut outward_normals = Vec::with_capacity(loop_edges.len());
        for e in &loop_edges {
            let a = vertices[e[0]];
            let b = vertices[e[1]];
            let dx = b[0] - a[0];
            let dy = b[1] - a[1];
            let len = dx.hypot(dy);
            if len <= f64::EPSILON * (1.0 + bbox_area.sqrt()) {
                return Err(Error::MeshTopology(format!(
                    "zero-length boundary edge between vertices {} and {}",
                    e[0], e[1]
                )));
            }
            edge_lengths.push(len);
            // Interior on the left of a->b, so outward is the right normal.
            outward_normals.push([dy / len, -dx / len]);
        }
        let perimeter: f64 = edge_lengths.iter().sum();

        Ok(Arc::new(Mesh {
            vertices,
            triangles,
            boundary_edges: loop_edges,
            edge_lengths,
            outward_normals,
            domain,
            tri_geom,
            perimeter,
        }))
    }

    /// Parses the text mesh format. Line numbers in errors are 1-based.
    pub fn parse(text: &str) -> Result<Arc<Mesh>> {
        let mut lines = text.lines().enumerate();
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::MeshParse {
                line: 1,
                msg: "empty file".into(),
            })?;
        let mut it = header.split_whitespace();
        let parse_count = |tok: Option<&str>, what: &str| -> Result<usize> {
            tok.ok_or_else(|| Error::MeshParse {
                line: line_no + 1,
                msg: format!("missing {what}"),
            })?
            .parse()
            .map_err(|e| Error::MeshParse {
                line: line_no + 1,
                msg: format!("bad {what}: {e}"),
            })
        };
        let nv = parse_count(it.next(), "vertex count")?;
        let nt = parse_count(it.next(), "triangle count")?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, line) = lines.next().ok_or_else(|| Error::MeshParse {
                line: nv + 1,
                msg: "unexpected end of file in vertex block".into(),
            })?;
            let mut toks = line.split_whitespace();
            let mut coord = |name: &str| -> Result<f64> {
                toks.next()
                    .ok_or_else(|| Error::MeshParse {
                        line: ln + 1,
                        msg: format!("missing {name}"),
                    })?
                    .parse()
                    .map_err(|e| Error::MeshParse {
                        line: ln + 1,
                        msg: format!("bad {name}: {e}"),
                    })
            };
            vertices.push([coord("x")?, coord("y")?]);
        }

        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, line) = lines.next().ok_or_else(|| Error::MeshParse {
                line: nv + nt + 1,
                msg: "unexpected end of file in triangle block".into(),
            })?;
            let mut toks = line.split_whitespace();
            let mut idx = |name: &str| -> Result<usize> {
                toks.next()
                    .ok_or_else(|| Error::MeshParse {
                        line: ln + 1,
                        msg: format!("missing index {name}"),
                    })?
                    .parse()
                    .map_err(|e| Error::MeshParse {
                        line: ln + 1,
                        msg: format!("bad index {name}: {e}"),
                    })
            };
            triangles.push([idx("i")?, idx("j")?, idx("k")?]);
        }

        Mesh::from_raw(vertices, triangles, DomainTag::File)
    }

    /// Loads a mesh from a text file.
    pub fn load(path: &Path) -> Result<Arc<Mesh>> {
        let text = std::fs::read_to_string(path)?;
        Mesh::parse(&text)
    }

    /// Structured mesh of the unit square with `n` edges per side.
    pub fn unit_square(n: usize) -> Arc<Mesh> {
        Self::grid(n, 0.0, 1.0, 0.0, 1.0, DomainTag::UnitSquare)
    }

    /// Structured mesh of the box (-R, R) x (0, 2R) with `n` edges per side.
    pub fn box_domain(half_width: f64, n: usize) -> Arc<Mesh> {
        Self::grid(
            n,
            -half_width,
            half_width,
            0.0,
            2.0 * half_width,
            DomainTag::BoxDomain { half_width },
        )
    }

    /// Box mesh with tensor grid lines power-graded toward the midpoint of
    /// the bottom side, where the catalog weights are singular. `grade = 1`
    /// is the uniform grid; `grade = 2` restores second-order eigenvalue
    /// convergence against the square-root behavior the singular weights
    /// induce there.
    pub fn box_graded(half_width: f64, n: usize, grade: f64) -> Arc<Mesh> {
        assert!(n >= 2 && n % 2 == 0 && grade >= 1.0, "graded grid needs even n");
        let r = half_width;
        let m = n + 1;
        // Symmetric grading in x toward 0; one-sided grading in y toward 0.
        let half = (n / 2) as i64;
        let xs: Vec<f64> = (0..m)
            .map(|i| {
                let k = i as i64 - half;
                let v = (k.unsigned_abs() as f64) / half as f64;
                (k.signum() as f64) * r * v.powf(grade)
            })
            .collect();
        let ys: Vec<f64> = (0..m)
            .map(|j| 2.0 * r * ((j as f64) / (n as f64)).powf(grade))
            .collect();
        let mut vertices = Vec::with_capacity(m * m);
        for y in &ys {
            for x in &xs {
                vertices.push([*x, *y]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * m + i;
                let v10 = v00 + 1;
                let v01 = v00 + m;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Mesh::from_raw(vertices, triangles, DomainTag::BoxDomain { half_width })
            .expect("graded grid is always valid")
    }

    fn grid(n: usize, x0: f64, x1: f64, y0: f64, y1: f64, domain: DomainTag) -> Arc<Mesh> {
        assert!(n >= 1, "grid needs at least one cell per side");
        let m = n + 1;
        let mut vertices = Vec::with_capacity(m * m);
        for j in 0..m {
            for i in 0..m {
                let x = x0 + (x1 - x0) * (i as f64) / (n as f64);
                let y = y0 + (y1 - y0) * (j as f64) / (n as f64);
                vertices.push([x, y]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * m + i;
                let v10 = v00 + 1;
                let v01 = v00 + m;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Mesh::from_raw(vertices, triangles, domain).expect("structured grid is always valid")
    }

    /// Regular `n`-gon inscribed in the unit circle, triangulated as a fan
    /// around the center.
    pub fn disk_polygon(n: usize) -> Arc<Mesh> {
        assert!(n >= 3, "polygon needs at least 3 boundary edges");
        let mut vertices = Vec::with_capacity(n + 1);
        vertices.push([0.0, 0.0]);
        for k in 0..n {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
            vertices.push([theta.cos(), theta.sin()]);
        }
        let mut triangles = Vec::with_capacity(n);
        for k in 0..n {
            let a = 1 + k;
            let b = 1 + (k + 1) % n;
            triangles.push([0, a, b]);
        }
        Mesh::from_raw(vertices, triangles, DomainTag::Disk).expect("fan mesh is always valid")
    }

    /// Uniform refinement: every edge is bisected at its midpoint and every
    /// triangle split into four. Boundary edges are bisected along their
    /// chord, so the perimeter is preserved exactly.
    pub fn refine_uniform(&self) -> Arc<Mesh> {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let pa = vertices[a];
                let pb = vertices[b];
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = *t;
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        Mesh::from_raw(vertices, triangles, self.domain).expect("refinement preserves validity")
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.boundary_edges.len()
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn tri_geom(&self) -> &[TriGeom] {
        &self.tri_geom
    }

    /// Total area, as the sum of (positive) triangle areas.
    pub fn area(&self) -> f64 {
        self.tri_geom.iter().map(|g| g.area).sum()
    }

    /// Vertex indices that lie on the boundary loop, in loop order.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        self.boundary_edges.iter().map(|e| e[0]).collect()
    }
}

/// Piecewise-constant data on the boundary loop of a mesh: one value per
/// boundary edge, together with the edge arc lengths as measures.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    pub values: Vec<f64>,
    pub measures: Vec<f64>,
}

impl BoundaryFunction {
    /// Binds per-edge values to the boundary of `mesh`.
    pub fn on_mesh(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_boundary_edges() {
            return Err(Error::MeshMismatch(format!(
                "{} values for {} boundary edges",
                values.len(),
                mesh.n_boundary_edges()
            )));
        }
        Ok(BoundaryFunction {
            values,
            measures: mesh.edge_lengths.clone(),
        })
    }

    /// Constant data on every edge.
    pub fn constant(mesh: &Mesh, c: f64) -> Self {
        BoundaryFunction {
            values: vec![c; mesh.n_boundary_edges()],
            measures: mesh.edge_lengths.clone(),
        }
    }

    /// Builds boundary data from explicit (value, measure) pairs. Used for
    /// tests and for self-contained CSV weights.
    pub fn from_parts(values: Vec<f64>, measures: Vec<f64>) -> Result<Self> {
        if values.len() != measures.len() || values.is_empty() {
            return Err(Error::MeshMismatch(
                "values and measures must be equally sized and nonempty".into(),
            ));
        }
        if measures.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::MeshMismatch("all measures must be positive".into()));
        }
        Ok(BoundaryFunction { values, measures })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    /// The boundary integral of the data: sum of value times edge measure.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.measures)
            .map(|(v, m)| v * m)
            .sum()
    }

    /// True when the other function lives on the same boundary partition.
    pub fn same_partition(&self, other: &BoundaryFunction) -> bool {
        self.measures.len() == other.measures.len()
            && self
                .measures
                .iter()
                .zip(&other.measures)
                .all(|(a, b)| a == b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_square_two_triangles() {
        let text = "4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n";
        let mesh = Mesh::parse(text).unwrap();
        assert_eq!(mesh.n_boundary_edges(), 4);
        assert_relative_eq!(mesh.perimeter(), 4.0, max_relative = 1e-12);
        assert_relative_eq!(mesh.area(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn polygon_perimeter_matches_inscribed_formula() {
        let n = 2048;
        let mesh = Mesh::disk_polygon(n);
        let exact = 2.0 * (n as f64) * (std::f64::consts::PI / n as f64).sin();
        assert_relative_eq!(mesh.perimeter(), exact, max_relative = 1e-12);
        assert!((mesh.perimeter() - 2.0 * std::f64::consts::PI).abs() < 1e-5);
    }

    #[test]
    fn missing_vertex_is_topology_error() {
        let text = "3 1\n0 0\n1 0\n0 1\n0 1 7\n";
        match Mesh::parse(text) {
            Err(Error::MeshTopology(_)) => {}
            other => panic!("expected topology error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let text = "4 2\n0 0\n1 0\n2 0\n0 1\n0 1 3\n0 1 2\n";
        match Mesh::parse(text) {
            Err(Error::DegenerateTriangle { .. }) => {}
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_carries_line_number() {
        let text = "4 2\n0 0\n1 zebra\n1 1\n0 1\n0 1 2\n0 2 3\n";
        match Mesh::parse(text) {
            Err(Error::MeshParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn clockwise_triangles_are_reoriented() {
        let text = "4 2\n0 0\n1 0\n1 1\n0 1\n0 2 1\n0 3 2\n";
        let mesh = Mesh::parse(text).unwrap();
        for g in mesh.tri_geom() {
            assert!(g.area > 0.0);
        }
        assert_eq!(mesh.n_boundary_edges(), 4);
    }

    #[test]
    fn boundary_loop_is_counterclockwise_with_outward_normals() {
        let mesh = Mesh::unit_square(4);
        // On the bottom edge the outward normal points down.
        for (e, n) in mesh.boundary_edges.iter().zip(&mesh.outward_normals) {
            let a = mesh.vertices[e[0]];
            let b = mesh.vertices[e[1]];
            if a[1] == 0.0 && b[1] == 0.0 {
                assert_relative_eq!(n[1], -1.0, max_relative = 1e-14);
            }
        }
        // Loop is closed.
        let first = mesh.boundary_edges.first().unwrap()[0];
        let last = mesh.boundary_edges.last().unwrap()[1];
        assert_eq!(first, last);
    }

    #[test]
    fn constant_boundary_integral_is_perimeter_multiple() {
        let mesh = Mesh::unit_square(3);
        let f = BoundaryFunction::constant(&mesh, 1.0);
        assert_relative_eq!(f.integral(), 4.0, max_relative = 1e-12);
        let g = BoundaryFunction::constant(&mesh, -2.5);
        assert_relative_eq!(g.integral(), -10.0, max_relative = 1e-12);
    }

    #[test]
    fn refinement_preserves_resampled_constant_integral() {
        let mesh = Mesh::box_domain(0.25, 6);
        let fine = mesh.refine_uniform();
        assert_eq!(fine.n_boundary_edges(), 2 * mesh.n_boundary_edges());
        let coarse_f = BoundaryFunction::constant(&mesh, 3.25);
        let fine_f = BoundaryFunction::constant(&fine, 3.25);
        assert!((coarse_f.integral() - fine_f.integral()).abs() <= 1e-12 * coarse_f.integral().abs());
    }

    #[test]
    fn boundary_integral_invariant_under_cyclic_relabeling() {
        let mesh = Mesh::unit_square(5);
        let n = mesh.n_boundary_edges();
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 1.5).collect();
        let f = BoundaryFunction::on_mesh(&mesh, values.clone()).unwrap();
        // Rotate by 7 positions, with measures rotated the same way.
        let k = 7 % n;
        let rot_vals: Vec<f64> = (0..n).map(|i| values[(i + k) % n]).collect();
        let rot_meas: Vec<f64> = (0..n).map(|i| mesh.edge_lengths[(i + k) % n]).collect();
        let g = BoundaryFunction::from_parts(rot_vals, rot_meas).unwrap();
        assert_relative_eq!(f.integral(), g.integral(), max_relative = 1e-12);
    }
}
