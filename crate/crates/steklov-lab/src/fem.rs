//! P1 finite-element realization of the energy framework: the gradient
//! energy, the weighted boundary term, the lower-order boundary
//! perturbation, their assembled derivatives, and the discrete dual norm.
//!
//! Scaling convention: the derivatives of the two energies carry a common
//! factor p (`<J'(φ), v> = p ∫ |∇φ|^{p-2} ∇φ·∇v`, likewise for the boundary
//! term), and that factor cancels in the weak formulation. The [`residual`]
//! therefore omits it: `residual = 0` is exactly the discrete weak form
//!
//! ```text
//! ∫_Ω |∇φ|^{p-2} ∇φ·∇v  =  λ ( ∫_∂Ω g |φ|^{p-2} φ v + ∫_∂Ω f r(φ) v )
//! ```
//!
//! for every hat function v, with `r(s) = |s|^{γ-2} s`. Eigenvalues are
//! unaffected by the convention.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::mesh::{BoundaryFunction, Mesh};
use crate::quad::{GL8_W, GL8_X, TRI7};
use crate::{Error, Result};

/// Nodal coefficients of a continuous piecewise-linear function.
#[derive(Debug, Clone)]
pub struct Field {
    pub mesh: Arc<Mesh>,
    pub coeffs: DVector<f64>,
}

impl Field {
    pub fn new(mesh: &Arc<Mesh>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != mesh.n_vertices() {
            return Err(Error::MeshMismatch(format!(
                "{} coefficients for {} vertices",
                coeffs.len(),
                mesh.n_vertices()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::MeshMismatch("non-finite coefficient".into()));
        }
        Ok(Field {
            mesh: mesh.clone(),
            coeffs,
        })
    }

    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Field {
            mesh: mesh.clone(),
            coeffs: DVector::zeros(mesh.n_vertices()),
        }
    }

    pub fn from_fn(mesh: &Arc<Mesh>, f: impl Fn(f64, f64) -> f64) -> Self {
        let coeffs = DVector::from_iterator(
            mesh.n_vertices(),
            mesh.vertices.iter().map(|v| f(v[0], v[1])),
        );
        Field {
            mesh: mesh.clone(),
            coeffs,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Gradient of the field on triangle `t` (constant per triangle).
fn tri_gradient(mesh: &Mesh, coeffs: &DVector<f64>, t: usize) -> [f64; 2] {
    let tri = mesh.triangles[t];
    let g = &mesh.tri_geom()[t];
    let mut gx = 0.0;
    let mut gy = 0.0;
    for k in 0..3 {
        let c = coeffs[tri[k]];
        gx += c * g.grads[k][0];
        gy += c * g.grads[k][1];
    }
    [gx, gy]
}

/// `|v|^{e-1} v` with the removable zero at v = 0 made explicit, so the
/// singular boundary kernels stay finite where a field vanishes exactly.
fn signed_pow(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.abs().powf(e - 1.0) * v
    }
}

/// The regularization scale used for the degenerate/singular gradient
/// kernel: a small multiple of the mean gradient magnitude, floored away
/// from zero. Exactly zero at p = 2 where the kernel is constant.
pub fn default_epsilon(phi: &Field, p: f64) -> f64 {
    if p == 2.0 {
        return 0.0;
    }
    let mesh = &phi.mesh;
    let nt = mesh.triangles.len();
    let mut mean = 0.0;
    for t in 0..nt {
        let g = tri_gradient(mesh, &phi.coeffs, t);
        mean += g[0].hypot(g[1]);
    }
    mean /= nt as f64;
    (1e-8 * mean).max(1e-12)
}

/// Regularized gradient energy `Σ_T area (|∇φ|² + ε²)^{p/2}`; at ε = 0 this
/// is exactly the p-energy of the piecewise-linear function.
pub fn energy_j(phi: &Field, p: f64, eps: f64) -> f64 {
    let mesh = &phi.mesh;
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let g = tri_gradient(mesh, &phi.coeffs, t);
        let s = g[0] * g[0] + g[1] * g[1] + eps * eps;
        total += mesh.tri_geom()[t].area * s.powf(0.5 * p);
    }
    total
}

/// Assembled derivative of the (regularized) gradient energy:
/// entries `p Σ_T area (|∇φ|²+ε²)^{(p-2)/2} ∇φ·∇hat_i`. This is the exact
/// derivative of [`energy_j`] at the same ε.
pub fn grad_j(phi: &Field, p: f64, eps: f64) -> DVector<f64> {
    let mesh = &phi.mesh;
    let mut out = DVector::zeros(mesh.n_vertices());
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let geom = &mesh.tri_geom()[t];
        let g = tri_gradient(mesh, &phi.coeffs, t);
        let s = g[0] * g[0] + g[1] * g[1] + eps * eps;
        let k = p * geom.area * s.powf(0.5 * p - 1.0);
        for i in 0..3 {
            out[tri[i]] += k * (g[0] * geom.grads[i][0] + g[1] * geom.grads[i][1]);
        }
    }
    out
}

/// ∫_Ω |φ|^p by a degree-5 rule per triangle (exact for p = 2).
pub fn int_p_omega(phi: &Field, p: f64) -> f64 {
    let mesh = &phi.mesh;
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let area = mesh.tri_geom()[t].area;
        let vals = [
            phi.coeffs[tri[0]],
            phi.coeffs[tri[1]],
            phi.coeffs[tri[2]],
        ];
        for (bary, w) in TRI7 {
            let v = bary[0] * vals[0] + bary[1] * vals[1] + bary[2] * vals[2];
            total += w * area * v.abs().powf(p);
        }
    }
    total
}

/// Derivative of [`int_p_omega`]: entries `p ∫ |φ|^{p-2} φ hat_i` under the
/// same quadrature.
pub fn grad_int_p_omega(phi: &Field, p: f64) -> DVector<f64> {
    let mesh = &phi.mesh;
    let mut out = DVector::zeros(mesh.n_vertices());
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let area = mesh.tri_geom()[t].area;
        let vals = [
            phi.coeffs[tri[0]],
            phi.coeffs[tri[1]],
            phi.coeffs[tri[2]],
        ];
        for (bary, w) in TRI7 {
            let v = bary[0] * vals[0] + bary[1] * vals[1] + bary[2] * vals[2];
            let kernel = p * signed_pow(v, p - 1.0);
            for i in 0..3 {
                out[tri[i]] += w * area * kernel * bary[i];
            }
        }
    }
    out
}

/// Sobolev-norm surrogate `(∫|∇φ|^p + ∫|φ|^p)^{1/p}` at ε = 0.
pub fn w1p_norm(phi: &Field, p: f64) -> f64 {
    (energy_j(phi, p, 0.0) + int_p_omega(phi, p)).powf(1.0 / p)
}

/// Edge quadrature nodes mapped to [0, 1].
fn edge_nodes() -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    for k in 0..8 {
        out[k] = (0.5 * (GL8_X[k] + 1.0), 0.5 * GL8_W[k]);
    }
    out
}

/// Weighted boundary energy `∫_∂Ω g |φ|^p`, one 8-point Gauss panel per
/// edge. Exact for p = 2.
pub fn boundary_g(phi: &Field, g: &BoundaryFunction, p: f64) -> f64 {
    let mesh = &phi.mesh;
    debug_assert_eq!(g.len(), mesh.n_boundary_edges());
    let nodes = edge_nodes();
    let mut total = 0.0;
    for (e, (&ge, &len)) in mesh
        .boundary_edges
        .iter()
        .zip(g.values.iter().zip(&mesh.edge_lengths))
    {
        if ge == 0.0 {
            continue;
        }
        let (a, b) = (phi.coeffs[e[0]], phi.coeffs[e[1]]);
        let mut s = 0.0;
        for (x, w) in nodes {
            let v = a * (1.0 - x) + b * x;
            s += w * v.abs().powf(p);
        }
        total += ge * len * s;
    }
    total
}

/// Assembled derivative of [`boundary_g`]: entries
/// `p ∫ g |φ|^{p-2} φ hat_i` under the same quadrature, so the pair is
/// consistent to machine precision.
pub fn grad_g(phi: &Field, g: &BoundaryFunction, p: f64) -> DVector<f64> {
    let mesh = &phi.mesh;
    let nodes = edge_nodes();
    let mut out = DVector::zeros(mesh.n_vertices());
    for (e, (&ge, &len)) in mesh
        .boundary_edges
        .iter()
        .zip(g.values.iter().zip(&mesh.edge_lengths))
    {
        if ge == 0.0 {
            continue;
        }
        let (a, b) = (phi.coeffs[e[0]], phi.coeffs[e[1]]);
        for (x, w) in nodes {
            let v = a * (1.0 - x) + b * x;
            let kernel = p * ge * len * w * signed_pow(v, p - 1.0);
            out[e[0]] += kernel * (1.0 - x);
            out[e[1]] += kernel * x;
        }
    }
    out
}

/// The lower-order boundary perturbation `s ↦ |s|^{γ-2} s` with weight `f`.
/// `gamma` must exceed both 2 and p so the response is differentiable and
/// vanishes faster than the principal part near zero; for p < 2 it must
/// also stay below `p/(2-p)`, the planar growth ceiling.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    pub gamma: f64,
    pub f: BoundaryFunction,
}

impl PerturbationSpec {
    pub fn new(gamma: f64, p: f64, f: BoundaryFunction) -> Result<Self> {
        if !(gamma > 2.0f64.max(p)) {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} must exceed max(2, p) = {}",
                2.0f64.max(p)
            )));
        }
        if p < 2.0 && !(gamma < p / (2.0 - p)) {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} must stay below p/(2-p) = {} for p = {p}",
                p / (2.0 - p)
            )));
        }
        Ok(PerturbationSpec { gamma, f })
    }
}

/// Assembled perturbation vector with entries `∫_∂Ω f |φ|^{γ-2} φ hat_i`.
/// It is the exact derivative of `(1/γ) ∫ f |φ|^γ` under the edge
/// quadrature; odd in φ.
pub fn perturbation_f(phi: &Field, spec: &PerturbationSpec) -> DVector<f64> {
    let mesh = &phi.mesh;
    let nodes = edge_nodes();
    let mut out = DVector::zeros(mesh.n_vertices());
    for (e, (&fe, &len)) in mesh
        .boundary_edges
        .iter()
        .zip(spec.f.values.iter().zip(&mesh.edge_lengths))
    {
        if fe == 0.0 {
            continue;
        }
        let (a, b) = (phi.coeffs[e[0]], phi.coeffs[e[1]]);
        for (x, w) in nodes {
            let v = a * (1.0 - x) + b * x;
            let kernel = fe * len * w * signed_pow(v, spec.gamma - 1.0);
            out[e[0]] += kernel * (1.0 - x);
            out[e[1]] += kernel * x;
        }
    }
    out
}

/// Potential of the perturbation: `(1/γ) ∫_∂Ω f |φ|^γ`.
pub fn perturbation_potential(phi: &Field, spec: &PerturbationSpec) -> f64 {
    let mesh = &phi.mesh;
    let nodes = edge_nodes();
    let mut total = 0.0;
    for (e, (&fe, &len)) in mesh
        .boundary_edges
        .iter()
        .zip(spec.f.values.iter().zip(&mesh.edge_lengths))
    {
        if fe == 0.0 {
            continue;
        }
        let (a, b) = (phi.coeffs[e[0]], phi.coeffs[e[1]]);
        let mut s = 0.0;
        for (x, w) in nodes {
            let v = a * (1.0 - x) + b * x;
            s += w * v.abs().powf(spec.gamma);
        }
        total += fe * len * s;
    }
    total / spec.gamma
}

/// Residual of the discrete weak formulation in every hat function:
/// `residual_i = ∫|∇φ|^{p-2}∇φ·∇hat_i - λ(∫ g|φ|^{p-2}φ hat_i + ∫ f r(φ) hat_i)`.
/// The common factor p of the energy derivatives is divided out so that a
/// zero residual is the weak form verbatim.
pub fn residual(
    lambda: f64,
    phi: &Field,
    g: &BoundaryFunction,
    spec: Option<&PerturbationSpec>,
    p: f64,
    eps: f64,
) -> DVector<f64> {
    let mut r = grad_j(phi, p, eps) / p;
    r -= lambda * (grad_g(phi, g, p) / p);
    if let Some(spec) = spec {
        r -= lambda * perturbation_f(phi, spec);
    }
    r
}

/// Derivative of the residual with respect to λ.
pub fn residual_dlambda(
    phi: &Field,
    g: &BoundaryFunction,
    spec: Option<&PerturbationSpec>,
    p: f64,
) -> DVector<f64> {
    let mut d = -(grad_g(phi, g, p) / p);
    if let Some(spec) = spec {
        d -= perturbation_f(phi, spec);
    }
    d
}

/// Dense Jacobian of [`residual`] with respect to the nodal coefficients.
/// For p < 2 the boundary kernel `|φ|^{p-2}` is floored with
/// `(φ² + floor²)^{(p-2)/2}` so the matrix stays finite where φ crosses
/// zero on the boundary; the residual itself is untouched.
pub fn residual_jacobian(
    lambda: f64,
    phi: &Field,
    g: &BoundaryFunction,
    spec: Option<&PerturbationSpec>,
    p: f64,
    eps: f64,
    kernel_floor: f64,
) -> DMatrix<f64> {
    let mesh = &phi.mesh;
    let n = mesh.n_vertices();
    let mut jac = DMatrix::zeros(n, n);

    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let geom = &mesh.tri_geom()[t];
        let gv = tri_gradient(mesh, &phi.coeffs, t);
        let s = gv[0] * gv[0] + gv[1] * gv[1] + eps * eps;
        let k = s.powf(0.5 * p - 1.0);
        let kp = (p - 2.0) * s.powf(0.5 * p - 2.0);
        for i in 0..3 {
            let di = gv[0] * geom.grads[i][0] + gv[1] * geom.grads[i][1];
            for j in 0..3 {
                let dj = gv[0] * geom.grads[j][0] + gv[1] * geom.grads[j][1];
                let gg = geom.grads[i][0] * geom.grads[j][0]
                    + geom.grads[i][1] * geom.grads[j][1];
                jac[(tri[i], tri[j])] += geom.area * (k * gg + kp * di * dj);
            }
        }
    }

    let nodes = edge_nodes();
    let powm2 = |v: f64, expo: f64| -> f64 {
        if expo >= 0.0 {
            v.abs().powf(expo)
        } else {
            (v * v + kernel_floor * kernel_floor).powf(0.5 * expo)
        }
    };
    for (ei, e) in mesh.boundary_edges.iter().enumerate() {
        let len = mesh.edge_lengths[ei];
        let ge = g.values[ei];
        let fe = spec.map(|s| s.f.values[ei]).unwrap_or(0.0);
        if ge == 0.0 && fe == 0.0 {
            continue;
        }
        let (a, b) = (phi.coeffs[e[0]], phi.coeffs[e[1]]);
        for (x, w) in nodes {
            let v = a * (1.0 - x) + b * x;
            let mut kernel = 0.0;
            if ge != 0.0 {
                kernel += lambda * (p - 1.0) * ge * powm2(v, p - 2.0);
            }
            if let Some(spec) = spec {
                if fe != 0.0 {
                    kernel += lambda * (spec.gamma - 1.0) * fe * v.abs().powf(spec.gamma - 2.0);
                }
            }
            if kernel == 0.0 {
                continue;
            }
            let shapes = [(e[0], 1.0 - x), (e[1], x)];
            for (gi, si) in shapes {
                for (gj, sj) in shapes {
                    jac[(gi, gj)] -= len * w * kernel * si * sj;
                }
            }
        }
    }
    jac
}

// ---------------------------------------------------------------------------
// Linear-algebra helpers for the quadratic case and the dual norm
// ---------------------------------------------------------------------------

/// Dense P1 stiffness matrix (symmetric positive semidefinite, constants in
/// the kernel).
pub fn stiffness_dense(mesh: &Mesh) -> DMatrix<f64> {
    let n = mesh.n_vertices();
    let mut k = DMatrix::zeros(n, n);
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let geom = &mesh.tri_geom()[t];
        for i in 0..3 {
            for j in 0..3 {
                let gg = geom.grads[i][0] * geom.grads[j][0]
                    + geom.grads[i][1] * geom.grads[j][1];
                k[(tri[i], tri[j])] += geom.area * gg;
            }
        }
    }
    k
}

/// Dense P1 consistent mass matrix.
pub fn mass_dense(mesh: &Mesh) -> DMatrix<f64> {
    let n = mesh.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let area = mesh.tri_geom()[t].area;
        for i in 0..3 {
            for j in 0..3 {
                m[(tri[i], tri[j])] += area / 12.0 * if i == j { 2.0 } else { 1.0 };
            }
        }
    }
    m
}

/// Weighted boundary mass matrix `B_ij = ∫_∂Ω g hat_i hat_j` (symmetric,
/// indefinite for sign-changing g, supported on boundary vertices).
pub fn boundary_mass_dense(mesh: &Mesh, g: &BoundaryFunction) -> DMatrix<f64> {
    let n = mesh.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    for (ei, e) in mesh.boundary_edges.iter().enumerate() {
        let c = g.values[ei] * mesh.edge_lengths[ei] / 6.0;
        m[(e[0], e[0])] += 2.0 * c;
        m[(e[1], e[1])] += 2.0 * c;
        m[(e[0], e[1])] += c;
        m[(e[1], e[0])] += c;
    }
    m
}

/// Lower-band Cholesky factorization for the symmetric positive definite
/// mesh operators. Structured grids have bandwidth about one grid line, so
/// factor and solve are effectively linear in the vertex count.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// Row-major lower band: entry (i, j) with i-bw <= j <= i lives at
    /// `band[i*(bw+1) + (j + bw - i)]`.
    band: Vec<f64>,
}

impl BandedCholesky {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Factors the operator given by per-triangle local contributions:
    /// `weight_t * grads·grads + area/12 * (1 + δ)` summed over triangles.
    /// Returns None when the matrix is not numerically positive definite.
    pub fn factor_weighted(mesh: &Mesh, tri_weight: &dyn Fn(usize) -> f64) -> Option<Self> {
        let n = mesh.n_vertices();
        let mut bw = 0usize;
        for t in &mesh.triangles {
            for a in 0..3 {
                for b in 0..3 {
                    bw = bw.max(t[a].abs_diff(t[b]));
                }
            }
        }
        let mut me = BandedCholesky {
            n,
            bw,
            band: vec![0.0; n * (bw + 1)],
        };
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let geom = &mesh.tri_geom()[ti];
            let w = tri_weight(ti);
            for a in 0..3 {
                for b in 0..3 {
                    if t[a] >= t[b] {
                        let gg = geom.grads[a][0] * geom.grads[b][0]
                            + geom.grads[a][1] * geom.grads[b][1];
                        let mass = geom.area / 12.0 * if a == b { 2.0 } else { 1.0 };
                        let k = me.idx(t[a], t[b]);
                        me.band[k] += w * geom.area * gg + mass;
                    }
                }
            }
        }
        // In-place banded Cholesky.
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = me.band[me.idx(i, j)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= me.band[me.idx(i, k)] * me.band[me.idx(j, k)];
                }
                if j == i {
                    if s <= 0.0 {
                        return None;
                    }
                    let k = me.idx(i, i);
                    me.band[k] = s.sqrt();
                } else {
                    let k = me.idx(i, j);
                    me.band[k] = s / me.band[me.idx(j, j)];
                }
            }
        }
        Some(me)
    }

    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        let (n, bw) = (self.n, self.bw);
        let mut y = v.clone();
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let mut s = y[i];
            for j in j0..i {
                s -= self.band[self.idx(i, j)] * y[j];
            }
            y[i] = s / self.band[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            let j1 = (i + bw).min(n - 1);
            for j in (i + 1)..=j1 {
                s -= self.band[self.idx(j, i)] * y[j];
            }
            y[i] = s / self.band[self.idx(i, i)];
        }
        y
    }
}

const BAND_LIMIT: usize = 700;

/// Largest vertex-index distance within a triangle; the band width of the
/// assembled mesh operators.
pub fn mesh_bandwidth(mesh: &Mesh) -> usize {
    mesh.triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| a.abs_diff(b))
        .max()
        .unwrap_or(0)
}

enum RieszBackend {
    Banded(BandedCholesky),
    Dense(Cholesky<f64, Dyn>),
    /// Matrix-free conjugate gradients with Jacobi scaling for meshes too
    /// large for a dense factorization.
    Cg {
        mesh: Arc<Mesh>,
        diag_inv: DVector<f64>,
    },
}

/// Solver for the Riesz problem of the (stiffness + mass) inner product,
/// used as the discrete dual norm on a fixed mesh.
pub struct RieszSolver {
    backend: RieszBackend,
}

const DENSE_RIESZ_LIMIT: usize = 2800;

fn h1_matvec(mesh: &Mesh, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(x.len());
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let geom = &mesh.tri_geom()[t];
        let vals = [x[tri[0]], x[tri[1]], x[tri[2]]];
        // stiffness part
        let gx = vals[0] * geom.grads[0][0] + vals[1] * geom.grads[1][0] + vals[2] * geom.grads[2][0];
        let gy = vals[0] * geom.grads[0][1] + vals[1] * geom.grads[1][1] + vals[2] * geom.grads[2][1];
        for i in 0..3 {
            y[tri[i]] += geom.area * (gx * geom.grads[i][0] + gy * geom.grads[i][1]);
        }
        // mass part
        let sum = vals[0] + vals[1] + vals[2];
        for i in 0..3 {
            y[tri[i]] += geom.area / 12.0 * (sum + vals[i]);
        }
    }
    y
}

impl RieszSolver {
    pub fn new(mesh: &Arc<Mesh>) -> Self {
        let n = mesh.n_vertices();
        if mesh_bandwidth(mesh) <= BAND_LIMIT {
            if let Some(chol) = BandedCholesky::factor_weighted(mesh, &|_| 1.0) {
                return RieszSolver {
                    backend: RieszBackend::Banded(chol),
                };
            }
        }
        if n <= DENSE_RIESZ_LIMIT {
            let a = stiffness_dense(mesh) + mass_dense(mesh);
            let chol = Cholesky::new(a).expect("stiffness + mass is positive definite");
            RieszSolver {
                backend: RieszBackend::Dense(chol),
            }
        } else {
            let mut diag: DVector<f64> = DVector::zeros(n);
            for t in 0..mesh.triangles.len() {
                let tri = mesh.triangles[t];
                let geom = &mesh.tri_geom()[t];
                for i in 0..3 {
                    let gg = geom.grads[i][0] * geom.grads[i][0]
                        + geom.grads[i][1] * geom.grads[i][1];
                    diag[tri[i]] += geom.area * (gg + 1.0 / 6.0);
                }
            }
            RieszSolver {
                backend: RieszBackend::Cg {
                    mesh: mesh.clone(),
                    diag_inv: diag.map(|d| 1.0 / d),
                },
            }
        }
    }

    /// Solves `(K + M) r = v` and returns r.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.backend {
            RieszBackend::Banded(chol) => chol.solve(v),
            RieszBackend::Dense(chol) => chol.solve(v),
            RieszBackend::Cg { mesh, diag_inv } => {
                let n = v.len();
                let mut x = DVector::zeros(n);
                let mut r = v.clone();
                let mut z = r.component_mul(diag_inv);
                let mut p = z.clone();
                let mut rz = r.dot(&z);
                let tol2 = (1e-12 * v.norm()).powi(2).max(1e-300);
                for _ in 0..(10 * n) {
                    if r.norm_squared() <= tol2 {
                        break;
                    }
                    let ap = h1_matvec(mesh, &p);
                    let alpha = rz / p.dot(&ap);
                    x.axpy(alpha, &p, 1.0);
                    r.axpy(-alpha, &ap, 1.0);
                    z = r.component_mul(diag_inv);
                    let rz_new = r.dot(&z);
                    let beta = rz_new / rz;
                    rz = rz_new;
                    p = z + beta * p;
                }
                x
            }
        }
    }

    /// The dual norm of an assembled vector: `sqrt(v^T (K+M)^{-1} v)`.
    /// An equivalent-norm surrogate for the continuous dual norm on a
    /// fixed mesh; used for ratio and trend tests, not as a mesh-uniform
    /// quantity.
    pub fn dual_norm(&self, v: &DVector<f64>) -> f64 {
        let r = self.apply(v);
        r.dot(v).max(0.0).sqrt()
    }
}

/// Dual norm of an assembled vector over a mesh. Builds a solver per call;
/// use [`RieszSolver`] directly when many norms are needed.
pub fn dual_norm(v: &DVector<f64>, mesh: &Arc<Mesh>, _p: f64) -> f64 {
    RieszSolver::new(mesh).dual_norm(v)
}

/// Ratio `‖F(t·w)‖_* / t^{p-1}` for a unit direction w; for the
/// power-response perturbation the ratio scales like `t^{γ-p}`.
pub fn growth_ratio(
    riesz: &RieszSolver,
    t: f64,
    direction: &Field,
    spec: &PerturbationSpec,
    p: f64,
) -> f64 {
    let scaled = Field {
        mesh: direction.mesh.clone(),
        coeffs: &direction.coeffs * t,
    };
    riesz.dual_norm(&perturbation_f(&scaled, spec)) / t.powf(p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_field(mesh: &Arc<Mesh>, seed: u64) -> Field {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let coeffs =
            DVector::from_iterator(mesh.n_vertices(), (0..mesh.n_vertices()).map(|_| {
                rng.gen_range(-1.0..1.0)
            }));
        Field::new(mesh, coeffs).unwrap()
    }

    /// Central finite differences of a scalar functional of the coefficients.
    fn fd_gradient(
        phi: &Field,
        f: impl Fn(&Field) -> f64,
        step: f64,
    ) -> DVector<f64> {
        let n = phi.coeffs.len();
        let mut out = DVector::zeros(n);
        let mut work = phi.clone();
        for i in 0..n {
            let orig = work.coeffs[i];
            work.coeffs[i] = orig + step;
            let up = f(&work);
            work.coeffs[i] = orig - step;
            let dn = f(&work);
            work.coeffs[i] = orig;
            out[i] = (up - dn) / (2.0 * step);
        }
        out
    }

    #[test]
    fn constant_field_has_zero_energy() {
        let mesh = Mesh::unit_square(4);
        let phi = Field::from_fn(&mesh, |_, _| 3.0);
        assert_eq!(energy_j(&phi, 2.0, 0.0), 0.0);
        assert!(grad_j(&phi, 2.0, 0.0).norm() == 0.0);
    }

    #[test]
    fn linear_field_energy_is_area_times_unit_gradient() {
        let mesh = Mesh::unit_square(5);
        let phi = Field::from_fn(&mesh, |x, _| x);
        assert_relative_eq!(energy_j(&phi, 2.0, 0.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(energy_j(&phi, 1.5, 0.0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn grad_j_pairs_to_p_times_energy_for_p2() {
        let mesh = Mesh::unit_square(4);
        let phi = random_field(&mesh, 3);
        let gj = grad_j(&phi, 2.0, 0.0);
        assert_relative_eq!(
            gj.dot(&phi.coeffs),
            2.0 * energy_j(&phi, 2.0, 0.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn grad_j_matches_finite_differences_at_p_1_7() {
        let mesh = Mesh::unit_square(3);
        let phi = random_field(&mesh, 11);
        let eps = default_epsilon(&phi, 1.7);
        let gj = grad_j(&phi, 1.7, eps);
        let fd = fd_gradient(&phi, |f| energy_j(f, 1.7, eps), 1e-6);
        assert!((&gj - &fd).norm() <= 1e-6 * (1.0 + gj.norm()));
    }

    #[test]
    fn p_homogeneity_of_energies() {
        let mesh = Mesh::box_domain(0.25, 4);
        let phi = random_field(&mesh, 5);
        let g = BoundaryFunction::constant(&mesh, 1.3);
        for &p in &[1.5, 2.0] {
            let c: f64 = -2.5;
            let scaled = Field {
                mesh: mesh.clone(),
                coeffs: &phi.coeffs * c,
            };
            assert_relative_eq!(
                energy_j(&scaled, p, 0.0),
                c.abs().powf(p) * energy_j(&phi, p, 0.0),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                boundary_g(&scaled, &g, p),
                c.abs().powf(p) * boundary_g(&phi, &g, p),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn boundary_g_of_one_is_weight_integral() {
        let mesh = Mesh::box_domain(0.25, 6);
        let g = BoundaryFunction::constant(&mesh, -0.7);
        let phi = Field::from_fn(&mesh, |_, _| 1.0);
        assert_relative_eq!(boundary_g(&phi, &g, 1.5), g.integral(), max_relative = 1e-12);
    }

    #[test]
    fn edge_contribution_closed_form_p2() {
        // One edge with endpoint values a, b and unit weight contributes
        // len (a² + ab + b²)/3 at p = 2.
        let mesh = Mesh::unit_square(1);
        let g = BoundaryFunction::constant(&mesh, 1.0);
        let phi = Field::from_fn(&mesh, |x, y| 1.0 + 2.0 * x - y);
        let mut expect = 0.0;
        for (e, &len) in mesh.boundary_edges.iter().zip(&mesh.edge_lengths) {
            let a = phi.coeffs[e[0]];
            let b = phi.coeffs[e[1]];
            expect += len * (a * a + a * b + b * b) / 3.0;
        }
        assert_relative_eq!(boundary_g(&phi, &g, 2.0), expect, max_relative = 1e-13);
    }

    #[test]
    fn grad_g_matches_finite_differences() {
        let mesh = Mesh::box_domain(0.25, 3);
        let phi = random_field(&mesh, 17);
        let g = BoundaryFunction::on_mesh(
            &mesh,
            (0..mesh.n_boundary_edges())
                .map(|i| ((i * 7 % 5) as f64) - 2.0)
                .collect(),
        )
        .unwrap();
        for &p in &[1.5, 2.0] {
            let gg = grad_g(&phi, &g, p);
            let fd = fd_gradient(&phi, |f| boundary_g(f, &g, p), 1e-6);
            assert!((&gg - &fd).norm() <= 1e-6 * (1.0 + gg.norm()));
        }
    }

    #[test]
    fn perturbation_is_odd_and_zero_at_zero() {
        let mesh = Mesh::box_domain(0.25, 3);
        let f = BoundaryFunction::constant(&mesh, 1.0);
        let spec = PerturbationSpec::new(3.0, 2.0, f).unwrap();
        let zero = Field::zeros(&mesh);
        assert_eq!(perturbation_f(&zero, &spec).norm(), 0.0);
        let phi = random_field(&mesh, 23);
        let neg = Field {
            mesh: mesh.clone(),
            coeffs: -&phi.coeffs,
        };
        let fp = perturbation_f(&phi, &spec);
        let fm = perturbation_f(&neg, &spec);
        assert_eq!((fp + fm).norm(), 0.0);
    }

    #[test]
    fn perturbation_matches_potential_finite_differences() {
        let mesh = Mesh::box_domain(0.25, 3);
        let f = BoundaryFunction::constant(&mesh, 0.8);
        let spec = PerturbationSpec::new(3.0, 2.0, f).unwrap();
        let phi = random_field(&mesh, 29);
        let fv = perturbation_f(&phi, &spec);
        let fd = fd_gradient(&phi, |x| perturbation_potential(x, &spec), 1e-6);
        assert!((&fv - &fd).norm() <= 1e-6 * (1.0 + fv.norm()));
    }

    #[test]
    fn perturbation_spec_validates_gamma() {
        let mesh = Mesh::box_domain(0.25, 2);
        let f = BoundaryFunction::constant(&mesh, 1.0);
        assert!(PerturbationSpec::new(2.0, 2.0, f.clone()).is_err());
        assert!(PerturbationSpec::new(3.5, 1.5, f.clone()).is_err()); // ceiling is 3 at p = 1.5
        assert!(PerturbationSpec::new(2.5, 1.5, f).is_ok());
    }

    #[test]
    fn residual_vanishes_on_trivial_branch() {
        let mesh = Mesh::box_domain(0.25, 4);
        let g = BoundaryFunction::constant(&mesh, -1.0);
        let f = BoundaryFunction::constant(&mesh, 1.0);
        let spec = PerturbationSpec::new(3.0, 2.0, f).unwrap();
        let zero = Field::zeros(&mesh);
        for &lambda in &[0.0, 1.0, 17.5] {
            let r = residual(lambda, &zero, &g, Some(&spec), 2.0, 0.0);
            assert_eq!(r.norm(), 0.0);
        }
    }

    #[test]
    fn jacobian_matches_residual_finite_differences() {
        let mesh = Mesh::box_domain(0.25, 2);
        let g = BoundaryFunction::constant(&mesh, -1.0);
        let f = BoundaryFunction::constant(&mesh, 0.5);
        let spec = PerturbationSpec::new(3.0, 2.0, f).unwrap();
        // A strictly positive field keeps the p < 2 kernels smooth.
        let phi = Field::from_fn(&mesh, |x, y| 1.0 + 0.3 * x + 0.2 * y);
        for &p in &[2.0, 1.5] {
            let gamma = if p == 2.0 { 3.0 } else { 2.5 };
            let spec_p = PerturbationSpec::new(gamma, p, spec.f.clone()).unwrap();
            let eps = 1e-8;
            let jac = residual_jacobian(0.8, &phi, &g, Some(&spec_p), p, eps, 1e-10);
            let n = phi.coeffs.len();
            let step = 1e-6;
            let mut work = phi.clone();
            for j in 0..n {
                let orig = work.coeffs[j];
                work.coeffs[j] = orig + step;
                let up = residual(0.8, &work, &g, Some(&spec_p), p, eps);
                work.coeffs[j] = orig - step;
                let dn = residual(0.8, &work, &g, Some(&spec_p), p, eps);
                work.coeffs[j] = orig;
                let fd_col = (up - dn) / (2.0 * step);
                let col = jac.column(j);
                assert!(
                    (&fd_col - col).norm() <= 2e-5 * (1.0 + col.norm()),
                    "column {j} mismatch at p = {p}"
                );
            }
        }
    }

    #[test]
    fn dual_norm_riesz_identity_and_scaling() {
        let mesh = Mesh::unit_square(6);
        let riesz = RieszSolver::new(&mesh);
        let w = random_field(&mesh, 41);
        let a = stiffness_dense(&mesh) + mass_dense(&mesh);
        let v = &a * &w.coeffs;
        let h1 = (w.coeffs.dot(&v)).sqrt();
        assert_relative_eq!(riesz.dual_norm(&v), h1, max_relative = 1e-10);
        assert_relative_eq!(riesz.dual_norm(&(&v * 3.0)), 3.0 * h1, max_relative = 1e-10);
        assert_eq!(riesz.dual_norm(&DVector::zeros(mesh.n_vertices())), 0.0);
    }

    #[test]
    fn growth_ratio_zero_for_zero_perturbation_weight() {
        let mesh = Mesh::box_domain(0.25, 3);
        let riesz = RieszSolver::new(&mesh);
        let f = BoundaryFunction::constant(&mesh, 0.0);
        let spec = PerturbationSpec::new(3.0, 2.0, f).unwrap();
        let dir = random_field(&mesh, 51);
        assert_eq!(growth_ratio(&riesz, 0.01, &dir, &spec, 2.0), 0.0);
    }
}
