//! Dense reference solver for the quadratic case: assembles the stiffness
//! matrix and the weighted boundary mass matrix and solves the full
//! generalized eigenvalue pencil with the QZ factorization (LAPACK dggev).
//! Used to cross-check the iterative solver at p = 2 and to report the
//! spectral gap; capped at 2000 vertices.

use nalgebra::DVector;
use std::sync::Arc;

use crate::fem::{boundary_mass_dense, stiffness_dense, Field};
use crate::mesh::{BoundaryFunction, Mesh};
use crate::{Error, Result};

const SIZE_CAP: usize = 2000;

/// All finite real eigenvalues of the pencil, with the principal pair
/// singled out: the smallest positive eigenvalue whose eigenvector has a
/// one-signed boundary trace.
#[derive(Debug)]
pub struct SpectrumSlice {
    /// Finite real eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub lambda1: Option<f64>,
    pub principal_vector: Option<Field>,
    /// Smallest eigenvalue strictly above `lambda1`.
    pub lambda2: Option<f64>,
}

/// Tests whether the boundary trace of an eigenvector keeps one sign,
/// up to a relative slack for roundoff.
fn trace_one_signed(mesh: &Mesh, v: &DVector<f64>) -> bool {
    let trace: Vec<f64> = mesh.boundary_vertices().iter().map(|&i| v[i]).collect();
    let scale = trace.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return false;
    }
    let sign = trace.iter().sum::<f64>().signum();
    trace.iter().all(|&x| sign * x >= -1e-6 * scale)
}

/// Full dense solve of `K u = λ B_g u` at p = 2.
pub fn dense_oracle_p2(mesh: &Arc<Mesh>, g: &BoundaryFunction) -> Result<SpectrumSlice> {
    let n = mesh.n_vertices();
    if n > SIZE_CAP {
        return Err(Error::Unsupported(format!(
            "dense reference solve capped at {SIZE_CAP} vertices (mesh has {n})"
        )));
    }
    let k = stiffness_dense(mesh);
    let b = boundary_mass_dense(mesh, g);
    let ge = nalgebra_lapack::GeneralizedEigen::try_new(k.clone(), b.clone())
        .ok_or_else(|| Error::Solver("QZ factorization failed".into()))?;
    let raw = ge.raw_eigenvalues();
    let (_, right) = ge.eigenvectors();

    let beta_scale = raw.iter().map(|(_, b)| b.abs()).fold(0.0f64, f64::max);
    let mut finite: Vec<(f64, usize)> = Vec::new();
    for (j, (alpha, beta)) in raw.iter().enumerate() {
        if beta.abs() <= 1e-10 * beta_scale.max(1.0) {
            continue; // infinite eigenvalue from the rank deficiency of B
        }
        let lam = alpha / *beta;
        if lam.im.abs() <= 1e-7 * (1.0 + lam.re.abs()) {
            finite.push((lam.re, j));
        }
    }
    finite.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues: Vec<f64> = finite.iter().map(|(l, _)| *l).collect();

    // Scan positive eigenvalues in ascending order for a one-signed trace.
    let mut lambda1 = None;
    let mut principal_vector = None;
    for &(lam, j) in finite.iter().filter(|(l, _)| *l > 0.0) {
        let col = right.column(j);
        let re = DVector::from_iterator(n, col.iter().map(|c| c.re));
        let im_norm: f64 = col.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
        if im_norm > 1e-8 * re.norm().max(1e-300) {
            continue;
        }
        // Residual guard against spurious QZ pairs.
        let res = (&k * &re - &b * &re * lam).norm();
        let scale = (&k * &re).norm() + lam.abs() * (&b * &re).norm();
        if res > 1e-7 * scale.max(1e-300) {
            continue;
        }
        if trace_one_signed(mesh, &re) {
            lambda1 = Some(lam);
            principal_vector = Some(Field {
                mesh: mesh.clone(),
                coeffs: if re.sum() < 0.0 { -re } else { re },
            });
            break;
        }
    }

    let lambda2 = lambda1.and_then(|l1| {
        eigenvalues
            .iter()
            .find(|&&l| l > l1 * (1.0 + 1e-9) && l > 0.0)
            .copied()
    });

    Ok(SpectrumSlice {
        eigenvalues,
        lambda1,
        principal_vector,
        lambda2,
    })
}

/// A non-principal eigenvector (sign-changing boundary trace) for negative
/// controls in tests: the eigenvector of the smallest positive eigenvalue
/// strictly above `lambda1`.
pub fn second_eigenvector(
    mesh: &Arc<Mesh>,
    g: &BoundaryFunction,
) -> Result<Option<(f64, Field)>> {
    let n = mesh.n_vertices();
    if n > SIZE_CAP {
        return Err(Error::Unsupported("mesh too large for the dense solve".into()));
    }
    let k = stiffness_dense(mesh);
    let b = boundary_mass_dense(mesh, g);
    let slice = dense_oracle_p2(mesh, g)?;
    let (Some(l1), Some(l2)) = (slice.lambda1, slice.lambda2) else {
        return Ok(None);
    };
    let _ = l1;
    // Null vector of (K - l2 B) via SVD.
    let a = &k - &b * l2;
    let svd = a.svd(true, true);
    let vt = svd.v_t.as_ref().expect("requested SVD factors");
    let v = vt.row(vt.nrows() - 1).transpose();
    Ok(Some((
        l2,
        Field {
            mesh: mesh.clone(),
            coeffs: v,
        },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{first_eigenpair, SolverOpts};
    use crate::weights::{WeightKind, WeightSpec};
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;

    fn setup(n: usize) -> (Arc<Mesh>, BoundaryFunction) {
        let mesh = Mesh::box_domain(0.25, n);
        let w = WeightSpec::new(WeightKind::Composite {
            base: Box::new(WeightSpec::new(WeightKind::BoxPower { q: 2.0 })),
            shift: None,
        });
        let g = w.sample_on_boundary(&mesh).unwrap();
        (mesh, g)
    }

    #[test]
    fn positive_constant_weight_has_no_positive_principal_eigenvalue() {
        let mesh = Mesh::box_domain(0.25, 6);
        let g = BoundaryFunction::constant(&mesh, 1.0);
        let slice = dense_oracle_p2(&mesh, &g).unwrap();
        // Zero is in the spectrum (constants), and no positive eigenvalue
        // carries a one-signed trace.
        assert!(slice.eigenvalues.iter().any(|l| l.abs() < 1e-8));
        assert!(slice.lambda1.is_none());
    }

    #[test]
    fn oracle_matches_direct_rayleigh_minimization() {
        let (mesh, g) = setup(6);
        let slice = dense_oracle_p2(&mesh, &g).unwrap();
        let l1 = slice.lambda1.expect("admissible weight has a principal eigenvalue");
        assert!(l1 > 0.0);

        // Second, independent check: crude projected minimization of the
        // dense Rayleigh quotient over the positive cone.
        let k = stiffness_dense(&mesh);
        let b = boundary_mass_dense(&mesh, &g);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let n = mesh.n_vertices();
        let mut best = f64::INFINITY;
        for _ in 0..4 {
            let mut x = DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.0f64..1.0)));
            // push toward the positive cone using the known eigenvector
            if x.dot(&(&b * &x)) <= 0.0 {
                x += slice.principal_vector.as_ref().unwrap().coeffs.clone() * 2.0;
            }
            let mut r = x.dot(&(&k * &x)) / x.dot(&(&b * &x));
            for _ in 0..8000 {
                let bx = &b * &x;
                let kx = &k * &x;
                let gq = x.dot(&bx);
                if gq <= 0.0 {
                    break;
                }
                let grad = (kx - &bx * r) * (2.0 / gq);
                let mut step = 0.5;
                let mut improved = false;
                for _ in 0..40 {
                    let xt = &x - &grad * step;
                    let den = xt.dot(&(&b * &xt));
                    if den > 0.0 {
                        let rt = xt.dot(&(&k * &xt)) / den;
                        if rt < r {
                            x = xt.normalize();
                            r = rt;
                            improved = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            best = best.min(r);
        }
        assert!(
            (best - l1).abs() / l1 < 1e-3,
            "dense minimization {best} vs QZ {l1}"
        );
    }

    #[test]
    fn iterative_solver_agrees_with_oracle() {
        let (mesh, g) = setup(8);
        let slice = dense_oracle_p2(&mesh, &g).unwrap();
        let l1 = slice.lambda1.unwrap();
        let res = first_eigenpair(&mesh, &g, 2.0, &SolverOpts { seeds: 4, ..Default::default() })
            .unwrap();
        assert!(
            (res.lambda1 - l1).abs() / l1 <= 1e-6,
            "iterative {} vs oracle {l1}",
            res.lambda1
        );
    }

    #[test]
    fn oracle_self_convergence_under_refinement() {
        let mut lambdas = Vec::new();
        for n in [6usize, 12, 24] {
            let (mesh, g) = setup(n);
            let slice = dense_oracle_p2(&mesh, &g).unwrap();
            lambdas.push(slice.lambda1.unwrap());
        }
        for w in lambdas.windows(2) {
            assert!(
                (w[1] - w[0]).abs() / w[1].abs() <= 0.01,
                "refinement gaps too large: {lambdas:?}"
            );
        }
    }

    #[test]
    fn second_eigenvector_changes_sign_on_boundary() {
        let (mesh, g) = setup(6);
        let (l2, v) = second_eigenvector(&mesh, &g).unwrap().unwrap();
        assert!(l2 > 0.0);
        assert!(!trace_one_signed(&mesh, &v.coeffs));
    }

    #[test]
    fn size_cap_is_enforced() {
        let mesh = Mesh::box_domain(0.25, 48); // 2401 vertices
        let g = BoundaryFunction::constant(&mesh, -1.0);
        assert!(dense_oracle_p2(&mesh, &g).is_err());
    }
}
