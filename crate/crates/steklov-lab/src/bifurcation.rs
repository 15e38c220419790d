//! Pseudo-arclength continuation of nontrivial solutions of the perturbed
//! boundary-value problem away from the first eigenpair, branch
//! classification heuristics, and a damped-Newton scan certifying the
//! absence of small nontrivial solutions at non-eigenvalue parameters.
//!
//! The augmented system is the weak-form residual together with the
//! arclength constraint `<φ̇₀, φ - φ₀> + λ̇₀ (λ - λ₀) - Δs = 0`; the first
//! point is seeded on the eigenray at a prescribed small norm and corrected
//! with the norm pinned instead of the arclength.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::eigen::EigenResult;
use crate::fem::{
    default_epsilon, grad_int_p_omega, grad_j, residual, residual_dlambda, residual_jacobian,
    w1p_norm, Field, PerturbationSpec,
};
use crate::mesh::{BoundaryFunction, Mesh};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ContinuationConfig {
    /// Initial arclength step.
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_points: usize,
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Continuation stops when λ leaves this window.
    pub lambda_window: (f64, f64),
    /// ... or when the Sobolev norm exceeds this ceiling.
    pub norm_ceiling: f64,
    /// Sign of the seed direction through ±φ₁.
    pub direction: i32,
    /// Norm of the first branch point on the eigenray.
    pub start_norm: f64,
    /// Branch is declared returned-to-trivial below this norm.
    pub return_threshold: f64,
    /// Compare the analytic Jacobian against finite differences on the
    /// first corrector step.
    pub check_jacobian: bool,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            ds: 2e-3,
            ds_min: 1e-8,
            ds_max: 5e-2,
            max_points: 200,
            newton_tol: 1e-9,
            newton_max: 25,
            lambda_window: (0.0, f64::INFINITY),
            norm_ceiling: 1e3,
            direction: 1,
            start_norm: 1e-3,
            return_threshold: 1e-4,
            check_jacobian: true,
        }
    }
}

/// One accepted point of a continuation branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub phi: Field,
    pub w1p_norm: f64,
    pub sup_norm: f64,
    pub arclength: f64,
    pub newton_iters: usize,
    /// Euclidean norm of a freshly assembled residual at the accepted point.
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Termination {
    MaxPoints,
    LambdaWindow,
    NormCeiling,
    ReturnedToTrivial,
    Stalled,
}

#[derive(Debug)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
}

/// Heuristic labels for the continuation outcome; the global alternative is
/// a topological statement and is not re-established numerically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BranchClass {
    UnboundedExit,
    ReturnsToTrivial { lambda_end: f64 },
    MaxPoints,
    Stalled,
}

pub fn classify_branch(branch: &Branch) -> BranchClass {
    match branch.termination {
        Termination::NormCeiling | Termination::LambdaWindow => BranchClass::UnboundedExit,
        Termination::ReturnedToTrivial => BranchClass::ReturnsToTrivial {
            lambda_end: branch.points.last().map(|p| p.lambda).unwrap_or(f64::NAN),
        },
        Termination::MaxPoints => BranchClass::MaxPoints,
        Termination::Stalled => BranchClass::Stalled,
    }
}

struct Problem<'a> {
    mesh: &'a Arc<Mesh>,
    g: &'a BoundaryFunction,
    spec: &'a PerturbationSpec,
    p: f64,
    eps: f64,
    kernel_floor: f64,
}

impl Problem<'_> {
    fn field(&self, coeffs: &DVector<f64>) -> Field {
        Field {
            mesh: self.mesh.clone(),
            coeffs: coeffs.clone(),
        }
    }

    fn residual(&self, lambda: f64, coeffs: &DVector<f64>) -> DVector<f64> {
        residual(lambda, &self.field(coeffs), self.g, Some(self.spec), self.p, self.eps)
    }

    fn jacobian(&self, lambda: f64, coeffs: &DVector<f64>) -> DMatrix<f64> {
        residual_jacobian(
            lambda,
            &self.field(coeffs),
            self.g,
            Some(self.spec),
            self.p,
            self.eps,
            self.kernel_floor,
        )
    }

    fn dlambda(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        residual_dlambda(&self.field(coeffs), self.g, Some(self.spec), self.p)
    }
}

/// Solves the bordered linear system [[J, c], [rowᵀ, d]] x = rhs with LU,
/// escalating a diagonal ridge when the factorization is singular.
fn solve_bordered(
    jac: &DMatrix<f64>,
    col: &DVector<f64>,
    row: &DVector<f64>,
    diag: f64,
    rhs: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = jac.nrows();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(jac);
    for i in 0..n {
        a[(i, n)] = col[i];
        a[(n, i)] = row[i];
    }
    a[(n, n)] = diag;
    let scale = a.amax();
    let mut ridge = 0.0;
    for attempt in 0..5 {
        let mut m = a.clone();
        if ridge > 0.0 {
            for i in 0..=n {
                m[(i, i)] += ridge;
            }
        }
        if let Some(sol) = m.lu().solve(rhs) {
            if sol.iter().all(|x| x.is_finite()) {
                return Ok(sol);
            }
        }
        ridge = if attempt == 0 { 1e-12 * scale } else { ridge * 100.0 };
    }
    Err(Error::Solver(
        "bordered Jacobian singular beyond ridge regularization".into(),
    ))
}

/// Newton correction of the augmented system. `constraint` evaluates the
/// scalar constraint and its gradient row (plus the λ-entry of that row).
fn newton_correct(
    prob: &Problem,
    coeffs: &mut DVector<f64>,
    lambda: &mut f64,
    constraint: &dyn Fn(&DVector<f64>, f64) -> (f64, DVector<f64>, f64),
    tol: f64,
    max_iter: usize,
    fd_check: bool,
) -> Result<usize> {
    let n = coeffs.len();
    for it in 0..max_iter {
        let r = prob.residual(*lambda, coeffs);
        let (cval, _, _) = constraint(coeffs, *lambda);
        if r.norm() <= tol && cval.abs() <= tol * (1.0 + coeffs.norm()) {
            return Ok(it);
        }
        let jac = prob.jacobian(*lambda, coeffs);
        if fd_check && it == 0 {
            verify_jacobian(prob, coeffs, *lambda, &jac)?;
        }
        let col = prob.dlambda(coeffs);
        let (cval, crow, cdiag) = constraint(coeffs, *lambda);
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i] = -r[i];
        }
        rhs[n] = -cval;
        let delta = solve_bordered(&jac, &col, &crow, cdiag, &rhs)?;
        for i in 0..n {
            coeffs[i] += delta[i];
        }
        *lambda += delta[n];
    }
    let r = prob.residual(*lambda, coeffs);
    if r.norm() <= tol {
        Ok(max_iter)
    } else {
        Err(Error::Solver(format!(
            "corrector did not converge: residual {:.3e} after {max_iter} iterations",
            r.norm()
        )))
    }
}

/// Relative Frobenius comparison of the assembled Jacobian against a
/// finite-difference Jacobian of the residual; run once at branch start to
/// catch assembly regressions.
fn verify_jacobian(
    prob: &Problem,
    coeffs: &DVector<f64>,
    lambda: f64,
    jac: &DMatrix<f64>,
) -> Result<()> {
    let n = coeffs.len();
    let step = 1e-6 * (1.0 + coeffs.norm());
    let mut fd = DMatrix::zeros(n, n);
    let mut work = coeffs.clone();
    for j in 0..n {
        let orig = work[j];
        work[j] = orig + step;
        let up = prob.residual(lambda, &work);
        work[j] = orig - step;
        let dn = prob.residual(lambda, &work);
        work[j] = orig;
        fd.set_column(j, &((up - dn) / (2.0 * step)));
    }
    let diff = (jac - &fd).norm() / fd.norm().max(1e-300);
    if diff > 1e-4 {
        return Err(Error::Solver(format!(
            "analytic Jacobian deviates from finite differences by {diff:.3e} (> 1e-4)"
        )));
    }
    Ok(())
}

/// Traces the branch of nontrivial solutions leaving the first eigenpair.
pub fn branch_from_first(
    mesh: &Arc<Mesh>,
    g: &BoundaryFunction,
    spec: &PerturbationSpec,
    p: f64,
    res: &EigenResult,
    cfg: &ContinuationConfig,
) -> Result<Branch> {
    if cfg.direction != 1 && cfg.direction != -1 {
        return Err(Error::Usage("direction must be +1 or -1".into()));
    }
    let lambda_hat = res.lambda1;
    let lambda_window = if cfg.lambda_window.1.is_finite() {
        cfg.lambda_window
    } else {
        (0.0, 3.0 * lambda_hat)
    };

    // Seed on the eigenray at the prescribed norm.
    let phi1_norm = w1p_norm(&res.phi1, p);
    let t0 = cfg.start_norm / phi1_norm;
    let mut coeffs = &res.phi1.coeffs * (t0 * cfg.direction as f64);
    let mut lambda = lambda_hat;

    let seed_field = Field {
        mesh: mesh.clone(),
        coeffs: coeffs.clone(),
    };
    let eps = if p == 2.0 { 0.0 } else { default_epsilon(&seed_field, p) };
    let kernel_floor = 1e-8 * res.phi1.sup_norm() * t0;
    let prob = Problem {
        mesh,
        g,
        spec,
        p,
        eps,
        kernel_floor,
    };

    // First corrector: pin the norm, free λ.
    let target = cfg.start_norm.powf(p);
    let norm_constraint = |c: &DVector<f64>, _l: f64| {
        let f = Field {
            mesh: mesh.clone(),
            coeffs: c.clone(),
        };
        let val = w1p_norm(&f, p).powf(p) - target;
        let grad = grad_j(&f, p, eps) + grad_int_p_omega(&f, p);
        (val, grad, 0.0)
    };
    let iters0 = newton_correct(
        &prob,
        &mut coeffs,
        &mut lambda,
        &norm_constraint,
        cfg.newton_tol,
        cfg.newton_max,
        cfg.check_jacobian,
    )
    .map_err(|e| Error::Solver(format!("bifurcation seed invalid: {e}")))?;

    let mut points = Vec::with_capacity(cfg.max_points);
    let mut arclength = 0.0;
    let push_point = |points: &mut Vec<BranchPoint>,
                      prob: &Problem,
                      coeffs: &DVector<f64>,
                      lambda: f64,
                      arclength: f64,
                      iters: usize| {
        let phi = prob.field(coeffs);
        let rnorm = prob.residual(lambda, coeffs).norm();
        points.push(BranchPoint {
            lambda,
            w1p_norm: w1p_norm(&phi, prob.p),
            sup_norm: phi.sup_norm(),
            phi,
            arclength,
            newton_iters: iters,
            residual_norm: rnorm,
        });
    };
    push_point(&mut points, &prob, &coeffs, lambda, arclength, iters0);

    // Initial tangent along the eigenray toward growing norm.
    let mut tangent_phi = &res.phi1.coeffs * (cfg.direction as f64 / res.phi1.coeffs.norm());
    let mut tangent_lambda = 0.0;
    let mut ds = cfg.ds;

    let termination = loop {
        if points.len() >= cfg.max_points {
            break Termination::MaxPoints;
        }
        // Predictor.
        let mut trial = &coeffs + &tangent_phi * ds;
        let mut trial_lambda = lambda + tangent_lambda * ds;
        let base = coeffs.clone();
        let base_lambda = lambda;
        let arc_constraint = |c: &DVector<f64>, l: f64| {
            let val = tangent_phi.dot(&(c - &base)) + tangent_lambda * (l - base_lambda) - ds;
            (val, tangent_phi.clone(), tangent_lambda)
        };
        match newton_correct(
            &prob,
            &mut trial,
            &mut trial_lambda,
            &arc_constraint,
            cfg.newton_tol,
            cfg.newton_max,
            false,
        ) {
            Ok(iters) => {
                arclength += ds;
                coeffs = trial;
                lambda = trial_lambda;
                push_point(&mut points, &prob, &coeffs, lambda, arclength, iters);

                let last = points.last().unwrap();
                if last.w1p_norm < cfg.return_threshold {
                    break Termination::ReturnedToTrivial;
                }
                if last.w1p_norm > cfg.norm_ceiling {
                    break Termination::NormCeiling;
                }
                if lambda < lambda_window.0 || lambda > lambda_window.1 {
                    break Termination::LambdaWindow;
                }

                // New tangent from the bordered system, oriented along the
                // previous one.
                let jac = prob.jacobian(lambda, &coeffs);
                let col = prob.dlambda(&coeffs);
                let mut rhs = DVector::zeros(coeffs.len() + 1);
                rhs[coeffs.len()] = 1.0;
                if let Ok(t) = solve_bordered(&jac, &col, &tangent_phi, tangent_lambda, &rhs) {
                    let tl = t[coeffs.len()];
                    let tp = t.rows(0, coeffs.len()).into_owned();
                    let norm = (tp.norm_squared() + tl * tl).sqrt();
                    if norm > 0.0 {
                        let orient = tp.dot(&tangent_phi) + tl * tangent_lambda;
                        let sign = if orient < 0.0 { -1.0 } else { 1.0 };
                        tangent_phi = tp * (sign / norm);
                        tangent_lambda = tl * sign / norm;
                    }
                }

                if iters <= 4 {
                    ds = (ds * 1.4).min(cfg.ds_max);
                } else if iters + 2 >= cfg.newton_max {
                    ds *= 0.7;
                }
            }
            Err(_) => {
                ds *= 0.5;
                if ds < cfg.ds_min {
                    break Termination::Stalled;
                }
            }
        }
    };

    Ok(Branch { points, termination })
}

/// Extrapolates the small-norm end of a branch to zero norm with a secant
/// through the two smallest-norm points; the bifurcation parameter of the
/// branch in the limit.
pub fn extrapolate_to_zero_norm(points: &[BranchPoint]) -> Option<f64> {
    let mut sorted: Vec<&BranchPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.w1p_norm.total_cmp(&b.w1p_norm));
    if sorted.len() < 2 {
        return sorted.first().map(|p| p.lambda);
    }
    let (a, b) = (sorted[0], sorted[1]);
    if (b.w1p_norm - a.w1p_norm).abs() < 1e-300 {
        return Some(a.lambda);
    }
    Some(a.lambda - a.w1p_norm * (b.lambda - a.lambda) / (b.w1p_norm - a.w1p_norm))
}

/// Per-seed outcome of the no-bifurcation scan.
#[derive(Debug, Clone, Serialize)]
pub enum SeedOutcome {
    /// Newton converged to the trivial solution.
    Trivial,
    /// Newton converged to a nontrivial solution of the given norm.
    Nontrivial { w1p_norm: f64, lambda_residual: f64 },
    /// Newton stopped without converging.
    Stalled { w1p_norm: f64, residual: f64 },
}

#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub lambda: f64,
    pub rho: f64,
    pub outcomes: Vec<SeedOutcome>,
    /// Seeds that converged to a nontrivial solution with norm at most rho.
    pub nontrivial_small: usize,
    /// Stalled or converged-nontrivial seeds whose final iterate aligns
    /// with the supplied kernel direction (when given).
    pub near_kernel: usize,
}

/// Damped Newton on the residual at fixed λ from random seeds of norm ρ.
/// At a non-eigenvalue every seed should fall back to the trivial solution
/// or leave the ball; near an eigenvalue, iterates slide along the kernel
/// ray.
pub fn no_bifurcation_scan(
    mesh: &Arc<Mesh>,
    g: &BoundaryFunction,
    spec: &PerturbationSpec,
    p: f64,
    lambda: f64,
    rho: f64,
    n_seeds: usize,
    rng_seed: u64,
    kernel: Option<&DVector<f64>>,
) -> ScanReport {
    let n = mesh.n_vertices();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(rng_seed);
    let seeds: Vec<DVector<f64>> = (0..n_seeds)
        .map(|_| {
            let raw = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut rng)));
            let f = Field {
                mesh: mesh.clone(),
                coeffs: raw.clone(),
            };
            raw * (rho / w1p_norm(&f, p))
        })
        .collect();

    let eps_probe = Field {
        mesh: mesh.clone(),
        coeffs: seeds[0].clone(),
    };
    let eps = if p == 2.0 { 0.0 } else { default_epsilon(&eps_probe, p) };
    let prob = Problem {
        mesh,
        g,
        spec,
        p,
        eps,
        kernel_floor: 1e-10 * rho,
    };
    let tol = 1e-9 * (1.0 + lambda.abs());

    let runs: Vec<(SeedOutcome, DVector<f64>)> = seeds
        .into_par_iter()
        .map(|mut x| {
            let mut r = prob.residual(lambda, &x);
            for _ in 0..50 {
                let norm_now = w1p_norm(&prob.field(&x), p);
                if norm_now < 1e-6 || r.norm() <= tol {
                    break;
                }
                let jac = prob.jacobian(lambda, &x);
                let Some(delta) = jac.lu().solve(&(-&r)) else {
                    break;
                };
                if !delta.iter().all(|v| v.is_finite()) {
                    break;
                }
                // Backtracking on the residual norm.
                let mut step = 1.0;
                let mut advanced = false;
                for _ in 0..30 {
                    let xt = &x + &delta * step;
                    let rt = prob.residual(lambda, &xt);
                    if rt.norm() <= (1.0 - 1e-4 * step) * r.norm() {
                        x = xt;
                        r = rt;
                        advanced = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !advanced {
                    break;
                }
            }
            let norm_now = w1p_norm(&prob.field(&x), p);
            let outcome = if norm_now < 1e-6 {
                SeedOutcome::Trivial
            } else if r.norm() <= tol {
                SeedOutcome::Nontrivial {
                    w1p_norm: norm_now,
                    lambda_residual: r.norm(),
                }
            } else {
                SeedOutcome::Stalled {
                    w1p_norm: norm_now,
                    residual: r.norm(),
                }
            };
            (outcome, x)
        })
        .collect();

    let near_kernel = kernel
        .map(|kern| {
            runs.iter()
                .filter(|(o, x)| {
                    !matches!(o, SeedOutcome::Trivial)
                        && x.dot(kern).abs() / (x.norm() * kern.norm()).max(1e-300) >= 0.9
                })
                .count()
        })
        .unwrap_or(0);
    let outcomes: Vec<SeedOutcome> = runs.into_iter().map(|(o, _)| o).collect();

    let nontrivial_small = outcomes
        .iter()
        .filter(|o| matches!(o, SeedOutcome::Nontrivial { w1p_norm, .. } if *w1p_norm <= rho))
        .count();

    ScanReport {
        lambda,
        rho,
        outcomes,
        nontrivial_small,
        near_kernel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{first_eigenpair, SolverOpts};
    use crate::weights::{positive_support_indicator, WeightKind, WeightSpec};
    use std::sync::OnceLock;

    struct Setup {
        mesh: Arc<Mesh>,
        g: BoundaryFunction,
        res: EigenResult,
    }

    fn setup() -> &'static Setup {
        static CELL: OnceLock<Setup> = OnceLock::new();
        CELL.get_or_init(|| {
            let mesh = Mesh::box_domain(0.25, 8);
            let w = WeightSpec::new(WeightKind::Composite {
                base: Box::new(WeightSpec::new(WeightKind::BoxPower { q: 2.0 })),
                shift: None,
            });
            let g = w.sample_on_boundary(&mesh).unwrap();
            let res = first_eigenpair(
                &mesh,
                &g,
                2.0,
                &SolverOpts {
                    seeds: 4,
                    ..Default::default()
                },
            )
            .unwrap();
            Setup { mesh, g, res }
        })
    }

    fn spec_for(s: &Setup, gamma: f64, p: f64) -> PerturbationSpec {
        PerturbationSpec::new(gamma, p, positive_support_indicator(&s.g)).unwrap()
    }

    #[test]
    fn branch_leaves_the_eigenpair_and_satisfies_the_weak_form() {
        let s = setup();
        let spec = spec_for(s, 3.0, 2.0);
        let cfg = ContinuationConfig {
            max_points: 25,
            ..Default::default()
        };
        let branch = branch_from_first(&s.mesh, &s.g, &spec, 2.0, &s.res, &cfg).unwrap();
        assert!(branch.points.len() >= 10);
        for pt in &branch.points {
            assert!(pt.residual_norm <= 10.0 * cfg.newton_tol);
            assert!(pt.w1p_norm > 0.0);
        }
        // Norm grows along the branch from the seed.
        assert!(branch.points.last().unwrap().w1p_norm > branch.points[0].w1p_norm);
        // Perturbation bends λ away from the eigenvalue.
        let ext = extrapolate_to_zero_norm(&branch.points).unwrap();
        assert!((ext - s.res.lambda1).abs() / s.res.lambda1 < 0.01);
    }

    #[test]
    fn homogeneous_problem_has_vertical_branch() {
        let s = setup();
        let zero_f = BoundaryFunction::constant(&s.mesh, 0.0);
        let spec = PerturbationSpec::new(3.0, 2.0, zero_f).unwrap();
        let cfg = ContinuationConfig {
            max_points: 15,
            ..Default::default()
        };
        let branch = branch_from_first(&s.mesh, &s.g, &spec, 2.0, &s.res, &cfg).unwrap();
        for pt in &branch.points {
            assert!(
                (pt.lambda - s.res.lambda1).abs() <= 1e-6 * s.res.lambda1,
                "λ drifted to {} on the homogeneous ray",
                pt.lambda
            );
        }
        assert_eq!(classify_branch(&branch), BranchClass::MaxPoints);
    }

    #[test]
    fn mirror_branch_is_the_pointwise_negation() {
        let s = setup();
        let spec = spec_for(s, 3.0, 2.0);
        let mk = |direction: i32| {
            let cfg = ContinuationConfig {
                max_points: 12,
                direction,
                check_jacobian: false,
                ..Default::default()
            };
            branch_from_first(&s.mesh, &s.g, &spec, 2.0, &s.res, &cfg).unwrap()
        };
        let plus = mk(1);
        let minus = mk(-1);
        assert_eq!(plus.points.len(), minus.points.len());
        for (a, b) in plus.points.iter().zip(&minus.points).take(10) {
            assert!((a.lambda - b.lambda).abs() <= 1e-8 * (1.0 + a.lambda.abs()));
            let diff = (&a.phi.coeffs + &b.phi.coeffs).norm();
            assert!(diff <= 1e-8 * (1.0 + a.phi.coeffs.norm()));
        }
    }

    #[test]
    fn classification_thresholds() {
        let s = setup();
        let spec = spec_for(s, 3.0, 2.0);
        // A tiny norm ceiling forces the unbounded-exit label.
        let cfg = ContinuationConfig {
            max_points: 50,
            norm_ceiling: 5e-3,
            check_jacobian: false,
            ..Default::default()
        };
        let branch = branch_from_first(&s.mesh, &s.g, &spec, 2.0, &s.res, &cfg).unwrap();
        assert_eq!(classify_branch(&branch), BranchClass::UnboundedExit);
        // Synthetic branch with a terminal norm below the threshold.
        let mut synthetic = Branch {
            points: branch.points.clone(),
            termination: Termination::ReturnedToTrivial,
        };
        synthetic.points.last_mut().unwrap().w1p_norm = 5e-5;
        match classify_branch(&synthetic) {
            BranchClass::ReturnsToTrivial { lambda_end } => {
                assert!(lambda_end.is_finite());
            }
            other => panic!("expected returns-to-trivial, got {other:?}"),
        }
    }

    #[test]
    fn scan_finds_no_small_solutions_at_half_the_eigenvalue() {
        let s = setup();
        let spec = spec_for(s, 3.0, 2.0);
        let report = no_bifurcation_scan(
            &s.mesh,
            &s.g,
            &spec,
            2.0,
            0.5 * s.res.lambda1,
            1e-2,
            10,
            3,
            None,
        );
        assert_eq!(report.nontrivial_small, 0);
    }

    #[test]
    fn scan_at_the_eigenvalue_slides_along_the_kernel() {
        let s = setup();
        let spec = spec_for(s, 3.0, 2.0);
        let report = no_bifurcation_scan(
            &s.mesh,
            &s.g,
            &spec,
            2.0,
            s.res.lambda1,
            1e-2,
            10,
            3,
            Some(&s.res.phi1.coeffs),
        );
        assert!(
            report.near_kernel > 0,
            "expected near-kernel limits at the eigenvalue; outcomes {:?}",
            report.outcomes
        );
    }
}
