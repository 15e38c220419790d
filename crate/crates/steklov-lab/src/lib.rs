//! Numerical laboratory for the Steklov eigenvalue problem of the p-Laplacian
//! with singular, sign-indefinite boundary weights.
//!
//! The crate computes the positive principal eigenvalue
//!
//! ```text
//! lambda_1 = inf { ∫_Ω |∇φ|^p : φ ∈ W^{1,p}(Ω), ∫_{∂Ω} g |φ|^p = 1 }
//! ```
//!
//! on planar polygonal domains, traces the branch of nontrivial solutions of
//! the perturbed boundary condition bifurcating from `(lambda_1, 0)`, and
//! ships the full boundary-rearrangement calculus (distribution function,
//! decreasing rearrangement, maximal function, Lorentz-Zygmund quasi-norms)
//! used to certify that a weight is admissible.
//!
//! Modules follow the pipeline: [`mesh`] ingests or generates planar
//! triangulations, [`rearrangement`] and [`lorentz`] provide the
//! symmetrization calculus, [`weights`] holds the catalog of closed-form
//! singular weights and the admissibility checker, [`fem`] realizes the
//! energy functionals with P1 elements, [`eigen`] and [`oracle`] solve the
//! eigenvalue problem (iteratively, and densely at p = 2), and
//! [`bifurcation`] does pseudo-arclength continuation.

pub mod bifurcation;
pub mod cli;
pub mod eigen;
mod error;
pub mod fem;
pub mod io;
pub mod lorentz;
pub mod mesh;
pub mod oracle;
pub mod quad;
pub mod rearrangement;
pub mod weights;

pub use error::{Error, Result};
