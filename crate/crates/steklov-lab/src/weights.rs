//! Catalog of closed-form singular boundary weights, exact edge-average
//! sampling onto mesh boundaries, and the admissibility checker for the
//! eigenvalue problem.
//!
//! Three singular families live on two reference domains: an
//! inverse-square-root weight on the unit circle, and a power-law family
//! (optionally damped by a log factor) supported on the bottom side of the
//! box `(-R, R) x (0, 2R)`. Sign-indefinite weights are built as
//! `base - shift` with the shift either given or chosen so the total
//! boundary integral is strictly negative.

use crate::lorentz::{
    membership_f, membership_g, AnalyticKind, AnalyticProfile, LimitProbe, MembershipReport,
    Profile, Verdict,
};
use crate::mesh::{BoundaryFunction, DomainTag, Mesh};
use crate::quad;
use crate::{Error, Result};
use serde::Serialize;

const DEFAULT_HALF_WIDTH: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `|y|^{-1/2}` on the unit circle.
    CircleInvSqrt,
    /// `|x log|x||^{-(p-1)/(N-1)}` on the bottom side of the box, 0 on the
    /// rest of the boundary.
    BoxLogPower { p: f64 },
    /// `|x|^{-1/q}` on the bottom side, 0 elsewhere.
    BoxPower { q: f64 },
    /// `|x|^{-(p-1)/(N-1)}` on the bottom side: the power-law companion that
    /// dominates the log-power weight pointwise for R <= 1/e.
    BoxPowerMajorant { p: f64 },
    Constant { c: f64 },
    /// `base - shift`; `shift = None` picks the shift so the total integral
    /// equals minus half the integral of the base.
    Composite {
        base: Box<WeightSpec>,
        shift: Option<f64>,
    },
}

/// A weight from the catalog, with the dimension parameter of its closed
/// forms and the box half-width it binds to. Meshes are planar, so sampling
/// requires `n_dim = 2`; the closed-form rearrangements are valid for any
/// `n_dim >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub n_dim: u32,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// 1 < p < 2, membership is tested in the weak-Lebesgue closure class.
    BelowDimension,
    /// p = 2, membership is tested in the log-refined class.
    AtDimension,
}

/// The three hypotheses behind a positive principal eigenvalue, checked
/// separately and combined.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub gplus_nontrivial: bool,
    pub integral_g: f64,
    pub membership: MembershipReport,
    pub regime: Regime,
    pub admissible: bool,
}

impl WeightSpec {
    pub fn new(kind: WeightKind) -> Self {
        WeightSpec {
            kind,
            n_dim: 2,
            half_width: DEFAULT_HALF_WIDTH,
        }
    }

    pub fn with_half_width(mut self, r: f64) -> Self {
        self.half_width = r;
        if let WeightKind::Composite { base, .. } = &mut self.kind {
            base.half_width = r;
        }
        self
    }

    /// Parses a catalog name: `g1-circle`, `g2-box`, `g3-box:q=<q>`,
    /// `const:<c>`, `composite:<base>-<c|auto>`, `h2-box` (the power-law
    /// companion of `g2-box`). The exponent of `g2-box`/`h2-box` comes from
    /// the surrounding run's p.
    pub fn parse(name: &str, p_context: f64) -> Result<WeightSpec> {
        let spec = |kind| Ok(WeightSpec::new(kind));
        if name == "g1-circle" {
            return spec(WeightKind::CircleInvSqrt);
        }
        if name == "g2-box" {
            return spec(WeightKind::BoxLogPower { p: p_context });
        }
        if name == "h2-box" {
            return spec(WeightKind::BoxPowerMajorant { p: p_context });
        }
        if let Some(rest) = name.strip_prefix("g3-box:q=") {
            let q: f64 = rest
                .parse()
                .map_err(|e| Error::Usage(format!("bad q in '{name}': {e}")))?;
            if !(q > 1.0) {
                return Err(Error::Usage("g3-box needs q > 1".into()));
            }
            return spec(WeightKind::BoxPower { q });
        }
        if let Some(rest) = name.strip_prefix("const:") {
            let c: f64 = rest
                .parse()
                .map_err(|e| Error::Usage(format!("bad constant in '{name}': {e}")))?;
            return spec(WeightKind::Constant { c });
        }
        if let Some(rest) = name.strip_prefix("composite:") {
            let (base_name, shift_str) = rest
                .rsplit_once('-')
                .ok_or_else(|| Error::Usage(format!("composite needs '<base>-<c|auto>': {name}")))?;
            let base = WeightSpec::parse(base_name, p_context)?;
            let shift = if shift_str == "auto" {
                None
            } else {
                Some(shift_str.parse().map_err(|e| {
                    Error::Usage(format!("bad shift in '{name}': {e}"))
                })?)
            };
            return spec(WeightKind::Composite {
                base: Box::new(base),
                shift,
            });
        }
        Err(Error::Usage(format!("unknown weight '{name}'")))
    }

    /// The built-in domain this weight binds to.
    pub fn domain(&self) -> DomainTag {
        match &self.kind {
            WeightKind::CircleInvSqrt => DomainTag::Disk,
            WeightKind::Composite { base, .. } => base.domain(),
            // Constants have no intrinsic domain; default them to the box so
            // indefinite box composites and plain constants agree.
            _ => DomainTag::BoxDomain {
                half_width: self.half_width,
            },
        }
    }

    /// Boundary measure of the bound domain (the continuum one, not a mesh
    /// approximation). For general `n_dim` the box boundary has measure
    /// `2 N (2R)^{N-1}`.
    pub fn perimeter(&self) -> f64 {
        match self.domain() {
            DomainTag::Disk => 2.0 * std::f64::consts::PI,
            _ => {
                let n = self.n_dim as f64;
                2.0 * n * (2.0 * self.half_width).powf(n - 1.0)
            }
        }
    }

    /// Measure of the bottom face carrying the box weights: `(2R)^{N-1}`.
    fn face_measure(&self) -> f64 {
        (2.0 * self.half_width).powf(self.n_dim as f64 - 1.0)
    }

    /// `2^{N-1} R^{N-2}`, the constant of the box distribution functions.
    fn box_dist_constant(&self) -> f64 {
        let n = self.n_dim as f64;
        2f64.powf(n - 1.0) * self.half_width.powf(n - 2.0)
    }

    fn power_exponent(&self) -> Option<f64> {
        let n = self.n_dim as f64;
        match &self.kind {
            WeightKind::BoxPower { q } => Some(1.0 / q),
            WeightKind::BoxPowerMajorant { p } | WeightKind::BoxLogPower { p } => {
                Some((p - 1.0) / (n - 1.0))
            }
            _ => None,
        }
    }

    fn is_unbounded(&self) -> bool {
        matches!(
            self.kind,
            WeightKind::CircleInvSqrt
                | WeightKind::BoxLogPower { .. }
                | WeightKind::BoxPower { .. }
                | WeightKind::BoxPowerMajorant { .. }
        )
    }

    /// Closed-form decreasing rearrangement where one exists: the cosec
    /// profile for the circle weight and exact power laws for the box
    /// weights. For the log-power weight the returned profile is the
    /// rearrangement of its power-law companion, which is the closed form
    /// available; the weight's own rearrangement has no elementary
    /// expression. Composite and constant weights are not supported here.
    pub fn analytic_rearrangement(&self) -> Result<Profile> {
        match &self.kind {
            WeightKind::CircleInvSqrt => Ok(Profile::Analytic(AnalyticProfile {
                kind: AnalyticKind::CosecRoot,
                total: 2.0 * std::f64::consts::PI,
            })),
            WeightKind::BoxPower { q } => {
                let exponent = 1.0 / q;
                Ok(self.power_profile(exponent))
            }
            WeightKind::BoxPowerMajorant { p } | WeightKind::BoxLogPower { p } => {
                let exponent = (p - 1.0) / (self.n_dim as f64 - 1.0);
                Ok(self.power_profile(exponent))
            }
            WeightKind::Constant { .. } | WeightKind::Composite { .. } => Err(Error::Unsupported(
                "no closed-form rearrangement for constant or composite weights".into(),
            )),
        }
    }

    fn power_profile(&self, exponent: f64) -> Profile {
        Profile::Analytic(AnalyticProfile {
            kind: AnalyticKind::PowerLaw {
                amp: self.box_dist_constant().powf(exponent),
                exponent,
                support: self.face_measure(),
            },
            total: self.perimeter(),
        })
    }

    /// Resolved subtraction constant of a composite weight: either the
    /// explicit shift or the automatic one that makes the total integral
    /// equal to minus half the base integral.
    pub fn resolved_shift(&self) -> Option<f64> {
        match &self.kind {
            WeightKind::Composite { base, shift } => Some(match shift {
                Some(s) => *s,
                None => 1.5 * base.integral() / base.perimeter(),
            }),
            _ => None,
        }
    }

    /// The exact boundary integral of the weight over its continuum domain
    /// (closed forms for the power laws, adaptive quadrature for the
    /// circle and log-power weights). `n_dim = 2` only.
    pub fn integral(&self) -> f64 {
        assert_eq!(self.n_dim, 2, "boundary integrals are computed for planar domains");
        let r = self.half_width;
        match &self.kind {
            WeightKind::CircleInvSqrt => {
                4.0 * quad::integrate_to_zero(
                    &|th: f64| th.sin().powf(-0.5),
                    std::f64::consts::FRAC_PI_2,
                    1e-14,
                    2000,
                )
            }
            WeightKind::BoxPower { q } => 2.0 * r.powf(1.0 - 1.0 / q) / (1.0 - 1.0 / q),
            WeightKind::BoxPowerMajorant { p } => {
                let s = p - 1.0;
                if s >= 1.0 {
                    f64::INFINITY
                } else {
                    2.0 * r.powf(1.0 - s) / (1.0 - s)
                }
            }
            WeightKind::BoxLogPower { p } => {
                let s = p - 1.0;
                2.0 * quad::integrate_to_zero(
                    &|x: f64| (x * (1.0 / x).ln()).powf(-s),
                    r,
                    1e-14,
                    2000,
                )
            }
            WeightKind::Constant { c } => c * self.perimeter(),
            WeightKind::Composite { base, .. } => {
                base.integral() - self.resolved_shift().unwrap() * self.perimeter()
            }
        }
    }

    /// Edge averages of the weight on the mesh boundary. Power-law
    /// singularities are integrated by their antiderivatives, so the total
    /// boundary integral of the sampled data is exact; the log-power weight
    /// uses adaptive quadrature with geometric refinement toward the
    /// singular point.
    pub fn sample_on_boundary(&self, mesh: &Mesh) -> Result<BoundaryFunction> {
        if self.n_dim != 2 {
            return Err(Error::Unsupported(
                "sampling requires the planar closed forms (n_dim = 2)".into(),
            ));
        }
        match (&self.kind, mesh.domain) {
            (WeightKind::Constant { c }, _) => Ok(BoundaryFunction::constant(mesh, *c)),
            (WeightKind::Composite { base, .. }, _) => {
                let shift = self.resolved_shift().unwrap();
                let mut f = base.sample_on_boundary(mesh)?;
                for v in &mut f.values {
                    *v -= shift;
                }
                Ok(f)
            }
            (WeightKind::CircleInvSqrt, DomainTag::Disk) => self.sample_circle(mesh),
            (_, DomainTag::BoxDomain { half_width })
                if (half_width - self.half_width).abs() <= 1e-12 * self.half_width =>
            {
                self.sample_box(mesh)
            }
            (_, domain) => Err(Error::MeshMismatch(format!(
                "weight bound to {} cannot be sampled on a {domain} mesh",
                self.domain()
            ))),
        }
    }

    fn sample_circle(&self, mesh: &Mesh) -> Result<BoundaryFunction> {
        let mut values = Vec::with_capacity(mesh.n_boundary_edges());
        for (e, &len) in mesh.boundary_edges.iter().zip(&mesh.edge_lengths) {
            let ya = mesh.vertices[e[0]][1];
            let yb = mesh.vertices[e[1]][1];
            let dy = yb - ya;
            let avg = if dy.abs() <= 1e-14 {
                let y = 0.5 * (ya + yb);
                if y.abs() <= 1e-14 {
                    return Err(Error::NonIntegrable(
                        "edge lies on the singular line y = 0".into(),
                    ));
                }
                y.abs().powf(-0.5)
            } else {
                // Average of |y|^{-1/2} with y linear along the edge.
                let anti = |y: f64| 2.0 * y.signum() * y.abs().sqrt();
                (anti(yb) - anti(ya)) / dy
            };
            debug_assert!(len > 0.0);
            values.push(avg);
        }
        BoundaryFunction::on_mesh(mesh, values)
    }

    fn sample_box(&self, mesh: &Mesh) -> Result<BoundaryFunction> {
        let s = self
            .power_exponent()
            .expect("box sampling only reached for the box kinds");
        let log_damped = matches!(self.kind, WeightKind::BoxLogPower { .. });
        if log_damped && self.half_width >= 1.0 {
            return Err(Error::NonIntegrable(
                "log-power weight needs half-width below 1".into(),
            ));
        }
        let ytol = 1e-12 * self.half_width;
        let mut values = Vec::with_capacity(mesh.n_boundary_edges());
        for e in &mesh.boundary_edges {
            let [xa, ya] = mesh.vertices[e[0]];
            let [xb, yb] = mesh.vertices[e[1]];
            if ya.abs() > ytol || yb.abs() > ytol {
                values.push(0.0);
                continue;
            }
            let touches_origin = xa.abs() <= ytol || xb.abs() <= ytol || xa * xb < 0.0;
            if s >= 1.0 && touches_origin {
                return Err(Error::NonIntegrable(format!(
                    "exponent {s} >= 1 on an edge touching the singular point"
                )));
            }
            let avg = if log_damped {
                edge_average_log_power(xa, xb, s)
            } else {
                edge_average_power(xa, xb, s)
            };
            values.push(avg);
        }
        BoundaryFunction::on_mesh(mesh, values)
    }
}

/// Average of |x|^{-s} over [xa, xb] (in either order) via the signed
/// antiderivative; exact through a sign change.
fn edge_average_power(xa: f64, xb: f64, s: f64) -> f64 {
    let anti = |x: f64| {
        if s == 1.0 {
            x.signum() * x.abs().ln()
        } else {
            x.signum() * x.abs().powf(1.0 - s) / (1.0 - s)
        }
    };
    (anti(xb) - anti(xa)) / (xb - xa)
}

/// Average of |x log|x||^{-s} over [xa, xb], splitting at a sign change and
/// refining geometrically into the singular endpoint.
fn edge_average_log_power(xa: f64, xb: f64, s: f64) -> f64 {
    let w = |x: f64| {
        let ax = x.abs();
        (ax * (1.0 / ax).ln()).powf(-s)
    };
    let piece = |hi: f64| -> f64 {
        // integral over (0, hi] of the even integrand
        quad::integrate_to_zero(&w, hi, 1e-12, 400)
    };
    let (lo, hi) = if xa <= xb { (xa, xb) } else { (xb, xa) };
    let integral = if lo >= 0.0 {
        piece(hi) - if lo > 0.0 { piece(lo) } else { 0.0 }
    } else if hi <= 0.0 {
        piece(-lo) - if hi < 0.0 { piece(-hi) } else { 0.0 }
    } else {
        piece(-lo) + piece(hi)
    };
    integral / (hi - lo)
}

/// Finiteness certificate for the log-power weight: the weighted power
/// integral `2^{N-1} R^{N-2} ∫_0^R t^{-1} (log 1/t)^{-N/(N-1)} dt`, whose
/// substitution `u = log(1/t)` gives the closed value
/// `2^{N-1} R^{N-2} (N-1) (log 1/R)^{-1/(N-1)}`. Returns the numeric value
/// (quadrature plus exact tail) and the closed form.
pub fn log_power_certificate(n_dim: u32, half_width: f64) -> (f64, f64) {
    let n = n_dim as f64;
    let c = 2f64.powf(n - 1.0) * half_width.powf(n - 2.0);
    let u0 = (1.0 / half_width).ln();
    let expo = n / (n - 1.0);
    let u1 = u0 * 1e6;
    let numeric = quad::adaptive(&|u: f64| u.powf(-expo), u0, u1, 1e-13)
        + (n - 1.0) * u1.powf(-1.0 / (n - 1.0));
    let closed = (n - 1.0) * u0.powf(-1.0 / (n - 1.0));
    (c * numeric, c * closed)
}

fn certified_member(class: String, note_value: f64) -> MembershipReport {
    MembershipReport {
        class,
        verdict: Verdict::Member,
        limit_at_zero: LimitProbe::Value(note_value),
        limit_at_total: None,
        samples: Vec::new(),
        tol_zero_fraction: 0.0,
        stabilization_factor: 0.0,
        window: 0,
    }
}

fn inconclusive(class: String) -> MembershipReport {
    MembershipReport {
        class,
        verdict: Verdict::Inconclusive,
        limit_at_zero: LimitProbe::Value(f64::NAN),
        limit_at_total: None,
        samples: Vec::new(),
        tol_zero_fraction: 0.0,
        stabilization_factor: 0.0,
        window: 0,
    }
}

/// Membership of the weight in the admissible class of the given regime.
///
/// The membership classes are linear spaces that contain every smooth
/// function, so a composite `base - shift` belongs to a class exactly when
/// its singular base does; the verdict is therefore computed on the base.
/// Constants are smooth and certified members directly. The log-power
/// weight is certified through the finiteness of its weighted power
/// integral rather than a limit scan, since its own rearrangement has no
/// closed form.
pub fn class_membership(w: &WeightSpec, p: f64) -> Result<MembershipReport> {
    let regime_is_f = p < 2.0;
    let n = w.n_dim as f64;
    let d = if regime_is_f { (n - 1.0) / (p - 1.0) } else { 1.0 };
    match &w.kind {
        WeightKind::Composite { base, .. } => class_membership(base, p),
        WeightKind::Constant { .. } => Ok(certified_member(
            if regime_is_f {
                format!("F[{d}] (smooth)")
            } else {
                format!("G[{d}] (smooth)")
            },
            0.0,
        )),
        WeightKind::BoxLogPower { .. } => {
            if regime_is_f {
                let (numeric, closed) = log_power_certificate(w.n_dim, w.half_width);
                if numeric.is_finite() && (numeric - closed).abs() <= 1e-8 * closed.abs() {
                    Ok(certified_member(
                        format!("F[{d}] (weighted-integral certificate)"),
                        numeric,
                    ))
                } else {
                    Ok(inconclusive(format!("F[{d}]")))
                }
            } else {
                Ok(inconclusive(format!("G[{d}] (no closed-form profile)")))
            }
        }
        _ => {
            let profile = w.analytic_rearrangement()?;
            if regime_is_f {
                membership_f(&profile, d)
            } else {
                membership_g(&profile, d, n)
            }
        }
    }
}

/// Checks the three hypotheses for a positive principal eigenvalue:
/// a nontrivial positive part, a strictly negative total integral, and
/// membership in the regime's weight class. Restricted to 1 < p <= 2 on
/// planar domains.
pub fn admissibility(w: &WeightSpec, p: f64) -> Result<AdmissibilityReport> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Unsupported(format!(
            "p = {p} outside the supported range (1, 2]"
        )));
    }
    let regime = if p < 2.0 {
        Regime::BelowDimension
    } else {
        Regime::AtDimension
    };
    let gplus_nontrivial = match &w.kind {
        WeightKind::Constant { c } => *c > 0.0,
        WeightKind::Composite { base, .. } => {
            if base.is_unbounded() {
                true
            } else if let WeightKind::Constant { c } = base.kind {
                c - w.resolved_shift().unwrap() > 0.0
            } else {
                false
            }
        }
        _ => w.is_unbounded(),
    };
    let integral_g = w.integral();
    let membership = class_membership(w, p)?;
    let admissible =
        gplus_nontrivial && integral_g < 0.0 && membership.verdict == Verdict::Member;
    Ok(AdmissibilityReport {
        gplus_nontrivial,
        integral_g,
        membership,
        regime,
        admissible,
    })
}

/// The default perturbation weight: the indicator of the support of the
/// positive part of `g`, smoothed once along the boundary loop. Bounded,
/// nonnegative, and supported where the eigenfunction data lives.
pub fn positive_support_indicator(g: &BoundaryFunction) -> BoundaryFunction {
    let n = g.len();
    let raw: Vec<f64> = g.values.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let prev = raw[(i + n - 1) % n];
            let next = raw[(i + 1) % n];
            0.25 * prev + 0.5 * raw[i] + 0.25 * next
        })
        .collect();
    BoundaryFunction {
        values: smoothed,
        measures: g.measures.clone(),
    }
}
