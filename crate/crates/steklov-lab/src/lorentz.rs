//! Lorentz-Zygmund quasi-norms over boundary rearrangements, the
//! maximal-function norms, and limit-based membership tests for the weight
//! classes used by the admissibility checker.
//!
//! The quantity computed by [`quasi_norm`] is
//!
//! ```text
//! | f |_(p,q;alpha)  =  || t^{1/p - 1/q} l1(t)^alpha f*(t) ||_{L^q(0,T)}
//! ```
//!
//! with `l1(t) = 1 + |log t|`, which for finite q expands to
//! `(∫_0^T [t^{1/p} l1(t)^alpha f*(t)]^q dt/t)^{1/q}` and for q = ∞ is the
//! weighted sup. Step-profile integrals are evaluated in closed form when a
//! log or power factor is absent, otherwise by a 16-point Gauss rule per
//! interval with geometric subdivision of the first interval toward 0.
//! Divergent norms come back as `+∞`; non-membership is an answer, not an
//! error.

use crate::mesh::BoundaryFunction;
use crate::quad;
use crate::rearrangement::{maximal_function, rearrange, MaximalProfile, StepProfile};
use crate::{Error, Result};
use serde::Serialize;

/// Exponent triple of a Lorentz-Zygmund space. `p` and `q` live in
/// `[1, ∞]`; pass `f64::INFINITY` for the sup cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
}

impl LzParams {
    pub fn new(p: f64, q: f64, alpha: f64) -> Result<Self> {
        if !(p >= 1.0) || !(q >= 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need p >= 1, q >= 1 (or infinite), finite alpha; got ({p}, {q}, {alpha})"
            )));
        }
        Ok(LzParams { p, q, alpha })
    }

    fn inv_p(&self) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }
}

pub fn l1(t: f64) -> f64 {
    1.0 + t.ln().abs()
}

/// A rearrangement profile: either an exact step profile from mesh data or
/// a closed-form profile from the weight catalog.
#[derive(Debug, Clone)]
pub enum Profile {
    Step(StepProfile),
    Analytic(AnalyticProfile),
}

#[derive(Debug, Clone)]
pub struct AnalyticProfile {
    pub kind: AnalyticKind,
    /// Total boundary measure T.
    pub total: f64,
}

#[derive(Debug, Clone)]
pub enum AnalyticKind {
    /// `amp * t^{-exponent}` on `(0, support]`, zero beyond.
    PowerLaw {
        amp: f64,
        exponent: f64,
        support: f64,
    },
    /// `(1/sin(t/4))^{1/2}` on `(0, 2π]`; behaves like `2 t^{-1/2}` at 0.
    CosecRoot,
    Constant {
        level: f64,
    },
}

impl Profile {
    pub fn from_boundary(f: &BoundaryFunction) -> Profile {
        Profile::Step(rearrange(f))
    }

    pub fn total(&self) -> f64 {
        match self {
            Profile::Step(s) => s.total(),
            Profile::Analytic(a) => a.total,
        }
    }

    /// Profile value at `t` in `(0, T]`.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Profile::Step(s) => s.value(t),
            Profile::Analytic(a) => match &a.kind {
                AnalyticKind::PowerLaw {
                    amp,
                    exponent,
                    support,
                } => {
                    if t <= *support {
                        amp * t.powf(-exponent)
                    } else {
                        0.0
                    }
                }
                AnalyticKind::CosecRoot => (1.0 / (0.25 * t).sin()).sqrt(),
                AnalyticKind::Constant { level } => *level,
            },
        }
    }

    /// Scales the profile by |c|.
    pub fn scale(&self, c: f64) -> Profile {
        let c = c.abs();
        match self {
            Profile::Step(s) => Profile::Step(s.scale(c)),
            Profile::Analytic(a) => Profile::Analytic(AnalyticProfile {
                total: a.total,
                kind: match &a.kind {
                    AnalyticKind::PowerLaw {
                        amp,
                        exponent,
                        support,
                    } => AnalyticKind::PowerLaw {
                        amp: amp * c,
                        exponent: *exponent,
                        support: *support,
                    },
                    AnalyticKind::CosecRoot => {
                        // No closed scaled form is stored; scaling is only
                        // exercised through step profiles in practice.
                        AnalyticKind::PowerLaw {
                            amp: 2.0 * c,
                            exponent: 0.5,
                            support: a.total,
                        }
                    }
                    AnalyticKind::Constant { level } => AnalyticKind::Constant { level: level * c },
                },
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Exact one-dimensional building blocks
// ---------------------------------------------------------------------------

/// ∫_a^b t^{c-1} dt for 0 <= a < b; at a = 0 the caller has checked c > 0.
fn int_power(a: f64, b: f64, c: f64) -> f64 {
    if c == 0.0 {
        (b / a).ln()
    } else {
        (b.powf(c) - if a == 0.0 { 0.0 } else { a.powf(c) }) / c
    }
}

/// ∫_a^b l1(t)^d dt/t for 0 <= a < b; at a = 0 the caller has checked
/// d < -1. Exact via the substitution u = 1 ∓ log t on either side of 1.
fn int_log_over_t(a: f64, b: f64, d: f64) -> f64 {
    fn anti(u: f64, d: f64) -> f64 {
        if d == -1.0 {
            u.ln()
        } else {
            u.powf(d + 1.0) / (d + 1.0)
        }
    }
    let mut total = 0.0;
    // Piece below 1: u = 1 - log t decreases from u(a) to u(b).
    let lo = a;
    let hi = b.min(1.0);
    if lo < hi {
        let ub = 1.0 - hi.ln();
        if lo == 0.0 {
            debug_assert!(d < -1.0);
            total += -anti(ub, d); // anti(inf) = 0 for d < -1
        } else {
            let ua = 1.0 - lo.ln();
            total += anti(ua, d) - anti(ub, d);
        }
    }
    // Piece above 1: u = 1 + log t increases.
    let lo = a.max(1.0);
    if lo < b {
        let ua = 1.0 + lo.ln();
        let ub = 1.0 + b.ln();
        total += anti(ub, d) - anti(ua, d);
    }
    total
}

/// Limit of `t^e l1(t)^alpha` as t -> 0+, as a value in `[0, ∞]`.
fn weight_zero_limit(e: f64, alpha: f64) -> f64 {
    if e > 0.0 {
        0.0
    } else if e < 0.0 {
        f64::INFINITY
    } else if alpha > 0.0 {
        f64::INFINITY
    } else if alpha == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Exact supremum of `t^e l1(t)^alpha` over `[a, b]` (with the 0+ limit when
/// a = 0), via the interior critical points of both log branches.
fn sup_weight(a: f64, b: f64, e: f64, alpha: f64) -> f64 {
    let w = |t: f64| t.powf(e) * l1(t).powf(alpha);
    let mut best = if a == 0.0 { weight_zero_limit(e, alpha) } else { w(a) };
    if best.is_infinite() {
        return best;
    }
    best = best.max(w(b));
    if a < 1.0 && 1.0 < b {
        best = best.max(w(1.0));
    }
    if e != 0.0 {
        // Critical point below 1: 1 - log t = alpha / e.
        let r = alpha / e;
        if r > 1.0 {
            let tc = (1.0 - r).exp();
            if tc > a && tc < b.min(1.0) {
                best = best.max(w(tc));
            }
        }
        // Critical point above 1: 1 + log t = -alpha / e.
        if r < -1.0 {
            let tc = (-r - 1.0).exp();
            if tc > a.max(1.0) && tc < b {
                best = best.max(w(tc));
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Norm evaluation over segment descriptions
// ---------------------------------------------------------------------------

/// How the profile behaves on one interval of its domain.
enum Segment<'a> {
    /// Constant value on the interval.
    Level(f64),
    /// Exactly `amp * t^{-beta}` on the interval.
    Power { amp: f64, beta: f64 },
    /// Smooth but with no exact form; evaluated pointwise. The optional
    /// power pair describes the t -> 0 asymptote when the interval starts
    /// at 0.
    Smooth {
        eval: &'a dyn Fn(f64) -> f64,
        zero_asym: Option<(f64, f64)>,
    },
}

struct SegmentedProfile<'a> {
    /// Ascending interval ends; intervals are (cuts[i], cuts[i+1]] with
    /// cuts[0] = 0.
    cuts: Vec<f64>,
    segments: Vec<Segment<'a>>,
}

fn norm_from_segments(sp: &SegmentedProfile, params: &LzParams) -> f64 {
    let inv_p = params.inv_p();
    let alpha = params.alpha;
    if params.q.is_infinite() {
        let mut best: f64 = 0.0;
        for (i, seg) in sp.segments.iter().enumerate() {
            let (a, b) = (sp.cuts[i], sp.cuts[i + 1]);
            let s = match seg {
                Segment::Level(v) => {
                    if *v == 0.0 {
                        0.0
                    } else {
                        v * sup_weight(a, b, inv_p, alpha)
                    }
                }
                Segment::Power { amp, beta } => {
                    if *amp == 0.0 {
                        0.0
                    } else {
                        amp * sup_weight(a, b, inv_p - beta, alpha)
                    }
                }
                Segment::Smooth { eval, zero_asym } => {
                    if a == 0.0 {
                        if let Some((amp, beta)) = zero_asym {
                            let lim = amp * weight_zero_limit(inv_p - beta, alpha);
                            if lim.is_infinite() {
                                return f64::INFINITY;
                            }
                        }
                    }
                    // Dense log-spaced scan; finiteness was decided above.
                    let lo = if a == 0.0 { b * 2f64.powi(-60) } else { a };
                    let mut m: f64 = 0.0;
                    let n = 4096;
                    for k in 0..=n {
                        let t = lo * (b / lo).powf(k as f64 / n as f64);
                        m = m.max(t.powf(inv_p) * l1(t).powf(alpha) * eval(t));
                    }
                    m
                }
            };
            if s.is_infinite() {
                return f64::INFINITY;
            }
            best = best.max(s);
        }
        best
    } else {
        let q = params.q;
        let c = if params.p.is_infinite() { 0.0 } else { q / params.p };
        let d = alpha * q;
        let mut total = 0.0;
        for (i, seg) in sp.segments.iter().enumerate() {
            let (a, b) = (sp.cuts[i], sp.cuts[i + 1]);
            let piece = match seg {
                Segment::Level(v) => {
                    if *v == 0.0 {
                        0.0
                    } else {
                        match weighted_interval_integral(a, b, c, d) {
                            Some(w) => v.powf(q) * w,
                            None => return f64::INFINITY,
                        }
                    }
                }
                Segment::Power { amp, beta } => {
                    if *amp == 0.0 {
                        0.0
                    } else {
                        match weighted_interval_integral(a, b, c - beta * q, d) {
                            Some(w) => amp.powf(q) * w,
                            None => return f64::INFINITY,
                        }
                    }
                }
                Segment::Smooth { eval, zero_asym } => {
                    let psi =
                        |t: f64| (t.powf(inv_p) * l1(t).powf(alpha) * eval(t)).powf(q) / t;
                    if a == 0.0 {
                        let (amp, beta) = zero_asym.unwrap_or((eval(b * 1e-12), 0.0));
                        let c_eff = c - beta * q;
                        if amp > 0.0 && (c_eff < 0.0 || (c_eff == 0.0 && d >= -1.0)) {
                            return f64::INFINITY;
                        }
                        quad::integrate_to_zero(&psi, b, 1e-12, 4000)
                    } else {
                        quad::adaptive(&psi, a, b, 1e-13)
                    }
                }
            };
            total += piece;
        }
        total.powf(1.0 / q)
    }
}

/// ∫_a^b t^{c-1} l1(t)^d dt, or None when it diverges at a = 0. Exact when
/// one of the two factors is absent, numeric otherwise.
fn weighted_interval_integral(a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    if a == 0.0 && (c < 0.0 || (c == 0.0 && d >= -1.0)) {
        return None;
    }
    if d == 0.0 {
        return Some(int_power(a, b, c));
    }
    if c == 0.0 {
        return Some(int_log_over_t(a, b, d));
    }
    let psi = |t: f64| t.powf(c - 1.0) * l1(t).powf(d);
    if a == 0.0 {
        Some(quad::integrate_to_zero(&psi, b, 1e-12, 4000))
    } else {
        Some(quad::adaptive(&psi, a, b, 1e-13))
    }
}

fn step_segments(s: &StepProfile) -> SegmentedProfile<'_> {
    SegmentedProfile {
        cuts: s.breakpoints.clone(),
        segments: s.levels.iter().map(|&v| Segment::Level(v)).collect(),
    }
}

fn analytic_segments(a: &AnalyticProfile) -> SegmentedProfile<'static> {
    match &a.kind {
        AnalyticKind::PowerLaw {
            amp,
            exponent,
            support,
        } => {
            let mut cuts = vec![0.0, support.min(a.total)];
            let mut segments = vec![Segment::Power {
                amp: *amp,
                beta: *exponent,
            }];
            if *support < a.total {
                cuts.push(a.total);
                segments.push(Segment::Level(0.0));
            }
            SegmentedProfile { cuts, segments }
        }
        AnalyticKind::Constant { level } => SegmentedProfile {
            cuts: vec![0.0, a.total],
            segments: vec![Segment::Level(*level)],
        },
        AnalyticKind::CosecRoot => SegmentedProfile {
            cuts: vec![0.0, a.total],
            segments: vec![Segment::Smooth {
                eval: &|t: f64| (1.0 / (0.25 * t).sin()).sqrt(),
                zero_asym: Some((2.0, 0.5)),
            }],
        },
    }
}

/// The Lorentz-Zygmund quasi-norm of a profile. Returns `+∞` when the
/// integral or supremum diverges.
pub fn quasi_norm(profile: &Profile, params: &LzParams) -> f64 {
    match profile {
        Profile::Step(s) => norm_from_segments(&step_segments(s), params),
        Profile::Analytic(a) => norm_from_segments(&analytic_segments(a), params),
    }
}

fn maximal_step_segments<'a>(
    m: &'a MaximalProfile,
    eval: &'a dyn Fn(f64) -> f64,
) -> SegmentedProfile<'a> {
    let mut cuts = Vec::with_capacity(m.breakpoints.len());
    let mut segments = Vec::with_capacity(m.levels.len());
    cuts.push(0.0);
    // The running average is constant (= first level) on the first step.
    cuts.push(m.breakpoints[1]);
    segments.push(Segment::Level(m.levels[0]));
    for i in 1..m.levels.len() {
        cuts.push(m.breakpoints[i + 1]);
        segments.push(Segment::Smooth {
            eval,
            zero_asym: None,
        });
    }
    SegmentedProfile { cuts, segments }
}

/// The norm built on the running average f** instead of f*. Dominates the
/// quasi-norm pointwise. Applies to step profiles, power laws and
/// constants; requires p > 1 where the two norms are equivalent.
pub fn double_star_norm(profile: &Profile, params: &LzParams) -> Result<f64> {
    if !(params.p > 1.0) {
        return Err(Error::InvalidParams(
            "the running-average norm requires p > 1".into(),
        ));
    }
    double_star_norm_any(profile, params)
}

/// Same as [`double_star_norm`] without the p > 1 gate; used internally for
/// pairing bounds whose statements live at p = 1.
pub fn double_star_norm_any(profile: &Profile, params: &LzParams) -> Result<f64> {
    match profile {
        Profile::Step(s) => {
            let m = maximal_function(s);
            let eval = |t: f64| m.value(t);
            let sp = maximal_step_segments(&m, &eval);
            Ok(norm_from_segments(&sp, params))
        }
        Profile::Analytic(a) => match &a.kind {
            AnalyticKind::Constant { .. } => Ok(norm_from_segments(&analytic_segments(a), params)),
            AnalyticKind::PowerLaw {
                amp,
                exponent,
                support,
            } => {
                if *exponent >= 1.0 {
                    return Err(Error::Unsupported(
                        "running average diverges for exponent >= 1".into(),
                    ));
                }
                let s = support.min(a.total);
                let amp2 = amp / (1.0 - exponent);
                let mass = amp * s.powf(1.0 - exponent) / (1.0 - exponent);
                let mut cuts = vec![0.0, s];
                let mut segments = vec![Segment::Power {
                    amp: amp2,
                    beta: *exponent,
                }];
                if s < a.total {
                    cuts.push(a.total);
                    segments.push(Segment::Power {
                        amp: mass,
                        beta: 1.0,
                    });
                }
                Ok(norm_from_segments(&SegmentedProfile { cuts, segments }, params))
            }
            AnalyticKind::CosecRoot => Err(Error::Unsupported(
                "no closed running average for the cosec profile".into(),
            )),
        },
    }
}

// ---------------------------------------------------------------------------
// Membership tests
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitProbe {
    Value(f64),
    Diverging,
}

/// Outcome of a grid-based limit test. The fixed constants of the scheme
/// (threshold fraction, stabilization factor, window length) are reported
/// alongside the verdict so a report is self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub class: String,
    pub verdict: Verdict,
    pub limit_at_zero: LimitProbe,
    /// Only for the two-sided test.
    pub limit_at_total: Option<LimitProbe>,
    /// Diagnostic samples (t, indicator value), zero side first.
    pub samples: Vec<(f64, f64)>,
    pub tol_zero_fraction: f64,
    pub stabilization_factor: f64,
    pub window: usize,
}

const TOL_ZERO_FRACTION: f64 = 1e-3;
const STABILIZATION_FACTOR: f64 = 10.0;
const WINDOW: usize = 8;

enum SideOutcome {
    MemberSide(f64),
    NonMemberSide(LimitProbe),
    Undecided(f64),
}

fn classify_sequence(seq: &[f64]) -> SideOutcome {
    let mx = seq.iter().cloned().fold(0.0f64, f64::max);
    if mx == 0.0 {
        return SideOutcome::MemberSide(0.0);
    }
    if seq.len() < WINDOW {
        return SideOutcome::Undecided(*seq.last().unwrap());
    }
    let tail = &seq[seq.len() - WINDOW..];
    let tolz = TOL_ZERO_FRACTION * mx;
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    if nonincreasing && tail.iter().all(|&v| v <= tolz) {
        return SideOutcome::MemberSide(*tail.last().unwrap());
    }
    let floor = STABILIZATION_FACTOR * tolz;
    let tmax = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tmin = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if tail.iter().all(|&v| v >= floor) {
        if (tmax - tmin) / tmax <= 0.05 {
            return SideOutcome::NonMemberSide(LimitProbe::Value(
                tail.iter().sum::<f64>() / tail.len() as f64,
            ));
        }
        let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        if nondecreasing && *tail.last().unwrap() >= mx * (1.0 - 1e-12) {
            return SideOutcome::NonMemberSide(LimitProbe::Diverging);
        }
    }
    SideOutcome::Undecided(*seq.last().unwrap())
}

/// Deepest dyadic level probed toward t = 0. Step profiles stop at their
/// first breakpoint: below the most singular edge the data carries no
/// information about the underlying weight, which is what makes sampled
/// verdicts inconclusive rather than wrong. Closed-form profiles are probed
/// much deeper; only logarithmically slow limits stay undecided there.
fn zero_side_depth(profile: &Profile) -> i32 {
    match profile {
        Profile::Step(s) => {
            let t1 = s.breakpoints[1];
            let k = (s.total() / t1).log2().floor() as i32;
            k.clamp(0, 60)
        }
        Profile::Analytic(_) => 400,
    }
}

fn sample_zero_side<F: Fn(f64) -> f64>(profile: &Profile, ind: &F) -> Vec<(f64, f64)> {
    let total = profile.total();
    (0..=zero_side_depth(profile))
        .map(|k| {
            let t = total * 2f64.powi(-k);
            (t, ind(t))
        })
        .collect()
}

fn sample_total_side<F: Fn(f64) -> f64>(profile: &Profile, ind: &F) -> Vec<(f64, f64)> {
    let total = profile.total();
    (1..=48)
        .map(|k| {
            let t = total * (1.0 - 2f64.powi(-k));
            (t, ind(t))
        })
        .collect()
}

/// Two-sided membership test for the class defined through
/// `lim t^{1/d} f*(t) = 0` at both ends of (0, T).
pub fn membership_f(profile: &Profile, d: f64) -> Result<MembershipReport> {
    if !(d > 1.0) {
        return Err(Error::InvalidParams("class index d must exceed 1".into()));
    }
    let ind = |t: f64| t.powf(1.0 / d) * profile.value(t);
    let zero = sample_zero_side(profile, &ind);
    let total = sample_total_side(profile, &ind);
    let zs: Vec<f64> = zero.iter().map(|s| s.1).collect();
    let ts: Vec<f64> = total.iter().map(|s| s.1).collect();
    let (oz, ot) = (classify_sequence(&zs), classify_sequence(&ts));
    let verdict = match (&oz, &ot) {
        (SideOutcome::MemberSide(_), SideOutcome::MemberSide(_)) => Verdict::Member,
        (SideOutcome::NonMemberSide(_), _) | (_, SideOutcome::NonMemberSide(_)) => {
            Verdict::NonMember
        }
        _ => Verdict::Inconclusive,
    };
    let probe = |o: SideOutcome| match o {
        SideOutcome::MemberSide(v) | SideOutcome::Undecided(v) => LimitProbe::Value(v),
        SideOutcome::NonMemberSide(p) => p,
    };
    let mut samples = zero;
    samples.extend(total);
    Ok(MembershipReport {
        class: format!("F[{d}]"),
        verdict,
        limit_at_zero: probe(oz),
        limit_at_total: Some(probe(ot)),
        samples,
        tol_zero_fraction: TOL_ZERO_FRACTION,
        stabilization_factor: STABILIZATION_FACTOR,
        window: WINDOW,
    })
}

/// One-sided membership test for the class defined through
/// `lim_{t→0} t^{1/d} l1(t)^n f*(t) = 0` (n is the log power, 2 on planar
/// domains).
pub fn membership_g(profile: &Profile, d: f64, log_power: f64) -> Result<MembershipReport> {
    if !(d >= 1.0) {
        return Err(Error::InvalidParams("class index d must be at least 1".into()));
    }
    let ind = |t: f64| t.powf(1.0 / d) * l1(t).powf(log_power) * profile.value(t);
    let zero = sample_zero_side(profile, &ind);
    let zs: Vec<f64> = zero.iter().map(|s| s.1).collect();
    let oz = classify_sequence(&zs);
    let verdict = match &oz {
        SideOutcome::MemberSide(_) => Verdict::Member,
        SideOutcome::NonMemberSide(_) => Verdict::NonMember,
        SideOutcome::Undecided(_) => Verdict::Inconclusive,
    };
    let probe = match oz {
        SideOutcome::MemberSide(v) | SideOutcome::Undecided(v) => LimitProbe::Value(v),
        SideOutcome::NonMemberSide(p) => p,
    };
    Ok(MembershipReport {
        class: format!("G[{d}]"),
        verdict,
        limit_at_zero: probe,
        limit_at_total: None,
        samples: zero,
        tol_zero_fraction: TOL_ZERO_FRACTION,
        stabilization_factor: STABILIZATION_FACTOR,
        window: WINDOW,
    })
}

// ---------------------------------------------------------------------------
// Embedding and pairing inequalities
// ---------------------------------------------------------------------------

/// Evaluates both quasi-norms of an embedding pair. The parameter pairs
/// must satisfy one of the two space-inclusion hypotheses: a strictly
/// larger first exponent, or equal first exponents with a compatible
/// (q, alpha) ordering. The embedding constant itself is not estimated;
/// callers test the finiteness implication.
pub fn embedding_gap(
    profile: &Profile,
    strong: &LzParams,
    weak: &LzParams,
) -> Result<(f64, f64)> {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let hypothesis_iii = strong.p > weak.p;
    let hypothesis_iv = strong.p == weak.p
        && ((weak.q >= strong.q && strong.alpha >= weak.alpha)
            || (strong.q > weak.q && strong.alpha + inv(strong.q) > weak.alpha + inv(weak.q)));
    if !hypothesis_iii && !hypothesis_iv {
        return Err(Error::InvalidParams(
            "parameter pairs match neither embedding hypothesis".into(),
        ));
    }
    Ok((quasi_norm(profile, strong), quasi_norm(profile, weak)))
}

/// Pointwise-product norm against the split-exponent bound
/// `C ||f||_(p1,q1) ||g||_(p2,q2)` with `C = p/(p-1)` for p > 1 and `C = 1`
/// at p = 1, where `1/p = 1/p1 + 1/p2` and `1/q = 1/q1 + 1/q2`. All three
/// norms are the running-average norms, for which the bound holds with
/// constant 1 by subadditivity of the running average.
pub fn holder_pair(
    f: &BoundaryFunction,
    g: &BoundaryFunction,
    split: (f64, f64, f64, f64),
) -> Result<(f64, f64)> {
    let (p1, q1, p2, q2) = split;
    if !(p1 > 1.0 && p1.is_finite() && p2 > 1.0 && p2.is_finite()) {
        return Err(Error::InvalidParams(
            "split exponents p1, p2 must lie in (1, ∞)".into(),
        ));
    }
    if !(q1 >= 1.0 && q2 >= 1.0) {
        return Err(Error::InvalidParams("split exponents q1, q2 must be >= 1".into()));
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let ip = 1.0 / p1 + 1.0 / p2;
    if ip > 1.0 {
        return Err(Error::InvalidParams(
            "split exponents must satisfy 1/p1 + 1/p2 <= 1".into(),
        ));
    }
    let p = 1.0 / ip;
    let iq = inv(q1) + inv(q2);
    let q = if iq == 0.0 { f64::INFINITY } else { 1.0 / iq };
    if !f.same_partition(g) {
        return Err(Error::MeshMismatch(
            "product norm requires both factors on the same mesh boundary".into(),
        ));
    }
    let product = BoundaryFunction::from_parts(
        f.values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| a * b)
            .collect(),
        f.measures.clone(),
    )?;
    let prof = |bf: &BoundaryFunction| Profile::Step(rearrange(bf));
    let product_norm =
        double_star_norm_any(&prof(&product), &LzParams::new(p, q, 0.0)?)?;
    let nf = double_star_norm_any(&prof(f), &LzParams::new(p1, q1, 0.0)?)?;
    let ng = double_star_norm_any(&prof(g), &LzParams::new(p2, q2, 0.0)?)?;
    let c = if p > 1.0 { p / (p - 1.0) } else { 1.0 };
    Ok((product_norm, c * nf * ng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn step(bps: &[f64], levels: &[f64]) -> Profile {
        Profile::Step(StepProfile::new(bps.to_vec(), levels.to_vec()).unwrap())
    }

    fn power(amp: f64, exponent: f64, support: f64, total: f64) -> Profile {
        Profile::Analytic(AnalyticProfile {
            kind: AnalyticKind::PowerLaw {
                amp,
                exponent,
                support,
            },
            total,
        })
    }

    #[test]
    fn constant_profile_norm_at_p_equals_q() {
        for &(p, t) in &[(2.0, 4.0), (1.5, 2.0), (3.0, 6.283)] {
            let prof = step(&[0.0, t], &[1.0]);
            let params = LzParams::new(p, p, 0.0).unwrap();
            assert_relative_eq!(quasi_norm(&prof, &params), t.powf(1.0 / p), max_relative = 1e-12);
        }
    }

    #[test]
    fn power_law_weak_norm_is_exactly_the_amplitude() {
        // amp t^{-1/q} against sup t^{1/q}: the product is constant.
        let q = 2.0;
        let amp = 2f64.sqrt();
        let prof = power(amp, 1.0 / q, 0.5, 2.0);
        let params = LzParams::new(q, f64::INFINITY, 0.0).unwrap();
        assert_relative_eq!(quasi_norm(&prof, &params), amp, max_relative = 1e-13);
    }

    #[test]
    fn cosec_profile_weak_log_norm_is_finite_with_interior_sup() {
        let prof = Profile::Analytic(AnalyticProfile {
            kind: AnalyticKind::CosecRoot,
            total: 2.0 * std::f64::consts::PI,
        });
        let params = LzParams::new(1.0, f64::INFINITY, 2.0).unwrap();
        let sup = quasi_norm(&prof, &params);
        assert!(sup.is_finite() && sup > 0.0);
        // The sup is not carried by the t -> 0 end alone.
        let near_zero = 1e-9f64.powf(1.0) * l1(1e-9).powf(2.0) * prof.value(1e-9);
        assert!(sup > 10.0 * near_zero);
    }

    #[test]
    fn divergent_norm_reports_infinity() {
        // amp t^{-1/q} in its own-exponent strong space diverges.
        let prof = power(1.0, 0.5, 1.0, 1.0);
        let params = LzParams::new(2.0, 2.0, 0.0).unwrap();
        assert!(quasi_norm(&prof, &params).is_infinite());
    }

    #[test]
    fn double_star_equals_quasi_for_constants() {
        let prof = step(&[0.0, 3.0], &[2.0]);
        let params = LzParams::new(2.0, 3.0, 0.5).unwrap();
        assert_relative_eq!(
            double_star_norm(&prof, &params).unwrap(),
            quasi_norm(&prof, &params),
            max_relative = 1e-12
        );
    }

    #[test]
    fn double_star_two_step_closed_form_and_quadrature() {
        // Profile (0,1,3)/(3,1): the running average is 3 on (0,1] and
        // (2+t)/t on (1,3]. For (2,2,0) the squared norm is
        // ∫_0^3 (f**)^2 dt = 9 + ∫_1^3 (2+t)^2/t^2 dt = 11 + 8/3 + 4 ln 3.
        let prof = step(&[0.0, 1.0, 3.0], &[3.0, 1.0]);
        let params = LzParams::new(2.0, 2.0, 0.0).unwrap();
        let closed = (11.0 + 8.0 / 3.0 + 4.0 * 3f64.ln()).sqrt();
        let got = double_star_norm(&prof, &params).unwrap();
        assert_relative_eq!(got, closed, max_relative = 1e-10);
        // Independent quadrature of the same integrand.
        let avg = |t: f64| if t <= 1.0 { 3.0 } else { (2.0 + t) / t };
        let by_quadrature = quad::adaptive(&|t: f64| avg(t) * avg(t), 1e-12, 3.0, 1e-13).sqrt();
        assert_relative_eq!(got, by_quadrature, max_relative = 1e-9);
    }

    #[test]
    fn double_star_rejects_p_at_most_one() {
        let prof = step(&[0.0, 1.0], &[1.0]);
        assert!(double_star_norm(&prof, &LzParams::new(1.0, 2.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn power_identity_exact_on_step_profiles() {
        let prof = StepProfile::new(vec![0.0, 0.5, 1.7, 4.0], vec![5.0, 2.0, 0.25]).unwrap();
        for &r in &[0.5, 2.0, 3.0] {
            let (p, q) = (4.0, 6.0);
            let lhs = quasi_norm(
                &Profile::Step(prof.pow(r)),
                &LzParams::new(p / r, q / r, 0.0).unwrap(),
            );
            let rhs = quasi_norm(&Profile::Step(prof.clone()), &LzParams::new(p, q, 0.0).unwrap())
                .powf(r);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
        }
    }

    #[test]
    fn log_space_power_identity_is_exact() {
        // |f|^p in (∞,1;-p) equals the p-th power of |f| in (∞,p;-1):
        // both reduce to the same exact log integral on step profiles.
        let prof = StepProfile::new(vec![0.0, 0.3, 1.1, 2.5], vec![3.0, 1.5, 0.2]).unwrap();
        for &p in &[2.0, 3.0] {
            let lhs = quasi_norm(
                &Profile::Step(prof.pow(p)),
                &LzParams::new(f64::INFINITY, 1.0, -p).unwrap(),
            );
            let rhs = quasi_norm(
                &Profile::Step(prof.clone()),
                &LzParams::new(f64::INFINITY, p, -1.0).unwrap(),
            )
            .powf(p);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
        }
    }

    #[test]
    fn membership_two_sided_zero_profile_is_member() {
        let prof = step(&[0.0, 2.0], &[0.0]);
        let rep = membership_f(&prof, 2.0).unwrap();
        assert_eq!(rep.verdict, Verdict::Member);
    }

    #[test]
    fn membership_bounded_analytic_profile_in_g() {
        let prof = Profile::Analytic(AnalyticProfile {
            kind: AnalyticKind::Constant { level: 7.0 },
            total: 4.0,
        });
        for &d in &[1.0, 1.5, 3.0] {
            let rep = membership_g(&prof, d, 2.0).unwrap();
            assert_eq!(rep.verdict, Verdict::Member);
        }
    }

    #[test]
    fn embedding_gap_validates_hypotheses() {
        let prof = step(&[0.0, 1.0, 2.0], &[2.0, 1.0]);
        let strong = LzParams::new(3.0, 2.0, 0.0).unwrap();
        let weak = LzParams::new(2.0, 2.0, 0.0).unwrap();
        let (a, b) = embedding_gap(&prof, &strong, &weak).unwrap();
        assert!(a.is_finite() && b.is_finite());
        // Reversed pair matches neither hypothesis.
        assert!(embedding_gap(&prof, &weak, &strong).is_err());
    }

    #[test]
    fn holder_constant_pair_has_finite_slack() {
        let f = BoundaryFunction::from_parts(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let (prod, bound) = holder_pair(&f, &f, (4.0, 4.0, 4.0, 4.0)).unwrap();
        assert!(prod <= bound);
        assert!(bound.is_finite());
    }

    proptest! {
        /// Scaling homogeneity of the quasi-norm.
        #[test]
        fn quasi_norm_homogeneous(levels in proptest::collection::vec(0.01f64..10.0, 1..10),
                                  widths in proptest::collection::vec(0.05f64..2.0, 10),
                                  c in 0.01f64..50.0,
                                  pi in 0usize..4) {
            let mut sorted = levels.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let mut bps = vec![0.0];
            for w in widths.iter().take(sorted.len()) {
                bps.push(bps.last().unwrap() + w);
            }
            let prof = StepProfile::new(bps, sorted).unwrap();
            let params = [
                LzParams::new(2.0, 2.0, 0.0).unwrap(),
                LzParams::new(1.5, 3.0, 1.0).unwrap(),
                LzParams::new(2.0, f64::INFINITY, -0.5).unwrap(),
                LzParams::new(f64::INFINITY, 2.0, -1.0).unwrap(),
            ][pi];
            let n1 = quasi_norm(&Profile::Step(prof.scale(c)), &params);
            let n0 = quasi_norm(&Profile::Step(prof), &params);
            prop_assert!((n1 - c * n0).abs() <= 1e-12 * (1.0 + n1.abs() + c * n0.abs()));
        }

        /// The running-average norm dominates the quasi-norm for p > 1.
        #[test]
        fn double_star_dominates(levels in proptest::collection::vec(0.01f64..10.0, 1..10),
                                 widths in proptest::collection::vec(0.05f64..2.0, 10)) {
            let mut sorted = levels.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let mut bps = vec![0.0];
            for w in widths.iter().take(sorted.len()) {
                bps.push(bps.last().unwrap() + w);
            }
            let prof = Profile::Step(StepProfile::new(bps, sorted).unwrap());
            let params = LzParams::new(2.0, 2.0, 0.0).unwrap();
            let ds = double_star_norm(&prof, &params).unwrap();
            let qn = quasi_norm(&prof, &params);
            prop_assert!(ds >= qn * (1.0 - 1e-10));
        }
    }
}
