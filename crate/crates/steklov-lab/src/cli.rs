//! Command-line front end: mesh generation or loading, the rearrangement
//! and norm tools, weight checks, eigenvalue solves with the optional dense
//! cross-check, continuation runs, the no-bifurcation scan, and a demo
//! pipeline that writes all artifacts.
//!
//! Exit codes: 0 on success, 1 on domain failures (with a machine-readable
//! `{"error": ...}` line on stdout), 2 on usage errors.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bifurcation::{
    branch_from_first, classify_branch, extrapolate_to_zero_norm, no_bifurcation_scan,
    ContinuationConfig,
};
use crate::eigen::{first_eigenpair, principality_check, simplicity_isolation_probe, SolverOpts};
use crate::fem::PerturbationSpec;
use crate::io::{fmt17, write_csv, write_jsonl, write_svg_plot};
use crate::lorentz::{double_star_norm, membership_f, membership_g, quasi_norm, LzParams, Profile};
use crate::mesh::{BoundaryFunction, Mesh};
use crate::oracle::dense_oracle_p2;
use crate::rearrangement::rearrange;
use crate::weights::{admissibility, positive_support_indicator, WeightSpec};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "steklov-lab",
    about = "Boundary eigenvalue laboratory: rearrangements, singular weights, eigenpairs, bifurcation branches",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct MeshArgs {
    /// Mesh file in the text format (`nv nt`, vertices, triangles).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Built-in domain: square | disk | rect.
    #[arg(long, default_value = "rect")]
    domain: String,
    /// Edges per side (square/rect) or boundary edges (disk).
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Half-width R of the rect domain (-R, R) x (0, 2R).
    #[arg(long, default_value_t = 0.25)]
    r: f64,
}

impl MeshArgs {
    fn build(&self) -> Result<Arc<Mesh>> {
        if let Some(path) = &self.mesh {
            return Mesh::load(path);
        }
        match self.domain.as_str() {
            "square" => Ok(Mesh::unit_square(self.n)),
            "disk" => Ok(Mesh::disk_polygon(self.n.max(3))),
            "rect" => Ok(Mesh::box_domain(self.r, self.n)),
            other => Err(Error::Usage(format!(
                "unknown domain '{other}' (square | disk | rect)"
            ))),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct WeightArg {
    /// Catalog name (g1-circle, g2-box, g3-box:q=<q>, h2-box, const:<c>,
    /// composite:<base>-<c|auto>) or a CSV file of per-edge values.
    #[arg(long)]
    weight: String,
}

impl WeightArg {
    fn resolve(&self, p: f64) -> Result<ResolvedWeight> {
        let path = Path::new(&self.weight);
        if self.weight.ends_with(".csv") && path.exists() {
            return Ok(ResolvedWeight::Csv(load_weight_csv(path)?));
        }
        Ok(ResolvedWeight::Catalog(WeightSpec::parse(&self.weight, p)?))
    }
}

enum ResolvedWeight {
    Catalog(WeightSpec),
    /// Per-edge rows `value[,measure]`.
    Csv(Vec<(f64, Option<f64>)>),
}

impl ResolvedWeight {
    fn sample(&self, mesh: &Arc<Mesh>) -> Result<BoundaryFunction> {
        match self {
            ResolvedWeight::Catalog(w) => {
                let mut w = w.clone();
                if let crate::mesh::DomainTag::BoxDomain { half_width } = mesh.domain {
                    w = w.with_half_width(half_width);
                }
                w.sample_on_boundary(mesh)
            }
            ResolvedWeight::Csv(rows) => {
                if rows.len() != mesh.n_boundary_edges() {
                    return Err(Error::MeshMismatch(format!(
                        "CSV has {} rows for {} boundary edges",
                        rows.len(),
                        mesh.n_boundary_edges()
                    )));
                }
                BoundaryFunction::on_mesh(mesh, rows.iter().map(|r| r.0).collect())
            }
        }
    }

    /// A profile without a mesh: analytic for catalog weights, a step
    /// profile for self-contained CSV data.
    fn profile(&self) -> Result<Profile> {
        match self {
            ResolvedWeight::Catalog(w) => w.analytic_rearrangement(),
            ResolvedWeight::Csv(rows) => {
                let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
                let measures: Vec<f64> = rows
                    .iter()
                    .map(|r| r.1.ok_or_else(|| {
                        Error::Usage("mesh-free CSV weights need value,measure rows".into())
                    }))
                    .collect::<Result<_>>()?;
                Ok(Profile::Step(rearrange(&BoundaryFunction::from_parts(
                    values, measures,
                )?)))
            }
        }
    }
}

fn load_weight_csv(path: &Path) -> Result<Vec<(f64, Option<f64>)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if i == 0 && line.chars().any(|c| c.is_alphabetic()) {
            continue; // header
        }
        let mut parts = line.split(',');
        let v: f64 = parts
            .next()
            .unwrap()
            .trim()
            .parse()
            .map_err(|e| Error::Usage(format!("{}:{}: bad value: {e}", path.display(), i + 1)))?;
        let m = match parts.next() {
            Some(tok) => Some(tok.trim().parse().map_err(|e| {
                Error::Usage(format!("{}:{}: bad measure: {e}", path.display(), i + 1))
            })?),
            None => None,
        };
        rows.push((v, m));
    }
    if rows.is_empty() {
        return Err(Error::Usage(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decreasing rearrangement of a weight as CSV `t,value` (both one-sided
    /// values at each breakpoint).
    Rearrange {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        weight: WeightArg,
        /// Exponent of the surrounding run (fixes the g2-box exponent).
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "rearrangement.csv")]
        out: PathBuf,
        /// Rearrange the analytic profile instead of mesh samples.
        #[arg(long)]
        analytic: bool,
    },
    /// Lorentz-Zygmund quasi-norm of a weight.
    Norm {
        #[command(flatten)]
        weight: WeightArg,
        /// First exponent of the space (use `inf` for the weak end).
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Second exponent (use `inf` for the sup norm).
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        /// Exponent of the surrounding run (fixes the g2-box exponent).
        #[arg(long = "run-p", default_value_t = 2.0)]
        run_p: f64,
        /// Use the running-average norm instead of the quasi-norm.
        #[arg(long)]
        double_star: bool,
    },
    /// Class membership report for a weight (JSON line).
    CheckWeight {
        #[command(flatten)]
        weight: WeightArg,
        /// Class spec `F:<d>` or `G:<d>`.
        #[arg(long)]
        class: String,
        #[arg(long = "run-p", default_value_t = 2.0)]
        run_p: f64,
    },
    /// First eigenpair of the weighted boundary eigenvalue problem.
    Eigen {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        seeds: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Cross-check against the dense reference solve (p = 2 only).
        #[arg(long)]
        oracle: bool,
        /// Write nodal values of the eigenfunction to this CSV.
        #[arg(long)]
        phi_out: Option<PathBuf>,
    },
    /// Pseudo-arclength continuation of nontrivial solutions from the first
    /// eigenpair.
    Bifurcate {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Response exponent of the perturbation.
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        /// Perturbation weight (defaults to the smoothed indicator of the
        /// positive part of the eigenvalue weight).
        #[arg(long)]
        f_weight: Option<String>,
        #[arg(long, default_value_t = 2e-3)]
        ds: f64,
        #[arg(long, default_value_t = 200)]
        max_points: usize,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        direction: i32,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long, default_value = "branch.csv")]
        out: PathBuf,
        /// Also write an SVG diagram (λ against the Sobolev norm).
        #[arg(long)]
        plot: bool,
    },
    /// Damped-Newton scan for small nontrivial solutions at a fixed λ.
    Scan {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        /// Parameter value, or `half-lambda1` for half the computed first
        /// eigenvalue.
        #[arg(long, default_value = "half-lambda1")]
        lambda: String,
        #[arg(long, default_value_t = 1e-2)]
        rho: f64,
        #[arg(long, default_value_t = 50)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
    /// Full quadratic-case pipeline on the box domain: admissibility,
    /// eigenpair with dense cross-check, branch; writes all artifacts.
    Demo {
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
}

/// Entry point used by the binary and by tests; returns the process exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; map to the usage exit code
            let _ = e.print();
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            println!("{}", serde_json::json!({ "error": e.to_string() }));
            1
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("STEKLOV_LAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn parse_exponent(s: &str) -> Result<f64> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    s.parse()
        .map_err(|e| Error::Usage(format!("bad exponent '{s}': {e}")))
}

fn check_p_range(p: f64) -> Result<()> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Usage(format!(
            "p = {p} outside the supported range (1, 2]"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct NormLine {
    weight: String,
    p: f64,
    q: f64,
    alpha: f64,
    double_star: bool,
    value: String,
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Rearrange {
            mesh,
            weight,
            p,
            out,
            analytic,
        } => {
            check_p_range(p)?;
            let resolved = weight.resolve(p)?;
            let profile = if analytic {
                resolved.profile()?
            } else {
                let m = mesh.build()?;
                Profile::Step(rearrange(&resolved.sample(&m)?))
            };
            let rows = profile_rows(&profile);
            write_csv(&out, "t,value", &rows)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Norm {
            weight,
            p,
            q,
            alpha,
            run_p,
            double_star,
        } => {
            let params = LzParams::new(parse_exponent(&p)?, parse_exponent(&q)?, alpha)?;
            let resolved = weight.resolve(run_p)?;
            let profile = resolved.profile()?;
            let value = if double_star {
                double_star_norm(&profile, &params)?
            } else {
                quasi_norm(&profile, &params)
            };
            let line = NormLine {
                weight: weight.weight.clone(),
                p: params.p,
                q: params.q,
                alpha: params.alpha,
                double_star,
                value: if value.is_finite() {
                    fmt17(value)
                } else {
                    "inf".into()
                },
            };
            println!("{}", serde_json::to_string(&line).unwrap());
            Ok(())
        }
        Command::CheckWeight {
            weight,
            class,
            run_p,
        } => {
            let resolved = weight.resolve(run_p)?;
            let profile = resolved.profile()?;
            let (kind, d) = class
                .split_once(':')
                .ok_or_else(|| Error::Usage("class must be F:<d> or G:<d>".into()))?;
            let d: f64 = d
                .parse()
                .map_err(|e| Error::Usage(format!("bad class index: {e}")))?;
            let report = match kind {
                "F" | "f" => membership_f(&profile, d)?,
                "G" | "g" => membership_g(&profile, d, 2.0)?,
                other => return Err(Error::Usage(format!("unknown class '{other}'"))),
            };
            println!("{}", serde_json::to_string(&report).unwrap());
            Ok(())
        }
        Command::Eigen {
            mesh,
            weight,
            p,
            seeds,
            tol,
            rng_seed,
            oracle,
            phi_out,
        } => {
            check_p_range(p)?;
            let m = mesh.build()?;
            let resolved = weight.resolve(p)?;
            if let ResolvedWeight::Catalog(w) = &resolved {
                let rep = admissibility(w, p)?;
                if !rep.admissible {
                    return Err(Error::Inadmissible(format!(
                        "gplus_nontrivial={}, integral_g={}, membership={:?}",
                        rep.gplus_nontrivial, rep.integral_g, rep.membership.verdict
                    )));
                }
                println!("{}", serde_json::to_string(&rep).unwrap());
            }
            let g = resolved.sample(&m)?;
            let opts = SolverOpts {
                seeds,
                tol,
                rng_seed,
                ..Default::default()
            };
            let res = first_eigenpair(&m, &g, p, &opts)?;
            println!("{}", serde_json::to_string(&res.summary()).unwrap());
            let pr = principality_check(&res);
            println!("{}", serde_json::to_string(&pr).unwrap());
            let spectrum = if oracle {
                if p != 2.0 {
                    return Err(Error::Usage("--oracle requires p = 2".into()));
                }
                let slice = dense_oracle_p2(&m, &g)?;
                println!(
                    "{}",
                    serde_json::json!({
                        "oracle_lambda1": slice.lambda1,
                        "oracle_lambda2": slice.lambda2,
                        "relative_gap_to_iterative": slice.lambda1.map(|l| (res.lambda1 - l).abs() / l),
                    })
                );
                Some(slice)
            } else {
                None
            };
            let probe = simplicity_isolation_probe(&res, spectrum.as_ref());
            println!("{}", serde_json::to_string(&probe).unwrap());
            if let Some(path) = phi_out {
                let rows: Vec<Vec<String>> = m
                    .vertices
                    .iter()
                    .zip(res.phi1.coeffs.iter())
                    .map(|(v, c)| vec![fmt17(v[0]), fmt17(v[1]), fmt17(*c)])
                    .collect();
                write_csv(&path, "x,y,phi", &rows)?;
            }
            Ok(())
        }
        Command::Bifurcate {
            mesh,
            weight,
            p,
            gamma,
            f_weight,
            ds,
            max_points,
            direction,
            rng_seed,
            out,
            plot,
        } => {
            check_p_range(p)?;
            let m = mesh.build()?;
            let resolved = weight.resolve(p)?;
            let g = resolved.sample(&m)?;
            let opts = SolverOpts {
                rng_seed,
                ..Default::default()
            };
            let res = first_eigenpair(&m, &g, p, &opts)?;
            let f = match f_weight {
                Some(name) => WeightArg { weight: name }.resolve(p)?.sample(&m)?,
                None => positive_support_indicator(&g),
            };
            let spec = PerturbationSpec::new(gamma, p, f)?;
            let cfg = ContinuationConfig {
                ds,
                max_points,
                direction,
                ..Default::default()
            };
            let branch = branch_from_first(&m, &g, &spec, p, &res, &cfg)?;
            let rows: Vec<Vec<String>> = branch
                .points
                .iter()
                .map(|pt| {
                    vec![
                        fmt17(pt.arclength),
                        fmt17(pt.lambda),
                        fmt17(pt.w1p_norm),
                        fmt17(pt.sup_norm),
                        pt.newton_iters.to_string(),
                    ]
                })
                .collect();
            write_csv(&out, "arclength,lambda,w1p_norm,sup_norm,newton_iters", &rows)?;
            let class = classify_branch(&branch);
            println!(
                "{}",
                serde_json::json!({
                    "lambda1": res.lambda1,
                    "points": branch.points.len(),
                    "termination": branch.termination,
                    "class": class,
                    "zero_norm_extrapolation": extrapolate_to_zero_norm(&branch.points),
                })
            );
            if plot {
                let series: Vec<(f64, f64)> = branch
                    .points
                    .iter()
                    .map(|pt| (pt.lambda, pt.w1p_norm))
                    .collect();
                let svg = out.with_extension("svg");
                write_svg_plot(&svg, &series, "bifurcation diagram", "lambda", "W1p norm")?;
            }
            Ok(())
        }
        Command::Scan {
            mesh,
            weight,
            p,
            gamma,
            lambda,
            rho,
            seeds,
            rng_seed,
        } => {
            check_p_range(p)?;
            let m = mesh.build()?;
            let resolved = weight.resolve(p)?;
            let g = resolved.sample(&m)?;
            let opts = SolverOpts {
                rng_seed,
                ..Default::default()
            };
            let res = first_eigenpair(&m, &g, p, &opts)?;
            let lambda_value = if lambda == "half-lambda1" {
                0.5 * res.lambda1
            } else {
                lambda
                    .parse()
                    .map_err(|e| Error::Usage(format!("bad lambda '{lambda}': {e}")))?
            };
            let f = positive_support_indicator(&g);
            let spec = PerturbationSpec::new(gamma, p, f)?;
            let report = no_bifurcation_scan(
                &m,
                &g,
                &spec,
                p,
                lambda_value,
                rho,
                seeds,
                rng_seed,
                Some(&res.phi1.coeffs),
            );
            println!("{}", serde_json::to_string(&report).unwrap());
            Ok(())
        }
        Command::Demo { rng_seed, out_dir, n } => demo(rng_seed, &out_dir, n),
    }
}

/// Rows `t,value` with both one-sided values at each breakpoint.
fn profile_rows(profile: &Profile) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    match profile {
        Profile::Step(s) => {
            for i in 0..s.levels.len() {
                rows.push(vec![fmt17(s.breakpoints[i]), fmt17(s.levels[i])]);
                rows.push(vec![fmt17(s.breakpoints[i + 1]), fmt17(s.levels[i])]);
            }
        }
        Profile::Analytic(_) => {
            let total = profile.total();
            for k in 0..=2048 {
                let t = total * (k as f64 + 0.5) / 2049.0;
                rows.push(vec![fmt17(t), fmt17(profile.value(t))]);
            }
        }
    }
    rows
}

/// The quadratic-case golden pipeline on the box domain.
fn demo(rng_seed: u64, out_dir: &Path, n: usize) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let p = 2.0;
    let mesh = Mesh::box_domain(0.25, n);
    let w = WeightSpec::parse("composite:g3-box:q=2-auto", p)?;

    let adm = admissibility(&w, p)?;
    write_jsonl(&out_dir.join("admissibility.jsonl"), &[&adm])?;
    if !adm.admissible {
        return Err(Error::Inadmissible("demo weight failed admissibility".into()));
    }

    let g = w.sample_on_boundary(&mesh)?;
    let profile = rearrange(&g);
    write_csv(
        &out_dir.join("weight_rearrangement.csv"),
        "t,value",
        &profile_rows(&Profile::Step(profile)),
    )?;

    let opts = SolverOpts {
        rng_seed,
        ..Default::default()
    };
    let res = first_eigenpair(&mesh, &g, p, &opts)?;
    let slice = dense_oracle_p2(&mesh, &g)?;
    let pr = principality_check(&res);
    let probe = simplicity_isolation_probe(&res, Some(&slice));
    write_jsonl(&out_dir.join("eigen.jsonl"), &[serde_json::json!({
        "summary": res.summary(),
        "principality": pr,
        "simplicity": probe,
        "oracle_lambda1": slice.lambda1,
        "oracle_lambda2": slice.lambda2,
    })])?;

    let spec = PerturbationSpec::new(3.0, p, positive_support_indicator(&g))?;
    let cfg = ContinuationConfig {
        max_points: 120,
        ..Default::default()
    };
    let branch = branch_from_first(&mesh, &g, &spec, p, &res, &cfg)?;
    let rows: Vec<Vec<String>> = branch
        .points
        .iter()
        .map(|pt| {
            vec![
                fmt17(pt.arclength),
                fmt17(pt.lambda),
                fmt17(pt.w1p_norm),
                fmt17(pt.sup_norm),
                pt.newton_iters.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out_dir.join("branch.csv"),
        "arclength,lambda,w1p_norm,sup_norm,newton_iters",
        &rows,
    )?;
    let series: Vec<(f64, f64)> = branch
        .points
        .iter()
        .map(|pt| (pt.lambda, pt.w1p_norm))
        .collect();
    write_svg_plot(
        &out_dir.join("branch.svg"),
        &series,
        "bifurcation diagram",
        "lambda",
        "W1p norm",
    )?;

    println!(
        "{}",
        serde_json::json!({
            "lambda1": res.lambda1,
            "oracle_lambda1": slice.lambda1,
            "branch_points": branch.points.len(),
            "zero_norm_extrapolation": extrapolate_to_zero_norm(&branch.points),
            "out_dir": out_dir.display().to_string(),
        })
    );
    Ok(())
}
