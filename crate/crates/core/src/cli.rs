//! Command-line interface of the `hcmc` binary.
//!
//! Exit codes: 0 on success, 1 when `verify` reports a failure, 2 for
//! option and input errors, 3 for domain errors, 4 when the solver does not
//! converge.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::boundary::{self, boundary_of, classify, cone_probe, estimate_weyl_interval, CurveType};
use crate::dirichlet::{
    self, asymptotic_trace, check_sandwich, discrete_cap, lower_barrier, solve_report, upper_barrier, AsymptoticData,
    DiskGrid, LowerSpec, SolveOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{laplacian_fd_lorentz, Horocycle, IdealPoint, Lorentz};
use crate::io::{self, CsvTable};
use crate::profiles::{lh, HyperbolicProfile, MeanCurvatureH, ParabolicProfile, Profile, RotationalProfile};
use crate::surfaces::{default_geodesic, plus_arc_midpoint, InvariantSurface, MeshSpec};

#[derive(Debug, Parser)]
#[command(name = "hcmc", version, about = "Invariant CMC-H surfaces in H²×ℝ and their boundaries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Und,
    Cap,
    Hyper,
    Horo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Obj,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a profile as CSV with columns s, phi, dphi.
    Profile {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: f64,
        /// Waist radius of the unduloid.
        #[arg(long)]
        r: Option<f64>,
        /// Parameter of the hyperbolic family.
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        s_max: f64,
        /// Start of the table; defaults to the domain edge (or −s_max).
        #[arg(long, allow_hyphen_values = true)]
        s_min: Option<f64>,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export a surface mesh.
    Mesh {
        /// Surface such as `cap`, `und:r=1`, `hyper:C=2`, `horo:level=0`.
        #[arg(long)]
        surface: String,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: f64,
        #[arg(long)]
        reflect: bool,
        #[arg(long, value_enum, default_value_t = MeshFormat::Obj)]
        format: MeshFormat,
        #[arg(long, default_value_t = 48)]
        n_level: usize,
        #[arg(long, default_value_t = 32)]
        n_s: usize,
        #[arg(long, default_value_t = 4.0)]
        s_extent: f64,
        #[arg(long, default_value_t = 3.0)]
        level_extent: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify a boundary curve read from a JSON file.
    Classify {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: f64,
    },
    /// Symbolic geodesic boundary of a catalogue surface.
    Boundary {
        #[arg(long)]
        surface: String,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: f64,
        #[arg(long)]
        reflect: bool,
    },
    /// Numerically estimate the limit slopes of a surface near an ideal point.
    Probe {
        #[arg(long)]
        surface: String,
        #[arg(long = "H", allow_hyphen_values = true)]
        h: f64,
        /// Ideal point, as an angle in radians.
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        /// Cone slope to test against.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<f64>,
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
    },
    /// Solve the asymptotic Dirichlet problem from a JSON configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Directory for grid.csv, trace.csv and report.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a quick self-check of every module.
    Verify,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Parse(_) | Error::Io(_) => 2,
        Error::NonConvergence { .. } | Error::LinearSolve(_) => 4,
        _ => 3,
    }
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to standard error. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    2
                }
            };
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hcmc: {e}");
            exit_code(&e)
        }
    }
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn profile_for(family: Family, h: MeanCurvatureH, r: Option<f64>, c: Option<f64>) -> Result<(Profile, String)> {
    Ok(match family {
        Family::Und => {
            let r = r.ok_or_else(|| Error::InvalidInput("--r is required for und".into()))?;
            if !(r > 0.0) {
                return Err(Error::InvalidInput(format!("--r must be positive, got {r}")));
            }
            (Profile::Rotational(RotationalProfile::new(h, r)?), format!("und r={r}"))
        }
        Family::Cap => (Profile::Rotational(RotationalProfile::new(h, 0.0)?), "cap".into()),
        Family::Hyper => {
            let c = c.ok_or_else(|| Error::InvalidInput("--C is required for hyper".into()))?;
            (Profile::Hyperbolic(HyperbolicProfile::new(h, c)?), format!("hyper C={c}"))
        }
        Family::Horo => (Profile::Parabolic(ParabolicProfile::new(h)?), "horo".into()),
    })
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Profile { family, h, r, c, s_max, s_min, n, output } => {
            let h = MeanCurvatureH::new(*h)?;
            if *n < 1 {
                return Err(Error::InvalidInput("--n must be at least 1".into()));
            }
            let (p, desc) = profile_for(*family, h, *r, *c)?;
            let edge = p.edge();
            let start = s_min.unwrap_or(if edge.is_finite() { edge } else { -s_max });
            if !(start < *s_max) {
                return Err(Error::InvalidInput(format!("empty range [{start}, {s_max}]")));
            }
            let mut t = CsvTable::new(format!("{desc} H={} lH={}", h.value(), lh(h)), &["s", "phi", "dphi"]);
            for k in 0..=*n {
                let s = start + (s_max - start) * k as f64 / *n as f64;
                if s == edge && !p.edge_included() {
                    continue;
                }
                t.push(vec![s, p.phi(s)?, p.dphi(s)]);
            }
            emit(&t.render(), output, out)?;
        }
        Command::Mesh { surface, h, reflect, format, n_level, n_s, s_extent, level_extent, output } => {
            let h = MeanCurvatureH::new(*h)?;
            let surf = io::parse_surface(surface, h, *reflect)?;
            let spec = MeshSpec {
                n_level: *n_level,
                n_s: *n_s,
                s_extent: *s_extent,
                level_extent: *level_extent,
                offset: 0.0,
            };
            let mesh = surf.sample_mesh(&spec)?;
            let text = match format {
                MeshFormat::Obj => mesh.to_obj(),
                MeshFormat::Csv => mesh.to_csv(),
            };
            emit(&text, output, out)?;
        }
        Command::Classify { curve, h } => {
            let h = MeanCurvatureH::new(*h)?;
            let c = io::load_curve(curve)?;
            let v = classify(&c, h)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Command::Boundary { surface, h, reflect } => {
            let h = MeanCurvatureH::new(*h)?;
            let surf = io::parse_surface(surface, h, *reflect)?;
            let b = boundary_of(&surf);
            let verdict = match &b.curve {
                Some(c) => Some(classify(c, h)?),
                None => None,
            };
            let doc = json!({
                "surface": surf.describe(),
                "boundary": b,
                "verdict": verdict,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Probe { surface, h, q, m, t_max } => {
            let h = MeanCurvatureH::new(*h)?;
            let surf = io::parse_surface(surface, h, false)?;
            let q = IdealPoint::new(*q);
            let interval = estimate_weyl_interval(&surf, q);
            let probe = m.map(|m| cone_probe(&surf, q, m, *t_max));
            let doc = json!({
                "surface": surf.describe(),
                "q": q.theta,
                "interval": interval.map(|(a, b)| [a, b]),
                "probe": probe,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Solve { config, out_dir } => {
            let cfg = io::SolverConfig::load(config)?;
            let h = cfg.mean_curvature()?;
            let grid = cfg.grid()?;
            let sol = solve_report(&grid, h, &cfg.phi, &cfg.options())?;
            let trace = asymptotic_trace(&sol, cfg.rho_star())?;
            let report = json!({
                "converged": sol.converged,
                "iterations": sol.iterations,
                "residual_norm": sol.residual_norm,
                "history": sol.history,
                "rho_star": trace.rho_star,
                "trace_max_deviation": trace.max_deviation(&cfg.phi),
                "version": crate::VERSION,
            });
            if let Some(dir) = out_dir {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("grid.csv"), io::grid_csv(&sol))?;
                fs::write(dir.join("trace.csv"), io::trace_csv(&trace, sol.h))?;
                fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            } else {
                out.write_all(io::trace_csv(&trace, sol.h).as_bytes())?;
            }
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
            if !sol.converged {
                return Err(Error::NonConvergence { iterations: sol.iterations, residual: sol.residual_norm });
            }
        }
        Command::Verify => {
            let checks = verify_suite();
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                writeln!(out, "{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            return Ok(if ok { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// One line of the `verify` report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Quick self-checks over every module.
pub fn verify_suite() -> Vec<Check> {
    let h = MeanCurvatureH::new(0.25).expect("valid H");
    let l = lh(h).value();
    let g = default_geodesic();
    vec![
        check("closed forms C=±1, horo", || {
            let mut worst: f64 = 0.0;
            for c in [1.0, -1.0] {
                let p = HyperbolicProfile::new(h, c)?;
                for k in 1..=5 {
                    let s = p.m_c + 0.5 * k as f64;
                    worst = worst.max((p.phi(s)? - p.phi_closed(s)?).abs());
                }
            }
            let p = ParabolicProfile::new(h)?;
            for k in 0..=5 {
                worst = worst.max((p.phi(k as f64)? - p.phi_closed(k as f64)?).abs());
            }
            Ok((worst < 1e-8, format!("max diff {worst:.2e}")))
        }),
        check("M_C edge", || {
            let p = HyperbolicProfile::new(h, 2.0)?;
            let e = (p.g(p.m_c) - 1.0).abs();
            Ok((e < 1e-10, format!("|g(M_C) - 1| = {e:.2e}")))
        }),
        check("distance-field Laplacians", || {
            let x = Lorentz::ORIGIN.exp(&Lorentz([0.0, 0.6, 0.8]), 1.3);
            let s = g.signed_dist_lorentz(&x);
            let lap = laplacian_fd_lorentz(|p| g.signed_dist_lorentz(p), &x, 1e-3);
            let horo = Horocycle::new(IdealPoint::new(0.3), 0.0);
            let lap_h = laplacian_fd_lorentz(|p| horo.busemann(p), &x, 1e-3);
            let e = (lap - s.tanh()).abs().max((lap_h - 1.0).abs());
            Ok((e < 1e-4, format!("max error {e:.2e}")))
        }),
        check("CMC residual", || {
            let surfaces = [
                InvariantSurface::cap(h)?,
                InvariantSurface::rotational(h, 1.0, crate::geometry::HPoint::origin())?,
                InvariantSurface::hyperbolic(h, 2.0, g)?,
                InvariantSurface::hyperbolic(h, 0.5, g)?,
                InvariantSurface::parabolic(h, Horocycle::new(IdealPoint::new(0.0), 0.0))?,
            ];
            let mut worst: f64 = 0.0;
            for s in &surfaces {
                let base = s.profile.edge().max(-2.0) + 0.3;
                for k in 0..4 {
                    let x = s.point_at(base + 0.4 * k as f64, 0.2 * k as f64).to_hpoint();
                    worst = worst.max(s.qh_residual(&x)?.abs());
                }
            }
            Ok((worst < 1e-6, format!("max |Q_H| {worst:.2e}")))
        }),
        check("asymptotic slopes", || {
            let ps = [
                Profile::Rotational(RotationalProfile::new(h, 0.0)?),
                Profile::Rotational(RotationalProfile::new(h, 1.0)?),
                Profile::Hyperbolic(HyperbolicProfile::new(h, 2.0)?),
                Profile::Parabolic(ParabolicProfile::new(h)?),
            ];
            let worst = ps.iter().map(|p| (p.dphi(30.0) - l).abs()).fold(0.0, f64::max);
            Ok((worst < 1e-3, format!("max |phi'(30) - lH| {worst:.2e}")))
        }),
        check("boundary classification", || {
            let cases = [
                (InvariantSurface::cap(h)?, CurveType::I),
                (InvariantSurface::hyperbolic(h, 2.0, g)?.alexandrov_reflect()?, CurveType::III),
                (InvariantSurface::hyperbolic(h, 1.0, g)?, CurveType::IV),
                (InvariantSurface::hyperbolic(h, -1.0, g)?, CurveType::IV),
            ];
            let mut ok = true;
            for (s, t) in &cases {
                let b = boundary_of(s);
                let v = classify(b.curve.as_ref().ok_or_else(|| Error::Domain("not a curve".into()))?, h)?;
                ok &= v.curve_type == Some(*t);
            }
            let cyl = classify(&boundary::cylinder_boundary(&g), h)?;
            ok &= cyl.curve_type == Some(CurveType::V);
            Ok((ok, "cap I, hund III, C=±1 IV, cylinder V".into()))
        }),
        check("limit-slope probe", || {
            let s = InvariantSurface::hyperbolic(h, 2.0, g)?;
            let (lo, hi) = estimate_weyl_interval(&s, g.q1).ok_or_else(|| Error::Domain("no paths".into()))?;
            let (a, b) = estimate_weyl_interval(&s, plus_arc_midpoint(&g)).ok_or_else(|| Error::Domain("no paths".into()))?;
            let e = lo.abs().max((hi - l).abs()).max((a - l).abs()).max((b - l).abs());
            Ok((e < 1e-2, format!("q1 [{lo:.4}, {hi:.4}], interior [{a:.4}, {b:.4}]")))
        }),
        check("Dirichlet exactness", || {
            let grid = DiskGrid::new(6.0, 32, 16)?;
            let sol = dirichlet::solve(&grid, h, &AsymptoticData::Constant(0.4), &SolveOptions::default())?;
            let dcap = discrete_cap(&grid, h)?;
            let mut e: f64 = 0.0;
            for i in 0..grid.rows() {
                for j in 0..grid.n_theta {
                    e = e.max((sol.at(i, j) - dcap[i] - 0.4).abs());
                }
            }
            Ok((e <= 1e-10, format!("max |u - cap - c| {e:.2e}")))
        }),
        check("barrier sandwich", || {
            let grid = DiskGrid::new(6.0, 48, 32)?;
            let sol = dirichlet::solve(&grid, h, &AsymptoticData::Constant(0.0), &SolveOptions::default())?;
            let x = IdealPoint::new(0.0);
            let lo = lower_barrier(h, x, 0.1, LowerSpec::default())?;
            let up = upper_barrier(h, x, 0.1, 1.0)?;
            let rep = check_sandwich(&sol, &lo, &up)?;
            let bad = check_sandwich(&sol, &lo.shifted(0.2), &up)?;
            Ok((rep.passed() && !bad.passed(), format!("violations {} / control {}", rep.lower_violations + rep.upper_violations, bad.lower_violations)))
        }),
    ]
}
