//! Text formats: solver configurations, curve files, surface specs and CSV
//! tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryCurve;
use crate::dirichlet::{AsymptoticData, DiskGrid, Initial, Solution, SolveOptions, Trace, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{Geodesic, HPoint, Horocycle, IdealPoint};
use crate::profiles::MeanCurvatureH;
use crate::surfaces::{default_geodesic, InvariantSurface};

/// Formats a number for CSV output, writing infinities as `inf`/`-inf`.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// A CSV table with a leading `#` comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comment: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(comment: impl Into<String>, header: &[&str]) -> Self {
        Self { comment: comment.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {} hcmc {}\n{}\n", self.comment, crate::VERSION, self.header.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Parses text produced by [`CsvTable::render`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let comment = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Parse("missing comment line".into()))?
            .to_string();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?
            .split(',')
            .map(str::to_string)
            .collect::<Vec<_>>();
        let mut rows = Vec::new();
        for l in lines.filter(|l| !l.trim().is_empty()) {
            let row = l
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != header.len() {
                return Err(Error::Parse(format!("row has {} cells, header has {}", row.len(), header.len())));
            }
            rows.push(row);
        }
        Ok(Self { comment, header, rows })
    }
}

fn default_r_max() -> f64 {
    8.0
}
fn default_n() -> usize {
    256
}
fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}
fn default_iters() -> usize {
    50
}

/// Run configuration for the Dirichlet solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R_max", default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_n")]
    pub n_rho: usize,
    #[serde(default = "default_n")]
    pub n_theta: usize,
    pub phi: AsymptoticData,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    /// Radius of the reported trace; defaults to `min(5, R_max − 1)`.
    #[serde(default)]
    pub rho_star: Option<f64>,
}

impl SolverConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SolverConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        self.grid()?;
        Ok(())
    }

    pub fn mean_curvature(&self) -> Result<MeanCurvatureH> {
        MeanCurvatureH::new(self.h)
    }

    pub fn grid(&self) -> Result<DiskGrid> {
        DiskGrid::new(self.r_max, self.n_rho, self.n_theta)
    }

    pub fn options(&self) -> SolveOptions {
        SolveOptions { tolerance: self.tolerance, max_iters: self.max_iters, initial: Initial::CapPlusMean }
    }

    pub fn rho_star(&self) -> f64 {
        self.rho_star.unwrap_or_else(|| 5.0_f64.min(self.r_max - 1.0))
    }
}

pub fn load_curve(path: &Path) -> Result<BoundaryCurve> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// `(rho, theta, u)` for every node.
pub fn grid_csv(sol: &Solution) -> String {
    let mut t = CsvTable::new(
        format!("H={} R_max={} n_rho={} n_theta={}", sol.h, sol.grid.r_max, sol.grid.n_rho, sol.grid.n_theta),
        &["rho", "theta", "u"],
    );
    for i in 0..sol.grid.rows() {
        for j in 0..sol.grid.n_theta {
            t.push(vec![sol.grid.rho(i), sol.grid.theta(j), sol.at(i, j)]);
        }
    }
    t.render()
}

/// `(theta, trace)` samples.
pub fn trace_csv(trace: &Trace, h: f64) -> String {
    let mut t = CsvTable::new(format!("H={h} rho_star={}", trace.rho_star), &["theta", "trace"]);
    for (a, v) in trace.theta.iter().zip(&trace.values) {
        t.push(vec![*a, *v]);
    }
    t.render()
}

/// Parses a surface description such as `cap`, `und:r=1`, `hyper:C=2`,
/// `hyper:C=1,q1=4.712,q2=1.571,plus=0` or `horo:base=0,level=0`.
pub fn parse_surface(spec: &str, h: MeanCurvatureH, reflect: bool) -> Result<InvariantSurface> {
    let (family, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = std::collections::BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got {kv:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::InvalidInput(format!("bad number in {kv:?}")))?;
        params.insert(k.trim().to_string(), v);
    }
    let get = |k: &str| params.get(k).copied();
    let need = |k: &str| get(k).ok_or_else(|| Error::InvalidInput(format!("surface {family:?} needs {k}=")));
    let center = HPoint::new(get("cx").unwrap_or(0.0), get("cy").unwrap_or(0.0))?;
    let surf = match family.trim() {
        "cap" => InvariantSurface::cap(h)?,
        "und" => InvariantSurface::rotational(h, need("r")?, center)?,
        "hyper" => {
            let c = get("C").or(get("c")).ok_or_else(|| Error::InvalidInput("surface \"hyper\" needs C=".into()))?;
            let g = match (get("q1"), get("q2")) {
                (Some(a), Some(b)) => {
                    let plus = get("plus").map(IdealPoint::new).unwrap_or_else(|| {
                        let mid = 0.5 * (a + b);
                        IdealPoint::new(mid)
                    });
                    Geodesic::new(IdealPoint::new(a), IdealPoint::new(b), plus)?
                }
                (None, None) => default_geodesic(),
                _ => return Err(Error::InvalidInput("give both q1 and q2, or neither".into())),
            };
            InvariantSurface::hyperbolic(h, c, g)?
        }
        "horo" => InvariantSurface::parabolic(
            h,
            Horocycle::new(IdealPoint::new(get("base").unwrap_or(0.0)), get("level").unwrap_or(0.0)),
        )?,
        other => return Err(Error::InvalidInput(format!("unknown surface family {other:?}"))),
    };
    if reflect {
        surf.alexandrov_reflect()
    } else {
        Ok(surf)
    }
}
