//! Asymptotic Dirichlet problem for `Q_H(u) = div(∇u/√(1+|∇u|²)) − 2H = 0`.
//!
//! The plane is truncated to a geodesic disk of radius `R_max` in geodesic
//! polar coordinates `(ρ, θ)`, metric `dρ² + sinh²ρ dθ²`. Boundary data are
//! offsets from the H-cap: `u(R_max, θ) = cap(R_max) + φ(θ)`. The operator is
//! discretized by finite volumes on a cell-centred grid and solved by damped
//! Newton iteration with a sparse LU factorization of the exact Jacobian.
//!
//! Barriers from catalogue surfaces (caps and the `C = 1` hyperbolic graph)
//! are provided to check the computed solutions.

use std::f64::consts::{PI, TAU};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geodesic, IdealPoint, Lorentz};
use crate::profiles::{cap_closed, lh, HyperbolicProfile, MeanCurvatureH};

/// Default solver tolerance on the max-norm of the discrete residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Grid in geodesic polar coordinates.
///
/// A disk grid has cell centres `ρ_i = (i + ½)h`, `i = 0..n_rho`, with the
/// Dirichlet ring at `ρ_{n_rho} = R_max`. The innermost cells are wedges
/// meeting at the origin. An annulus grid has nodes `ρ_i = ρ_in + i h`,
/// `i = 0..=n_rho+1`, with Dirichlet rings at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub r_max: f64,
    pub n_rho: usize,
    pub n_theta: usize,
    /// Inner Dirichlet radius; `None` for a full disk.
    pub rho_in: Option<f64>,
}

impl DiskGrid {
    pub fn new(r_max: f64, n_rho: usize, n_theta: usize) -> Result<Self> {
        let g = Self { r_max, n_rho, n_theta, rho_in: None };
        g.validate()?;
        Ok(g)
    }

    pub fn annulus(rho_in: f64, r_max: f64, n_rho: usize, n_theta: usize) -> Result<Self> {
        let g = Self { r_max, n_rho, n_theta, rho_in: Some(rho_in) };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("R_max must be positive, got {}", self.r_max)));
        }
        if self.n_rho < 2 || self.n_theta < 4 || self.n_theta % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "need n_rho >= 2 and an even n_theta >= 4, got {} x {}",
                self.n_rho, self.n_theta
            )));
        }
        if let Some(a) = self.rho_in {
            if !(a > 0.0 && a < self.r_max) {
                return Err(Error::InvalidInput(format!("inner radius {a} outside (0, R_max)")));
            }
        }
        Ok(())
    }

    /// Radial spacing.
    pub fn h(&self) -> f64 {
        match self.rho_in {
            None => self.r_max / (self.n_rho as f64 + 0.5),
            Some(a) => (self.r_max - a) / (self.n_rho as f64 + 1.0),
        }
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    /// Number of rows, Dirichlet rings included.
    pub fn rows(&self) -> usize {
        match self.rho_in {
            None => self.n_rho + 1,
            Some(_) => self.n_rho + 2,
        }
    }

    /// Rows carrying unknowns.
    pub fn unknown_rows(&self) -> std::ops::Range<usize> {
        match self.rho_in {
            None => 0..self.n_rho,
            Some(_) => 1..self.n_rho + 1,
        }
    }

    pub fn rho(&self, i: usize) -> f64 {
        match self.rho_in {
            None => (i as f64 + 0.5) * self.h(),
            Some(a) => a + i as f64 * self.h(),
        }
    }

    /// Smallest node radius.
    pub fn rho_min(&self) -> f64 {
        self.rho(0)
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn len(&self) -> usize {
        self.rows() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    /// Node on the hyperboloid.
    pub fn point(&self, i: usize, j: usize) -> Lorentz {
        polar_point(self.rho(i), self.theta(j))
    }

    fn is_unknown(&self, i: usize) -> bool {
        self.unknown_rows().contains(&i)
    }

    /// Canonical node for a possibly out-of-range stencil position. Row −1
    /// of a disk is the reflection of row 0 through the origin.
    fn node(&self, i: isize, j: isize) -> (usize, usize) {
        let n = self.n_theta as isize;
        if i < 0 {
            debug_assert!(self.rho_in.is_none() && i == -1);
            (0, (j + n / 2).rem_euclid(n) as usize)
        } else {
            (i as usize, j.rem_euclid(n) as usize)
        }
    }
}

/// The point at geodesic polar coordinates `(ρ, θ)` about the origin.
pub fn polar_point(rho: f64, theta: f64) -> Lorentz {
    Lorentz([rho.cosh(), rho.sinh() * theta.cos(), rho.sinh() * theta.sin()])
}

/// Boundary data on `S_H`, as offsets from the cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoticData {
    Constant(f64),
    /// `a0 + Σ cos[k−1]·cos kθ + Σ sin[k−1]·sin kθ`.
    Fourier {
        #[serde(default)]
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// Samples `(θ, φ)`, interpolated linearly and periodically.
    Table(Vec<(f64, f64)>),
}

impl AsymptoticData {
    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            AsymptoticData::Constant(c) => *c,
            AsymptoticData::Fourier { a0, cos, sin } => {
                let mut v = *a0;
                for (k, c) in cos.iter().enumerate() {
                    v += c * ((k + 1) as f64 * theta).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    v += s * ((k + 1) as f64 * theta).sin();
                }
                v
            }
            AsymptoticData::Table(rows) => periodic_interp(rows, theta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let AsymptoticData::Table(rows) = self {
            if rows.is_empty() {
                return Err(Error::InvalidInput("empty boundary table".into()));
            }
        }
        let bad = (0..64).map(|k| self.eval(TAU * k as f64 / 64.0)).any(|v| !v.is_finite());
        if bad {
            return Err(Error::InvalidInput("boundary data is not finite".into()));
        }
        Ok(())
    }

    /// Largest jump between consecutive samples on an `n`-point grid, a
    /// discrete modulus of continuity.
    pub fn modulus(&self, n: usize) -> f64 {
        (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                let b = TAU * (k + 1) as f64 / n as f64;
                (self.eval(b) - self.eval(a)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `(min, mean, max)` over `n` equally spaced angles.
    pub fn stats(&self, n: usize) -> (f64, f64, f64) {
        let vals: Vec<f64> = (0..n).map(|k| self.eval(TAU * k as f64 / n as f64)).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min, vals.iter().sum::<f64>() / n as f64, max)
    }
}

fn periodic_interp(rows: &[(f64, f64)], theta: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|&(t, v)| (t.rem_euclid(TAU), v)).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if pts.len() == 1 {
        return pts[0].1;
    }
    let t = theta.rem_euclid(TAU);
    let k = pts.partition_point(|p| p.0 <= t);
    let (a, b) = if k == 0 || k == pts.len() {
        let last = pts[pts.len() - 1];
        let first = pts[0];
        ((last.0 - TAU, last.1), first)
    } else {
        (pts[k - 1], pts[k])
    };
    let (ta, tb) = if k == 0 { (a.0, b.0) } else if k == pts.len() { (a.0 + TAU, b.0 + TAU) } else { (a.0, b.0) };
    let w = if tb > ta { (t - ta) / (tb - ta) } else { 0.0 };
    a.1 + w * (b.1 - a.1)
}

// ---------------------------------------------------------------------------
// Discrete operator

struct Flux {
    value: f64,
    /// Derivatives with respect to stencil nodes.
    grad: [((usize, usize), f64); 6],
    /// Derivatives with `W` held fixed.
    frozen: [((usize, usize), f64); 2],
}

fn radial_face(grid: &DiskGrid, u: &[f64], i: usize, j: usize) -> Flux {
    // face between rows i and i+1
    let (h, dt) = (grid.h(), grid.dtheta());
    let val = |n: (usize, usize)| u[grid.index(n.0, n.1)];
    let (ji, ii) = (j as isize, i as isize);
    let c0 = (i, j);
    let c1 = (i + 1, j);
    let p0 = grid.node(ii, ji + 1);
    let m0 = grid.node(ii, ji - 1);
    let p1 = grid.node(ii + 1, ji + 1);
    let m1 = grid.node(ii + 1, ji - 1);
    let a = (val(c1) - val(c0)) / h;
    let b = (val(p0) - val(m0) + val(p1) - val(m1)) / (4.0 * dt);
    let sf = (0.5 * (grid.rho(i) + grid.rho(i + 1))).sinh();
    let w2 = 1.0 + a * a + b * b / (sf * sf);
    let w = w2.sqrt();
    let w3 = w2 * w;
    let da = sf * (1.0 + b * b / (sf * sf)) / w3;
    let db = -a * b / (sf * w3);
    Flux {
        value: sf * a / w,
        grad: [
            (c1, da / h),
            (c0, -da / h),
            (p0, db / (4.0 * dt)),
            (m0, -db / (4.0 * dt)),
            (p1, db / (4.0 * dt)),
            (m1, -db / (4.0 * dt)),
        ],
        frozen: [(c1, sf / (w * h)), (c0, -sf / (w * h))],
    }
}

fn angular_face(grid: &DiskGrid, u: &[f64], i: usize, j: usize) -> Flux {
    // face between columns j and j+1 in row i
    let (h, dt) = (grid.h(), grid.dtheta());
    let val = |n: (usize, usize)| u[grid.index(n.0, n.1)];
    let (ii, ji) = (i as isize, j as isize);
    let c0 = (i, j);
    let c1 = grid.node(ii, ji + 1);
    let up0 = grid.node(ii + 1, ji);
    let dn0 = grid.node(ii - 1, ji);
    let up1 = grid.node(ii + 1, ji + 1);
    let dn1 = grid.node(ii - 1, ji + 1);
    let b = (val(c1) - val(c0)) / dt;
    let a = (val(up0) - val(dn0) + val(up1) - val(dn1)) / (4.0 * h);
    let s2 = grid.rho(i).sinh().powi(2);
    let w2 = 1.0 + a * a + b * b / s2;
    let w = w2.sqrt();
    let w3 = w2 * w;
    let db = (1.0 + a * a) / (s2 * w3);
    let da = -a * b / (s2 * w3);
    Flux {
        value: b / (s2 * w),
        grad: [
            (c1, db / dt),
            (c0, -db / dt),
            (up0, da / (4.0 * h)),
            (dn0, -da / (4.0 * h)),
            (up1, da / (4.0 * h)),
            (dn1, -da / (4.0 * h)),
        ],
        frozen: [(c1, 1.0 / (s2 * w * dt)), (c0, -1.0 / (s2 * w * dt))],
    }
}

/// Which matrix [`assemble`] builds alongside the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Matrix {
    None,
    Jacobian,
    /// Frozen-coefficient operator `v ↦ div(∇v/W(u))`.
    Picard,
}

/// Residual at unknown nodes and, optionally, a matrix as triplets over
/// unknown indices.
fn assemble(grid: &DiskGrid, u: &[f64], h: f64, matrix: Matrix) -> (Vec<f64>, Vec<Triplet<usize, usize, f64>>) {
    let jac = matrix != Matrix::None;
    let rows = grid.unknown_rows();
    let first = rows.start;
    let nt = grid.n_theta;
    let n = rows.len() * nt;
    let unknown = |node: (usize, usize)| grid.is_unknown(node.0).then(|| (node.0 - first) * nt + node.1);
    let (hr, dt) = (grid.h(), grid.dtheta());
    let mut res = vec![0.0; n];
    let mut trips = if jac { Vec::with_capacity(n * 13) } else { Vec::new() };

    for i in rows.clone() {
        let vol = hr * grid.rho(i).sinh();
        for j in 0..nt {
            let row = (i - first) * nt + j;
            let mut q = -2.0 * h;
            let mut push = |f: &Flux, scale: f64, q: &mut f64| {
                *q += scale * f.value;
                if jac {
                    let entries: &[((usize, usize), f64)] = if matrix == Matrix::Picard { &f.frozen } else { &f.grad };
                    for &(node, d) in entries {
                        if let Some(col) = unknown(node) {
                            trips.push(Triplet::new(row, col, scale * d));
                        }
                    }
                }
            };
            push(&radial_face(grid, u, i, j), 1.0 / vol, &mut q);
            if i > 0 {
                push(&radial_face(grid, u, i - 1, j), -1.0 / vol, &mut q);
            }
            push(&angular_face(grid, u, i, j), 1.0 / dt, &mut q);
            push(&angular_face(grid, u, i, (j + nt - 1) % nt), -1.0 / dt, &mut q);
            res[row] = q;
        }
    }
    (res, trips)
}

/// Discrete `Q_H` at every node of `u`, zero on the Dirichlet rings.
///
/// Conservative form `(1/sinh ρ) ∂ρ(sinh ρ · u_ρ/W) + ∂θ(u_θ/(sinh²ρ W)) − 2H`
/// with `W = √(1 + u_ρ² + u_θ²/sinh²ρ)`; the flux through the origin is zero.
pub fn discrete_qh(grid: &DiskGrid, u: &[f64], h: MeanCurvatureH) -> Result<Vec<f64>> {
    if u.len() != grid.len() {
        return Err(Error::InvalidInput(format!("expected {} values, got {}", grid.len(), u.len())));
    }
    let (res, _) = assemble(grid, u, h.value(), Matrix::None);
    let mut out = vec![0.0; grid.len()];
    let start = grid.index(grid.unknown_rows().start, 0);
    out[start..start + res.len()].copy_from_slice(&res);
    Ok(out)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Samples a function of `(ρ, θ)` on every node of the grid.
pub fn sample(grid: &DiskGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut u = vec![0.0; grid.len()];
    for i in 0..grid.rows() {
        for j in 0..grid.n_theta {
            u[grid.index(i, j)] = f(grid.rho(i), grid.theta(j));
        }
    }
    u
}

/// The cap sampled at every node.
pub fn sampled_cap(grid: &DiskGrid, h: MeanCurvatureH) -> Result<Vec<f64>> {
    let radial: Vec<f64> = (0..grid.rows()).map(|i| cap_closed(h, grid.rho(i))).collect::<Result<_>>()?;
    Ok(radial_field(grid, &radial))
}

/// The exact discrete solution with radial symmetry on a disk grid, equal
/// to `cap(R_max)` on the Dirichlet ring. Returned per row.
///
/// For radial data the angular fluxes vanish and the scheme reduces to
/// `sinh ρ_{i+½} ψ_{i+½} = sinh ρ_{i−½} ψ_{i−½} + 2H h sinh ρ_i`, where
/// `ψ = a/√(1+a²)` and `a` is the radial difference quotient.
pub fn discrete_cap(grid: &DiskGrid, h: MeanCurvatureH) -> Result<Vec<f64>> {
    let hv = h.subcritical()?;
    if grid.rho_in.is_some() {
        return Err(Error::InvalidInput("the discrete cap lives on a disk grid".into()));
    }
    let n = grid.n_rho;
    let step = grid.h();
    let mut slopes = vec![0.0; n];
    let mut acc = 0.0;
    for (i, slope) in slopes.iter_mut().enumerate() {
        acc += 2.0 * hv * step * grid.rho(i).sinh();
        let psi = acc / (0.5 * (grid.rho(i) + grid.rho(i + 1))).sinh();
        if psi >= 1.0 {
            return Err(Error::Domain("discrete cap slope became vertical".into()));
        }
        *slope = psi / (1.0 - psi * psi).sqrt();
    }
    let mut u = vec![0.0; n + 1];
    u[n] = cap_closed(h, grid.r_max)?;
    for i in (0..n).rev() {
        u[i] = u[i + 1] - step * slopes[i];
    }
    Ok(u)
}

/// Expands per-row values to a full grid array.
pub fn radial_field(grid: &DiskGrid, rows: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; grid.len()];
    for (i, v) in rows.iter().enumerate().take(grid.rows()) {
        u[i * grid.n_theta..(i + 1) * grid.n_theta].fill(*v);
    }
    u
}

// ---------------------------------------------------------------------------
// Solver

/// Initial guess. The constant variants are blended into the ring data
/// across the outer band `ρ ∈ [R_max − 3, R_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Initial {
    /// Discrete cap plus the mean of the data.
    CapPlusMean,
    /// Discrete cap plus a constant.
    CapPlus(f64),
    /// Explicit values at every node. The outer ring is carried to the data
    /// by continuation.
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iters: usize,
    pub initial: Initial,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, max_iters: 50, initial: Initial::CapPlusMean }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub grid: DiskGrid,
    pub h: f64,
    /// Values at every node, Dirichlet rings included.
    pub u: Vec<f64>,
    /// Max-norm of the discrete residual, evaluated on `u − u(centre)`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm after each iteration, starting from the initial guess.
    pub history: Vec<f64>,
}

impl Solution {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.u[self.grid.index(i, j)]
    }

    /// Value at radius `rho`, linear between rows, at column `j`.
    pub fn radial_interp(&self, rho: f64, j: usize) -> f64 {
        interp_rows(&self.grid, rho, |i| self.at(i, j))
    }
}

fn interp_rows(grid: &DiskGrid, rho: f64, f: impl Fn(usize) -> f64) -> f64 {
    let last = grid.rows() - 1;
    let mut i = 0;
    while i + 1 < last && grid.rho(i + 1) < rho {
        i += 1;
    }
    let (r0, r1) = (grid.rho(i), grid.rho(i + 1));
    let w = ((rho - r0) / (r1 - r0)).clamp(0.0, 1.0);
    f(i) * (1.0 - w) + f(i + 1) * w
}

/// Solves `M δ = −res` for the matrix `M` built at `u`, reusing the symbolic
/// factorization across calls.
fn step(
    grid: &DiskGrid,
    u: &[f64],
    h: f64,
    matrix: Matrix,
    symbolic: &mut Option<SymbolicLu<usize>>,
) -> Result<Vec<f64>> {
    let n = grid.unknown_rows().len() * grid.n_theta;
    let (res, trips) = assemble(grid, u, h, matrix);
    let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
        .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    if symbolic.is_none() {
        *symbolic = Some(SymbolicLu::try_new(m.symbolic()).map_err(|e| Error::LinearSolve(format!("{e:?}")))?);
    }
    let lu = Lu::try_new_with_symbolic(symbolic.clone().unwrap(), m.as_ref())
        .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let mut rhs = Mat::<f64>::from_fn(n, 1, |k, _| -res[k]);
    lu.solve_in_place(rhs.as_mut());
    Ok((0..n).map(|k| rhs[(k, 0)]).collect())
}

/// Residual norms of an iterate: max-norm and l2 merit.
#[derive(Debug, Clone, Copy)]
struct Norms {
    max: f64,
    l2: f64,
}

fn norms(grid: &DiskGrid, u: &[f64], h: f64) -> Norms {
    let (r, _) = assemble(grid, u, h, Matrix::None);
    Norms { max: max_abs(&r), l2: l2(&r) }
}

/// Backtracking from a full step, halving down to 1/1024. A step is taken
/// when it lowers the l2 merit or the max-norm.
fn line_search(grid: &DiskGrid, u: &[f64], h: f64, delta: &[f64], cur: Norms, tolerance: f64) -> Option<(Vec<f64>, Norms)> {
    let first = grid.index(grid.unknown_rows().start, 0);
    let mut lambda = 1.0;
    while lambda >= 1.0 / 1024.0 {
        let mut trial = u.to_vec();
        for (k, d) in delta.iter().enumerate() {
            trial[first + k] += lambda * d;
        }
        let t = norms(grid, &trial, h);
        let better = t.l2 < cur.l2 || t.max < cur.max || (cur.max <= tolerance && t.max <= cur.max);
        if t.max.is_finite() && better {
            return Some((trial, t));
        }
        lambda *= 0.5;
    }
    None
}

/// Damped Newton iteration with fixed Dirichlet rows taken from `u0`. When
/// the Newton line search fails, a frozen-coefficient (Picard) step is tried
/// instead. Returns the best iterate, converged or not.
pub fn newton(grid: &DiskGrid, h: MeanCurvatureH, mut u: Vec<f64>, tolerance: f64, max_iters: usize) -> Result<Solution> {
    let hv = h.subcritical()?;
    if u.len() != grid.len() {
        return Err(Error::InvalidInput(format!("expected {} values, got {}", grid.len(), u.len())));
    }
    // Q_H ignores constants; iterating on u − u(centre) keeps the values small
    // where the angular stencil is stiffest, which lowers the round-off floor
    let mut offset = 0.0;
    let recentre = |u: &mut [f64], offset: &mut f64| {
        let k = u[0];
        u.iter_mut().for_each(|v| *v -= k);
        *offset += k;
    };
    recentre(&mut u, &mut offset);
    let mut cur = norms(grid, &u, hv);
    let mut history = vec![cur.max];
    let mut iterations = 0;
    let mut polished = false;
    let mut sym_newton = None;
    let mut sym_picard = None;

    while iterations < max_iters {
        if cur.max <= tolerance && polished {
            break;
        }
        let delta = step(grid, &u, hv, Matrix::Jacobian, &mut sym_newton)?;
        let mut accepted = line_search(grid, &u, hv, &delta, cur, tolerance);
        if accepted.is_none() && cur.max > tolerance {
            let delta = step(grid, &u, hv, Matrix::Picard, &mut sym_picard)?;
            accepted = line_search(grid, &u, hv, &delta, cur, tolerance);
        }
        iterations += 1;
        match accepted {
            Some((trial, _)) => {
                let was_converged = cur.max <= tolerance;
                u = trial;
                recentre(&mut u, &mut offset);
                cur = norms(grid, &u, hv);
                history.push(cur.max);
                if was_converged {
                    polished = true;
                } else if cur.max <= tolerance {
                    // one more full step drives the residual to round-off
                    polished = false;
                }
            }
            None => {
                if cur.max <= tolerance {
                    polished = true;
                } else {
                    break;
                }
            }
        }
    }
    u.iter_mut().for_each(|v| *v += offset);
    Ok(Solution {
        grid: grid.clone(),
        h: hv,
        u,
        residual_norm: cur.max,
        iterations,
        converged: cur.max <= tolerance,
        history,
    })
}

/// Outer Dirichlet values `cap(R_max) + φ(θ)`.
pub fn boundary_ring(grid: &DiskGrid, h: MeanCurvatureH, data: &AsymptoticData) -> Result<Vec<f64>> {
    let c = cap_closed(h, grid.r_max)?;
    Ok((0..grid.n_theta).map(|j| c + data.eval(grid.theta(j))).collect())
}

/// Solves `Q_H(u) = 0` on the disk with `u = cap(R_max) + φ` on the outer
/// ring. Fails with [`Error::NonConvergence`] when the tolerance is not met.
pub fn solve(grid: &DiskGrid, h: MeanCurvatureH, data: &AsymptoticData, opts: &SolveOptions) -> Result<Solution> {
    let sol = solve_report(grid, h, data, opts)?;
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NonConvergence { iterations: sol.iterations, residual: sol.residual_norm })
    }
}

/// Newton iterations allowed per continuation stage.
const STAGE_ITERS: usize = 12;

/// Smallest continuation step before giving up.
const MIN_STAGE: f64 = 1.0 / 64.0;

/// Width of the outer band over which the constant initial guesses are
/// blended into the ring data.
const BLEND_WIDTH: f64 = 3.0;

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// As [`solve`], but returns the best iterate even without convergence.
pub fn solve_report(grid: &DiskGrid, h: MeanCurvatureH, data: &AsymptoticData, opts: &SolveOptions) -> Result<Solution> {
    h.subcritical()?;
    data.validate()?;
    if grid.rho_in.is_some() {
        return Err(Error::InvalidInput("solve expects a disk grid; use newton for annuli".into()));
    }
    let dcap = discrete_cap(grid, h)?;
    let base = radial_field(grid, &dcap);
    let mut u = match &opts.initial {
        Initial::CapPlusMean => {
            let (_, mean, _) = data.stats(grid.n_theta);
            base.iter().map(|v| v + mean).collect()
        }
        Initial::CapPlus(c) => base.iter().map(|v| v + c).collect(),
        Initial::Values(v) => {
            if v.len() != grid.len() {
                return Err(Error::InvalidInput(format!("initial guess has {} values, need {}", v.len(), grid.len())));
            }
            v.clone()
        }
    };
    let target = boundary_ring(grid, h, data)?;
    let last = grid.rows() - 1;
    let start: Vec<f64> = (0..grid.n_theta).map(|j| u[grid.index(last, j)]).collect();
    let weights: Vec<f64> = (0..grid.rows())
        .map(|i| smoothstep((grid.rho(i) - (grid.r_max - BLEND_WIDTH)) / BLEND_WIDTH))
        .collect();
    // moves the ring from `from` to `to` along the data path, carrying the
    // outer band of the interior with it
    let advance = |u: &[f64], from: f64, to: f64| -> Vec<f64> {
        let mut v = u.to_vec();
        for (i, w) in weights.iter().enumerate() {
            for j in 0..grid.n_theta {
                v[grid.index(i, j)] += w * (to - from) * (target[j] - start[j]);
            }
        }
        for j in 0..grid.n_theta {
            v[grid.index(last, j)] = start[j] + to * (target[j] - start[j]);
        }
        v
    };

    // continuation in the ring data, halving the step whenever a stage fails
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut tau = 0.0;
    let mut dtau: f64 = 1.0;
    let mut best: Option<Solution> = None;
    while iterations < opts.max_iters {
        let next = (tau + dtau).min(1.0);
        let budget = STAGE_ITERS.min(opts.max_iters - iterations);
        let sol = newton(grid, h, advance(&u, tau, next), opts.tolerance, budget)?;
        iterations += sol.iterations;
        history.extend_from_slice(&sol.history);
        if sol.converged {
            u = sol.u.clone();
            tau = next;
            if tau >= 1.0 {
                return Ok(Solution { iterations, history, ..sol });
            }
            dtau *= 2.0;
            continue;
        }
        if next >= 1.0 && best.as_ref().is_none_or(|b| sol.residual_norm < b.residual_norm) {
            best = Some(sol);
        }
        dtau *= 0.5;
        if dtau < MIN_STAGE {
            break;
        }
    }
    let mut sol = match best {
        Some(b) => b,
        None => newton(grid, h, advance(&u, tau, 1.0), opts.tolerance, 0)?,
    };
    sol.iterations = iterations;
    sol.history = history;
    Ok(sol)
}

/// Boundary trace `θ ↦ u(ρ*, θ) − cap(ρ*)`, with the discrete cap of the
/// same grid as reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub rho_star: f64,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

impl Trace {
    /// Periodic linear interpolation.
    pub fn eval(&self, theta: f64) -> f64 {
        let n = self.theta.len();
        let dt = TAU / n as f64;
        let x = theta.rem_euclid(TAU) / dt;
        let k = x.floor() as usize % n;
        let w = x - x.floor();
        self.values[k] * (1.0 - w) + self.values[(k + 1) % n] * w
    }

    /// Largest jump between neighbouring samples, wrap-around included.
    pub fn modulus(&self) -> f64 {
        let n = self.values.len();
        (0..n).map(|k| (self.values[(k + 1) % n] - self.values[k]).abs()).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, data: &AsymptoticData) -> f64 {
        self.theta.iter().zip(&self.values).map(|(t, v)| (v - data.eval(*t)).abs()).fold(0.0, f64::max)
    }
}

pub fn asymptotic_trace(sol: &Solution, rho_star: f64) -> Result<Trace> {
    let grid = &sol.grid;
    if rho_star > grid.r_max - 1.0 || rho_star < grid.rho_min() {
        return Err(Error::InvalidInput(format!(
            "rho_star = {rho_star} must lie in [{}, R_max - 1]",
            grid.rho_min()
        )));
    }
    let h = MeanCurvatureH::new(sol.h)?;
    let dcap = discrete_cap(grid, h)?;
    let c = interp_rows(grid, rho_star, |i| dcap[i]);
    let theta: Vec<f64> = (0..grid.n_theta).map(|j| grid.theta(j)).collect();
    let values = (0..grid.n_theta).map(|j| sol.radial_interp(rho_star, j) - c).collect();
    Ok(Trace { rho_star, theta, values })
}

/// Centred difference `∂ρu` at radius `rho`, column `j`.
pub fn radial_slope(sol: &Solution, rho: f64, j: usize) -> f64 {
    let d = sol.grid.h();
    (sol.radial_interp(rho + d, j) - sol.radial_interp(rho - d, j)) / (2.0 * d)
}

// ---------------------------------------------------------------------------
// Barriers

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BarrierKind {
    Lower,
    Upper,
}

/// A sub- or supersolution pinned to the cap near an ideal point.
#[derive(Debug, Clone, PartialEq)]
pub struct Barrier {
    pub kind: BarrierKind,
    pub anchor: IdealPoint,
    /// Asymptotic height away from the anchor region.
    pub height: f64,
    pub h: MeanCurvatureH,
    shape: Shape,
    /// Extra vertical shift, zero for a genuine barrier.
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `max(cap − C, hund₁(s) + t*)` over the plus side of `geodesic`.
    Lower { geodesic: Geodesic, profile: HyperbolicProfile, t_star: f64 },
    /// `min(cap_p + t*, cap + C)` with `p` at `center`.
    Upper { center: Lorentz, t_star: f64 },
}

/// Shape parameters of the lower barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSpec {
    /// Half the angular width of the arc `∂Ω` around the anchor.
    pub half_width: f64,
    /// Sampling radius for the ordering check.
    pub check_radius: f64,
}

impl Default for LowerSpec {
    fn default() -> Self {
        Self { half_width: PI / 4.0, check_radius: 14.0 }
    }
}

fn cap_offset(h: MeanCurvatureH) -> Result<f64> {
    let s = 40.0;
    Ok(cap_closed(h, s)? - lh(h).value() * s)
}

/// Lower barrier near `anchor` with asymptotic height `−height` away from it.
///
/// Uses the `C = 1` hyperbolic graph over the geodesic with ends
/// `anchor ± half_width`, shifted to have asymptotic height zero at the
/// anchor, glued to `cap − height` by taking the maximum.
pub fn lower_barrier(h: MeanCurvatureH, anchor: IdealPoint, height: f64, spec: LowerSpec) -> Result<Barrier> {
    h.subcritical()?;
    if !(height > 0.0) {
        return Err(Error::Config(format!("barrier height must be positive, got {height}")));
    }
    if !(spec.half_width > 0.0 && spec.half_width < PI / 2.0) {
        return Err(Error::Config(format!("half width {} outside (0, π/2)", spec.half_width)));
    }
    let q1 = IdealPoint::new(anchor.theta - spec.half_width);
    let q2 = IdealPoint::new(anchor.theta + spec.half_width);
    let geodesic = Geodesic::new(q1, q2, anchor)?;
    let profile = HyperbolicProfile::new(h, 1.0)?;
    let l = lh(h).value();
    let s_far = profile.m_c + 40.0;
    let kappa = profile.phi_closed(s_far)? - l * s_far;
    let sigma = anchor.null().dot(&geodesic.normal()).ln();
    let t_star = cap_offset(h)? - kappa - l * sigma;
    let b = Barrier {
        kind: BarrierKind::Lower,
        anchor,
        height,
        h,
        shape: Shape::Lower { geodesic, profile, t_star },
        shift: 0.0,
    };
    // ordering: the hyperbolic piece must stay below the cap
    let n = 96;
    let mut worst = f64::NEG_INFINITY;
    for i in 1..=n {
        let rho = spec.check_radius * i as f64 / n as f64;
        for j in 0..n {
            let x = polar_point(rho, TAU * j as f64 / n as f64);
            if let Some(v) = b.hyperbolic_piece(&x) {
                worst = worst.max(v - cap_closed(h, rho)?);
            }
        }
    }
    if worst > 1e-9 {
        return Err(Error::Config(format!("hyperbolic piece exceeds the cap by {worst:e}")));
    }
    Ok(b)
}

/// Upper barrier near `anchor`: the minimum of `cap + height` and a cap
/// centred at distance `offset` toward the anchor, lifted by `l_H·offset` so
/// that its asymptotic height at the anchor is zero.
pub fn upper_barrier(h: MeanCurvatureH, anchor: IdealPoint, height: f64, offset: f64) -> Result<Barrier> {
    h.subcritical()?;
    if !(height > 0.0) {
        return Err(Error::Config(format!("barrier height must be positive, got {height}")));
    }
    if !(offset > 0.0) {
        return Err(Error::Config(format!("centre offset must be positive, got {offset}")));
    }
    let center = polar_point(offset, anchor.theta);
    let t_star = lh(h).value() * offset;
    Ok(Barrier { kind: BarrierKind::Upper, anchor, height, h, shape: Shape::Upper { center, t_star }, shift: 0.0 })
}

impl Barrier {
    fn hyperbolic_piece(&self, x: &Lorentz) -> Option<f64> {
        match &self.shape {
            Shape::Lower { geodesic, profile, t_star } => {
                let s = geodesic.signed_dist_lorentz(x);
                if s > profile.m_c {
                    profile.phi_closed(s).ok().map(|v| v + t_star)
                } else {
                    None
                }
            }
            Shape::Upper { .. } => None,
        }
    }

    /// Value at a point of the plane.
    pub fn eval_lorentz(&self, x: &Lorentz) -> Result<f64> {
        let rho = Lorentz::ORIGIN.dist(x);
        let cap = cap_closed(self.h, rho)?;
        let v = match &self.shape {
            Shape::Lower { .. } => {
                let base = cap - self.height;
                match self.hyperbolic_piece(x) {
                    Some(v) => base.max(v),
                    None => base,
                }
            }
            Shape::Upper { center, t_star } => {
                let other = cap_closed(self.h, center.dist(x))? + t_star;
                other.min(cap + self.height)
            }
        };
        Ok(v + self.shift)
    }

    pub fn eval_polar(&self, rho: f64, theta: f64) -> Result<f64> {
        self.eval_lorentz(&polar_point(rho, theta))
    }

    /// The same barrier moved vertically by `delta`.
    pub fn shifted(&self, delta: f64) -> Barrier {
        let mut b = self.clone();
        b.shift += delta;
        b
    }

    /// Whether the two pieces are within `tol` of each other at `x`, i.e.
    /// `x` is near the crease.
    pub fn near_crease(&self, x: &Lorentz, tol: f64) -> Result<bool> {
        let rho = Lorentz::ORIGIN.dist(x);
        let cap = cap_closed(self.h, rho)?;
        Ok(match &self.shape {
            Shape::Lower { .. } => match self.hyperbolic_piece(x) {
                Some(v) => (v - (cap - self.height)).abs() < tol,
                None => false,
            },
            Shape::Upper { center, t_star } => {
                let other = cap_closed(self.h, center.dist(x))? + t_star;
                (other - (cap + self.height)).abs() < tol
            }
        })
    }
}

/// Outcome of [`check_sandwich`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub nodes: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// `max(lower − u)` over the checked nodes.
    pub max_lower_excess: f64,
    /// `max(u − upper)` over the checked nodes.
    pub max_upper_excess: f64,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.lower_violations == 0 && self.upper_violations == 0
    }

    /// Largest violation, zero when the sandwich holds.
    pub fn max_violation(&self) -> f64 {
        self.max_lower_excess.max(self.max_upper_excess).max(0.0)
    }
}

/// Checks `lower ≤ u ≤ upper` at every node with `ρ ≤ rho_limit`.
pub fn check_sandwich_within(sol: &Solution, lower: &Barrier, upper: &Barrier, rho_limit: f64) -> Result<SandwichReport> {
    if lower.kind != BarrierKind::Lower || upper.kind != BarrierKind::Upper {
        return Err(Error::InvalidInput("expected a lower and an upper barrier".into()));
    }
    if (lower.h.value() - sol.h).abs() > 0.0 || (upper.h.value() - sol.h).abs() > 0.0 {
        return Err(Error::InvalidInput("barriers and solution have different H".into()));
    }
    let g = &sol.grid;
    let mut rep = SandwichReport {
        nodes: 0,
        lower_violations: 0,
        upper_violations: 0,
        max_lower_excess: f64::NEG_INFINITY,
        max_upper_excess: f64::NEG_INFINITY,
    };
    for i in 0..g.rows() {
        if g.rho(i) > rho_limit {
            continue;
        }
        for j in 0..g.n_theta {
            let x = g.point(i, j);
            let u = sol.at(i, j);
            let lo = lower.eval_lorentz(&x)? - u;
            let up = u - upper.eval_lorentz(&x)?;
            rep.nodes += 1;
            rep.max_lower_excess = rep.max_lower_excess.max(lo);
            rep.max_upper_excess = rep.max_upper_excess.max(up);
            if lo > 0.0 {
                rep.lower_violations += 1;
            }
            if up > 0.0 {
                rep.upper_violations += 1;
            }
        }
    }
    Ok(rep)
}

/// Checks `lower ≤ u ≤ upper` at every grid node.
pub fn check_sandwich(sol: &Solution, lower: &Barrier, upper: &Barrier) -> Result<SandwichReport> {
    check_sandwich_within(sol, lower, upper, f64::INFINITY)
}
