//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The profile integrands are smooth once their endpoint singularities have
//! been removed by substitution, so a plain bisection strategy driven by the
//! largest local error estimate is enough.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Default absolute tolerance used by the profile evaluators.
pub const ABS_TOL: f64 = 1e-10;
/// Default relative tolerance used by the profile evaluators.
pub const REL_TOL: f64 = 1e-10;

const MAX_SUBDIVISIONS: usize = 2000;

// Kronrod abscissae on [-1, 1] (non-negative half), the odd-indexed ones are
// the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

#[derive(Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
///
/// `b < a` is allowed and flips the sign.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, intervals: 0, converged: true };
    }
    if b < a {
        let r = integrate(f, b, a, abs_tol, rel_tol);
        return QuadResult { value: -r.value, ..r };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut count = 1;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if count >= MAX_SUBDIVISIONS {
            return QuadResult { value: total, error: total_err, intervals: count, converged: false };
        }
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval at machine resolution; keep its estimate and stop refining it
            heap.push(Piece { error: 0.0, ..p });
            total_err = heap.iter().map(|q| q.error).sum();
            continue;
        }
        let (lv, le) = gk15(&f, p.a, mid);
        let (rv, re) = gk15(&f, mid, p.b);
        total += lv + rv - p.value;
        total_err += le + re - p.error;
        heap.push(Piece { a: p.a, b: mid, value: lv, error: le });
        heap.push(Piece { a: mid, b: p.b, value: rv, error: re });
        count += 1;
        // resum periodically to keep the running totals honest
        if count % 64 == 0 {
            total = heap.iter().map(|q| q.value).sum();
            total_err = heap.iter().map(|q| q.error).sum();
        }
    }
    total = heap.iter().map(|q| q.value).sum();
    QuadResult { value: total, error: total_err.max(0.0), intervals: count, converged: true }
}

/// [`integrate`] with the crate's default tolerances, returning only the value.
pub fn integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate(f, a, b, ABS_TOL, REL_TOL).value
}

/// Integrates a function with an inverse-square-root singularity at `a`.
///
/// The caller supplies the bounded factor `g(τ) = √τ · f(a + τ)` evaluated in
/// closed form; the substitution `t = a + u²` turns the integral into
/// `∫₀^{√(b−a)} 2 g(u²) du`, which has a smooth integrand.
pub fn integral_sqrt_endpoint<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    debug_assert!(b >= a);
    let top = (b - a).sqrt();
    integral(|u| 2.0 * g(u * u), 0.0, top)
}
