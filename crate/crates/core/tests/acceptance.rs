//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line to standard output.
//!
//! The tests share a lock so that the runtime budgets are measured without
//! interference from each other.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hcmc::boundary::{
    boundary_of, classify, estimate_weyl_interval, BoundaryCurve, CurveType, HeightTag, Orientation, Rule, Segment,
};
use hcmc::dirichlet::{
    check_sandwich, discrete_cap, discrete_qh, lower_barrier, radial_field, sampled_cap, solve, upper_barrier,
    AsymptoticData, DiskGrid, Initial, LowerSpec, Solution, SolveOptions,
};
use hcmc::error::Error;
use hcmc::geometry::{laplacian_fd_lorentz, HCircle, HPoint, Horocycle, IdealPoint, Lorentz, LAPLACIAN_STEP};
use hcmc::profiles::{lh, HyperbolicCase, HyperbolicProfile, MeanCurvatureH, ParabolicProfile, Profile, RotationalProfile};
use hcmc::surfaces::{default_geodesic, plus_arc_midpoint, InvariantSurface, INTERIOR_MARGIN};

static SERIAL: Mutex<()> = Mutex::new(());

fn hh(v: f64) -> MeanCurvatureH {
    MeanCurvatureH::new(v).unwrap()
}

/// Runs one criterion, prints its line and fails the test on failure or when
/// the runtime budget is exceeded.
fn criterion(n: u32, budget: Option<Duration>, body: impl FnOnce() -> Result<String, String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let outcome = match (outcome, budget) {
        (Ok(d), Some(b)) if elapsed > b => Err(format!("{d}; runtime {elapsed:.2?} exceeds {b:?}")),
        (o, _) => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    // write around the test harness capture so the line always shows
    let _ = writeln!(std::io::stdout().lock(), "criterion {n:>2}: {tag} [{elapsed:.2?}] {detail}");
    if let Err(d) = outcome {
        panic!("criterion {n} failed: {d}");
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) <= 0.0, "bracket [{a}, {b}] has no sign change");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn criterion_01_closed_forms() {
    criterion(1, Some(Duration::from_secs(5)), || {
        let mut worst: f64 = 0.0;
        for &hv in &[0.1, 0.25, 0.4] {
            let h = hh(hv);
            for c in [1.0, -1.0] {
                let p = HyperbolicProfile::new(h, c).map_err(|e| e.to_string())?;
                for k in 0..50 {
                    let s = p.m_c + 0.05 + 8.0 * k as f64 / 49.0;
                    let q = p.phi(s).map_err(|e| e.to_string())?;
                    let cf = p.phi_closed(s).map_err(|e| e.to_string())?;
                    worst = worst.max(rel_err(q, cf));
                }
            }
            let p = ParabolicProfile::new(h).map_err(|e| e.to_string())?;
            for k in 0..50 {
                let s = 8.0 * k as f64 / 49.0;
                let q = p.phi(s).map_err(|e| e.to_string())?;
                let cf = p.phi_closed(s).map_err(|e| e.to_string())?;
                worst = worst.max(rel_err(q, cf));
            }
        }
        let d = format!("max relative error {worst:.2e} over 450 samples");
        if worst <= 1e-8 {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

/// Left end of the last interval where `|g| ≥ 1`, found by scanning down
/// from large `s` and bisecting on `|g| − 1`; `None` when `|g| < 1` on the
/// whole scanned range.
fn last_crossing(p: &HyperbolicProfile) -> Option<f64> {
    let f = |s: f64| p.g(s).abs() - 1.0;
    let step = 1e-3;
    let mut s = 40.0;
    while s > -40.0 {
        if f(s - step) >= 0.0 {
            return Some(bisect(f, s - step, s));
        }
        s -= step;
    }
    None
}

#[test]
fn criterion_02_mc_roots() {
    criterion(2, Some(Duration::from_secs(1)), || {
        let pairs = [
            (0.1, 1.5),
            (0.25, 2.0),
            (0.4, 5.0),
            (0.0, 1.2),
            (0.1, 1.0),
            (0.25, 1.0),
            (0.4, 1.0),
            (0.0, 0.0),
            (0.1, 0.5),
            (0.25, -0.5),
            (0.4, 0.9),
            (0.1, -1.0),
            (0.25, -1.0),
            (0.4, -1.0),
            (0.1, -1.5),
            (0.25, -2.0),
            (0.4, -4.0),
            (0.0, -3.0),
            (0.2, 3.0),
            (0.2, -0.99),
        ];
        let mut worst: f64 = 0.0;
        let mut seen = std::collections::BTreeSet::new();
        for (hv, c) in pairs {
            let p = HyperbolicProfile::new(hh(hv), c).map_err(|e| e.to_string())?;
            seen.insert(format!("{:?}", p.case()));
            let err = match p.case() {
                HyperbolicCase::PlusOne | HyperbolicCase::MinusOne => {
                    // |g| touches 1 tangentially: the crossing is the critical point of g
                    let dg = |s: f64| 2.0 * hv - s.tanh() * p.g(s);
                    (bisect(dg, -20.0, 20.0) - p.m_c).abs()
                }
                HyperbolicCase::Cap => {
                    let sup = (0..=8000).map(|k| p.g(-40.0 + 0.01 * k as f64).abs()).fold(0.0, f64::max);
                    if sup >= 1.0 || last_crossing(&p).is_some() || p.m_c != f64::NEG_INFINITY {
                        return Err(format!("H={hv} C={c}: sup|g| = {sup}, M_C = {}", p.m_c));
                    }
                    0.0
                }
                _ => {
                    let root = last_crossing(&p).ok_or(format!("H={hv} C={c}: no crossing found"))?;
                    (root - p.m_c).abs()
                }
            };
            worst = worst.max(err);
        }
        let d = format!("20 pairs, {} cases, max |root - M_C| {worst:.2e}", seen.len());
        if worst <= 1e-10 && seen.len() == 5 {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

#[test]
fn criterion_03_gprime_at_mc() {
    criterion(3, None, || {
        let pairs = [(0.0, 1.5), (0.1, 1.1), (0.1, 3.0), (0.2, 2.0), (0.25, 1.5), (0.25, 4.0), (0.3, 2.5), (0.4, 1.2), (0.4, 6.0), (0.45, 2.0)];
        let mut worst: f64 = 0.0;
        for (hv, c) in pairs {
            let p = HyperbolicProfile::new(hh(hv), c).map_err(|e| e.to_string())?;
            let d = 1e-5;
            let fd = (p.g(p.m_c + d) - p.g(p.m_c - d)) / (2.0 * d);
            let formula = p.gprime_at_mc().map_err(|e| e.to_string())?;
            worst = worst.max((fd - formula).abs());
        }
        let d = format!("10 pairs, max |formula - central difference| {worst:.2e}");
        if worst <= 1e-6 {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

#[test]
fn criterion_04_laplacians() {
    criterion(4, None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut random_point = |lo: f64, hi: f64| {
            let d = rng.gen_range(lo..hi);
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            HPoint::polar(d, a).to_lorentz()
        };
        let (mut e_circle, mut e_horo, mut e_geo): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let circle = HCircle::new(HPoint { x: 0.1, y: 0.2 }, 0.7).map_err(|e| e.to_string())?;
        let horo = Horocycle::new(IdealPoint::new(1.1), 0.4);
        let g = default_geodesic();
        for _ in 0..100 {
            // outside the circle, where s = d(center, x) − r is smooth
            let x = loop {
                let x = random_point(0.0, 3.0);
                if circle.dist_lorentz(&x).map(|s| s > 0.1).unwrap_or(false) {
                    break x;
                }
            };
            let s = circle.dist_lorentz(&x).unwrap();
            let lap = laplacian_fd_lorentz(|p| circle.dist_lorentz(p).unwrap(), &x, LAPLACIAN_STEP);
            e_circle = e_circle.max((lap - 1.0 / (0.7 + s).tanh()).abs());

            let x = random_point(0.0, 3.0);
            let lap = laplacian_fd_lorentz(|p| horo.busemann(p), &x, LAPLACIAN_STEP);
            e_horo = e_horo.max((lap - 1.0).abs());

            let x = random_point(0.0, 3.0);
            let s = g.signed_dist_lorentz(&x);
            let lap = laplacian_fd_lorentz(|p| g.signed_dist_lorentz(p), &x, LAPLACIAN_STEP);
            e_geo = e_geo.max((lap - s.tanh()).abs());
        }
        let d = format!("max error coth {e_circle:.2e}, horocycle {e_horo:.2e}, tanh {e_geo:.2e}");
        if e_circle.max(e_horo).max(e_geo) <= 1e-4 {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

fn catalogue(h: MeanCurvatureH) -> Vec<InvariantSurface> {
    let mut v = Vec::new();
    for r in [0.0, 0.5, 2.0] {
        v.push(InvariantSurface::rotational(h, r, HPoint { x: -0.1, y: 0.15 }).unwrap());
    }
    for c in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        v.push(InvariantSurface::hyperbolic(h, c, default_geodesic()).unwrap());
    }
    v.push(InvariantSurface::parabolic(h, Horocycle::new(IdealPoint::new(2.0), -0.2)).unwrap());
    v
}

#[test]
fn criterion_05_cmc_residual() {
    criterion(5, Some(Duration::from_secs(10)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for hv in [0.0, 0.1, 0.25, 0.4] {
            for surf in catalogue(hh(hv)) {
                for reflect in [false, true] {
                    let surf = if reflect {
                        match surf.alexandrov_reflect() {
                            Ok(s) => s,
                            Err(_) => continue,
                        }
                    } else {
                        surf
                    };
                    let edge = surf.profile.edge();
                    let lo = if edge.is_finite() { edge + INTERIOR_MARGIN } else { -5.0 };
                    for _ in 0..100 {
                        let s = rng.gen_range(lo..lo + 5.0);
                        let t = rng.gen_range(-2.0..2.0);
                        let x = surf.point_at(s, t).to_hpoint();
                        let r = surf.qh_residual(&x).map_err(|e| format!("{}: {e}", surf.describe()))?;
                        worst = worst.max(r.abs());
                        count += 1;
                    }
                }
            }
        }
        let d = format!("{count} points, max |Q_H| {worst:.2e}");
        if worst <= 1e-6 {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

#[test]
fn criterion_06_asymptotic_slopes() {
    criterion(6, None, || {
        let mut worst: f64 = 0.0;
        for hv in [0.1, 0.25, 0.4] {
            let h = hh(hv);
            let l = lh(h).value();
            let profiles = [
                Profile::Rotational(RotationalProfile::new(h, 1.0).unwrap()),
                Profile::Rotational(RotationalProfile::new(h, 0.0).unwrap()),
                Profile::Hyperbolic(HyperbolicProfile::new(h, 0.5).unwrap()),
                Profile::Hyperbolic(HyperbolicProfile::new(h, 2.0).unwrap()),
                Profile::Parabolic(ParabolicProfile::new(h).unwrap()),
            ];
            for p in &profiles {
                worst = worst.max((p.dphi(30.0) - l).abs());
            }
        }
        let d = format!("15 profiles, max |phi'(30) - lH| {worst:.2e}");
        if worst <= 1e-3 {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

#[test]
fn criterion_07_classification() {
    criterion(7, None, || {
        use HeightTag::*;
        let h = hh(0.25);
        let g = default_geodesic();
        let fail = |e: Error| e.to_string();
        let expect = [
            ("cap", InvariantSurface::cap(h).map_err(fail)?, CurveType::I),
            (
                "reflected und",
                InvariantSurface::rotational(h, 1.0, HPoint::origin()).and_then(|s| s.alexandrov_reflect()).map_err(fail)?,
                CurveType::VI,
            ),
            (
                "hyperbolic C=2",
                InvariantSurface::hyperbolic(h, 2.0, g).and_then(|s| s.alexandrov_reflect()).map_err(fail)?,
                CurveType::III,
            ),
            ("hyperbolic C=1", InvariantSurface::hyperbolic(h, 1.0, g).map_err(fail)?, CurveType::IV),
            ("hyperbolic C=-1", InvariantSurface::hyperbolic(h, -1.0, g).map_err(fail)?, CurveType::IV),
        ];
        let mut notes = Vec::new();
        for (name, surf, t) in &expect {
            let b = boundary_of(surf);
            let curve = b.curve.as_ref().ok_or(format!("{name}: boundary is not a curve"))?;
            let v = classify(curve, h).map_err(fail)?;
            if !v.admissible || v.curve_type != Some(*t) {
                return Err(format!("{name}: expected admissible {t:?}, got {v:?}"));
            }
            notes.push(format!("{name} {t:?}"));
        }
        let horo = InvariantSurface::parabolic(h, Horocycle::new(IdealPoint::new(0.0), 0.0))
            .and_then(|s| s.alexandrov_reflect())
            .map_err(fail)?;
        if boundary_of(&horo).is_curve() {
            return Err("parabolic boundary reported as a curve".into());
        }

        let q = IdealPoint::new;
        let wrong_height = BoundaryCurve::single(vec![
            Segment::arc(Zero, q(0.0), q(2.0), Orientation::Ccw),
            Segment::weyl(q(2.0), MinusLH, Zero),
            Segment::arc(MinusLH, q(2.0), q(0.0), Orientation::Cw),
            Segment::weyl(q(0.0), MinusLH, Zero),
        ]);
        let v = classify(&wrong_height, h).map_err(fail)?;
        if v.admissible || !v.has(Rule::ArcHeight) {
            return Err(format!("arc at height 0 not rejected: {v:?}"));
        }
        let missing_endpoint = BoundaryCurve::single(vec![
            Segment::arc(PlusLH, q(0.0), q(2.0), Orientation::Ccw),
            Segment::weyl(q(2.0), PlusLH, PlusPole),
            Segment::weyl(q(0.0), Finite(-0.3), PlusPole),
        ]);
        let v = classify(&missing_endpoint, h).map_err(fail)?;
        if v.admissible || !v.has(Rule::MiddleChamber) {
            return Err(format!("chamber without the lH endpoint not rejected: {v:?}"));
        }
        let open = BoundaryCurve::single(vec![
            Segment::arc(PlusLH, q(0.0), q(2.0), Orientation::Ccw),
            Segment::weyl(q(2.0), MinusLH, PlusLH),
            Segment::arc(MinusLH, q(2.0), q(1.0), Orientation::Cw),
        ]);
        match classify(&open, h) {
            Err(Error::MalformedCurve(_)) => {}
            other => return Err(format!("non-closing curve not rejected: {other:?}")),
        }
        Ok(format!("{}; parabolic not a curve; 3 negative controls rejected", notes.join(", ")))
    });
}

#[test]
fn criterion_08_probe_agreement() {
    criterion(8, Some(Duration::from_secs(30)), || {
        let h = hh(0.25);
        let l = lh(h).value();
        let g = default_geodesic();
        let surf = InvariantSurface::hyperbolic(h, 2.0, g).map_err(|e| e.to_string())?;
        let (a, b) = estimate_weyl_interval(&surf, g.q1).ok_or("no paths at q1")?;
        let mid = plus_arc_midpoint(&g);
        let (c, d) = estimate_weyl_interval(&surf, mid).ok_or("no paths at the arc midpoint")?;
        let err = a.abs().max((b - l).abs()).max((c - l).abs()).max((d - l).abs());
        let detail = format!("q1 [{a:.5}, {b:.5}] vs [0, {l:.5}]; interior [{c:.5}, {d:.5}]; max error {err:.2e}");
        if err <= 1e-2 {
            Ok(detail)
        } else {
            Err(detail)
        }
    });
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest interior residual, Dirichlet ring excluded.
fn interior_residual(grid: &DiskGrid, u: &[f64], h: MeanCurvatureH) -> f64 {
    let r = discrete_qh(grid, u, h).unwrap();
    let mut worst: f64 = 0.0;
    for i in grid.unknown_rows() {
        for j in 0..grid.n_theta {
            worst = worst.max(r[grid.index(i, j)].abs());
        }
    }
    worst
}

#[test]
fn criterion_09_dirichlet_exactness() {
    criterion(9, Some(Duration::from_secs(60)), || {
        let h = hh(0.25);
        let grid = DiskGrid::new(8.0, 256, 256).map_err(|e| e.to_string())?;
        let c = 0.37;
        // start from the continuous cap so Newton has work to do
        let start: Vec<f64> = sampled_cap(&grid, h).map_err(|e| e.to_string())?.iter().map(|v| v + c).collect();
        let opts = SolveOptions { initial: Initial::Values(start), ..SolveOptions::default() };
        let sol = solve(&grid, h, &AsymptoticData::Constant(c), &opts).map_err(|e| e.to_string())?;
        let dcap = radial_field(&grid, &discrete_cap(&grid, h).map_err(|e| e.to_string())?);
        let exact: Vec<f64> = dcap.iter().map(|v| v + c).collect();
        let err = max_abs_diff(&sol.u, &exact);

        let mut res = Vec::new();
        for n in [64, 128, 256] {
            let g = DiskGrid::new(8.0, n, n).unwrap();
            res.push(interior_residual(&g, &sampled_cap(&g, h).unwrap(), h));
        }
        let ratios = [res[0] / res[1], res[1] / res[2]];
        let d = format!(
            "max |u - (cap + c)| {err:.2e} after {} iterations; sampled-cap residual {:.2e}, {:.2e}, {:.2e}, ratios {:.3}, {:.3}",
            sol.iterations, res[0], res[1], res[2], ratios[0], ratios[1]
        );
        let ok = err <= 1e-10 && res[2] <= 1e-4 && ratios.iter().all(|r| (3.5..=4.5).contains(r));
        if ok {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

fn cos_data(shift: f64) -> AsymptoticData {
    AsymptoticData::Fourier { a0: shift, cos: vec![0.3], sin: vec![] }
}

fn solve_with(grid: &DiskGrid, h: MeanCurvatureH, data: &AsymptoticData, initial: Initial) -> Result<Solution, String> {
    let opts = SolveOptions { initial, ..SolveOptions::default() };
    solve(grid, h, data, &opts).map_err(|e| e.to_string())
}

#[test]
fn criterion_10_dirichlet_structure() {
    criterion(10, Some(Duration::from_secs(120)), || {
        let h = hh(0.25);
        let grid = DiskGrid::new(8.0, 256, 256).map_err(|e| e.to_string())?;
        let phi = cos_data(0.0);
        let (lo, _, hi) = phi.stats(4096);
        let dcap = radial_field(&grid, &discrete_cap(&grid, h).map_err(|e| e.to_string())?);

        // uniqueness probe: two initializations
        let u_lo = solve_with(&grid, h, &phi, Initial::CapPlus(lo))?;
        let u_hi = solve_with(&grid, h, &phi, Initial::CapPlus(hi))?;
        let unique = max_abs_diff(&u_lo.u, &u_hi.u);

        // comparison against the constant bounds and against larger data
        let mut bound_excess = f64::NEG_INFINITY;
        for (k, v) in u_lo.u.iter().enumerate() {
            bound_excess = bound_excess.max(dcap[k] + lo - v).max(v - dcap[k] - hi);
        }
        let bigger = AsymptoticData::Fourier { a0: 0.05, cos: vec![0.3], sin: vec![0.05] };
        let u_big = solve_with(&grid, h, &bigger, Initial::CapPlusMean)?;
        let order_excess = u_lo.u.iter().zip(&u_big.u).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);

        // translation equivariance
        let shift = 0.2;
        let u_shift = solve_with(&grid, h, &cos_data(shift), Initial::CapPlusMean)?;
        let translation = u_lo.u.iter().zip(&u_shift.u).map(|(a, b)| (b - a - shift).abs()).fold(0.0, f64::max);

        // rotational symmetry from a non-symmetric start
        let start: Vec<f64> = (0..grid.len())
            .map(|k| {
                let (i, j) = (k / grid.n_theta, k % grid.n_theta);
                dcap[k] + 0.1 + 0.2 * grid.theta(j).cos() * grid.rho(i) / grid.r_max
            })
            .collect();
        let u_rot = solve_with(&grid, h, &AsymptoticData::Constant(0.1), Initial::Values(start))?;
        let mut spread: f64 = 0.0;
        for i in 0..grid.rows() {
            let row: Vec<f64> = (0..grid.n_theta).map(|j| u_rot.at(i, j)).collect();
            let (a, b) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            spread = spread.max(b - a);
        }

        let d = format!(
            "bounds excess {bound_excess:.2e}, order excess {order_excess:.2e}, translation {translation:.2e}, \
             theta spread {spread:.2e}, two-init diff {unique:.2e} (256x256, R_max 8)"
        );
        let ok = bound_excess <= 1e-8 && order_excess <= 1e-8 && translation <= 1e-10 && spread <= 1e-9 && unique <= 1e-8;
        if ok {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

#[test]
fn criterion_11_barrier_sandwich() {
    criterion(11, None, || {
        let h = hh(0.25);
        let grid = DiskGrid::new(8.0, 256, 256).map_err(|e| e.to_string())?;
        let sol = solve_with(&grid, h, &AsymptoticData::Constant(0.0), Initial::CapPlusMean)?;
        let anchor = IdealPoint::new(0.0);
        let lower = lower_barrier(h, anchor, 0.1, LowerSpec::default()).map_err(|e| e.to_string())?;
        let upper = upper_barrier(h, anchor, 0.1, 1.0).map_err(|e| e.to_string())?;
        let rep = check_sandwich(&sol, &lower, &upper).map_err(|e| e.to_string())?;
        let bad = check_sandwich(&sol, &lower.shifted(0.2), &upper).map_err(|e| e.to_string())?;
        let d = format!(
            "{} nodes, {} violations (margins {:.2e} / {:.2e}); shifted control flags {} nodes",
            rep.nodes,
            rep.lower_violations + rep.upper_violations,
            rep.max_lower_excess,
            rep.max_upper_excess,
            bad.lower_violations
        );
        if rep.passed() && !bad.passed() {
            Ok(d)
        } else {
            Err(d)
        }
    });
}

#[test]
fn lorentz_origin_is_on_the_hyperboloid() {
    // guards the oracle helpers above
    assert!((Lorentz::ORIGIN.dot(&Lorentz::ORIGIN) + 1.0).abs() < 1e-15);
    assert!((bisect(|x| x * x - 2.0, 0.0, 2.0) - 2f64.sqrt()).abs() < 1e-14);
}
