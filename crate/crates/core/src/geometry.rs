//! Poincaré disk model of H² and the distance fields behind the invariant
//! families.
//!
//! Points are stored in disk coordinates, but every metric computation goes
//! through the hyperboloid model `{X : ⟨X,X⟩ = −1, X₀ > 0}` with the Minkowski
//! product `⟨X,Y⟩ = −X₀Y₀ + X₁Y₁ + X₂Y₂`. Distances of order 30 are routine in
//! the asymptotic checks, and disk coordinates cannot resolve them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when a point sits on the edge of an excluded region.
pub const EDGE_TOL: f64 = 1e-12;

/// Default finite-difference step for [`laplacian_fd`].
pub const LAPLACIAN_STEP: f64 = 1e-3;

/// A point of H² in the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || x * x + y * y >= 1.0 {
            return Err(Error::InvalidInput(format!("({x}, {y}) is not inside the unit disk")));
        }
        Ok(Self { x, y })
    }

    pub const fn origin() -> Self {
        Self { x: 0.0, y: 0.0 }
    }

    /// Point at hyperbolic distance `d` from the origin in direction `angle`.
    pub fn polar(d: f64, angle: f64) -> Self {
        let r = (0.5 * d).tanh();
        Self { x: r * angle.cos(), y: r * angle.sin() }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn to_lorentz(&self) -> Lorentz {
        let r2 = self.x * self.x + self.y * self.y;
        let d = 1.0 - r2;
        Lorentz([(1.0 + r2) / d, 2.0 * self.x / d, 2.0 * self.y / d])
    }
}

/// A point (or vector) of Minkowski space ℝ^{2,1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorentz(pub [f64; 3]);

impl Lorentz {
    pub const ORIGIN: Lorentz = Lorentz([1.0, 0.0, 0.0]);

    pub fn dot(&self, o: &Lorentz) -> f64 {
        let (a, b) = (self.0, o.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn add(&self, o: &Lorentz) -> Lorentz {
        Lorentz([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn sub(&self, o: &Lorentz) -> Lorentz {
        Lorentz([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }

    pub fn scale(&self, k: f64) -> Lorentz {
        Lorentz([k * self.0[0], k * self.0[1], k * self.0[2]])
    }

    /// Combination `a·self + b·o`.
    pub fn lin(&self, a: f64, o: &Lorentz, b: f64) -> Lorentz {
        Lorentz([
            a * self.0[0] + b * o.0[0],
            a * self.0[1] + b * o.0[1],
            a * self.0[2] + b * o.0[2],
        ])
    }

    /// Hyperbolic distance between two hyperboloid points.
    pub fn dist(&self, o: &Lorentz) -> f64 {
        let c = -self.dot(o);
        if c > 2.0 {
            // far apart: the chord form loses digits to cancellation
            return c.acosh();
        }
        let d = self.sub(o);
        let q = d.dot(&d).max(0.0);
        2.0 * (0.5 * q.sqrt()).asinh()
    }

    pub fn to_hpoint(&self) -> HPoint {
        let d = 1.0 + self.0[0];
        HPoint { x: self.0[1] / d, y: self.0[2] / d }
    }

    /// Unit tangent at `self` pointing along the geodesic toward ideal point `q`.
    pub fn direction_to(&self, q: &IdealPoint) -> Lorentz {
        let l = q.null();
        let v = l.scale(-1.0 / l.dot(self));
        v.sub(self)
    }

    /// Point at distance `t` along the geodesic with unit tangent `v`.
    pub fn exp(&self, v: &Lorentz, t: f64) -> Lorentz {
        self.lin(t.cosh(), v, t.sinh())
    }

    /// Orthonormal tangent frame at `self`, the image of the standard frame
    /// at the origin under the boost taking the origin to `self`.
    pub fn frame(&self) -> [Lorentz; 2] {
        [boost(self, &Lorentz([0.0, 1.0, 0.0])), boost(self, &Lorentz([0.0, 0.0, 1.0]))]
    }
}

/// Applies the pure boost that carries the origin to `c`.
pub fn boost(c: &Lorentz, x: &Lorentz) -> Lorentz {
    let [c0, c1, c2] = c.0;
    let [x0, x1, x2] = x.0;
    let cx = c1 * x1 + c2 * x2;
    let k = cx / (1.0 + c0);
    Lorentz([c0 * x0 + cx, c1 * x0 + x1 + c1 * k, c2 * x0 + x2 + c2 * k])
}

/// A point of the ideal boundary, given by its angle on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint {
    pub theta: f64,
}

impl IdealPoint {
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        Self { theta: t }
    }

    /// Null vector `(1, cos θ, sin θ)` representing the point on the light cone.
    pub fn null(&self) -> Lorentz {
        Lorentz([1.0, self.theta.cos(), self.theta.sin()])
    }

    /// Angular separation in `[0, π]`.
    pub fn separation(&self, o: &IdealPoint) -> f64 {
        let d = (self.theta - o.theta).rem_euclid(TAU);
        d.min(TAU - d)
    }
}

/// A complete geodesic with a marked side.
///
/// The positive side is the component of the complement whose ideal boundary
/// contains `plus_side`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub q1: IdealPoint,
    pub q2: IdealPoint,
    pub plus_side: IdealPoint,
}

impl Geodesic {
    pub fn new(q1: IdealPoint, q2: IdealPoint, plus_side: IdealPoint) -> Result<Self> {
        if q1.separation(&q2) < 1e-12 {
            return Err(Error::InvalidInput("geodesic endpoints coincide".into()));
        }
        if plus_side.separation(&q1) < 1e-12 || plus_side.separation(&q2) < 1e-12 {
            return Err(Error::InvalidInput("side marker sits on a geodesic endpoint".into()));
        }
        Ok(Self { q1, q2, plus_side })
    }

    /// Same geodesic with the opposite side marked positive.
    pub fn flipped(&self) -> Self {
        let a = self.q1.theta;
        let mut b = self.q2.theta;
        if b < a {
            b += TAU;
        }
        let mid_ccw = IdealPoint::new(0.5 * (a + b));
        let mid_cw = IdealPoint::new(0.5 * (a + b) + PI);
        let plus = if self.is_plus(&mid_ccw) { mid_cw } else { mid_ccw };
        Self { plus_side: plus, ..*self }
    }

    /// Unit spacelike normal, oriented toward the positive side.
    pub fn normal(&self) -> Lorentz {
        let l1 = self.q1.null().0;
        let l2 = self.q2.null().0;
        let m = [
            l1[1] * l2[2] - l1[2] * l2[1],
            l1[2] * l2[0] - l1[0] * l2[2],
            l1[0] * l2[1] - l1[1] * l2[0],
        ];
        let n = Lorentz([-m[0], m[1], m[2]]);
        let n = n.scale(1.0 / n.dot(&n).sqrt());
        if n.dot(&self.plus_side.null()) < 0.0 {
            n.scale(-1.0)
        } else {
            n
        }
    }

    /// Whether an ideal point lies in the closure of the positive side's
    /// ideal boundary, excluding the endpoints.
    pub fn is_plus(&self, q: &IdealPoint) -> bool {
        self.normal().dot(&q.null()) > 0.0
    }

    pub fn signed_dist_lorentz(&self, x: &Lorentz) -> f64 {
        x.dot(&self.normal()).asinh()
    }

    /// Foot of the perpendicular from the origin.
    pub fn foot(&self) -> Lorentz {
        let n = self.normal();
        let k = -n.0[0];
        Lorentz::ORIGIN.lin(1.0, &n, -k).scale(1.0 / (1.0 + k * k).sqrt())
    }

    /// Point with Fermi coordinates `(s, τ)`: signed distance `s` from the
    /// geodesic, foot at arclength `τ` from [`Geodesic::foot`] toward `q2`.
    pub fn fermi_point(&self, s: f64, tau: f64) -> Lorentz {
        let o = self.foot();
        let t = o.direction_to(&self.q2);
        let on = o.exp(&t, tau);
        on.lin(s.cosh(), &self.normal(), s.sinh())
    }

    /// Equidistant curve at signed distance `s`, sampled at Fermi parameter `τ`.
    pub fn equidistant_point(&self, s: f64, tau: f64) -> HPoint {
        self.fermi_point(s, tau).to_hpoint()
    }
}

/// A horocycle, the level set `B = level` of the Busemann function
/// `B(x) = ln(|ξ − x|² / (1 − |x|²))` centered at `base = ξ`.
///
/// The horodisc is `{B < level}`; level 0 passes through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horocycle {
    pub base: IdealPoint,
    pub level: f64,
}

impl Horocycle {
    pub fn new(base: IdealPoint, level: f64) -> Self {
        Self { base, level }
    }

    pub fn busemann(&self, x: &Lorentz) -> f64 {
        (-x.dot(&self.base.null())).ln()
    }

    pub fn dist_lorentz(&self, x: &Lorentz) -> Result<f64> {
        let s = self.busemann(x) - self.level;
        clamp_edge(s, 1.0, "point lies inside the horodisc")
    }

    /// Point at distance `s ≥ 0` outside the horocycle, at horocyclic
    /// parameter `τ` (arclength along the horocycle itself).
    pub fn point(&self, s: f64, tau: f64) -> Lorentz {
        // upper half-plane picture with the base at infinity
        let y = (-(self.level + s)).exp();
        let x = tau * (-self.level).exp();
        let q = x * x + y * y;
        let (x0, x1, x2) = ((q + 1.0) / (2.0 * y), (q - 1.0) / (2.0 * y), -x / y);
        let (c, sn) = (self.base.theta.cos(), self.base.theta.sin());
        Lorentz([x0, c * x1 - sn * x2, sn * x1 + c * x2])
    }
}

/// A metric circle of radius `radius` about `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HCircle {
    pub center: HPoint,
    pub radius: f64,
}

impl HCircle {
    pub fn new(center: HPoint, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("circle radius {radius} must be finite and non-negative")));
        }
        Ok(Self { center, radius })
    }

    pub fn dist_lorentz(&self, x: &Lorentz) -> Result<f64> {
        let s = x.dist(&self.center.to_lorentz()) - self.radius;
        clamp_edge(s, self.radius.max(1.0), "point lies inside the circle")
    }

    /// Point at distance `s ≥ 0` outside the circle in direction `angle`
    /// (angle measured in the frame transported from the origin).
    pub fn point(&self, s: f64, angle: f64) -> Lorentz {
        let d = self.radius + s;
        let at_origin = Lorentz([d.cosh(), d.sinh() * angle.cos(), d.sinh() * angle.sin()]);
        boost(&self.center.to_lorentz(), &at_origin)
    }
}

fn clamp_edge(s: f64, scale: f64, msg: &str) -> Result<f64> {
    if s >= 0.0 {
        Ok(s)
    } else if s >= -EDGE_TOL * scale {
        Ok(0.0)
    } else {
        Err(Error::InsideDomain(format!("{msg} (s = {s:e})")))
    }
}

/// Hyperbolic distance in the disk model.
pub fn dist(a: &HPoint, b: &HPoint) -> f64 {
    let (za, zb) = (a.z(), b.z());
    let num = (za - zb).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (Complex64::new(1.0, 0.0) - za.conj() * zb).norm();
    2.0 * (num / den).atanh()
}

/// Distance from `x` to the circle `c`, measured outward. Zero on the circle.
pub fn dist_to_circle(x: &HPoint, c: &HCircle) -> Result<f64> {
    c.dist_lorentz(&x.to_lorentz())
}

/// Distance from `x` to the horocycle `h`, measured away from its horodisc.
pub fn dist_to_horocycle(x: &HPoint, h: &Horocycle) -> Result<f64> {
    h.dist_lorentz(&x.to_lorentz())
}

/// Signed distance to `g`, positive on the marked side.
pub fn signed_dist_to_geodesic(x: &HPoint, g: &Geodesic) -> f64 {
    g.signed_dist_lorentz(&x.to_lorentz())
}

/// Point at distance `t` along the geodesic ray from `x` toward `q`.
pub fn geodesic_ray(x: &HPoint, q: &IdealPoint, t: f64) -> HPoint {
    if t == 0.0 {
        return *x;
    }
    let p = x.to_lorentz();
    p.exp(&p.direction_to(q), t).to_hpoint()
}

/// Laplace–Beltrami operator of `field` at `x`, from central second
/// differences along two orthogonal geodesics.
pub fn laplacian_fd<F: Fn(&HPoint) -> f64>(field: F, x: &HPoint, h: f64) -> f64 {
    laplacian_fd_lorentz(|p| field(&p.to_hpoint()), &x.to_lorentz(), h)
}

/// [`laplacian_fd`] for a field given on the hyperboloid.
pub fn laplacian_fd_lorentz<F: Fn(&Lorentz) -> f64>(field: F, x: &Lorentz, h: f64) -> f64 {
    let f0 = field(x);
    x.frame()
        .iter()
        .map(|e| (field(&x.exp(e, h)) + field(&x.exp(e, -h)) - 2.0 * f0) / (h * h))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> HPoint {
        HPoint::new(x, y).unwrap()
    }

    /// Minimizes a unimodal function on [a, b] by golden-section search.
    fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        while b - a > 1e-10 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    /// Brute-force nearest distance over a sampled curve, refined locally.
    fn nearest<C: Fn(f64) -> Lorentz>(x: &Lorentz, curve: C, lo: f64, hi: f64) -> f64 {
        let n = 4000;
        let step = (hi - lo) / n as f64;
        let (mut best, mut arg) = (f64::INFINITY, lo);
        for i in 0..=n {
            let t = lo + step * i as f64;
            let d = x.dist(&curve(t));
            if d < best {
                best = d;
                arg = t;
            }
        }
        golden_min(|t| x.dist(&curve(t)), arg - step, arg + step)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist(&HPoint::origin(), &HPoint::origin()), 0.0);
        let d = dist(&HPoint::origin(), &pt(0.5, 0.0));
        assert!((d - 3f64.ln()).abs() < 1e-15);
        // length of the diameter segment under the metric 2|dz|/(1-|z|²)
        let len = quad::integral(|t| 2.0 / (1.0 - t * t), 0.0, 0.5);
        assert!((d - len).abs() < 1e-12);
        let l = HPoint::origin().to_lorentz().dist(&pt(0.5, 0.0).to_lorentz());
        assert!((l - d).abs() < 1e-14);
    }

    #[test]
    fn lorentz_round_trip() {
        let p = pt(0.3, -0.7);
        let x = p.to_lorentz();
        assert!((x.dot(&x) + 1.0).abs() < 1e-12);
        let q = x.to_hpoint();
        assert!((q.x - p.x).abs() < 1e-15 && (q.y - p.y).abs() < 1e-15);
    }

    #[test]
    fn ideal_point_normalizes() {
        assert!((IdealPoint::new(-0.5).theta - (TAU - 0.5)).abs() < 1e-15);
        assert!((IdealPoint::new(7.0).theta - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(IdealPoint::new(TAU).theta, 0.0);
    }

    #[test]
    fn circle_distance_cases() {
        let c = HCircle::new(HPoint::origin(), 1.0).unwrap();
        let on = HPoint::polar(1.0, 0.4);
        assert_eq!(dist_to_circle(&on, &c).unwrap(), 0.0);
        let inside = HPoint::polar(0.5, 0.4);
        assert!(matches!(dist_to_circle(&inside, &c), Err(Error::InsideDomain(_))));
        let far = HPoint::polar(2.5, 2.0);
        assert!((dist_to_circle(&far, &c).unwrap() - 1.5).abs() < 1e-12);
        let p = HCircle::new(pt(0.2, 0.1), 0.0).unwrap();
        let x = pt(-0.4, 0.3);
        assert!((dist_to_circle(&x, &p).unwrap() - dist(&x, &p.center)).abs() < 1e-12);
        assert!(HCircle::new(HPoint::origin(), -1.0).is_err());
    }

    #[test]
    fn circle_point_is_at_requested_distance() {
        let c = HCircle::new(pt(0.3, -0.2), 0.7).unwrap();
        for &(s, a) in &[(0.0, 0.0), (0.4, 1.0), (3.0, 4.0)] {
            let x = c.point(s, a);
            assert!((c.dist_lorentz(&x).unwrap() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn horocycle_cases() {
        let h = Horocycle::new(IdealPoint::new(0.0), 0.0);
        assert!(dist_to_horocycle(&HPoint::origin(), &h).unwrap().abs() < 1e-15);
        let toward = pt(0.5, 0.0);
        assert!(matches!(dist_to_horocycle(&toward, &h), Err(Error::InsideDomain(_))));
        let away = pt(-0.5, 0.0);
        // along the diameter the Busemann function is the signed distance
        assert!((dist_to_horocycle(&away, &h).unwrap() - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn horocycle_point_parametrization() {
        let h = Horocycle::new(IdealPoint::new(1.2), 0.4);
        for &(s, tau) in &[(0.0, 0.0), (0.7, -1.3), (2.0, 2.5)] {
            let x = h.point(s, tau);
            assert!((x.dot(&x) + 1.0).abs() < 1e-10);
            assert!((h.dist_lorentz(&x).unwrap() - s).abs() < 1e-12);
        }
        // τ is arclength along the horocycle: nearby points are τ apart to first order
        let (a, b) = (h.point(0.0, 0.3), h.point(0.0, 0.3 + 1e-5));
        assert!((a.dist(&b) / 1e-5 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn horocycle_nearest_point_oracle() {
        let h = Horocycle::new(IdealPoint::new(2.0), -0.3);
        for &(s, tau) in &[(0.2, 0.5), (1.1, -2.0), (2.5, 1.0)] {
            let x = h.point(s, tau);
            let d = nearest(&x, |t| h.point(0.0, t), -40.0, 40.0);
            assert!((d - h.dist_lorentz(&x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn geodesic_sign_and_oracle() {
        let g = Geodesic::new(IdealPoint::new(0.3), IdealPoint::new(2.5), IdealPoint::new(1.0)).unwrap();
        let on = g.fermi_point(0.0, 0.7).to_hpoint();
        assert!(signed_dist_to_geodesic(&on, &g).abs() < 1e-12);
        let x = pt(0.6, 0.5);
        let s = signed_dist_to_geodesic(&x, &g);
        assert!(s > 0.0);
        assert!((signed_dist_to_geodesic(&x, &g.flipped()) + s).abs() < 1e-12);
        for &y in &[pt(0.6, 0.5), pt(-0.5, -0.2), pt(0.1, 0.0)] {
            let sd = signed_dist_to_geodesic(&y, &g);
            let d = nearest(&y.to_lorentz(), |t| g.fermi_point(0.0, t), -30.0, 30.0);
            assert!((d - sd.abs()).abs() < 1e-6);
        }
        assert!(Geodesic::new(IdealPoint::new(1.0), IdealPoint::new(1.0), IdealPoint::new(2.0)).is_err());
        assert!(Geodesic::new(IdealPoint::new(1.0), IdealPoint::new(2.0), IdealPoint::new(2.0)).is_err());
    }

    #[test]
    fn fermi_coordinates() {
        let g = Geodesic::new(IdealPoint::new(4.0), IdealPoint::new(0.5), IdealPoint::new(2.0)).unwrap();
        for &(s, tau) in &[(0.3, 0.0), (-1.2, 2.0), (5.0, -3.0)] {
            let x = g.fermi_point(s, tau);
            assert!((g.signed_dist_lorentz(&x) - s).abs() < 1e-10);
        }
        // the foot is the closest point of the geodesic to the origin
        let d = nearest(&Lorentz::ORIGIN, |t| g.fermi_point(0.0, t), -20.0, 20.0);
        assert!((d - g.foot().dist(&Lorentz::ORIGIN)).abs() < 1e-8);
        // increasing τ runs toward q2
        let far = g.fermi_point(0.0, 30.0).to_hpoint();
        let q2 = g.q2.theta;
        assert!((far.x - q2.cos()).abs() < 1e-6 && (far.y - q2.sin()).abs() < 1e-6);
        assert!(g.is_plus(&g.plus_side));
        assert!(!g.flipped().is_plus(&g.plus_side));
    }

    #[test]
    fn ray_examples() {
        let x = pt(0.1, -0.3);
        let q = IdealPoint::new(1.0);
        assert_eq!(geodesic_ray(&x, &q, 0.0), x);
        let p = geodesic_ray(&HPoint::origin(), &IdealPoint::new(0.0), 3f64.ln());
        assert!((p.x - 0.5).abs() < 1e-14 && p.y.abs() < 1e-14);
        let far = geodesic_ray(&x, &q, 25.0);
        assert!((far.x - q.theta.cos()).abs() < 1e-9 && (far.y - q.theta.sin()).abs() < 1e-9);
    }

    #[test]
    fn laplacian_of_distance_fields() {
        let c = HCircle::new(pt(0.1, 0.2), 0.8).unwrap();
        let h = Horocycle::new(IdealPoint::new(0.7), 0.2);
        let g = Geodesic::new(IdealPoint::new(0.3), IdealPoint::new(3.0), IdealPoint::new(1.5)).unwrap();
        for &(s, a) in &[(0.2, 0.0), (1.0, 2.0), (3.0, 5.0)] {
            let x = c.point(s, a);
            let l = laplacian_fd_lorentz(|p| c.dist_lorentz(p).unwrap(), &x, LAPLACIAN_STEP);
            assert!((l - 1.0 / (c.radius + s).tanh()).abs() < 1e-4);
            let x = h.point(s, a);
            let l = laplacian_fd_lorentz(|p| h.dist_lorentz(p).unwrap(), &x, LAPLACIAN_STEP);
            assert!((l - 1.0).abs() < 1e-4);
            let x = g.fermi_point(s - 1.5, a - 2.0);
            let l = laplacian_fd_lorentz(|p| g.signed_dist_lorentz(p), &x, LAPLACIAN_STEP);
            assert!((l - (s - 1.5).tanh()).abs() < 1e-4);
        }
        let y = pt(0.3, 0.6);
        let l = laplacian_fd(|p| signed_dist_to_geodesic(p, &g), &y, LAPLACIAN_STEP);
        assert!((l - signed_dist_to_geodesic(&y, &g).tanh()).abs() < 1e-4);
    }

    fn disk_point() -> impl Strategy<Value = HPoint> {
        (0.0..0.95f64, 0.0..TAU).prop_map(|(r, a)| HPoint { x: r * a.cos(), y: r * a.sin() })
    }

    proptest! {
        #[test]
        fn dist_is_a_metric(a in disk_point(), b in disk_point(), c in disk_point()) {
            let ab = dist(&a, &b);
            prop_assert!((ab - dist(&b, &a)).abs() <= 1e-12 * (1.0 + ab));
            prop_assert!(ab <= dist(&a, &c) + dist(&c, &b) + 1e-9);
            prop_assert!(dist(&a, &a) == 0.0);
        }

        #[test]
        fn dist_is_rotation_invariant(a in disk_point(), b in disk_point(), phi in 0.0..TAU) {
            let rot = |p: &HPoint| HPoint {
                x: p.x * phi.cos() - p.y * phi.sin(),
                y: p.x * phi.sin() + p.y * phi.cos(),
            };
            let d = dist(&a, &b);
            prop_assert!((dist(&rot(&a), &rot(&b)) - d).abs() <= 1e-12 * d.max(1.0));
        }

        #[test]
        fn ray_is_isometric(r in 0.0..0.5f64, a in 0.0..TAU, th in 0.0..TAU, t1 in 0.0..5.0f64, t2 in 0.0..5.0f64) {
            let x = HPoint::polar(r, a);
            let q = IdealPoint::new(th);
            let p = x.to_lorentz();
            let v = p.direction_to(&q);
            let d = p.exp(&v, t1).dist(&p.exp(&v, t2));
            prop_assert!((d - (t1 - t2).abs()).abs() <= 1e-10);
            let y = geodesic_ray(&x, &q, t1);
            prop_assert!((dist(&x, &y) - t1).abs() <= 1e-10);
        }
    }
}
