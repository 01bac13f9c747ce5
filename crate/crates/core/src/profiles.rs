//! Profile functions of the invariant CMC-H families.
//!
//! Every family reduces to a first-order ODE for `ψ = φ′/√(1+φ′²)`:
//!
//! ```text
//! ψ′ + ψ·Δs − 2H = 0
//! ```
//!
//! where `Δs` is `coth(r+s)` (rotational), `tanh s` (hyperbolic) or `1`
//! (parabolic). Each profile exposes `ψ` in closed form, `φ′ = ψ/√(1−ψ²)`,
//! and `φ` by quadrature. Near an edge where `ψ → ±1` the integrand blows up
//! like an inverse square root, so the first stretch is integrated after the
//! substitution `t = edge + u²`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integral, integral_sqrt_endpoint};

/// Length of the stretch next to a singular endpoint handled by substitution.
const SINGULAR_WINDOW: f64 = 1.0;

/// A mean curvature value in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MeanCurvatureH(f64);

impl MeanCurvatureH {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&value) {
            return Err(Error::Domain(format!("H = {value} is outside [0, 1/2]")));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Fails for `H = 1/2`, where the asymptotic slope is infinite.
    pub fn subcritical(&self) -> Result<f64> {
        if self.0 >= 0.5 {
            Err(Error::Domain("H = 1/2 is excluded here (infinite asymptotic slope)".into()))
        } else {
            Ok(self.0)
        }
    }
}

/// The asymptotic slope `l_H = 2H/√(1−4H²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeLH {
    Finite(f64),
    Infinite,
}

impl SlopeLH {
    pub fn value(&self) -> f64 {
        match self {
            SlopeLH::Finite(v) => *v,
            SlopeLH::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for SlopeLH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeLH::Finite(v) => write!(f, "{v}"),
            SlopeLH::Infinite => f.write_str("inf"),
        }
    }
}

pub fn lh(h: MeanCurvatureH) -> SlopeLH {
    let h = h.value();
    if h >= 0.5 {
        SlopeLH::Infinite
    } else {
        SlopeLH::Finite(2.0 * h / (1.0 - 4.0 * h * h).sqrt())
    }
}

/// `sinh(x/2)/(x/2)`, accurate near zero.
fn shc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 24.0
    } else {
        (0.5 * x).sinh() / (0.5 * x)
    }
}

/// `(1 − e^{−x})/x`, accurate near zero.
fn emc(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 - 0.5 * x + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `φ′ = ψ/√(1−ψ²)` given `ψ`, `1−ψ` and `1+ψ` separately for accuracy.
fn slope_from(psi: f64, one_minus: f64, one_plus: f64) -> f64 {
    psi / (one_minus * one_plus).sqrt()
}

// ---------------------------------------------------------------------------
// Rotational family

/// Rotational profile: waist radius `r > 0` gives the H-unduloid half, `r = 0`
/// the entire H-cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationalProfile {
    pub h: MeanCurvatureH,
    pub r: f64,
}

impl RotationalProfile {
    pub fn new(h: MeanCurvatureH, r: f64) -> Result<Self> {
        h.subcritical()?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("waist radius {r} must be finite and non-negative")));
        }
        Ok(Self { h, r })
    }

    pub fn is_cap(&self) -> bool {
        self.r == 0.0
    }

    /// `2H(cosh(r+t) − cosh r) + sinh r`.
    fn numerator(&self, t: f64) -> f64 {
        let (h, r) = (self.h.value(), self.r);
        4.0 * h * (r + 0.5 * t).sinh() * (0.5 * t).sinh() + r.sinh()
    }

    /// `cosh(r+t/2) − 2H sinh(r+t/2)`, positive for `H < 1/2`.
    fn k(&self, t: f64) -> f64 {
        let a = self.r + 0.5 * t;
        a.cosh() - 2.0 * self.h.value() * a.sinh()
    }

    pub fn psi(&self, s: f64) -> f64 {
        if self.is_cap() {
            return 2.0 * self.h.value() * (0.5 * s).tanh();
        }
        self.numerator(s) / (self.r + s).sinh()
    }

    pub fn dphi(&self, s: f64) -> f64 {
        let h = self.h.value();
        if self.is_cap() {
            let th = (0.5 * s).tanh();
            return 2.0 * h * th / (1.0 - 4.0 * h * h * th * th).sqrt();
        }
        if s == 0.0 {
            return f64::INFINITY;
        }
        let a = self.numerator(s);
        let d1 = 2.0 * (0.5 * s).sinh() * self.k(s);
        let d2 = (self.r + s).sinh() + a;
        a / (d1.sqrt() * d2.sqrt())
    }

    /// Bounded factor `√τ·φ′(τ)` near the waist.
    fn regular(&self, tau: f64) -> f64 {
        let a = self.numerator(tau);
        let d2 = (self.r + tau).sinh() + a;
        a / (shc(tau) * self.k(tau) * d2).sqrt()
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("profile evaluated at s = {s} < 0")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        if self.is_cap() {
            return Ok(if self.h.value() == 0.0 { 0.0 } else { integral(|t| self.dphi(t), 0.0, s) });
        }
        let w = s.min(SINGULAR_WINDOW);
        let mut v = integral_sqrt_endpoint(|t| self.regular(t), 0.0, w);
        if s > w {
            v += integral(|t| self.dphi(t), w, s);
        }
        Ok(v)
    }
}

/// The H-unduloid profile of waist radius `r > 0`.
pub fn und(p: &RotationalProfile, s: f64) -> Result<f64> {
    if p.is_cap() {
        return Err(Error::Domain("the unduloid profile needs a positive waist radius".into()));
    }
    p.phi(s)
}

/// The H-cap profile.
pub fn cap(h: MeanCurvatureH, s: f64) -> Result<f64> {
    RotationalProfile::new(h, 0.0)?.phi(s)
}

/// Derivative of [`cap`].
pub fn cap_prime(h: MeanCurvatureH, s: f64) -> Result<f64> {
    Ok(RotationalProfile::new(h, 0.0)?.dphi(s))
}

/// Closed form of [`cap`]: `2 l_H ln((w + k) cosh(s/2) / (1 + k))` with
/// `k = √(1 − 4H²)` and `w = √(1 − 4H² tanh²(s/2))`.
pub fn cap_closed(h: MeanCurvatureH, s: f64) -> Result<f64> {
    let l = lh(h);
    let hv = h.subcritical()?;
    if s < 0.0 {
        return Err(Error::OutsideDomain(format!("cap evaluated at s = {s} < 0")));
    }
    let k = (1.0 - 4.0 * hv * hv).sqrt();
    let th = (0.5 * s).tanh();
    let w = (1.0 - 4.0 * hv * hv * th * th).sqrt();
    let ln_cosh = 0.5 * s + (-s).exp().ln_1p() - std::f64::consts::LN_2;
    Ok(2.0 * l.value() * (((w + k) / (1.0 + k)).ln() + ln_cosh))
}

// ---------------------------------------------------------------------------
// Hyperbolic family

/// Which of the five regimes of the parameter `C` a hyperbolic profile is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperbolicCase {
    /// `C > 1`: hyperunduloid half, vertical at `M_C`.
    Unduloid,
    /// `C = 1`: `φ → −∞` at `M_C = R`.
    PlusOne,
    /// `|C| < 1`: entire hypercap.
    Cap,
    /// `C = −1`: `φ → +∞` at `M_C = −R`.
    MinusOne,
    /// `C < −1`: hypernodoid half, vertical at `M_C`.
    Nodoid,
}

/// Profile invariant under hyperbolic translations along a geodesic, with
/// `ψ = g_C(s) = (sinh R sinh s + C)/(cosh R cosh s)` and `R = artanh 2H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicProfile {
    pub h: MeanCurvatureH,
    pub c: f64,
    /// `R = artanh(2H)`.
    pub r: f64,
    /// Left end of the maximal interval where `|g_C| < 1`.
    pub m_c: f64,
}

impl HyperbolicProfile {
    pub fn new(h: MeanCurvatureH, c: f64) -> Result<Self> {
        let hv = h.subcritical()?;
        if !c.is_finite() {
            return Err(Error::Domain(format!("C = {c} must be finite")));
        }
        let r = (2.0 * hv).atanh();
        let m_c = if c > 1.0 {
            r + c.acosh()
        } else if c == 1.0 {
            r
        } else if c > -1.0 {
            f64::NEG_INFINITY
        } else if c == -1.0 {
            -r
        } else {
            (-c).acosh() - r
        };
        Ok(Self { h, c, r, m_c })
    }

    pub fn case(&self) -> HyperbolicCase {
        let c = self.c;
        if c > 1.0 {
            HyperbolicCase::Unduloid
        } else if c == 1.0 {
            HyperbolicCase::PlusOne
        } else if c > -1.0 {
            HyperbolicCase::Cap
        } else if c == -1.0 {
            HyperbolicCase::MinusOne
        } else {
            HyperbolicCase::Nodoid
        }
    }

    /// `sinh R`, which equals `l_H`.
    fn sr(&self) -> f64 {
        self.r.sinh()
    }

    fn cr(&self) -> f64 {
        self.r.cosh()
    }

    pub fn g(&self, s: f64) -> f64 {
        if s.abs() > 700.0 {
            // both numerator and denominator overflow; use the limits
            return if s > 0.0 { 2.0 * self.h.value() } else { -2.0 * self.h.value() };
        }
        (self.sr() * s.sinh() + self.c) / (self.cr() * s.cosh())
    }

    /// `cosh(s−R) − C`, proportional to `1 − g`.
    fn p(&self, s: f64) -> f64 {
        if self.c > 1.0 {
            let a = self.c.acosh();
            2.0 * (0.5 * (s - self.r + a)).sinh() * (0.5 * (s - self.r - a)).sinh()
        } else if self.c == 1.0 {
            2.0 * (0.5 * (s - self.r)).sinh().powi(2)
        } else {
            (s - self.r).cosh() - self.c
        }
    }

    /// `cosh(s+R) + C`, proportional to `1 + g`.
    fn q(&self, s: f64) -> f64 {
        if self.c < -1.0 {
            let a = (-self.c).acosh();
            2.0 * (0.5 * (s + self.r + a)).sinh() * (0.5 * (s + self.r - a)).sinh()
        } else if self.c == -1.0 {
            2.0 * (0.5 * (s + self.r)).sinh().powi(2)
        } else {
            (s + self.r).cosh() + self.c
        }
    }

    pub fn psi(&self, s: f64) -> f64 {
        self.g(s)
    }

    /// `φ′ = g/√(1−g²)`; infinite at a vertical edge.
    pub fn dphi(&self, s: f64) -> f64 {
        match self.case() {
            HyperbolicCase::PlusOne => {
                return (self.sr() * s.sinh() + 1.0) / (s.sinh() - self.sr());
            }
            HyperbolicCase::MinusOne => {
                return (self.sr() * s.sinh() - 1.0) / (s.sinh() + self.sr());
            }
            _ => {}
        }
        if s.abs() > 300.0 {
            let g = self.g(s);
            return slope_from(g, 1.0 - g, 1.0 + g);
        }
        let (p, q) = (self.p(s), self.q(s));
        if p <= 0.0 || q <= 0.0 {
            return if p <= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        (self.sr() * s.sinh() + self.c) / (p * q).sqrt()
    }

    /// Bounded factor `√τ·φ′(M_C + τ)` for `|C| > 1`.
    fn regular(&self, tau: f64) -> f64 {
        let s = self.m_c + tau;
        let num = self.sr() * s.sinh() + self.c;
        if self.c > 1.0 {
            let a = self.c.acosh();
            num / (shc(tau) * (a + 0.5 * tau).sinh() * self.q(s)).sqrt()
        } else {
            let a = (-self.c).acosh();
            num / (shc(tau) * (a + 0.5 * tau).sinh() * self.p(s)).sqrt()
        }
    }

    /// Minimum point of a hypercap, the zero `x_m = −arsinh(C/sinh R)` of `g`.
    /// At `H = 0` the profile has no critical point unless `C = 0`; the
    /// origin of the `s` axis is used instead.
    pub fn x_m(&self) -> Option<f64> {
        if self.case() != HyperbolicCase::Cap {
            return None;
        }
        let sr = self.sr();
        Some(if sr == 0.0 { 0.0 } else { -(self.c / sr).asinh() })
    }

    /// Point where `φ` vanishes.
    pub fn anchor(&self) -> f64 {
        match self.case() {
            HyperbolicCase::Unduloid | HyperbolicCase::Nodoid => self.m_c,
            HyperbolicCase::PlusOne | HyperbolicCase::MinusOne => self.m_c + 1.0,
            HyperbolicCase::Cap => self.x_m().unwrap_or(0.0),
        }
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        let ok = match self.case() {
            HyperbolicCase::Unduloid | HyperbolicCase::Nodoid => s >= self.m_c,
            HyperbolicCase::PlusOne | HyperbolicCase::MinusOne => s > self.m_c,
            HyperbolicCase::Cap => s.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("s = {s} is outside the profile domain (M_C = {})", self.m_c)))
        }
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        match self.case() {
            HyperbolicCase::Unduloid | HyperbolicCase::Nodoid => {
                let tau = s - self.m_c;
                if tau == 0.0 {
                    return Ok(0.0);
                }
                let w = tau.min(SINGULAR_WINDOW);
                let mut v = integral_sqrt_endpoint(|t| self.regular(t), 0.0, w);
                if tau > w {
                    v += integral(|t| self.dphi(t), self.m_c + w, s);
                }
                Ok(v)
            }
            _ => Ok(integral(|t| self.dphi(t), self.anchor(), s)),
        }
    }

    /// Closed form for `C = ±1`, normalized to vanish at `M_C + 1`.
    pub fn phi_closed(&self, s: f64) -> Result<f64> {
        let raw: fn(&Self, f64) -> f64 = match self.case() {
            HyperbolicCase::PlusOne => Self::raw_plus,
            HyperbolicCase::MinusOne => Self::raw_minus,
            _ => return Err(Error::Domain(format!("closed form only exists for C = ±1, got C = {}", self.c))),
        };
        if !(s > self.m_c) {
            return Err(Error::Domain(format!("s = {s} is outside (M_C, ∞) with M_C = {}", self.m_c)));
        }
        Ok(raw(self, s) - raw(self, self.anchor()))
    }

    /// `sinh R·s + cosh R·ln((e^s − e^R)/(e^s + e^{−R}))`.
    fn raw_plus(&self, s: f64) -> f64 {
        let r = self.r;
        self.sr() * s + self.cr() * (r - s + (s - r).exp_m1().ln() - (-(r + s)).exp().ln_1p())
    }

    /// `sinh R·s + cosh R·ln((e^s + e^R)/(e^s − e^{−R}))`.
    fn raw_minus(&self, s: f64) -> f64 {
        let r = self.r;
        self.sr() * s + self.cr() * (s + (r - s).exp().ln_1p() + r - (s + r).exp_m1().ln())
    }

    /// `g′(M_C) = 2H − tanh(M_C)` for `C > 1`, written out in `H` and `C`.
    pub fn gprime_at_mc(&self) -> Result<f64> {
        if !(self.c > 1.0) {
            return Err(Error::Domain(format!("g'(M_C) is defined here for C > 1, got C = {}", self.c)));
        }
        let h2 = 2.0 * self.h.value();
        let w = (self.c * self.c - 1.0).sqrt();
        Ok(h2 - (h2 * self.c + w) / (self.c + h2 * w))
    }
}

pub fn gc(p: &HyperbolicProfile, s: f64) -> f64 {
    p.g(s)
}

pub fn mc(p: &HyperbolicProfile) -> f64 {
    p.m_c
}

pub fn phi_c(p: &HyperbolicProfile, s: f64) -> Result<f64> {
    p.phi(s)
}

pub fn phi_c_closed(p: &HyperbolicProfile, s: f64) -> Result<f64> {
    p.phi_closed(s)
}

pub fn gprime_at_mc(p: &HyperbolicProfile) -> Result<f64> {
    p.gprime_at_mc()
}

// ---------------------------------------------------------------------------
// Parabolic family

/// Profile invariant under parabolic isometries, with
/// `ψ = 2H + (1−2H)e^{−s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicProfile {
    pub h: MeanCurvatureH,
}

impl ParabolicProfile {
    pub fn new(h: MeanCurvatureH) -> Result<Self> {
        h.subcritical()?;
        Ok(Self { h })
    }

    pub fn psi(&self, s: f64) -> f64 {
        let h2 = 2.0 * self.h.value();
        h2 + (1.0 - h2) * (-s).exp()
    }

    pub fn dphi(&self, s: f64) -> f64 {
        if s == 0.0 {
            return f64::INFINITY;
        }
        let h2 = 2.0 * self.h.value();
        let c = self.psi(s);
        let om = -(-s).exp_m1();
        c / ((1.0 - h2) * om * (1.0 + c)).sqrt()
    }

    fn regular(&self, tau: f64) -> f64 {
        let h2 = 2.0 * self.h.value();
        let c = self.psi(tau);
        c / ((1.0 - h2) * emc(tau) * (1.0 + c)).sqrt()
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("profile evaluated at s = {s} < 0")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let w = s.min(SINGULAR_WINDOW);
        let mut v = integral_sqrt_endpoint(|t| self.regular(t), 0.0, w);
        if s > w {
            v += integral(|t| self.dphi(t), w, s);
        }
        Ok(v)
    }

    /// `θ + 2l_H·artanh(√((1+2H)/(1−2H))·tan(θ/2))` with
    /// `cos θ = (1−2H)e^{−s} + 2H`.
    pub fn phi_closed(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("profile evaluated at s = {s} < 0")));
        }
        let h2 = 2.0 * self.h.value();
        let c = self.psi(s);
        let om = -(-s).exp_m1();
        let theta = 2.0 * ((1.0 - h2) * om / (1.0 + c)).sqrt().atan();
        if h2 == 0.0 {
            return Ok(theta);
        }
        let x = ((1.0 + h2) * om / (1.0 + c)).sqrt();
        // artanh x, with 1 − x² = 2e^{−s}/(1+c) kept exact for large s
        let at = (1.0 + x).ln() + 0.5 * s - 0.5 * (2.0 / (1.0 + c)).ln();
        Ok(theta + 2.0 * h2 / (1.0 - h2 * h2).sqrt() * at)
    }

    /// `θ(s) = arccos((1−2H)e^{−s} + 2H)`.
    pub fn theta(&self, s: f64) -> f64 {
        let h2 = 2.0 * self.h.value();
        let c = self.psi(s);
        2.0 * ((1.0 - h2) * (-(-s).exp_m1()) / (1.0 + c)).sqrt().atan()
    }
}

pub fn horo(h: MeanCurvatureH, s: f64) -> Result<f64> {
    ParabolicProfile::new(h)?.phi(s)
}

pub fn horo_closed(h: MeanCurvatureH, s: f64) -> Result<f64> {
    ParabolicProfile::new(h)?.phi_closed(s)
}

// ---------------------------------------------------------------------------

/// Any of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Rotational(RotationalProfile),
    Hyperbolic(HyperbolicProfile),
    Parabolic(ParabolicProfile),
}

impl Profile {
    pub fn h(&self) -> MeanCurvatureH {
        match self {
            Profile::Rotational(p) => p.h,
            Profile::Hyperbolic(p) => p.h,
            Profile::Parabolic(p) => p.h,
        }
    }

    /// Left end of the domain in `s` (`−∞` for hypercaps).
    pub fn edge(&self) -> f64 {
        match self {
            Profile::Rotational(_) | Profile::Parabolic(_) => 0.0,
            Profile::Hyperbolic(p) => p.m_c,
        }
    }

    /// Whether `s = edge` itself belongs to the domain.
    pub fn edge_included(&self) -> bool {
        match self {
            Profile::Hyperbolic(p) => !matches!(p.case(), HyperbolicCase::PlusOne | HyperbolicCase::MinusOne),
            _ => true,
        }
    }

    /// Whether the graph is vertical along the edge, the condition for
    /// gluing it to its mirror image.
    pub fn vertical_edge(&self) -> bool {
        match self {
            Profile::Rotational(p) => !p.is_cap(),
            Profile::Hyperbolic(p) => matches!(p.case(), HyperbolicCase::Unduloid | HyperbolicCase::Nodoid),
            Profile::Parabolic(_) => true,
        }
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        match self {
            Profile::Rotational(p) => p.phi(s),
            Profile::Hyperbolic(p) => p.phi(s),
            Profile::Parabolic(p) => p.phi(s),
        }
    }

    pub fn dphi(&self, s: f64) -> f64 {
        match self {
            Profile::Rotational(p) => p.dphi(s),
            Profile::Hyperbolic(p) => p.dphi(s),
            Profile::Parabolic(p) => p.dphi(s),
        }
    }

    pub fn psi(&self, s: f64) -> f64 {
        match self {
            Profile::Rotational(p) => p.psi(s),
            Profile::Hyperbolic(p) => p.psi(s),
            Profile::Parabolic(p) => p.psi(s),
        }
    }

    /// Laplacian of the distance field that generates this family, as a
    /// function of the distance.
    pub fn laplacian_s(&self, s: f64) -> f64 {
        match self {
            Profile::Rotational(p) => 1.0 / (p.r + s).tanh(),
            Profile::Hyperbolic(_) => s.tanh(),
            Profile::Parabolic(_) => 1.0,
        }
    }

    /// Residual of `ψ′ + ψ·Δs − 2H` with `ψ′` from central differences.
    pub fn ode_residual(&self, s: f64, step: f64) -> f64 {
        let d = (self.psi(s + step) - self.psi(s - step)) / (2.0 * step);
        d + self.psi(s) * self.laplacian_s(s) - 2.0 * self.h().value()
    }

    /// Limit of `φ(s) − l_H·s`, evaluated where the remainder is below
    /// double precision.
    pub fn asymptotic_offset(&self) -> Result<f64> {
        let l = lh(self.h()).value();
        let s = 40.0_f64.max(self.edge() + 40.0);
        Ok(self.phi(s)? - l * s)
    }
}
