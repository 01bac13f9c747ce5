//! Invariant CMC-H graphs `u = φ(s(x))` over the domains of the three
//! distance fields, their Alexandrov reflections, residual checks and meshes.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geodesic, HCircle, HPoint, Horocycle, IdealPoint, Lorentz};
use crate::profiles::{HyperbolicProfile, MeanCurvatureH, ParabolicProfile, Profile, RotationalProfile};

/// Distance from the domain edge below which residuals are not evaluated.
pub const INTERIOR_MARGIN: f64 = 0.05;

/// Step of the central difference applied to the flux `φ′/√(1+φ′²)`.
pub const FLUX_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Rotational,
    Hyperbolic,
    Parabolic,
}

/// The curve whose distance field generates the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Base {
    Circle(HCircle),
    Geodesic(Geodesic),
    Horocycle(Horocycle),
}

/// Height of a graph, or of both sheets of a reflected one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Height {
    Single(f64),
    Pair(f64, f64),
}

impl Height {
    pub fn upper(&self) -> f64 {
        match *self {
            Height::Single(v) | Height::Pair(v, _) => v,
        }
    }
}

/// The default geodesic for hyperbolic surfaces: the vertical diameter, with
/// the side containing the ideal point at angle 0 marked positive.
pub fn default_geodesic() -> Geodesic {
    Geodesic {
        q1: IdealPoint::new(3.0 * FRAC_PI_2),
        q2: IdealPoint::new(FRAC_PI_2),
        plus_side: IdealPoint::new(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantSurface {
    pub profile: Profile,
    pub base: Base,
    pub reflected: bool,
}

impl InvariantSurface {
    pub fn new(profile: Profile, base: Base) -> Result<Self> {
        match (&profile, &base) {
            (Profile::Rotational(p), Base::Circle(c)) => {
                if (p.r - c.radius).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "circle radius {} differs from waist radius {}",
                        c.radius, p.r
                    )));
                }
            }
            (Profile::Hyperbolic(_), Base::Geodesic(_)) | (Profile::Parabolic(_), Base::Horocycle(_)) => {}
            _ => return Err(Error::InvalidInput("base curve does not match the profile family".into())),
        }
        Ok(Self { profile, base, reflected: false })
    }

    /// Rotational surface about `center`: the H-cap for `r = 0`, otherwise
    /// the upper half of the H-unduloid with waist radius `r`.
    pub fn rotational(h: MeanCurvatureH, r: f64, center: HPoint) -> Result<Self> {
        let p = RotationalProfile::new(h, r)?;
        Self::new(Profile::Rotational(p), Base::Circle(HCircle::new(center, r)?))
    }

    pub fn cap(h: MeanCurvatureH) -> Result<Self> {
        Self::rotational(h, 0.0, HPoint::origin())
    }

    pub fn hyperbolic(h: MeanCurvatureH, c: f64, g: Geodesic) -> Result<Self> {
        Self::new(Profile::Hyperbolic(HyperbolicProfile::new(h, c)?), Base::Geodesic(g))
    }

    pub fn parabolic(h: MeanCurvatureH, horo: Horocycle) -> Result<Self> {
        Self::new(Profile::Parabolic(ParabolicProfile::new(h)?), Base::Horocycle(horo))
    }

    pub fn kind(&self) -> SurfaceKind {
        match self.profile {
            Profile::Rotational(_) => SurfaceKind::Rotational,
            Profile::Hyperbolic(_) => SurfaceKind::Hyperbolic,
            Profile::Parabolic(_) => SurfaceKind::Parabolic,
        }
    }

    pub fn h(&self) -> MeanCurvatureH {
        self.profile.h()
    }

    /// Glues the graph to its mirror image across `H²×{0}`.
    pub fn alexandrov_reflect(&self) -> Result<Self> {
        if !self.profile.vertical_edge() {
            return Err(Error::Gluing("the slope along the domain edge is finite".into()));
        }
        Ok(Self { reflected: true, ..*self })
    }

    /// Value of the generating distance field at a hyperboloid point.
    pub fn s_lorentz(&self, x: &Lorentz) -> Result<f64> {
        let s = match &self.base {
            Base::Circle(c) => c.dist_lorentz(x),
            Base::Geodesic(g) => Ok(g.signed_dist_lorentz(x)),
            Base::Horocycle(h) => h.dist_lorentz(x),
        };
        s.map_err(|e| match e {
            Error::InsideDomain(m) => Error::OutsideDomain(m),
            other => other,
        })
    }

    pub fn s(&self, x: &HPoint) -> Result<f64> {
        self.s_lorentz(&x.to_lorentz())
    }

    /// Point with distance `s` and level-set parameter `t`: the angle for
    /// rotational surfaces, arclength along the base for the others.
    pub fn point_at(&self, s: f64, t: f64) -> Lorentz {
        match &self.base {
            Base::Circle(c) => c.point(s, t),
            Base::Geodesic(g) => g.fermi_point(s, t),
            Base::Horocycle(h) => h.point(s, t),
        }
    }

    fn check_s(&self, s: f64) -> Result<()> {
        let edge = self.profile.edge();
        let ok = if self.profile.edge_included() { s >= edge } else { s > edge };
        if ok {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("s = {s} lies outside the domain (edge at {edge})")))
        }
    }

    /// Height of the upper sheet as a function of the distance parameter.
    pub fn phi(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        self.profile.phi(s)
    }

    pub fn height_lorentz(&self, x: &Lorentz) -> Result<Height> {
        let v = self.phi(self.s_lorentz(x)?)?;
        Ok(if self.reflected { Height::Pair(v, -v) } else { Height::Single(v) })
    }

    pub fn height(&self, x: &HPoint) -> Result<Height> {
        self.height_lorentz(&x.to_lorentz())
    }

    /// `Q_H` of the graph at `x`, through the one-dimensional reduction
    /// `(ψ)′ + ψ·Δs − 2H` with `ψ = φ′/√(1+φ′²)`. For a reflected surface the
    /// lower sheet `−φ` is checked against `Q_{−H}` (its mean curvature
    /// vector points down) and the larger residual is returned.
    pub fn qh_residual(&self, x: &HPoint) -> Result<f64> {
        let s = self.s(x)?;
        let edge = self.profile.edge();
        if edge.is_finite() && s < edge + INTERIOR_MARGIN {
            return Err(Error::OutsideDomain(format!(
                "s = {s} is within {INTERIOR_MARGIN} of the domain edge {edge}"
            )));
        }
        let h2 = 2.0 * self.h().value();
        let div = |sign: f64| {
            let flux = |t: f64| {
                let d = sign * self.profile.dphi(t);
                d / (1.0 + d * d).sqrt()
            };
            let dflux = (flux(s + FLUX_STEP) - flux(s - FLUX_STEP)) / (2.0 * FLUX_STEP);
            dflux + flux(s) * self.profile.laplacian_s(s)
        };
        let upper = div(1.0) - h2;
        if !self.reflected {
            return Ok(upper);
        }
        let lower = div(-1.0) + h2;
        Ok(if lower.abs() > upper.abs() { lower } else { upper })
    }

    /// Structured sample of the surface.
    pub fn sample_mesh(&self, spec: &MeshSpec) -> Result<SurfaceMesh> {
        if spec.n_level < 2 || spec.n_s < 2 {
            return Err(Error::InvalidInput("mesh resolution must be at least 2 in each direction".into()));
        }
        let edge = self.profile.edge();
        let (s0, s1) = if edge.is_finite() {
            let start = if self.profile.edge_included() { edge } else { edge + 0.01 * spec.s_extent };
            (start, edge + spec.s_extent)
        } else {
            let centre = match self.profile {
                Profile::Hyperbolic(p) => p.anchor(),
                _ => 0.0,
            };
            (centre - spec.s_extent, centre + spec.s_extent)
        };
        let ss: Vec<f64> = (0..spec.n_s).map(|j| s0 + (s1 - s0) * j as f64 / (spec.n_s - 1) as f64).collect();
        let phis = ss.iter().map(|&s| self.profile.phi(s)).collect::<Result<Vec<_>>>()?;
        let periodic = self.kind() == SurfaceKind::Rotational;
        let ts: Vec<f64> = (0..spec.n_level)
            .map(|i| {
                if periodic {
                    spec.offset + TAU * i as f64 / spec.n_level as f64
                } else {
                    spec.offset - spec.level_extent + 2.0 * spec.level_extent * i as f64 / (spec.n_level - 1) as f64
                }
            })
            .collect();

        let (nl, ns) = (spec.n_level, spec.n_s);
        let mut vertices = Vec::with_capacity(nl * ns * if self.reflected { 2 } else { 1 });
        for &t in &ts {
            for (j, &s) in ss.iter().enumerate() {
                let p = self.point_at(s, t).to_hpoint();
                vertices.push([p.x, p.y, phis[j]]);
            }
        }
        let upper = |i: usize, j: usize| i * ns + j;
        let mut faces = Vec::new();
        let rows = if periodic { nl } else { nl - 1 };
        let quad = |faces: &mut Vec<[usize; 3]>, a: usize, b: usize, c: usize, d: usize| {
            faces.push([a, b, c]);
            faces.push([b, d, c]);
        };
        for i in 0..rows {
            let i2 = (i + 1) % nl;
            for j in 0..ns - 1 {
                quad(&mut faces, upper(i, j), upper(i, j + 1), upper(i2, j), upper(i2, j + 1));
            }
        }
        if self.reflected {
            // mirror sheet shares the edge row j = 0
            let base = vertices.len();
            let lower = |i: usize, j: usize| if j == 0 { upper(i, 0) } else { base + i * (ns - 1) + (j - 1) };
            for &t in &ts {
                for (j, &s) in ss.iter().enumerate().skip(1) {
                    let p = self.point_at(s, t).to_hpoint();
                    vertices.push([p.x, p.y, -phis[j]]);
                }
            }
            for i in 0..rows {
                let i2 = (i + 1) % nl;
                for j in 0..ns - 1 {
                    quad(&mut faces, lower(i, j), lower(i2, j), lower(i, j + 1), lower(i2, j + 1));
                }
            }
        }
        Ok(SurfaceMesh { vertices, faces, description: self.describe() })
    }

    pub fn describe(&self) -> String {
        let h = self.h().value();
        let mut d = match self.profile {
            Profile::Rotational(p) if p.is_cap() => format!("H-cap H={h}"),
            Profile::Rotational(p) => format!("H-unduloid H={h} r={}", p.r),
            Profile::Hyperbolic(p) => format!("hyperbolic H={h} C={}", p.c),
            Profile::Parabolic(_) => format!("horonduloid H={h}"),
        };
        if self.reflected {
            d.push_str(" reflected");
        }
        d
    }
}

/// Sampling parameters for [`InvariantSurface::sample_mesh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    /// Samples along each level set of `s`.
    pub n_level: usize,
    /// Samples along the distance direction.
    pub n_s: usize,
    /// Range of `s` covered, starting at the domain edge.
    pub s_extent: f64,
    /// Half-range of the level-set parameter for non-periodic families.
    pub level_extent: f64,
    /// Shift of the level-set parameter.
    pub offset: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self { n_level: 48, n_s: 32, s_extent: 4.0, level_extent: 3.0, offset: 0.0 }
    }
}

/// Vertices in the product chart `(x, y, height)`, with `(x, y)` in the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub description: String,
}

impl SurfaceMesh {
    pub fn to_obj(&self) -> String {
        let mut out = format!("# {}\n# hcmc {}\n", self.description, crate::VERSION);
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {} hcmc {}\nx,y,height\n", self.description, crate::VERSION);
        for v in &self.vertices {
            let _ = writeln!(out, "{},{},{}", v[0], v[1], v[2]);
        }
        out
    }
}

/// Midpoint, in angle, of the arc of the positive side of `g`.
pub fn plus_arc_midpoint(g: &Geodesic) -> IdealPoint {
    let a = g.q1.theta;
    let mut b = g.q2.theta;
    if b < a {
        b += TAU;
    }
    let m = IdealPoint::new(0.5 * (a + b));
    if g.is_plus(&m) {
        m
    } else {
        IdealPoint::new(0.5 * (a + b) + PI)
    }
}
