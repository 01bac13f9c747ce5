//! Curves in the geodesic boundary of H²×ℝ and the H-fillable classifier.
//!
//! A boundary point is either a pole `p±` or a pair `(q, m)` of an ideal
//! point `q` and a slope `m`. The Weyl chamber `W(q)` is the arc of points
//! over `q`, from `p⁻` (slope −∞) to `p⁺` (slope +∞); every chamber contains
//! both poles. Curves are cyclic sequences of equator arcs at a fixed slope,
//! chamber intervals and pole points. Slopes are symbolic tags resolved
//! against `l_H` only when a curve is classified.

use std::f64::consts::TAU;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geodesic, IdealPoint, Lorentz};
use crate::profiles::{lh, HyperbolicCase, MeanCurvatureH, Profile};
use crate::surfaces::{Base, InvariantSurface};

/// Angular and slope tolerance for comparing boundary points.
pub const POINT_TOL: f64 = 1e-9;

/// A slope in a Weyl chamber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeightTag {
    MinusPole,
    MinusLH,
    Zero,
    PlusLH,
    PlusPole,
    Finite(f64),
}

impl HeightTag {
    /// Numeric slope, with the poles at ±∞.
    pub fn resolve(&self, lh: f64) -> f64 {
        match *self {
            HeightTag::MinusPole => f64::NEG_INFINITY,
            HeightTag::MinusLH => -lh,
            HeightTag::Zero => 0.0,
            HeightTag::PlusLH => lh,
            HeightTag::PlusPole => f64::INFINITY,
            HeightTag::Finite(v) => v,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, HeightTag::MinusPole | HeightTag::PlusPole)
    }

    fn tag(&self) -> Option<&'static str> {
        Some(match self {
            HeightTag::MinusPole => "-pole",
            HeightTag::MinusLH => "-lH",
            HeightTag::Zero => "0",
            HeightTag::PlusLH => "+lH",
            HeightTag::PlusPole => "+pole",
            HeightTag::Finite(_) => return None,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "-pole" => HeightTag::MinusPole,
            "-lH" => HeightTag::MinusLH,
            "0" => HeightTag::Zero,
            "+lH" | "lH" => HeightTag::PlusLH,
            "+pole" | "pole" => HeightTag::PlusPole,
            other => HeightTag::Finite(
                other.parse::<f64>().map_err(|_| Error::Parse(format!("unknown height tag {other:?}")))?,
            ),
        })
    }
}

impl fmt::Display for HeightTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.tag(), self) {
            (Some(t), _) => f.write_str(t),
            (None, HeightTag::Finite(v)) => write!(f, "{v}"),
            _ => unreachable!(),
        }
    }
}

impl Serialize for HeightTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match (self.tag(), self) {
            (Some(t), _) => s.serialize_str(t),
            (None, HeightTag::Finite(v)) => s.serialize_f64(*v),
            _ => unreachable!(),
        }
    }
}

impl<'de> Deserialize<'de> for HeightTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(HeightTag::Finite(v)),
            Raw::Text(t) => HeightTag::parse(&t).map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Ccw,
    Cw,
}

impl Orientation {
    pub fn reversed(&self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }
}

/// One piece of a boundary curve. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    /// Equator arc at constant slope `height`, traversed from `from` to `to`.
    Arc {
        height: HeightTag,
        from: f64,
        to: f64,
        #[serde(default)]
        orientation: Orientation,
        #[serde(default)]
        full_circle: bool,
    },
    /// Closed interval `[lo, hi]` of the chamber over `q`.
    Weyl { q: f64, interval: [HeightTag; 2] },
    /// A pole on its own.
    Pole { height: HeightTag },
}

impl Segment {
    pub fn arc(height: HeightTag, from: IdealPoint, to: IdealPoint, orientation: Orientation) -> Self {
        Segment::Arc { height, from: from.theta, to: to.theta, orientation, full_circle: false }
    }

    pub fn circle(height: HeightTag) -> Self {
        Segment::Arc { height, from: 0.0, to: 0.0, orientation: Orientation::Ccw, full_circle: true }
    }

    pub fn weyl(q: IdealPoint, lo: HeightTag, hi: HeightTag) -> Self {
        Segment::Weyl { q: q.theta, interval: [lo, hi] }
    }

    pub fn pole(plus: bool) -> Self {
        Segment::Pole { height: if plus { HeightTag::PlusPole } else { HeightTag::MinusPole } }
    }
}

/// A union of closed curves, each a cyclic sequence of segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryCurve {
    pub components: Vec<Vec<Segment>>,
}

impl BoundaryCurve {
    pub fn new(components: Vec<Vec<Segment>>) -> Self {
        Self { components }
    }

    pub fn single(segments: Vec<Segment>) -> Self {
        Self { components: vec![segments] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveType {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

/// Which admissibility rule a curve breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// An equator arc at a slope other than ±l_H.
    ArcHeight,
    /// The part of a chamber above `l_H` is not empty, the pole, or an
    /// interval starting at `l_H`.
    UpperChamber,
    /// Mirror of [`Rule::UpperChamber`] below `−l_H`.
    LowerChamber,
    /// The part of a chamber in `[0, l_H]` (or `[−l_H, 0]`) is not empty or
    /// an interval reaching `l_H` (or `−l_H`).
    MiddleChamber,
    /// Two components meet.
    NotDisjoint,
    /// A union containing a component that reaches both poles.
    UnionType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub component: Option<usize>,
    pub segment: Option<usize>,
    /// Chamber direction where the rule fails, when it is chamber-specific.
    pub q: Option<f64>,
    pub rule: Rule,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub admissible: bool,
    pub curve_type: Option<CurveType>,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

// ---------------------------------------------------------------------------
// Resolved geometry

#[derive(Debug, Clone, Copy, PartialEq)]
enum BPoint {
    Pole(bool),
    At(f64, f64),
}

fn same_angle(a: f64, b: f64) -> bool {
    IdealPoint::new(a).separation(&IdealPoint::new(b)) <= POINT_TOL
}

fn same_slope(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= POINT_TOL
}

impl BPoint {
    fn eq(&self, o: &BPoint) -> bool {
        match (self, o) {
            (BPoint::Pole(a), BPoint::Pole(b)) => a == b,
            (BPoint::At(q1, m1), BPoint::At(q2, m2)) => same_angle(*q1, *q2) && same_slope(*m1, *m2),
            _ => false,
        }
    }

    fn from_slope(q: f64, m: f64) -> BPoint {
        if m == f64::INFINITY {
            BPoint::Pole(true)
        } else if m == f64::NEG_INFINITY {
            BPoint::Pole(false)
        } else {
            BPoint::At(q, m)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RSeg {
    /// Arc at slope `m` covering angles `a .. a+len` counterclockwise.
    Arc { m: f64, a: f64, len: f64, full: bool, ends: [f64; 2] },
    Weyl { q: f64, lo: f64, hi: f64 },
    Pole(bool),
}

impl RSeg {
    fn resolve(seg: &Segment, lh: f64) -> Result<RSeg> {
        Ok(match *seg {
            Segment::Arc { height, from, to, orientation, full_circle } => {
                if height.is_pole() {
                    return Err(Error::MalformedCurve("an equator arc cannot sit at a pole".into()));
                }
                let m = height.resolve(lh);
                if !m.is_finite() {
                    return Err(Error::MalformedCurve("arc slope is infinite".into()));
                }
                let (from, to) = (IdealPoint::new(from).theta, IdealPoint::new(to).theta);
                if full_circle {
                    RSeg::Arc { m, a: from, len: TAU, full: true, ends: [from, from] }
                } else {
                    let (a, b) = match orientation {
                        Orientation::Ccw => (from, to),
                        Orientation::Cw => (to, from),
                    };
                    let mut len = (b - a).rem_euclid(TAU);
                    if len > TAU - POINT_TOL {
                        len = 0.0;
                    }
                    RSeg::Arc { m, a, len, full: false, ends: [from, to] }
                }
            }
            Segment::Weyl { q, interval: [lo, hi] } => {
                let (lo, hi) = (lo.resolve(lh), hi.resolve(lh));
                if !(lo <= hi) {
                    return Err(Error::MalformedCurve(format!("chamber interval [{lo}, {hi}] is empty")));
                }
                RSeg::Weyl { q: IdealPoint::new(q).theta, lo, hi }
            }
            Segment::Pole { height } => match height {
                HeightTag::PlusPole => RSeg::Pole(true),
                HeightTag::MinusPole => RSeg::Pole(false),
                other => return Err(Error::MalformedCurve(format!("pole record with height {other}"))),
            },
        })
    }

    fn arc_contains(a: f64, len: f64, full: bool, theta: f64) -> bool {
        if full {
            return true;
        }
        let d = (theta - a).rem_euclid(TAU);
        d <= len + POINT_TOL || d >= TAU - POINT_TOL
    }

    fn contains(&self, p: &BPoint) -> bool {
        match (*self, *p) {
            (RSeg::Arc { m, a, len, full, .. }, BPoint::At(q, mp)) => {
                same_slope(m, mp) && Self::arc_contains(a, len, full, q)
            }
            (RSeg::Weyl { q, lo, hi }, BPoint::At(qp, m)) => {
                same_angle(q, qp) && m >= lo - POINT_TOL && m <= hi + POINT_TOL
            }
            (RSeg::Weyl { lo, hi, .. }, BPoint::Pole(plus)) => {
                if plus {
                    hi == f64::INFINITY
                } else {
                    lo == f64::NEG_INFINITY
                }
            }
            (RSeg::Pole(a), BPoint::Pole(b)) => a == b,
            _ => false,
        }
    }

    fn endpoints(&self) -> Vec<BPoint> {
        match *self {
            RSeg::Arc { full: true, .. } => vec![],
            RSeg::Arc { m, ends, .. } => vec![BPoint::At(ends[0], m), BPoint::At(ends[1], m)],
            RSeg::Weyl { q, lo, hi } => vec![BPoint::from_slope(q, lo), BPoint::from_slope(q, hi)],
            RSeg::Pole(p) => vec![BPoint::Pole(p)],
        }
    }

    fn degenerate(&self) -> bool {
        match *self {
            RSeg::Arc { len, full, .. } => !full && len <= POINT_TOL,
            RSeg::Weyl { lo, hi, .. } => lo == hi,
            RSeg::Pole(_) => true,
        }
    }

    fn intersects(&self, o: &RSeg) -> bool {
        match (*self, *o) {
            (RSeg::Arc { m: m1, a: a1, len: l1, full: f1, .. }, RSeg::Arc { m: m2, a: a2, len: l2, full: f2, .. }) => {
                same_slope(m1, m2)
                    && (Self::arc_contains(a1, l1, f1, a2) || Self::arc_contains(a2, l2, f2, a1))
            }
            (RSeg::Arc { m, a, len, full, .. }, RSeg::Weyl { q, lo, hi })
            | (RSeg::Weyl { q, lo, hi }, RSeg::Arc { m, a, len, full, .. }) => {
                m >= lo - POINT_TOL && m <= hi + POINT_TOL && Self::arc_contains(a, len, full, q)
            }
            (RSeg::Weyl { q: q1, lo: lo1, hi: hi1 }, RSeg::Weyl { q: q2, lo: lo2, hi: hi2 }) => {
                (hi1 == f64::INFINITY && hi2 == f64::INFINITY)
                    || (lo1 == f64::NEG_INFINITY && lo2 == f64::NEG_INFINITY)
                    || (same_angle(q1, q2) && lo1 <= hi2 + POINT_TOL && lo2 <= hi1 + POINT_TOL)
            }
            (RSeg::Pole(p), other) | (other, RSeg::Pole(p)) => other.contains(&BPoint::Pole(p)),
        }
    }

    /// Angles at which this segment meets chambers.
    fn touched(&self) -> Vec<f64> {
        match *self {
            RSeg::Arc { a, len, full, .. } => {
                if full {
                    vec![a]
                } else {
                    vec![a, (a + len).rem_euclid(TAU), (a + 0.5 * len).rem_euclid(TAU)]
                }
            }
            RSeg::Weyl { q, .. } => vec![q],
            RSeg::Pole(_) => vec![],
        }
    }

    /// Interval this segment contributes to the chamber over `q`.
    fn chamber_part(&self, q: f64) -> Vec<(f64, f64)> {
        match *self {
            RSeg::Arc { m, a, len, full, .. } => {
                if Self::arc_contains(a, len, full, q) {
                    vec![(m, m)]
                } else {
                    vec![]
                }
            }
            RSeg::Weyl { q: qw, lo, hi } => {
                if same_angle(q, qw) {
                    vec![(lo, hi)]
                } else {
                    let mut v = vec![];
                    if hi == f64::INFINITY {
                        v.push((hi, hi));
                    }
                    if lo == f64::NEG_INFINITY {
                        v.push((lo, lo));
                    }
                    v
                }
            }
            RSeg::Pole(plus) => {
                let m = if plus { f64::INFINITY } else { f64::NEG_INFINITY };
                vec![(m, m)]
            }
        }
    }
}

/// Sorted union of closed intervals of the extended line.
fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 + POINT_TOL => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn clip(iv: &[(f64, f64)], a: f64, b: f64) -> Vec<(f64, f64)> {
    iv.iter()
        .filter_map(|&(lo, hi)| {
            let (l, h) = (lo.max(a), hi.min(b));
            (l <= h).then_some((l, h))
        })
        .collect()
}

/// Intersection of a set of segments with the chamber `W(q)`, as merged
/// closed intervals of slopes (poles at ±∞).
pub fn chamber_intersection(segments: &[Segment], q: IdealPoint, h: MeanCurvatureH) -> Result<Vec<(f64, f64)>> {
    let l = lh(h).value();
    let mut parts = Vec::new();
    for s in segments {
        parts.extend(RSeg::resolve(s, l)?.chamber_part(q.theta));
    }
    Ok(merge(parts))
}

/// Checks the chamber structure at one direction; returns broken rules.
fn chamber_rules(iv: &[(f64, f64)], l: f64) -> Vec<(Rule, String)> {
    let mut out = Vec::new();
    let describe = |p: &[(f64, f64)]| format!("{p:?}");

    let mut up = clip(iv, l, f64::INFINITY);
    up.retain(|&(lo, _)| lo != f64::INFINITY);
    if !(up.is_empty() || (up.len() == 1 && same_slope(up[0].0, l))) {
        out.push((Rule::UpperChamber, format!("part above l_H is {}", describe(&up))));
    }
    let mut down = clip(iv, f64::NEG_INFINITY, -l);
    down.retain(|&(_, hi)| hi != f64::NEG_INFINITY);
    if !(down.is_empty() || (down.len() == 1 && same_slope(down[0].1, -l))) {
        out.push((Rule::LowerChamber, format!("part below -l_H is {}", describe(&down))));
    }
    // a chamber interval crossing slope 0 only grazes the other half
    let mut mid_up = clip(iv, 0.0, l);
    if l > 0.0 && iv.iter().any(|&(lo, hi)| lo < 0.0 && hi <= 0.0 + POINT_TOL && hi >= 0.0) {
        mid_up.retain(|&(lo, hi)| !(lo == 0.0 && hi == 0.0));
    }
    if !(mid_up.is_empty() || (mid_up.len() == 1 && same_slope(mid_up[0].1, l))) {
        out.push((Rule::MiddleChamber, format!("part in [0, l_H] is {} and misses l_H", describe(&mid_up))));
    }
    let mut mid_down = clip(iv, -l, 0.0);
    if l > 0.0 && iv.iter().any(|&(lo, hi)| hi > 0.0 && lo >= -POINT_TOL && lo <= 0.0) {
        mid_down.retain(|&(lo, hi)| !(lo == 0.0 && hi == 0.0));
    }
    if !(mid_down.is_empty() || (mid_down.len() == 1 && same_slope(mid_down[0].0, -l))) {
        out.push((Rule::MiddleChamber, format!("part in [-l_H, 0] is {} and misses -l_H", describe(&mid_down))));
    }
    out
}

/// Verifies that a component closes up: consecutive segments meet, and the
/// entry and exit junctions of every non-degenerate segment differ.
fn check_closes(comp: &[RSeg], index: usize) -> Result<()> {
    let n = comp.len();
    if n == 0 {
        return Err(Error::MalformedCurve(format!("component {index} is empty")));
    }
    if n == 1 {
        return match comp[0] {
            RSeg::Arc { full: true, .. } => Ok(()),
            _ => Err(Error::MalformedCurve(format!("component {index}: a single segment must be a full circle"))),
        };
    }
    if comp.iter().any(|s| matches!(s, RSeg::Arc { full: true, .. })) {
        return Err(Error::MalformedCurve(format!(
            "component {index}: a full circle must be a component of its own"
        )));
    }
    let mut junctions: Vec<Vec<BPoint>> = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (&comp[i], &comp[(i + 1) % n]);
        let mut cand: Vec<BPoint> = Vec::new();
        for p in a.endpoints().into_iter().filter(|p| b.contains(p)).chain(b.endpoints().into_iter().filter(|p| a.contains(p))) {
            if !cand.iter().any(|c| c.eq(&p)) {
                cand.push(p);
            }
        }
        if cand.is_empty() {
            return Err(Error::MalformedCurve(format!(
                "component {index}: segments {i} and {} do not meet",
                (i + 1) % n
            )));
        }
        junctions.push(cand);
    }
    // junction i joins segment i to segment i+1
    fn search(i: usize, chosen: &mut Vec<BPoint>, junctions: &[Vec<BPoint>], comp: &[RSeg]) -> bool {
        let n = comp.len();
        if i == n {
            let first = &comp[0];
            return first.degenerate() || !chosen[n - 1].eq(&chosen[0]);
        }
        for p in &junctions[i] {
            if i > 0 && !comp[i].degenerate() && chosen[i - 1].eq(p) {
                continue;
            }
            chosen.push(*p);
            if search(i + 1, chosen, junctions, comp) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    if search(0, &mut Vec::with_capacity(n), &junctions, comp) {
        Ok(())
    } else {
        Err(Error::MalformedCurve(format!(
            "component {index}: the segments cannot be traversed as a closed curve"
        )))
    }
}

/// Classifies a curve as H-fillable or not.
pub fn classify(curve: &BoundaryCurve, h: MeanCurvatureH) -> Result<Verdict> {
    let l = lh(h).value();
    if curve.components.is_empty() {
        return Err(Error::MalformedCurve("curve has no components".into()));
    }
    let resolved: Vec<Vec<RSeg>> = curve
        .components
        .iter()
        .map(|c| c.iter().map(|s| RSeg::resolve(s, l)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for (i, comp) in resolved.iter().enumerate() {
        check_closes(comp, i)?;
    }

    let mut violations = Vec::new();
    for (ci, comp) in resolved.iter().enumerate() {
        for (si, seg) in comp.iter().enumerate() {
            if let RSeg::Arc { m, .. } = seg {
                if !(same_slope(*m, l) || same_slope(*m, -l)) {
                    violations.push(Violation {
                        component: Some(ci),
                        segment: Some(si),
                        q: None,
                        rule: Rule::ArcHeight,
                        detail: format!("arc at slope {m} is not at ±l_H = ±{l}"),
                    });
                }
            }
        }
    }

    let all: Vec<RSeg> = resolved.iter().flatten().copied().collect();
    let mut directions: Vec<f64> = Vec::new();
    for s in &all {
        for q in s.touched() {
            if !directions.iter().any(|d| same_angle(*d, q)) {
                directions.push(q);
            }
        }
    }
    if all.iter().any(|s| !matches!(s, RSeg::Arc { .. })) || directions.is_empty() {
        // a generic direction picks up only the poles
        let generic = 1.234_567;
        if !directions.iter().any(|d| same_angle(*d, generic)) {
            directions.push(generic);
        }
    }
    for &q in &directions {
        let iv = merge(all.iter().flat_map(|s| s.chamber_part(q)).collect());
        for (rule, detail) in chamber_rules(&iv, l) {
            violations.push(Violation { component: None, segment: None, q: Some(q), rule, detail });
        }
    }

    for i in 0..resolved.len() {
        for j in i + 1..resolved.len() {
            let meet = resolved[i].iter().any(|a| resolved[j].iter().any(|b| a.intersects(b)));
            if meet {
                violations.push(Violation {
                    component: Some(j),
                    segment: None,
                    q: None,
                    rule: Rule::NotDisjoint,
                    detail: format!("components {i} and {j} intersect"),
                });
            }
        }
    }

    let types: Vec<CurveType> = resolved.iter().map(|c| component_type(c, l)).collect();
    if types.len() > 1 {
        for (i, t) in types.iter().enumerate() {
            if *t == CurveType::V {
                violations.push(Violation {
                    component: Some(i),
                    segment: None,
                    q: None,
                    rule: Rule::UnionType,
                    detail: "a component joining both poles cannot be part of a union".into(),
                });
            }
        }
    }

    let admissible = violations.is_empty();
    let curve_type = admissible.then(|| if types.len() > 1 { CurveType::VI } else { types[0] });
    Ok(Verdict { admissible, curve_type, violations })
}

fn component_type(comp: &[RSeg], l: f64) -> CurveType {
    let (mut middle, mut upper, mut lower) = (false, false, false);
    for s in comp {
        if let RSeg::Weyl { lo, hi, .. } = *s {
            if hi.min(l) - lo.max(-l) > POINT_TOL {
                middle = true;
            }
            if hi > l + POINT_TOL {
                upper = true;
            }
            if lo < -l - POINT_TOL {
                lower = true;
            }
        }
    }
    match (middle, upper, lower) {
        (false, false, false) => CurveType::I,
        (false, true, false) | (false, false, true) => CurveType::II,
        (true, false, false) => CurveType::III,
        (true, true, false) | (true, false, true) => CurveType::IV,
        (_, true, true) => CurveType::V,
    }
}

// ---------------------------------------------------------------------------
// Boundaries of the catalogue

/// The geodesic boundary of a catalogue surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceBoundary {
    /// The boundary as a set of segments.
    pub segments: Vec<Segment>,
    /// The same set arranged as closed curves, when it is one.
    pub curve: Option<BoundaryCurve>,
    /// Whether the surface is embedded.
    pub embedded: bool,
    pub note: String,
}

impl SurfaceBoundary {
    pub fn is_curve(&self) -> bool {
        self.curve.is_some()
    }

    fn curve(components: Vec<Vec<Segment>>, embedded: bool, note: &str) -> Self {
        Self {
            segments: components.iter().flatten().copied().collect(),
            curve: Some(BoundaryCurve::new(components)),
            embedded,
            note: note.into(),
        }
    }

    fn set(segments: Vec<Segment>, embedded: bool, note: &str) -> Self {
        Self { segments, curve: None, embedded, note: note.into() }
    }
}

/// The arc of the ideal boundary on the positive side of `g`, oriented from
/// `q1` to `q2`.
pub fn plus_arc(g: &Geodesic, height: HeightTag) -> Segment {
    let a = g.q1.theta;
    let len = (g.q2.theta - a).rem_euclid(TAU);
    let mid = IdealPoint::new(a + 0.5 * len);
    let orientation = if g.is_plus(&mid) { Orientation::Ccw } else { Orientation::Cw };
    Segment::arc(height, g.q1, g.q2, orientation)
}

fn reversed_arc(seg: &Segment, height: HeightTag) -> Segment {
    match *seg {
        Segment::Arc { from, to, orientation, .. } => Segment::Arc {
            height,
            from: to,
            to: from,
            orientation: orientation.reversed(),
            full_circle: false,
        },
        other => other,
    }
}

/// Exact symbolic boundary of a catalogue surface.
pub fn boundary_of(surf: &InvariantSurface) -> SurfaceBoundary {
    use HeightTag::*;
    match (&surf.profile, &surf.base) {
        (Profile::Rotational(p), _) if p.is_cap() => {
            SurfaceBoundary::curve(vec![vec![Segment::circle(PlusLH)]], true, "H-cap")
        }
        (Profile::Rotational(_), _) => {
            if surf.reflected {
                SurfaceBoundary::curve(
                    vec![vec![Segment::circle(PlusLH)], vec![Segment::circle(MinusLH)]],
                    true,
                    "H-unduloid",
                )
            } else {
                SurfaceBoundary::curve(vec![vec![Segment::circle(PlusLH)]], true, "upper half of an H-unduloid")
            }
        }
        (Profile::Hyperbolic(p), Base::Geodesic(g)) => {
            let arc = plus_arc(g, PlusLH);
            match p.case() {
                HyperbolicCase::Unduloid | HyperbolicCase::Nodoid => {
                    let embedded = p.case() == HyperbolicCase::Unduloid;
                    if surf.reflected {
                        SurfaceBoundary::curve(
                            vec![vec![
                                arc,
                                Segment::weyl(g.q2, MinusLH, PlusLH),
                                reversed_arc(&arc, MinusLH),
                                Segment::weyl(g.q1, MinusLH, PlusLH),
                            ]],
                            embedded,
                            if embedded { "hyperunduloid" } else { "hypernodoid (immersed)" },
                        )
                    } else {
                        SurfaceBoundary::set(
                            vec![arc, Segment::weyl(g.q1, Zero, PlusLH), Segment::weyl(g.q2, Zero, PlusLH)],
                            embedded,
                            "upper sheet; the boundary closes up after reflection",
                        )
                    }
                }
                HyperbolicCase::PlusOne => SurfaceBoundary::curve(
                    vec![vec![arc, Segment::weyl(g.q2, MinusPole, PlusLH), Segment::weyl(g.q1, MinusPole, PlusLH)]],
                    true,
                    "C = 1 graph",
                ),
                HyperbolicCase::MinusOne => SurfaceBoundary::curve(
                    vec![vec![arc, Segment::weyl(g.q2, Zero, PlusPole), Segment::weyl(g.q1, Zero, PlusPole)]],
                    true,
                    "C = -1 graph",
                ),
                HyperbolicCase::Cap => SurfaceBoundary::set(
                    vec![Segment::circle(PlusLH), Segment::weyl(g.q1, Zero, PlusLH), Segment::weyl(g.q2, Zero, PlusLH)],
                    true,
                    "hypercap: the circle at l_H with two chamber intervals attached is not a curve",
                ),
            }
        }
        (Profile::Parabolic(_), Base::Horocycle(hc)) => {
            let p = hc.base;
            if surf.reflected {
                SurfaceBoundary::set(
                    vec![Segment::circle(PlusLH), Segment::circle(MinusLH), Segment::weyl(p, MinusLH, PlusLH)],
                    true,
                    "both circles meet the chamber interval, so the boundary is not a curve",
                )
            } else {
                SurfaceBoundary::set(
                    vec![Segment::circle(PlusLH), Segment::weyl(p, Zero, PlusLH)],
                    true,
                    "upper sheet of the horocyclic surface",
                )
            }
        }
        _ => SurfaceBoundary::set(vec![], true, "base curve does not match the profile"),
    }
}

/// Boundary of the vertical cylinder over a curve asymptotic to the ends of
/// `g`, such as the equidistant curve at distance `artanh(2H)`.
pub fn cylinder_boundary(g: &Geodesic) -> BoundaryCurve {
    BoundaryCurve::single(vec![
        Segment::weyl(g.q1, HeightTag::MinusPole, HeightTag::PlusPole),
        Segment::weyl(g.q2, HeightTag::MinusPole, HeightTag::PlusPole),
    ])
}

// ---------------------------------------------------------------------------
// Numeric probing

/// Position of a surface relative to the cone of slope `m` near a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeResult {
    Above,
    Below,
    Crosses,
}

/// Path family used by the probes. A path runs outward from the origin,
/// reaching distance `t` in direction `q ± exp(−(α t + β))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub t1: f64,
    pub t2: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Largest angular offset allowed at `t1`, which fixes the size of the
    /// neighborhood of `q` being sampled.
    pub max_offset: f64,
    /// Slack on the limit-slope range when deciding [`ProbeResult::Crosses`].
    pub slack: f64,
}

impl ProbeConfig {
    pub fn with_t_max(t_max: f64) -> Self {
        Self {
            t1: t_max - 15.0,
            t2: t_max - 5.0,
            alphas: (0..=20).map(|i| 0.05 * i as f64).collect(),
            betas: (-12..=8).map(|b| b as f64).collect(),
            max_offset: 0.05,
            slack: 1e-3,
        }
    }
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self::with_t_max(30.0)
    }
}

/// Distance field of the surface at the point at distance `t` from the
/// origin in direction `q + delta`, arranged to avoid cancellation when the
/// point is far out and `delta` is tiny.
fn polar_s(surf: &InvariantSurface, q: f64, delta: f64, t: f64) -> Result<f64> {
    let theta = q + delta;
    let s = match &surf.base {
        Base::Circle(c) => {
            let cl = c.center.to_lorentz().0;
            let v = t.cosh() * cl[0] - t.sinh() * (cl[1] * theta.cos() + cl[2] * theta.sin());
            v.max(1.0).acosh() - c.radius
        }
        Base::Geodesic(g) => {
            let n = g.normal();
            let on_end = same_angle(q, g.q1.theta) || same_angle(q, g.q2.theta);
            let lq = if on_end { 0.0 } else { IdealPoint::new(q).null().dot(&n) };
            // u(q+δ) − u(q) via half angles
            let sh = (0.5 * delta).sin();
            let du = [-2.0 * sh * (q + 0.5 * delta).sin(), 2.0 * sh * (q + 0.5 * delta).cos()];
            let ndu = n.0[1] * du[0] + n.0[2] * du[1];
            (t.sinh() * (ndu + lq) - (-t).exp() * n.0[0]).asinh()
        }
        Base::Horocycle(hc) => {
            let d = (q - hc.base.theta) + delta;
            let v = (-t).exp() + 2.0 * t.sinh() * (0.5 * d).sin().powi(2);
            v.ln() - hc.level
        }
    };
    let edge = surf.profile.edge();
    let inside = if surf.profile.edge_included() { s >= edge } else { s > edge };
    if inside {
        Ok(s)
    } else {
        Err(Error::OutsideDomain(format!("s = {s} below the edge {edge}")))
    }
}

/// Difference-quotient slopes `(h(t2) − h(t1))/(t2 − t1)` of the upper sheet
/// along every path of the family that stays in the domain.
pub fn path_slopes(surf: &InvariantSurface, q: IdealPoint, cfg: &ProbeConfig) -> Vec<f64> {
    let mut out = Vec::new();
    for &alpha in &cfg.alphas {
        for &beta in &cfg.betas {
            let off = |t: f64| (-(alpha * t + beta)).exp();
            if off(cfg.t1) > cfg.max_offset {
                continue;
            }
            for sign in [1.0, -1.0] {
                let s1 = polar_s(surf, q.theta, sign * off(cfg.t1), cfg.t1);
                let s2 = polar_s(surf, q.theta, sign * off(cfg.t2), cfg.t2);
                let (Ok(s1), Ok(s2)) = (s1, s2) else { continue };
                let (Ok(h1), Ok(h2)) = (surf.profile.phi(s1), surf.profile.phi(s2)) else { continue };
                out.push((h2 - h1) / (cfg.t2 - cfg.t1));
            }
        }
    }
    out
}

/// Range of limit slopes of the upper sheet near `q`, or `None` when no
/// sampled path near `q` stays in the domain.
pub fn estimate_weyl_interval(surf: &InvariantSurface, q: IdealPoint) -> Option<(f64, f64)> {
    estimate_with(surf, q, &ProbeConfig::default())
}

pub fn estimate_with(surf: &InvariantSurface, q: IdealPoint, cfg: &ProbeConfig) -> Option<(f64, f64)> {
    let slopes = path_slopes(surf, q, cfg);
    if slopes.is_empty() {
        return None;
    }
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

/// Whether the upper sheet eventually lies above, below, or on both sides
/// of the cone `{(x, m·d(o,x))}` near `q`.
pub fn cone_probe(surf: &InvariantSurface, q: IdealPoint, m: f64, t_max: f64) -> ProbeResult {
    let cfg = ProbeConfig::with_t_max(t_max);
    match estimate_with(surf, q, &cfg) {
        None => ProbeResult::Below,
        Some((lo, hi)) => {
            if m < lo - cfg.slack {
                ProbeResult::Above
            } else if m > hi + cfg.slack {
                ProbeResult::Below
            } else {
                ProbeResult::Crosses
            }
        }
    }
}

/// Point at distance `t` from the origin toward `q`, for callers that want
/// to sample probe paths themselves.
pub fn ray_point(q: IdealPoint, t: f64) -> Lorentz {
    Lorentz([t.cosh(), t.sinh() * q.theta.cos(), t.sinh() * q.theta.sin()])
}
