//! Convex rate regions in the `(R_a, R_b)` plane.
//!
//! Regions are stored as counterclockwise vertex lists starting at the
//! lexicographically smallest vertex, which is the origin for every
//! downward-closed region built here. Half-planes are an input format only.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for feasibility and containment checks, in bits.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Cross products at or below this are treated as collinear.
const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r_a: f64,
    pub r_b: f64,
}

impl RatePair {
    pub const ORIGIN: RatePair = RatePair { r_a: 0.0, r_b: 0.0 };

    pub fn new(r_a: f64, r_b: f64) -> Self {
        Self { r_a, r_b }
    }

    pub fn sum(&self) -> f64 {
        self.r_a + self.r_b
    }

    fn sub(self, o: RatePair) -> RatePair {
        RatePair::new(self.r_a - o.r_a, self.r_b - o.r_b)
    }
}

fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a.r_a - o.r_a) * (b.r_b - o.r_b) - (a.r_b - o.r_b) * (b.r_a - o.r_a)
}

/// Drops vertices within `COLLINEAR_TOL` of the chord through their
/// neighbours, then restarts the cycle at the lexicographically smallest vertex.
fn simplify(mut v: Vec<RatePair>) -> Vec<RatePair> {
    let mut changed = true;
    while changed && v.len() > 2 {
        changed = false;
        let n = v.len();
        for i in 0..n {
            let (prev, cur, next) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let chord = (next.r_a - prev.r_a).hypot(next.r_b - prev.r_b);
            let near_prev = (cur.r_a - prev.r_a).abs() <= COLLINEAR_TOL && (cur.r_b - prev.r_b).abs() <= COLLINEAR_TOL;
            if near_prev || cross(prev, cur, next).abs() <= COLLINEAR_TOL * chord {
                v.remove(i);
                changed = true;
                break;
            }
        }
    }
    if v.len() == 2 && (v[0].r_a - v[1].r_a).abs() <= COLLINEAR_TOL && (v[0].r_b - v[1].r_b).abs() <= COLLINEAR_TOL {
        v.truncate(1);
    }
    if let Some(start) = (0..v.len()).min_by(|&i, &j| v[i].r_a.total_cmp(&v[j].r_a).then(v[i].r_b.total_cmp(&v[j].r_b)))
    {
        v.rotate_left(start);
    }
    v
}

/// `coef_a * R_a + coef_b * R_b <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub coef_a: f64,
    pub coef_b: f64,
    pub rhs: f64,
}

impl HalfPlane {
    pub fn new(coef_a: f64, coef_b: f64, rhs: f64) -> Result<Self> {
        if !(coef_a.is_finite() && coef_b.is_finite() && rhs.is_finite()) {
            return Err(Error::invalid("half_plane", "coefficients must be finite"));
        }
        if coef_a == 0.0 && coef_b == 0.0 {
            return Err(Error::invalid("half_plane", "normal (coef_a, coef_b) must be nonzero"));
        }
        Ok(Self { coef_a, coef_b, rhs })
    }

    /// Amount by which `p` violates the inequality, in units of the normal's length.
    pub fn violation(&self, p: RatePair) -> f64 {
        let norm = self.coef_a.hypot(self.coef_b);
        (self.coef_a * p.r_a + self.coef_b * p.r_b - self.rhs) / norm
    }

    fn intersect(&self, other: &HalfPlane) -> Option<RatePair> {
        let det = self.coef_a * other.coef_b - self.coef_b * other.coef_a;
        let scale = self.coef_a.hypot(self.coef_b) * other.coef_a.hypot(other.coef_b);
        if det.abs() <= 1e-14 * scale {
            return None;
        }
        let r_a = (self.rhs * other.coef_b - self.coef_b * other.rhs) / det;
        let r_b = (self.coef_a * other.rhs - self.rhs * other.coef_a) / det;
        (r_a.is_finite() && r_b.is_finite()).then_some(RatePair::new(r_a, r_b))
    }
}

/// A convex polygon of rate pairs. May be empty, a single point or a segment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<[f64; 2]>", try_from = "Vec<[f64; 2]>")]
pub struct RateRegion {
    vertices: Vec<RatePair>,
}

impl From<RateRegion> for Vec<[f64; 2]> {
    fn from(r: RateRegion) -> Self {
        r.vertices.iter().map(|p| [p.r_a, p.r_b]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for RateRegion {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        RateRegion::from_vertices(v.into_iter().map(|[a, b]| RatePair::new(a, b)).collect())
    }
}

impl RateRegion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Wraps an already ordered vertex list after checking it is a
    /// counterclockwise convex polygon in the first quadrant.
    pub fn from_vertices(vertices: Vec<RatePair>) -> Result<Self> {
        if let Some(p) = vertices
            .iter()
            .find(|p| !(p.r_a.is_finite() && p.r_b.is_finite()) || p.r_a < 0.0 || p.r_b < 0.0)
        {
            return Err(Error::invalid(
                "vertices",
                format!("vertex ({}, {}) is not a finite nonnegative rate pair", p.r_a, p.r_b),
            ));
        }
        let hull = Self::hull_of(vertices.iter().copied());
        if hull.vertices.len() != vertices.len() {
            return Err(Error::invalid(
                "vertices",
                "not a strictly convex polygon (repeated, collinear or interior vertex)",
            ));
        }
        let n = vertices.len();
        if n >= 3 {
            for i in 0..n {
                if cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) <= 0.0 {
                    return Err(Error::invalid("vertices", "vertices are not counterclockwise"));
                }
            }
        }
        Ok(hull)
    }

    /// Convex hull of a point set, counterclockwise from the lexicographically
    /// smallest point, with collinear and duplicate points removed.
    pub fn hull_of(points: impl IntoIterator<Item = RatePair>) -> Self {
        let mut pts: Vec<RatePair> = points.into_iter().collect();
        pts.sort_by(|p, q| p.r_a.total_cmp(&q.r_a).then(p.r_b.total_cmp(&q.r_b)));
        pts.dedup_by(|p, q| (p.r_a - q.r_a).abs() <= COLLINEAR_TOL && (p.r_b - q.r_b).abs() <= COLLINEAR_TOL);
        if pts.len() <= 1 {
            return Self { vertices: pts };
        }
        let mut lower: Vec<RatePair> = Vec::with_capacity(pts.len());
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<RatePair> = Vec::with_capacity(pts.len());
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self {
            vertices: simplify(lower),
        }
    }

    /// The polygon `{R_a >= 0, R_b >= 0} ∩ planes`.
    pub fn from_halfplanes(planes: &[HalfPlane]) -> Result<Self> {
        if planes.is_empty() {
            return Err(Error::invalid("planes", "at least one half-plane is required"));
        }
        let mut all = Vec::with_capacity(planes.len() + 2);
        all.push(HalfPlane::new(-1.0, 0.0, 0.0)?);
        all.push(HalfPlane::new(0.0, -1.0, 0.0)?);
        all.extend_from_slice(planes);

        let feasible = |p: RatePair| all.iter().all(|h| h.violation(p) <= FEASIBILITY_TOL);
        let mut candidates = Vec::new();
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                if let Some(p) = all[i].intersect(&all[j]) {
                    if feasible(p) {
                        // snap tiny negative coordinates from round-off onto the axes
                        candidates.push(RatePair::new(p.r_a.max(0.0), p.r_b.max(0.0)));
                    }
                }
            }
        }
        if candidates.is_empty() {
            return Ok(Self::empty());
        }
        if let Some(dir) = recession_direction(&all) {
            return Err(Error::UnboundedRegion(format!(
                "feasible set extends to infinity along ({:.6}, {:.6})",
                dir.r_a, dir.r_b
            )));
        }
        Ok(Self::hull_of(candidates))
    }

    pub fn vertices(&self) -> &[RatePair] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Outward half-planes with unit normals describing the region. Points and
    /// segments are described by pairs of opposite planes.
    pub fn edges(&self) -> Vec<HalfPlane> {
        let v = &self.vertices;
        let plane = |na: f64, nb: f64, p: RatePair| HalfPlane {
            coef_a: na,
            coef_b: nb,
            rhs: na * p.r_a + nb * p.r_b,
        };
        match v.len() {
            0 => Vec::new(),
            1 => vec![
                plane(1.0, 0.0, v[0]),
                plane(-1.0, 0.0, v[0]),
                plane(0.0, 1.0, v[0]),
                plane(0.0, -1.0, v[0]),
            ],
            2 => {
                let d = v[1].sub(v[0]);
                let len = d.r_a.hypot(d.r_b);
                let (ua, ub) = (d.r_a / len, d.r_b / len);
                vec![
                    plane(ub, -ua, v[0]),
                    plane(-ub, ua, v[0]),
                    plane(ua, ub, v[1]),
                    plane(-ua, -ub, v[0]),
                ]
            }
            n => (0..n)
                .map(|i| {
                    let d = v[(i + 1) % n].sub(v[i]);
                    let len = d.r_a.hypot(d.r_b);
                    // counterclockwise order puts the interior on the left
                    plane(d.r_b / len, -d.r_a / len, v[i])
                })
                .collect(),
        }
    }

    /// Whether `p` satisfies every edge inequality within `tol`.
    pub fn contains(&self, p: RatePair, tol: f64) -> bool {
        !self.is_empty() && self.edges().iter().all(|h| h.violation(p) <= tol)
    }

    /// Convex hull of the union: the region reachable by time sharing.
    pub fn hull_union(regions: &[RateRegion]) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::invalid("regions", "at least one region is required"));
        }
        Ok(Self::hull_of(regions.iter().flat_map(|r| r.vertices.iter().copied())))
    }

    /// Maximizes `mu R_a + (1 - mu) R_b`. Among (near-)ties the vertex with the
    /// larger `R_a`, then larger `R_b`, wins.
    pub fn max_weighted_rate(&self, mu: f64) -> Result<(f64, RatePair)> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::invalid("mu", format!("must lie in [0, 1], got {mu}")));
        }
        let score = |p: &RatePair| mu * p.r_a + (1.0 - mu) * p.r_b;
        let best = self.vertices.iter().map(score).fold(f64::NEG_INFINITY, f64::max);
        if best == f64::NEG_INFINITY {
            return Err(Error::EmptyRegion);
        }
        let tie = 1e-12 * best.abs().max(1.0);
        let arg = self
            .vertices
            .iter()
            .filter(|p| score(p) >= best - tie)
            .copied()
            .max_by(|p, q| p.r_a.total_cmp(&q.r_a).then(p.r_b.total_cmp(&q.r_b)))
            .expect("nonempty");
        Ok((best, arg))
    }

    /// First vertex of `self` (in vertex order) violating an edge of `other` by
    /// more than `tol`. `None` means `self ⊆ other` up to `tol`.
    pub fn exists_point_outside(&self, other: &RateRegion, tol: f64) -> Option<RatePair> {
        let edges = other.edges();
        self.vertices
            .iter()
            .copied()
            .find(|&p| other.is_empty() || edges.iter().any(|h| h.violation(p) > tol))
    }

    /// Largest violation of `other`'s edges over the vertices of `self`.
    pub fn max_excess_over(&self, other: &RateRegion) -> f64 {
        let edges = other.edges();
        self.vertices
            .iter()
            .map(|&p| edges.iter().map(|h| h.violation(p)).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with header `r_a,r_b`, one vertex per row. Values are written in
    /// shortest round-trip form, so parsing gives back identical bits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r_a,r_b\n");
        for p in &self.vertices {
            writeln!(out, "{},{}", p.r_a, p.r_b).expect("writing to a String");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "r_a,r_b" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `r_a,r_b`, found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut vertices = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let mut field = |name: &str| -> Result<f64> {
                let s = cols
                    .next()
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {name}", i + 1)))?;
                s.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: bad {name} {s:?}: {e}", i + 1)))
            };
            let r_a = field("r_a")?;
            let r_b = field("r_b")?;
            vertices.push(RatePair::new(r_a, r_b));
        }
        Self::from_vertices(vertices)
    }

    /// JSON array of `[r_a, r_b]` pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite floats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A nonzero direction `d >= 0` with `h(d) <= 0` for every plane, if one exists.
fn recession_direction(planes: &[HalfPlane]) -> Option<RatePair> {
    let mut rays = vec![RatePair::new(1.0, 0.0), RatePair::new(0.0, 1.0)];
    for h in planes {
        let norm = h.coef_a.hypot(h.coef_b);
        let (da, db) = (h.coef_b / norm, -h.coef_a / norm);
        for (sa, sb) in [(da, db), (-da, -db)] {
            if sa >= -1e-15 && sb >= -1e-15 {
                rays.push(RatePair::new(sa.max(0.0), sb.max(0.0)));
            }
        }
    }
    rays.into_iter().find(|d| {
        planes.iter().all(|h| {
            let norm = h.coef_a.hypot(h.coef_b);
            (h.coef_a * d.r_a + h.coef_b * d.r_b) / norm <= 1e-12
        })
    })
}
