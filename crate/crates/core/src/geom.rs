//! Planar geometry for the walk: points, a tolerant orientation predicate and
//! a convex polygon that grows one point at a time next to a distinguished
//! vertex (the cursor).
//!
//! The polygon keeps its vertices counterclockwise in a deque with the cursor
//! stored last, so the cursor's successor is the front and its predecessor is
//! the element before the back. An insertion next to the cursor only ever
//! pops from the two ends of the deque, which makes updates amortized O(1).

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance of the orientation predicate.
pub const EPS_GEOM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("hull has no interior")]
    DegenerateHull,
    #[error("angle undefined: cursor coincides with the origin")]
    UndefinedAngle,
    #[error("line through two equal points")]
    InvalidLine,
    #[error("point ({x}, {y}) is not outside the hull")]
    PointNotOutside { x: f64, y: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("vertices are not in strictly convex counterclockwise position")]
    NotConvex,
    #[error("empty point set")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Polar angle in (−π, π].
    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Self {
        Point2::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

/// Sign of `(b − a) × (c − a)`. Magnitudes up to `EPS_GEOM` times the largest
/// coordinate magnitude of the inputs count as collinear.
pub fn orient(a: Point2, b: Point2, c: Point2) -> Orientation {
    let cross = (b - a).cross(c - a);
    let scale = a.max_abs().max(b.max_abs()).max(c.max_abs());
    if cross.abs() <= EPS_GEOM * scale {
        Orientation::Collinear
    } else if cross > 0.0 {
        Orientation::Left
    } else {
        Orientation::Right
    }
}

/// Unsigned angle between two nonzero vectors, in [0, π].
pub fn angle_between(u: Point2, v: Point2) -> f64 {
    u.cross(v).abs().atan2(u.dot(v))
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Exit point of the half-line `from + t·dir` (t ≥ 0) through the circle of
/// radius `radius` about the origin. Requires `‖from‖ ≤ radius`.
pub fn circle_exit(from: Point2, dir: Point2, radius: f64) -> Point2 {
    let u = dir * (1.0 / dir.norm());
    let b = from.dot(u);
    let c = from.dot(from) - radius * radius;
    let t = -b + (b * b - c).max(0.0).sqrt();
    from + u * t
}

/// Angles of the hull at the walker, measured against the circle about the
/// origin that encloses the hull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullDiagnostics {
    /// π minus the angle at the walker between the origin and the clockwise edge.
    pub alpha: f64,
    /// Same for the counterclockwise edge.
    pub alpha_prime: f64,
    /// Gap between the walker and the enclosing circle.
    pub d: f64,
    /// Radius of the enclosing circle.
    pub big_r: f64,
    pub interior_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    // counterclockwise, cursor last
    verts: VecDeque<Point2>,
    inserted: u64,
    removed: u64,
}

impl ConvexPolygon {
    pub fn singleton(p: Point2) -> Self {
        let mut verts = VecDeque::with_capacity(16);
        verts.push_back(p);
        Self {
            verts,
            inserted: 1,
            removed: 0,
        }
    }

    /// Builds a polygon from counterclockwise vertices with the walker at
    /// `vertices[cursor]`. Checks strict convexity for three or more vertices.
    pub fn from_ccw(vertices: &[Point2], cursor: usize) -> Result<Self, GeomError> {
        let n = vertices.len();
        if n == 0 || cursor >= n {
            return Err(GeomError::Empty);
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(GeomError::NotConvex);
                }
            }
        }
        if n >= 3 {
            for i in 0..n {
                let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                if orient(a, b, c) != Orientation::Left {
                    return Err(GeomError::NotConvex);
                }
            }
        }
        Ok(Self::from_ccw_unchecked(vertices, cursor))
    }

    pub(crate) fn from_ccw_unchecked(vertices: &[Point2], cursor: usize) -> Self {
        let n = vertices.len();
        let verts: VecDeque<Point2> = (1..=n).map(|k| vertices[(cursor + k) % n]).collect();
        Self {
            inserted: n as u64,
            removed: 0,
            verts,
        }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// True when the polygon has no interior (one or two vertices).
    pub fn is_degenerate(&self) -> bool {
        self.verts.len() < 3
    }

    pub fn cursor(&self) -> Point2 {
        *self.verts.back().expect("polygon is never empty")
    }

    /// Vertex after the cursor in counterclockwise order.
    pub fn ccw_neighbor(&self) -> Point2 {
        self.verts[0]
    }

    /// Vertex before the cursor in counterclockwise order.
    pub fn cw_neighbor(&self) -> Point2 {
        let n = self.verts.len();
        self.verts[n.saturating_sub(2)]
    }

    /// Vertices in counterclockwise order, ending with the cursor.
    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Point2> + Clone + '_ {
        self.verts.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<Point2> {
        self.vertices().collect()
    }

    /// Number of vertices ever inserted and removed.
    pub fn churn(&self) -> (u64, u64) {
        (self.inserted, self.removed)
    }

    /// Adds `p`, which must lie outside the polygon and be visible from the
    /// cursor, and makes it the new cursor. Returns the number of vertices
    /// that stopped being extreme.
    pub fn insert_adjacent(&mut self, p: Point2) -> Result<usize, GeomError> {
        if !p.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let removed = match self.verts.len() {
            1 => self.insert_into_point(p)?,
            2 => self.insert_into_segment(p)?,
            _ => self.insert_into_polygon(p)?,
        };
        self.inserted += 1;
        self.removed += removed as u64;
        Ok(removed)
    }

    fn insert_into_point(&mut self, p: Point2) -> Result<usize, GeomError> {
        if p == self.verts[0] {
            return Err(GeomError::PointNotOutside { x: p.x, y: p.y });
        }
        self.verts.push_back(p);
        Ok(0)
    }

    fn insert_into_segment(&mut self, p: Point2) -> Result<usize, GeomError> {
        let other = self.verts[0];
        let cur = self.verts[1];
        match orient(other, cur, p) {
            Orientation::Left => {
                self.verts.push_back(p);
                Ok(0)
            }
            Orientation::Right => {
                // ccw order is other, p, cur; keep the cursor last
                self.verts.clear();
                self.verts.extend([cur, other, p]);
                Ok(0)
            }
            Orientation::Collinear => {
                let dir = cur - other;
                let t = (p - other).dot(dir) / dir.dot(dir);
                self.verts.clear();
                if t > 1.0 {
                    self.verts.extend([other, p]);
                } else if t < 0.0 {
                    self.verts.extend([cur, p]);
                } else {
                    self.verts.extend([other, cur]);
                    return Err(GeomError::PointNotOutside { x: p.x, y: p.y });
                }
                Ok(1)
            }
        }
    }

    fn insert_into_polygon(&mut self, p: Point2) -> Result<usize, GeomError> {
        let m = self.verts.len();
        let cursor = m - 1;
        // Edges visible from p form a contiguous chain through the cursor.
        // `fwd` counts visible edges walking counterclockwise from the cursor,
        // `back` counts them walking clockwise.
        let mut fwd = 0;
        let mut cur = self.verts[cursor];
        while fwd + 1 < m {
            let nxt = self.verts[fwd];
            if !edge_visible(cur, nxt, p, nxt - cur) {
                break;
            }
            cur = nxt;
            fwd += 1;
        }
        let mut back = 0;
        let mut cur = self.verts[cursor];
        while fwd + back + 1 < m {
            let prv = self.verts[cursor - back - 1];
            if !edge_visible(prv, cur, p, prv - cur) {
                break;
            }
            cur = prv;
            back += 1;
        }
        if fwd == 0 && back == 0 {
            return Err(GeomError::PointNotOutside { x: p.x, y: p.y });
        }

        let mut removed = 0;
        match (fwd, back) {
            (f, 0) => {
                // chain ends at the cursor on the clockwise side
                for _ in 1..f {
                    self.verts.pop_front();
                    removed += 1;
                }
                self.verts.push_back(p);
            }
            (0, b) => {
                let c = self.verts.pop_back().unwrap();
                for _ in 1..b {
                    self.verts.pop_back();
                    removed += 1;
                }
                self.verts.push_back(p);
                self.verts.push_front(c);
            }
            (f, b) => {
                self.verts.pop_back();
                removed += 1;
                for _ in 1..b {
                    self.verts.pop_back();
                    removed += 1;
                }
                for _ in 1..f {
                    self.verts.pop_front();
                    removed += 1;
                }
                self.verts.push_back(p);
            }
        }

        // strict convexity: drop neighbors of p that became collinear
        while self.verts.len() > 3 {
            let n = self.verts.len();
            if orient(self.verts[n - 3], self.verts[n - 2], p) == Orientation::Collinear {
                self.verts.remove(n - 2);
                removed += 1;
            } else {
                break;
            }
        }
        while self.verts.len() > 3 {
            if orient(p, self.verts[0], self.verts[1]) == Orientation::Collinear {
                self.verts.pop_front();
                removed += 1;
            } else {
                break;
            }
        }
        Ok(removed)
    }

    /// Closed containment with the orientation tolerance on the boundary.
    pub fn contains(&self, p: Point2) -> bool {
        match self.verts.len() {
            1 => {
                let v = self.verts[0];
                p.dist(v) <= EPS_GEOM * v.max_abs().max(p.max_abs()).max(1.0)
            }
            2 => {
                let (a, b) = (self.verts[0], self.verts[1]);
                if orient(a, b, p) != Orientation::Collinear {
                    return false;
                }
                let dir = b - a;
                let t = (p - a).dot(dir) / dir.dot(dir);
                let slack = EPS_GEOM * a.max_abs().max(b.max_abs()).max(1.0) / dir.norm();
                (-slack..=1.0 + slack).contains(&t)
            }
            n => (0..n)
                .all(|i| orient(self.verts[i], self.verts[(i + 1) % n], p) != Orientation::Right),
        }
    }

    /// Interior angle at the cursor, in (0, π).
    pub fn interior_angle_at_cursor(&self) -> Result<f64, GeomError> {
        if self.is_degenerate() {
            return Err(GeomError::DegenerateHull);
        }
        let x = self.cursor();
        Ok(angle_between(
            self.ccw_neighbor() - x,
            self.cw_neighbor() - x,
        ))
    }

    /// Diagnostics relative to `origin`, with the enclosing radius found by a
    /// scan over the vertices.
    pub fn diagnostics(&self, origin: Point2) -> Result<HullDiagnostics, GeomError> {
        let big_r = self.vertices().map(|v| v.dist(origin)).fold(0.0, f64::max);
        self.diagnostics_with_radius(origin, big_r)
    }

    /// Same as [`diagnostics`](Self::diagnostics) with a caller-maintained
    /// enclosing radius.
    pub fn diagnostics_with_radius(
        &self,
        origin: Point2,
        big_r: f64,
    ) -> Result<HullDiagnostics, GeomError> {
        let interior_angle = self.interior_angle_at_cursor()?;
        let x = self.cursor();
        let inward = origin - x;
        if inward.x == 0.0 && inward.y == 0.0 {
            return Err(GeomError::UndefinedAngle);
        }
        // π − ∠(o, x, y) depends only on the direction x → y, which is the edge direction.
        let alpha = PI - angle_between(inward, self.cw_neighbor() - x);
        let alpha_prime = PI - angle_between(inward, self.ccw_neighbor() - x);
        Ok(HullDiagnostics {
            alpha,
            alpha_prime,
            d: (big_r - x.dist(origin)).max(0.0),
            big_r,
            interior_angle,
        })
    }

    /// Largest distance of a vertex from the line through `a` and `b`.
    pub fn farthest_from_line(&self, a: Point2, b: Point2) -> Result<f64, GeomError> {
        let dir = b - a;
        let len = dir.norm();
        if len == 0.0 {
            return Err(GeomError::InvalidLine);
        }
        Ok(self
            .vertices()
            .map(|v| dir.cross(v - a).abs() / len)
            .fold(0.0, f64::max))
    }
}

/// Whether edge `a → b` (counterclockwise) is visible from `p`. A collinear
/// `p` counts as visible when it lies beyond the edge in direction `ahead`,
/// so the edge's far endpoint is swallowed.
fn edge_visible(a: Point2, b: Point2, p: Point2, ahead: Point2) -> bool {
    match orient(a, b, p) {
        Orientation::Right => true,
        Orientation::Left => false,
        Orientation::Collinear => {
            let far = if ahead.dot(b - a) > 0.0 { b } else { a };
            (p - far).dot(ahead) > 0.0
        }
    }
}
