//! Slow reference implementations. Tests and `--validate` runs compare the
//! fast incremental structures against these.

use thiserror::Error;

use crate::geom::{orient, ConvexPolygon, GeomError, Orientation, Point2, EPS_GEOM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Convex hull by Andrew's monotone chain, collinear points dropped. The
/// returned polygon is counterclockwise from the lowest-leftmost point, with
/// the cursor on that point.
pub fn hull_of(points: &[Point2]) -> Result<ConvexPolygon, OracleError> {
    if points.is_empty() {
        return Err(GeomError::Empty.into());
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::NonFinite.into());
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() == 1 {
        return Ok(ConvexPolygon::singleton(pts[0]));
    }
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) != Orientation::Left
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) != Orientation::Left
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 1 {
        // all points coincide up to tolerance
        lower.push(*pts.last().unwrap());
    }
    Ok(ConvexPolygon::from_ccw_unchecked(&lower, 0))
}

/// True iff the open segment `(a, b)` meets the open interior of `hull`.
///
/// The segment is clipped against the half-planes of the edges, each shrunk
/// by the orientation tolerance; a hit needs a piece of positive length left.
pub fn segment_hits_interior(hull: &ConvexPolygon, a: Point2, b: Point2) -> bool {
    if hull.is_degenerate() {
        return false;
    }
    let verts = hull.to_vec();
    let n = verts.len();
    let scale = verts
        .iter()
        .chain([&a, &b])
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0, f64::max);
    let tol = EPS_GEOM * scale;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for i in 0..n {
        let (u, v) = (verts[i], verts[(i + 1) % n]);
        let edge = v - u;
        // signed area g(t) = edge × (a + t(b − a) − u), inside iff g > tol
        let g0 = edge.cross(a - u);
        let g1 = edge.cross(b - u);
        let slope = g1 - g0;
        if slope == 0.0 {
            if g0 <= tol {
                return false;
            }
            continue;
        }
        let t = (tol - g0) / slope;
        if slope > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        if hi <= lo {
            return false;
        }
    }
    hi > lo
}

/// `(rmax, rmin)` of the last value against every earlier one by direct scan.
pub fn naive_rates(xs: &[f64]) -> Result<(f64, f64), OracleError> {
    if xs.len() < 2 {
        return Err(OracleError::TooShort {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() - 1;
    let xn = xs[n];
    let mut rmax = f64::NEG_INFINITY;
    let mut rmin = f64::INFINITY;
    for (m, &xm) in xs[..n].iter().enumerate() {
        let r = (xn - xm) / (n - m) as f64;
        rmax = rmax.max(r);
        rmin = rmin.min(r);
    }
    Ok((rmax, rmin))
}

/// Investor width `max_m |x_m − (m/n)·x_n|` by direct scan.
pub fn naive_investor_width(xs: &[f64]) -> Result<f64, OracleError> {
    if xs.len() < 2 {
        return Err(OracleError::TooShort {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() - 1;
    let xn = xs[n];
    Ok(xs
        .iter()
        .enumerate()
        .map(|(m, &xm)| (xm - m as f64 / n as f64 * xn).abs())
        .fold(0.0, f64::max))
}

/// Largest distance from any path point to the line through `a` and `b`.
pub fn naive_width_path(path: &[Point2], a: Point2, b: Point2) -> Result<f64, OracleError> {
    let dir = b - a;
    let len = dir.norm();
    if len == 0.0 {
        return Err(GeomError::InvalidLine.into());
    }
    Ok(path
        .iter()
        .map(|&p| dir.cross(p - a).abs() / len)
        .fold(0.0, f64::max))
}

/// Same vertex set up to `tol` per coordinate, ignoring order and cursor.
pub fn same_vertex_set(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let bv = b.to_vec();
    a.vertices().all(|p| {
        bv.iter()
            .any(|q| (p.x - q.x).abs() <= tol && (p.y - q.y).abs() <= tol)
    })
}
