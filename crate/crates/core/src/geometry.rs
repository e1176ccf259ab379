//! Planar primitives under the sup-norm: points, dyadic squares, convex hulls
//! and minimal strip widths.
//!
//! Distances between points are always `max(|dx|, |dy|)`. The one exception
//! is [`strip_width`], which measures the Euclidean width of the thinnest
//! line strip containing a set, as in the definition of Jones β-numbers.

use std::cmp::Ordering;

use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Lexicographic order on `(x, y)`; total for finite coordinates.
    pub fn lex_cmp(&self, other: &Point2) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }

    fn coord(self) -> Coord<f64> {
        Coord { x: self.x, y: self.y }
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2 { x, y }
    }
}

/// Sup-norm distance.
#[inline]
pub fn dist(p: Point2, q: Point2) -> f64 {
    (p.x - q.x).abs().max((p.y - q.y).abs())
}

/// Exact test of `a - b <= s`, free of subtraction rounding.
#[inline]
pub fn diff_le(a: f64, b: f64, s: f64) -> bool {
    // two-difference: a - b == x + y exactly
    let x = a - b;
    let bv = a - x;
    let av = x + bv;
    let y = (a - av) + (bv - b);
    x < s || (x == s && y <= 0.0)
}

/// Exact test of `|a - b| <= s`.
#[inline]
pub fn abs_diff_le(a: f64, b: f64, s: f64) -> bool {
    diff_le(a, b, s) && diff_le(b, a, s)
}

/// Exact test of `dist(p, q) <= s`.
#[inline]
pub fn dist_le(p: Point2, q: Point2, s: f64) -> bool {
    abs_diff_le(p.x, q.x, s) && abs_diff_le(p.y, q.y, s)
}

/// `2^i` for an integer exponent, exact whenever the result is a normal f64.
pub fn exp2i(i: i32) -> f64 {
    if (-1022..=1023).contains(&i) {
        f64::from_bits(((1023 + i) as u64) << 52)
    } else {
        2f64.powi(i)
    }
}

/// A closed dyadic square `[jx, jx+1] x [jy, jy+1]` scaled by `2^-level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub level: u32,
    pub jx: i64,
    pub jy: i64,
}

impl DyadicSquare {
    pub fn new(level: u32, jx: i64, jy: i64) -> Self {
        DyadicSquare { level, jx, jy }
    }

    pub fn side(&self) -> f64 {
        exp2i(-(self.level as i32))
    }

    pub fn lower_left(&self) -> Point2 {
        let s = self.side();
        Point2::new(self.jx as f64 * s, self.jy as f64 * s)
    }

    pub fn center(&self) -> Point2 {
        let s = self.side();
        Point2::new((self.jx as f64 + 0.5) * s, (self.jy as f64 + 0.5) * s)
    }

    /// Closed containment.
    pub fn contains(&self, p: Point2) -> bool {
        self.as_square().contains(p)
    }

    pub fn as_square(&self) -> Square {
        Square {
            center: self.center(),
            side: self.side(),
        }
    }
}

/// An axis-parallel closed square given by its center and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub center: Point2,
    pub side: f64,
}

impl Square {
    pub fn new(center: Point2, side: f64) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "square side must be positive, got {side}"
            )));
        }
        Ok(Square { center, side })
    }

    pub fn contains(&self, p: Point2) -> bool {
        let h = self.side / 2.0;
        (p.x - self.center.x).abs() <= h && (p.y - self.center.y).abs() <= h
    }

    pub fn contains_square(&self, other: &Square) -> bool {
        let h = (self.side - other.side) / 2.0;
        h >= 0.0
            && (other.center.x - self.center.x).abs() <= h
            && (other.center.y - self.center.y).abs() <= h
    }
}

/// The square with the same center as `q` and three times its side.
pub fn triple(q: &DyadicSquare) -> Square {
    Square {
        center: q.center(),
        side: 3.0 * q.side(),
    }
}

/// Indices `j` with `j * s <= v <= (j + 1) * s` for `s = 2^-level`.
fn cell_range(v: f64, level: u32) -> (i64, i64) {
    let scaled = v * exp2i(level as i32);
    let fl = scaled.floor();
    let j = fl as i64;
    if scaled == fl {
        (j - 1, j)
    } else {
        (j, j)
    }
}

/// All closed dyadic squares at `level` that contain at least one point,
/// sorted by `(jx, jy)`.
pub fn dyadic_squares_meeting(points: &[Point2], level: u32) -> Vec<DyadicSquare> {
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let (x0, x1) = cell_range(p.x, level);
        let (y0, y1) = cell_range(p.y, level);
        for jx in x0..=x1 {
            for jy in y0..=y1 {
                out.push(DyadicSquare::new(level, jx, jy));
            }
        }
    }
    out.sort_unstable_by_key(|q| (q.jx, q.jy));
    out.dedup();
    out
}

/// Convex hull in counter-clockwise order, without collinear vertices.
///
/// Orientation tests are exact (adaptive-precision predicates), so the hull
/// of a collinear set has at most two vertices.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |a: Point2, b: Point2, c: Point2| orient2d(a.coord(), b.coord(), c.coord());

    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Twice the signed area of the triangle `abc`.
fn cross(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Minimal Euclidean width of a line strip containing all points.
///
/// Zero for fewer than three points and for collinear sets. Computed with
/// rotating calipers over the exact convex hull: the minimal width is
/// attained orthogonal to some hull edge.
pub fn strip_width(points: &[Point2]) -> f64 {
    let hull = convex_hull(points);
    let h = hull.len();
    if h < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    // antipodal vertex for the current edge
    let mut j = 1;
    for i in 0..h {
        let a = hull[i];
        let b = hull[(i + 1) % h];
        while cross(a, b, hull[(j + 1) % h]) > cross(a, b, hull[j]) {
            j = (j + 1) % h;
        }
        let len = (b.x - a.x).hypot(b.y - a.y);
        let w = cross(a, b, hull[j]) / len;
        best = best.min(w);
    }
    best.max(0.0)
}

/// Sup-norm diameter of a set; zero for fewer than two points.
pub fn diameter(points: &[Point2]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    (xmax - xmin).max(ymax - ymin)
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x}")
}

pub fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a real number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite real: {s:?}")));
    }
    Ok(v)
}

#[derive(Serialize, Deserialize)]
struct PointCloudJson {
    points: Vec<[serde_json::Value; 2]>,
}

fn value_to_real(v: &serde_json::Value) -> Result<f64> {
    match v {
        serde_json::Value::String(s) => parse_real(s),
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        other => Err(Error::Parse(format!("expected a real, got {other}"))),
    }
}

/// Serialize as `{"points": [["x", "y"], ...]}` with reals as decimal strings.
pub fn points_to_json(points: &[Point2]) -> String {
    let cloud = PointCloudJson {
        points: points
            .iter()
            .map(|p| {
                [
                    serde_json::Value::String(format_real(p.x)),
                    serde_json::Value::String(format_real(p.y)),
                ]
            })
            .collect(),
    };
    serde_json::to_string(&cloud).expect("point cloud serializes")
}

/// Parse point-cloud JSON. Coordinates may be decimal strings or JSON numbers.
pub fn points_from_json(s: &str) -> Result<Vec<Point2>> {
    let cloud: PointCloudJson =
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    cloud
        .points
        .iter()
        .map(|[x, y]| Ok(Point2::new(value_to_real(x)?, value_to_real(y)?)))
        .collect()
}
