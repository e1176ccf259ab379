//! Realizing a cover tree in the plane as a parameterized Hölder curve.
//!
//! Each tree vertex is sent to the center of its ball and each edge to the
//! straight segment between the two centers. The curve runs along the Euler
//! tour of the tree at constant speed measured in tree length, so parameter
//! time `t` corresponds to tour length `2 * total_length * t`.
//!
//! # Hölder constant
//!
//! Write `eps0` for the root radius and `L` for the total tree length. The
//! bound returned by [`theoretical_bound`] is
//!
//! ```text
//! H = HOLDER_CONSTANT * eps0 * (2 L)^(1/d),   HOLDER_CONSTANT = 48
//! ```
//!
//! and is assembled from three pieces:
//!
//! 1. Vertices. A parent and child at levels `k-1`, `k` have intersecting
//!    balls, so their centers are at most `3 eps0 2^-k` apart. Summing along
//!    a descending path from level `l` gives at most `3 eps0 2^-l`, while the
//!    tree distance is at least `2^{-(l+1)d}` because the edge into level `k`
//!    has length `2^{-kd}`. Hence `|phi(u) - phi(v)| <= 6 eps0 d_T^{1/d}` for
//!    ancestor pairs and, through the common ancestor, `12 eps0 d_T^{1/d}`
//!    for any pair. We use [`VERTEX_CONSTANT`] `= 16 = 8 * 2`: the classical
//!    `8 eps0` constant measured with edges one level shorter, times the
//!    factor `2 = (2^d)^{1/d}` that converts between the two edge-length
//!    conventions.
//! 2. Edges. The plane with the sup-norm is geodesic along straight segments
//!    (quasiconvexity constant 1). On a single edge into level `k` the map is
//!    linear with slope at most `3 eps0 2^-k` per unit fraction, which gives
//!    `3 eps0 d_T^{1/d}` since fractions `a <= 1` satisfy `a <= a^{1/d}`. A
//!    geodesic between arbitrary tree points splits into at most two partial
//!    edges and one vertex-to-vertex path; concavity of `s -> s^{1/d}` then
//!    gives `H_phi <= 3^{1 - 1/d} * 16 eps0 <= 48 eps0`.
//! 3. Parameterization. The tour is 1-Lipschitz from tour length to the tree,
//!    and tour length is `2 L t`, so `d_T <= 2 L |s - t|`.
//!
//! Composing, `|gamma(s) - gamma(t)| <= 48 eps0 (2 L)^{1/d} |s - t|^{1/d}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::CoverChain;
use crate::covertree::{euler_tour, CoverTree};
use crate::error::{Error, Result};
use crate::geometry::{dist, format_real, parse_real, Point2};

/// Vertex-level distortion constant, in units of `eps0`.
pub const VERTEX_CONSTANT: f64 = 16.0;

/// Constant `c` in `H = c * eps0 * (2 L)^(1/d)`.
pub const HOLDER_CONSTANT: f64 = 48.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HolderCurve {
    pub knot_params: Vec<f64>,
    pub knot_points: Vec<Point2>,
    pub alpha: f64,
    pub constant_bound: f64,
}

impl HolderCurve {
    /// A curve parked at `p` for all `t`.
    pub fn constant(p: Point2, alpha: f64) -> Self {
        HolderCurve {
            knot_params: vec![0.0, 1.0],
            knot_points: vec![p, p],
            alpha,
            constant_bound: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.knot_params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knot_params.is_empty()
    }

    /// Position at parameter `t`, clamped to `[0, 1]`.
    pub fn eval(&self, t: f64) -> Point2 {
        let n = self.knot_params.len();
        match n {
            0 => return Point2::default(),
            1 => return self.knot_points[0],
            _ => {}
        }
        let t = t.clamp(self.knot_params[0], self.knot_params[n - 1]);
        // first knot with param > t
        let hi = self.knot_params.partition_point(|&s| s <= t).clamp(1, n - 1);
        let lo = hi - 1;
        let (t0, t1) = (self.knot_params[lo], self.knot_params[hi]);
        let (a, b) = (self.knot_points[lo], self.knot_points[hi]);
        let f = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        Point2::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.knot_points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn to_json(&self) -> String {
        let doc = CurveJson {
            alpha: format_real(self.alpha),
            constant_bound: format_real(self.constant_bound),
            knots: self
                .knot_params
                .iter()
                .zip(&self.knot_points)
                .map(|(&t, p)| KnotJson {
                    t: format_real(t),
                    x: format_real(p.x),
                    y: format_real(p.y),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("curve serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: CurveJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut knot_params = Vec::with_capacity(doc.knots.len());
        let mut knot_points = Vec::with_capacity(doc.knots.len());
        for k in &doc.knots {
            knot_params.push(parse_real(&k.t)?);
            knot_points.push(Point2::new(parse_real(&k.x)?, parse_real(&k.y)?));
        }
        if knot_params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("knot parameters must be strictly increasing".into()));
        }
        Ok(HolderCurve {
            knot_params,
            knot_points,
            alpha: parse_real(&doc.alpha)?,
            constant_bound: parse_real(&doc.constant_bound)?,
        })
    }

    /// SVG polyline through the knots; the view box is the data bounding box
    /// with a small margin and the y axis points up.
    pub fn to_svg(&self, stroke_width: f64) -> String {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (0.0f64, 1.0f64, 0.0f64, 1.0f64);
        if let Some(first) = self.knot_points.first() {
            (xmin, xmax, ymin, ymax) = (first.x, first.x, first.y, first.y);
            for p in &self.knot_points {
                xmin = xmin.min(p.x);
                xmax = xmax.max(p.x);
                ymin = ymin.min(p.y);
                ymax = ymax.max(p.y);
            }
        }
        let span = (xmax - xmin).max(ymax - ymin);
        let margin = if span > 0.0 { 0.02 * span } else { 0.5 };
        let (vx, vy) = (xmin - margin, -ymax - margin);
        let (vw, vh) = (xmax - xmin + 2.0 * margin, ymax - ymin + 2.0 * margin);
        let pts: Vec<String> = self
            .knot_points
            .iter()
            .map(|p| format!("{},{}", format_real(p.x), format_real(0.0 - p.y)))
            .collect();
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n\
             <polyline fill=\"none\" stroke=\"black\" stroke-width=\"{}\" stroke-linejoin=\"round\" points=\"{}\"/>\n\
             </svg>\n",
            format_real(vx),
            format_real(vy),
            format_real(vw),
            format_real(vh),
            format_real(stroke_width),
            pts.join(" ")
        )
    }
}

#[derive(Serialize, Deserialize)]
struct KnotJson {
    t: String,
    x: String,
    y: String,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    alpha: String,
    constant_bound: String,
    knots: Vec<KnotJson>,
}

/// Center of the ball behind a tree vertex.
pub fn vertex_point(chain: &CoverChain, tree: &CoverTree, v: usize) -> Point2 {
    let vx = tree.vertices[v];
    chain.levels[vx.level].balls[vx.index].center
}

/// `HOLDER_CONSTANT * eps0 * (2 * total_length)^(1/d)`.
pub fn theoretical_bound(chain: &CoverChain, total_length: f64) -> f64 {
    HOLDER_CONSTANT * chain.eps0 * (2.0 * total_length).powf(1.0 / chain.d)
}

/// Parameterize the Euler tour of `tree` at constant tree speed.
pub fn build_curve(tree: &CoverTree, chain: &CoverChain) -> Result<HolderCurve> {
    if tree.is_empty() {
        return Err(Error::InvalidParameter("tree is empty".into()));
    }
    if !(chain.d >= 1.0) {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {}", chain.d)));
    }
    let alpha = 1.0 / chain.d;
    let root = vertex_point(chain, tree, tree.root());
    let tour = euler_tour(tree);
    if tour.steps.is_empty() {
        return Ok(HolderCurve::constant(root, alpha));
    }
    let total = tree.total_length();
    let span = tour.total_length();
    let mut knot_params = Vec::with_capacity(tour.steps.len() + 1);
    let mut knot_points = Vec::with_capacity(tour.steps.len() + 1);
    knot_params.push(0.0);
    knot_points.push(root);
    for step in &tour.steps {
        knot_params.push(step.cumulative / span);
        knot_points.push(vertex_point(chain, tree, step.to));
    }
    *knot_params.last_mut().expect("nonempty") = 1.0;
    Ok(HolderCurve {
        knot_params,
        knot_points,
        alpha,
        constant_bound: theoretical_bound(chain, total),
    })
}

fn ratio(curve: &HolderCurve, s: f64, t: f64) -> f64 {
    let dt = (s - t).abs();
    if dt == 0.0 {
        return 0.0;
    }
    dist(curve.eval(s), curve.eval(t)) / dt.powf(curve.alpha)
}

/// Largest observed `|gamma(s) - gamma(t)| / |s - t|^alpha` over all knot
/// pairs and `sample_pairs` seeded uniform pairs.
pub fn holder_estimate(curve: &HolderCurve, sample_pairs: usize, seed: u64) -> f64 {
    let n = curve.len();
    let knots = (0..n)
        .into_par_iter()
        .map(|i| {
            let (si, pi) = (curve.knot_params[i], curve.knot_points[i]);
            let mut best = 0.0f64;
            for j in i + 1..n {
                let dt = curve.knot_params[j] - si;
                best = best.max(dist(pi, curve.knot_points[j]) / dt.powf(curve.alpha));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(f64, f64)> = (0..sample_pairs)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    let sampled = pairs
        .par_iter()
        .map(|&(s, t)| ratio(curve, s, t))
        .reduce(|| 0.0, f64::max);
    knots.max(sampled)
}

/// Exact sup-norm distance from `p` to the segment `ab`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (ux, uy) = (a.x - p.x, a.y - p.y);
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let f = |t: f64| (ux + t * dx).abs().max((uy + t * dy).abs());
    // f is convex and piecewise linear; its minimum sits at an endpoint or a
    // breakpoint
    let mut best = f(0.0).min(f(1.0));
    let mut consider = |t: f64| {
        if t.is_finite() && (0.0..=1.0).contains(&t) {
            best = best.min(f(t));
        }
    };
    if dx != 0.0 {
        consider(-ux / dx);
    }
    if dy != 0.0 {
        consider(-uy / dy);
    }
    if dx != dy {
        consider((uy - ux) / (dx - dy));
    }
    if dx != -dy {
        consider(-(ux + uy) / (dx + dy));
    }
    best
}

/// Largest distance from an input point to the curve's image.
pub fn coverage_gap(points: &[Point2], curve: &HolderCurve) -> f64 {
    if curve.knot_points.is_empty() {
        return if points.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let segs: Vec<(Point2, Point2)> = if curve.knot_points.len() == 1 {
        vec![(curve.knot_points[0], curve.knot_points[0])]
    } else {
        curve.segments().collect()
    };
    points
        .par_iter()
        .map(|&p| {
            let mut best = f64::INFINITY;
            for &(a, b) in &segs {
                best = best.min(point_segment_distance(p, a, b));
                if best == 0.0 {
                    break;
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::build_chain;
    use crate::covertree::build_tree;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn singleton_gives_constant_curve() {
        let chain = build_chain(&[p(0.3, 0.3)], 1.0, 3, 1.0).unwrap();
        let tree = build_tree(&chain).unwrap();
        let c = build_curve(&tree, &chain).unwrap();
        assert!(c.knot_points.iter().all(|&q| q == p(0.3, 0.3)));
        assert_eq!(holder_estimate(&c, 100, 1), 0.0);
        assert_eq!(coverage_gap(&[p(0.3, 0.3)], &c), 0.0);
    }

    #[test]
    fn truly_degenerate_tree_is_constant() {
        let chain = CoverChain {
            eps0: 1.0,
            d: 1.0,
            levels: vec![crate::covering::CoverLevel {
                k: 0,
                radius: 1.0,
                balls: vec![crate::covering::Ball {
                    center: p(0.2, 0.9),
                    radius: 1.0,
                }],
                parents: vec![],
            }],
        };
        let tree = build_tree(&chain).unwrap();
        let c = build_curve(&tree, &chain).unwrap();
        assert_eq!(c, HolderCurve::constant(p(0.2, 0.9), 1.0));
    }

    #[test]
    fn two_point_curve_trace() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0)];
        let chain = build_chain(&pts, 1.0, 2, 1.0).unwrap();
        let tree = build_tree(&chain).unwrap();
        let c = build_curve(&tree, &chain).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(c.knot_params[0], 0.0);
        assert_eq!(*c.knot_params.last().unwrap(), 1.0);
        assert!(c.knot_params.windows(2).all(|w| w[0] < w[1]));
        assert!(c.knot_points.iter().all(|q| pts.contains(q)));
        assert_eq!(c.knot_points[0], c.knot_points[8]);
        assert_eq!(coverage_gap(&pts, &c), 0.0);
    }

    #[test]
    fn bound_examples() {
        let mut chain = build_chain(&[p(0.0, 0.0)], 1.0, 1, 1.0).unwrap();
        assert_eq!(theoretical_bound(&chain, 0.5), HOLDER_CONSTANT);
        chain.eps0 = 2.0;
        assert_eq!(theoretical_bound(&chain, 0.5), 2.0 * HOLDER_CONSTANT);
        chain.eps0 = 1.0;
        chain.d = 2.0;
        assert_eq!(theoretical_bound(&chain, 2.0), 2.0 * HOLDER_CONSTANT);
    }

    #[test]
    fn unit_speed_segment() {
        let c = HolderCurve {
            knot_params: vec![0.0, 1.0],
            knot_points: vec![p(0.0, 0.0), p(1.0, 0.0)],
            alpha: 1.0,
            constant_bound: 1.0,
        };
        let h = holder_estimate(&c, 10_000, 7);
        assert!((h - 1.0).abs() < 1e-12, "{h}");
    }

    #[test]
    fn segment_distance_cases() {
        let (a, b) = (p(0.0, 0.0), p(2.0, 0.0));
        assert_eq!(point_segment_distance(p(1.0, 0.5), a, b), 0.5);
        assert_eq!(point_segment_distance(p(3.0, 0.25), a, b), 1.0);
        // diagonal segment: the nearest point balances both coordinates
        let d = point_segment_distance(p(1.0, 0.0), p(0.0, 0.0), p(1.0, 1.0));
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(point_segment_distance(p(1.0, 1.0), a, a), 1.0);
    }

    #[test]
    fn json_and_svg() {
        let c = HolderCurve {
            knot_params: vec![0.0, 0.5, 1.0],
            knot_points: vec![p(0.0, 0.0), p(1.0, 0.5), p(0.0, 0.0)],
            alpha: 0.5,
            constant_bound: 3.0,
        };
        let s = c.to_json();
        assert_eq!(HolderCurve::from_json(&s).unwrap(), c);
        let svg = c.to_svg(0.01);
        assert!(svg.contains("points=\"0,0 1,-0.5 0,0\""), "{svg}");
        let empty = HolderCurve {
            knot_params: vec![],
            knot_points: vec![],
            alpha: 1.0,
            constant_bound: 0.0,
        };
        assert!(empty.to_svg(1.0).contains("points=\"\""));
    }
}
