//! Multiscale ball covers of finite point sets.
//!
//! Balls are closed sup-norm balls, i.e. axis-parallel squares of side
//! `2 * radius`. Minimal covers are replaced by greedy nets throughout: the
//! construction only needs covers with controlled cardinality and a parent
//! for every ball, and nets provide both.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, dist_le, diff_le, format_real, parse_real, Point2};
use crate::grid::BucketGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point2,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: Point2) -> bool {
        dist_le(self.center, p, self.radius)
    }
}

/// Greedy `r`-net: scan points in input order and open a ball at every point
/// not yet within `r` of a center.
///
/// Every point ends up within `r` of a center and centers are pairwise more
/// than `r` apart.
pub fn greedy_net(points: &[Point2], r: f64) -> Vec<Ball> {
    greedy_net_indices(points, r)
        .into_iter()
        .map(|i| Ball {
            center: points[i],
            radius: r,
        })
        .collect()
}

pub(crate) fn greedy_net_indices(points: &[Point2], r: f64) -> Vec<usize> {
    let mut grid = BucketGrid::new(r);
    let mut centers: Vec<usize> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let covered = grid.near(p, 2).any(|c| dist_le(points[c], p, r));
        if !covered {
            grid.insert(p, i);
            centers.push(i);
        }
    }
    centers
}

/// Greedy subset whose points are pairwise more than `sep` apart.
fn separated_subset_len(points: &[Point2], sep: f64) -> usize {
    let mut grid = BucketGrid::new(sep);
    let mut count = 0;
    for (i, &p) in points.iter().enumerate() {
        if !grid.near(p, 2).any(|c| dist_le(points[c], p, sep)) {
            grid.insert(p, i);
            count += 1;
        }
    }
    count
}

/// Number of closed squares of side `side` needed when each square is
/// anchored at the lexicographically smallest uncovered point (that point
/// becomes the lower-left corner).
fn anchored_square_cover_len(points: &[Point2], side: f64) -> usize {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]).then(a.cmp(&b)));
    let grid = BucketGrid::with_points(side, points);
    let mut covered = vec![false; points.len()];
    let mut count = 0;
    for &i in &order {
        if covered[i] {
            continue;
        }
        count += 1;
        let p = points[i];
        for j in grid.near(p, 2) {
            let q = points[j];
            if q.x >= p.x && q.y >= p.y && diff_le(q.x, p.x, side) && diff_le(q.y, p.y, side) {
                covered[j] = true;
            }
        }
        covered[i] = true;
    }
    count
}

/// Largest number of points inside one closed axis-parallel square of side
/// `side`.
///
/// Any optimal square can be slid right and up until its left edge passes
/// through one contained point and its bottom edge through another, so only
/// those candidate placements are examined.
pub fn max_points_in_square(points: &[Point2], side: f64) -> usize {
    if points.is_empty() {
        return 0;
    }
    let grid = BucketGrid::with_points(side, points);
    (0..points.len())
        .into_par_iter()
        .map(|a| {
            let left = points[a].x;
            let nearby: Vec<usize> = grid.near(points[a], 2).collect();
            let in_slab = |x: f64| x >= left && diff_le(x, left, side);
            let mut best = 0;
            for &b in &nearby {
                let bottom = points[b].y;
                if !in_slab(points[b].x) || bottom > points[a].y || !diff_le(points[a].y, bottom, side) {
                    continue;
                }
                let inside = nearby
                    .iter()
                    .filter(|&&c| {
                        let r = points[c];
                        in_slab(r.x) && r.y >= bottom && diff_le(r.y, bottom, side)
                    })
                    .count();
                best = best.max(inside);
            }
            best
        })
        .max()
        .unwrap_or(0)
}

/// Two-sided bracket on the covering number `N(points, eps)` by closed balls
/// of radius `eps` with arbitrary centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverBracket {
    pub lower: usize,
    pub upper: usize,
    /// Size of the greedy net (a cover whose centers are input points).
    pub net: usize,
}

pub fn cover_bracket(points: &[Point2], eps: f64) -> CoverBracket {
    if points.is_empty() {
        return CoverBracket {
            lower: 0,
            upper: 0,
            net: 0,
        };
    }
    let side = 2.0 * eps;
    let net = greedy_net_indices(points, eps).len();
    let anchored = anchored_square_cover_len(points, side);
    let separated = separated_subset_len(points, side);
    let per_square = max_points_in_square(points, side).max(1);
    let packing = points.len().div_ceil(per_square);
    CoverBracket {
        lower: separated.max(packing),
        upper: net.min(anchored),
        net,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverLevel {
    pub k: usize,
    pub radius: f64,
    pub balls: Vec<Ball>,
    /// Index into the previous level for each ball; empty at level 0.
    pub parents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverChain {
    pub eps0: f64,
    pub d: f64,
    pub levels: Vec<CoverLevel>,
}

impl CoverChain {
    pub fn counts(&self) -> Vec<(usize, u64)> {
        self.levels
            .iter()
            .map(|l| (l.k, l.balls.len() as u64))
            .collect()
    }

    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn to_json(&self) -> String {
        let doc = ChainJson {
            eps0: format_real(self.eps0),
            d: format_real(self.d),
            levels: self
                .levels
                .iter()
                .map(|l| LevelJson {
                    k: l.k,
                    radius: format_real(l.radius),
                    balls: l
                        .balls
                        .iter()
                        .map(|b| BallJson {
                            cx: format_real(b.center.x),
                            cy: format_real(b.center.y),
                        })
                        .collect(),
                    parents: l.parents.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("chain serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ChainJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut levels = Vec::with_capacity(doc.levels.len());
        for l in doc.levels {
            let radius = parse_real(&l.radius)?;
            let balls = l
                .balls
                .iter()
                .map(|b| {
                    Ok(Ball {
                        center: Point2::new(parse_real(&b.cx)?, parse_real(&b.cy)?),
                        radius,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            levels.push(CoverLevel {
                k: l.k,
                radius,
                balls,
                parents: l.parents,
            });
        }
        Ok(CoverChain {
            eps0: parse_real(&doc.eps0)?,
            d: parse_real(&doc.d)?,
            levels,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct BallJson {
    cx: String,
    cy: String,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    k: usize,
    radius: String,
    balls: Vec<BallJson>,
    parents: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    eps0: String,
    d: String,
    levels: Vec<LevelJson>,
}

/// Nested covers at radii `eps0 * 2^-k` for `k = 0..=levels`.
///
/// Level 0 is a single ball of radius `eps0` centered at the first point.
/// Each ball at level `k >= 1` gets as parent the previous-level ball with
/// the nearest center among those it intersects (lowest index on ties).
pub fn build_chain(points: &[Point2], eps0: f64, levels: usize, d: f64) -> Result<CoverChain> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("point set is empty".into()));
    }
    if !(eps0 > 0.0) || !eps0.is_finite() {
        return Err(Error::InvalidParameter(format!("eps0 must be positive, got {eps0}")));
    }
    if levels < 1 {
        return Err(Error::InvalidParameter("at least one level is required".into()));
    }
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
    }
    let root = points[0];
    let needed = points.iter().map(|&p| dist(root, p)).fold(0.0, f64::max);
    if !points.iter().all(|&p| dist_le(root, p, eps0)) {
        return Err(Error::RootRadiusInsufficient { eps0, needed });
    }

    let mut out = vec![CoverLevel {
        k: 0,
        radius: eps0,
        balls: vec![Ball {
            center: root,
            radius: eps0,
        }],
        parents: Vec::new(),
    }];
    for k in 1..=levels {
        let radius = eps0 * crate::geometry::exp2i(-(k as i32));
        let balls = greedy_net(points, radius);
        let prev = &out[k - 1];
        let reach = radius + prev.radius;
        let prev_centers: Vec<Point2> = prev.balls.iter().map(|b| b.center).collect();
        let grid = BucketGrid::with_points(reach, &prev_centers);
        let parents = balls
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut best: Option<(f64, usize)> = None;
                for j in grid.near(b.center, 2) {
                    let dj = dist(prev_centers[j], b.center);
                    if !dist_le(prev_centers[j], b.center, reach) {
                        continue;
                    }
                    best = match best {
                        Some((bd, bj)) if bd < dj || (bd == dj && bj < j) => Some((bd, bj)),
                        _ => Some((dj, j)),
                    };
                }
                best.map(|(_, j)| j)
                    .ok_or(Error::MissingParent { level: k, index: i })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(CoverLevel {
            k,
            radius,
            balls,
            parents,
        });
    }
    Ok(CoverChain {
        eps0,
        d,
        levels: out,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiniVerdict {
    Converging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiniTerm {
    pub k: usize,
    pub count: u64,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiniReport {
    pub terms: Vec<DiniTerm>,
    pub partial_sums: Vec<f64>,
    /// Fitted ratio of consecutive terms over the tail window, if any.
    pub ratio: Option<f64>,
    pub tail_estimate: f64,
    pub verdict: DiniVerdict,
}

/// Number of trailing consecutive-term ratios used for the tail fit.
pub const DINI_TAIL_WINDOW: usize = 4;

/// Partial sums of `N_k 2^{-kd}` with a geometric tail estimate.
///
/// The tail ratio is the largest consecutive-term ratio over the last
/// [`DINI_TAIL_WINDOW`] ratios. A ratio below one gives verdict
/// `Converging`; anything else is `Inconclusive`. A finite prefix can never
/// prove divergence, so there is no divergent verdict.
pub fn dini_report(counts: &[(usize, u64)], d: f64) -> Result<DiniReport> {
    if counts.is_empty() {
        return Err(Error::InvalidParameter("counts must be nonempty".into()));
    }
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
    }
    let terms: Vec<DiniTerm> = counts
        .iter()
        .map(|&(k, count)| DiniTerm {
            k,
            count,
            term: count as f64 * (-(k as f64) * d).exp2(),
        })
        .collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t.term;
            Some(*acc)
        })
        .collect();

    let window = DINI_TAIL_WINDOW.min(terms.len().saturating_sub(1));
    let ratio = if window == 0 {
        None
    } else {
        let tail = &terms[terms.len() - window - 1..];
        let mut worst = 0.0f64;
        for w in tail.windows(2) {
            let r = match (w[0].term, w[1].term) {
                (a, b) if a > 0.0 => b / a,
                (_, b) if b == 0.0 => 0.0,
                _ => f64::INFINITY,
            };
            worst = worst.max(r);
        }
        Some(worst)
    };
    let last = terms.last().map(|t| t.term).unwrap_or(0.0);
    let (tail_estimate, verdict) = match ratio {
        Some(r) if r < 1.0 => (last * r / (1.0 - r), DiniVerdict::Converging),
        _ => (f64::INFINITY, DiniVerdict::Inconclusive),
    };
    Ok(DiniReport {
        terms,
        partial_sums,
        ratio,
        tail_estimate,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimEstimate {
    pub samples: Vec<(f64, u64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares fit of `log N` against `log(1/eps)`.
pub fn box_dim_fit(samples: &[(f64, u64)]) -> Result<DimEstimate> {
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 || samples.iter().any(|&(e, n)| !(e > 0.0) || n == 0) {
        return Err(Error::TooFewScales);
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(e, n)| ((1.0 / e).ln(), (n as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    Ok(DimEstimate {
        samples: samples.to_vec(),
        slope,
        intercept,
        residual: (sse / m).sqrt(),
    })
}

/// Box-counting samples `(2^-j, upper cover count)` for `j` in the range.
pub fn box_count_samples(points: &[Point2], levels: std::ops::RangeInclusive<u32>) -> Vec<(f64, u64)> {
    let levels: Vec<u32> = levels.collect();
    levels
        .par_iter()
        .map(|&j| {
            let eps = crate::geometry::exp2i(-(j as i32));
            (eps, cover_bracket(points, eps).upper as u64)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PushforwardOptions {
    /// Dyadic grid `eps = 2^-1, ..., 2^-scales`.
    pub scales: u32,
    /// Use every pair when `|X|` is at most this; otherwise sample.
    pub exhaustive_limit: usize,
    pub sampled_pairs: usize,
    pub seed: u64,
}

impl Default for PushforwardOptions {
    fn default() -> Self {
        PushforwardOptions {
            scales: 8,
            exhaustive_limit: 2048,
            sampled_pairs: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardScale {
    pub eps: f64,
    pub image_radius: f64,
    /// Lower bracket of `N(Y, L eps^alpha)`.
    pub image_lower: usize,
    /// Greedy-net count at `eps` on the source set.
    pub source_net: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardReport {
    pub l_fit: f64,
    pub alpha: f64,
    pub scales: Vec<PushforwardScale>,
    pub holds: bool,
}

/// Empirical check of `N(Y, L eps^alpha) <= N(X, eps)` for an `alpha`-Hölder
/// map given as `map[i]` = index in `y_points` of the image of `x_points[i]`.
pub fn pushforward_check(
    x_points: &[Point2],
    y_points: &[Point2],
    map: &[usize],
    alpha: f64,
) -> Result<PushforwardReport> {
    pushforward_check_with(x_points, y_points, map, alpha, &PushforwardOptions::default())
}

pub fn pushforward_check_with(
    x_points: &[Point2],
    y_points: &[Point2],
    map: &[usize],
    alpha: f64,
    opts: &PushforwardOptions,
) -> Result<PushforwardReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if map.len() != x_points.len() {
        return Err(Error::InvalidParameter(format!(
            "map has {} entries for {} source points",
            map.len(),
            x_points.len()
        )));
    }
    let mut hit = vec![false; y_points.len()];
    for &j in map {
        if j >= y_points.len() {
            return Err(Error::InvalidParameter(format!("map target {j} out of range")));
        }
        hit[j] = true;
    }
    if let Some(missing) = hit.iter().position(|h| !h) {
        return Err(Error::NotSurjective(missing));
    }

    let ratio = |a: usize, b: usize| -> Result<f64> {
        let dx = dist(x_points[a], x_points[b]);
        let dy = dist(y_points[map[a]], y_points[map[b]]);
        if dx == 0.0 {
            if dy > 0.0 {
                return Err(Error::InvalidParameter(
                    "map sends coincident points to different images".into(),
                ));
            }
            return Ok(0.0);
        }
        Ok(dy / dx.powf(alpha))
    };
    let n = x_points.len();
    let l_fit = if n <= opts.exhaustive_limit {
        (0..n)
            .into_par_iter()
            .map(|a| {
                (a + 1..n).try_fold(0.0f64, |m, b| Ok::<f64, Error>(m.max(ratio(a, b)?)))
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut best = 0.0f64;
        for _ in 0..opts.sampled_pairs {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            best = best.max(ratio(a, b)?);
        }
        best
    };

    let scales: Vec<PushforwardScale> = (1..=opts.scales)
        .into_par_iter()
        .map(|j| {
            let eps = crate::geometry::exp2i(-(j as i32));
            let image_radius = l_fit * eps.powf(alpha);
            let image_lower = if image_radius > 0.0 {
                cover_bracket(y_points, image_radius).lower
            } else {
                y_points.len()
            };
            let source_net = greedy_net_indices(x_points, eps).len();
            PushforwardScale {
                eps,
                image_radius,
                image_lower,
                source_net,
                holds: image_lower <= source_net,
            }
        })
        .collect();
    let holds = scales.iter().all(|s| s.holds);
    Ok(PushforwardReport {
        l_fit,
        alpha,
        scales,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn greedy_net_examples() {
        let single = greedy_net(&[p(0.3, 0.4)], 0.1);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].center, p(0.3, 0.4));

        let line = [p(0.0, 0.0), p(0.3, 0.0), p(1.0, 0.0)];
        let centers: Vec<Point2> = greedy_net(&line, 0.35).iter().map(|b| b.center).collect();
        assert_eq!(centers, vec![p(0.0, 0.0), p(1.0, 0.0)]);

        let corners = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)];
        assert_eq!(greedy_net(&corners, 0.5).len(), 4);
        assert!(greedy_net(&[], 1.0).is_empty());
    }

    #[test]
    fn bracket_singleton() {
        let b = cover_bracket(&[p(0.5, 0.5)], 0.01);
        assert_eq!((b.lower, b.upper), (1, 1));
    }

    #[test]
    fn bracket_segment_samples() {
        let pts: Vec<Point2> = (0..=10).map(|i| p(i as f64 / 10.0, 0.0)).collect();
        let b = cover_bracket(&pts, 0.25);
        assert!(b.lower >= 2 && b.upper <= 3, "{b:?}");
        assert!(b.lower <= 2 && 2 <= b.upper);
    }

    #[test]
    fn bracket_standard_cantor_first_stage() {
        let mut pts = Vec::new();
        for (ox, oy) in [(0.0, 0.0), (0.75, 0.0), (0.0, 0.75), (0.75, 0.75)] {
            for (cx, cy) in [(0.0, 0.0), (0.25, 0.0), (0.0, 0.25), (0.25, 0.25)] {
                pts.push(p(ox + cx, oy + cy));
            }
        }
        let b = cover_bracket(&pts, 0.125);
        assert_eq!((b.lower, b.upper), (4, 4));
    }

    #[test]
    fn chain_singleton() {
        let c = build_chain(&[p(0.2, 0.2)], 1.0, 3, 1.0).unwrap();
        assert_eq!(c.levels.len(), 4);
        for l in &c.levels {
            assert_eq!(l.balls.len(), 1);
            assert_eq!(l.balls[0].center, p(0.2, 0.2));
        }
        assert!(c.levels[1..].iter().all(|l| l.parents == vec![0]));
    }

    #[test]
    fn chain_two_points() {
        let c = build_chain(&[p(0.0, 0.0), p(1.0, 0.0)], 1.0, 2, 1.0).unwrap();
        let sizes: Vec<usize> = c.levels.iter().map(|l| l.balls.len()).collect();
        assert_eq!(sizes, vec![1, 2, 2]);
        assert_eq!(c.levels[1].parents, vec![0, 0]);
        assert_eq!(c.levels[2].parents, vec![0, 1]);
    }

    #[test]
    fn chain_root_radius_error() {
        let e = build_chain(&[p(0.0, 0.0), p(2.0, 0.0)], 1.0, 2, 1.0).unwrap_err();
        assert!(matches!(e, Error::RootRadiusInsufficient { .. }));
        assert!(e.to_string().contains("root radius insufficient"));
    }

    #[test]
    fn chain_json_round_trip() {
        let c = build_chain(&[p(0.0, 0.0), p(1.0, 0.0), p(0.3, 0.9)], 1.0, 3, 1.5).unwrap();
        let s = c.to_json();
        assert_eq!(CoverChain::from_json(&s).unwrap(), c);
        assert!(s.starts_with("{\"eps0\":\"1\",\"d\":\"1.5\",\"levels\":[{\"k\":0"));
    }

    #[test]
    fn dini_examples() {
        let ones: Vec<(usize, u64)> = (0..40).map(|k| (k, 1)).collect();
        let r = dini_report(&ones, 1.0).unwrap();
        assert_eq!(r.verdict, DiniVerdict::Converging);
        let total = r.partial_sums.last().unwrap() + r.tail_estimate;
        assert!((total - 2.0).abs() < 1e-12);

        let quads: Vec<(usize, u64)> = (0..10).map(|k| (k, 4u64.pow(k as u32))).collect();
        let r = dini_report(&quads, 2.0).unwrap();
        assert!(r.terms.iter().all(|t| t.term == 1.0));
        assert_eq!(r.verdict, DiniVerdict::Inconclusive);

        let halves: Vec<(usize, u64)> = (0..30).map(|k| (k, 1u64 << k)).collect();
        let r = dini_report(&halves, 1.5).unwrap();
        assert_eq!(r.verdict, DiniVerdict::Converging);
        let limit = 1.0 / (1.0 - 0.5f64.sqrt());
        let total = r.partial_sums.last().unwrap() + r.tail_estimate;
        assert!((total - limit).abs() < 1e-9, "{total} vs {limit}");
        assert!(r.partial_sums.windows(2).all(|w| w[0] <= w[1]));

        assert!(dini_report(&[], 1.0).is_err());
    }

    #[test]
    fn box_dim_exact_power_laws() {
        let a = box_dim_fit(&[(0.5, 2), (0.25, 4), (0.125, 8)]).unwrap();
        assert!((a.slope - 1.0).abs() < 1e-12);
        let b = box_dim_fit(&[(0.5, 4), (0.25, 16), (0.125, 64)]).unwrap();
        assert!((b.slope - 2.0).abs() < 1e-12);
        assert!(b.residual < 1e-12);
        assert_eq!(box_dim_fit(&[(0.5, 4), (0.5, 9)]), Err(Error::TooFewScales));
        assert_eq!(box_dim_fit(&[(0.5, 4)]), Err(Error::TooFewScales));
    }

    #[test]
    fn box_dim_of_segment() {
        let pts: Vec<Point2> = (0..1000).map(|i| p(i as f64 / 999.0, 0.25)).collect();
        let fit = box_dim_fit(&box_count_samples(&pts, 3..=7)).unwrap();
        assert!((0.9..=1.1).contains(&fit.slope), "slope {}", fit.slope);
    }

    #[test]
    fn pushforward_identity_and_square_map() {
        let pts: Vec<Point2> = (0..30)
            .map(|i| p((i as f64 * 0.37).fract(), (i as f64 * 0.61).fract()))
            .collect();
        let id: Vec<usize> = (0..pts.len()).collect();
        let r = pushforward_check(&pts, &pts, &id, 1.0).unwrap();
        assert_eq!(r.l_fit, 1.0);
        assert!(r.holds);

        let xs: Vec<Point2> = (0..50).map(|i| p(i as f64 / 49.0, 0.0)).collect();
        let ys: Vec<Point2> = xs.iter().map(|q| p(q.x * q.x, 0.0)).collect();
        let id50: Vec<usize> = (0..50).collect();
        let r = pushforward_check(&xs, &ys, &id50, 0.5).unwrap();
        assert!(r.l_fit <= 2.0 && r.l_fit > 0.0);
        assert!(r.holds);
    }

    #[test]
    fn pushforward_rejects_non_surjective() {
        let xs = [p(0.0, 0.0), p(1.0, 0.0)];
        let ys = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)];
        assert_eq!(
            pushforward_check(&xs, &ys, &[0, 1], 1.0).unwrap_err(),
            Error::NotSurjective(2)
        );
    }
}
