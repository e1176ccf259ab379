//! Jones beta numbers over dyadic squares.
//!
//! Two conventions coexist. The Jones sum uses the tripled square:
//! `beta(3Q) = omega(points in 3Q) / (3 side(Q))`, weighted by `side(Q)`.
//! The counting sum uses `Q` itself: `omega(points in Q) / side(Q)`.
//! Both are computed on finite point sets, which can only underestimate the
//! widths of the sets they approximate.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::{normalized_length, SideExponents};
use crate::error::{Error, Result};
use crate::exact::{self, int, rat, LogRational};
use crate::geometry::{dyadic_squares_meeting, format_real, strip_width, triple, DyadicSquare, Point2};
use crate::grid::BucketGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaRecord {
    pub square: DyadicSquare,
    pub omega: f64,
    pub beta: f64,
    /// `beta^2 side(Q)`.
    pub contribution: f64,
}

fn record(square: DyadicSquare, inside: &[Point2]) -> BetaRecord {
    let omega = strip_width(inside);
    let side = square.side();
    let beta = omega / (3.0 * side);
    BetaRecord {
        square,
        omega,
        beta,
        contribution: beta * beta * side,
    }
}

/// Beta number of `points` over the closed triple of `q`.
pub fn beta_of(points: &[Point2], q: DyadicSquare) -> BetaRecord {
    let t = triple(&q);
    let inside: Vec<Point2> = points.iter().copied().filter(|p| t.contains(*p)).collect();
    record(q, &inside)
}

/// `omega(points in Q) / side(Q)` for the square itself.
pub fn beta_of_square(points: &[Point2], q: DyadicSquare) -> f64 {
    let s = q.as_square();
    let inside: Vec<Point2> = points.iter().copied().filter(|p| s.contains(*p)).collect();
    strip_width(&inside) / q.side()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaReport {
    pub levels: RangeInclusive<u32>,
    pub records: Vec<BetaRecord>,
    pub per_level_sums: Vec<f64>,
    pub cumulative: f64,
}

impl BetaReport {
    pub fn min_beta(&self) -> Option<f64> {
        self.records.iter().map(|r| r.beta).reduce(f64::min)
    }

    pub fn records_at(&self, level: u32) -> impl Iterator<Item = &BetaRecord> {
        self.records.iter().filter(move |r| r.square.level == level)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,jx,jy,omega,beta,contribution\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.square.level,
                r.square.jx,
                r.square.jy,
                format_real(r.omega),
                format_real(r.beta),
                format_real(r.contribution)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            level_min: u32,
            level_max: u32,
            per_level_sums: Vec<String>,
            cumulative: String,
            records: &'a [BetaRecord],
        }
        serde_json::to_string(&Doc {
            level_min: *self.levels.start(),
            level_max: *self.levels.end(),
            per_level_sums: self.per_level_sums.iter().map(|v| format_real(*v)).collect(),
            cumulative: format_real(self.cumulative),
            records: &self.records,
        })
        .expect("report serializes")
    }
}

/// Points of `points` inside the closed triple of every square meeting
/// the set at `level`, paired with the square.
fn level_records(points: &[Point2], level: u32) -> Vec<BetaRecord> {
    let squares = dyadic_squares_meeting(points, level);
    let grid = BucketGrid::with_points(DyadicSquare::new(level, 0, 0).side(), points);
    squares
        .par_iter()
        .map(|q| {
            let t = triple(q);
            let inside: Vec<Point2> = grid
                .near(q.center(), 2)
                .map(|i| points[i])
                .filter(|p| t.contains(*p))
                .collect();
            record(*q, &inside)
        })
        .collect()
}

fn check_levels(levels: &RangeInclusive<u32>) -> Result<()> {
    if levels.start() > levels.end() {
        return Err(Error::InvalidParameter(format!(
            "empty level range {}..={}",
            levels.start(),
            levels.end()
        )));
    }
    if *levels.end() > 1000 {
        return Err(Error::InvalidParameter("levels above 1000 are not representable".into()));
    }
    Ok(())
}

/// `sum beta^2(3Q) side(Q)` over the dyadic squares `Q` meeting `points`,
/// one partial sum per level.
pub fn beta_squared_sum(points: &[Point2], levels: RangeInclusive<u32>) -> Result<BetaReport> {
    check_levels(&levels)?;
    let mut records = Vec::new();
    let mut per_level_sums = Vec::new();
    for level in levels.clone() {
        let recs = level_records(points, level);
        per_level_sums.push(recs.iter().map(|r| r.contribution).sum());
        records.extend(recs);
    }
    let cumulative = per_level_sums.iter().sum();
    Ok(BetaReport {
        levels,
        records,
        per_level_sums,
        cumulative,
    })
}

/// Dyadic level `i_n` with `2^{-i_n} <= ell_{k_{2n+1} - 1} < 2^{-i_n + 1}`.
pub fn dyadic_scale_for(e: &SideExponents, n: usize) -> Result<i64> {
    let k = stage_end(e, n)? - 1;
    i64::try_from(exact::ceil(&(int(2) * e.e(k))))
        .map_err(|_| Error::InvalidParameter("dyadic level out of range".into()))
}

fn stage_end(e: &SideExponents, n: usize) -> Result<u64> {
    if n < 1 || 2 * n + 1 >= e.ks.len() {
        return Err(Error::InvalidParameter(format!(
            "stage {n} outside 1..={}",
            (e.ks.len() - 2) / 2
        )));
    }
    Ok(e.ks[2 * n + 1])
}

/// Exact test of `2^{-i_n - 2} <= ell_{k_{2n+1}} <= 2^{-i_n}`.
pub fn dyadic_scale_check(e: &SideExponents, n: usize) -> Result<bool> {
    let i = BigRational::from_integer(dyadic_scale_for(e, n)?.into());
    let twice = int(2) * e.e(stage_end(e, n)?);
    Ok(i <= twice && twice <= i + int(2))
}

/// The per-scale lower bound on the beta sum of the Cantor set.
///
/// At least `4^{k-1}` level-`i_n` squares meet the set, each has
/// `beta(3Q) >= 1/12`, and each has side `>= ell_k`, with `k = k_{2n+1}`.
/// Hence the level-`i_n` sum is at least `(1/576) 4^{k - e_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorBetaBound {
    pub n: usize,
    pub k: u64,
    pub coefficient: BigRational,
    /// `k - e_k`.
    pub exponent: BigRational,
    pub value: f64,
    /// `log_4` of `n * 576 * bound`.
    pub log4_normalized: LogRational,
    /// Exact test of `1 <= n * 576 * bound <= 4^{1 - gamma}`.
    pub in_window: bool,
}

impl CantorBetaBound {
    pub fn ratio_to_harmonic(&self) -> f64 {
        self.value * self.n as f64
    }
}

pub fn cantor_beta_bound(e: &SideExponents, n: usize) -> Result<CantorBetaBound> {
    let norm = normalized_length(e, n)?;
    let coefficient = rat(1, 576);
    Ok(CantorBetaBound {
        n,
        k: norm.k,
        value: exact::to_f64(&coefficient) * exact::pow4_f64(&norm.exponent),
        coefficient,
        exponent: norm.exponent,
        log4_normalized: norm.log4_value,
        in_window: norm.in_window,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BnvLevel {
    pub level: u32,
    pub squares: usize,
    /// Squares with `beta(Q) >= beta0`.
    pub count: u64,
    /// `count * 2^{-level d}`.
    pub term: f64,
    pub partial_sum: f64,
}

/// Counting sum `sum_k #{Q in D_k : beta(Q) >= beta0} 2^{-kd}` over the
/// squares meeting `points`, with `beta` taken over `Q` itself.
pub fn bnv_sum(points: &[Point2], d: f64, levels: RangeInclusive<u32>, beta0: f64) -> Result<Vec<BnvLevel>> {
    check_levels(&levels)?;
    if !(beta0 > 0.0) || !beta0.is_finite() {
        return Err(Error::InvalidParameter(format!("beta0 must be positive, got {beta0}")));
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("d must be positive, got {d}")));
    }
    let mut out = Vec::new();
    let mut partial = 0.0;
    for level in levels {
        let squares = dyadic_squares_meeting(points, level);
        let grid = BucketGrid::with_points(DyadicSquare::new(level, 0, 0).side(), points);
        let count = squares
            .par_iter()
            .filter(|q| {
                let s = q.as_square();
                let inside: Vec<Point2> = grid
                    .near(q.center(), 1)
                    .map(|i| points[i])
                    .filter(|p| s.contains(*p))
                    .collect();
                strip_width(&inside) / q.side() >= beta0
            })
            .count() as u64;
        let term = count as f64 * (-(level as f64) * d).exp2();
        partial += term;
        out.push(BnvLevel {
            level,
            squares: squares.len(),
            count,
            term,
            partial_sum: partial,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{corners, schedule, side_exponents, Variant, DEFAULT_BUDGET};

    fn unit_corners() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
        ]
    }

    fn exps() -> SideExponents {
        let s = schedule(&rat(3, 4), 3, Variant::Corrected).unwrap();
        side_exponents(&s, None).unwrap()
    }

    #[test]
    fn single_square_examples() {
        let r = beta_of(&unit_corners(), DyadicSquare::new(0, 0, 0));
        assert_eq!((r.omega, r.beta), (1.0, 1.0 / 3.0));
        assert!((r.contribution - 1.0 / 9.0).abs() < 1e-15);

        let line: Vec<Point2> = (0..10).map(|i| Point2::new(i as f64 * 0.1, 0.3)).collect();
        assert_eq!(beta_of(&line, DyadicSquare::new(0, 0, 0)).beta, 0.0);
        assert_eq!(beta_of(&unit_corners(), DyadicSquare::new(3, 40, 40)).beta, 0.0);
        assert_eq!(beta_of_square(&unit_corners(), DyadicSquare::new(0, 0, 0)), 1.0);
    }

    #[test]
    fn unit_corner_level_zero_sum() {
        let pts = unit_corners();
        let report = beta_squared_sum(&pts, 0..=0).unwrap();
        let squares = dyadic_squares_meeting(&pts, 0);
        assert_eq!(report.records.len(), squares.len());
        let expected: f64 = squares.iter().map(|q| beta_of(&pts, *q).contribution).sum();
        assert!((report.cumulative - expected).abs() < 1e-15);
        assert!(report.to_csv().starts_with("level,jx,jy,omega,beta,contribution\n0,-1,-1,"));
    }

    #[test]
    fn collinear_sum_vanishes() {
        let line: Vec<Point2> = (0..50).map(|i| Point2::new(i as f64 / 64.0, i as f64 / 64.0)).collect();
        let report = beta_squared_sum(&line, 0..=5).unwrap();
        assert_eq!(report.cumulative, 0.0);
        let bnv = bnv_sum(&line, 1.0, 0..=5, 0.01).unwrap();
        assert!(bnv.iter().all(|l| l.count == 0));
        assert!(beta_squared_sum(&line, 3..=2).is_err());
    }

    #[test]
    fn grid_matches_direct_filter() {
        let s = schedule(&rat(3, 4), 1, Variant::Corrected).unwrap();
        let e = side_exponents(&s, None).unwrap();
        let pts = corners(&e, 2, false, DEFAULT_BUDGET).unwrap();
        let report = beta_squared_sum(&pts, 2..=4).unwrap();
        for r in &report.records {
            assert_eq!(*r, beta_of(&pts, r.square));
        }
    }

    #[test]
    fn dyadic_scales() {
        let e = exps();
        assert_eq!(dyadic_scale_for(&e, 1).unwrap(), 8);
        assert_eq!(dyadic_scale_for(&e, 2).unwrap(), 352);
        assert_eq!(dyadic_scale_for(&e, 3).unwrap(), 35198);
        for n in 1..=3 {
            assert!(dyadic_scale_check(&e, n).unwrap());
        }
        assert!(dyadic_scale_for(&e, 4).is_err());
    }

    #[test]
    fn analytic_bound_window() {
        let e = exps();
        let b2 = cantor_beta_bound(&e, 2).unwrap();
        assert_eq!(b2.exponent, rat(-1, 2));
        assert_eq!(b2.value, 1.0 / 1152.0);
        assert!(b2.in_window);
        let b3 = cantor_beta_bound(&e, 3).unwrap();
        assert!(b3.in_window);
        // the clamped first stage overshoots the window
        assert!(!cantor_beta_bound(&e, 1).unwrap().in_window);
    }

    #[test]
    fn bnv_unit_corners() {
        let levels = bnv_sum(&unit_corners(), 1.0, 0..=0, 0.2).unwrap();
        assert!(levels[0].count >= 1);
        assert!(bnv_sum(&unit_corners(), 1.0, 0..=0, 0.0).is_err());
    }
}
