//! Cantor-type sets built from alternating scale phases.
//!
//! The unit square is replaced, generation by generation, by its four corner
//! squares. Side lengths are `ell_k = 4^{-e_k}` with rational exponents
//! `e_k`. During a "gamma phase" `k_{2n} <= k < k_{2n+1}` the exponent grows
//! by `gamma`; during an "n phase" `k_{2n-1} <= k < k_{2n}` it grows by `n`.
//! The primed family uses `e'_k = (delta / gamma) e_k`.
//!
//! All exponent algebra is exact. Coordinates are only produced when corners
//! are rendered, and no inequality is decided on coordinates.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, format_rational, int, parse_rational, rat, LogRational};
use crate::geometry::{dist, Point2};

/// Default limit on generated point counts.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Sign convention for the `log_4(n)` term in `k_{2n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `+ log_4(n)`.
    Printed,
    /// `- log_4(n)`; keeps `4^{k_{2n+1}} ell_{k_{2n+1}}` of order `1/n`.
    Corrected,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Variant::Printed),
            "corrected" => Ok(Variant::Corrected),
            other => Err(Error::Parse(format!(
                "unknown variant {other:?} (expected printed or corrected)"
            ))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Printed => "printed",
            Variant::Corrected => "corrected",
        })
    }
}

/// Exact enclosure of a ceiling remainder `ceil(x) - x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Remainder {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Remainder {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSchedule {
    pub gamma: BigRational,
    pub stages: usize,
    pub variant: Variant,
    /// `k_0, ..., k_{2M+1}` after clamping.
    pub ks: Vec<u64>,
    /// Values of the recursion before clamping.
    pub raw: Vec<u64>,
    pub clamped: Vec<bool>,
    pub thetas: Vec<Remainder>,
    /// `eps_n = (1 - gamma) - (n - gamma) k_{2n} / k_{2n+1}` for `n = 1..=M`.
    pub eps_diagnostics: Vec<BigRational>,
}

impl ScaleSchedule {
    pub fn k(&self, m: usize) -> u64 {
        self.ks[m]
    }

    pub fn clamp_indices(&self) -> Vec<usize> {
        self.clamped
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect()
    }
}

fn check_gamma(gamma: &BigRational) -> Result<()> {
    if *gamma <= rat(1, 2) || *gamma >= int(1) {
        return Err(Error::InvalidParameter(format!(
            "gamma must satisfy 1/2 < gamma < 1, got {}",
            format_rational(gamma)
        )));
    }
    Ok(())
}

fn to_u64(v: &BigInt) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| Error::InvalidParameter(format!("schedule entry {v} out of range")))
}

/// Compute `k_0..k_{2M+1}`.
///
/// `k_0 = 0`, `k_1 = 1`, `k_{2n} = ceil(n k_{2n-1} / (1 - gamma))` and
/// `k_{2n+1} = ceil((S_n -+ log_4 n) / (1 - gamma))` with
/// `S_n = sum_{i=1}^{2n} (-1)^i (ceil(i/2) - gamma) k_i`. Any entry that
/// fails to exceed its predecessor is raised to predecessor + 1 and flagged.
pub fn schedule(gamma: &BigRational, stages: usize, variant: Variant) -> Result<ScaleSchedule> {
    schedule_with_precision(gamma, stages, variant, exact::DEFAULT_MAX_BITS)
}

pub fn schedule_with_precision(
    gamma: &BigRational,
    stages: usize,
    variant: Variant,
    max_bits: u32,
) -> Result<ScaleSchedule> {
    check_gamma(gamma)?;
    if stages < 1 {
        return Err(Error::InvalidParameter("at least one stage is required".into()));
    }
    let one_minus = int(1) - gamma;
    let mut ks: Vec<u64> = vec![0, 1];
    let mut raw: Vec<u64> = vec![0, 1];
    let mut clamped = vec![false, false];
    let zero = Remainder {
        lo: BigRational::zero(),
        hi: BigRational::zero(),
    };
    let mut thetas = vec![zero.clone(), zero];

    let mut push = |value: BigInt, theta: Remainder, ks: &mut Vec<u64>| -> Result<()> {
        let v = to_u64(&value)?;
        let prev = *ks.last().expect("seeded");
        raw.push(v);
        thetas.push(theta);
        if v <= prev {
            clamped.push(true);
            ks.push(prev + 1);
        } else {
            clamped.push(false);
            ks.push(v);
        }
        Ok(())
    };

    for n in 1..=stages {
        let x = int(n as i64) * int(ks[2 * n - 1] as i64) / &one_minus;
        let c = exact::ceil(&x);
        let theta = BigRational::from_integer(c.clone()) - &x;
        push(
            c,
            Remainder {
                lo: theta.clone(),
                hi: theta,
            },
            &mut ks,
        )?;

        let s: BigRational = (1..=2 * n)
            .map(|i| {
                let sign = if i % 2 == 0 { int(1) } else { int(-1) };
                sign * (int(i.div_ceil(2) as i64) - gamma) * int(ks[i] as i64)
            })
            .sum();
        let coeff = match variant {
            Variant::Printed => int(1),
            Variant::Corrected => int(-1),
        } / &one_minus;
        let value = LogRational::new(&s / &one_minus, coeff, n as u64);
        let c = value.ceil(max_bits)?;
        let cq = BigRational::from_integer(c.clone());
        let theta = match value.as_rational() {
            Some(v) => {
                let t = &cq - v;
                Remainder { lo: t.clone(), hi: t }
            }
            None => {
                let bits = 128.min(max_bits);
                let (lo, hi) = value.enclosure(bits);
                Remainder {
                    lo: &cq - hi,
                    hi: &cq - lo,
                }
            }
        };
        push(c, theta, &mut ks)?;
    }

    let eps_diagnostics = (1..=stages)
        .map(|n| {
            &one_minus
                - (int(n as i64) - gamma) * rat(ks[2 * n] as i64, ks[2 * n + 1] as i64)
        })
        .collect();
    Ok(ScaleSchedule {
        gamma: gamma.clone(),
        stages,
        variant,
        ks,
        raw,
        clamped,
        thetas,
        eps_diagnostics,
    })
}

/// `|(n/2) k_n / k_{n+1} - (1 - gamma)|`, the drift of consecutive stage
/// ratios from their limiting value, for `1 <= n < 2M + 1`.
pub fn ratio_deviation(s: &ScaleSchedule, n: usize) -> Result<BigRational> {
    if n < 1 || n + 1 >= s.ks.len() {
        return Err(Error::InvalidParameter(format!(
            "index {n} outside 1..={}",
            s.ks.len() - 2
        )));
    }
    let v = rat(n as i64, 2) * rat(s.ks[n] as i64, s.ks[n + 1] as i64) - (int(1) - &s.gamma);
    Ok(v.abs())
}

/// Side-length exponents `e_k` with `ell_k = 4^{-e_k}`.
///
/// Only the exponents at the phase breakpoints `k_m` are stored; values in
/// between follow from the constant per-phase increment.
#[derive(Debug, Clone, PartialEq)]
pub struct SideExponents {
    pub gamma: BigRational,
    pub delta: Option<BigRational>,
    pub ks: Vec<u64>,
    breaks: Vec<BigRational>,
}

/// Exponent increment on the segment `[k_m, k_{m+1})`.
fn phase_increment(gamma: &BigRational, m: usize) -> BigRational {
    if m % 2 == 0 {
        gamma.clone()
    } else {
        int(m.div_ceil(2) as i64)
    }
}

pub fn side_exponents(s: &ScaleSchedule, delta: Option<&BigRational>) -> Result<SideExponents> {
    if let Some(d) = delta {
        if *d <= rat(1, 2) || *d > s.gamma {
            return Err(Error::InvalidParameter(format!(
                "delta must satisfy 1/2 < delta <= gamma, got {}",
                format_rational(d)
            )));
        }
    }
    let mut breaks = Vec::with_capacity(s.ks.len());
    breaks.push(BigRational::zero());
    for m in 0..s.ks.len() - 1 {
        let steps = int((s.ks[m + 1] - s.ks[m]) as i64);
        let next = &breaks[m] + steps * phase_increment(&s.gamma, m);
        breaks.push(next);
    }
    Ok(SideExponents {
        gamma: s.gamma.clone(),
        delta: delta.cloned(),
        ks: s.ks.clone(),
        breaks,
    })
}

impl SideExponents {
    pub fn max_k(&self) -> u64 {
        *self.ks.last().expect("schedule is nonempty")
    }

    /// Segment index `m` with `k_m <= k < k_{m+1}`.
    fn segment(&self, k: u64) -> usize {
        self.ks.partition_point(|&km| km <= k) - 1
    }

    pub fn try_e(&self, k: u64) -> Option<BigRational> {
        if k > self.max_k() {
            return None;
        }
        let m = self.segment(k);
        if m + 1 == self.ks.len() {
            return Some(self.breaks[m].clone());
        }
        Some(&self.breaks[m] + int((k - self.ks[m]) as i64) * phase_increment(&self.gamma, m))
    }

    /// Exponent `e_k`.
    ///
    /// # Panics
    ///
    /// If `k` exceeds the last scheduled stage.
    pub fn e(&self, k: u64) -> BigRational {
        self.try_e(k)
            .unwrap_or_else(|| panic!("k = {k} beyond the schedule (max {})", self.max_k()))
    }

    /// Primed exponent `(delta / gamma) e_k`.
    ///
    /// # Panics
    ///
    /// If no `delta` was supplied or `k` is out of range.
    pub fn e_primed(&self, k: u64) -> BigRational {
        let delta = self.delta.as_ref().expect("primed exponents need delta");
        delta / &self.gamma * self.e(k)
    }

    pub fn exponent(&self, k: u64, primed: bool) -> BigRational {
        if primed {
            self.e_primed(k)
        } else {
            self.e(k)
        }
    }

    /// `e_{k+1} - e_k`.
    pub fn increment(&self, k: u64) -> BigRational {
        self.e(k + 1) - self.e(k)
    }

    /// Side length `ell_k` (or `ell'_k`) as a float.
    pub fn side(&self, k: u64, primed: bool) -> f64 {
        exact::pow4_f64(&-self.exponent(k, primed))
    }

    /// Breakpoint exponents `(k_m, e_{k_m})`.
    pub fn breakpoints(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.ks.iter().copied().zip(&self.breaks)
    }
}

/// Corner choices per generation: 0 = lower-left, 1 = lower-right,
/// 2 = upper-left, 3 = upper-right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SquareAddress(pub Vec<u8>);

impl SquareAddress {
    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for SquareAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for SquareAddress {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0'..='3' => Ok(c as u8 - b'0'),
                _ => Err(Error::Parse(format!("bad address digit {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(SquareAddress)
    }
}

fn offset(digit: u8, step: f64) -> (f64, f64) {
    (
        if digit & 1 == 1 { step } else { 0.0 },
        if digit & 2 == 2 { step } else { 0.0 },
    )
}

/// Side lengths `ell_0..=ell_depth` and per-generation child offsets
/// `ell_j - ell_{j+1}`.
fn sides_and_gaps(e: &SideExponents, depth: usize, primed: bool) -> (Vec<f64>, Vec<f64>) {
    let sides: Vec<f64> = (0..=depth as u64).map(|k| e.side(k, primed)).collect();
    let gaps = sides.windows(2).map(|w| w[0] - w[1]).collect();
    (sides, gaps)
}

/// Lower-left corner of the square at `address`.
pub fn lower_left(e: &SideExponents, address: &SquareAddress, primed: bool) -> Point2 {
    let (_, gaps) = sides_and_gaps(e, address.depth(), primed);
    let (mut x, mut y) = (0.0, 0.0);
    for (digit, gap) in address.0.iter().zip(&gaps) {
        let (dx, dy) = offset(*digit, *gap);
        x += dx;
        y += dy;
    }
    Point2::new(x, y)
}

fn check_depth(e: &SideExponents, depth: usize, primed: bool, budget: u64) -> Result<()> {
    if primed && e.delta.is_none() {
        return Err(Error::InvalidParameter("primed corners need delta".into()));
    }
    if depth as u64 > e.max_k() {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} beyond the schedule (max {})",
            e.max_k()
        )));
    }
    let requested = 1u128.checked_shl(2 * (depth as u32 + 1)).unwrap_or(u128::MAX);
    if depth > 60 || requested > budget as u128 {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    Ok(())
}

/// Lower-left corners of every square of generation `depth`, in address
/// order.
pub fn square_origins(
    e: &SideExponents,
    depth: usize,
    primed: bool,
    budget: u64,
) -> Result<Vec<Point2>> {
    check_depth(e, depth, primed, budget)?;
    let (_, gaps) = sides_and_gaps(e, depth, primed);
    let mut origins = vec![Point2::new(0.0, 0.0)];
    for gap in &gaps {
        origins = origins
            .iter()
            .flat_map(|p| {
                (0..4u8).map(move |digit| {
                    let (dx, dy) = offset(digit, *gap);
                    Point2::new(p.x + dx, p.y + dy)
                })
            })
            .collect();
    }
    Ok(origins)
}

/// All `4^{depth+1}` corners of the squares of generation `depth` (primed
/// family when `primed`). Square `i` in address order contributes entries
/// `4i..4i+4` in corner-digit order.
pub fn corners(e: &SideExponents, depth: usize, primed: bool, budget: u64) -> Result<Vec<Point2>> {
    let origins = square_origins(e, depth, primed, budget)?;
    let side = e.side(depth as u64, primed);
    Ok(origins
        .iter()
        .flat_map(|p| {
            (0..4u8).map(move |digit| {
                let (dx, dy) = offset(digit, side);
                Point2::new(p.x + dx, p.y + dy)
            })
        })
        .collect())
}

/// `count` distinct uniformly random addresses of the given depth, or every
/// address (in lexicographic order) when `count >= 4^depth`.
pub fn sample_addresses(depth: usize, count: usize, seed: u64) -> Vec<SquareAddress> {
    let total = 1u128.checked_shl(2 * depth as u32).filter(|_| depth < 64);
    if let Some(total) = total {
        if count as u128 >= total {
            return (0..total as u64)
                .map(|mut code| {
                    let mut digits = vec![0u8; depth];
                    for slot in digits.iter_mut().rev() {
                        *slot = (code & 3) as u8;
                        code >>= 2;
                    }
                    SquareAddress(digits)
                })
                .collect();
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = SquareAddress((0..depth).map(|_| rng.gen_range(0..4u8)).collect());
        if seen.insert(a.clone()) {
            out.push(a);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCounts {
    pub k: u64,
    /// `N(K, ell_k) = 4^k`.
    pub n_exact: BigUint,
    /// Exponent of `4^k ell_k = 4^{k - e_k}`.
    pub dini_exponent: BigRational,
    /// `k / e_k`; `None` at `k = 0`.
    pub lower_box_ratio: Option<BigRational>,
}

pub fn analytic_counts(e: &SideExponents, k: u64) -> Result<AnalyticCounts> {
    let ek = e.try_e(k).ok_or_else(|| {
        Error::InvalidParameter(format!("k = {k} beyond the schedule (max {})", e.max_k()))
    })?;
    Ok(AnalyticCounts {
        k,
        n_exact: BigUint::one() << (2 * k as usize),
        dini_exponent: int(k as i64) - &ek,
        lower_box_ratio: (!ek.is_zero()).then(|| int(k as i64) / &ek),
    })
}

/// Exponents (base 4) of the side-length bounds around `k_{2n}` and
/// `k_{2n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SidelengthBounds {
    pub n: usize,
    pub even_lower: BigRational,
    pub even_actual: BigRational,
    pub even_upper: BigRational,
    pub odd_lower: BigRational,
    pub odd_actual: BigRational,
    pub odd_upper: BigRational,
}

impl SidelengthBounds {
    pub fn holds(&self) -> bool {
        self.even_lower <= self.even_actual
            && self.even_actual <= self.even_upper
            && self.odd_lower <= self.odd_actual
            && self.odd_actual <= self.odd_upper
    }
}

fn check_stage(e: &SideExponents, n: usize) -> Result<()> {
    if n < 1 || 2 * n + 1 >= e.ks.len() {
        return Err(Error::InvalidParameter(format!(
            "stage {n} outside 1..={}",
            (e.ks.len() - 2) / 2
        )));
    }
    Ok(())
}

pub fn sidelength_bounds(e: &SideExponents, n: usize) -> Result<SidelengthBounds> {
    check_stage(e, n)?;
    let g = &e.gamma;
    let nn = int(n as i64);
    let k = |m: usize| int(e.ks[m] as i64);
    Ok(SidelengthBounds {
        n,
        even_lower: (g - &nn + int(1)) * k(2 * n - 2) + (&nn - g) * k(2 * n - 1) - &nn * k(2 * n),
        even_actual: -e.e(e.ks[2 * n]),
        even_upper: (&nn - g) * k(2 * n - 1) - &nn * k(2 * n),
        odd_lower: (g - &nn) * k(2 * n) - g * k(2 * n + 1),
        odd_actual: -e.e(e.ks[2 * n + 1]),
        odd_upper: (&nn - g) * k(2 * n - 1) + (g - &nn) * k(2 * n) - g * k(2 * n + 1),
    })
}

/// Whether all four side-length bounds hold at stage `n` (exact).
pub fn sidelength_bounds_check(e: &SideExponents, n: usize) -> Result<bool> {
    Ok(sidelength_bounds(e, n)?.holds())
}

/// Exponent `k_{2n} + t (n - gamma) k_{2n-1} - t n k_{2n}` of the bound
/// `H^t_{ell_{k_{2n}}}(K) <= 4^{exponent}`.
pub fn hausdorff_premeasure_bound(e: &SideExponents, n: usize, t: &BigRational) -> Result<BigRational> {
    check_stage(e, n)?;
    if !t.is_positive() {
        return Err(Error::InvalidParameter("t must be positive".into()));
    }
    let nn = int(n as i64);
    let k2n = int(e.ks[2 * n] as i64);
    let k2n1 = int(e.ks[2 * n - 1] as i64);
    Ok(&k2n + t * (&nn - &e.gamma) * k2n1 - t * nn * k2n)
}

/// `n * 4^{k_{2n+1}} * ell_{k_{2n+1}}`, the normalized length at odd stage
/// ends, with its exact window check.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedLength {
    pub n: usize,
    pub k: u64,
    /// `k - e_k`.
    pub exponent: BigRational,
    /// `log_4` of the normalized value: `exponent + log_4 n`.
    pub log4_value: LogRational,
    pub value: f64,
    /// Exact test of `1 <= value <= 4^{1 - gamma}`.
    pub in_window: bool,
}

pub fn normalized_length(e: &SideExponents, n: usize) -> Result<NormalizedLength> {
    check_stage(e, n)?;
    let k = e.ks[2 * n + 1];
    let exponent = int(k as i64) - e.e(k);
    let log4_value = LogRational::new(exponent.clone(), int(1), n as u64);
    let bits = exact::DEFAULT_MAX_BITS;
    let upper = int(1) - &e.gamma;
    let in_window = log4_value.cmp_rational(&BigRational::zero(), bits)?.is_ge()
        && log4_value.cmp_rational(&upper, bits)?.is_le();
    Ok(NormalizedLength {
        n,
        k,
        value: n as f64 * exact::pow4_f64(&exponent),
        exponent,
        log4_value,
        in_window,
    })
}

/// Corner correspondence between the primed and unprimed families.
///
/// Returns the lower-left corners of the square at `address` in `K'` and
/// in `K`.
pub fn f_map(address: &SquareAddress, e: &SideExponents) -> Result<(Point2, Point2)> {
    if e.delta.is_none() {
        return Err(Error::InvalidParameter("the correspondence needs delta".into()));
    }
    if address.depth() as u64 > e.max_k() {
        return Err(Error::InvalidParameter("address deeper than the schedule".into()));
    }
    Ok((lower_left(e, address, true), lower_left(e, address, false)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiHolderFit {
    pub depth: usize,
    /// `gamma / delta`.
    pub exponent: BigRational,
    /// Smallest `L` with `|x - y|^{gamma/delta} / L <= |F(x) - F(y)|`.
    pub l_lower_fit: f64,
    /// Smallest `L` with `|F(x) - F(y)| <= L |x - y|^{gamma/delta}`.
    pub l_upper_fit: f64,
    pub pairs: usize,
    /// `e_m = (gamma/delta) e'_m` for all `m <= depth`, checked exactly.
    pub same_square_exact: bool,
    /// Largest relative deviation of same-square corner pairs from
    /// `|F(x) - F(y)| = |x - y|^{gamma/delta}`.
    pub same_square_max_rel_err: f64,
}

/// Fit both constants of the bi-Hölder estimate for the corner
/// correspondence at generation `depth`.
///
/// Uses every corner pair when `pairs` is `None`, otherwise that many seeded
/// random pairs.
pub fn bihoelder_sample(
    e: &SideExponents,
    depth: usize,
    pairs: Option<usize>,
    seed: u64,
    budget: u64,
) -> Result<BiHolderFit> {
    let delta = e
        .delta
        .clone()
        .ok_or_else(|| Error::InvalidParameter("the correspondence needs delta".into()))?;
    let primed = corners(e, depth, true, budget)?;
    let plain = corners(e, depth, false, budget)?;
    let exponent = &e.gamma / &delta;
    let power = exact::to_f64(&exponent);

    let ratios = |a: usize, b: usize| -> Option<(f64, f64)> {
        let dx = dist(primed[a], primed[b]);
        let dy = dist(plain[a], plain[b]);
        if dx == 0.0 || dy == 0.0 {
            return None;
        }
        let px = dx.powf(power);
        Some((px / dy, dy / px))
    };
    let n = primed.len();
    let (lower, upper, used) = match pairs {
        None => (0..n)
            .into_par_iter()
            .map(|a| {
                (a + 1..n)
                    .filter_map(|b| ratios(a, b))
                    .fold((0.0f64, 0.0f64, 0usize), |acc, (l, u)| {
                        (acc.0.max(l), acc.1.max(u), acc.2 + 1)
                    })
            })
            .reduce(
                || (0.0, 0.0, 0),
                |x, y| (x.0.max(y.0), x.1.max(y.1), x.2 + y.2),
            ),
        Some(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = (0.0f64, 0.0f64, 0usize);
            for _ in 0..count {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if let Some((l, u)) = ratios(a, b) {
                    acc = (acc.0.max(l), acc.1.max(u), acc.2 + 1);
                }
            }
            acc
        }
    };

    let same_square_exact = (0..=depth as u64).all(|m| e.e(m) == &exponent * e.e_primed(m));
    let mut worst = 0.0f64;
    for sq in 0..n / 4 {
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let (i, j) = (4 * sq + a, 4 * sq + b);
            let lhs = dist(plain[i], plain[j]);
            let rhs = dist(primed[i], primed[j]).powf(power);
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    Ok(BiHolderFit {
        depth,
        exponent,
        l_lower_fit: lower,
        l_upper_fit: upper,
        pairs: used,
        same_square_exact,
        same_square_max_rel_err: worst,
    })
}

/// Serialized form of a schedule and its breakpoint exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub gamma: String,
    pub delta: Option<String>,
    pub variant: Variant,
    pub ks: Vec<u64>,
    pub clamped: Vec<bool>,
    pub e: ExponentTable,
}

/// `k -> e_k` as decimal-keyed strings, serialized in ascending `k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExponentTable(pub BTreeMap<u64, String>);

impl Serialize for ExponentTable {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ExponentTable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(de)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<u64>()
                    .map(|k| (k, v))
                    .map_err(serde::de::Error::custom)
            })
            .collect::<std::result::Result<BTreeMap<_, _>, _>>()
            .map(ExponentTable)
    }
}

impl ScheduleDoc {
    pub fn new(s: &ScaleSchedule, e: &SideExponents) -> Self {
        ScheduleDoc {
            gamma: format_rational(&s.gamma),
            delta: e.delta.as_ref().map(format_rational),
            variant: s.variant,
            ks: s.ks.clone(),
            clamped: s.clamped.clone(),
            e: ExponentTable(
                e.breakpoints()
                    .map(|(k, v)| (k, format_rational(v)))
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ScheduleDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        parse_rational(&doc.gamma)?;
        if let Some(d) = &doc.delta {
            parse_rational(d)?;
        }
        for v in doc.e.0.values() {
            parse_rational(v)?;
        }
        Ok(doc)
    }

    /// Recompute the schedule this document describes.
    pub fn rebuild(&self) -> Result<(ScaleSchedule, SideExponents)> {
        let gamma = parse_rational(&self.gamma)?;
        let stages = self.ks.len().saturating_sub(2) / 2;
        let s = schedule(&gamma, stages, self.variant)?;
        let delta = self.delta.as_deref().map(parse_rational).transpose()?;
        let e = side_exponents(&s, delta.as_ref())?;
        Ok((s, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g34() -> BigRational {
        rat(3, 4)
    }

    fn corrected() -> (ScaleSchedule, SideExponents) {
        let s = schedule(&g34(), 3, Variant::Corrected).unwrap();
        let e = side_exponents(&s, Some(&rat(5, 8))).unwrap();
        (s, e)
    }

    #[test]
    fn corrected_schedule_three_quarters() {
        let (s, _) = corrected();
        assert_eq!(s.ks, vec![0, 1, 4, 5, 40, 176, 2112, 17599]);
        assert_eq!(s.clamp_indices(), vec![3]);
        assert_eq!(s.raw[3], 3);
        assert!(s.thetas[5].is_exact());
        assert!(!s.thetas[7].is_exact());
    }

    #[test]
    fn printed_schedule_three_quarters() {
        let s = schedule(&g34(), 2, Variant::Printed).unwrap();
        assert_eq!(s.raw[3], 3);
        assert_eq!(s.ks[3], 5);
        assert_eq!(s.ks[5], 180);
    }

    #[test]
    fn second_entry_is_ceiling_of_reciprocal() {
        for (p, q) in [(3, 4), (2, 3), (5, 8), (9, 10), (51, 100)] {
            let g = rat(p, q);
            let s = schedule(&g, 1, Variant::Corrected).unwrap();
            let expected = exact::ceil(&(int(1) / (int(1) - &g)));
            assert_eq!(BigInt::from(s.ks[2]), expected);
        }
    }

    #[test]
    fn ratio_deviations() {
        let (s, _) = corrected();
        let got: Vec<BigRational> = (1..=6).map(|n| ratio_deviation(&s, n).unwrap()).collect();
        let want = [rat(1, 8), rat(11, 20), rat(1, 16), rat(9, 44), rat(1, 24), rat(7745, 70396)];
        assert_eq!(got, want);
        assert!(ratio_deviation(&s, 7).is_err());
    }

    #[test]
    fn eps_diagnostics_values() {
        let (s, _) = corrected();
        assert_eq!(s.eps_diagnostics, vec![rat(1, 20), rat(-3, 88), rat(-1409, 70396)]);
    }

    #[test]
    fn gamma_range_is_enforced() {
        for (p, q) in [(1, 2), (1, 1), (1, 4), (3, 2)] {
            assert!(schedule(&rat(p, q), 2, Variant::Corrected).is_err());
        }
        assert!(schedule(&g34(), 0, Variant::Corrected).is_err());
    }

    #[test]
    fn exponent_examples() {
        let (_, e) = corrected();
        assert_eq!(e.e(0), int(0));
        assert_eq!(e.e(1), g34());
        assert_eq!(e.e(4), rat(15, 4));
        assert_eq!(e.e(5), rat(9, 2));
        assert_eq!(e.e(40), rat(149, 2));
        assert_eq!(e.e(176), rat(353, 2));
        assert_eq!(e.e_primed(4), rat(25, 8));
        assert!(e.try_e(17600).is_none());
    }

    #[test]
    fn corners_depth_zero_and_one() {
        let (_, e) = corrected();
        let c0 = corners(&e, 0, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            c0,
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
                Point2::new(1.0, 1.0)
            ]
        );
        let c1 = corners(&e, 1, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(c1.len(), 16);
        let l1 = 4f64.powf(-0.75);
        assert_eq!(c1[0], Point2::new(0.0, 0.0));
        assert!((c1[3].x - l1).abs() < 1e-15 && (c1[3].y - l1).abs() < 1e-15);
    }

    #[test]
    fn corner_budget() {
        let (_, e) = corrected();
        let err = corners(&e, 10, false, 1 << 20).unwrap_err();
        assert!(err.to_string().contains("depth too deep; use sample_addresses"));
        assert!(corners(&e, 9, false, 1 << 20).is_ok());
        let plain = side_exponents(&schedule(&g34(), 1, Variant::Corrected).unwrap(), None).unwrap();
        assert!(corners(&plain, 1, true, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn sampling_contract() {
        let a = sample_addresses(2, 1, 0);
        assert_eq!(a, sample_addresses(2, 1, 0));
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].depth(), 2);
        let all = sample_addresses(2, 100, 3);
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].to_string(), "00");
        assert_eq!(all[15].to_string(), "33");
        let some = sample_addresses(8, 50, 9);
        assert_eq!(some.iter().collect::<HashSet<_>>().len(), 50);
    }

    #[test]
    fn analytic_count_examples() {
        let (_, e) = corrected();
        assert_eq!(analytic_counts(&e, 2).unwrap().n_exact, BigUint::from(16u32));
        assert_eq!(analytic_counts(&e, 176).unwrap().dini_exponent, rat(-1, 2));
        assert_eq!(analytic_counts(&e, 4).unwrap().lower_box_ratio, Some(rat(16, 15)));
        assert_eq!(analytic_counts(&e, 40).unwrap().lower_box_ratio, Some(rat(80, 149)));
        let r6 = analytic_counts(&e, 2112).unwrap().lower_box_ratio.unwrap();
        assert!(r6 < rat(80, 149));
        assert_eq!(analytic_counts(&e, 0).unwrap().lower_box_ratio, None);
        assert!(analytic_counts(&e, 20_000).is_err());
    }

    #[test]
    fn sidelength_bounds_stages() {
        let (_, e) = corrected();
        for n in 1..=3 {
            assert!(sidelength_bounds_check(&e, n).unwrap(), "n = {n}");
        }
        assert!(sidelength_bounds_check(&e, 4).is_err());
        assert!(sidelength_bounds_check(&e, 0).is_err());
    }

    #[test]
    fn hausdorff_exponents() {
        let (_, e) = corrected();
        let t = int(1);
        assert_eq!(hausdorff_premeasure_bound(&e, 1, &t).unwrap(), rat(1, 4));
        assert_eq!(hausdorff_premeasure_bound(&e, 2, &t).unwrap(), rat(-135, 4));
        let seq: Vec<_> = (1..=3)
            .map(|n| hausdorff_premeasure_bound(&e, n, &t).unwrap())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
        assert!(hausdorff_premeasure_bound(&e, 1, &int(0)).is_err());
    }

    #[test]
    fn f_map_examples() {
        let (_, e) = corrected();
        let (a, b) = f_map(&SquareAddress::default(), &e).unwrap();
        assert_eq!((a, b), (Point2::new(0.0, 0.0), Point2::new(0.0, 0.0)));

        let addr: SquareAddress = "3".parse().unwrap();
        let (kp, k) = f_map(&addr, &e).unwrap();
        let gap_primed = 1.0 - 4f64.powf(-0.625);
        let gap = 1.0 - 4f64.powf(-0.75);
        assert!((kp.x - gap_primed).abs() < 1e-15 && (kp.y - gap_primed).abs() < 1e-15);
        assert!((k.x - gap).abs() < 1e-15 && (k.y - gap).abs() < 1e-15);

        let same = side_exponents(&schedule(&g34(), 2, Variant::Corrected).unwrap(), Some(&g34())).unwrap();
        let addr: SquareAddress = "0312".parse().unwrap();
        let (kp, k) = f_map(&addr, &same).unwrap();
        assert_eq!(kp, k);
    }

    #[test]
    fn identity_correspondence_fits_one() {
        let s = schedule(&g34(), 1, Variant::Corrected).unwrap();
        let e = side_exponents(&s, Some(&g34())).unwrap();
        let fit = bihoelder_sample(&e, 2, None, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(fit.exponent, int(1));
        assert_eq!(fit.l_lower_fit, 1.0);
        assert_eq!(fit.l_upper_fit, 1.0);
        assert!(fit.same_square_exact);
    }

    #[test]
    fn schedule_doc_round_trip() {
        let (s, e) = corrected();
        let doc = ScheduleDoc::new(&s, &e);
        let json = doc.to_json();
        assert!(json.starts_with(
            "{\"gamma\":\"3/4\",\"delta\":\"5/8\",\"variant\":\"corrected\",\"ks\":[0,1,4,5,40,176,2112,17599]"
        ));
        assert!(json.contains("\"e\":{\"0\":\"0\",\"1\":\"3/4\",\"4\":\"15/4\",\"5\":\"9/2\""));
        let back = ScheduleDoc::from_json(&json).unwrap();
        assert_eq!(back, doc);
        let (s2, e2) = back.rebuild().unwrap();
        assert_eq!((s2, e2), (s, e));
    }
}
