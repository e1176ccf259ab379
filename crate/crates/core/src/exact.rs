//! Exact rational helpers and certified enclosures of `log_4(n)`.
//!
//! Quantities of the form `q + c * log_4(n)` with rational `q`, `c` appear in
//! every scale-schedule ceiling. When `n` is a power of two the logarithm is
//! rational and everything is exact; otherwise the value is irrational and
//! a rigorous interval enclosure is refined until it decides the question.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Starting precision for logarithm enclosures, in bits.
pub const INITIAL_BITS: u32 = 64;

/// Default precision ceiling for logarithm enclosures, in bits.
pub const DEFAULT_MAX_BITS: u32 = 1 << 14;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ceil(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parse `"p/q"`, an integer, or a plain decimal such as `"0.75"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{whole}{frac}0").parse().map_err(|_| bad())?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32 + 1);
    let q = BigRational::new(digits, scale);
    Ok(if neg { -q } else { q })
}

/// `log_2(n)` if `n` is a power of two.
pub fn exact_log2(n: u64) -> Option<u32> {
    (n > 0 && n.is_power_of_two()).then(|| n.trailing_zeros())
}

/// Rigorous enclosure `lo <= log_2(n) <= hi` with `hi - lo <= 2^-bits`.
///
/// Repeated squaring of the mantissa in `[1, 2)` yields one binary digit of
/// the logarithm per step. Running the recurrence once with every rounding
/// downward and once upward gives a lower and an upper digit string.
pub fn log2_enclosure(n: u64, bits: u32) -> (BigRational, BigRational) {
    assert!(n >= 1, "log of zero");
    let m = 63 - n.leading_zeros();
    if let Some(e) = exact_log2(n) {
        let v = int(e as i64);
        return (v.clone(), v);
    }
    let work = bits + 32;
    let one = BigUint::one() << work;
    let two = BigUint::one() << (work + 1);
    let start = (BigUint::from(n) << work) >> m;
    let (mut lo, mut hi) = (start.clone(), start);
    let (mut dlo, mut dhi) = (BigUint::zero(), BigUint::zero());
    for _ in 0..bits {
        lo = (&lo * &lo) >> work;
        hi = (&hi * &hi + &one - 1u32) >> work;
        dlo <<= 1;
        dhi <<= 1;
        if lo >= two {
            lo >>= 1;
            dlo += 1u32;
        }
        if hi >= two {
            hi = (&hi + 1u32) >> 1;
            dhi += 1u32;
        }
    }
    let denom = BigInt::one() << bits;
    let base = int(m as i64);
    let lo_frac = BigRational::new(BigInt::from(dlo), denom.clone());
    let hi_frac = BigRational::new(BigInt::from(dhi) + 1, denom);
    (&base + lo_frac, base + hi_frac)
}

/// A real number `rational + coeff * log_4(arg)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRational {
    pub rational: BigRational,
    pub coeff: BigRational,
    pub arg: u64,
}

impl LogRational {
    pub fn new(rational: BigRational, coeff: BigRational, arg: u64) -> Self {
        assert!(arg >= 1, "log_4 argument must be positive");
        LogRational {
            rational,
            coeff,
            arg,
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        LogRational::new(q, BigRational::zero(), 1)
    }

    /// The exact value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeff.is_zero() {
            return Some(self.rational.clone());
        }
        exact_log2(self.arg).map(|e| &self.rational + &self.coeff * rat(e as i64, 2))
    }

    /// Enclosure at the given precision; exact when the value is rational.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        if let Some(v) = self.as_rational() {
            return (v.clone(), v);
        }
        let (l2lo, l2hi) = log2_enclosure(self.arg, bits);
        let half = rat(1, 2);
        let (a, b) = (&self.coeff * &l2lo * &half, &self.coeff * &l2hi * &half);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        (&self.rational + a, &self.rational + b)
    }

    /// Smallest integer `>= self`, refining precision up to `max_bits`.
    pub fn ceil(&self, max_bits: u32) -> Result<BigInt> {
        if let Some(v) = self.as_rational() {
            return Ok(ceil(&v));
        }
        let mut bits = INITIAL_BITS.min(max_bits);
        loop {
            let (lo, hi) = self.enclosure(bits);
            // irrational, so never an integer: ceilings of the two ends agree
            // once the enclosure avoids every integer
            if ceil(&lo) == ceil(&hi) && !lo.is_integer() {
                return Ok(ceil(&lo));
            }
            if bits >= max_bits {
                return Err(Error::PrecisionExhausted { bits });
            }
            bits = (bits * 2).min(max_bits);
        }
    }

    /// Certified comparison with a rational.
    pub fn cmp_rational(&self, other: &BigRational, max_bits: u32) -> Result<Ordering> {
        if let Some(v) = self.as_rational() {
            return Ok(v.cmp(other));
        }
        let mut bits = INITIAL_BITS.min(max_bits);
        loop {
            let (lo, hi) = self.enclosure(bits);
            if &hi < other {
                return Ok(Ordering::Less);
            }
            if &lo > other {
                return Ok(Ordering::Greater);
            }
            if bits >= max_bits {
                return Err(Error::PrecisionExhausted { bits });
            }
            bits = (bits * 2).min(max_bits);
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.rational) + to_f64(&self.coeff) * (self.arg as f64).log2() / 2.0
    }
}

impl std::ops::Sub<&BigRational> for LogRational {
    type Output = LogRational;
    fn sub(mut self, rhs: &BigRational) -> LogRational {
        self.rational -= rhs;
        self
    }
}

/// `4^q` as an `f64` (may under- or overflow for extreme exponents).
pub fn pow4_f64(q: &BigRational) -> f64 {
    (2.0 * to_f64(q)).exp2()
}

/// `a` reduced into lowest terms as `"p/q"` (or `"p"` for integers).
pub fn format_rational(q: &BigRational) -> String {
    let g = q.numer().gcd(q.denom());
    let (p, d) = (q.numer() / &g, q.denom() / &g);
    if d.is_one() {
        p.to_string()
    } else {
        format!("{p}/{d}")
    }
}
