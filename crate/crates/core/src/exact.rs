//! Exact rational values used for coordinates and distance keys.
//!
//! Coordinates are stored as [`BigRational`]. Distance keys (values of
//! `2 cosh d`) are kept in a canonical small/big form: anything whose reduced
//! numerator and denominator fit in `i128` is stored inline, so equality and
//! hashing are structural and cheap on the hot path.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Exact value of a finite `f64`.
pub fn from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub fn to_f64(r: &Rational) -> f64 {
    // `ToPrimitive` on BigRational handles huge numerators/denominators
    // without overflowing to inf/inf.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a terminating decimal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Number(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{whole}{frac}");
    let mut num =
        BigInt::from_str(if joined.is_empty() { "0" } else { &joined }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// A canonical exact rational key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactKey {
    /// Reduced, denominator positive.
    Small { num: i128, den: i128 },
    /// Only used when the reduced value does not fit in `i128`.
    Big(BigRational),
}

impl ExactKey {
    /// Builds a key from a (not necessarily reduced) fraction. Returns `None`
    /// if `den == 0`.
    pub fn from_parts(num: i128, den: i128) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            // i128::MIN cannot appear here after dividing by a gcd >= 1 unless
            // the inputs were MIN themselves; fall back to big arithmetic then.
            match (n.checked_neg(), d.checked_neg()) {
                (Some(nn), Some(dd)) => {
                    n = nn;
                    d = dd;
                }
                _ => {
                    return Some(Self::from_big(Rational::new(
                        BigInt::from(num),
                        BigInt::from(den),
                    )))
                }
            }
        }
        Some(ExactKey::Small { num: n, den: d })
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(num), Some(den)) => ExactKey::Small { num, den },
            _ => ExactKey::Big(r),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            ExactKey::Small { num, den } => {
                Rational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            ExactKey::Big(r) => r.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactKey::Small { num, den } => {
                let (n, d) = (*num as f64, *den as f64);
                if n.is_finite() && d.is_finite() && d != 0.0 && n.abs() < 1e300 {
                    n / d
                } else {
                    to_f64(&self.to_big())
                }
            }
            ExactKey::Big(r) => to_f64(r),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            ExactKey::Small { num, .. } => *num > 0,
            ExactKey::Big(r) => r.is_positive(),
        }
    }

    /// A total order that agrees with equality but not with numeric order.
    /// Cheap; used for grouping large key collections.
    pub fn structural_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactKey::Small { num: a, den: b }, ExactKey::Small { num: c, den: d }) => {
                (a, b).cmp(&(c, d))
            }
            (ExactKey::Small { .. }, ExactKey::Big(_)) => Ordering::Less,
            (ExactKey::Big(_), ExactKey::Small { .. }) => Ordering::Greater,
            (ExactKey::Big(x), ExactKey::Big(y)) => {
                (x.numer(), x.denom()).cmp(&(y.numer(), y.denom()))
            }
        }
    }
}

impl Ord for ExactKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactKey::Small { num: a, den: b }, ExactKey::Small { num: c, den: d }) => {
                // Denominators are positive, so compare a*d with c*b.
                match (a.checked_mul(*d), c.checked_mul(*b)) {
                    (Some(x), Some(y)) => x.cmp(&y),
                    _ => self.to_big().cmp(&other.to_big()),
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for ExactKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExactKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactKey::Small { num, den } if *den == 1 => write!(f, "{num}"),
            ExactKey::Small { num, den } => write!(f, "{num}/{den}"),
            ExactKey::Big(r) => f.write_str(&format_rational(r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rational("-0.1").unwrap(), rat(-1, 10));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("2e3").unwrap(), int(2000));
        assert_eq!(parse_rational("15e-1").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn keys_are_canonical() {
        let a = ExactKey::from_parts(6, 8).unwrap();
        let b = ExactKey::from_parts(-3, -4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, ExactKey::from_big(rat(3, 4)));
        assert!(ExactKey::from_parts(1, 0).is_none());
    }

    #[test]
    fn numeric_order_survives_large_values() {
        let big = ExactKey::from_parts(i128::MAX - 1, 3).unwrap();
        let small = ExactKey::from_parts(5, 2).unwrap();
        assert!(small < big);
        let huge = ExactKey::from_big(Rational::from_integer(BigInt::from(i128::MAX) * 4));
        assert!(matches!(huge, ExactKey::Big(_)));
        assert!(big < huge);
    }
}
