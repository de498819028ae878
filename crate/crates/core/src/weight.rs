//! Exact vertex weights.
//!
//! Every instance carries a common denominator (`scale`); a [`Weight`] is the
//! numerator over that denominator. Sums, differences and comparisons are
//! plain integer operations, so the local-ratio subtractions and gadget
//! differences never round.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

/// Exact rational used at the I/O boundary.
pub type Rational = Ratio<i128>;

/// A weight expressed in units of the owning instance's `scale`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub i128);

impl Weight {
    pub const ZERO: Weight = Weight(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// The exact value of this weight for an instance with denominator `scale`.
    pub fn to_rational(self, scale: i128) -> Rational {
        Ratio::new(self.0, scale)
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        Weight(self.0 - rhs.0)
    }
}

impl SubAssign for Weight {
    fn sub_assign(&mut self, rhs: Weight) {
        self.0 -= rhs.0;
    }
}

impl Mul<i128> for Weight {
    type Output = Weight;
    fn mul(self, rhs: i128) -> Weight {
        Weight(self.0 * rhs)
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        iter.copied().sum()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {0:?}: expected an integer, \"p/q\" or a finite decimal")]
pub struct ParseRationalError(pub String);

/// Parses `"7"`, `"-3"`, `"5/2"` or `"1.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return Err(err());
        }
        let negative = int.starts_with('-');
        let int_part: i128 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| err())?,
        };
        let denom = 10i128.checked_pow(frac.len() as u32).ok_or_else(err)?;
        let frac_part: i128 = frac.parse().map_err(|_| err())?;
        let numer = int_part
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or_else(err)?;
        return Ok(Ratio::new(if negative { -numer } else { numer }, denom));
    }
    let r = Rational::from_str(s).map_err(|_| err())?;
    Ok(r)
}

/// Formats a rational as `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of all denominators, or `None` on overflow.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<i128> {
    let mut scale: i128 = 1;
    for r in values {
        let d = *r.denom();
        let g = scale.gcd(&d);
        scale = (scale / g).checked_mul(d)?;
        // keep headroom for sums over a few thousand vertices
        if scale > (1i128 << 80) {
            return None;
        }
    }
    Some(scale)
}

/// Converts `r` to a numerator over `scale`; `scale` must be a multiple of `r`'s denominator.
pub(crate) fn scaled(r: &Rational, scale: i128) -> Option<Weight> {
    let factor = scale / r.denom();
    r.numer().checked_mul(factor).map(Weight)
}
