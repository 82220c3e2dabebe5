//! Exact rational metrics. Values stay exact through every computation and
//! are rounded (half up) only when rendered.

use std::fmt;
use std::iter::Sum;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub BigRational);

impl Fraction {
    /// Panics when `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        Fraction(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(n: u64) -> Self {
        Fraction(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Fraction(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Arithmetic mean; `None` for an empty input.
    pub fn mean<'a, I: IntoIterator<Item = &'a Fraction>>(values: I) -> Option<Fraction> {
        let mut n = 0u64;
        let mut total = BigRational::zero();
        for v in values {
            total += &v.0;
            n += 1;
        }
        (n > 0).then(|| Fraction(total / BigRational::from_integer(BigInt::from(n))))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `decimals` digits, rounding half up.
    pub fn round_half_up(&self, decimals: u32) -> String {
        let scale = BigInt::from(10u32).pow(decimals);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        // floor(x + 1/2) == floor((2 * num + den) / (2 * den)) for den > 0
        let num: BigInt = scaled.numer() * 2 + scaled.denom();
        let den: BigInt = scaled.denom() * 2;
        let rounded = num.div_floor(&den);
        let negative = rounded < BigInt::zero();
        let magnitude = if negative { -rounded } else { rounded };
        let (int, frac) = magnitude.div_rem(&scale);
        let sign = if negative { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac:0>width$}", width = decimals as usize)
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|e| format!("{s:?}: {e}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(format!("{s:?}: zero denominator"));
                }
                Ok(Fraction(BigRational::new(parse(n)?, d)))
            }
            None => Ok(Fraction(BigRational::from_integer(parse(s)?))),
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

impl<'a> Sum<&'a Fraction> for Fraction {
    fn sum<I: Iterator<Item = &'a Fraction>>(iter: I) -> Self {
        Fraction(iter.fold(BigRational::zero(), |acc, x| acc + &x.0))
    }
}

/// Mutants killed per selected unit. `None` when no unit was selected.
pub fn crossfire_factor(covered: u64, units: &Fraction) -> Option<Fraction> {
    (!units.is_zero()).then(|| Fraction(BigRational::from_integer(BigInt::from(covered)) / &units.0))
}

/// `"36/60 (60%)"`: integer percent, half up.
pub fn killable_label(killable: u64, surviving: u64) -> String {
    let pct = if surviving == 0 {
        "0".to_string()
    } else {
        Fraction::new(killable * 100, surviving).round_half_up(0)
    };
    format!("{killable}/{surviving} ({pct}%)")
}

/// `"27.0 (1.3)"`: a count with its crossfire factor, one decimal each.
pub fn count_with_factor(count: &Fraction, factor: &Fraction) -> String {
    format!("{} ({})", count.round_half_up(1), factor.round_half_up(1))
}
