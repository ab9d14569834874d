//! Exact rational helpers: harmonic numbers and certified bounds on `ln x`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-4/3"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Decode(format!("not a rational number: {text:?}"));
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    t.parse::<BigRational>().map_err(|_| bad())
}

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: usize) -> BigRational {
    (1..=n as i64).map(|i| ratio(1, i)).fold(BigRational::zero(), |a, b| a + b)
}

/// Number of series terms used by [`ln_bounds`] unless a caller asks for more.
pub const LN_TERMS: usize = 40;

/// Rational `(lo, hi)` with `lo <= ln x <= hi`, for rational `x >= 1`.
///
/// Uses `ln x = 2 sum_{j>=0} y^(2j+1) / (2j+1)` with `y = (x-1)/(x+1)`. The
/// partial sum of `terms` terms is the lower bound; the tail is at most
/// `2 y^(2 terms + 1) / ((2 terms + 1)(1 - y^2))`, which gives the upper bound.
/// For `x <= 8` and 40 terms the gap is below `1e-8`.
pub fn ln_bounds(x: &BigRational, terms: usize) -> Result<(BigRational, BigRational)> {
    if *x < BigRational::one() {
        return Err(Error::OutOfRange("ln bounds are provided for x >= 1".into()));
    }
    if x.is_one() {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    let y = (x - BigRational::one()) / (x + BigRational::one());
    let y2 = &y * &y;
    let mut power = y.clone();
    let mut sum = BigRational::zero();
    for j in 0..terms {
        sum += &power / int(2 * j as i64 + 1);
        power *= &y2;
    }
    let lo = int(2) * &sum;
    let tail = int(2) * &power / (int(2 * terms as i64 + 1) * (BigRational::one() - &y2));
    let hi = &lo + tail;
    Ok((lo, hi))
}

/// Decimal approximation for display only.
pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1), int(1));
        assert_eq!(harmonic(2), ratio(3, 2));
        assert_eq!(harmonic(5), ratio(137, 60));
    }

    #[test]
    fn ln_bounds_bracket_float_ln() {
        for n in 1..=64i64 {
            let (lo, hi) = ln_bounds(&int(n), LN_TERMS).unwrap();
            let l = (n as f64).ln();
            assert!(to_f64(&lo) <= l + 1e-12 && l - 1e-12 <= to_f64(&hi), "n={n}");
            assert!(lo <= hi);
            if n <= 8 {
                assert!(to_f64(&(&hi - &lo)) < 1e-8);
            }
        }
    }

    #[test]
    fn harmonic_below_one_plus_ln() {
        // H_n <= 1 + ln n, certified with the lower bound on ln n.
        for n in 1..=8usize {
            let (lo, _) = ln_bounds(&int(n as i64), LN_TERMS).unwrap();
            assert!(harmonic(n) <= int(1) + lo, "n={n}");
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-4/3").unwrap(), ratio(-4, 3));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }
}
