//! Arbitrary precision rationals and their text form.
//!
//! Rationals cross the wire as decimal-free integer strings ("3/4", "-1",
//! "0"), never as floats.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for small literal rationals in tests and constructors.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator {den:?}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(p, q))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when `r` lies in `(0, 1)` exclusive.
pub fn strictly_between_zero_and_one(r: &Rational) -> bool {
    r.is_positive() && r < &Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "-1", "3/4", "-7/2", "10/5"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rational(&parse_rational("10/5").unwrap()), "2");
    }

    #[test]
    fn rejects_zero_denominator_and_junk() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.5").is_err());
    }
}
