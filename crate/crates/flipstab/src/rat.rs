//! Arbitrary-precision integers and reduced rationals used everywhere in
//! the crate, plus the "p/q" textual form of the external interfaces.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Parses "p/q", "p" or a plain integer literal into a reduced rational.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<Int, Error> {
        t.trim()
            .parse::<Int>()
            .map_err(|_| Error::Other(format!("cannot parse integer `{t}`")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Other(format!("zero denominator in `{s}`")));
            }
            Ok(Rat::new(num, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Formats a rational as "p" or "p/q" with a positive denominator.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn sign(r: &Rat) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(rs: &[Rat]) -> Int {
    let mut d = Int::one();
    for r in rs {
        d = num::integer::lcm(d, r.denom().clone());
    }
    d
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rat("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("5").unwrap(), rat_int(5));
        assert_eq!(parse_rat("4/-6").unwrap(), rat(-2, 3));
        assert_eq!(format_rat(&rat(-3, 4)), "-3/4");
        assert_eq!(format_rat(&rat(8, 4)), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let d = common_denominator(&[rat(1, 4), rat(5, 6), rat_int(2)]);
        assert_eq!(d, int(12));
    }
}
