//! Rational scalars.
//!
//! `Rat` is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator; zero is always `0/1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `num/den` reduced. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact square root of a non-negative rational, if it is a rational square.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rat::zero());
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(Rat::new(n, d))
}

fn int_sqrt(v: &BigInt) -> Option<BigInt> {
    let s = v.sqrt();
    if &(&s * &s) == v {
        Some(s)
    } else {
        None
    }
}

/// Sign as -1, 0 or 1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_zero() {
        let r = rat(6, -4);
        assert_eq!(r, rat(-3, 2));
        assert!(r.denom().is_positive());
        let z = rat(0, 7);
        assert_eq!(z.denom(), &BigInt::from(1));
    }

    #[test]
    fn square_roots() {
        assert_eq!(rat_sqrt(&rat(9, 16)), Some(rat(3, 4)));
        assert_eq!(rat_sqrt(&rat(2, 1)), None);
        assert_eq!(rat_sqrt(&rat(-1, 1)), None);
        assert_eq!(rat_sqrt(&Rat::zero()), Some(Rat::zero()));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rat("-2/3"), Some(rat(-2, 3)));
        assert_eq!(parse_rat("5"), Some(int(5)));
        assert_eq!(parse_rat("1/0"), None);
    }
}
