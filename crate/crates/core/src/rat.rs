//! Exact rational scalars and their text form.
//!
//! Every certified quantity in this crate is a `Rat`. Rationals are printed
//! and parsed as `p` or `p/q` with no decimal point; floating point never
//! enters a certified artifact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Integer literal as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics on a zero denominator.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Renders a rational as `p` or `p/q` (lowest terms, q > 0).
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p` or `p/q`. The denominator must be a positive integer.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>()
            .map_err(|_| format!("invalid rational: {:?}", s))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q <= BigInt::zero() {
                return Err(format!("invalid rational (denominator must be > 0): {:?}", s));
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Least common multiple of the denominators of a set of rationals.
/// Returns 1 for an empty iterator.
pub fn denominator_lcm<'a>(xs: impl Iterator<Item = &'a Rat>) -> BigInt {
    let mut acc = BigInt::one();
    for x in xs {
        acc = num_integer::lcm(acc, x.denom().clone());
    }
    acc
}

/// Approximate decimal rendering, for display annotations only.
pub fn approx(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Total bits in numerator and denominator; used by the overflow guard.
pub fn bit_size(x: &Rat) -> u64 {
    x.numer().abs().bits() + x.denom().bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-3", "5/3", "-29/12"] {
            let x = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&x), s);
        }
        // Non-canonical inputs normalize.
        assert_eq!(fmt_rat(&parse_rat("6/4").unwrap()), "3/2");
        assert_eq!(fmt_rat(&parse_rat("-6/4").unwrap()), "-3/2");
    }

    #[test]
    fn parse_rejects_bad_input() {
        for s in ["", "1.5", "1/0", "1/-2", "a/b", "1/2/3"] {
            assert!(parse_rat(s).is_err(), "accepted {:?}", s);
        }
    }

    #[test]
    fn lcm_of_denominators() {
        let xs = [ratio(1, 2), ratio(1, 3), rat(4)];
        assert_eq!(denominator_lcm(xs.iter()), BigInt::from(6));
    }
}
