//! Exact rational scalars shared across the crate.
//!
//! Every geometric quantity in this crate is a [`Rational`]; no floating
//! point enters any computation. Values serialize as `p/q` strings in
//! lowest terms (plain `p` when the denominator is 1).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `p/q` as an exact rational.
///
/// # Panics
/// Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// The integer `p` as an exact rational.
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p/q` or a plain integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let make_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>()
            .map_err(|_| format!("invalid integer `{t}`"))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(make_int(s)?)),
        Some((p, q)) => {
            let num = make_int(p)?;
            let den = make_int(q)?;
            if den.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Lowest-terms rendering; integers print without the `/1`.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators of `xs` (1 for an empty list).
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut acc = BigInt::one();
    for x in xs {
        acc = acc.lcm(&x.denom().abs());
    }
    acc
}
