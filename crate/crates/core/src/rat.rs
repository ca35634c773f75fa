//! Exact rational scalars and their string form.
//!
//! All coefficients in this crate are arbitrary-precision rationals, kept
//! reduced with a positive denominator by `num-rational`. The string form is
//! `p` for integers and `p/q` otherwise; it round-trips exactly.

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// `num/den` as a rational. Panics when `den` is zero.
pub fn frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Non-negative integer power.
pub fn pow(base: &Rat, exp: u32) -> Rat {
    let mut acc = rat(1);
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Renders as `p` or `p/q` (reduced, denominator positive).
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Parses `p` or `p/q`. Returns `None` on malformed input or zero denominator.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from),
        Some((num, den)) => {
            let num = num.trim().parse::<BigInt>().ok()?;
            let den = den.trim().parse::<BigInt>().ok()?;
            if den == BigInt::from(0) {
                None
            } else {
                Some(Rat::new(num, den))
            }
        }
    }
}
