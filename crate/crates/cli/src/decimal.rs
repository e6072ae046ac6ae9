//! Decimal rendering of exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

/// Significant digits kept for non-terminating expansions.
pub const SIGNIFICANT_DIGITS: usize = 40;

/// Exact decimal expansion when the denominator is `2^a 5^b`, otherwise
/// rounded half-up to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn to_decimal(q: &BigRational) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let num = q.numer().abs();
    let den = q.denom().clone();
    let (int_part, mut rem) = num.div_rem(&den);
    if rem.is_zero() {
        return format!("{sign}{int_part}");
    }

    let terminates = {
        let mut d = den.clone();
        for f in [2u32, 5] {
            let f = BigInt::from(f);
            while (&d % &f).is_zero() {
                d /= &f;
            }
        }
        d == BigInt::from(1)
    };

    // Generate fractional digits until exact or enough significant digits.
    let int_digits = if int_part.is_zero() {
        0
    } else {
        int_part.to_string().len()
    };
    let mut frac = Vec::new();
    let mut significant = int_digits;
    while !rem.is_zero() && (terminates || significant < SIGNIFICANT_DIGITS) {
        rem *= 10u32;
        let (d, r) = rem.div_rem(&den);
        let d = d.to_string().parse::<u8>().unwrap();
        if significant > 0 || d != 0 {
            significant += 1;
        }
        frac.push(d);
        rem = r;
    }

    let mut int_part = int_part;
    if !rem.is_zero() && rem * 2u32 >= den {
        // Round half-up, carrying into the integer part if needed.
        let mut i = frac.len();
        loop {
            if i == 0 {
                int_part += 1u32;
                break;
            }
            i -= 1;
            if frac[i] == 9 {
                frac[i] = 0;
            } else {
                frac[i] += 1;
                break;
            }
        }
        while frac.last() == Some(&0) {
            frac.pop();
        }
    }
    if frac.is_empty() {
        return format!("{sign}{int_part}");
    }
    let digits: String = frac.iter().map(|d| char::from(b'0' + d)).collect();
    format!("{sign}{int_part}.{digits}")
}

/// `{"decimal": ..., "num": ..., "den": ...}` with integers as strings.
pub fn rational_json(q: &BigRational) -> Value {
    json!({
        "decimal": to_decimal(q),
        "num": q.numer().to_string(),
        "den": q.denom().to_string(),
    })
}
