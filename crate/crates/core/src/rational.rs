//! Exact rational scalars and the sawtooth family of helpers.
//!
//! Everything downstream (Dedekind sums, the Bernoulli machinery, the p-adic
//! constructors) consumes the `Rat` alias defined here. Values are kept in
//! lowest terms with a positive denominator, which is the canonical form
//! `num_rational::BigRational` maintains on its own; the helpers only add
//! the number-theoretic conventions (Gauss floor, fractional part, sawtooth)
//! and the fixed "num/den" serialization used across the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type Int = BigInt;

/// Arbitrary-precision rational in canonical reduced form.
pub type Rat = BigRational;

/// Small-integer constructor.
pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

/// `n/d` as a rational; panics if `d = 0` (callers pass literal constants).
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

/// `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(int(n))
}

/// Greatest integer `<= x` (the Gauss bracket `[x]_G`).
pub fn floor_g(x: &Rat) -> Int {
    x.floor().to_integer()
}

/// Fractional part `{x} = x - [x]_G`, always in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Sawtooth `((x))`: `x - [x]_G - 1/2` off the integers, `0` on them.
pub fn sawtooth(x: &Rat) -> Rat {
    if x.is_integer() {
        Rat::zero()
    } else {
        frac(x) - rat(1, 2)
    }
}

/// Canonical "num/den" rendering; integers get an explicit "/1".
pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses "num/den", or a bare integer for CLI convenience.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |part: &str| -> Result<Int> {
        part.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::domain(format!("not an integer: {part:?}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::domain(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(num, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Binomial coefficient C(n, k) as an exact integer; 0 when k > n.
pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    num_integer::binomial(int(n as i64), int(k as i64))
}

/// n! as an exact integer.
pub fn factorial(n: u64) -> Int {
    let mut acc = Int::one();
    for j in 2..=n {
        acc *= int(j as i64);
    }
    acc
}

/// x^n for small non-negative exponents.
pub fn pow_rat(x: &Rat, n: u32) -> Rat {
    let mut acc = Rat::one();
    let mut base = x.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// p-adic valuation of a nonzero integer.
pub fn int_val_p(p: u64, n: &Int) -> u64 {
    assert!(!n.is_zero(), "valuation of zero is infinite");
    let p = int(p as i64);
    let mut v = 0u64;
    let mut m = n.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn rat_val_p(p: u64, x: &Rat) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_val_p(p, x.numer()) as i64 - int_val_p(p, x.denom()) as i64)
}

/// Best-effort f64 view, used only by the float series cross-checks.
pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}
