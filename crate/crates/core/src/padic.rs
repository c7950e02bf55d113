//! Capped-precision p-adic numbers for odd primes, with log/exp, powers,
//! q-numbers, and multiplicative orders.
//!
//! A value is either exactly zero, known only to be divisible by p^bound
//! ("zero at precision"), or p^val times a unit known modulo p^prec. All
//! arithmetic propagates precision conservatively: results never claim more
//! digits than the inputs justify. Addition works at the minimum absolute
//! precision of the operands; multiplication and division add valuations and
//! keep the minimum relative precision. Multiplying or dividing by an exact
//! integer loses nothing.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Int, Rat};
use crate::series::RingElem;

/// Relative precision used when a result is exact but must be carried as a
/// capped-precision value (e.g. exp of an exact zero).
pub const WIDE_PREC: u32 = 256;

/// Trial-division primality check, sufficient for the small primes used here.
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_p(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// floor(log2 j) for j >= 1; bounds log_p(j) from above for any p >= 2.
fn ilog2(j: i64) -> i64 {
    debug_assert!(j >= 1);
    63 - j.leading_zeros() as i64
}

fn big_val_p(p: u64, n: &BigUint) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut v = 0u32;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        n = q;
    }
}

/// Inverse of a unit modulo p^prec, via Euler's theorem.
fn unit_inverse(p: u64, unit: &BigUint, prec: u32) -> BigUint {
    let modulus = pow_p(p, prec);
    // phi(p^prec) = p^(prec-1) (p-1)
    let phi = pow_p(p, prec - 1) * BigUint::from(p - 1);
    unit.modpow(&(phi - BigUint::one()), &modulus)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Form {
    /// The number 0, known exactly.
    ExactZero,
    /// Indistinguishable from 0: all that is known is v_p >= bound.
    ZeroAt { bound: i64 },
    /// p^val * unit with p coprime to unit, unit reduced modulo p^prec.
    Unit { val: i64, unit: BigUint, prec: u32 },
}

/// An element of Q_p carried at explicit finite precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PadicRepr", try_from = "PadicRepr")]
pub struct PadicNumber {
    p: u64,
    form: Form,
}

impl PadicNumber {
    fn require_odd_prime(p: u64) -> Result<()> {
        if is_odd_prime(p) {
            Ok(())
        } else {
            Err(Error::NotOddPrime { p })
        }
    }

    pub fn zero(p: u64) -> Self {
        PadicNumber {
            p,
            form: Form::ExactZero,
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicNumber {
            p,
            form: Form::Unit {
                val: 0,
                unit: BigUint::one(),
                prec: prec.max(1),
            },
        }
    }

    /// A value about which nothing is known beyond v_p >= bound.
    pub fn zero_at(p: u64, bound: i64) -> Self {
        PadicNumber {
            p,
            form: Form::ZeroAt { bound },
        }
    }

    /// Embeds an exact integer at the given relative precision.
    pub fn from_int(p: u64, n: i64, prec: u32) -> Result<Self> {
        Self::from_bigint(p, &Int::from(n), prec)
    }

    pub fn from_bigint(p: u64, n: &Int, prec: u32) -> Result<Self> {
        Self::require_odd_prime(p)?;
        if prec < 1 {
            return Err(Error::domain("precision must be at least 1".to_string()));
        }
        if n.is_zero() {
            return Ok(Self::zero(p));
        }
        let mag = n.magnitude().clone();
        let t = big_val_p(p, &mag);
        let modulus = pow_p(p, prec);
        let mut unit = (mag / pow_p(p, t)) % &modulus;
        if n.sign() == num_bigint::Sign::Minus {
            unit = modulus - unit;
        }
        Ok(PadicNumber {
            p,
            form: Form::Unit {
                val: t as i64,
                unit,
                prec,
            },
        })
    }

    /// Embeds an exact rational at the given relative precision.
    pub fn from_rat(p: u64, x: &Rat, prec: u32) -> Result<Self> {
        let num = Self::from_bigint(p, x.numer(), prec)?;
        let den = Self::from_bigint(p, x.denom(), prec)?;
        num.div(&den)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Exact valuation when the leading unit digit is known.
    pub fn valuation(&self) -> Option<i64> {
        match &self.form {
            Form::Unit { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Lower bound on the valuation; None means the value is exactly 0.
    pub fn val_lower_bound(&self) -> Option<i64> {
        match &self.form {
            Form::ExactZero => None,
            Form::ZeroAt { bound } => Some(*bound),
            Form::Unit { val, .. } => Some(*val),
        }
    }

    /// True when v_p of this value is certainly >= bound.
    pub fn val_at_least(&self, bound: i64) -> bool {
        match self.val_lower_bound() {
            None => true,
            Some(b) => b >= bound,
        }
    }

    /// Absolute precision: the value is known modulo p^(this); None = exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.form {
            Form::ExactZero => None,
            Form::ZeroAt { bound } => Some(*bound),
            Form::Unit { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    /// Relative precision (digits of the unit known); None = exact zero.
    pub fn rel_precision(&self) -> Option<u32> {
        match &self.form {
            Form::ExactZero => None,
            Form::ZeroAt { .. } => Some(0),
            Form::Unit { prec, .. } => Some(*prec),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.form, Form::ExactZero)
    }

    /// True when the value cannot be told apart from 0 at its precision.
    pub fn is_zero_at_precision(&self) -> bool {
        matches!(self.form, Form::ExactZero | Form::ZeroAt { .. })
    }

    /// Base-p digits (little-endian) of the unit part, length = precision.
    pub fn unit_digits(&self) -> Vec<u64> {
        match &self.form {
            Form::Unit { unit, prec, .. } => {
                let pb = BigUint::from(self.p);
                let mut digits = Vec::with_capacity(*prec as usize);
                let mut rest = unit.clone();
                for _ in 0..*prec {
                    let (q, r) = rest.div_rem(&pb);
                    digits.push(r.to_u64().expect("digit fits in u64"));
                    rest = q;
                }
                digits
            }
            _ => Vec::new(),
        }
    }

    /// The canonical integer representative of the unit part, in [0, p^prec).
    pub fn unit_value(&self) -> Option<BigUint> {
        match &self.form {
            Form::Unit { unit, .. } => Some(unit.clone()),
            _ => None,
        }
    }

    /// Normalizes "p^base_val * s, known modulo p^abs_prec" into a value.
    fn normalized(p: u64, base_val: i64, s: BigUint, abs_prec: i64) -> Self {
        let rel = abs_prec - base_val;
        debug_assert!(rel >= 1, "normalization needs at least one digit");
        let s = s % pow_p(p, rel as u32);
        if s.is_zero() {
            return Self::zero_at(p, abs_prec);
        }
        let t = big_val_p(p, &s);
        let prec = rel as u32 - t;
        let unit = (s / pow_p(p, t)) % pow_p(p, prec);
        PadicNumber {
            p,
            form: Form::Unit {
                val: base_val + t as i64,
                unit,
                prec,
            },
        }
    }

    fn same_prime(&self, rhs: &Self) {
        assert_eq!(self.p, rhs.p, "p-adic arithmetic across different primes");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_prime(rhs);
        let p = self.p;
        match (&self.form, &rhs.form) {
            (Form::ExactZero, _) => rhs.clone(),
            (_, Form::ExactZero) => self.clone(),
            (Form::ZeroAt { bound: b1 }, Form::ZeroAt { bound: b2 }) => {
                Self::zero_at(p, *(b1.min(b2)))
            }
            (Form::ZeroAt { bound }, Form::Unit { val, unit, prec })
            | (Form::Unit { val, unit, prec }, Form::ZeroAt { bound }) => {
                let abs = (*bound).min(val + *prec as i64);
                if *val >= abs {
                    Self::zero_at(p, abs)
                } else {
                    Self::normalized(p, *val, unit.clone(), abs)
                }
            }
            (
                Form::Unit {
                    val: v1,
                    unit: u1,
                    prec: m1,
                },
                Form::Unit {
                    val: v2,
                    unit: u2,
                    prec: m2,
                },
            ) => {
                let abs = (v1 + *m1 as i64).min(v2 + *m2 as i64);
                let base = (*v1).min(*v2);
                if base >= abs {
                    // one operand is entirely below the other's precision
                    return Self::zero_at(p, abs);
                }
                let rel = (abs - base) as u32;
                let modulus = pow_p(p, rel);
                let lift = |v: i64, u: &BigUint| -> BigUint {
                    let shift = (v - base) as u32;
                    if shift >= rel {
                        BigUint::zero()
                    } else {
                        (u * pow_p(p, shift)) % &modulus
                    }
                };
                let s = (lift(*v1, u1) + lift(*v2, u2)) % &modulus;
                if s.is_zero() {
                    Self::zero_at(p, abs)
                } else {
                    Self::normalized(p, base, s, abs)
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.form {
            Form::Unit { val, unit, prec } => {
                let modulus = pow_p(self.p, *prec);
                PadicNumber {
                    p: self.p,
                    form: Form::Unit {
                        val: *val,
                        unit: (modulus - unit) % pow_p(self.p, *prec),
                        prec: *prec,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_prime(rhs);
        let p = self.p;
        match (&self.form, &rhs.form) {
            (Form::ExactZero, _) | (_, Form::ExactZero) => Self::zero(p),
            (Form::ZeroAt { bound: b1 }, Form::ZeroAt { bound: b2 }) => Self::zero_at(p, b1 + b2),
            (Form::ZeroAt { bound }, Form::Unit { val, .. })
            | (Form::Unit { val, .. }, Form::ZeroAt { bound }) => Self::zero_at(p, bound + val),
            (
                Form::Unit {
                    val: v1,
                    unit: u1,
                    prec: m1,
                },
                Form::Unit {
                    val: v2,
                    unit: u2,
                    prec: m2,
                },
            ) => {
                let prec = *m1.min(m2);
                let unit = (u1 * u2) % pow_p(p, prec);
                PadicNumber {
                    p,
                    form: Form::Unit {
                        val: v1 + v2,
                        unit,
                        prec,
                    },
                }
            }
        }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.same_prime(rhs);
        match &rhs.form {
            Form::ExactZero => Err(Error::DivisionByZero),
            Form::ZeroAt { bound } => Err(Error::precision(format!(
                "division by a value indistinguishable from zero (v_{} >= {bound})",
                self.p
            ))),
            Form::Unit { val, unit, prec } => {
                let inv = PadicNumber {
                    p: self.p,
                    form: Form::Unit {
                        val: -val,
                        unit: unit_inverse(self.p, unit, *prec),
                        prec: *prec,
                    },
                };
                Ok(self.mul(&inv))
            }
        }
    }

    /// Multiplication by an exact integer: no precision is lost.
    pub fn mul_int(&self, c: &Int) -> Self {
        if c.is_zero() {
            return Self::zero(self.p);
        }
        let mag = c.magnitude().clone();
        let t = big_val_p(self.p, &mag) as i64;
        match &self.form {
            Form::ExactZero => Self::zero(self.p),
            Form::ZeroAt { bound } => Self::zero_at(self.p, bound + t),
            Form::Unit { val, unit, prec } => {
                let modulus = pow_p(self.p, *prec);
                let mut cu = (mag / pow_p(self.p, t as u32)) % &modulus;
                if c.sign() == num_bigint::Sign::Minus {
                    cu = &modulus - cu;
                }
                PadicNumber {
                    p: self.p,
                    form: Form::Unit {
                        val: val + t,
                        unit: (unit * cu) % &modulus,
                        prec: *prec,
                    },
                }
            }
        }
    }

    pub fn mul_i64(&self, c: i64) -> Self {
        self.mul_int(&Int::from(c))
    }

    /// Division by an exact nonzero integer: no precision is lost.
    pub fn div_int(&self, c: &Int) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mag = c.magnitude().clone();
        let t = big_val_p(self.p, &mag) as i64;
        match &self.form {
            Form::ExactZero => Ok(Self::zero(self.p)),
            Form::ZeroAt { bound } => Ok(Self::zero_at(self.p, bound - t)),
            Form::Unit { val, unit, prec } => {
                let modulus = pow_p(self.p, *prec);
                let mut cu = (mag / pow_p(self.p, t as u32)) % &modulus;
                if c.sign() == num_bigint::Sign::Minus {
                    cu = &modulus - cu;
                }
                Ok(PadicNumber {
                    p: self.p,
                    form: Form::Unit {
                        val: val - t,
                        unit: (unit * unit_inverse(self.p, &cu, *prec)) % &modulus,
                        prec: *prec,
                    },
                })
            }
        }
    }

    pub fn div_i64(&self, c: i64) -> Result<Self> {
        self.div_int(&Int::from(c))
    }

    /// Multiplication by an exact rational: no precision is lost.
    pub fn mul_rat(&self, r: &Rat) -> Self {
        self.mul_int(r.numer())
            .div_int(r.denom())
            .expect("rational denominator is nonzero")
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn pow_i64(&self, e: i64) -> Result<Self> {
        if e == 0 {
            let prec = match &self.form {
                Form::Unit { prec, .. } => *prec,
                _ => WIDE_PREC,
            };
            return Ok(Self::one(self.p, prec));
        }
        let base = if e < 0 {
            Self::one(
                self.p,
                self.rel_precision().unwrap_or(WIDE_PREC).max(1),
            )
            .div(self)?
        } else {
            self.clone()
        };
        let mut acc: Option<PadicNumber> = None;
        let mut sq = base;
        let mut rest = e.unsigned_abs();
        while rest > 0 {
            if rest & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            rest >>= 1;
            if rest > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap())
    }

    /// Forgets digits above absolute precision `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.form {
            Form::ExactZero => self.clone(),
            Form::ZeroAt { bound } => Self::zero_at(self.p, (*bound).min(abs)),
            Form::Unit { val, unit, prec } => {
                if *val >= abs {
                    Self::zero_at(self.p, abs)
                } else {
                    let keep = ((abs - val) as u32).min(*prec);
                    PadicNumber {
                        p: self.p,
                        form: Form::Unit {
                            val: *val,
                            unit: unit % pow_p(self.p, keep),
                            prec: keep,
                        },
                    }
                }
            }
        }
    }

    /// True when self and other cannot be told apart modulo p^abs.
    pub fn agrees_with(&self, other: &Self, abs: i64) -> bool {
        self.sub(other).val_at_least(abs)
    }
}

impl std::fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.form {
            Form::ExactZero => write!(f, "0 (exact)"),
            Form::ZeroAt { bound } => write!(f, "O({}^{})", self.p, bound),
            Form::Unit { val, unit, prec } => {
                if *val == 0 {
                    write!(f, "{} + O({}^{})", unit, self.p, *val + *prec as i64)
                } else {
                    write!(
                        f,
                        "{}^{}*{} + O({}^{})",
                        self.p,
                        val,
                        unit,
                        self.p,
                        *val + *prec as i64
                    )
                }
            }
        }
    }
}

impl RingElem for PadicNumber {
    fn zero_like(&self) -> Self {
        Self::zero(self.p)
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_inv(&self) -> Result<Self> {
        Self::one(self.p, self.rel_precision().unwrap_or(WIDE_PREC).max(1)).div(self)
    }
    fn is_ring_zero(&self) -> bool {
        // only exact zeros may be skipped; zero-at-precision values still
        // carry uncertainty that must propagate
        self.is_exact_zero()
    }
}

/// Serialized form: base-p digits of the unit, little-endian, one per known
/// digit; an exact zero is flagged explicitly.
#[derive(Serialize, Deserialize, Clone)]
pub struct PadicRepr {
    pub p: u64,
    pub valuation: i64,
    pub digits: Vec<u64>,
    pub precision: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<bool>,
}

impl From<PadicNumber> for PadicRepr {
    fn from(x: PadicNumber) -> Self {
        match &x.form {
            Form::ExactZero => PadicRepr {
                p: x.p,
                valuation: 0,
                digits: Vec::new(),
                precision: 0,
                exact: Some(true),
            },
            Form::ZeroAt { bound } => PadicRepr {
                p: x.p,
                valuation: *bound,
                digits: Vec::new(),
                precision: 0,
                exact: None,
            },
            Form::Unit { val, prec, .. } => PadicRepr {
                p: x.p,
                valuation: *val,
                digits: x.unit_digits(),
                precision: *prec,
                exact: None,
            },
        }
    }
}

impl TryFrom<PadicRepr> for PadicNumber {
    type Error = Error;
    fn try_from(r: PadicRepr) -> Result<Self> {
        PadicNumber::require_odd_prime(r.p)?;
        if r.exact == Some(true) {
            return Ok(PadicNumber::zero(r.p));
        }
        if r.precision == 0 {
            if !r.digits.is_empty() {
                return Err(Error::domain(
                    "digits present but precision is 0".to_string(),
                ));
            }
            return Ok(PadicNumber::zero_at(r.p, r.valuation));
        }
        if r.digits.len() != r.precision as usize {
            return Err(Error::domain(format!(
                "expected {} digits, got {}",
                r.precision,
                r.digits.len()
            )));
        }
        if r.digits.iter().any(|d| *d >= r.p) {
            return Err(Error::domain("digit out of range for base p".to_string()));
        }
        if r.digits[0] == 0 {
            return Err(Error::domain(
                "leading digit must be nonzero (unit part)".to_string(),
            ));
        }
        let mut unit = BigUint::zero();
        for d in r.digits.iter().rev() {
            unit = unit * BigUint::from(r.p) + BigUint::from(*d);
        }
        Ok(PadicNumber {
            p: r.p,
            form: Form::Unit {
                val: r.valuation,
                unit,
                prec: r.precision,
            },
        })
    }
}

/// p-adic logarithm of a 1-unit: sum (-1)^{j+1} (u-1)^j / j.
pub fn padic_log(u: &PadicNumber) -> Result<PadicNumber> {
    let p = u.p;
    match &u.form {
        Form::ExactZero | Form::ZeroAt { .. } => Err(Error::domain(
            "p-adic log needs a 1-unit (v_p(u-1) >= 1); got a value near 0".to_string(),
        )),
        Form::Unit { val, prec, .. } => {
            if *val != 0 {
                return Err(Error::domain(format!(
                    "p-adic log needs a 1-unit; got valuation {val}"
                )));
            }
            let z = u.sub(&PadicNumber::one(p, *prec));
            let target = *prec as i64; // abs precision of z
            if z.is_zero_at_precision() {
                // u = 1 as far as we can tell
                return Ok(match z.form {
                    Form::ExactZero => PadicNumber::zero(p),
                    _ => PadicNumber::zero_at(p, target),
                });
            }
            if !z.val_at_least(1) {
                return Err(Error::domain(
                    "p-adic log needs a 1-unit (v_p(u-1) >= 1)".to_string(),
                ));
            }
            let t = z.val_lower_bound().expect("z is not exact zero");
            let mut acc = PadicNumber::zero(p);
            let mut zpow = z.clone();
            let mut j = 1i64;
            loop {
                let term = zpow.div_i64(j)?;
                let term = if j % 2 == 0 { term.neg() } else { term };
                acc = acc.add(&term);
                // every later term z^i/i has v_p >= i t - log_p(i), which is
                // nondecreasing in i; log2 bounds log_p from above
                if j * t - ilog2(j) >= target {
                    break;
                }
                zpow = zpow.mul(&z);
                j += 1;
                if j > 8 * target.max(4) {
                    return Err(Error::precision(
                        "p-adic log series did not settle".to_string(),
                    ));
                }
            }
            Ok(acc.truncate_abs(target))
        }
    }
}

/// p-adic exponential for v_p(x) >= 1: sum x^j / j!.
pub fn padic_exp(x: &PadicNumber) -> Result<PadicNumber> {
    let p = x.p;
    if x.is_exact_zero() {
        return Ok(PadicNumber::one(p, WIDE_PREC));
    }
    if !x.val_at_least(1) {
        return Err(Error::domain(
            "p-adic exp needs v_p(x) >= 1 for odd p".to_string(),
        ));
    }
    let target = x
        .abs_precision()
        .expect("non-exact value has finite precision");
    let t = x.val_lower_bound().expect("non-exact value");
    let mut acc = PadicNumber::one(p, target.max(1) as u32);
    let mut term = PadicNumber::one(p, target.max(1) as u32);
    let mut j = 1i64;
    loop {
        term = term.mul(x).div_i64(j)?;
        acc = acc.add(&term);
        // later terms x^i/i! have v_p >= i t - (i-1)/(p-1) >= i t - (i-1)/2,
        // nondecreasing in i for odd p
        if 2 * j * t - (j - 1) >= 2 * target {
            break;
        }
        j += 1;
        if j > 8 * target.max(4) {
            return Err(Error::precision(
                "p-adic exp series did not settle".to_string(),
            ));
        }
    }
    Ok(acc.truncate_abs(target))
}

/// q^x = exp(x log q) for a 1-unit q and |x|_p <= 1.
pub fn padic_pow(q: &PadicNumber, x: &PadicNumber) -> Result<PadicNumber> {
    if !x.val_at_least(0) {
        return Err(Error::domain(
            "exponent must satisfy |x|_p <= 1".to_string(),
        ));
    }
    if x.is_exact_zero() {
        return Ok(PadicNumber::one(
            q.prime(),
            q.rel_precision().unwrap_or(WIDE_PREC).max(1),
        ));
    }
    let lq = padic_log(q)?;
    padic_exp(&x.mul(&lq))
}

/// The q-number [x:q] = 1 + q + ... + q^{x-1}, evaluated as a geometric sum
/// by binary splitting: [2m:q] = [m:q](1+q^m), [2m+1:q] = [2m:q] + q^{2m}.
/// Works for any q, including q = 1 and q indistinguishable from 1.
pub fn qnum(x: u64, q: &PadicNumber) -> PadicNumber {
    let p = q.prime();
    if x == 0 {
        return PadicNumber::zero(p);
    }
    let prec = q.rel_precision().unwrap_or(WIDE_PREC).max(1);
    let one = PadicNumber::one(p, prec);
    let mut s = PadicNumber::zero(p); // [m:q] for the prefix m of x
    let mut qm = one.clone(); // q^m
    let bits = 64 - x.leading_zeros();
    for i in (0..bits).rev() {
        s = s.mul(&one.add(&qm));
        qm = qm.mul(&qm);
        if (x >> i) & 1 == 1 {
            s = s.add(&qm); // [2m+1:q] = [2m:q] + q^{2m}
            qm = qm.mul(q);
        }
    }
    s
}

/// The q-number over exact rationals; q = 1 is rejected (use the integer
/// value x directly in that case).
pub fn qnum_rat(x: u64, q: &Rat) -> Result<Rat> {
    if q.is_one() {
        return Err(Error::domain(
            "q-number over rationals needs q != 1".to_string(),
        ));
    }
    // (1 - q^x)/(1 - q) by binary exponentiation
    let mut qx = Rat::one();
    let mut sq = q.clone();
    let mut rest = x;
    while rest > 0 {
        if rest & 1 == 1 {
            qx *= &sq;
        }
        rest >>= 1;
        if rest > 0 {
            sq = &sq * &sq;
        }
    }
    Ok((Rat::one() - qx) / (Rat::one() - q))
}

/// Least d >= 1 with p^d = 1 (mod m); requires gcd(p, m) = 1.
pub fn mult_order(p: u64, m: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::domain("modulus must be at least 1".to_string()));
    }
    if num_integer::gcd(p, m) != 1 {
        return Err(Error::domain(format!(
            "mult_order needs gcd(p, m) = 1; got p = {p}, m = {m}"
        )));
    }
    if m == 1 {
        return Ok(1);
    }
    let pm = (p % m) as u128;
    let mut acc = pm;
    let mut d = 1u64;
    while acc != 1 {
        acc = acc * pm % m as u128;
        d += 1;
        debug_assert!(d <= m, "order exceeds modulus");
    }
    Ok(d)
}
