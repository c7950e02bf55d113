//! The three integral evaluators: bosonic (closed form on polynomials),
//! q-deformed (truncated Riemann sums with the q^x weight), and fermionic
//! (alternating truncated sums, plus an exact closed form for periodic
//! integrands).
//!
//! The fermionic limit of a periodic integrand is branch-dependent whenever
//! the signed block sum B is nonzero: the truncated sums settle to different
//! values along N = a (mod d), d the multiplicative order of p modulo the
//! signed period. The closed-form evaluator therefore returns every branch
//! value and a flag, never a silently chosen representative.

use std::collections::BTreeMap;

use num_integer::{lcm, Integer};
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::Serialize;

use crate::bernoulli::{bernoulli_number, euler_numbers};
use crate::classical::CoprimePair;
use crate::cyclo::CycloElement;
use crate::error::{Error, Result};
use crate::padic::{mult_order, qnum, PadicNumber};
use crate::rational::{binomial, rat, rat_int, Int, Rat};
use crate::series::TruncatedSeries;

/// Largest truncated sum accepted: p^N summands with p^N above this bound
/// are refused (the closed forms cover them).
pub const TRUNCATION_BOUND: u64 = 100_000_000;

/// A function on Z with finite period, given by a table of exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFn {
    values: Vec<Rat>,
}

impl PeriodicFn {
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("period must be at least 1".to_string()));
        }
        Ok(PeriodicFn { values })
    }

    pub fn period(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value_at(&self, x: u64) -> &Rat {
        &self.values[(x % self.period()) as usize]
    }

    /// The sawtooth table x -> ((h x / k)), period k.
    pub fn sawtooth_table(pair: &CoprimePair) -> Self {
        let (h, k) = (pair.h(), pair.k());
        let values = (0..k)
            .map(|x| {
                let r = (h as i128 * x as i128).rem_euclid(k as i128) as i64;
                if r == 0 {
                    Rat::zero()
                } else {
                    rat(r, k) - rat(1, 2)
                }
            })
            .collect();
        PeriodicFn { values }
    }

    /// The sign table x -> (-1)^[h x / 2k], period 4k.
    pub fn sign_table(pair: &CoprimePair) -> Self {
        let (h, k) = (pair.h(), pair.k());
        let values = (0..4 * k)
            .map(|x| {
                let fl = (h as i128 * x as i128).div_euclid(2 * k as i128);
                if fl & 1 == 0 {
                    rat_int(1)
                } else {
                    rat_int(-1)
                }
            })
            .collect();
        PeriodicFn { values }
    }
}

/// What to integrate.
#[derive(Debug, Clone)]
pub enum IntegrandSpec {
    /// c_0 + c_1 x + ... as exact rationals.
    Polynomial(Vec<Rat>),
    /// A periodic table of exact rationals.
    Periodic(PeriodicFn),
    /// x -> w^x q^x x^degree, integrated against the q-measure (the measure
    /// contributes the second q^x); q is the integral's own q argument.
    TwistedMonomial { degree: u64, w: CycloElement },
    /// sin(bx), kept formal in b through the given order.
    SineFormal { order: usize },
}

/// The closed-form fermionic limit of a periodic integrand: all branch
/// values of lim sum_{x < p^N} (-1)^x f(x), indexed by p^a mod M.
#[derive(Debug, Clone)]
pub struct FermionicLimitReport {
    p: u64,
    /// Signed period M = lcm(2, period of f).
    pub modulus: u64,
    /// B = sum over one signed period of (-1)^x f(x).
    pub block_sum: Rat,
    /// Branch value for each residue p^a mod M, a = 1..order(p mod M).
    pub branches: BTreeMap<u64, Rat>,
    pub branch_independent: bool,
}

impl FermionicLimitReport {
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The branch a truncation exponent N lands on: residue p^N mod M.
    pub fn branch_for_exponent(&self, n: u32) -> &Rat {
        let mut r = 1u128;
        let m = self.modulus as u128;
        for _ in 0..n {
            r = r * (self.p as u128) % m;
        }
        let key = if n == 0 { 1 } else { r as u64 };
        self.branches
            .get(&key)
            .expect("p^N mod M lies in the orbit of p")
    }
}

impl Serialize for FermionicLimitReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use crate::rational::rat_to_string;
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("modulus", &self.modulus)?;
        map.serialize_entry("block_sum", &rat_to_string(&self.block_sum))?;
        let branches: BTreeMap<String, String> = self
            .branches
            .iter()
            .map(|(r, v)| (r.to_string(), rat_to_string(v)))
            .collect();
        map.serialize_entry("branches", &branches)?;
        map.serialize_entry("branch_independent", &self.branch_independent)?;
        map.end()
    }
}

fn checked_p_pow(p: u64, n: u32) -> Result<u64> {
    match p.checked_pow(n) {
        Some(v) if v <= TRUNCATION_BOUND => Ok(v),
        _ => Err(Error::domain(format!(
            "p^N = {p}^{n} exceeds the truncation bound {TRUNCATION_BOUND}; use the closed forms"
        ))),
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if crate::padic::is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime { p })
    }
}

/// Clears denominators: returns (numerators, common denominator).
fn cleared(values: &[Rat]) -> (Vec<Int>, Int) {
    let mut den = Int::one();
    for v in values {
        den = den.lcm(v.denom());
    }
    let nums = values
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (nums, den)
}

/// Truncated fermionic sum sum_{x=0}^{p^N - 1} (-1)^x f(x), exact.
pub fn fermionic_trunc(f: &IntegrandSpec, p: u64, n: u32) -> Result<Rat> {
    require_odd_prime(p)?;
    if n < 1 {
        return Err(Error::domain("truncation exponent N must be >= 1".to_string()));
    }
    let pn = checked_p_pow(p, n)?;
    match f {
        IntegrandSpec::Polynomial(coeffs) => Ok(alternating_poly_sum(coeffs, pn)),
        IntegrandSpec::Periodic(table) => Ok(alternating_table_sum(table, pn)),
        _ => Err(Error::domain(
            "truncated fermionic sums take Polynomial or Periodic integrands".to_string(),
        )),
    }
}

fn alternating_poly_sum(coeffs: &[Rat], pn: u64) -> Rat {
    let (nums, den) = cleared(coeffs);
    // i128 Horner fast path; falls back to big integers on any overflow
    if let Some(small) = nums.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>() {
        if let Some(total) = alternating_poly_sum_i128(&small, pn) {
            return Rat::new(Int::from(total), den);
        }
    }
    let mut acc = Int::zero();
    for x in 0..pn {
        let xi = Int::from(x);
        let mut v = Int::zero();
        for c in nums.iter().rev() {
            v = v * &xi + c;
        }
        if x & 1 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    Rat::new(acc, den)
}

fn alternating_poly_sum_i128(coeffs: &[i128], pn: u64) -> Option<i128> {
    let mut acc = 0i128;
    for x in 0..pn {
        let xi = x as i128;
        let mut v = 0i128;
        for c in coeffs.iter().rev() {
            v = v.checked_mul(xi)?.checked_add(*c)?;
        }
        acc = if x & 1 == 0 {
            acc.checked_add(v)?
        } else {
            acc.checked_sub(v)?
        };
    }
    Some(acc)
}

fn alternating_table_sum(table: &PeriodicFn, pn: u64) -> Rat {
    let (nums, den) = cleared(&table.values);
    let m = nums.len() as u64;
    if let Some(small) = nums.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>() {
        let mut acc = 0i128;
        let mut overflow = false;
        for x in 0..pn {
            let v = small[(x % m) as usize];
            let next = if x & 1 == 0 {
                acc.checked_add(v)
            } else {
                acc.checked_sub(v)
            };
            match next {
                Some(a) => acc = a,
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        if !overflow {
            return Rat::new(Int::from(acc), den);
        }
    }
    let mut acc = Int::zero();
    for x in 0..pn {
        let v = &nums[(x % m) as usize];
        if x & 1 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    Rat::new(acc, den)
}

/// Exact fermionic limit structure of a periodic integrand. With
/// M = lcm(2, period), g(x) = (-1)^x f(x), B = sum_{x<M} g(x), and
/// P(r) = sum_{x<r} g(x), the truncated sum at exponent N equals
/// P(r_N) + B (p^N - r_N)/M for r_N = p^N mod M, so along each residue
/// branch it converges p-adically to P(r_a) - r_a B / M.
pub fn fermionic_periodic_closed(f: &PeriodicFn, p: u64) -> Result<FermionicLimitReport> {
    require_odd_prime(p)?;
    let m = lcm(2, f.period());
    if num_integer::gcd(p, m) != 1 {
        return Err(Error::NotCoprime {
            h: p as i64,
            k: m as i64,
        });
    }
    let g: Vec<Rat> = (0..m)
        .map(|x| {
            let v = f.value_at(x).clone();
            if x & 1 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    let block_sum: Rat = g.iter().sum();
    let mut prefix = Vec::with_capacity(m as usize + 1);
    prefix.push(Rat::zero());
    for v in &g {
        let last = prefix.last().unwrap().clone();
        prefix.push(last + v);
    }
    let d = mult_order(p, m)?;
    let mut branches = BTreeMap::new();
    let mut r = 1u128;
    for _ in 1..=d {
        r = r * p as u128 % m as u128;
        let ra = r as u64;
        let value = &prefix[ra as usize] - rat(ra as i64, m as i64) * &block_sum;
        branches.insert(ra, value);
    }
    let branch_independent = {
        let mut vals = branches.values();
        let first = vals.next().expect("at least one branch").clone();
        vals.all(|v| *v == first)
    };
    Ok(FermionicLimitReport {
        p,
        modulus: m,
        block_sum,
        branches,
        branch_independent,
    })
}

/// Fermionic integral of a polynomial: sum c_n e_n, independent of p.
pub fn fermionic_poly(coeffs: &[Rat]) -> Rat {
    if coeffs.is_empty() {
        return Rat::zero();
    }
    let e = euler_numbers(coeffs.len() as u64 - 1);
    coeffs.iter().zip(&e).map(|(c, en)| c * en).sum()
}

/// Bosonic integral of a polynomial: sum c_n B_n.
pub fn volkenborn_poly(coeffs: &[Rat]) -> Rat {
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * bernoulli_number(n as u64))
        .sum()
}

/// Truncated q-deformed integral: (1/[p^N:q]) sum_{x<p^N} f(x) q^x, with the
/// q^{2x} weight for twisted monomials. Returns a level-0 element for scalar
/// integrands.
pub fn volkenborn_q_trunc(
    f: &IntegrandSpec,
    p: u64,
    n: u32,
    q: &PadicNumber,
) -> Result<CycloElement> {
    require_odd_prime(p)?;
    if q.prime() != p {
        return Err(Error::domain("q lives over a different prime".to_string()));
    }
    if n < 1 {
        return Err(Error::domain("truncation exponent N must be >= 1".to_string()));
    }
    let prec = q.rel_precision().unwrap_or(crate::padic::WIDE_PREC).max(1);
    let one = PadicNumber::one(p, prec);
    if !q.sub(&one).val_at_least(1) {
        return Err(Error::domain(
            "q must be a 1-unit: v_p(q - 1) >= 1".to_string(),
        ));
    }
    let pn = checked_p_pow(p, n)?;
    let denom = qnum(pn, q);
    match f {
        IntegrandSpec::Polynomial(coeffs) => {
            let mut acc = PadicNumber::zero(p);
            let mut qx = one.clone();
            for x in 0..pn {
                let fx = eval_poly(coeffs, x);
                if !fx.is_zero() {
                    acc = acc.add(&qx.mul_rat(&fx));
                }
                qx = qx.mul(q);
            }
            CycloElement::scalar(0, &acc.div(&denom)?)
        }
        IntegrandSpec::Periodic(table) => {
            let mut acc = PadicNumber::zero(p);
            let mut qx = one.clone();
            for x in 0..pn {
                let fx = table.value_at(x);
                if !fx.is_zero() {
                    acc = acc.add(&qx.mul_rat(fx));
                }
                qx = qx.mul(q);
            }
            CycloElement::scalar(0, &acc.div(&denom)?)
        }
        IntegrandSpec::TwistedMonomial { degree, w } => {
            if w.prime() != p {
                return Err(Error::domain(
                    "twist root lives over a different prime".to_string(),
                ));
            }
            // w^x depends only on x mod p^level; accumulate one scalar per
            // class and assemble at the end
            let classes = p.pow(w.level()) as usize;
            let mut per_class = vec![PadicNumber::zero(p); classes];
            let q2 = q.mul(q);
            let mut q2x = one.clone();
            for x in 0..pn {
                let term = q2x.mul_int(&Int::from(x).pow(*degree as u32));
                let cls = (x % classes as u64) as usize;
                per_class[cls] = per_class[cls].add(&term);
                q2x = q2x.mul(&q2);
            }
            let mut acc = CycloElement::zero(p, w.level())?;
            for (cls, scalar) in per_class.into_iter().enumerate() {
                let wx = CycloElement::zeta_pow(p, w.level(), prec, cls as i64)?;
                acc = acc.add(&wx.scalar_mul(&scalar));
            }
            acc.scalar_div(&denom)
        }
        IntegrandSpec::SineFormal { .. } => Err(Error::domain(
            "sin(bx) is integrated formally; use the formal series evaluator".to_string(),
        )),
    }
}

fn eval_poly(coeffs: &[Rat], x: u64) -> Rat {
    let xi = Rat::from(Int::from(x));
    let mut v = Rat::zero();
    for c in coeffs.iter().rev() {
        v = v * &xi + c;
    }
    v
}

/// Termwise fermionic integration of sin(bx): the b-series
/// sum_{j odd <= T} (-1)^((j-1)/2) e_j b^j / j!.
pub fn sine_fermionic_formal(t: usize) -> TruncatedSeries<Rat> {
    let e = euler_numbers(t as u64);
    let mut fact = Rat::one();
    let mut coeffs = vec![Rat::zero(); t + 1];
    for (j, c) in coeffs.iter_mut().enumerate() {
        if j > 0 {
            fact *= rat_int(j as i64);
        }
        if j % 2 == 1 {
            let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
            *c = rat(sign, 1) * &e[j] / &fact;
        }
    }
    TruncatedSeries::new(coeffs)
}

/// Coefficients of f(x + 1) given the coefficients of f.
pub fn shift_poly(coeffs: &[Rat]) -> Vec<Rat> {
    let n = coeffs.len();
    let mut out = vec![Rat::zero(); n];
    for (i, c) in coeffs.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate().take(i + 1) {
            *o += c * Rat::from(binomial(i as u64, j as u64));
        }
    }
    out
}
