//! Elements of Q_p(zeta) for zeta a primitive p^level-th root of unity,
//! represented in the power basis 1, zeta, ..., zeta^{d-1} with
//! d = phi(p^level) and capped-precision p-adic coefficients.
//!
//! Level 0 is the base field. Levels above 1 are compiled in but rejected at
//! runtime unless the `deep-cyclotomic` feature is enabled: the coefficient
//! count and the ramified precision loss both grow with phi(p^level), and
//! level 1 already exercises every twisted formula nontrivially.
//!
//! Precision is tracked per coefficient. The pi-adic (ramified) valuation is
//! not computed exactly; `pi_val_lower_bound` reports the conservative bound
//! e * min_j v_p(c_j), which is what the precision ledger needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicNumber, PadicRepr, WIDE_PREC};
use crate::rational::{Int, Rat};
use crate::series::RingElem;

#[cfg(feature = "deep-cyclotomic")]
const MAX_LEVEL: u32 = 4;
#[cfg(not(feature = "deep-cyclotomic"))]
const MAX_LEVEL: u32 = 1;

fn check_level(level: u32) -> Result<()> {
    if level <= MAX_LEVEL {
        return Ok(());
    }
    if cfg!(feature = "deep-cyclotomic") {
        Err(Error::domain(format!(
            "cyclotomic level {level} exceeds the supported maximum {MAX_LEVEL}"
        )))
    } else {
        Err(Error::domain(format!(
            "cyclotomic level {level} needs the deep-cyclotomic feature (default maximum is {MAX_LEVEL})"
        )))
    }
}

/// phi(p^level) = (p-1) p^(level-1), the power-basis dimension; 1 at level 0.
pub fn dimension(p: u64, level: u32) -> usize {
    if level == 0 {
        1
    } else {
        ((p - 1) * p.pow(level - 1)) as usize
    }
}

/// An element of Q_p(zeta_{p^level}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CycloRepr", try_from = "CycloRepr")]
pub struct CycloElement {
    p: u64,
    level: u32,
    coeffs: Vec<PadicNumber>,
}

impl CycloElement {
    /// Builds an element from power-basis coefficients (length must match
    /// the dimension for this p and level).
    pub fn new(p: u64, level: u32, coeffs: Vec<PadicNumber>) -> Result<Self> {
        check_level(level)?;
        let d = dimension(p, level);
        if coeffs.len() != d {
            return Err(Error::domain(format!(
                "expected {d} coefficients for level {level}, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| c.prime() != p) {
            return Err(Error::domain(
                "coefficient prime differs from the element's prime".to_string(),
            ));
        }
        Ok(CycloElement { p, level, coeffs })
    }

    pub fn zero(p: u64, level: u32) -> Result<Self> {
        let d = dimension(p, level);
        Self::new(p, level, vec![PadicNumber::zero(p); d])
    }

    /// Embeds a base-field element as the constant coefficient.
    pub fn scalar(level: u32, x: &PadicNumber) -> Result<Self> {
        let mut out = Self::zero(x.prime(), level)?;
        out.coeffs[0] = x.clone();
        Ok(out)
    }

    pub fn one(p: u64, level: u32, prec: u32) -> Result<Self> {
        Self::scalar(level, &PadicNumber::one(p, prec))
    }

    /// The chosen primitive p^level-th root of unity (level >= 1).
    pub fn zeta(p: u64, level: u32, prec: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::domain(
                "level 0 has no primitive root of unity beyond 1".to_string(),
            ));
        }
        Self::zeta_pow(p, level, prec, 1)
    }

    /// zeta^e, reduced into the power basis.
    pub fn zeta_pow(p: u64, level: u32, prec: u32, e: i64) -> Result<Self> {
        check_level(level)?;
        if level == 0 {
            return Self::one(p, 0, prec);
        }
        let pn = p.pow(level) as i64;
        let em = e.rem_euclid(pn) as usize;
        let mut slots = vec![PadicNumber::zero(p); pn as usize];
        slots[em] = PadicNumber::one(p, prec);
        Ok(CycloElement {
            p,
            level,
            coeffs: fold_slots(p, level, slots),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &PadicNumber {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    /// Ramification index of Q_p(zeta_{p^level}) over Q_p.
    pub fn ramification_index(&self) -> i64 {
        self.dim() as i64
    }

    fn same_ring(&self, rhs: &Self) {
        assert_eq!(self.p, rhs.p, "cyclotomic arithmetic across primes");
        assert_eq!(self.level, rhs.level, "cyclotomic arithmetic across levels");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_ring(rhs);
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.same_ring(rhs);
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &PadicNumber) -> Self {
        assert_eq!(self.p, c.prime(), "scalar prime mismatch");
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Multiplication by an exact integer: no precision is lost.
    pub fn mul_int(&self, c: &Int) -> Self {
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|a| a.mul_int(c)).collect(),
        }
    }

    /// Multiplication by an exact rational: no precision is lost.
    pub fn mul_rat(&self, r: &Rat) -> Self {
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|a| a.mul_rat(r)).collect(),
        }
    }

    /// Coefficientwise division by a base-field element.
    pub fn scalar_div(&self, c: &PadicNumber) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.div(c))
            .collect::<Result<Vec<_>>>()?;
        CycloElement::new(self.p, self.level, coeffs)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_ring(rhs);
        if self.level == 0 {
            return CycloElement {
                p: self.p,
                level: 0,
                coeffs: vec![self.coeffs[0].mul(&rhs.coeffs[0])],
            };
        }
        let pn = self.p.pow(self.level) as usize;
        let mut slots = vec![PadicNumber::zero(self.p); pn];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let e = (i + j) % pn; // zeta^(p^level) = 1
                slots[e] = slots[e].add(&a.mul(b));
            }
        }
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: fold_slots(self.p, self.level, slots),
        }
    }

    /// Multiplicative inverse, found by solving (self) * y = 1 as a linear
    /// system over the coefficient ring with full pivoting on the entry of
    /// minimal valuation. Fails when no pivot can be told apart from zero.
    pub fn inv(&self) -> Result<Self> {
        let d = self.dim();
        // column j = coefficients of self * zeta^j
        let mut a: Vec<Vec<PadicNumber>> = Vec::with_capacity(d);
        let mut col = self.clone();
        let mut cols: Vec<Vec<PadicNumber>> = Vec::with_capacity(d);
        for j in 0..d {
            if j > 0 {
                col = col.mul(&Self::zeta_pow(self.p, self.level, WIDE_PREC, 1)?);
            }
            cols.push(col.coeffs.clone());
        }
        for i in 0..d {
            a.push((0..d).map(|j| cols[j][i].clone()).collect());
        }
        let mut b: Vec<PadicNumber> = vec![PadicNumber::zero(self.p); d];
        b[0] = PadicNumber::one(self.p, WIDE_PREC);

        let mut used_row = vec![false; d];
        let mut used_col = vec![false; d];
        let mut pivots: Vec<(usize, usize)> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut best: Option<(usize, usize, i64)> = None;
            for (r, row) in a.iter().enumerate() {
                if used_row[r] {
                    continue;
                }
                for (c, entry) in row.iter().enumerate() {
                    if used_col[c] {
                        continue;
                    }
                    if let Some(v) = entry.valuation() {
                        if best.map_or(true, |(_, _, bv)| v < bv) {
                            best = Some((r, c, v));
                        }
                    }
                }
            }
            let Some((pr, pc, _)) = best else {
                return Err(Error::precision(
                    "inversion of a cyclotomic element indistinguishable from zero".to_string(),
                ));
            };
            used_row[pr] = true;
            used_col[pc] = true;
            pivots.push((pr, pc));
            let piv = a[pr][pc].clone();
            for c in 0..d {
                a[pr][c] = a[pr][c].div(&piv)?;
            }
            b[pr] = b[pr].div(&piv)?;
            for r in 0..d {
                if r == pr {
                    continue;
                }
                let f = a[r][pc].clone();
                if f.is_exact_zero() {
                    continue;
                }
                for c in 0..d {
                    let delta = f.mul(&a[pr][c]);
                    a[r][c] = a[r][c].sub(&delta);
                }
                b[r] = b[r].sub(&f.mul(&b[pr]));
            }
        }
        let mut x = vec![PadicNumber::zero(self.p); d];
        for (pr, pc) in pivots {
            x[pc] = b[pr].clone();
        }
        CycloElement::new(self.p, self.level, x)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// True when every coefficient is zero as far as its precision can tell.
    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_at_precision())
    }

    /// Conservative lower bound on the pi-adic valuation: ramification index
    /// times the smallest coefficient valuation bound. None = exactly zero.
    pub fn pi_val_lower_bound(&self) -> Option<i64> {
        let e = self.ramification_index();
        self.coeff_val_lower_bound().map(|v| e * v)
    }

    /// Smallest p-adic valuation bound among the coefficients; None = exactly
    /// zero. This is the comparable across-levels valuation the precision
    /// ledgers quote.
    pub fn coeff_val_lower_bound(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.val_lower_bound()).min()
    }

    /// Smallest absolute precision among the coefficients; None = exact.
    pub fn min_abs_precision(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.abs_precision()).min()
    }

    /// True when self and other cannot be told apart coefficientwise
    /// modulo p^abs.
    pub fn agrees_with(&self, other: &Self, abs: i64) -> bool {
        self.same_ring(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| a.agrees_with(b, abs))
    }
}

/// Reduces p^level slots (exponents 0..p^level) into the power basis of
/// dimension d = (p-1) p^(level-1), using
/// zeta^(d+r) = -sum_{i=0}^{p-2} zeta^(r + i p^(level-1)).
fn fold_slots(p: u64, level: u32, mut slots: Vec<PadicNumber>) -> Vec<PadicNumber> {
    debug_assert!(level >= 1);
    let pn1 = p.pow(level - 1) as usize;
    let d = (p as usize - 1) * pn1;
    debug_assert_eq!(slots.len(), d + pn1);
    for r in 0..pn1 {
        let top = slots[d + r].clone();
        if top.is_exact_zero() {
            continue;
        }
        for i in 0..(p as usize - 1) {
            let idx = r + i * pn1;
            slots[idx] = slots[idx].sub(&top);
        }
    }
    slots.truncate(d);
    slots
}

impl std::fmt::Display for CycloElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl RingElem for CycloElement {
    fn zero_like(&self) -> Self {
        CycloElement {
            p: self.p,
            level: self.level,
            coeffs: vec![PadicNumber::zero(self.p); self.dim()],
        }
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
        self.inv()
    }
    fn is_ring_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }
}

/// Serialized form: prime, level, and the coefficient list in the power
/// basis, constant term first.
#[derive(Serialize, Deserialize, Clone)]
pub struct CycloRepr {
    pub p: u64,
    pub level: u32,
    pub coeffs: Vec<PadicRepr>,
}

impl From<CycloElement> for CycloRepr {
    fn from(x: CycloElement) -> Self {
        CycloRepr {
            p: x.p,
            level: x.level,
            coeffs: x.coeffs.into_iter().map(PadicRepr::from).collect(),
        }
    }
}

impl TryFrom<CycloRepr> for CycloElement {
    type Error = Error;
    fn try_from(r: CycloRepr) -> Result<Self> {
        let coeffs = r
            .coeffs
            .into_iter()
            .map(PadicNumber::try_from)
            .collect::<Result<Vec<_>>>()?;
        CycloElement::new(r.p, r.level, coeffs)
    }
}
