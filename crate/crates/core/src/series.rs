//! Truncated formal power series over the scalar rings of this crate.
//!
//! A series holds coefficients c_0..c_T with everything above order T
//! unknown; binary operations truncate to the shorter operand, so precision
//! in the series sense is tracked the same way the p-adic types track digit
//! precision: conservatively and explicitly.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// Ring operations the series engine needs.
///
/// Implemented by `Rat`, `Padic`, and `CycloElement`. `zero_like` takes a
/// prototype element so the p-adic implementations know which prime, level,
/// and precision the zero should carry.
pub trait RingElem: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// Multiplicative inverse; errors when the element is zero or cannot be
    /// distinguished from zero at its precision.
    fn ring_inv(&self) -> Result<Self>;
    /// True only when the element is exactly zero; products skip such terms,
    /// so a capped-precision "maybe zero" must return false here to keep its
    /// uncertainty flowing through.
    fn is_ring_zero(&self) -> bool;
}

impl RingElem for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat::one() / self)
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Power series truncated at a fixed order.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<R: RingElem> {
    coeffs: Vec<R>,
}

impl<R: RingElem> TruncatedSeries<R> {
    /// Builds a series from c_0..c_T; the list must be non-empty.
    pub fn new(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c_0");
        TruncatedSeries { coeffs }
    }

    /// The constant series c + 0·t + ... up to the given order.
    pub fn constant(c: R, order: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    /// Highest order carried (T for coefficients c_0..c_T).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &R {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Drops coefficients above the given order.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        TruncatedSeries::new(self.coeffs[..keep].to_vec())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        TruncatedSeries::new(
            (0..n)
                .map(|i| self.coeffs[i].ring_add(&rhs.coeffs[i]))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        TruncatedSeries::new(
            (0..n)
                .map(|i| self.coeffs[i].ring_sub(&rhs.coeffs[i]))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries::new(self.coeffs.iter().map(|c| c.ring_neg()).collect())
    }

    pub fn scale(&self, c: &R) -> Self {
        TruncatedSeries::new(self.coeffs.iter().map(|a| a.ring_mul(c)).collect())
    }

    /// Cauchy product, truncated to the shorter operand.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_ring_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                if b.is_ring_zero() {
                    continue;
                }
                out[i + j] = out[i + j].ring_add(&a.ring_mul(b));
            }
        }
        TruncatedSeries::new(out)
    }

    /// Division by a series with invertible constant term: the triangular
    /// solve q_n = (a_n - sum_{j=1..n} b_j q_{n-j}) * b_0^{-1}. One inversion
    /// total; every coefficient costs one multiplication by b_0^{-1}, which
    /// is where the p-adic precision-loss ledger gets its per-order term.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let inv0 = rhs.coeffs[0].ring_inv()?;
        let mut out: Vec<R> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.coeffs[i].clone();
            for j in 1..=i {
                if rhs.coeffs[j].is_ring_zero() {
                    continue;
                }
                acc = acc.ring_sub(&rhs.coeffs[j].ring_mul(&out[i - j]));
            }
            out.push(acc.ring_mul(&inv0));
        }
        Ok(TruncatedSeries::new(out))
    }
}
