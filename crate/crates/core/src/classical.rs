//! Dedekind sums, Apostol's higher-order sums, the four Hardy sums S, S2,
//! S3, S5, and a floating-point evaluator for their tangent-series forms.
//!
//! The finite sums are exact rationals. The tangent series converge only
//! conditionally term by term, so the evaluator groups them into blocks of
//! one full period of the tangent argument; because each block's coefficient
//! sum vanishes, the remainder past the last block is a finite digamma
//! expression, which the evaluator adds so the returned value converges at
//! floating-point speed instead of O(1/blocks).

use num_integer::gcd;
use num_traits::Zero;
use serde::Serialize;

use crate::bernoulli::bernoulli_fn;
use crate::error::{Error, Result};
use crate::rational::{rat, Rat};

/// Largest modulus k accepted; direct O(k) summation stays fast below this.
pub const MAX_MODULUS: i64 = 10_000;

/// Which of the four Hardy sums is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum HardyKind {
    S,
    S2,
    S3,
    S5,
}

impl HardyKind {
    pub const ALL: [HardyKind; 4] = [HardyKind::S, HardyKind::S2, HardyKind::S3, HardyKind::S5];

    pub fn name(&self) -> &'static str {
        match self {
            HardyKind::S => "S",
            HardyKind::S2 => "S2",
            HardyKind::S3 => "S3",
            HardyKind::S5 => "S5",
        }
    }

    /// The parity hypothesis under which this sum is defined.
    pub fn requirement(&self) -> &'static str {
        match self {
            HardyKind::S => "h + k odd",
            HardyKind::S2 => "h odd and k even",
            HardyKind::S3 => "k odd",
            HardyKind::S5 => "h and k both odd",
        }
    }

    pub fn hypothesis_holds(&self, h: i64, k: i64) -> bool {
        let h_odd = h.rem_euclid(2) == 1;
        let k_odd = k.rem_euclid(2) == 1;
        match self {
            HardyKind::S => h_odd != k_odd,
            HardyKind::S2 => h_odd && !k_odd,
            HardyKind::S3 => k_odd,
            HardyKind::S5 => h_odd && k_odd,
        }
    }

    fn check(&self, h: i64, k: i64) -> Result<()> {
        if self.hypothesis_holds(h, k) {
            Ok(())
        } else {
            Err(Error::Parity {
                kind: self.name(),
                requirement: self.requirement(),
                h,
                k,
            })
        }
    }
}

impl std::fmt::Display for HardyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for HardyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S" => Ok(HardyKind::S),
            "S2" => Ok(HardyKind::S2),
            "S3" => Ok(HardyKind::S3),
            "S5" => Ok(HardyKind::S5),
            other => Err(Error::domain(format!(
                "unknown Hardy sum kind {other:?}; expected one of S, S2, S3, S5"
            ))),
        }
    }
}

/// A validated pair (h, k) with k > 0 and gcd(h, k) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoprimePair {
    h: i64,
    k: i64,
}

impl CoprimePair {
    pub fn new(h: i64, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::domain(format!("modulus k must be positive, got {k}")));
        }
        if k > MAX_MODULUS {
            return Err(Error::ModulusOutOfRange {
                k,
                max: MAX_MODULUS,
            });
        }
        if gcd(h, k) != 1 {
            return Err(Error::NotCoprime { h, k });
        }
        Ok(CoprimePair { h, k })
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn k(&self) -> i64 {
        self.k
    }
}

/// h*j reduced into [0, modulus); safe against overflow for any i64 inputs.
fn residue(h: i64, j: i64, modulus: i64) -> i64 {
    ((h as i128 * j as i128).rem_euclid(modulus as i128)) as i64
}

/// Parity of the Gauss floor [h*j / k].
fn floor_parity(h: i64, j: i64, k: i64) -> bool {
    (h as i128 * j as i128).div_euclid(k as i128) & 1 == 1
}

/// The sawtooth ((a/k)) for 0 <= a < k, as an exact rational.
fn saw(a: i64, k: i64) -> Rat {
    if a == 0 {
        Rat::zero()
    } else {
        rat(a, k) - rat(1, 2)
    }
}

/// Classical Dedekind sum s(h,k) = sum_{a=1}^{k-1} ((a/k)) ((ha/k)).
pub fn dedekind_sum(pair: &CoprimePair) -> Rat {
    let (h, k) = (pair.h, pair.k);
    let mut acc = Rat::zero();
    for a in 1..k {
        acc += saw(a, k) * saw(residue(h, a, k), k);
    }
    acc
}

/// Apostol's generalized sum s(h,k,n) = sum_{a=1}^{k-1} (a/k) Bbar_n(ha/k).
/// The first factor is the plain fraction a/k, not the sawtooth.
pub fn apostol_sum(pair: &CoprimePair, n: u64) -> Rat {
    let (h, k) = (pair.h, pair.k);
    let mut acc = Rat::zero();
    for a in 1..k {
        acc += rat(a, k) * bernoulli_fn(n, &rat(residue(h, a, k), k));
    }
    acc
}

/// Exact finite form of the requested Hardy sum. Errors when the parity
/// hypothesis for that kind fails, naming the hypothesis.
pub fn hardy_sum(kind: HardyKind, pair: &CoprimePair) -> Result<Rat> {
    let (h, k) = (pair.h, pair.k);
    kind.check(h, k)?;
    let mut acc = Rat::zero();
    for j in 1..k {
        let j_odd = j & 1 == 1;
        match kind {
            HardyKind::S => {
                // (-1)^{j+1+[hj/k]}
                let neg = j_odd == floor_parity(h, j, k); // j+1+floor odd
                acc += if neg { rat(-1, 1) } else { rat(1, 1) };
            }
            HardyKind::S2 => {
                let term = saw(j, k) * saw(residue(h, j, k), k);
                acc += if j_odd { -term } else { term };
            }
            HardyKind::S3 => {
                let term = saw(residue(h, j, k), k);
                acc += if j_odd { -term } else { term };
            }
            HardyKind::S5 => {
                let term = saw(j, k);
                let neg = j_odd != floor_parity(h, j, k);
                acc += if neg { -term } else { term };
            }
        }
    }
    Ok(acc)
}

/// Result of period-grouped partial summation of a tangent series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrigPartial {
    /// Partial value including the exact digamma form of the remainder past
    /// the summed blocks; converges to the series value.
    pub value: f64,
    /// |sum of the final summed block|, a convergence indicator.
    pub last_block_magnitude: f64,
}

/// Sums the tangent series for the given Hardy sum over `num_periods` full
/// blocks of the tangent argument (block length k for S2/S3, 2k for S5/S),
/// excluding pole terms exactly as each series' side condition requires, and
/// applying the series prefactor (-1/2pi, 1/pi, 2/pi, 4/pi respectively).
pub fn trig_series_partial(
    kind: HardyKind,
    pair: &CoprimePair,
    num_periods: u64,
) -> Result<TrigPartial> {
    let (h, k) = (pair.h, pair.k);
    kind.check(h, k)?;
    if num_periods < 1 {
        return Err(Error::domain("num_periods must be at least 1".to_string()));
    }

    let pi = std::f64::consts::PI;
    let half_step = matches!(kind, HardyKind::S | HardyKind::S5); // terms 1/(2n-1)
    let block_len = if half_step { 2 * k } else { k } as usize;

    // Tangent coefficients for one block; excluded terms are stored as 0.
    // The table is exact-periodic, so it is computed once with the argument
    // reduced in integers before any floating point happens.
    let mut coeff = vec![0.0f64; block_len];
    for (idx, c) in coeff.iter_mut().enumerate() {
        let j = idx as i64 + 1;
        if half_step {
            let m = 2 * j - 1;
            if kind == HardyKind::S5 && m % k == 0 {
                continue; // side condition 2n-1 != 0 mod k
            }
            let r = residue(h, m, 2 * k);
            // Poles sit exactly at r = k; the S hypothesis (h+k odd) makes
            // h*(2j-1) and k differ in parity mod 2k, so none can occur.
            assert!(r != k, "tangent pole at a term the series retains");
            *c = (pi * r as f64 / (2 * k) as f64).tan();
        } else {
            if kind == HardyKind::S2 && (2 * j) % k == 0 {
                continue; // side condition 2n != 0 mod k
            }
            let r = residue(h, j, k);
            assert!(2 * r != k, "tangent pole at a term the series retains");
            *c = (pi * r as f64 / k as f64).tan();
        }
    }

    let l = block_len as f64;
    let mut total = 0.0f64;
    let mut last_block = 0.0f64;
    for b in 0..num_periods {
        let base = b as f64 * l;
        let mut block = 0.0f64;
        for (idx, c) in coeff.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let n = base + (idx as f64 + 1.0); // n = L*b + j
            let denom = if half_step { 2.0 * n - 1.0 } else { n };
            block += c / denom;
        }
        total += block;
        last_block = block;
    }

    // Remainder past the summed blocks. Each block's coefficients sum to
    // zero, so sum_{b>=B} c_j/(L b + j) = -(1/L) sum_j c_j psi(B + j/L),
    // and likewise with (2j-1)/(2L) when the denominators are 2n-1.
    let blocks = num_periods as f64;
    let mut tail = 0.0f64;
    for (idx, c) in coeff.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let j = idx as f64 + 1.0;
        tail -= if half_step {
            c * digamma(blocks + (2.0 * j - 1.0) / (2.0 * l)) / (2.0 * l)
        } else {
            c * digamma(blocks + j / l) / l
        };
    }

    let prefactor = match kind {
        HardyKind::S => 4.0 / pi,
        HardyKind::S2 => -0.5 / pi,
        HardyKind::S3 => 1.0 / pi,
        HardyKind::S5 => 2.0 / pi,
    };
    let mut value = prefactor * (total + tail);
    if value == 0.0 {
        value = 0.0; // normalize -0.0
    }
    Ok(TrigPartial {
        value,
        last_block_magnitude: last_block.abs(),
    })
}

/// Digamma for positive arguments: recurrence up to x >= 20, then the
/// asymptotic series through the 1/x^10 term (absolute error < 1e-17 there).
fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0f64;
    while x < 20.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + x.ln()
        - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn pair(h: i64, k: i64) -> CoprimePair {
        CoprimePair::new(h, k).unwrap()
    }

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_sum(&pair(1, 1)), rat_int(0));
        assert_eq!(dedekind_sum(&pair(1, 3)), rat(1, 18));
        assert_eq!(dedekind_sum(&pair(1, 2)), rat_int(0));
    }

    #[test]
    fn dedekind_reciprocity_spot() {
        let lhs = dedekind_sum(&pair(5, 7)) + dedekind_sum(&pair(7, 5));
        let rhs = rat(-1, 4) + rat(25 + 49 + 1, 12 * 35);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pair_validation() {
        assert!(CoprimePair::new(2, 4).is_err());
        assert!(CoprimePair::new(1, 0).is_err());
        assert!(CoprimePair::new(1, MAX_MODULUS + 1).is_err());
        assert!(CoprimePair::new(-3, 7).is_ok());
    }

    #[test]
    fn apostol_examples() {
        assert_eq!(apostol_sum(&pair(1, 1), 4), rat_int(0));
        assert_eq!(apostol_sum(&pair(1, 3), 1), rat(1, 18));
        assert_eq!(apostol_sum(&pair(1, 2), 2), rat(-1, 24));
        assert_eq!(apostol_sum(&pair(3, 5), 1), dedekind_sum(&pair(3, 5)));
    }

    #[test]
    fn hardy_examples() {
        assert_eq!(hardy_sum(HardyKind::S, &pair(1, 2)).unwrap(), rat_int(1));
        assert_eq!(hardy_sum(HardyKind::S3, &pair(1, 3)).unwrap(), rat(1, 3));
        assert_eq!(hardy_sum(HardyKind::S3, &pair(2, 3)).unwrap(), rat(-1, 3));
        assert_eq!(hardy_sum(HardyKind::S2, &pair(1, 2)).unwrap(), rat_int(0));
        assert_eq!(hardy_sum(HardyKind::S2, &pair(1, 4)).unwrap(), rat(-1, 8));
        assert_eq!(hardy_sum(HardyKind::S5, &pair(1, 3)).unwrap(), rat(1, 3));
    }

    #[test]
    fn hardy_parity_rejection_names_hypothesis() {
        let err = hardy_sum(HardyKind::S2, &pair(2, 3)).unwrap_err();
        assert!(err.to_string().contains("h odd and k even"), "{err}");
    }

    #[test]
    fn digamma_anchors() {
        assert!((digamma(1.0) + 0.5772156649015329).abs() < 1e-14);
        assert!((digamma(0.5) + 1.9635100260214235).abs() < 1e-14);
        assert!((digamma(2.0) - 0.4227843350984671).abs() < 1e-14);
    }

    #[test]
    fn series_matches_exact_values() {
        let s3 = trig_series_partial(HardyKind::S3, &pair(1, 3), 200).unwrap();
        assert!((s3.value - 1.0 / 3.0).abs() < 1e-8, "got {}", s3.value);
        let s = trig_series_partial(HardyKind::S, &pair(1, 2), 100).unwrap();
        assert!((s.value - 1.0).abs() < 1e-8, "got {}", s.value);
        let s5 = trig_series_partial(HardyKind::S5, &pair(1, 3), 100).unwrap();
        assert!((s5.value - 1.0 / 3.0).abs() < 1e-8, "got {}", s5.value);
        let s2 = trig_series_partial(HardyKind::S2, &pair(1, 4), 100).unwrap();
        assert!((s2.value + 0.125).abs() < 1e-8, "got {}", s2.value);
    }

    #[test]
    fn degenerate_series_is_exactly_zero() {
        let s2 = trig_series_partial(HardyKind::S2, &pair(1, 2), 7).unwrap();
        assert_eq!(s2.value, 0.0);
        assert!(s2.value.is_sign_positive());
        assert_eq!(s2.last_block_magnitude, 0.0);
    }

    #[test]
    fn last_block_magnitude_decreases() {
        let few = trig_series_partial(HardyKind::S3, &pair(2, 5), 10).unwrap();
        let many = trig_series_partial(HardyKind::S3, &pair(2, 5), 1000).unwrap();
        assert!(many.last_block_magnitude < few.last_block_magnitude);
    }

    #[test]
    fn series_rejects_bad_parity() {
        assert!(trig_series_partial(HardyKind::S2, &pair(2, 3), 10).is_err());
    }
}
