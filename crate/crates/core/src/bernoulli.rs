//! Bernoulli numbers, Bernoulli polynomials and their 1-periodizations,
//! Euler numbers, and the exact Maclaurin series of tan(b/2).
//!
//! Everything here is exact rational arithmetic; the number sequences are
//! memoized behind mutexes so concurrent callers share the tables.

use std::sync::{LazyLock, Mutex};

use num_traits::{One, Zero};

use crate::rational::{binomial, frac, rat, rat_int, Int, Rat};
use crate::series::TruncatedSeries;

// B_1 = -1/2 convention, forced by the closed form I_1(x) = -1/2 of the
// bosonic integral of the identity function.
static BERNOULLI_CACHE: LazyLock<Mutex<Vec<Rat>>> =
    LazyLock::new(|| Mutex::new(vec![Rat::one()]));

// e_n defined by 2/(e^t + 1) = sum e_n t^n / n!; e_n is the fermionic
// integral of x^n.
static EULER_CACHE: LazyLock<Mutex<Vec<Rat>>> = LazyLock::new(|| Mutex::new(vec![Rat::one()]));

/// B_n with B_1 = -1/2.
pub fn bernoulli_number(n: u64) -> Rat {
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    while cache.len() <= n as usize {
        let m = cache.len() as u64;
        // sum_{k=0}^{m} C(m+1,k) B_k = 0 solved for B_m
        let mut acc = Rat::zero();
        for (k, b) in cache.iter().enumerate() {
            acc += Rat::from(binomial(m + 1, k as u64)) * b;
        }
        cache.push(-acc / Rat::from(Int::from(m + 1)));
    }
    cache[n as usize].clone()
}

/// B_n(x) = sum_{k=0}^{n} C(n,k) B_k x^{n-k}.
pub fn bernoulli_poly(n: u64, x: &Rat) -> Rat {
    bernoulli_number(n); // fill the cache through n in one lock
    let cache = BERNOULLI_CACHE.lock().unwrap();
    let mut acc = Rat::zero();
    let mut xpow = Rat::one(); // x^{n-k}, built from the k=n term down
    for k in (0..=n).rev() {
        acc += Rat::from(binomial(n, k)) * &cache[k as usize] * &xpow;
        xpow *= x;
    }
    acc
}

/// The 1-periodic Bernoulli function: B_n({x}) off the integers, 0 at
/// integers when n = 1, and B_n at integers otherwise.
pub fn bernoulli_fn(n: u64, x: &Rat) -> Rat {
    if x.is_integer() {
        if n == 1 {
            return Rat::zero();
        }
        return bernoulli_number(n);
    }
    bernoulli_poly(n, &frac(x))
}

/// Euler numbers e_0..e_T with 2/(e^t + 1) = sum e_n t^n / n!.
pub fn euler_numbers(t: u64) -> Vec<Rat> {
    let mut cache = EULER_CACHE.lock().unwrap();
    while cache.len() <= t as usize {
        let n = cache.len() as u64;
        // product rule gives 2 e_n = -sum_{k<n} C(n,k) e_k
        let mut acc = Rat::zero();
        for (k, e) in cache.iter().enumerate() {
            acc += Rat::from(binomial(n, k as u64)) * e;
        }
        cache.push(-acc / rat_int(2));
    }
    cache[..=t as usize].to_vec()
}

/// Single Euler number e_n.
pub fn euler_number(n: u64) -> Rat {
    euler_numbers(n).pop().unwrap()
}

/// Maclaurin series of tan(b/2) through order T, computed as the quotient
/// of the sin(b/2) and cos(b/2) series.
pub fn tan_series(t: usize) -> TruncatedSeries<Rat> {
    let mut sin_half = vec![Rat::zero(); t + 1];
    let mut cos_half = vec![Rat::zero(); t + 1];
    // coefficient of b^i in sin(b/2) resp. cos(b/2): (+-1) / (2^i * i!)
    let mut denom = Rat::one(); // 2^i * i!
    for i in 0..=t {
        if i > 0 {
            denom *= rat_int(2 * i as i64);
        }
        let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
        let coeff = rat(sign, 1) / &denom;
        if i % 2 == 1 {
            sin_half[i] = coeff;
        } else {
            cos_half[i] = coeff;
        }
    }
    TruncatedSeries::new(sin_half)
        .div(&TruncatedSeries::new(cos_half))
        .expect("cos(b/2) has constant term 1")
}
