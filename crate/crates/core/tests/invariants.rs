//! Randomized cross-module invariants: ring laws, functional equations,
//! and exactness identities that must hold on every input, not just the
//! pinned examples.

use num_traits::{One, Zero};
use proptest::prelude::*;

use volkenborn::bernoulli::{bernoulli_fn, bernoulli_number, euler_number};
use volkenborn::classical::{apostol_sum, dedekind_sum, CoprimePair};
use volkenborn::cyclo::CycloElement;
use volkenborn::integrals::{
    fermionic_periodic_closed, fermionic_trunc, shift_poly, IntegrandSpec, PeriodicFn,
};
use volkenborn::padic::{padic_exp, padic_log, qnum_rat, PadicNumber};
use volkenborn::rational::{binomial, pow_rat, rat, rat_int, sawtooth, Int, Rat};
use volkenborn::twisted::TwistedBernoulliContext;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn coprime_pair(max: i64) -> impl Strategy<Value = (i64, i64)> {
    (1..=max, 1..=max).prop_filter("coprime", |(h, k)| num_integer::gcd(*h, *k) == 1)
}

fn odd_prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(3u64), Just(5), Just(7)]
}

fn eval(coeffs: &[Rat], x: &Rat) -> Rat {
    coeffs
        .iter()
        .rev()
        .fold(Rat::zero(), |acc, c| acc * x + c)
}

fn reciprocity_rhs(h: i64, k: i64) -> Rat {
    let hh = Int::from(h);
    let kk = Int::from(k);
    let num = &hh * &hh + &kk * &kk + Int::one();
    Rat::new(num, Int::from(12) * hh * kk) - rat(1, 4)
}

proptest! {
    #[test]
    fn sawtooth_is_odd_and_periodic(x in small_rat()) {
        prop_assert_eq!(sawtooth(&-x.clone()), -sawtooth(&x));
        prop_assert_eq!(sawtooth(&(x.clone() + Rat::one())), sawtooth(&x));
    }

    #[test]
    fn dedekind_reciprocity((h, k) in coprime_pair(500)) {
        let s_hk = dedekind_sum(&CoprimePair::new(h, k).unwrap());
        let s_kh = dedekind_sum(&CoprimePair::new(k, h).unwrap());
        prop_assert_eq!(s_hk + s_kh, reciprocity_rhs(h, k));
    }

    #[test]
    fn dedekind_shift_and_reflection((h, k) in coprime_pair(60)) {
        let pair = CoprimePair::new(h, k).unwrap();
        let shifted = CoprimePair::new(h + k, k).unwrap();
        prop_assert_eq!(dedekind_sum(&shifted), dedekind_sum(&pair));
        // s(k - h, k) = -s(h, k): the sawtooth is odd.
        if k > h {
            let reflected = CoprimePair::new(k - h, k).unwrap();
            prop_assert_eq!(dedekind_sum(&reflected), -dedekind_sum(&pair));
        }
    }

    #[test]
    fn apostol_order_one_is_dedekind((h, k) in coprime_pair(60)) {
        let pair = CoprimePair::new(h, k).unwrap();
        prop_assert_eq!(apostol_sum(&pair, 1), dedekind_sum(&pair));
    }

    #[test]
    fn bernoulli_fn_is_periodic(n in 0u64..8, x in small_rat()) {
        prop_assert_eq!(bernoulli_fn(n, &(x.clone() + Rat::one())), bernoulli_fn(n, &x));
    }

    #[test]
    fn bernoulli_recurrence(n in 2u64..40) {
        // sum_{j<n} C(n,j) B_j = 0 for n >= 2.
        let total: Rat = (0..n)
            .map(|j| Rat::from(binomial(n, j)) * bernoulli_number(j))
            .sum();
        prop_assert_eq!(total, Rat::zero());
    }

    #[test]
    fn euler_shift_identity(n in 0u64..14) {
        // sum_j C(n,j) e_j + e_n = 2 [n = 0], the alternating shift law
        // specialized to monomials.
        let total: Rat = (0..=n)
            .map(|j| Rat::from(binomial(n, j)) * euler_number(j))
            .sum();
        let expected = if n == 0 { rat_int(2) } else { Rat::zero() };
        prop_assert_eq!(total + euler_number(n), expected);
    }

    #[test]
    fn shift_poly_evaluates_at_x_plus_one(
        coeffs in prop::collection::vec(small_rat(), 0..6),
        x in small_rat(),
    ) {
        let shifted = shift_poly(&coeffs);
        prop_assert_eq!(eval(&shifted, &x), eval(&coeffs, &(x + Rat::one())));
    }

    #[test]
    fn qnum_rat_is_geometric(n in 0u64..12, num in -9i64..=9, den in 1i64..=9) {
        let q = rat(num, den);
        prop_assume!(q != Rat::one());
        prop_assume!(!q.is_zero());
        let lhs = qnum_rat(n, &q).unwrap() * (q.clone() - Rat::one());
        prop_assert_eq!(lhs, pow_rat(&q, n as u32) - Rat::one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fermionic_trunc_matches_branch_exactly(
        values in prop::collection::vec(small_rat(), 1..6),
        p in odd_prime(),
        n in 1u32..4,
    ) {
        prop_assume!(values.len() as u64 % p != 0);
        let f = PeriodicFn::new(values.clone()).unwrap();
        let rep = fermionic_periodic_closed(&f, p).unwrap();
        let trunc = fermionic_trunc(&IntegrandSpec::Periodic(f), p, n).unwrap();
        let pn = Rat::from(Int::from(p).pow(n));
        let modulus = rat_int(rep.modulus as i64);
        let expected = rep.block_sum.clone() * pn / modulus;
        prop_assert_eq!(trunc - rep.branch_for_exponent(n), expected);
    }

    #[test]
    fn padic_ring_laws(
        a in small_rat(),
        b in small_rat(),
        c in small_rat(),
        p in odd_prime(),
    ) {
        let prec = 12;
        let x = PadicNumber::from_rat(p, &a, prec).unwrap();
        let y = PadicNumber::from_rat(p, &b, prec).unwrap();
        let z = PadicNumber::from_rat(p, &c, prec).unwrap();
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.mul(&y), y.mul(&x));

        let assoc_l = x.mul(&y).mul(&z);
        let assoc_r = x.mul(&y.mul(&z));
        let abs = assoc_l
            .abs_precision()
            .unwrap_or(i64::MAX)
            .min(assoc_r.abs_precision().unwrap_or(i64::MAX))
            .min(6);
        prop_assert!(assoc_l.agrees_with(&assoc_r, abs));

        let dist_l = x.mul(&y.add(&z));
        let dist_r = x.mul(&y).add(&x.mul(&z));
        let abs = dist_l
            .abs_precision()
            .unwrap_or(i64::MAX)
            .min(dist_r.abs_precision().unwrap_or(i64::MAX))
            .min(6);
        prop_assert!(dist_l.agrees_with(&dist_r, abs));
    }

    #[test]
    fn padic_serde_round_trip(a in small_rat(), p in odd_prime()) {
        let x = PadicNumber::from_rat(p, &a, 9).unwrap();
        let json = serde_json::to_string(&x).unwrap();
        let back: PadicNumber = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn padic_exact_zero_serializes_with_flag(p in odd_prime()) {
        let json = serde_json::to_value(PadicNumber::zero(p)).unwrap();
        prop_assert_eq!(json.get("exact"), Some(&serde_json::Value::Bool(true)));
    }

    #[test]
    fn padic_precision_honesty(a in small_rat(), p in odd_prime()) {
        // The first digits never change when the working precision rises.
        let lo = PadicNumber::from_rat(p, &a, 6).unwrap();
        let hi = PadicNumber::from_rat(p, &a, 12).unwrap();
        let abs = lo
            .abs_precision()
            .unwrap_or(i64::MAX)
            .min(hi.abs_precision().unwrap_or(i64::MAX));
        prop_assert!(lo.agrees_with(&hi, abs));
    }

    #[test]
    fn padic_pow_is_additive(
        num in 1i64..60,
        e1 in -3i64..=3,
        e2 in -3i64..=3,
        p in odd_prime(),
    ) {
        prop_assume!(num % p as i64 != 0);
        let x = PadicNumber::from_rat(p, &rat_int(num), 10).unwrap();
        let joined = x.pow_i64(e1 + e2).unwrap();
        let split = x.pow_i64(e1).unwrap().mul(&x.pow_i64(e2).unwrap());
        let abs = joined
            .abs_precision()
            .unwrap_or(i64::MAX)
            .min(split.abs_precision().unwrap_or(i64::MAX))
            .min(8);
        prop_assert!(joined.agrees_with(&split, abs));
    }

    #[test]
    fn padic_log_is_homomorphism(a in 1i64..40, b in 1i64..40, p in odd_prime()) {
        let prec = 14;
        let one = PadicNumber::one(p, prec);
        let x = one.add(&PadicNumber::from_rat(p, &rat_int(a * p as i64), prec).unwrap());
        let y = one.add(&PadicNumber::from_rat(p, &rat_int(b * p as i64), prec).unwrap());
        let lhs = padic_log(&x.mul(&y)).unwrap();
        let rhs = padic_log(&x).unwrap().add(&padic_log(&y).unwrap());
        let abs = lhs
            .abs_precision()
            .unwrap_or(i64::MAX)
            .min(rhs.abs_precision().unwrap_or(i64::MAX));
        prop_assert!(lhs.agrees_with(&rhs, abs));
    }

    #[test]
    fn padic_exp_inverts_log(a in 1i64..40, p in odd_prime()) {
        let prec = 14;
        let one = PadicNumber::one(p, prec);
        let x = one.add(&PadicNumber::from_rat(p, &rat_int(a * p as i64), prec).unwrap());
        let back = padic_exp(&padic_log(&x).unwrap()).unwrap();
        let abs = back
            .abs_precision()
            .unwrap_or(i64::MAX)
            .min(x.abs_precision().unwrap_or(i64::MAX));
        prop_assert!(back.agrees_with(&x, abs));
    }

    #[test]
    fn cyclo_ring_laws(
        a0 in small_rat(), a1 in small_rat(),
        b0 in small_rat(), b1 in small_rat(),
        c0 in small_rat(), c1 in small_rat(),
    ) {
        let p = 3;
        let mk = |u: &Rat, v: &Rat| {
            CycloElement::new(p, 1, vec![
                PadicNumber::from_rat(p, u, 10).unwrap(),
                PadicNumber::from_rat(p, v, 10).unwrap(),
            ])
            .unwrap()
        };
        let x = mk(&a0, &a1);
        let y = mk(&b0, &b1);
        let z = mk(&c0, &c1);
        prop_assert_eq!(x.add(&y), y.add(&x));

        let comm_l = x.mul(&y);
        let comm_r = y.mul(&x);
        let abs = agree_bound(&comm_l, &comm_r);
        prop_assert!(comm_l.agrees_with(&comm_r, abs));

        let assoc_l = x.mul(&y).mul(&z);
        let assoc_r = x.mul(&y.mul(&z));
        let abs = agree_bound(&assoc_l, &assoc_r);
        prop_assert!(assoc_l.agrees_with(&assoc_r, abs));

        let dist_l = x.mul(&y.add(&z));
        let dist_r = x.mul(&y).add(&x.mul(&z));
        let abs = agree_bound(&dist_l, &dist_r);
        prop_assert!(dist_l.agrees_with(&dist_r, abs));
    }

    #[test]
    fn cyclo_serde_round_trip(a0 in small_rat(), a1 in small_rat()) {
        let p = 3;
        let x = CycloElement::new(p, 1, vec![
            PadicNumber::from_rat(p, &a0, 8).unwrap(),
            PadicNumber::from_rat(p, &a1, 8).unwrap(),
        ])
        .unwrap();
        let json = serde_json::to_string(&x).unwrap();
        let back: CycloElement = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }
}

fn agree_bound(a: &CycloElement, b: &CycloElement) -> i64 {
    a.min_abs_precision()
        .unwrap_or(i64::MAX)
        .min(b.min_abs_precision().unwrap_or(i64::MAX))
        .min(5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twisted_poly_binomial_addition(
        n in 0u64..=5,
        z1 in small_rat(),
        z2 in small_rat(),
    ) {
        // b*_n(z1 + z2) = sum_k C(n,k) z1^(n-k) b*_k(z2), exactly in-ring.
        let p = 3;
        let q = rat_int(10);
        let ctx = TwistedBernoulliContext::new(p, &q, 0, 5, 4).unwrap();
        let lhs = ctx
            .twisted_bernoulli_poly(n, &(z1.clone() + z2.clone()))
            .unwrap();
        let mut rhs = CycloElement::zero(p, 0).unwrap();
        for k in 0..=n {
            let term = ctx.twisted_bernoulli_poly(k, &z2).unwrap();
            let scale = Rat::from(binomial(n, k)) * pow_rat(&z1, (n - k) as u32);
            if !scale.is_zero() {
                rhs = rhs.add(&term.mul_rat(&scale));
            }
        }
        let abs = agree_bound(&lhs, &rhs);
        prop_assert!(lhs.agrees_with(&rhs, abs));
    }
}

/// The stored tables really have the period they declare: regenerating
/// from the defining formulas over three periods reproduces every entry.
#[test]
fn period_claims_hold_over_three_periods() {
    for k in 1i64..=8 {
        for h in 1..=k {
            if num_integer::gcd(h, k) != 1 {
                continue;
            }
            let pair = CoprimePair::new(h, k).unwrap();

            let saw = PeriodicFn::sawtooth_table(&pair);
            for x in 0..3 * saw.period() {
                let direct = sawtooth(&Rat::new(
                    Int::from(h) * Int::from(x),
                    Int::from(k),
                ));
                assert_eq!(saw.value_at(x), &direct, "sawtooth h={h} k={k} x={x}");
            }

            let sign = PeriodicFn::sign_table(&pair);
            for x in 0..3 * sign.period() {
                let floor = (h as i128 * x as i128).div_euclid(2 * k as i128);
                let direct = if floor & 1 == 0 { rat_int(1) } else { rat_int(-1) };
                assert_eq!(sign.value_at(x), &direct, "sign h={h} k={k} x={x}");
            }
        }
    }
}

/// Truncated values converge p-adically to the branch the closed form
/// predicts: the gap B p^N / M has valuation growing linearly in N.
#[test]
fn fermionic_limit_is_p_adic() {
    let f = PeriodicFn::new(vec![rat_int(1), rat_int(0)]).unwrap();
    let rep = fermionic_periodic_closed(&f, 3).unwrap();
    for n in 1..=6u32 {
        let trunc = fermionic_trunc(&IntegrandSpec::Periodic(f.clone()), 3, n).unwrap();
        let gap = trunc - rep.branch_for_exponent(n);
        // modulus 2, block sum 1: the gap is exactly 3^N / 2.
        assert_eq!(gap, Rat::new(Int::from(3).pow(n), Int::from(2)));
    }
}
