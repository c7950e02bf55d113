//! Named verification suites behind `verify --suite NAME`: deterministic
//! batteries of exact identities, each fast enough to run on every build.
//!
//! Suites return structured results instead of panicking so the CLI can
//! print one line per check and exit nonzero only on an actual failure.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bernoulli::{bernoulli_fn, bernoulli_number, euler_number, tan_series};
use crate::classical::{
    apostol_sum, dedekind_sum, hardy_sum, trig_series_partial, CoprimePair, HardyKind,
};
use crate::error::{Error, Result};
use crate::integrals::{
    fermionic_periodic_closed, fermionic_poly, fermionic_trunc, shift_poly,
    sine_fermionic_formal, volkenborn_poly, volkenborn_q_trunc, IntegrandSpec, PeriodicFn,
};
use crate::padic::{mult_order, padic_log, qnum_rat, PadicNumber};
use crate::rational::{rat, rat_int, sawtooth, Int, Rat};
use crate::twisted::TwistedBernoulliContext;

/// One named check with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

/// The suite names `run_suite` accepts.
pub const SUITES: [&str; 4] = [
    "exact-laws",
    "functional-equations",
    "series-identities",
    "oracle-agreement",
];

/// Runs one suite; errors only on an unknown suite name or an internal
/// precondition violation, never on a failed check.
pub fn run_suite(name: &str) -> Result<Vec<CheckResult>> {
    match name {
        "exact-laws" => exact_laws(),
        "functional-equations" => functional_equations(),
        "series-identities" => series_identities(),
        "oracle-agreement" => oracle_agreement(),
        other => Err(Error::domain(format!(
            "unknown suite {other:?}; available: {}",
            SUITES.join(", ")
        ))),
    }
}

fn check(out: &mut Vec<CheckResult>, name: &str, passed: bool, details: String) {
    out.push(CheckResult {
        name: name.to_string(),
        passed,
        details,
    });
}

fn exact_laws() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let mut recip_ok = true;
    let mut recip_detail = String::from("all pairs h < k <= 40 with gcd 1");
    for k in 1..=40i64 {
        for h in 1..=k {
            if num_integer::gcd(h, k) != 1 {
                continue;
            }
            let lhs = dedekind_sum(&CoprimePair::new(h, k)?) + dedekind_sum(&CoprimePair::new(k, h)?);
            let rhs = rat(-1, 4)
                + Rat::new(
                    Int::from(h * h + k * k + 1),
                    Int::from(12 * h * k),
                );
            if lhs != rhs {
                recip_ok = false;
                recip_detail = format!("fails at (h,k) = ({h},{k})");
            }
        }
    }
    check(&mut out, "dedekind_reciprocity", recip_ok, recip_detail);

    let d13 = dedekind_sum(&CoprimePair::new(1, 3)?);
    check(
        &mut out,
        "dedekind_1_3",
        d13 == rat(1, 18),
        format!("s(1,3) = {d13}"),
    );

    let mut apostol_ok = true;
    for k in 1..=20i64 {
        for h in 1..=k {
            if num_integer::gcd(h, k) != 1 {
                continue;
            }
            let pair = CoprimePair::new(h, k)?;
            if apostol_sum(&pair, 1) != dedekind_sum(&pair) {
                apostol_ok = false;
            }
        }
    }
    check(
        &mut out,
        "apostol_order_one_is_dedekind",
        apostol_ok,
        "pairs with k <= 20".to_string(),
    );

    let mut bern_ok = true;
    for n in 1..=30u64 {
        let mut acc = Rat::zero();
        for j in 0..=n {
            acc += Rat::from(crate::rational::binomial(n + 1, j)) * bernoulli_number(j);
        }
        if !acc.is_zero() {
            bern_ok = false;
        }
    }
    check(
        &mut out,
        "bernoulli_recurrence",
        bern_ok,
        "sum_j C(n+1,j) B_j = 0 for n = 1..30".to_string(),
    );

    let mut saw_ok = true;
    for num in -20i64..=20 {
        for den in 1..=9i64 {
            let x = rat(num, den);
            if sawtooth(&x) + sawtooth(&-x.clone()) != Rat::zero() {
                saw_ok = false;
            }
            if sawtooth(&(x.clone() + Rat::one())) != sawtooth(&x) {
                saw_ok = false;
            }
        }
    }
    check(
        &mut out,
        "sawtooth_odd_and_periodic",
        saw_ok,
        "grid of rationals with denominator <= 9".to_string(),
    );

    let frozen: [(HardyKind, i64, i64, Rat); 6] = [
        (HardyKind::S, 1, 2, rat_int(1)),
        (HardyKind::S3, 1, 3, rat(1, 3)),
        (HardyKind::S3, 2, 3, rat(-1, 3)),
        (HardyKind::S5, 1, 3, rat(1, 3)),
        (HardyKind::S2, 1, 2, Rat::zero()),
        (HardyKind::S2, 1, 4, rat(-1, 8)),
    ];
    let mut hardy_ok = true;
    let mut hardy_detail = String::from("six frozen values");
    for (kind, h, k, want) in frozen {
        let got = hardy_sum(kind, &CoprimePair::new(h, k)?)?;
        if got != want {
            hardy_ok = false;
            hardy_detail = format!("{kind}({h},{k}) = {got}, expected {want}");
        }
    }
    check(&mut out, "hardy_frozen_values", hardy_ok, hardy_detail);

    let q = rat_int(3);
    let qn = qnum_rat(4, &q)?;
    check(
        &mut out,
        "qnum_geometric",
        qn == rat_int(40),
        format!("[4:3] = {qn}"),
    );
    let ord = mult_order(5, 6)?;
    check(
        &mut out,
        "multiplicative_order",
        ord == 2,
        format!("order of 5 mod 6 = {ord}"),
    );

    let a = PadicNumber::from_rat(7, &rat(3, 5), 10)?;
    let b = PadicNumber::from_rat(7, &rat(-2, 9), 10)?;
    let c = PadicNumber::from_rat(7, &rat(11, 4), 10)?;
    let lhs = a.add(&b).mul(&c);
    let rhs = a.mul(&c).add(&b.mul(&c));
    let abs = lhs
        .abs_precision()
        .unwrap()
        .min(rhs.abs_precision().unwrap());
    check(
        &mut out,
        "padic_distributivity_spot",
        lhs.agrees_with(&rhs, abs),
        "p = 7, three rational embeddings".to_string(),
    );

    Ok(out)
}

fn functional_equations() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let basket: [Vec<Rat>; 4] = [
        vec![rat_int(1)],
        vec![rat(2, 3), rat(-1, 2), Rat::zero(), rat(5, 7)],
        vec![Rat::zero(), Rat::one(), rat(1, 4), rat(-3, 5), rat(7, 2)],
        vec![rat(-1, 6), rat(11, 3), rat(2, 9), rat(4, 7), rat(-5, 8)],
    ];

    let mut bosonic_ok = true;
    let mut fermionic_ok = true;
    for f in &basket {
        let shifted = shift_poly(f);
        let deriv0 = f.get(1).cloned().unwrap_or_else(Rat::zero);
        if volkenborn_poly(&shifted) - volkenborn_poly(f) != deriv0 {
            bosonic_ok = false;
        }
        let two_f0 = f[0].clone() * rat_int(2);
        if fermionic_poly(&shifted) + fermionic_poly(f) != two_f0 {
            fermionic_ok = false;
        }
    }
    check(
        &mut out,
        "bosonic_shift_equation",
        bosonic_ok,
        "I(f(x+1)) - I(f) = f'(0) on the polynomial basket".to_string(),
    );
    check(
        &mut out,
        "fermionic_shift_equation",
        fermionic_ok,
        "I(f(x+1)) + I(f) = 2 f(0) on the polynomial basket".to_string(),
    );

    let mut exactness_ok = true;
    let mut detail = String::from("sawtooth tables k <= 8, p in {3,5,7}, N <= 4");
    for k in 1..=8i64 {
        for h in 1..=k {
            if num_integer::gcd(h, k) != 1 {
                continue;
            }
            let table = PeriodicFn::sawtooth_table(&CoprimePair::new(h, k)?);
            let spec = IntegrandSpec::Periodic(table.clone());
            for p in [3u64, 5, 7] {
                if k % p as i64 == 0 {
                    continue;
                }
                let rep = fermionic_periodic_closed(&table, p)?;
                for n in 1..=4u32 {
                    let trunc = fermionic_trunc(&spec, p, n)?;
                    let expected = &rep.block_sum
                        * Rat::new(Int::from(p).pow(n), Int::from(rep.modulus));
                    if trunc - rep.branch_for_exponent(n) != expected {
                        exactness_ok = false;
                        detail = format!("fails at (h,k,p,N) = ({h},{k},{p},{n})");
                    }
                }
            }
        }
    }
    check(&mut out, "fermionic_trunc_exactness", exactness_ok, detail);

    let mut residual_ok = true;
    let mut residual_detail = String::from("monomials deg <= 4, p in {3,5,7}, N <= 3");
    for p in [3u64, 5, 7] {
        for deg in 0..=4u64 {
            for n in 1..=3u32 {
                let v = q_shift_identity_residual(p, deg, n)?;
                if v < n as i64 - 2 {
                    residual_ok = false;
                    residual_detail =
                        format!("residual valuation {v} < N - 2 at (p,deg,N) = ({p},{deg},{n})");
                }
            }
        }
    }
    check(
        &mut out,
        "q_shift_identity_residual",
        residual_ok,
        residual_detail,
    );

    Ok(out)
}

fn series_identities() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let lhs = sine_fermionic_formal(13);
    let rhs = tan_series(13).neg();
    let mut formal_ok = true;
    for i in 0..=13 {
        if lhs.coeff(i) != rhs.coeff(i) {
            formal_ok = false;
        }
    }
    check(
        &mut out,
        "sine_integral_is_negated_tangent",
        formal_ok,
        "coefficientwise through order 13".to_string(),
    );

    let t = tan_series(7);
    let tan_ok = *t.coeff(1) == rat(1, 2)
        && t.coeff(2).is_zero()
        && *t.coeff(3) == rat(1, 24)
        && *t.coeff(5) == rat(1, 240);
    check(
        &mut out,
        "tangent_half_angle_coefficients",
        tan_ok,
        "orders 1, 2, 3, 5".to_string(),
    );

    let euler_ok = euler_number(0) == Rat::one()
        && euler_number(1) == rat(-1, 2)
        && euler_number(2).is_zero()
        && euler_number(3) == rat(1, 4);
    check(
        &mut out,
        "euler_number_values",
        euler_ok,
        "orders 0..3".to_string(),
    );

    let spots: [(HardyKind, i64, i64); 4] = [
        (HardyKind::S3, 1, 3),
        (HardyKind::S, 1, 2),
        (HardyKind::S5, 1, 3),
        (HardyKind::S2, 1, 4),
    ];
    let mut series_ok = true;
    let mut series_detail = String::from("four kinds at 200 blocks, tolerance 1e-8");
    for (kind, h, k) in spots {
        let pair = CoprimePair::new(h, k)?;
        let exact = crate::rational::rat_to_f64(&hardy_sum(kind, &pair)?);
        let part = trig_series_partial(kind, &pair, 200)?;
        let err = (part.value - exact).abs();
        if err > 1e-8 {
            series_ok = false;
            series_detail = format!("{kind}({h},{k}): |series - exact| = {err:.3e}");
        }
    }
    check(
        &mut out,
        "tangent_series_matches_finite_sums",
        series_ok,
        series_detail,
    );

    let mut periodic_ok = true;
    for n in 0..=6u64 {
        for num in -15i64..=15 {
            for den in [1i64, 2, 3, 5, 7] {
                let x = rat(num, den);
                let shifted = x.clone() + rat_int(3);
                if bernoulli_fn(n, &x) != bernoulli_fn(n, &shifted) {
                    periodic_ok = false;
                }
            }
        }
    }
    check(
        &mut out,
        "bernoulli_function_periodicity",
        periodic_ok,
        "n <= 6 on a rational grid".to_string(),
    );

    Ok(out)
}

fn oracle_agreement() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let q = Rat::from(Int::from(26u64));
    let ctx = TwistedBernoulliContext::new(5, &q, 0, 6, 6)?;

    let b0 = ctx.twisted_bernoulli_number(0)?;
    let expected = PadicNumber::from_rat(5, &rat(2, 27), ctx.work_precision())?;
    let abs = b0
        .coeff(0)
        .abs_precision()
        .unwrap()
        .min(expected.abs_precision().unwrap());
    check(
        &mut out,
        "constant_term_closed_form",
        b0.coeff(0).agrees_with(&expected, abs),
        "2/(q+1) at q = 26, p = 5".to_string(),
    );

    let mut oracle_ok = true;
    let mut oracle_detail = String::from("n <= 3, N <= 2, p = 5, w = 1");
    for n in 0..=3u64 {
        let b = ctx.twisted_bernoulli_number(n)?;
        for big_n in 1..=2u32 {
            let o = ctx.riemann_oracle(n, big_n)?;
            let v = o.sub(&b).coeff_val_lower_bound().unwrap_or(i64::MAX);
            let floor = big_n as i64 - crate::twisted::oracle_loss(5, n) as i64;
            if v < floor {
                oracle_ok = false;
                oracle_detail = format!("(n,N) = ({n},{big_n}): valuation {v} < {floor}");
            }
        }
    }
    check(
        &mut out,
        "riemann_sum_agreement",
        oracle_ok,
        oracle_detail,
    );

    let mut ladder_ok = true;
    let mut ladder_detail = String::from("q = 1 + 5^M, M in {2,4}, n <= 6");
    for n in 0..=6u64 {
        let bn = bernoulli_number(n);
        let mut prev = i64::MIN;
        for m in [2u32, 4] {
            let qm = Rat::from(Int::one() + Int::from(5u64).pow(m));
            let cm = TwistedBernoulliContext::new(5, &qm, 0, 6, 6)?;
            let b = cm.twisted_bernoulli_number(n)?;
            let classical = cm.scalar_cyclo(&bn)?;
            let v = b
                .sub(&classical)
                .coeff_val_lower_bound()
                .unwrap_or(i64::MAX);
            let floor = m as i64 - crate::twisted::classical_limit_delta(n) as i64;
            if v < floor || v < prev {
                ladder_ok = false;
                ladder_detail = format!("n = {n}, M = {m}: valuation {v}, floor {floor}");
            }
            prev = v;
        }
    }
    check(
        &mut out,
        "classical_limit_ladder",
        ladder_ok,
        ladder_detail,
    );

    let mut defrel_ok = true;
    let mut defrel_detail = String::from("(p, level) in {(5,0), (5,1), (3,1)}");
    for (p, level) in [(5u64, 0u32), (5, 1), (3, 1)] {
        let qp = Rat::from(Int::one() + Int::from(p).pow(2));
        let cx = TwistedBernoulliContext::new(p, &qp, level, 5, 5)?;
        let residual = cx.defining_relation_residual();
        for r in residual.coeffs() {
            let ok = r.is_zero_at_precision()
                && r.coeff_val_lower_bound().unwrap_or(i64::MAX)
                    >= cx.target_precision() as i64;
            if !ok {
                defrel_ok = false;
                defrel_detail = format!("nonvanishing coefficient at (p,level) = ({p},{level})");
            }
        }
    }
    check(
        &mut out,
        "defining_relation_residual",
        defrel_ok,
        defrel_detail,
    );

    let one = IntegrandSpec::Polynomial(vec![Rat::one()]);
    let qn = PadicNumber::from_rat(5, &q, 12)?;
    let v = volkenborn_q_trunc(&one, 5, 2, &qn)?;
    let unit = PadicNumber::one(5, 12);
    let abs = v
        .coeff(0)
        .abs_precision()
        .unwrap()
        .min(unit.abs_precision().unwrap());
    check(
        &mut out,
        "weighted_sum_of_one_is_one",
        v.coeff(0).agrees_with(&unit, abs),
        "telescoping normalization check".to_string(),
    );

    Ok(out)
}

/// v_p of the residual of the q-shift identity
/// q I_q(g(x+1)) - I_q(g) = (q-1) g(0) + ((q-1)/log q) g'(0)
/// for g = x^deg at truncation exponent N, with q = 1 + p^2.
pub fn q_shift_identity_residual(p: u64, deg: u64, big_n: u32) -> Result<i64> {
    let prec = big_n + 12;
    let q_rat = Rat::from(Int::one() + Int::from(p).pow(2));
    let q = PadicNumber::from_rat(p, &q_rat, prec)?;
    let mut coeffs = vec![Rat::zero(); deg as usize + 1];
    coeffs[deg as usize] = Rat::one();
    let shifted = shift_poly(&coeffs);
    let i_g = volkenborn_q_trunc(&IntegrandSpec::Polynomial(coeffs), p, big_n, &q)?;
    let i_g1 = volkenborn_q_trunc(&IntegrandSpec::Polynomial(shifted), p, big_n, &q)?;
    let lhs = i_g1.coeff(0).mul(&q).sub(i_g.coeff(0));
    let one = PadicNumber::one(p, prec);
    let q_minus_1 = q.sub(&one);
    let ratio = q_minus_1.div(&padic_log(&q)?)?;
    let g0 = i64::from(deg == 0);
    let gp0 = i64::from(deg == 1);
    let rhs = q_minus_1.mul_i64(g0).add(&ratio.mul_i64(gp0));
    Ok(lhs.sub(&rhs).val_lower_bound().unwrap_or(i64::MAX))
}
