//! The acceptance gate: one test per shipping criterion, each printing a
//! single PASS/FAIL line (visible under --nocapture). Random cases are
//! seeded, so every run checks the same instances.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use volkenborn::audit::{audit_grid, audit_hardy_identity, reduction_audit, MatchClass};
use volkenborn::bernoulli::{bernoulli_number, tan_series};
use volkenborn::classical::{
    dedekind_sum, hardy_sum, trig_series_partial, CoprimePair, HardyKind,
};
use volkenborn::integrals::{
    fermionic_periodic_closed, fermionic_poly, fermionic_trunc, shift_poly,
    sine_fermionic_formal, volkenborn_poly, IntegrandSpec, PeriodicFn,
};
use volkenborn::rational::{rat, rat_int, rat_to_f64, Int, Rat};
use volkenborn::twisted::{classical_limit_delta, oracle_loss, TwistedBernoulliContext};
use volkenborn::verify::q_shift_identity_residual;

fn criterion(label: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {label}: PASS"),
        Err(cause) => {
            println!("criterion {label}: FAIL");
            resume_unwind(cause);
        }
    }
}

fn one_plus_p_pow(p: u64, m: u32) -> Rat {
    Rat::from(Int::from(1u32) + Int::from(p).pow(m))
}

fn random_coprime_pair(rng: &mut ChaCha8Rng, max: i64) -> (i64, i64) {
    loop {
        let h = rng.random_range(1..=max);
        let k = rng.random_range(1..=max);
        if num_integer::gcd(h, k) == 1 {
            return (h, k);
        }
    }
}

#[test]
fn criterion_01_dedekind_reciprocity() {
    criterion("01 dedekind-reciprocity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for _ in 0..200 {
            let (h, k) = random_coprime_pair(&mut rng, 500);
            let s_hk = dedekind_sum(&CoprimePair::new(h, k).unwrap());
            let s_kh = dedekind_sum(&CoprimePair::new(k, h).unwrap());
            let hh = Int::from(h);
            let kk = Int::from(k);
            let rhs = Rat::new(
                &hh * &hh + &kk * &kk + Int::from(1u32),
                Int::from(12) * hh * kk,
            ) - rat(1, 4);
            assert_eq!(s_hk + s_kh, rhs, "reciprocity fails at h={h} k={k}");
        }
        assert_eq!(
            dedekind_sum(&CoprimePair::new(1, 3).unwrap()),
            rat(1, 18),
            "s(1,3) != 1/18"
        );
    });
}

#[test]
fn criterion_02_sine_integrates_to_negative_tangent() {
    criterion("02 sine-formal-integration", || {
        let lhs = sine_fermionic_formal(13);
        let rhs = tan_series(13).neg();
        assert_eq!(lhs.coeffs().len(), 14);
        for (j, (a, b)) in lhs.coeffs().iter().zip(rhs.coeffs()).enumerate() {
            assert_eq!(a, b, "coefficient of b^{j} differs");
        }
    });
}

#[test]
fn criterion_03_shift_functional_equations() {
    criterion("03 shift-functional-equations", || {
        // Closed forms: I(f(x+1)) - I(f) = f'(0) and I(f(x+1)) + I(f) = 2 f(0),
        // exactly, on seeded random polynomials of degree <= 4.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for _ in 0..50 {
            let deg = rng.random_range(0..=4usize);
            let coeffs: Vec<Rat> = (0..=deg)
                .map(|_| rat(rng.random_range(-30..=30), rng.random_range(1..=10)))
                .collect();
            let shifted = shift_poly(&coeffs);

            let f_prime_0 = coeffs.get(1).cloned().unwrap_or_else(|| rat_int(0));
            assert_eq!(
                volkenborn_poly(&shifted) - volkenborn_poly(&coeffs),
                f_prime_0,
                "flat shift law fails on {coeffs:?}"
            );

            let two_f0 = coeffs[0].clone() * rat_int(2);
            assert_eq!(
                fermionic_poly(&shifted) + fermionic_poly(&coeffs),
                two_f0,
                "alternating shift law fails on {coeffs:?}"
            );
        }

        // Truncated q-deformed shift: residual valuation >= N - 2.
        for p in [3u64, 5, 7] {
            for deg in 0..=4u64 {
                for big_n in 1..=5u32 {
                    let v = q_shift_identity_residual(p, deg, big_n).unwrap();
                    let floor = big_n as i64 - 2;
                    assert!(
                        v >= floor,
                        "q-shift residual p={p} deg={deg} N={big_n}: v={v} < {floor}"
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_04_fermionic_evaluator_exactness() {
    criterion("04 fermionic-exactness", || {
        let mut corpus: Vec<PeriodicFn> = Vec::new();
        for k in 1i64..=12 {
            for h in 1..=k {
                if num_integer::gcd(h, k) == 1 {
                    corpus.push(PeriodicFn::sawtooth_table(
                        &CoprimePair::new(h, k).unwrap(),
                    ));
                }
            }
        }
        for k in 1i64..=6 {
            for h in 1..=k {
                if num_integer::gcd(h, k) == 1 {
                    corpus.push(PeriodicFn::sign_table(&CoprimePair::new(h, k).unwrap()));
                }
            }
        }

        let mut checked = 0u64;
        for f in &corpus {
            for p in [3u64, 5, 7] {
                let m = num_integer::lcm(2, f.period());
                if num_integer::gcd(p, m) != 1 {
                    continue;
                }
                let rep = fermionic_periodic_closed(f, p).unwrap();
                for n in 1..=5u32 {
                    let trunc =
                        fermionic_trunc(&IntegrandSpec::Periodic(f.clone()), p, n).unwrap();
                    let expected = rep.block_sum.clone()
                        * Rat::new(Int::from(p).pow(n), Int::from(rep.modulus));
                    assert_eq!(
                        trunc - rep.branch_for_exponent(n),
                        expected,
                        "exactness fails: period {} p={p} N={n}",
                        f.period()
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 500, "corpus unexpectedly small: {checked}");
    });
}

#[test]
fn criterion_05_series_match_finite_forms() {
    criterion("05 series-vs-finite", || {
        let blocks = 10_000;
        let mut checked = 0u64;
        for k in 1i64..=30 {
            for h in 1..=k {
                if num_integer::gcd(h, k) != 1 {
                    continue;
                }
                let pair = CoprimePair::new(h, k).unwrap();
                for kind in HardyKind::ALL {
                    if !kind.hypothesis_holds(h, k) {
                        continue;
                    }
                    let exact = rat_to_f64(&hardy_sum(kind, &pair).unwrap());
                    let partial = trig_series_partial(kind, &pair, blocks).unwrap();
                    let err = (partial.value - exact).abs();
                    assert!(
                        err < 1e-6,
                        "{} h={h} k={k}: |{} - {exact}| = {err}",
                        kind.name(),
                        partial.value
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 200, "too few admissible pairs: {checked}");
    });
}

#[test]
fn criterion_06_twisted_oracle_agreement() {
    criterion("06 twisted-oracle", || {
        for p in [3u64, 5] {
            for w_level in [0u32, 1] {
                let q = one_plus_p_pow(p, 2);
                let ctx = TwistedBernoulliContext::new(p, &q, w_level, 6, 8).unwrap();
                for n in 0..=6u64 {
                    let b = ctx.twisted_bernoulli_number(n).unwrap();
                    for big_n in 1..=5u32 {
                        let oracle = ctx.riemann_oracle(n, big_n).unwrap();
                        let v = oracle
                            .sub(&b)
                            .coeff_val_lower_bound()
                            .unwrap_or(i64::MAX);
                        let floor = big_n as i64 - oracle_loss(p, n) as i64;
                        assert!(
                            v >= floor,
                            "p={p} w_level={w_level} n={n} N={big_n}: v={v} < {floor}"
                        );
                    }
                }

                // b*_0 = 2/(q+1) at working precision (exact for the
                // untwisted ring, where the closed form is rational).
                if w_level == 0 {
                    let b0 = ctx.twisted_bernoulli_number(0).unwrap();
                    let expected = ctx
                        .scalar_cyclo(&(rat_int(2) / (q + rat_int(1))))
                        .unwrap();
                    let v = b0
                        .sub(&expected)
                        .coeff_val_lower_bound()
                        .unwrap_or(i64::MAX);
                    assert!(
                        v >= ctx.work_precision() as i64 - 1,
                        "p={p}: b*_0 != 2/(q+1): v={v}"
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_07_classical_limit_ladder() {
    criterion("07 classical-ladder", || {
        for p in [3u64, 5] {
            for n in 0..=8u64 {
                let bn = bernoulli_number(n);
                let mut prev = i64::MIN;
                for m in [2u32, 4, 6] {
                    let q = one_plus_p_pow(p, m);
                    let ctx =
                        TwistedBernoulliContext::new(p, &q, 0, 8, m + 3).unwrap();
                    let b = ctx.twisted_bernoulli_number(n).unwrap();
                    let classical = ctx.scalar_cyclo(&bn).unwrap();
                    let v = b
                        .sub(&classical)
                        .coeff_val_lower_bound()
                        .unwrap_or(i64::MAX);
                    let floor = m as i64 - classical_limit_delta(n) as i64;
                    assert!(v >= floor, "p={p} n={n} M={m}: v={v} < {floor}");
                    assert!(
                        v >= prev,
                        "p={p} n={n} M={m}: v={v} dropped below {prev}"
                    );
                    prev = v;
                }
            }
        }
    });
}

#[test]
fn criterion_08_defining_relation() {
    criterion("08 defining-relation", || {
        for p in [3u64, 5] {
            for w_level in [0u32, 1] {
                for m in [2u32, 3] {
                    let q = one_plus_p_pow(p, m);
                    let target = 6u32;
                    let ctx =
                        TwistedBernoulliContext::new(p, &q, w_level, 6, target).unwrap();
                    let residual = ctx.defining_relation_residual();
                    for (j, c) in residual.coeffs().iter().enumerate() {
                        assert!(
                            c.is_zero_at_precision(),
                            "p={p} w_level={w_level} M={m}: coeff {j} nonzero"
                        );
                        let bound = c.min_abs_precision().unwrap_or(i64::MAX);
                        assert!(
                            bound >= target as i64,
                            "p={p} w_level={w_level} M={m}: coeff {j} bound {bound}"
                        );
                    }
                }
            }
        }
    });
}

#[test]
fn criterion_09_audit_grid_completeness() {
    criterion("09 audit-completeness", || {
        let kmax = 12i64;
        let pset = [3u64, 5, 7];
        let reports = audit_grid(kmax, &pset, 200).unwrap();

        let mut seen: BTreeSet<(String, i64, i64, u64)> = BTreeSet::new();
        for r in &reports {
            let h = r.params["h"].as_i64().unwrap();
            let k = r.params["k"].as_i64().unwrap();
            let p = r.params["p"].as_u64().unwrap();
            let kind = r
                .params
                .get("kind")
                .map(|v| v.as_str().unwrap().to_string())
                .unwrap_or_default();
            assert!(
                seen.insert((format!("{}:{kind}", r.identity), h, k, p)),
                "duplicate row"
            );
        }
        for k in 1..=kmax {
            for h in 1..=k {
                if num_integer::gcd(h, k) != 1 {
                    continue;
                }
                for p in pset {
                    if k % p as i64 == 0 {
                        continue;
                    }
                    for kind in HardyKind::ALL {
                        if kind.hypothesis_holds(h, k) {
                            assert!(
                                seen.contains(&(
                                    format!(
                                        "hardy_{}_fermionic:{}",
                                        kind.name(),
                                        kind.name()
                                    ),
                                    h,
                                    k,
                                    p
                                )),
                                "missing {} row h={h} k={k} p={p}",
                                kind.name()
                            );
                        }
                    }
                    if k % 2 == 1 {
                        assert!(
                            seen.contains(&(
                                "sawtooth_integral_series:".to_string(),
                                h,
                                k,
                                p
                            )),
                            "missing sawtooth row h={h} k={k} p={p}"
                        );
                    }
                }
            }
        }

        // Pinned classifications. The alternating-sum identities are
        // recorded, never asserted: the audit output is the deliverable.
        let s2 = audit_hardy_identity(HardyKind::S2, &CoprimePair::new(1, 2).unwrap(), 5)
            .unwrap();
        assert_eq!(s2.match_class, MatchClass::Exact, "{s2:?}");

        let s3 = audit_hardy_identity(HardyKind::S3, &CoprimePair::new(1, 3).unwrap(), 5)
            .unwrap();
        assert_eq!(
            s3.match_class,
            MatchClass::BranchDependentMismatch,
            "{s3:?}"
        );
        let branches = &s3.rhs["scaled_branches"];
        assert_eq!(branches["1"], "0/1", "{branches}");
        assert_eq!(branches["5"], "1/6", "{branches}");
        println!(
            "criterion 09 NOTE: the branch set above is computed with the genuine \
             alternating weight (-1)^x, under which the residue-5 branch of the \
             period-3 sawtooth is 1/6 and the residue-1 branch is 0. Folding the \
             sign through the period first, i.e. weighting by (-1)^(x mod 3), \
             yields -1/18 and -1/9 instead; that variant contradicts the \
             truncated sums this library computes (and the constant-function \
             value 1), so it is reported here as a note, not as the result."
        );
    });
}

#[test]
fn criterion_10_determinism_and_stability() {
    criterion("10 determinism", || {
        let run = |args: &[&str]| {
            let out = Command::new(env!("CARGO_BIN_EXE_volk"))
                .args(args)
                .output()
                .expect("binary runs");
            (out.status.code(), out.stdout)
        };
        for args in [
            vec!["dedekind", "171", "188"],
            vec!["hardy", "S5", "3", "7"],
            vec!["audit", "--grid", "6", "--p-set", "3,5,7"],
            vec!["audit", "--grid", "6", "--p-set", "3,5,7", "--format", "csv"],
            vec!["twisted-bernoulli", "3", "2", "1", "3"],
            vec!["audit", "--reduction", "1", "5", "2", "5", "--ladder", "2,4"],
        ] {
            let a = run(&args);
            let b = run(&args);
            assert_eq!(a, b, "{args:?} not byte-identical");
        }

        // Raising precision never flips an exact classification: extending
        // the reduction ladder keeps the class, and doubling the series
        // blocks keeps every grid classification.
        let short = reduction_audit(1, 5, 2, 5, &[2, 4]).unwrap();
        let long = reduction_audit(1, 5, 2, 5, &[2, 4, 6]).unwrap();
        assert_eq!(short.match_class, long.match_class);

        let coarse = audit_grid(6, &[3, 5], 200).unwrap();
        let fine = audit_grid(6, &[3, 5], 400).unwrap();
        assert_eq!(coarse.len(), fine.len());
        for (a, b) in coarse.iter().zip(&fine) {
            assert_eq!(a.identity, b.identity);
            assert_eq!(a.params, b.params);
            assert_eq!(a.match_class, b.match_class, "{} {:?}", a.identity, a.params);
        }
    });
}
