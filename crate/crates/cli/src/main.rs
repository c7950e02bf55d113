//! `volk`: command-line front end for the volkenborn library.
//!
//! Computes lattice-point sums (dedekind, apostol, hardy), evaluates
//! integrals over the p-adic integers (integrate), builds twisted
//! q-Bernoulli numbers (twisted-bernoulli, twisted-dedekind), runs the
//! self-checking suites (verify), and emits identity-audit reports
//! (audit). Every visible number is exact: a rational "num/den" string
//! or a p-adic digit record. The only floats are the explicitly tagged
//! series partials inside audit rows.
//!
//! Exit codes: 0 success, 1 bad arguments or a violated precondition,
//! 2 internal precision exhaustion.

use std::path::PathBuf;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use volkenborn::audit::{
    audit_grid, reduction_audit, reports_to_csv, reports_to_json, twisted_dedekind_sum,
    TwistedDedekindParams,
};
use volkenborn::classical::{
    apostol_sum, dedekind_sum, hardy_sum, CoprimePair, HardyKind,
};
use volkenborn::cyclo::CycloElement;
use volkenborn::integrals::{
    fermionic_periodic_closed, fermionic_poly, fermionic_trunc, volkenborn_poly,
    volkenborn_q_trunc, IntegrandSpec, PeriodicFn,
};
use volkenborn::padic::{is_odd_prime, PadicNumber};
use volkenborn::rational::{rat_from_str, rat_to_string, Int, Rat};
use volkenborn::twisted::{root_of_unity, TwistedBernoulliContext};
use volkenborn::verify::run_suite;
use volkenborn::{Error, Result};

#[derive(Parser)]
#[command(
    name = "volk",
    version,
    about = "Exact Dedekind/Apostol/Hardy sums, p-adic integrals, and identity audits"
)]
struct Cli {
    /// Output format; csv applies to audit reports only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dedekind sum s(h,k) = sum_a ((a/k))((ha/k)) for coprime h, k.
    Dedekind { h: i64, k: i64 },

    /// Order-n sum s(h,k,n) = sum_a (a/k) B_n({ha/k}).
    Apostol { h: i64, k: i64, n: u64 },

    /// Alternating finite sum of the given kind: S, S2, S3, or S5.
    Hardy { kind: String, h: i64, k: i64 },

    /// Integrate a polynomial or periodic table over the p-adic integers.
    Integrate {
        /// Measure: "fermionic" (alternating), "volkenborn" (flat), or "q" (weighted q^x).
        kind: String,

        /// Polynomial coefficients c0,c1,... as rationals.
        #[arg(long, value_name = "C0,C1,...")]
        poly: Option<String>,

        /// One period of values v0,v1,... as rationals.
        #[arg(long, value_name = "V0,V1,...")]
        table: Option<String>,

        /// Degree of a root-of-unity-twisted monomial (kind q only).
        #[arg(long)]
        degree: Option<u64>,

        /// Twist level with --degree: the twist is a primitive p^LEVEL-th root of unity.
        #[arg(long, value_name = "LEVEL", default_value_t = 1)]
        w_level: u32,

        /// Odd prime.
        #[arg(long)]
        p: Option<u64>,

        /// Truncation exponent: sum over x < p^N instead of taking the closed form.
        #[arg(long = "N")]
        n: Option<u32>,

        /// Deformation parameter for kind q: "1+p^M", "digits:d0,d1,...", or a rational.
        #[arg(long)]
        q: Option<String>,

        /// Working precision for kind q (default N + 12).
        #[arg(long)]
        precision: Option<u32>,
    },

    /// The n-th twisted q-Bernoulli number at q = 1 + p^M, twist level LEVEL.
    TwistedBernoulli {
        /// Odd prime.
        p: u64,
        /// q = 1 + p^M.
        m: u32,
        /// Twist by a primitive p^LEVEL-th root of unity (0 = untwisted).
        level: u32,
        /// Index of the number.
        n: u64,

        /// Series order (defaults to n).
        #[arg(long = "T")]
        t: Option<u64>,

        /// Target precision in p-adic digits (defaults to M + 4).
        #[arg(long)]
        precision: Option<u32>,

        /// Dump all coefficients through T with their precision ledger.
        #[arg(long)]
        series: bool,
    },

    /// Twisted sum over residues mod k weighted by twisted q-Bernoulli polynomials.
    TwistedDedekind {
        h: i64,
        /// Modulus; the prime p must divide k.
        k: i64,
        /// Polynomial order.
        m: u64,
        /// Odd prime dividing k.
        p: u64,
        /// q = 1 + p^MQ.
        #[arg(value_name = "MQ")]
        m_q: u32,
        /// Twist by a primitive p^LEVEL-th root of unity (0 = untwisted).
        level: u32,

        /// Series order (defaults to m).
        #[arg(long = "T")]
        t: Option<u64>,

        /// Target precision in p-adic digits (defaults to MQ + m*(1 + v_p(k)) + 6).
        #[arg(long)]
        precision: Option<u32>,
    },

    /// Run a named self-check suite and print its results.
    Verify {
        /// exact-laws, functional-equations, series-identities, or oracle-agreement.
        #[arg(long)]
        suite: String,
    },

    /// Evaluate identity audits and emit one classification row per case.
    Audit {
        /// Audit every admissible (kind, h, k, p) with k up to KMAX.
        #[arg(long, value_name = "KMAX")]
        grid: Option<i64>,

        /// Odd primes for the grid, comma-separated.
        #[arg(long = "p-set", value_name = "P1,P2,...", value_delimiter = ',')]
        p_set: Vec<u64>,

        /// Series blocks behind the float column of series rows.
        #[arg(long, default_value_t = 200)]
        periods: u64,

        /// Ladder audit of one twisted sum: H K M P.
        #[arg(long, value_name = "H K M P", num_args = 4, allow_negative_numbers = true)]
        reduction: Option<Vec<i64>>,

        /// Exponents for q = 1 + p^M along the ladder, comma-separated.
        #[arg(long, value_name = "M1,M2,...", value_delimiter = ',')]
        ladder: Vec<u32>,
    },
}

/// What a subcommand hands back: the full output text and the exit code.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    emit_stdout(&e.to_string().trim_end_matches('\n').to_string())
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };

    let out_path = cli.out.clone();
    match run(cli) {
        Ok(output) => {
            if let Some(path) = out_path {
                if let Err(e) = std::fs::write(&path, format!("{}\n", output.text)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
                output.code
            } else {
                let write_code = emit_stdout(&output.text);
                if write_code != 0 {
                    write_code
                } else {
                    output.code
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Prints one line-terminated payload; a consumer hanging up early (head,
/// a closed pipe) is not an error.
fn emit_stdout(text: &str) -> i32 {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match writeln!(lock, "{text}").and_then(|()| lock.flush()) {
        Ok(()) => 0,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: cannot write to stdout: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<Output> {
    if cli.format == Format::Csv && !matches!(cli.cmd, Cmd::Audit { .. }) {
        return Err(Error::domain(
            "csv format applies to audit reports; other subcommands emit json".to_string(),
        ));
    }
    match cli.cmd {
        Cmd::Dedekind { h, k } => {
            let pair = CoprimePair::new(h, k)?;
            Ok(Output::ok(value_json(&dedekind_sum(&pair))))
        }
        Cmd::Apostol { h, k, n } => {
            let pair = CoprimePair::new(h, k)?;
            Ok(Output::ok(value_json(&apostol_sum(&pair, n))))
        }
        Cmd::Hardy { kind, h, k } => {
            let kind = parse_kind(&kind)?;
            let pair = CoprimePair::new(h, k)?;
            Ok(Output::ok(value_json(&hardy_sum(kind, &pair)?)))
        }
        Cmd::Integrate {
            kind,
            poly,
            table,
            degree,
            w_level,
            p,
            n,
            q,
            precision,
        } => run_integrate(IntegrateArgs {
            kind,
            poly,
            table,
            degree,
            w_level,
            p,
            n,
            q,
            precision,
        }),
        Cmd::TwistedBernoulli {
            p,
            m,
            level,
            n,
            t,
            precision,
            series,
        } => {
            require_odd_prime(p)?;
            let q_rat = one_plus_p_pow(p, m);
            let t = t.unwrap_or(n);
            let target = precision.unwrap_or(m + 4);
            let ctx = TwistedBernoulliContext::new(p, &q_rat, level, t as usize, target)?;
            if series {
                let dump = ctx.series_dump();
                return Ok(Output::ok(pretty(&dump)));
            }
            let b = ctx.twisted_bernoulli_number(n)?;
            let doc = serde_json::json!({
                "n": n,
                "q": rat_to_string(&q_rat),
                "w_level": level,
                "target_precision": ctx.target_precision(),
                "work_precision": ctx.work_precision(),
                "value": ring_json(&b),
            });
            Ok(Output::ok(pretty(&doc)))
        }
        Cmd::TwistedDedekind {
            h,
            k,
            m,
            p,
            m_q,
            level,
            t,
            precision,
        } => {
            require_odd_prime(p)?;
            let q_rat = one_plus_p_pow(p, m_q);
            let t = t.unwrap_or(m);
            let target = precision.unwrap_or_else(|| default_twisted_sum_precision(p, k, m, m_q));
            let ctx = TwistedBernoulliContext::new(p, &q_rat, level, t as usize, target)?;
            let params = TwistedDedekindParams { h, k, m, ctx: &ctx };
            let s = twisted_dedekind_sum(&params)?;
            let doc = serde_json::json!({
                "h": h,
                "k": k,
                "m": m,
                "q": rat_to_string(&q_rat),
                "w_level": level,
                "target_precision": ctx.target_precision(),
                "work_precision": ctx.work_precision(),
                "value": ring_json(&s),
            });
            Ok(Output::ok(pretty(&doc)))
        }
        Cmd::Verify { suite } => {
            let results = run_suite(&suite)?;
            let all_passed = results.iter().all(|r| r.passed);
            let text = pretty(&serde_json::to_value(&results).expect("results serialize"));
            if all_passed {
                Ok(Output::ok(text))
            } else {
                let failed: Vec<&str> = results
                    .iter()
                    .filter(|r| !r.passed)
                    .map(|r| r.name.as_str())
                    .collect();
                eprintln!("error: suite {suite} failed: {}", failed.join(", "));
                Ok(Output { text, code: 1 })
            }
        }
        Cmd::Audit {
            grid,
            p_set,
            periods,
            reduction,
            ladder,
        } => run_audit(grid, &p_set, periods, reduction.as_deref(), &ladder, cli.format),
    }
}

struct IntegrateArgs {
    kind: String,
    poly: Option<String>,
    table: Option<String>,
    degree: Option<u64>,
    w_level: u32,
    p: Option<u64>,
    n: Option<u32>,
    q: Option<String>,
    precision: Option<u32>,
}

fn run_integrate(args: IntegrateArgs) -> Result<Output> {
    let picked = [
        args.poly.is_some(),
        args.table.is_some(),
        args.degree.is_some(),
    ]
    .iter()
    .filter(|b| **b)
    .count();
    if picked != 1 {
        return Err(Error::domain(
            "pass exactly one integrand: --poly, --table, or --degree".to_string(),
        ));
    }

    match args.kind.as_str() {
        "fermionic" => {
            if args.degree.is_some() {
                return Err(Error::domain(
                    "--degree integrands require kind q (the twist rides the q-weight)"
                        .to_string(),
                ));
            }
            if args.q.is_some() {
                return Err(Error::domain(
                    "--q applies to kind q only".to_string(),
                ));
            }
            if let Some(coeff_list) = &args.poly {
                let coeffs = parse_rat_list(coeff_list)?;
                match args.n {
                    None => Ok(Output::ok(value_json(&fermionic_poly(&coeffs)))),
                    Some(n) => {
                        let p = required(args.p, "--p")?;
                        let f = IntegrandSpec::Polynomial(coeffs);
                        Ok(Output::ok(value_json(&fermionic_trunc(&f, p, n)?)))
                    }
                }
            } else {
                let values = parse_rat_list(args.table.as_ref().expect("table picked"))?;
                let f = PeriodicFn::new(values)?;
                let p = required(args.p, "--p")?;
                match args.n {
                    None => {
                        let report = fermionic_periodic_closed(&f, p)?;
                        let doc = serde_json::json!({
                            "p": p,
                            "limit": report,
                        });
                        Ok(Output::ok(pretty(&doc)))
                    }
                    Some(n) => {
                        let spec = IntegrandSpec::Periodic(f);
                        Ok(Output::ok(value_json(&fermionic_trunc(&spec, p, n)?)))
                    }
                }
            }
        }
        "volkenborn" => {
            let Some(coeff_list) = &args.poly else {
                return Err(Error::domain(
                    "the flat integral is evaluated in closed form for --poly integrands only"
                        .to_string(),
                ));
            };
            if args.n.is_some() || args.q.is_some() {
                return Err(Error::domain(
                    "kind volkenborn takes no --N or --q; the closed form is exact".to_string(),
                ));
            }
            let coeffs = parse_rat_list(coeff_list)?;
            Ok(Output::ok(value_json(&volkenborn_poly(&coeffs))))
        }
        "q" => {
            let p = required(args.p, "--p")?;
            require_odd_prime(p)?;
            let n = required(args.n, "--N")?;
            let q_str = required(args.q.as_ref(), "--q")?;
            let prec = args.precision.unwrap_or(n + 12);
            if prec < 1 {
                return Err(Error::domain("--precision must be >= 1".to_string()));
            }
            let q_rat = parse_q(p, q_str)?;
            let q = PadicNumber::from_rat(p, &q_rat, prec)?;
            let f = if let Some(coeff_list) = &args.poly {
                IntegrandSpec::Polynomial(parse_rat_list(coeff_list)?)
            } else if let Some(value_list) = &args.table {
                IntegrandSpec::Periodic(PeriodicFn::new(parse_rat_list(value_list)?)?)
            } else {
                let degree = args.degree.expect("degree picked");
                let w = root_of_unity(p, args.w_level, prec)?;
                IntegrandSpec::TwistedMonomial { degree, w }
            };
            let value = volkenborn_q_trunc(&f, p, n, &q)?;
            Ok(Output::ok(pretty(&ring_json(&value))))
        }
        other => Err(Error::domain(format!(
            "unknown integral kind {other:?}; expected fermionic, volkenborn, or q"
        ))),
    }
}

fn run_audit(
    grid: Option<i64>,
    p_set: &[u64],
    periods: u64,
    reduction: Option<&[i64]>,
    ladder: &[u32],
    format: Format,
) -> Result<Output> {
    let reports = match (grid, reduction) {
        (Some(_), Some(_)) => {
            return Err(Error::domain(
                "pass either --grid or --reduction, not both".to_string(),
            ));
        }
        (None, None) => {
            return Err(Error::domain(
                "audit needs a target: --grid KMAX --p-set ... or --reduction H K M P --ladder ..."
                    .to_string(),
            ));
        }
        (Some(kmax), None) => {
            if p_set.is_empty() {
                return Err(Error::domain(
                    "--grid needs --p-set with at least one odd prime".to_string(),
                ));
            }
            if !ladder.is_empty() {
                return Err(Error::domain(
                    "--ladder belongs to --reduction".to_string(),
                ));
            }
            audit_grid(kmax, p_set, periods)?
        }
        (None, Some(params)) => {
            let [h, k, m, p] = params else {
                return Err(Error::domain(
                    "--reduction takes exactly four values: H K M P".to_string(),
                ));
            };
            if !p_set.is_empty() {
                return Err(Error::domain("--p-set belongs to --grid".to_string()));
            }
            if *m < 0 || *p < 0 {
                return Err(Error::domain(
                    "--reduction order and prime must be non-negative".to_string(),
                ));
            }
            vec![reduction_audit(*h, *k, *m as u64, *p as u64, ladder)?]
        }
    };
    let text = match format {
        Format::Json => reports_to_json(&reports),
        Format::Csv => reports_to_csv(&reports),
    };
    Ok(Output::ok(text))
}

/// {"value":"num/den"}, the scalar output schema.
fn value_json(x: &Rat) -> String {
    serde_json::json!({ "value": rat_to_string(x) }).to_string()
}

/// Ring elements collapse to the base-field digit record at level 0.
fn ring_json(x: &CycloElement) -> serde_json::Value {
    if x.level() == 0 {
        serde_json::to_value(x.coeff(0)).expect("padic serializes")
    } else {
        serde_json::to_value(x).expect("cyclo serializes")
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes")
}

fn parse_kind(s: &str) -> Result<HardyKind> {
    match s {
        "S" => Ok(HardyKind::S),
        "S2" => Ok(HardyKind::S2),
        "S3" => Ok(HardyKind::S3),
        "S5" => Ok(HardyKind::S5),
        other => Err(Error::domain(format!(
            "unknown sum kind {other:?}; expected S, S2, S3, or S5"
        ))),
    }
}

fn parse_rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(rat_from_str).collect()
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::domain(format!("{flag} is required here")))
}

fn require_odd_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime { p })
    }
}

fn one_plus_p_pow(p: u64, m: u32) -> Rat {
    Rat::from(Int::from(1u32) + Int::from(p).pow(m))
}

/// Accepts q as "1+p^M", "digits:d0,d1,..." (little-endian base-p digits),
/// or an explicit rational.
fn parse_q(p: u64, s: &str) -> Result<Rat> {
    if let Some(rest) = s.strip_prefix("1+p^") {
        let m: u32 = rest
            .parse()
            .map_err(|_| Error::domain(format!("bad exponent in q shorthand {s:?}")))?;
        return Ok(one_plus_p_pow(p, m));
    }
    if let Some(rest) = s.strip_prefix("digits:") {
        let mut acc = Int::from(0u32);
        let mut scale = Int::from(1u32);
        for part in rest.split(',') {
            let d: u64 = part
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("bad digit {part:?} in {s:?}")))?;
            if d >= p {
                return Err(Error::domain(format!(
                    "digit {d} is not a base-{p} digit"
                )));
            }
            acc += &scale * Int::from(d);
            scale *= Int::from(p);
        }
        return Ok(Rat::from(acc));
    }
    rat_from_str(s)
}

fn default_twisted_sum_precision(p: u64, k: i64, m: u64, m_q: u32) -> u32 {
    let v_k = if k > 0 && k % (p as i64) == 0 {
        volkenborn::rational::int_val_p(p, &Int::from(k)) as u32
    } else {
        0
    };
    m_q + (m as u32) * (1 + v_k) + 6
}
