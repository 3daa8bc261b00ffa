//! Subcommand definitions and dispatch. Exit-code policy: 0 on success,
//! 1 on domain errors, 2 on budget refusals and usage errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use spex_core::bounds::{parse_rational, BoundTable};
use spex_core::counting::verify_moments;
use spex_core::discrepancy::{
    build_points_powgen, extreme_discrepancy_opts, grid_discrepancy, grid_star_discrepancy,
    koksma_szusz_rhs,
    powgen_bound_shape, star_discrepancy_opts, BoxCounting, PointSet, DEFAULT_FREQUENCY_BUDGET,
};
use spex_core::expsum::{crt_decompose, sum_via_crt_budgeted, ExpSumReport};
use spex_core::powgen::{
    make_generator, make_linear_twist, make_monomial, make_shifted_monomial, LinearForm, MultiPoly,
    MultivariateSystem,
};

use crate::format::{
    moments_csv_header, moments_csv_line, parse_points_file, parse_poly, parse_range,
    parse_u64_list, BoundsTableOut, DiscrepancyOut, ExpsumOut, KsOut, MultivariateOut, PowgenOut,
    PowgenShapeOut, TermOut,
};
use crate::scan::{run_scan, scan_csv, ExponentPolicy, ScanConfig};
use crate::verify::{run_verify, Tier};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "spex",
    version,
    about = "Exact exponential sums with sparse polynomials, saving-constant tables,\nthe power generator, and multidimensional discrepancy"
)]
pub struct Cli {
    /// Worker threads (default: SPEX_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Work budget override (default: SPEX_BUDGET or per-operation default)
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate S_q(f) over the unit group, optionally via the CRT product
    Expsum {
        /// Modulus (may also come from a "mod q" suffix in --poly)
        #[arg(long)]
        q: Option<u64>,
        /// Polynomial: "a1*x^e1 + a2*x^e2 [mod q]" or {"q":..,"terms":[[a,e],..]}
        #[arg(long)]
        poly: String,
        /// Also compute the prime-power product and report the difference
        #[arg(long)]
        via_crt: bool,
        /// Include the bound menu in the report
        #[arg(long)]
        bounds: bool,
        /// Emit the full JSON document instead of the summary lines
        #[arg(long)]
        json: bool,
    },
    /// Print the exact kappa/t table (JSON), optionally with rho and sigma
    Bounds {
        /// Exact rational, e.g. 3/92 or 0.03
        #[arg(long, default_value = "3/92")]
        epsilon: String,
        #[arg(long, default_value_t = 8)]
        r_max: u32,
        /// Include rho_r = kappa_r(3/92)
        #[arg(long)]
        rho: bool,
        /// Include sigma_r with the attaining branch
        #[arg(long)]
        sigma: bool,
    },
    /// Power-sum moment identities (CSV rows)
    Moments {
        #[arg(long)]
        p: u64,
        /// Comma-separated exponents, e.g. 2,3
        #[arg(long)]
        exps: String,
        /// Comma-separated coefficients (default: all 1)
        #[arg(long)]
        coeffs: Option<String>,
        /// Comma-separated list of t values
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Power generator terms and period data
    Powgen {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        e: Option<u64>,
        #[arg(long)]
        theta: Option<u64>,
        /// Single index (may be negative in the purely periodic case)
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        /// Index range lo..hi (inclusive)
        #[arg(long)]
        range: Option<String>,
        /// Multivariate system description (JSON; see README)
        #[arg(long)]
        multivariate: Option<String>,
        /// Initial vector for --multivariate, e.g. 2,3
        #[arg(long)]
        u0: Option<String>,
        /// Orbit length for --multivariate
        #[arg(long, default_value_t = 16)]
        steps: usize,
        /// Print raw residue lines instead of JSON
        #[arg(long)]
        raw: bool,
    },
    /// Discrepancy of a point set (exact critical boxes or certified grid)
    Discrepancy {
        /// CSV file, one point per line
        #[arg(long)]
        points_file: Option<PathBuf>,
        /// Generator points: p,e,theta,s,N
        #[arg(long)]
        powgen: Option<String>,
        /// Star (anchored) instead of extreme discrepancy
        #[arg(long)]
        star: bool,
        /// Grid mode with this resolution per axis (default: exact)
        #[arg(long)]
        grid: Option<u32>,
        /// Exact critical-box mode (the default; kept as an explicit flag)
        #[arg(long)]
        exact: bool,
        /// Also evaluate the Koksma-Szusz right-hand side at this A
        #[arg(long)]
        ks_rhs: Option<u32>,
        /// Count boundary points as inside (closed-box sensitivity mode)
        #[arg(long)]
        closed: bool,
    },
    /// Seeded scan over primes: sums, bounds, conditions, ratios
    Scan {
        /// Comma-separated prime list
        #[arg(long)]
        primes: Option<String>,
        /// Inclusive range lo..hi; all primes inside are scanned
        #[arg(long)]
        prime_range: Option<String>,
        /// Sparsity r of the sampled polynomials
        #[arg(long, default_value_t = 2)]
        r: u32,
        /// Exponent sampling policy: uniform | coprime
        #[arg(long, default_value = "uniform")]
        policy: String,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Epsilon for the kappa_r(eps) ratio base
        #[arg(long, default_value = "3/92")]
        epsilon: String,
        /// Output format: json | csv
        #[arg(long, default_value = "json")]
        format: String,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity suites: fast or full tier
    Verify {
        #[arg(long, default_value = "fast")]
        tier: String,
    },
}

/// Budget resolution: flag, then SPEX_BUDGET, then the operation default.
fn resolve_budget(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(|| {
        std::env::var("SPEX_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(default)
}

fn emit_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::parse(format!("serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

/// Multivariate system description accepted by `powgen --multivariate`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SystemJson {
    Monomial {
        p: u64,
        matrix: Vec<Vec<u64>>,
    },
    LinearTwist {
        p: u64,
        e: u64,
        l1: FormJson,
        l0: FormJson,
        rest: Vec<FormJson>,
    },
    ShiftedMonomial {
        p: u64,
        exps: Vec<u64>,
        shifts: Vec<u64>,
        coeff_polys: Vec<PolyJson>,
        last_scale: u64,
        #[serde(default)]
        zero_free_asserted: bool,
    },
}

#[derive(Deserialize)]
struct FormJson {
    constant: u64,
    coeffs: Vec<u64>,
}

#[derive(Deserialize)]
struct PolyJson {
    terms: Vec<(u64, Vec<u64>)>,
}

impl SystemJson {
    fn build(self) -> Result<(MultivariateSystem, &'static str)> {
        match self {
            SystemJson::Monomial { p, matrix } => Ok((make_monomial(p, &matrix)?, "monomial")),
            SystemJson::LinearTwist { p, e, l1, l0, rest } => {
                let form = |f: FormJson| LinearForm {
                    constant: f.constant,
                    coeffs: f.coeffs,
                };
                let rest: Vec<LinearForm> = rest.into_iter().map(form).collect();
                Ok((
                    make_linear_twist(p, e, form(l1), form(l0), &rest)?,
                    "linear_twist",
                ))
            }
            SystemJson::ShiftedMonomial {
                p,
                exps,
                shifts,
                coeff_polys,
                last_scale,
                zero_free_asserted,
            } => {
                let polys: Vec<MultiPoly> = coeff_polys
                    .into_iter()
                    .map(|g| MultiPoly { terms: g.terms })
                    .collect();
                Ok((
                    make_shifted_monomial(
                        p,
                        &exps,
                        &shifts,
                        &polys,
                        last_scale,
                        zero_free_asserted,
                    )?,
                    "shifted_monomial",
                ))
            }
        }
    }
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    let threads = crate::parallel::resolve_threads(cli.threads);
    match cli.command {
        Command::Expsum {
            q,
            poly,
            via_crt,
            bounds,
            json,
        } => {
            let budget = resolve_budget(cli.budget, spex_core::expsum::DEFAULT_TERM_BUDGET);
            let f = parse_poly(&poly, q)?;
            let value = crate::parallel::sum_units_parallel(&f, budget, threads)?;
            let mut report = ExpSumReport::compute_with_value(&f, value)?;
            if !bounds {
                report.bounds.clear();
            }
            let crt = if via_crt {
                let factors = crt_decompose(&f)?;
                let product = sum_via_crt_budgeted(&f, budget)?;
                Some((product, factors))
            } else {
                None
            };
            if json {
                let out = ExpsumOut::build(
                    &report,
                    crt.as_ref()
                        .map(|(sum, factors)| (*sum, factors.as_slice())),
                    bounds,
                );
                return emit_json(&out);
            }
            println!(
                "S_{}({}) = {:.12} + {:.12}i  |S| = {:.12}  phi = {}",
                report.q,
                crate::format::poly_to_text(&report.f),
                report.value.re,
                report.value.im,
                report.magnitude,
                report.phi
            );
            if let Some((product, _)) = &crt {
                println!(
                    "via CRT: {:.12} + {:.12}i  |difference| = {:.3e}",
                    product.re,
                    product.im,
                    spex_core::expsum::magnitude(*product - report.value)
                );
            }
            if bounds {
                for b in &report.bounds {
                    let value = match b.value {
                        Some(v) => format!("{v:.6}"),
                        None => "n/a".to_string(),
                    };
                    let scale = match b.scale {
                        spex_core::expsum::BoundScale::Linear => "",
                        spex_core::expsum::BoundScale::LogNatural => " (ln)",
                    };
                    println!(
                        "bound {:>22}{scale}: {value}  applicable={}  {}",
                        b.name,
                        b.applicable,
                        b.note.as_deref().unwrap_or("")
                    );
                }
            }
            Ok(())
        }
        Command::Bounds {
            epsilon,
            r_max,
            rho,
            sigma,
        } => {
            let eps = parse_rational(&epsilon)?;
            let table = BoundTable::build(eps, r_max)?;
            emit_json(&BoundsTableOut::build(&table, rho, sigma)?)
        }
        Command::Moments { p, exps, coeffs, t } => {
            let budget = resolve_budget(cli.budget, spex_core::counting::DEFAULT_TUPLE_BUDGET);
            let exps = parse_u64_list(&exps)?;
            let coeffs = match coeffs {
                Some(c) => parse_u64_list(&c)?,
                None => vec![1; exps.len()],
            };
            let ts = parse_u64_list(&t)?;
            let mut lines = vec![moments_csv_header()];
            for &t in &ts {
                let m = verify_moments(&coeffs, &exps, t as u32, p, budget)?;
                lines.push(moments_csv_line(&m));
            }
            println!("{}", lines.join("\n"));
            Ok(())
        }
        Command::Powgen {
            p,
            e,
            theta,
            n,
            range,
            multivariate,
            u0,
            steps,
            raw,
        } => {
            if let Some(desc) = multivariate {
                let system: SystemJson = serde_json::from_str(&desc)
                    .map_err(|err| Error::parse(format!("bad system JSON: {err}")))?;
                let (sys, kind) = system.build()?;
                let u0 = parse_u64_list(
                    &u0.ok_or_else(|| Error::parse("--multivariate requires --u0"))?,
                )?;
                let orbit = sys.iterate(&u0, steps)?;
                if raw {
                    let mut stdout = std::io::stdout().lock();
                    for state in &orbit.states {
                        let line: Vec<String> = state.iter().map(|x| x.to_string()).collect();
                        writeln!(stdout, "{}", line.join(",")).map_err(|e| Error::Io {
                            path: "<stdout>".into(),
                            source: e,
                        })?;
                    }
                    return Ok(());
                }
                return emit_json(&MultivariateOut {
                    p: sys.p(),
                    dimension: sys.dimension(),
                    kind: kind.to_string(),
                    states: orbit.states,
                    preperiod: orbit.preperiod,
                    period: orbit.period,
                });
            }
            let (p, e, theta) = match (p, e, theta) {
                (Some(p), Some(e), Some(theta)) => (p, e, theta),
                _ => return Err(Error::parse("powgen requires --p, --e, --theta")),
            };
            let g = make_generator(p, e, theta)?;
            let terms: Vec<TermOut> = match (n, range) {
                (Some(n), None) => vec![TermOut {
                    n,
                    value: g.nth_term(n)?,
                }],
                (None, Some(r)) => {
                    let (lo, hi) = parse_range(&r)?;
                    (lo..=hi)
                        .map(|i| {
                            Ok(TermOut {
                                n: i as i64,
                                value: g.nth_term(i as i64)?,
                            })
                        })
                        .collect::<Result<_>>()?
                }
                (None, None) => Vec::new(),
                (Some(_), Some(_)) => {
                    return Err(Error::parse("pass either --n or --range, not both"));
                }
            };
            if raw {
                let mut stdout = std::io::stdout().lock();
                for t in &terms {
                    writeln!(stdout, "{}", t.value).map_err(|e| Error::Io {
                        path: "<stdout>".into(),
                        source: e,
                    })?;
                }
                return Ok(());
            }
            emit_json(&PowgenOut::build(&g, terms))
        }
        Command::Discrepancy {
            points_file,
            powgen,
            star,
            grid,
            exact,
            ks_rhs,
            closed,
        } => {
            let budget = resolve_budget(cli.budget, spex_core::discrepancy::DEFAULT_BOX_BUDGET);
            if grid.is_some() && exact {
                return Err(Error::parse("pass either --grid or --exact, not both"));
            }
            let (points, shape): (PointSet, Option<(u64, u32)>) = match (points_file, powgen) {
                (Some(path), None) => {
                    let content = std::fs::read_to_string(&path).map_err(|e| Error::Io {
                        path: path.display().to_string(),
                        source: e,
                    })?;
                    (parse_points_file(&content)?, None)
                }
                (None, Some(desc)) => {
                    let parts = parse_u64_list(&desc)?;
                    if parts.len() != 5 {
                        return Err(Error::parse("--powgen needs p,e,theta,s,N"));
                    }
                    let (p, e, theta, s, n) =
                        (parts[0], parts[1], parts[2], parts[3] as u32, parts[4]);
                    let g = make_generator(p, e, theta)?;
                    if n > g.preperiod + g.period {
                        eprintln!(
                            "warning: N = {n} exceeds preperiod + period = {}; points repeat",
                            g.preperiod + g.period
                        );
                    }
                    (build_points_powgen(&g, s, n)?, Some((p, s)))
                }
                _ => return Err(Error::parse("pass exactly one of --points-file, --powgen")),
            };
            let counting = if closed {
                BoxCounting::ClosedAttained
            } else {
                BoxCounting::HalfOpenSup
            };
            let report = match grid {
                Some(g) => {
                    if closed {
                        return Err(Error::parse("--closed applies to exact mode only"));
                    }
                    if star {
                        grid_star_discrepancy(&points, g, budget)?
                    } else {
                        grid_discrepancy(&points, g, budget)?
                    }
                }
                None if star => star_discrepancy_opts(&points, counting, budget)?,
                None => extreme_discrepancy_opts(&points, counting, budget)?,
            };
            let ks = match ks_rhs {
                Some(a) => Some(KsOut {
                    a,
                    value: koksma_szusz_rhs(&points, a, DEFAULT_FREQUENCY_BUDGET)?,
                }),
                None => None,
            };
            let powgen_out = match shape {
                Some((p, s)) => {
                    let shape = powgen_bound_shape(p, points.len() as u64, s)?;
                    PowgenShapeOut::build(&points.provenance, &shape, report.value())
                }
                None => None,
            };
            emit_json(&DiscrepancyOut::build(
                &points, &report, star, ks, powgen_out,
            ))
        }
        Command::Scan {
            primes,
            prime_range,
            r,
            policy,
            trials,
            seed,
            epsilon,
            format,
            out,
        } => {
            let budget = resolve_budget(cli.budget, spex_core::expsum::DEFAULT_TERM_BUDGET);
            let primes = match (primes, prime_range) {
                (Some(list), None) => parse_u64_list(&list)?,
                (None, Some(range)) => {
                    let (lo, hi) = parse_range(&range)?;
                    (lo..=hi)
                        .filter(|&p| spex_core::arith::is_prime(p))
                        .collect()
                }
                (None, None) => Vec::new(),
                (Some(_), Some(_)) => {
                    return Err(Error::parse("pass either --primes or --prime-range"));
                }
            };
            let policy = match policy.as_str() {
                "uniform" => ExponentPolicy::Uniform,
                "coprime" => ExponentPolicy::Coprime,
                other => return Err(Error::parse(format!("unknown policy {other:?}"))),
            };
            let cfg = ScanConfig {
                primes,
                sparsity: r,
                policy,
                trials,
                seed,
                epsilon: parse_rational(&epsilon)?,
                budget,
                threads,
            };
            let report = run_scan(&cfg)?;
            let text = match format.as_str() {
                "json" => serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::parse(format!("serialization: {e}")))?,
                "csv" => scan_csv(&report),
                other => return Err(Error::parse(format!("unknown format {other:?}"))),
            };
            match out {
                Some(path) => std::fs::write(&path, text.as_bytes()).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })?,
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Verify { tier } => {
            let tier = match tier.as_str() {
                "fast" => Tier::Fast,
                "full" => Tier::Full,
                other => return Err(Error::parse(format!("unknown tier {other:?}"))),
            };
            let results = run_verify(tier)?;
            let mut failures = 0;
            for check in &results {
                let status = if check.pass { "PASS" } else { "FAIL" };
                println!("{status} {}: {}", check.name, check.detail);
                if !check.pass {
                    failures += 1;
                }
            }
            if failures == 0 {
                println!("all {} checks passed", results.len());
                Ok(())
            } else {
                Err(Error::parse(format!(
                    "{failures} of {} checks failed",
                    results.len()
                )))
            }
        }
    }
}
