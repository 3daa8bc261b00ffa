//! Verification suites: exhaustive small-modulus identity checks shared by
//! the `verify` subcommand and the acceptance tests. Each check is
//! parameterized by its tier sizes so the fast CLI tier and the full
//! acceptance tier run the same code.

use spex_core::arith::{euler_phi, factorize, is_prime};
use spex_core::bounds::{kappa, rho, sigma, SigmaBranch};
use spex_core::counting::verify_moments;
use spex_core::discrepancy::{
    build_points_powgen, extreme_discrepancy, grid_discrepancy, koksma_szusz_rhs,
    powgen_bound_shape, star_discrepancy, PointSet, Provenance,
};
use spex_core::expsum::{magnitude, sum_units, sum_via_crt_budgeted};
use spex_core::poly::SparsePolynomial;
use spex_core::powgen::{make_generator, verify_order_lemmas};
use spex_core::rng::SplitMix64;
use spex_core::{BigRational, Complex64};

use crate::Result;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn ok(name: &'static str, detail: String) -> CheckResult {
        CheckResult {
            name,
            pass: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> CheckResult {
        CheckResult {
            name,
            pass: false,
            detail,
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn primes_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&p| is_prime(p)).collect()
}

/// |S_p(a x) + 1| < 1e-9 for every prime p <= p_max and `trials` random
/// units a per prime.
pub fn check_linear_sums(p_max: u64, trials: u32, seed: u64) -> Result<CheckResult> {
    let name = "linear-sums";
    let root = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    let mut checked = 0u64;
    for p in primes_to(p_max) {
        let mut rng = root.split(p);
        for _ in 0..trials {
            let a = rng.range(1, p - 1);
            let f = SparsePolynomial::new(p, &[(a, 1)])?;
            let s = sum_units(&f)?;
            let err = magnitude(s + Complex64::new(1.0, 0.0));
            worst = worst.max(err);
            checked += 1;
            if err >= 1e-9 {
                return Ok(CheckResult::fail(name, format!("p={p} a={a} err={err:e}")));
            }
        }
    }
    Ok(CheckResult::ok(
        name,
        format!("{checked} sums, worst error {worst:.3e}"),
    ))
}

/// Quadratic Gauss-sum values: S(x^2 mod 5) = sqrt(5) - 1 to 1e-9, and
/// |S + 1| = sqrt(p) to 1e-6 for p in {13, 17}.
pub fn check_gauss_values() -> Result<CheckResult> {
    let name = "gauss-values";
    let s = sum_units(&SparsePolynomial::new(5, &[(1, 2)])?)?;
    let want = 5f64.sqrt() - 1.0;
    let err5 = magnitude(s - Complex64::new(want, 0.0));
    if err5 >= 1e-9 {
        return Ok(CheckResult::fail(name, format!("p=5 err={err5:e}")));
    }
    for p in [13u64, 17] {
        let s = sum_units(&SparsePolynomial::new(p, &[(1, 2)])?)?;
        let full = s + Complex64::new(1.0, 0.0);
        let err = (magnitude(full) - (p as f64).sqrt()).abs();
        if err >= 1e-6 {
            return Ok(CheckResult::fail(name, format!("p={p} err={err:e}")));
        }
    }
    Ok(CheckResult::ok(
        name,
        format!("p=5 error {err5:.3e}; p=13,17 within 1e-6"),
    ))
}

/// |S_q(f) - prod S_{p^m}(lambda f)| <= 1e-6 phi(q) on seeded random (f, q)
/// with at least two distinct prime factors.
pub fn check_crt_identity(cases: u32, q_max: u64, seed: u64, budget: u64) -> Result<CheckResult> {
    let name = "crt-identity";
    let mut rng = SplitMix64::new(seed);
    let mut done = 0u32;
    let mut worst_rel = 0.0f64;
    while done < cases {
        let q = rng.range(6, q_max);
        let fact = factorize(q)?;
        if fact.factors().len() < 2 {
            continue;
        }
        let r = 1 + rng.below(3) as u32;
        let mut terms = Vec::new();
        for _ in 0..r {
            terms.push((rng.range(1, q - 1), rng.range(1, 100)));
        }
        let Ok(f) = SparsePolynomial::new(q, &terms) else {
            continue;
        };
        let phi = euler_phi(&fact);
        let direct = crate::parallel::sum_units_parallel(&f, budget, 1)?;
        let product = sum_via_crt_budgeted(&f, budget)?;
        let rel = magnitude(direct - product) / phi as f64;
        worst_rel = worst_rel.max(rel);
        if rel > 1e-6 {
            return Ok(CheckResult::fail(
                name,
                format!("q={q} f={} rel={rel:e}", crate::format::poly_to_text(&f)),
            ));
        }
        done += 1;
    }
    Ok(CheckResult::ok(
        name,
        format!("{cases} cases, worst relative gap {worst_rel:.3e}"),
    ))
}

/// Exact-rational table values and the sigma branch pattern.
pub fn check_bound_tables() -> Result<CheckResult> {
    let name = "bound-tables";
    let eps = rat(3, 92);
    let mut bad = Vec::new();
    let table = spex_core::bounds::BoundTable::build(eps.clone(), 4)?;
    if kappa(3, &eps)? != rat(3, 1564) {
        bad.push("kappa_3");
    }
    if table.row(3).and_then(|r| r.t.clone()) != Some(17.into()) {
        bad.push("t_3");
    }
    if kappa(4, &eps)? != rat(3, 47380) {
        bad.push("kappa_4");
    }
    if rho(2)? != rat(3, 92) {
        bad.push("rho_2");
    }
    if sigma(2)? != (rat(1, 400), SigmaBranch::Cubic) {
        bad.push("sigma_2");
    }
    if sigma(1)? != (rat(3, 184), SigmaBranch::Kappa) {
        bad.push("sigma_1");
    }
    if sigma(3)? != (rat(1, 2024), SigmaBranch::Kappa) {
        bad.push("sigma_3");
    }
    for r in 1..=12u32 {
        let (_, branch) = sigma(r)?;
        let want = if r == 2 {
            SigmaBranch::Cubic
        } else {
            SigmaBranch::Kappa
        };
        if branch != want {
            bad.push("sigma-branch");
        }
    }
    if bad.is_empty() {
        Ok(CheckResult::ok(
            name,
            "kappa, rho, sigma rows exact; min branch pattern holds".into(),
        ))
    } else {
        Ok(CheckResult::fail(name, format!("mismatches: {bad:?}")))
    }
}

/// sum_J = (p-1)^t, sum_J^2 = I_{r,t}, orthogonality within 1e-6 relative,
/// exhaustively over exponent tuples for the given primes and t <= t_max.
pub fn check_moment_identities(primes: &[u64], t_max: u32, budget: u64) -> Result<CheckResult> {
    let name = "moment-identities";
    let mut reports = 0u64;
    for &p in primes {
        let mut cases: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
        for e in 1..p {
            cases.push((vec![1], vec![e]));
            cases.push((vec![p - 1], vec![e]));
        }
        for e1 in 1..p {
            for e2 in (e1 + 1)..p {
                cases.push((vec![1, 1], vec![e1, e2]));
                cases.push((vec![2 % p, 1], vec![e1, e2]));
            }
        }
        for (coeffs, exps) in cases {
            if coeffs.iter().any(|&a| a % p == 0) {
                continue;
            }
            for t in 1..=t_max {
                let m = verify_moments(&coeffs, &exps, t, p, budget)?;
                let mut want_sum = 1u64;
                for _ in 0..t {
                    want_sum *= p - 1;
                }
                if m.sum_j != want_sum {
                    return Ok(CheckResult::fail(
                        name,
                        format!("sum_J p={p} exps={exps:?} t={t}"),
                    ));
                }
                if m.sum_j_sq != m.count {
                    return Ok(CheckResult::fail(
                        name,
                        format!("sum_J^2 p={p} exps={exps:?} t={t}"),
                    ));
                }
                if (m.orthogonality - m.count as f64).abs() > 1e-6 * m.count as f64 {
                    return Ok(CheckResult::fail(
                        name,
                        format!(
                            "orthogonality p={p} exps={exps:?} t={t} orth={}",
                            m.orthogonality
                        ),
                    ));
                }
                reports += 1;
            }
        }
    }
    Ok(CheckResult::ok(
        name,
        format!("{reports} moment reports, all three identities exact"),
    ))
}

/// |S_p(f)| <= (deg fbar - 1) sqrt(p) + 1 on seeded random reduced f.
pub fn check_weil_corrected(cases: u32, p_max: u64, seed: u64) -> Result<CheckResult> {
    let name = "weil-corrected";
    let primes: Vec<u64> = primes_to(p_max).into_iter().filter(|&p| p >= 5).collect();
    let mut rng = SplitMix64::new(seed);
    let mut done = 0u32;
    let mut worst_margin = f64::INFINITY;
    while done < cases {
        let p = primes[rng.below(primes.len() as u64) as usize];
        let r = 1 + rng.below(4) as u32;
        let mut terms = Vec::new();
        for _ in 0..r {
            terms.push((rng.range(1, p - 1), rng.range(1, p - 1)));
        }
        let Ok(f) = SparsePolynomial::new(p, &terms) else {
            continue;
        };
        let Ok(reduced) = f.reduce_exponents_prime() else {
            continue;
        };
        let s = magnitude(sum_units(&reduced)?);
        let bound = (reduced.degree() as f64 - 1.0) * (p as f64).sqrt() + 1.0;
        worst_margin = worst_margin.min(bound - s);
        // 1e-9 slack for summation roundoff at the degree-1 equality case
        if s > bound + 1e-9 {
            return Ok(CheckResult::fail(
                name,
                format!("p={p} f={reduced:?} |S|={s} bound={bound}"),
            ));
        }
        done += 1;
    }
    Ok(CheckResult::ok(
        name,
        format!("{cases} sums, smallest margin {worst_margin:.3e}"),
    ))
}

/// Order lemmas, exhaustive to q_max.
pub fn check_order_lemmas(q_max: u64) -> Result<CheckResult> {
    let name = "order-lemmas";
    let report = verify_order_lemmas(q_max, 20)?;
    match report.counterexample {
        None => Ok(CheckResult::ok(
            name,
            format!(
                "q <= {q_max}: {} pairs, {} divisor + {} gcd + {} count checks",
                report.pairs_checked, report.divisor_checks, report.gcd_checks, report.count_checks
            ),
        )),
        Some(ce) => Ok(CheckResult::fail(name, format!("{ce:?}"))),
    }
}

/// The reference generator (11, 3, 2) and agreement of nth_term with direct
/// iteration over seeded specs.
pub fn check_powgen(specs: u32, n_max: usize, seed: u64) -> Result<CheckResult> {
    let name = "power-generator";
    let g = make_generator(11, 3, 2)?;
    if g.sequence(4) != vec![2, 8, 6, 7] || g.period != 4 || g.t_order != 10 {
        return Ok(CheckResult::fail(
            name,
            format!("reference spec wrong: {g:?}"),
        ));
    }
    let primes: Vec<u64> = primes_to(10_000).into_iter().filter(|&p| p >= 5).collect();
    let mut rng = SplitMix64::new(seed);
    for _ in 0..specs {
        let p = primes[rng.below(primes.len() as u64) as usize];
        let e = rng.range(2, p - 1);
        let theta = rng.range(1, p - 1);
        let g = make_generator(p, e, theta)?;
        let seq = g.sequence(n_max + 1);
        for (n, &want) in seq.iter().enumerate() {
            if g.nth_term(n as i64)? != want {
                return Ok(CheckResult::fail(
                    name,
                    format!("p={p} e={e} theta={theta} n={n}: nth_term != iteration"),
                ));
            }
        }
    }
    Ok(CheckResult::ok(
        name,
        format!("{specs} specs agree with direct iteration to n={n_max}"),
    ))
}

/// Exact critical-box discrepancy matches dense-grid maximization within
/// s/G on seeded point sets, plus the classical 1D reference values.
pub fn check_discrepancy_oracle(sets: u32, grid_g: u32, seed: u64) -> Result<CheckResult> {
    let name = "discrepancy-oracle";
    // classical values first
    let midpoints: Vec<Vec<f64>> = (1..=4).map(|i| vec![(2 * i - 1) as f64 / 8.0]).collect();
    let ps = PointSet::new(midpoints, Provenance::External)?;
    let star = star_discrepancy(&ps)?.value().unwrap();
    let ext = extreme_discrepancy(&ps)?.value().unwrap();
    if (star - 0.125).abs() > 1e-15 || (ext - 0.25).abs() > 1e-15 {
        return Ok(CheckResult::fail(
            name,
            format!("midpoint set: star={star} extreme={ext}"),
        ));
    }
    let grid_points: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 8.0]).collect();
    let ps = PointSet::new(grid_points, Provenance::External)?;
    let star = star_discrepancy(&ps)?.value().unwrap();
    if (star - 0.125).abs() > 1e-15 {
        return Ok(CheckResult::fail(
            name,
            format!("uniform grid: star={star}"),
        ));
    }

    // per-set derived streams keep the workload order-free for rayon
    let root = SplitMix64::new(seed);
    let gaps: Vec<std::result::Result<f64, String>> = {
        use rayon::prelude::*;
        (0..sets)
            .into_par_iter()
            .map(|set_idx| {
                let mut rng = root.split(set_idx as u64);
                let s = 1 + rng.below(2) as usize;
                let n = 1 + rng.below(20) as usize;
                let pts: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..s).map(|_| rng.next_f64()).collect())
                    .collect();
                let ps = PointSet::new(pts, Provenance::External).map_err(|e| e.to_string())?;
                let exact = extreme_discrepancy(&ps)
                    .map_err(|e| e.to_string())?
                    .value()
                    .expect("exact mode");
                let grid = grid_discrepancy(&ps, grid_g, u64::MAX).map_err(|e| e.to_string())?;
                let gap = exact - grid.lower;
                if gap < -1e-12 || gap > s as f64 / grid_g as f64 {
                    return Err(format!(
                        "set {set_idx}: exact={exact} grid={} gap={gap}",
                        grid.lower
                    ));
                }
                Ok(gap)
            })
            .collect()
    };
    let mut worst_gap = 0.0f64;
    for gap in gaps {
        match gap {
            Ok(g) => worst_gap = worst_gap.max(g),
            Err(msg) => return Ok(CheckResult::fail(name, msg)),
        }
    }
    Ok(CheckResult::ok(
        name,
        format!("classical values exact; {sets} sets within s/G (worst gap {worst_gap:.3e})"),
    ))
}

/// Koksma-Szusz reference values: uniform 1D grid and the degenerate
/// all-zero set.
pub fn check_ks_values() -> Result<CheckResult> {
    let name = "koksma-szusz";
    let n = 64;
    let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / n as f64]).collect();
    let ps = PointSet::new(pts, Provenance::External)?;
    let v = koksma_szusz_rhs(&ps, 16, 10_000_000)?;
    if (v - 1.0 / 16.0).abs() >= 1e-9 {
        return Ok(CheckResult::fail(name, format!("uniform grid rhs={v}")));
    }
    let ps = PointSet::new(vec![vec![0.0]; 8], Provenance::External)?;
    let w = koksma_szusz_rhs(&ps, 1, 10_000_000)?;
    if (w - 2.0).abs() > 1e-12 {
        return Ok(CheckResult::fail(name, format!("degenerate rhs={w}")));
    }
    Ok(CheckResult::ok(
        name,
        format!(
            "uniform rhs = 1/16 to {:.1e}; degenerate rhs = 2",
            (v - 0.0625).abs()
        ),
    ))
}

/// Full-period point sets at p: measured discrepancy recorded next to the
/// bound shape with the ratio, no inequality asserted.
pub fn check_shape_reporting(p: u64, s: u32, specs: u32, seed: u64) -> Result<CheckResult> {
    let name = "shape-reporting";
    let mut rng = SplitMix64::new(seed);
    let mut lines = Vec::new();
    let mut done = 0u32;
    while done < specs {
        let e = rng.range(2, p - 1);
        let theta = rng.range(1, p - 1);
        let g = make_generator(p, e, theta)?;
        if g.preperiod != 0 || g.period < 4 {
            continue;
        }
        let n = g.period;
        let ps = build_points_powgen(&g, s, n)?;
        let measured = extreme_discrepancy(&ps)?.value().unwrap();
        let shape = powgen_bound_shape(p, n, s)?;
        if !(0.0..=1.0 + 1e-9).contains(&measured) {
            return Ok(CheckResult::fail(
                name,
                format!("e={e} theta={theta} measured={measured}"),
            ));
        }
        let ratio = measured / shape.value;
        if !ratio.is_finite() {
            return Ok(CheckResult::fail(
                name,
                format!("e={e} theta={theta} ratio not finite"),
            ));
        }
        lines.push(format!(
            "e={e} theta={theta} tau={n} measured={measured:.6} shape={:.6} ratio={ratio:.4}",
            shape.value
        ));
        done += 1;
    }
    Ok(CheckResult::ok(
        name,
        format!(
            "{} full-period reports, ratios logged:\n  {}",
            lines.len(),
            lines.join("\n  ")
        ),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fast,
    Full,
}

/// The verify suite at a given tier. Fast keeps every check under a few
/// seconds; full matches the acceptance parameters.
pub fn run_verify(tier: Tier) -> Result<Vec<CheckResult>> {
    let fast = tier == Tier::Fast;
    let moment_primes: &[u64] = if fast { &[5, 7] } else { &[5, 7, 11, 13] };
    let mut out = Vec::new();
    out.push(check_bound_tables()?);
    out.push(check_linear_sums(
        if fast { 500 } else { 10_000 },
        if fast { 3 } else { 10 },
        1,
    )?);
    out.push(check_gauss_values()?);
    out.push(check_crt_identity(
        if fast { 25 } else { 200 },
        100_000,
        2,
        100_000_000,
    )?);
    out.push(check_moment_identities(moment_primes, 2, 1 << 30)?);
    out.push(check_weil_corrected(if fast { 60 } else { 500 }, 499, 3)?);
    out.push(check_order_lemmas(if fast { 300 } else { 2000 })?);
    out.push(check_powgen(
        if fast { 10 } else { 100 },
        if fast { 1000 } else { 10_000 },
        4,
    )?);
    out.push(check_discrepancy_oracle(
        if fast { 10 } else { 50 },
        400,
        5,
    )?);
    out.push(check_ks_values()?);
    if !fast {
        out.push(check_shape_reporting(10_007, 1, 20, 6)?);
    }
    Ok(out)
}
