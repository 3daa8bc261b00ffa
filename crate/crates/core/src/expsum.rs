//! Exact evaluation of the complete exponential sum S_q(f) over the unit
//! group of Z_q, its factorization into prime-power sums, sparse-polynomial
//! root counting, and numeric evaluation of the bound menu.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::arith::{self, factorize, gcd, inv_mod, is_prime, Factorization};
use crate::bounds::{rho, sigma, SigmaBranch};
use crate::poly::{
    check_coprime_gcd, moderate_gcd_on_exponents, ConditionReport, SparsePolynomial,
};
use crate::{Error, Result};

/// Default budget on unit-group term evaluations.
pub const DEFAULT_TERM_BUDGET: u64 = 100_000_000;

/// Fixed x-range width of one reduction chunk. Chunk boundaries never depend
/// on the worker count, so any scheduling of chunks reproduces the same
/// floating-point result bit for bit.
pub const CHUNK_WIDTH: u64 = 1 << 14;

const TAU: f64 = core::f64::consts::TAU;

pub fn magnitude(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Pairwise (tree) reduction in slice order.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    match terms.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => terms[0],
        2 => terms[0] + terms[1],
        n => pairwise_sum(&terms[..n / 2]) + pairwise_sum(&terms[n / 2..]),
    }
}

/// Number of fixed-width chunks covering x in [1, q).
pub fn chunk_count(q: u64) -> u64 {
    (q - 1).div_ceil(CHUNK_WIDTH)
}

/// Pairwise sum of e_q(f(x)) over the units x inside chunk `k`,
/// enumerated in increasing x.
pub fn sum_chunk(f: &SparsePolynomial, k: u64) -> Complex64 {
    let q = f.modulus();
    let prime = is_prime(q);
    let scale = TAU / q as f64;
    let lo = 1 + k * CHUNK_WIDTH;
    let hi = core::cmp::min(q, lo + CHUNK_WIDTH);
    let mut terms: Vec<Complex64> = Vec::with_capacity((hi - lo) as usize);
    for x in lo..hi {
        if !prime && gcd(x, q) != 1 {
            continue;
        }
        let phase = f.evaluate(x) as f64 * scale;
        let (s, c) = libm::sincos(phase);
        terms.push(Complex64::new(c, s));
    }
    pairwise_sum(&terms)
}

/// Combine per-chunk sums in chunk order with the same pairwise tree.
pub fn combine_chunks(sums: &[Complex64]) -> Complex64 {
    pairwise_sum(sums)
}

/// Euler phi of the modulus, used for budget checks and normalizations.
pub fn phi_of_modulus(f: &SparsePolynomial) -> Result<u64> {
    Ok(arith::euler_phi(&factorize(f.modulus())?))
}

/// S_q(f) = sum over x in Z_q^* of exp(2 pi i f(x) / q), with a budget on
/// phi(q) term evaluations.
pub fn sum_units_budgeted(f: &SparsePolynomial, budget: u64) -> Result<Complex64> {
    let phi = phi_of_modulus(f)?;
    if phi > budget {
        return Err(Error::BudgetExceeded {
            required: phi as u128,
            budget,
            what: "unit-group term evaluations",
        });
    }
    let sums: Vec<Complex64> = (0..chunk_count(f.modulus()))
        .map(|k| sum_chunk(f, k))
        .collect();
    Ok(combine_chunks(&sums))
}

/// `sum_units_budgeted` with the default budget.
pub fn sum_units(f: &SparsePolynomial) -> Result<Complex64> {
    sum_units_budgeted(f, DEFAULT_TERM_BUDGET)
}

/// One prime-power factor of the CRT decomposition
/// S_q(f) = prod_p S_{p^m}(lambda_p f).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtFactor {
    pub p: u64,
    pub m: u32,
    /// p^m
    pub modulus: u64,
    /// (q / p^m)^{-1} mod p^m; a unit twist of the coefficients
    pub lambda: u64,
}

/// Decompose the modulus into prime powers with the unit twists
/// lambda_p = (q/p^{m_p})^{-1} mod p^{m_p}.
pub fn crt_decompose(f: &SparsePolynomial) -> Result<Vec<CrtFactor>> {
    let q = f.modulus();
    let fact = factorize(q)?;
    fact.factors()
        .iter()
        .map(|&(p, m)| {
            let modulus = p.pow(m);
            let lambda = inv_mod((q / modulus) % modulus, modulus)?;
            Ok(CrtFactor {
                p,
                m,
                modulus,
                lambda,
            })
        })
        .collect()
}

/// Product of the prime-power sums; agrees with `sum_units` up to roundoff.
pub fn sum_via_crt_budgeted(f: &SparsePolynomial, budget: u64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for factor in crt_decompose(f)? {
        let g = f.twist(factor.modulus, factor.lambda)?;
        acc *= sum_units_budgeted(&g, budget)?;
    }
    Ok(acc)
}

pub fn sum_via_crt(f: &SparsePolynomial) -> Result<Complex64> {
    sum_via_crt_budgeted(f, DEFAULT_TERM_BUDGET)
}

/// Exact root count of f over F_p together with the gcd quantity D that
/// controls the sparse root bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootCount {
    pub count: u64,
    /// max over i != j of gcd(e_i - e_j, p-1); for r = 1 the value
    /// gcd(e_1, p-1) is reported instead and flagged.
    pub d_value: u64,
    /// true when r = 1 and d_value uses the monomial convention
    pub monomial_convention: bool,
}

/// Count x in F_p with f(x) = 0 by exhaustive scan.
pub fn root_count(f: &SparsePolynomial, budget: u64) -> Result<RootCount> {
    let p = f.modulus();
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if p as u128 > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: p as u128,
            budget,
            what: "root scan",
        });
    }
    let count = (0..p).filter(|&x| f.evaluate(x) == 0).count() as u64;
    let exps = f.exponents();
    let (d_value, monomial_convention) = if exps.len() == 1 {
        (gcd(exps[0], p - 1), true)
    } else {
        let mut d = 0u64;
        for i in 0..exps.len() {
            for j in (i + 1)..exps.len() {
                d = d.max(gcd(exps[i].abs_diff(exps[j]), p - 1));
            }
        }
        (d, false)
    };
    Ok(RootCount {
        count,
        d_value,
        monomial_convention,
    })
}

pub const SHAPE_ONLY_NOTE: &str = "shape only; implied constant unknown";

/// Whether a menu value is the bound itself or its natural logarithm
/// (used where the bound would overflow any float).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundScale {
    Linear,
    LogNatural,
}

/// One row of the bound menu.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    /// Numeric value of the bound formula; None when it cannot be formed.
    pub value: Option<f64>,
    pub scale: BoundScale,
    /// True when the formula carries an unspecified implied constant.
    pub constant_free: bool,
    /// True when the structural requirements and gcd conditions hold.
    pub applicable: bool,
    pub conditions: Option<ConditionReport>,
    pub note: Option<String>,
}

/// Evaluate every bound formula that structurally fits f, attaching the
/// condition report that gates each one.
pub fn bound_menu(f: &SparsePolynomial) -> Result<Vec<BoundEntry>> {
    let q = f.modulus();
    let fact = factorize(q)?;
    let r = f.sparsity();
    let exps = f.exponents();
    let mut menu = Vec::new();

    if fact.is_prime() {
        let p = q;
        let sqrt_p = libm::sqrt(p as f64);
        // Weil: (d-1) sqrt(p) for the reduced degree; the unit-group sum
        // satisfies |S| <= value + 1 because the x = 0 term is removed.
        match f.reduce_exponents_prime() {
            Ok(reduced) => {
                let d = reduced.degree();
                menu.push(BoundEntry {
                    name: "weil",
                    value: Some((d as f64 - 1.0) * sqrt_p),
                    scale: BoundScale::Linear,
                    constant_free: false,
                    applicable: true,
                    conditions: None,
                    note: Some(String::from("unit-group sum obeys value + 1")),
                });
            }
            Err(Error::ZeroPolynomial) => menu.push(BoundEntry {
                name: "weil",
                value: Some(0.0),
                scale: BoundScale::Linear,
                constant_free: false,
                applicable: true,
                conditions: None,
                note: Some(String::from("f vanishes on the units; S = phi(p) e_p(0)")),
            }),
            Err(e) => return Err(e),
        }
        // Shkredov, monomials only: d^{1/2} p^{2/3} (log p)^{1/6}.
        let shkredov_value = if r == 1 {
            Some(
                libm::sqrt(exps[0] as f64)
                    * libm::pow(p as f64, 2.0 / 3.0)
                    * libm::pow(libm::log(p as f64), 1.0 / 6.0),
            )
        } else {
            None
        };
        menu.push(BoundEntry {
            name: "shkredov",
            value: shkredov_value,
            scale: BoundScale::Linear,
            constant_free: true,
            applicable: r == 1,
            conditions: None,
            note: Some(if r == 1 {
                String::from(SHAPE_ONLY_NOTE)
            } else {
                String::from("requires r = 1")
            }),
        });
        // Cochrane-Pinner, binomials: gcd(d-e, p-1) + 2.292 g^{13/46} p^{89/92}.
        let cp_value = if r == 2 {
            let d = exps[1];
            let e = exps[0];
            let g = gcd(gcd(d, e), p - 1);
            Some(
                gcd(d - e, p - 1) as f64
                    + 2.292 * libm::pow(g as f64, 13.0 / 46.0) * libm::pow(p as f64, 89.0 / 92.0),
            )
        } else {
            None
        };
        menu.push(BoundEntry {
            name: "cochrane_pinner",
            value: cp_value,
            scale: BoundScale::Linear,
            constant_free: false,
            applicable: r == 2,
            conditions: None,
            note: if r == 2 {
                None
            } else {
                Some(String::from("requires r = 2"))
            },
        });
        // p^{1 - rho_r} under the coprime-gcd conditions.
        if r <= crate::bounds::MAX_SPARSITY {
            let rho_r = rho(r)?;
            let exponent = 1.0 - rational_f64(&rho_r);
            let conditions = check_coprime_gcd(f)?;
            menu.push(BoundEntry {
                name: "unit_gcd_shape",
                value: Some(libm::pow(p as f64, exponent)),
                scale: BoundScale::Linear,
                constant_free: true,
                applicable: conditions.pass,
                conditions: Some(conditions),
                note: Some(String::from(SHAPE_ONLY_NOTE)),
            });
        }
    }

    // q^{1 - 1/r} for fixed-degree sparse polynomials over any modulus.
    menu.push(BoundEntry {
        name: "sparsity_shape",
        value: Some(libm::pow(q as f64, 1.0 - 1.0 / r as f64)),
        scale: BoundScale::Linear,
        constant_free: true,
        applicable: true,
        conditions: None,
        note: Some(String::from(SHAPE_ONLY_NOTE)),
    });

    // p^{m - 1/r} D^{1/r} for prime powers with m >= 2.
    if let Some((p, m)) = fact.prime_power() {
        if m >= 2 {
            let conditions = crate::poly::prime_power_gcd_on_exponents(&exps, p, m)?;
            let (d_value, convention) = if exps.len() == 1 {
                (gcd(exps[0], p - 1), true)
            } else {
                let mut d = 0u64;
                for i in 0..exps.len() {
                    for j in (i + 1)..exps.len() {
                        d = d.max(gcd(exps[i].abs_diff(exps[j]), p - 1));
                    }
                }
                (d, false)
            };
            let value = libm::pow(p as f64, m as f64 - 1.0 / r as f64)
                * libm::pow(d_value as f64, 1.0 / r as f64);
            let note = if convention {
                String::from("r = 1: D reported as gcd(e_1, p-1); shape only")
            } else {
                String::from(SHAPE_ONLY_NOTE)
            };
            menu.push(BoundEntry {
                name: "prime_power_shape",
                value: Some(value),
                scale: BoundScale::Linear,
                constant_free: true,
                applicable: conditions.pass,
                conditions: Some(conditions),
                note: Some(note),
            });
        }
    }

    // exp(d^18) q^{1 - sigma_r} in natural-log space, flagged trivial when
    // it exceeds ln phi(q)
    if r <= crate::bounds::MAX_SPARSITY {
        let log_bound = uniform_degree_log_bound(f)?;
        menu.push(BoundEntry {
            name: "uniform_degree_shape",
            value: Some(log_bound.ln_bound),
            scale: BoundScale::LogNatural,
            constant_free: true,
            applicable: !log_bound.trivial,
            conditions: None,
            note: Some(if log_bound.trivial {
                alloc::format!(
                    "{SHAPE_ONLY_NOTE}; trivial: exceeds ln phi = {:.3}",
                    log_bound.ln_phi
                )
            } else {
                String::from(SHAPE_ONLY_NOTE)
            }),
        });
    }

    Ok(menu)
}

fn rational_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).expect("saving constants fit f64")
}

/// Log-space value of the uniform-in-degree composite bound
/// exp(d^18) q^{1 - sigma_r}: returns d^18 + (1 - sigma_r) ln q without ever
/// exponentiating, and flags when it exceeds ln phi(q) (trivial).
#[derive(Debug, Clone, PartialEq)]
pub struct UniformDegreeLogBound {
    pub ln_bound: f64,
    pub ln_phi: f64,
    pub trivial: bool,
    pub sigma: BigRational,
    pub sigma_branch: SigmaBranch,
}

/// The bound is asymptotic: making it beat ln phi(q) needs d = 1 and
/// ln q > 1/sigma_1 > 61, i.e. q beyond 63 bits, so at desk scale the
/// trivial flag is always set. The log-space value is still the honest
/// number to report.
pub fn uniform_degree_log_bound(f: &SparsePolynomial) -> Result<UniformDegreeLogBound> {
    let r = f.sparsity();
    if r > crate::bounds::MAX_SPARSITY {
        return Err(Error::OutOfRange {
            what: "sparsity exceeds the r <= 64 table cap",
        });
    }
    let (sig, branch) = sigma(r)?;
    let d = f.degree() as f64;
    let q = f.modulus();
    // d^18 overflows to +inf for astronomical degrees, which is already the
    // right answer in log space
    let d18 = libm::pow(d, 18.0);
    let ln_q = libm::log(q as f64);
    let ln_bound = d18 + (1.0 - rational_f64(&sig)) * ln_q;
    let phi = phi_of_modulus(f)?;
    let ln_phi = libm::log(phi as f64);
    Ok(UniformDegreeLogBound {
        ln_bound,
        ln_phi,
        trivial: ln_bound >= ln_phi,
        sigma: sig,
        sigma_branch: branch,
    })
}

/// Tier of a prime that escaped the exceptional sets: classified by its
/// multiplicity in q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainingTier {
    /// m_p = 1
    Single,
    /// 1 < m_p <= 20 r^2
    Moderate,
    /// m_p > 20 r^2
    Deep,
}

/// One exceptional prime set with its product and log-space size check.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeClassSet {
    pub primes: Vec<(u64, u32)>,
    /// prod p^{m_p}; 1 when empty.
    pub product: u64,
    pub ln_product: f64,
    pub ln_threshold: f64,
    /// ln_product < ln_threshold, or the set is empty.
    pub holds: bool,
    pub vacuous: bool,
}

/// Disjoint classification of the primes dividing q. Precedence is
/// P1, then P2, then P3; remaining primes carry a multiplicity tier.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeClassification {
    pub p1: PrimeClassSet,
    pub p2: PrimeClassSet,
    pub p3: PrimeClassSet,
    pub remaining: Vec<(u64, u32, RemainingTier)>,
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn class_set(primes: Vec<(u64, u32)>, ln_threshold: f64) -> PrimeClassSet {
    let product = primes.iter().fold(1u64, |acc, &(p, m)| acc * p.pow(m));
    let ln_product = primes
        .iter()
        .map(|&(p, m)| m as f64 * libm::log(p as f64))
        .sum();
    let vacuous = primes.is_empty();
    PrimeClassSet {
        primes,
        product,
        ln_product,
        ln_threshold,
        holds: vacuous || ln_product < ln_threshold,
        vacuous,
    }
}

/// Classify every prime of q into the exceptional sets
/// P1 (gcd(p^m, e_1...e_r) > p^{m/3}),
/// P2 (m > 20 r^2 and p^{floor(m/(10r))} divides E = prod (e_i - e_j)), and
/// P3 (not in P1, m <= 20 r^2, and a moderate gcd condition fails),
/// with the remaining primes put in multiplicity tiers. Membership in P1 and
/// P2 is decided by exact p-adic valuations; E itself is never formed.
///
/// P2 cannot fire inside the 63-bit modulus range: it needs m > 20 r^2,
/// which for r >= 2 forces q >= 2^81, and for r = 1 the empty product
/// E = 1 never gains the required valuation. The branch is kept anyway so
/// the classification matches its definition verbatim.
pub fn classify_primes(f: &SparsePolynomial) -> Result<PrimeClassification> {
    let q = f.modulus();
    let fact = factorize(q)?;
    let exps = f.exponents();
    let r = f.sparsity();
    let d = f.degree() as f64;
    let deep_cutoff = 20u64.saturating_mul(r as u64).saturating_mul(r as u64);

    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut p3 = Vec::new();
    let mut remaining = Vec::new();
    for &(p, m) in fact.factors() {
        // v_p(e_1 ... e_r), capped at m: gcd(p^m, prod e_i) = p^min(m, v)
        let v_prod: u32 = exps.iter().map(|&e| valuation(e, p)).sum();
        let in_p1 = 3 * core::cmp::min(m, v_prod) as u64 > m as u64;
        if in_p1 {
            p1.push((p, m));
            continue;
        }
        if m as u64 > deep_cutoff {
            let v_e: u64 = {
                let mut total = 0u64;
                for i in 0..exps.len() {
                    for j in (i + 1)..exps.len() {
                        total += valuation(exps[i].abs_diff(exps[j]), p) as u64;
                    }
                }
                total
            };
            let needed = (m as u64) / (10 * r as u64);
            if v_e >= needed {
                p2.push((p, m));
                continue;
            }
        }
        if m as u64 <= deep_cutoff && !moderate_gcd_on_exponents(&exps, p).pass {
            p3.push((p, m));
            continue;
        }
        let tier = if m == 1 {
            RemainingTier::Single
        } else if m as u64 <= deep_cutoff {
            RemainingTier::Moderate
        } else {
            RemainingTier::Deep
        };
        remaining.push((p, m, tier));
    }

    let ln_d = libm::log(d);
    let r_f = r as f64;
    Ok(PrimeClassification {
        p1: class_set(p1, 3.0 * r_f * ln_d),
        p2: class_set(p2, 20.0 * r_f * r_f * r_f * ln_d),
        p3: class_set(p3, 21.0 * r_f * r_f * libm::pow(d, 52.0 / 3.0)),
        remaining,
    })
}

/// The sum value, its magnitude, phi(q), and the bound menu in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumReport {
    pub q: u64,
    pub f: SparsePolynomial,
    pub value: Complex64,
    pub magnitude: f64,
    pub phi: u64,
    pub bounds: Vec<BoundEntry>,
}

impl ExpSumReport {
    pub fn compute(f: &SparsePolynomial, budget: u64) -> Result<ExpSumReport> {
        let value = sum_units_budgeted(f, budget)?;
        ExpSumReport::compute_with_value(f, value)
    }

    /// Build the report around an externally computed sum (thread-pool
    /// drivers); the caller guarantees `value` is S_q(f).
    pub fn compute_with_value(f: &SparsePolynomial, value: Complex64) -> Result<ExpSumReport> {
        let phi = phi_of_modulus(f)?;
        let magnitude = magnitude(value);
        debug_assert!(magnitude <= phi as f64 * (1.0 + 1e-6));
        Ok(ExpSumReport {
            q: f.modulus(),
            f: f.clone(),
            value,
            magnitude,
            phi,
            bounds: bound_menu(f)?,
        })
    }
}

/// Factorization accessor re-exported for report builders.
pub fn factorization_of(f: &SparsePolynomial) -> Result<Factorization> {
    factorize(f.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(q: u64, terms: &[(u64, u64)]) -> SparsePolynomial {
        SparsePolynomial::new(q, terms).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        magnitude(a - b) <= tol
    }

    /// Direct naive reference: straight-line summation in increasing x.
    fn naive_sum(f: &SparsePolynomial) -> Complex64 {
        let q = f.modulus();
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 1..q {
            if gcd(x, q) != 1 {
                continue;
            }
            let phase = TAU * f.evaluate(x) as f64 / q as f64;
            acc += Complex64::new(libm::cos(phase), libm::sin(phase));
        }
        acc
    }

    #[test]
    fn linear_sums_are_minus_one() {
        for p in [5u64, 101, 9973] {
            for a in [1u64, 2, p - 1] {
                let s = sum_units(&poly(p, &[(a, 1)])).unwrap();
                assert!(
                    close(s, Complex64::new(-1.0, 0.0), 1e-9),
                    "p={p} a={a} s={s}"
                );
            }
        }
    }

    #[test]
    fn gauss_sum_mod_5() {
        let s = sum_units(&poly(5, &[(1, 2)])).unwrap();
        let want = libm::sqrt(5.0) - 1.0;
        assert!((s.re - want).abs() < 1e-12 && s.im.abs() < 1e-12, "{s}");
    }

    #[test]
    fn power_p_minus_1_is_rotated_phi() {
        let p = 13u64;
        let s = sum_units(&poly(p, &[(1, p - 1)])).unwrap();
        let phase = TAU / p as f64;
        let want = Complex64::new(libm::cos(phase), libm::sin(phase)) * (p - 1) as f64;
        assert!(close(s, want, 1e-9), "{s} vs {want}");
    }

    #[test]
    fn chunked_reduction_matches_naive() {
        // composite modulus larger than one chunk
        let q = 3 * 5 * 7 * 11 * 13; // 15015
        let f = poly(q, &[(2, 1), (1, 3), (4, 7)]);
        let s = sum_units(&f).unwrap();
        let n = naive_sum(&f);
        assert!(close(s, n, 1e-9), "{s} vs {n}");
    }

    #[test]
    fn budget_refusal() {
        let f = poly(101, &[(1, 1)]);
        let err = sum_units_budgeted(&f, 10).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn crt_decompose_examples() {
        let f = poly(15, &[(1, 1), (1, 2)]);
        let factors = crt_decompose(&f).unwrap();
        assert_eq!(factors.len(), 2);
        assert_eq!((factors[0].p, factors[0].m, factors[0].lambda), (3, 1, 2)); // 5^{-1} mod 3
        assert_eq!((factors[1].p, factors[1].m, factors[1].lambda), (5, 1, 2)); // 3^{-1} mod 5

        let f = poly(97, &[(1, 1)]);
        let factors = crt_decompose(&f).unwrap();
        assert_eq!(
            factors,
            alloc::vec![CrtFactor {
                p: 97,
                m: 1,
                modulus: 97,
                lambda: 1
            }]
        );

        let f = poly(12, &[(1, 1), (1, 5)]);
        let factors = crt_decompose(&f).unwrap();
        assert_eq!((factors[0].modulus, factors[0].lambda), (4, 3)); // 3^{-1} mod 4
        assert_eq!((factors[1].modulus, factors[1].lambda), (3, 1)); // 4^{-1} mod 3
        let direct = sum_units(&f).unwrap();
        let product = sum_via_crt(&f).unwrap();
        assert!(close(direct, product, 1e-9), "{direct} vs {product}");
    }

    #[test]
    fn crt_product_identity_q15() {
        let f = poly(15, &[(1, 1), (1, 2)]);
        let direct = sum_units(&f).unwrap();
        let product = sum_via_crt(&f).unwrap();
        assert!(close(direct, product, 1e-9));
    }

    #[test]
    fn crt_equals_direct_for_primes_bitwise() {
        let f = poly(101, &[(1, 1), (2, 5)]);
        let a = sum_units(&f).unwrap();
        let b = sum_via_crt(&f).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn root_count_examples() {
        // x^3 - x mod 7: roots {0, 1, 6}
        let f = poly(7, &[(6, 1), (1, 3)]);
        assert_eq!(root_count(&f, 1 << 20).unwrap().count, 3);
        // x^4 - x mod 7: roots {0, 1, 2, 4}
        let f = poly(7, &[(6, 1), (1, 4)]);
        let rc = root_count(&f, 1 << 20).unwrap();
        assert_eq!(rc.count, 4);
        assert_eq!(rc.d_value, gcd(3, 6));
        assert!(!rc.monomial_convention);
        // x mod p: the single root x = 0
        let rc = root_count(&poly(11, &[(1, 1)]), 1 << 20).unwrap();
        assert_eq!(rc.count, 1);
        assert!(rc.monomial_convention);
        assert_eq!(rc.d_value, 1);
    }

    #[test]
    fn root_count_bounded_by_degree() {
        let mut rng = crate::rng::SplitMix64::new(11);
        for _ in 0..200 {
            let p = [7u64, 11, 13, 31, 97][rng.below(5) as usize];
            let e1 = rng.range(1, p - 1);
            let mut e2 = rng.range(1, p - 1);
            if e2 == e1 {
                e2 = e1 % (p - 1) + 1;
            }
            let Ok(f) =
                SparsePolynomial::new(p, &[(rng.range(1, p - 1), e1), (rng.range(1, p - 1), e2)])
            else {
                continue;
            };
            let reduced = match f.reduce_exponents_prime() {
                Ok(g) => g,
                Err(_) => continue,
            };
            let rc = root_count(&reduced, 1 << 20).unwrap();
            assert!(rc.count <= reduced.degree(), "f={reduced:?}");
        }
    }

    #[test]
    fn bound_menu_values() {
        // Weil on a monomial: (d-1) sqrt(p)
        let menu = bound_menu(&poly(5, &[(1, 2)])).unwrap();
        let weil = menu.iter().find(|b| b.name == "weil").unwrap();
        assert!((weil.value.unwrap() - libm::sqrt(5.0)).abs() < 1e-12);

        // Cochrane-Pinner on x^3 + x^7 mod 11
        let menu = bound_menu(&poly(11, &[(1, 3), (1, 7)])).unwrap();
        let cp = menu.iter().find(|b| b.name == "cochrane_pinner").unwrap();
        let want = 2.0 + 2.292 * libm::pow(11.0, 89.0 / 92.0);
        assert!((cp.value.unwrap() - want).abs() < 1e-9);

        // rho-based shape for f = x: p^{1 - 3/92}
        let menu = bound_menu(&poly(101, &[(1, 1)])).unwrap();
        let shape = menu.iter().find(|b| b.name == "unit_gcd_shape").unwrap();
        assert!((shape.value.unwrap() - libm::pow(101.0, 1.0 - 3.0 / 92.0)).abs() < 1e-9);
        assert!(shape.applicable);
        assert!(shape.constant_free);

        // prime power menu entry present for q = 9
        let menu = bound_menu(&poly(9, &[(1, 2)])).unwrap();
        assert!(menu.iter().any(|b| b.name == "prime_power_shape"));
        // and absent for q prime
        let menu = bound_menu(&poly(7, &[(1, 2)])).unwrap();
        assert!(!menu.iter().any(|b| b.name == "prime_power_shape"));
        // the log-scale uniform-degree entry always rides along
        let entry = menu
            .iter()
            .find(|b| b.name == "uniform_degree_shape")
            .unwrap();
        assert_eq!(entry.scale, BoundScale::LogNatural);
        let direct = uniform_degree_log_bound(&poly(7, &[(1, 2)])).unwrap();
        assert_eq!(entry.value, Some(direct.ln_bound));
    }

    #[test]
    fn uniform_degree_log_bound_examples() {
        // d = 1, r = 1, q = 10^6: 1 + (1 - 3/184) ln 10^6
        let f = poly(1_000_000, &[(1, 1)]);
        let b = uniform_degree_log_bound(&f).unwrap();
        let want = 1.0 + (1.0 - 3.0 / 184.0) * libm::log(1e6);
        assert!((b.ln_bound - want).abs() < 1e-9);
        assert_eq!(b.sigma_branch, SigmaBranch::Kappa);
        assert!(b.trivial); // ln phi(10^6) ~ 12.9 < 14.6

        // d = 2: 2^18 = 262144 dominates for any feasible q
        let f = poly(1_000_003, &[(1, 2)]);
        let b = uniform_degree_log_bound(&f).unwrap();
        assert!(b.ln_bound > 262144.0);
        assert!(b.trivial);

        // d = 1, r = 2 uses sigma_2 = 1/400
        let f = poly(1_000_000_007, &[(1, 1), (1, 2)]);
        let b = uniform_degree_log_bound(&f).unwrap();
        assert_eq!(b.sigma, BigRational::new(1.into(), 400.into()));
        assert_eq!(b.sigma_branch, SigmaBranch::Cubic);
    }

    #[test]
    fn classify_primes_examples() {
        // q = 3 * 5 * 7, f = x + x^3: p = 7 fails a moderate condition
        // (gcd(3-1, 6) = 3 > 7^{1/4}), p = 3 divides e_2 deeply enough for P1
        // (gcd(3, 3) = 3 > 3^{1/3}), and p = 5 survives
        let f = poly(105, &[(1, 1), (1, 3)]);
        let c = classify_primes(&f).unwrap();
        assert!(c.p3.primes.contains(&(7, 1)), "{c:?}");
        assert!(c.p1.primes.contains(&(3, 1)), "{c:?}");
        assert!(c.p2.vacuous);
        assert_eq!(c.remaining, alloc::vec![(5, 1, RemainingTier::Single)]);

        // q = 2^9, f = x^2: gcd(2^9, 2) = 2 <= 2^3, m = 9 <= 20 -> moderate tier
        let f = poly(512, &[(1, 2)]);
        let c = classify_primes(&f).unwrap();
        assert!(c.p1.vacuous && c.p2.vacuous);
        assert_eq!(c.remaining, alloc::vec![(2, 9, RemainingTier::Moderate)]);

        // r = 1, f = x: empty-product convention keeps P1 and P2 empty
        let f = poly(1 << 30, &[(1, 1)]);
        let c = classify_primes(&f).unwrap();
        assert!(c.p1.vacuous && c.p2.vacuous);
        assert_eq!(c.remaining.len(), 1);
        assert_eq!(c.remaining[0].2, RemainingTier::Deep); // m = 30 > 20
    }

    #[test]
    fn classification_partitions_q() {
        let f = poly(9 * 25 * 49 * 11, &[(1, 3), (1, 10)]);
        let c = classify_primes(&f).unwrap();
        let mut prod = c.p1.product as u128 * c.p2.product as u128 * c.p3.product as u128;
        for &(p, m, _) in &c.remaining {
            prod *= p.pow(m) as u128;
        }
        assert_eq!(prod, (9 * 25 * 49 * 11) as u128);
    }

    #[test]
    fn report_invariants() {
        let f = poly(101, &[(1, 1), (3, 5)]);
        let rep = ExpSumReport::compute(&f, DEFAULT_TERM_BUDGET).unwrap();
        assert!((rep.magnitude - magnitude(rep.value)).abs() <= 1e-12 * rep.phi as f64);
        assert!(rep.magnitude <= rep.phi as f64 * (1.0 + 1e-6));
        assert_eq!(rep.phi, 100);
        assert!(!rep.bounds.is_empty());
    }
}
