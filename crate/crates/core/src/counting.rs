//! Brute-force oracles for the power-sum solution counts I_{r,t}, the fiber
//! counts J_{r,t}(lambda), and the orthogonality identity tying them to
//! moments of exponential sums.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::poly::{coprime_gcd_on_exponents, strict_gcd_on_exponents, ConditionReport};
use crate::{Error, Result};

/// Default budget on enumerated tuples.
pub const DEFAULT_TUPLE_BUDGET: u64 = 1_000_000_000;

fn check_inputs(exps: &[u64], t: u32, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if exps.is_empty() || t == 0 {
        return Err(Error::OutOfRange {
            what: "need r >= 1 and t >= 1",
        });
    }
    Ok(())
}

fn check_budget(p: u64, t: u32, exponent: u32, budget: u64, what: &'static str) -> Result<()> {
    let mut required: u128 = 1;
    for _ in 0..(t * exponent) {
        required = required.saturating_mul((p - 1) as u128);
        if required > budget as u128 {
            return Err(Error::BudgetExceeded {
                required,
                budget,
                what,
            });
        }
    }
    Ok(())
}

/// x^{e_i} lookup tables for x in [0, p).
fn power_tables(exps: &[u64], p: u64) -> Vec<Vec<u64>> {
    exps.iter()
        .map(|&e| (0..p).map(|x| pow_mod(x, e, p)).collect())
        .collect()
}

/// Walk all tuples (x_1, ..., x_t) in (F_p^*)^t maintaining the running
/// power sums (sum_j x_j^{e_i})_i, and call `visit` on each.
fn for_each_power_sum(
    pows: &[Vec<u64>],
    t: u32,
    p: u64,
    sums: &mut [u64],
    visit: &mut impl FnMut(&[u64]),
) {
    if t == 0 {
        visit(sums);
        return;
    }
    for x in 1..p {
        for (i, table) in pows.iter().enumerate() {
            sums[i] += table[x as usize];
            if sums[i] >= p {
                sums[i] -= p;
            }
        }
        for_each_power_sum(pows, t - 1, p, sums, visit);
        for (i, table) in pows.iter().enumerate() {
            sums[i] = (sums[i] + p - table[x as usize]) % p;
        }
    }
}

fn pack_key(values: &[u64], p: u64) -> Result<u64> {
    let mut key: u128 = 0;
    for &v in values.iter().rev() {
        key = key * p as u128 + v as u128;
        if key > u64::MAX as u128 {
            return Err(Error::Overflow {
                what: "packed lambda key p^r",
            });
        }
    }
    Ok(key as u64)
}

/// Decode a packed lambda key back into its r coordinates.
pub fn unpack_key(mut key: u64, p: u64, r: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(r);
    for _ in 0..r {
        out.push(key % p);
        key /= p;
    }
    out
}

/// Number of solutions of x_1^{e_i} + ... + x_t^{e_i} = y_1^{e_i} + ... +
/// y_t^{e_i} (i = 1..r) in (F_p^*)^{2t}, computed as the sum of squared
/// fiber multiplicities over the power-sum fingerprint map. This is
/// O((p-1)^t) in memory instead of O((p-1)^{2t}) in time.
pub fn count_solutions(exps: &[u64], t: u32, p: u64, budget: u64) -> Result<u64> {
    check_inputs(exps, t, p)?;
    check_budget(p, t, 2, budget, "power-sum tuple enumeration")?;
    pack_key(&vec![p - 1; exps.len()], p)?;
    let pows = power_tables(exps, p);
    let mut fibers: BTreeMap<u64, u64> = BTreeMap::new();
    let mut sums = vec![0u64; exps.len()];
    let mut visit = |s: &[u64]| {
        let key = pack_key(s, p).expect("checked above");
        *fibers.entry(key).or_insert(0) += 1;
    };
    for_each_power_sum(&pows, t, p, &mut sums, &mut visit);
    Ok(fibers.values().map(|&c| c * c).sum())
}

/// Full distribution of lambda = (a_i (x_1^{e_i} + ... + x_t^{e_i}))_i over
/// x in (F_p^*)^t, keyed by the base-p packed lambda vector. Zero fibers are
/// omitted; the counts sum to (p-1)^t.
pub fn fiber_distribution(
    coeffs: &[u64],
    exps: &[u64],
    t: u32,
    p: u64,
    budget: u64,
) -> Result<BTreeMap<u64, u64>> {
    check_inputs(exps, t, p)?;
    if coeffs.len() != exps.len() {
        return Err(Error::OutOfRange {
            what: "coefficient and exponent counts differ",
        });
    }
    if coeffs.iter().any(|&a| a % p == 0) {
        return Err(Error::OutOfRange {
            what: "coefficients must be units mod p",
        });
    }
    check_budget(p, t, 1, budget, "fiber tuple enumeration")?;
    pack_key(&vec![p - 1; exps.len()], p)?;
    let pows = power_tables(exps, p);
    let mut fibers: BTreeMap<u64, u64> = BTreeMap::new();
    let mut sums = vec![0u64; exps.len()];
    let mut scaled = vec![0u64; exps.len()];
    let mut visit = |s: &[u64]| {
        for i in 0..s.len() {
            scaled[i] = mul_mod(s[i], coeffs[i] % p, p);
        }
        let key = pack_key(&scaled, p).expect("checked above");
        *fibers.entry(key).or_insert(0) += 1;
    };
    for_each_power_sum(&pows, t, p, &mut sums, &mut visit);
    Ok(fibers)
}

/// The three identities from the moment method, all evaluated directly:
/// sum_J = (p-1)^t, sum_J_sq = I_{r,t}, and the orthogonality value
/// p^{-r} sum over lambda of |sum_z e_p(lambda . z^e)|^{2t}.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub p: u64,
    pub exps: Vec<u64>,
    pub coeffs: Vec<u64>,
    pub t: u32,
    pub count: u64,
    pub sum_j: u64,
    pub sum_j_sq: u64,
    pub orthogonality: f64,
}

pub fn verify_moments(
    coeffs: &[u64],
    exps: &[u64],
    t: u32,
    p: u64,
    budget: u64,
) -> Result<MomentReport> {
    let count = count_solutions(exps, t, p, budget)?;
    let fibers = fiber_distribution(coeffs, exps, t, p, budget)?;
    let sum_j: u64 = fibers.values().sum();
    let sum_j_sq: u64 = fibers.values().map(|&c| c * c).sum();

    // direct complex evaluation of p^{-r} sum_lambda |T(lambda)|^{2t}
    let r = exps.len();
    let mut p_pow_r: u128 = 1;
    for _ in 0..r {
        p_pow_r = p_pow_r.saturating_mul(p as u128);
    }
    let orth_work = p_pow_r.saturating_mul((p - 1) as u128);
    if orth_work > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: orth_work,
            budget,
            what: "orthogonality lambda enumeration",
        });
    }
    let pows = power_tables(exps, p);
    let tau = core::f64::consts::TAU;
    let scale = tau / p as f64;
    let mut total = 0.0f64;
    let mut lambda = vec![0u64; r];
    loop {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for z in 1..p {
            let mut phase_int = 0u64;
            for i in 0..r {
                phase_int = (phase_int + mul_mod(lambda[i], pows[i][z as usize], p)) % p;
            }
            let (s, c) = libm::sincos(phase_int as f64 * scale);
            re += c;
            im += s;
        }
        let mag2 = re * re + im * im;
        let mut term = 1.0;
        for _ in 0..t {
            term *= mag2;
        }
        total += term;
        // odometer over lambda in F_p^r
        let mut i = 0;
        loop {
            if i == r {
                break;
            }
            lambda[i] += 1;
            if lambda[i] < p {
                break;
            }
            lambda[i] = 0;
            i += 1;
        }
        if i == r {
            break;
        }
    }
    let orthogonality = total / libm::pow(p as f64, r as f64);

    Ok(MomentReport {
        p,
        exps: exps.to_vec(),
        coeffs: coeffs.to_vec(),
        t,
        count,
        sum_j,
        sum_j_sq,
        orthogonality,
    })
}

/// Condition sets controlling the fourth-moment bounds for r = 2, with the
/// constant-free reference values p^{3-4 eps} and p^{3-3/23}.
#[derive(Debug, Clone, PartialEq)]
pub struct FourthMomentConditions {
    pub strict: ConditionReport,
    pub coprime: ConditionReport,
    pub reference_strict: f64,
    pub reference_coprime: f64,
}

pub fn fourth_moment_conditions(
    e1: u64,
    e2: u64,
    p: u64,
    eps: &BigRational,
) -> Result<FourthMomentConditions> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    let exps = [e1, e2];
    let strict = strict_gcd_on_exponents(&exps, p, eps)?;
    let coprime = coprime_gcd_on_exponents(&exps, p);
    let eps_f = num_traits::ToPrimitive::to_f64(eps).expect("eps fits f64");
    Ok(FourthMomentConditions {
        strict,
        coprime,
        reference_strict: libm::pow(p as f64, 3.0 - 4.0 * eps_f),
        reference_coprime: libm::pow(p as f64, 3.0 - 3.0 / 23.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::parse_rational;

    /// Exhaustive reference: scan all (x, y) tuples in (F_p^*)^{2t}.
    fn naive_count(exps: &[u64], t: u32, p: u64) -> u64 {
        let pows = power_tables(exps, p);
        let mut tuples: Vec<Vec<u64>> = Vec::new();
        let mut sums = vec![0u64; exps.len()];
        let mut visit = |s: &[u64]| tuples.push(s.to_vec());
        for_each_power_sum(&pows, t, p, &mut sums, &mut visit);
        let mut count = 0u64;
        for a in &tuples {
            for b in &tuples {
                if a == b {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn count_examples() {
        // r=1, t=1, e=2, p=7: each x pairs with y = +-x
        assert_eq!(count_solutions(&[2], 1, 7, 1 << 20).unwrap(), 12);
        assert_eq!(naive_count(&[2], 1, 7), 12);
        // r=1, t=2, e=1, p=5: exhaustive 256-tuple scan
        let want = naive_count(&[1], 2, 5);
        assert_eq!(want, 52);
        assert_eq!(count_solutions(&[1], 2, 5, 1 << 20).unwrap(), 52);
        // gcd(e, p-1) = 1 makes x -> x^e a bijection on units
        assert_eq!(count_solutions(&[5], 1, 7, 1 << 20).unwrap(), 6);
    }

    #[test]
    fn count_matches_naive_on_grid() {
        for p in [5u64, 7] {
            for t in 1..=2u32 {
                for e1 in 1..p {
                    assert_eq!(
                        count_solutions(&[e1], t, p, 1 << 24).unwrap(),
                        naive_count(&[e1], t, p),
                        "p={p} t={t} e={e1}"
                    );
                }
                assert_eq!(
                    count_solutions(&[2, 3], t, p, 1 << 24).unwrap(),
                    naive_count(&[2, 3], t, p)
                );
            }
        }
    }

    #[test]
    fn fiber_examples() {
        // identity map on units
        let d = fiber_distribution(&[1], &[1], 1, 5, 1 << 20).unwrap();
        let want: BTreeMap<u64, u64> = [(1, 1), (2, 1), (3, 1), (4, 1)].into_iter().collect();
        assert_eq!(d, want);
        // quadratic residues mod 7, each hit twice
        let d = fiber_distribution(&[1], &[2], 1, 7, 1 << 20).unwrap();
        let want: BTreeMap<u64, u64> = [(1, 2), (2, 2), (4, 2)].into_iter().collect();
        assert_eq!(d, want);
        // (x, x^2) is injective on F_7^*
        let d = fiber_distribution(&[1, 1], &[1, 2], 1, 7, 1 << 20).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.values().all(|&c| c == 1));
        // unpacking returns coordinates
        let (&key, _) = d.iter().next().unwrap();
        let lam = unpack_key(key, 7, 2);
        assert_eq!(lam.len(), 2);
        assert_eq!(pack_key(&lam, 7).unwrap(), key);
    }

    #[test]
    fn moment_identities_examples() {
        let m = verify_moments(&[1], &[2], 1, 5, 1 << 24).unwrap();
        assert_eq!((m.sum_j, m.sum_j_sq, m.count), (4, 8, 8));
        assert!((m.orthogonality - 8.0).abs() <= 1e-6 * 8.0);

        let m = verify_moments(&[1, 1], &[1, 2], 1, 7, 1 << 24).unwrap();
        assert_eq!((m.sum_j, m.sum_j_sq, m.count), (6, 6, 6));
        assert!((m.orthogonality - 6.0).abs() <= 1e-6 * 6.0);
    }

    #[test]
    fn moment_identities_grid() {
        for p in [5u64, 7, 11] {
            for t in 1..=2u32 {
                for (coeffs, exps) in [
                    (vec![1u64], vec![1u64]),
                    (vec![2], vec![2]),
                    (vec![1, 2], vec![1, 3]),
                    (vec![3, 1], vec![2, p - 1]),
                ] {
                    let m = verify_moments(&coeffs, &exps, t, p, 1 << 26).unwrap();
                    let mut want = 1u64;
                    for _ in 0..t {
                        want *= p - 1;
                    }
                    assert_eq!(m.sum_j, want, "p={p} t={t} exps={exps:?}");
                    assert_eq!(m.sum_j_sq, m.count, "p={p} t={t} exps={exps:?}");
                    assert!(
                        (m.orthogonality - m.count as f64).abs() <= 1e-6 * m.count as f64,
                        "p={p} t={t} exps={exps:?} orth={} count={}",
                        m.orthogonality,
                        m.count
                    );
                }
            }
        }
    }

    #[test]
    fn count_invariant_under_exponent_reduction() {
        for p in [5u64, 7, 11, 13] {
            for e in 1..(2 * p) {
                let reduced = (e - 1) % (p - 1) + 1;
                assert_eq!(
                    count_solutions(&[e], 1, p, 1 << 24).unwrap(),
                    count_solutions(&[reduced], 1, p, 1 << 24).unwrap(),
                    "p={p} e={e}"
                );
            }
        }
    }

    #[test]
    fn dropping_an_equation_grows_the_count() {
        for p in [5u64, 7, 11, 13] {
            for t in 1..=2u32 {
                for e1 in 1..p {
                    for e2 in (e1 + 1)..p {
                        let two = count_solutions(&[e1, e2], t, p, 1 << 26).unwrap();
                        let one = count_solutions(&[e1], t, p, 1 << 26).unwrap();
                        assert!(two <= one, "p={p} t={t} e=({e1},{e2})");
                    }
                }
            }
        }
    }

    #[test]
    fn budget_refusals() {
        assert!(count_solutions(&[1], 4, 101, 1000).unwrap_err().is_budget());
        assert!(fiber_distribution(&[1], &[1], 4, 101, 1000)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn fourth_moment_condition_examples() {
        let eps = parse_rational("3/92").unwrap();
        let c = fourth_moment_conditions(3, 7, 11, &eps).unwrap();
        assert!(c.coprime.pass);
        let c = fourth_moment_conditions(2, 4, 13, &eps).unwrap();
        assert!(!c.coprime.pass); // gcd(2, 12) = 2 != 1
        let want = libm::pow(11.0, 3.0 - 12.0 / 92.0);
        let c = fourth_moment_conditions(3, 7, 11, &eps).unwrap();
        assert!((c.reference_strict - want).abs() < 1e-9);
        assert!((c.reference_coprime - libm::pow(11.0, 3.0 - 3.0 / 23.0)).abs() < 1e-9);
    }
}
