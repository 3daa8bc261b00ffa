//! The power generator u_{n+1} = u_n^e mod p, its period structure, the
//! order lemmas behind its distribution analysis, and the multivariate
//! generalizations (shifted-monomial, linear-twist, and monomial systems).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{gcd, is_prime, mul_mod, multiplicative_order, pow_mod};
use crate::{Error, Result};

/// A power generator u_n = theta^(e^n) mod p together with its period data:
/// T is the multiplicative order of theta, tau the period of the sequence,
/// and preperiod the length of the tail before the cycle (0 when
/// gcd(e, T) = 1, where the sequence is purely periodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub p: u64,
    pub e: u64,
    pub theta: u64,
    pub t_order: u64,
    pub preperiod: u64,
    pub period: u64,
}

/// Brent cycle detection on x -> f(x) from x0: returns (preperiod, period).
fn brent_cycle(f: impl Fn(u64) -> u64, x0: u64) -> (u64, u64) {
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = x0;
    let mut hare = f(x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power <<= 1;
            lam = 0;
        }
        hare = f(hare);
        lam += 1;
    }
    let mut tortoise = x0;
    let mut hare = x0;
    for _ in 0..lam {
        hare = f(hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = f(tortoise);
        hare = f(hare);
        mu += 1;
    }
    (mu, lam)
}

pub fn make_generator(p: u64, e: u64, theta: u64) -> Result<GeneratorSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if e < 2 {
        return Err(Error::OutOfRange {
            what: "generator exponent e must be >= 2",
        });
    }
    let theta = theta % p;
    if theta == 0 {
        return Err(Error::ZeroSeed);
    }
    let t_order = multiplicative_order(theta, p)?;
    let (preperiod, period) = if gcd(e, t_order) == 1 {
        (0, multiplicative_order(e, t_order)?)
    } else {
        // exponent orbit n -> e n mod T, starting from e^0 = 1
        brent_cycle(|x| mul_mod(e % t_order, x, t_order), 1 % t_order)
    };
    Ok(GeneratorSpec {
        p,
        e,
        theta,
        t_order,
        preperiod,
        period,
    })
}

impl GeneratorSpec {
    /// u_n = theta^(e^n mod T) mod p in O(log n + log T) multiplications.
    /// Negative indices are only defined in the purely periodic case, where
    /// e is invertible mod T.
    pub fn nth_term(&self, n: i64) -> Result<u64> {
        if self.t_order == 1 {
            return Ok(1 % self.p);
        }
        let exp = if n >= 0 {
            pow_mod(self.e, n as u64, self.t_order)
        } else {
            if self.preperiod != 0 {
                return Err(Error::NotPurelyPeriodic);
            }
            let idx = (n.rem_euclid(self.period as i64)) as u64;
            pow_mod(self.e, idx, self.t_order)
        };
        Ok(pow_mod(self.theta, exp, self.p))
    }

    /// First `count` terms u_0, u_1, ... by direct iteration.
    pub fn sequence(&self, count: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        let mut u = self.theta;
        for _ in 0..count {
            out.push(u);
            u = pow_mod(u, self.e, self.p);
        }
        out
    }
}

/// A violation of one of the order lemmas (never expected: they are
/// theorems, so a hit means an implementation bug).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderLemmaCounterexample {
    pub lemma: &'static str,
    pub q: u64,
    pub e: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderLemmaReport {
    pub q_max: u64,
    pub pairs_checked: u64,
    pub divisor_checks: u64,
    pub gcd_checks: u64,
    pub count_checks: u64,
    pub counterexample: Option<OrderLemmaCounterexample>,
}

/// Exhaustively verify, for every q <= q_max and every e coprime to q:
///   - order under divisors: tau_r >= (r/q) tau_q for every r | q,
///   - gcd lower bound: gcd(e^h - 1, q) <= h q / tau_q for h <= h_max,
///   - fiber count bound: at most qK/(r tau_q) + 1 positive k <= K with
///     gcd(e^k - e^m, q) = r, over deterministic sampled (m, K) pairs.
/// All comparisons are exact integer arithmetic. Stops at the first
/// counterexample.
pub fn verify_order_lemmas(q_max: u64, h_max: u64) -> Result<OrderLemmaReport> {
    if !(2..=10_000).contains(&q_max) {
        return Err(Error::OutOfRange {
            what: "order-lemma tier needs 2 <= q_max <= 10^4",
        });
    }
    let mut report = OrderLemmaReport {
        q_max,
        pairs_checked: 0,
        gcd_checks: 0,
        divisor_checks: 0,
        count_checks: 0,
        counterexample: None,
    };

    // smallest-prime-factor sieve for fast factorization below q_max
    let limit = (q_max + 1) as usize;
    let mut spf = vec![0u32; limit.max(3)];
    for i in 2..limit {
        if spf[i] == 0 {
            let mut j = i;
            while j < limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let factor_small = |mut n: u64| -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = spf[n as usize] as u64;
            let mut m = 0;
            while n % p == 0 {
                n /= p;
                m += 1;
            }
            out.push((p, m));
        }
        out
    };
    // order of a mod n, descending from `start` (a multiple of the order)
    let order_from = |a: u64, n: u64, start: u64, start_fact: &[(u64, u32)]| -> u64 {
        if n == 1 {
            return 1;
        }
        let mut t = start;
        for &(p, m) in start_fact {
            for _ in 0..m {
                if t % p == 0 && pow_mod(a, t / p, n) == 1 {
                    t /= p;
                } else {
                    break;
                }
            }
        }
        t
    };

    for q in 2..=q_max {
        let q_fact = factor_small(q);
        let phi = q_fact
            .iter()
            .fold(1u64, |acc, &(p, m)| acc * p.pow(m - 1) * (p - 1));
        let phi_fact = factor_small(phi);
        let divisors = {
            let mut divs = vec![1u64];
            for &(p, m) in &q_fact {
                let base = divs.clone();
                let mut pk = 1;
                for _ in 0..m {
                    pk *= p;
                    divs.extend(base.iter().map(|d| d * pk));
                }
            }
            divs
        };
        for e in 1..q {
            if gcd(e, q) != 1 {
                continue;
            }
            report.pairs_checked += 1;
            let tau_q = order_from(e, q, phi, &phi_fact);
            let tau_fact = factor_small(tau_q);

            // order under divisors
            for &r in &divisors {
                report.divisor_checks += 1;
                let tau_r = order_from(e % r.max(1), r, tau_q, &tau_fact);
                if tau_r * q < r * tau_q {
                    report.counterexample = Some(OrderLemmaCounterexample {
                        lemma: "order-under-divisors",
                        q,
                        e,
                        detail: format!("r={r} tau_r={tau_r} tau_q={tau_q}"),
                    });
                    return Ok(report);
                }
            }

            // gcd(e^h - 1, q) <= h q / tau_q
            let mut eh = 1u64;
            for h in 1..=h_max {
                eh = mul_mod(eh, e, q);
                report.gcd_checks += 1;
                let g = if eh == 1 { q } else { gcd(eh - 1, q) };
                if g * tau_q > h * q {
                    report.counterexample = Some(OrderLemmaCounterexample {
                        lemma: "gcd-lower-bound",
                        q,
                        e,
                        detail: format!("h={h} gcd={g} tau_q={tau_q}"),
                    });
                    return Ok(report);
                }
            }

            // fiber counts of gcd(e^k - e^m, q) = r for k <= K
            for m in [0u64, 1, 2] {
                let em = pow_mod(e, m, q);
                for k_cap in [core::cmp::min(20, tau_q), core::cmp::min(tau_q, 50)] {
                    let mut buckets: BTreeMap<u64, u64> = BTreeMap::new();
                    let mut ek = 1u64;
                    for _k in 1..=k_cap {
                        ek = mul_mod(ek, e, q);
                        let diff = (ek + q - em) % q;
                        let g = if diff == 0 { q } else { gcd(diff, q) };
                        *buckets.entry(g).or_insert(0) += 1;
                    }
                    for (&r, &count) in &buckets {
                        report.count_checks += 1;
                        // count <= qK/(r tau_q) + 1, cleared of denominators
                        if count * r * tau_q > q * k_cap + r * tau_q {
                            report.counterexample = Some(OrderLemmaCounterexample {
                                lemma: "fiber-count",
                                q,
                                e,
                                detail: format!("m={m} K={k_cap} r={r} count={count}"),
                            });
                            return Ok(report);
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// A multivariate polynomial as a sum of monomial terms over m variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    /// (coefficient, exponent per variable)
    pub terms: Vec<(u64, Vec<u64>)>,
}

impl MultiPoly {
    pub fn evaluate(&self, p: u64, point: &[u64]) -> u64 {
        let mut acc = 0u64;
        for (c, exps) in &self.terms {
            let mut term = *c % p;
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    term = mul_mod(term, pow_mod(*x, e, p), p);
                }
            }
            acc = (acc + term) % p;
        }
        acc
    }

    /// True when no variable with index < first appears.
    fn uses_only_vars_from(&self, first: usize) -> bool {
        self.terms
            .iter()
            .all(|(_, exps)| exps[..first].iter().all(|&e| e == 0))
    }
}

/// c0 + sum of coeffs_j X_{j+1}; used by the linear-twist generalization,
/// where forms live in F_p[X_2, ..., X_m].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub constant: u64,
    pub coeffs: Vec<u64>,
}

impl LinearForm {
    pub fn evaluate(&self, p: u64, point: &[u64]) -> u64 {
        let mut acc = self.constant % p;
        for (x, &c) in point.iter().zip(&self.coeffs) {
            acc = (acc + mul_mod(c % p, *x, p)) % p;
        }
        acc
    }

    fn is_nonconstant(&self, p: u64) -> bool {
        self.coeffs.iter().any(|&c| c % p != 0)
    }
}

/// The three multivariate generalizations of the power generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultivariateSystem {
    /// F_i = (X_i - h_i)^{e_i} G_i(X_{i+1..m}) + h_i for i < m,
    /// F_m = g (X_m - h_m)^{e_m} + h_m, with zero-free G_i.
    ShiftedMonomial {
        p: u64,
        exps: Vec<u64>,
        shifts: Vec<u64>,
        coeff_polys: Vec<MultiPoly>,
        last_scale: u64,
    },
    /// F_1 = X_1^e L_1 + L_0, F_2..F_m non-constant linear forms, all forms
    /// in F_p[X_2, ..., X_m].
    LinearTwist {
        p: u64,
        e: u64,
        l1: LinearForm,
        l0: LinearForm,
        rest: Vec<LinearForm>,
    },
    /// F_j = prod over k of X_k^(E_jk) for a triangular exponent matrix.
    Monomial { p: u64, matrix: Vec<Vec<u64>> },
}

/// Budget on exhaustive zero-freeness verification for the shifted-monomial
/// system (p^vars evaluations).
const ZERO_FREE_BUDGET: u128 = 100_000_000;

/// Largest p at which zero-freeness is verified by exhaustion rather than
/// demanded from the caller.
const ZERO_FREE_EXHAUSTION_P: u64 = 1000;

pub fn make_shifted_monomial(
    p: u64,
    exps: &[u64],
    shifts: &[u64],
    coeff_polys: &[MultiPoly],
    last_scale: u64,
    zero_free_asserted: bool,
) -> Result<MultivariateSystem> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    let m = exps.len();
    if m == 0 || shifts.len() != m || coeff_polys.len() + 1 != m {
        return Err(Error::OutOfRange {
            what: "shifted-monomial system dimensions",
        });
    }
    if exps.iter().any(|&e| e == 0) {
        return Err(Error::ExponentZero);
    }
    if last_scale % p == 0 {
        return Err(Error::OutOfRange {
            what: "last coefficient g must be a unit",
        });
    }
    for (i, g) in coeff_polys.iter().enumerate() {
        if g.terms.iter().any(|(_, ex)| ex.len() != m) {
            return Err(Error::OutOfRange {
                what: "coefficient polynomial arity",
            });
        }
        if !g.uses_only_vars_from(i + 1) {
            return Err(Error::Invalid(format!(
                "G_{} may only use variables X_{}..X_{m}",
                i + 1,
                i + 2
            )));
        }
        // zero-freeness over the variables that actually occur
        let vars = m - (i + 1);
        let work = (p as u128).saturating_pow(vars as u32);
        if p <= ZERO_FREE_EXHAUSTION_P && work <= ZERO_FREE_BUDGET {
            let mut point = vec![0u64; m];
            let mut counter = vec![0u64; vars];
            loop {
                for (j, &c) in counter.iter().enumerate() {
                    point[i + 1 + j] = c;
                }
                if g.evaluate(p, &point) == 0 {
                    return Err(Error::ZeroValueFound {
                        witness: point[i + 1..].iter().fold(0, |acc, &x| acc * p + x),
                    });
                }
                let mut j = 0;
                loop {
                    if j == vars {
                        break;
                    }
                    counter[j] += 1;
                    if counter[j] < p {
                        break;
                    }
                    counter[j] = 0;
                    j += 1;
                }
                if j == vars {
                    break;
                }
            }
        } else if !zero_free_asserted {
            return Err(Error::UnverifiedZeroFreeness);
        }
    }
    Ok(MultivariateSystem::ShiftedMonomial {
        p,
        exps: exps.to_vec(),
        shifts: shifts.to_vec(),
        coeff_polys: coeff_polys.to_vec(),
        last_scale,
    })
}

pub fn make_linear_twist(
    p: u64,
    e: u64,
    l1: LinearForm,
    l0: LinearForm,
    rest: &[LinearForm],
) -> Result<MultivariateSystem> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if e == 0 {
        return Err(Error::ExponentZero);
    }
    let m = rest.len() + 1;
    for form in [&l1, &l0].into_iter().chain(rest.iter()) {
        if form.coeffs.len() != m {
            return Err(Error::OutOfRange {
                what: "linear form arity",
            });
        }
        if form.coeffs[0] % p != 0 {
            return Err(Error::Invalid(String::from("forms may not involve X_1")));
        }
        if !form.is_nonconstant(p) {
            return Err(Error::Invalid(String::from("forms must be non-constant")));
        }
    }
    Ok(MultivariateSystem::LinearTwist {
        p,
        e,
        l1,
        l0,
        rest: rest.to_vec(),
    })
}

pub fn make_monomial(p: u64, matrix: &[Vec<u64>]) -> Result<MultivariateSystem> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    let m = matrix.len();
    if m == 0 || matrix.iter().any(|row| row.len() != m) {
        return Err(Error::OutOfRange {
            what: "exponent matrix must be square",
        });
    }
    let lower = (0..m).all(|i| (i + 1..m).all(|j| matrix[i][j] == 0));
    let upper = (0..m).all(|i| (0..i).all(|j| matrix[i][j] == 0));
    if !(lower || upper) {
        return Err(Error::NotTriangular);
    }
    Ok(MultivariateSystem::Monomial {
        p,
        matrix: matrix.to_vec(),
    })
}

/// Orbit of a multivariate system, with cycle data when a repeat occurred
/// within the requested window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub states: Vec<Vec<u64>>,
    pub preperiod: Option<u64>,
    pub period: Option<u64>,
}

impl MultivariateSystem {
    pub fn p(&self) -> u64 {
        match self {
            MultivariateSystem::ShiftedMonomial { p, .. }
            | MultivariateSystem::LinearTwist { p, .. }
            | MultivariateSystem::Monomial { p, .. } => *p,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            MultivariateSystem::ShiftedMonomial { exps, .. } => exps.len(),
            MultivariateSystem::LinearTwist { rest, .. } => rest.len() + 1,
            MultivariateSystem::Monomial { matrix, .. } => matrix.len(),
        }
    }

    /// One step u -> (F_1(u), ..., F_m(u)).
    pub fn step(&self, u: &[u64]) -> Vec<u64> {
        let p = self.p();
        match self {
            MultivariateSystem::ShiftedMonomial {
                exps,
                shifts,
                coeff_polys,
                last_scale,
                ..
            } => {
                let m = exps.len();
                let mut next = Vec::with_capacity(m);
                for i in 0..m {
                    let base = (u[i] + p - shifts[i] % p) % p;
                    let powed = pow_mod(base, exps[i], p);
                    let scale = if i + 1 < m {
                        coeff_polys[i].evaluate(p, u)
                    } else {
                        *last_scale % p
                    };
                    next.push((mul_mod(powed, scale, p) + shifts[i] % p) % p);
                }
                next
            }
            MultivariateSystem::LinearTwist {
                e, l1, l0, rest, ..
            } => {
                let x1e = pow_mod(u[0], *e, p);
                let mut next = Vec::with_capacity(rest.len() + 1);
                next.push((mul_mod(x1e, l1.evaluate(p, u), p) + l0.evaluate(p, u)) % p);
                for form in rest {
                    next.push(form.evaluate(p, u));
                }
                next
            }
            MultivariateSystem::Monomial { matrix, .. } => matrix
                .iter()
                .map(|row| {
                    let mut term = 1u64 % p;
                    for (x, &e) in u.iter().zip(row) {
                        if e > 0 {
                            term = mul_mod(term, pow_mod(*x, e, p), p);
                        }
                    }
                    term
                })
                .collect(),
        }
    }

    /// The orbit u_0, ..., u_{count-1} with cycle detection.
    pub fn iterate(&self, u0: &[u64], count: usize) -> Result<Orbit> {
        let p = self.p();
        if u0.len() != self.dimension() {
            return Err(Error::OutOfRange {
                what: "initial vector dimension",
            });
        }
        if u0.iter().any(|&x| x >= p) {
            return Err(Error::OutOfRange {
                what: "initial vector coordinates must be < p",
            });
        }
        let mut seen: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        let mut states = Vec::with_capacity(count);
        let mut preperiod = None;
        let mut period = None;
        let mut u = u0.to_vec();
        for n in 0..count {
            if preperiod.is_none() {
                if let Some(&first) = seen.get(&u) {
                    preperiod = Some(first);
                    period = Some(n as u64 - first);
                } else {
                    seen.insert(u.clone(), n as u64);
                }
            }
            states.push(u.clone());
            u = self.step(&u);
        }
        Ok(Orbit {
            states,
            preperiod,
            period,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_11_3_2() {
        let g = make_generator(11, 3, 2).unwrap();
        assert_eq!((g.t_order, g.period, g.preperiod), (10, 4, 0));
        assert_eq!(g.sequence(5), vec![2, 8, 6, 7, 2]);
    }

    #[test]
    fn constant_generator() {
        let g = make_generator(13, 5, 1).unwrap();
        assert_eq!((g.t_order, g.period, g.preperiod), (1, 1, 0));
        assert_eq!(g.sequence(3), vec![1, 1, 1]);
        assert_eq!(g.nth_term(12345).unwrap(), 1);
    }

    #[test]
    fn eventually_periodic_case() {
        // p=7, e=2, theta=3: T = 6, exponent orbit 1, 2, 4, 2, ...
        let g = make_generator(7, 2, 3).unwrap();
        assert_eq!((g.t_order, g.preperiod, g.period), (6, 1, 2));
        assert_eq!(g.sequence(5), vec![3, 2, 4, 2, 4]);
        assert!(g.nth_term(-1).is_err());
        assert_eq!(g.nth_term(3).unwrap(), 2);
    }

    #[test]
    fn nth_term_examples() {
        let g = make_generator(11, 3, 2).unwrap();
        assert_eq!(g.nth_term(2).unwrap(), 6); // 2^9 mod 11
        assert_eq!(g.nth_term(0).unwrap(), 2);
        // n = -1: e^{-1} = 7 mod 10, so u_{-1} = 2^7 = 7; check (u_{-1})^3 = u_0
        assert_eq!(g.nth_term(-1).unwrap(), 7);
        assert_eq!(pow_mod(7, 3, 11), 2);
    }

    #[test]
    fn nth_term_agrees_with_iteration() {
        for (p, e, theta) in [(11u64, 3u64, 2u64), (101, 7, 5), (97, 2, 3), (13, 6, 7)] {
            let g = make_generator(p, e, theta).unwrap();
            let seq = g.sequence(300);
            for (n, &want) in seq.iter().enumerate() {
                assert_eq!(
                    g.nth_term(n as i64).unwrap(),
                    want,
                    "p={p} e={e} th={theta} n={n}"
                );
            }
        }
    }

    #[test]
    fn period_is_minimal() {
        for (p, e, theta) in [(11u64, 3u64, 2u64), (31, 5, 3), (7, 2, 3), (13, 4, 2)] {
            let g = make_generator(p, e, theta).unwrap();
            let horizon = (g.preperiod + 2 * g.period) as usize + 2;
            let seq = g.sequence(horizon);
            let n0 = g.preperiod as usize;
            assert_eq!(seq[n0 + g.period as usize], seq[n0]);
            for t in 1..g.period as usize {
                assert_ne!(seq[n0 + t], seq[n0], "premature repeat p={p} e={e}");
            }
        }
    }

    #[test]
    fn rejects_bad_generators() {
        assert_eq!(make_generator(11, 3, 0), Err(Error::ZeroSeed));
        assert_eq!(make_generator(11, 3, 11), Err(Error::ZeroSeed));
        assert!(make_generator(10, 3, 7).is_err());
        assert!(make_generator(11, 1, 2).is_err());
    }

    #[test]
    fn order_lemmas_small_tier() {
        let report = verify_order_lemmas(60, 8).unwrap();
        assert!(report.counterexample.is_none(), "{report:?}");
        assert!(report.pairs_checked > 0);
        // spot example: q=10, e=3 has tau=4; h=2: gcd(8, 10) = 2 <= 2*10/4
        assert_eq!(multiplicative_order(3, 10).unwrap(), 4);
        assert_eq!(gcd(pow_mod(3, 2, 10) + 10 - 1, 10), 2);
    }

    #[test]
    fn monomial_system_m1_reduces_to_power_generator() {
        let sys = make_monomial(11, &[vec![3]]).unwrap();
        let orbit = sys.iterate(&[2], 8).unwrap();
        let g = make_generator(11, 3, 2).unwrap();
        let want: Vec<Vec<u64>> = g.sequence(8).into_iter().map(|u| vec![u]).collect();
        assert_eq!(orbit.states, want);
        assert_eq!(orbit.preperiod, Some(0));
        assert_eq!(orbit.period, Some(4));
    }

    #[test]
    fn monomial_system_example() {
        let sys = make_monomial(11, &[vec![3, 0], vec![1, 3]]).unwrap();
        let orbit = sys.iterate(&[2, 3], 2).unwrap();
        // u_1 = (2^3, 2^1 3^3) = (8, 54 mod 11) = (8, 10)
        assert_eq!(orbit.states[1], vec![8, 10]);
        assert!(make_monomial(11, &[vec![1, 2], vec![3, 4]]).is_err());
    }

    #[test]
    fn linear_twist_step_oracle() {
        // p=7, m=2: F_1 = X_1^3 (1 + X_2) + X_2, F_2 = 2 + 3 X_2
        let l1 = LinearForm {
            constant: 1,
            coeffs: vec![0, 1],
        };
        let l0 = LinearForm {
            constant: 0,
            coeffs: vec![0, 1],
        };
        let f2 = LinearForm {
            constant: 2,
            coeffs: vec![0, 3],
        };
        let sys = make_linear_twist(7, 3, l1, l0, &[f2]).unwrap();
        let u = [2u64, 5];
        // by hand: 2^3 = 1 mod 7; F_1 = 1 * (1+5) + 5 = 11 = 4; F_2 = 2 + 15 = 3
        assert_eq!(sys.step(&u), vec![4, 3]);
        // constant form rejected
        let f_bad = LinearForm {
            constant: 2,
            coeffs: vec![0, 0],
        };
        assert!(make_linear_twist(
            7,
            3,
            LinearForm {
                constant: 1,
                coeffs: vec![0, 1]
            },
            LinearForm {
                constant: 0,
                coeffs: vec![0, 1]
            },
            &[f_bad]
        )
        .is_err());
    }

    #[test]
    fn shifted_monomial_system() {
        // p=5, m=2: F_1 = (X_1 - 1)^2 G_1(X_2) + 1 with G_1 = X_2^2 + 2
        // (zero-free: squares are {0,1,4}, +2 -> {2,3,1}), F_2 = 3 (X_2 - 2)^3 + 2
        let g1 = MultiPoly {
            terms: vec![(1, vec![0, 2]), (2, vec![0, 0])],
        };
        let sys = make_shifted_monomial(5, &[2, 3], &[1, 2], &[g1.clone()], 3, false).unwrap();
        let u = [3u64, 4];
        // (3-1)^2 = 4; G_1(4) = 16+2 = 18 = 3; F_1 = 4*3 + 1 = 13 = 3
        // (4-2)^3 = 8 = 3; F_2 = 3*3 + 2 = 11 = 1
        assert_eq!(sys.step(&u), vec![3, 1]);

        // a G with a zero is rejected by exhaustion: G = X_2
        let g_zero = MultiPoly {
            terms: vec![(1, vec![0, 1])],
        };
        assert!(matches!(
            make_shifted_monomial(5, &[2, 3], &[1, 2], &[g_zero], 3, false),
            Err(Error::ZeroValueFound { .. })
        ));
    }

    #[test]
    fn orbit_cycle_detection() {
        let sys = make_monomial(7, &[vec![2, 0], vec![1, 1]]).unwrap();
        let orbit = sys.iterate(&[3, 1], 60).unwrap();
        let (mu, lam) = (
            orbit.preperiod.unwrap() as usize,
            orbit.period.unwrap() as usize,
        );
        assert!(lam >= 1);
        for n in mu..(orbit.states.len() - lam) {
            assert_eq!(orbit.states[n], orbit.states[n + lam]);
        }
    }

    #[test]
    fn linear_twist_orbit_is_eventually_periodic() {
        // state space has at most p^m vectors, so any window of p^m + 1
        // steps must close a cycle
        let l1 = LinearForm { constant: 1, coeffs: vec![0, 2] };
        let l0 = LinearForm { constant: 3, coeffs: vec![0, 1] };
        let f2 = LinearForm { constant: 1, coeffs: vec![0, 4] };
        let sys = make_linear_twist(5, 2, l1, l0, &[f2]).unwrap();
        let orbit = sys.iterate(&[2, 3], 26).unwrap();
        let (mu, lam) = (orbit.preperiod.unwrap() as usize, orbit.period.unwrap() as usize);
        assert!(mu + lam <= 25);
        for n in mu..(orbit.states.len() - lam) {
            assert_eq!(orbit.states[n], orbit.states[n + lam]);
        }
        // every state re-derives from its predecessor
        for w in orbit.states.windows(2) {
            assert_eq!(sys.step(&w[0]), w[1]);
        }
    }

    #[test]
    fn shifted_monomial_orbit_consistency() {
        let g1 = MultiPoly { terms: vec![(1, vec![0, 2]), (2, vec![0, 0])] };
        let sys = make_shifted_monomial(5, &[2, 3], &[1, 2], &[g1], 3, false).unwrap();
        let orbit = sys.iterate(&[3, 4], 30).unwrap();
        for w in orbit.states.windows(2) {
            assert_eq!(sys.step(&w[0]), w[1]);
        }
        assert!(orbit.period.is_some(), "25-state space must cycle inside 30 steps");
    }
}
