//! Exact integer and modular arithmetic in 63-bit unsigned range with
//! double-width intermediates.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest supported modulus / integer (63 bits keeps products inside u128
/// and sums inside u64 everywhere).
pub const MAX_INT: u64 = (1u64 << 63) - 1;

/// Trial division limit before switching to Pollard rho.
const TRIAL_LIMIT: u64 = 1_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// gcd of a signed difference with an unsigned modulus.
pub fn gcd_diff(a: u64, b: u64, n: u64) -> u64 {
    gcd(a.abs_diff(b), n)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus` by binary exponentiation, O(log exp) multiplications.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus >= 2, "pow_mod requires modulus >= 2");
    let mut base = base % modulus;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    acc
}

/// Extended gcd over i128: returns (g, x, y) with a*x + b*y = g.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Modular inverse by extended gcd.
pub fn inv_mod(a: u64, m: u64) -> Result<u64> {
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    if g != 1 {
        return Err(Error::NotCoprime { a: a % m, n: m });
    }
    Ok(x.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Brent cycle detection. `n` must be odd, composite, > 1.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut power = 1u64;
        let mut lam = 1u64;
        let mut q = 1u64;
        let mut xs = x;
        while d == 1 {
            if power == lam {
                x = y;
                power <<= 1;
                lam = 0;
            }
            let batch = core::cmp::min(128, power - lam);
            xs = y;
            for _ in 0..batch {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            lam += batch;
            d = gcd(q, n);
        }
        if d == n {
            // Batched gcd overshot; replay one step at a time.
            d = 1;
            y = xs;
            while d == 1 {
                y = f(y);
                d = gcd(x.abs_diff(y), n);
            }
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime-power decomposition of a positive integer.
///
/// Invariants: primes strictly increasing, multiplicities >= 1, and the
/// product of `p^m` recovers `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// Some((p, m)) when n = p^m.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        if self.factors.len() == 1 {
            Some(self.factors[0])
        } else {
            None
        }
    }

    /// All divisors of n in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = alloc::vec![1u64];
        for &(p, m) in &self.factors {
            let base = divs.clone();
            let mut pk = 1u64;
            for _ in 0..m {
                pk *= p;
                divs.extend(base.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factorize by trial division up to 10^6, then Pollard rho with Brent
/// cycle detection on what remains (primality certified by Miller-Rabin).
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "factorize requires n >= 2",
        });
    }
    if n > MAX_INT {
        return Err(Error::Overflow {
            what: "factorize input",
        });
    }
    let original = n;
    let mut n = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, m: u32, factors: &mut Vec<(u64, u32)>| {
        if m > 0 {
            factors.push((p, m));
        }
    };
    for p in [2u64, 3, 5] {
        let mut m = 0;
        while n % p == 0 {
            n /= p;
            m += 1;
        }
        push(p, m, &mut factors);
    }
    // 2,3,5-wheel trial division.
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut w = 0usize;
    while d <= TRIAL_LIMIT && d * d <= n {
        let mut m = 0;
        while n % d == 0 {
            n /= d;
            m += 1;
        }
        push(d, m, &mut factors);
        d += WHEEL[w];
        w = (w + 1) & 7;
    }
    if n > 1 {
        if d * d > n {
            push(n, 1, &mut factors);
        } else {
            // Remaining cofactor has no prime factor <= 10^6.
            let mut stack = alloc::vec![n];
            let mut found: Vec<u64> = Vec::new();
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    found.push(m);
                } else {
                    let f = pollard_brent(m);
                    stack.push(f);
                    stack.push(m / f);
                }
            }
            found.sort_unstable();
            let mut i = 0;
            while i < found.len() {
                let p = found[i];
                let mut m = 0;
                while i < found.len() && found[i] == p {
                    m += 1;
                    i += 1;
                }
                push(p, m, &mut factors);
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    debug_assert_eq!(
        factors.iter().fold(1u64, |acc, &(p, m)| acc * p.pow(m)),
        original
    );
    Ok(Factorization {
        n: original,
        factors,
    })
}

/// Euler totient from a factorization: prod p^(m-1) (p-1).
pub fn euler_phi(fact: &Factorization) -> u64 {
    fact.factors
        .iter()
        .fold(1u64, |acc, &(p, m)| acc * p.pow(m - 1) * (p - 1))
}

/// Least t >= 1 with a^t = 1 mod n, via divisor descent from phi(n).
///
/// Starts at phi(n) and strips prime factors while the power stays 1; this
/// avoids the naive O(order) iteration, which is hopeless for orders near
/// phi(n).
pub fn multiplicative_order(a: u64, n: u64) -> Result<u64> {
    if n <= 1 {
        return Ok(1);
    }
    let a = a % n;
    if gcd(a, n) != 1 {
        return Err(Error::NotCoprime { a, n });
    }
    let phi = euler_phi(&factorize(n)?);
    if phi == 1 {
        return Ok(1);
    }
    let phi_fact = factorize(phi).expect("phi >= 2 here");
    let mut t = phi;
    for &(p, m) in phi_fact.factors() {
        for _ in 0..m {
            if t % p == 0 && pow_mod(a, t / p, n) == 1 {
                t /= p;
            } else {
                break;
            }
        }
    }
    Ok(t)
}

/// Combine congruences x = r_i mod m_i with pairwise coprime moduli into the
/// unique residue modulo the product. Returns (residue, product).
pub fn crt_combine(pairs: &[(u64, u64)]) -> Result<(u64, u64)> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput {
            what: "crt_combine",
        });
    }
    let (mut x, mut m) = (pairs[0].0 % pairs[0].1.max(1), pairs[0].1);
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "crt modulus must be >= 1",
        });
    }
    for &(r2, m2) in &pairs[1..] {
        if m2 == 0 {
            return Err(Error::OutOfRange {
                what: "crt modulus must be >= 1",
            });
        }
        let g = gcd(m, m2);
        if g != 1 {
            return Err(Error::ModuliNotCoprime { m1: m, m2 });
        }
        let prod = m
            .checked_mul(m2)
            .filter(|&p| p <= MAX_INT)
            .ok_or(Error::Overflow {
                what: "crt modulus product",
            })?;
        // x + m * k = r2 (mod m2)  =>  k = (r2 - x) * m^{-1} (mod m2)
        let minv = inv_mod(m % m2, m2)?;
        let diff = (r2 % m2 + m2 - x % m2) % m2;
        let k = mul_mod(diff, minv, m2);
        x += m * k;
        m = prod;
    }
    Ok((x % m, m))
}
