//! Exact-rational tables of the recursive saving constants kappa_r(eps),
//! t_r(eps), rho_r and sigma_r.
//!
//! The recursion is
//!
//! ```text
//! kappa_1 = kappa_2 = eps
//! t_r     = ceil((r - 2 - eps) / (2 kappa_{r-1})) + 2      (r >= 3)
//! kappa_r = eps / t_r
//! rho_r   = kappa_r(3/92)
//! sigma_r = min{ kappa_r(3/184), 1/(50 r^3) }
//! ```
//!
//! All arithmetic is exact: the ceiling sits on a rational boundary often
//! enough that doubles silently round it the wrong way, and kappa_r
//! denominators grow super-exponentially in r. A hard cap r <= 64 keeps the
//! big integers desk-sized.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Hard cap on the sparsity r in table construction.
pub const MAX_SPARSITY: u32 = 64;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Largest admissible epsilon, 3/92.
pub fn epsilon_max() -> BigRational {
    rat(3, 92)
}

/// Nearest double to an exact rational.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).expect("desk-scale rationals fit f64")
}

fn check_epsilon(eps: &BigRational) -> Result<()> {
    if eps <= &BigRational::zero() || eps > &epsilon_max() {
        return Err(Error::OutOfRange {
            what: "epsilon must satisfy 0 < eps <= 3/92",
        });
    }
    Ok(())
}

fn check_sparsity(r: u32) -> Result<()> {
    if r < 1 {
        return Err(Error::OutOfRange {
            what: "sparsity r must be >= 1",
        });
    }
    if r > MAX_SPARSITY {
        return Err(Error::OutOfRange {
            what: "sparsity r exceeds the r <= 64 table cap",
        });
    }
    Ok(())
}

/// Parse an exact rational from "a/b", an integer, or a decimal literal
/// ("0.125" becomes 1/8 exactly).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let invalid = || Error::Invalid(alloc::format!("cannot parse {s:?} as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| invalid())?;
        let d: BigInt = den.trim().parse().map_err(|_| invalid())?;
        if d.is_zero() {
            return Err(invalid());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int = if int.is_empty() || int == "-" {
            alloc::format!("{int}0")
        } else {
            String::from(int)
        };
        let neg = int.starts_with('-');
        let i: BigInt = int.parse().map_err(|_| invalid())?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid());
        }
        let f: BigInt = frac.parse().map_err(|_| invalid())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = i.abs() * &scale + f;
        let signed = if neg { -mag } else { mag };
        return Ok(BigRational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| invalid())?;
    Ok(BigRational::from_integer(n))
}

/// One row of the saving-constant table. `t` is None for r in {1, 2},
/// where the recursion has not started.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub r: u32,
    pub t: Option<BigInt>,
    pub kappa: BigRational,
}

/// The full table kappa_1..kappa_r for one epsilon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTable {
    pub epsilon: BigRational,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn build(epsilon: BigRational, r_max: u32) -> Result<BoundTable> {
        check_epsilon(&epsilon)?;
        check_sparsity(r_max)?;
        let mut rows = Vec::with_capacity(r_max as usize);
        let mut prev = epsilon.clone();
        for r in 1..=r_max {
            if r <= 2 {
                rows.push(BoundRow {
                    r,
                    t: None,
                    kappa: epsilon.clone(),
                });
                continue;
            }
            let num = BigRational::from_integer(BigInt::from(r as i64 - 2)) - &epsilon;
            let t_rat = (num / (rat(2, 1) * &prev)).ceil() + rat(2, 1);
            let t = t_rat.to_integer();
            let kappa = &epsilon / BigRational::from_integer(t.clone());
            prev = kappa.clone();
            rows.push(BoundRow {
                r,
                t: Some(t),
                kappa,
            });
        }
        Ok(BoundTable { epsilon, rows })
    }

    pub fn row(&self, r: u32) -> Option<&BoundRow> {
        self.rows.get(r as usize - 1)
    }
}

/// kappa_r(eps), exact.
pub fn kappa(r: u32, eps: &BigRational) -> Result<BigRational> {
    check_sparsity(r)?;
    check_epsilon(eps)?;
    Ok(BoundTable::build(eps.clone(), r)?.rows[r as usize - 1]
        .kappa
        .clone())
}

/// rho_r = kappa_r(3/92).
pub fn rho(r: u32) -> Result<BigRational> {
    kappa(r, &rat(3, 92))
}

/// Which branch attains the min in the definition of sigma_r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaBranch {
    /// kappa_r(3/184)
    Kappa,
    /// 1/(50 r^3)
    Cubic,
}

/// sigma_r = min{kappa_r(3/184), 1/(50 r^3)}, with the attaining branch.
/// On a tie the Kappa branch is reported.
pub fn sigma(r: u32) -> Result<(BigRational, SigmaBranch)> {
    let k = kappa(r, &rat(3, 184))?;
    let r3 = BigInt::from(r) * BigInt::from(r) * BigInt::from(r);
    let cubic = BigRational::new(BigInt::one(), BigInt::from(50) * r3);
    if k <= cubic {
        Ok((k, SigmaBranch::Kappa))
    } else {
        Ok((cubic, SigmaBranch::Cubic))
    }
}
