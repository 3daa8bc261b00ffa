//! Multidimensional discrepancy of point sets in [0,1)^s: exact values by
//! critical-box enumeration at desk scale, certified grid brackets beyond,
//! the Koksma-Szusz right-hand side, and the power-generator bound shape.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::bounds::rho;
use crate::powgen::GeneratorSpec;
use crate::{Error, Result};

/// Default budget on counted candidate boxes (times N) in exact mode.
pub const DEFAULT_BOX_BUDGET: u64 = 1_000_000_000;

/// Default budget on frequency vectors for the Koksma-Szusz sum.
pub const DEFAULT_FREQUENCY_BUDGET: u64 = 10_000_000;

/// Where a point set came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    PowerGenerator {
        p: u64,
        e: u64,
        theta: u64,
        shifts: Vec<u64>,
        n: u64,
    },
    Multivariate {
        p: u64,
        system_dim: usize,
    },
    External,
}

/// N points in [0,1)^s.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>, provenance: Provenance) -> Result<PointSet> {
        if points.is_empty() {
            return Err(Error::EmptyInput { what: "point set" });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::OutOfRange {
                what: "points need at least one coordinate",
            });
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::OutOfRange {
                    what: "inconsistent point dimensions",
                });
            }
            if p.iter().any(|&x| !(0.0..1.0).contains(&x)) {
                return Err(Error::OutOfRange {
                    what: "coordinates must lie in [0, 1)",
                });
            }
        }
        Ok(PointSet {
            dim,
            points,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// Points (u_{n+h_1}/p, ..., u_{n+h_s}/p) for n = 1..N.
pub fn build_points_powgen_shifted(
    g: &GeneratorSpec,
    shifts: &[u64],
    n_points: u64,
) -> Result<PointSet> {
    if shifts.is_empty() || n_points == 0 {
        return Err(Error::EmptyInput {
            what: "shifts / point count",
        });
    }
    if shifts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange {
            what: "shifts must be strictly increasing",
        });
    }
    let max_shift = *shifts.last().expect("nonempty");
    let needed = n_points
        .checked_add(max_shift)
        .and_then(|v| v.checked_add(1))
        .ok_or(Error::Overflow {
            what: "sequence length",
        })?;
    let seq = g.sequence(needed as usize);
    let p = g.p as f64;
    let points = (1..=n_points)
        .map(|n| {
            shifts
                .iter()
                .map(|&h| seq[(n + h) as usize] as f64 / p)
                .collect()
        })
        .collect();
    PointSet::new(
        points,
        Provenance::PowerGenerator {
            p: g.p,
            e: g.e,
            theta: g.theta,
            shifts: shifts.to_vec(),
            n: n_points,
        },
    )
}

/// Consecutive windows (u_n/p, ..., u_{n+s-1}/p), n = 1..N.
pub fn build_points_powgen(g: &GeneratorSpec, s: u32, n_points: u64) -> Result<PointSet> {
    let shifts: Vec<u64> = (0..s as u64).collect();
    build_points_powgen_shifted(g, &shifts, n_points)
}

/// How boxes count their boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxCounting {
    /// The supremum over half-open boxes, with both inclusion-side limits
    /// realized at critical corners. This is the classical convention.
    HalfOpenSup,
    /// Boundary points count as inside and corners are evaluated exactly
    /// (no limits); sensitivity mode for the closed-box reading.
    ClosedAttained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Critical-corner enumeration; lower == upper.
    ExactCritical,
    /// G-cell-per-axis maximization with additive certificate s/G.
    Grid { resolution: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub counting: BoxCounting,
    pub boxes_evaluated: u64,
}

impl DiscrepancyReport {
    pub fn is_exact(&self) -> bool {
        matches!(self.method, Method::ExactCritical)
    }

    /// The exact value when lower == upper.
    pub fn value(&self) -> Option<f64> {
        self.is_exact().then_some(self.lower)
    }
}

fn sorted_unique_columns(points: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|j| {
            let mut col: Vec<f64> = points.iter().map(|p| p[j]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).expect("coords are finite"));
            col.dedup();
            col
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Side {
    Closed,
    Strict,
}

fn count_box(points: &[Vec<f64>], lo: &[f64], hi: &[f64], side: Side) -> u64 {
    points
        .iter()
        .filter(|p| match side {
            Side::Closed => p
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&a, &b))| a <= x && x <= b),
            Side::Strict => p
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&a, &b))| a < x && x < b),
        })
        .count() as u64
}

/// Recursively pick (lo, hi) per axis from the candidate lists and fold the
/// best signed value at the leaves.
#[allow(clippy::too_many_arguments)]
fn enumerate_boxes(
    points: &[Vec<f64>],
    lows: &[Vec<f64>],
    highs: &[Vec<f64>],
    axis: usize,
    lo: &mut Vec<f64>,
    hi: &mut Vec<f64>,
    side: Side,
    count_minus_vol: bool,
    anchored: bool,
    best: &mut f64,
    boxes: &mut u64,
) {
    if axis == lows.len() {
        let n = points.len() as f64;
        let vol: f64 = lo.iter().zip(hi.iter()).map(|(&a, &b)| b - a).product();
        let count = count_box(points, lo, hi, side) as f64;
        let value = if count_minus_vol {
            count / n - vol
        } else {
            vol - count / n
        };
        if value > *best {
            *best = value;
        }
        *boxes += 1;
        return;
    }
    for &b in &highs[axis] {
        hi.push(b);
        if anchored {
            lo.push(0.0);
            enumerate_boxes(
                points,
                lows,
                highs,
                axis + 1,
                lo,
                hi,
                side,
                count_minus_vol,
                anchored,
                best,
                boxes,
            );
            lo.pop();
        } else {
            for &a in lows[axis].iter().take_while(|&&a| a <= b) {
                lo.push(a);
                enumerate_boxes(
                    points,
                    lows,
                    highs,
                    axis + 1,
                    lo,
                    hi,
                    side,
                    count_minus_vol,
                    anchored,
                    best,
                    boxes,
                );
                lo.pop();
            }
        }
        hi.pop();
    }
}

struct ExactOutcome {
    value: f64,
    boxes: u64,
}

fn exact_by_enumeration(
    points: &[Vec<f64>],
    dim: usize,
    counting: BoxCounting,
    anchored: bool,
    budget: u64,
) -> Result<ExactOutcome> {
    let columns = sorted_unique_columns(points, dim);
    let with_zero: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| {
            let mut v = vec![0.0];
            v.extend_from_slice(c);
            v.dedup();
            v
        })
        .collect();
    let with_one: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.push(1.0);
            v
        })
        .collect();

    // budget: candidate boxes times N points per count
    let mut work: u128 = 0;
    let plus_boxes: u128 = if anchored {
        with_one.iter().map(|c| c.len() as u128).product()
    } else {
        columns
            .iter()
            .map(|c| (c.len() as u128 * (c.len() as u128 + 1)) / 2)
            .product()
    };
    let minus_boxes: u128 = if anchored {
        with_one.iter().map(|c| c.len() as u128).product()
    } else {
        with_zero
            .iter()
            .zip(&with_one)
            .map(|(lo, hi)| lo.len() as u128 * hi.len() as u128)
            .product()
    };
    work = work.saturating_add(plus_boxes).saturating_add(minus_boxes);
    work = work.saturating_mul(points.len() as u128);
    if work > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: work,
            budget,
            what: "exact critical boxes",
        });
    }

    let mut boxes = 0u64;
    let mut best = 0.0f64;
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    match counting {
        BoxCounting::HalfOpenSup => {
            // D+ : closed counts, corners on point coordinates
            enumerate_boxes(
                points,
                &columns,
                &columns,
                0,
                &mut lo,
                &mut hi,
                Side::Closed,
                true,
                anchored,
                &mut best,
                &mut boxes,
            );
            // D- : strict counts, lower corners may sit at 0, upper at 1
            enumerate_boxes(
                points,
                &with_zero,
                &with_one,
                0,
                &mut lo,
                &mut hi,
                Side::Strict,
                false,
                anchored,
                &mut best,
                &mut boxes,
            );
        }
        BoxCounting::ClosedAttained => {
            enumerate_boxes(
                points,
                &with_zero,
                &with_one,
                0,
                &mut lo,
                &mut hi,
                Side::Closed,
                true,
                anchored,
                &mut best,
                &mut boxes,
            );
            enumerate_boxes(
                points,
                &with_zero,
                &with_one,
                0,
                &mut lo,
                &mut hi,
                Side::Closed,
                false,
                anchored,
                &mut best,
                &mut boxes,
            );
        }
    }
    Ok(ExactOutcome { value: best, boxes })
}

/// Classical one-dimensional closed forms on sorted coordinates:
/// star = max(D+, D-), extreme = D+ + D- with
/// D+ = max_i (i/N - x_i), D- = max_i (x_i - (i-1)/N).
fn exact_1d_sorted(points: &[Vec<f64>], star: bool) -> ExactOutcome {
    let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len() as f64;
    let mut d_plus = 0.0f64;
    let mut d_minus = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        d_plus = d_plus.max((i + 1) as f64 / n - x);
        d_minus = d_minus.max(x - i as f64 / n);
    }
    let value = if star {
        d_plus.max(d_minus)
    } else {
        d_plus + d_minus
    };
    ExactOutcome {
        value,
        boxes: 2 * xs.len() as u64,
    }
}

fn exact_report(
    points: &PointSet,
    counting: BoxCounting,
    anchored: bool,
    budget: u64,
) -> Result<DiscrepancyReport> {
    let outcome = if points.dim() == 1 && counting == BoxCounting::HalfOpenSup {
        exact_1d_sorted(points.points(), anchored)
    } else {
        exact_by_enumeration(points.points(), points.dim(), counting, anchored, budget)?
    };
    Ok(DiscrepancyReport {
        lower: outcome.value,
        upper: outcome.value,
        method: Method::ExactCritical,
        counting,
        boxes_evaluated: outcome.boxes,
    })
}

/// Extreme discrepancy: supremum over all axis-parallel boxes.
pub fn extreme_discrepancy(points: &PointSet) -> Result<DiscrepancyReport> {
    exact_report(points, BoxCounting::HalfOpenSup, false, DEFAULT_BOX_BUDGET)
}

pub fn extreme_discrepancy_opts(
    points: &PointSet,
    counting: BoxCounting,
    budget: u64,
) -> Result<DiscrepancyReport> {
    exact_report(points, counting, false, budget)
}

/// Star discrepancy: boxes anchored at the origin.
pub fn star_discrepancy(points: &PointSet) -> Result<DiscrepancyReport> {
    exact_report(points, BoxCounting::HalfOpenSup, true, DEFAULT_BOX_BUDGET)
}

pub fn star_discrepancy_opts(
    points: &PointSet,
    counting: BoxCounting,
    budget: u64,
) -> Result<DiscrepancyReport> {
    exact_report(points, counting, true, budget)
}

/// Largest interval sum, empty interval allowed (Kadane).
fn max_interval_sum(weights: &[f64]) -> f64 {
    let mut best = 0.0f64;
    let mut ending_here = 0.0f64;
    for &w in weights {
        ending_here = w.max(ending_here + w);
        best = best.max(ending_here);
    }
    best
}

/// Anchored (star) grid maximization on the same half-cell lattice; the
/// single moving face costs at most 1/(2G) per axis, so the s/G bracket is
/// conservative here.
pub fn grid_star_discrepancy(
    points: &PointSet,
    resolution: u32,
    budget: u64,
) -> Result<DiscrepancyReport> {
    if resolution < 2 {
        return Err(Error::OutOfRange { what: "grid resolution must be >= 2" });
    }
    let g = 2 * resolution as usize;
    let n = points.len() as f64;
    let dim = points.dim();
    let cell = |x: f64| ((x * g as f64) as usize).min(g - 1);
    let inv_g = 1.0 / g as f64;
    let (value, boxes) = match dim {
        1 => {
            let mut counts = vec![0.0f64; g];
            for p in points.points() {
                counts[cell(p[0])] += 1.0 / n;
            }
            let mut best = 0.0f64;
            let mut prefix = 0.0f64;
            for (i, &c) in counts.iter().enumerate() {
                prefix += c;
                best = best.max(libm::fabs(prefix - (i + 1) as f64 * inv_g));
            }
            (best, g as u64)
        }
        2 => {
            let work = (g as u128) * (g as u128);
            if work > budget as u128 {
                return Err(Error::BudgetExceeded { required: work, budget, what: "grid boxes" });
            }
            let mut cells = vec![vec![0.0f64; g]; g];
            for p in points.points() {
                cells[cell(p[1])][cell(p[0])] += 1.0 / n;
            }
            let mut best = 0.0f64;
            let mut prefix_above = vec![0.0f64; g];
            for (iy, row) in cells.iter().enumerate() {
                let mut row_prefix = 0.0f64;
                for (ix, &c) in row.iter().enumerate() {
                    row_prefix += c;
                    prefix_above[ix] += row_prefix;
                    let vol = (ix + 1) as f64 * inv_g * (iy + 1) as f64 * inv_g;
                    best = best.max(libm::fabs(prefix_above[ix] - vol));
                }
            }
            (best, (g * g) as u64)
        }
        s => {
            let required = (g as u128).saturating_pow(s as u32);
            return Err(Error::BudgetExceeded { required, budget, what: "grid boxes" });
        }
    };
    Ok(DiscrepancyReport {
        lower: value,
        upper: value + dim as f64 / resolution as f64,
        method: Method::Grid { resolution },
        counting: BoxCounting::HalfOpenSup,
        boxes_evaluated: boxes,
    })
}

/// Dense-grid maximization at G cells per axis, reported as the certified
/// bracket [max, max + s/G]. Candidate corners run over the half-cell
/// lattice (multiples of 1/(2G)): snapping a two-sided critical box moves
/// each face by less than 1/(2G), so the two faces of an axis cost at most
/// 1/G of volume together and the s/G certificate is rigorous for extreme
/// boxes, not only anchored ones. Supports s <= 2; higher dimensions
/// exceed any sensible budget.
pub fn grid_discrepancy(
    points: &PointSet,
    resolution: u32,
    budget: u64,
) -> Result<DiscrepancyReport> {
    if resolution < 2 {
        return Err(Error::OutOfRange {
            what: "grid resolution must be >= 2",
        });
    }
    let g = 2 * resolution as usize;
    let n = points.len() as f64;
    let dim = points.dim();
    let cell = |x: f64| ((x * g as f64) as usize).min(g - 1);
    let (value, boxes) = match dim {
        1 => {
            let mut counts = vec![0.0f64; g];
            for p in points.points() {
                counts[cell(p[0])] += 1.0;
            }
            let inv_g = 1.0 / g as f64;
            let plus: Vec<f64> = counts.iter().map(|&c| c / n - inv_g).collect();
            let minus: Vec<f64> = counts.iter().map(|&c| inv_g - c / n).collect();
            (
                max_interval_sum(&plus).max(max_interval_sum(&minus)),
                2 * g as u64,
            )
        }
        2 => {
            let work = (g as u128) * (g as u128 + 1) / 2 * (g as u128);
            if work > budget as u128 {
                return Err(Error::BudgetExceeded {
                    required: work,
                    budget,
                    what: "grid boxes",
                });
            }
            // cell counts indexed [y][x], pre-divided by N
            let mut cells = vec![vec![0.0f64; g]; g];
            for p in points.points() {
                cells[cell(p[1])][cell(p[0])] += 1.0 / n;
            }
            let inv_g = 1.0 / g as f64;
            let mut best = 0.0f64;
            let mut boxes = 0u64;
            let mut col = vec![0.0f64; g];
            for ya in 0..g {
                col.iter_mut().for_each(|c| *c = 0.0);
                for yb in (ya + 1)..=g {
                    // fused column update + two-signed Kadane pass
                    let cell_vol = (yb - ya) as f64 * inv_g * inv_g;
                    let (mut run_p, mut best_p) = (0.0f64, 0.0f64);
                    let (mut run_m, mut best_m) = (0.0f64, 0.0f64);
                    for (c, &row) in col.iter_mut().zip(&cells[yb - 1]) {
                        *c += row;
                        let w = *c - cell_vol;
                        run_p = w.max(run_p + w);
                        best_p = best_p.max(run_p);
                        run_m = (-w).max(run_m - w);
                        best_m = best_m.max(run_m);
                    }
                    best = best.max(best_p).max(best_m);
                    boxes += g as u64;
                }
            }
            (best, boxes)
        }
        s => {
            let per_axis = (g as u128) * (g as u128 + 1) / 2;
            let required = per_axis
                .saturating_pow(s as u32 - 1)
                .saturating_mul(g as u128);
            return Err(Error::BudgetExceeded {
                required,
                budget,
                what: "grid boxes",
            });
        }
    };
    Ok(DiscrepancyReport {
        lower: value,
        upper: value + dim as f64 / resolution as f64,
        method: Method::Grid { resolution },
        counting: BoxCounting::HalfOpenSup,
        boxes_evaluated: boxes,
    })
}

/// The Koksma-Szusz right-hand side with implied constant 1:
/// 1/A + (1/N) sum over 0 < ||a||_inf <= A of |sum_n e(<a, x_n>)| / r(a),
/// where r(a) = prod (|a_j| + 1).
pub fn koksma_szusz_rhs(points: &PointSet, a_max: u32, budget: u64) -> Result<f64> {
    if a_max == 0 {
        return Err(Error::OutOfRange {
            what: "A must be >= 1",
        });
    }
    let s = points.dim();
    let width = 2u128 * a_max as u128 + 1;
    let mut vectors: u128 = 1;
    for _ in 0..s {
        vectors = vectors.saturating_mul(width);
        if vectors > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: vectors,
                budget,
                what: "frequency vectors",
            });
        }
    }
    let n = points.len() as f64;
    let tau = core::f64::consts::TAU;
    let mut a = vec![-(a_max as i64); s];
    let mut total = 0.0f64;
    let mut terms: Vec<crate::Complex64> = Vec::with_capacity(points.len());
    loop {
        if a.iter().any(|&c| c != 0) {
            terms.clear();
            for p in points.points() {
                let dot: f64 = p.iter().zip(&a).map(|(&x, &c)| x * c as f64).sum();
                let (si, co) = libm::sincos(tau * dot);
                terms.push(crate::Complex64::new(co, si));
            }
            let sum = crate::expsum::pairwise_sum(&terms);
            let r: f64 = a.iter().map(|&c| (c.unsigned_abs() + 1) as f64).product();
            total += crate::expsum::magnitude(sum) / r;
        }
        // odometer over the frequency cube
        let mut j = 0;
        loop {
            if j == s {
                break;
            }
            a[j] += 1;
            if a[j] <= a_max as i64 {
                break;
            }
            a[j] = -(a_max as i64);
            j += 1;
        }
        if j == s {
            break;
        }
    }
    Ok(1.0 / a_max as f64 + total / n)
}

/// The constant-free shape N^{-1/2} p^{1/2 - 0.5 rho_{2s}} of the
/// power-generator discrepancy bound, with its nontriviality threshold
/// N >= p^{1 - rho_{2s}}. No inequality is asserted anywhere: the o(1)
/// factor and implied constant are unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct PowgenShapeBound {
    pub value: f64,
    pub rho_2s: BigRational,
    pub nontrivial_threshold: f64,
    pub nontrivial: bool,
}

pub fn powgen_bound_shape(p: u64, n_points: u64, s: u32) -> Result<PowgenShapeBound> {
    if n_points == 0 || s == 0 {
        return Err(Error::OutOfRange {
            what: "need N >= 1 and s >= 1",
        });
    }
    let rho_2s = rho(2 * s)?;
    let rho_f = num_traits::ToPrimitive::to_f64(&rho_2s).expect("rho fits f64");
    let value = libm::pow(n_points as f64, -0.5) * libm::pow(p as f64, 0.5 - 0.5 * rho_f);
    let nontrivial_threshold = libm::pow(p as f64, 1.0 - rho_f);
    Ok(PowgenShapeBound {
        value,
        rho_2s,
        nontrivial_threshold,
        nontrivial: n_points as f64 >= nontrivial_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powgen::make_generator;

    fn set(points: &[&[f64]]) -> PointSet {
        PointSet::new(
            points.iter().map(|p| p.to_vec()).collect(),
            Provenance::External,
        )
        .unwrap()
    }

    #[test]
    fn powgen_points() {
        let g = make_generator(11, 3, 2).unwrap();
        let ps = build_points_powgen(&g, 2, 4).unwrap();
        let want = [
            [8.0 / 11.0, 6.0 / 11.0],
            [6.0 / 11.0, 7.0 / 11.0],
            [7.0 / 11.0, 2.0 / 11.0],
            [2.0 / 11.0, 8.0 / 11.0],
        ];
        for (got, want) in ps.points().iter().zip(&want) {
            assert_eq!(got.as_slice(), want);
        }
        let single = build_points_powgen(&g, 1, 1).unwrap();
        assert_eq!(single.points(), &[vec![8.0 / 11.0]]);
        // shifted variant (0, 2): (u_n/p, u_{n+2}/p)
        let shifted = build_points_powgen_shifted(&g, &[0, 2], 3).unwrap();
        let seq = g.sequence(6);
        for (i, pt) in shifted.points().iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(pt[0], seq[n as usize] as f64 / 11.0);
            assert_eq!(pt[1], seq[(n + 2) as usize] as f64 / 11.0);
        }
    }

    #[test]
    fn classical_1d_values() {
        // midpoint set {(2i-1)/8}: star 1/8, extreme 1/4
        let ps = set(&[&[1.0 / 8.0], &[3.0 / 8.0], &[5.0 / 8.0], &[7.0 / 8.0]]);
        assert_eq!(star_discrepancy(&ps).unwrap().value(), Some(0.125));
        assert_eq!(extreme_discrepancy(&ps).unwrap().value(), Some(0.25));
        // left-endpoint grid {i/N}: star 1/N
        let n = 8;
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / n as f64]).collect();
        let ps = PointSet::new(pts, Provenance::External).unwrap();
        assert_eq!(star_discrepancy(&ps).unwrap().value(), Some(1.0 / n as f64));
        assert_eq!(
            extreme_discrepancy(&ps).unwrap().value(),
            Some(1.0 / n as f64)
        );
    }

    #[test]
    fn single_point_values() {
        // sup semantics: boxes closing on the point push the extreme value
        // to count/N - 0 = 1
        let ps = set(&[&[0.5]]);
        assert_eq!(star_discrepancy(&ps).unwrap().value(), Some(0.5));
        assert_eq!(extreme_discrepancy(&ps).unwrap().value(), Some(1.0));
        // anchored example in two dimensions: the box [0,0.9)^2 already gives
        // |0 - 0.81| = 0.81, and widening one side to [0,1) attains the sup 0.9
        let ps = set(&[&[0.9, 0.9]]);
        let star = star_discrepancy(&ps).unwrap().value().unwrap();
        assert!(star >= 0.81 - 1e-12);
        assert!((star - 0.9).abs() < 1e-12);
    }

    #[test]
    fn duplicated_points() {
        let ps = set(&[&[0.3, 0.7], &[0.3, 0.7], &[0.3, 0.7]]);
        let star = star_discrepancy(&ps).unwrap().value().unwrap();
        assert!(star >= 1.0 - 0.3 * 0.7 - 1e-12);
        let ext = extreme_discrepancy(&ps).unwrap().value().unwrap();
        assert!((ext - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_matches_1d_closed_form() {
        let mut rng = crate::rng::SplitMix64::new(2024);
        for case in 0..30 {
            let n = 1 + rng.below(12) as usize;
            let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.next_f64()]).collect();
            let ps = PointSet::new(pts, Provenance::External).unwrap();
            let fast = exact_1d_sorted(ps.points(), false).value;
            let generic =
                exact_by_enumeration(ps.points(), 1, BoxCounting::HalfOpenSup, false, 1 << 30)
                    .unwrap()
                    .value;
            assert!(
                (fast - generic).abs() < 1e-12,
                "case {case}: {fast} vs {generic}"
            );
            let fast = exact_1d_sorted(ps.points(), true).value;
            let generic =
                exact_by_enumeration(ps.points(), 1, BoxCounting::HalfOpenSup, true, 1 << 30)
                    .unwrap()
                    .value;
            assert!((fast - generic).abs() < 1e-12, "star case {case}");
        }
    }

    #[test]
    fn star_extreme_sandwich_and_permutation_invariance() {
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..20 {
            let n = 2 + rng.below(10) as usize;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.next_f64(), rng.next_f64()])
                .collect();
            let ps = PointSet::new(pts.clone(), Provenance::External).unwrap();
            let star = star_discrepancy(&ps).unwrap().value().unwrap();
            let ext = extreme_discrepancy(&ps).unwrap().value().unwrap();
            assert!(star <= ext + 1e-12);
            assert!(ext <= 4.0 * star + 1e-12, "ext={ext} star={star}");
            let swapped: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[1], p[0]]).collect();
            let ps2 = PointSet::new(swapped, Provenance::External).unwrap();
            assert!((extreme_discrepancy(&ps2).unwrap().value().unwrap() - ext).abs() < 1e-12);
            assert!((star_discrepancy(&ps2).unwrap().value().unwrap() - star).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_brackets_exact() {
        let mut rng = crate::rng::SplitMix64::new(99);
        for _ in 0..8 {
            let n = 2 + rng.below(10) as usize;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.next_f64(), rng.next_f64()])
                .collect();
            let ps = PointSet::new(pts, Provenance::External).unwrap();
            let exact = extreme_discrepancy(&ps).unwrap().value().unwrap();
            let grid = grid_discrepancy(&ps, 128, 1 << 30).unwrap();
            assert!(
                grid.lower <= exact + 1e-12,
                "grid {} exact {exact}",
                grid.lower
            );
            assert!(
                exact <= grid.upper + 1e-12,
                "upper {} exact {exact}",
                grid.upper
            );
        }
    }

    #[test]
    fn star_grid_brackets_exact() {
        let mut rng = crate::rng::SplitMix64::new(123);
        for _ in 0..8 {
            let s = 1 + rng.below(2) as usize;
            let n = 2 + rng.below(10) as usize;
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| (0..s).map(|_| rng.next_f64()).collect()).collect();
            let ps = PointSet::new(pts, Provenance::External).unwrap();
            let exact = star_discrepancy(&ps).unwrap().value().unwrap();
            let grid = grid_star_discrepancy(&ps, 128, 1 << 30).unwrap();
            assert!(grid.lower <= exact + 1e-12);
            assert!(exact <= grid.upper + 1e-12);
        }
    }

    #[test]
    fn closed_counting_mode() {
        // For the closed counting the degenerate corner box is attained
        let ps = set(&[&[0.5]]);
        let rep = extreme_discrepancy_opts(&ps, BoxCounting::ClosedAttained, 1 << 20).unwrap();
        assert_eq!(rep.value(), Some(1.0));
        let rep = star_discrepancy_opts(&ps, BoxCounting::ClosedAttained, 1 << 20).unwrap();
        assert_eq!(rep.value(), Some(0.5));
    }

    #[test]
    fn ks_rhs_degenerate_and_uniform() {
        // all points at the origin: 1/A + (1/N)(N/2 + N/2) = 2
        let pts = vec![vec![0.0]; 8];
        let ps = PointSet::new(pts, Provenance::External).unwrap();
        let v = koksma_szusz_rhs(&ps, 1, DEFAULT_FREQUENCY_BUDGET).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        // uniform grid: all nonzero frequency sums vanish
        let n = 64;
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / n as f64]).collect();
        let ps = PointSet::new(pts, Provenance::External).unwrap();
        let v = koksma_szusz_rhs(&ps, 16, DEFAULT_FREQUENCY_BUDGET).unwrap();
        assert!((v - 1.0 / 16.0).abs() < 1e-9, "{v}");
        // separable product set: all N = m^2 grid pairs (i/m, j/m). For
        // A < m every frequency sum factors into two vanishing geometric
        // sums, so the rhs collapses to 1/A exactly, matching the 1D case.
        let m = 8usize;
        let pts: Vec<Vec<f64>> = (0..m * m)
            .map(|k| vec![(k / m) as f64 / m as f64, (k % m) as f64 / m as f64])
            .collect();
        let ps = PointSet::new(pts, Provenance::External).unwrap();
        let v = koksma_szusz_rhs(&ps, 4, DEFAULT_FREQUENCY_BUDGET).unwrap();
        assert!((v - 0.25).abs() < 1e-9, "{v}");
        // direct-evaluation cross-check of one frequency vector: a = (1, 2)
        let tau = core::f64::consts::TAU;
        let mut direct = crate::Complex64::new(0.0, 0.0);
        for p in ps.points() {
            let dot = p[0] + 2.0 * p[1];
            direct += crate::Complex64::new(libm::cos(tau * dot), libm::sin(tau * dot));
        }
        assert!(crate::expsum::magnitude(direct) < 1e-9);
    }

    #[test]
    fn ks_budget_refusal() {
        let ps = set(&[&[0.1, 0.2], &[0.3, 0.4]]);
        assert!(koksma_szusz_rhs(&ps, 4000, 100).unwrap_err().is_budget());
    }

    #[test]
    fn shape_bound_values() {
        let b = powgen_bound_shape(101, 100, 1).unwrap();
        assert_eq!(b.rho_2s, BigRational::new(3.into(), 92.into()));
        let want = libm::pow(100.0, -0.5) * libm::pow(101.0, 0.5 - 0.5 * 3.0 / 92.0);
        assert!((b.value - want).abs() < 1e-12);
        let b = powgen_bound_shape(101, 100, 2).unwrap();
        assert_eq!(b.rho_2s, BigRational::new(3.into(), 47380.into()));
        // N = p: bound p^{-0.5 rho} < 1
        let b = powgen_bound_shape(10007, 10007, 1).unwrap();
        let simplified = libm::pow(10007.0, -0.5 * 3.0 / 92.0);
        assert!((b.value - simplified).abs() < 1e-9);
        assert!(b.value < 1.0);
    }
}
