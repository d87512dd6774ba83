//! Dynamical partitions `ζ_n` generated by the orbit of the break point.

use serde::Serialize;

use crate::circle::{BreakMap, CirclePoint, Side};
use crate::error::{LabError, Result};
use crate::real::{fit_line, Real};
use crate::rotation::ContinuedFraction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generation {
    /// `Δ_{n-1}^k = f^k[p .. f^{q_{n-1}} p]`, `0 <= k < q_n`.
    Old,
    /// `Δ_n^m = f^m[p .. f^{q_n} p]`, `0 <= m < q_{n-1}`.
    New,
}

/// One interval of `ζ_n`. Endpoints are orbit points `f^j(p)`; the left one
/// is stored as a circle point and the length is propagated separately so
/// that short intervals keep full relative accuracy.
#[derive(Debug, Clone, Copy)]
pub struct PartitionInterval<T> {
    pub left: CirclePoint<T>,
    pub length: T,
    pub orbit_index: usize,
    pub generation: Generation,
    /// Orbit index `j` of the left endpoint `f^j(p)`.
    pub left_point: u64,
    /// Orbit index of the right endpoint.
    pub right_point: u64,
}

impl<T: Real> PartitionInterval<T> {
    /// Left endpoint on `[0, 1)`.
    pub fn a(&self) -> T {
        self.left.frac
    }

    /// Right endpoint, `a + length`; may equal `1` for an interval ending at `p`.
    pub fn b(&self) -> T {
        self.left.frac + self.length
    }
}

#[derive(Debug, Clone)]
pub struct DynamicalPartition<T> {
    pub level: usize,
    pub q_prev: u64,
    pub q: u64,
    pub old: Vec<PartitionInterval<T>>,
    pub new: Vec<PartitionInterval<T>>,
}

/// Result of the structural checks on a partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionCheck {
    pub counts_ok: bool,
    pub cover_error: f64,
    pub max_endpoint_gap: f64,
    pub adjacency_ok: bool,
    pub tolerance: f64,
}

impl PartitionCheck {
    pub fn passed(&self) -> bool {
        self.counts_ok
            && self.adjacency_ok
            && self.cover_error <= self.tolerance
            && self.max_endpoint_gap <= self.tolerance
    }
}

fn propagate<T: Real>(
    map: &BreakMap<T>,
    start: CirclePoint<T>,
    len: T,
    count: u64,
) -> Vec<(CirclePoint<T>, T)> {
    let mut out = Vec::with_capacity(count as usize);
    let (mut x, mut l) = (start, len);
    for _ in 0..count {
        out.push((x, l));
        (x, l) = map.advance(x, l);
    }
    out
}

impl<T: Real> DynamicalPartition<T> {
    pub fn len(&self) -> usize {
        self.old.len() + self.new.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intervals(&self) -> impl Iterator<Item = &PartitionInterval<T>> {
        self.old.iter().chain(self.new.iter())
    }

    /// Intervals ordered along `[0, 1)`.
    pub fn sorted(&self) -> Vec<PartitionInterval<T>> {
        let mut all: Vec<_> = self.intervals().copied().collect();
        all.sort_by(|x, y| x.a().partial_cmp(&y.a()).expect("finite endpoints"));
        all
    }

    pub fn total_length(&self) -> T {
        self.intervals().fold(T::zero(), |acc, i| acc + i.length)
    }

    /// Cardinality, cover and adjacency checks. Positions are accurate to
    /// about one rounding per iterate, so the tolerance is `100·u·q_n`.
    pub fn check(&self) -> PartitionCheck {
        let u = T::unit_roundoff().as_f64();
        let tolerance = 100.0 * u * self.q.max(1) as f64;
        let counts_ok = self.old.len() as u64 == self.q && self.new.len() as u64 == self.q_prev;
        let cover_error = (self.total_length() - T::one()).abs().as_f64();
        let sorted = self.sorted();
        let mut adjacency_ok = true;
        let mut max_gap = 0.0f64;
        for (i, cur) in sorted.iter().enumerate() {
            let next = &sorted[(i + 1) % sorted.len()];
            if cur.right_point != next.left_point {
                adjacency_ok = false;
            }
            let mut gap = next.a() - cur.b();
            if i + 1 == sorted.len() {
                gap += T::one();
            }
            max_gap = max_gap.max(gap.abs().as_f64());
        }
        PartitionCheck {
            counts_ok,
            cover_error,
            max_endpoint_gap: max_gap,
            adjacency_ok,
            tolerance,
        }
    }

    /// Whether every interval of `finer` lies inside an interval of `self`.
    pub fn is_refined_by(&self, finer: &DynamicalPartition<T>) -> bool {
        let coarse = self.sorted();
        let tol = T::cst(100.0 * finer.q.max(1) as f64) * T::unit_roundoff();
        finer.intervals().all(|iv| {
            let idx = coarse.partition_point(|c| c.a() <= iv.a() + tol);
            if idx == 0 {
                return false;
            }
            let c = &coarse[idx - 1];
            iv.a() >= c.a() - tol && iv.b() <= c.b() + tol
        })
    }
}

/// Builds `ζ_n` from one orbit sweep of the break point.
pub fn dynamical_partition<T: Real>(
    map: &BreakMap<T>,
    cf: &ContinuedFraction<T>,
    n: usize,
) -> Result<DynamicalPartition<T>> {
    if n == 0 || cf.depth() < n {
        return Err(LabError::InvalidDepth {
            requested: n,
            available: cf.depth(),
        });
    }
    let n_i = n as i64;
    let (p_prev, q_prev) = (cf.p(n_i - 1), cf.q(n_i - 1));
    let (p_cur, q_cur) = (cf.p(n_i), cf.q(n_i));
    let ret_prev = return_point(map, q_prev, n - 1)?;
    let ret_cur = return_point(map, q_cur, n)?;
    let d_prev = ret_prev.offset_from(p_prev as i64);
    let d_cur = ret_cur.offset_from(p_cur as i64);
    // Closest returns alternate sides: sign(d_n) = (-1)^n.
    if (d_prev > T::zero()) != (n - 1).is_multiple_of(2) {
        return Err(LabError::CfMismatch { index: n - 1 });
    }
    if (d_cur > T::zero()) != n.is_multiple_of(2) {
        return Err(LabError::CfMismatch { index: n });
    }
    let floor = T::cst(100.0) * T::unit_roundoff();
    if d_cur.abs() < floor {
        return Err(LabError::PrecisionExhausted {
            level: n,
            gap: d_cur.abs().as_f64(),
        });
    }
    let build = |disp: T, ret: CirclePoint<T>, shift: u64, count: u64, generation| {
        let (start, offset) = if disp > T::zero() {
            (CirclePoint::origin(), false)
        } else {
            (CirclePoint::new(ret.turns, ret.frac), true)
        };
        propagate(map, start, disp.abs(), count)
            .into_iter()
            .enumerate()
            .map(|(k, (left, length))| {
                let k64 = k as u64;
                let (l, r) = if offset {
                    (k64 + shift, k64)
                } else {
                    (k64, k64 + shift)
                };
                PartitionInterval {
                    left,
                    length,
                    orbit_index: k,
                    generation,
                    left_point: l,
                    right_point: r,
                }
            })
            .collect::<Vec<_>>()
    };
    let old = build(d_prev, ret_prev, q_prev, q_cur, Generation::Old);
    let new = build(d_cur, ret_cur, q_cur, q_prev, Generation::New);
    if let Some(bad) = old.iter().chain(new.iter()).find(|iv| iv.length < floor) {
        return Err(LabError::PrecisionExhausted {
            level: n,
            gap: bad.length.as_f64(),
        });
    }
    Ok(DynamicalPartition {
        level: n,
        q_prev,
        q: q_cur,
        old,
        new,
    })
}

pub(crate) fn return_point<T: Real>(map: &BreakMap<T>, q: u64, level: usize) -> Result<CirclePoint<T>> {
    let mut x = CirclePoint::origin();
    for _ in 0..q {
        x = map.step(x);
    }
    if x.frac == T::zero() {
        return Err(LabError::PeriodicOrbit { p: x.turns as u64, q });
    }
    let _ = level;
    Ok(x)
}

/// Per-level interval statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionStats {
    pub level: usize,
    pub q: u64,
    /// Longest interval of `ζ_n`, old and new alike.
    pub max_length: f64,
    /// Shortest old interval `Δ_{n-1}^k`.
    pub min_old_length: f64,
    /// Invariant measure `μ_{n-1}` of each old interval.
    pub mu: f64,
    pub min_over_mu: f64,
    /// Index `l_n` of the shortest old interval.
    pub argmin_index: usize,
}

pub fn partition_stats<T: Real>(
    part: &DynamicalPartition<T>,
    cf: &ContinuedFraction<T>,
) -> PartitionStats {
    let max_length = part
        .intervals()
        .map(|i| i.length)
        .fold(T::zero(), |a, b| a.max(b));
    let (argmin_index, min_old) = part
        .old
        .iter()
        .enumerate()
        .fold((0, part.old[0].length), |(bi, bl), (i, iv)| {
            if iv.length < bl {
                (i, iv.length)
            } else {
                (bi, bl)
            }
        });
    let mu = cf.mu(part.level as i64 - 1);
    PartitionStats {
        level: part.level,
        q: part.q,
        max_length: max_length.as_f64(),
        min_old_length: min_old.as_f64(),
        mu: mu.as_f64(),
        min_over_mu: (min_old / mu).as_f64(),
        argmin_index,
    }
}

/// Exponential decay rates fitted over a level range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayFit {
    pub gamma1_hat: f64,
    pub gamma2_hat: f64,
    pub r2_max: f64,
    pub r2_min: f64,
    pub levels: usize,
}

/// Least-squares slopes of `ln max|Δ|` and `ln(min|Δ_{n-1}^k| / μ_{n-1})`
/// against `n`, over `n_range` inclusive.
pub fn fit_decay(stats: &[PartitionStats], n_range: (usize, usize)) -> Result<DecayFit> {
    let sel: Vec<&PartitionStats> = stats
        .iter()
        .filter(|s| s.level >= n_range.0 && s.level <= n_range.1)
        .collect();
    if sel.len() < 6 {
        return Err(LabError::InsufficientData {
            needed: 6,
            got: sel.len(),
        });
    }
    let xs: Vec<f64> = sel.iter().map(|s| s.level as f64).collect();
    let ymax: Vec<f64> = sel.iter().map(|s| s.max_length.ln()).collect();
    let ymin: Vec<f64> = sel.iter().map(|s| s.min_over_mu.ln()).collect();
    let fmax = fit_line(&xs, &ymax).ok_or(LabError::DegenerateRegression)?;
    let fmin = fit_line(&xs, &ymin).ok_or(LabError::DegenerateRegression)?;
    Ok(DecayFit {
        gamma1_hat: fmax.slope.exp(),
        gamma2_hat: fmin.slope.exp(),
        r2_max: fmax.r2,
        r2_min: fmin.r2,
        levels: sel.len(),
    })
}

/// `min_k max |sub|/|Δ_{n-1}^k|`, the sub-intervals being the intervals of
/// the finer partition `ζ_{n+1}` inside each old interval of `ζ_n`.
pub fn long_subinterval_ratio<T: Real>(coarse: &DynamicalPartition<T>, fine: &DynamicalPartition<T>) -> f64 {
    let fine_sorted = fine.sorted();
    let tol = T::cst(100.0 * fine.q.max(1) as f64) * T::unit_roundoff();
    let mut worst = f64::INFINITY;
    for iv in &coarse.old {
        let (a, b) = (iv.a(), iv.b());
        let start = fine_sorted.partition_point(|x| x.a() < a - tol);
        let best = fine_sorted[start..]
            .iter()
            .take_while(|x| x.a() < b - tol)
            .map(|x| x.length)
            .fold(T::zero(), |m, l| m.max(l));
        worst = worst.min((best / iv.length).as_f64());
    }
    worst
}

/// Extremes of `(f^{q})'` over `samples` equally spaced circle points.
pub fn return_derivative_range<T: Real>(
    map: &BreakMap<T>,
    q: u64,
    samples: usize,
) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for j in 0..samples {
        let x = T::cst((j as f64 + 0.5) / samples as f64);
        let jet = map.iterate_jet(CirclePoint::from_lift(x), q as usize, Side::Right)?;
        let d = jet.d1.as_f64();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_rigid() -> (BreakMap<f64>, ContinuedFraction<f64>) {
        let rho = (5f64.sqrt() - 1.0) / 2.0;
        (
            BreakMap::new(1.0, 0.0, rho).unwrap(),
            ContinuedFraction::golden(30),
        )
    }

    #[test]
    fn rigid_golden_level_two() {
        let (f, cf) = golden_rigid();
        let part = dynamical_partition(&f, &cf, 2).unwrap();
        assert_eq!((part.old.len(), part.new.len()), (2, 1));
        let rho = cf.value();
        let mut lens: Vec<f64> = part.intervals().map(|i| i.length).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = vec![2.0 * rho - 1.0, 1.0 - rho, 1.0 - rho];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in lens.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(part.check().passed());
    }

    #[test]
    fn level_one_counts() {
        let f = BreakMap::new(2.0, 0.5, 0.3).unwrap();
        let cf = crate::rotation::rotation_cf(&f, 4).unwrap();
        let part = dynamical_partition(&f, &cf, 1).unwrap();
        assert_eq!(part.old.len() as u64, cf.a(1));
        assert_eq!(part.new.len(), 1);
        assert!(part.check().passed(), "{:?}", part.check());
    }

    #[test]
    fn rigid_rotation_old_intervals_equal_measure() {
        let (f, cf) = golden_rigid();
        for n in 3..12 {
            let part = dynamical_partition(&f, &cf, n).unwrap();
            let stats = partition_stats(&part, &cf);
            assert!((stats.min_over_mu - 1.0).abs() < 1e-12, "n={n}");
            assert_eq!(part.len() as u64, cf.q(n as i64 + 1));
            let next = dynamical_partition(&f, &cf, n + 1).unwrap();
            assert!(part.is_refined_by(&next));
        }
    }

    #[test]
    fn decay_fit_on_rigid_rotation() {
        let (f, cf) = golden_rigid();
        let stats: Vec<_> = (4..=14)
            .map(|n| partition_stats(&dynamical_partition(&f, &cf, n).unwrap(), &cf))
            .collect();
        let fit = fit_decay(&stats, (4, 14)).unwrap();
        assert!((fit.gamma1_hat - cf.value()).abs() < 1e-6);
        assert!((fit.gamma2_hat - 1.0).abs() < 1e-10);
        assert!(matches!(
            fit_decay(&stats, (4, 8)),
            Err(LabError::InsufficientData { needed: 6, got: 5 })
        ));
    }

    #[test]
    fn repeated_stats_give_unit_rates() {
        let s = PartitionStats {
            level: 0,
            q: 1,
            max_length: 0.3,
            min_old_length: 0.1,
            mu: 0.2,
            min_over_mu: 0.5,
            argmin_index: 0,
        };
        let stats: Vec<_> = (0..8).map(|n| PartitionStats { level: n, ..s }).collect();
        let fit = fit_decay(&stats, (0, 7)).unwrap();
        assert_eq!(fit.gamma1_hat, 1.0);
        assert_eq!(fit.gamma2_hat, 1.0);
    }
}
