//! The conjugacy between two maps with the same rotation number, seen
//! through the distortion of long compositions.
//!
//! If `h ∘ f = g ∘ h` and `h'` is Hölder with exponent `α`, then
//! `|ξ_{f^n}(J) - ξ_{g^n}(h J)| = O(|J|^α + |f^n J|^α)`. For a
//! piecewise-Möbius `g` the second term vanishes while `ξ_{f^n}(J)` stays of
//! the order of `Σ |f^k J|²`; on the shortest interval of the dynamical
//! partition this caps `α`.

use serde::{Deserialize, Serialize};

use crate::circle::{BreakMap, CirclePoint};
use crate::constants::{derivative_bound, ledger_for, ConstantsLedger};
use crate::distortion::{interval_orbit, xi_orbit_from, XiSummary};
use crate::error::{LabError, Result};
use crate::partition::{
    dynamical_partition, fit_decay, long_subinterval_ratio, partition_stats, DecayFit, DynamicalPartition,
    PartitionInterval,
};
use crate::real::{fit_line, Real};
use crate::rotation::{rotation_cf, tune_delta, ContinuedFraction, TargetSpec};

/// Parameters of a map, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MapSpec {
    pub c: f64,
    pub eps: f64,
    pub delta: f64,
}

impl MapSpec {
    pub fn of<T: Real>(map: &BreakMap<T>) -> Self {
        MapSpec {
            c: map.c().as_f64(),
            eps: map.eps().as_f64(),
            delta: map.delta().as_f64(),
        }
    }
}

/// Matched orbit points `f^k(p) ↔ g^k(p)`, `0 <= k < q_N + q_{N-1}`,
/// sorted along the circle.
#[derive(Debug, Clone)]
pub struct ConjugacyTable<T> {
    pub f_points: Vec<T>,
    pub g_points: Vec<T>,
    /// Orbit index `k` of each row.
    pub orbit_index: Vec<u64>,
    pub depth: usize,
    pub quotients: Vec<u64>,
    pub f_spec: MapSpec,
    pub g_spec: MapSpec,
    /// `g^k(p)` by orbit index.
    g_by_index: Vec<T>,
}

impl<T: Real> ConjugacyTable<T> {
    pub fn len(&self) -> usize {
        self.f_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_points.is_empty()
    }

    /// Whether the matched `g` points are in the same circular order.
    pub fn is_order_isomorphic(&self) -> bool {
        self.g_points.windows(2).all(|w| w[0] < w[1])
    }

    pub fn continued_fraction(&self) -> Result<ContinuedFraction<T>> {
        ContinuedFraction::from_quotients(self.quotients.clone())
    }

    /// `g^k(p)` on `[0, 1)`.
    pub fn g_point(&self, k: u64) -> Option<T> {
        self.g_by_index.get(k as usize).copied()
    }

    /// Piecewise-linear interpolation of `h` on `[0, 1)`, for plotting.
    pub fn h(&self, x: T) -> T {
        let x = x - x.floor();
        let i = self.f_points.partition_point(|&p| p <= x);
        let n = self.len();
        let (x0, y0) = (self.f_points[i - 1], self.g_points[i - 1]);
        let (x1, y1) = if i < n {
            (self.f_points[i], self.g_points[i])
        } else {
            (T::one(), T::one())
        };
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Matches the orbits of the break point under `f` and `g`.
pub fn build_conjugacy<T: Real>(f: &BreakMap<T>, g: &BreakMap<T>, depth: usize) -> Result<ConjugacyTable<T>> {
    if f.c() != g.c() {
        return Err(LabError::InvalidParameter("maps must share the break size".into()));
    }
    let cf_f = rotation_cf(f, depth)?;
    let cf_g = rotation_cf(g, depth)?;
    if let Some(i) = cf_f
        .quotients()
        .iter()
        .zip(cf_g.quotients())
        .position(|(a, b)| a != b)
    {
        return Err(LabError::CfMismatch { index: i + 1 });
    }
    let d = depth as i64;
    let count = (cf_f.q(d) + cf_f.q(d - 1)) as usize;
    let fo: Vec<T> = f.orbit(CirclePoint::origin(), count - 1).iter().map(|p| p.frac).collect();
    let go: Vec<T> = g.orbit(CirclePoint::origin(), count - 1).iter().map(|p| p.frac).collect();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&i, &j| fo[i].partial_cmp(&fo[j]).expect("finite orbit"));
    let floor = T::cst(100.0 * count as f64) * T::unit_roundoff();
    for w in order.windows(2) {
        let gap = fo[w[1]] - fo[w[0]];
        if gap < floor {
            return Err(LabError::PrecisionExhausted {
                level: depth,
                gap: gap.as_f64(),
            });
        }
    }
    let table = ConjugacyTable {
        f_points: order.iter().map(|&i| fo[i]).collect(),
        g_points: order.iter().map(|&i| go[i]).collect(),
        orbit_index: order.iter().map(|&i| i as u64).collect(),
        depth,
        quotients: cf_f.quotients().to_vec(),
        f_spec: MapSpec::of(f),
        g_spec: MapSpec::of(g),
        g_by_index: go,
    };
    if !table.is_order_isomorphic() {
        return Err(LabError::CfMismatch { index: depth });
    }
    Ok(table)
}

/// Obstruction data at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelObstruction {
    pub level: usize,
    pub q: u64,
    /// Index `l_n` of the shortest old interval.
    pub l_n: usize,
    /// `|J_n|`, the chosen half of `Δ_{n-1}^{l_n}`.
    pub j_len: f64,
    pub j_image_len: f64,
    /// `|ξ_{f^{q_n}}(J_n) - ξ_{g^{q_n}}(h J_n)|`.
    pub d: f64,
    /// `ξ_{f^{q_n}}(J_n)` as an orbit sum.
    pub xi_f: f64,
    /// `ξ_{g^{q_n}}(h J_n)` from iterated derivatives: the numerical floor.
    pub xi_g_direct: f64,
    pub s_hat: f64,
    /// `Σ_k |f^k J_n|²`.
    pub sum_sq_j: f64,
    /// `Σ_k |f^k Δ_{n-1}^{l_n}|²`.
    pub sum_sq_whole: f64,
    /// `Σ_k |Δ_{n-1}^k|²`.
    pub sum_sq_old: f64,
    /// Largest composition-law residual over the orbit sums of `J_n`.
    pub composition_residual: f64,
    pub d_max: f64,
    pub len_max: f64,
    pub d_p90: f64,
    pub len_p90: f64,
}

/// Slope and fit quality of one regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HolderEstimate {
    /// `min(slope, 1)`, or `1` when no obstruction is visible.
    pub alpha_hat: f64,
    pub no_obstruction: bool,
    /// `ln d` against `ln max(|J_n|, |f^{q_n} J_n|)`.
    pub primary: Option<SlopeFit>,
    /// Per-level maxima over all old intervals.
    pub max_variant: Option<SlopeFit>,
    /// Per-level 90th percentiles over all old intervals.
    pub p90_variant: Option<SlopeFit>,
    pub levels: Vec<LevelObstruction>,
    pub max_d: f64,
}

/// Obstructions below this are indistinguishable from rounding.
pub const OBSTRUCTION_FLOOR: f64 = 1e-10;

/// Point `F^{-j}(0)` for `j = 0..=q`.
fn backward_orbit<T: Real>(map: &BreakMap<T>, q: u64) -> Vec<CirclePoint<T>> {
    let mut out = Vec::with_capacity(q as usize + 1);
    let mut x = CirclePoint::origin();
    out.push(x);
    for _ in 0..q {
        x = map.inverse(x);
        out.push(x);
    }
    out
}

/// Halves of `iv` split at `y`, as `(start, length)` pairs.
fn split_at<T: Real>(iv: &PartitionInterval<T>, y: CirclePoint<T>, level: usize) -> Result<[(CirclePoint<T>, T); 2]> {
    let mut off = y.frac - iv.left.frac;
    if off < T::zero() {
        off += T::one();
    }
    if !(off > T::zero() && off < iv.length) {
        return Err(LabError::PrecisionExhausted {
            level,
            gap: off.as_f64(),
        });
    }
    let y = CirclePoint::new(iv.left.turns, iv.left.frac + off);
    Ok([(iv.left, off), (y, iv.length - off)])
}

struct IntervalObstruction<T> {
    d: T,
    len: T,
    f_sum: XiSummary<T>,
    g_sum: XiSummary<T>,
    half: usize,
}

fn interval_obstruction<T: Real>(
    f: &BreakMap<T>,
    g: &BreakMap<T>,
    f_halves: [(CirclePoint<T>, T); 2],
    g_halves: [(CirclePoint<T>, T); 2],
    q: usize,
) -> Result<IntervalObstruction<T>> {
    let s0 = xi_orbit_from(f, f_halves[0].0, f_halves[0].1, q)?;
    let s1 = xi_orbit_from(f, f_halves[1].0, f_halves[1].1, q)?;
    let (half, f_sum) = if s0.sum_squares >= s1.sum_squares { (0, s0) } else { (1, s1) };
    let g_sum = xi_orbit_from(g, g_halves[half].0, g_halves[half].1, q)?;
    Ok(IntervalObstruction {
        d: (f_sum.xi_power - g_sum.xi_power).abs(),
        len: f_halves[half].1.max(f_sum.final_len),
        f_sum,
        g_sum,
        half,
    })
}

fn percentile(mut xs: Vec<f64>, p: f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let rank = ((p * xs.len() as f64).ceil() as usize).clamp(1, xs.len());
    xs[rank - 1]
}

fn check_against_table<T: Real>(
    table: &ConjugacyTable<T>,
    part: &DynamicalPartition<T>,
    level: usize,
) -> Result<()> {
    let tol = T::cst(1e4) * T::unit_roundoff() * T::from_int(part.q as i64);
    for iv in &part.old {
        if let Some(gp) = table.g_point(iv.left_point) {
            let mut diff = (gp - iv.left.frac).abs();
            diff = diff.min(T::one() - diff);
            if diff > tol {
                return Err(LabError::CfMismatch { index: level });
            }
        }
    }
    Ok(())
}

fn level_obstruction<T: Real>(
    table: &ConjugacyTable<T>,
    f: &BreakMap<T>,
    g: &BreakMap<T>,
    cf: &ContinuedFraction<T>,
    n: usize,
) -> Result<LevelObstruction> {
    let pf = dynamical_partition(f, cf, n)?;
    let pg = dynamical_partition(g, cf, n)?;
    check_against_table(table, &pg, n)?;
    let q = pf.q;
    let bf = backward_orbit(f, q);
    let bg = backward_orbit(g, q);
    let l_n = partition_stats(&pf, cf).argmin_index;
    let mut ds = Vec::with_capacity(q as usize);
    let mut lens = Vec::with_capacity(q as usize);
    let mut chosen = None;
    for k in 0..q as usize {
        let y_f = bf[q as usize - k];
        let y_g = bg[q as usize - k];
        let fh = split_at(&pf.old[k], y_f, n)?;
        let gh = split_at(&pg.old[k], y_g, n)?;
        let ob = interval_obstruction(f, g, fh, gh, q as usize)?;
        ds.push(ob.d.as_f64());
        lens.push(ob.len.as_f64());
        if k == l_n {
            chosen = Some((ob, fh));
        }
    }
    let (ob, fh) = chosen.expect("l_n indexes an old interval");
    let other = fh[1 - ob.half];
    let chosen_orbit = interval_orbit(f, fh[ob.half].0, fh[ob.half].1, q as usize)?;
    let other_orbit = interval_orbit(f, other.0, other.1, q as usize)?;
    let sum_sq_whole = chosen_orbit[..q as usize]
        .iter()
        .zip(&other_orbit[..q as usize])
        .map(|(a, b)| {
            let l = (a.1 + b.1).as_f64();
            l * l
        })
        .sum::<f64>();
    let sum_sq_old = pf.old.iter().map(|iv| (iv.length * iv.length).as_f64()).sum::<f64>();
    Ok(LevelObstruction {
        level: n,
        q,
        l_n,
        j_len: fh[ob.half].1.as_f64(),
        j_image_len: ob.f_sum.final_len.as_f64(),
        d: ob.d.as_f64(),
        xi_f: ob.f_sum.xi_power.as_f64(),
        xi_g_direct: ob.g_sum.xi_direct.as_f64(),
        s_hat: ob.f_sum.s_hat.as_f64(),
        sum_sq_j: ob.f_sum.sum_squares.as_f64(),
        sum_sq_whole,
        sum_sq_old,
        composition_residual: ob
            .f_sum
            .composition_residual()
            .max(ob.g_sum.composition_residual())
            .as_f64(),
        d_max: ds.iter().cloned().fold(0.0, f64::max),
        len_max: lens.iter().cloned().fold(0.0, f64::max),
        d_p90: percentile(ds, 0.9),
        len_p90: percentile(lens, 0.9),
    })
}

fn slope_fit(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return None;
    }
    fit_line(xs, ys).map(|l| SlopeFit {
        slope: l.slope,
        intercept: l.intercept,
        r2: l.r2,
    })
}

/// Regularity bound for `h'` from the distortion obstruction over
/// `level_range` (inclusive).
pub fn holder_estimate<T: Real>(
    table: &ConjugacyTable<T>,
    f: &BreakMap<T>,
    g: &BreakMap<T>,
    level_range: (usize, usize),
) -> Result<HolderEstimate> {
    let (lo, hi) = level_range;
    if lo < 1 || hi < lo {
        return Err(LabError::InvalidParameter(format!("bad level range {}:{}", lo, hi)));
    }
    if hi + 2 > table.depth {
        return Err(LabError::InvalidDepth {
            requested: hi + 2,
            available: table.depth,
        });
    }
    let count = hi - lo + 1;
    if count < 3 {
        return Err(LabError::InsufficientLevels { needed: 3, got: count });
    }
    let cf = table.continued_fraction()?;
    let levels = (lo..=hi)
        .map(|n| level_obstruction(table, f, g, &cf, n))
        .collect::<Result<Vec<_>>>()?;
    let max_d = levels.iter().map(|l| l.d_max).fold(0.0, f64::max);
    if levels.iter().all(|l| l.d < OBSTRUCTION_FLOOR) {
        return Ok(HolderEstimate {
            alpha_hat: 1.0,
            no_obstruction: true,
            primary: None,
            max_variant: None,
            p90_variant: None,
            levels,
            max_d,
        });
    }
    let ln = |v: f64| v.ln();
    let primary = slope_fit(
        &levels.iter().map(|l| ln(l.j_len.max(l.j_image_len))).collect::<Vec<_>>(),
        &levels.iter().map(|l| ln(l.d)).collect::<Vec<_>>(),
    )
    .ok_or(LabError::DegenerateRegression)?;
    let max_variant = slope_fit(
        &levels.iter().map(|l| ln(l.len_max)).collect::<Vec<_>>(),
        &levels.iter().map(|l| ln(l.d_max)).collect::<Vec<_>>(),
    );
    let p90_variant = slope_fit(
        &levels.iter().map(|l| ln(l.len_p90)).collect::<Vec<_>>(),
        &levels.iter().map(|l| ln(l.d_p90)).collect::<Vec<_>>(),
    );
    Ok(HolderEstimate {
        alpha_hat: primary.slope.min(1.0),
        no_obstruction: false,
        primary: Some(primary),
        max_variant,
        p90_variant,
        levels,
        max_d,
    })
}

/// Inputs of [`rigidity_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub c: f64,
    pub eps: f64,
    pub target: TargetSpec,
    pub n_min: usize,
    pub n_max: usize,
    pub precision_digits: u32,
    pub alpha_gate: f64,
    /// First level at which asymptotic inequalities are asserted.
    pub n0: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            c: std::f64::consts::E,
            eps: 1.0,
            target: TargetSpec::Golden,
            n_min: 8,
            n_max: 16,
            precision_digits: 16,
            alpha_gate: 0.95,
            n0: 6,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(LabError::InvalidParameter(format!("break size must be positive, got {}", self.c)));
        }
        if self.c == 1.0 {
            return Err(LabError::InvalidParameter(
                "break size 1 means no break; the obstruction needs c != 1".into(),
            ));
        }
        if !self.eps.is_finite() || self.eps == 0.0 {
            return Err(LabError::InvalidParameter(
                "eps must be non-zero so that the Schwarzian is negative".into(),
            ));
        }
        if self.n_min < 2 || self.n_max < self.n_min + 2 {
            return Err(LabError::InvalidParameter(format!(
                "level range {}:{} needs n_min >= 2 and at least three levels",
                self.n_min, self.n_max
            )));
        }
        if !(self.alpha_gate > 0.0 && self.alpha_gate <= 1.0) {
            return Err(LabError::InvalidParameter("alpha gate must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// `q_n Σ_k |Δ_{n-1}^k|²` against `(1 + D)^{-2}`, and the `J_n` chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerChainRow {
    pub level: usize,
    pub q: u64,
    pub sum_sq_old: f64,
    pub q_times_sum: f64,
    pub bound: f64,
    pub holds: bool,
    /// `Σ|f^k J_n|² / Σ|f^k Δ_{n-1}^{l_n}|²`; claimed `>= 1/2`, provably
    /// `>= 1/4`.
    pub split_ratio: f64,
    /// `Σ|f^k J_n|² / Σ_k |Δ_{n-1}^k|²` against `1/(2D)`.
    pub refinement_ratio: f64,
    pub refinement_holds: bool,
    pub asymptotic: bool,
}

/// `Σ_k |Δ_{n-1}^k|² / |J_n|^α` across levels for one trial `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UpperChainRow {
    pub alpha: f64,
    pub ratios: Vec<f64>,
    /// Slope of `ln ratio` against `n`.
    pub growth: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RigidityReport {
    pub alpha_hat: f64,
    pub nu_hat: f64,
    pub passes_gate: bool,
    pub holder: HolderEstimate,
    /// Largest obstruction seen with `g = f`.
    pub null_control_max_d: f64,
    pub null_control_passes: bool,
    pub lower_chain: Vec<LowerChainRow>,
    pub upper_chain: Vec<UpperChainRow>,
    /// Largest trial `α` whose upper-chain ratio does not grow.
    pub alpha_upper: Option<f64>,
    pub levels_used: (usize, usize),
    pub decay: Option<DecayFit>,
    pub ledger: ConstantsLedger,
    pub f: MapSpec,
    pub g: MapSpec,
    pub config: ExperimentConfig,
}

pub const ALPHA_GRID: [f64; 5] = [0.80, 0.85, 0.90, 0.95, 1.00];

/// Tunes `f = (c, ε)` and `g = (c, 0)` to the target and runs the whole
/// obstruction pipeline at the precision of `T`.
pub fn rigidity_experiment<T: Real>(config: &ExperimentConfig) -> Result<RigidityReport> {
    config.validate()?;
    let target = config.target.target::<T>()?;
    let depth = config.n_max + 2;
    let c = T::cst(config.c);
    let f = BreakMap::new(c, T::cst(config.eps), tune_delta(c, T::cst(config.eps), &target, depth)?)?;
    let g = BreakMap::new(c, T::zero(), tune_delta(c, T::zero(), &target, depth)?)?;
    let table = build_conjugacy(&f, &g, depth)?;
    let range = (config.n_min, config.n_max);
    let holder = holder_estimate(&table, &f, &g, range)?;
    let self_table = build_conjugacy(&f, &f, depth)?;
    let null = holder_estimate(&self_table, &f, &f, range)?;
    let null_control_max_d = null.levels.iter().map(|l| l.d_max).fold(0.0, f64::max);

    let cf = table.continued_fraction()?;
    let mut stats = Vec::new();
    let mut r_hat: Option<f64> = None;
    let mut prev: Option<DynamicalPartition<T>> = None;
    for n in config.n_min..=config.n_max + 1 {
        let part = dynamical_partition(&f, &cf, n)?;
        if n <= config.n_max {
            stats.push(partition_stats(&part, &cf));
        }
        if let Some(p) = &prev {
            let r = long_subinterval_ratio(p, &part);
            r_hat = Some(r_hat.map_or(r, |x| x.min(r)));
        }
        prev = Some(part);
    }
    let decay = fit_decay(&stats, range).ok();
    let ledger = ledger_for(config.c, decay.as_ref(), r_hat)?;
    let d_c = derivative_bound(config.c);
    let bound = (1.0 + d_c).powi(-2);
    let lower_chain = holder
        .levels
        .iter()
        .map(|l| {
            let q_times_sum = l.q as f64 * l.sum_sq_old;
            let refinement_ratio = l.sum_sq_j / l.sum_sq_old;
            LowerChainRow {
                level: l.level,
                q: l.q,
                sum_sq_old: l.sum_sq_old,
                q_times_sum,
                bound,
                holds: q_times_sum >= bound,
                split_ratio: l.sum_sq_j / l.sum_sq_whole,
                refinement_ratio,
                refinement_holds: refinement_ratio >= 1.0 / (2.0 * d_c),
                asymptotic: l.level >= config.n0,
            }
        })
        .collect::<Vec<_>>();
    let ns: Vec<f64> = holder.levels.iter().map(|l| l.level as f64).collect();
    let upper_chain: Vec<UpperChainRow> = ALPHA_GRID
        .iter()
        .map(|&alpha| {
            let ratios: Vec<f64> = holder
                .levels
                .iter()
                .map(|l| l.sum_sq_old / l.j_len.powf(alpha))
                .collect();
            let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
            let growth = fit_line(&ns, &logs).map_or(f64::NAN, |f| f.slope);
            UpperChainRow {
                alpha,
                ratios,
                growth,
                bounded: growth <= 0.0,
            }
        })
        .collect();
    let alpha_upper = upper_chain
        .iter()
        .filter(|r| r.bounded)
        .map(|r| r.alpha)
        .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |x| x.max(a))));
    Ok(RigidityReport {
        alpha_hat: holder.alpha_hat,
        nu_hat: 1.0 - holder.alpha_hat,
        passes_gate: holder.alpha_hat <= config.alpha_gate,
        null_control_passes: null_control_max_d < OBSTRUCTION_FLOOR,
        null_control_max_d,
        holder,
        lower_chain,
        upper_chain,
        alpha_upper,
        levels_used: range,
        decay,
        ledger,
        f: MapSpec::of(&f),
        g: MapSpec::of(&g),
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::RotationTarget;

    #[test]
    fn identical_maps_give_identity_table() {
        let cf = ContinuedFraction::<f64>::golden(30);
        let f = BreakMap::new(1.0, 0.0, cf.value()).unwrap();
        let t = build_conjugacy(&f, &f, 10).unwrap();
        assert_eq!(t.len() as u64, cf.q(10) + cf.q(9));
        assert_eq!(t.f_points, t.g_points);
        assert!(t.is_order_isomorphic());
        assert!((t.h(0.123) - 0.123).abs() < 1e-15);
    }

    #[test]
    fn mismatched_rotation_is_rejected() {
        let f = BreakMap::new(1.0, 0.0, 0.618034).unwrap();
        let g = BreakMap::new(1.0, 0.0, 0.414214).unwrap();
        assert!(matches!(build_conjugacy(&f, &g, 6), Err(LabError::CfMismatch { .. })));
    }

    #[test]
    fn self_conjugacy_has_no_obstruction() {
        let target = RotationTarget::golden();
        let c = std::f64::consts::E;
        let f = BreakMap::new(c, 1.0, tune_delta(c, 1.0, &target, 12).unwrap()).unwrap();
        let t = build_conjugacy(&f, &f, 10).unwrap();
        let est = holder_estimate(&t, &f, &f, (4, 8)).unwrap();
        assert!(est.no_obstruction);
        assert_eq!(est.alpha_hat, 1.0);
        assert!(est.max_d < OBSTRUCTION_FLOOR);
    }

    #[test]
    fn unit_break_is_rejected() {
        let cfg = ExperimentConfig {
            c: 1.0,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(LabError::InvalidParameter(_))));
    }
}
