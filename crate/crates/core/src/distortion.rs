//! Cross-ratio distortion.
//!
//! `f̃(x, y) = ln((f(y) - f(x))/(y - x))` with `f̃(x, x) = ln f'(x)`, and
//! `ξ_f(x, y) = f̃(x, x) + f̃(y, y) - 2 f̃(x, y)`. Both are additive under
//! composition and `ξ` vanishes identically on Möbius maps.

use serde::Serialize;

use crate::circle::{BreakMap, CirclePoint, Side, SmoothMap};
use crate::error::{LabError, Result};
use crate::real::Real;

/// `[a, b]` in lift coordinates, `0 < b - a < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Interval<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> Interval<T> {
    /// The interval spanned by `x` and `y`, in either order.
    pub fn new(x: T, y: T) -> Result<Self> {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let len = b - a;
        if !(len > T::zero() && len < T::one()) {
            return Err(LabError::InvalidParameter(format!(
                "interval length must lie in (0, 1), got {}",
                len
            )));
        }
        Ok(Interval { a, b })
    }

    pub fn len(&self) -> T {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= T::zero()
    }
}

/// `f̃(x, y)`. Below `|y - x| = √u` the value comes from the midpoint jet,
/// `ln f'(m) + ln(1 + f'''(m) h²/(24 f'(m)))`.
pub fn tilde<T: Real, M: SmoothMap<T>>(f: &M, x: T, y: T) -> Result<T> {
    if x == y {
        if f.breaks_at(x) {
            return Err(LabError::BreakCollision { step: 0 });
        }
        return Ok(f.jet(x, Side::Right).d1.ln());
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let h = hi - lo;
    let smooth = f.smooth_on(lo, hi);
    if smooth && h < T::unit_roundoff().sqrt() {
        let m = lo + h / T::cst(2.0);
        if !f.breaks_at(m) {
            let j = f.jet(m, Side::Right);
            return Ok(j.d1.ln() + (j.d3 / j.d1 * h * h / T::cst(24.0)).ln_1p());
        }
    }
    let rise = if smooth {
        f.increment(lo, h)
    } else {
        f.apply(hi) - f.apply(lo)
    };
    Ok((rise / h).ln())
}

/// `ξ_f(J)` from one-sided jets at the endpoints and `f̃` on `J`.
pub fn xi_generic<T: Real, M: SmoothMap<T>>(f: &M, j: &Interval<T>) -> Result<T> {
    if !f.smooth_on(j.a, j.b) {
        return Err(LabError::BreakInInterior { k: 0 });
    }
    let da = f.jet(j.a, Side::Right).d1.ln();
    let db = f.jet(j.b, Side::Left).d1.ln();
    Ok(da + db - T::cst(2.0) * tilde(f, j.a, j.b)?)
}

/// `ξ_f(J)`, exact where the map supplies a closed form.
pub fn xi<T: Real, M: SmoothMap<T>>(f: &M, j: &Interval<T>) -> Result<T> {
    if !f.smooth_on(j.a, j.b) {
        return Err(LabError::BreakInInterior { k: 0 });
    }
    match f.xi_closed_form(j.a, j.b) {
        Some(v) => Ok(v),
        None => xi_generic(f, j),
    }
}

/// Orbit sums of `ξ` and of squared lengths for `f^k(J)`, `0 <= k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct XiSummary<T> {
    pub interval: Interval<T>,
    pub n: usize,
    /// `Σ ξ_f(f^k J)`.
    pub xi_power: T,
    /// `Σ |f^k J|²`.
    pub sum_squares: T,
    pub max_iter_len: T,
    /// `|f^n J|`.
    pub final_len: T,
    /// `min_k -ξ_f(f^k J)/|f^k J|²`.
    pub s_hat: T,
    /// `ξ_{f^n}(J)` from iterated one-sided derivatives and `|f^n J|`.
    pub xi_direct: T,
}

impl<T: Real> XiSummary<T> {
    pub fn composition_residual(&self) -> T {
        (self.xi_power - self.xi_direct).abs()
    }

    /// The composition law holds within `n·1e-10`.
    pub fn composition_ok(&self) -> bool {
        self.composition_residual() <= T::cst(1e-10) * T::from_int(self.n.max(1) as i64)
    }
}

/// Deterministic pairwise sum.
fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Iterates of `J` as `(left point, length)`, with endpoints that land within
/// rounding distance of the break snapped onto it.
pub fn interval_orbit<T: Real>(
    map: &BreakMap<T>,
    start: CirclePoint<T>,
    len: T,
    n: usize,
) -> Result<Vec<(CirclePoint<T>, T)>> {
    let u = T::unit_roundoff();
    let mut out = Vec::with_capacity(n + 1);
    let mut x = start;
    let mut len = len;
    for k in 0..=n {
        let tol = T::cst(100.0) * u * T::from_int(k as i64 + 1);
        if x.frac > T::one() - tol && len > T::cst(2.0) * tol {
            x = CirclePoint::new(x.turns + 1, T::zero());
        }
        if x.frac + len > T::one() + tol {
            return Err(LabError::BreakInInterior { k });
        }
        out.push((x, len));
        if k < n {
            (x, len) = map.advance(x, len);
        }
    }
    Ok(out)
}

/// `Σ ξ_f(f^k J)` and friends; see [`XiSummary`].
pub fn xi_orbit<T: Real>(map: &BreakMap<T>, j: &Interval<T>, n: usize) -> Result<XiSummary<T>> {
    xi_orbit_from(map, CirclePoint::from_lift(j.a), j.len(), n)
}

/// [`xi_orbit`] for the interval `[start, start + len]`; keeps the full
/// relative accuracy of `len` for short intervals far from `0`.
pub fn xi_orbit_from<T: Real>(
    map: &BreakMap<T>,
    start: CirclePoint<T>,
    len0: T,
    n: usize,
) -> Result<XiSummary<T>> {
    let j = Interval {
        a: start.lift(),
        b: start.lift() + len0,
    };
    let orbit = interval_orbit(map, start, len0, n)?;
    let mut xis = Vec::with_capacity(n);
    let mut squares = Vec::with_capacity(n);
    let mut log_da = Vec::with_capacity(n);
    let mut log_db = Vec::with_capacity(n);
    let mut max_len = T::zero();
    let mut s_hat: Option<T> = None;
    for &(x, len) in &orbit[..n] {
        let xi_k = map.xi_of_length(len);
        xis.push(xi_k);
        squares.push(len * len);
        max_len = max_len.max(len);
        let ratio = -xi_k / (len * len);
        s_hat = Some(s_hat.map_or(ratio, |s| s.min(ratio)));
        log_da.push(map.jet_at(x, Side::Right).d1.ln());
        let end = (x.frac + len).min(T::one());
        log_db.push(map.eval_jet(end, Side::Left).d1.ln());
    }
    let final_len = orbit[n].1;
    let xi_direct = pairwise_sum(&log_da) + pairwise_sum(&log_db)
        - T::cst(2.0) * (final_len / len0).ln();
    Ok(XiSummary {
        interval: j,
        n,
        xi_power: pairwise_sum(&xis),
        sum_squares: pairwise_sum(&squares),
        max_iter_len: max_len,
        final_len,
        s_hat: s_hat.unwrap_or(T::zero()),
        xi_direct,
    })
}

/// `|ξ_f([x - h/2, x + h/2])/h² - S(f)(x)/6|` with `h = u^{1/4}`; the
/// cross-difference of `f̃` on the square of side `h` about `(x, x)` is
/// exactly that `ξ`.
pub fn mixed_partial_check<T: Real, M: SmoothMap<T>>(f: &M, x: T) -> Result<T> {
    if f.breaks_at(x) {
        return Err(LabError::BreakCollision { step: 0 });
    }
    let h = T::unit_roundoff().sqrt().sqrt();
    let half = h / T::cst(2.0);
    let j = Interval::new(x - half, x + half)?;
    if !f.smooth_on(j.a, j.b) {
        return Err(LabError::BreakCollision { step: 0 });
    }
    let cross = xi_generic(f, &j)? / (h * h);
    let s = f.jet(x, Side::Right).schwarzian();
    Ok((cross - s / T::cst(6.0)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::AffineMap;

    #[test]
    fn rigid_rotation_has_no_distortion() {
        let f = BreakMap::new(1.0, 0.0, 0.3).unwrap();
        assert_eq!(tilde(&f, 0.1, 0.6).unwrap(), 0.0);
        assert_eq!(xi(&f, &Interval::new(0.1, 0.6).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn affine_tilde_is_log_slope() {
        let f = AffineMap { scale: 2.0, shift: 0.0 };
        assert!((tilde(&f, 0.1, 0.4).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((tilde(&f, 0.1, 0.1).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_generic() {
        let f = BreakMap::new(std::f64::consts::E, 1.0, 0.4).unwrap();
        for (a, b) in [(0.3, 0.31), (0.05, 0.9), (0.5, 0.5001)] {
            let j = Interval::new(a, b).unwrap();
            let exact = xi(&f, &j).unwrap();
            let generic = xi_generic(&f, &j).unwrap();
            assert!((exact - generic).abs() < 1e-13, "{} {}", exact, generic);
        }
    }

    #[test]
    fn break_in_interior_is_rejected() {
        let f = BreakMap::new(2.0, 1.0, 0.4).unwrap();
        let j = Interval::new(0.9, 1.1).unwrap();
        assert_eq!(xi(&f, &j), Err(LabError::BreakInInterior { k: 0 }));
        assert!(matches!(tilde(&f, 1.0, 1.0), Err(LabError::BreakCollision { .. })));
        // Touching the break from either side is fine.
        assert!(xi(&f, &Interval::new(0.8, 1.0).unwrap()).is_ok());
        assert!(xi(&f, &Interval::new(1.0, 1.2).unwrap()).is_ok());
    }

    #[test]
    fn small_interval_asymptotics() {
        let f = BreakMap::new(std::f64::consts::E, 1.0, 0.1).unwrap();
        for t in [1e-2, 1e-3, 1e-4] {
            let r = xi(&f, &Interval::new(0.3, 0.3 + t).unwrap()).unwrap() / (-t * t / 12.0);
            assert!((r - 1.0).abs() < t, "{}", r);
        }
    }

    #[test]
    fn rigid_orbit_summary() {
        let f = BreakMap::new(1.0, 0.0, 0.3).unwrap();
        let j = Interval::new(0.1, 0.15).unwrap();
        let s = xi_orbit(&f, &j, 7).unwrap();
        assert_eq!(s.xi_power, 0.0);
        assert!((s.sum_squares - 7.0 * 0.0025).abs() < 1e-15);
        assert!(s.xi_direct.abs() < 1e-13);
    }
}
