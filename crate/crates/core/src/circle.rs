//! Lifts of circle homeomorphisms with a single break point at `0`.
//!
//! The map is `F = R ∘ f̄` on `[0, 1)`, extended by `F(x + 1) = F(x) + 1`:
//!
//! * `f̄(y) = (e^{εy} - 1)/(e^ε - 1)`, or the identity when `ε = 0`;
//! * `R(Y) = δ + Y/(s + tY)` with `s = √k`, `t = 1 - s`, `k = c e^{-ε}`.
//!
//! `R` is the Möbius map with `R(1) = R(0) + 1`, `R'(1)/R'(0) = k` and
//! `R(0) = δ`, so the jump of the derivative at the break is exactly `c`.
//!
//! Orbits are tracked as [`CirclePoint`]s (integer turns plus a fractional
//! part) so that the fractional part never loses bits to a growing integer
//! part, and interval images are propagated as `(left endpoint, length)` with
//! lengths computed from closed-form increments.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::jet::Jet3;
use crate::real::Real;

/// One-sided evaluation at a break point or one of its integer translates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// A point of the real line stored as `turns + frac`, `frac ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint<T> {
    pub turns: i64,
    pub frac: T,
}

impl<T: Real> CirclePoint<T> {
    pub fn new(turns: i64, frac: T) -> Self {
        CirclePoint { turns, frac }.normalized()
    }

    pub fn from_lift(x: T) -> Self {
        let n = x.floor();
        CirclePoint {
            turns: n.as_f64() as i64,
            frac: x - n,
        }
    }

    pub fn origin() -> Self {
        CirclePoint {
            turns: 0,
            frac: T::zero(),
        }
    }

    pub fn lift(&self) -> T {
        T::from_int(self.turns) + self.frac
    }

    /// `self - n`, exact up to the rounding of `frac` itself.
    pub fn offset_from(&self, n: i64) -> T {
        T::from_int(self.turns - n) + self.frac
    }

    /// Signed distance `other - self` in lift coordinates.
    pub fn distance_to(&self, other: &CirclePoint<T>) -> T {
        T::from_int(other.turns - self.turns) + (other.frac - self.frac)
    }

    fn normalized(self) -> Self {
        let n = self.frac.floor();
        if n == T::zero() {
            self
        } else {
            CirclePoint {
                turns: self.turns + n.as_f64() as i64,
                frac: self.frac - n,
            }
        }
    }
}

/// A map of (part of) the line that can report jets and accurate length
/// increments. Used by the distortion functionals.
pub trait SmoothMap<T: Real> {
    fn apply(&self, x: T) -> T;

    /// One-sided order-3 jet at `x`.
    fn jet(&self, x: T, side: Side) -> Jet3<T>;

    /// `f(x + h) - f(x)` for `h >= 0`, assuming `[x, x + h]` lies in one
    /// smooth piece.
    fn increment(&self, x: T, h: T) -> T {
        self.apply(x + h) - self.apply(x)
    }

    /// Whether `[a, b]` lies in one smooth piece (endpoints may be breaks).
    fn smooth_on(&self, _a: T, _b: T) -> bool {
        true
    }

    /// Whether `x` is a break point.
    fn breaks_at(&self, _x: T) -> bool {
        false
    }

    /// Exact `ξ` on `[a, b]` when a closed form is known.
    fn xi_closed_form(&self, _a: T, _b: T) -> Option<T> {
        None
    }
}

/// A circle homeomorphism given on lifts through circle points.
pub trait CircleMap<T: Real> {
    fn step(&self, x: CirclePoint<T>) -> CirclePoint<T>;

    /// Point whose orbit carries the combinatorics (the break point).
    fn base_point(&self) -> CirclePoint<T> {
        CirclePoint::origin()
    }
}

/// Orientation-preserving affine map `x ↦ scale·x + shift`.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap<T> {
    pub scale: T,
    pub shift: T,
}

impl<T: Real> SmoothMap<T> for AffineMap<T> {
    fn apply(&self, x: T) -> T {
        self.scale * x + self.shift
    }
    fn jet(&self, x: T, _side: Side) -> Jet3<T> {
        Jet3::new(self.apply(x), self.scale, T::zero(), T::zero())
    }
    fn increment(&self, _x: T, h: T) -> T {
        self.scale * h
    }
    fn xi_closed_form(&self, _a: T, _b: T) -> Option<T> {
        Some(T::zero())
    }
}

/// `outer ∘ inner`.
#[derive(Debug, Clone, Copy)]
pub struct Composition<'a, A, B> {
    pub outer: &'a A,
    pub inner: &'a B,
}

impl<T: Real, A: SmoothMap<T>, B: SmoothMap<T>> SmoothMap<T> for Composition<'_, A, B> {
    fn apply(&self, x: T) -> T {
        self.outer.apply(self.inner.apply(x))
    }
    fn jet(&self, x: T, side: Side) -> Jet3<T> {
        let inner = self.inner.jet(x, side);
        Jet3::compose(self.outer.jet(inner.value, side), inner)
    }
    fn increment(&self, x: T, h: T) -> T {
        let y = self.inner.apply(x);
        self.outer.increment(y, self.inner.increment(x, h))
    }
    fn smooth_on(&self, a: T, b: T) -> bool {
        self.inner.smooth_on(a, b) && self.outer.smooth_on(self.inner.apply(a), self.inner.apply(b))
    }
    fn breaks_at(&self, x: T) -> bool {
        self.inner.breaks_at(x) || self.outer.breaks_at(self.inner.apply(x))
    }
}

/// Lift `R ∘ f̄` of a circle homeomorphism with break size `c` at `0`.
#[derive(Debug, Clone, Copy)]
pub struct BreakMap<T> {
    c: T,
    eps: T,
    delta: T,
    s: T,
    t: T,
    em1: T,
}

impl<T: Real> BreakMap<T> {
    pub fn new(c: T, eps: T, delta: T) -> Result<Self> {
        if !(c.is_finite() && eps.is_finite() && delta.is_finite()) {
            return Err(LabError::InvalidParameter(
                "break map parameters must be finite".into(),
            ));
        }
        if c <= T::zero() {
            return Err(LabError::InvalidParameter(format!(
                "break size must be positive, got {}",
                c
            )));
        }
        let k = c * (-eps).exp();
        let s = k.sqrt();
        Ok(BreakMap {
            c,
            eps,
            delta,
            s,
            t: T::one() - s,
            em1: eps.exp_m1(),
        })
    }

    /// Same `c` and `ε`, new translation parameter.
    pub fn with_delta(&self, delta: T) -> Self {
        BreakMap { delta, ..*self }
    }

    pub fn c(&self) -> T {
        self.c
    }
    pub fn eps(&self) -> T {
        self.eps
    }
    pub fn delta(&self) -> T {
        self.delta
    }

    /// Significant decimal digits of the working precision.
    pub fn precision_digits(&self) -> u32 {
        T::DIGITS
    }

    fn smooth_is_identity(&self) -> bool {
        self.eps == T::zero()
    }

    fn fbar(&self, y: T) -> T {
        if self.smooth_is_identity() {
            y
        } else {
            (self.eps * y).exp_m1() / self.em1
        }
    }

    fn fbar_jet(&self, y: T) -> Jet3<T> {
        if self.smooth_is_identity() {
            return Jet3::identity(y);
        }
        let d1 = self.eps * (self.eps * y).exp() / self.em1;
        let d2 = self.eps * d1;
        Jet3::new(self.fbar(y), d1, d2, self.eps * d2)
    }

    fn fbar_increment(&self, y: T, h: T) -> T {
        if self.smooth_is_identity() {
            h
        } else {
            (self.eps * y).exp() * (self.eps * h).exp_m1() / self.em1
        }
    }

    fn mobius(&self, y: T) -> T {
        y / (self.s + self.t * y)
    }

    fn mobius_jet(&self, y: T) -> Jet3<T> {
        let w = self.s + self.t * y;
        let w2 = w * w;
        let d1 = self.s / w2;
        let st = self.s * self.t;
        Jet3::new(
            self.delta + y / w,
            d1,
            T::cst(-2.0) * st / (w2 * w),
            T::cst(6.0) * st * self.t / (w2 * w2),
        )
    }

    fn mobius_increment(&self, y: T, h: T) -> T {
        self.s * h / ((self.s + self.t * y) * (self.s + self.t * (y + h)))
    }

    /// `R ∘ f̄` on a fractional coordinate `y ∈ [0, 1]`.
    fn on_unit(&self, y: T) -> T {
        self.delta + self.mobius(self.fbar(y))
    }

    fn jet_on_unit(&self, y: T) -> Jet3<T> {
        let inner = self.fbar_jet(y);
        Jet3::compose(self.mobius_jet(inner.value), inner)
    }

    fn split(x: T) -> (T, T) {
        let n = x.floor();
        (n, x - n)
    }

    /// `F(x)`.
    pub fn eval_lift(&self, x: T) -> T {
        let (n, y) = Self::split(x);
        n + self.on_unit(y)
    }

    /// One-sided jet of `F` at `x`.
    pub fn eval_jet(&self, x: T, side: Side) -> Jet3<T> {
        let (n, mut y) = Self::split(x);
        let mut base = n;
        if y == T::zero() && side == Side::Left {
            y = T::one();
            base -= T::one();
        }
        let mut j = self.jet_on_unit(y);
        j.value += base;
        j
    }

    /// One-sided jet at a circle point.
    pub fn jet_at(&self, x: CirclePoint<T>, side: Side) -> Jet3<T> {
        let y = if x.frac == T::zero() && side == Side::Left {
            T::one()
        } else {
            x.frac
        };
        let mut j = self.jet_on_unit(y);
        j.value = self.step(x).lift();
        j
    }

    /// `F` on a circle point.
    pub fn step(&self, x: CirclePoint<T>) -> CirclePoint<T> {
        CirclePoint {
            turns: x.turns,
            frac: self.on_unit(x.frac),
        }
        .normalized()
    }

    /// `F^{-1}` on a circle point.
    pub fn inverse(&self, x: CirclePoint<T>) -> CirclePoint<T> {
        let w = x.frac - self.delta;
        let m = w.floor();
        let w = w - m;
        let y_big = self.s * w / (T::one() - self.t * w);
        let mut y = if self.smooth_is_identity() {
            y_big
        } else {
            (y_big * self.em1).ln_1p() / self.eps
        };
        let mut turns = x.turns + m.as_f64() as i64;
        if y >= T::one() {
            y = T::zero();
            turns += 1;
        } else if y < T::zero() {
            y = T::zero();
        }
        CirclePoint { turns, frac: y }
    }

    /// Image of the interval `[start, start + len]`, as `(F(start), |F(I)|)`.
    /// The interval must not contain the break in its interior.
    pub fn advance(&self, start: CirclePoint<T>, len: T) -> (CirclePoint<T>, T) {
        let y = start.frac;
        let big_y = self.fbar(y);
        let dy = self.fbar_increment(y, len);
        let image = CirclePoint {
            turns: start.turns,
            frac: self.delta + self.mobius(big_y),
        }
        .normalized();
        (image, self.mobius_increment(big_y, dy))
    }

    /// `ξ_F(J)` for any `J` of length `len` inside one smooth piece:
    /// `-2 ln(sinh(εℓ/2)/(εℓ/2))`.
    pub fn xi_of_length(&self, len: T) -> T {
        T::cst(-2.0) * (self.eps * len / T::cst(2.0)).ln_sinhc()
    }

    /// `(x, F(x), …, F^n(x))` in lift coordinates.
    pub fn iterate(&self, x: T, n: usize) -> Vec<T> {
        self.orbit(CirclePoint::from_lift(x), n)
            .into_iter()
            .map(|p| p.lift())
            .collect()
    }

    /// `(x, F(x), …, F^n(x))` as circle points.
    pub fn orbit(&self, x: CirclePoint<T>, n: usize) -> Vec<CirclePoint<T>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut p = x;
        out.push(p);
        for _ in 0..n {
            p = self.step(p);
            out.push(p);
        }
        out
    }

    /// Order-3 jet of `F^n` at `x`. `side` applies to `x` itself; later
    /// orbit points must stay at least `10·u` away from the break orbit.
    pub fn iterate_jet(&self, x: CirclePoint<T>, n: usize, side: Side) -> Result<Jet3<T>> {
        let mut acc = Jet3::identity(x.lift());
        let mut p = x;
        let guard = T::cst(10.0) * T::unit_roundoff();
        for k in 0..n {
            let side_k = if k == 0 {
                side
            } else {
                if p.frac < guard || p.frac > T::one() - guard {
                    return Err(LabError::BreakCollision { step: k });
                }
                Side::Right
            };
            let j = self.jet_at(p, side_k);
            acc = Jet3::compose(j, acc);
            p = self.step(p);
        }
        acc.value = p.lift();
        Ok(acc)
    }
}

impl<T: Real> SmoothMap<T> for BreakMap<T> {
    fn apply(&self, x: T) -> T {
        self.eval_lift(x)
    }
    fn jet(&self, x: T, side: Side) -> Jet3<T> {
        self.eval_jet(x, side)
    }
    fn increment(&self, x: T, h: T) -> T {
        let (_, y) = Self::split(x);
        let big_y = self.fbar(y);
        self.mobius_increment(big_y, self.fbar_increment(y, h))
    }
    fn smooth_on(&self, a: T, b: T) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        hi <= lo.floor() + T::one()
    }
    fn breaks_at(&self, x: T) -> bool {
        x == x.floor()
    }
    /// The Möbius factor preserves cross-ratios and `f̄` is affine in
    /// `e^{εy}`, so `ξ` depends on the length alone.
    fn xi_closed_form(&self, a: T, b: T) -> Option<T> {
        if !self.smooth_on(a, b) {
            return None;
        }
        Some(self.xi_of_length((b - a).abs()))
    }
}

impl<T: Real> CircleMap<T> for BreakMap<T> {
    fn step(&self, x: CirclePoint<T>) -> CirclePoint<T> {
        BreakMap::step(self, x)
    }
}

/// Free function form of [`BreakMap::new`].
pub fn make_break_map<T: Real>(c: T, eps: T, delta: T) -> Result<BreakMap<T>> {
    BreakMap::new(c, eps, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn rigid_rotation_degenerates_to_translation() {
        let f = BreakMap::new(1.0, 0.0, 0.25).unwrap();
        assert!((f.eval_lift(0.5) - 0.75).abs() < 1e-16);
        assert_eq!(f.iterate(0.0, 4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let j = f.eval_jet(0.3, Side::Right);
        assert_eq!((j.d1, j.d2, j.d3), (1.0, 0.0, 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BreakMap::new(0.0, 0.0, 0.1).is_err());
        assert!(BreakMap::new(-1.0, 0.0, 0.1).is_err());
        assert!(BreakMap::new(2.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn break_size_is_c() {
        for &(c, eps) in &[(2.0, 0.0), (E, 1.0), (0.3, -0.7), (2.0, 0.5)] {
            let f = BreakMap::new(c, eps, 0.3).unwrap();
            let left = f.eval_jet(1.0, Side::Left).d1;
            let right = f.eval_jet(0.0, Side::Right).d1;
            assert!((left / right / c - 1.0).abs() < 1e-14, "c={c} eps={eps}");
        }
    }

    #[test]
    fn schwarzian_is_constant() {
        let f = BreakMap::new(E, 1.0, 0.1).unwrap();
        for &x in &[0.01, 0.37, 0.5, 0.99] {
            let s = f.eval_jet(x, Side::Right).schwarzian();
            assert!((s + 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn break_point_value_is_delta() {
        let f = BreakMap::new(2.0, 0.0, 0.3).unwrap();
        assert_eq!(f.eval_lift(0.0), 0.3);
        let orbit = f.iterate(0.0, 2);
        assert_eq!(orbit[1], 0.3);
        // closed form with s = sqrt(2), t = 1 - s
        let s = 2f64.sqrt();
        let expected = 0.3 + 0.3 / (s + (1.0 - s) * 0.3);
        assert!((orbit[2] - expected).abs() < 1e-15);
    }

    #[test]
    fn inverse_undoes_step() {
        let f = BreakMap::new(E, 1.0, 0.61).unwrap();
        for &x in &[0.0, 0.2, 0.5, 0.999, 3.4] {
            let p = CirclePoint::from_lift(x);
            let back = f.inverse(f.step(p));
            assert!((back.lift() - x).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn advance_matches_endpoint_difference() {
        let f = BreakMap::new(2.0, 0.5, 0.41).unwrap();
        let a = CirclePoint::from_lift(0.3);
        let (img, len) = f.advance(a, 0.2);
        let direct = f.eval_lift(0.5) - f.eval_lift(0.3);
        assert!((len - direct).abs() < 1e-15);
        assert!((img.lift() - f.eval_lift(0.3)).abs() < 1e-15);
        let (_, tiny) = f.advance(a, 1e-12);
        let d1 = f.eval_jet(0.3, Side::Right).d1;
        assert!((tiny / 1e-12 / d1 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn iterate_jet_multiplies_derivatives() {
        let f = BreakMap::new(2.0, 0.5, 0.38).unwrap();
        let x = CirclePoint::from_lift(0.123);
        let j = f.iterate_jet(x, 7, Side::Right).unwrap();
        let orbit = f.iterate(0.123, 7);
        let prod: f64 = orbit[..7]
            .iter()
            .map(|&y| f.eval_jet(y, Side::Right).d1)
            .product();
        assert!((j.d1 / prod - 1.0).abs() < 1e-13);
        assert!((j.value - orbit[7]).abs() < 1e-14);
        let one = f.iterate_jet(x, 1, Side::Right).unwrap();
        let direct = f.eval_jet(0.123, Side::Right);
        assert!((one.d3 - direct.d3).abs() < 1e-14 * direct.d3.abs());
    }

    #[test]
    fn iterate_jet_reports_collisions() {
        let f = BreakMap::new(1.0, 0.0, 0.5).unwrap();
        let r = f.iterate_jet(CirclePoint::origin(), 3, Side::Right);
        assert_eq!(r, Err(LabError::BreakCollision { step: 2 }));
    }
}
