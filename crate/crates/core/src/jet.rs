use serde::Serialize;

use crate::real::Real;

/// Value and first three derivatives of a map at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Jet3<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
    pub d3: T,
}

impl<T: Real> Jet3<T> {
    pub fn new(value: T, d1: T, d2: T, d3: T) -> Self {
        Jet3 { value, d1, d2, d3 }
    }

    /// Jet of the identity at `x`.
    pub fn identity(x: T) -> Self {
        Jet3::new(x, T::one(), T::zero(), T::zero())
    }

    /// Jet of `outer ∘ inner`; `outer` must be evaluated at `inner.value`.
    pub fn compose(outer: Jet3<T>, inner: Jet3<T>) -> Jet3<T> {
        let g1 = inner.d1;
        let g2 = inner.d2;
        let g1sq = g1 * g1;
        Jet3 {
            value: outer.value,
            d1: outer.d1 * g1,
            d2: outer.d2 * g1sq + outer.d1 * g2,
            d3: outer.d3 * g1sq * g1
                + T::cst(3.0) * outer.d2 * g1 * g2
                + outer.d1 * inner.d3,
        }
    }

    /// Jet of `z ↦ (self(z) + shift) * scale` composed with `z ↦ z * pre`.
    pub fn rescale(self, pre: T, shift: T, scale: T) -> Jet3<T> {
        let k1 = scale * pre;
        let k2 = k1 * pre;
        Jet3 {
            value: (self.value + shift) * scale,
            d1: self.d1 * k1,
            d2: self.d2 * k2,
            d3: self.d3 * k2 * pre,
        }
    }

    /// `f'''/f' - 3/2 (f''/f')^2`.
    pub fn schwarzian(&self) -> T {
        let r = self.d2 / self.d1;
        self.d3 / self.d1 - T::cst(1.5) * r * r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_jet(x: f64) -> Jet3<f64> {
        let e = x.exp();
        Jet3::new(e, e, e, e)
    }

    #[test]
    fn composition_matches_closed_form() {
        // exp(x^2) at x = 0.7
        let x = 0.7f64;
        let inner = Jet3::new(x * x, 2.0 * x, 2.0, 0.0);
        let j = Jet3::compose(exp_jet(inner.value), inner);
        let e = (x * x).exp();
        assert!((j.d1 - 2.0 * x * e).abs() < 1e-14);
        assert!((j.d2 - (2.0 + 4.0 * x * x) * e).abs() < 1e-13);
        assert!((j.d3 - (12.0 * x + 8.0 * x * x * x) * e).abs() < 1e-13);
    }

    #[test]
    fn schwarzian_of_exponential_and_mobius() {
        assert!((exp_jet(0.3).schwarzian() + 0.5).abs() < 1e-15);
        // z/(1+z) at z = 0.4: d1 = w^-2, d2 = -2 w^-3, d3 = 6 w^-4
        let w = 1.4f64;
        let m = Jet3::new(0.4 / w, w.powi(-2), -2.0 * w.powi(-3), 6.0 * w.powi(-4));
        assert!(m.schwarzian().abs() < 1e-14);
    }

    #[test]
    fn rescale_is_affine_conjugation() {
        let j = Jet3::new(1.0f64, 2.0, 3.0, 4.0);
        let r = j.rescale(-0.5, 1.0, 2.0);
        assert_eq!(r.value, 4.0);
        assert_eq!(r.d1, -2.0);
        assert_eq!(r.d2, 1.5);
        assert_eq!(r.d3, -1.0);
    }
}
