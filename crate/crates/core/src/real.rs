//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All map evaluations, orbit sweeps and fits are generic over [`Real`], so
//! the same code runs in binary64 and in the quad-double type [`crate::Qd`].

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_traits::Num;

/// Floating point scalar used by the laboratory.
///
/// This is deliberately narrower than [`num_traits::Float`]: only the
/// elementary functions the break-map family needs are required, and every
/// implementation must provide them at full working precision.
pub trait Real:
    Num
    + Copy
    + PartialOrd
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Significant decimal digits carried by the type.
    const DIGITS: u32;

    /// Unit roundoff `u`.
    fn unit_roundoff() -> Self;

    /// Converts an `f64` literal. Exact for every implementation.
    fn cst(x: f64) -> Self;

    fn from_int(n: i64) -> Self;

    /// Nearest `f64`.
    fn as_f64(self) -> f64;

    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln_1p(self) -> Self;
    fn sqrt(self) -> Self;
    fn sinh(self) -> Self;
    fn abs(self) -> Self;
    fn floor(self) -> Self;
    fn is_finite(self) -> bool;

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn signum(self) -> Self {
        if self > Self::zero() {
            Self::one()
        } else if self < Self::zero() {
            -Self::one()
        } else {
            Self::zero()
        }
    }

    /// `ln(sinh(z)/z)`, accurate relative to the result for small `|z|`.
    fn ln_sinhc(self) -> Self {
        let z = self.abs();
        if z == Self::zero() {
            return Self::zero();
        }
        if z > Self::one() {
            return (z.sinh() / z).ln();
        }
        // sinh(z)/z - 1 = sum_{k>=1} z^{2k} / (2k+1)!
        let z2 = z * z;
        let mut term = Self::one();
        let mut sum = Self::zero();
        let eps = Self::unit_roundoff();
        let mut k = 1i64;
        loop {
            term = term * z2 / Self::from_int((2 * k) * (2 * k + 1));
            sum += term;
            if term <= eps * sum || k > 200 {
                break;
            }
            k += 1;
        }
        sum.ln_1p()
    }
}

macro_rules! impl_real_for_primitive {
    ($t:ty, $digits:expr) => {
        impl Real for $t {
            const DIGITS: u32 = $digits;

            fn unit_roundoff() -> Self {
                <$t>::EPSILON / 2.0
            }
            fn cst(x: f64) -> Self {
                x as $t
            }
            fn from_int(n: i64) -> Self {
                n as $t
            }
            fn as_f64(self) -> f64 {
                self as f64
            }
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            fn exp_m1(self) -> Self {
                <$t>::exp_m1(self)
            }
            fn ln_1p(self) -> Self {
                <$t>::ln_1p(self)
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn sinh(self) -> Self {
                <$t>::sinh(self)
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

impl_real_for_primitive!(f32, 6);
impl_real_for_primitive!(f64, 15);

/// Least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination. Defined as 1 when `y` is constant.
    pub r2: f64,
}

/// Ordinary least squares on paired samples. `None` when fewer than two
/// points are given or all `x` coincide.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r2 = if syy <= 0.0 { 1.0 } else { 1.0 - sse / syy };
    Some(LineFit {
        slope,
        intercept,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_sinhc_matches_direct_formula() {
        for &z in &[1e-3f64, 0.1, 0.5, 0.99, 1.5, -0.3] {
            let direct = (z.sinh() / z).ln();
            assert!((z.ln_sinhc() - direct).abs() < 1e-14 * direct.abs() + 1e-15);
        }
        // Leading term z^2/6 dominates for tiny arguments.
        let z = 1e-6f64;
        assert!((z.ln_sinhc() / (z * z / 6.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        assert_eq!(Real::powi(2.0f64, -3), 0.125);
        assert_eq!(Real::powi(3.0f64, 0), 1.0);
    }

    #[test]
    fn line_fit_recovers_exact_line_and_flat_data() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-14);
        assert!((fit.r2 - 1.0).abs() < 1e-14);
        let flat = fit_line(&xs, &[3.0; 4]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.r2, 1.0);
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }
}
