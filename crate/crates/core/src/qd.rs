//! Quad-double arithmetic: an unevaluated sum of four binary64 words giving
//! roughly 62 significant decimal digits.
//!
//! Sums and products are formed exactly as floating-point expansions
//! (two-sum / two-product error-free transformations) and then compressed back
//! to four words. Elementary functions use argument reduction plus Taylor
//! series (`exp`) or Newton refinement of a binary64 seed (`ln`, `sqrt`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{Num, One, Zero};

use crate::real::Real;

/// Quad-double number. Words are non-overlapping and ordered by decreasing
/// magnitude.
#[derive(Clone, Copy, Default)]
pub struct Qd([f64; 4]);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

/// Exact floating-point expansion, components in increasing magnitude.
struct Expansion {
    terms: [f64; 40],
    len: usize,
}

impl Expansion {
    fn new() -> Self {
        Expansion {
            terms: [0.0; 40],
            len: 0,
        }
    }

    fn grow(&mut self, b: f64) {
        if b == 0.0 {
            return;
        }
        let mut q = b;
        let mut out = 0;
        for i in 0..self.len {
            let (s, h) = two_sum(q, self.terms[i]);
            q = s;
            if h != 0.0 {
                self.terms[out] = h;
                out += 1;
            }
        }
        if q != 0.0 {
            self.terms[out] = q;
            out += 1;
        }
        self.len = out;
    }

    fn to_qd(&self) -> Qd {
        let m = self.len;
        if m == 0 {
            return Qd::ZERO;
        }
        // Shewchuk's compression: result is nonadjacent, increasing magnitude.
        let mut g = [0.0f64; 40];
        let mut bottom = m - 1;
        let mut q = self.terms[m - 1];
        for i in (0..m - 1).rev() {
            let (qn, r) = fast_two_sum(q, self.terms[i]);
            if r != 0.0 {
                g[bottom] = qn;
                bottom -= 1;
                q = r;
            } else {
                q = qn;
            }
        }
        g[bottom] = q;
        let mut h = [0.0f64; 40];
        let mut top = 0;
        for &gi in &g[bottom + 1..m] {
            let (qn, r) = fast_two_sum(gi, q);
            if r != 0.0 {
                h[top] = r;
                top += 1;
            }
            q = qn;
        }
        h[top] = q;
        let n = top + 1;
        let mut c = [0.0f64; 4];
        for (k, slot) in c.iter_mut().enumerate() {
            if k < n {
                *slot = h[n - 1 - k];
            }
        }
        if n > 4 {
            let tail: f64 = h[..n - 4].iter().sum();
            c[3] += tail;
        }
        Qd(c)
    }
}

fn sum_terms(terms: &[f64]) -> Qd {
    let mut e = Expansion::new();
    for &t in terms {
        e.grow(t);
    }
    e.to_qd()
}

fn ln2() -> Qd {
    static LN2: OnceLock<Qd> = OnceLock::new();
    *LN2.get_or_init(|| {
        // ln 2 = 2 atanh(1/3) = 2 sum_k 3^{-(2k+1)} / (2k+1)
        let ninth = Qd::ONE / Qd::from(9.0);
        let mut pow = Qd::ONE / Qd::from(3.0);
        let mut sum = Qd::ZERO;
        for k in 0..80 {
            sum += pow / Qd::from((2 * k + 1) as f64);
            pow *= ninth;
        }
        sum * Qd::from(2.0)
    })
}

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);

    /// Leading word.
    pub fn hi(self) -> f64 {
        self.0[0]
    }

    pub fn words(self) -> [f64; 4] {
        self.0
    }

    fn mul_f64(self, b: f64) -> Qd {
        let mut terms = [0.0; 8];
        for i in 0..4 {
            let (p, e) = two_prod(self.0[i], b);
            terms[2 * i] = p;
            terms[2 * i + 1] = e;
        }
        sum_terms(&terms)
    }

    fn scale_pow2(self, k: i32) -> Qd {
        let f = 2f64.powi(k);
        Qd([self.0[0] * f, self.0[1] * f, self.0[2] * f, self.0[3] * f])
    }

    fn is_negative(self) -> bool {
        self.0[0] < 0.0
    }

    /// `exp(x) - 1` for `|x| <= 0.35`, with relative accuracy near zero.
    fn expm1_reduced(x: Qd) -> Qd {
        const HALVINGS: i32 = 10;
        let r = x.scale_pow2(-HALVINGS);
        let mut term = r;
        let mut sum = r;
        let tiny = 1e-66 * r.0[0].abs();
        for k in 2..40 {
            term = term * r / Qd::from(k as f64);
            sum += term;
            if term.0[0].abs() <= tiny {
                break;
            }
        }
        // (1+s)^2 - 1 = s (2 + s)
        for _ in 0..HALVINGS {
            sum = sum * (sum + Qd::from(2.0));
        }
        sum
    }

    pub fn trunc(self) -> Qd {
        if self.is_negative() {
            -((-self).floor())
        } else {
            self.floor()
        }
    }
}

impl From<f64> for Qd {
    fn from(x: f64) -> Self {
        Qd([x, 0.0, 0.0, 0.0])
    }
}

impl Neg for Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, rhs: Qd) -> Qd {
        let a = self.0;
        let b = rhs.0;
        sum_terms(&[a[3], b[3], a[2], b[2], a[1], b[1], a[0], b[0]])
    }
}

impl Sub for Qd {
    type Output = Qd;
    fn sub(self, rhs: Qd) -> Qd {
        self + (-rhs)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, rhs: Qd) -> Qd {
        let a = self.0;
        let b = rhs.0;
        let mut terms = [0.0f64; 23];
        let mut n = 0;
        // Smallest contributions first.
        for (i, j) in [(1, 3), (2, 2), (3, 1)] {
            terms[n] = a[i] * b[j];
            n += 1;
        }
        for order in (0..=3).rev() {
            for i in 0..=order {
                let j = order - i;
                let (p, e) = two_prod(a[i], b[j]);
                terms[n] = e;
                terms[n + 1] = p;
                n += 2;
            }
        }
        sum_terms(&terms[..n])
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, rhs: Qd) -> Qd {
        let b0 = rhs.0[0];
        if b0 == 0.0 {
            return Qd::from(self.0[0] / b0);
        }
        let mut r = self;
        let mut q = [0.0f64; 5];
        for qi in q.iter_mut() {
            *qi = r.0[0] / b0;
            r -= rhs.mul_f64(*qi);
        }
        sum_terms(&[q[4], q[3], q[2], q[1], q[0]])
    }
}

impl Rem for Qd {
    type Output = Qd;
    fn rem(self, rhs: Qd) -> Qd {
        self - rhs * (self / rhs).trunc()
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Qd {
            fn $m(&mut self, rhs: Qd) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl PartialEq for Qd {
    fn eq(&self, other: &Qd) -> bool {
        (*self - *other).0[0] == 0.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<Ordering> {
        let d = (*self - *other).0[0];
        d.partial_cmp(&0.0)
    }
}

impl Zero for Qd {
    fn zero() -> Qd {
        Qd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for Qd {
    fn one() -> Qd {
        Qd::ONE
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid quad-double literal `{0}`")]
pub struct ParseQdError(String);

impl Num for Qd {
    type FromStrRadixErr = ParseQdError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Qd, ParseQdError> {
        if radix != 10 {
            return Err(ParseQdError(s.to_string()));
        }
        s.parse()
    }
}

impl FromStr for Qd {
    type Err = ParseQdError;

    fn from_str(s: &str) -> Result<Qd, ParseQdError> {
        let err = || ParseQdError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (body, 0),
        };
        let mut value = Qd::ZERO;
        let mut scale = exp;
        let mut seen_dot = false;
        let mut digits = 0;
        for ch in mant.chars() {
            match ch {
                '.' if !seen_dot => seen_dot = true,
                '0'..='9' => {
                    value = value * Qd::from(10.0) + Qd::from((ch as u8 - b'0') as f64);
                    digits += 1;
                    if seen_dot {
                        scale -= 1;
                    }
                }
                _ => return Err(err()),
            }
        }
        if digits == 0 {
            return Err(err());
        }
        let ten = Qd::from(10.0);
        if scale != 0 {
            let p = Real::powi(ten, scale.abs());
            value = if scale > 0 { value * p } else { value / p };
        }
        Ok(if neg { -value } else { value })
    }
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qd({})", self)
    }
}

impl fmt::Display for Qd {
    /// Scientific notation; `{:.N}` selects `N` digits after the point
    /// (default 40).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = *self;
        if !x.0[0].is_finite() {
            return write!(f, "{}", x.0[0]);
        }
        if x.0[0] == 0.0 {
            return write!(f, "0");
        }
        let ndig = f.precision().unwrap_or(40).min(62) + 1;
        let mut y = x.abs();
        let ten = Qd::from(10.0);
        let mut e = y.0[0].log10().floor() as i32;
        let p = Real::powi(ten, e.abs());
        y = if e >= 0 { y / p } else { y * p };
        if y >= ten {
            y /= ten;
            e += 1;
        } else if y < Qd::ONE {
            y *= ten;
            e -= 1;
        }
        let mut digits = Vec::with_capacity(ndig + 1);
        for _ in 0..=ndig {
            let d = y.0[0].floor().clamp(0.0, 9.0);
            digits.push(d as u8);
            y = (y - Qd::from(d)) * ten;
        }
        // Round half up on the extra digit.
        let extra = digits.pop().unwrap_or(0);
        if extra >= 5 {
            let mut i = digits.len();
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    digits.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::new();
        if x.is_negative() {
            s.push('-');
        }
        s.push((b'0' + digits[0]) as char);
        if digits.len() > 1 {
            s.push('.');
            for &d in &digits[1..] {
                s.push((b'0' + d) as char);
            }
        }
        write!(f, "{}e{}", s, e)
    }
}

impl Real for Qd {
    const DIGITS: u32 = 62;

    fn unit_roundoff() -> Qd {
        Qd::from(2f64.powi(-209))
    }

    fn cst(x: f64) -> Qd {
        Qd::from(x)
    }

    fn from_int(n: i64) -> Qd {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        sum_terms(&[lo, hi])
    }

    fn as_f64(self) -> f64 {
        self.0[0] + self.0[1]
    }

    fn exp(self) -> Qd {
        let x0 = self.0[0];
        if x0 > 709.0 {
            return Qd::from(f64::INFINITY);
        }
        if x0 < -745.0 {
            return Qd::ZERO;
        }
        let l2 = ln2();
        let k = (x0 / std::f64::consts::LN_2).round();
        let r = self - l2.mul_f64(k);
        (Qd::expm1_reduced(r) + Qd::ONE).scale_pow2(k as i32)
    }

    fn exp_m1(self) -> Qd {
        if self.0[0].abs() <= 0.35 {
            Qd::expm1_reduced(self)
        } else {
            self.exp() - Qd::ONE
        }
    }

    fn ln(self) -> Qd {
        let x0 = self.0[0];
        if x0 <= 0.0 {
            return Qd::from(if x0 == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if !x0.is_finite() {
            return self;
        }
        let mut y = Qd::from(x0.ln());
        for _ in 0..3 {
            y = y + self * (-y).exp() - Qd::ONE;
        }
        y
    }

    fn ln_1p(self) -> Qd {
        let x0 = self.0[0];
        if x0.abs() > 0.25 {
            return (Qd::ONE + self).ln();
        }
        if x0 == 0.0 {
            return Qd::ZERO;
        }
        let mut y = Qd::from(x0.ln_1p());
        for _ in 0..3 {
            let e = y.exp_m1();
            y -= (e - self) / (Qd::ONE + e);
        }
        y
    }

    fn sqrt(self) -> Qd {
        let x0 = self.0[0];
        if x0 <= 0.0 {
            return Qd::from(if x0 == 0.0 { 0.0 } else { f64::NAN });
        }
        let mut y = Qd::from(x0.sqrt());
        let half = Qd::from(0.5);
        for _ in 0..3 {
            y = (y + self / y) * half;
        }
        y
    }

    fn sinh(self) -> Qd {
        let e = self.exp_m1();
        (e + e / (Qd::ONE + e)) * Qd::from(0.5)
    }

    fn abs(self) -> Qd {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    fn floor(self) -> Qd {
        let c = self.0;
        let mut x = [c[0].floor(), 0.0, 0.0, 0.0];
        if x[0] == c[0] {
            x[1] = c[1].floor();
            if x[1] == c[1] {
                x[2] = c[2].floor();
                if x[2] == c[2] {
                    x[3] = c[3].floor();
                }
            }
        }
        sum_terms(&[x[3], x[2], x[1], x[0]])
    }

    fn is_finite(self) -> bool {
        self.0.iter().all(|w| w.is_finite())
    }
}
