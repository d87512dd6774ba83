//! Renormalization pairs `(f_n, g_n)` and the fractional-linear family.
//!
//! In the coordinate `z` with `z(p) = 0` and `z(f^{q_{n-1}} p) = -1` the first
//! return map to `[f^{q_{n-1}} p .. f^{q_n} p]` has the two branches
//! `f_n = A^{-1} f^{q_n} A` on `[-1, 0]` and `g_n = A^{-1} f^{q_{n-1}} A` on
//! `[0, α_n]`, where `A(z) = -d_{n-1} z` and `d_k = F^{q_k}(0) - p_k`.

use serde::Serialize;

use crate::circle::{BreakMap, CircleMap, CirclePoint, Side};
use crate::error::{LabError, Result};
use crate::jet::Jet3;
use crate::partition::return_point;
use crate::real::Real;
use crate::rotation::{closest_returns, ContinuedFraction};

/// The two rescaled return branches at level `n`.
#[derive(Debug, Clone)]
pub struct RenormPair<T> {
    pub level: usize,
    pub alpha: T,
    /// `c^{(-1)^n}`.
    pub c_n: T,
    map: BreakMap<T>,
    p_prev: u64,
    q_prev: u64,
    p_cur: u64,
    q_cur: u64,
    d_prev: T,
    d_cur: T,
    /// `A'(z) = -d_{n-1}`.
    scale: T,
}

/// Circle point of `x` near `0` together with the side that keeps the
/// evaluation on the smooth piece containing `x`.
fn point_near_break<T: Real>(x: T, at_zero: Side) -> (CirclePoint<T>, Side) {
    if x > T::zero() {
        (CirclePoint::from_lift(x), Side::Right)
    } else if x < T::zero() {
        let pt = CirclePoint::new(-1, T::one() + x);
        let side = if pt.frac == T::zero() { Side::Left } else { Side::Right };
        (pt, side)
    } else {
        (CirclePoint::origin(), at_zero)
    }
}

impl<T: Real> RenormPair<T> {
    pub fn map(&self) -> &BreakMap<T> {
        &self.map
    }

    /// `(p_{n-1}, q_{n-1}, p_n, q_n)`.
    pub fn convergents(&self) -> (u64, u64, u64, u64) {
        (self.p_prev, self.q_prev, self.p_cur, self.q_cur)
    }

    /// Side of `0` from which `A z` approaches the break as `z ↑ 0`.
    fn f_side(&self) -> Side {
        if self.d_prev > T::zero() {
            Side::Right
        } else {
            Side::Left
        }
    }

    fn g_side(&self) -> Side {
        match self.f_side() {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }

    /// `(F^q(x) - p)/A'` for `x = A z` between `0` and the break, computed
    /// from the length of `F^q[0 .. x]` so that tiny `z` keep full accuracy.
    fn branch_value(&self, z: T, q: u64, d_ret: T) -> T {
        let x = self.scale * z;
        if x == T::zero() {
            return d_ret / self.scale;
        }
        let len = x.abs();
        let (start, sign) = if x > T::zero() {
            (CirclePoint::origin(), T::one())
        } else {
            (CirclePoint::new(-1, T::one() + x), -T::one())
        };
        let (mut pt, mut l) = (start, len);
        for _ in 0..q {
            (pt, l) = self.map.advance(pt, l);
        }
        (d_ret + sign * l) / self.scale
    }

    fn branch_jet(&self, z: T, q: u64, d_ret: T, at_zero: Side) -> Result<Jet3<T>> {
        let (pt, side) = point_near_break(self.scale * z, at_zero);
        let jet = self.map.iterate_jet(pt, q as usize, side)?;
        let mut out = jet.rescale(self.scale, T::zero(), T::one() / self.scale);
        out.value = self.branch_value(z, q, d_ret);
        Ok(out)
    }

    /// `f_n(z)`, `z ∈ [-1, 0]`.
    pub fn f(&self, z: T) -> T {
        self.branch_value(z, self.q_cur, self.d_cur)
    }

    /// `g_n(z)`, `z ∈ [0, α_n]`.
    pub fn g(&self, z: T) -> T {
        self.branch_value(z, self.q_prev, self.d_prev)
    }

    pub fn f_jet(&self, z: T) -> Result<Jet3<T>> {
        self.branch_jet(z, self.q_cur, self.d_cur, self.f_side())
    }

    pub fn g_jet(&self, z: T) -> Result<Jet3<T>> {
        self.branch_jet(z, self.q_prev, self.d_prev, self.g_side())
    }

    /// `[g'(0)/f'(0)]·[f'(-1)/g'(α_n)]`. Each factor is a right-over-left
    /// derivative ratio in `z`, so the product is the total break of
    /// `f^{q_n + q_{n-1}}` seen through `A`; `A` reverses orientation when
    /// `n` is odd, and the product is `1/c_n`.
    pub fn break_product(&self) -> Result<T> {
        let f0 = self.f_jet(T::zero())?.d1;
        let g0 = self.g_jet(T::zero())?.d1;
        let fm1 = self.f_jet(-T::one())?.d1;
        let ga = self.g_jet(self.alpha)?.d1;
        Ok((g0 / f0) * (fm1 / ga))
    }

    /// `|c_n · break_product - 1|`.
    pub fn break_product_residual(&self) -> Result<T> {
        Ok((self.c_n * self.break_product()? - T::one()).abs())
    }
}

/// The pair `(f_n, g_n)` of `map` at level `n ≥ 1`.
pub fn renormalize<T: Real>(
    map: &BreakMap<T>,
    cf: &ContinuedFraction<T>,
    n: usize,
) -> Result<RenormPair<T>> {
    if n == 0 || cf.depth() < n {
        return Err(LabError::InvalidDepth {
            requested: n,
            available: cf.depth(),
        });
    }
    let n_i = n as i64;
    let (p_prev, q_prev) = (cf.p(n_i - 1), cf.q(n_i - 1));
    let (p_cur, q_cur) = (cf.p(n_i), cf.q(n_i));
    let d_prev = return_point(map, q_prev, n - 1)?.offset_from(p_prev as i64);
    let d_cur = return_point(map, q_cur, n)?.offset_from(p_cur as i64);
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
    let c_n = if n.is_multiple_of(2) {
        map.c()
    } else {
        T::one() / map.c()
    };
    Ok(RenormPair {
        level: n,
        alpha: -d_cur / d_prev,
        c_n,
        map: *map,
        p_prev,
        q_prev,
        p_cur,
        q_cur,
        d_prev,
        d_cur,
        scale: -d_prev,
    })
}

/// `z ↦ (m00 z + m01)/(m10 z + m11)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MobiusMap<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> MobiusMap<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        MobiusMap { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        MobiusMap::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn apply(&self, z: T) -> T {
        (self.m[0][0] * z + self.m[0][1]) / (self.m[1][0] * z + self.m[1][1])
    }

    pub fn derivative(&self, z: T) -> T {
        let w = self.m[1][0] * z + self.m[1][1];
        self.det() / (w * w)
    }

    pub fn second_derivative(&self, z: T) -> T {
        let w = self.m[1][0] * z + self.m[1][1];
        T::cst(-2.0) * self.det() * self.m[1][0] / (w * w * w)
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Matrix product; acts as `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap<T>) -> MobiusMap<T> {
        let (a, b) = (&self.m, &other.m);
        let mut out = [[T::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        MobiusMap { m: out }
    }

    pub fn inverse(&self) -> MobiusMap<T> {
        let m = &self.m;
        MobiusMap::new(m[1][1], -m[0][1], -m[1][0], m[0][0])
    }

    pub fn scaled(&self, k: T) -> MobiusMap<T> {
        let m = &self.m;
        MobiusMap::new(k * m[0][0], k * m[0][1], k * m[1][0], k * m[1][1])
    }

    pub fn power(&self, k: u64) -> MobiusMap<T> {
        (0..k).fold(MobiusMap::identity(), |acc, _| acc.compose(self))
    }

    fn frobenius(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    /// Representative with unit Frobenius norm and non-negative trace.
    pub fn normalized(&self) -> MobiusMap<T> {
        let tr = self.m[0][0] + self.m[1][1];
        let k = T::one() / self.frobenius();
        self.scaled(if tr < T::zero() { -k } else { k })
    }

    /// Representative with `m11 = 1`.
    fn unit_corner(&self) -> MobiusMap<T> {
        self.scaled(T::one() / self.m[1][1])
    }

    /// Distance between the projective classes of two matrices.
    pub fn projective_distance(&self, other: &MobiusMap<T>) -> T {
        let (x, y) = (self.scaled(T::one() / self.frobenius()), other.scaled(T::one() / other.frobenius()));
        let mut plus = T::zero();
        let mut minus = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let (p, q) = (x.m[i][j], y.m[i][j]);
                plus += (p - q) * (p - q);
                minus += (p + q) * (p + q);
            }
        }
        plus.min(minus).sqrt()
    }
}

/// Parameters `(α, v, c)` of the pair
/// `F(z) = (α + √c z)/(1 - v z)`, `G(z) = α(z - √c)/(α√c + z(1 + v - √c))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MobiusPairParams<T> {
    pub alpha: T,
    pub v: T,
    pub c: T,
}

impl<T: Real> MobiusPairParams<T> {
    pub fn new(alpha: T, v: T, c: T) -> Self {
        MobiusPairParams { alpha, v, c }
    }

    pub fn f_map(&self) -> MobiusMap<T> {
        MobiusMap::new(self.c.sqrt(), self.alpha, -self.v, T::one())
    }

    pub fn g_map(&self) -> MobiusMap<T> {
        let r = self.c.sqrt();
        MobiusMap::new(
            self.alpha,
            -self.alpha * r,
            T::one() + self.v - r,
            self.alpha * r,
        )
    }

    pub fn f(&self, z: T) -> T {
        self.f_map().apply(z)
    }

    pub fn g(&self, z: T) -> T {
        self.g_map().apply(z)
    }

    /// `(α - √c)/(1 + v)`, the common value `F(-1) = G(α)`.
    pub fn junction(&self) -> T {
        (self.alpha - self.c.sqrt()) / (T::one() + self.v)
    }

    pub fn in_uc(&self) -> bool {
        in_uc(self.alpha, self.v, self.c)
    }

    /// Both branches are increasing homeomorphisms onto their images.
    pub fn is_homeomorphism_pair(&self) -> bool {
        let r = self.c.sqrt();
        self.alpha > T::zero()
            && T::one() + self.v > T::zero()
            && self.alpha * r > T::zero()
            && self.f_map().det() > T::zero()
            && self.g_map().det() > T::zero()
            && r > T::zero()
    }

    /// The circle map built from the pair.
    pub fn circle_map(&self) -> PairCircleMap<T> {
        PairCircleMap {
            params: *self,
            f: self.f_map(),
            g: self.g_map(),
            period: T::one() + self.alpha,
        }
    }
}

/// Membership in `U_c = [0, √c] × [(√c - 1)/2, √c - 1]` (the `v`-interval
/// reversed when `c < 1`).
pub fn in_uc<T: Real>(alpha: T, v: T, c: T) -> bool {
    let r = c.sqrt();
    let (v1, v2) = ((r - T::one()) / T::cst(2.0), r - T::one());
    let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
    alpha >= T::zero() && alpha <= r && v >= lo && v <= hi
}

/// `F` on `[-1, 0)` and `G` on `[0, α)` glued into a circle map of
/// `[-1, α)`, rescaled to unit length. The break `z = 0` is the base point.
#[derive(Debug, Clone, Copy)]
pub struct PairCircleMap<T> {
    pub params: MobiusPairParams<T>,
    f: MobiusMap<T>,
    g: MobiusMap<T>,
    period: T,
}

impl<T: Real> PairCircleMap<T> {
    fn to_z(&self, u: T) -> T {
        u * self.period - T::one()
    }

    fn to_u(&self, z: T) -> T {
        (z + T::one()) / self.period
    }
}

impl<T: Real> CircleMap<T> for PairCircleMap<T> {
    fn step(&self, x: CirclePoint<T>) -> CirclePoint<T> {
        let z = self.to_z(x.frac);
        if z < T::zero() {
            CirclePoint::new(x.turns, self.to_u(self.f.apply(z)))
        } else {
            CirclePoint::new(x.turns + 1, self.to_u(self.g.apply(z)))
        }
    }

    fn base_point(&self) -> CirclePoint<T> {
        CirclePoint::new(0, self.to_u(T::zero()))
    }
}

/// Quotients `[b_1 - 1, b_2, …]` of the pair, where `[b_1, b_2, …]` is the
/// expansion of the rotation number of its circle map. For a rigid pair
/// this is the expansion of `α`.
pub fn pair_rotation_quotients<T: Real>(params: &MobiusPairParams<T>, depth: usize) -> Result<Vec<u64>> {
    let data = closest_returns(&params.circle_map(), depth)?;
    let mut q = data.quotients;
    if q[0] < 2 {
        return Err(LabError::InvalidParameter(
            "pair rotation number exceeds one".into(),
        ));
    }
    q[0] -= 1;
    Ok(q)
}

/// `α` in `bracket` such that the pair quotients start with `prefix`, for
/// fixed `v` and `c`.
pub fn tune_pair_alpha<T: Real>(v: T, c: T, prefix: &[u64], bracket: (T, T)) -> Result<MobiusPairParams<T>> {
    if prefix.is_empty() || prefix.contains(&0) {
        return Err(LabError::InvalidParameter("prefix quotients must be positive".into()));
    }
    let mut circle_prefix = prefix.to_vec();
    circle_prefix[0] += 1;
    let (alpha, _) = crate::rotation::bisect_parameter(
        |a: T| MobiusPairParams::new(a, v, c).circle_map(),
        &circle_prefix,
        bracket,
        400,
    )?;
    let params = MobiusPairParams::new(alpha, v, c);
    if pair_rotation_quotients(&params, prefix.len())? != prefix {
        return Err(LabError::CfMismatch { index: prefix.len() });
    }
    Ok(params)
}

/// One renormalization step inside the family: the first return of the
/// pair to `[F(0) .. G(0)]`, rescaled by `z' = -z/α`. `a` is the leading
/// quotient of the pair.
pub fn mobius_renorm_step<T: Real>(params: &MobiusPairParams<T>, a: u64) -> Result<MobiusPairParams<T>> {
    mobius_renorm_step_matrices(&params.f_map(), &params.g_map(), params.c, a)
}

/// [`mobius_renorm_step`] on explicit (unnormalized) matrices.
pub fn mobius_renorm_step_matrices<T: Real>(
    f: &MobiusMap<T>,
    g: &MobiusMap<T>,
    c: T,
    a: u64,
) -> Result<MobiusPairParams<T>> {
    if a == 0 {
        return Err(LabError::InvalidParameter("partial quotient must be positive".into()));
    }
    let alpha = f.apply(T::zero());
    let s = MobiusMap::new(-T::one(), T::zero(), T::zero(), alpha);
    let s_inv = s.inverse();
    let f_new = s.compose(&f.power(a)).compose(g).compose(&s_inv).unit_corner();
    let g_new = s.compose(f).compose(&s_inv).unit_corner();
    let c_new = T::one() / c;
    let next = MobiusPairParams::new(f_new.m[0][1], -f_new.m[1][0], c_new);
    let tol = T::cst(1e-10);
    let c_read = f_new.m[0][0] * f_new.m[0][0];
    let c_residual = (c_read / c_new - T::one()).abs();
    let g_residual = g_new.projective_distance(&next.g_map());
    let residual = c_residual.max(g_residual);
    if !(residual < tol) {
        return Err(LabError::OutOfFamily {
            residual: residual.as_f64(),
        });
    }
    if !next.is_homeomorphism_pair() {
        return Err(LabError::InvalidParameter(
            "renormalized pair is not a homeomorphism pair".into(),
        ));
    }
    Ok(next)
}

/// Least-squares fit of a return branch by `F_{α,v,c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult<T> {
    pub alpha: T,
    pub v: T,
    pub c: T,
    pub dist_c0: T,
    /// Largest of the sup-distances of values, first and second derivatives.
    pub dist_c2: T,
    pub in_uc: bool,
}

impl<T: Real> FitResult<T> {
    pub fn params(&self) -> MobiusPairParams<T> {
        MobiusPairParams::new(self.alpha, self.v, self.c)
    }
}

const FIT_NODES: usize = 33;
const DIST_GRID: usize = 257;

/// Fits `v` in `F_{α_n,v,c_n}` to `f_n` on Chebyshev nodes of `[-1, 0]`.
pub fn fit_fractional_linear<T: Real>(pair: &RenormPair<T>) -> Result<FitResult<T>> {
    let nodes = chebyshev_nodes::<T>();
    let values: Vec<T> = nodes.iter().map(|&z| pair.f(z)).collect();
    fit_branch(pair.alpha, pair.c_n, &nodes, &values)
        .and_then(|v| distances(pair, MobiusPairParams::new(pair.alpha, v, pair.c_n)))
}

/// Least-squares `v` for an arbitrary branch on `[-1, 0]` with `F(0) = α`.
pub fn fit_v<T: Real>(alpha: T, c: T, branch: impl Fn(T) -> T) -> Result<T> {
    let nodes = chebyshev_nodes::<T>();
    let values: Vec<T> = nodes.iter().map(|&z| branch(z)).collect();
    fit_branch(alpha, c, &nodes, &values)
}

fn chebyshev_nodes<T: Real>() -> Vec<T> {
    (0..FIT_NODES)
        .map(|j| {
            let th = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * FIT_NODES) as f64;
            T::cst(0.5 * th.cos() - 0.5)
        })
        .collect()
}

/// Gauss-Newton for `v` started from the linearized problem
/// `f(z)(1 - v z) = α + √c z`.
fn fit_branch<T: Real>(alpha: T, c: T, nodes: &[T], values: &[T]) -> Result<T> {
    let r = c.sqrt();
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&z, &f) in nodes.iter().zip(values) {
        let basis = -z * f;
        num += basis * (alpha + r * z - f);
        den += basis * basis;
    }
    if den == T::zero() {
        return Err(LabError::DegenerateFit);
    }
    let mut v = num / den;
    for _ in 0..50 {
        let (mut jr, mut jj) = (T::zero(), T::zero());
        for (&z, &f) in nodes.iter().zip(values) {
            let w = T::one() - v * z;
            let model = (alpha + r * z) / w;
            let dv = z * model / w;
            jr += dv * (f - model);
            jj += dv * dv;
        }
        if jj == T::zero() {
            return Err(LabError::DegenerateFit);
        }
        let step = jr / jj;
        v += step;
        if !v.is_finite() {
            return Err(LabError::DegenerateFit);
        }
        if step.abs() <= T::cst(4.0) * T::unit_roundoff() * (T::one() + v.abs()) {
            break;
        }
    }
    Ok(v)
}

fn distances<T: Real>(pair: &RenormPair<T>, params: MobiusPairParams<T>) -> Result<FitResult<T>> {
    let model = params.f_map();
    let (mut c0, mut c2) = (T::zero(), T::zero());
    for i in 0..DIST_GRID {
        let z = -T::from_int(i as i64) / T::from_int(DIST_GRID as i64 - 1);
        let jet = pair.f_jet(z)?;
        let e0 = (jet.value - model.apply(z)).abs();
        let e1 = (jet.d1 - model.derivative(z)).abs();
        let e2 = (jet.d2 - model.second_derivative(z)).abs();
        c0 = c0.max(e0);
        c2 = c2.max(e0.max(e1).max(e2));
    }
    Ok(FitResult {
        alpha: params.alpha,
        v: params.v,
        c: params.c,
        dist_c0: c0,
        dist_c2: c2,
        in_uc: params.in_uc(),
    })
}

/// Outcome of the conjugacy probe between two pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeResult<T> {
    pub conjugate: bool,
    pub matrix: Option<MobiusMap<T>>,
    pub residual: T,
    /// Minimizing parameter of `C = [[1, 0], [u, u + 1]]`.
    pub u: T,
}

/// `C = [[1, 0], [u, u + 1]]` fixes `0` and `-1`.
fn probe_matrix<T: Real>(u: T) -> MobiusMap<T> {
    MobiusMap::new(T::one(), T::zero(), u, u + T::one())
}

/// Searches for `C` fixing `0` and `-1` with `C A_1 C^{-1} ∼ A_2` and
/// `C B_1 C^{-1} ∼ B_2`.
pub fn mobius_conjugacy_probe<T: Real>(t1: &MobiusPairParams<T>, t2: &MobiusPairParams<T>) -> ProbeResult<T> {
    mobius_conjugacy_probe_matrices(
        (&t1.f_map(), &t1.g_map()),
        (&t2.f_map(), &t2.g_map()),
    )
}

pub fn mobius_conjugacy_probe_matrices<T: Real>(
    first: (&MobiusMap<T>, &MobiusMap<T>),
    second: (&MobiusMap<T>, &MobiusMap<T>),
) -> ProbeResult<T> {
    // u = e^s - 1 keeps det C = u + 1 positive.
    let residual = |s: T| {
        let c = probe_matrix(s.exp_m1());
        let ci = c.inverse();
        let da = c.compose(first.0).compose(&ci).projective_distance(second.0);
        let db = c.compose(first.1).compose(&ci).projective_distance(second.1);
        da.max(db)
    };
    let step = T::cst(0.05);
    let (mut best_s, mut best) = (T::zero(), residual(T::zero()));
    for i in -200i64..=200 {
        let s = T::from_int(i) * step;
        let r = residual(s);
        if r < best {
            best = r;
            best_s = s;
        }
    }
    // Golden-section refinement around the best grid point.
    let (mut lo, mut hi) = (best_s - step, best_s + step);
    let g = T::cst(0.5 * (5f64.sqrt() - 1.0));
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut r1, mut r2) = (residual(x1), residual(x2));
    for _ in 0..200 {
        if r1 < r2 {
            hi = x2;
            x2 = x1;
            r2 = r1;
            x1 = hi - g * (hi - lo);
            r1 = residual(x1);
        } else {
            lo = x1;
            x1 = x2;
            r1 = r2;
            x2 = lo + g * (hi - lo);
            r2 = residual(x2);
        }
        if hi - lo <= T::unit_roundoff() * T::cst(4.0) {
            break;
        }
    }
    for (s, r) in [(x1, r1), (x2, r2)] {
        if r < best {
            best = r;
            best_s = s;
        }
    }
    let conjugate = best < T::cst(1e-10);
    let u = best_s.exp_m1();
    ProbeResult {
        conjugate,
        matrix: conjugate.then(|| probe_matrix(u)),
        residual: best,
        u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::{tune_delta, RotationTarget};

    fn golden_rigid() -> (BreakMap<f64>, ContinuedFraction<f64>) {
        let cf = ContinuedFraction::golden(40);
        let map = BreakMap::new(1.0, 0.0, cf.value()).unwrap();
        (map, cf)
    }

    #[test]
    fn rigid_branches_are_translations() {
        let (map, cf) = golden_rigid();
        for n in 2..8 {
            let pair = renormalize(&map, &cf, n).unwrap();
            for z in [-1.0, -0.7, -0.2, 0.0] {
                let j = pair.f_jet(z).unwrap();
                assert!((j.value - (z + pair.alpha)).abs() < 1e-12);
                assert!((j.d1 - 1.0).abs() < 1e-12);
                assert!(j.d2.abs() < 1e-12);
            }
            assert!((pair.g(0.0) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn family_endpoint_identities() {
        let p = MobiusPairParams::new(0.4, 0.2, 2.0);
        assert!((p.f(0.0) - 0.4).abs() < 1e-15);
        assert!((p.g(0.0) + 1.0).abs() < 1e-15);
        assert!((p.f(-1.0) - p.junction()).abs() < 1e-15);
        assert!((p.g(0.4) - p.junction()).abs() < 1e-15);
    }

    #[test]
    fn rigid_step_is_gauss_map() {
        let alpha = 0.3f64;
        let p = MobiusPairParams::new(alpha, 0.0, 1.0);
        let next = mobius_renorm_step(&p, 3).unwrap();
        assert!((next.alpha - (1.0 / alpha - 3.0)).abs() < 1e-12);
        assert!(next.v.abs() < 1e-12);
    }

    #[test]
    fn step_is_projectively_invariant() {
        let p = MobiusPairParams::new(0.5, 0.2, 1.5);
        let a = mobius_renorm_step(&p, 1).unwrap();
        let b = mobius_renorm_step_matrices(&p.f_map().scaled(3.7), &p.g_map().scaled(3.7), p.c, 1).unwrap();
        assert!((a.alpha - b.alpha).abs() < 1e-14);
        assert!((a.v - b.v).abs() < 1e-14);
    }

    #[test]
    fn self_probe_is_identity() {
        let p = MobiusPairParams::new(0.5, 0.3, 2.0);
        let r = mobius_conjugacy_probe(&p, &p);
        assert!(r.conjugate);
        assert!(r.residual < 1e-12);
        assert_eq!(r.u, 0.0);
    }

    #[test]
    fn fit_recovers_family_member() {
        let p = MobiusPairParams::new(0.4, 0.2, std::f64::consts::E);
        let v = fit_v(0.4, p.c, |z| p.f(z)).unwrap();
        assert!((v - 0.2).abs() < 1e-10);
        let v = fit_v(0.3, 1.0, |z| z + 0.3).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn break_product_alternates_with_orientation() {
        let c = std::f64::consts::E;
        let target = RotationTarget::golden();
        let delta = tune_delta(c, 1.0, &target, 12).unwrap();
        let map = BreakMap::new(c, 1.0, delta).unwrap();
        let cf = target.cf(30).unwrap();
        for n in 3..=6 {
            let pair = renormalize(&map, &cf, n).unwrap();
            let expected = if n % 2 == 1 { c } else { 1.0 / c };
            assert!((pair.break_product().unwrap() / expected - 1.0).abs() < 1e-10);
            assert!(pair.break_product_residual().unwrap() < 1e-10);
        }
    }
}
