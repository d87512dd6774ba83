//! Rotation numbers as continued fractions, read off the closest returns of
//! the orbit of the break point, and tuning of `δ` to a prescribed rotation
//! number.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::circle::{BreakMap, CircleMap, CirclePoint};
use crate::error::{LabError, Result};
use crate::real::Real;

/// Denominators are kept below this bound so that all integer arithmetic on
/// convergents stays exact.
const MAX_DENOMINATOR: u64 = 1 << 62;

/// Continued fraction `ρ = [a_1, a_2, …]` truncated at depth `N`, together
/// with the value of the discarded tail `[a_{N+1}, …]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction<T> {
    quotients: Vec<u64>,
    /// `(p_n, q_n)` for `n = -1..=N`, stored at index `n + 1`.
    convergents: Vec<(u64, u64)>,
    /// `μ_n = |q_n ρ - p_n|` for `n = -1..=N`, stored at index `n + 1`.
    measures: Vec<T>,
    value: T,
    tail: T,
}

fn convergents_of(quotients: &[u64]) -> Result<Vec<(u64, u64)>> {
    let mut out = vec![(1u64, 0u64), (0, 1)];
    for (i, &a) in quotients.iter().enumerate() {
        if a == 0 {
            return Err(LabError::InvalidParameter(format!(
                "partial quotient a_{} must be at least 1",
                i + 1
            )));
        }
        let (pm, qm) = out[out.len() - 2];
        let (pn, qn) = out[out.len() - 1];
        let next = a
            .checked_mul(qn)
            .and_then(|x| x.checked_add(qm))
            .filter(|&q| q <= MAX_DENOMINATOR)
            .map(|q| (a * pn + pm, q));
        match next {
            Some(pq) => out.push(pq),
            None => {
                return Err(LabError::InvalidDepth {
                    requested: quotients.len(),
                    available: i,
                })
            }
        }
    }
    Ok(out)
}

fn golden_tail<T: Real>() -> T {
    (T::cst(5.0).sqrt() - T::one()) / T::cst(2.0)
}

impl<T: Real> ContinuedFraction<T> {
    /// Quotients `a_1..a_N` followed by a tail with value `tail ∈ (0, 1]`.
    pub fn with_tail(quotients: Vec<u64>, tail: T) -> Result<Self> {
        if !(tail > T::zero() && tail <= T::one()) {
            return Err(LabError::InvalidParameter(format!(
                "tail value {} outside (0, 1]",
                tail
            )));
        }
        let convergents = convergents_of(&quotients)?;
        // Gauss iterates x_k = [a_k, a_{k+1}, …], computed backwards.
        let n = quotients.len();
        let mut xs = vec![T::zero(); n + 1];
        xs[n] = tail;
        for k in (0..n).rev() {
            xs[k] = T::one() / (T::from_int(quotients[k] as i64) + xs[k + 1]);
        }
        let mut measures = Vec::with_capacity(n + 2);
        let mut mu = T::one();
        measures.push(mu);
        for x in &xs {
            mu *= *x;
            measures.push(mu);
        }
        Ok(ContinuedFraction {
            value: xs[0],
            quotients,
            convergents,
            measures,
            tail,
        })
    }

    /// Finite quotient list completed by the all-ones tail.
    pub fn from_quotients(quotients: Vec<u64>) -> Result<Self> {
        Self::with_tail(quotients, golden_tail())
    }

    /// Eventually periodic expansion `[pre…, period, period, …]` to `depth`
    /// quotients, or fewer if denominators would overflow.
    pub fn from_periodic(preperiod: &[u64], period: &[u64], depth: usize) -> Result<Self> {
        if period.is_empty() || period.iter().chain(preperiod).any(|&a| a == 0) {
            return Err(LabError::InvalidParameter(
                "periodic quotients must be non-empty and at least 1".into(),
            ));
        }
        let quotient = |i: usize| {
            if i < preperiod.len() {
                preperiod[i]
            } else {
                period[(i - preperiod.len()) % period.len()]
            }
        };
        let mut quotients: Vec<u64> = (0..depth).map(quotient).collect();
        let available = match convergents_of(&quotients) {
            Ok(_) => depth,
            Err(LabError::InvalidDepth { available, .. }) => available,
            Err(e) => return Err(e),
        };
        quotients.truncate(available);
        // Tail [a_{N+1}, a_{N+2}, …] by backward recursion over a long window.
        let mut tail = T::one();
        for i in (available..available + 400).rev() {
            tail = T::one() / (T::from_int(quotient(i) as i64) + tail);
        }
        Self::with_tail(quotients, tail)
    }

    pub fn golden(depth: usize) -> Self {
        Self::from_periodic(&[], &[1], depth).expect("golden mean expansion")
    }

    pub fn silver(depth: usize) -> Self {
        Self::from_periodic(&[], &[2], depth).expect("silver mean expansion")
    }

    /// Gauss-map expansion of a real `ρ ∈ (0, 1)` to `depth` quotients.
    pub fn from_real(rho: T, depth: usize) -> Result<Self> {
        if !(rho > T::zero() && rho < T::one()) {
            return Err(LabError::InvalidParameter(format!(
                "rotation number {} outside (0, 1)",
                rho
            )));
        }
        let u = T::unit_roundoff();
        let mut quotients = Vec::with_capacity(depth);
        let (mut pm, mut qm, mut pn, mut qn) = (1u64, 0u64, 0u64, 1u64);
        let mut mu_prev = T::one();
        let mut mu = rho;
        for level in 0..depth {
            let ratio = mu_prev / mu;
            let a = ratio.floor().as_f64() as u64;
            let (p1, q1) = (a * pn + pm, a * qn + qm);
            if q1 > MAX_DENOMINATOR {
                return Err(LabError::InvalidDepth {
                    requested: depth,
                    available: level,
                });
            }
            let mu_next = (T::from_int(q1 as i64) * rho - T::from_int(p1 as i64)).abs();
            if mu_next == T::zero() {
                return Err(LabError::PeriodicOrbit { p: p1, q: q1 });
            }
            if mu_next <= T::cst(1000.0) * T::from_int(q1 as i64) * u {
                return Err(LabError::PrecisionExhausted {
                    level: level + 1,
                    gap: mu_next.as_f64(),
                });
            }
            quotients.push(a);
            (pm, qm, pn, qn) = (pn, qn, p1, q1);
            mu_prev = mu;
            mu = mu_next;
        }
        let mut cf = Self::with_tail(quotients, mu / mu_prev)?;
        cf.value = rho;
        Ok(cf)
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// `a_n`, 1-based.
    pub fn a(&self, n: usize) -> u64 {
        self.quotients[n - 1]
    }

    /// `p_n` for `n >= -1`.
    pub fn p(&self, n: i64) -> u64 {
        self.convergents[(n + 1) as usize].0
    }

    /// `q_n` for `n >= -1`.
    pub fn q(&self, n: i64) -> u64 {
        self.convergents[(n + 1) as usize].1
    }

    /// `μ_n = |q_n ρ - p_n|` for `n >= -1`.
    pub fn mu(&self, n: i64) -> T {
        self.measures[(n + 1) as usize]
    }

    /// `(p_n, q_n)` for `n = 0..=N`.
    pub fn convergents(&self) -> &[(u64, u64)] {
        &self.convergents[1..]
    }

    /// `μ_n` for `n = 0..=N`.
    pub fn measures(&self) -> &[T] {
        &self.measures[1..]
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn tail(&self) -> T {
        self.tail
    }

    /// First `n` quotients with the tail recomputed.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.depth());
        let tail = self.mu(n as i64) / self.mu(n as i64 - 1);
        let mut cf = Self::with_tail(self.quotients[..n].to_vec(), tail)
            .expect("truncation of a valid expansion");
        cf.value = self.value;
        cf
    }

    /// Checks the convergent recurrences, the measure recurrence and the
    /// approximation bound `|ρ - p_n/q_n| < 1/(q_n q_{n+1})`.
    pub fn check_invariants(&self) -> bool {
        let n = self.depth() as i64;
        let tol = T::cst(1e3) * T::unit_roundoff();
        for k in 0..n {
            let a = self.quotients[k as usize];
            if self.q(k + 1) != a * self.q(k) + self.q(k - 1)
                || self.p(k + 1) != a * self.p(k) + self.p(k - 1)
            {
                return false;
            }
            if self.mu(k) >= self.mu(k - 1) {
                return false;
            }
            let lhs = self.mu(k - 1);
            let rhs = T::from_int(a as i64) * self.mu(k) + self.mu(k + 1);
            if (lhs - rhs).abs() > tol * lhs {
                return false;
            }
        }
        for k in 0..n {
            let (p, q) = (self.p(k), self.q(k));
            let err = (self.value - T::from_int(p as i64) / T::from_int(q as i64)).abs();
            let bound = T::one() / (T::from_int(q as i64) * T::from_int(self.q(k + 1) as i64));
            if err >= bound {
                return false;
            }
        }
        true
    }
}

/// A prescribed rotation number.
#[derive(Debug, Clone, PartialEq)]
pub enum RotationTarget<T> {
    /// Authoritative quotient list (preferred for bounded-type numbers).
    ExplicitCf(ContinuedFraction<T>),
    /// A real value expanded through the Gauss map on demand.
    RealValue(T),
}

impl<T: Real> RotationTarget<T> {
    pub fn golden() -> Self {
        RotationTarget::ExplicitCf(ContinuedFraction::golden(60))
    }

    pub fn silver() -> Self {
        RotationTarget::ExplicitCf(ContinuedFraction::silver(40))
    }

    /// Periodic continuation of `period`, e.g. `[1, 1, 10]`.
    pub fn periodic(period: &[u64]) -> Result<Self> {
        Ok(RotationTarget::ExplicitCf(ContinuedFraction::from_periodic(
            &[],
            period,
            60,
        )?))
    }

    /// Continued fraction with at least `depth` quotients.
    pub fn cf(&self, depth: usize) -> Result<ContinuedFraction<T>> {
        match self {
            RotationTarget::ExplicitCf(cf) => {
                if cf.depth() < depth {
                    Err(LabError::InvalidDepth {
                        requested: depth,
                        available: cf.depth(),
                    })
                } else {
                    Ok(cf.clone())
                }
            }
            RotationTarget::RealValue(rho) => ContinuedFraction::from_real(*rho, depth),
        }
    }
}

/// Precision-independent name of a rotation target, as written in configs:
/// `golden`, `silver`, or a comma-separated quotient period such as
/// `1,1,10`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TargetSpec {
    Golden,
    Silver,
    Periodic(Vec<u64>),
}

impl TargetSpec {
    pub fn target<T: Real>(&self) -> Result<RotationTarget<T>> {
        match self {
            TargetSpec::Golden => Ok(RotationTarget::golden()),
            TargetSpec::Silver => Ok(RotationTarget::silver()),
            TargetSpec::Periodic(p) => RotationTarget::periodic(p),
        }
    }
}

impl std::fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetSpec::Golden => write!(f, "golden"),
            TargetSpec::Silver => write!(f, "silver"),
            TargetSpec::Periodic(p) => {
                let parts: Vec<String> = p.iter().map(|a| a.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl From<TargetSpec> for String {
    fn from(t: TargetSpec) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for TargetSpec {
    type Error = LabError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl std::str::FromStr for TargetSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "golden" => Ok(TargetSpec::Golden),
            "silver" => Ok(TargetSpec::Silver),
            other => {
                let q: std::result::Result<Vec<u64>, _> =
                    other.split(',').map(|x| x.trim().parse::<u64>()).collect();
                match q {
                    Ok(q) if !q.is_empty() && q.iter().all(|&a| a >= 1) => Ok(TargetSpec::Periodic(q)),
                    _ => Err(LabError::InvalidParameter(format!(
                        "rotation target must be golden, silver or positive quotients, got '{}'",
                        s
                    ))),
                }
            }
        }
    }
}

/// Orbit of the break point swept forward one iterate at a time.
struct Sweep<'a, T, M> {
    map: &'a M,
    base: CirclePoint<T>,
    point: CirclePoint<T>,
    index: u64,
    budget: u64,
}

impl<'a, T: Real, M: CircleMap<T>> Sweep<'a, T, M> {
    fn new(map: &'a M, budget: u64) -> Self {
        let base = map.base_point();
        Sweep {
            map,
            base,
            point: base,
            index: 0,
            budget,
        }
    }

    /// `F^index(x_0) - x_0 - n`.
    fn displacement(&self, n: i64) -> T {
        T::from_int(self.point.turns - self.base.turns - n) + (self.point.frac - self.base.frac)
    }

    fn advance_to(&mut self, m: u64) -> bool {
        if m > self.budget {
            return false;
        }
        while self.index < m {
            self.point = self.map.step(self.point);
            self.index += 1;
        }
        true
    }
}

enum Quotient<T> {
    /// `a_{n+1}` together with `F^{q_{n+1}}(0)`.
    Exact(u64, CirclePoint<T>),
    /// The closest-return sign persisted past the cap.
    Exceeds,
}

/// State of the closest-return recursion after level `n`.
struct Returns<T> {
    level: usize,
    prev: (u64, u64),
    cur: (u64, u64),
    /// Sign of `d_{n-1}`; `d_{-1} = -1`.
    prev_negative: bool,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real> Returns<T> {
    fn start() -> Self {
        Returns {
            level: 0,
            prev: (1, 0),
            cur: (0, 1),
            prev_negative: true,
            _marker: std::marker::PhantomData,
        }
    }

    /// Computes `a_{n+1}`, stopping early once it exceeds `cap`.
    fn next<M: CircleMap<T>>(&self, sweep: &mut Sweep<'_, T, M>, cap: Option<u64>) -> Result<Quotient<T>> {
        let (pm, qm) = self.prev;
        let (pn, qn) = self.cur;
        let floor = T::cst(100.0) * T::unit_roundoff();
        let mut kept = None;
        let mut k = 1u64;
        loop {
            let m = qm + k * qn;
            if !sweep.advance_to(m) {
                return Err(LabError::Undecidable { p: pn, q: qn });
            }
            let target = (pm + k * pn) as i64;
            let disp = sweep.displacement(target);
            if disp == T::zero() {
                let p = target as u64;
                let g = gcd(p, m);
                return Err(LabError::PeriodicOrbit { p: p / g, q: m / g });
            }
            if disp.abs() < floor {
                return Err(LabError::PrecisionExhausted {
                    level: self.level + 1,
                    gap: disp.abs().as_f64(),
                });
            }
            if (disp < T::zero()) != self.prev_negative {
                return match kept {
                    Some(pt) => Ok(Quotient::Exact(k - 1, pt)),
                    None => Err(LabError::InvalidParameter(
                        "rotation number outside (0, 1)".into(),
                    )),
                };
            }
            kept = Some(sweep.point);
            if let Some(c) = cap {
                if k > c {
                    return Ok(Quotient::Exceeds);
                }
            }
            k += 1;
        }
    }

    fn push(&mut self, a: u64) -> Result<()> {
        let (pm, qm) = self.prev;
        let (pn, qn) = self.cur;
        let q = a
            .checked_mul(qn)
            .and_then(|x| x.checked_add(qm))
            .filter(|&q| q <= MAX_DENOMINATOR)
            .ok_or(LabError::InvalidDepth {
                requested: self.level + 1,
                available: self.level,
            })?;
        self.prev = self.cur;
        self.cur = (a * pn + pm, q);
        self.prev_negative = !self.prev_negative;
        self.level += 1;
        Ok(())
    }
}

/// Closest-return data of the orbit of the break point.
#[derive(Debug, Clone)]
pub struct ReturnData<T> {
    pub quotients: Vec<u64>,
    /// `F^{q_n}(0)` for `n = 0..=N`.
    pub return_points: Vec<CirclePoint<T>>,
    /// Lift displacements `F^{q_n}(0) - p_n` for `n = 0..=N`; their signs
    /// alternate like `(-1)^n`.
    pub displacements: Vec<T>,
}

fn default_budget(depth: usize) -> u64 {
    // Enough for every bounded-type expansion a desk run can resolve.
    (200_000_000u64).max(1000 * depth as u64)
}

/// Closest returns of the orbit of `0` up to depth `N`.
pub fn closest_returns<T: Real, M: CircleMap<T>>(map: &M, depth: usize) -> Result<ReturnData<T>> {
    if depth == 0 {
        return Err(LabError::InvalidParameter("depth must be at least 1".into()));
    }
    let mut sweep = Sweep::new(map, default_budget(depth));
    let mut state = Returns::start();
    let base = map.base_point();
    let first = map.step(base);
    let mut data = ReturnData {
        quotients: Vec::with_capacity(depth),
        return_points: vec![first],
        displacements: vec![base.distance_to(&first)],
    };
    for _ in 0..depth {
        match state.next(&mut sweep, None)? {
            Quotient::Exact(a, pt) => {
                state.push(a)?;
                data.quotients.push(a);
                data.displacements
                    .push(base.distance_to(&pt) - T::from_int(state.cur.0 as i64));
                data.return_points.push(pt);
            }
            Quotient::Exceeds => unreachable!("uncapped quotient"),
        }
    }
    Ok(data)
}

/// Partial quotients of `ρ(F)` from closest returns of the orbit of `0`.
///
/// The returned expansion carries an all-ones tail beyond depth `N`; its
/// value and measures are therefore exact only up to the truncation.
pub fn rotation_cf<T: Real, M: CircleMap<T>>(map: &M, depth: usize) -> Result<ContinuedFraction<T>> {
    let data = closest_returns(map, depth)?;
    ContinuedFraction::from_quotients(data.quotients)
}

/// Orders `ρ(F)` against the number whose expansion starts with `prefix`.
/// `Equal` means the first `prefix.len()` quotients agree.
pub fn compare_prefix<T: Real, M: CircleMap<T>>(map: &M, prefix: &[u64]) -> Result<Ordering> {
    let mut sweep = Sweep::new(map, u64::MAX);
    let mut state = Returns::start();
    for (j, &b) in prefix.iter().enumerate() {
        let smaller_means_greater = j % 2 == 0;
        let a = match state.next(&mut sweep, Some(b))? {
            Quotient::Exact(a, _) => a,
            Quotient::Exceeds => b + 1,
        };
        match a.cmp(&b) {
            Ordering::Equal => state.push(a)?,
            Ordering::Less => {
                return Ok(if smaller_means_greater {
                    Ordering::Greater
                } else {
                    Ordering::Less
                })
            }
            Ordering::Greater => {
                return Ok(if smaller_means_greater {
                    Ordering::Less
                } else {
                    Ordering::Greater
                })
            }
        }
    }
    Ok(Ordering::Equal)
}

/// Result of [`compare_rotation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RotationOrder {
    Less,
    Greater,
}

fn rational_quotients(mut p: u64, mut q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    // p/q = [a_1, …] with a_1 = floor(q/p).
    while p != 0 {
        out.push(q / p);
        let r = q % p;
        q = p;
        p = r;
    }
    out
}

/// Certified comparison of `ρ(F)` with `p/q`.
///
/// Both numbers are expanded into continued fractions and compared
/// lexicographically with alternating order; the quotients of `ρ(F)` come
/// from closest returns of the orbit of `0`, which follow the combinatorics of
/// the rigid rotation exactly. When all quotients of `p/q` are matched the
/// next quotient of `ρ(F)` must be shown to be finite; if no sign change
/// occurs within the iterate budget the comparison is `Undecidable`.
pub fn compare_rotation<T: Real, M: CircleMap<T>>(map: &M, p: u64, q: u64) -> Result<RotationOrder> {
    if q == 0 || p > q {
        return Err(LabError::InvalidParameter(format!(
            "{}/{} is not a fraction in [0, 1]",
            p, q
        )));
    }
    let g = gcd(p, q);
    let (p, q) = (p / g, q / g);
    // A rational has two expansions, [.., b_m] and [.., b_m - 1, 1]; the
    // orbit may follow either one exactly, so both must agree.
    let primary = rational_quotients(p, q);
    let mut secondary = primary.clone();
    if let Some(last) = secondary.last_mut() {
        if *last >= 2 {
            *last -= 1;
            secondary.push(1);
        }
    }
    let first = order_against_rational(map, &primary, (p, q))?;
    let second = order_against_rational(map, &secondary, (p, q))?;
    if first != second {
        return Err(LabError::Undecidable { p, q });
    }
    Ok(first)
}

fn order_against_rational<T: Real, M: CircleMap<T>>(
    map: &M,
    expansion: &[u64],
    (p, q): (u64, u64),
) -> Result<RotationOrder> {
    match compare_prefix(map, expansion)? {
        Ordering::Less => return Ok(RotationOrder::Less),
        Ordering::Greater => return Ok(RotationOrder::Greater),
        Ordering::Equal => {}
    }
    let budget = (20_000_000u64).max(1000 * q);
    let mut sweep = Sweep::new(map, budget);
    let mut state = Returns::start();
    for &a in expansion {
        match state.next(&mut sweep, Some(a))? {
            Quotient::Exact(_, _) => state.push(a)?,
            Quotient::Exceeds => unreachable!("prefix already matched"),
        }
    }
    match state.next(&mut sweep, None) {
        Ok(_) => {
            // A finite next quotient is smaller than the infinite one of p/q.
            let position_odd = expansion.len().is_multiple_of(2);
            Ok(if position_odd {
                RotationOrder::Greater
            } else {
                RotationOrder::Less
            })
        }
        Err(LabError::Undecidable { .. }) => Err(LabError::Undecidable { p, q }),
        Err(e) => Err(e),
    }
}

/// Orders the rational `p/q` against an irrational number with the given
/// quotient prefix.
fn order_rational(p: u64, q: u64, prefix: &[u64]) -> Ordering {
    let r = rational_quotients(p, q);
    for (j, &b) in prefix.iter().enumerate() {
        let a = r.get(j).copied().unwrap_or(u64::MAX);
        if a != b {
            let smaller_means_greater = j % 2 == 0;
            return if (a < b) == smaller_means_greater {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
    }
    Ordering::Equal
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Options for [`tune_delta_with`].
#[derive(Debug, Clone, Copy)]
pub struct TuneOptions<T> {
    /// Initial bracket for `δ`; the default `[0, 1]` has `ρ = 0` and `ρ = 1`
    /// at its ends.
    pub bracket: (T, T),
    /// The bisection keeps refining until every quotient whose convergent
    /// denominator stays below this bound agrees, which pins `δ` far more
    /// tightly than the requested depth alone.
    pub max_denominator: u64,
    pub max_iterations: usize,
}

impl<T: Real> Default for TuneOptions<T> {
    fn default() -> Self {
        TuneOptions {
            bracket: (T::zero(), T::one()),
            max_denominator: 200_000,
            max_iterations: 400,
        }
    }
}

/// Outcome of a tuning run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuned<T> {
    pub delta: T,
    /// Number of quotients matched by the bisection.
    pub matched_depth: usize,
    pub iterations: usize,
}

/// `δ` such that `ρ(F_{c,ε,δ})` has the target's first `depth` quotients.
pub fn tune_delta<T: Real>(c: T, eps: T, target: &RotationTarget<T>, depth: usize) -> Result<T> {
    tune_delta_with(c, eps, target, depth, TuneOptions::default()).map(|t| t.delta)
}

/// Bisection on `δ` against a quotient prefix of the target. `ρ` is
/// non-decreasing in `δ` because the lift increases pointwise.
pub fn tune_delta_with<T: Real>(
    c: T,
    eps: T,
    target: &RotationTarget<T>,
    depth: usize,
    options: TuneOptions<T>,
) -> Result<Tuned<T>> {
    if depth == 0 {
        return Err(LabError::InvalidParameter("depth must be at least 1".into()));
    }
    let cf = target.cf(depth)?;
    let mut k = depth;
    while k < cf.depth() && cf.q(k as i64 + 1) <= options.max_denominator {
        k += 1;
    }
    let prefix = &cf.quotients()[..k];
    let map = BreakMap::new(c, eps, T::zero())?;
    let (lo, hi) = options.bracket;
    if !(lo < hi) {
        return Err(LabError::NonMonotoneBracket);
    }
    let custom = !(lo == T::zero() && hi == T::one());
    if custom {
        let at_lo = compare_prefix(&map.with_delta(lo), prefix)?;
        let at_hi = compare_prefix(&map.with_delta(hi), prefix)?;
        if at_lo == Ordering::Greater || at_hi == Ordering::Less {
            return Err(LabError::NonMonotoneBracket);
        }
    }
    let (delta, iterations) =
        bisect_parameter(|d| map.with_delta(d), prefix, (lo, hi), options.max_iterations)
            .map_err(|e| match e {
                LabError::PrecisionExhausted { gap, .. } => LabError::PrecisionExhausted { level: k, gap },
                other => other,
            })?;
    let check = rotation_cf(&map.with_delta(delta), depth)?;
    if check.quotients() != &cf.quotients()[..depth] {
        let index = check
            .quotients()
            .iter()
            .zip(cf.quotients())
            .position(|(a, b)| a != b)
            .unwrap_or(depth);
        return Err(LabError::CfMismatch { index: index + 1 });
    }
    Ok(Tuned {
        delta,
        matched_depth: k,
        iterations,
    })
}

/// Bisection of a one-parameter family of circle maps whose rotation number
/// increases with the parameter, until the expansion starts with `prefix`.
/// Returns the parameter and the number of halvings.
pub fn bisect_parameter<T: Real, M: CircleMap<T>>(
    family: impl Fn(T) -> M,
    prefix: &[u64],
    (mut lo, mut hi): (T, T),
    max_iterations: usize,
) -> Result<(T, usize)> {
    let width_floor = T::cst(4.0) * T::unit_roundoff();
    for it in 0..max_iterations {
        let mid = (lo + hi) / T::cst(2.0);
        let order = match compare_prefix(&family(mid), prefix) {
            Err(LabError::PeriodicOrbit { p, q }) => order_rational(p, q, prefix),
            other => other?,
        };
        match order {
            Ordering::Equal => return Ok((mid, it + 1)),
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
        }
        if hi - lo <= width_floor * (T::one() + hi.abs()) {
            break;
        }
    }
    Err(LabError::PrecisionExhausted {
        level: prefix.len(),
        gap: (hi - lo).as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rigid(delta: f64) -> BreakMap<f64> {
        BreakMap::new(1.0, 0.0, delta).unwrap()
    }

    #[test]
    fn golden_rigid_rotation_has_fibonacci_denominators() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let cf = rotation_cf(&rigid(golden), 10).unwrap();
        assert_eq!(cf.quotients(), &[1; 10]);
        let qs: Vec<u64> = (1..=10).map(|n| cf.q(n)).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert!(cf.check_invariants());
    }

    #[test]
    fn silver_rigid_rotation() {
        let cf = rotation_cf(&rigid(2f64.sqrt() - 1.0), 6).unwrap();
        assert_eq!(cf.quotients(), &[2; 6]);
    }

    #[test]
    fn displacements_alternate_in_sign() {
        let f = BreakMap::new(2.0, 0.5, 0.4).unwrap();
        let data = closest_returns(&f, 8).unwrap();
        for (n, d) in data.displacements.iter().enumerate() {
            assert_eq!(*d > 0.0, n % 2 == 0, "n={n}");
        }
    }

    #[test]
    fn rational_rotation_is_detected() {
        assert!(matches!(
            rotation_cf(&rigid(0.25), 4),
            Err(LabError::PeriodicOrbit { p: 1, q: 4 })
        ));
    }

    #[test]
    fn periodic_expansion_values() {
        let g = ContinuedFraction::<f64>::golden(30);
        assert!((g.value() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!(g.check_invariants());
        let s = ContinuedFraction::<f64>::silver(20);
        assert!((s.value() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let mixed = ContinuedFraction::<f64>::from_periodic(&[3], &[1, 2], 7).unwrap();
        assert_eq!(mixed.quotients(), &[3, 1, 2, 1, 2, 1, 2]);
        // [3, (1, 2)*] = 1/(3 + x), x = [1, 2, 1, 2, …] = (√3 - 1)
        let x = 3f64.sqrt() - 1.0;
        assert!((mixed.value() - 1.0 / (3.0 + x)).abs() < 1e-15);
        assert!(mixed.check_invariants());
    }

    #[test]
    fn from_real_matches_periodic() {
        let r = ContinuedFraction::from_real(2f64.sqrt() - 1.0, 12).unwrap();
        assert_eq!(r.quotients(), &[2; 12]);
        assert!(r.check_invariants());
        assert!(matches!(
            ContinuedFraction::from_real(0.375f64, 6),
            Err(LabError::PeriodicOrbit { p: 3, q: 8 })
        ));
    }

    #[test]
    fn compare_rotation_on_rigid_rotations() {
        assert_eq!(compare_rotation(&rigid(0.6014), 1, 2), Ok(RotationOrder::Greater));
        assert_eq!(compare_rotation(&rigid(0.6014), 2, 3), Ok(RotationOrder::Less));
        assert_eq!(compare_rotation(&rigid(0.6014), 0, 1), Ok(RotationOrder::Greater));
        assert_eq!(compare_rotation(&rigid(0.6014), 1, 1), Ok(RotationOrder::Less));
        assert_eq!(compare_rotation(&rigid(0.31), 2, 7), Ok(RotationOrder::Greater));
        assert_eq!(
            compare_rotation(&rigid(0.25), 1, 4),
            Err(LabError::PeriodicOrbit { p: 1, q: 4 })
        );
    }

    #[test]
    fn mode_locked_map_is_undecidable_at_its_rational() {
        // Strong nonlinearity and a translation inside the 1/2 plateau.
        let f = BreakMap::new(8.0, 3.0, 0.625).unwrap();
        let r = compare_rotation(&f, 1, 2);
        assert!(
            matches!(r, Err(LabError::Undecidable { p: 1, q: 2 })),
            "{r:?}"
        );
    }

    #[test]
    fn tuning_rigid_rotation_recovers_golden_mean() {
        let d = tune_delta(1.0, 0.0, &RotationTarget::golden(), 10).unwrap();
        assert!((d - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn custom_bracket_must_straddle() {
        let options = TuneOptions {
            bracket: (0.7, 0.9),
            ..TuneOptions::default()
        };
        let r = tune_delta_with(1.0, 0.0, &RotationTarget::golden(), 8, options);
        assert_eq!(r, Err(LabError::NonMonotoneBracket));
    }
}
