//! Truncated power/Laurent series over the exact rationals.
//!
//! Every series carries an explicit `precision`: coefficients at exponents
//! `>= precision` are *unknown*, not zero. The window below the precision is
//! stored exactly, so all arithmetic here is exact and every result's
//! precision is the largest window the inputs actually determine. In
//! particular a series whose stored window is entirely zero is *not* the zero
//! series — it is "zero up to the precision" — and [`TruncatedSeries::valuation`]
//! reports that state as [`Valuation::Infinite`] (true valuation at least the
//! precision, possibly infinite) rather than inventing a finite value.
//!
//! Negative exponents are allowed (the `shift` may be negative), which is what
//! fractional ideals need. Operations that only make sense for power series
//! (composition, reversion) reject inputs with negative-exponent terms.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficient type used throughout the crate.
pub type Rat = num_rational::BigRational;

/// Shorthand for an integer coefficient.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n/d`. Panics if `d == 0`.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Valuation (t-adic order) of a truncated series.
///
/// `Infinite` compares greater than every finite value. For truncated data it
/// means "no nonzero coefficient below the precision": the element may be
/// exactly zero or may have unseen terms at or above the precision, so callers
/// must never treat it as a finite number. `Infinite + n = Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    /// The finite value, or `None` for `Infinite`.
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// True if this is the `Infinite` marker.
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl std::ops::Add<i64> for Valuation {
    type Output = Valuation;
    fn add(self, rhs: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// The operation needs a unit (valuation exactly 0).
    #[error("series is not a unit (valuation must be 0)")]
    NotAUnit,
    /// Root extraction needs constant term exactly 1; callers scale first.
    #[error("unit has constant term != 1")]
    NonUnitConstant,
    /// Composition f(g) needs f a power series and v(g) >= 1.
    #[error("composition undefined: {0}")]
    CompositionUndefined(&'static str),
    /// Reversion needs valuation exactly 1 with coefficient 1 at t^1.
    #[error("reversion undefined: {0}")]
    ReversionUndefined(&'static str),
    /// A Newton iteration failed its final verification. This cannot be
    /// triggered by input data; it indicates a bug in the kernel.
    #[error("internal verification failed in {0}")]
    Internal(&'static str),
}

/// A Laurent series known exactly below `precision` and unknown above.
///
/// Invariants: `precision > shift`, `coeffs.len() == precision - shift`, and
/// the representation is canonical: the first stored coefficient is nonzero
/// unless the whole window is zero, in which case `shift == precision - 1`
/// and `coeffs == [0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    shift: i64,
    coeffs: Vec<Rat>,
    precision: i64,
}

impl TruncatedSeries {
    /// Builds a series from a coefficient window starting at `shift`.
    /// Coefficients at exponents `>= precision` are discarded; the result is
    /// canonicalized (leading zeros folded into the shift).
    pub fn from_window(shift: i64, mut coeffs: Vec<Rat>, precision: i64) -> Self {
        let window = precision.saturating_sub(shift).max(0) as usize;
        coeffs.truncate(window);
        coeffs.resize(window, Rat::zero());
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => TruncatedSeries {
                shift: shift + k as i64,
                coeffs: coeffs.split_off(k),
                precision,
            },
            None => TruncatedSeries::zero(precision),
        }
    }

    /// Builds a series from `(exponent, coefficient)` terms. Terms at
    /// exponents `>= precision` are dropped — the window only claims knowledge
    /// below the precision. Duplicate exponents are summed.
    pub fn from_terms(terms: &[(i64, Rat)], precision: i64) -> Self {
        let known: Vec<&(i64, Rat)> = terms.iter().filter(|(e, _)| *e < precision).collect();
        let Some(shift) = known.iter().map(|(e, _)| *e).min() else {
            return TruncatedSeries::zero(precision);
        };
        let mut coeffs = vec![Rat::zero(); (precision - shift) as usize];
        for (e, c) in known {
            coeffs[(e - shift) as usize] += c;
        }
        TruncatedSeries::from_window(shift, coeffs, precision)
    }

    /// The zero window at the given precision ("zero up to precision").
    pub fn zero(precision: i64) -> Self {
        TruncatedSeries {
            shift: precision - 1,
            coeffs: vec![Rat::zero()],
            precision,
        }
    }

    /// The constant series 1. Requires `precision >= 1` so that the constant
    /// term is inside the window.
    pub fn one(precision: i64) -> Self {
        TruncatedSeries::monomial(0, rat(1), precision)
    }

    /// The identity series `t`.
    pub fn identity(precision: i64) -> Self {
        TruncatedSeries::monomial(1, rat(1), precision)
    }

    /// The single-term series `c * t^exponent`.
    ///
    /// Panics if `exponent >= precision`: a monomial the window cannot see is
    /// a caller bug, not a data state.
    pub fn monomial(exponent: i64, c: Rat, precision: i64) -> Self {
        assert!(
            exponent < precision,
            "monomial exponent {exponent} outside window (precision {precision})"
        );
        if c.is_zero() {
            return TruncatedSeries::zero(precision);
        }
        let mut coeffs = vec![Rat::zero(); (precision - exponent) as usize];
        coeffs[0] = c;
        TruncatedSeries {
            shift: exponent,
            coeffs,
            precision,
        }
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// True if every stored coefficient vanishes (the series may still have
    /// unseen terms at or above the precision).
    pub fn is_zero_window(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Least exponent with a nonzero stored coefficient, or
    /// [`Valuation::Infinite`] when the whole window vanishes.
    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => Valuation::Finite(self.shift + k as i64),
            None => Valuation::Infinite,
        }
    }

    /// Lower bound on the true valuation usable in precision bookkeeping:
    /// the valuation when visible, otherwise the precision itself.
    fn valuation_floor(&self) -> i64 {
        match self.valuation() {
            Valuation::Finite(v) => v,
            Valuation::Infinite => self.precision,
        }
    }

    /// The coefficient of `t^exponent`. Exponents below the window are zero
    /// by definition; asking at or above the precision is a caller bug and
    /// panics.
    pub fn coeff(&self, exponent: i64) -> Rat {
        assert!(
            exponent < self.precision,
            "coefficient at t^{exponent} is beyond precision {}",
            self.precision
        );
        if exponent < self.shift {
            Rat::zero()
        } else {
            self.coeffs[(exponent - self.shift) as usize].clone()
        }
    }

    /// Leading `(exponent, coefficient)` pair, or `None` for a zero window.
    pub fn leading_term(&self) -> Option<(i64, &Rat)> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|k| (self.shift + k as i64, &self.coeffs[k]))
    }

    /// Iterates the nonzero stored terms in exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.shift + k as i64, c))
    }

    /// The nonzero stored terms as owned pairs (handy for reports).
    pub fn to_terms(&self) -> Vec<(i64, Rat)> {
        self.terms().map(|(e, c)| (e, c.clone())).collect()
    }

    /// Restricts the window to a smaller precision. Panics if `p` exceeds the
    /// current precision — that would claim knowledge the series lacks.
    pub fn truncated(&self, p: i64) -> Self {
        assert!(
            p <= self.precision,
            "cannot raise precision from {} to {p}",
            self.precision
        );
        TruncatedSeries::from_window(self.shift, self.coeffs.clone(), p)
    }

    /// Multiplies by the exact monomial `t^k` (exact: window and precision
    /// both move by `k`).
    pub fn shifted(&self, k: i64) -> Self {
        TruncatedSeries {
            shift: self.shift + k,
            coeffs: self.coeffs.clone(),
            precision: self.precision + k,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &rat(1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &rat(-1))
    }

    /// `self + c * other`, the workhorse of reduction loops.
    pub fn add_scaled(&self, other: &Self, c: &Rat) -> Self {
        let precision = self.precision.min(other.precision);
        let shift = self.shift.min(other.shift).min(precision - 1);
        let mut coeffs = vec![Rat::zero(); (precision - shift) as usize];
        for (e, a) in self.terms() {
            if e < precision {
                coeffs[(e - shift) as usize] += a;
            }
        }
        if !c.is_zero() {
            for (e, b) in other.terms() {
                if e < precision {
                    coeffs[(e - shift) as usize] += b * c;
                }
            }
        }
        TruncatedSeries::from_window(shift, coeffs, precision)
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return TruncatedSeries::zero(self.precision);
        }
        TruncatedSeries {
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            precision: self.precision,
        }
    }

    /// Product of two truncated series.
    ///
    /// The result precision is `min(prec(f) + v(g), prec(g) + v(f))`: the
    /// first unknown coefficient of either factor first contaminates the
    /// product there. Zero windows use their precision as the valuation bound.
    pub fn mul(&self, other: &Self) -> Self {
        let va = self.valuation_floor();
        let vb = other.valuation_floor();
        let precision = (self.precision + vb).min(other.precision + va);
        if self.is_zero_window() || other.is_zero_window() {
            return TruncatedSeries::zero(precision);
        }
        let shift = va + vb;
        let len = (precision - shift).max(1) as usize;
        let mut coeffs = vec![Rat::zero(); len];
        for (ea, a) in self.terms() {
            for (eb, b) in other.terms() {
                let e = ea + eb;
                if e < precision {
                    coeffs[(e - shift) as usize] += a * b;
                }
            }
        }
        TruncatedSeries::from_window(shift, coeffs, precision)
    }

    /// `self^n` by binary exponentiation. `pow(0)` is the constant 1 at this
    /// series' precision.
    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return TruncatedSeries::one(self.precision.max(1));
        }
        let mut base = self.clone();
        let mut acc: Option<TruncatedSeries> = None;
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base),
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// Termwise derivative d/dt; the precision drops by one.
    pub fn derivative(&self) -> Self {
        let precision = self.precision - 1;
        let shift = self.shift - 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * rat(self.shift + k as i64))
            .collect();
        TruncatedSeries::from_window(shift, coeffs, precision)
    }

    /// True when both series store identical coefficients below `bound`
    /// (which must not exceed either precision).
    pub fn agrees_below(&self, other: &Self, bound: i64) -> bool {
        assert!(bound <= self.precision && bound <= other.precision);
        let lo = self.shift.min(other.shift).min(bound);
        (lo..bound).all(|e| self.coeff(e) == other.coeff(e))
    }

    /// Order of the unit `u`: the valuation of `u - u(0)`. `Infinite` means
    /// `u` is constant as far as the window can see.
    pub fn order_of_unit(&self) -> Result<Valuation, SeriesError> {
        if self.valuation() != Valuation::Finite(0) {
            return Err(SeriesError::NotAUnit);
        }
        match self.coeffs.iter().skip(1).position(|c| !c.is_zero()) {
            Some(k) => Ok(Valuation::Finite(1 + k as i64)),
            None => Ok(Valuation::Infinite),
        }
    }

    /// Window of coefficients `[0, t)` for a power series (`shift >= 0`),
    /// padding unknown/high entries with zeros. Internal helper for the
    /// Newton kernels, which manage their own precision bounds.
    fn window_from_zero(&self, t: usize) -> Vec<Rat> {
        debug_assert!(self.shift >= 0);
        let mut w = vec![Rat::zero(); t];
        for (e, c) in self.terms() {
            if (e as usize) < t {
                w[e as usize] = c.clone();
            }
        }
        w
    }

    /// Multiplicative inverse of a unit, to this series' precision.
    /// Newton iteration with a final verification multiply.
    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        if self.valuation() != Valuation::Finite(0) {
            return Err(SeriesError::NotAUnit);
        }
        let t = self.precision as usize;
        let u = self.window_from_zero(t);
        let z = win_unit_inverse(&u, t);
        let check = win_mul(&u, &z, t);
        if !win_is_one(&check) {
            return Err(SeriesError::Internal("unit_inverse"));
        }
        Ok(TruncatedSeries::from_window(0, z, self.precision))
    }

    /// The n-th root of a unit with constant term 1, to this series'
    /// precision. Newton iteration on the inverse root (so the only divisions
    /// are by `n`), with a final verification power.
    pub fn nth_root_of_unit(&self, n: u32) -> Result<Self, SeriesError> {
        assert!(n >= 1, "root index must be positive");
        if self.valuation() != Valuation::Finite(0) {
            return Err(SeriesError::NotAUnit);
        }
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::NonUnitConstant);
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let t = self.precision as usize;
        let u = self.window_from_zero(t);
        // z ~ u^(-1/n):  z <- z + z*(1 - u*z^n)/n, doubling the window.
        let ninv = Rat::new(BigInt::one(), BigInt::from(n));
        let mut z = vec![Rat::one()];
        let mut w = 1usize;
        while w < t {
            w = (2 * w).min(t);
            z.resize(w, Rat::zero());
            let zn = win_pow(&z, n, w);
            let uzn = win_mul(&u[..w.min(u.len())], &zn, w);
            // e = 1 - u*z^n
            let mut e = uzn;
            for c in e.iter_mut() {
                *c = -std::mem::take(c);
            }
            e[0] += Rat::one();
            let corr = win_mul(&z, &e, w);
            for (zk, ck) in z.iter_mut().zip(corr) {
                *zk += ck * &ninv;
            }
        }
        // beta = u * z^(n-1) = u^(1/n)
        let beta = win_mul(&u, &win_pow(&z, n - 1, t), t);
        let check = win_pow(&beta, n, t);
        if check != u {
            return Err(SeriesError::Internal("nth_root_of_unit"));
        }
        Ok(TruncatedSeries::from_window(0, beta, self.precision))
    }

    /// Composition `self(g)`. `self` must be a power series and `v(g) >= 1`.
    ///
    /// The result is exact below
    /// `min(prec(f)*m, (k1 - 1)*m + prec(g))` where `m` is the valuation
    /// (floor) of `g` and `k1` is the least positive exponent of a known
    /// nonzero term of `f`: beyond that, either unknown coefficients of `f`
    /// (through `g^prec(f)`) or the unknown tail of `g` (through the `k1`
    /// term) could contribute.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        if self.shift < 0 {
            return Err(SeriesError::CompositionUndefined(
                "outer series has negative-exponent terms",
            ));
        }
        let m = g.valuation_floor();
        if m < 1 || g.shift < 0 {
            return Err(SeriesError::CompositionUndefined(
                "inner series must have valuation >= 1",
            ));
        }
        let mut target = self.precision.saturating_mul(m);
        if let Some(k1) = self.terms().map(|(e, _)| e).find(|&e| e >= 1) {
            target = target.min((k1 - 1) * m + g.precision);
        }
        let t = target.max(1) as usize;
        let f = self.window_from_zero(self.precision as usize);
        let gw = g.window_from_zero(t);
        let acc = win_compose(&f, &gw, t);
        Ok(TruncatedSeries::from_window(0, acc, target))
    }

    /// Compositional inverse of a series `t + a2 t^2 + ...` (valuation 1,
    /// unit leading coefficient 1). Newton iteration with doubling windows
    /// and a final verification composition: `self(result) = t`.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if self.valuation() != Valuation::Finite(1) {
            return Err(SeriesError::ReversionUndefined("valuation must be 1"));
        }
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ReversionUndefined(
                "coefficient of t must be 1 (callers rescale first)",
            ));
        }
        let t = self.precision as usize;
        let f = self.window_from_zero(t);
        let fp = win_derivative(&f);
        // g <- g - (f(g) - t) / f'(g), window doubling from g = t.
        let mut g = vec![Rat::zero(), Rat::one()];
        let mut w = 2usize;
        while w < t {
            w = (2 * w).min(t);
            g.resize(w, Rat::zero());
            let mut e = win_compose(&f, &g, w);
            e[1] -= Rat::one();
            if e.iter().all(|c| c.is_zero()) {
                continue;
            }
            let fpg = win_compose(&fp, &g, w);
            let inv = win_unit_inverse(&fpg, w);
            let corr = win_mul(&e, &inv, w);
            for (gk, ck) in g.iter_mut().zip(corr) {
                *gk -= ck;
            }
        }
        let mut check = win_compose(&f, &g, t);
        if t > 1 {
            check[1] -= Rat::one();
        }
        if check.iter().any(|c| !c.is_zero()) {
            return Err(SeriesError::Internal("reversion"));
        }
        Ok(TruncatedSeries::from_window(0, g, self.precision))
    }
}

impl fmt::Display for TruncatedSeries {
    /// Renders in the input grammar, e.g. `t^4 + t^5`, `3/2*t^5 - t^6`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = abs.is_one();
            match (unit_coeff, e) {
                (true, 0) => write!(f, "1")?,
                (false, 0) => write!(f, "{abs}")?,
                (true, 1) => write!(f, "t")?,
                (false, 1) => write!(f, "{abs}*t")?,
                (true, _) => write!(f, "t^{e}")?,
                (false, _) => write!(f, "{abs}*t^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Raw coefficient-window kernels used by the Newton iterations. All windows
// are dense vectors indexed by exponent from 0; entries at or beyond the
// caller's knowledge bound may be garbage, and the iteration structure
// guarantees that garbage never flows below the verified window.

fn win_mul(a: &[Rat], b: &[Rat], t: usize) -> Vec<Rat> {
    // Integer fast path: when every coefficient has denominator 1 the
    // convolution stays in `BigInt`, skipping a gcd normalization per
    // coefficient product — a large constant factor on the integer-heavy
    // kernels (reversion, integer-input arithmetic).
    let integral = |w: &[Rat]| w.iter().take(t).all(|c| c.denom().is_one());
    if integral(a) && integral(b) {
        let mut out = vec![BigInt::zero(); t];
        for (i, ai) in a.iter().enumerate().take(t) {
            let ai = ai.numer();
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate().take(t - i) {
                let bj = bj.numer();
                if !bj.is_zero() {
                    out[i + j] += ai * bj;
                }
            }
        }
        return out.into_iter().map(Rat::from).collect();
    }
    let mut out = vec![Rat::zero(); t];
    for (i, ai) in a.iter().enumerate().take(t) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(t - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn win_pow(a: &[Rat], n: u32, t: usize) -> Vec<Rat> {
    let mut acc: Option<Vec<Rat>> = None;
    let mut base = a.to_vec();
    base.resize(t, Rat::zero());
    let mut k = n;
    if k == 0 {
        let mut one = vec![Rat::zero(); t.max(1)];
        one[0] = Rat::one();
        return one;
    }
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                Some(v) => win_mul(&v, &base, t),
                None => base.clone(),
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = win_mul(&base, &base, t);
    }
    acc.unwrap()
}

/// Inverse of a unit window by Newton doubling: `z <- z*(2 - u*z)`.
fn win_unit_inverse(u: &[Rat], t: usize) -> Vec<Rat> {
    debug_assert!(!u.is_empty() && !u[0].is_zero());
    let mut z = vec![u[0].recip()];
    let mut w = 1usize;
    while w < t {
        w = (2 * w).min(t);
        z.resize(w, Rat::zero());
        let uz = win_mul(&u[..w.min(u.len())], &z, w);
        let mut two_minus = uz;
        for c in two_minus.iter_mut() {
            *c = -std::mem::take(c);
        }
        two_minus[0] += rat(2);
        z = win_mul(&z, &two_minus, w);
    }
    z
}

fn win_derivative(a: &[Rat]) -> Vec<Rat> {
    if a.len() <= 1 {
        return vec![Rat::zero()];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * rat(k as i64))
        .collect()
}

/// Horner evaluation of `f(g)` on windows, truncated to length `t`.
fn win_compose(f: &[Rat], g: &[Rat], t: usize) -> Vec<Rat> {
    // Horner from the highest *nonzero* coefficient down: trailing zeros of
    // `f` would each cost a full-window multiplication and contribute
    // nothing, and the outer series is often a short polynomial.
    let deg = match f.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return vec![Rat::zero(); t],
    };
    let mut acc = vec![Rat::zero(); t];
    for c in f[..=deg].iter().rev() {
        acc = win_mul(&acc, g, t);
        if !c.is_zero() {
            acc[0] += c;
        }
    }
    acc
}

fn win_is_one(a: &[Rat]) -> bool {
    a.first().map(|c| c.is_one()).unwrap_or(false) && a.iter().skip(1).all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(terms: &[(i64, i64)], precision: i64) -> TruncatedSeries {
        let terms: Vec<(i64, Rat)> = terms.iter().map(|&(e, c)| (e, rat(c))).collect();
        TruncatedSeries::from_terms(&terms, precision)
    }

    #[test]
    fn canonical_form_and_valuation() {
        let f = ts(&[(4, 1), (5, 1)], 12);
        assert_eq!(f.shift(), 4);
        assert_eq!(f.precision(), 12);
        assert_eq!(f.valuation(), Valuation::Finite(4));
        assert_eq!(f.coeff(3), rat(0));
        assert_eq!(f.coeff(5), rat(1));

        let z = TruncatedSeries::zero(7);
        assert!(z.is_zero_window());
        assert_eq!(z.valuation(), Valuation::Infinite);
        assert_eq!(ts(&[], 7), z);

        // Terms at or above the precision are unknown, hence dropped.
        let g = ts(&[(2, 3), (9, 1)], 8);
        assert_eq!(g.to_terms(), vec![(2, rat(3))]);
    }

    #[test]
    fn zero_window_is_not_conflated_with_zero() {
        let f = ts(&[(3, 1)], 10);
        let diff = f.sub(&f);
        assert!(diff.is_zero_window());
        assert_eq!(diff.valuation(), Valuation::Infinite);
        assert_eq!(diff.precision(), 10);
        // Multiplying a zero window keeps the precision bookkeeping honest:
        // the product of something >= 10 with something of valuation 2 is
        // only known to vanish below 12.
        let g = ts(&[(2, 5)], 20);
        let prod = diff.mul(&g);
        assert!(prod.is_zero_window());
        assert_eq!(prod.precision(), 12);
    }

    #[test]
    fn mul_precision_rule() {
        // (t^4 + t^5)^2 = t^8 + 2 t^9 + t^10, inputs at precision 12 give
        // precision 12 + 4 = 16.
        let f = ts(&[(4, 1), (5, 1)], 12);
        let sq = f.mul(&f);
        assert_eq!(sq, ts(&[(8, 1), (9, 2), (10, 1)], 16));

        let g = ts(&[(1, 1)], 5);
        let h = ts(&[(3, 2)], 100);
        let p = g.mul(&h);
        // min(5 + 3, 100 + 1) = 8
        assert_eq!(p.precision(), 8);
        assert_eq!(p, ts(&[(4, 2)], 8));
    }

    #[test]
    fn valuation_additivity_on_products() {
        let f = ts(&[(2, 3), (4, -1)], 30);
        let g = ts(&[(5, -7), (6, 1)], 30);
        assert_eq!(f.mul(&g).valuation(), Valuation::Finite(7));
    }

    #[test]
    fn laurent_shift_and_derivative() {
        let f = ts(&[(-2, 3), (1, 1)], 6);
        assert_eq!(f.shift(), -2);
        let d = f.derivative();
        // d/dt (3 t^-2 + t) = -6 t^-3 + 1, precision 5
        assert_eq!(d, ts(&[(-3, -6), (0, 1)], 5));
        let back = d.shifted(3);
        assert_eq!(back.valuation(), Valuation::Finite(0));
        assert_eq!(back.precision(), 8);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let c = ts(&[(0, 5)], 4);
        let d = c.derivative();
        assert!(d.is_zero_window());
        assert_eq!(d.precision(), 3);
    }

    #[test]
    fn unit_inverse_geometric_series() {
        let u = ts(&[(0, 1), (1, 1)], 8);
        let w = u.unit_inverse().unwrap();
        assert_eq!(
            w,
            ts(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1), (5, -1), (6, 1), (7, -1)], 8)
        );
        assert!(u.mul(&w).valuation() == Valuation::Finite(0));
    }

    #[test]
    fn unit_inverse_with_rational_constant() {
        let u = ts(&[(0, 2), (5, 1)], 12);
        let w = u.unit_inverse().unwrap();
        let expected = TruncatedSeries::from_terms(
            &[(0, rat_frac(1, 2)), (5, rat_frac(-1, 4)), (10, rat_frac(1, 8))],
            12,
        );
        assert_eq!(w, expected);
        assert!(ts(&[(3, 1)], 9).unit_inverse().is_err());
    }

    #[test]
    fn square_root_of_one_plus_t() {
        let u = ts(&[(0, 1), (1, 1)], 6);
        let r = u.nth_root_of_unit(2).unwrap();
        let expected = TruncatedSeries::from_terms(
            &[
                (0, rat(1)),
                (1, rat_frac(1, 2)),
                (2, rat_frac(-1, 8)),
                (3, rat_frac(1, 16)),
                (4, rat_frac(-5, 128)),
                (5, rat_frac(7, 256)),
            ],
            6,
        );
        assert_eq!(r, expected);
        assert!(r.mul(&r).agrees_below(&u, 6));
    }

    #[test]
    fn fourth_root_round_trip() {
        let u = ts(&[(0, 1), (1, 1)], 16);
        let r = u.nth_root_of_unit(4).unwrap();
        assert_eq!(r.coeff(1), rat_frac(1, 4));
        assert_eq!(r.coeff(2), rat_frac(-3, 32));
        assert_eq!(r.coeff(3), rat_frac(7, 128));
        assert!(r.pow(4).agrees_below(&u, 16));
    }

    #[test]
    fn root_rejects_bad_units() {
        assert_eq!(
            ts(&[(0, 2)], 5).nth_root_of_unit(3),
            Err(SeriesError::NonUnitConstant)
        );
        assert_eq!(ts(&[(1, 1)], 5).nth_root_of_unit(3), Err(SeriesError::NotAUnit));
    }

    #[test]
    fn compose_basics() {
        // t^2 o (t + t^2) = t^2 + 2 t^3 + t^4
        let outer = ts(&[(2, 1)], 10);
        let inner = ts(&[(1, 1), (2, 1)], 10);
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c.precision(), 10); // min(10*1, (2-1)*1 + 10)
        assert_eq!(c, ts(&[(2, 1), (3, 2), (4, 1)], 10));
        // Composition with a Laurent outer series is rejected.
        assert!(ts(&[(-1, 1)], 5).compose(&inner).is_err());
        // ... as is an inner series of valuation 0.
        assert!(outer.compose(&ts(&[(0, 1), (1, 1)], 5)).is_err());
    }

    #[test]
    fn compose_precision_from_inner_valuation() {
        // f = t at precision 50 composed with g of valuation 3, precision 9:
        // result knows exactly the window below (1-1)*3 + 9 = 9.
        let f = ts(&[(1, 1)], 50);
        let g = ts(&[(3, 1), (5, 2)], 9);
        let c = f.compose(&g).unwrap();
        assert_eq!(c.precision(), 9);
        assert_eq!(c, g);
        // f = t^2 at precision 4 composed with g of valuation 3 (precision
        // generous): tail of f enters at 4*3.
        let f2 = ts(&[(2, 1)], 4);
        let g2 = ts(&[(3, 1)], 40);
        let c2 = f2.compose(&g2).unwrap();
        assert_eq!(c2.precision(), 12); // min(4*3, (2-1)*3 + 40)
        assert_eq!(c2, ts(&[(6, 1)], 12));
    }

    #[test]
    fn reversion_of_t_plus_t2() {
        let f = ts(&[(1, 1), (2, 1)], 7);
        let g = f.reversion().unwrap();
        assert_eq!(g, ts(&[(1, 1), (2, -1), (3, 2), (4, -5), (5, 14), (6, -42)], 7));
        let fg = f.compose(&g).unwrap();
        assert!(fg.agrees_below(&TruncatedSeries::identity(7), 7));
        let gf = g.compose(&f).unwrap();
        assert!(gf.agrees_below(&TruncatedSeries::identity(7), 7));
    }

    #[test]
    fn reversion_rejects_bad_leading_terms() {
        assert!(ts(&[(1, 2)], 6).reversion().is_err());
        assert!(ts(&[(2, 1)], 6).reversion().is_err());
    }

    #[test]
    fn order_of_unit_cases() {
        let u = ts(&[(0, 1), (1, 1)], 9);
        assert_eq!(u.order_of_unit().unwrap(), Valuation::Finite(1));
        let c = ts(&[(0, 5)], 9);
        assert_eq!(c.order_of_unit().unwrap(), Valuation::Infinite);
        assert!(ts(&[(1, 1)], 9).order_of_unit().is_err());
        let deep = ts(&[(0, 1), (4, -2)], 9);
        assert_eq!(deep.order_of_unit().unwrap(), Valuation::Finite(4));
    }

    #[test]
    fn display_round_trip_style() {
        assert_eq!(ts(&[(4, 1), (5, 1)], 12).to_string(), "t^4 + t^5");
        assert_eq!(
            TruncatedSeries::from_terms(&[(5, rat_frac(3, 2)), (6, rat(-1))], 9).to_string(),
            "3/2*t^5 - t^6"
        );
        assert_eq!(ts(&[(0, -2), (1, 1)], 5).to_string(), "-2 + t");
        assert_eq!(TruncatedSeries::zero(3).to_string(), "0");
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = ts(&[(1, 1), (3, -2)], 12);
        let mut byhand = f.clone();
        for _ in 1..5 {
            byhand = byhand.mul(&f);
        }
        assert_eq!(f.pow(5), byhand);
    }
}
