//! Fractional ideals of a curve ring inside `k((t))`: value sets, products,
//! the inverse (colon) ideal `I⁻¹ = R : I`, trace ideals `I·I⁻¹`, colengths
//! `ℓ(R̄/I)`, and the derivative ideal.
//!
//! Everything infinite is truncated at the conductor: a fractional ideal
//! contains `t^{v(I)+c} k[[t]]` outright (divide by a valuation-`v(I)`
//! element and land in the conductor ideal), so an ideal is pinned down by
//! `v(I)` plus a finite coefficient window of length `c`. All equalities and
//! containments below are window + tail statements, which by that argument
//! are genuine equalities of ideals.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::Zero;
use thiserror::Error;

use crate::ring::CurveRing;
use crate::series::{Rat, TruncatedSeries, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("an ideal needs at least one generator")]
    NoGenerators,
    #[error("ideal generator {index} is zero (or vanishes below its precision)")]
    ZeroGenerator { index: usize },
    #[error("ideal has valuation {valuation} < 0, not contained in the integral closure")]
    NotIntegral { valuation: i64 },
    #[error("insufficient precision: ideal generator known below {have}, need {need}")]
    InsufficientPrecision { have: i64, need: i64 },
    #[error("internal consistency failure in {0}")]
    Internal(&'static str),
}

/// Values attained by an ideal: a window `[start, tail_start)` of explicitly
/// listed members plus every integer from `tail_start = start + c` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    start: i64,
    window_members: Vec<i64>,
    tail_start: i64,
}

impl ValueSet {
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Members listed explicitly, ascending, all in `[start, tail_start)`.
    pub fn window_members(&self) -> &[i64] {
        &self.window_members
    }

    pub fn tail_start(&self) -> i64 {
        self.tail_start
    }

    pub fn contains(&self, e: i64) -> bool {
        e >= self.tail_start || self.window_members.binary_search(&e).is_ok()
    }

    /// Number of integers in `[bound_start, tail_start)` missing from the
    /// set, plus everything below `start` down to `bound_start`.
    fn absent_from(&self, bound_start: i64) -> i64 {
        let window = self.tail_start - self.start;
        (self.start - bound_start) + window - self.window_members.len() as i64
    }
}

/// A finitely generated `R`-submodule of `k((t))`. Generators may be Laurent
/// (negative valuations); none may be a zero window.
#[derive(Debug)]
pub struct FractionalIdeal {
    generators: Vec<TruncatedSeries>,
    min_valuation: i64,
    values: OnceLock<ValueSet>,
}

impl Clone for FractionalIdeal {
    fn clone(&self) -> Self {
        let values = OnceLock::new();
        if let Some(v) = self.values.get() {
            let _ = values.set(v.clone());
        }
        FractionalIdeal {
            generators: self.generators.clone(),
            min_valuation: self.min_valuation,
            values,
        }
    }
}

impl FractionalIdeal {
    pub fn new(generators: Vec<TruncatedSeries>) -> Result<Self, IdealError> {
        if generators.is_empty() {
            return Err(IdealError::NoGenerators);
        }
        let mut min_valuation = i64::MAX;
        for (index, g) in generators.iter().enumerate() {
            match g.valuation() {
                Valuation::Infinite => return Err(IdealError::ZeroGenerator { index }),
                Valuation::Finite(v) => min_valuation = min_valuation.min(v),
            }
        }
        Ok(FractionalIdeal {
            generators,
            min_valuation,
            values: OnceLock::new(),
        })
    }

    pub fn principal(f: TruncatedSeries) -> Result<Self, IdealError> {
        Self::new(vec![f])
    }

    /// The unit ideal `R`, generated by 1 at the ring's precision.
    pub fn unit(ring: &CurveRing) -> Self {
        FractionalIdeal {
            generators: vec![TruncatedSeries::one(ring.precision())],
            min_valuation: 0,
            values: OnceLock::new(),
        }
    }

    pub fn generators(&self) -> &[TruncatedSeries] {
        &self.generators
    }

    /// `v(I)`: the least valuation the ideal attains. Attained on a
    /// generator, since every element is an `R`-combination of them and `R`
    /// only raises valuations.
    pub fn min_valuation(&self) -> i64 {
        self.min_valuation
    }

    /// The ideal's value set over `ring`, computed on first use and cached.
    ///
    /// The `k`-span of the ideal modulo `t^{v+c}` is spanned by the products
    /// `e_s · g_j` of standard-basis entries with generators (higher basis
    /// elements only contribute past the window), so the attained values are
    /// the pivots of the echelon form of those products.
    pub fn value_set(&self, ring: &CurveRing) -> Result<&ValueSet, IdealError> {
        if let Some(v) = self.values.get() {
            return Ok(v);
        }
        let computed = self.compute_value_set(ring)?;
        Ok(self.values.get_or_init(|| computed))
    }

    fn compute_value_set(&self, ring: &CurveRing) -> Result<ValueSet, IdealError> {
        let v = self.min_valuation;
        let c = ring.conductor();
        self.check_window_precision(v + c)?;
        let mut ech = WindowEchelon::new(v, c as usize);
        for row in self.window_rows(ring, v, c)? {
            ech.insert(row);
        }
        let window_members: Vec<i64> = ech.pivot_exponents();
        Ok(ValueSet {
            start: v,
            window_members,
            tail_start: v + c,
        })
    }

    fn check_window_precision(&self, need: i64) -> Result<(), IdealError> {
        for g in &self.generators {
            if g.precision() < need {
                return Err(IdealError::InsufficientPrecision {
                    have: g.precision(),
                    need,
                });
            }
        }
        Ok(())
    }

    /// Coefficient rows (on the window `[window_start, window_start + c)`)
    /// spanning the ideal's image modulo `t^{window_start + c}`: all products
    /// `e_s · g_j` whose valuation lands inside the window.
    fn window_rows(
        &self,
        ring: &CurveRing,
        window_start: i64,
        c: i64,
    ) -> Result<Vec<Vec<Rat>>, IdealError> {
        let bound = window_start + c;
        let mut rows = Vec::new();
        for g in &self.generators {
            let vg = match g.valuation() {
                Valuation::Finite(v) => v,
                Valuation::Infinite => return Err(IdealError::Internal("zero-window generator")),
            };
            for e in ring.basis().entries().range(..(bound - vg).max(0)).map(|(_, e)| e) {
                let prod = e.mul(g);
                if prod.precision() < bound {
                    return Err(IdealError::Internal("value-set row precision"));
                }
                rows.push(window_vec(&prod, window_start, c as usize));
            }
        }
        Ok(rows)
    }

    /// `ℓ(R̄/I)` for integral `I`: the number of nonnegative integers the
    /// ideal's value set misses. (Lengths of such quotients equal value-gap
    /// counts because each graded piece is a one-dimensional `k`-space.)
    pub fn colength(&self, ring: &CurveRing) -> Result<i64, IdealError> {
        if self.min_valuation < 0 {
            return Err(IdealError::NotIntegral {
                valuation: self.min_valuation,
            });
        }
        let vs = self.value_set(ring)?;
        Ok(vs.absent_from(0))
    }

    /// `I⁻¹ = R : I = {z | zI ⊆ R}`, by exact linear algebra.
    ///
    /// Any `z` splits as a polynomial supported on `[−v(I), c−v(I))` plus a
    /// tail of valuation ≥ `c − v(I)`; the tail multiplies every generator
    /// into the conductor ideal, hence lies in `I⁻¹` unconditionally. The
    /// polynomial part must satisfy, for each generator `g` and each
    /// semigroup gap `g' < c`, that the fully reduced form of `z·g` has no
    /// coefficient at `g'` — a homogeneous linear system over `k`.
    pub fn inverse(&self, ring: &CurveRing) -> Result<FractionalIdeal, IdealError> {
        let v = self.min_valuation;
        let c = ring.conductor();
        self.check_window_precision(v + c)?;
        let gaps = &ring.semigroup().gaps;
        let exponents: Vec<i64> = (-v..c - v).collect();
        // Constraint matrix: one row per (generator, gap), one column per
        // candidate exponent of z.
        let mut matrix: Vec<Vec<Rat>> =
            vec![vec![Rat::zero(); exponents.len()]; self.generators.len() * gaps.len()];
        for (col, &e) in exponents.iter().enumerate() {
            for (j, g) in self.generators.iter().enumerate() {
                let shifted = g.shifted(e);
                if shifted.precision() < c {
                    return Err(IdealError::Internal("inverse residual precision"));
                }
                let residual = ring.basis().rref_reduce_below(&shifted, c);
                for (gi, &gap) in gaps.iter().enumerate() {
                    matrix[j * gaps.len() + gi][col] = residual.coeff(gap);
                }
            }
        }
        let solutions = nullspace(matrix, exponents.len());
        // Canonicalize the solution polynomials into echelon form on the
        // window, then materialize them as exact polynomials.
        let mut ech = WindowEchelon::new(-v, exponents.len());
        for sol in solutions {
            ech.insert(sol);
        }
        let out_precision = ring.precision() + c + v.abs() + 8;
        let mut generators: Vec<TruncatedSeries> = ech
            .rows()
            .into_iter()
            .map(|row| series_from_window(&row, -v, out_precision))
            .collect();
        for j in 0..c {
            generators.push(TruncatedSeries::monomial(
                c - v + j,
                Rat::from_integer(1.into()),
                out_precision,
            ));
        }
        FractionalIdeal::new(generators)
    }

    /// The product ideal, generated by all pairwise generator products.
    /// `v(I·J) = v(I) + v(J)`: valuations add on the witnessing generators
    /// and no combination can do better.
    pub fn multiply(&self, other: &FractionalIdeal) -> FractionalIdeal {
        let mut generators = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                generators.push(a.mul(b));
            }
        }
        FractionalIdeal::new(generators).expect("products of nonzero series are nonzero")
    }

    /// The trace ideal `tr(I) = I·I⁻¹`.
    pub fn trace(&self, ring: &CurveRing) -> Result<FractionalIdeal, IdealError> {
        Ok(self.multiply(&self.inverse(ring)?))
    }

    /// The ideal `γ·I` for a nonzero series `γ`.
    pub fn scaled(&self, gamma: &TruncatedSeries) -> Result<FractionalIdeal, IdealError> {
        FractionalIdeal::new(self.generators.iter().map(|g| g.mul(gamma)).collect())
    }

    /// Set equality over `ring`. Two ideals agree iff they have the same
    /// minimum valuation and the same canonical window echelon (the tail
    /// beyond the window is forced either way).
    pub fn equals(&self, other: &FractionalIdeal, ring: &CurveRing) -> Result<bool, IdealError> {
        if self.min_valuation != other.min_valuation {
            return Ok(false);
        }
        Ok(self.canonical_window(ring)? == other.canonical_window(ring)?)
    }

    /// `self ⊆ other` as subsets of `k((t))`.
    pub fn contained_in(
        &self,
        other: &FractionalIdeal,
        ring: &CurveRing,
    ) -> Result<bool, IdealError> {
        if self.min_valuation < other.min_valuation {
            return Ok(false);
        }
        let c = ring.conductor();
        let start = other.min_valuation;
        self.check_window_precision(start + c)?;
        other.check_window_precision(start + c)?;
        let mut ech = WindowEchelon::new(start, c as usize);
        for row in other.window_rows(ring, start, c)? {
            ech.insert(row);
        }
        for row in self.window_rows(ring, start, c)? {
            if !ech.residual(row).iter().all(Rat::is_zero) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The unique reduced echelon basis of the ideal's window image,
    /// together with its start. Equal ideals produce identical results.
    pub fn canonical_window(&self, ring: &CurveRing) -> Result<(i64, Vec<Vec<Rat>>), IdealError> {
        let v = self.min_valuation;
        let c = ring.conductor();
        self.check_window_precision(v + c)?;
        let mut ech = WindowEchelon::new(v, c as usize);
        for row in self.window_rows(ring, v, c)? {
            ech.insert(row);
        }
        Ok((v, ech.rows()))
    }
}

/// The derivative ideal: generated by the `t`-derivatives of the normalized
/// generators. In characteristic zero `v(x_i') = a_i − 1` on the nose, so
/// the ideal's valuation is `a_1 − 1`.
pub fn derivative_ideal(ring: &CurveRing) -> FractionalIdeal {
    let generators: Vec<TruncatedSeries> =
        ring.generators().iter().map(|g| g.derivative()).collect();
    FractionalIdeal::new(generators).expect("derivatives of valuation >= 2 series are nonzero")
}

/// Reduced row echelon structure over a fixed exponent window
/// `[start, start + width)`. Rows are monic at their pivot and zero at every
/// other pivot; insertion keeps the form reduced, so the final row list is
/// the unique RREF basis of whatever was inserted (deterministic).
struct WindowEchelon {
    start: i64,
    width: usize,
    rows: BTreeMap<usize, Vec<Rat>>,
}

impl WindowEchelon {
    fn new(start: i64, width: usize) -> Self {
        WindowEchelon {
            start,
            width,
            rows: BTreeMap::new(),
        }
    }

    /// Reduces `vec` against the stored rows. A single ascending pass is
    /// exact because stored rows vanish at one another's pivots.
    fn residual(&self, mut vec: Vec<Rat>) -> Vec<Rat> {
        assert_eq!(vec.len(), self.width);
        for (&p, row) in &self.rows {
            if !vec[p].is_zero() {
                let factor = vec[p].clone();
                for (x, r) in vec.iter_mut().zip(row) {
                    *x -= &factor * r;
                }
            }
        }
        vec
    }

    /// Inserts a vector, returning its pivot offset if independent.
    fn insert(&mut self, vec: Vec<Rat>) -> Option<usize> {
        let mut vec = self.residual(vec);
        let p = vec.iter().position(|x| !x.is_zero())?;
        let lead = vec[p].clone();
        for x in vec.iter_mut() {
            *x /= &lead;
        }
        for row in self.rows.values_mut() {
            if !row[p].is_zero() {
                let factor = row[p].clone();
                for (r, n) in row.iter_mut().zip(&vec) {
                    *r -= &factor * n;
                }
            }
        }
        self.rows.insert(p, vec);
        Some(p)
    }

    /// Pivot positions as absolute exponents, ascending.
    fn pivot_exponents(&self) -> Vec<i64> {
        self.rows.keys().map(|&p| self.start + p as i64).collect()
    }

    /// The canonical rows, ordered by pivot.
    fn rows(&self) -> Vec<Vec<Rat>> {
        self.rows.values().cloned().collect()
    }
}

/// Coefficients of `f` on `[start, start + width)`. `f` must have no visible
/// terms below `start` and must be known through the window.
fn window_vec(f: &TruncatedSeries, start: i64, width: usize) -> Vec<Rat> {
    debug_assert!(match f.valuation() {
        Valuation::Finite(v) => v >= start,
        Valuation::Infinite => true,
    });
    (start..start + width as i64).map(|e| f.coeff(e)).collect()
}

fn series_from_window(row: &[Rat], start: i64, precision: i64) -> TruncatedSeries {
    let terms: Vec<(i64, Rat)> = row
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (start + i as i64, c.clone()))
        .collect();
    TruncatedSeries::from_terms(&terms, precision)
}

/// Basis of the nullspace of `matrix` (rows = equations, `width` columns),
/// by reduced row echelon elimination and free-variable back-substitution.
fn nullspace(mut matrix: Vec<Vec<Rat>>, width: usize) -> Vec<Vec<Rat>> {
    let mut pivot_of_row: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..width {
        let Some(r) = (rank..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, r);
        let lead = matrix[rank][col].clone();
        for x in matrix[rank].iter_mut() {
            *x /= &lead;
        }
        for r2 in 0..matrix.len() {
            if r2 != rank && !matrix[r2][col].is_zero() {
                let factor = matrix[r2][col].clone();
                for c2 in 0..width {
                    let delta = &factor * &matrix[rank][c2];
                    matrix[r2][c2] -= delta;
                }
            }
        }
        pivot_of_row.push(col);
        rank += 1;
    }
    let pivot_cols: std::collections::BTreeSet<usize> = pivot_of_row.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..width {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut y = vec![Rat::zero(); width];
        y[free] = Rat::from_integer(1.into());
        for (r, &p) in pivot_of_row.iter().enumerate() {
            y[p] = -matrix[r][free].clone();
        }
        basis.push(y);
    }
    basis
}
