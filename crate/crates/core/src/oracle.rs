//! Brute-force reference implementations for cross-checking the main
//! algorithms.
//!
//! Everything here works from first principles on top of [`crate::series`]
//! alone — no standard bases, no completion loops, no structured solvers —
//! so that agreement with the `ring`/`ideal` modules is meaningful evidence.
//! The price is combinatorial cost: below a window `p`, the subalgebra
//! `k[[x_1, ..., x_n]]` is spanned modulo `t^p` by the finitely many
//! monomials `x^m` of valuation `< p`, so the oracle simply enumerates them
//! all and row-reduces dense coefficient matrices over the rationals. A
//! guard bounds the monomial count; callers see an error rather than a hang
//! when an instance is out of brute-force range.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::series::{Rat, TruncatedSeries, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The instance needs more monomials than the guard allows.
    #[error("brute-force guard exceeded: {count} monomials below the window (limit {limit})")]
    GuardExceeded { count: usize, limit: usize },
    /// An input series does not determine the requested window.
    #[error("series precision {have} is below the required window {need}")]
    InsufficientPrecision { have: i64, need: i64 },
    /// Inputs that make no sense for the computation (empty or zero data).
    #[error("degenerate oracle input: {0}")]
    Degenerate(&'static str),
}

/// Upper bound on how many generator monomials the oracle may enumerate.
pub const DEFAULT_MONOMIAL_LIMIT: usize = 20_000;

/// Dense rational rows kept in echelon order by leading column; rows are
/// monic at their pivot. Reduction cascades (rows are not inter-reduced).
#[derive(Debug)]
pub struct CoefficientMatrix {
    width: usize,
    /// `pivot_rows[k]` is `Some(row)` when a row with leading column `k`
    /// exists; `row[k] == 1`.
    pivot_rows: Vec<Option<Vec<Rat>>>,
}

impl CoefficientMatrix {
    pub fn new(width: usize) -> Self {
        CoefficientMatrix {
            width,
            pivot_rows: vec![None; width],
        }
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.width).filter(|&k| self.pivot_rows[k].is_some()).collect()
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.iter().filter(|r| r.is_some()).count()
    }

    /// Fully reduces `v` in place against the stored rows (cascade from the
    /// left). Afterwards `v` has zero entries at every pivot column.
    pub fn reduce(&self, v: &mut [Rat]) {
        for k in 0..self.width {
            if v[k].is_zero() {
                continue;
            }
            if let Some(row) = &self.pivot_rows[k] {
                let c = std::mem::replace(&mut v[k], Rat::zero());
                for (vj, rj) in v[k + 1..].iter_mut().zip(&row[k + 1..]) {
                    if !rj.is_zero() {
                        *vj -= &c * rj;
                    }
                }
            }
        }
    }

    /// Reduces `v` and inserts the remainder as a new (monic) row. Returns
    /// the new pivot column, or `None` if `v` reduced to zero.
    pub fn insert(&mut self, mut v: Vec<Rat>) -> Option<usize> {
        assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        let k = v.iter().position(|c| !c.is_zero())?;
        let lead = v[k].clone();
        for c in v[k..].iter_mut() {
            *c /= &lead;
        }
        self.pivot_rows[k] = Some(v);
        Some(k)
    }

    /// True iff `v` lies in the row space.
    pub fn spans(&self, mut v: Vec<Rat>) -> bool {
        self.reduce(&mut v);
        v.iter().all(|c| c.is_zero())
    }
}

/// Value semigroup of `k[[gens]]` read off a full monomial enumeration.
#[derive(Debug)]
pub struct BruteSemigroup {
    /// Valuations `< window` attained by the subalgebra.
    pub members: BTreeSet<i64>,
    /// Non-members below the conductor.
    pub gaps: Vec<i64>,
    /// `1 +` the largest non-member below the window. Meaningful only when
    /// the caller's window extends past the true conductor.
    pub conductor: i64,
    matrix: CoefficientMatrix,
    window: i64,
}

impl BruteSemigroup {
    /// Membership test for the ring, valid for elements whose window the
    /// matrix covers: `f` must be known below the semigroup window.
    pub fn contains(&self, f: &TruncatedSeries) -> Result<bool, OracleError> {
        if f.precision() < self.window {
            return Err(OracleError::InsufficientPrecision {
                have: f.precision(),
                need: self.window,
            });
        }
        if let Valuation::Finite(v) = f.valuation() {
            if v < 0 {
                return Ok(false);
            }
        }
        Ok(self.matrix.spans(window_vector(f, 0, self.window)))
    }

    /// The dense echelon matrix of the ring's window classes.
    pub fn matrix(&self) -> &CoefficientMatrix {
        &self.matrix
    }

    pub fn window(&self) -> i64 {
        self.window
    }
}

/// Coefficients of `f` on `[lo, hi)` as a dense vector. Panics if `f` does
/// not determine that window (callers check precision first).
fn window_vector(f: &TruncatedSeries, lo: i64, hi: i64) -> Vec<Rat> {
    (lo..hi).map(|e| f.coeff(e)).collect()
}

/// Enumerates every monomial in the generators with valuation `< window`
/// (including the empty monomial 1), as truncated series. Depth-first with a
/// running product so each node costs one series multiplication.
fn enumerate_monomials(
    gens: &[TruncatedSeries],
    window: i64,
    limit: usize,
) -> Result<Vec<TruncatedSeries>, OracleError> {
    for g in gens {
        if g.precision() < window {
            return Err(OracleError::InsufficientPrecision {
                have: g.precision(),
                need: window,
            });
        }
        match g.valuation() {
            Valuation::Finite(v) if v >= 1 => {}
            _ => return Err(OracleError::Degenerate("generator without positive valuation")),
        }
    }
    let mut out = vec![TruncatedSeries::one(window)];
    let mut stack = vec![(0usize, 0usize)]; // (generator index to start from, product index)
    while let Some((start, prod_idx)) = stack.pop() {
        for i in start..gens.len() {
            let next = out[prod_idx].mul(&gens[i]);
            let Valuation::Finite(v) = next.valuation() else {
                continue;
            };
            if v >= window {
                continue;
            }
            if out.len() >= limit {
                return Err(OracleError::GuardExceeded {
                    count: out.len() + 1,
                    limit,
                });
            }
            out.push(next.truncated(window.min(out[prod_idx].precision() + gens[i].shift())));
            stack.push((i, out.len() - 1));
        }
    }
    Ok(out)
}

/// Value semigroup of the subalgebra generated by `gens`, read off the full
/// monomial matrix below `window`. Row pivots are exactly the valuations the
/// algebra attains there.
pub fn brute_semigroup(
    gens: &[TruncatedSeries],
    window: i64,
    limit: usize,
) -> Result<BruteSemigroup, OracleError> {
    if gens.is_empty() {
        return Err(OracleError::Degenerate("no generators"));
    }
    if window < 1 {
        return Err(OracleError::Degenerate("window must be positive"));
    }
    let monomials = enumerate_monomials(gens, window, limit)?;
    let mut matrix = CoefficientMatrix::new(window as usize);
    for m in &monomials {
        matrix.insert(window_vector(m, 0, window));
    }
    let members: BTreeSet<i64> = matrix.pivots().into_iter().map(|k| k as i64).collect();
    let conductor = (0..window).rev().find(|e| !members.contains(e)).map_or(0, |g| g + 1);
    let gaps = (0..conductor).filter(|e| !members.contains(e)).collect();
    Ok(BruteSemigroup {
        members,
        gaps,
        conductor,
        matrix,
        window,
    })
}

/// Membership of `f` in `k[[gens]]`, by dense row-space test below `window`.
pub fn brute_membership(
    gens: &[TruncatedSeries],
    f: &TruncatedSeries,
    window: i64,
    limit: usize,
) -> Result<bool, OracleError> {
    brute_semigroup(gens, window, limit)?.contains(f)
}

/// Minimal valuation of the inverse `I^{-1} = R : I` of the fractional ideal
/// generated by `ideal_gens` over `R = k[[ring_gens]]`, solved as one dense
/// linear system with no structure exploited.
///
/// Unknown: the window `[-v(I), c - v(I))` of coefficients of `y` (where `c`
/// is the conductor found by the brute semigroup); everything from
/// `c - v(I)` up is automatically in the inverse. Constraints: for each
/// generator `g` of `I`, the class of `y*g` below `t^c` must lie in the row
/// space of the ring's monomial matrix.
pub fn brute_inverse_valuation(
    ideal_gens: &[TruncatedSeries],
    ring_gens: &[TruncatedSeries],
    window: i64,
    limit: usize,
) -> Result<i64, OracleError> {
    let sg = brute_semigroup(ring_gens, window, limit)?;
    let c = sg.conductor;
    if c < 1 {
        return Err(OracleError::Degenerate("conductor collapsed to 0"));
    }
    let mut vi: Option<i64> = None;
    for g in ideal_gens {
        match g.valuation() {
            Valuation::Finite(v) => vi = Some(vi.map_or(v, |m: i64| m.min(v))),
            Valuation::Infinite => return Err(OracleError::Degenerate("zero-window ideal generator")),
        }
    }
    let Some(vi) = vi else {
        return Err(OracleError::Degenerate("no ideal generators"));
    };

    // Ring matrix restricted to the window [0, c): membership below the
    // conductor is decided entirely there.
    let monomials = enumerate_monomials(ring_gens, window, limit)?;
    let mut ring_c = CoefficientMatrix::new(c as usize);
    for m in &monomials {
        ring_c.insert(window_vector(m, 0, c));
    }

    // Constraint matrix rows: residuals of t^e * g below t^c, one block of
    // rows per ideal generator, columns indexed by the unknown exponent e.
    let unknowns: Vec<i64> = (-vi..c - vi).collect();
    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(unknowns.len());
    for &e in &unknowns {
        let mut col = Vec::new();
        for g in ideal_gens {
            let need = c + vi;
            if g.precision() < need {
                return Err(OracleError::InsufficientPrecision {
                    have: g.precision(),
                    need,
                });
            }
            let mut w: Vec<Rat> = (0..c).map(|m| if m - e < g.precision() { g.coeff(m - e) } else { Rat::zero() }).collect();
            ring_c.reduce(&mut w);
            col.extend(w);
        }
        columns.push(col);
    }

    // Null space of the constraint system, echelonized over the unknowns so
    // the first pivot is the least valuation any solution attains.
    let n_rows = columns.first().map_or(0, |c| c.len());
    // Gaussian elimination on the transpose: each unknown contributes a row
    // [constraints | indicator]; eliminating the constraint block leaves the
    // null-space vectors in the indicator block of the rows that vanish.
    let mut aug: Vec<Vec<Rat>> = columns
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let mut row: Vec<Rat> = col.clone();
            let mut ind = vec![Rat::zero(); unknowns.len()];
            ind[i] = Rat::from_integer(1.into());
            row.extend(ind);
            row
        })
        .collect();
    let mut null_rows: Vec<Vec<Rat>> = Vec::new();
    let mut elim = CoefficientMatrix::new(n_rows);
    for row in aug.iter_mut() {
        let (constraints, indicator) = row.split_at_mut(n_rows);
        // Reduce the constraint block, mirroring every operation on the
        // indicator block.
        for k in 0..n_rows {
            if constraints[k].is_zero() {
                continue;
            }
            if let Some(prow) = &elim.pivot_rows[k] {
                let cfac = std::mem::replace(&mut constraints[k], Rat::zero());
                for (vj, rj) in constraints[k + 1..].iter_mut().zip(&prow[k + 1..n_rows]) {
                    if !rj.is_zero() {
                        *vj -= &cfac * rj;
                    }
                }
                for (vj, rj) in indicator.iter_mut().zip(&prow[n_rows..]) {
                    if !rj.is_zero() {
                        *vj -= &cfac * rj;
                    }
                }
            }
        }
        if let Some(k) = constraints.iter().position(|c| !c.is_zero()) {
            let lead = constraints[k].clone();
            for c in constraints[k..].iter_mut() {
                *c /= &lead;
            }
            for c in indicator.iter_mut() {
                *c /= &lead;
            }
            let mut full = constraints.to_vec();
            full.extend(indicator.to_vec());
            elim.pivot_rows[k] = Some(full);
        } else {
            null_rows.push(indicator.to_vec());
        }
    }
    // Echelonize the null-space vectors by leading unknown.
    let mut sols = CoefficientMatrix::new(unknowns.len());
    for row in null_rows {
        sols.insert(row);
    }
    let min_window = sols.pivots().first().map(|&k| unknowns[k]);
    Ok(min_window.map_or(c - vi, |m| m.min(c - vi)))
}
