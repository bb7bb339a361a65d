//! The algebroid curve ring `R = k[[x_1(t), ..., x_n(t)]]` and its standard
//! basis, value semigroup, and membership test.
//!
//! Generators are normalized (monic, strictly increasing valuations); the
//! ring is then represented below a working precision `P` by a *standard
//! basis*: one monic series `e_s` per attained valuation `s < P`, the set of
//! which is exactly the value semigroup window `Γ ∩ [0, P)`. `P` is chosen so
//! the window provably determines everything: once the window exhibits a run
//! of `a_1` consecutive members with gcd 1, the semigroup is certified — all
//! larger values are members, the conductor `c` and the gaps are exact, and
//! `t^c k[[t]] ⊆ R` makes membership below the conductor decidable from the
//! window alone.
//!
//! Conventions: `a_1 < ... < a_n` are the generator valuations, `c` the
//! conductor of the value semigroup, `genus` the number of gaps.

use std::collections::{BTreeMap, VecDeque};

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::series::{Rat, TruncatedSeries, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("no generators supplied")]
    EmptyInput,
    #[error("generator {index} is zero (or vanishes below its precision)")]
    ZeroGenerator { index: usize },
    #[error("generator {index} has valuation {valuation}, need >= 1")]
    NonPositiveValuation { index: usize, valuation: i64 },
    /// The data describes a regular ring (a discrete valuation ring), which
    /// has no interesting quasihomogeneity question: some generator has
    /// valuation 1, or a single generator remains after reduction.
    #[error("the parametrization describes a regular ring: {0}")]
    RegularRing(&'static str),
    /// No window up to the cap certifies the value semigroup.
    #[error("precision cap exceeded: {0}")]
    PrecisionCapExceeded(String),
    /// An element does not carry enough exact coefficients for the request.
    #[error("insufficient precision: series known below {have}, need {need}")]
    InsufficientPrecision { have: i64, need: i64 },
    /// A structural invariant failed; indicates a bug, not bad input.
    #[error("internal consistency failure in {0}")]
    Internal(&'static str),
}

/// Exact polynomial input: `(exponent, coefficient)` terms. This is what the
/// expression parser produces; materializing at any precision just truncates.
pub type PolyTerms = Vec<(i64, Rat)>;

/// Knobs for the working-precision choice.
#[derive(Debug, Clone)]
pub struct PrecisionPolicy {
    /// Use exactly this window instead of the automatic choice.
    pub precision: Option<i64>,
    /// Largest window the automatic policy (or the doubling fallback) may
    /// use before giving up.
    pub max_precision: i64,
}

pub const DEFAULT_MAX_PRECISION: i64 = 4096;

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            precision: None,
            max_precision: DEFAULT_MAX_PRECISION,
        }
    }
}

/// Normalized parametrization: monic generators with strictly increasing
/// valuations `2 <= a_1 < ... < a_n`, all at one working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveParametrization {
    generators: Vec<TruncatedSeries>,
    valuations: Vec<i64>,
    precision: i64,
}

impl CurveParametrization {
    pub fn generators(&self) -> &[TruncatedSeries] {
        &self.generators
    }

    pub fn valuations(&self) -> &[i64] {
        &self.valuations
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// The unit `α_i = x_i / t^{a_i}` (constant term 1 by normalization).
    pub fn unit_part(&self, i: usize) -> TruncatedSeries {
        self.generators[i].shifted(-self.valuations[i])
    }

    /// True when every generator is a single term `t^{a_i}` as far as the
    /// window sees.
    pub fn is_monomial(&self) -> bool {
        self.generators.iter().all(|g| g.terms().count() == 1)
    }

    /// Gcd of every exponent carrying a nonzero coefficient in any
    /// generator. Every valuation the algebra attains is a sum of such
    /// exponents, so a gcd `> 1` here means no window can ever certify.
    fn exponent_gcd(&self) -> i64 {
        let mut g: i64 = 0;
        for gen in &self.generators {
            for (e, _) in gen.terms() {
                g = g.gcd(&e);
            }
        }
        g
    }
}

/// Normalizes raw generators: scales each leading coefficient to 1, sorts by
/// valuation, reduces equal-valuation pairs against each other, and drops
/// zero remainders. Rejects data that cannot describe a singular algebroid
/// curve with normalization `k[[t]]`.
pub fn normalize(raw: &[TruncatedSeries]) -> Result<CurveParametrization, RingError> {
    if raw.is_empty() {
        return Err(RingError::EmptyInput);
    }
    let mut gens: Vec<TruncatedSeries> = Vec::with_capacity(raw.len());
    for (index, g) in raw.iter().enumerate() {
        match g.valuation() {
            Valuation::Infinite => return Err(RingError::ZeroGenerator { index }),
            Valuation::Finite(v) if v <= 0 => {
                return Err(RingError::NonPositiveValuation { index, valuation: v })
            }
            Valuation::Finite(v) => {
                let lead = g.coeff(v);
                gens.push(g.scale(&lead.recip()));
            }
        }
    }
    // Eliminate equal leading exponents, like one sweep of Gaussian
    // elimination keyed by valuation.
    let mut reduced: BTreeMap<i64, TruncatedSeries> = BTreeMap::new();
    let mut queue: VecDeque<TruncatedSeries> = gens.into();
    while let Some(g) = queue.pop_front() {
        match g.valuation() {
            Valuation::Infinite => continue, // dependent below the window; tail lives past it
            Valuation::Finite(v) => match reduced.get(&v) {
                Some(e) => {
                    let lead = g.coeff(v);
                    queue.push_back(g.add_scaled(e, &-lead));
                }
                None => {
                    let lead = g.coeff(v);
                    reduced.insert(v, g.scale(&lead.recip()));
                }
            },
        }
    }
    let valuations: Vec<i64> = reduced.keys().copied().collect();
    let generators: Vec<TruncatedSeries> = reduced.into_values().collect();
    if valuations.first() == Some(&1) {
        return Err(RingError::RegularRing("a generator has valuation 1"));
    }
    if generators.len() == 1 {
        return Err(RingError::RegularRing(
            "a single generator remains after reduction",
        ));
    }
    let precision = generators.iter().map(|g| g.precision()).min().unwrap();
    let generators = generators.iter().map(|g| g.truncated(precision)).collect();
    Ok(CurveParametrization {
        generators,
        valuations,
        precision,
    })
}

/// Standard basis of the ring below the working precision: for each attained
/// valuation `s` one monic representative `e_s`, inter-reduced to the unique
/// echelon form (zero coefficients at every other attained valuation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardBasis {
    entries: BTreeMap<i64, TruncatedSeries>,
    precision: i64,
}

impl StandardBasis {
    pub fn entries(&self) -> &BTreeMap<i64, TruncatedSeries> {
        &self.entries
    }

    pub fn entry(&self, valuation: i64) -> Option<&TruncatedSeries> {
        self.entries.get(&valuation)
    }

    /// Attained valuations below the precision, ascending.
    pub fn pivots(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Fully reduces `f` against the basis: repeatedly subtracts the monic
    /// entry matching the remainder's valuation. The result has no visible
    /// coefficient at any attained valuation below `bound`.
    pub fn reduce_below(&self, f: &TruncatedSeries, bound: i64) -> TruncatedSeries {
        let mut rem = f.clone();
        while let Valuation::Finite(v) = rem.valuation() {
            if v >= bound {
                break;
            }
            match self.entries.get(&v) {
                Some(e) => {
                    let c = rem.coeff(v);
                    rem = rem.add_scaled(e, &-c);
                }
                None => break,
            }
        }
        rem
    }

    /// Clears `f`'s coefficient at *every* pivot below `bound`, not stopping
    /// at gap coefficients like [`reduce_below`](Self::reduce_below) does.
    /// One ascending pass suffices: the inter-reduced entries never
    /// reintroduce a coefficient at another pivot. The result exposes `f`'s
    /// residue at the gaps, which is the membership obstruction.
    ///
    /// `f` must not have visible terms below 0 and must be known below
    /// `bound` (callers check precisions first).
    pub fn rref_reduce_below(&self, f: &TruncatedSeries, bound: i64) -> TruncatedSeries {
        debug_assert!(f.precision() >= bound);
        let mut rem = f.clone();
        for (&s, e) in self.entries.range(..bound) {
            let c = rem.coeff(s);
            if !c.is_zero() {
                rem = rem.add_scaled(e, &-c);
            }
        }
        rem
    }
}

/// Runs the completion loop: seed with 1 and the generators, reduce each
/// candidate against the current entries, insert genuinely new valuations,
/// and enqueue the new entry's products with every generator. At the fixed
/// point the entries span the ring's image below the precision: the span
/// contains 1 and is closed under multiplication by each generator, hence
/// contains every monomial in the generators.
pub fn standard_basis(params: &CurveParametrization) -> StandardBasis {
    let p = params.precision;
    let mut entries: BTreeMap<i64, TruncatedSeries> = BTreeMap::new();
    entries.insert(0, TruncatedSeries::one(p));
    let mut queue: VecDeque<TruncatedSeries> = params.generators.iter().cloned().collect();
    while let Some(cand) = queue.pop_front() {
        let mut rem = cand;
        while let Valuation::Finite(v) = rem.valuation() {
            debug_assert!(v < p, "candidate window outran the precision");
            if let Some(e) = entries.get(&v) {
                let c = rem.coeff(v);
                rem = rem.add_scaled(e, &-c);
            } else {
                let lead = rem.coeff(v);
                let monic = rem.scale(&lead.recip()).truncated(p);
                for (g, &a) in params.generators.iter().zip(&params.valuations) {
                    if v + a < p {
                        queue.push_back(monic.mul(g).truncated(p));
                    }
                }
                entries.insert(v, monic);
                break;
            }
        }
    }
    // Inter-reduce to the unique echelon form: processing pivots from the
    // top down, clear each entry's coefficients at all higher pivots.
    let pivots: Vec<i64> = entries.keys().copied().collect();
    for &v in pivots.iter().rev() {
        let mut e = entries[&v].clone();
        let higher: Vec<i64> = pivots.iter().copied().filter(|&w| w > v).collect();
        for w in higher {
            let c = e.coeff(w);
            if !c.is_zero() {
                e = e.add_scaled(&entries[&w], &-c);
            }
        }
        entries.insert(v, e);
    }
    StandardBasis {
        entries,
        precision: p,
    }
}

/// The certified value semigroup of the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupData {
    /// Nonnegative integers the ring does not attain (all below `conductor`).
    pub gaps: Vec<i64>,
    /// Least `c` with `[c, ∞)` entirely attained.
    pub conductor: i64,
    /// Number of gaps.
    pub genus: usize,
    /// Conductor of the *monomial* semigroup `<a_1, ..., a_n>` generated by
    /// the valuations alone, when their gcd is 1.
    pub monomial_semigroup_conductor: Option<i64>,
}

/// Checks that the window proves the semigroup: the attained valuations have
/// gcd 1 and the window ends with a run of at least `a_1` consecutive
/// members. Adding `a_1` then reaches everything beyond the window, so the
/// conductor and gap set read off the window are exact.
fn certify(basis: &StandardBasis, a1: i64) -> Option<i64> {
    let pivots = basis.pivots();
    let mut g: i64 = 0;
    for &s in &pivots {
        g = g.gcd(&s);
    }
    if g != 1 {
        return None;
    }
    let members: std::collections::BTreeSet<i64> = pivots.into_iter().collect();
    let last_gap = (0..basis.precision()).rev().find(|e| !members.contains(e))?;
    let conductor = last_gap + 1;
    if basis.precision() - conductor >= a1 {
        Some(conductor)
    } else {
        None
    }
}

/// Reads the certified semigroup data off a standard basis. Errors when the
/// window does not certify (the caller's precision policy handles retries).
pub fn value_semigroup(
    params: &CurveParametrization,
    basis: &StandardBasis,
) -> Result<SemigroupData, RingError> {
    let a1 = params.valuations[0];
    let conductor = certify(basis, a1).ok_or_else(|| {
        RingError::PrecisionCapExceeded(format!(
            "window [0, {}) does not certify the value semigroup",
            basis.precision()
        ))
    })?;
    let members = basis.entries();
    let gaps: Vec<i64> = (0..conductor).filter(|e| !members.contains_key(e)).collect();
    let genus = gaps.len();
    let vals = params.valuations.clone();
    let gcd_vals = vals.iter().fold(0i64, |g, a| g.gcd(a));
    let monomial_semigroup_conductor = if gcd_vals == 1 {
        // Coprime a_1, a_n already bound the conductor by (a_1 - 1)(a_n - 1),
        // so this sieve window always suffices.
        let a1 = vals[0];
        let an = vals[vals.len() - 1];
        let bound = (a1 - 1) * (an - 1) + a1 + 2;
        let m = monomial_semigroup(&vals, bound)
            .ok_or(RingError::Internal("monomial semigroup sieve bound"))?;
        Some(m.conductor)
    } else {
        None
    };
    Ok(SemigroupData {
        gaps,
        conductor,
        genus,
        monomial_semigroup_conductor,
    })
}

/// The numerical semigroup `<a_1, ..., a_n>` computed by sieving sums, for
/// valuation gcd 1. Returns `None` if no conductor shows up below `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSemigroup {
    pub conductor: i64,
    pub gaps: Vec<i64>,
}

pub fn monomial_semigroup(valuations: &[i64], limit: i64) -> Option<MonomialSemigroup> {
    assert!(!valuations.is_empty());
    let a1 = valuations[0];
    let limit = limit.max(a1 + 2) as usize;
    let mut reachable = vec![false; limit];
    reachable[0] = true;
    let mut run = 0i64;
    let mut last_gap = -1i64;
    for e in 1..limit {
        reachable[e] = valuations
            .iter()
            .any(|&a| (a as usize) <= e && reachable[e - a as usize]);
        if reachable[e] {
            run += 1;
            if run >= a1 && last_gap >= 0 {
                let conductor = last_gap + 1;
                let gaps = (1..conductor)
                    .filter(|&g| !reachable[g as usize])
                    .collect();
                return Some(MonomialSemigroup { conductor, gaps });
            }
        } else {
            run = 0;
            last_gap = e as i64;
        }
    }
    None
}

/// A fully built curve ring: normalized parametrization, standard basis, and
/// certified value semigroup at one working precision.
#[derive(Debug, Clone)]
pub struct CurveRing {
    params: CurveParametrization,
    /// Normalization of the input at full written precision (every input
    /// term inside the window). Order-of-unit readings must come from here,
    /// never from the working window, where a dropped tail could masquerade
    /// as "no tail".
    exact_params: CurveParametrization,
    basis: StandardBasis,
    semigroup: SemigroupData,
}

impl CurveRing {
    /// Builds from exact polynomial generators, choosing the working
    /// precision automatically.
    ///
    /// With valuation gcd 1 the window `P = 2(c_0 + 1) + a_n` (where `c_0`
    /// is the conductor of `<a_1, ..., a_n>`) certifies in one shot, since
    /// the ring's conductor is at most `c_0`. Otherwise unit tails must
    /// rescue the gcd, which no a-priori bound controls, so the window
    /// doubles from `4 a_n` until certification or the cap.
    pub fn from_polynomials(
        polys: &[PolyTerms],
        policy: &PrecisionPolicy,
    ) -> Result<Self, RingError> {
        if polys.is_empty() {
            return Err(RingError::EmptyInput);
        }
        let cap = policy.max_precision;
        // Provisional exact pass: windows past every written exponent, so
        // normalization decisions (valuations, drops) are exact.
        let max_exp = polys
            .iter()
            .flat_map(|p| p.iter().map(|(e, _)| *e))
            .max()
            .unwrap_or(0)
            .max(0);
        let provisional = Self::materialize_and_normalize(polys, max_exp + 2)?;
        let vals = provisional.valuations.clone();
        let a_n = *vals.last().unwrap();
        let exponent_gcd = provisional.exponent_gcd();
        if exponent_gcd > 1 {
            return Err(RingError::PrecisionCapExceeded(format!(
                "every generator exponent is divisible by {exponent_gcd}, so the value \
                 semigroup cannot have gcd 1 at any precision"
            )));
        }
        if let Some(p) = policy.precision {
            if p > cap {
                return Err(RingError::PrecisionCapExceeded(format!(
                    "requested precision {p} exceeds the cap {cap}"
                )));
            }
            if p <= a_n {
                return Err(RingError::InsufficientPrecision {
                    have: p,
                    need: a_n + 1,
                });
            }
            return Self::build_at(polys, p, &provisional).and_then(|r| {
                r.ok_or_else(|| {
                    RingError::PrecisionCapExceeded(format!(
                        "requested precision {p} does not certify the value semigroup; \
                         raise --precision"
                    ))
                })
            });
        }
        let gcd_vals = vals.iter().fold(0i64, |g, a| g.gcd(a));
        if gcd_vals == 1 {
            let c0 = monomial_semigroup(&vals, cap)
                .ok_or_else(|| {
                    RingError::PrecisionCapExceeded(format!(
                        "the monomial semigroup of the valuations has no conductor below {cap}"
                    ))
                })?
                .conductor;
            let p = 2 * (c0 + 1) + a_n;
            if p > cap {
                return Err(RingError::PrecisionCapExceeded(format!(
                    "the policy window {p} (from monomial conductor {c0}) exceeds the cap {cap}"
                )));
            }
            return Self::build_at(polys, p, &provisional)?
                .ok_or(RingError::Internal("policy window failed to certify"));
        }
        // Valuation gcd > 1: double and hope the tails break the gcd.
        let mut p = (4 * a_n).max(8);
        while p <= cap {
            if let Some(ring) = Self::build_at(polys, p, &provisional)? {
                return Ok(ring);
            }
            p *= 2;
        }
        Err(RingError::PrecisionCapExceeded(format!(
            "no window up to {cap} certifies the value semigroup (valuation gcd {gcd_vals} \
             never resolved to 1)"
        )))
    }

    /// Single-shot build from already-truncated series at their own
    /// precision. Errors if that window does not certify. The series are
    /// taken as the full story: their windows double as the exact data.
    pub fn from_series(raw: &[TruncatedSeries]) -> Result<Self, RingError> {
        let params = normalize(raw)?;
        let basis = standard_basis(&params);
        let semigroup = value_semigroup(&params, &basis)?;
        Ok(CurveRing {
            exact_params: params.clone(),
            params,
            basis,
            semigroup,
        })
    }

    fn materialize_and_normalize(
        polys: &[PolyTerms],
        precision: i64,
    ) -> Result<CurveParametrization, RingError> {
        let raw: Vec<TruncatedSeries> = polys
            .iter()
            .map(|p| TruncatedSeries::from_terms(p, precision))
            .collect();
        normalize(&raw)
    }

    /// One build attempt at a fixed window; `Ok(None)` means "did not
    /// certify, try a bigger window". Normalization failures that can only
    /// be truncation artifacts (a generator whose distinguishing terms sit
    /// past this window) also map to `Ok(None)`: the caller's provisional
    /// exact pass already vetted the input.
    fn build_at(
        polys: &[PolyTerms],
        precision: i64,
        exact: &CurveParametrization,
    ) -> Result<Option<Self>, RingError> {
        let params = match Self::materialize_and_normalize(polys, precision) {
            Ok(p) => p,
            Err(RingError::RegularRing(_)) | Err(RingError::ZeroGenerator { .. }) => {
                return Ok(None)
            }
            Err(e) => return Err(e),
        };
        let basis = standard_basis(&params);
        match value_semigroup(&params, &basis) {
            Ok(semigroup) => Ok(Some(CurveRing {
                params,
                exact_params: exact.clone(),
                basis,
                semigroup,
            })),
            Err(RingError::PrecisionCapExceeded(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn params(&self) -> &CurveParametrization {
        &self.params
    }

    /// The normalized input with every written term inside the window.
    /// Valuation lists here and in [`params`](Self::params) can differ when
    /// a generator's distinguishing terms sit beyond the working window; the
    /// leading structure always agrees.
    pub fn exact_params(&self) -> &CurveParametrization {
        &self.exact_params
    }

    pub fn basis(&self) -> &StandardBasis {
        &self.basis
    }

    pub fn semigroup(&self) -> &SemigroupData {
        &self.semigroup
    }

    pub fn generators(&self) -> &[TruncatedSeries] {
        self.params.generators()
    }

    pub fn valuations(&self) -> &[i64] {
        self.params.valuations()
    }

    pub fn precision(&self) -> i64 {
        self.params.precision()
    }

    pub fn conductor(&self) -> i64 {
        self.semigroup.conductor
    }

    pub fn genus(&self) -> usize {
        self.semigroup.genus
    }

    /// Multiplicity of the ring = least attained positive valuation = `a_1`.
    pub fn multiplicity(&self) -> i64 {
        self.params.valuations()[0]
    }

    /// Membership test: `f ∈ R`?
    ///
    /// `f` must be known below the conductor. Reduction against the basis
    /// below the conductor is exact because `t^c k[[t]] ⊆ R`: once the
    /// remainder's visible valuation reaches `c`, the rest lies in `R`
    /// regardless of its unseen tail.
    pub fn contains(&self, f: &TruncatedSeries) -> Result<bool, RingError> {
        let c = self.semigroup.conductor;
        if f.precision() < c {
            return Err(RingError::InsufficientPrecision {
                have: f.precision(),
                need: c,
            });
        }
        match f.valuation() {
            Valuation::Infinite => Ok(true),
            Valuation::Finite(v) if v < 0 => Ok(false),
            Valuation::Finite(_) => {
                let rem = self.basis.reduce_below(f, c);
                match rem.valuation() {
                    Valuation::Infinite => Ok(true),
                    Valuation::Finite(v) => Ok(v >= c),
                }
            }
        }
    }
}
