//! The two quasihomogeneity analyses and the combined report.
//!
//! A curve ring is *quasihomogeneous* when it is isomorphic to a numerical
//! semigroup ring `k[[t^e : e ∈ Γ]]` — equivalently, when some coordinate
//! change makes every generator a monomial (up to conductor absorption).
//!
//! Two tests are implemented:
//!
//! * a **sufficient valuation criterion** on the unit tails: with
//!   `o(α_i) = v(α_i − 1)` the order of each generator's unit part,
//!   `r = argmin o(α_i)`, and `a = min_{j≠r} a_j`, the inequality
//!   `o(α_r) + a ≥ c` forces quasihomogeneity and comes with an explicit
//!   new uniformizer (an `a₁`-th root plus a series reversion);
//! * an **exact trace criterion**: `R` is quasihomogeneous iff the trace of
//!   the derivative ideal has valuation `v(𝔪) = a₁`, iff `v(𝒟⁻¹) = 1`, iff
//!   the invariant `h = ℓ(R̄/𝒟) − ℓ(R̄/R) + v(𝒟⁻¹)` equals 1.
//!
//! The equivalent forms are computed independently and cross-checked; any
//! disagreement is reported as an internal-consistency error, never as a
//! verdict.

use thiserror::Error;

use crate::ideal::{derivative_ideal, IdealError};
use crate::ring::{
    monomial_semigroup, CurveRing, PolyTerms, PrecisionPolicy, RingError, SemigroupData,
    DEFAULT_MAX_PRECISION,
};
use crate::series::{SeriesError, TruncatedSeries, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("reparametrization requires the valuation criterion to be met")]
    CriterionNotMet,
    #[error("reparametrization certificate failed: {0}")]
    VerificationFailed(&'static str),
    #[error("internal consistency failure: {0}")]
    Inconsistent(&'static str),
}

/// Which criteria to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Check {
    Valuation,
    Trace,
    #[default]
    All,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Fixed working precision; `None` selects it automatically.
    pub precision: Option<i64>,
    /// Cap for the automatic precision search.
    pub max_precision: i64,
    pub check: Check,
    /// Attempt the constructive reparametrization when the valuation
    /// criterion is met.
    pub reparametrize: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            precision: None,
            max_precision: DEFAULT_MAX_PRECISION,
            check: Check::All,
            reparametrize: false,
        }
    }
}

/// Outcome of the sufficient valuation criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationCriterionResult {
    /// `o(α_i) = v(α_i − 1)` per generator, `Infinite` meaning the generator
    /// is exactly a monomial. Read from the full written input, so a finite
    /// tail can never hide past the working window.
    pub order_values: Vec<Valuation>,
    /// 1-based index attaining the minimal order (smallest index on ties).
    pub r: usize,
    /// `min_{j ≠ r} a_j`.
    pub a: i64,
    /// The ring's conductor `c`.
    pub conductor: i64,
    /// Whether `o(α_r) + a ≥ c` (trivially true in the monomial case).
    pub met: bool,
    /// All generators are monomials: the criterion holds without
    /// arithmetic on infinite orders.
    pub monomial: bool,
}

/// Outcome of the exact trace criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCriterionResult {
    /// `v(𝒟) = a₁ − 1`.
    pub v_d: i64,
    /// `v(𝒟⁻¹)`, from the window linear system.
    pub v_d_inverse: i64,
    /// `v(tr(𝒟)) = v(𝒟) + v(𝒟⁻¹)`, confirmed on the product ideal.
    pub v_trace: i64,
    /// `v(𝔪) = a₁`.
    pub v_maximal_ideal: i64,
    /// The exact verdict: `v_trace == v_maximal_ideal`.
    pub quasihomogeneous: bool,
    /// `h = ℓ(R̄/𝒟) − ℓ(R̄/R) + v(𝒟⁻¹)`; equals 1 exactly in the
    /// quasihomogeneous case.
    pub h_invariant: i64,
}

/// A certified change of uniformizer exhibiting the ring as a monomial
/// (semigroup) ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reparametrization {
    /// The new uniformizer `s(t)`, valuation 1.
    pub new_uniformizer: TruncatedSeries,
    /// The old one in terms of the new: `t(s)`, with
    /// `t(s(t)) = t` up to precision.
    pub inverse_parameter: TruncatedSeries,
    /// The generator valuations `a₁, …, aₙ`: each `s^{a_i}` lies in the
    /// ring, and together with the conductor tail they span it.
    pub monomial_exponents: Vec<i64>,
}

/// The full report for one ring. Pure data: identical inputs produce
/// bit-identical reports.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub normalized_generators: Vec<TruncatedSeries>,
    pub valuations: Vec<i64>,
    pub precision: i64,
    pub semigroup: SemigroupData,
    pub valuation_criterion: Option<ValuationCriterionResult>,
    pub trace_criterion: Option<TraceCriterionResult>,
    pub reparametrization: Option<Reparametrization>,
    /// `Some(true)` when either criterion certifies quasihomogeneity,
    /// `Some(false)` when the trace criterion refutes it, `None` when only
    /// the (sufficient) valuation criterion ran and was not met.
    pub quasihomogeneous: Option<bool>,
}

/// Evaluates the sufficient criterion `o(α_r) + a ≥ c`.
pub fn check_valuation_criterion(ring: &CurveRing) -> ValuationCriterionResult {
    let exact = ring.exact_params();
    let n = exact.generators().len();
    let order_values: Vec<Valuation> = (0..n)
        .map(|i| {
            exact
                .unit_part(i)
                .order_of_unit()
                .expect("normalized unit parts have constant term 1")
        })
        .collect();
    let mut r0 = 0usize;
    for (i, o) in order_values.iter().enumerate() {
        if *o < order_values[r0] {
            r0 = i;
        }
    }
    let a = exact
        .valuations()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != r0)
        .map(|(_, &aj)| aj)
        .min()
        .expect("normalized parametrizations have at least two generators");
    let conductor = ring.conductor();
    let (met, monomial) = match order_values[r0] {
        Valuation::Infinite => (true, true),
        Valuation::Finite(o) => (o + a >= conductor, false),
    };
    ValuationCriterionResult {
        order_values,
        r: r0 + 1,
        a,
        conductor,
        met,
        monomial,
    }
}

/// Evaluates the exact trace criterion and the `h` invariant, with the
/// equivalence chain cross-asserted.
pub fn check_trace_criterion(ring: &CurveRing) -> Result<TraceCriterionResult, AnalysisError> {
    let a1 = ring.multiplicity();
    let d = derivative_ideal(ring);
    let v_d = d.min_valuation();
    if v_d != a1 - 1 {
        return Err(AnalysisError::Inconsistent(
            "derivative ideal valuation is not a1 - 1",
        ));
    }
    let inv = d.inverse(ring)?;
    let v_d_inverse = inv.min_valuation();
    let v_trace = v_d + v_d_inverse;
    let tr = d.multiply(&inv);
    if tr.min_valuation() != v_trace {
        return Err(AnalysisError::Inconsistent(
            "trace valuation does not add up",
        ));
    }
    let quasihomogeneous = v_trace == a1;
    let h_invariant = d.colength(ring)? - ring.genus() as i64 + v_d_inverse;
    if h_invariant < 1 {
        return Err(AnalysisError::Inconsistent("h invariant below 1"));
    }
    if h_invariant > v_d_inverse {
        return Err(AnalysisError::Inconsistent(
            "h invariant exceeds v(D^-1)",
        ));
    }
    if quasihomogeneous != (v_d_inverse == 1) {
        return Err(AnalysisError::Inconsistent(
            "trace verdict disagrees with v(D^-1) = 1",
        ));
    }
    if quasihomogeneous != (h_invariant == 1) {
        return Err(AnalysisError::Inconsistent(
            "trace verdict disagrees with h = 1",
        ));
    }
    Ok(TraceCriterionResult {
        v_d,
        v_d_inverse,
        v_trace,
        v_maximal_ideal: a1,
        quasihomogeneous,
        h_invariant,
    })
}

/// The `h` invariant alone.
pub fn h_invariant(ring: &CurveRing) -> Result<i64, AnalysisError> {
    check_trace_criterion(ring).map(|t| t.h_invariant)
}

/// Constructs and certifies the new uniformizer promised by the valuation
/// criterion.
///
/// Monomial inputs and minimal order at `r ≥ 2` keep `s = t`: the unit
/// tails' contributions all land beyond the conductor. For `r = 1`, `s = βt`
/// with `β = α₁^{1/a₁}`, so `s^{a₁} = x₁` exactly, and `t(s)` comes from
/// series reversion.
///
/// The certificate (all checked, failure = implementation bug):
/// `t(s(t)) = t`; `s^{a₁} = x₁` on the `r = 1` branch; `s^{a_i} ∈ R` for
/// every `i`; and when the value semigroup is generated by the `a_i` alone,
/// the sieve of `⟨a₁, …, aₙ⟩` reproduces the conductor.
pub fn reparametrize(
    ring: &CurveRing,
    crit: &ValuationCriterionResult,
) -> Result<Reparametrization, AnalysisError> {
    if !crit.met {
        return Err(AnalysisError::CriterionNotMet);
    }
    let p = ring.precision();
    let a1 = ring.valuations()[0];
    let (s, t_back) = if crit.monomial || crit.r >= 2 {
        let id = TruncatedSeries::identity(p);
        (id.clone(), id)
    } else {
        let alpha = ring.params().unit_part(0);
        let beta = alpha.nth_root_of_unit(a1 as u32)?;
        let s = beta.shifted(1);
        let t_back = s.reversion()?;
        (s, t_back)
    };
    // t(s(t)) must be the identity; s(t(s)) was already verified inside the
    // reversion, so this closes the loop from the other side.
    let round_trip = t_back.compose(&s)?;
    let bound = round_trip.precision();
    if !round_trip.agrees_below(&TruncatedSeries::identity(bound), bound) {
        return Err(AnalysisError::VerificationFailed(
            "uniformizer round trip is not the identity",
        ));
    }
    if crit.r == 1 && !crit.monomial {
        let s_a1 = s.pow(a1 as u32);
        let x1 = &ring.generators()[0];
        let bound = s_a1.precision().min(x1.precision());
        if !s_a1.agrees_below(x1, bound) {
            return Err(AnalysisError::VerificationFailed(
                "s^{a_1} does not reproduce the first generator",
            ));
        }
    }
    for &ai in ring.valuations() {
        let power = s.pow(ai as u32);
        if !ring.contains(&power)? {
            return Err(AnalysisError::VerificationFailed(
                "a power s^{a_i} falls outside the ring",
            ));
        }
    }
    // When Γ = <a_1, ..., a_n> (no tail-created values), the monomial sieve
    // must reproduce the ring's semigroup on the nose. When the semigroup is
    // not monomially generated, the exponent list still spans the ring
    // together with the conductor tail, and no sieve check applies.
    if let Some(m) = monomial_semigroup(ring.valuations(), 4 * ring.precision()) {
        if m.gaps == ring.semigroup().gaps && m.conductor != ring.conductor() {
            return Err(AnalysisError::Inconsistent(
                "sieve conductor disagrees on a monomially generated semigroup",
            ));
        }
    }
    Ok(Reparametrization {
        new_uniformizer: s,
        inverse_parameter: t_back,
        monomial_exponents: ring.valuations().to_vec(),
    })
}

/// Full pipeline from exact polynomial generators.
pub fn analyze(polys: &[PolyTerms], options: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let policy = PrecisionPolicy {
        precision: options.precision,
        max_precision: options.max_precision,
    };
    let ring = CurveRing::from_polynomials(polys, &policy)?;
    analyze_ring(&ring, options)
}

/// Full pipeline over an already-built ring.
pub fn analyze_ring(
    ring: &CurveRing,
    options: &AnalysisOptions,
) -> Result<AnalysisReport, AnalysisError> {
    let want_valuation =
        matches!(options.check, Check::Valuation | Check::All) || options.reparametrize;
    let want_trace = matches!(options.check, Check::Trace | Check::All);
    let valuation_criterion = want_valuation.then(|| check_valuation_criterion(ring));
    let trace_criterion = if want_trace {
        Some(check_trace_criterion(ring)?)
    } else {
        None
    };
    if let (Some(vc), Some(tc)) = (&valuation_criterion, &trace_criterion) {
        if vc.met && !tc.quasihomogeneous {
            return Err(AnalysisError::Inconsistent(
                "sufficient criterion met but exact criterion negative",
            ));
        }
    }
    let reparametrization = match &valuation_criterion {
        Some(vc) if options.reparametrize && vc.met => Some(reparametrize(ring, vc)?),
        _ => None,
    };
    let quasihomogeneous = match (&trace_criterion, &valuation_criterion) {
        (Some(tc), _) => Some(tc.quasihomogeneous),
        (None, Some(vc)) if vc.met => Some(true),
        _ => None,
    };
    Ok(AnalysisReport {
        normalized_generators: ring.generators().to_vec(),
        valuations: ring.valuations().to_vec(),
        precision: ring.precision(),
        semigroup: ring.semigroup().clone(),
        valuation_criterion,
        trace_criterion,
        reparametrization,
        quasihomogeneous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, Rat};

    fn polys(defs: &[&[(i64, i64)]]) -> Vec<PolyTerms> {
        defs.iter()
            .map(|d| d.iter().map(|&(e, c)| (e, rat(c))).collect())
            .collect()
    }

    fn run(defs: &[&[(i64, i64)]], reparametrize: bool) -> AnalysisReport {
        let options = AnalysisOptions {
            reparametrize,
            ..AnalysisOptions::default()
        };
        analyze(&polys(defs), &options).unwrap()
    }

    #[test]
    fn perturbed_curve_meets_both_criteria() {
        let report = run(&[&[(4, 1), (5, 1)], &[(7, 1)], &[(8, 1)], &[(9, 1)]], true);
        assert_eq!(report.valuations, vec![4, 7, 8, 9]);
        assert_eq!(report.semigroup.conductor, 7);

        let vc = report.valuation_criterion.as_ref().unwrap();
        assert_eq!(vc.order_values[0], Valuation::Finite(1));
        assert_eq!(vc.r, 1);
        assert_eq!(vc.a, 7);
        assert!(vc.met && !vc.monomial);

        let tc = report.trace_criterion.as_ref().unwrap();
        assert!(tc.quasihomogeneous);
        assert_eq!(tc.v_d, 3);
        assert_eq!(tc.v_d_inverse, 1);
        assert_eq!(tc.v_trace, 4);
        assert_eq!(tc.v_maximal_ideal, 4);
        assert_eq!(tc.h_invariant, 1);
        assert_eq!(report.quasihomogeneous, Some(true));

        let rep = report.reparametrization.as_ref().unwrap();
        assert_eq!(rep.monomial_exponents, vec![4, 7, 8, 9]);
        // s = t + t^2/4 + ... : the fourth root of 1 + t, shifted.
        assert_eq!(rep.new_uniformizer.coeff(1), rat(1));
        assert_eq!(rep.new_uniformizer.coeff(2), Rat::new(1.into(), 4.into()));
    }

    #[test]
    fn tailed_curve_fails_valuation_but_trace_decides() {
        let report = run(&[&[(5, 1)], &[(6, 1)], &[(8, 1), (9, 1)]], true);
        assert_eq!(report.semigroup.conductor, 10);

        let vc = report.valuation_criterion.as_ref().unwrap();
        assert_eq!(vc.order_values, vec![
            Valuation::Infinite,
            Valuation::Infinite,
            Valuation::Finite(1),
        ]);
        assert_eq!(vc.r, 3);
        assert_eq!(vc.a, 5);
        assert!(!vc.met);

        let tc = report.trace_criterion.as_ref().unwrap();
        assert!(!tc.quasihomogeneous);
        assert_eq!(tc.v_d, 4);
        assert_eq!(tc.v_d_inverse, 6);
        assert_eq!(tc.v_trace, 10);
        assert_eq!(tc.v_maximal_ideal, 5);
        assert_eq!(tc.h_invariant, 6);
        assert_eq!(report.quasihomogeneous, Some(false));
        // No reparametrization on an unmet criterion, even when requested.
        assert!(report.reparametrization.is_none());
    }

    #[test]
    fn monomial_curve_takes_the_trivial_branch() {
        let report = run(&[&[(4, 1)], &[(5, 1)], &[(6, 1)]], true);
        let vc = report.valuation_criterion.as_ref().unwrap();
        assert!(vc.monomial && vc.met);
        assert!(vc.order_values.iter().all(|o| o.is_infinite()));
        let tc = report.trace_criterion.as_ref().unwrap();
        assert!(tc.quasihomogeneous);
        assert_eq!(tc.h_invariant, 1);
        let rep = report.reparametrization.as_ref().unwrap();
        assert_eq!(
            rep.new_uniformizer,
            TruncatedSeries::identity(report.precision)
        );
        assert_eq!(rep.monomial_exponents, vec![4, 5, 6]);
    }

    #[test]
    fn second_generator_branch_reparametrizes_with_identity() {
        // o(α₁) = ∞, o(α₂) = 1, so r = 2 and s stays t; the tail t^4 of the
        // second generator lands beyond the conductor 2.
        let report = run(&[&[(2, 1)], &[(3, 1), (4, 1)]], true);
        let vc = report.valuation_criterion.as_ref().unwrap();
        assert_eq!(vc.r, 2);
        assert_eq!(vc.a, 2);
        assert_eq!(vc.conductor, 2);
        assert!(vc.met && !vc.monomial);
        let rep = report.reparametrization.as_ref().unwrap();
        assert_eq!(
            rep.new_uniformizer,
            TruncatedSeries::identity(report.precision)
        );
        assert_eq!(report.quasihomogeneous, Some(true));
    }

    #[test]
    fn deeper_tail_on_second_generator_still_meets() {
        // o(α₂) = 3, a = 2, conductor of <2,5> is 4: met since 3 + 2 >= 4.
        let report = run(&[&[(2, 1)], &[(5, 1), (8, 1)]], true);
        let vc = report.valuation_criterion.as_ref().unwrap();
        assert_eq!(vc.order_values[1], Valuation::Finite(3));
        assert_eq!(vc.r, 2);
        assert_eq!(vc.conductor, 4);
        assert!(vc.met);
        assert!(report.reparametrization.is_some());
        assert_eq!(report.quasihomogeneous, Some(true));
    }

    #[test]
    fn reparametrization_certificate_external_checks() {
        // Re-run the certificate's key identities from outside.
        let options = AnalysisOptions {
            reparametrize: true,
            ..AnalysisOptions::default()
        };
        let input = polys(&[&[(4, 1), (5, 1)], &[(7, 1)], &[(8, 1)], &[(9, 1)]]);
        let report = analyze(&input, &options).unwrap();
        let rep = report.reparametrization.unwrap();
        let s = &rep.new_uniformizer;
        let back = &rep.inverse_parameter;
        let comp = s.compose(back).unwrap();
        assert!(comp.agrees_below(
            &TruncatedSeries::identity(comp.precision()),
            comp.precision()
        ));
        // s^4 = t^4 + t^5 exactly within the window.
        let s4 = s.pow(4);
        assert_eq!(s4.coeff(4), rat(1));
        assert_eq!(s4.coeff(5), rat(1));
        assert!((6..s4.precision()).all(|e| s4.coeff(e) == rat(0)));
    }

    #[test]
    fn semigroup_with_tail_created_values_still_certifies() {
        // Γ(t^2 + t^3, t^4) = {0, 2, 4, 5, ...}: the value 5 comes from
        // x₁² − x₂, not from any monomial in the generators, so <2, 4>
        // (gcd 2) is a strictly smaller sieve and the conductor comparison
        // must be skipped — yet the criterion is met (1 + 4 ≥ 4) and the
        // certificate's containment checks all pass.
        let report = run(&[&[(2, 1), (3, 1)], &[(4, 1)]], true);
        assert_eq!(report.semigroup.conductor, 4);
        assert_eq!(report.semigroup.gaps, vec![1, 3]);
        assert_eq!(report.semigroup.monomial_semigroup_conductor, None);
        let vc = report.valuation_criterion.as_ref().unwrap();
        assert_eq!(vc.r, 1);
        assert!(vc.met);
        let rep = report.reparametrization.as_ref().unwrap();
        // s² = x₁ exactly: s = t(1 + t)^{1/2}.
        let s2 = rep.new_uniformizer.pow(2);
        let x1 = &report.normalized_generators[0];
        let bound = s2.precision().min(x1.precision());
        assert!(s2.agrees_below(x1, bound));
        assert_eq!(report.quasihomogeneous, Some(true));
    }

    #[test]
    fn check_selection_limits_the_report() {
        let input = polys(&[&[(5, 1)], &[(6, 1)], &[(8, 1), (9, 1)]]);
        let val_only = analyze(
            &input,
            &AnalysisOptions {
                check: Check::Valuation,
                ..AnalysisOptions::default()
            },
        )
        .unwrap();
        assert!(val_only.valuation_criterion.is_some());
        assert!(val_only.trace_criterion.is_none());
        // Sufficient criterion unmet: no verdict at all.
        assert_eq!(val_only.quasihomogeneous, None);

        let trace_only = analyze(
            &input,
            &AnalysisOptions {
                check: Check::Trace,
                ..AnalysisOptions::default()
            },
        )
        .unwrap();
        assert!(trace_only.valuation_criterion.is_none());
        assert_eq!(trace_only.quasihomogeneous, Some(false));
    }

    #[test]
    fn reports_are_deterministic() {
        let input = polys(&[&[(4, 1), (5, 1)], &[(7, 1)], &[(8, 1)], &[(9, 1)]]);
        let options = AnalysisOptions {
            reparametrize: true,
            ..AnalysisOptions::default()
        };
        let a = analyze(&input, &options).unwrap();
        let b = analyze(&input, &options).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn h_invariant_shortcut_matches_the_full_result() {
        let ring = crate::ring::CurveRing::from_polynomials(
            &polys(&[&[(5, 1)], &[(6, 1)], &[(8, 1), (9, 1)]]),
            &crate::ring::PrecisionPolicy::default(),
        )
        .unwrap();
        assert_eq!(h_invariant(&ring).unwrap(), 6);
    }

    #[test]
    fn direct_reparametrize_rejects_unmet_criterion() {
        let ring = crate::ring::CurveRing::from_polynomials(
            &polys(&[&[(5, 1)], &[(6, 1)], &[(8, 1), (9, 1)]]),
            &crate::ring::PrecisionPolicy::default(),
        )
        .unwrap();
        let crit = check_valuation_criterion(&ring);
        assert!(matches!(
            reparametrize(&ring, &crit),
            Err(AnalysisError::CriterionNotMet)
        ));
    }
}
