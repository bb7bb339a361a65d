//! Lossless serialization of analysis reports, plus the text rendering.
//!
//! The JSON document mirrors [`AnalysisReport`](crate::analysis::AnalysisReport)
//! field for field. Exact rationals are rendered as strings (`"3/2"`, `"-1"`,
//! never floats), infinite order values as the string `"inf"`, and series as
//! `(exponent, coefficient)` pairs together with their precision, so a
//! document re-reads to exactly the structure that produced it.

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisReport;
use crate::series::{Rat, TruncatedSeries, Valuation};

/// Wall-clock stage timings in integer microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub parse_us: u64,
    pub build_us: u64,
    pub analysis_us: u64,
    pub total_us: u64,
}

/// A series as exact data: nonzero `(exponent, coefficient)` pairs in
/// exponent order, and the exclusive knowledge bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub coefficients: Vec<(i64, String)>,
    pub precision: i64,
}

impl SeriesDocument {
    fn from_series(s: &TruncatedSeries) -> Self {
        SeriesDocument {
            coefficients: s.terms().map(|(e, c)| (e, rat_string(c))).collect(),
            precision: s.precision(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupDocument {
    pub gaps: Vec<i64>,
    pub conductor: i64,
    pub genus: i64,
}

/// A generator's order value: an integer, or the string `"inf"` for an
/// exact monomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderValue {
    Finite(i64),
    Infinite(String),
}

impl From<Valuation> for OrderValue {
    fn from(v: Valuation) -> Self {
        match v {
            Valuation::Finite(o) => OrderValue::Finite(o),
            Valuation::Infinite => OrderValue::Infinite("inf".to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationCriterionDocument {
    pub order_values: Vec<OrderValue>,
    /// 1-based index of the generator with minimal order value.
    pub r: usize,
    pub a: i64,
    pub conductor: i64,
    pub met: bool,
    pub monomial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCriterionDocument {
    #[serde(rename = "v_D")]
    pub v_d: i64,
    #[serde(rename = "v_D_inverse")]
    pub v_d_inverse: i64,
    pub v_trace: i64,
    pub v_maximal_ideal: i64,
    pub quasihomogeneous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReparametrizationDocument {
    pub uniformizer: SeriesDocument,
    pub inverse_parameter: SeriesDocument,
    pub exponents: Vec<i64>,
}

/// The full serializable report for one ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub normalized_generators: Vec<SeriesDocument>,
    pub valuations: Vec<i64>,
    pub precision: i64,
    pub semigroup: SemigroupDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation_criterion: Option<ValuationCriterionDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_criterion: Option<TraceCriterionDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_invariant: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reparametrization: Option<ReparametrizationDocument>,
    /// `true`/`false` when decided, `null` when only the sufficient
    /// criterion ran and was inconclusive.
    pub quasihomogeneous: Option<bool>,
    pub timings: Timings,
}

fn rat_string(c: &Rat) -> String {
    // `Ratio` displays as `p` for integers and `p/q` otherwise, which is
    // exactly the input grammar's coefficient syntax.
    c.to_string()
}

/// Converts an in-memory report (plus measured timings) into the
/// serializable document.
pub fn report_document(report: &AnalysisReport, timings: Timings) -> ReportDocument {
    ReportDocument {
        normalized_generators: report
            .normalized_generators
            .iter()
            .map(SeriesDocument::from_series)
            .collect(),
        valuations: report.valuations.clone(),
        precision: report.precision,
        semigroup: SemigroupDocument {
            gaps: report.semigroup.gaps.clone(),
            conductor: report.semigroup.conductor,
            genus: report.semigroup.genus as i64,
        },
        valuation_criterion: report.valuation_criterion.as_ref().map(|vc| {
            ValuationCriterionDocument {
                order_values: vc.order_values.iter().map(|&o| o.into()).collect(),
                r: vc.r,
                a: vc.a,
                conductor: vc.conductor,
                met: vc.met,
                monomial: vc.monomial,
            }
        }),
        trace_criterion: report.trace_criterion.as_ref().map(|tc| {
            TraceCriterionDocument {
                v_d: tc.v_d,
                v_d_inverse: tc.v_d_inverse,
                v_trace: tc.v_trace,
                v_maximal_ideal: tc.v_maximal_ideal,
                quasihomogeneous: tc.quasihomogeneous,
            }
        }),
        h_invariant: report.trace_criterion.as_ref().map(|tc| tc.h_invariant),
        reparametrization: report.reparametrization.as_ref().map(|rep| {
            ReparametrizationDocument {
                uniformizer: SeriesDocument::from_series(&rep.new_uniformizer),
                inverse_parameter: SeriesDocument::from_series(&rep.inverse_parameter),
                exponents: rep.monomial_exponents.clone(),
            }
        }),
        quasihomogeneous: report.quasihomogeneous,
        timings,
    }
}

/// The one-line verdict, e.g.
/// `NOT quasihomogeneous (trace criterion); valuation criterion inconclusive (6 < 10)`.
pub fn verdict_line(doc: &ReportDocument) -> String {
    let valuation_part = doc.valuation_criterion.as_ref().map(|vc| {
        if vc.monomial {
            "met (monomial generators)".to_string()
        } else {
            let o = vc
                .order_values
                .get(vc.r - 1)
                .and_then(|v| match v {
                    OrderValue::Finite(o) => Some(*o),
                    OrderValue::Infinite(_) => None,
                })
                .expect("non-monomial criterion has a finite minimal order");
            if vc.met {
                format!("met ({} >= {})", o + vc.a, vc.conductor)
            } else {
                format!("inconclusive ({} < {})", o + vc.a, vc.conductor)
            }
        }
    });
    match (&doc.trace_criterion, valuation_part) {
        (Some(tc), Some(vp)) => {
            let head = if tc.quasihomogeneous {
                "quasihomogeneous (trace criterion)"
            } else {
                "NOT quasihomogeneous (trace criterion)"
            };
            format!("{head}; valuation criterion {vp}")
        }
        (Some(tc), None) => {
            if tc.quasihomogeneous {
                "quasihomogeneous (trace criterion)".to_string()
            } else {
                "NOT quasihomogeneous (trace criterion)".to_string()
            }
        }
        (None, Some(vp)) => {
            if doc.quasihomogeneous == Some(true) {
                format!("quasihomogeneous (valuation criterion {vp})")
            } else {
                format!("undecided; valuation criterion {vp} (sufficient only; rerun with trace check)")
            }
        }
        (None, None) => "no criterion was run".to_string(),
    }
}

fn render_series_list(docs: &[SeriesDocument]) -> String {
    docs.iter()
        .map(|d| {
            let terms: Vec<String> = d
                .coefficients
                .iter()
                .map(|(e, c)| match (c.as_str(), e) {
                    ("1", 1) => "t".to_string(),
                    ("1", _) => format!("t^{e}"),
                    (_, 1) => format!("{c}*t"),
                    (_, _) => format!("{c}*t^{e}"),
                })
                .collect();
            terms.join(" + ").replace("+ -", "- ")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_list(xs: &[i64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// The multi-line human-readable report.
pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "generators (normalized, precision {}): {}\n",
        doc.precision,
        render_series_list(&doc.normalized_generators)
    ));
    out.push_str(&format!("valuations: {}\n", render_list(&doc.valuations)));
    out.push_str(&format!(
        "semigroup: conductor {}, genus {}, gaps {{{}}}\n",
        doc.semigroup.conductor,
        doc.semigroup.genus,
        render_list(&doc.semigroup.gaps)
    ));
    if let Some(vc) = &doc.valuation_criterion {
        let orders: Vec<String> = vc
            .order_values
            .iter()
            .map(|o| match o {
                OrderValue::Finite(v) => v.to_string(),
                OrderValue::Infinite(_) => "inf".to_string(),
            })
            .collect();
        out.push_str(&format!(
            "valuation criterion: orders [{}], r = {}, a = {}, c = {} -> {}\n",
            orders.join(", "),
            vc.r,
            vc.a,
            vc.conductor,
            if vc.met { "met" } else { "inconclusive" }
        ));
    }
    if let Some(tc) = &doc.trace_criterion {
        out.push_str(&format!(
            "trace criterion: v(D) = {}, v(D^-1) = {}, v(tr D) = {}, v(m) = {}, h = {}\n",
            tc.v_d,
            tc.v_d_inverse,
            tc.v_trace,
            tc.v_maximal_ideal,
            doc.h_invariant.expect("h accompanies the trace criterion")
        ));
    }
    if let Some(rep) = &doc.reparametrization {
        out.push_str(&format!(
            "reparametrization: s(t) = {}\n",
            render_series_list(std::slice::from_ref(&rep.uniformizer))
        ));
        out.push_str(&format!(
            "                   t(s) = {}\n",
            render_series_list(std::slice::from_ref(&rep.inverse_parameter))
        ));
        out.push_str(&format!(
            "                   monomial exponents: {}\n",
            render_list(&rep.exponents)
        ));
    }
    out.push_str(&format!("verdict: {}\n", verdict_line(doc)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, AnalysisOptions, Check};
    use crate::parse::parse_generators;

    fn document(input: &str, check: Check, reparametrize: bool) -> ReportDocument {
        let polys = parse_generators(input).unwrap();
        let options = AnalysisOptions {
            check,
            reparametrize,
            ..AnalysisOptions::default()
        };
        let report = analyze(&polys, &options).unwrap();
        report_document(&report, Timings::default())
    }

    #[test]
    fn json_round_trip_is_lossless() {
        for (input, check, rep) in [
            ("t^4 + t^5, t^7, t^8, t^9", Check::All, true),
            ("t^5, t^6, t^8 + t^9", Check::All, false),
            ("t^4, t^5, t^6", Check::Trace, false),
            ("t^2 + t^3, t^4", Check::Valuation, true),
        ] {
            let doc = document(input, check, rep);
            let json = serde_json::to_string_pretty(&doc).unwrap();
            let back: ReportDocument = serde_json::from_str(&json).unwrap();
            assert_eq!(doc, back, "round trip changed the document for {input}");
        }
    }

    #[test]
    fn json_uses_exact_strings_and_named_keys() {
        let doc = document("t^4 + t^5, t^7, t^8, t^9", Check::All, true);
        let value: serde_json::Value =
            serde_json::to_value(&doc).unwrap();
        assert_eq!(value["trace_criterion"]["v_D"], 3);
        assert_eq!(value["trace_criterion"]["v_D_inverse"], 1);
        assert_eq!(value["h_invariant"], 1);
        assert_eq!(value["quasihomogeneous"], true);
        // The uniformizer's second coefficient is the exact rational 1/4.
        let coeffs = value["reparametrization"]["uniformizer"]["coefficients"]
            .as_array()
            .unwrap();
        assert_eq!(coeffs[1][0], 2);
        assert_eq!(coeffs[1][1], "1/4");
        // Monomial generators report "inf" orders.
        let monomial = document("t^4, t^5, t^6", Check::All, false);
        let value = serde_json::to_value(&monomial).unwrap();
        assert_eq!(value["valuation_criterion"]["order_values"][0], "inf");
    }

    #[test]
    fn verdict_lines_match_the_advertised_texture() {
        let negative = document("t^5, t^6, t^8 + t^9", Check::All, false);
        assert_eq!(
            verdict_line(&negative),
            "NOT quasihomogeneous (trace criterion); valuation criterion inconclusive (6 < 10)"
        );
        let positive = document("t^4 + t^5, t^7, t^8, t^9", Check::All, false);
        assert_eq!(
            verdict_line(&positive),
            "quasihomogeneous (trace criterion); valuation criterion met (8 >= 7)"
        );
        let sufficient_only = document("t^4 + t^5, t^7, t^8, t^9", Check::Valuation, false);
        assert_eq!(
            verdict_line(&sufficient_only),
            "quasihomogeneous (valuation criterion met (8 >= 7))"
        );
    }

    #[test]
    fn text_report_renders_each_section() {
        let doc = document("t^4 + t^5, t^7, t^8, t^9", Check::All, true);
        let text = render_text(&doc);
        assert!(text.contains("generators (normalized, precision"));
        assert!(text.contains("t^4 + t^5, t^7, t^8, t^9"));
        assert!(text.contains("semigroup: conductor 7, genus 5, gaps {1, 2, 3, 5, 6}"));
        assert!(text.contains("valuation criterion: orders [1, inf, inf, inf], r = 1"));
        assert!(text.contains("trace criterion: v(D) = 3"));
        assert!(text.contains("reparametrization: s(t) = t + 1/4*t^2"));
        assert!(text.contains("verdict: quasihomogeneous"));
    }

    #[test]
    fn undecided_documents_serialize_the_null_verdict() {
        let doc = document("t^5, t^6, t^8 + t^9", Check::Valuation, false);
        assert_eq!(doc.quasihomogeneous, None);
        let value = serde_json::to_value(&doc).unwrap();
        assert!(value["quasihomogeneous"].is_null());
        assert!(value.get("trace_criterion").is_none());
        let text = render_text(&doc);
        assert!(text.contains("undecided"));
    }
}
