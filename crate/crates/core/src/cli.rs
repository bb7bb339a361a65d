//! Driver logic behind the `analyze` command: input acquisition, batch
//! orchestration, rendering, exit codes.
//!
//! Exit codes: `0` success, `1` invalid input (syntax or a degenerate
//! parametrization), `2` precision exhausted (the cap is too small or an
//! override too aggressive), `3` internal-consistency failure — the
//! cross-checked invariants disagreed, which is a bug, never a property of
//! the input.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use crate::analysis::{analyze_ring, AnalysisError, AnalysisOptions};
use crate::parse::parse_document;
use crate::report::{render_text, report_document, verdict_line, ReportDocument, Timings};
use crate::ring::{CurveRing, PolyTerms, PrecisionPolicy, RingError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone)]
pub enum InputSource {
    /// The expression given on the command line.
    Expression(String),
    /// Contents of a file.
    File(PathBuf),
    /// Standard input, read to the end.
    Stdin,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: InputSource,
    pub options: AnalysisOptions,
    pub json: bool,
    /// Text mode: print only the verdict line per ring.
    pub quiet: bool,
}

fn exit_code(err: &AnalysisError) -> i32 {
    match err {
        AnalysisError::Ring(ring) => match ring {
            RingError::EmptyInput
            | RingError::ZeroGenerator { .. }
            | RingError::NonPositiveValuation { .. }
            | RingError::RegularRing(_) => EXIT_INVALID_INPUT,
            RingError::PrecisionCapExceeded(_) | RingError::InsufficientPrecision { .. } => {
                EXIT_PRECISION
            }
            RingError::Internal(_) => EXIT_INTERNAL,
        },
        AnalysisError::Ideal(ideal) => match ideal {
            crate::ideal::IdealError::InsufficientPrecision { .. } => EXIT_PRECISION,
            _ => EXIT_INTERNAL,
        },
        AnalysisError::Series(_)
        | AnalysisError::CriterionNotMet
        | AnalysisError::VerificationFailed(_)
        | AnalysisError::Inconsistent(_) => EXIT_INTERNAL,
    }
}

fn read_input(source: &InputSource) -> Result<String, String> {
    match source {
        InputSource::Expression(text) => Ok(text.clone()),
        InputSource::File(path) => std::fs::read(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))
            .and_then(|bytes| {
                String::from_utf8(bytes).map_err(|_| {
                    format!("{} is not valid UTF-8", path.display())
                })
            }),
        InputSource::Stdin => {
            let mut bytes = Vec::new();
            std::io::stdin()
                .read_to_end(&mut bytes)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            String::from_utf8(bytes).map_err(|_| "stdin is not valid UTF-8".to_string())
        }
    }
}

fn analyze_one(
    polys: &[PolyTerms],
    options: &AnalysisOptions,
    parse_us: u64,
) -> Result<ReportDocument, AnalysisError> {
    let build_start = Instant::now();
    let policy = PrecisionPolicy {
        precision: options.precision,
        max_precision: options.max_precision,
    };
    let ring = CurveRing::from_polynomials(polys, &policy)?;
    let build_us = build_start.elapsed().as_micros() as u64;
    let analysis_start = Instant::now();
    let report = analyze_ring(&ring, options)?;
    let analysis_us = analysis_start.elapsed().as_micros() as u64;
    let timings = Timings {
        parse_us,
        build_us,
        analysis_us,
        total_us: parse_us + build_us + analysis_us,
    };
    Ok(report_document(&report, timings))
}

/// Runs one invocation end to end, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match read_input(&config.input) {
        Ok(text) => text,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_INVALID_INPUT;
        }
    };
    let parse_start = Instant::now();
    let rings = match parse_document(&text) {
        Ok(rings) => rings,
        Err(e) => {
            let _ = writeln!(err, "parse error: {e}");
            return EXIT_INVALID_INPUT;
        }
    };
    let parse_us = parse_start.elapsed().as_micros() as u64;

    let batch = rings.len() > 1;
    let mut documents = Vec::with_capacity(rings.len());
    for (i, polys) in rings.iter().enumerate() {
        match analyze_one(polys, &config.options, parse_us) {
            Ok(doc) => documents.push(doc),
            Err(e) => {
                let stage = if matches!(e, AnalysisError::Ring(_)) {
                    "build"
                } else {
                    "analysis"
                };
                if batch {
                    let _ = writeln!(err, "{stage} error in ring {}: {e}", i + 1);
                } else {
                    let _ = writeln!(err, "{stage} error: {e}");
                }
                return exit_code(&e);
            }
        }
    }

    if config.json {
        let rendered = if batch {
            serde_json::to_string_pretty(&documents)
        } else {
            serde_json::to_string_pretty(&documents[0])
        }
        .expect("report documents serialize");
        let _ = writeln!(out, "{rendered}");
    } else {
        for (i, doc) in documents.iter().enumerate() {
            if config.quiet {
                if batch {
                    let _ = writeln!(out, "ring {}: {}", i + 1, verdict_line(doc));
                } else {
                    let _ = writeln!(out, "{}", verdict_line(doc));
                }
            } else {
                if batch {
                    let _ = writeln!(out, "ring {}:", i + 1);
                }
                let _ = write!(out, "{}", render_text(doc));
                if batch && i + 1 < documents.len() {
                    let _ = writeln!(out);
                }
            }
        }
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Check;

    fn config(text: &str) -> RunConfig {
        RunConfig {
            input: InputSource::Expression(text.to_string()),
            options: AnalysisOptions {
                reparametrize: true,
                ..AnalysisOptions::default()
            },
            json: false,
            quiet: false,
        }
    }

    fn run_captured(config: &RunConfig) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(config, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn positive_fixture_exits_zero_with_report() {
        let (code, out, err) = run_captured(&config("t^4 + t^5, t^7, t^8, t^9"));
        assert_eq!(code, EXIT_OK, "stderr: {err}");
        assert!(out.contains("verdict: quasihomogeneous (trace criterion)"));
        assert!(out.contains("reparametrization: s(t) = t + 1/4*t^2"));
    }

    #[test]
    fn negative_fixture_still_exits_zero() {
        let (code, out, _) = run_captured(&config("t^5, t^6, t^8 + t^9"));
        assert_eq!(code, EXIT_OK);
        assert!(out.contains(
            "NOT quasihomogeneous (trace criterion); valuation criterion inconclusive (6 < 10)"
        ));
    }

    #[test]
    fn syntax_and_degenerate_inputs_exit_one() {
        let (code, _, err) = run_captured(&config("t^4 +"));
        assert_eq!(code, EXIT_INVALID_INPUT);
        assert!(err.contains("parse error"));
        assert!(err.contains("line 1"));

        let (code, _, err) = run_captured(&config("t^2"));
        assert_eq!(code, EXIT_INVALID_INPUT);
        assert!(err.contains("build error"), "stderr: {err}");

        let (code, _, _) = run_captured(&config("t"));
        assert_eq!(code, EXIT_INVALID_INPUT);

        let missing = RunConfig {
            input: InputSource::File(PathBuf::from("/nonexistent/series.txt")),
            ..config("")
        };
        let (code, _, err) = run_captured(&missing);
        assert_eq!(code, EXIT_INVALID_INPUT);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn precision_failures_exit_two() {
        let mut c = config("t^4 + t^5, t^7, t^8, t^9");
        c.options.precision = Some(10); // certification needs a longer run
        let (code, _, err) = run_captured(&c);
        assert_eq!(code, EXIT_PRECISION, "stderr: {err}");

        let mut c = config("t^4 + t^5, t^7");
        c.options.precision = Some(4); // not even past the largest valuation
        let (code, _, _) = run_captured(&c);
        assert_eq!(code, EXIT_PRECISION);
    }

    #[test]
    fn batch_renders_in_input_order_and_aborts_on_error() {
        let mut c = config("t^4 + t^5, t^7, t^8, t^9; t^5, t^6, t^8 + t^9");
        c.quiet = true;
        let (code, out, _) = run_captured(&c);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("ring 1: quasihomogeneous"));
        assert!(lines[1].starts_with("ring 2: NOT quasihomogeneous"));

        let c = config("t^4 + t^5, t^7, t^8, t^9; t^2");
        let (code, _, err) = run_captured(&c);
        assert_eq!(code, EXIT_INVALID_INPUT);
        assert!(err.contains("ring 2"));
    }

    #[test]
    fn json_mode_emits_an_object_or_array() {
        let mut c = config("t^4 + t^5, t^7, t^8, t^9");
        c.json = true;
        let (code, out, _) = run_captured(&c);
        assert_eq!(code, EXIT_OK);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(value.is_object());
        assert_eq!(value["semigroup"]["conductor"], 7);
        assert_eq!(value["quasihomogeneous"], true);

        let mut c = config("t^2, t^3; t^4, t^5, t^6");
        c.json = true;
        let (code, out, _) = run_captured(&c);
        assert_eq!(code, EXIT_OK);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        let rows = value.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1]["semigroup"]["conductor"], 8);
    }

    #[test]
    fn check_selection_reaches_the_document() {
        let mut c = config("t^5, t^6, t^8 + t^9");
        c.options.check = Check::Valuation;
        c.options.reparametrize = false;
        c.json = true;
        let (code, out, _) = run_captured(&c);
        assert_eq!(code, EXIT_OK);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(value.get("trace_criterion").is_none());
        assert!(value["quasihomogeneous"].is_null());
    }
}
