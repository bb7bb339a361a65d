//! Text input for parametrized curves.
//!
//! Grammar (whitespace insignificant, one optional leading sign per
//! expression):
//!
//! ```text
//! document   := generators ( ";" generators )*
//! generators := expr ( "," expr )*
//! expr       := [ "+" | "-" ] term ( ("+"|"-") term )*
//! term       := coeff [ "*" tpower ] | tpower
//! tpower     := "t" [ "^" uint ]
//! coeff      := int [ "/" int ]
//! ```
//!
//! Coefficients are exact arbitrary-precision rationals. Every failure
//! carries a 1-based line/column position; no input panics the parser.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ring::PolyTerms;
use crate::series::Rat;

/// Largest accepted `t`-exponent. Far beyond anything the analysis can
/// digest, but small enough that a malicious exponent cannot balloon the
/// exact-arithmetic pass.
pub const MAX_EXPONENT: i64 = 100_000;

/// 1-based line/column of a byte offset in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{position}: {message}")]
    Syntax { position: Position, message: String },
    #[error("{position}: zero denominator in coefficient")]
    ZeroDenominator { position: Position },
    #[error("{position}: generator has a nonzero constant term (valuation must be >= 1)")]
    ConstantTermInGenerator { position: Position },
    #[error("{position}: generator {index} is zero")]
    ZeroGenerator { position: Position, index: usize },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::ZeroDenominator { position }
            | ParseError::ConstantTermInGenerator { position }
            | ParseError::ZeroGenerator { position, .. } => *position,
        }
    }
}

/// Parses a batch document: one list of generator polynomials per ring,
/// in input order.
pub fn parse_document(text: &str) -> Result<Vec<Vec<PolyTerms>>, ParseError> {
    let mut p = Parser::new(text);
    let mut rings = vec![p.generators()?];
    loop {
        p.skip_ws();
        if p.at_end() {
            return Ok(rings);
        }
        p.expect(b';')?;
        rings.push(p.generators()?);
    }
}

/// Parses the generators of a single ring; a `;` is rejected here.
pub fn parse_generators(text: &str) -> Result<Vec<PolyTerms>, ParseError> {
    let mut p = Parser::new(text);
    let gens = p.generators()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax("expected end of input"));
    }
    Ok(gens)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn position_of(&self, byte: usize) -> Position {
        let byte = byte.min(self.src.len());
        let mut line = 1;
        let mut column = 1;
        for ch in self.src[..byte].chars() {
            if ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Position { line, column }
    }

    fn syntax_at(&self, byte: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            position: self.position_of(byte),
            message: message.into(),
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.syntax_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b' ' || b == b'\t' || b == b'\r' || b == b'\n' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{}'", b as char)))
        }
    }

    /// Renders the character at the cursor for error messages, safely for
    /// arbitrary UTF-8.
    fn describe_here(&self) -> String {
        match self.src[self.pos..].chars().next() {
            Some(ch) if !ch.is_control() => format!("'{ch}'"),
            Some(ch) => format!("U+{:04X}", ch as u32),
            None => "end of input".to_string(),
        }
    }

    fn generators(&mut self) -> Result<Vec<PolyTerms>, ParseError> {
        let mut gens = vec![self.expression(0)?];
        loop {
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
                gens.push(self.expression(gens.len())?);
            } else {
                return Ok(gens);
            }
        }
    }

    fn expression(&mut self, index: usize) -> Result<PolyTerms, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
        let mut sign: i32 = 1;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = -1;
            }
            _ => {}
        }
        loop {
            let (exp, coeff) = self.term()?;
            let coeff = if sign < 0 { -coeff } else { coeff };
            if exp == 0 && coeff != Rat::from(BigInt::from(0)) {
                return Err(ParseError::ConstantTermInGenerator {
                    position: self.position_of(start),
                });
            }
            let slot = coeffs.entry(exp).or_insert_with(|| Rat::from(BigInt::from(0)));
            *slot += coeff;
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => break,
            }
        }
        coeffs.retain(|_, c| *c != Rat::from(BigInt::from(0)));
        if coeffs.is_empty() {
            return Err(ParseError::ZeroGenerator {
                position: self.position_of(start),
                index,
            });
        }
        Ok(coeffs.into_iter().collect())
    }

    /// One term: `(exponent, coefficient)`; a bare coefficient has
    /// exponent 0.
    fn term(&mut self) -> Result<(i64, Rat), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                let exp = self.optional_exponent()?;
                Ok((exp, Rat::from(BigInt::from(1))))
            }
            Some(b'0'..=b'9') | Some(b'-') => {
                let coeff = self.coefficient()?;
                self.skip_ws();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.skip_ws();
                    self.expect(b't')
                        .map_err(|_| self.syntax("expected 't' after '*'"))?;
                    let exp = self.optional_exponent()?;
                    Ok((exp, coeff))
                } else {
                    Ok((0, coeff))
                }
            }
            _ => Err(self.syntax(format!(
                "expected a term, found {}",
                self.describe_here()
            ))),
        }
    }

    fn optional_exponent(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            self.unsigned_exponent()
        } else {
            Ok(1)
        }
    }

    fn unsigned_exponent(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        let mut value: i64 = 0;
        let mut any = false;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            any = true;
            self.pos += 1;
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(i64::from(b - b'0')))
                .filter(|&v| v <= MAX_EXPONENT)
                .ok_or_else(|| {
                    self.syntax_at(start, format!("exponent exceeds {MAX_EXPONENT}"))
                })?;
        }
        if !any {
            return Err(self.syntax("expected an exponent after '^'"));
        }
        Ok(value)
    }

    fn coefficient(&mut self) -> Result<Rat, ParseError> {
        let numerator = self.integer()?;
        self.skip_ws();
        if self.peek() == Some(b'/') {
            let slash = self.pos;
            self.pos += 1;
            self.skip_ws();
            let denominator = self.integer()?;
            if denominator == BigInt::from(0) {
                return Err(ParseError::ZeroDenominator {
                    position: self.position_of(slash),
                });
            }
            Ok(Rat::new(numerator, denominator))
        } else {
            Ok(Rat::from(numerator))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.pos += 1;
            self.skip_ws();
        }
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax(format!(
                "expected digits, found {}",
                self.describe_here()
            )));
        }
        let digits = &self.src[start..self.pos];
        let value: BigInt = digits.parse().expect("digit runs parse as integers");
        Ok(if negative { -value } else { value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, rat_frac};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn four_generator_fixture_parses() {
        let doc = parse_generators("t^4 + t^5, t^7, t^8, t^9").unwrap();
        assert_eq!(doc.len(), 4);
        assert_eq!(doc[0], vec![(4, rat(1)), (5, rat(1))]);
        assert_eq!(doc[3], vec![(9, rat(1))]);
    }

    #[test]
    fn rational_coefficients_and_signs() {
        let doc = parse_generators("3/2*t^5 - t^6 + -2*t^7").unwrap();
        assert_eq!(
            doc[0],
            vec![(5, rat_frac(3, 2)), (6, rat(-1)), (7, rat(-2))]
        );
        // The separator's sign multiplies the coefficient's own sign.
        let doc = parse_generators("t^5 - -2*t^7").unwrap();
        assert_eq!(doc[0], vec![(5, rat(1)), (7, rat(2))]);
        let neg = parse_generators("-t^3 + t^4").unwrap();
        assert_eq!(neg[0], vec![(3, rat(-1)), (4, rat(1))]);
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let doc = parse_generators("t^4 + 2*t^4 + t^5 - t^5 + t^6").unwrap();
        assert_eq!(doc[0], vec![(4, rat(3)), (6, rat(1))]);
    }

    #[test]
    fn bare_t_means_exponent_one() {
        let doc = parse_generators("2*t, t^2").unwrap();
        assert_eq!(doc[0], vec![(1, rat(2))]);
    }

    #[test]
    fn batch_documents_split_on_semicolons() {
        let doc = parse_document("t^4+t^5, t^7; t^2, t^3 ; t^5,t^6,t^8+t^9").unwrap();
        assert_eq!(doc.len(), 3);
        assert_eq!(doc[1], vec![vec![(2, rat(1))], vec![(3, rat(1))]]);
        assert!(parse_generators("t^2, t^3; t^4, t^5").is_err());
    }

    #[test]
    fn constant_terms_are_rejected() {
        let err = parse_generators("t^0 + t^3").unwrap_err();
        assert!(matches!(err, ParseError::ConstantTermInGenerator { .. }));
        let err = parse_generators("t^2, 3 + t^4").unwrap_err();
        assert!(matches!(
            err,
            ParseError::ConstantTermInGenerator { position } if position.column == 6
        ));
        // A coefficient of zero at exponent 0 contributes nothing and is
        // not a constant term.
        let err = parse_generators("0*t^0 + t^2 - t^2").unwrap_err();
        assert!(matches!(err, ParseError::ZeroGenerator { .. }));
    }

    #[test]
    fn zero_generators_are_rejected_with_index() {
        let err = parse_generators("t^2, t^4 - t^4").unwrap_err();
        match err {
            ParseError::ZeroGenerator { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_denominator_is_its_own_error() {
        let err = parse_generators("1/0*t^2").unwrap_err();
        assert!(matches!(err, ParseError::ZeroDenominator { .. }));
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_generators("t^4 +\n  t^& + t^2").unwrap_err();
        match err {
            ParseError::Syntax { position, .. } => {
                assert_eq!(position.line, 2);
                assert_eq!(position.column, 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_generators("").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse_generators("t^4,").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse_generators("t^").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse_generators("t^4 @").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn huge_exponents_are_rejected_without_overflow() {
        let err = parse_generators("t^99999999999999999999").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        let err = parse_generators(&format!("t^{}", MAX_EXPONENT + 1)).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
        assert!(parse_generators("t^100").is_ok());
    }

    #[test]
    fn arbitrary_bytes_never_panic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_9a51);
        for _ in 0..4000 {
            let len = rng.gen_range(0..60);
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let text = String::from_utf8_lossy(&bytes);
            let _ = parse_document(&text);
        }
        // Structured near-misses around the real grammar.
        let fragments = ["t", "^", "+", "-", "*", "/", ",", ";", "3", " ", "\n", "t^4"];
        for _ in 0..4000 {
            let n = rng.gen_range(0..12);
            let text: String = (0..n)
                .map(|_| fragments[rng.gen_range(0..fragments.len())])
                .collect();
            let _ = parse_document(&text);
        }
    }

    #[test]
    fn multibyte_input_positions_do_not_split_chars() {
        let err = parse_generators("t^4 + é").unwrap_err();
        match err {
            ParseError::Syntax { position, message } => {
                assert_eq!(position.column, 7);
                assert!(message.contains('é'), "message was {message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
