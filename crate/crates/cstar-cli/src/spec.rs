//! Algebra input files.
//!
//! A spec file is JSON with exact Gaussian-rational entries:
//!
//! ```json
//! {
//!   "ambient_dim": 2,
//!   "unital": true,
//!   "generators": [
//!     [ [[1,1,0,1],[0,1,0,1]],
//!       [[0,1,0,1],[2,1,0,1]] ]
//!   ]
//! }
//! ```
//!
//! Each entry is a quadruple `[re_num, re_den, im_num, im_den]`. Denominators
//! must be nonzero; every generator must be an `ambient_dim` square matrix.

use std::fmt;

use cstar::algebra::AlgebraPresentation;
use cstar::mat::CMatrix;
use num_complex::Complex64;
use serde::Deserialize;

/// One matrix entry: re numerator, re denominator, im numerator, im
/// denominator.
pub type Quad = [i64; 4];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    ambient_dim: usize,
    unital: bool,
    generators: Vec<Vec<Vec<Quad>>>,
}

#[derive(Debug)]
pub struct ParsedSpec {
    pub presentation: AlgebraPresentation,
    /// The entries exactly as given, for consumers that need them rational.
    pub exact: Vec<Vec<Vec<Quad>>>,
}

#[derive(Debug)]
pub enum SpecError {
    Parse { line: usize, column: usize, reason: String },
    ZeroDenominator { generator: usize, row: usize, col: usize },
    Shape { generator: usize, expected: usize, got: usize, what: &'static str },
    NoGenerators,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Parse { line, column, reason } => {
                write!(f, "spec parse error at line {line}, column {column}: {reason}")
            }
            SpecError::ZeroDenominator { generator, row, col } => write!(
                f,
                "zero denominator in generator {generator} at row {row}, column {col}"
            ),
            SpecError::Shape { generator, expected, got, what } => write!(
                f,
                "generator {generator} has {got} {what}, ambient dimension wants {expected}"
            ),
            SpecError::NoGenerators => write!(f, "spec lists no generators"),
        }
    }
}

impl std::error::Error for SpecError {}

pub fn parse_algebra_spec(text: &str) -> Result<ParsedSpec, SpecError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::Parse {
        line: e.line(),
        column: e.column(),
        reason: e.to_string(),
    })?;
    let d = raw.ambient_dim;
    if raw.generators.is_empty() {
        return Err(SpecError::NoGenerators);
    }
    let mut generators = Vec::with_capacity(raw.generators.len());
    for (gi, rows) in raw.generators.iter().enumerate() {
        if rows.len() != d {
            return Err(SpecError::Shape {
                generator: gi,
                expected: d,
                got: rows.len(),
                what: "rows",
            });
        }
        for (ri, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(SpecError::Shape {
                    generator: gi,
                    expected: d,
                    got: row.len(),
                    what: "columns",
                });
            }
            for (ci, q) in row.iter().enumerate() {
                if q[1] == 0 || q[3] == 0 {
                    return Err(SpecError::ZeroDenominator { generator: gi, row: ri, col: ci });
                }
            }
        }
        generators.push(CMatrix::from_fn(d, d, |i, j| {
            let q = rows[i][j];
            Complex64::new(q[0] as f64 / q[1] as f64, q[2] as f64 / q[3] as f64)
        }));
    }
    Ok(ParsedSpec {
        presentation: AlgebraPresentation { ambient_dim: d, generators, unital: raw.unital },
        exact: raw.generators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_diagonal_generator() {
        let text = r#"{"ambient_dim":2,"unital":true,"generators":[[[[1,1,0,1],[0,1,0,1]],[[0,1,0,1],[2,1,0,1]]]]}"#;
        let spec = parse_algebra_spec(text).unwrap();
        assert_eq!(spec.presentation.ambient_dim, 2);
        assert!(spec.presentation.unital);
        assert_eq!(spec.presentation.generators.len(), 1);
        let g = &spec.presentation.generators[0];
        assert_eq!(g[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(g[(1, 1)], Complex64::new(2.0, 0.0));
        assert_eq!(spec.exact[0][1][1], [2, 1, 0, 1]);
    }

    #[test]
    fn rejects_zero_denominator() {
        let text = r#"{"ambient_dim":1,"unital":true,"generators":[[[[1,0,0,1]]]]}"#;
        match parse_algebra_spec(text) {
            Err(SpecError::ZeroDenominator { generator: 0, row: 0, col: 0 }) => {}
            other => panic!("expected zero-denominator error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_generator() {
        let text = r#"{"ambient_dim":2,"unital":false,"generators":[[[[1,1,0,1]],[[0,1,0,1],[1,1,0,1]]]]}"#;
        match parse_algebra_spec(text) {
            Err(SpecError::Shape { generator: 0, expected: 2, got: 1, what: "columns" }) => {}
            other => panic!("expected shape error, got {other:?}"),
        }
    }

    #[test]
    fn reports_json_position() {
        match parse_algebra_spec("{\n  \"ambient_dim\": oops") {
            Err(SpecError::Parse { line: 2, .. }) => {}
            other => panic!("expected parse error on line 2, got {other:?}"),
        }
    }
}
