//! QAPLIB instance and solution files.
//!
//! An instance file is a stream of whitespace-separated numbers: the size
//! `n`, then the `n²` flow entries row by row, then the `n²` distance
//! entries. A solution file carries `n`, the declared cost and a 1-based
//! permutation. Line breaks carry no meaning in either format.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use thiserror::Error;

use crate::error::Error;
use crate::matrix::SquareMatrix;

/// Parse failure, positioned at the 1-based index of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("token {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty input")]
    Empty,
    #[error("problem size must be an integer >= {min}, got `{token}`")]
    InvalidSize { token: String, min: usize },
    #[error("expected {expected} tokens, found {found}")]
    TokenCount { expected: usize, found: usize },
    #[error("`{0}` is not a number")]
    NotANumber(String),
    #[error("`{0}` is not finite")]
    NotFinite(String),
    #[error("negative entry {0}")]
    Negative(f64),
    #[error("location index `{0}` is not an integer in 1..=n")]
    IndexOutOfRange(String),
    #[error("duplicate location index {0}")]
    DuplicateIndex(usize),
}

impl ParseError {
    fn at(position: usize, kind: ParseErrorKind) -> Self {
        Self { position, kind }
    }
}

/// Integer copies of the weights, kept when every entry is integral and the
/// largest possible cost fits comfortably in an `i64`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct IntegralWeights {
    pub(crate) flow: Vec<i64>,
    pub(crate) distance: Vec<i64>,
}

/// A validated QAP instance: `n ≥ 2`, square non-negative finite matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct QapInstance {
    name: String,
    flow: SquareMatrix,
    distance: SquareMatrix,
    known_best: Option<f64>,
    integral: Option<IntegralWeights>,
}

impl QapInstance {
    pub fn new(name: impl Into<String>, flow: SquareMatrix, distance: SquareMatrix) -> Result<Self, Error> {
        let n = flow.n();
        if distance.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: distance.n() });
        }
        if n < 2 {
            return Err(Error::InvalidInstance("problem size must be at least 2"));
        }
        let valid = |m: &SquareMatrix| m.as_slice().iter().all(|x| x.is_finite() && *x >= 0.0);
        if !valid(&flow) || !valid(&distance) {
            return Err(Error::InvalidInstance("entries must be finite and non-negative"));
        }
        let integral = integral_weights(&flow, &distance);
        Ok(Self { name: name.into(), flow, distance, known_best: None, integral })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches a reference value used for gap reporting.
    pub fn with_known_best(mut self, known_best: Option<f64>) -> Self {
        self.known_best = known_best;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.flow.n()
    }

    pub fn flow(&self) -> &SquareMatrix {
        &self.flow
    }

    pub fn distance(&self) -> &SquareMatrix {
        &self.distance
    }

    pub fn known_best(&self) -> Option<f64> {
        self.known_best
    }

    /// True when costs are computed in exact integer arithmetic.
    pub fn is_integral(&self) -> bool {
        self.integral.is_some()
    }

    pub(crate) fn integral(&self) -> Option<&IntegralWeights> {
        self.integral.as_ref()
    }

    /// Serializes back to the QAPLIB token format.
    pub fn to_qaplib_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.n());
        for m in [&self.flow, &self.distance] {
            out.push('\n');
            for r in 0..m.n() {
                let row: Vec<String> = m.row(r).iter().map(|x| x.to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

fn integral_weights(flow: &SquareMatrix, distance: &SquareMatrix) -> Option<IntegralWeights> {
    // Exact below 2^53; the product bound keeps every partial sum inside i64.
    const EXACT: f64 = 9_007_199_254_740_992.0;
    let is_int = |x: &f64| *x <= EXACT && libm::trunc(*x) == *x;
    if !flow.as_slice().iter().all(is_int) || !distance.as_slice().iter().all(is_int) {
        return None;
    }
    let max = |m: &SquareMatrix| m.as_slice().iter().fold(0.0f64, |a, &b| a.max(b));
    let n = flow.n() as f64;
    if n * n * max(flow) * max(distance) >= 4.0e18 {
        return None;
    }
    let to_int = |m: &SquareMatrix| m.as_slice().iter().map(|&x| x as i64).collect();
    Some(IntegralWeights { flow: to_int(flow), distance: to_int(distance) })
}

/// A QAPLIB `.sln` record with its permutation converted to 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub n: usize,
    pub cost: f64,
    pub permutation: Vec<usize>,
}

impl ReferenceSolution {
    /// Serializes as `n cost` followed by the 1-based permutation.
    pub fn to_qaplib_string(&self) -> String {
        let perm: Vec<String> = self.permutation.iter().map(|p| (p + 1).to_string()).collect();
        format!("{} {}\n{}\n", self.n, Cost(self.cost), perm.join(" "))
    }
}

struct Cost(f64);

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Integral costs print without a fractional part, as QAPLIB does.
        if libm::trunc(self.0) == self.0 && self.0.abs() < 1e15 {
            write!(f, "{}", self.0 as i64)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn parse_size(tokens: &[&str], min: usize) -> Result<usize, ParseError> {
    let first = *tokens.first().ok_or(ParseError::at(1, ParseErrorKind::Empty))?;
    match first.parse::<usize>() {
        Ok(n) if n >= min => Ok(n),
        _ => Err(ParseError::at(1, ParseErrorKind::InvalidSize { token: first.to_string(), min })),
    }
}

fn check_count(found: usize, expected: usize) -> Result<(), ParseError> {
    if found == expected {
        return Ok(());
    }
    // Point at the first missing or first surplus token.
    let position = found.min(expected) + 1;
    Err(ParseError::at(position, ParseErrorKind::TokenCount { expected, found }))
}

fn parse_real(token: &str, position: usize) -> Result<f64, ParseError> {
    let value: f64 = token
        .parse()
        .map_err(|_| ParseError::at(position, ParseErrorKind::NotANumber(token.to_string())))?;
    if !value.is_finite() {
        return Err(ParseError::at(position, ParseErrorKind::NotFinite(token.to_string())));
    }
    if value < 0.0 {
        return Err(ParseError::at(position, ParseErrorKind::Negative(value)));
    }
    Ok(value)
}

/// Parses a QAPLIB instance. The first matrix is the flow matrix, the second
/// the distance matrix.
pub fn parse_instance(text: &str) -> Result<QapInstance, ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let n = parse_size(&tokens, 2)?;
    let block = n.checked_mul(n).ok_or_else(|| {
        ParseError::at(1, ParseErrorKind::InvalidSize { token: tokens[0].to_string(), min: 2 })
    })?;
    check_count(tokens.len(), 1 + 2 * block)?;

    let mut values = Vec::with_capacity(2 * block);
    for (i, token) in tokens.iter().enumerate().skip(1) {
        values.push(parse_real(token, i + 1)?);
    }
    let distance = values.split_off(block);
    let flow = SquareMatrix::from_row_major(n, values).expect("block length checked");
    let distance = SquareMatrix::from_row_major(n, distance).expect("block length checked");
    // Every failure mode of `new` has been ruled out token by token above.
    Ok(QapInstance::new("", flow, distance).expect("validated tokens"))
}

/// Parses a QAPLIB `.sln` file: `n`, cost, then `n` 1-based location indices.
pub fn parse_reference_solution(text: &str) -> Result<ReferenceSolution, ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let n = parse_size(&tokens, 1)?;
    check_count(tokens.len(), n + 2)?;
    let cost = parse_real(tokens[1], 2)?;

    let mut seen = alloc::vec![false; n];
    let mut permutation = Vec::with_capacity(n);
    for (i, token) in tokens.iter().enumerate().skip(2) {
        let position = i + 1;
        let index = match token.parse::<usize>() {
            Ok(k) if (1..=n).contains(&k) => k - 1,
            _ => return Err(ParseError::at(position, ParseErrorKind::IndexOutOfRange(token.to_string()))),
        };
        if core::mem::replace(&mut seen[index], true) {
            return Err(ParseError::at(position, ParseErrorKind::DuplicateIndex(index + 1)));
        }
        permutation.push(index);
    }
    Ok(ReferenceSolution { n, cost, permutation })
}
