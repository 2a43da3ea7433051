//! Ternary digits and dense ternary matrices.
//!
//! A [`Trit`] is one weight in {-1, 0, +1}; a [`TernaryMatrix`] is the
//! row-major weight operand of a GEMV. The plain-text interchange format is
//! one row per line using the symbols `-`, `0`, `+`.

use crate::error::{Error, Result};
use std::fmt;

/// A ternary digit: -1, 0, or +1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
#[repr(i8)]
pub enum Trit {
    Neg = -1,
    #[default]
    Zero = 0,
    Pos = 1,
}

impl Trit {
    /// Numeric value in {-1, 0, +1}.
    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    /// Builds a trit from an integer, rejecting anything outside {-1, 0, +1}.
    pub fn from_i8(v: i8) -> Result<Trit> {
        match v {
            -1 => Ok(Trit::Neg),
            0 => Ok(Trit::Zero),
            1 => Ok(Trit::Pos),
            other => Err(Error::invalid(format!("trit value {other} not in {{-1, 0, +1}}"))),
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self == Trit::Zero
    }

    /// Text symbol used by the matrix file format.
    pub fn symbol(self) -> char {
        match self {
            Trit::Neg => '-',
            Trit::Zero => '0',
            Trit::Pos => '+',
        }
    }

    pub fn from_symbol(c: char) -> Result<Trit> {
        match c {
            '-' => Ok(Trit::Neg),
            '0' => Ok(Trit::Zero),
            '+' => Ok(Trit::Pos),
            other => Err(Error::Parse(format!("invalid trit symbol {other:?} (expected '-', '0', '+')"))),
        }
    }
}

impl std::ops::Neg for Trit {
    type Output = Trit;
    #[inline]
    fn neg(self) -> Trit {
        match self {
            Trit::Neg => Trit::Pos,
            Trit::Zero => Trit::Zero,
            Trit::Pos => Trit::Neg,
        }
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Dense row-major matrix of trits; the weight operand of a GEMV.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TernaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Trit>,
}

impl TernaryMatrix {
    /// Creates a matrix from row-major data. `data.len()` must equal `rows * cols`
    /// and both dimensions must be at least 1.
    pub fn new(rows: usize, cols: usize, data: Vec<Trit>) -> Result<TernaryMatrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("matrix dimensions {rows}x{cols} must be positive")));
        }
        let expect = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::invalid("matrix size overflows".to_string()))?;
        if data.len() != expect {
            return Err(Error::invalid(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(TernaryMatrix { rows, cols, data })
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Result<TernaryMatrix> {
        TernaryMatrix::new(rows, cols, vec![Trit::Zero; rows * cols])
    }

    /// Builds a matrix by mapping each (row, col) index to a trit.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Trit) -> Result<TernaryMatrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        TernaryMatrix::new(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Trit {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    /// One full row as a slice.
    #[inline]
    pub fn row(&self, row: usize) -> &[Trit] {
        debug_assert!(row < self.rows);
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    #[inline]
    pub fn data(&self) -> &[Trit] {
        &self.data
    }

    /// Parses the plain-text matrix format: one row per line, symbols `-0+`,
    /// optional interior whitespace, uniform row length.
    pub fn parse_text(text: &str) -> Result<TernaryMatrix> {
        let mut rows: Vec<Vec<Trit>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let mut row = Vec::new();
            for c in line.chars() {
                if c.is_whitespace() {
                    continue;
                }
                row.push(Trit::from_symbol(c).map_err(|_| {
                    Error::Parse(format!(
                        "line {}: invalid trit symbol {c:?} (expected '-', '0', '+')",
                        lineno + 1
                    ))
                })?);
            }
            if row.is_empty() {
                continue;
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse(format!(
                        "line {}: row length {} differs from first row length {}",
                        lineno + 1,
                        row.len(),
                        first.len()
                    )));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("matrix file contains no rows".to_string()));
        }
        let r = rows.len();
        let c = rows[0].len();
        TernaryMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Renders the canonical text form (no interior spaces, `\n` line ends,
    /// trailing newline). `parse_text(render_text(m)) == m`.
    pub fn render_text(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for t in self.row(r) {
                out.push(t.symbol());
            }
            out.push('\n');
        }
        out
    }
}
