//! Strictly lower triangular matrices and their structural invariants.

mod echelon;
mod format;

pub use echelon::{MeasureBlock, MeasureSequence, Wall};
pub use format::MatrixDoc;

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("index ({i},{j}) is not strictly below the diagonal of a {n}x{n} matrix")]
    BadEntry { i: usize, j: usize, n: usize },
    #[error("Δ indices must satisfy 1 <= i < j < k <= {n}, got ({i},{j},{k})")]
    BadDelta { i: usize, j: usize, k: usize, n: usize },
    #[error("interval [{lo},{hi}] is outside [1,{n}]")]
    BadInterval { lo: usize, hi: usize, n: usize },
    #[error("row {row} has {got} entries, expected {expected}")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("matrix is not in the first reduced echelon form")]
    Not1Ref,
    #[error("matrix is not in the second reduced echelon form")]
    Not2Ref,
    #[error("the zero matrix has no bricks or measure sequence")]
    ZeroMatrix,
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("malformed matrix text: {0}")]
    Format(String),
}

/// Closed integer interval `[lo, hi]` of 1-based indices; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn closed(lo: usize, hi: usize) -> Self {
        Interval { lo, hi }
    }

    /// `[lo, hi[`.
    pub fn half_open(lo: usize, hi: usize) -> Self {
        Interval {
            lo,
            hi: hi.saturating_sub(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || self.hi == 0
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let (lo, hi) = if self.is_empty() { (1, 0) } else { (self.lo, self.hi) };
        lo..=hi
    }
}

/// Leader position `(row, col)` of a row; `col == 0` for a zero row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LeaderPos {
    pub row: usize,
    pub col: usize,
}

/// A dense rectangular read-out of part of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixView {
    pub rows: Interval,
    pub cols: Interval,
    pub data: Vec<Vec<Scalar>>,
}

impl MatrixView {
    pub fn is_empty(&self) -> bool {
        self.data.is_empty() || self.data[0].is_empty()
    }

    /// Number of nonzero entries.
    pub fn measure(&self) -> usize {
        measure(self)
    }
}

/// The measure `μ(M)`: how many entries of `M` are nonzero.
pub fn measure(view: &MatrixView) -> usize {
    view.data.iter().flatten().filter(|x| !x.is_zero()).count()
}

/// Strictly lower triangular `n × n` matrix over one field.
///
/// Only the `n(n-1)/2` entries `t_ij` with `i > j` are stored, row-major.
/// Indices are 1-based throughout, following the usual matrix notation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Slt {
    n: usize,
    field: Field,
    entries: Vec<Scalar>,
    zero: Scalar,
}

#[inline]
pub(crate) fn slot(i: usize, j: usize) -> usize {
    (i - 1) * (i - 2) / 2 + (j - 1)
}

impl Slt {
    pub fn zero(n: usize, field: Field) -> Result<Self, MatrixError> {
        if n < 2 {
            return Err(MatrixError::TooSmall(n));
        }
        Ok(Slt {
            n,
            field,
            entries: vec![field.zero(); n * (n - 1) / 2],
            zero: field.zero(),
        })
    }

    /// Build from the sub-diagonal rows `2..=n`; row `r` holds `r - 1` entries.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self, MatrixError> {
        let n = rows.len() + 1;
        let mut t = Slt::zero(n, field)?;
        for (k, row) in rows.into_iter().enumerate() {
            let r = k + 2;
            if row.len() != r - 1 {
                return Err(MatrixError::RowLength {
                    row: r,
                    got: row.len(),
                    expected: r - 1,
                });
            }
            for (c, x) in row.into_iter().enumerate() {
                if x.field() != field {
                    return Err(FieldError::Mismatch(field, x.field()).into());
                }
                t.entries[slot(r, c + 1)] = x;
            }
        }
        Ok(t)
    }

    /// Build from integer rows `2..=n`. Convenient for literals.
    pub fn from_ints(field: Field, rows: &[&[i64]]) -> Result<Self, MatrixError> {
        Slt::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Stored sub-diagonal entries in row-major order.
    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Entry `t_ij`; zero on and above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        if i > j && i <= self.n {
            &self.entries[slot(i, j)]
        } else {
            &self.zero
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) -> Result<(), MatrixError> {
        if !(1..=self.n).contains(&i) || j == 0 || j >= i {
            return Err(MatrixError::BadEntry { i, j, n: self.n });
        }
        if value.field() != self.field {
            return Err(FieldError::Mismatch(self.field, value.field()).into());
        }
        self.entries[slot(i, j)] = value;
        Ok(())
    }

    pub(crate) fn set_unchecked(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[slot(i, j)] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        (1..r).all(|j| self.get(r, j).is_zero())
    }

    pub fn leader(&self, r: usize) -> LeaderPos {
        let col = (1..r.min(self.n + 1))
            .rev()
            .find(|&j| !self.get(r, j).is_zero())
            .unwrap_or(0);
        LeaderPos { row: r, col }
    }

    /// `Δ^{(α)}_{i,j,k}(T) = α·t_ki + t_kj·t_ji` for `1 <= i < j < k <= n`.
    pub fn delta(&self, i: usize, j: usize, k: usize, alpha: &Scalar) -> Result<Scalar, MatrixError> {
        if !(1 <= i && i < j && j < k && k <= self.n) {
            return Err(MatrixError::BadDelta { i, j, k, n: self.n });
        }
        Ok(self.delta_unchecked(i, j, k, alpha))
    }

    pub(crate) fn delta_unchecked(&self, i: usize, j: usize, k: usize, alpha: &Scalar) -> Scalar {
        &(alpha * self.get(k, i)) + &(self.get(k, j) * self.get(j, i))
    }

    /// The submatrix `T^I_J` of entries `t_ij` with `i ∈ rows`, `j ∈ cols`.
    pub fn submatrix(&self, rows: Interval, cols: Interval) -> Result<MatrixView, MatrixError> {
        for iv in [rows, cols] {
            if !iv.is_empty() && (iv.lo == 0 || iv.hi > self.n) {
                return Err(MatrixError::BadInterval {
                    lo: iv.lo,
                    hi: iv.hi,
                    n: self.n,
                });
            }
        }
        let data = rows
            .iter()
            .map(|i| cols.iter().map(|j| self.get(i, j).clone()).collect())
            .collect();
        Ok(MatrixView { rows, cols, data })
    }

    /// Number of nonzero entries of the whole matrix.
    pub fn measure(&self) -> usize {
        self.entries.iter().filter(|x| !x.is_zero()).count()
    }

    /// Measure of row `r` restricted to columns `cols`.
    pub(crate) fn row_measure(&self, r: usize, cols: Interval) -> usize {
        cols.iter().filter(|&j| !self.get(r, j).is_zero()).count()
    }
}

impl fmt::Debug for Slt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Slt[{}; {}]", self.field, self.n)?;
        for r in 2..=self.n {
            write!(f, " (")?;
            for j in 1..r {
                if j > 1 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(r, j))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Slt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}
