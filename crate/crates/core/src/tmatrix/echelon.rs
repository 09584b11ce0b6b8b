//! Reduced echelon forms, walls, bricks and measure sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Interval, MatrixError, MatrixView, Slt};

/// The wall `𝕎(T)`: block-start rows `3 <= r_1 < ... < r_h <= n`, or `(0)`
/// for the zero class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wall {
    Zero,
    Rows(Vec<usize>),
}

impl Wall {
    pub fn rows(&self) -> &[usize] {
        match self {
            Wall::Zero => &[],
            Wall::Rows(r) => r,
        }
    }

    /// Key used in count reports: `0`, `4`, `3`, `(3,4)`.
    pub fn report_key(&self) -> String {
        match self {
            Wall::Zero => "0".into(),
            Wall::Rows(r) if r.len() == 1 => r[0].to_string(),
            Wall::Rows(_) => self.to_string(),
        }
    }

    /// `[1, r_1, ..., r_h, n + 1]`.
    fn bounds(&self, n: usize) -> Vec<usize> {
        let mut b = vec![1];
        b.extend_from_slice(self.rows());
        b.push(n + 1);
        b
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wall::Zero => write!(f, "(0)"),
            Wall::Rows(r) => {
                let parts: Vec<String> = r.iter().map(usize::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// One `M_j(T)`: the breakpoint rows `r_{jk}` and their measures `μ_{jk}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasureBlock {
    pub rows: Vec<usize>,
    pub measures: Vec<usize>,
}

/// The measure sequence `𝕄(T) = (M_1, ..., M_h)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasureSequence(pub Vec<MeasureBlock>);

impl MeasureSequence {
    pub fn blocks(&self) -> &[MeasureBlock] {
        &self.0
    }
}

impl fmt::Display for MeasureSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .0
            .iter()
            .map(|b| {
                let rows: Vec<String> = b.rows.iter().map(usize::to_string).collect();
                let mus: Vec<String> = b.measures.iter().map(usize::to_string).collect();
                format!("[{};{}]", rows.join(" "), mus.join(" "))
            })
            .collect();
        write!(f, "({})", blocks.join(","))
    }
}

impl Slt {
    fn first_nonzero_row(&self) -> Option<usize> {
        (2..=self.n).find(|&r| !self.row_is_zero(r))
    }

    /// Leader column plus the `Δ^{(2)}` nondegeneracy condition shared by
    /// both echelon forms.
    fn leader_is_admissible(&self, r: usize) -> bool {
        let c = self.leader(r).col;
        if c <= 1 {
            return false;
        }
        let two = self.field.from_i64(2);
        (1..c).any(|i0| !self.delta_unchecked(i0, c, r, &two).is_zero())
    }

    /// Whether rows `1..r_1` are zero and every later row is nonzero.
    fn zero_rows_on_top(&self, r1: usize) -> bool {
        (r1..=self.n).all(|r| !self.row_is_zero(r))
    }

    /// First reduced echelon form.
    pub fn is_1ref(&self) -> bool {
        let Some(r1) = self.first_nonzero_row() else {
            return true;
        };
        self.zero_rows_on_top(r1)
            && (r1..=self.n).all(|r| self.leader_is_admissible(r))
            && (r1..self.n).all(|r| self.leader(r).col <= self.leader(r + 1).col)
    }

    /// The wall recursion applied to `T` as given, with the comparison
    /// `c_r >= r_j`. Meaningful as an invariant only for echelon matrices.
    pub(crate) fn wall_recursion(&self) -> Wall {
        let Some(r1) = self.first_nonzero_row() else {
            return Wall::Zero;
        };
        let mut rows = vec![r1];
        loop {
            let rj = *rows.last().unwrap();
            match (rj + 1..=self.n).find(|&r| self.leader(r).col >= rj) {
                Some(next) => rows.push(next),
                None => return Wall::Rows(rows),
            }
        }
    }

    /// `𝕎(S)` for `S` in 1-REF.
    pub fn wall_of_ref(&self) -> Result<Wall, MatrixError> {
        if !self.is_1ref() {
            return Err(MatrixError::Not1Ref);
        }
        Ok(self.wall_recursion())
    }

    /// Bricks `B_j(S)` = rows `[r_j, r_{j+1}[` × cols `[r_{j-1}, r_j[`.
    pub fn bricks(&self) -> Result<Vec<MatrixView>, MatrixError> {
        let wall = self.wall_of_ref()?;
        if wall == Wall::Zero {
            return Err(MatrixError::ZeroMatrix);
        }
        let b = wall.bounds(self.n);
        (1..b.len() - 1)
            .map(|j| {
                self.submatrix(
                    Interval::half_open(b[j], b[j + 1]),
                    Interval::half_open(b[j - 1], b[j]),
                )
            })
            .collect()
    }

    /// Second reduced echelon form. The wall is taken from the recursion
    /// on `T` itself, so this does not presuppose 1-REF.
    pub fn is_2ref(&self) -> bool {
        let wall = self.wall_recursion();
        let Wall::Rows(ref rows) = wall else {
            return true;
        };
        let r1 = rows[0];
        if !self.zero_rows_on_top(r1) || !(r1..=self.n).all(|r| self.leader_is_admissible(r)) {
            return false;
        }
        let b = wall.bounds(self.n);
        for j in 1..b.len() - 1 {
            let cols = Interval::half_open(b[j - 1], b[j]);
            for r in b[j]..b[j + 1] {
                let c = self.leader(r).col;
                if c < b[j - 1] || c >= b[j] {
                    return false;
                }
                if r + 1 < b[j + 1] && self.row_measure(r, cols) > self.row_measure(r + 1, cols) {
                    return false;
                }
            }
        }
        true
    }

    /// `𝕄(T)` for nonzero `T` in 2-REF.
    pub fn measure_sequence(&self) -> Result<MeasureSequence, MatrixError> {
        if !self.is_2ref() {
            return Err(MatrixError::Not2Ref);
        }
        let wall = self.wall_recursion();
        if wall == Wall::Zero {
            return Err(MatrixError::ZeroMatrix);
        }
        let b = wall.bounds(self.n);
        let blocks = (1..b.len() - 1)
            .map(|j| {
                let cols = Interval::half_open(b[j - 1], b[j]);
                let mut rows = vec![b[j]];
                let mut measures = vec![self.row_measure(b[j], cols)];
                loop {
                    let (last_row, last_mu) = (*rows.last().unwrap(), *measures.last().unwrap());
                    match (last_row + 1..b[j + 1]).find(|&r| self.row_measure(r, cols) > last_mu) {
                        Some(r) => {
                            rows.push(r);
                            measures.push(self.row_measure(r, cols));
                        }
                        None => break,
                    }
                }
                MeasureBlock { rows, measures }
            })
            .collect();
        Ok(MeasureSequence(blocks))
    }

    /// Normalized: 2-REF, the first wall row has entries in `{0, 1}`, and
    /// every leader from row `r_1` on equals 1.
    pub fn is_normalized(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if !self.is_2ref() {
            return false;
        }
        let r1 = self.wall_recursion().rows()[0];
        (1..r1).all(|j| {
            let x = self.get(r1, j);
            x.is_zero() || x.is_one()
        }) && (r1..=self.n).all(|r| self.get(r, self.leader(r).col).is_one())
    }
}
