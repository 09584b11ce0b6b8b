//! The linear data `Γ` of a candidate isomorphism `X_j ↦ Σ_i γ_ij Y_i` and
//! two independent ways of checking it.

use std::fmt;

use super::{Algebra, AlgebraElement, AlgebraError, Monomial};
use crate::field::{Field, Scalar};
use crate::tmatrix::Slt;

/// `n × n` matrix `[γ_ij]`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GammaMatrix {
    field: Field,
    n: usize,
    cells: Vec<Scalar>,
}

impl GammaMatrix {
    pub fn zero(n: usize, field: Field) -> Self {
        GammaMatrix {
            field,
            n,
            cells: vec![field.zero(); n * n],
        }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        let mut g = GammaMatrix::zero(n, field);
        for i in 1..=n {
            g.set(i, i, field.one());
        }
        g
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let mut g = GammaMatrix::zero(n, field);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(AlgebraError::GammaShape { expected: n });
            }
            for (j, x) in row.into_iter().enumerate() {
                if x.field() != field {
                    return Err(AlgebraError::Mismatch);
                }
                g.cells[i * n + j] = x;
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.cells[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.cells[(i - 1) * self.n + (j - 1)] = x;
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (1..=self.n).map(|i| self.get(i, j).clone()).collect()
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut m: Vec<Vec<Scalar>> = (1..=n).map(|i| (1..=n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = m[rank][col].inv().expect("pivot is nonzero");
            for r in rank + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let sub = &f * &m[rank][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn determinant(&self) -> Scalar {
        let n = self.n;
        let mut m: Vec<Vec<Scalar>> = (1..=n).map(|i| (1..=n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut det = self.field.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return self.field.zero();
            };
            if piv != col {
                m.swap(col, piv);
                det = det.neg();
            }
            det = &det * &m[col][col];
            let inv = m[col][col].inv().expect("pivot is nonzero");
            for r in col + 1..n {
                let f = &m[r][col] * &inv;
                for c in col..n {
                    let sub = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        det
    }

    /// Whitespace-separated grid, one row per line.
    pub fn to_text(&self) -> String {
        (1..=self.n)
            .map(|i| {
                let row: Vec<String> = (1..=self.n).map(|j| self.get(i, j).to_string()).collect();
                row.join(" ") + "\n"
            })
            .collect()
    }

    pub fn parse(field: Field, text: &str) -> Result<Self, AlgebraError> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| field.parse_scalar(tok).map_err(AlgebraError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(AlgebraError::Format("empty grid".into()));
        }
        GammaMatrix::from_rows(field, rows)
    }
}

impl fmt::Display for GammaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn check_shapes(t: &Slt, s: &Slt, g: &GammaMatrix) -> Result<(), AlgebraError> {
    if t.n() != s.n() || t.field() != s.field() || g.field() != t.field() {
        return Err(AlgebraError::Mismatch);
    }
    if g.n() != t.n() {
        return Err(AlgebraError::GammaShape { expected: t.n() });
    }
    Ok(())
}

/// Residual `lhs - rhs` of the key equation for `(r, i, k)` with `i < k`:
/// `2γ_ir γ_kr + γ_kr² s_ki = Σ_{j<r} t_rj (γ_kj γ_kr s_ki + γ_kj γ_ir + γ_ij γ_kr)`.
/// It is the coefficient of `Y_i Y_k` in `γ(X_r)² - Σ_j t_rj γ(X_j) γ(X_r)`.
pub(crate) fn key_residual(t: &Slt, s: &Slt, g: &GammaMatrix, r: usize, i: usize, k: usize) -> Scalar {
    let gir = g.get(i, r);
    let gkr = g.get(k, r);
    let ski = s.get(k, i);
    let mut lhs = gir * gkr;
    lhs = &lhs + &lhs;
    lhs = &lhs + &(&(gkr * gkr) * ski);
    let mut rhs = t.field().zero();
    for j in 1..r {
        let trj = t.get(r, j);
        if trj.is_zero() {
            continue;
        }
        let gkj = g.get(k, j);
        let term = &(&(&(gkj * gkr) * ski) + &(gkj * gir)) + &(g.get(i, j) * gkr);
        rhs = &rhs + &(trj * &term);
    }
    &lhs - &rhs
}

/// Which index pairs generate equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSet {
    /// `1 <= i < k <= n`.
    Ordered,
    /// Every `i != k`; a pair with `i > k` stands for the equation of
    /// `(k, i)`, so the verdict must not change.
    WithDuplicates,
}

/// Whether the key equations hold for every `r` and every pair.
pub fn gamma_system_holds_with(t: &Slt, s: &Slt, g: &GammaMatrix, pairs: PairSet) -> Result<bool, AlgebraError> {
    check_shapes(t, s, g)?;
    if !g.is_invertible() {
        return Err(AlgebraError::Singular);
    }
    let n = t.n();
    for r in 1..=n {
        for i in 1..=n {
            for k in 1..=n {
                let keep = match pairs {
                    PairSet::Ordered => i < k,
                    PairSet::WithDuplicates => i != k,
                };
                if keep && !key_residual(t, s, g, r, i.min(k), i.max(k)).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn gamma_system_holds(t: &Slt, s: &Slt, g: &GammaMatrix) -> Result<bool, AlgebraError> {
    gamma_system_holds_with(t, s, g, PairSet::Ordered)
}

/// Map every `X_j` to `Σ_i γ_ij Y_i` in `𝒜(S)` and test the defining
/// relations of `𝒜(T)` on the images.
pub fn gamma_as_homomorphism(t: &Slt, s: &Slt, g: &GammaMatrix) -> Result<bool, AlgebraError> {
    check_shapes(t, s, g)?;
    if !g.is_invertible() {
        return Err(AlgebraError::Singular);
    }
    let alg = Algebra::new(s)?;
    Ok(homomorphism_with(t, &alg, g))
}

pub(crate) fn homomorphism_with(t: &Slt, alg: &Algebra, g: &GammaMatrix) -> bool {
    let field = t.field();
    let n = t.n();
    let images: Vec<AlgebraElement> = (1..=n)
        .map(|j| {
            let mut e = AlgebraElement::zero(field);
            for i in 1..=n {
                e.add_term(Monomial::generator(i), g.get(i, j).clone());
            }
            e
        })
        .collect();
    (1..=n).all(|r| {
        let lhs = alg.square(&images[r - 1]);
        let mut rhs = AlgebraElement::zero(field);
        for j in 1..r {
            let trj = t.get(r, j);
            if !trj.is_zero() {
                let prod = alg.mul(&images[j - 1], &images[r - 1]).expect("same field");
                rhs = rhs.add(&prod.scale(trj));
            }
        }
        lhs == rhs
    })
}
