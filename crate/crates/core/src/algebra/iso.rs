//! Exhaustive isomorphism search over finite fields.
//!
//! Columns of `Γ` are chosen left to right. After column `r` is fixed every
//! key equation with that `r` is decidable, since it only involves columns
//! `1..=r`, so failing branches are cut immediately.
//!
//! In structured mode `Γ` is restricted to the shape forced on isomorphisms
//! between 2-REF matrices with a common wall and measure sequence: zero below
//! the diagonal blocks, and each diagonal block supported on a permutation
//! that preserves the blocks and their measure sub-blocks. Unrestricted mode
//! tries every invertible `Γ` and serves as an independent check.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::gamma::key_residual;
use super::{AlgebraError, GammaMatrix};
use crate::field::{Field, Scalar};
use crate::tmatrix::{MeasureSequence, Slt, Wall};

pub const DEFAULT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMode {
    Structured,
    Unrestricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsoConfig {
    /// Maximum number of column candidates evaluated.
    pub cap: u64,
    pub mode: IsoMode,
}

impl Default for IsoConfig {
    fn default() -> Self {
        IsoConfig {
            cap: DEFAULT_CAP,
            mode: IsoMode::Structured,
        }
    }
}

/// Why no isomorphism exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Absence {
    WallMismatch { t: Wall, s: Wall },
    MeasureMismatch { t: MeasureSequence, s: MeasureSequence },
    /// The whole search space was explored.
    Exhausted { candidates: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    Found(GammaMatrix),
    Absent(Absence),
}

impl IsoOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, IsoOutcome::Found(_))
    }
}

/// Search for `Γ` with `𝒜(T) ≅ 𝒜(S)`.
pub fn iso_search(t: &Slt, s: &Slt, cfg: &IsoConfig) -> Result<IsoOutcome, AlgebraError> {
    if t.n() != s.n() || t.field() != s.field() {
        return Err(AlgebraError::Mismatch);
    }
    let field = t.field();
    if !field.is_finite() {
        return Err(AlgebraError::NotFinite(field));
    }
    let n = t.n();
    let columns = match cfg.mode {
        IsoMode::Unrestricted => ColumnShapes::unrestricted(n),
        IsoMode::Structured => {
            if !t.is_2ref() || !s.is_2ref() {
                return Err(AlgebraError::NotReduced);
            }
            let (wt, ws) = (t.wall_recursion(), s.wall_recursion());
            if wt != ws {
                return Ok(IsoOutcome::Absent(Absence::WallMismatch { t: wt, s: ws }));
            }
            if wt == Wall::Zero {
                return Ok(IsoOutcome::Found(GammaMatrix::identity(n, field)));
            }
            let (mt, ms) = (t.measure_sequence()?, s.measure_sequence()?);
            if mt != ms {
                return Ok(IsoOutcome::Absent(Absence::MeasureMismatch { t: mt, s: ms }));
            }
            ColumnShapes::structured(n, &wt, &mt)
        }
    };

    let search = Search {
        t,
        s,
        field,
        elements: field.elements()?,
        units: field.units()?,
        cap: cfg.cap,
        count: AtomicU64::new(0),
    };
    // Parallel over the shapes and the first column's candidates; taking the
    // first hit in sequential order keeps the returned Γ deterministic.
    let jobs: Vec<(usize, Vec<Scalar>)> = columns
        .shapes
        .iter()
        .enumerate()
        .flat_map(|(k, shape)| search.column_candidates(&shape[0], 1).into_iter().map(move |c| (k, c)))
        .collect();
    let found = jobs.par_iter().find_map_first(|(k, col)| {
        let shape = &columns.shapes[*k];
        let mut g = GammaMatrix::zero(n, field);
        let mut basis = Vec::new();
        match search.try_column(&mut g, &mut basis, shape, 1, col) {
            Ok(true) => Some(Ok(g)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        }
    });
    match found {
        Some(Ok(g)) => Ok(IsoOutcome::Found(g)),
        Some(Err(e)) => Err(e),
        None => Ok(IsoOutcome::Absent(Absence::Exhausted {
            candidates: search.count.load(Ordering::Relaxed),
        })),
    }
}

/// Allowed support of one column: the pivot row that must be nonzero (if
/// any) and the rows that are free.
#[derive(Debug, Clone)]
struct ColumnShape {
    pivot: Option<usize>,
    free: Vec<usize>,
}

struct ColumnShapes {
    shapes: Vec<Vec<ColumnShape>>,
}

impl ColumnShapes {
    fn unrestricted(n: usize) -> Self {
        let col = ColumnShape {
            pivot: None,
            free: (1..=n).collect(),
        };
        ColumnShapes {
            shapes: vec![vec![col; n]],
        }
    }

    fn structured(n: usize, wall: &Wall, ms: &MeasureSequence) -> Self {
        let mut bounds = vec![1];
        bounds.extend_from_slice(wall.rows());
        bounds.push(n + 1);
        // sub-blocks permuted independently: the zero rows, then each wall
        // block split at its measure breakpoints
        let mut cells: Vec<(usize, usize)> = vec![(1, bounds[1])];
        for (j, block) in ms.blocks().iter().enumerate() {
            let mut cuts = block.rows.clone();
            cuts.push(bounds[j + 2]);
            cells.extend(cuts.windows(2).map(|w| (w[0], w[1])));
        }
        let block_start = |r: usize| bounds.iter().rev().find(|&&b| b <= r).copied().unwrap_or(1);

        let mut perms: Vec<Vec<usize>> = vec![(0..=n).collect()];
        for &(lo, hi) in &cells {
            let idx: Vec<usize> = (lo..hi).collect();
            let local = permutations(&idx);
            perms = perms
                .into_iter()
                .flat_map(|p| {
                    let idx = &idx;
                    local.iter().map(move |q| {
                        let mut p = p.clone();
                        for (a, &b) in idx.iter().zip(q) {
                            p[*a] = b;
                        }
                        p
                    })
                })
                .collect();
        }
        let shapes = perms
            .into_iter()
            .map(|rho| {
                (1..=n)
                    .map(|r| {
                        let pivot = (1..=n).find(|&i| rho[i] == r);
                        ColumnShape {
                            pivot,
                            free: (1..block_start(r)).collect(),
                        }
                    })
                    .collect()
            })
            .collect();
        ColumnShapes { shapes }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

struct Search<'a> {
    t: &'a Slt,
    s: &'a Slt,
    field: Field,
    elements: Vec<Scalar>,
    units: Vec<Scalar>,
    cap: u64,
    count: AtomicU64,
}

impl Search<'_> {
    /// All column vectors with the given support, as full length-`n` vectors.
    fn column_candidates(&self, shape: &ColumnShape, _r: usize) -> Vec<Vec<Scalar>> {
        let n = self.t.n();
        let mut out = vec![vec![self.field.zero(); n + 1]];
        if let Some(p) = shape.pivot {
            out = out
                .into_iter()
                .flat_map(|v| {
                    self.units.iter().map(move |u| {
                        let mut v = v.clone();
                        v[p] = u.clone();
                        v
                    })
                })
                .collect();
        }
        for &i in &shape.free {
            out = out
                .into_iter()
                .flat_map(|v| {
                    self.elements.iter().map(move |x| {
                        let mut v = v.clone();
                        v[i] = x.clone();
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Reduce `v` against the echelon `basis`; the remainder is nonzero iff
    /// `v` is independent of the basis.
    fn reduce(&self, basis: &[(usize, Vec<Scalar>)], v: &[Scalar]) -> Option<(usize, Vec<Scalar>)> {
        let mut v = v.to_vec();
        for (piv, b) in basis {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].clone();
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x - &(&f * y);
            }
        }
        let piv = v.iter().position(|x| !x.is_zero())?;
        let inv = v[piv].inv().expect("nonzero pivot");
        let v = v.iter().map(|x| x * &inv).collect();
        Some((piv, v))
    }

    fn set_column(&self, g: &mut GammaMatrix, r: usize, col: &[Scalar]) {
        for i in 1..=self.t.n() {
            g.set(i, r, col[i].clone());
        }
    }

    fn equations_hold(&self, g: &GammaMatrix, r: usize) -> bool {
        let n = self.t.n();
        (1..n).all(|i| (i + 1..=n).all(|k| key_residual(self.t, self.s, g, r, i, k).is_zero()))
    }

    /// Place `col` as column `r` and continue the search to the right.
    fn try_column(
        &self,
        g: &mut GammaMatrix,
        basis: &mut Vec<(usize, Vec<Scalar>)>,
        shapes: &[ColumnShape],
        r: usize,
        col: &[Scalar],
    ) -> Result<bool, AlgebraError> {
        if self.count.fetch_add(1, Ordering::Relaxed) >= self.cap {
            return Err(AlgebraError::Inconclusive { cap: self.cap });
        }
        let Some(reduced) = self.reduce(basis, col) else {
            return Ok(false);
        };
        self.set_column(g, r, col);
        if !self.equations_hold(g, r) {
            return Ok(false);
        }
        if r == self.t.n() {
            return Ok(true);
        }
        basis.push(reduced);
        for next in self.column_candidates(&shapes[r], r + 1) {
            if self.try_column(g, basis, shapes, r + 1, &next)? {
                return Ok(true);
            }
        }
        basis.pop();
        let zero = vec![self.field.zero(); self.t.n() + 1];
        self.set_column(g, r + 1, &zero);
        Ok(false)
    }
}
