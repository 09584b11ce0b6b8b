//! Elementary triangular operations (ETOs) and equivalence by ETOs.
//!
//! `P_r(α)` scales row `r` by `α⁻¹` and column `r` by `α`. `F_(r1,r2)`
//! conjugates by the transposition `(r1 r2)` when that keeps the matrix
//! strictly lower triangular. `Q_(r0,k0)(β)` subtracts `2β` at `(r0,k0)` and
//! adds `β·t_{r,r0}` to `t_{r,k0}` below.
//!
//! The Q position rule accepted here is "row `r0` vanishes right of column
//! `k0`", slightly wider than "`(r0,k0)` is the leader". It is what the
//! normalization constructions actually use (they shear a zero row), and it
//! makes every ETO invertible: `Q(β)` is undone by `Q(-β)`, `P(α)` by `P(α⁻¹)`
//! and `F` by itself.

mod packed;
mod search;

pub use packed::OrbitPartition;
pub use search::{enumerate_moves, orbit, reduce_to_2ref, same_orbit};

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};
use crate::tmatrix::Slt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtoError {
    #[error("{0} requires a nonzero scalar")]
    ZeroScalar(char),
    #[error("bad indices for {op} on a {n}x{n} matrix")]
    BadIndex { op: String, n: usize },
    #[error("F condition (a) fails: t[{row},{col}] != 0")]
    FConditionA { row: usize, col: usize },
    #[error("F condition (b) fails: t[{row},{col}] != 0")]
    FConditionB { row: usize, col: usize },
    #[error("({row},{col}) is not a Q position: t[{row},{blocking}] != 0")]
    NotQPosition {
        row: usize,
        col: usize,
        blocking: usize,
    },
    #[error("Q precondition fails at i = {i}")]
    QCondition { i: usize },
    #[error("step {index}: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<EtoError>,
    },
    #[error("{0} is not a finite field")]
    NotFinite(Field),
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("trace line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{0}")]
    Unsupported(String),
}

/// One elementary triangular operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EtoOp {
    P { row: usize, alpha: Scalar },
    F { r1: usize, r2: usize },
    Q { row: usize, col: usize, beta: Scalar },
}

impl EtoOp {
    /// The operation undoing this one.
    pub fn inverse(&self) -> Result<EtoOp, EtoError> {
        Ok(match self {
            EtoOp::P { row, alpha } => EtoOp::P {
                row: *row,
                alpha: alpha.inv()?,
            },
            EtoOp::F { .. } => self.clone(),
            EtoOp::Q { row, col, beta } => EtoOp::Q {
                row: *row,
                col: *col,
                beta: beta.neg(),
            },
        })
    }
}

impl fmt::Display for EtoOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtoOp::P { row, alpha } => write!(f, "P {row} {alpha}"),
            EtoOp::F { r1, r2 } => write!(f, "F {r1} {r2}"),
            EtoOp::Q { row, col, beta } => write!(f, "Q {row} {col} {beta}"),
        }
    }
}

/// An ordered sequence of ETOs, applied first to last.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EtoTrace(pub Vec<EtoOp>);

impl EtoTrace {
    pub fn new() -> Self {
        EtoTrace(Vec::new())
    }

    pub fn ops(&self) -> &[EtoOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, op: EtoOp) {
        self.0.push(op);
    }

    pub fn extend(&mut self, other: &EtoTrace) {
        self.0.extend(other.0.iter().cloned());
    }

    /// Trace of the inverse path: inverse ops in reverse order.
    pub fn inverse(&self) -> Result<EtoTrace, EtoError> {
        self.0.iter().rev().map(EtoOp::inverse).collect::<Result<_, _>>().map(EtoTrace)
    }

    pub fn to_text(&self) -> String {
        self.0.iter().map(|op| format!("{op}\n")).collect()
    }

    /// Parse one op per line; blank lines and `#` comments are skipped.
    pub fn parse(field: Field, text: &str) -> Result<Self, EtoError> {
        let mut ops = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| EtoError::Parse { line: k + 1, reason };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let idx = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}")));
            let scalar = |s: &str| field.parse_scalar(s).map_err(|e| bad(e.to_string()));
            let op = match toks.as_slice() {
                ["P", r, a] => EtoOp::P {
                    row: idx(r)?,
                    alpha: scalar(a)?,
                },
                ["F", r1, r2] => EtoOp::F {
                    r1: idx(r1)?,
                    r2: idx(r2)?,
                },
                ["Q", r, c, b] => EtoOp::Q {
                    row: idx(r)?,
                    col: idx(c)?,
                    beta: scalar(b)?,
                },
                _ => return Err(bad(format!("unrecognized operation {line:?}"))),
            };
            ops.push(op);
        }
        Ok(EtoTrace(ops))
    }
}

impl fmt::Display for EtoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(EtoOp::to_string).collect();
        write!(f, "[{}]", parts.join("; "))
    }
}

fn check_field(t: &Slt, x: &Scalar) -> Result<(), EtoError> {
    if x.field() != t.field() {
        return Err(FieldError::Mismatch(t.field(), x.field()).into());
    }
    Ok(())
}

pub fn apply_p(t: &Slt, r1: usize, alpha: &Scalar) -> Result<Slt, EtoError> {
    check_field(t, alpha)?;
    if alpha.is_zero() {
        return Err(EtoError::ZeroScalar('P'));
    }
    let n = t.n();
    if !(1..=n).contains(&r1) {
        return Err(EtoError::BadIndex {
            op: format!("P {r1}"),
            n,
        });
    }
    let inv = alpha.inv()?;
    let mut s = t.clone();
    for k in 1..r1 {
        s.set_unchecked(r1, k, &inv * t.get(r1, k));
    }
    for r in r1 + 1..=n {
        s.set_unchecked(r, r1, alpha * t.get(r, r1));
    }
    Ok(s)
}

/// Check the two F conditions, reporting the first offending entry.
pub(crate) fn f_legal(t: &Slt, r1: usize, r2: usize) -> Result<(), EtoError> {
    if let Some(col) = (r1..r2).find(|&j| !t.get(r2, j).is_zero()) {
        return Err(EtoError::FConditionA { row: r2, col });
    }
    if let Some(row) = (r1..=r2).find(|&r| !t.get(r, r1).is_zero()) {
        return Err(EtoError::FConditionB { row, col: r1 });
    }
    Ok(())
}

pub fn apply_f(t: &Slt, r1: usize, r2: usize) -> Result<Slt, EtoError> {
    let n = t.n();
    if !(1 <= r1 && r1 < r2 && r2 <= n) {
        return Err(EtoError::BadIndex {
            op: format!("F {r1} {r2}"),
            n,
        });
    }
    f_legal(t, r1, r2)?;
    let sigma = |i: usize| {
        if i == r1 {
            r2
        } else if i == r2 {
            r1
        } else {
            i
        }
    };
    let mut s = t.clone();
    for r in 2..=n {
        for k in 1..r {
            s.set_unchecked(r, k, t.get(sigma(r), sigma(k)).clone());
        }
    }
    Ok(s)
}

/// What the Q precondition allows at `(r0, k0)` for `k0 > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QBeta {
    /// Every `β ≠ 0` is legal.
    Free,
    /// Exactly this `β` is legal.
    Forced(Scalar),
    None,
}

/// Solve `Δ^{(1)}_{i,k0,r0} = β·t_{k0,i}` for all `i < k0`.
pub(crate) fn q_beta(t: &Slt, r0: usize, k0: usize) -> QBeta {
    let one = t.field().one();
    let mut forced: Option<Scalar> = None;
    for i in 1..k0 {
        let lhs = t.delta_unchecked(i, k0, r0, &one);
        let c = t.get(k0, i);
        if c.is_zero() {
            if !lhs.is_zero() {
                return QBeta::None;
            }
            continue;
        }
        let b = lhs.checked_div(c).expect("nonzero divisor");
        match &forced {
            Some(f) if *f != b => return QBeta::None,
            Some(_) => {}
            None => forced = Some(b),
        }
    }
    match forced {
        None => QBeta::Free,
        Some(b) if b.is_zero() => QBeta::None,
        Some(b) => QBeta::Forced(b),
    }
}

/// The first column right of `k0` where row `r0` is nonzero, if any.
pub(crate) fn q_blocking(t: &Slt, r0: usize, k0: usize) -> Option<usize> {
    (k0 + 1..r0).find(|&j| !t.get(r0, j).is_zero())
}

pub fn apply_q(t: &Slt, r0: usize, k0: usize, beta: &Scalar) -> Result<Slt, EtoError> {
    check_field(t, beta)?;
    let n = t.n();
    if !(1 <= k0 && k0 < r0 && r0 <= n) {
        return Err(EtoError::BadIndex {
            op: format!("Q {r0} {k0}"),
            n,
        });
    }
    if beta.is_zero() {
        return Err(EtoError::ZeroScalar('Q'));
    }
    if let Some(blocking) = q_blocking(t, r0, k0) {
        return Err(EtoError::NotQPosition {
            row: r0,
            col: k0,
            blocking,
        });
    }
    let one = t.field().one();
    if let Some(i) = (1..k0).find(|&i| t.delta_unchecked(i, k0, r0, &one) != beta * t.get(k0, i)) {
        return Err(EtoError::QCondition { i });
    }
    Ok(q_image(t, r0, k0, beta))
}

/// The Q formula without any legality check.
pub(crate) fn q_image(t: &Slt, r0: usize, k0: usize, beta: &Scalar) -> Slt {
    let mut s = t.clone();
    let two_beta = beta + beta;
    s.set_unchecked(r0, k0, t.get(r0, k0) - &two_beta);
    for r in r0 + 1..=t.n() {
        s.set_unchecked(r, k0, t.get(r, k0) + &(beta * t.get(r, r0)));
    }
    s
}

pub fn apply(t: &Slt, op: &EtoOp) -> Result<Slt, EtoError> {
    match op {
        EtoOp::P { row, alpha } => apply_p(t, *row, alpha),
        EtoOp::F { r1, r2 } => apply_f(t, *r1, *r2),
        EtoOp::Q { row, col, beta } => apply_q(t, *row, *col, beta),
    }
}

/// Apply a trace step by step; the error names the first illegal step
/// (0-based).
pub fn apply_trace(t: &Slt, trace: &EtoTrace) -> Result<Slt, EtoError> {
    let mut cur = t.clone();
    for (index, op) in trace.0.iter().enumerate() {
        cur = apply(&cur, op).map_err(|e| EtoError::Step {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(cur)
}
