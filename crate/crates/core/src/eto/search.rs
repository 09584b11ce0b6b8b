//! Move enumeration and breadth-first orbit search over finite fields.

use std::collections::{HashMap, VecDeque};

use super::{apply_f, f_legal, q_beta, q_blocking, q_image, EtoError, EtoOp, EtoTrace, QBeta};
use crate::tmatrix::Slt;

fn require_finite(t: &Slt) -> Result<(), EtoError> {
    if !t.field().is_finite() {
        return Err(EtoError::NotFinite(t.field()));
    }
    Ok(())
}

/// Every legal ETO on `T` with its image, in a fixed order: P by row then
/// scalar, F by `(r1, r2)`, Q by `(r0, k0)` then scalar.
pub fn enumerate_moves(t: &Slt) -> Result<Vec<(EtoOp, Slt)>, EtoError> {
    require_finite(t)?;
    let field = t.field();
    let units = field.units()?;
    let n = t.n();
    let mut out = Vec::new();
    for row in 1..=n {
        for alpha in &units {
            let s = super::apply_p(t, row, alpha)?;
            out.push((
                EtoOp::P {
                    row,
                    alpha: alpha.clone(),
                },
                s,
            ));
        }
    }
    for r1 in 1..n {
        for r2 in r1 + 1..=n {
            if f_legal(t, r1, r2).is_ok() {
                out.push((EtoOp::F { r1, r2 }, apply_f(t, r1, r2)?));
            }
        }
    }
    for r0 in 2..=n {
        for k0 in 1..r0 {
            if q_blocking(t, r0, k0).is_some() {
                continue;
            }
            let betas = if k0 == 1 {
                units.clone()
            } else {
                match q_beta(t, r0, k0) {
                    QBeta::Free => units.clone(),
                    QBeta::Forced(b) => vec![b],
                    QBeta::None => vec![],
                }
            };
            for beta in betas {
                let s = q_image(t, r0, k0, &beta);
                out.push((
                    EtoOp::Q {
                        row: r0,
                        col: k0,
                        beta,
                    },
                    s,
                ));
            }
        }
    }
    Ok(out)
}

/// Breadth-first search from `start`; stops early once `goal` holds.
/// Returns the visited states in discovery order, their parent links, and
/// the index of the goal state if reached.
struct Bfs {
    states: Vec<Slt>,
    parent: Vec<Option<(usize, EtoOp)>>,
    hit: Option<usize>,
}

fn bfs(start: &Slt, goal: impl Fn(&Slt) -> bool) -> Result<Bfs, EtoError> {
    require_finite(start)?;
    let mut index: HashMap<Slt, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    let mut parent = vec![None];
    index.insert(start.clone(), 0);
    if goal(start) {
        return Ok(Bfs {
            states,
            parent,
            hit: Some(0),
        });
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        let moves = enumerate_moves(&states[cur])?;
        for (op, s) in moves {
            if index.contains_key(&s) {
                continue;
            }
            let id = states.len();
            index.insert(s.clone(), id);
            let done = goal(&s);
            states.push(s);
            parent.push(Some((cur, op)));
            if done {
                return Ok(Bfs {
                    states,
                    parent,
                    hit: Some(id),
                });
            }
            queue.push_back(id);
        }
    }
    Ok(Bfs {
        states,
        parent,
        hit: None,
    })
}

impl Bfs {
    fn trace_to(&self, mut id: usize) -> EtoTrace {
        let mut ops = Vec::new();
        while let Some((p, op)) = &self.parent[id] {
            ops.push(op.clone());
            id = *p;
        }
        ops.reverse();
        EtoTrace(ops)
    }
}

/// The equivalence class of `T` under ETOs, in BFS discovery order.
pub fn orbit(t: &Slt) -> Result<Vec<Slt>, EtoError> {
    Ok(bfs(t, |_| false)?.states)
}

/// A trace taking `T` to `S` if they are equivalent by ETOs.
pub fn same_orbit(t: &Slt, s: &Slt) -> Result<Option<EtoTrace>, EtoError> {
    if t.n() != s.n() || t.field() != s.field() {
        return Ok(None);
    }
    let b = bfs(t, |x| x == s)?;
    Ok(b.hit.map(|id| b.trace_to(id)))
}

/// A 2-REF matrix equivalent to `T` with a witness trace.
///
/// Over finite fields this is the nearest 2-REF member found by BFS. For
/// `n = 4` over an infinite field a bounded search over F and Q moves is
/// used, which may give up.
pub fn reduce_to_2ref(t: &Slt) -> Result<(Slt, EtoTrace), EtoError> {
    if t.is_2ref() {
        return Ok((t.clone(), EtoTrace::new()));
    }
    if !t.field().is_finite() {
        if t.n() == 4 {
            return crate::classify4::reduce4(t);
        }
        return Err(EtoError::Unsupported(format!(
            "reduction over {} is only implemented for n = 4",
            t.field()
        )));
    }
    let b = bfs(t, Slt::is_2ref)?;
    let id = b
        .hit
        .ok_or_else(|| EtoError::Unsupported("orbit contains no 2-REF matrix".into()))?;
    Ok((b.states[id].clone(), b.trace_to(id)))
}
