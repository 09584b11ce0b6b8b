//! Reduction to 2-REF that works over any field.
//!
//! P moves never change which entries or `Δ` values vanish, so only F and Q
//! moves are explored. A Q move with a free scalar is tried at `±1` and at
//! each value that clears one of the entries it touches.

use std::collections::{HashMap, VecDeque};

use crate::eto::{apply_f, f_legal, q_beta, q_blocking, q_image, EtoError, EtoOp, EtoTrace, QBeta};
use crate::field::Scalar;
use crate::tmatrix::Slt;

/// States explored before giving up.
pub const REDUCE_CAP: usize = 200_000;

fn free_betas(t: &Slt, r0: usize, k0: usize) -> Vec<Scalar> {
    let one = t.field().one();
    let mut out = vec![one.clone(), one.neg()];
    let x = t.get(r0, k0);
    if !x.is_zero() {
        out.push(x.half());
    }
    for r in r0 + 1..=t.n() {
        let d = t.get(r, r0);
        if !d.is_zero() {
            let b = t.get(r, k0).checked_div(d).expect("nonzero").neg();
            if !b.is_zero() {
                out.push(b);
            }
        }
    }
    out.sort_by(Scalar::canonical_cmp);
    out.dedup();
    out
}

fn menu(t: &Slt) -> Vec<(EtoOp, Slt)> {
    let n = t.n();
    let mut out = Vec::new();
    for r1 in 1..n {
        for r2 in r1 + 1..=n {
            if f_legal(t, r1, r2).is_ok() {
                out.push((EtoOp::F { r1, r2 }, apply_f(t, r1, r2).expect("legal")));
            }
        }
    }
    for r0 in 2..=n {
        for k0 in 1..r0 {
            if q_blocking(t, r0, k0).is_some() {
                continue;
            }
            let betas = match q_beta(t, r0, k0) {
                QBeta::Free => free_betas(t, r0, k0),
                QBeta::Forced(b) => vec![b],
                QBeta::None => continue,
            };
            for beta in betas {
                let s = q_image(t, r0, k0, &beta);
                out.push((EtoOp::Q { row: r0, col: k0, beta }, s));
            }
        }
    }
    out
}

/// A 2-REF matrix equivalent to `T` with a witness trace.
pub fn reduce4(t: &Slt) -> Result<(Slt, EtoTrace), EtoError> {
    if t.is_2ref() {
        return Ok((t.clone(), EtoTrace::new()));
    }
    let mut index: HashMap<Slt, usize> = HashMap::from([(t.clone(), 0)]);
    let mut states = vec![t.clone()];
    let mut parent: Vec<Option<(usize, EtoOp)>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for (op, s) in menu(&states[cur]) {
            if index.contains_key(&s) {
                continue;
            }
            let id = states.len();
            let done = s.is_2ref();
            index.insert(s.clone(), id);
            states.push(s);
            parent.push(Some((cur, op)));
            if done {
                let mut ops = Vec::new();
                let mut at = id;
                while let Some((p, op)) = &parent[at] {
                    ops.push(op.clone());
                    at = *p;
                }
                ops.reverse();
                return Ok((states[id].clone(), EtoTrace(ops)));
            }
            if states.len() >= REDUCE_CAP {
                return Err(EtoError::Unsupported(format!(
                    "no 2-REF matrix found within {REDUCE_CAP} states"
                )));
            }
            queue.push_back(id);
        }
    }
    Err(EtoError::Unsupported("no 2-REF matrix reachable".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eto::{apply, apply_trace};
    use crate::field::Field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_f5_matrix_reduces() {
        let f5 = Field::prime(5).unwrap();
        for code in 0..5u32.pow(6) {
            let mut c = code;
            let v: Vec<i64> = (0..6)
                .map(|_| {
                    let d = c % 5;
                    c /= 5;
                    i64::from(d)
                })
                .collect();
            let t = Slt::from_ints(f5, &[&v[0..1], &v[1..3], &v[3..6]]).unwrap();
            let (r, tr) = reduce4(&t).unwrap();
            assert!(r.is_2ref());
            assert_eq!(apply_trace(&t, &tr).unwrap(), r);
        }
    }

    #[test]
    fn scrambled_rationals_reduce() {
        let q = Field::Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let starts = [
            Slt::from_ints(q, &[&[0], &[2, 1], &[12, 9, 3]]).unwrap(),
            Slt::from_ints(q, &[&[0], &[1, 1], &[5, 1, 0]]).unwrap(),
            Slt::from_ints(q, &[&[0], &[0, 0], &[1, 1, 1]]).unwrap(),
        ];
        for start in starts {
            for _ in 0..10 {
                let mut t = start.clone();
                for _ in 0..4 {
                    let moves = menu(&t);
                    let (op, _) = &moves[rng.random_range(0..moves.len())];
                    t = apply(&t, op).unwrap();
                }
                let (r, tr) = reduce4(&t).unwrap();
                assert!(r.is_2ref());
                assert_eq!(apply_trace(&t, &tr).unwrap(), r);
            }
        }
    }
}
