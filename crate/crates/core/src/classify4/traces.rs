//! Explicit ETO sequences between the `4 × 4` simplified forms.

use super::ClassifyError;
use crate::eto::{apply_trace, EtoOp, EtoTrace};
use crate::field::Scalar;
use crate::tmatrix::{MatrixError, Slt};

fn p(row: usize, alpha: Scalar) -> EtoOp {
    EtoOp::P { row, alpha }
}

fn q(row: usize, col: usize, beta: Scalar) -> EtoOp {
    EtoOp::Q { row, col, beta }
}

/// P-only steps taking a 2-REF matrix to a normalized one.
pub fn normalize_p_steps(s: &Slt) -> Result<(Slt, EtoTrace), ClassifyError> {
    if !s.is_2ref() {
        return Err(MatrixError::Not2Ref.into());
    }
    let mut trace = EtoTrace::new();
    if s.is_zero() {
        return Ok((s.clone(), trace));
    }
    let r1 = s.wall_of_ref()?.rows()[0];
    // columns of the first wall row: the rows above are zero, so only
    // t_{r1,j} and the entries below row j change
    for j in 1..r1 {
        let x = s.get(r1, j);
        if !x.is_zero() && !x.is_one() {
            trace.push(p(j, x.inv()?));
        }
    }
    let mut cur = apply_trace(s, &trace)?;
    for r in r1 + 1..=s.n() {
        let lead = cur.get(r, cur.leader(r).col).clone();
        if !lead.is_one() {
            let op = p(r, lead);
            cur = crate::eto::apply(&cur, &op)?;
            trace.push(op);
        }
    }
    Ok((cur, trace))
}

/// The six-step sequence with parameter `ε`. On `V(u,v)` it realises
/// `(2u+1, 2v+1) ↦ ((2v+1)ε, (2u+1)/ε)`. The second step is dropped when
/// its scalar `(ε-1)/(2ε)` vanishes.
pub fn lemma_steps(eps: &Scalar) -> Result<EtoTrace, ClassifyError> {
    let field = eps.field();
    let one = field.one();
    let inv = eps.inv()?;
    let mut ops = vec![q(2, 1, eps.clone())];
    let b = (eps - &one).checked_mul(&inv)?.half();
    if !b.is_zero() {
        ops.push(q(3, 2, b));
    }
    ops.extend([p(2, eps.clone()), q(2, 1, one.neg()), p(1, inv), EtoOp::F { r1: 1, r2: 2 }]);
    Ok(EtoTrace(ops))
}

/// `V(u,v) → C_{2uv+u+v}` with `ε = 2u+1`.
pub fn lemma1_trace(u: &Scalar, _v: &Scalar) -> Result<EtoTrace, ClassifyError> {
    let eps = &(u + u) + &u.field().one();
    if eps.is_zero() {
        return Err(ClassifyError::LemmaGap);
    }
    lemma_steps(&eps)
}

/// `D_{ε²b} → D_b`.
pub fn d_trace(eps: &Scalar) -> Result<EtoTrace, ClassifyError> {
    let mut t = lemma_steps(eps)?;
    if eps.is_one() {
        return Ok(EtoTrace::new());
    }
    t.0.pop();
    t.push(p(4, eps.clone()));
    Ok(t)
}

/// `C_a → C_{-a/(2a+1)}` when `2a+1` has a square root `E ≠ -1` in the
/// field. Returns `None` when it has none, and the empty trace for `a = 0`.
pub fn c_pair_trace(a: &Scalar) -> Result<Option<EtoTrace>, ClassifyError> {
    let field = a.field();
    let one = field.one();
    let w = &(a + a) + &one;
    if w.is_zero() {
        return Ok(None);
    }
    let Some(mut e) = w.sqrt() else {
        return Ok(None);
    };
    if e == one.neg() {
        e = one.clone();
    }
    if e.is_one() {
        return Ok(Some(EtoTrace::new()));
    }
    // six steps reach V(w', w'), then a Q(4,3) flip and a final six steps
    let mut t = lemma_steps(&e)?;
    t.push(q(4, 3, (&e + &one).half()));
    t.push(p(4, e.neg()));
    t.extend(&lemma_steps(&e.inv()?)?);
    Ok(Some(t))
}

#[cfg(test)]
mod tests {
    use super::super::{c_partner, SimplifiedForm};
    use super::*;
    use crate::field::Field;

    fn v(field: Field, u: &Scalar, w: &Scalar) -> Slt {
        let z = field.zero();
        let o = field.one();
        Slt::from_rows(field, vec![vec![z.clone()], vec![o.clone(), o.clone()], vec![u.clone(), w.clone(), o]])
            .unwrap()
    }

    fn c(field: Field, a: &Scalar) -> Slt {
        SimplifiedForm::C(a.clone()).materialize(field).unwrap()
    }

    #[test]
    fn normalize_worked_example() {
        let q = Field::Rationals;
        let t = Slt::from_ints(q, &[&[0], &[2, 1], &[12, 9, 3]]).unwrap();
        let (u, tr) = normalize_p_steps(&t).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.0[0], p(1, q.from_ratio(1, 2).unwrap()));
        assert_eq!(tr.0[1], p(4, q.from_i64(3)));
        assert_eq!(u, Slt::from_ints(q, &[&[0], &[1, 1], &[2, 3, 1]]).unwrap());
        assert!(u.is_normalized());
        let (same, tr) = normalize_p_steps(&u).unwrap();
        assert_eq!((same, tr.len()), (u, 0));
    }

    #[test]
    fn normalize_d_shape() {
        let q = Field::Rationals;
        let t = Slt::from_ints(q, &[&[0], &[5, 5], &[3, 7, 0]]).unwrap();
        let (u, tr) = normalize_p_steps(&t).unwrap();
        assert!(u.is_normalized());
        assert!(tr.ops().iter().all(|op| matches!(op, EtoOp::P { .. })));
        assert_eq!(tr.len(), 3);
        assert!(normalize_p_steps(&Slt::from_ints(q, &[&[1], &[0, 0], &[0, 0, 0]]).unwrap()).is_err());
    }

    #[test]
    fn lemma_over_q() {
        let q = Field::Rationals;
        let (u, w) = (q.from_i64(2), q.from_i64(3));
        let tr = lemma1_trace(&u, &w).unwrap();
        assert_eq!(apply_trace(&v(q, &u, &w), &tr).unwrap(), c(q, &q.from_i64(17)));
        let z = q.zero();
        let tr = lemma1_trace(&z, &z).unwrap();
        assert_eq!(tr.len(), 5);
        assert_eq!(apply_trace(&v(q, &z, &z), &tr).unwrap(), c(q, &z));
        assert_eq!(
            lemma1_trace(&q.from_ratio(-1, 2).unwrap(), &z),
            Err(ClassifyError::LemmaGap)
        );
    }

    #[test]
    fn lemma_exhaustive_small_fields() {
        for p in [3u64, 5, 7] {
            let f = Field::prime(p).unwrap();
            for u in f.elements().unwrap() {
                for w in f.elements().unwrap() {
                    let Ok(tr) = lemma1_trace(&u, &w) else {
                        assert!((&(&u + &u) + &f.one()).is_zero());
                        continue;
                    };
                    let a = &(&(&(&u * &w) + &(&u * &w)) + &u) + &w;
                    assert_eq!(apply_trace(&v(f, &u, &w), &tr).unwrap(), c(f, &a), "p={p} u={u} v={w}");
                }
            }
        }
    }

    #[test]
    fn d_traces() {
        let q = Field::Rationals;
        let d = |x: i64| SimplifiedForm::D(q.from_i64(x)).materialize(q).unwrap();
        let tr = d_trace(&q.from_i64(2)).unwrap();
        assert_eq!(apply_trace(&d(4), &tr).unwrap(), d(1));
        let tr = d_trace(&q.from_i64(-3)).unwrap();
        assert_eq!(apply_trace(&d(18), &tr).unwrap(), d(2));
        assert!(d_trace(&q.one()).unwrap().is_empty());
        let f7 = Field::prime(7).unwrap();
        for eps in f7.units().unwrap() {
            for b in f7.units().unwrap() {
                let from = SimplifiedForm::D(&(&eps * &eps) * &b).materialize(f7).unwrap();
                let to = SimplifiedForm::D(b.clone()).materialize(f7).unwrap();
                assert_eq!(apply_trace(&from, &d_trace(&eps).unwrap()).unwrap(), to);
            }
        }
    }

    #[test]
    fn c_pairs() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = Field::prime(p).unwrap();
            for a in f.elements().unwrap() {
                match c_pair_trace(&a).unwrap() {
                    Some(tr) => {
                        let b = c_partner(&a).unwrap();
                        assert_eq!(apply_trace(&c(f, &a), &tr).unwrap(), c(f, &b), "p={p} a={a}");
                    }
                    None => assert!(!(&(&a + &a) + &f.one()).is_square() || (&(&a + &a) + &f.one()).is_zero()),
                }
            }
        }
        let q = Field::Rationals;
        let a = q.from_i64(4);
        let tr = c_pair_trace(&a).unwrap().unwrap();
        assert_eq!(apply_trace(&c(q, &a), &tr).unwrap(), c(q, &q.from_ratio(-4, 9).unwrap()));
        assert_eq!(c_pair_trace(&q.one()).unwrap(), None);
    }
}
