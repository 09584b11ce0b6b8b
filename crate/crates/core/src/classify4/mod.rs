//! Classification of the `4 × 4` case.
//!
//! Every class contains one of the simplified forms `0_4`, `B`, `B'`, `D_u`
//! (`u ≠ 0`) and `C_a`. Two `D` forms are equivalent exactly when `u/v` is a
//! square, two `C` forms exactly when `a' = a` or `2a+1` is a nonzero square
//! and `a' = -a/(2a+1)`.

mod complex;
mod count;
mod family;
mod reduce;
mod traces;

pub use complex::{complex_canonical, in_region_u, mobius_f};
pub use count::{count_n4, n4_formula, representatives_n4, CFamily, CountReport, Policy, Representatives};
pub use family::{c_family, c_family_necessary, infinite_family, probe_lemma_gap, GapProbe};
pub use reduce::{reduce4, REDUCE_CAP};
pub use traces::{c_pair_trace, d_trace, lemma1_trace, lemma_steps, normalize_p_steps};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, GammaMatrix};
use crate::eto::{apply_trace, reduce_to_2ref, EtoError, EtoOp, EtoTrace};
use crate::field::{Field, FieldError, Scalar};
use crate::tmatrix::{MatrixError, Slt, Wall};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("expected a 4x4 matrix, got {0}x{0}")]
    NotN4(usize),
    #[error("D forms need u != 0")]
    ZeroD,
    #[error("ε² does not equal u/v")]
    EpsMismatch,
    #[error("2u+1 = 0: the lemma construction does not apply")]
    LemmaGap,
    #[error("C_(a,n) needs n > 4, got {0}")]
    SmallFamily(usize),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0} is not a finite field")]
    NotFinite(Field),
    #[error("{0}")]
    Eto(#[from] EtoError),
    #[error("{0}")]
    Matrix(#[from] MatrixError),
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
}

/// The five simplified shapes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimplifiedForm {
    Zero,
    B,
    Bprime,
    D(Scalar),
    C(Scalar),
}

impl SimplifiedForm {
    pub fn materialize(&self, field: Field) -> Result<Slt, ClassifyError> {
        let z = field.zero();
        let o = field.one();
        let rows = match self {
            SimplifiedForm::Zero => vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z],
            SimplifiedForm::B => vec![z.clone(), z.clone(), z.clone(), o.clone(), o, z],
            SimplifiedForm::Bprime => vec![z.clone(), z.clone(), z, o.clone(), o.clone(), o],
            SimplifiedForm::D(u) => {
                if u.is_zero() {
                    return Err(ClassifyError::ZeroD);
                }
                vec![z.clone(), o.clone(), o.clone(), u.clone(), o, z]
            }
            SimplifiedForm::C(a) => vec![z.clone(), o.clone(), o.clone(), a.clone(), z, o],
        };
        for x in &rows {
            if x.field() != field {
                return Err(FieldError::Mismatch(field, x.field()).into());
            }
        }
        let mut it = rows.into_iter();
        let mut take = |k: usize| (0..k).map(|_| it.next().unwrap()).collect::<Vec<_>>();
        Ok(Slt::from_rows(field, vec![take(1), take(2), take(3)])?)
    }

    /// The simplified form equal to `t`, if any.
    pub fn recognize(t: &Slt) -> Option<SimplifiedForm> {
        if t.n() != 4 {
            return None;
        }
        let candidates = [
            SimplifiedForm::Zero,
            SimplifiedForm::B,
            SimplifiedForm::Bprime,
            SimplifiedForm::D(t.get(4, 1).clone()),
            SimplifiedForm::C(t.get(4, 1).clone()),
        ];
        candidates
            .into_iter()
            .find(|f| f.materialize(t.field()).is_ok_and(|m| m == *t))
    }

    pub fn wall(&self) -> Wall {
        match self {
            SimplifiedForm::Zero => Wall::Zero,
            SimplifiedForm::B | SimplifiedForm::Bprime => Wall::Rows(vec![4]),
            SimplifiedForm::D(_) => Wall::Rows(vec![3]),
            SimplifiedForm::C(_) => Wall::Rows(vec![3, 4]),
        }
    }

    pub fn parameter(&self) -> Option<&Scalar> {
        match self {
            SimplifiedForm::D(x) | SimplifiedForm::C(x) => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for SimplifiedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplifiedForm::Zero => write!(f, "0"),
            SimplifiedForm::B => write!(f, "B"),
            SimplifiedForm::Bprime => write!(f, "B'"),
            SimplifiedForm::D(u) => write!(f, "D({u})"),
            SimplifiedForm::C(a) => write!(f, "C({a})"),
        }
    }
}

impl Serialize for SimplifiedForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A class: its wall and its canonical simplified form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassId {
    pub wall: Wall,
    pub canonical: SimplifiedForm,
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.wall, self.canonical)
    }
}

/// Squareness as the classification sees it: `Q(i)` stands for the complex
/// numbers, where every element is a square.
fn is_square_class(x: &Scalar) -> bool {
    match x.field() {
        Field::GaussianRationals => true,
        _ => x.is_square(),
    }
}

/// `D_u ∼ D_v` iff `u/v` is a square.
pub fn d_equivalent(u: &Scalar, v: &Scalar) -> Result<bool, ClassifyError> {
    if u.is_zero() || v.is_zero() {
        return Err(ClassifyError::ZeroD);
    }
    Ok(is_square_class(&u.checked_div(v)?))
}

/// `Γ = diag(1,1,1,ε)` with `γ14 = (u - vε)/2` and `γ24 = (1 - ε)/2`, an
/// isomorphism `𝒜(D_u) → 𝒜(D_v)` when `ε² = u/v`.
pub fn d_witness_gamma(u: &Scalar, v: &Scalar, eps: &Scalar) -> Result<GammaMatrix, ClassifyError> {
    if u.is_zero() || v.is_zero() {
        return Err(ClassifyError::ZeroD);
    }
    if eps * eps != u.checked_div(v)? {
        return Err(ClassifyError::EpsMismatch);
    }
    let field = u.field();
    let mut g = GammaMatrix::identity(4, field);
    g.set(1, 4, (u - &(v * eps)).half());
    g.set(2, 4, (&field.one() - eps).half());
    g.set(4, 4, eps.clone());
    Ok(g)
}

/// `a ↦ -a/(2a+1)`, defined when `2a+1 ≠ 0`.
pub fn c_partner(a: &Scalar) -> Option<Scalar> {
    let w = &(a + a) + &a.field().one();
    let inv = w.inv().ok()?;
    Some(&a.neg() * &inv)
}

/// `C_a ∼ C_a'`.
pub fn c_equivalent(a: &Scalar, a2: &Scalar) -> bool {
    if a == a2 {
        return true;
    }
    let w = &(a + a) + &a.field().one();
    !w.is_zero() && is_square_class(&w) && c_partner(a).as_ref() == Some(a2)
}

/// Representative of the square class of a nonzero rational: the signed
/// squarefree part of `num·den`.
pub(crate) fn squarefree_part(x: &num_rational::BigRational) -> BigInt {
    let prod: BigInt = x.numer() * x.denom();
    let sign = if prod.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = prod.abs();
    let mut out = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &d;
        }
        d += 1;
    }
    sign * out * m
}

/// Canonical `u` for the `D` class of `D_u`.
pub fn d_canonical(u: &Scalar) -> Result<Scalar, ClassifyError> {
    if u.is_zero() {
        return Err(ClassifyError::ZeroD);
    }
    let field = u.field();
    Ok(match field {
        // over Q(i), read as C, every element is a square
        Field::GaussianRationals => field.one(),
        _ if u.is_square() => field.one(),
        Field::Prime(_) => field.least_non_residue().expect("odd prime field"),
        Field::Rationals => {
            let sf = squarefree_part(u.as_rational().expect("rational"));
            Scalar::rational(num_rational::BigRational::from_integer(sf))
        }
    })
}

/// Canonical `a` for the `C` class of `C_a`.
pub fn c_canonical(a: &Scalar) -> Scalar {
    if a.field() == Field::GaussianRationals {
        return complex_canonical(a);
    }
    match c_partner(a) {
        Some(b) if c_equivalent(a, &b) && b.canonical_cmp(a).is_lt() => b,
        _ => a.clone(),
    }
}

/// Result of classifying one matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classified {
    pub class: ClassId,
    /// ETOs taking the input to the canonical matrix. Absent over `Q(i)`
    /// when the witness needs a square root outside `Q(i)`.
    pub trace: Option<EtoTrace>,
}

/// Classify a `4 × 4` matrix.
///
/// A non-2-REF input is first reduced: by orbit BFS over finite fields, by
/// the bounded search of [`reduce4`] otherwise, which may give up.
pub fn canonical_rep(t: &Slt) -> Result<Classified, ClassifyError> {
    if t.n() != 4 {
        return Err(ClassifyError::NotN4(t.n()));
    }
    let field = t.field();
    let (r, mut trace) = reduce_to_2ref(t)?;
    let (u, steps) = normalize_p_steps(&r)?;
    trace.extend(&steps);
    let (form, steps) = simplify_normalized(&u)?;
    trace.extend(&steps);
    let (canonical, steps) = canonicalize(&form)?;
    let trace = steps.map(|s| {
        trace.extend(&s);
        trace
    });
    if let Some(tr) = &trace {
        debug_assert_eq!(apply_trace(t, tr).ok(), canonical.materialize(field).ok());
    }
    Ok(Classified {
        class: ClassId {
            wall: canonical.wall(),
            canonical,
        },
        trace,
    })
}

/// Reduce a normalized matrix to a simplified form.
pub fn simplify_normalized(u: &Slt) -> Result<(SimplifiedForm, EtoTrace), ClassifyError> {
    if !u.is_normalized() {
        return Err(ClassifyError::Unsupported("input is not normalized".into()));
    }
    let field = u.field();
    if u.is_zero() {
        return Ok((SimplifiedForm::Zero, EtoTrace::new()));
    }
    let wall = u.wall_recursion();
    match wall.rows() {
        [4] => {
            let (a, b, c) = (u.get(4, 1).is_one(), u.get(4, 2).is_one(), u.get(4, 3).is_one());
            let (form, ops) = match (a, b, c) {
                (true, true, false) => (SimplifiedForm::B, vec![]),
                (true, true, true) => (SimplifiedForm::Bprime, vec![]),
                (true, false, true) => (SimplifiedForm::B, vec![EtoOp::F { r1: 2, r2: 3 }]),
                (false, true, true) => (SimplifiedForm::B, vec![EtoOp::F { r1: 1, r2: 3 }]),
                _ => return Err(ClassifyError::Unsupported(format!("unexpected row 4 in {u:?}"))),
            };
            Ok((form, EtoTrace(ops)))
        }
        [3] => Ok((SimplifiedForm::D(u.get(4, 1).clone()), EtoTrace::new())),
        [3, 4] => {
            let (x, y) = (u.get(4, 1).clone(), u.get(4, 2).clone());
            let two_x1 = &(&x + &x) + &field.one();
            let mut trace = EtoTrace::new();
            let (x, y) = if two_x1.is_zero() {
                // swap the roles of u and v before running the lemma
                trace.push(EtoOp::F { r1: 1, r2: 2 });
                (y, x)
            } else {
                (x, y)
            };
            let steps = lemma1_trace(&x, &y)?;
            trace.extend(&steps);
            let a = &(&(&(&x * &y) + &(&x * &y)) + &x) + &y;
            Ok((SimplifiedForm::C(a), trace))
        }
        _ => Err(ClassifyError::Unsupported(format!("unexpected wall {wall}"))),
    }
}

/// Move a simplified form to its canonical class member. The trace is
/// `None` when the witness needs a square root missing from the field.
fn canonicalize(form: &SimplifiedForm) -> Result<(SimplifiedForm, Option<EtoTrace>), ClassifyError> {
    match form {
        SimplifiedForm::D(u) => {
            let d = d_canonical(u)?;
            let trace = u.checked_div(&d)?.sqrt().map(|eps| d_trace(&eps)).transpose()?;
            Ok((SimplifiedForm::D(d), trace))
        }
        SimplifiedForm::C(a) => {
            let b = c_canonical(a);
            let trace = if &b == a { Some(EtoTrace::new()) } else { c_pair_trace(a)? };
            Ok((SimplifiedForm::C(b), trace))
        }
        other => Ok((other.clone(), Some(EtoTrace::new()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gamma_as_homomorphism, gamma_system_holds};

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn materialize_forms() {
        let q = Field::Rationals;
        let c = SimplifiedForm::C(q.from_i64(7)).materialize(q).unwrap();
        assert_eq!(c, Slt::from_ints(q, &[&[0], &[1, 1], &[7, 0, 1]]).unwrap());
        let b = SimplifiedForm::B.materialize(q).unwrap();
        assert_eq!(b, Slt::from_ints(q, &[&[0], &[0, 0], &[1, 1, 0]]).unwrap());
        assert!(SimplifiedForm::Zero.materialize(q).unwrap().is_zero());
        assert_eq!(SimplifiedForm::D(q.zero()).materialize(q), Err(ClassifyError::ZeroD));
        for form in [
            SimplifiedForm::Zero,
            SimplifiedForm::B,
            SimplifiedForm::Bprime,
            SimplifiedForm::D(q.from_i64(3)),
            SimplifiedForm::C(q.zero()),
        ] {
            let m = form.materialize(q).unwrap();
            assert_eq!(SimplifiedForm::recognize(&m), Some(form.clone()));
            assert_eq!(m.wall_of_ref().unwrap(), form.wall());
        }
    }

    #[test]
    fn criteria_examples() {
        let q = Field::Rationals;
        assert!(d_equivalent(&q.from_i64(4), &q.one()).unwrap());
        let f7 = f(7);
        assert!(!d_equivalent(&f7.one(), &f7.from_i64(3)).unwrap());
        assert!(d_equivalent(&f7.from_i64(5), &f7.from_i64(5)).unwrap());
        assert!(d_equivalent(&q.zero(), &q.one()).is_err());
        assert!(c_equivalent(&f7.from_i64(4), &f7.from_i64(5)));
        assert!(c_equivalent(&f7.from_i64(5), &f7.from_i64(4)));
        assert!(!c_equivalent(&f7.from_i64(1), &f7.from_i64(2)));
        assert!(c_equivalent(&q.zero(), &q.zero()));
        assert!(c_equivalent(&q.from_i64(-1), &q.from_i64(-1)));
        // 2·4+1 = 9 over Q, partner -4/9
        assert!(c_equivalent(&q.from_i64(4), &q.from_ratio(-4, 9).unwrap()));
    }

    #[test]
    fn witness_gamma() {
        let q = Field::Rationals;
        let g = d_witness_gamma(&q.from_i64(4), &q.one(), &q.from_i64(2)).unwrap();
        assert_eq!(g.get(1, 4), &q.one());
        assert_eq!(g.get(2, 4), &q.from_ratio(-1, 2).unwrap());
        let t = SimplifiedForm::D(q.from_i64(4)).materialize(q).unwrap();
        let s = SimplifiedForm::D(q.one()).materialize(q).unwrap();
        assert!(gamma_system_holds(&t, &s, &g).unwrap());
        assert!(gamma_as_homomorphism(&t, &s, &g).unwrap());
        let id = d_witness_gamma(&q.from_i64(3), &q.from_i64(3), &q.one()).unwrap();
        assert_eq!(id, GammaMatrix::identity(4, q));
        let f7 = f(7);
        let g = d_witness_gamma(&f7.from_i64(2), &f7.one(), &f7.from_i64(3)).unwrap();
        let t = SimplifiedForm::D(f7.from_i64(2)).materialize(f7).unwrap();
        let s = SimplifiedForm::D(f7.one()).materialize(f7).unwrap();
        assert!(gamma_system_holds(&t, &s, &g).unwrap());
        assert_eq!(
            d_witness_gamma(&f7.from_i64(2), &f7.one(), &f7.from_i64(2)),
            Err(ClassifyError::EpsMismatch)
        );
    }

    #[test]
    fn canonical_examples() {
        let f7 = f(7);
        let c5 = SimplifiedForm::C(f7.from_i64(5)).materialize(f7).unwrap();
        let got = canonical_rep(&c5).unwrap();
        assert_eq!(got.class.canonical, SimplifiedForm::C(f7.from_i64(4)));
        assert_eq!(got.class.wall, Wall::Rows(vec![3, 4]));
        let tr = got.trace.unwrap();
        assert_eq!(
            apply_trace(&c5, &tr).unwrap(),
            SimplifiedForm::C(f7.from_i64(4)).materialize(f7).unwrap()
        );

        let q = Field::Rationals;
        let d4 = SimplifiedForm::D(q.from_i64(4)).materialize(q).unwrap();
        let got = canonical_rep(&d4).unwrap();
        assert_eq!(got.class.canonical, SimplifiedForm::D(q.one()));
        assert_eq!(got.class.wall, Wall::Rows(vec![3]));
        let d_one = SimplifiedForm::D(q.one()).materialize(q).unwrap();
        assert_eq!(apply_trace(&d4, &got.trace.unwrap()).unwrap(), d_one);

        let d12 = SimplifiedForm::D(q.from_ratio(-12, 5).unwrap()).materialize(q).unwrap();
        assert_eq!(
            canonical_rep(&d12).unwrap().class.canonical,
            SimplifiedForm::D(q.from_i64(-15))
        );

        let bp = SimplifiedForm::Bprime.materialize(q).unwrap();
        assert_eq!(canonical_rep(&bp).unwrap().class.canonical, SimplifiedForm::Bprime);

        // the worked example reduces to C_17
        let t = Slt::from_ints(q, &[&[0], &[2, 1], &[12, 9, 3]]).unwrap();
        let got = canonical_rep(&t).unwrap();
        assert_eq!(got.class.canonical, SimplifiedForm::C(q.from_i64(17)));
        assert_eq!(
            apply_trace(&t, &got.trace.unwrap()).unwrap(),
            SimplifiedForm::C(q.from_i64(17)).materialize(q).unwrap()
        );
    }

    #[test]
    fn canonical_over_finite_fields_replays() {
        let f5 = f(5);
        for code in (0..5u32.pow(6)).step_by(37) {
            let mut c = code;
            let v: Vec<i64> = (0..6)
                .map(|_| {
                    let d = c % 5;
                    c /= 5;
                    i64::from(d)
                })
                .collect();
            let t = Slt::from_ints(f5, &[&v[0..1], &v[1..3], &v[3..6]]).unwrap();
            let got = canonical_rep(&t).unwrap();
            let target = got.class.canonical.materialize(f5).unwrap();
            assert_eq!(apply_trace(&t, &got.trace.unwrap()).unwrap(), target, "{t:?}");
        }
    }

    #[test]
    fn gaussian_classes() {
        let g = Field::GaussianRationals;
        let d2 = SimplifiedForm::D(g.from_i64(2)).materialize(g).unwrap();
        let got = canonical_rep(&d2).unwrap();
        assert_eq!(got.class.canonical, SimplifiedForm::D(g.one()));
        assert_eq!(got.trace, None);
        let dm4 = SimplifiedForm::D(g.from_i64(-4)).materialize(g).unwrap();
        let got = canonical_rep(&dm4).unwrap();
        let d1 = SimplifiedForm::D(g.one()).materialize(g).unwrap();
        assert_eq!(apply_trace(&dm4, &got.trace.unwrap()).unwrap(), d1);
        // 2·1+1 = 3 has no root in Q(i)
        let c1 = SimplifiedForm::C(g.one()).materialize(g).unwrap();
        let got = canonical_rep(&c1).unwrap();
        assert_eq!(got.class.canonical, SimplifiedForm::C(g.from_ratio(-1, 3).unwrap()));
        assert_eq!(got.trace, None);
        assert!(c_equivalent(&g.one(), &g.from_ratio(-1, 3).unwrap()));
        // 2·4+1 = 9
        let c4 = SimplifiedForm::C(g.from_i64(4)).materialize(g).unwrap();
        let got = canonical_rep(&c4).unwrap();
        let target = SimplifiedForm::C(g.from_ratio(-4, 9).unwrap()).materialize(g).unwrap();
        assert_eq!(apply_trace(&c4, &got.trace.unwrap()).unwrap(), target);
    }

    #[test]
    fn half_gap_goes_through_swap() {
        let q = Field::Rationals;
        let half = q.from_ratio(-1, 2).unwrap();
        for v in [0, 1, 5] {
            let t = Slt::from_rows(q, vec![vec![q.zero()], vec![q.one(), q.one()], vec![half.clone(), q.from_i64(v), q.one()]])
                .unwrap();
            let got = canonical_rep(&t).unwrap();
            assert_eq!(got.class.canonical, SimplifiedForm::C(half.clone()));
            let tr = got.trace.unwrap();
            assert_eq!(tr.ops()[0], EtoOp::F { r1: 1, r2: 2 });
            assert_eq!(apply_trace(&t, &tr).unwrap(), SimplifiedForm::C(half.clone()).materialize(q).unwrap());
        }
    }

    #[test]
    fn scrambled_rational_input() {
        let q = Field::Rationals;
        let c = SimplifiedForm::C(q.from_i64(3)).materialize(q).unwrap();
        let t = crate::eto::apply_q(&c, 2, 1, &q.from_i64(2)).unwrap();
        assert!(!t.is_2ref());
        let got = canonical_rep(&t).unwrap();
        assert_eq!(got.class.canonical, SimplifiedForm::C(q.from_i64(3)));
        let target = got.class.canonical.materialize(q).unwrap();
        assert_eq!(apply_trace(&t, &got.trace.unwrap()).unwrap(), target);
    }

    #[test]
    fn squarefree() {
        use num_rational::BigRational;
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(squarefree_part(&r(12, 1)), BigInt::from(3));
        assert_eq!(squarefree_part(&r(-8, 3)), BigInt::from(-6));
        assert_eq!(squarefree_part(&r(1, 4)), BigInt::from(1));
    }
}
