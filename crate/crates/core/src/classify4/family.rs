//! The `C_{a,n}` family, the greedy infinite family over `Q`, and the probe
//! of the `2u+1 = 0` case of the lemma.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use super::{c_equivalent, c_partner, canonical_rep, ClassifyError, SimplifiedForm};
use crate::eto::same_orbit;
use crate::field::{Field, Scalar};
use crate::tmatrix::Slt;

/// `C_{a,n}`: ones at rows `3..n-1`, columns 1 and 2; `a` at `(n,1)`; 1 at
/// `(n,3)`.
pub fn c_family(a: &Scalar, n: usize) -> Result<Slt, ClassifyError> {
    if n <= 4 {
        return Err(ClassifyError::SmallFamily(n));
    }
    let field = a.field();
    let mut t = Slt::zero(n, field)?;
    for i in 3..n {
        t.set(i, 1, field.one())?;
        t.set(i, 2, field.one())?;
    }
    t.set(n, 1, a.clone())?;
    t.set(n, 3, field.one())?;
    Ok(t)
}

/// The necessary condition for `C_{a,n} ∼ C_{a',n}` with `a ≠ a'`. It does
/// not certify equivalence.
pub fn c_family_necessary(a: &Scalar, a2: &Scalar, n: usize) -> Result<bool, ClassifyError> {
    if n <= 4 {
        return Err(ClassifyError::SmallFamily(n));
    }
    Ok(a != a2 && c_equivalent(a, a2))
}

/// Rationals of height exactly `h`, ordered by denominator, then
/// `|numerator|`, then positive before negative.
fn rationals_of_height(h: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    for den in 1..=h {
        let nums: Vec<i64> = if den == h { (0..=h).collect() } else { vec![h] };
        for num in nums {
            if num.gcd(&den) != 1 {
                continue;
            }
            out.push(BigRational::new(BigInt::from(num), BigInt::from(den)));
            if num != 0 {
                out.push(BigRational::new(BigInt::from(-num), BigInt::from(den)));
            }
        }
    }
    out
}

/// `k` pairwise inequivalent `C` parameters over `Q`, chosen greedily along
/// the height enumeration.
pub fn infinite_family(field: Field, k: usize) -> Result<Vec<Scalar>, ClassifyError> {
    if field != Field::Rationals {
        return Err(ClassifyError::Unsupported(format!(
            "the greedy family is implemented over q, not {field}"
        )));
    }
    let mut taken: HashSet<Scalar> = HashSet::new();
    let mut out = Vec::with_capacity(k);
    let mut h = 1;
    while out.len() < k {
        for x in rationals_of_height(h) {
            if out.len() == k {
                break;
            }
            let a = Scalar::rational(x);
            if taken.contains(&a) {
                continue;
            }
            if let Some(b) = c_partner(&a) {
                if c_equivalent(&a, &b) {
                    taken.insert(b);
                }
            }
            taken.insert(a.clone());
            out.push(a);
        }
        h += 1;
    }
    Ok(out)
}

/// What orbit search says about `V(-1/2, v)` for one `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapProbe {
    pub v: String,
    pub is_2ref: bool,
    pub equivalent_to_c_minus_half: bool,
    pub class: String,
    pub witness_len: Option<usize>,
}

/// Probe every `V(-1/2, v)` over a finite field by orbit search.
pub fn probe_lemma_gap(field: Field) -> Result<Vec<GapProbe>, ClassifyError> {
    if !field.is_finite() {
        return Err(ClassifyError::NotFinite(field));
    }
    let u = field.from_i64(-1).half();
    let target = SimplifiedForm::C(u.clone()).materialize(field)?;
    let z = field.zero();
    let o = field.one();
    let mut out = Vec::new();
    for v in field.elements()? {
        let t = Slt::from_rows(field, vec![vec![z.clone()], vec![o.clone(), o.clone()], vec![u.clone(), v.clone(), o.clone()]])?;
        let witness = same_orbit(&t, &target)?;
        out.push(GapProbe {
            v: v.to_string(),
            is_2ref: t.is_2ref(),
            equivalent_to_c_minus_half: witness.is_some(),
            class: canonical_rep(&t)?.class.to_string(),
            witness_len: witness.map(|w| w.len()),
        });
    }
    Ok(out)
}
