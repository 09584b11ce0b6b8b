//! The graded algebra `𝒜(T)` on its square-free monomial basis.

mod gamma;
mod iso;

pub use gamma::{gamma_as_homomorphism, gamma_system_holds, gamma_system_holds_with, GammaMatrix, PairSet};
pub use iso::{iso_search, Absence, IsoConfig, IsoMode, IsoOutcome, DEFAULT_CAP};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};
use crate::tmatrix::{MatrixError, Slt};

/// Largest `n` accepted for algebra computations (monomials are `u32`
/// bitsets and the multiplication table has `4^n` cells).
pub const MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("matrices differ in size or field")]
    Mismatch,
    #[error("Γ is not invertible")]
    Singular,
    #[error("Γ must be {expected}x{expected}")]
    GammaShape { expected: usize },
    #[error("algebra computations support n <= {MAX_N}, got {0}")]
    TooLarge(usize),
    #[error("{0} is not a finite field")]
    NotFinite(Field),
    #[error("isomorphism search needs both matrices in 2-REF")]
    NotReduced,
    #[error("search exceeded the cap of {cap} candidate evaluations")]
    Inconclusive { cap: u64 },
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("{0}")]
    Matrix(#[from] MatrixError),
    #[error("malformed Γ text: {0}")]
    Format(String),
}

/// A square-free monomial `X_{i_1}⋯X_{i_k}`, bit `i - 1` set for `X_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn generator(i: usize) -> Monomial {
        Monomial(1 << (i - 1))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_one(&self) -> bool {
        self.0 == 0
    }

    /// Each generator has degree 2.
    pub fn degree(&self) -> usize {
        2 * self.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (1..=32).filter(move |&i| bits & (1 << (i - 1)) != 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().map(|i| format!("X{i}")).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// A linear combination of basis monomials; zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl AlgebraElement {
    pub fn zero(field: Field) -> Self {
        AlgebraElement {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: Field, m: Monomial, c: Scalar) -> Self {
        let mut e = AlgebraElement::zero(field);
        e.add_term(m, c);
        e
    }

    pub fn one(field: Field) -> Self {
        AlgebraElement::monomial(field, Monomial::ONE, field.one())
    }

    pub fn generator(field: Field, i: usize) -> Self {
        AlgebraElement::monomial(field, Monomial::generator(i), field.one())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Scalar {
        self.terms.get(&m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.scale(&self.field.one().neg()))
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.field);
        for (m, x) in &self.terms {
            out.add_term(*m, x * c);
        }
        out
    }

    /// `Some(d)` when every term has degree `d`; the zero element counts as
    /// homogeneous of any degree and reports `None`.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| if m.is_one() { c.to_string() } else { format!("({c})·{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Which repeated generator the rewriting replaces first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    HighestFirst,
    LowestFirst,
}

/// Rewrite the word `X_1^{e_1}⋯X_n^{e_n}` to the square-free basis using
/// `X_1^2 = 0` and `X_i^2 = Σ_{j<i} t_ij X_j X_i`.
pub fn normal_form_word(t: &Slt, exps: &[u32], strategy: Strategy) -> AlgebraElement {
    let field = t.field();
    let n = t.n();
    assert_eq!(exps.len(), n, "exponent vector length must equal n");
    let mut out = AlgebraElement::zero(field);
    let mut stack = vec![(exps.to_vec(), field.one())];
    while let Some((e, c)) = stack.pop() {
        let pick = match strategy {
            Strategy::HighestFirst => (0..n).rev().find(|&k| e[k] >= 2),
            Strategy::LowestFirst => (0..n).find(|&k| e[k] >= 2),
        };
        match pick {
            None => {
                let bits = e.iter().enumerate().fold(0u32, |b, (k, &x)| b | (x << k));
                out.add_term(Monomial(bits), c);
            }
            Some(0) => {}
            Some(k) => {
                let i = k + 1;
                for j in 1..i {
                    let tij = t.get(i, j);
                    if tij.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[k] -= 1;
                    e2[j - 1] += 1;
                    stack.push((e2, &c * tij));
                }
            }
        }
    }
    out
}

/// Normal form of a product of generators given by their indices.
pub fn normal_form(t: &Slt, word: &[usize]) -> AlgebraElement {
    let mut exps = vec![0u32; t.n()];
    for &i in word {
        exps[i - 1] += 1;
    }
    normal_form_word(t, &exps, Strategy::HighestFirst)
}

/// `𝒜(T)` with a lazily filled, memoized multiplication table.
pub struct Algebra {
    t: Slt,
    table: Vec<OnceLock<AlgebraElement>>,
}

impl Algebra {
    pub fn new(t: &Slt) -> Result<Self, AlgebraError> {
        if t.n() > MAX_N {
            return Err(AlgebraError::TooLarge(t.n()));
        }
        let size = 1usize << (2 * t.n());
        Ok(Algebra {
            t: t.clone(),
            table: (0..size).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn matrix(&self) -> &Slt {
        &self.t
    }

    pub fn field(&self) -> Field {
        self.t.field()
    }

    pub fn dimension(&self) -> usize {
        1 << self.t.n()
    }

    pub fn basis(&self) -> impl Iterator<Item = Monomial> {
        (0..1u32 << self.t.n()).map(Monomial)
    }

    pub fn generator(&self, i: usize) -> AlgebraElement {
        AlgebraElement::generator(self.field(), i)
    }

    /// `a·b` for basis monomials.
    pub fn mul_monomials(&self, a: Monomial, b: Monomial) -> &AlgebraElement {
        let n = self.t.n();
        let idx = ((a.0 as usize) << n) | b.0 as usize;
        self.table[idx].get_or_init(|| {
            if a.0 & b.0 == 0 {
                return AlgebraElement::monomial(self.field(), Monomial(a.0 | b.0), self.field().one());
            }
            let exps: Vec<u32> = (0..n).map(|k| (a.0 >> k & 1) + (b.0 >> k & 1)).collect();
            normal_form_word(&self.t, &exps, Strategy::HighestFirst)
        })
    }

    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if a.field != self.field() || b.field != self.field() {
            return Err(AlgebraError::Mismatch);
        }
        let mut out = AlgebraElement::zero(self.field());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let c = ca * cb;
                for (m, x) in &self.mul_monomials(*ma, *mb).terms {
                    out.add_term(*m, &c * x);
                }
            }
        }
        Ok(out)
    }

    pub fn square(&self, a: &AlgebraElement) -> AlgebraElement {
        self.mul(a, a).expect("same field")
    }
}

/// Consistency of the rewriting system behind the `2^n` basis:
/// table products agree with both rewriting strategies, every word with
/// exponents at most 3 has a strategy-independent normal form, and the
/// table is commutative and associative on basis triples.
pub fn dimension_check(t: &Slt) -> bool {
    let Ok(alg) = Algebra::new(t) else {
        return false;
    };
    let n = t.n();
    let basis: Vec<Monomial> = alg.basis().collect();

    let mut exps = vec![0u32; n];
    loop {
        let hi = normal_form_word(t, &exps, Strategy::HighestFirst);
        if hi != normal_form_word(t, &exps, Strategy::LowestFirst) {
            return false;
        }
        let Some(k) = exps.iter().position(|&x| x < 3) else {
            break;
        };
        for x in exps.iter_mut().take(k) {
            *x = 0;
        }
        exps[k] += 1;
    }

    for &a in &basis {
        for &b in &basis {
            if alg.mul_monomials(a, b) != alg.mul_monomials(b, a) {
                return false;
            }
        }
    }
    for &a in &basis {
        for &b in &basis {
            let ab = alg.mul_monomials(a, b).clone();
            for &c in &basis {
                let mc = AlgebraElement::monomial(t.field(), c, t.field().one());
                let ma = AlgebraElement::monomial(t.field(), a, t.field().one());
                let left = alg.mul(&ab, &mc).expect("same field");
                let right = alg.mul(&ma, alg.mul_monomials(b, c)).expect("same field");
                if left != right {
                    return false;
                }
            }
        }
    }
    true
}
