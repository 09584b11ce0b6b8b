//! Orbit partition of the whole matrix space over a small prime field.
//!
//! States are packed as base-`p` integers (entry `t_ij` in digit `slot(i,j)`)
//! and joined with a union-find. Because `P_r(a)∘P_r(b) = P_r(ab)` and the
//! free Q shears add their scalars, the moves `P_r(g)` for a primitive root
//! `g`, `Q(1)` in the free cases, all forced Q moves and all F moves already
//! connect every orbit.

use rayon::prelude::*;

use super::EtoError;
use crate::field::Field;
use crate::tmatrix::{slot, Slt};

/// Upper bound on the number of states handled.
pub const MAX_STATES: u64 = 1 << 28;
const MAX_SLOTS: usize = 28;
const CHUNK: u32 = 1 << 16;

/// Every matrix of one size over `F_p`, labelled by orbit.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    n: usize,
    field: Field,
    p: u32,
    labels: Vec<u32>,
    sizes: Vec<u64>,
    reps: Vec<u32>,
}

#[derive(Clone, Copy)]
struct Packed {
    n: usize,
    p: u32,
    m: usize,
}

type State = [u32; MAX_SLOTS];

impl Packed {
    fn decode(&self, mut code: u32) -> State {
        let mut s = [0; MAX_SLOTS];
        for d in s.iter_mut().take(self.m) {
            *d = code % self.p;
            code /= self.p;
        }
        s
    }

    fn encode(&self, s: &State) -> u32 {
        s[..self.m].iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn get(&self, s: &State, i: usize, j: usize) -> u32 {
        if i > j {
            s[slot(i, j)]
        } else {
            0
        }
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % u64::from(self.p)) as u32
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.p - b % self.p)
    }

    fn inv(&self, a: u32) -> u32 {
        let (mut r, mut base, mut e) = (1u32, a, self.p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    fn neighbors(&self, code: u32, g: u32, g_inv: u32, out: &mut Vec<u32>) {
        let t = self.decode(code);
        let n = self.n;
        let mut push = |s: &State| {
            let c = self.encode(s);
            if c != code {
                out.push(c);
            }
        };
        for r in 1..=n {
            let mut s = t;
            for k in 1..r {
                s[slot(r, k)] = self.mul(g_inv, t[slot(r, k)]);
            }
            for i in r + 1..=n {
                s[slot(i, r)] = self.mul(g, t[slot(i, r)]);
            }
            push(&s);
        }
        for r1 in 1..n {
            for r2 in r1 + 1..=n {
                let a = (r1..r2).all(|j| self.get(&t, r2, j) == 0);
                let b = (r1..=r2).all(|r| self.get(&t, r, r1) == 0);
                if !(a && b) {
                    continue;
                }
                let sigma = |i| if i == r1 { r2 } else if i == r2 { r1 } else { i };
                let mut s = t;
                for r in 2..=n {
                    for k in 1..r {
                        s[slot(r, k)] = self.get(&t, sigma(r), sigma(k));
                    }
                }
                push(&s);
            }
        }
        for r0 in 2..=n {
            for k0 in 1..r0 {
                if (k0 + 1..r0).any(|j| t[slot(r0, j)] != 0) {
                    continue;
                }
                let Some(beta) = self.q_beta(&t, r0, k0) else {
                    continue;
                };
                let mut s = t;
                s[slot(r0, k0)] = self.sub(t[slot(r0, k0)], self.add(beta, beta));
                for r in r0 + 1..=n {
                    s[slot(r, k0)] = self.add(t[slot(r, k0)], self.mul(beta, t[slot(r, r0)]));
                }
                push(&s);
            }
        }
    }

    /// A generating β for the Q moves at `(r0, k0)`: 1 when every nonzero
    /// β is legal, the forced value otherwise.
    fn q_beta(&self, t: &State, r0: usize, k0: usize) -> Option<u32> {
        let mut forced = None;
        for i in 1..k0 {
            let lhs = self.add(t[slot(r0, i)], self.mul(t[slot(r0, k0)], t[slot(k0, i)]));
            let c = t[slot(k0, i)];
            if c == 0 {
                if lhs != 0 {
                    return None;
                }
                continue;
            }
            let b = self.mul(lhs, self.inv(c));
            match forced {
                Some(f) if f != b => return None,
                _ => forced = Some(b),
            }
        }
        match forced {
            None => Some(1),
            Some(0) => None,
            b => b,
        }
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let gp = parent[parent[x as usize] as usize];
        parent[x as usize] = gp;
        x = gp;
    }
    x
}

impl OrbitPartition {
    /// Partition all `n × n` matrices over the finite field `field`.
    pub fn compute(n: usize, field: Field) -> Result<Self, EtoError> {
        let p = field.order().ok_or(EtoError::NotFinite(field))? as u32;
        let m = n * n.saturating_sub(1) / 2;
        let total = (u64::from(p)).checked_pow(m as u32).unwrap_or(u64::MAX);
        if n < 2 || m > MAX_SLOTS || total > MAX_STATES {
            return Err(EtoError::Unsupported(format!(
                "state space of {n}x{n} matrices over {field} is too large"
            )));
        }
        let total = total as u32;
        let packed = Packed { n, p, m };
        let g = field.primitive_root().and_then(|x| x.as_residue()).expect("finite field");
        let g_inv = packed.inv(g);

        let mut parent: Vec<u32> = (0..total).collect();
        let mut start = 0u32;
        while start < total {
            let end = start.saturating_add(CHUNK).min(total);
            let edges: Vec<(u32, u32)> = (start..end)
                .into_par_iter()
                .flat_map_iter(|code| {
                    let mut nb = Vec::with_capacity(4 * n);
                    packed.neighbors(code, g, g_inv, &mut nb);
                    nb.into_iter().map(move |c| (code, c))
                })
                .collect();
            for (a, b) in edges {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    // the smaller code stays root, so roots are orbit minima
                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent[hi as usize] = lo;
                }
            }
            start = end;
        }

        let mut labels = vec![0u32; total as usize];
        let mut label_of_root = vec![u32::MAX; total as usize];
        let mut sizes = Vec::new();
        let mut reps = Vec::new();
        for code in 0..total {
            let root = find(&mut parent, code);
            if label_of_root[root as usize] == u32::MAX {
                label_of_root[root as usize] = sizes.len() as u32;
                sizes.push(0);
                reps.push(root);
            }
            let l = label_of_root[root as usize];
            labels[code as usize] = l;
            sizes[l as usize] += 1;
        }
        Ok(OrbitPartition {
            n,
            field,
            p,
            labels,
            sizes,
            reps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn orbit_count(&self) -> usize {
        self.sizes.len()
    }

    /// Orbit sizes, indexed by label.
    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Orbit label of every packed state.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    fn packed(&self) -> Packed {
        Packed {
            n: self.n,
            p: self.p,
            m: self.n * (self.n - 1) / 2,
        }
    }

    pub fn encode(&self, t: &Slt) -> Option<u32> {
        if t.n() != self.n || t.field() != self.field {
            return None;
        }
        let mut s = [0; MAX_SLOTS];
        for (d, x) in s.iter_mut().zip(t.entries()) {
            *d = x.as_residue()?;
        }
        Some(self.packed().encode(&s))
    }

    pub fn decode(&self, code: u32) -> Slt {
        let s = self.packed().decode(code);
        let mut t = Slt::zero(self.n, self.field).expect("n >= 2");
        for r in 2..=self.n {
            for k in 1..r {
                t.set_unchecked(r, k, self.field.from_i64(i64::from(s[slot(r, k)])));
            }
        }
        t
    }

    pub fn label(&self, t: &Slt) -> Option<usize> {
        self.encode(t).map(|c| self.labels[c as usize] as usize)
    }

    pub fn same_orbit(&self, t: &Slt, s: &Slt) -> Option<bool> {
        Some(self.label(t)? == self.label(s)?)
    }

    /// The member with the smallest packed code.
    pub fn representative(&self, label: usize) -> Slt {
        self.decode(self.reps[label])
    }

    /// Members of one orbit in increasing code order.
    pub fn members(&self, label: usize) -> impl Iterator<Item = Slt> + '_ {
        let l = label as u32;
        (0..self.labels.len() as u32)
            .filter(move |&c| self.labels[c as usize] == l)
            .map(move |c| self.decode(c))
    }
}
