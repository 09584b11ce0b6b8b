//! Named check suites behind `nilgraded verify`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilgraded::algebra::{gamma_as_homomorphism, gamma_system_holds, iso_search, IsoConfig};
use nilgraded::classify4::{
    c_equivalent, canonical_rep, complex_canonical, count_n4, d_equivalent, d_witness_gamma,
    in_region_u, infinite_family, lemma1_trace, mobius_f, probe_lemma_gap, ClassId, SimplifiedForm,
};
use nilgraded::eto::{apply_trace, OrbitPartition};
use nilgraded::{Field, Scalar, Slt};

pub const DEFAULT_SEED: u64 = 20240601;

pub const NAMES: &[&str] = &[
    "count", "n4-f3", "n4-f5", "criteria-f3", "criteria-f5", "lemma", "invariance", "witness",
    "complex", "family",
];

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn report(name: &str, passed: bool, detail: String) -> SuiteReport {
    SuiteReport {
        name: name.into(),
        passed,
        detail,
    }
}

type SuiteResult = Result<SuiteReport, String>;

pub fn run(name: &str, seed: u64) -> Result<Vec<SuiteReport>, String> {
    if name == "all" {
        return NAMES.iter().map(|n| run_one(n, seed)).collect();
    }
    Ok(vec![run_one(name, seed)?])
}

fn run_one(name: &str, seed: u64) -> SuiteResult {
    let f = |p: u64| Field::prime(p).expect("prime");
    match name {
        "count" => count(),
        "n4-f3" => partition(name, f(3)),
        "n4-f5" => partition(name, f(5)),
        "criteria-f3" => criteria(name, f(3)),
        "criteria-f5" => criteria(name, f(5)),
        "lemma" => lemma(),
        "invariance" => invariance(),
        "witness" => witness(seed),
        "complex" => complex(seed),
        "family" => family(),
        _ => Err(format!("unknown suite {name:?}; known: all, {}", NAMES.join(", "))),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn count() -> SuiteResult {
    let expected = [(3, 8), (5, 10), (7, 11), (11, 14), (13, 16)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (q, n) in expected {
        let r = count_n4(q).map_err(err)?;
        let bound = 2 * q + 2;
        ok &= r.agree && r.n4_orbits == n && r.n4_orbits <= bound && ((r.n4_orbits == bound) == (q == 3));
        parts.push(format!("q={q}:{}/{}/{}", r.n4_formula, r.n4_constructive, r.n4_orbits));
    }
    Ok(report("count", ok, parts.join(" ")))
}

fn all_matrices(field: Field) -> Result<(OrbitPartition, Vec<Slt>), String> {
    let part = OrbitPartition::compute(4, field).map_err(err)?;
    let all = (0..part.state_count() as u32).map(|c| part.decode(c)).collect();
    Ok((part, all))
}

fn partition(name: &str, field: Field) -> SuiteResult {
    let (part, all) = all_matrices(field)?;
    let mut by_label: HashMap<usize, ClassId> = HashMap::new();
    let mut by_class: HashMap<ClassId, usize> = HashMap::new();
    let mut bad = 0;
    for t in &all {
        let c = canonical_rep(t).map_err(err)?;
        if let Some(tr) = &c.trace {
            let target = c.class.canonical.materialize(field).map_err(err)?;
            bad += usize::from(apply_trace(t, tr).ok() != Some(target));
        }
        let label = part.label(t).expect("in range");
        bad += usize::from(*by_label.entry(label).or_insert_with(|| c.class.clone()) != c.class);
        bad += usize::from(*by_class.entry(c.class).or_insert(label) != label);
    }
    Ok(report(
        name,
        bad == 0,
        format!("{} matrices, {} orbits, {} classes, {bad} mismatches", all.len(), part.orbit_count(), by_class.len()),
    ))
}

fn criteria(name: &str, field: Field) -> SuiteResult {
    let part = OrbitPartition::compute(4, field).map_err(err)?;
    let cfg = IsoConfig::default();
    let elems = field.elements().map_err(err)?;
    let mut bad = 0;
    let mut pairs = 0;
    for a in &elems {
        for b in &elems {
            let (t, s) = (c_form(field, a)?, c_form(field, b)?);
            let iso = iso_search(&t, &s, &cfg).map_err(err)?.is_found();
            let orb = part.same_orbit(&t, &s).expect("in range");
            bad += usize::from(c_equivalent(a, b) != iso || iso != orb);
            pairs += 1;
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let (t, s) = (d_form(field, a)?, d_form(field, b)?);
            let iso = iso_search(&t, &s, &cfg).map_err(err)?.is_found();
            let orb = part.same_orbit(&t, &s).expect("in range");
            bad += usize::from(d_equivalent(a, b).map_err(err)? != iso || iso != orb);
            pairs += 1;
        }
    }
    Ok(report(name, bad == 0, format!("{pairs} pairs, {bad} discrepancies")))
}

fn c_form(field: Field, a: &Scalar) -> Result<Slt, String> {
    SimplifiedForm::C(a.clone()).materialize(field).map_err(err)
}

fn d_form(field: Field, u: &Scalar) -> Result<Slt, String> {
    SimplifiedForm::D(u.clone()).materialize(field).map_err(err)
}

fn v_form(field: Field, u: &Scalar, v: &Scalar) -> Result<Slt, String> {
    let (z, o) = (field.zero(), field.one());
    Slt::from_rows(field, vec![vec![z], vec![o.clone(), o.clone()], vec![u.clone(), v.clone(), o]]).map_err(err)
}

fn lemma() -> SuiteResult {
    let mut bad = 0;
    let mut checked = 0;
    let mut gap = Vec::new();
    for p in [5u64, 7] {
        let field = Field::prime(p).expect("prime");
        for u in field.elements().map_err(err)? {
            for v in field.elements().map_err(err)? {
                let Ok(tr) = lemma1_trace(&u, &v) else { continue };
                let a = &(&(&(&u * &v) + &(&u * &v)) + &u) + &v;
                let t = v_form(field, &u, &v)?;
                bad += usize::from(apply_trace(&t, &tr).ok() != Some(c_form(field, &a)?));
                checked += 1;
            }
        }
        let probes = probe_lemma_gap(field).map_err(err)?;
        let hits = probes.iter().filter(|g| g.equivalent_to_c_minus_half).count();
        gap.push(format!("f{p}: {hits}/{} gap cases equivalent to C(-1/2)", probes.len()));
    }
    Ok(report("lemma", bad == 0, format!("{checked} endpoints, {bad} wrong; {}", gap.join(", "))))
}

fn invariance() -> SuiteResult {
    let mut bad = 0;
    for p in [3u64, 5] {
        let (part, all) = all_matrices(Field::prime(p).expect("prime"))?;
        let mut walls: HashMap<usize, String> = HashMap::new();
        let mut measures: HashMap<usize, String> = HashMap::new();
        for t in &all {
            let label = part.label(t).expect("in range");
            if let Ok(w) = t.wall_of_ref() {
                bad += usize::from(*walls.entry(label).or_insert_with(|| w.to_string()) != w.to_string());
            }
            if let Ok(m) = t.measure_sequence() {
                bad += usize::from(*measures.entry(label).or_insert_with(|| m.to_string()) != m.to_string());
            }
        }
    }
    Ok(report("invariance", bad == 0, format!("{bad} members disagree with their orbit")))
}

fn witness(seed: u64) -> SuiteResult {
    let mut bad = 0;
    let mut n = 0;
    let check = |u: &Scalar, v: &Scalar, e: &Scalar| -> Result<bool, String> {
        let g = d_witness_gamma(u, v, e).map_err(err)?;
        let field = u.field();
        let (t, s) = (d_form(field, u)?, d_form(field, v)?);
        Ok(gamma_system_holds(&t, &s, &g).map_err(err)? && gamma_as_homomorphism(&t, &s, &g).map_err(err)?)
    };
    let f7 = Field::prime(7).expect("prime");
    for v in f7.units().map_err(err)? {
        for e in f7.units().map_err(err)? {
            let u = &(&e * &e) * &v;
            bad += usize::from(!check(&u, &v, &e)?);
            n += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let e = nonzero_rational(&mut rng);
        let v = nonzero_rational(&mut rng);
        let u = &(&e * &e) * &v;
        bad += usize::from(!check(&u, &v, &e)?);
        n += 1;
    }
    Ok(report("witness", bad == 0, format!("{n} triples, {bad} failures")))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let num: i64 = rng.random_range(-30..=30);
        let den: i64 = rng.random_range(1..=12);
        if num != 0 {
            return Scalar::rational(BigRational::new(BigInt::from(num), BigInt::from(den)));
        }
    }
}

fn complex(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..1000 {
        let mut part = || BigRational::new(BigInt::from(rng.random_range(-40i64..=40)), BigInt::from(rng.random_range(1i64..=20)));
        let z = Scalar::gaussian(part(), part());
        if let Some(w) = mobius_f(&z) {
            bad += usize::from(mobius_f(&w).as_ref() != Some(&z));
        }
        let c = complex_canonical(&z);
        bad += usize::from(!in_region_u(&c) || complex_canonical(&c) != c);
    }
    let g = Field::GaussianRationals;
    for fixed in [g.zero(), g.from_i64(-1)] {
        bad += usize::from(complex_canonical(&fixed) != fixed);
    }
    Ok(report("complex", bad == 0, format!("1000 points, {bad} failures")))
}

fn family() -> SuiteResult {
    let fam = infinite_family(Field::Rationals, 50).map_err(err)?;
    let mut bad = 0;
    for (i, a) in fam.iter().enumerate() {
        for b in &fam[i + 1..] {
            bad += usize::from(c_equivalent(a, b) || c_equivalent(b, a));
        }
    }
    Ok(report("family", fam.len() == 50 && bad == 0, format!("{} elements, {bad} equivalent pairs", fam.len())))
}
