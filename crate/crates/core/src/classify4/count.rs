//! Class counts and representative lists for `n = 4`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{c_canonical, c_equivalent, c_partner, d_canonical, ClassifyError, SimplifiedForm};
use crate::eto::OrbitPartition;
use crate::field::{Field, Scalar};
use crate::tmatrix::Slt;

/// The readings of ambiguous definitions behind every count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub q_delta_superscript: u32,
    pub wall_comparison: String,
    pub q_position: String,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            q_delta_superscript: 1,
            wall_comparison: "c_r >= r_j".into(),
            q_position: "row r0 zero right of column k0".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub n4_formula: u64,
    pub n4_constructive: u64,
    pub n4_orbits: u64,
    pub per_wall: BTreeMap<String, u64>,
    pub c_classes: Vec<Vec<String>>,
    pub policy: Policy,
    pub agree: bool,
}

/// `(3q+23)/4` for `q ≡ 3 (mod 4)`, `(3q+25)/4` for `q ≡ 1 (mod 4)`.
pub fn n4_formula(q: u64) -> Result<u64, ClassifyError> {
    Field::prime(q)?;
    if q == 2 {
        return Err(ClassifyError::Unsupported("q must be an odd prime".into()));
    }
    Ok(if q % 4 == 3 { (3 * q + 23) / 4 } else { (3 * q + 25) / 4 })
}

/// The partition of `F_q` into `C` classes, each class sorted, classes
/// ordered by their least member.
pub(crate) fn c_partition(field: Field) -> Result<Vec<Vec<Scalar>>, ClassifyError> {
    let mut classes: Vec<Vec<Scalar>> = Vec::new();
    for a in field.elements()? {
        if classes.iter().any(|c| c.contains(&a)) {
            continue;
        }
        let mut class = vec![a.clone()];
        if let Some(b) = c_partner(&a) {
            if b != a && c_equivalent(&a, &b) {
                class.push(b);
            }
        }
        class.sort_by(Scalar::canonical_cmp);
        classes.push(class);
    }
    Ok(classes)
}

/// Formula, constructive count and orbit count over `F_q`.
pub fn count_n4(q: u64) -> Result<CountReport, ClassifyError> {
    let formula = n4_formula(q)?;
    let field = Field::prime(q)?;
    let classes = c_partition(field)?;
    let constructive = 5 + classes.len() as u64;
    let part = OrbitPartition::compute(4, field)?;
    let mut wall_of: Vec<Option<String>> = vec![None; part.orbit_count()];
    let mut missing = part.orbit_count();
    for code in 0..part.state_count() as u32 {
        if missing == 0 {
            break;
        }
        let label = part.labels()[code as usize] as usize;
        if wall_of[label].is_some() {
            continue;
        }
        let t = part.decode(code);
        if t.is_1ref() {
            wall_of[label] = Some(t.wall_of_ref()?.report_key());
            missing -= 1;
        }
    }
    let mut per_wall = BTreeMap::new();
    for w in wall_of {
        let key = w.ok_or_else(|| ClassifyError::Unsupported("an orbit has no 1-REF member".into()))?;
        *per_wall.entry(key).or_insert(0) += 1;
    }
    let orbits = part.orbit_count() as u64;
    Ok(CountReport {
        q,
        n4_formula: formula,
        n4_constructive: constructive,
        n4_orbits: orbits,
        per_wall,
        c_classes: classes
            .iter()
            .map(|c| c.iter().map(Scalar::to_string).collect())
            .collect(),
        policy: Policy::default(),
        agree: formula == constructive && constructive == orbits,
    })
}

/// How the `C` classes appear in a representative list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CFamily {
    /// One `C_a` per class, included in the list.
    Listed,
    /// `C_z` for every `z` in the region `𝒰`.
    RegionU,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representatives {
    pub field: Field,
    pub forms: Vec<SimplifiedForm>,
    pub c_family: CFamily,
}

impl Representatives {
    pub fn matrices(&self) -> Result<Vec<Slt>, ClassifyError> {
        self.forms.iter().map(|f| f.materialize(self.field)).collect()
    }

    /// One line per listed form: its name, wall and the six entries.
    pub fn to_csv(&self) -> Result<String, ClassifyError> {
        let mut out = String::from("form,wall,t21,t31,t32,t41,t42,t43\n");
        for f in &self.forms {
            let t = f.materialize(self.field)?;
            let entries: Vec<String> = t.entries().iter().map(Scalar::to_string).collect();
            out.push_str(&format!("{f},\"{}\",{}\n", f.wall(), entries.join(",")));
        }
        if self.c_family == CFamily::RegionU {
            out.push_str("# plus C(z) for every z with |z+1/2|^2 < 1/4, or = 1/4 with Im z >= 0\n");
        }
        Ok(out)
    }
}

/// A complete list of pairwise inequivalent representatives.
pub fn representatives_n4(field: Field) -> Result<Representatives, ClassifyError> {
    let mut forms = vec![SimplifiedForm::Zero, SimplifiedForm::B, SimplifiedForm::Bprime];
    match field {
        Field::Prime(_) => {
            forms.push(SimplifiedForm::D(field.one()));
            forms.push(SimplifiedForm::D(d_canonical(&field.least_non_residue().expect("odd prime"))?));
            for class in c_partition(field)? {
                forms.push(SimplifiedForm::C(c_canonical(&class[0])));
            }
            Ok(Representatives { field, forms, c_family: CFamily::Listed })
        }
        Field::GaussianRationals => {
            forms.push(SimplifiedForm::D(field.one()));
            Ok(Representatives { field, forms, c_family: CFamily::RegionU })
        }
        Field::Rationals => Err(ClassifyError::Unsupported(
            "q has infinitely many D and C classes; use infinite-family".into(),
        )),
    }
}
