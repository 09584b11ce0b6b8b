//! Text and JSON serialization of matrices.
//!
//! The text format is a header line `n <size> field <descriptor>` followed by
//! rows `2..=n`, each listing `t_{r,1} .. t_{r,r-1}` separated by whitespace.
//! Blank lines and lines starting with `#` are ignored.

use serde::{Deserialize, Serialize};

use super::{MatrixError, Slt};
use crate::field::{Field, Scalar};

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub field: Field,
    pub rows: Vec<Vec<String>>,
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Parse whitespace-separated scalars.
pub(crate) fn parse_row(field: Field, line: &str) -> Result<Vec<Scalar>, MatrixError> {
    line.split_whitespace()
        .map(|tok| field.parse_scalar(tok).map_err(MatrixError::from))
        .collect()
}

pub(crate) fn render_row(row: &[Scalar]) -> String {
    row.iter()
        .map(Scalar::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse the header `n <size> field <descriptor>`.
pub(crate) fn parse_header(line: &str) -> Result<(usize, Field), MatrixError> {
    let bad = || MatrixError::Format(format!("bad header {line:?}, expected `n <size> field <f>`"));
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.as_slice() {
        ["n", size, "field", f] => {
            let n = size.parse().map_err(|_| bad())?;
            Ok((n, f.parse()?))
        }
        _ => Err(bad()),
    }
}

impl Slt {
    pub fn to_text(&self) -> String {
        let mut out = format!("n {} field {}\n", self.n, self.field);
        for r in 2..=self.n {
            let row: Vec<Scalar> = (1..r).map(|j| self.get(r, j).clone()).collect();
            out.push_str(&render_row(&row));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MatrixError> {
        let mut lines = content_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| MatrixError::Format("empty input".into()))?;
        let (n, field) = parse_header(header)?;
        if n < 2 {
            return Err(MatrixError::TooSmall(n));
        }
        let rows = lines
            .map(|l| parse_row(field, l))
            .collect::<Result<Vec<_>, _>>()?;
        if rows.len() != n - 1 {
            return Err(MatrixError::Format(format!(
                "expected {} rows for n = {n}, found {}",
                n - 1,
                rows.len()
            )));
        }
        Slt::from_rows(field, rows)
    }

    pub fn to_doc(&self) -> MatrixDoc {
        MatrixDoc {
            n: self.n,
            field: self.field,
            rows: (2..=self.n)
                .map(|r| (1..r).map(|j| self.get(r, j).to_string()).collect())
                .collect(),
        }
    }

    pub fn from_doc(doc: &MatrixDoc) -> Result<Self, MatrixError> {
        if doc.rows.len() + 1 != doc.n {
            return Err(MatrixError::Format(format!(
                "expected {} rows for n = {}, found {}",
                doc.n.saturating_sub(1),
                doc.n,
                doc.rows.len()
            )));
        }
        let rows = doc
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| doc.field.parse_scalar(s).map_err(MatrixError::from))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Slt::from_rows(doc.field, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("matrix documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, MatrixError> {
        let doc: MatrixDoc =
            serde_json::from_str(text).map_err(|e| MatrixError::Format(e.to_string()))?;
        Slt::from_doc(&doc)
    }

    /// Accepts either the JSON or the text format.
    pub fn parse_any(text: &str) -> Result<Self, MatrixError> {
        if text.trim_start().starts_with('{') {
            Slt::from_json(text)
        } else {
            Slt::from_text(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_example() {
        let text = "# Example\nn 4 field q\n0\n2 1\n12 9 3\n";
        let t = Slt::from_text(text).unwrap();
        assert_eq!(t.get(4, 1), &Field::Rationals.from_i64(12));
        assert_eq!(t.to_text(), "n 4 field q\n0\n2 1\n12 9 3\n");
        let g = Slt::from_text("n 3 field qi\n1+i\n-1/2i 3\n").unwrap();
        assert_eq!(g.get(3, 1).to_string(), "-1/2i");
    }

    #[test]
    fn text_errors() {
        assert!(matches!(Slt::from_text(""), Err(MatrixError::Format(_))));
        assert!(matches!(Slt::from_text("n 4 field q\n0\n1 1\n"), Err(MatrixError::Format(_))));
        assert!(matches!(
            Slt::from_text("n 3 field q\n0\n1\n"),
            Err(MatrixError::RowLength { row: 3, .. })
        ));
        assert!(matches!(Slt::from_text("n 3 field g\n0\n1 1\n"), Err(MatrixError::Field(_))));
        assert!(matches!(Slt::from_text("n 3 field f5\n0\n1/5 1\n"), Err(MatrixError::Field(_))));
    }

    #[test]
    fn json_example() {
        let t = Slt::from_ints(Field::prime(7).unwrap(), &[&[0], &[1, 1], &[3, 0, 1]]).unwrap();
        let js = t.to_json();
        assert_eq!(js, r#"{"n":4,"field":"f7","rows":[["0"],["1","1"],["3","0","1"]]}"#);
        assert_eq!(Slt::from_json(&js).unwrap(), t);
        assert_eq!(Slt::parse_any(&js).unwrap(), t);
        assert_eq!(Slt::parse_any(&t.to_text()).unwrap(), t);
    }

    fn arb_matrix() -> impl Strategy<Value = Slt> {
        let field = prop_oneof![
            Just(Field::prime(5).unwrap()),
            Just(Field::prime(13).unwrap()),
            Just(Field::Rationals),
            Just(Field::GaussianRationals),
        ];
        (field, 2usize..=6).prop_flat_map(|(field, n)| {
            let len = n * (n - 1) / 2;
            prop::collection::vec((-30i64..30, 1i64..9, -5i64..5), len).prop_map(move |cells| {
                let mut t = Slt::zero(n, field).unwrap();
                let mut it = cells.into_iter();
                for r in 2..=n {
                    for j in 1..r {
                        let (num, den, im) = it.next().unwrap();
                        let mut x = field.from_ratio(num, den).unwrap_or_else(|_| field.zero());
                        if field == Field::GaussianRationals {
                            x = x.checked_add(&field.parse_scalar(&format!("{im}i")).unwrap()).unwrap();
                        }
                        t.set(r, j, x).unwrap();
                    }
                }
                t
            })
        })
    }

    proptest! {
        #[test]
        fn text_and_json_round_trip(t in arb_matrix()) {
            prop_assert_eq!(Slt::from_text(&t.to_text()).unwrap(), t.clone());
            prop_assert_eq!(Slt::from_json(&t.to_json()).unwrap(), t);
        }
    }
}
