//! JSON measure descriptions.
//!
//! ```json
//! {"d": 1, "kind": "atoms", "atoms": [{"angle": 0.0, "weight": 1.0}], "budget": 16}
//! {"d": 2, "kind": "weighted", "h": [{"word": [], "coeff": [0.6, 0.0]}, {"word": [1], "coeff": [0.8, 0.0]}]}
//! {"d": 1, "kind": "sum", "terms": [{"kind": "lebesgue"}, {"kind": "atoms", "atoms": [{"angle": 0.0, "weight": 1.0}]}]}
//! ```
//!
//! Complex numbers are `[re, im]`, matrices are arrays of rows. Every spec may
//! carry `"scale": t`. `budget` may be omitted and supplied by the caller;
//! `sum` terms inherit `d` and `budget` from the enclosing spec.

use serde::{Deserialize, Serialize};

use crate::classical::{Atom, ClassicalSpec, Density, DensityPiece};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::measures::{Generator, NcMeasure};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(flatten)]
    pub kind: MeasureKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Lebesgue,
    Weighted {
        h: Vec<WeightedTerm>,
    },
    Atoms {
        atoms: Vec<Atom>,
    },
    Density {
        pieces: Vec<DensityPiece>,
        #[serde(default)]
        atoms: Vec<Atom>,
    },
    RowUnitary {
        u: Vec<Vec<Vec<[f64; 2]>>>,
        xi: Vec<[f64; 2]>,
    },
    Sum {
        terms: Vec<MeasureSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub word: Vec<u8>,
    pub coeff: [f64; 2],
}

pub fn parse(text: &str) -> Result<MeasureSpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn complex(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn matrix(rows: &[Vec<[f64; 2]>], field: &str) -> Result<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!(
            "{field}: matrix must be square, got {n} rows of unequal length"
        )));
    }
    Ok(CMat::from_fn(n, n, |i, j| complex(rows[i][j])))
}

impl MeasureSpec {
    /// Alphabet size, required at the top level.
    pub fn alphabet(&self) -> Result<usize> {
        self.d
            .ok_or_else(|| Error::Parse("missing field `d`".into()))
    }

    /// The measure at the spec's budget, or `default_budget` when absent.
    pub fn to_measure(&self, default_budget: Option<usize>) -> Result<NcMeasure> {
        let d = self.alphabet()?;
        let budget = self
            .budget
            .or(default_budget)
            .ok_or_else(|| Error::Parse("missing field `budget`".into()))?;
        self.build(d, budget)
    }

    fn build(&self, d: usize, budget: usize) -> Result<NcMeasure> {
        if let Some(inner) = self.d {
            if inner != d {
                return Err(Error::AlphabetMismatch {
                    expected: d,
                    found: inner,
                });
            }
        }
        let budget = self.budget.unwrap_or(budget);
        let base = match &self.kind {
            MeasureKind::Lebesgue => NcMeasure::lebesgue(d, budget)?,
            MeasureKind::Weighted { h } => {
                let terms = h
                    .iter()
                    .map(|t| Ok((Word::with_alphabet(t.word.clone(), d)?, complex(t.coeff))))
                    .collect::<Result<Vec<_>>>()?;
                NcMeasure::weighted(d, &terms, budget)?
            }
            MeasureKind::Atoms { .. } | MeasureKind::Density { .. } => {
                if d != 1 {
                    return Err(Error::InvalidMeasure(format!(
                        "kind `{}` describes a circle measure and needs d = 1, got d = {d}",
                        self.kind_name()
                    )));
                }
                NcMeasure::classical(
                    &self.classical().expect("circle kinds are classical"),
                    budget,
                )?
            }
            MeasureKind::RowUnitary { u, xi } => {
                if u.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "row_unitary has {} matrices, d = {d}",
                        u.len()
                    )));
                }
                let us = u
                    .iter()
                    .enumerate()
                    .map(|(k, m)| matrix(m, &format!("u[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                let xi = CVec::from_iterator(xi.len(), xi.iter().map(|&p| complex(p)));
                NcMeasure::row_unitary(&us, &xi, budget)?
            }
            MeasureKind::Sum { terms } => {
                let mut it = terms.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Parse("`sum` needs at least one term".into()))?;
                let mut acc = first.build(d, budget)?;
                for t in it {
                    acc = acc.add(&t.build(d, budget)?)?;
                }
                acc
            }
        };
        match self.scale {
            Some(t) => base.scale(t),
            None => Ok(base),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MeasureKind::Lebesgue => "lebesgue",
            MeasureKind::Weighted { .. } => "weighted",
            MeasureKind::Atoms { .. } => "atoms",
            MeasureKind::Density { .. } => "density",
            MeasureKind::RowUnitary { .. } => "row_unitary",
            MeasureKind::Sum { .. } => "sum",
        }
    }

    /// Circle description when every part of the spec is classical.
    pub fn classical(&self) -> Option<ClassicalSpec> {
        let base = match &self.kind {
            MeasureKind::Lebesgue if self.d == Some(1) || self.d.is_none() => {
                Some(ClassicalSpec::lebesgue())
            }
            MeasureKind::Atoms { atoms } => Some(ClassicalSpec::atoms(atoms.clone())),
            MeasureKind::Density { pieces, atoms } => Some(ClassicalSpec {
                atoms: atoms.clone(),
                density: Density {
                    pieces: pieces.clone(),
                },
            }),
            MeasureKind::Sum { terms } => terms
                .iter()
                .map(|t| t.classical())
                .try_fold(ClassicalSpec::default(), |acc, t| t.map(|t| acc.add(&t))),
            _ => None,
        }?;
        Some(match self.scale {
            Some(t) => base.scale(t),
            None => base,
        })
    }
}

impl NcMeasure {
    /// Generator tag a spec produces, for reporting.
    pub fn spec_generator(spec: &MeasureSpec) -> Generator {
        if spec.scale.is_some() {
            return Generator::Scaled;
        }
        match &spec.kind {
            MeasureKind::Lebesgue => Generator::Lebesgue,
            MeasureKind::Weighted { .. } => Generator::Weighted,
            MeasureKind::Atoms { .. } => Generator::Atoms1d,
            MeasureKind::Density { .. } => Generator::Density1d,
            MeasureKind::RowUnitary { .. } => Generator::RowUnitary,
            MeasureKind::Sum { .. } => Generator::Sum,
        }
    }
}
