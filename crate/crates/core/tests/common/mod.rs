#![allow(dead_code)]

use std::f64::consts::PI;

use ncmeasure::{Atom, CMat, CVec, ClassicalSpec, NcMeasure, Word, C64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn dirac(angles: &[f64], budget: usize) -> NcMeasure {
    NcMeasure::classical(
        &ClassicalSpec::atoms(
            angles
                .iter()
                .map(|&angle| Atom { angle, weight: 1.0 })
                .collect(),
        ),
        budget,
    )
    .unwrap()
}

pub fn half_circle(upper: bool, budget: usize) -> NcMeasure {
    NcMeasure::classical(&ClassicalSpec::half_circle(upper), budget).unwrap()
}

/// `h = (1 + z_1)/√2`.
pub fn weighted_h(d: usize, budget: usize) -> NcMeasure {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    NcMeasure::weighted(
        d,
        &[(Word::empty(), c(s, 0.0)), (Word::new(vec![1]), c(s, 0.0))],
        budget,
    )
    .unwrap()
}

/// `U_1 = diag(1, 1)/√2`, `U_2 = [[0, 1], [1, 0]]/√2`, `ξ = e_1`.
pub fn row_unitary_example(budget: usize) -> NcMeasure {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u1 = CMat::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    let u2 = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
    let xi = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    NcMeasure::row_unitary(&[u1, u2], &xi, budget).unwrap()
}

/// Rows of a Haar-ish unitary from Gram–Schmidt on the given entries.
fn orthonormal_rows(n: usize, m: usize, entries: &[(f64, f64)]) -> CMat {
    let a = CMat::from_fn(m, m, |i, j| {
        let (re, im) = entries[(i * m + j) % entries.len()];
        c(re, im) + if i == j { c(0.5, 0.0) } else { c(0.0, 0.0) }
    });
    let q = a.qr().q();
    q.rows(0, n).into_owned()
}

#[derive(Clone, Debug)]
pub enum MeasureRecipe {
    Weighted {
        d: usize,
        h: Vec<(Vec<u8>, (f64, f64))>,
    },
    RowUnitary {
        d: usize,
        n: usize,
        entries: Vec<(f64, f64)>,
    },
    Atoms {
        atoms: Vec<(f64, f64)>,
    },
    Sum(Box<MeasureRecipe>, Box<MeasureRecipe>),
}

impl MeasureRecipe {
    pub fn d(&self) -> usize {
        match self {
            MeasureRecipe::Weighted { d, .. } | MeasureRecipe::RowUnitary { d, .. } => *d,
            MeasureRecipe::Atoms { .. } => 1,
            MeasureRecipe::Sum(a, _) => a.d(),
        }
    }

    pub fn build(&self, budget: usize) -> NcMeasure {
        match self {
            MeasureRecipe::Weighted { d, h } => {
                let h: Vec<(Word, C64)> = h
                    .iter()
                    .map(|(w, (re, im))| (Word::new(w.clone()), c(*re, *im)))
                    .collect();
                NcMeasure::weighted(*d, &h, budget).unwrap()
            }
            MeasureRecipe::RowUnitary { d, n, entries } => {
                let v = orthonormal_rows(*n, n * d, entries);
                let us: Vec<CMat> = (0..*d).map(|k| v.columns(k * n, *n).into_owned()).collect();
                let mut xi = CVec::from_fn(*n, |i, _| c(1.0 + i as f64, 0.5 * i as f64));
                xi /= c(xi.norm(), 0.0);
                NcMeasure::row_unitary(&us, &xi, budget).unwrap()
            }
            MeasureRecipe::Atoms { atoms } => NcMeasure::classical(
                &ClassicalSpec::atoms(
                    atoms
                        .iter()
                        .map(|&(angle, weight)| Atom { angle, weight })
                        .collect(),
                ),
                budget,
            )
            .unwrap(),
            MeasureRecipe::Sum(a, b) => a.build(budget).add(&b.build(budget)).unwrap(),
        }
    }
}

fn word(d: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(1..=d as u8, 0..=2)
}

fn coeff() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64)
}

fn leaf(d: usize) -> BoxedStrategy<MeasureRecipe> {
    let weighted = prop::collection::vec((word(d), coeff()), 1..5)
        .prop_map(move |h| MeasureRecipe::Weighted { d, h });
    let row = (1..=2usize, prop::collection::vec(coeff(), 16))
        .prop_map(move |(n, entries)| MeasureRecipe::RowUnitary { d, n, entries });
    if d == 1 {
        let atoms = prop::collection::vec((0.0..2.0 * PI, 0.1..2.0f64), 1..4)
            .prop_map(|atoms| MeasureRecipe::Atoms { atoms });
        prop_oneof![weighted, row, atoms].boxed()
    } else {
        prop_oneof![weighted, row].boxed()
    }
}

/// Generated measures at a fixed alphabet size, possibly summed.
pub fn recipe_for(d: usize) -> BoxedStrategy<MeasureRecipe> {
    prop_oneof![
        3 => leaf(d),
        1 => (leaf(d), leaf(d)).prop_map(|(a, b)| MeasureRecipe::Sum(Box::new(a), Box::new(b))),
    ]
    .boxed()
}

/// Generated measures with `d ∈ {1, 2}`.
pub fn recipe() -> BoxedStrategy<MeasureRecipe> {
    prop_oneof![recipe_for(1), recipe_for(2)].boxed()
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eig(a: &CMat) -> f64 {
    let h = (a + a.adjoint()).scale(0.5);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
