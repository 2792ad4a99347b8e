//! Classical measures on the unit circle and their closed-form Lebesgue
//! decomposition.
//!
//! A [`ClassicalSpec`] is a finite list of atoms plus a density given as a sum
//! of nonnegative trigonometric polynomials, each restricted to an arc. Densities
//! are taken relative to the normalized measure `dm = dθ/2π`, so the constant
//! density `1` on the full circle is `m` itself. Moments follow the convention
//! `μ(z^n) = ∫ e^{inθ} dμ(θ)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::decompose::DecompositionResult;
use crate::error::{Error, Result};
use crate::linalg::{c, C64, ZERO};
use crate::words::Word;

/// Atom angles closer than this (on the circle) are the same point.
pub const ANGLE_TOL: f64 = 1e-12;
/// Density values at or below this encode "outside the support".
pub const SUPPORT_TOL: f64 = 1e-12;
/// Maximum change allowed under node doubling in the trapezoid rule.
pub const QUADRATURE_TOL: f64 = 1e-12;

const MAX_QUADRATURE_LOG2: u32 = 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

/// `f(θ) = cos[0] + Σ_{k≥1} cos[k]·cos(kθ) + Σ_{k≥1} sin[k-1]·sin(kθ)` on the
/// arc `[start, end)`, zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub start: f64,
    pub end: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl DensityPiece {
    pub fn full_circle(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        DensityPiece {
            start: 0.0,
            end: TAU,
            cos,
            sin,
        }
    }

    pub fn constant_on(start: f64, end: f64, value: f64) -> Self {
        DensityPiece {
            start,
            end,
            cos: vec![value],
            sin: Vec::new(),
        }
    }

    fn is_full_circle(&self) -> bool {
        self.start <= 0.0 && self.end >= TAU
    }

    fn is_zero(&self) -> bool {
        self.cos
            .iter()
            .chain(&self.sin)
            .all(|v| v.abs() <= SUPPORT_TOL)
    }

    fn degree(&self) -> usize {
        self.cos.len().saturating_sub(1).max(self.sin.len())
    }

    fn polynomial(&self, theta: f64) -> f64 {
        let mut v = self.cos.first().copied().unwrap_or(0.0);
        for (k, a) in self.cos.iter().enumerate().skip(1) {
            v += a * (k as f64 * theta).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * ((k + 1) as f64 * theta).sin();
        }
        v
    }

    fn contains(&self, theta: f64) -> bool {
        self.is_full_circle() || (theta >= self.start && theta < self.end)
    }

    pub fn value(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        if self.contains(t) {
            self.polynomial(t)
        } else {
            0.0
        }
    }

    /// Complex Fourier coefficients `f(θ) = Σ_k coef(k) e^{ikθ}`, `k ∈ [-K, K]`.
    fn fourier(&self) -> Vec<(i64, C64)> {
        let mut out = vec![(0i64, c(self.cos.first().copied().unwrap_or(0.0), 0.0))];
        for k in 1..=self.degree() {
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            out.push((k as i64, c(a / 2.0, -b / 2.0)));
            out.push((-(k as i64), c(a / 2.0, b / 2.0)));
        }
        out
    }

    /// `∫_{start}^{end} e^{inθ} f(θ) dθ / 2π` in closed form.
    fn arc_moment(&self, n: i64) -> C64 {
        let (a, b) = (self.start, self.end);
        self.fourier()
            .into_iter()
            .map(|(k, coef)| {
                let m = n + k;
                let integral = if m == 0 {
                    c((b - a) / TAU, 0.0)
                } else {
                    let m = m as f64;
                    (C64::from_polar(1.0, m * b) - C64::from_polar(1.0, m * a)) / c(0.0, TAU * m)
                };
                coef * integral
            })
            .sum()
    }
}

/// Sum of nonnegative arc-restricted trigonometric polynomials.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Density {
    #[serde(default)]
    pub pieces: Vec<DensityPiece>,
}

impl Density {
    pub fn value(&self, theta: f64) -> f64 {
        self.pieces.iter().map(|p| p.value(theta)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(DensityPiece::is_zero)
    }

    /// Disjoint sorted arcs where the density is not identically zero.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let arcs: Vec<(f64, f64)> = self
            .pieces
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| (p.start.max(0.0), p.end.min(TAU)))
            .collect();
        union_arcs(arcs)
    }
}

/// Atoms plus density: the finitely parametrized circle measures the oracle
/// understands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSpec {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Density,
}

impl ClassicalSpec {
    pub fn atoms(atoms: Vec<Atom>) -> Self {
        ClassicalSpec {
            atoms,
            density: Density::default(),
        }
    }

    pub fn density(pieces: Vec<DensityPiece>) -> Self {
        ClassicalSpec {
            atoms: Vec::new(),
            density: Density { pieces },
        }
    }

    /// Normalized Lebesgue measure `m`.
    pub fn lebesgue() -> Self {
        Self::density(vec![DensityPiece::full_circle(vec![1.0], Vec::new())])
    }

    /// `m` restricted to the upper (`[0, π)`) or lower (`[π, 2π)`) half circle.
    pub fn half_circle(upper: bool) -> Self {
        let (a, b) = if upper { (0.0, PI) } else { (PI, TAU) };
        Self::density(vec![DensityPiece::constant_on(a, b, 1.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_zero()
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !a.angle.is_finite() || !(0.0..TAU).contains(&a.angle) {
                return Err(Error::InvalidMeasure(format!(
                    "atom angle {} outside [0, 2π)",
                    a.angle
                )));
            }
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom weight {} must be strictly positive",
                    a.weight
                )));
            }
        }
        for (i, p) in self.density.pieces.iter().enumerate() {
            let finite = p.cos.iter().chain(&p.sin).all(|v| v.is_finite());
            if !finite || !(p.start >= 0.0 && p.start < p.end && p.end <= TAU) {
                return Err(Error::InvalidMeasure(format!(
                    "density piece {i} has an invalid arc [{}, {}) or coefficients",
                    p.start, p.end
                )));
            }
            let nodes = 1usize << 12;
            for j in 0..nodes {
                let theta = p.start + (p.end - p.start) * (j as f64 + 0.5) / nodes as f64;
                let v = p.polynomial(theta);
                if v < -SUPPORT_TOL {
                    return Err(Error::InvalidMeasure(format!(
                        "density piece {i} is negative ({v:.3e}) at θ = {theta:.6}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.moments(0)[0].re
    }

    /// `μ(z^n)` for `n = 0..=degree`.
    pub fn moments(&self, degree: usize) -> Vec<C64> {
        let mut out = vec![ZERO; degree + 1];
        for a in &self.atoms {
            for (n, slot) in out.iter_mut().enumerate() {
                *slot += C64::from_polar(a.weight, n as f64 * a.angle);
            }
        }
        let (full, arcs): (Vec<&DensityPiece>, Vec<&DensityPiece>) =
            self.density.pieces.iter().partition(|p| p.is_full_circle());
        if !full.is_empty() {
            let quad = trapezoid_moments(degree, |t| full.iter().map(|p| p.polynomial(t)).sum());
            for (slot, q) in out.iter_mut().zip(quad) {
                *slot += q;
            }
        }
        for p in arcs {
            for (n, slot) in out.iter_mut().enumerate() {
                *slot += p.arc_moment(n as i64);
            }
        }
        out
    }

    pub fn add(&self, other: &ClassicalSpec) -> ClassicalSpec {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            match atoms.iter_mut().find(|b| same_angle(a.angle, b.angle)) {
                Some(b) => b.weight += a.weight,
                None => atoms.push(*a),
            }
        }
        let mut pieces = self.density.pieces.clone();
        pieces.extend(other.density.pieces.iter().cloned());
        ClassicalSpec {
            atoms,
            density: Density { pieces },
        }
    }

    pub fn scale(&self, t: f64) -> ClassicalSpec {
        if t == 0.0 {
            return ClassicalSpec::default();
        }
        ClassicalSpec {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    angle: a.angle,
                    weight: a.weight * t,
                })
                .collect(),
            density: Density {
                pieces: self
                    .density
                    .pieces
                    .iter()
                    .map(|p| DensityPiece {
                        start: p.start,
                        end: p.end,
                        cos: p.cos.iter().map(|v| v * t).collect(),
                        sin: p.sin.iter().map(|v| v * t).collect(),
                    })
                    .collect(),
            },
        }
    }
}

pub fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) <= ANGLE_TOL
}

/// Periodic trapezoid rule for `∫ e^{inθ} f(θ) dθ/2π`, `n = 0..=degree`, with
/// node doubling until no moment moves by more than [`QUADRATURE_TOL`].
pub fn trapezoid_moments(degree: usize, f: impl Fn(f64) -> f64) -> Vec<C64> {
    let rule = |log2: u32| -> Vec<C64> {
        let nodes = 1usize << log2;
        let h = TAU / nodes as f64;
        let values: Vec<f64> = (0..nodes).map(|j| f(j as f64 * h)).collect();
        (0..=degree)
            .map(|n| {
                let s: C64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| C64::from_polar(*v, n as f64 * j as f64 * h))
                    .sum();
                s / nodes as f64
            })
            .collect()
    };
    let mut log2 = 4u32;
    while (1usize << log2) < 2 * degree + 2 {
        log2 += 1;
    }
    let mut prev = rule(log2);
    loop {
        log2 += 1;
        let next = rule(log2);
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change <= QUADRATURE_TOL || log2 >= MAX_QUADRATURE_LOG2 {
            return next;
        }
        prev = next;
    }
}

fn union_arcs(mut arcs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    arcs.retain(|(a, b)| b > a);
    arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in arcs {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `[a, b)` minus a sorted disjoint family of arcs.
fn subtract_arcs(a: f64, b: f64, holes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cursor = a;
    for &(h0, h1) in holes {
        if h1 <= cursor || h0 >= b {
            continue;
        }
        if h0 > cursor {
            out.push((cursor, h0));
        }
        cursor = cursor.max(h1);
    }
    if cursor < b {
        out.push((cursor, b));
    }
    out
}

fn intersect_arcs(a: f64, b: f64, arcs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    arcs.iter()
        .map(|&(c0, c1)| (a.max(c0), b.min(c1)))
        .filter(|(x, y)| y > x)
        .collect()
}

fn restrict(piece: &DensityPiece, arcs: &[(f64, f64)]) -> Vec<DensityPiece> {
    arcs.iter()
        .map(|&(start, end)| DensityPiece {
            start,
            end,
            cos: piece.cos.clone(),
            sin: piece.sin.clone(),
        })
        .collect()
}

/// Classical Lebesgue decomposition `μ = μ_ac + μ_s` relative to `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDecomposition {
    pub ac: ClassicalSpec,
    pub sing: ClassicalSpec,
}

/// The density of `μ` restricted to the density support of `λ`, plus the atoms
/// of `μ` sitting on atoms of `λ`, is absolutely continuous; the rest is
/// singular.
pub fn oracle_decompose(mu: &ClassicalSpec, lambda: &ClassicalSpec) -> ClassicalDecomposition {
    let support = lambda.density.support();
    let mut ac = ClassicalSpec::default();
    let mut sing = ClassicalSpec::default();
    for a in &mu.atoms {
        if lambda.atoms.iter().any(|b| same_angle(a.angle, b.angle)) {
            ac.atoms.push(*a);
        } else {
            sing.atoms.push(*a);
        }
    }
    for p in mu.density.pieces.iter().filter(|p| !p.is_zero()) {
        let (a, b) = (p.start.max(0.0), p.end.min(TAU));
        ac.density
            .pieces
            .extend(restrict(p, &intersect_arcs(a, b, &support)));
        sing.density
            .pieces
            .extend(restrict(p, &subtract_arcs(a, b, &support)));
    }
    ClassicalDecomposition { ac, sing }
}

/// Moment tables `z^0..z^N` of the two parts.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleMoments {
    pub ac: Vec<C64>,
    pub sing: Vec<C64>,
}

pub fn oracle_moments(decomp: &ClassicalDecomposition, degree: usize) -> OracleMoments {
    OracleMoments {
        ac: decomp.ac.moments(degree),
        sing: decomp.sing.moments(degree),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub degree: usize,
    pub ac_error: f64,
    pub sing_error: f64,
}

impl OracleComparison {
    pub fn max_error(&self) -> f64 {
        self.ac_error.max(self.sing_error)
    }
}

/// Largest moment discrepancy over `z^0..z^N` for each part.
pub fn compare(
    engine: &DecompositionResult,
    oracle: &OracleMoments,
    degree: usize,
) -> Result<OracleComparison> {
    if engine.d != 1 {
        return Err(Error::AlphabetMismatch {
            expected: 1,
            found: engine.d,
        });
    }
    let mut ac_error = 0.0f64;
    let mut sing_error = 0.0f64;
    for n in 0..=degree {
        let w = Word::power(n);
        let ac = engine.moment_ac(&w)?;
        let s = engine.moment_s(&w)?;
        let oa = oracle.ac.get(n).ok_or(Error::DegreeOutOfBudget {
            degree,
            budget: oracle.ac.len().saturating_sub(1),
        })?;
        let os = oracle.sing.get(n).ok_or(Error::DegreeOutOfBudget {
            degree,
            budget: oracle.sing.len().saturating_sub(1),
        })?;
        ac_error = ac_error.max((ac - oa).norm());
        sing_error = sing_error.max((s - os).norm());
    }
    Ok(OracleComparison {
        degree,
        ac_error,
        sing_error,
    })
}
