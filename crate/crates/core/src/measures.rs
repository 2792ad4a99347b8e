//! Positive NC measures represented by their moment tables.
//!
//! A measure on the free disk operator system is determined by the moments
//! `μ(L^γ)`; every other value `μ(L^{α*}L^β)` follows from the row-isometry
//! reduction in [`crate::words`]. Tables are finite: each measure carries an
//! explicit degree budget and asking for anything longer is an error.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::ClassicalSpec;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, hermitian_eigen, CMat, CVec, C64, ONE, ZERO};
use crate::words::{IndexReduction, Word, WordIndex};

/// Default PSD tolerance, relative to the largest Gram eigenvalue.
pub const TOL_PSD: f64 = 1e-10;

/// Where a moment table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Lebesgue,
    Weighted,
    Atoms1d,
    Density1d,
    RowUnitary,
    Sum,
    Scaled,
    Residual,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Generator::Lebesgue => "lebesgue",
            Generator::Weighted => "weighted",
            Generator::Atoms1d => "atoms1d",
            Generator::Density1d => "density1d",
            Generator::RowUnitary => "row_unitary",
            Generator::Sum => "sum",
            Generator::Scaled => "scaled",
            Generator::Residual => "residual",
        };
        f.write_str(s)
    }
}

/// A positive NC measure on `d` letters, known through degree `budget`.
#[derive(Clone, Debug)]
pub struct NcMeasure {
    index: WordIndex,
    moments: Vec<C64>,
    generator: Generator,
    classical: Option<ClassicalSpec>,
}

impl NcMeasure {
    /// Wrap a raw moment table (graded-lex order). No positivity check is done
    /// here; use [`NcMeasure::validate`].
    pub fn from_moments(
        d: usize,
        budget: usize,
        moments: Vec<C64>,
        generator: Generator,
    ) -> Result<Self> {
        let index = WordIndex::new(d, budget)?;
        if moments.len() != index.len() {
            return Err(Error::DimensionMismatch(format!(
                "moment table has {} entries, expected {} for d = {d}, budget {budget}",
                moments.len(),
                index.len()
            )));
        }
        if moments[0].im.abs() > 1e-12 * moments[0].norm().max(1.0) || moments[0].re < 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "total mass {} must be real and nonnegative",
                moments[0]
            )));
        }
        let mut moments = moments;
        moments[0].im = 0.0;
        Ok(NcMeasure {
            index,
            moments,
            generator,
            classical: None,
        })
    }

    /// NC Lebesgue measure: `m(L^α) = δ_{α,∅}`.
    pub fn lebesgue(d: usize, budget: usize) -> Result<Self> {
        let index = WordIndex::new(d, budget)?;
        let mut moments = vec![ZERO; index.len()];
        moments[0] = ONE;
        let classical = (d == 1).then(ClassicalSpec::lebesgue);
        Ok(NcMeasure {
            index,
            moments,
            generator: Generator::Lebesgue,
            classical,
        })
    }

    /// `μ_h(L^γ) = ⟨h, L^γ h⟩ = Σ_ω conj(h_{γω}) h_ω` for a free polynomial `h`.
    pub fn weighted(d: usize, h: &[(Word, C64)], budget: usize) -> Result<Self> {
        let index = WordIndex::new(d, budget)?;
        let mut coeffs: BTreeMap<Word, C64> = BTreeMap::new();
        for (w, v) in h {
            Word::with_alphabet(w.letters().to_vec(), d)?;
            *coeffs.entry(w.clone()).or_insert(ZERO) += v;
        }
        let mut moments = vec![ZERO; index.len()];
        for (u, hu) in &coeffs {
            for (v, hv) in &coeffs {
                // u = γ v
                if u.len() >= v.len() && u.letters().ends_with(v.letters()) {
                    let gamma = Word::from(&u.letters()[..u.len() - v.len()]);
                    if let Some(i) = index.index_of(&gamma) {
                        moments[i] += hu.conj() * hv;
                    }
                }
            }
        }
        moments[0].im = 0.0;
        Ok(NcMeasure {
            index,
            moments,
            generator: Generator::Weighted,
            classical: None,
        })
    }

    /// `μ(L^α) = ⟨ξ, U^α ξ⟩` for a row co-isometry `Σ U_k U_k^* = I` on `C^n`.
    pub fn row_unitary(us: &[CMat], xi: &CVec, budget: usize) -> Result<Self> {
        let d = us.len();
        let index = WordIndex::new(d, budget)?;
        let n = xi.len();
        if us.iter().any(|u| u.nrows() != n || u.ncols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row-unitary components must be {n}×{n} to match ξ"
            )));
        }
        let mut gram = CMat::zeros(n, n);
        for u in us {
            gram += u * u.adjoint();
        }
        let defect = crate::linalg::max_abs(&(gram - CMat::identity(n, n)));
        if defect > TOL_PSD {
            return Err(Error::InvalidMeasure(format!(
                "Σ U_k U_k* deviates from the identity by {defect:.3e}"
            )));
        }
        if (xi.norm() - 1.0).abs() > TOL_PSD {
            return Err(Error::InvalidMeasure(format!(
                "‖ξ‖ = {} is not 1",
                xi.norm()
            )));
        }
        let mut vectors: Vec<CVec> = Vec::with_capacity(index.len());
        vectors.push(xi.clone());
        for i in 1..index.len() {
            let w = index.word(i);
            let parent = index
                .index_of(&Word::from(&w.letters()[1..]))
                .expect("suffix of an indexed word is indexed");
            let k = w.letters()[0] as usize - 1;
            vectors.push(&us[k] * &vectors[parent]);
        }
        let moments = vectors.iter().map(|v| xi.dotc(v)).collect();
        let mut m = NcMeasure::from_moments(d, budget, moments, Generator::RowUnitary)?;
        if d == 1 && n == 1 {
            let z = us[0][(0, 0)];
            m.classical = Some(ClassicalSpec::atoms(vec![crate::classical::Atom {
                angle: z.arg().rem_euclid(std::f64::consts::TAU),
                weight: 1.0,
            }]));
        }
        Ok(m)
    }

    /// One-variable measure from atoms and density.
    pub fn classical(spec: &ClassicalSpec, budget: usize) -> Result<Self> {
        spec.validate()?;
        let moments = spec.moments(budget);
        let generator = if spec.density.is_zero() {
            Generator::Atoms1d
        } else {
            Generator::Density1d
        };
        let mut m = NcMeasure::from_moments(1, budget, moments, generator)?;
        m.classical = Some(spec.clone());
        Ok(m)
    }

    pub fn add(&self, other: &NcMeasure) -> Result<Self> {
        if self.d() != other.d() {
            return Err(Error::AlphabetMismatch {
                expected: self.d(),
                found: other.d(),
            });
        }
        let budget = self.budget().min(other.budget());
        let index = WordIndex::new(self.d(), budget)?;
        let moments = (0..index.len())
            .map(|i| self.moments[i] + other.moments[i])
            .collect();
        let classical = match (&self.classical, &other.classical) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        Ok(NcMeasure {
            index,
            moments,
            generator: Generator::Sum,
            classical,
        })
    }

    pub fn scale(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "scale factor {t} must be finite and >= 0"
            )));
        }
        Ok(NcMeasure {
            index: self.index.clone(),
            moments: self.moments.iter().map(|m| m * t).collect(),
            generator: Generator::Scaled,
            classical: self.classical.as_ref().map(|s| s.scale(t)),
        })
    }

    /// Same moments, shorter budget.
    pub fn truncate(&self, budget: usize) -> Result<Self> {
        if budget > self.budget() {
            return Err(Error::DegreeOutOfBudget {
                degree: budget,
                budget: self.budget(),
            });
        }
        let index = WordIndex::new(self.d(), budget)?;
        Ok(NcMeasure {
            moments: self.moments[..index.len()].to_vec(),
            index,
            generator: self.generator,
            classical: self.classical.clone(),
        })
    }

    pub fn d(&self) -> usize {
        self.index.d()
    }

    pub fn budget(&self) -> usize {
        self.index.degree()
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = generator;
        self
    }

    /// Classical circle description, when the measure came from one.
    pub fn classical_spec(&self) -> Option<&ClassicalSpec> {
        self.classical.as_ref()
    }

    pub fn word_index(&self) -> &WordIndex {
        &self.index
    }

    /// Raw graded-lex moment table.
    pub fn moments(&self) -> &[C64] {
        &self.moments
    }

    pub fn total_mass(&self) -> f64 {
        self.moments[0].re
    }

    /// `μ(L^γ)`.
    pub fn moment(&self, gamma: &Word) -> Result<C64> {
        match self.index.index_of(gamma) {
            Some(i) => Ok(self.moments[i]),
            None if gamma.max_letter() as usize > self.d() => Err(Error::LetterOutOfRange {
                letter: gamma.max_letter(),
                d: self.d(),
            }),
            None => Err(Error::OutOfBudget {
                word: gamma.clone(),
                len: gamma.len(),
                budget: self.budget(),
            }),
        }
    }

    /// `μ(L^{α*} L^β)`.
    pub fn sesquimoment(&self, alpha: &Word, beta: &Word) -> Result<C64> {
        match crate::words::reduce(alpha, beta) {
            crate::words::Reduction::Zero => Ok(ZERO),
            crate::words::Reduction::Right(g) => self.moment(&g),
            crate::words::Reduction::Left(g) => Ok(self.moment(&g)?.conj()),
        }
    }

    /// Gram matrix `G[α,β] = μ(L^{α*}L^β)` over all words of length `<= degree`.
    pub fn gram(&self, degree: usize) -> Result<GramMatrix> {
        if degree > self.budget() {
            return Err(Error::DegreeOutOfBudget {
                degree,
                budget: self.budget(),
            });
        }
        let index = WordIndex::new(self.d(), degree)?;
        let n = index.len();
        let entry = |i: usize, j: usize| match index.reduce(i, j) {
            IndexReduction::Zero => ZERO,
            IndexReduction::Right(g) => self.moments[g],
            IndexReduction::Left(g) => self.moments[g].conj(),
        };
        let rows: Vec<Vec<C64>> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n)
                    .into_par_iter()
                    .map(|i| (0..n).map(|j| entry(i, j)).collect())
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n)
                    .map(|i| (0..n).map(|j| entry(i, j)).collect())
                    .collect()
            }
        };
        let entries = CMat::from_fn(n, n, |i, j| rows[i][j]);
        Ok(GramMatrix { index, entries })
    }

    /// PSD validation of the Gram matrix at every degree up to `degree`.
    /// Only the top degree needs checking: lower Grams are principal submatrices.
    pub fn validate(&self, degree: usize, tol_psd: f64) -> Result<()> {
        self.gram(degree)?.spectrum(tol_psd).map(|_| ())
    }
}

/// Word-indexed Gram matrix of a measure at a fixed degree.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    index: WordIndex,
    entries: CMat,
}

/// Validated eigen-decomposition of a Gram matrix, eigenvalues decreasing.
#[derive(Clone, Debug)]
pub struct GramSpectrum {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl GramSpectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0).max(0.0)
    }
}

impl GramMatrix {
    pub fn from_entries(index: WordIndex, entries: CMat) -> Result<Self> {
        if entries.nrows() != index.len() || entries.ncols() != index.len() {
            return Err(Error::DimensionMismatch(format!(
                "Gram entries are {}×{}, index has {} words",
                entries.nrows(),
                entries.ncols(),
                index.len()
            )));
        }
        Ok(GramMatrix { index, entries })
    }

    pub fn degree(&self) -> usize {
        self.index.degree()
    }

    pub fn index(&self) -> &WordIndex {
        &self.index
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.index.len()
    }

    /// Leading principal block for a smaller degree.
    pub fn restrict(&self, degree: usize) -> Result<GramMatrix> {
        if degree > self.degree() {
            return Err(Error::DegreeOutOfBudget {
                degree,
                budget: self.degree(),
            });
        }
        let index = WordIndex::new(self.index.d(), degree)?;
        let n = index.len();
        Ok(GramMatrix {
            entries: self.entries.view((0, 0), (n, n)).into_owned(),
            index,
        })
    }

    /// Checks Hermitian symmetry and `λ_min >= -tol_psd · λ_max`.
    pub fn spectrum(&self, tol_psd: f64) -> Result<GramSpectrum> {
        let scale = crate::linalg::max_abs(&self.entries).max(1.0);
        let asymmetry = hermitian_defect(&self.entries);
        if asymmetry > 1e-12 * scale {
            return Err(Error::NotHermitian {
                degree: self.degree(),
                asymmetry,
            });
        }
        let (values, vectors) = hermitian_eigen(&self.entries);
        let largest = values.first().copied().unwrap_or(0.0).max(0.0);
        if let Some(&smallest) = values.last() {
            if smallest < -tol_psd * largest || (largest == 0.0 && smallest < -tol_psd) {
                return Err(Error::NotPositive {
                    degree: self.degree(),
                    eigenvalue: smallest,
                    largest,
                    tolerance: tol_psd,
                });
            }
        }
        Ok(GramSpectrum { values, vectors })
    }

    /// Largest violation of `G[iα, jβ] = δ_ij G[α, β]` over in-range pairs.
    pub fn toeplitz_defect(&self) -> f64 {
        let idx = &self.index;
        let mut worst = 0.0f64;
        for a in 0..idx.len() {
            for b in 0..idx.len() {
                for i in 1..=idx.d() {
                    for j in 1..=idx.d() {
                        if let (Some(ia), Some(jb)) = (idx.prepend(i, a), idx.prepend(j, b)) {
                            let expected = if i == j { self.entries[(a, b)] } else { ZERO };
                            worst = worst.max((self.entries[(ia, jb)] - expected).norm());
                        }
                    }
                }
            }
        }
        worst
    }
}
