//! Truncated GNS spaces `H²(μ)` restricted to polynomials of degree `<= N`.
//!
//! Coordinates: with `G = V Λ V*` and `r` eigenvalues above the null threshold,
//! the quotient basis is `B = V_r Λ_r^{-1/2}` (word coefficients of an
//! orthonormal basis) and `Φ = Λ_r^{1/2} V_r*` sends a word coefficient vector
//! to its class in that basis. Column `α` of `Φ` is the class of `L^α`.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, op_norm, CMat};
use crate::measures::{GramMatrix, NcMeasure, TOL_PSD};
use crate::words::WordIndex;

/// Relative eigenvalue cutoff separating the null space from the quotient.
pub const TOL_NULL: f64 = 1e-10;

/// Co-embedding norms above `1 + ORDERING_TOL` mean the splitting measure is not dominated.
pub const ORDERING_TOL: f64 = 1e-6;

/// Distance threshold for the (heuristic) Cuntz verdict at the largest degree.
pub const CUNTZ_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct GnsTruncation {
    gram: GramMatrix,
    eigenvalues: Vec<f64>,
    rank: usize,
    basis: CMat,
    coords: CMat,
    null_basis: CMat,
    mass: f64,
    tol_psd: f64,
    tol_null: f64,
}

impl GnsTruncation {
    pub fn build(mu: &NcMeasure, degree: usize) -> Result<Self> {
        Self::build_with(mu, degree, TOL_PSD, TOL_NULL)
    }

    pub fn build_with(mu: &NcMeasure, degree: usize, tol_psd: f64, tol_null: f64) -> Result<Self> {
        let gram = mu.gram(degree)?;
        Self::from_gram(gram, tol_psd, tol_null)
    }

    pub fn from_gram(gram: GramMatrix, tol_psd: f64, tol_null: f64) -> Result<Self> {
        let spectrum = gram.spectrum(tol_psd)?;
        let n = gram.size();
        let largest = spectrum.largest();
        let rank = spectrum
            .values
            .iter()
            .take_while(|&&v| largest > 0.0 && v > tol_null * largest)
            .count();
        let v = &spectrum.vectors;
        let basis = CMat::from_fn(n, rank, |i, k| v[(i, k)] / spectrum.values[k].sqrt());
        let coords = CMat::from_fn(rank, n, |k, j| v[(j, k)].conj() * spectrum.values[k].sqrt());
        let null_basis = CMat::from_fn(n, n - rank, |i, k| v[(i, rank + k)]);
        let mass = gram.entries()[(0, 0)].re;
        Ok(GnsTruncation {
            gram,
            eigenvalues: spectrum.values,
            rank,
            basis,
            coords,
            null_basis,
            mass,
            tol_psd,
            tol_null,
        })
    }

    pub fn degree(&self) -> usize {
        self.gram.degree()
    }

    pub fn d(&self) -> usize {
        self.gram.index().d()
    }

    pub fn index(&self) -> &WordIndex {
        self.gram.index()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// Gram eigenvalues, decreasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn null_dim(&self) -> usize {
        self.gram.size() - self.rank
    }

    /// `B`, size `n × r`.
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// `Φ`, size `r × n`.
    pub fn coords(&self) -> &CMat {
        &self.coords
    }

    pub fn null_basis(&self) -> &CMat {
        &self.null_basis
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn tol_null(&self) -> f64 {
        self.tol_null
    }

    /// The truncation at a lower degree, reusing the leading Gram block.
    pub fn restrict(&self, degree: usize) -> Result<GnsTruncation> {
        if degree == self.degree() {
            return Ok(self.clone());
        }
        GnsTruncation::from_gram(self.gram.restrict(degree)?, self.tol_psd, self.tol_null)
    }

    /// `‖B* G B − I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.basis.adjoint() * self.gram.entries() * &self.basis;
        max_abs(&(m - CMat::identity(self.rank, self.rank)))
    }

    /// `‖G K‖_max / ‖G‖` for the null basis `K`.
    pub fn null_defect(&self) -> f64 {
        if self.null_basis.ncols() == 0 {
            return 0.0;
        }
        let scale = self
            .eigenvalues
            .first()
            .copied()
            .unwrap_or(1.0)
            .max(f64::MIN_POSITIVE);
        max_abs(&(self.gram.entries() * &self.null_basis)) / scale
    }

    /// Left multiplication by the letters, as maps from the degree `N−1`
    /// quotient into the degree `N` quotient.
    pub fn row_isometry(&self) -> Result<RowIsometryMatrices> {
        if self.degree() == 0 {
            return Err(Error::DegreeOutOfBudget {
                degree: 1,
                budget: 0,
            });
        }
        let lower = self.restrict(self.degree() - 1)?;
        let idx = self.index();
        let low_idx = lower.index();
        let pis = (1..=self.d())
            .map(|k| {
                let cols: Vec<usize> = (0..low_idx.len())
                    .map(|j| {
                        idx.prepend(k, j)
                            .expect("prepend of degree N-1 word fits in degree N")
                    })
                    .collect();
                crate::linalg::select_columns(&self.coords, &cols) * lower.basis()
            })
            .collect();
        Ok(RowIsometryMatrices { pis, lower })
    }
}

#[derive(Clone, Debug)]
pub struct RowIsometryMatrices {
    pis: Vec<CMat>,
    lower: GnsTruncation,
}

impl RowIsometryMatrices {
    /// `Π_k` for letter `k` in `1..=d`.
    pub fn pi(&self, k: usize) -> &CMat {
        &self.pis[k - 1]
    }

    pub fn all(&self) -> &[CMat] {
        &self.pis
    }

    /// The degree `N−1` truncation forming the domain.
    pub fn domain(&self) -> &GnsTruncation {
        &self.lower
    }

    /// `max_{j,k} ‖Π_j* Π_k − δ_jk I‖_max`.
    pub fn isometry_defect(&self) -> f64 {
        let r = self.lower.rank();
        let mut worst = 0.0f64;
        for (j, pj) in self.pis.iter().enumerate() {
            for (k, pk) in self.pis.iter().enumerate() {
                let mut m = pj.adjoint() * pk;
                if j == k {
                    m -= CMat::identity(r, r);
                }
                worst = worst.max(max_abs(&m));
            }
        }
        worst
    }
}

/// `E: p + N_σ ↦ p + N_λ` in the two orthonormal quotient bases.
#[derive(Clone, Debug)]
pub struct CoEmbedding {
    matrix: CMat,
    norm: f64,
}

impl CoEmbedding {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `E*E`, computed as `B_σ* G_λ B_σ` and symmetrized.
    pub fn gram_in(sigma: &GnsTruncation, lambda: &GnsTruncation) -> CMat {
        let b = sigma.basis();
        crate::linalg::hermitian_part(&(b.adjoint() * lambda.gram().entries() * b))
    }
}

pub fn coembed(sigma: &GnsTruncation, lambda: &GnsTruncation) -> Result<CoEmbedding> {
    if sigma.d() != lambda.d() {
        return Err(Error::AlphabetMismatch {
            expected: sigma.d(),
            found: lambda.d(),
        });
    }
    if sigma.degree() != lambda.degree() {
        return Err(Error::DimensionMismatch(format!(
            "co-embedding between degrees {} and {}",
            sigma.degree(),
            lambda.degree()
        )));
    }
    let matrix = lambda.coords() * sigma.basis();
    let norm = op_norm(&matrix);
    if norm > 1.0 + ORDERING_TOL {
        return Err(Error::OrderingViolation { norm });
    }
    Ok(CoEmbedding { matrix, norm })
}

/// `max_k ‖E Π_{σ,k} − Π_{λ,k} E'‖` with `E'` the degree `N−1` co-embedding.
pub fn intertwining_defect(sigma: &GnsTruncation, lambda: &GnsTruncation) -> Result<f64> {
    let e = coembed(sigma, lambda)?;
    let ps = sigma.row_isometry()?;
    let pl = lambda.row_isometry()?;
    let e_low = coembed(ps.domain(), pl.domain())?;
    let mut worst = 0.0f64;
    for k in 1..=sigma.d() {
        let diff = e.matrix() * ps.pi(k) - pl.pi(k) * e_low.matrix();
        worst = worst.max(op_norm(&diff));
    }
    Ok(worst)
}

/// Squared distance from the class of `1` to the span of the classes of
/// nonconstant words of length `<= N`, divided by `μ(1)`.
pub fn cuntz_distance(mu: &NcMeasure, degree: usize) -> Result<f64> {
    let t = GnsTruncation::build(mu, degree)?;
    cuntz_distance_of(&t)
}

/// Computed as the Schur complement of the nonconstant block in the Gram
/// matrix (elimination with `∅` last), which keeps directions the rank
/// truncation would discard.
pub fn cuntz_distance_of(t: &GnsTruncation) -> Result<f64> {
    if t.degree() == 0 {
        return Err(Error::DegreeOutOfBudget {
            degree: 1,
            budget: 0,
        });
    }
    if !(t.mass() > 0.0) {
        return Err(Error::DegenerateMeasure { mass: t.mass() });
    }
    let g = t.gram().entries();
    let n = g.nrows();
    let order: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
    let mut a = CMat::from_fn(n, n, |i, j| g[(order[i], order[j])]);
    let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let skip = 64.0 * n as f64 * f64::EPSILON * max_diag;
    for k in 0..n - 1 {
        let p = a[(k, k)].re;
        if p <= skip {
            continue;
        }
        for j in k + 1..n {
            let f = a[(k, j)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let aik = a[(i, k)];
                a[(i, j)] -= aik * f;
            }
        }
    }
    Ok((a[(n - 1, n - 1)].re / t.mass()).clamp(0.0, 1.0))
}

/// Distances along a ladder plus the heuristic verdict at the largest degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CuntzTrace {
    pub degrees: Vec<usize>,
    pub distances: Vec<f64>,
    pub cuntz: bool,
}

pub fn cuntz_trace(mu: &NcMeasure, ladder: &[usize], threshold: f64) -> Result<CuntzTrace> {
    let distances = ladder
        .iter()
        .map(|&n| cuntz_distance(mu, n))
        .collect::<Result<Vec<_>>>()?;
    let cuntz = distances.last().is_some_and(|&d| d < threshold);
    Ok(CuntzTrace {
        degrees: ladder.to_vec(),
        distances,
        cuntz,
    })
}
