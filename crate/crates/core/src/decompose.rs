//! Lebesgue decomposition of `μ` against a splitting measure `λ` on truncated
//! GNS spaces.
//!
//! With `σ = μ + λ`, the co-embedding `E: H²(σ) → H²(λ)` is a contraction and
//! `T = E*E` represents `⟨·,·⟩_λ` inside `H²(σ)`. The absolutely continuous part
//! is read off the derivative `D = Q_ac (I − T) Q_ac`, where `Q_s` projects onto
//! the (numerical) kernel of `E`. Moments come from the class of the constant:
//! `μ_ac(L^γ) = ⟨1, D L^γ⟩_σ` and `μ_s = μ − μ_ac`.
//!
//! At finite degree the kernel of `E` is only approximate: directions carried by
//! a singular part of `μ` have small but nonzero `λ`-length. The cutoff on the
//! spectrum of `T` therefore scales with the degree (see [`DecomposeConfig`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gns::{coembed, cuntz_distance_of, CoEmbedding, GnsTruncation, CUNTZ_TOL, TOL_NULL};
use crate::linalg::{hermitian_eigen, max_abs, op_norm, CMat, C64};
use crate::measures::{NcMeasure, TOL_PSD};
use crate::words::{Word, WordIndex};

/// Tolerances and verdict thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecomposeConfig {
    /// PSD tolerance relative to the largest Gram eigenvalue.
    pub tol_psd: f64,
    /// Relative eigenvalue cutoff for Gram null spaces.
    pub tol_null: f64,
    /// Singular values of `E` below this are kernel at every degree.
    pub kernel_tol: f64,
    /// Eigenvalues of `E*E` below `kernel_slope · ‖E‖² / √(N+1)` are also kernel.
    pub kernel_slope: f64,
    /// Toeplitz residual bound for the `ac` verdict.
    pub ac_residual_tol: f64,
    /// Trace bound on `D` for the `singular` verdict.
    pub singular_trace_tol: f64,
    /// Cuntz distance bound for the Cuntz verdict on `λ`.
    pub cuntz_tol: f64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            tol_psd: TOL_PSD,
            tol_null: TOL_NULL,
            kernel_tol: 1e-8,
            kernel_slope: 0.25,
            ac_residual_tol: 1e-6,
            singular_trace_tol: 1e-6,
            cuntz_tol: CUNTZ_TOL,
        }
    }
}

impl DecomposeConfig {
    /// Eigenvalue cutoff on `T = E*E` at degree `N`.
    pub fn kernel_cutoff(&self, degree: usize, t_max: f64) -> f64 {
        (self.kernel_tol * self.kernel_tol)
            .max(self.kernel_slope * t_max / ((degree + 1) as f64).sqrt())
    }
}

/// All operators of the decomposition at one degree, in `σ`'s quotient basis.
#[derive(Clone, Debug)]
pub struct SimonState {
    degree: usize,
    sigma: GnsTruncation,
    lambda: GnsTruncation,
    coembedding: CoEmbedding,
    t_values: Vec<f64>,
    cutoff: f64,
    kernel_dim: usize,
    strict_kernel_dim: usize,
    q_s: CMat,
    derivative: CMat,
}

impl SimonState {
    pub fn new(
        mu: &NcMeasure,
        lambda: &NcMeasure,
        degree: usize,
        cfg: &DecomposeConfig,
    ) -> Result<Self> {
        if mu.d() != lambda.d() {
            return Err(Error::AlphabetMismatch {
                expected: mu.d(),
                found: lambda.d(),
            });
        }
        for m in [mu, lambda] {
            if m.budget() < degree {
                return Err(Error::DegreeOutOfBudget {
                    degree,
                    budget: m.budget(),
                });
            }
        }
        mu.gram(degree)?.spectrum(cfg.tol_psd)?;
        let sigma_measure = mu.add(lambda)?;
        if !(sigma_measure.total_mass() > 0.0) {
            return Err(Error::DegenerateMeasure {
                mass: sigma_measure.total_mass(),
            });
        }
        let sigma = GnsTruncation::build_with(&sigma_measure, degree, cfg.tol_psd, cfg.tol_null)?;
        let lambda_t = GnsTruncation::build_with(lambda, degree, cfg.tol_psd, cfg.tol_null)?;
        let coembedding = coembed(&sigma, &lambda_t)?;

        let t = CoEmbedding::gram_in(&sigma, &lambda_t);
        let (t_values, u) = hermitian_eigen(&t);
        let t_max = t_values.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = cfg.kernel_cutoff(degree, t_max);
        let strict = cfg.kernel_tol * cfg.kernel_tol;
        let kernel_dim = t_values.iter().filter(|&&s| s < cutoff).count();
        let strict_kernel_dim = t_values.iter().filter(|&&s| s < strict).count();

        let r = sigma.rank();
        let mut q_s = CMat::zeros(r, r);
        let mut derivative = CMat::zeros(r, r);
        for (k, &s) in t_values.iter().enumerate() {
            let col = u.column(k);
            let proj = col * col.adjoint();
            if s < cutoff {
                q_s += proj;
            } else {
                derivative += proj * C64::new(1.0 - s, 0.0);
            }
        }
        Ok(SimonState {
            degree,
            sigma,
            lambda: lambda_t,
            coembedding,
            t_values,
            cutoff,
            kernel_dim,
            strict_kernel_dim,
            q_s,
            derivative,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sigma(&self) -> &GnsTruncation {
        &self.sigma
    }

    pub fn lambda(&self) -> &GnsTruncation {
        &self.lambda
    }

    pub fn coembedding(&self) -> &CoEmbedding {
        &self.coembedding
    }

    /// Eigenvalues of `E*E`, decreasing (squared singular values of `E`).
    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Dimension of the numerical kernel used for `Q_s`.
    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    /// Count of singular values of `E` below `kernel_tol` alone.
    pub fn strict_kernel_dim(&self) -> usize {
        self.strict_kernel_dim
    }

    /// Smallest singular value of `E` outside the kernel.
    pub fn smallest_nonzero_singular(&self) -> Option<f64> {
        self.t_values
            .iter()
            .rev()
            .find(|&&s| s >= self.cutoff)
            .map(|&s| s.max(0.0).sqrt())
    }

    pub fn q_s(&self) -> &CMat {
        &self.q_s
    }

    pub fn q_ac(&self) -> CMat {
        CMat::identity(self.q_s.nrows(), self.q_s.ncols()) - &self.q_s
    }

    /// `D = Q_ac (I − E*E) Q_ac`.
    pub fn derivative(&self) -> &CMat {
        &self.derivative
    }

    pub fn trace_d(&self) -> f64 {
        self.derivative.trace().re
    }

    /// `F[α,β] = ⟨L^α, D L^β⟩_σ` over all words of length `<= N`.
    pub fn form(&self) -> CMat {
        let phi = self.sigma.coords();
        crate::linalg::hermitian_part(&(phi.adjoint() * &self.derivative * phi))
    }

    /// `max_ij ‖Π_i* D Π_j − δ_ij D‖` on the degree `N−1` classes.
    pub fn toeplitz_residual(&self) -> Result<f64> {
        toeplitz_residual_of(self, &self.form())
    }
}

fn toeplitz_residual_of(state: &SimonState, form: &CMat) -> Result<f64> {
    if state.degree < 1 {
        return Err(Error::DegreeOutOfBudget {
            degree: 1,
            budget: 0,
        });
    }
    let lower = state.sigma.restrict(state.degree - 1)?;
    let idx = state.sigma.index();
    let n_low = lower.index().len();
    let b = lower.basis();
    let d = idx.d();
    let prep: Vec<Vec<usize>> = (1..=d)
        .map(|k| {
            (0..n_low)
                .map(|a| idx.prepend(k, a).expect("degree N-1 prepend"))
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let r = CMat::from_fn(n_low, n_low, |a, c| {
                let v = form[(prep[i][a], prep[j][c])];
                if i == j {
                    v - form[(a, c)]
                } else {
                    v
                }
            });
            worst = worst.max(op_norm(&(b.adjoint() * r * b)));
        }
    }
    Ok(worst)
}

/// `toeplitz_residual` on a state, requiring `N >= 2`.
pub fn toeplitz_residual(state: &SimonState) -> Result<f64> {
    if state.degree < 2 {
        return Err(Error::DegreeOutOfBudget {
            degree: 2,
            budget: state.degree,
        });
    }
    state.toeplitz_residual()
}

/// Moment tables and Grams of `μ_ac` and `μ_s` at one degree.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub d: usize,
    pub degree: usize,
    pub moments_mu: Vec<C64>,
    pub moments_ac: Vec<C64>,
    pub moments_s: Vec<C64>,
    pub gram_mu: CMat,
    pub gram_ac: CMat,
    pub gram_s: CMat,
    pub toeplitz_residual: Option<f64>,
    pub cuntz_distance_lambda: Option<f64>,
    pub kernel_dim: usize,
    pub strict_kernel_dim: usize,
    pub smallest_nonzero_singular: Option<f64>,
    pub coembedding_norm: f64,
    pub trace_d: f64,
    pub sigma_rank: usize,
    pub mu_rank: usize,
    pub lambda_rank: usize,
    /// Per-degree traces; filled by [`decompose_report`].
    pub convergence: Vec<ConvergenceStep>,
}

impl DecompositionResult {
    fn index(&self) -> WordIndex {
        WordIndex::new(self.d, self.degree).expect("validated at construction")
    }

    fn lookup(&self, table: &[C64], w: &Word) -> Result<C64> {
        match self.index().index_of(w) {
            Some(i) => Ok(table[i]),
            None => Err(Error::OutOfBudget {
                word: w.clone(),
                len: w.len(),
                budget: self.degree,
            }),
        }
    }

    pub fn moment_ac(&self, w: &Word) -> Result<C64> {
        self.lookup(&self.moments_ac, w)
    }

    pub fn moment_s(&self, w: &Word) -> Result<C64> {
        self.lookup(&self.moments_s, w)
    }

    /// `μ_ac` as a measure (moment table up to the result degree).
    pub fn ac_measure(&self) -> Result<NcMeasure> {
        NcMeasure::from_moments(
            self.d,
            self.degree,
            self.moments_ac.clone(),
            crate::measures::Generator::Residual,
        )
    }

    pub fn singular_measure(&self) -> Result<NcMeasure> {
        NcMeasure::from_moments(
            self.d,
            self.degree,
            self.moments_s.clone(),
            crate::measures::Generator::Residual,
        )
    }

    /// Smallest eigenvalues of `gram_ac` and `gram_s`, and the scale
    /// (largest eigenvalue of `μ`'s Gram) they are measured against.
    pub fn positivity(&self) -> Positivity {
        let smallest = |m: &CMat| hermitian_eigen(m).0.last().copied().unwrap_or(0.0);
        let scale = hermitian_eigen(&self.gram_mu)
            .0
            .first()
            .copied()
            .unwrap_or(0.0);
        Positivity {
            min_ac: smallest(&self.gram_ac),
            min_s: smallest(&self.gram_s),
            scale,
        }
    }

    /// Largest `|μ_ac + μ_s − μ|` over the table.
    pub fn additivity_defect(&self) -> f64 {
        self.moments_mu
            .iter()
            .zip(self.moments_ac.iter().zip(&self.moments_s))
            .map(|(m, (a, s))| (a + s - m).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|μ_ac + μ_s − μ|` in units of `ε·max(|μ_ac|, |μ_s|)`.
    /// Zero except where `μ(γ)` is finer than the spacing of the parts, so
    /// that no exact split is representable; it never exceeds 1.
    pub fn additivity_ulps(&self) -> f64 {
        self.moments_mu
            .iter()
            .zip(self.moments_ac.iter().zip(&self.moments_s))
            .map(|(m, (a, s))| {
                let d = (a + s - m).norm();
                if d == 0.0 {
                    0.0
                } else {
                    d / (f64::EPSILON * a.norm().max(s.norm()))
                }
            })
            .fold(0.0, f64::max)
    }

    /// `‖gram_ac + gram_s − gram_μ‖_max`.
    pub fn gram_additivity_defect(&self) -> f64 {
        max_abs(&(&self.gram_ac + &self.gram_s - &self.gram_mu))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Positivity {
    pub min_ac: f64,
    pub min_s: f64,
    pub scale: f64,
}

impl Positivity {
    /// Both Grams PSD within `tol · max(scale, 1e-300)`.
    pub fn holds(&self, tol: f64) -> bool {
        let floor = -tol * self.scale.max(f64::MIN_POSITIVE);
        self.min_ac >= floor && self.min_s >= floor
    }
}

pub fn simon_decompose(
    mu: &NcMeasure,
    lambda: &NcMeasure,
    degree: usize,
) -> Result<DecompositionResult> {
    simon_decompose_with(mu, lambda, degree, &DecomposeConfig::default())
}

pub fn simon_decompose_with(
    mu: &NcMeasure,
    lambda: &NcMeasure,
    degree: usize,
    cfg: &DecomposeConfig,
) -> Result<DecompositionResult> {
    let state = SimonState::new(mu, lambda, degree, cfg)?;
    result_from_state(mu, &state)
}

/// `(a', s)` with `a' + s == m` in floating point and `a'` within a few ulps
/// of `a`; `s = m − a'` is the singular share.
fn exact_split(m: f64, a: f64) -> (f64, f64) {
    let s = m - a;
    if a + s == m {
        return (a, s);
    }
    let a2 = m - s;
    if a2 + s == m {
        return (a2, s);
    }
    // walk `s` a few ulps; `a + s` is monotone in `s`
    let step = |x: f64, up: bool| {
        if x == 0.0 {
            return if up {
                f64::from_bits(1)
            } else {
                -f64::from_bits(1)
            };
        }
        let bits = x.to_bits();
        f64::from_bits(if (x > 0.0) == up { bits + 1 } else { bits - 1 })
    };
    let mut t = s;
    for _ in 0..8 {
        t = step(t, a + t < m);
        if a + t == m {
            return (a, t);
        }
    }
    (a, s)
}

fn result_from_state(mu: &NcMeasure, state: &SimonState) -> Result<DecompositionResult> {
    let degree = state.degree;
    let form = state.form();
    let n = form.nrows();
    let moments_mu = mu.moments()[..n].to_vec();
    let (moments_ac, moments_s): (Vec<C64>, Vec<C64>) = moments_mu
        .iter()
        .enumerate()
        .map(|(g, m)| {
            let a = form[(0, g)];
            let (ar, sr) = exact_split(m.re, a.re);
            let (ai, si) = exact_split(m.im, a.im);
            (C64::new(ar, ai), C64::new(sr, si))
        })
        .unzip();
    let mu_gram = mu.gram(degree)?;
    let gram_mu = mu_gram.entries().clone();
    let gram_s = &gram_mu - &form;
    let toeplitz_residual = if degree >= 1 {
        Some(toeplitz_residual_of(state, &form)?)
    } else {
        None
    };
    let cuntz_distance_lambda = if degree >= 1 && state.lambda.mass() > 0.0 {
        Some(cuntz_distance_of(&state.lambda)?)
    } else {
        None
    };
    let mu_rank = GnsTruncation::from_gram(mu_gram, f64::INFINITY, state.sigma.tol_null())?.rank();
    Ok(DecompositionResult {
        d: mu.d(),
        degree,
        moments_mu,
        moments_ac,
        moments_s,
        gram_mu,
        gram_ac: form,
        gram_s,
        toeplitz_residual,
        cuntz_distance_lambda,
        kernel_dim: state.kernel_dim,
        strict_kernel_dim: state.strict_kernel_dim,
        smallest_nonzero_singular: state.smallest_nonzero_singular(),
        coembedding_norm: state.coembedding.norm(),
        trace_d: state.trace_d(),
        sigma_rank: state.sigma.rank(),
        mu_rank,
        lambda_rank: state.lambda.rank(),
        convergence: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ac,
    Singular,
    Mixed,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Ac => "ac",
            Verdict::Singular => "singular",
            Verdict::Mixed => "mixed",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Diagnostics at one ladder degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub degree: usize,
    pub kernel_dim: usize,
    pub strict_kernel_dim: usize,
    pub smallest_nonzero_singular: Option<f64>,
    pub coembedding_norm: f64,
    pub toeplitz_residual: Option<f64>,
    pub cuntz_distance_lambda: Option<f64>,
    pub trace_d: f64,
    /// Largest moment change of `μ_ac` against the previous ladder degree.
    pub max_moment_change: Option<f64>,
}

/// Decompositions along a ladder; `result` is the top degree.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub ladder: Vec<usize>,
    pub per_degree: Vec<DecompositionResult>,
    pub verdict: Verdict,
}

impl DecompositionReport {
    pub fn result(&self) -> &DecompositionResult {
        self.per_degree.last().expect("ladder is nonempty")
    }

    pub fn steps(&self) -> &[ConvergenceStep] {
        &self.result().convergence
    }
}

pub fn validate_ladder(ladder: &[usize], min_len: usize) -> Result<()> {
    if ladder.len() < min_len {
        return Err(Error::InvalidLadder(format!(
            "need at least {min_len} degrees, got {}",
            ladder.len()
        )));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidLadder(format!(
            "{ladder:?} is not strictly increasing"
        )));
    }
    Ok(())
}

pub fn decompose_report(
    mu: &NcMeasure,
    lambda: &NcMeasure,
    ladder: &[usize],
    cfg: &DecomposeConfig,
) -> Result<DecompositionReport> {
    validate_ladder(ladder, 1)?;
    let run = |&n: &usize| simon_decompose_with(mu, lambda, n, cfg);
    let mut per_degree: Vec<DecompositionResult> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            ladder.par_iter().map(run).collect::<Result<Vec<_>>>()?
        }
        #[cfg(not(feature = "parallel"))]
        {
            ladder.iter().map(run).collect::<Result<Vec<_>>>()?
        }
    };
    let mut steps = Vec::with_capacity(per_degree.len());
    for (k, r) in per_degree.iter().enumerate() {
        let max_moment_change = (k > 0).then(|| {
            let prev = &per_degree[k - 1].moments_ac;
            prev.iter()
                .zip(&r.moments_ac)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        });
        steps.push(ConvergenceStep {
            degree: r.degree,
            kernel_dim: r.kernel_dim,
            strict_kernel_dim: r.strict_kernel_dim,
            smallest_nonzero_singular: r.smallest_nonzero_singular,
            coembedding_norm: r.coembedding_norm,
            toeplitz_residual: r.toeplitz_residual,
            cuntz_distance_lambda: r.cuntz_distance_lambda,
            trace_d: r.trace_d,
            max_moment_change,
        });
    }
    let verdict = verdict_of(&steps, cfg);
    per_degree.last_mut().expect("nonempty").convergence = steps;
    Ok(DecompositionReport {
        ladder: ladder.to_vec(),
        per_degree,
        verdict,
    })
}

/// `ac`: trivial kernel at every degree and small top residual.
/// `singular`: `tr D` at the top degree below tolerance.
/// `mixed`: nonzero kernel and non-negligible `D`.
fn verdict_of(steps: &[ConvergenceStep], cfg: &DecomposeConfig) -> Verdict {
    let top = steps.last().expect("nonempty");
    let kernel_free = steps.iter().all(|s| s.kernel_dim == 0);
    let residual_ok = top
        .toeplitz_residual
        .is_some_and(|r| r < cfg.ac_residual_tol);
    if kernel_free && residual_ok {
        Verdict::Ac
    } else if top.trace_d < cfg.singular_trace_tol {
        Verdict::Singular
    } else if top.kernel_dim > 0 {
        Verdict::Mixed
    } else {
        Verdict::Inconclusive
    }
}

/// Verdict plus the per-degree traces it was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct AcDetection {
    pub steps: Vec<ConvergenceStep>,
    pub verdict: Verdict,
}

pub fn ac_detect(
    mu: &NcMeasure,
    lambda: &NcMeasure,
    ladder: &[usize],
    cfg: &DecomposeConfig,
) -> Result<AcDetection> {
    validate_ladder(ladder, 3)?;
    let report = decompose_report(mu, lambda, ladder, cfg)?;
    Ok(AcDetection {
        steps: report.steps().to_vec(),
        verdict: report.verdict,
    })
}

/// Largest `|a − b|` between two moment tables over their common prefix.
pub fn moment_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
