//! Herglotz, Cauchy, Szegő and μ-kernels at matrix points of the row ball.
//!
//! All word sums are truncated at a degree `N` and returned together with a
//! bound on the operator norm of the discarded tail and an a-priori bound on
//! the floating-point error of the computed partial sum.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMat, C64, ONE, ZERO};
use crate::measures::NcMeasure;
use crate::words::{Word, WordIndex};

/// A `d`-tuple of `n × n` matrices with `‖Z‖_row < 1`.
#[derive(Clone, Debug)]
pub struct MatrixPoint {
    mats: Vec<CMat>,
    row_norm: f64,
}

impl MatrixPoint {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let n = mats[0].nrows();
        if mats.iter().any(|z| z.nrows() != n || z.ncols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix point components must all be {n}×{n}"
            )));
        }
        let row_norm = row_norm(&mats);
        if !(row_norm < 1.0) {
            return Err(Error::OutsideRowBall { norm: row_norm });
        }
        Ok(MatrixPoint { mats, row_norm })
    }

    /// Scalar point `(z_1, .., z_d)` with `n = 1`.
    pub fn scalars(zs: &[C64]) -> Result<Self> {
        Self::new(zs.iter().map(|&z| CMat::from_element(1, 1, z)).collect())
    }

    /// Random point with row norm drawn uniformly from `[0, max_radius)`.
    pub fn random<R: Rng + ?Sized>(
        d: usize,
        n: usize,
        max_radius: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mats: Vec<CMat> = (0..d)
            .map(|_| {
                CMat::from_fn(n, n, |_, _| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            })
            .collect();
        let current = row_norm(&mats);
        let target = max_radius * rng.gen::<f64>();
        let s = if current > 0.0 { target / current } else { 0.0 };
        Self::new(mats.into_iter().map(|z| z.scale(s)).collect())
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn components(&self) -> &[CMat] {
        &self.mats
    }

    pub fn row_norm(&self) -> f64 {
        self.row_norm
    }

    /// `Z^α` for every word in `index`, with `Z^{kα} = Z_k Z^α`, and the
    /// majorants `Π ‖Z_{α_i}‖ >= ‖Z^α‖`.
    fn powers(&self, index: &WordIndex) -> (Vec<CMat>, Vec<f64>) {
        let n = self.n();
        let norms: Vec<f64> = self.mats.iter().map(op_norm).collect();
        let mut out = vec![CMat::zeros(n, n); index.len()];
        let mut majorants = vec![0.0; index.len()];
        out[0] = CMat::identity(n, n);
        majorants[0] = 1.0;
        for j in 0..index.count_below(index.degree()) {
            for k in 1..=self.d() {
                let target = index.prepend(k, j).expect("prepend stays within degree");
                out[target] = &self.mats[k - 1] * &out[j];
                majorants[target] = norms[k - 1] * majorants[j];
            }
        }
        (out, majorants)
    }
}

/// `‖Σ Z_j Z_j*‖^{1/2}`.
pub fn row_norm(mats: &[CMat]) -> f64 {
    let n = mats.first().map_or(0, |z| z.nrows());
    let mut s = CMat::zeros(n, n);
    for z in mats {
        s += z * z.adjoint();
    }
    op_norm(&s).sqrt()
}

#[derive(Clone, Debug)]
pub struct TransformValue {
    pub value: CMat,
    /// Operator-norm bound on the terms beyond degree `N`.
    pub tail_bound: f64,
    /// Bound on the floating-point error of `value` against the exact
    /// degree-`N` partial sum.
    pub rounding_bound: f64,
}

impl TransformValue {
    /// Bound on `‖value − exact transform‖`.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// Standard bound for a sum of `terms` products, each formed from `depth`
/// `n × n` multiplications: `4ε (n·depth + terms + 2) · Σ |c_α| ‖Z^α‖`.
fn rounding(n: usize, depth: usize, terms: usize, weight: f64) -> f64 {
    4.0 * f64::EPSILON * (n * depth + terms + 2) as f64 * weight
}

fn check_alphabet(mu: &NcMeasure, z: &MatrixPoint) -> Result<()> {
    if mu.d() != z.d() {
        return Err(Error::AlphabetMismatch {
            expected: mu.d(),
            found: z.d(),
        });
    }
    Ok(())
}

fn geometric_tail(r: f64, degree: usize) -> f64 {
    r.powi(degree as i32 + 1) / (1.0 - r)
}

/// `M = √(μ(1)·‖gram(μ,1)‖)`, a majorant for every `|μ(L^α)|`.
fn moment_majorant(mu: &NcMeasure) -> Result<f64> {
    let g = mu.gram(1.min(mu.budget()))?;
    Ok((mu.total_mass() * op_norm(g.entries())).sqrt())
}

/// `H_μ(Z) = μ(1) I + 2 Σ_{1 <= |α| <= N} Z^α conj(μ(L^α))`.
pub fn herglotz(mu: &NcMeasure, z: &MatrixPoint, degree: usize) -> Result<TransformValue> {
    check_alphabet(mu, z)?;
    if degree > mu.budget() {
        return Err(Error::DegreeOutOfBudget {
            degree,
            budget: mu.budget(),
        });
    }
    let index = WordIndex::new(mu.d(), degree)?;
    let (powers, majorants) = z.powers(&index);
    let moments = mu.moments();
    let mut value = CMat::identity(z.n(), z.n()).scale(mu.total_mass());
    let mut weight = mu.total_mass();
    for (i, p) in powers.iter().enumerate().skip(1) {
        let c = moments[i].conj();
        if c != ZERO {
            value += p * (c * 2.0);
            weight += 2.0 * c.norm() * majorants[i];
        }
    }
    let tail_bound = 2.0 * moment_majorant(mu)? * geometric_tail(z.row_norm(), degree);
    Ok(TransformValue {
        value,
        tail_bound,
        rounding_bound: rounding(z.n(), degree, index.len(), weight),
    })
}

/// `𝒞_μ(p)(Z) = Σ_{|α| <= N} Z^α μ(L^{α*} p(L))` for a free polynomial `p`.
pub fn cauchy(
    mu: &NcMeasure,
    p: &[(Word, C64)],
    z: &MatrixPoint,
    degree: usize,
) -> Result<TransformValue> {
    check_alphabet(mu, z)?;
    let index = WordIndex::new(mu.d(), degree)?;
    let (powers, majorants) = z.powers(&index);
    let mut value = CMat::zeros(z.n(), z.n());
    let mut weight = 0.0;
    for (i, alpha) in index.words().enumerate() {
        let mut c = ZERO;
        let mut c_abs = 0.0;
        for (beta, coeff) in p {
            let m = mu.sesquimoment(&alpha, beta)?;
            c += coeff * m;
            c_abs += coeff.norm() * m.norm();
        }
        if c != ZERO {
            value += &powers[i] * c;
            weight += c_abs * majorants[i];
        }
    }
    let p_norm: f64 = p.iter().map(|(_, v)| v.norm()).sum();
    let tail_bound = moment_majorant(mu)? * p_norm * geometric_tail(z.row_norm(), degree);
    Ok(TransformValue {
        value,
        tail_bound,
        rounding_bound: rounding(z.n(), degree, index.len() + p.len(), weight),
    })
}

/// `K(Z,W)[A] = Σ_{|α| <= N} Z^α A (W^α)*`, summed level by level.
pub fn szego_kernel(
    z: &MatrixPoint,
    w: &MatrixPoint,
    a: &CMat,
    degree: usize,
) -> Result<TransformValue> {
    if z.d() != w.d() {
        return Err(Error::AlphabetMismatch {
            expected: z.d(),
            found: w.d(),
        });
    }
    if a.nrows() != z.n() || a.ncols() != w.n() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}×{}, expected {}×{}",
            a.nrows(),
            a.ncols(),
            z.n(),
            w.n()
        )));
    }
    let mut level = a.clone();
    let mut value = a.clone();
    // Each level map has norm <= Σ ‖Z_j‖‖W_j‖, which majorizes the rounding
    // carried forward from earlier levels.
    let step: f64 = z
        .components()
        .iter()
        .zip(w.components())
        .map(|(zi, wi)| op_norm(zi) * op_norm(wi))
        .sum();
    let mut weight = op_norm(a);
    let mut level_weight = weight;
    for _ in 0..degree {
        let mut next = CMat::zeros(a.nrows(), a.ncols());
        for (zi, wi) in z.components().iter().zip(w.components()) {
            next += zi * &level * wi.adjoint();
        }
        value += &next;
        level = next;
        level_weight *= step;
        weight += level_weight;
    }
    let r = z.row_norm() * w.row_norm();
    let tail_bound = op_norm(a) * geometric_tail(r, degree);
    let n = z.n().max(w.n());
    Ok(TransformValue {
        value,
        tail_bound,
        rounding_bound: rounding(n, 2 * degree + z.d(), degree + 1, weight),
    })
}

/// `½[H_μ(Z) K(Z,W)[A] + K(Z,W)[A] H_μ(W)*]`, evaluated as displayed.
pub fn mu_kernel(
    mu: &NcMeasure,
    z: &MatrixPoint,
    w: &MatrixPoint,
    a: &CMat,
    degree: usize,
) -> Result<TransformValue> {
    let hz = herglotz(mu, z, degree)?;
    let hw = herglotz(mu, w, degree)?;
    let k = szego_kernel(z, w, a, degree)?;
    let value = (&hz.value * &k.value + &k.value * hw.value.adjoint()).scale(0.5);
    let k_norm = op_norm(&k.value);
    let (hz_norm, hw_norm) = (op_norm(&hz.value), op_norm(&hw.value));
    let left = hz.tail_bound * (k_norm + k.tail_bound) + hz_norm * k.tail_bound;
    let right = hw.tail_bound * (k_norm + k.tail_bound) + hw_norm * k.tail_bound;
    let k_err = k.rounding_bound;
    let round_left = hz.rounding_bound * (k_norm + k_err) + hz_norm * k_err;
    let round_right = hw.rounding_bound * (k_norm + k_err) + hw_norm * k_err;
    let products = rounding(z.n().max(w.n()), 1, 2, (hz_norm + hw_norm) * k_norm);
    Ok(TransformValue {
        value,
        tail_bound: 0.5 * (left + right),
        rounding_bound: 0.5 * (round_left + round_right) + products,
    })
}

/// Coefficient table `β ↦ μ(L^{γ*} L^β)` over all `|β| <= N`, graded-lex order.
pub fn coefficient_kernel(mu: &NcMeasure, gamma: &Word, degree: usize) -> Result<Vec<C64>> {
    let index = WordIndex::new(mu.d(), degree)?;
    index
        .words()
        .map(|beta| mu.sesquimoment(gamma, &beta))
        .collect()
}

/// Scalar polynomial `1` as a coefficient table.
pub fn unit_polynomial() -> Vec<(Word, C64)> {
    vec![(Word::empty(), ONE)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{Atom, ClassicalSpec};
    use crate::linalg::{c, max_abs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn dirac(angle: f64, budget: usize) -> NcMeasure {
        NcMeasure::classical(
            &ClassicalSpec::atoms(vec![Atom { angle, weight: 1.0 }]),
            budget,
        )
        .unwrap()
    }

    fn scalar(z: C64) -> MatrixPoint {
        MatrixPoint::scalars(&[z]).unwrap()
    }

    #[test]
    fn lebesgue_herglotz_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = NcMeasure::lebesgue(2, 5).unwrap();
        let z = MatrixPoint::random(2, 3, 0.9, &mut rng).unwrap();
        let h = herglotz(&m, &z, 5).unwrap();
        assert_eq!(h.value, CMat::identity(3, 3));
    }

    #[test]
    fn dirac_herglotz_at_half() {
        let h = herglotz(&dirac(0.0, 40), &scalar(c(0.5, 0.0)), 40).unwrap();
        let err = (h.value[(0, 0)] - c(3.0, 0.0)).norm();
        assert!(err <= h.tail_bound && err < 1e-10, "{err} {}", h.tail_bound);
        let h = herglotz(&dirac(PI, 40), &scalar(c(0.5, 0.0)), 40).unwrap();
        assert!((h.value[(0, 0)] - c(1.0 / 3.0, 0.0)).norm() <= h.tail_bound);
    }

    #[test]
    fn rejects_points_outside_ball() {
        assert!(matches!(
            MatrixPoint::scalars(&[c(0.8, 0.0), c(0.7, 0.0)]),
            Err(Error::OutsideRowBall { .. })
        ));
    }

    #[test]
    fn cauchy_examples() {
        let m = NcMeasure::lebesgue(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = MatrixPoint::random(2, 2, 0.7, &mut rng).unwrap();
        let v = cauchy(&m, &unit_polynomial(), &z, 4).unwrap();
        assert!(max_abs(&(v.value - CMat::identity(2, 2))) < 1e-15);

        let p = vec![(Word::power(1), ONE)];
        let v = cauchy(&dirac(0.0, 60), &p, &scalar(c(0.3, 0.0)), 60).unwrap();
        let err = (v.value[(0, 0)] - c(1.0 / 0.7, 0.0)).norm();
        assert!(err <= v.error_bound());
    }

    #[test]
    fn szego_examples() {
        let zero = scalar(ZERO);
        let a = CMat::from_element(1, 1, c(2.0, -1.0));
        assert_eq!(szego_kernel(&zero, &zero, &a, 5).unwrap().value, a);

        let z = MatrixPoint::scalars(&[c(0.3, 0.0), c(0.4, 0.0)]).unwrap();
        let one = CMat::identity(1, 1);
        let k = szego_kernel(&z, &z, &one, 6).unwrap();
        let partial: f64 = (0..=6).map(|j| 0.25f64.powi(j)).sum();
        assert!((k.value[(0, 0)].re - partial).abs() < 1e-14);
        assert!((k.value[(0, 0)].re - 1.0 / 0.75).abs() <= k.tail_bound);
    }

    #[test]
    fn mu_kernel_of_dirac_at_w_zero() {
        let z = scalar(c(0.4, 0.2));
        let w = scalar(ZERO);
        let k = mu_kernel(&dirac(0.0, 60), &z, &w, &CMat::identity(1, 1), 60).unwrap();
        let expected = ONE / (ONE - c(0.4, 0.2));
        assert!((k.value[(0, 0)] - expected).norm() <= k.error_bound());
    }

    #[test]
    fn coefficient_kernel_tables() {
        let m = NcMeasure::lebesgue(2, 3).unwrap();
        let t = coefficient_kernel(&m, &Word::empty(), 3).unwrap();
        assert_eq!(t[0], ONE);
        assert!(t[1..].iter().all(|&v| v == ZERO));
        let two = NcMeasure::classical(
            &ClassicalSpec::atoms(vec![
                Atom {
                    angle: 0.0,
                    weight: 1.0,
                },
                Atom {
                    angle: PI,
                    weight: 1.0,
                },
            ]),
            6,
        )
        .unwrap();
        let t = coefficient_kernel(&two, &Word::empty(), 6).unwrap();
        for (b, v) in t.iter().enumerate() {
            assert!((v - (ONE + C64::from_polar(1.0, b as f64 * PI))).norm() < 1e-14);
        }
    }
}
