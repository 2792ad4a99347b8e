//! Evaluation points for `transform`.
//!
//! ```json
//! {"points": [{"scalars": [[0.5, 0.0]]},
//!             {"matrices": [[[[0.1, 0.0], [0.2, 0.0]], [[0.0, 0.0], [0.3, 0.1]]]]}],
//!  "random": {"count": 4, "n": 2, "max_radius": 0.7},
//!  "polynomial": [{"word": [], "coeff": [1.0, 0.0]}]}
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use ncmeasure::specfile::WeightedTerm;
use ncmeasure::{CMat, Error, MatrixPoint, Result, Word, C64};

/// Largest matrix size accepted for a point.
pub const MAX_POINT_SIZE: usize = 8;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub points: Vec<PointEntry>,
    #[serde(default)]
    pub random: Option<RandomPoints>,
    /// Polynomial for the Cauchy transform; `1` when absent.
    #[serde(default)]
    pub polynomial: Option<Vec<WeightedTerm>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointEntry {
    Scalars(Vec<[f64; 2]>),
    Matrices(Vec<Vec<Vec<[f64; 2]>>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPoints {
    pub count: usize,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "default_radius")]
    pub max_radius: f64,
}

fn one() -> usize {
    1
}

fn default_radius() -> f64 {
    0.7
}

pub fn parse(text: &str) -> Result<PointSpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("point spec: {e}")))
}

fn c(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl PointSpec {
    /// Explicit points followed by the seeded random ones.
    pub fn points(&self, d: usize, seed: u64) -> Result<Vec<MatrixPoint>> {
        let mut out = Vec::new();
        for (k, p) in self.points.iter().enumerate() {
            let mats = match p {
                PointEntry::Scalars(zs) => zs
                    .iter()
                    .map(|&z| CMat::from_element(1, 1, c(z)))
                    .collect::<Vec<_>>(),
                PointEntry::Matrices(ms) => ms
                    .iter()
                    .map(|rows| {
                        let n = rows.len();
                        if rows.iter().any(|r| r.len() != n) {
                            return Err(Error::Parse(format!(
                                "points[{k}]: matrices must be square"
                            )));
                        }
                        Ok(CMat::from_fn(n, n, |i, j| c(rows[i][j])))
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            if mats.len() != d {
                return Err(Error::AlphabetMismatch {
                    expected: d,
                    found: mats.len(),
                });
            }
            check_size(mats[0].nrows())?;
            out.push(MatrixPoint::new(mats)?);
        }
        if let Some(r) = &self.random {
            check_size(r.n)?;
            if !(r.max_radius > 0.0 && r.max_radius < 1.0) {
                return Err(Error::Parse(format!(
                    "random.max_radius must lie in (0, 1), got {}",
                    r.max_radius
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..r.count {
                out.push(MatrixPoint::random(d, r.n, r.max_radius, &mut rng)?);
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("point spec lists no points".into()));
        }
        Ok(out)
    }

    pub fn polynomial(&self, d: usize) -> Result<Vec<(Word, C64)>> {
        match &self.polynomial {
            None => Ok(ncmeasure::transforms::unit_polynomial()),
            Some(terms) => terms
                .iter()
                .map(|t| Ok((Word::with_alphabet(t.word.clone(), d)?, c(t.coeff))))
                .collect(),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_POINT_SIZE {
        return Err(Error::Parse(format!(
            "matrix points must be n×n with 1 <= n <= {MAX_POINT_SIZE}, got n = {n}"
        )));
    }
    Ok(())
}
