use clap::{Args, ValueEnum};
use serde::Serialize;

use ncmeasure::decompose::DecomposeConfig;
use ncmeasure::{Error, Result};

/// Largest number of words a Gram matrix may index.
const MAX_WORDS: usize = 511;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Args, Serialize)]
pub struct RunConfig {
    /// Truncation degrees, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6", global = true)]
    pub degree_ladder: Vec<usize>,

    /// PSD tolerance relative to the largest Gram eigenvalue.
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol_psd: f64,

    /// Relative eigenvalue cutoff for Gram null spaces.
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol_null: f64,

    /// Singular values of the co-embedding below this are kernel.
    #[arg(long, default_value_t = 1e-8, global = true)]
    pub kernel_tol: f64,

    /// Degree-scaled kernel cutoff: eigenvalues of E*E below slope·‖E‖²/√(N+1).
    #[arg(long, default_value_t = 0.25, global = true)]
    pub kernel_slope: f64,

    /// Toeplitz residual bound for the `ac` verdict.
    #[arg(long, default_value_t = 1e-6, global = true)]
    pub ac_residual_tol: f64,

    /// Trace bound on the derivative for the `singular` verdict.
    #[arg(long, default_value_t = 1e-6, global = true)]
    pub singular_trace_tol: f64,

    /// Distance bound for the heuristic Cuntz verdict.
    #[arg(long, default_value_t = 1e-6, global = true)]
    pub cuntz_tol: f64,

    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,

    /// Seed for random matrix points.
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = DecomposeConfig::default();
        RunConfig {
            degree_ladder: vec![2, 4, 6],
            tol_psd: d.tol_psd,
            tol_null: d.tol_null,
            kernel_tol: d.kernel_tol,
            kernel_slope: d.kernel_slope,
            ac_residual_tol: d.ac_residual_tol,
            singular_trace_tol: d.singular_trace_tol,
            cuntz_tol: d.cuntz_tol,
            format: Format::Json,
            seed: 42,
        }
    }
}

/// Highest admissible ladder degree for `d` letters.
pub fn degree_cap(d: usize) -> usize {
    match d {
        1 => 128,
        2 => 8,
        _ => {
            let mut n = 0;
            while ncmeasure::WordIndex::new(d, n + 1).is_ok_and(|i| i.len() <= MAX_WORDS) {
                n += 1;
            }
            n
        }
    }
}

impl RunConfig {
    pub fn decompose_config(&self) -> DecomposeConfig {
        DecomposeConfig {
            tol_psd: self.tol_psd,
            tol_null: self.tol_null,
            kernel_tol: self.kernel_tol,
            kernel_slope: self.kernel_slope,
            ac_residual_tol: self.ac_residual_tol,
            singular_trace_tol: self.singular_trace_tol,
            cuntz_tol: self.cuntz_tol,
        }
    }

    pub fn top_degree(&self) -> usize {
        self.degree_ladder.last().copied().unwrap_or(0)
    }

    pub fn validate(&self, d: usize, min_len: usize) -> Result<()> {
        ncmeasure::decompose::validate_ladder(&self.degree_ladder, min_len)?;
        let cap = degree_cap(d);
        if self.top_degree() > cap {
            return Err(Error::InvalidLadder(format!(
                "degree {} exceeds the cap {cap} for d = {d}",
                self.top_degree()
            )));
        }
        for (name, v) in [
            ("tol-psd", self.tol_psd),
            ("tol-null", self.tol_null),
            ("kernel-tol", self.kernel_tol),
            ("kernel-slope", self.kernel_slope),
            ("ac-residual-tol", self.ac_residual_tol),
            ("singular-trace-tol", self.singular_trace_tol),
            ("cuntz-tol", self.cuntz_tol),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parse(format!(
                    "--{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}
