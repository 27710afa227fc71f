//! Batch checks behind `kexshard analyze` and the acceptance runner.

use serde::Serialize;

use crate::analysis::samplers::{diff_vector_columns, pad_bastion_columns, SigmaSource};
use crate::analysis::stats::{chi_square_uniform_on, chi_square_uniformity, ChiSquareReport};
use crate::error::{Error, Result};
use crate::matrix::column_equivalent;
use crate::transforms::{
    bastion_adversary_columns, bastion_reduced_view, mat_ssake, ssake_reduced_view,
};

/// Chi-square results for one sampled coordinate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordinateReport {
    pub label: String,
    /// Against all `2^bits` cells.
    pub full: ChiSquareReport,
    /// Against the nonzero cells only; `None` when zero was observed.
    pub nonzero: Option<ChiSquareReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub coordinates: Vec<CoordinateReport>,
}

impl UniformityReport {
    /// Every coordinate passes the full-support test.
    pub fn all_pass(&self) -> bool {
        self.coordinates.iter().all(|c| c.full.pass)
    }

    pub fn any_fail(&self) -> bool {
        self.coordinates.iter().any(|c| !c.full.pass)
    }
}

fn coordinate(label: String, samples: &[crate::block::Block], bits: u32) -> Result<CoordinateReport> {
    let full = chi_square_uniformity(samples, bits)?;
    let nonzero = if samples.iter().all(|b| b.0 != 0) {
        Some(chi_square_uniform_on(samples, bits, |x| x != 0)?)
    } else {
        None
    };
    Ok(CoordinateReport {
        label,
        full,
        nonzero,
    })
}

fn check_samples(bits: u32, samples: usize) -> Result<()> {
    let need = 50usize << bits;
    if samples < need {
        return Err(Error::InsufficientData { got: samples, need });
    }
    Ok(())
}

/// Uniformity of each coordinate of `Diff_r`.
pub fn prop1_check(bits: u32, c: usize, samples: usize, sigma: SigmaSource, seed: u64) -> Result<UniformityReport> {
    check_samples(bits, samples)?;
    let cols = diff_vector_columns(bits, c, samples, sigma, seed)?;
    let coordinates = cols
        .iter()
        .enumerate()
        .map(|(k, col)| coordinate(format!("i={}", k + 1), col, bits))
        .collect::<Result<_>>()?;
    Ok(UniformityReport { coordinates })
}

/// Uniformity of each coordinate of the reduced Bastion pad, over every
/// pair `s < t`.
pub fn prop4_check(bits: u32, c: usize, samples: usize, sigma: SigmaSource, seed: u64) -> Result<UniformityReport> {
    check_samples(bits, samples)?;
    let mut coordinates = Vec::new();
    let mut pair = 0u64;
    for t in 1..c {
        for s in 0..t {
            let cols = pad_bastion_columns(bits, c, s, t, samples, sigma, seed ^ (pair << 32))?;
            pair += 1;
            for (k, col) in cols.iter().enumerate() {
                coordinates.push(coordinate(format!("s={s},t={t},coord={k}"), col, bits)?);
            }
        }
    }
    Ok(UniformityReport { coordinates })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixReport {
    pub c: usize,
    pub ssake_reduction: bool,
    /// Pairs `(s, t)` whose reduced view is not column-equivalent.
    pub bastion_failures: Vec<(usize, usize)>,
    pub bastion_pairs: usize,
}

impl MatrixReport {
    pub fn pass(&self) -> bool {
        self.ssake_reduction && self.bastion_failures.is_empty()
    }
}

/// Column-equivalence of both reductions at block count `c`.
pub fn matrices_check(c: usize) -> Result<MatrixReport> {
    let ssake_reduction = column_equivalent(&mat_ssake(c)?, &ssake_reduced_view(c)?)?;
    let mut bastion_failures = Vec::new();
    let mut bastion_pairs = 0;
    if c >= 4 {
        for t in 1..c {
            for s in 0..t {
                bastion_pairs += 1;
                let view = bastion_adversary_columns(c, s, t)?;
                if !column_equivalent(&bastion_reduced_view(c, s, t)?, &view)? {
                    bastion_failures.push((s, t));
                }
            }
        }
    }
    Ok(MatrixReport {
        c,
        ssake_reduction,
        bastion_failures,
        bastion_pairs,
    })
}
