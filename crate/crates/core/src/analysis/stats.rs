//! Win-rate reports and Pearson chi-square uniformity tests.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::block::Block;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Negligible,
    NonNegligible,
}

/// Empirical success of an adversary over independent trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub wins: u64,
    pub trials: u64,
    pub win_rate: f64,
    pub standard_error: f64,
    /// `Negligible` iff `|win_rate - 0.5| <= 3 * standard_error`.
    pub verdict: Verdict,
}

impl AdvantageReport {
    pub fn from_counts(wins: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::contract("a report needs at least one trial"));
        }
        if wins > trials {
            return Err(Error::contract(format!("{wins} wins out of {trials} trials")));
        }
        let win_rate = wins as f64 / trials as f64;
        let standard_error = (win_rate * (1.0 - win_rate) / trials as f64).sqrt();
        let verdict = if (win_rate - 0.5).abs() <= 3.0 * standard_error {
            Verdict::Negligible
        } else {
            Verdict::NonNegligible
        };
        Ok(AdvantageReport {
            wins,
            trials,
            win_rate,
            standard_error,
            verdict,
        })
    }

    pub fn advantage(&self) -> f64 {
        self.win_rate - 0.5
    }

    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        format!(
            "wins={}\ntrials={}\nwinRate={:.6}\nstandardError={:.6}\nverdict={}\n",
            self.wins,
            self.trials,
            self.win_rate,
            self.standard_error,
            match self.verdict {
                Verdict::Negligible => "negligible",
                Verdict::NonNegligible => "non-negligible",
            }
        )
    }
}

/// Outcome of one Pearson test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: u64,
    /// 99% quantile of the chi-square law with `dof` degrees of freedom.
    pub critical: f64,
    pub p_value: f64,
    pub samples: u64,
    pub cells: u64,
    pub pass: bool,
}

/// Minimum expected count per cell.
pub const MIN_EXPECTED_PER_CELL: u64 = 50;

/// Pearson chi-square of `samples` against the uniform law on `2^bits` cells.
pub fn chi_square_uniformity(samples: &[Block], bits: u32) -> Result<ChiSquareReport> {
    chi_square_uniform_on(samples, bits, |_| true)
}

/// Pearson chi-square against the uniform law restricted to the cells where
/// `support` holds. Samples outside the support count toward the statistic
/// as an infinitely unlikely outcome, so the test fails.
pub fn chi_square_uniform_on(
    samples: &[Block],
    bits: u32,
    support: impl Fn(u128) -> bool,
) -> Result<ChiSquareReport> {
    if bits == 0 || bits > 24 {
        return Err(Error::contract(format!("chi-square needs 1..=24 bits, got {bits}")));
    }
    let size = 1usize << bits;
    let live: Vec<bool> = (0..size as u128).map(&support).collect();
    let cells = live.iter().filter(|&&b| b).count() as u64;
    if cells < 2 {
        return Err(Error::contract("chi-square needs at least two cells"));
    }
    let need = MIN_EXPECTED_PER_CELL as usize * cells as usize;
    if samples.len() < need {
        return Err(Error::InsufficientData {
            got: samples.len(),
            need,
        });
    }
    let mut counts = vec![0u64; size];
    for s in samples {
        if s.0 >= size as u128 {
            return Err(Error::WidthMismatch {
                left: bits,
                right: 128 - s.0.leading_zeros(),
            });
        }
        counts[s.0 as usize] += 1;
    }
    let dof = cells - 1;
    let law = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let critical = law.inverse_cdf(0.99);
    if counts.iter().zip(&live).any(|(&c, &l)| c > 0 && !l) {
        return Ok(ChiSquareReport {
            statistic: f64::INFINITY,
            dof,
            critical,
            p_value: 0.0,
            samples: samples.len() as u64,
            cells,
            pass: false,
        });
    }
    let expected = samples.len() as f64 / cells as f64;
    let statistic: f64 = counts
        .iter()
        .zip(&live)
        .filter(|(_, &l)| l)
        .map(|(&c, _)| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    Ok(ChiSquareReport {
        statistic,
        dof,
        critical,
        p_value: law.sf(statistic),
        samples: samples.len() as u64,
        cells,
        pass: statistic < critical,
    })
}
