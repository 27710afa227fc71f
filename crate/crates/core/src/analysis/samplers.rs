//! Samplers for the pads an exposed-key adversary faces.

use rand::RngCore;

use crate::block::{Block, BlockSpec};
use crate::cipher::{Permutation, ToyPermutation, XorTestCipher};
use crate::error::{Error, Result};
use crate::rng::DeterministicRng;
use crate::transforms::bastion_pivot;

fn check_indices(spec: BlockSpec, c: usize) -> Result<()> {
    if c == 0 || (c as u128) > spec.cardinality() {
        return Err(Error::contract(format!(
            "c = {c} indices do not fit a {}-bit block",
            spec.bits()
        )));
    }
    Ok(())
}

/// `σ(r) ⊕ σ(r ⊕ bin(i))` for `i = 1..c-1`, with `r` uniform.
pub fn sample_diff_vector(
    perm: &dyn Permutation,
    c: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<Block>> {
    let spec = perm.spec();
    check_indices(spec, c)?;
    let r = spec.random_block(rng);
    let base = perm.forward(r);
    Ok((1..c)
        .map(|i| base ^ perm.forward(Block(r.0 ^ i as u128)))
        .collect())
}

/// The Bastion pad seen by an adversary missing blocks `s < t`, reduced
/// around pivot `u` (smallest index outside `{s, t}`).
///
/// With `C_0` uniform and `E_i = E(C_0 ⊕ bin(i))` (index 0 contributing
/// `C_0` itself), the result is `[E_s ⊕ E_t ⊕ E_u]` followed by `E_u ⊕ E_i`
/// for each `i` outside `{s, t, u}` in ascending order.
pub fn sample_pad_bastion(
    perm: &dyn Permutation,
    c: usize,
    s: usize,
    t: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<Block>> {
    let spec = perm.spec();
    check_indices(spec, c)?;
    if c < 4 || s >= t || t >= c {
        return Err(Error::contract(format!(
            "need 0 <= s < t < c and c >= 4, got c={c}, s={s}, t={t}"
        )));
    }
    let c0 = spec.random_block(rng);
    let e = |i: usize| {
        if i == 0 {
            c0
        } else {
            perm.forward(Block(c0.0 ^ i as u128))
        }
    };
    let u = bastion_pivot(s, t);
    let eu = e(u);
    let mut out = Vec::with_capacity(c - 2);
    out.push(e(s) ^ e(t) ^ eu);
    out.extend(
        (0..c)
            .filter(|&i| i != s && i != t && i != u)
            .map(|i| eu ^ e(i)),
    );
    Ok(out)
}

/// Where each sample's permutation comes from.
#[derive(Clone, Copy, Debug)]
pub enum SigmaSource {
    /// A new uniformly shuffled table for every sample.
    FreshToy,
    /// The linear map `x ↦ x ⊕ mask`.
    Linear(Block),
}

impl SigmaSource {
    fn sample(self, bits: u32, rng: &mut DeterministicRng) -> Result<Box<dyn Permutation>> {
        Ok(match self {
            SigmaSource::FreshToy => Box::new(ToyPermutation::build(bits, rng.next_u64())?),
            SigmaSource::Linear(mask) => XorTestCipher::permutation(BlockSpec::new(bits)?, mask),
        })
    }
}

fn transpose(rows: Vec<Vec<Block>>, width: usize) -> Vec<Vec<Block>> {
    let mut cols = vec![Vec::with_capacity(rows.len()); width];
    for row in rows {
        for (col, v) in cols.iter_mut().zip(row) {
            col.push(v);
        }
    }
    cols
}

/// `samples` draws of [`sample_diff_vector`], returned per coordinate.
pub fn diff_vector_columns(
    bits: u32,
    c: usize,
    samples: usize,
    sigma: SigmaSource,
    seed: u64,
) -> Result<Vec<Vec<Block>>> {
    let mut rng = DeterministicRng::new(seed);
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let perm = sigma.sample(bits, &mut rng)?;
        rows.push(sample_diff_vector(&*perm, c, &mut rng)?);
    }
    Ok(transpose(rows, c.saturating_sub(1)))
}

/// `samples` draws of [`sample_pad_bastion`], returned per coordinate.
pub fn pad_bastion_columns(
    bits: u32,
    c: usize,
    s: usize,
    t: usize,
    samples: usize,
    sigma: SigmaSource,
    seed: u64,
) -> Result<Vec<Vec<Block>>> {
    let mut rng = DeterministicRng::new(seed);
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples {
        let perm = sigma.sample(bits, &mut rng)?;
        rows.push(sample_pad_bastion(&*perm, c, s, t, &mut rng)?);
    }
    Ok(transpose(rows, c - 2))
}
