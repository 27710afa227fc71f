//! One-time pad from a random oracle on `K || IV`; the IV is secret-shared.

use std::ops::Range;

use rand::RngCore;

use super::{
    expect_scheme, share_bytes, timed, Dispersal, FragmentationPolicy, KernelCtx, KernelOut,
    Primitives, Randomness, SchemeId, Share,
};
use crate::block::{Block, CipherKey, WideKey};
use crate::error::{Error, Result};
use crate::ro::RandomOracleStream;

pub(crate) fn forward(ctx: &mut KernelCtx, rand: &Randomness, buf: &mut [Block]) -> Result<KernelOut> {
    let oracle = ctx.prims.oracle()?;
    let seed = WideKey::new(*ctx.key()?, rand.iv);
    for &p in buf.iter() {
        ctx.prims.spec.check(p)?;
    }
    timed(&mut ctx.phases.encrypt, || oracle.xor_into(&seed, buf))?;
    ctx.counters.ro_blocks_generated += buf.len() as u64;
    ctx.counters.cipher_block_calls += oracle.cipher_calls(buf.len());
    ctx.counters.encryption_rounds = 1;
    Ok(KernelOut {
        start: 0,
        secret: Some(rand.iv),
    })
}

pub(crate) fn inverse(
    ctx: &mut KernelCtx,
    secret: Option<Block>,
    buf: &mut [Block],
) -> Result<Range<usize>> {
    let iv = secret.ok_or_else(|| Error::CorruptSet("missing IV shares".into()))?;
    let seed = WideKey::new(*ctx.key()?, iv);
    ctx.prims.oracle()?.xor_into(&seed, buf)?;
    Ok(0..buf.len())
}

/// Counter-mode oracles (which spend cipher calls) map to the BC variant.
pub fn variant_of(ro: &dyn RandomOracleStream) -> SchemeId {
    if ro.cipher_calls(1) > 0 {
        SchemeId::RossakeBc
    } else {
        SchemeId::RossakeSponge
    }
}

pub fn share(
    ro: &dyn RandomOracleStream,
    key: &CipherKey,
    plaintext: &[u8],
    n: usize,
    rng: &mut dyn RngCore,
    policy: FragmentationPolicy,
) -> Result<Dispersal> {
    let prims = Primitives::with_oracle(ro);
    share_bytes(&prims, variant_of(ro), Some(key), plaintext, n, policy, rng)
}

pub fn reconstruct(ro: &dyn RandomOracleStream, key: &CipherKey, shares: &[Share]) -> Result<Vec<u8>> {
    expect_scheme(shares, &[SchemeId::RossakeBc, SchemeId::RossakeSponge])?;
    super::reconstruct_bytes(&Primitives::with_oracle(ro), Some(key), shares)
}
