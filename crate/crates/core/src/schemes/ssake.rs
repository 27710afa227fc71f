//! Counter-mode encryption followed by the neighbour-XOR chain
//! `C'_i = C_{i-1} ⊕ C_i`. `C_0` is dropped; the IV it encrypts is
//! secret-shared, one share per site.

use std::ops::Range;

use rand::RngCore;

use super::{
    expect_scheme, share_bytes, timed, Dispersal, FragmentationPolicy, KernelCtx, KernelOut,
    Primitives, Randomness, SchemeId, Share,
};
use crate::block::{Block, CipherKey};
use crate::cipher::BlockCipher;
use crate::ctr::{ctr_decrypt_in_place, ctr_encrypt_in_place};
use crate::error::{Error, Result};
use crate::transforms::{ssake_chain_in_place, ssake_unchain_in_place};

pub(crate) fn forward(ctx: &mut KernelCtx, rand: &Randomness, buf: &mut [Block]) -> Result<KernelOut> {
    let perm = ctx.prims.cipher()?.keyed(ctx.key()?);
    let mode = ctx.prims.mode;
    timed(&mut ctx.phases.encrypt, || {
        ctr_encrypt_in_place(&*perm, rand.iv, buf, mode)
    })?;
    ctx.counters.cipher_block_calls += buf.len() as u64;
    ctx.counters.encryption_rounds = 1;
    let xors = timed(&mut ctx.phases.transform, || ssake_chain_in_place(buf))?;
    ctx.counters.xor_block_ops += xors;
    Ok(KernelOut {
        start: 1,
        secret: Some(rand.iv),
    })
}

/// `buf[0]` is a placeholder for `C_0`; `buf[1..]` holds `C'`.
pub(crate) fn inverse(
    ctx: &mut KernelCtx,
    secret: Option<Block>,
    buf: &mut [Block],
) -> Result<Range<usize>> {
    let iv = secret.ok_or_else(|| Error::CorruptSet("missing IV shares".into()))?;
    let perm = ctx.prims.cipher()?.keyed(ctx.key()?);
    buf[0] = perm.forward(iv);
    ssake_unchain_in_place(buf);
    ctr_decrypt_in_place(&*perm, buf, ctx.prims.mode)?;
    Ok(1..buf.len())
}

pub fn share(
    cipher: &dyn BlockCipher,
    key: &CipherKey,
    plaintext: &[u8],
    n: usize,
    rng: &mut dyn RngCore,
    policy: FragmentationPolicy,
) -> Result<Dispersal> {
    let prims = Primitives::with_cipher(cipher);
    share_bytes(&prims, SchemeId::Ssake, Some(key), plaintext, n, policy, rng)
}

pub fn reconstruct(cipher: &dyn BlockCipher, key: &CipherKey, shares: &[Share]) -> Result<Vec<u8>> {
    expect_scheme(shares, &[SchemeId::Ssake])?;
    super::reconstruct_bytes(&Primitives::with_cipher(cipher), Some(key), shares)
}
