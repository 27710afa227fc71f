//! Counter-mode encryption followed by the all-but-self XOR transform over
//! every ciphertext block including `C_0`. No IV shares are stored.

use std::ops::Range;

use rand::RngCore;

use super::{
    expect_scheme, share_bytes, timed, Dispersal, FragmentationPolicy, KernelCtx, KernelOut,
    Primitives, Randomness, SchemeId, Share,
};
use crate::block::{Block, CipherKey};
use crate::cipher::BlockCipher;
use crate::ctr::{ctr_decrypt_in_place, ctr_encrypt_in_place};
use crate::error::Result;
use crate::transforms::bastion_transform_in_place;

pub(crate) fn forward(ctx: &mut KernelCtx, rand: &Randomness, buf: &mut [Block]) -> Result<KernelOut> {
    let perm = ctx.prims.cipher()?.keyed(ctx.key()?);
    let mode = ctx.prims.mode;
    timed(&mut ctx.phases.encrypt, || {
        ctr_encrypt_in_place(&*perm, rand.iv, buf, mode)
    })?;
    ctx.counters.cipher_block_calls += buf.len() as u64;
    ctx.counters.encryption_rounds = 1;
    let xors = timed(&mut ctx.phases.transform, || bastion_transform_in_place(buf))?;
    ctx.counters.xor_block_ops += xors;
    Ok(KernelOut {
        start: 0,
        secret: None,
    })
}

pub(crate) fn inverse(ctx: &mut KernelCtx, buf: &mut [Block]) -> Result<Range<usize>> {
    let perm = ctx.prims.cipher()?.keyed(ctx.key()?);
    // even length, so the transform is its own inverse
    bastion_transform_in_place(buf)?;
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
    share_bytes(&prims, SchemeId::Bastion, Some(key), plaintext, n, policy, rng)
}

pub fn reconstruct(cipher: &dyn BlockCipher, key: &CipherKey, shares: &[Share]) -> Result<Vec<u8>> {
    expect_scheme(shares, &[SchemeId::Bastion])?;
    super::reconstruct_bytes(&Primitives::with_cipher(cipher), Some(key), shares)
}
