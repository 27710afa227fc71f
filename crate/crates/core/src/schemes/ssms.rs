//! Encrypt under a fresh message key, fragment the whole ciphertext, and
//! secret-share the message key alongside the fragments.

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

pub(crate) fn forward(ctx: &mut KernelCtx, rand: &Randomness, buf: &mut [Block]) -> Result<KernelOut> {
    let k1 = rand
        .message_key
        .ok_or_else(|| Error::contract("missing message key"))?;
    let perm = ctx.prims.cipher()?.keyed(&k1);
    let mode = ctx.prims.mode;
    timed(&mut ctx.phases.encrypt, || {
        ctr_encrypt_in_place(&*perm, rand.iv, buf, mode)
    })?;
    ctx.counters.cipher_block_calls += buf.len() as u64;
    ctx.counters.encryption_rounds = 1;
    Ok(KernelOut {
        start: 0,
        secret: Some(k1.0),
    })
}

pub(crate) fn inverse(
    ctx: &mut KernelCtx,
    secret: Option<Block>,
    buf: &mut [Block],
) -> Result<Range<usize>> {
    let k1 = CipherKey(secret.ok_or_else(|| Error::CorruptSet("missing key shares".into()))?);
    let perm = ctx.prims.cipher()?.keyed(&k1);
    ctr_decrypt_in_place(&*perm, buf, ctx.prims.mode)?;
    Ok(1..buf.len())
}

/// Keyless: the message key is drawn internally and only exists in the shares.
pub fn share(
    cipher: &dyn BlockCipher,
    plaintext: &[u8],
    n: usize,
    rng: &mut dyn RngCore,
    policy: FragmentationPolicy,
) -> Result<Dispersal> {
    let prims = Primitives::with_cipher(cipher);
    share_bytes(&prims, SchemeId::Ssms, None, plaintext, n, policy, rng)
}

pub fn reconstruct(cipher: &dyn BlockCipher, shares: &[Share]) -> Result<Vec<u8>> {
    expect_scheme(shares, &[SchemeId::Ssms])?;
    super::reconstruct_bytes(&Primitives::with_cipher(cipher), None, shares)
}
