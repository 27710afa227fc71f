//! Package transform: encrypt under a fresh `K1`, append `Hash(C) ⊕ K1`.
//! The AON variant re-encrypts blocks `1..` in counter mode under the owner's
//! key, using the in-clear `C_0` as the counter base.

use std::ops::Range;

use rand::RngCore;

use super::{
    expect_scheme, share_bytes, timed, Dispersal, FragmentationPolicy, KernelCtx, KernelOut,
    Primitives, Randomness, SchemeId, Share,
};
use crate::block::{Block, CipherKey, CounterMode};
use crate::cipher::BlockCipher;
use crate::ctr::{apply_keystream, ctr_decrypt_in_place, ctr_encrypt_in_place};
use crate::error::{Error, Result};
use crate::ro::SpongeOracle;

/// `buf` must have capacity for one extra block.
pub(crate) fn forward(
    ctx: &mut KernelCtx,
    rand: &Randomness,
    buf: &mut Vec<Block>,
    outer: bool,
) -> Result<KernelOut> {
    let k1 = rand
        .message_key
        .ok_or_else(|| Error::contract("missing message key"))?;
    let perm = ctx.prims.cipher()?.keyed(&k1);
    let hash = ctx.prims.hash()?;
    let mode = ctx.prims.mode;
    timed(&mut ctx.phases.encrypt, || {
        ctr_encrypt_in_place(&*perm, rand.iv, buf, mode)
    })?;
    ctx.counters.cipher_block_calls += buf.len() as u64;
    let h = timed(&mut ctx.phases.transform, || hash.digest(buf));
    buf.push(h ^ k1.0);
    ctx.counters.xor_block_ops += 1;
    ctx.counters.encryption_rounds = 2;
    if outer {
        let outer_perm = ctx.prims.cipher()?.keyed(ctx.key()?);
        let nonce = buf[0];
        timed(&mut ctx.phases.encrypt, || {
            apply_keystream(&*outer_perm, nonce, buf, 1, mode)
        })?;
        ctx.counters.cipher_block_calls += buf.len() as u64 - 1;
        ctx.counters.encryption_rounds = 3;
    }
    Ok(KernelOut {
        start: 0,
        secret: None,
    })
}

pub(crate) fn inverse(ctx: &mut KernelCtx, buf: &mut Vec<Block>, outer: bool) -> Result<Range<usize>> {
    let mode: CounterMode = ctx.prims.mode;
    if buf.len() < 2 {
        return Err(Error::CorruptSet("package needs at least two blocks".into()));
    }
    if outer {
        let outer_perm = ctx.prims.cipher()?.keyed(ctx.key()?);
        let nonce = buf[0];
        apply_keystream(&*outer_perm, nonce, buf, 1, mode)?;
    }
    let last = buf.pop().expect("length checked");
    let k1 = CipherKey(last ^ ctx.prims.hash()?.digest(buf));
    let perm = ctx.prims.cipher()?.keyed(&k1);
    ctr_decrypt_in_place(&*perm, buf, mode)?;
    Ok(1..buf.len())
}

fn prims<'a>(cipher: &'a dyn BlockCipher, hash: &'a SpongeOracle) -> Primitives<'a> {
    Primitives {
        hash: Some(hash),
        ..Primitives::with_cipher(cipher)
    }
}

/// Keyless package transform.
pub fn aont_share(
    cipher: &dyn BlockCipher,
    hash: &SpongeOracle,
    plaintext: &[u8],
    n: usize,
    rng: &mut dyn RngCore,
    policy: FragmentationPolicy,
) -> Result<Dispersal> {
    share_bytes(&prims(cipher, hash), SchemeId::RivestAont, None, plaintext, n, policy, rng)
}

pub fn aont_reconstruct(cipher: &dyn BlockCipher, hash: &SpongeOracle, shares: &[Share]) -> Result<Vec<u8>> {
    expect_scheme(shares, &[SchemeId::RivestAont])?;
    super::reconstruct_bytes(&prims(cipher, hash), None, shares)
}

pub fn aon_share(
    cipher: &dyn BlockCipher,
    hash: &SpongeOracle,
    outer_key: &CipherKey,
    plaintext: &[u8],
    n: usize,
    rng: &mut dyn RngCore,
    policy: FragmentationPolicy,
) -> Result<Dispersal> {
    share_bytes(&prims(cipher, hash), SchemeId::RivestAon, Some(outer_key), plaintext, n, policy, rng)
}

pub fn aon_reconstruct(
    cipher: &dyn BlockCipher,
    hash: &SpongeOracle,
    outer_key: &CipherKey,
    shares: &[Share],
) -> Result<Vec<u8>> {
    expect_scheme(shares, &[SchemeId::RivestAon])?;
    super::reconstruct_bytes(&prims(cipher, hash), Some(outer_key), shares)
}
