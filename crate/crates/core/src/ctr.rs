//! Counter mode with the IV carried encrypted as block 0.
//!
//! `C_0 = E_K(IV)` and `C_i = P_i ⊕ E_K(IV + i)` for `i >= 1`, where `+` is the
//! [`CounterMode`] combination (XOR by default).

use crate::block::{Block, CipherKey, CounterMode};
use crate::cipher::{BlockCipher, Permutation};
use crate::error::{Error, Result};

/// `c` blocks `C_0 .. C_{c-1}`; `c` is one more than the plaintext length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtrCiphertext {
    pub blocks: Vec<Block>,
}

impl CtrCiphertext {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

const CHUNK: usize = 4096;

/// XOR `E(IV + i)` into `buf[i]` for every `i >= first`, in cache-sized chunks.
pub fn apply_keystream(
    perm: &dyn Permutation,
    iv: Block,
    buf: &mut [Block],
    first: usize,
    mode: CounterMode,
) -> Result<()> {
    let spec = perm.spec();
    spec.check(iv)?;
    if let Some(last) = buf.len().checked_sub(1) {
        spec.encode_counter(last as u128)?;
    }
    let mut pad = [Block::ZERO; CHUNK];
    let mut i = first;
    while i < buf.len() {
        let len = CHUNK.min(buf.len() - i);
        let pad = &mut pad[..len];
        match mode {
            CounterMode::Xor => {
                for (k, b) in pad.iter_mut().enumerate() {
                    *b = Block(iv.0 ^ (i + k) as u128);
                }
            }
            CounterMode::Increment => {
                let mask = spec.mask();
                for (k, b) in pad.iter_mut().enumerate() {
                    *b = Block(iv.0.wrapping_add((i + k) as u128) & mask);
                }
            }
        }
        perm.forward_in_place(pad);
        for (c, k) in buf[i..i + len].iter_mut().zip(pad.iter()) {
            *c ^= *k;
        }
        i += len;
    }
    Ok(())
}

/// Encrypt in place: `buf[0]` is ignored on entry and holds `C_0` on exit;
/// `buf[1..]` holds the plaintext on entry and `C_1..` on exit.
pub fn ctr_encrypt_in_place(
    perm: &dyn Permutation,
    iv: Block,
    buf: &mut [Block],
    mode: CounterMode,
) -> Result<()> {
    if buf.is_empty() {
        return Err(Error::contract("ciphertext buffer needs room for C_0"));
    }
    let spec = perm.spec();
    for &p in &buf[1..] {
        spec.check(p)?;
    }
    apply_keystream(perm, iv, buf, 1, mode)?;
    buf[0] = perm.forward(iv);
    Ok(())
}

/// Decrypt in place: returns the recovered IV; `buf[1..]` becomes plaintext
/// and `buf[0]` is left as `C_0`.
pub fn ctr_decrypt_in_place(
    perm: &dyn Permutation,
    buf: &mut [Block],
    mode: CounterMode,
) -> Result<Block> {
    if buf.is_empty() {
        return Err(Error::contract("ciphertext must contain C_0"));
    }
    let iv = perm.inverse(buf[0]);
    apply_keystream(perm, iv, buf, 1, mode)?;
    Ok(iv)
}

pub fn ctr_encrypt_with(
    perm: &dyn Permutation,
    iv: Block,
    plaintext: &[Block],
    mode: CounterMode,
) -> Result<CtrCiphertext> {
    let mut blocks = Vec::with_capacity(plaintext.len() + 1);
    blocks.push(Block::ZERO);
    blocks.extend_from_slice(plaintext);
    ctr_encrypt_in_place(perm, iv, &mut blocks, mode)?;
    Ok(CtrCiphertext { blocks })
}

pub fn ctr_decrypt_with(
    perm: &dyn Permutation,
    ciphertext: &CtrCiphertext,
    mode: CounterMode,
) -> Result<Vec<Block>> {
    let mut buf = ciphertext.blocks.clone();
    ctr_decrypt_in_place(perm, &mut buf, mode)?;
    buf.remove(0);
    Ok(buf)
}

pub fn ctr_encrypt(
    cipher: &dyn BlockCipher,
    key: &CipherKey,
    iv: Block,
    plaintext: &[Block],
) -> Result<CtrCiphertext> {
    cipher.spec().check(key.0)?;
    ctr_encrypt_with(&*cipher.keyed(key), iv, plaintext, CounterMode::Xor)
}

pub fn ctr_decrypt(
    cipher: &dyn BlockCipher,
    key: &CipherKey,
    ciphertext: &CtrCiphertext,
) -> Result<Vec<Block>> {
    cipher.spec().check(key.0)?;
    ctr_decrypt_with(&*cipher.keyed(key), ciphertext, CounterMode::Xor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::BlockSpec;
    use crate::cipher::{Aes128Cipher, ToyCipher, XorTestCipher};
    use crate::rng::DeterministicRng;
    use proptest::prelude::*;

    fn b8() -> BlockSpec {
        BlockSpec::new(8).unwrap()
    }

    #[test]
    fn xor_cipher_example() {
        let c = XorTestCipher::new(b8());
        let key = CipherKey(Block(0x0F));
        let ct = ctr_encrypt(&c, &key, Block(0x20), &[Block(0xAA), Block(0x02)]).unwrap();
        assert_eq!(ct.blocks, vec![Block(0x2F), Block(0x84), Block(0x2F)]);
        assert_eq!(
            ctr_decrypt(&c, &key, &ct).unwrap(),
            vec![Block(0xAA), Block(0x02)]
        );
    }

    #[test]
    fn empty_plaintext() {
        let c = XorTestCipher::new(b8());
        let key = CipherKey(Block(0x0F));
        let ct = ctr_encrypt(&c, &key, Block(0x20), &[]).unwrap();
        assert_eq!(ct.blocks, vec![Block(0x2F)]);
        assert!(ctr_decrypt(&c, &key, &ct).unwrap().is_empty());
        assert!(ctr_decrypt(&c, &key, &CtrCiphertext { blocks: vec![] }).is_err());
    }

    #[test]
    fn counter_space_limit() {
        let c = XorTestCipher::new(b8());
        let key = CipherKey(Block(1));
        // c = 256 blocks uses counters up to 255
        assert!(ctr_encrypt(&c, &key, Block(0), &[Block(0); 255]).is_ok());
        assert!(matches!(
            ctr_encrypt(&c, &key, Block(0), &[Block(0); 256]),
            Err(Error::CounterOverflow { .. })
        ));
    }

    #[test]
    fn exhaustive_small_width_round_trip() {
        let spec = BlockSpec::new(6).unwrap();
        let c = ToyCipher::new(6, 17).unwrap();
        let key = CipherKey(Block(0x2A));
        let perm = c.keyed(&key);
        for iv in 0..64u128 {
            for p0 in 0..64u128 {
                let pt = [Block(p0), Block(p0 ^ 0x15)];
                let ct = ctr_encrypt_with(&*perm, Block(iv), &pt, CounterMode::Xor).unwrap();
                assert_eq!(ctr_decrypt_with(&*perm, &ct, CounterMode::Xor).unwrap(), pt);
                assert!(ct.blocks.iter().all(|b| spec.contains(*b)));
            }
        }
    }

    #[test]
    fn toy_round_trip_random() {
        let spec = BlockSpec::new(12).unwrap();
        let cipher = ToyCipher::new(12, 5).unwrap();
        let mut rng = DeterministicRng::new(9);
        for _ in 0..1000 {
            let key = spec.random_key(&mut rng);
            let iv = spec.random_block(&mut rng);
            let len = rng.below(20) as usize;
            let pt: Vec<Block> = (0..len).map(|_| spec.random_block(&mut rng)).collect();
            let ct = ctr_encrypt(&cipher, &key, iv, &pt).unwrap();
            assert_eq!(ct.len(), len + 1);
            assert_eq!(ctr_decrypt(&cipher, &key, &ct).unwrap(), pt);
        }
    }

    #[test]
    fn increment_mode_round_trip() {
        let spec = BlockSpec::new(8).unwrap();
        let cipher = ToyCipher::new(8, 2).unwrap();
        let perm = cipher.keyed(&CipherKey(Block(3)));
        let pt: Vec<Block> = (0..10u128).map(Block).collect();
        let ct = ctr_encrypt_with(&*perm, Block(0xFE), &pt, CounterMode::Increment).unwrap();
        assert_eq!(
            ctr_decrypt_with(&*perm, &ct, CounterMode::Increment).unwrap(),
            pt
        );
        assert_ne!(
            ct,
            ctr_encrypt_with(&*perm, Block(0xFE), &pt, CounterMode::Xor).unwrap()
        );
        assert!(spec.contains(ct.blocks[3]));
    }

    #[test]
    fn known_key_differential_is_the_counter_difference() {
        // With K exposed, D(C_i ⊕ P_i) ⊕ D(C_j ⊕ P_j) = bin(i) ⊕ bin(j).
        let spec = BlockSpec::B128;
        let mut rng = DeterministicRng::new(21);
        for _ in 0..50 {
            let key = spec.random_key(&mut rng);
            let iv = spec.random_block(&mut rng);
            let pt: Vec<Block> = (0..40).map(|_| spec.random_block(&mut rng)).collect();
            let ct = ctr_encrypt(&Aes128Cipher, &key, iv, &pt).unwrap();
            for (i, j) in [(1usize, 2usize), (3, 17), (40, 1), (8, 9)] {
                let di = Aes128Cipher.decrypt(&key, ct.blocks[i] ^ pt[i - 1]);
                let dj = Aes128Cipher.decrypt(&key, ct.blocks[j] ^ pt[j - 1]);
                assert_eq!(di ^ dj, Block(i as u128 ^ j as u128));
            }
        }
    }

    proptest! {
        #[test]
        fn aes_round_trip(key in any::<u128>(), iv in any::<u128>(), pt in proptest::collection::vec(any::<u128>(), 0..64)) {
            let pt: Vec<Block> = pt.into_iter().map(Block).collect();
            let key = CipherKey(Block(key));
            let ct = ctr_encrypt(&Aes128Cipher, &key, Block(iv), &pt).unwrap();
            prop_assert_eq!(ct.blocks[0], Aes128Cipher.encrypt(&key, Block(iv)));
            prop_assert_eq!(ctr_decrypt(&Aes128Cipher, &key, &ct).unwrap(), pt);
        }
    }
}
