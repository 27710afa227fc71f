//! Keyed permutations: the block cipher `E`, the double-key cipher `E²`, and
//! the seeded table permutations that stand in for ideal ones at toy widths.

use aes::cipher::generic_array::GenericArray;
use aes::cipher::consts::U16;
use aes::cipher::{BlockDecrypt, BlockEncrypt, BlockSizeUser, KeyInit};

use crate::block::{Block, BlockSpec, CipherKey, WideKey};
use crate::error::{Error, Result};
use crate::rng::DeterministicRng;

/// A permutation of the blocks of one width, with its inverse.
pub trait Permutation: Send + Sync {
    fn spec(&self) -> BlockSpec;
    fn forward(&self, x: Block) -> Block;
    fn inverse(&self, y: Block) -> Block;

    /// Apply `forward` to every block in place. Backends override this to
    /// batch work; results must equal the per-block evaluation.
    fn forward_in_place(&self, blocks: &mut [Block]) {
        for b in blocks {
            *b = self.forward(*b);
        }
    }
}

/// A keyed block cipher with a one-block key.
pub trait BlockCipher: Send + Sync {
    fn spec(&self) -> BlockSpec;
    fn name(&self) -> &'static str;
    fn keyed(&self, key: &CipherKey) -> Box<dyn Permutation>;

    fn encrypt(&self, key: &CipherKey, x: Block) -> Block {
        self.keyed(key).forward(x)
    }

    fn decrypt(&self, key: &CipherKey, y: Block) -> Block {
        self.keyed(key).inverse(y)
    }
}

/// A keyed block cipher with a two-block key `K || IV`.
pub trait WideBlockCipher: Send + Sync {
    fn spec(&self) -> BlockSpec;
    fn name(&self) -> &'static str;
    fn keyed(&self, key: &WideKey) -> Box<dyn Permutation>;

    fn encrypt(&self, key: &WideKey, x: Block) -> Block {
        self.keyed(key).forward(x)
    }

    fn decrypt(&self, key: &WideKey, y: Block) -> Block {
        self.keyed(key).inverse(y)
    }
}

// ---------------------------------------------------------------------------
// AES backends (b = 128)

const AES_BATCH: usize = 64;

fn aes_batch_forward<C: BlockEncrypt + BlockSizeUser<BlockSize = U16>>(cipher: &C, blocks: &mut [Block]) {
    let mut buf = [GenericArray::<u8, U16>::default(); AES_BATCH];
    for chunk in blocks.chunks_mut(AES_BATCH) {
        let buf = &mut buf[..chunk.len()];
        for (dst, src) in buf.iter_mut().zip(chunk.iter()) {
            *dst = GenericArray::from(src.0.to_be_bytes());
        }
        cipher.encrypt_blocks(buf);
        for (dst, src) in chunk.iter_mut().zip(buf.iter()) {
            *dst = Block(u128::from_be_bytes((*src).into()));
        }
    }
}

struct AesPermutation<C> {
    cipher: C,
}

impl<C> Permutation for AesPermutation<C>
where
    C: BlockEncrypt + BlockDecrypt + BlockSizeUser<BlockSize = U16> + Send + Sync,
{
    fn spec(&self) -> BlockSpec {
        BlockSpec::B128
    }

    fn forward(&self, x: Block) -> Block {
        let mut b = GenericArray::from(x.0.to_be_bytes());
        self.cipher.encrypt_block(&mut b);
        Block(u128::from_be_bytes(b.into()))
    }

    fn inverse(&self, y: Block) -> Block {
        let mut b = GenericArray::from(y.0.to_be_bytes());
        self.cipher.decrypt_block(&mut b);
        Block(u128::from_be_bytes(b.into()))
    }

    fn forward_in_place(&self, blocks: &mut [Block]) {
        aes_batch_forward(&self.cipher, blocks)
    }
}

/// AES-128 as the one-block-key cipher.
#[derive(Clone, Copy, Debug, Default)]
pub struct Aes128Cipher;

impl BlockCipher for Aes128Cipher {
    fn spec(&self) -> BlockSpec {
        BlockSpec::B128
    }

    fn name(&self) -> &'static str {
        "aes128"
    }

    fn keyed(&self, key: &CipherKey) -> Box<dyn Permutation> {
        let k = key.0 .0.to_be_bytes();
        Box::new(AesPermutation {
            cipher: aes::Aes128::new(&GenericArray::from(k)),
        })
    }
}

/// AES-256 keyed by `K || IV`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Aes256WideCipher;

impl WideBlockCipher for Aes256WideCipher {
    fn spec(&self) -> BlockSpec {
        BlockSpec::B128
    }

    fn name(&self) -> &'static str {
        "aes256"
    }

    fn keyed(&self, key: &WideKey) -> Box<dyn Permutation> {
        let bytes = key.to_bytes(BlockSpec::B128);
        Box::new(AesPermutation {
            cipher: aes::Aes256::new(GenericArray::from_slice(&bytes)),
        })
    }
}

// ---------------------------------------------------------------------------
// XOR test doubles: linear, so hand-computable and deliberately insecure.

struct XorPermutation {
    spec: BlockSpec,
    mask: Block,
}

impl Permutation for XorPermutation {
    fn spec(&self) -> BlockSpec {
        self.spec
    }
    fn forward(&self, x: Block) -> Block {
        x ^ self.mask
    }
    fn inverse(&self, y: Block) -> Block {
        y ^ self.mask
    }
}

/// `E_K(x) = x XOR K`.
#[derive(Clone, Copy, Debug)]
pub struct XorTestCipher {
    pub spec: BlockSpec,
}

impl XorTestCipher {
    pub fn new(spec: BlockSpec) -> Self {
        XorTestCipher { spec }
    }

    /// The linear permutation `x -> x XOR mask` on its own.
    pub fn permutation(spec: BlockSpec, mask: Block) -> Box<dyn Permutation> {
        Box::new(XorPermutation { spec, mask })
    }
}

impl BlockCipher for XorTestCipher {
    fn spec(&self) -> BlockSpec {
        self.spec
    }
    fn name(&self) -> &'static str {
        "xor-test"
    }
    fn keyed(&self, key: &CipherKey) -> Box<dyn Permutation> {
        Box::new(XorPermutation {
            spec: self.spec,
            mask: key.0,
        })
    }
}

/// `E_{K||IV}(x) = x XOR K XOR IV`.
#[derive(Clone, Copy, Debug)]
pub struct XorWideTestCipher {
    pub spec: BlockSpec,
}

impl XorWideTestCipher {
    pub fn new(spec: BlockSpec) -> Self {
        XorWideTestCipher { spec }
    }
}

impl WideBlockCipher for XorWideTestCipher {
    fn spec(&self) -> BlockSpec {
        self.spec
    }
    fn name(&self) -> &'static str {
        "xor-wide-test"
    }
    fn keyed(&self, key: &WideKey) -> Box<dyn Permutation> {
        Box::new(XorPermutation {
            spec: self.spec,
            mask: key.key_half ^ key.iv_half,
        })
    }
}

// ---------------------------------------------------------------------------
// Toy permutations

/// Largest width a table permutation may have.
pub const TOY_MAX_BITS: u32 = 20;

/// A uniformly shuffled permutation of `0..2^bits` with its inverse table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyPermutation {
    bits: u32,
    seed: u64,
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl ToyPermutation {
    /// Fisher-Yates shuffle of `0..2^bits` driven by `seed`.
    pub fn build(bits: u32, seed: u64) -> Result<Self> {
        if bits > TOY_MAX_BITS {
            return Err(Error::SizeLimit(bits));
        }
        BlockSpec::new(bits)?;
        let size = 1usize << bits;
        let mut rng = DeterministicRng::new(seed);
        let mut forward: Vec<u32> = (0..size as u32).collect();
        for i in (1..size).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            forward.swap(i, j);
        }
        let mut inverse = vec![0u32; size];
        for (x, &y) in forward.iter().enumerate() {
            inverse[y as usize] = x as u32;
        }
        Ok(ToyPermutation {
            bits,
            seed,
            forward,
            inverse,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table(&self) -> &[u32] {
        &self.forward
    }
}

impl Permutation for ToyPermutation {
    fn spec(&self) -> BlockSpec {
        BlockSpec::new(self.bits).expect("validated at build")
    }

    fn forward(&self, x: Block) -> Block {
        Block(self.forward[x.0 as usize] as u128)
    }

    fn inverse(&self, y: Block) -> Block {
        Block(self.inverse[y.0 as usize] as u128)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_seed(family: u64, parts: &[u128]) -> u64 {
    let mut h = splitmix(family);
    for p in parts {
        h = splitmix(h ^ (*p as u64));
        h = splitmix(h ^ ((*p >> 64) as u64));
    }
    h
}

/// A family of independent table permutations indexed by key: the ideal
/// cipher at desk scale.
#[derive(Clone, Copy, Debug)]
pub struct ToyCipher {
    spec: BlockSpec,
    family_seed: u64,
}

impl ToyCipher {
    pub fn new(bits: u32, family_seed: u64) -> Result<Self> {
        if bits > TOY_MAX_BITS {
            return Err(Error::SizeLimit(bits));
        }
        Ok(ToyCipher {
            spec: BlockSpec::new(bits)?,
            family_seed,
        })
    }

    pub fn permutation(&self, key: &CipherKey) -> ToyPermutation {
        ToyPermutation::build(self.spec.bits(), derive_seed(self.family_seed, &[key.0 .0]))
            .expect("width validated at construction")
    }
}

impl BlockCipher for ToyCipher {
    fn spec(&self) -> BlockSpec {
        self.spec
    }
    fn name(&self) -> &'static str {
        "toy"
    }
    fn keyed(&self, key: &CipherKey) -> Box<dyn Permutation> {
        Box::new(self.permutation(key))
    }
}

/// Toy family keyed by two blocks.
#[derive(Clone, Copy, Debug)]
pub struct ToyWideCipher {
    spec: BlockSpec,
    family_seed: u64,
}

impl ToyWideCipher {
    pub fn new(bits: u32, family_seed: u64) -> Result<Self> {
        if bits > TOY_MAX_BITS {
            return Err(Error::SizeLimit(bits));
        }
        Ok(ToyWideCipher {
            spec: BlockSpec::new(bits)?,
            family_seed,
        })
    }
}

impl WideBlockCipher for ToyWideCipher {
    fn spec(&self) -> BlockSpec {
        self.spec
    }
    fn name(&self) -> &'static str {
        "toy-wide"
    }
    fn keyed(&self, key: &WideKey) -> Box<dyn Permutation> {
        let seed = derive_seed(
            self.family_seed ^ 0x5749_4445,
            &[key.key_half.0, key.iv_half.0],
        );
        Box::new(ToyPermutation::build(self.spec.bits(), seed).expect("width validated"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;

    #[test]
    fn toy_permutation_inverts_and_is_deterministic() {
        let p = ToyPermutation::build(10, 99).unwrap();
        for x in 0..1024u128 {
            assert_eq!(p.inverse(p.forward(Block(x))), Block(x));
        }
        assert_eq!(p, ToyPermutation::build(10, 99).unwrap());
        assert_ne!(p.table(), ToyPermutation::build(10, 100).unwrap().table());
    }

    #[test]
    fn toy_permutation_is_a_bijection() {
        for bits in [1, 5, 10, 12] {
            let p = ToyPermutation::build(bits, 5).unwrap();
            let mut seen = vec![false; 1 << bits];
            for &y in p.table() {
                assert!(!seen[y as usize]);
                seen[y as usize] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn toy_permutation_size_limit() {
        assert_eq!(ToyPermutation::build(21, 0), Err(Error::SizeLimit(21)));
        assert!(ToyCipher::new(21, 0).is_err());
    }

    #[test]
    fn toy_cipher_keys_give_distinct_permutations() {
        let c = ToyCipher::new(12, 1).unwrap();
        let a = c.permutation(&CipherKey(Block(1)));
        let b = c.permutation(&CipherKey(Block(2)));
        assert_ne!(a.table(), b.table());
        assert_eq!(a.table(), c.permutation(&CipherKey(Block(1))).table());
    }

    #[test]
    fn exhaustive_round_trip_small_widths() {
        let ciphers: Vec<Box<dyn BlockCipher>> = vec![
            Box::new(ToyCipher::new(8, 3).unwrap()),
            Box::new(XorTestCipher::new(BlockSpec::new(8).unwrap())),
        ];
        for c in &ciphers {
            for k in [0u128, 0x0F, 0xA5] {
                let p = c.keyed(&CipherKey(Block(k)));
                for x in 0..256u128 {
                    assert_eq!(p.inverse(p.forward(Block(x))), Block(x));
                }
            }
        }
        let w = ToyWideCipher::new(12, 3).unwrap();
        let p = w.keyed(&WideKey {
            key_half: Block(5),
            iv_half: Block(9),
        });
        for x in 0..4096u128 {
            assert_eq!(p.inverse(p.forward(Block(x))), Block(x));
        }
    }

    #[test]
    fn aes_round_trip_and_batch_agree() {
        let mut rng = DeterministicRng::new(11);
        let spec = BlockSpec::B128;
        for _ in 0..20 {
            let key = spec.random_key(&mut rng);
            let p = Aes128Cipher.keyed(&key);
            let xs: Vec<Block> = (0..150).map(|_| spec.random_block(&mut rng)).collect();
            let mut batch = xs.clone();
            p.forward_in_place(&mut batch);
            for (x, y) in xs.iter().zip(&batch) {
                assert_eq!(p.forward(*x), *y);
                assert_eq!(p.inverse(*y), *x);
            }
            let wide = WideKey::new(key, spec.random_block(&mut rng));
            let q = Aes256WideCipher.keyed(&wide);
            for x in &xs {
                assert_eq!(q.inverse(q.forward(*x)), *x);
            }
        }
    }

    #[test]
    fn aes128_known_answer() {
        // FIPS-197 appendix C.1
        let key = CipherKey(Block(0x000102030405060708090a0b0c0d0e0f));
        let pt = Block(0x00112233445566778899aabbccddeeff);
        assert_eq!(
            Aes128Cipher.encrypt(&key, pt),
            Block(0x69c4e0d86a7b0430d8cdb78070b4c55a)
        );
    }

    #[test]
    fn aes256_known_answer() {
        // FIPS-197 appendix C.3, key split into K || IV halves
        let key = WideKey {
            key_half: Block(0x000102030405060708090a0b0c0d0e0f),
            iv_half: Block(0x101112131415161718191a1b1c1d1e1f),
        };
        let pt = Block(0x00112233445566778899aabbccddeeff);
        assert_eq!(
            Aes256WideCipher.encrypt(&key, pt),
            Block(0x8ea2b7ca516745bfeafc49904b496089)
        );
    }
}
