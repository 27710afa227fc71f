//! Blocks: the fixed-width unit every primitive and transform works on.
//!
//! A [`Block`] is a bit vector of `BlockSpec::bits` bits stored in the low
//! bits of a `u128`. The width lives in the [`BlockSpec`] carried by the
//! surrounding context (cipher, share set, matrix product), so slices of
//! blocks stay as dense as the raw integers. A block is well formed for a
//! spec when no bit above the width is set.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of a block, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSpec {
    bits: u32,
}

impl BlockSpec {
    /// Production width (AES block).
    pub const B128: BlockSpec = BlockSpec { bits: 128 };

    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > 128 {
            return Err(Error::InvalidWidth(bits));
        }
        Ok(BlockSpec { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Bytes needed to hold one block (`ceil(bits / 8)`).
    pub fn bytes(self) -> usize {
        self.bits.div_ceil(8) as usize
    }

    /// Whether blocks pack whole bytes, which the byte-oriented APIs require.
    pub fn is_byte_aligned(self) -> bool {
        self.bits.is_multiple_of(8)
    }

    pub fn mask(self) -> u128 {
        if self.bits == 128 {
            u128::MAX
        } else {
            (1u128 << self.bits) - 1
        }
    }

    /// Number of distinct blocks, saturated at `u128::MAX` for 128-bit blocks.
    pub fn cardinality(self) -> u128 {
        if self.bits == 128 {
            u128::MAX
        } else {
            1u128 << self.bits
        }
    }

    pub fn contains(self, block: Block) -> bool {
        block.0 & !self.mask() == 0
    }

    pub fn check(self, block: Block) -> Result<Block> {
        if self.contains(block) {
            Ok(block)
        } else {
            Err(Error::WidthMismatch {
                left: self.bits,
                right: 128 - block.0.leading_zeros(),
            })
        }
    }

    /// Big-endian binary writing of `i` as a block.
    pub fn encode_counter(self, i: u128) -> Result<Block> {
        if self.bits < 128 && i >= (1u128 << self.bits) {
            return Err(Error::CounterOverflow {
                counter: i,
                bits: self.bits,
            });
        }
        Ok(Block(i))
    }

    pub fn random_block(self, rng: &mut (impl RngCore + ?Sized)) -> Block {
        let mut buf = [0u8; 16];
        let n = self.bytes();
        rng.fill_bytes(&mut buf[16 - n..]);
        Block(u128::from_be_bytes(buf) & self.mask())
    }

    pub fn random_key(self, rng: &mut (impl RngCore + ?Sized)) -> CipherKey {
        CipherKey(self.random_block(rng))
    }

    /// Serialize a block as `bytes()` big-endian bytes.
    pub fn write_block(self, block: Block, out: &mut Vec<u8>) {
        let raw = block.0.to_be_bytes();
        out.extend_from_slice(&raw[16 - self.bytes()..]);
    }

    pub fn block_to_bytes(self, block: Block) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.bytes());
        self.write_block(block, &mut v);
        v
    }

    pub fn block_from_bytes(self, bytes: &[u8]) -> Result<Block> {
        let n = self.bytes();
        if bytes.len() != n {
            return Err(Error::contract(format!(
                "expected {n} bytes for a {}-bit block, got {}",
                self.bits,
                bytes.len()
            )));
        }
        let mut buf = [0u8; 16];
        buf[16 - n..].copy_from_slice(bytes);
        self.check(Block(u128::from_be_bytes(buf)))
    }

    /// Pack bytes into blocks, zero-filling the tail of the last block.
    pub fn pack(self, data: &[u8]) -> Result<Vec<Block>> {
        let mut out = Vec::with_capacity(data.len().div_ceil(self.bytes().max(1)));
        self.pack_into(data, &mut out)?;
        Ok(out)
    }

    /// [`BlockSpec::pack`], appending to `out`.
    pub fn pack_into(self, data: &[u8], out: &mut Vec<Block>) -> Result<()> {
        if !self.is_byte_aligned() {
            return Err(Error::contract(format!(
                "byte packing needs a byte-aligned width, got {} bits",
                self.bits
            )));
        }
        let n = self.bytes();
        out.reserve(data.len().div_ceil(n));
        let mut chunks = data.chunks_exact(n);
        if n == 16 {
            out.extend((&mut chunks).map(|c| Block(u128::from_be_bytes(c.try_into().expect("16 bytes")))));
        } else {
            for chunk in &mut chunks {
                let mut buf = [0u8; 16];
                buf[16 - n..].copy_from_slice(chunk);
                out.push(Block(u128::from_be_bytes(buf)));
            }
        }
        let rest = chunks.remainder();
        if !rest.is_empty() {
            let mut buf = [0u8; 16];
            buf[16 - n..16 - n + rest.len()].copy_from_slice(rest);
            out.push(Block(u128::from_be_bytes(buf)));
        }
        Ok(())
    }

    /// Inverse of [`BlockSpec::pack`], truncated to `len` bytes.
    pub fn unpack(self, blocks: &[Block], len: usize) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(blocks.len() * self.bytes());
        for &b in blocks {
            self.write_block(b, &mut out);
        }
        if out.len() < len {
            return Err(Error::CorruptSet(format!(
                "recorded length {len} exceeds the {} recovered bytes",
                out.len()
            )));
        }
        out.truncate(len);
        Ok(out)
    }

    /// Width-checked exclusive-or.
    pub fn xor(self, a: Block, b: Block) -> Result<Block> {
        self.check(a)?;
        self.check(b)?;
        Ok(a ^ b)
    }

    /// `iv + i` in the XOR-counter convention: `iv XOR bin(i)`.
    pub fn counter_add(self, iv: Block, i: u128) -> Result<Block> {
        CounterMode::Xor.combine(self, iv, i)
    }
}

/// One block value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block(pub u128);

impl Block {
    pub const ZERO: Block = Block(0);

    pub fn value(self) -> u128 {
        self.0
    }
}

impl std::ops::BitXor for Block {
    type Output = Block;
    fn bitxor(self, rhs: Block) -> Block {
        Block(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXorAssign for Block {
    fn bitxor_assign(&mut self, rhs: Block) {
        self.0 ^= rhs.0;
    }
}

impl From<u128> for Block {
    fn from(v: u128) -> Self {
        Block(v)
    }
}

impl std::fmt::LowerHex for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::LowerHex::fmt(&self.0, f)
    }
}

/// XOR of two blocks of the given width.
pub fn xor_blocks(spec: BlockSpec, a: Block, b: Block) -> Result<Block> {
    spec.xor(a, b)
}

/// XOR-fold of a slice; `Block::ZERO` for an empty slice.
pub fn xor_all(blocks: &[Block]) -> Block {
    blocks.iter().fold(Block::ZERO, |acc, &b| acc ^ b)
}

/// How a counter is combined with an IV.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CounterMode {
    /// `iv XOR bin(i)`; the convention every proof in this crate relies on.
    #[default]
    Xor,
    /// `iv + i mod 2^bits`, for interoperability experiments only.
    Increment,
}

impl CounterMode {
    pub fn combine(self, spec: BlockSpec, iv: Block, i: u128) -> Result<Block> {
        let enc = spec.encode_counter(i)?;
        Ok(match self {
            CounterMode::Xor => iv ^ enc,
            CounterMode::Increment => Block(iv.0.wrapping_add(enc.0) & spec.mask()),
        })
    }
}

/// A one-block secret key.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CipherKey(pub Block);

impl std::fmt::Debug for CipherKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("CipherKey(..)")
    }
}

/// Two-block key `K || IV` feeding the wide cipher and the random oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WideKey {
    pub key_half: Block,
    pub iv_half: Block,
}

impl WideKey {
    pub fn new(key: CipherKey, iv: Block) -> Self {
        WideKey {
            key_half: key.0,
            iv_half: iv,
        }
    }

    /// `key_half || iv_half`, each half `spec.bytes()` long.
    pub fn to_bytes(&self, spec: BlockSpec) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * spec.bytes());
        spec.write_block(self.key_half, &mut out);
        spec.write_block(self.iv_half, &mut out);
        out
    }
}
