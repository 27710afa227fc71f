//! Random oracles with arbitrarily long output, seeded by two blocks.
//!
//! Two instantiations: counter mode over a double-key cipher
//! (`[E²_L(1), E²_L(2), ...]`) and a Keccak sponge XOF over the seed bytes.

use sha3::digest::{ExtendableOutput, Update, XofReader};

use crate::block::{Block, BlockSpec, WideKey};
use crate::cipher::WideBlockCipher;
use crate::error::{Error, Result};

/// `O(K || IV)`: deterministic, prefix-consistent block stream.
pub trait RandomOracleStream: Send + Sync {
    fn spec(&self) -> BlockSpec;
    fn name(&self) -> &'static str;

    /// Fill `out` with the first `out.len()` oracle blocks.
    fn fill(&self, seed: &WideKey, out: &mut [Block]) -> Result<()>;

    fn generate(&self, seed: &WideKey, count: usize) -> Result<Vec<Block>> {
        let mut out = vec![Block::ZERO; count];
        self.fill(seed, &mut out)?;
        Ok(out)
    }

    /// XOR the first `buf.len()` oracle blocks into `buf`.
    fn xor_into(&self, seed: &WideKey, buf: &mut [Block]) -> Result<()> {
        let pad = self.generate(seed, buf.len())?;
        for (b, p) in buf.iter_mut().zip(pad) {
            *b ^= p;
        }
        Ok(())
    }

    /// Block-cipher invocations spent producing `count` blocks.
    fn cipher_calls(&self, count: usize) -> u64 {
        let _ = count;
        0
    }
}

const CHUNK: usize = 4096;

/// Counter mode over a wide cipher: block `j` (1-based) is `E²_seed(bin(j))`.
#[derive(Clone, Debug)]
pub struct CounterModeOracle<W> {
    cipher: W,
}

impl<W: WideBlockCipher> CounterModeOracle<W> {
    pub fn new(cipher: W) -> Self {
        CounterModeOracle { cipher }
    }
}

impl<W: WideBlockCipher> RandomOracleStream for CounterModeOracle<W> {
    fn spec(&self) -> BlockSpec {
        self.cipher.spec()
    }

    fn name(&self) -> &'static str {
        "counter-mode"
    }

    fn fill(&self, seed: &WideKey, out: &mut [Block]) -> Result<()> {
        let spec = self.spec();
        if out.is_empty() {
            return Ok(());
        }
        // the largest counter used is out.len()
        spec.encode_counter(out.len() as u128)?;
        for (j, b) in out.iter_mut().enumerate() {
            *b = Block(j as u128 + 1);
        }
        self.cipher.keyed(seed).forward_in_place(out);
        Ok(())
    }

    fn xor_into(&self, seed: &WideKey, buf: &mut [Block]) -> Result<()> {
        if buf.is_empty() {
            return Ok(());
        }
        self.spec().encode_counter(buf.len() as u128)?;
        let perm = self.cipher.keyed(seed);
        let mut pad = [Block::ZERO; CHUNK];
        for (c, chunk) in buf.chunks_mut(CHUNK).enumerate() {
            let pad = &mut pad[..chunk.len()];
            for (k, p) in pad.iter_mut().enumerate() {
                *p = Block((c * CHUNK + k) as u128 + 1);
            }
            perm.forward_in_place(pad);
            for (b, p) in chunk.iter_mut().zip(pad.iter()) {
                *b ^= *p;
            }
        }
        Ok(())
    }

    fn cipher_calls(&self, count: usize) -> u64 {
        count as u64
    }
}

/// `roCounterMode`: the first `count` blocks of the counter-mode oracle.
pub fn ro_counter_mode(
    cipher: &dyn WideBlockCipher,
    seed: &WideKey,
    count: usize,
) -> Result<Vec<Block>> {
    let spec = cipher.spec();
    if count == 0 {
        return Ok(Vec::new());
    }
    spec.encode_counter(count as u128)?;
    let mut out: Vec<Block> = (1..=count as u128).map(Block).collect();
    cipher.keyed(seed).forward_in_place(&mut out);
    Ok(out)
}

/// Sponge parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpongeConfig {
    /// Standard SHAKE128.
    Shake128,
    /// Raw Keccak-p[1600] sponge with the given rate, round count and
    /// domain-separation byte (pad10*1 padding).
    Keccak {
        rate_bytes: usize,
        rounds: usize,
        domain: u8,
    },
}

impl SpongeConfig {
    /// Capacity 128, rate 1472 bits, 24 rounds.
    pub const KEYAK_PARAMS: SpongeConfig = SpongeConfig::Keccak {
        rate_bytes: 184,
        rounds: 24,
        domain: 0x1F,
    };
}

struct KeccakSponge {
    state: [u64; 25],
    rate: usize,
    rounds: usize,
    buf: [u8; 200],
    pos: usize,
}

impl KeccakSponge {
    fn absorb_all(rate: usize, rounds: usize, domain: u8, input: &[u8]) -> Self {
        let mut s = KeccakSponge {
            state: [0u64; 25],
            rate,
            rounds,
            buf: [0u8; 200],
            pos: 0,
        };
        let mut chunks = input.chunks_exact(rate);
        for chunk in &mut chunks {
            s.xor_in(chunk);
            keccak::p1600(&mut s.state, rounds);
        }
        let rest = chunks.remainder();
        let mut last = [0u8; 200];
        last[..rest.len()].copy_from_slice(rest);
        last[rest.len()] ^= domain;
        last[rate - 1] ^= 0x80;
        s.xor_in(&last[..rate]);
        keccak::p1600(&mut s.state, rounds);
        s.refill_from_state();
        s
    }

    fn xor_in(&mut self, bytes: &[u8]) {
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut lane = [0u8; 8];
            lane[..chunk.len()].copy_from_slice(chunk);
            self.state[i] ^= u64::from_le_bytes(lane);
        }
    }

    fn refill_from_state(&mut self) {
        for (i, lane) in self.state.iter().enumerate() {
            self.buf[8 * i..8 * i + 8].copy_from_slice(&lane.to_le_bytes());
        }
        self.pos = 0;
    }

    fn squeeze(&mut self, out: &mut [u8]) {
        let mut written = 0;
        while written < out.len() {
            if self.pos == self.rate {
                keccak::p1600(&mut self.state, self.rounds);
                self.refill_from_state();
            }
            let take = (self.rate - self.pos).min(out.len() - written);
            out[written..written + take].copy_from_slice(&self.buf[self.pos..self.pos + take]);
            self.pos += take;
            written += take;
        }
    }
}

enum Squeezer {
    Shake(sha3::Shake128Reader),
    Raw(KeccakSponge),
}

impl Squeezer {
    fn new(config: SpongeConfig, input: &[u8]) -> Result<Self> {
        Ok(match config {
            SpongeConfig::Shake128 => {
                let mut h = sha3::Shake128::default();
                h.update(input);
                Squeezer::Shake(h.finalize_xof())
            }
            SpongeConfig::Keccak {
                rate_bytes,
                rounds,
                domain,
            } => {
                if rate_bytes == 0 || rate_bytes >= 200 || rate_bytes % 8 != 0 {
                    return Err(Error::contract(format!(
                        "sponge rate {rate_bytes} must be a positive multiple of 8 below 200"
                    )));
                }
                if rounds == 0 || rounds > 24 {
                    return Err(Error::contract(format!("sponge rounds {rounds} not in 1..=24")));
                }
                Squeezer::Raw(KeccakSponge::absorb_all(rate_bytes, rounds, domain, input))
            }
        })
    }

    fn read(&mut self, out: &mut [u8]) {
        match self {
            Squeezer::Shake(r) => r.read(out),
            Squeezer::Raw(s) => s.squeeze(out),
        }
    }
}

/// Raw sponge output bytes; exposed for cross-checking configurations.
pub fn sponge_bytes(config: SpongeConfig, input: &[u8], len: usize) -> Result<Vec<u8>> {
    let mut out = vec![0u8; len];
    Squeezer::new(config, input)?.read(&mut out);
    Ok(out)
}

/// Sponge XOF applied to the seed bytes `K || IV`, cut into blocks of
/// `spec.bytes()` bytes each (masked to the width for toy sizes).
#[derive(Clone, Copy, Debug)]
pub struct SpongeOracle {
    spec: BlockSpec,
    config: SpongeConfig,
}

impl SpongeOracle {
    pub fn new(spec: BlockSpec, config: SpongeConfig) -> Result<Self> {
        // validate parameters once
        Squeezer::new(config, &[])?;
        Ok(SpongeOracle { spec, config })
    }

    pub fn shake128(spec: BlockSpec) -> Self {
        SpongeOracle {
            spec,
            config: SpongeConfig::Shake128,
        }
    }

    pub fn config(&self) -> SpongeConfig {
        self.config
    }

    fn squeeze_blocks(&self, mut sq: Squeezer, out: &mut [Block]) {
        let n = self.spec.bytes();
        let mask = self.spec.mask();
        let mut buf = vec![0u8; CHUNK * n];
        for chunk in out.chunks_mut(CHUNK) {
            let bytes = &mut buf[..chunk.len() * n];
            sq.read(bytes);
            for (b, raw) in chunk.iter_mut().zip(bytes.chunks_exact(n)) {
                let mut w = [0u8; 16];
                w[16 - n..].copy_from_slice(raw);
                *b = Block(u128::from_be_bytes(w) & mask);
            }
        }
    }

    /// One-block digest of a block sequence (used by the Rivest transform).
    pub fn digest(&self, blocks: &[Block]) -> Block {
        let n = self.spec.bytes();
        let mut out = [Block::ZERO];
        match self.config {
            SpongeConfig::Shake128 => {
                let mut h = sha3::Shake128::default();
                let mut buf = Vec::with_capacity(4096 * n);
                for chunk in blocks.chunks(4096) {
                    buf.clear();
                    for &b in chunk {
                        self.spec.write_block(b, &mut buf);
                    }
                    h.update(&buf);
                }
                self.squeeze_blocks(Squeezer::Shake(h.finalize_xof()), &mut out);
            }
            SpongeConfig::Keccak { .. } => {
                let mut bytes = Vec::with_capacity(blocks.len() * n);
                for &b in blocks {
                    self.spec.write_block(b, &mut bytes);
                }
                let sq = Squeezer::new(self.config, &bytes).expect("validated config");
                self.squeeze_blocks(sq, &mut out);
            }
        }
        out[0]
    }
}

impl RandomOracleStream for SpongeOracle {
    fn spec(&self) -> BlockSpec {
        self.spec
    }

    fn name(&self) -> &'static str {
        match self.config {
            SpongeConfig::Shake128 => "shake128",
            SpongeConfig::Keccak { .. } => "keccak-sponge",
        }
    }

    fn fill(&self, seed: &WideKey, out: &mut [Block]) -> Result<()> {
        if out.is_empty() {
            return Ok(());
        }
        let sq = Squeezer::new(self.config, &seed.to_bytes(self.spec))?;
        self.squeeze_blocks(sq, out);
        Ok(())
    }

    fn xor_into(&self, seed: &WideKey, buf: &mut [Block]) -> Result<()> {
        let mut sq = Squeezer::new(self.config, &seed.to_bytes(self.spec))?;
        let n = self.spec.bytes();
        let mask = self.spec.mask();
        let mut bytes = vec![0u8; CHUNK * n];
        for chunk in buf.chunks_mut(CHUNK) {
            let bytes = &mut bytes[..chunk.len() * n];
            sq.read(bytes);
            for (b, raw) in chunk.iter_mut().zip(bytes.chunks_exact(n)) {
                let mut w = [0u8; 16];
                w[16 - n..].copy_from_slice(raw);
                b.0 ^= u128::from_be_bytes(w) & mask;
            }
        }
        Ok(())
    }
}

/// `roSponge` with the default SHAKE128 configuration.
pub fn ro_sponge(spec: BlockSpec, seed: &WideKey, count: usize) -> Result<Vec<Block>> {
    SpongeOracle::shake128(spec).generate(seed, count)
}
