//! Share and reconstruct for every scheme, with operation counters.
//!
//! Every scheme follows the same pipeline: pad the plaintext blocks, run the
//! scheme kernel (encryption plus its post-processing), secret-share the
//! per-message secret where the scheme has one, then cut the transformed
//! blocks into `n` equal fragments.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::block::{Block, BlockSpec, CipherKey, CounterMode};
use crate::cipher::{
    Aes128Cipher, Aes256WideCipher, BlockCipher, ToyCipher, ToyWideCipher, XorTestCipher,
    XorWideTestCipher,
};
use crate::error::{Error, Result};
use crate::pss::{pss_reconstruct, pss_split, BlockShareSet};
use crate::ro::{CounterModeOracle, RandomOracleStream, SpongeOracle};

pub mod bastion;
pub mod ctr_naive;
pub mod rivest;
pub mod rossake;
pub mod ssake;
pub mod ssms;

/// Scheme identifiers with their stable container codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    CtrNaive = 0,
    Ssms = 1,
    Ssake = 2,
    RossakeBc = 3,
    RossakeSponge = 4,
    Bastion = 5,
    RivestAont = 6,
    RivestAon = 7,
}

impl SchemeId {
    pub const ALL: [SchemeId; 8] = [
        SchemeId::CtrNaive,
        SchemeId::Ssms,
        SchemeId::Ssake,
        SchemeId::RossakeBc,
        SchemeId::RossakeSponge,
        SchemeId::Bastion,
        SchemeId::RivestAont,
        SchemeId::RivestAon,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::CtrNaive => "ctr-naive",
            SchemeId::Ssms => "ssms",
            SchemeId::Ssake => "ssake",
            SchemeId::RossakeBc => "rossake-bc",
            SchemeId::RossakeSponge => "rossake-sponge",
            SchemeId::Bastion => "bastion",
            SchemeId::RivestAont => "rivest-aont",
            SchemeId::RivestAon => "rivest-aon",
        }
    }

    /// Whether share and reconstruct need the owner's long-term key.
    pub fn needs_key(self) -> bool {
        !matches!(self, SchemeId::Ssms | SchemeId::RivestAont)
    }

    /// Whether each share carries one additive share of a per-message block
    /// (the IV, or the message key for SSMS).
    pub fn has_iv_share(self) -> bool {
        matches!(
            self,
            SchemeId::Ssms | SchemeId::Ssake | SchemeId::RossakeBc | SchemeId::RossakeSponge
        )
    }

    /// Whether the scheme draws a fresh message key `K1`.
    pub fn uses_message_key(self) -> bool {
        matches!(
            self,
            SchemeId::Ssms | SchemeId::RivestAont | SchemeId::RivestAon
        )
    }

    /// Transformed block count for `p` padded plaintext blocks.
    pub fn transformed_len(self, p: usize) -> usize {
        match self {
            SchemeId::Ssake | SchemeId::RossakeBc | SchemeId::RossakeSponge => p,
            SchemeId::CtrNaive | SchemeId::Ssms | SchemeId::Bastion => p + 1,
            SchemeId::RivestAont | SchemeId::RivestAon => p + 2,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == norm)
            .ok_or_else(|| Error::contract(format!("unknown scheme '{s}'")))
    }
}

/// How transformed blocks are dealt to fragments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FragmentationPolicy {
    /// Fragment `k` holds the `k`-th run of `L/n` consecutive blocks.
    #[default]
    Contiguous,
    /// Block `j` goes to fragment `j mod n`.
    Interleaved,
}

impl FromStr for FragmentationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "contiguous" => Ok(FragmentationPolicy::Contiguous),
            "interleaved" => Ok(FragmentationPolicy::Interleaved),
            _ => Err(Error::contract(format!("unknown fragmentation policy '{s}'"))),
        }
    }
}

/// One storage site's payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    pub scheme: SchemeId,
    /// 1-based.
    pub index: u8,
    pub n: u8,
    pub spec: BlockSpec,
    pub iv_share: Option<Block>,
    pub fragment: Vec<Block>,
    pub plaintext_len: u64,
    pub interleaved: bool,
    pub bastion_padded: bool,
}

impl Share {
    pub fn policy(&self) -> FragmentationPolicy {
        if self.interleaved {
            FragmentationPolicy::Interleaved
        } else {
            FragmentationPolicy::Contiguous
        }
    }

    /// Payload blocks held by this share (fragment plus IV share).
    pub fn stored_blocks(&self) -> usize {
        self.fragment.len() + self.iv_share.is_some() as usize
    }

    pub fn stored_bytes(&self) -> usize {
        self.stored_blocks() * self.spec.bytes()
    }

    pub fn fragment_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.fragment.len() * self.spec.bytes());
        for &b in &self.fragment {
            self.spec.write_block(b, &mut out);
        }
        out
    }
}

/// Work done by one share operation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    /// Block XORs performed after encryption (linear transform plus sharing).
    pub xor_block_ops: u64,
    pub cipher_block_calls: u64,
    pub ro_blocks_generated: u64,
    /// Full passes over the data: encryption, hashing, re-encryption.
    pub encryption_rounds: u32,
}

/// Wall time per pipeline phase.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub encrypt: Duration,
    pub transform: Duration,
    pub pss: Duration,
    pub fragment: Duration,
}

/// Block counts fixed by the plaintext length, `n` and the scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    /// Plaintext blocks before padding.
    pub plain_blocks: usize,
    /// Plaintext blocks after padding (`p'`).
    pub padded_blocks: usize,
    /// Blocks dealt to fragments.
    pub transformed_blocks: usize,
    /// Ciphertext size `|C|` in blocks, as used for storage accounting.
    pub ciphertext_blocks: usize,
    /// Extra blocks were needed only to make the Bastion input even.
    pub bastion_padded: bool,
}

impl Layout {
    pub fn new(scheme: SchemeId, plain_blocks: usize, n: usize) -> Result<Self> {
        check_n(n)?;
        let fits = |p: usize, even: bool| {
            let l = scheme.transformed_len(p);
            l.is_multiple_of(n) && (!even || l.is_multiple_of(2))
        };
        let even = scheme == SchemeId::Bastion;
        let first = |even: bool| {
            (plain_blocks.max(1)..)
                .find(|&p| fits(p, even))
                .expect("a multiple of 2n exists")
        };
        let padded = first(even);
        Ok(Layout {
            plain_blocks,
            padded_blocks: padded,
            transformed_blocks: scheme.transformed_len(padded),
            // C_0 (or the header IV it stands for) plus the encrypted blocks
            ciphertext_blocks: padded + 1,
            bastion_padded: even && padded != first(false),
        })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > u8::MAX as usize {
        return Err(Error::contract(format!("share count must be in 1..=255, got {n}")));
    }
    Ok(())
}

/// Per-message randomness. Never stored; kept separate so games can replay it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Randomness {
    pub iv: Block,
    pub message_key: Option<CipherKey>,
}

impl Randomness {
    /// Draw order: message key first (when the scheme uses one), then IV.
    pub fn draw(spec: BlockSpec, scheme: SchemeId, rng: &mut dyn RngCore) -> Self {
        let message_key = scheme.uses_message_key().then(|| spec.random_key(rng));
        Randomness {
            iv: spec.random_block(rng),
            message_key,
        }
    }
}

/// The result of sharing one message.
#[derive(Clone, Debug)]
pub struct Dispersal {
    pub shares: Vec<Share>,
    pub counters: OpCounters,
    pub phases: PhaseTimes,
    pub layout: Layout,
}

impl Dispersal {
    pub fn stored_blocks(&self) -> usize {
        self.shares.iter().map(Share::stored_blocks).sum()
    }

    pub fn stored_bytes(&self) -> usize {
        self.shares.iter().map(Share::stored_bytes).sum()
    }
}

/// Borrowed primitives a scheme needs; absent ones are rejected on use.
#[derive(Clone, Copy)]
pub struct Primitives<'a> {
    pub spec: BlockSpec,
    pub cipher: Option<&'a dyn BlockCipher>,
    pub oracle: Option<&'a dyn RandomOracleStream>,
    pub hash: Option<&'a SpongeOracle>,
    pub mode: CounterMode,
}

impl<'a> Primitives<'a> {
    pub fn with_cipher(cipher: &'a dyn BlockCipher) -> Self {
        Primitives {
            spec: cipher.spec(),
            cipher: Some(cipher),
            oracle: None,
            hash: None,
            mode: CounterMode::Xor,
        }
    }

    pub fn with_oracle(oracle: &'a dyn RandomOracleStream) -> Self {
        Primitives {
            spec: oracle.spec(),
            cipher: None,
            oracle: Some(oracle),
            hash: None,
            mode: CounterMode::Xor,
        }
    }

    pub(crate) fn cipher(&self) -> Result<&'a dyn BlockCipher> {
        self.cipher
            .ok_or_else(|| Error::contract("scheme needs a block cipher"))
    }

    pub(crate) fn oracle(&self) -> Result<&'a dyn RandomOracleStream> {
        self.oracle
            .ok_or_else(|| Error::contract("scheme needs a random oracle"))
    }

    pub(crate) fn hash(&self) -> Result<&'a SpongeOracle> {
        self.hash.ok_or_else(|| Error::contract("scheme needs a hash"))
    }
}

/// What a kernel leaves behind: transformed blocks live in `buf[start..]`.
pub(crate) struct KernelOut {
    pub start: usize,
    /// Block to secret-share across the shares, if any.
    pub secret: Option<Block>,
}

pub(crate) struct KernelCtx<'a, 'b> {
    pub prims: &'b Primitives<'a>,
    pub key: Option<&'b CipherKey>,
    pub counters: &'b mut OpCounters,
    pub phases: &'b mut PhaseTimes,
}

impl KernelCtx<'_, '_> {
    pub fn key(&self) -> Result<&CipherKey> {
        let key = self
            .key
            .ok_or_else(|| Error::contract("scheme needs the owner's key"))?;
        self.prims.spec.check(key.0)?;
        Ok(key)
    }
}

pub(crate) fn expect_scheme(shares: &[Share], ids: &[SchemeId]) -> Result<()> {
    match shares.first() {
        Some(s) if !ids.contains(&s.scheme) => Err(Error::CorruptSet(format!(
            "shares belong to {}, expected {}",
            s.scheme, ids[0]
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    *slot += t.elapsed();
    out
}

/// Deal transformed blocks to `n` fragments.
pub fn fragment(blocks: &[Block], n: usize, policy: FragmentationPolicy) -> Result<Vec<Vec<Block>>> {
    check_n(n)?;
    if !blocks.len().is_multiple_of(n) {
        return Err(Error::contract(format!(
            "{} blocks do not split into {n} equal fragments",
            blocks.len()
        )));
    }
    let m = blocks.len() / n;
    Ok(match policy {
        FragmentationPolicy::Contiguous => (0..n).map(|k| blocks[k * m..(k + 1) * m].to_vec()).collect(),
        FragmentationPolicy::Interleaved => (0..n)
            .map(|k| blocks.iter().skip(k).step_by(n).copied().collect())
            .collect(),
    })
}

/// Inverse of [`fragment`].
pub fn assemble(fragments: &[&[Block]], policy: FragmentationPolicy) -> Vec<Block> {
    let total: usize = fragments.iter().map(|f| f.len()).sum();
    let mut out = Vec::with_capacity(total + 2);
    match policy {
        FragmentationPolicy::Contiguous => {
            for f in fragments {
                out.extend_from_slice(f);
            }
        }
        FragmentationPolicy::Interleaved => {
            let m = fragments.first().map_or(0, |f| f.len());
            for j in 0..m {
                for f in fragments {
                    out.push(f[j]);
                }
            }
        }
    }
    out
}

/// Share `plaintext` bytes; the width must be byte aligned.
pub fn share_bytes(
    prims: &Primitives,
    scheme: SchemeId,
    key: Option<&CipherKey>,
    plaintext: &[u8],
    n: usize,
    policy: FragmentationPolicy,
    rng: &mut dyn RngCore,
) -> Result<Dispersal> {
    let rand = Randomness::draw(prims.spec, scheme, rng);
    let blocks = plaintext.len().div_ceil(prims.spec.bytes());
    encode_from(prims, scheme, key, &rand, Plain::Bytes(plaintext), blocks, plaintext.len() as u64, n, policy, rng)
}

/// Share whole blocks; the recorded length is `blocks.len() * spec.bytes()`.
pub fn share_blocks(
    prims: &Primitives,
    scheme: SchemeId,
    key: Option<&CipherKey>,
    blocks: &[Block],
    n: usize,
    policy: FragmentationPolicy,
    rng: &mut dyn RngCore,
) -> Result<Dispersal> {
    let rand = Randomness::draw(prims.spec, scheme, rng);
    let len = (blocks.len() * prims.spec.bytes()) as u64;
    encode(prims, scheme, key, &rand, blocks, len, n, policy, rng)
}

/// Deterministic core: all randomness except the sharing draws is given.
#[allow(clippy::too_many_arguments)]
pub fn encode(
    prims: &Primitives,
    scheme: SchemeId,
    key: Option<&CipherKey>,
    rand: &Randomness,
    plain: &[Block],
    plaintext_len: u64,
    n: usize,
    policy: FragmentationPolicy,
    pss_rng: &mut dyn RngCore,
) -> Result<Dispersal> {
    encode_from(prims, scheme, key, rand, Plain::Blocks(plain), plain.len(), plaintext_len, n, policy, pss_rng)
}

enum Plain<'a> {
    Blocks(&'a [Block]),
    Bytes(&'a [u8]),
}

#[allow(clippy::too_many_arguments)]
fn encode_from(
    prims: &Primitives,
    scheme: SchemeId,
    key: Option<&CipherKey>,
    rand: &Randomness,
    plain: Plain<'_>,
    plain_blocks: usize,
    plaintext_len: u64,
    n: usize,
    policy: FragmentationPolicy,
    pss_rng: &mut dyn RngCore,
) -> Result<Dispersal> {
    let spec = prims.spec;
    let layout = Layout::new(scheme, plain_blocks, n)?;
    if plaintext_len.div_ceil(spec.bytes() as u64) > plain_blocks as u64 {
        return Err(Error::contract(format!(
            "plaintext length {plaintext_len} exceeds {plain_blocks} blocks"
        )));
    }
    if scheme.uses_message_key() && rand.message_key.is_none() {
        return Err(Error::contract(format!("{scheme} needs a message key")));
    }
    let mut counters = OpCounters::default();
    let mut phases = PhaseTimes::default();

    let slot = usize::from(!matches!(
        scheme,
        SchemeId::RossakeBc | SchemeId::RossakeSponge
    ));
    let mut buf = Vec::with_capacity(layout.transformed_blocks + 1);
    buf.resize(slot, Block::ZERO);
    match plain {
        Plain::Blocks(b) => buf.extend_from_slice(b),
        Plain::Bytes(b) => spec.pack_into(b, &mut buf)?,
    }
    buf.resize(slot + layout.padded_blocks, Block::ZERO);

    let mut ctx = KernelCtx {
        prims,
        key,
        counters: &mut counters,
        phases: &mut phases,
    };
    let out = match scheme {
        SchemeId::CtrNaive => ctr_naive::forward(&mut ctx, rand, &mut buf)?,
        SchemeId::Ssms => ssms::forward(&mut ctx, rand, &mut buf)?,
        SchemeId::Ssake => ssake::forward(&mut ctx, rand, &mut buf)?,
        SchemeId::RossakeBc | SchemeId::RossakeSponge => rossake::forward(&mut ctx, rand, &mut buf)?,
        SchemeId::Bastion => bastion::forward(&mut ctx, rand, &mut buf)?,
        SchemeId::RivestAont => rivest::forward(&mut ctx, rand, &mut buf, false)?,
        SchemeId::RivestAon => rivest::forward(&mut ctx, rand, &mut buf, true)?,
    };
    let transformed = &buf[out.start..];
    debug_assert_eq!(transformed.len(), layout.transformed_blocks);

    let iv_shares = match out.secret {
        Some(secret) => {
            let set = timed(&mut phases.pss, || pss_split(spec, secret, n, pss_rng))?;
            counters.xor_block_ops += n as u64 - 1;
            Some(set.shares)
        }
        None => None,
    };

    let shares = timed(&mut phases.fragment, || -> Result<Vec<Share>> {
        Ok(fragment(transformed, n, policy)?
            .into_iter()
            .enumerate()
            .map(|(k, frag)| Share {
                scheme,
                index: k as u8 + 1,
                n: n as u8,
                spec,
                iv_share: iv_shares.as_ref().map(|s| s[k]),
                fragment: frag,
                plaintext_len,
                interleaved: policy == FragmentationPolicy::Interleaved,
                bastion_padded: layout.bastion_padded,
            })
            .collect())
    })?;

    Ok(Dispersal {
        shares,
        counters,
        phases,
        layout,
    })
}

/// Order and validate a complete share set.
pub fn check_share_set(shares: &[Share]) -> Result<Vec<&Share>> {
    let first = shares
        .first()
        .ok_or_else(|| Error::IncompleteSet { missing: vec![] })?;
    let n = first.n as usize;
    if n == 0 {
        return Err(Error::CorruptSet("share header declares n = 0".into()));
    }
    let mut slots: Vec<Option<&Share>> = vec![None; n];
    for s in shares {
        let same = s.scheme == first.scheme
            && s.n == first.n
            && s.spec == first.spec
            && s.plaintext_len == first.plaintext_len
            && s.interleaved == first.interleaved
            && s.bastion_padded == first.bastion_padded
            && s.fragment.len() == first.fragment.len();
        if !same {
            return Err(Error::CorruptSet(format!(
                "share {} disagrees with share {} on its header",
                s.index, first.index
            )));
        }
        if s.index == 0 || s.index as usize > n {
            return Err(Error::CorruptSet(format!("share index {} outside 1..={n}", s.index)));
        }
        if s.iv_share.is_some() != first.scheme.has_iv_share() {
            return Err(Error::CorruptSet(format!(
                "share {} {} an IV share for {}",
                s.index,
                if s.iv_share.is_some() { "carries" } else { "lacks" },
                first.scheme
            )));
        }
        for &b in s.fragment.iter().chain(s.iv_share.iter()) {
            s.spec
                .check(b)
                .map_err(|e| Error::CorruptSet(format!("share {}: {e}", s.index)))?;
        }
        let slot = &mut slots[s.index as usize - 1];
        if slot.is_some() {
            return Err(Error::CorruptSet(format!("duplicate share index {}", s.index)));
        }
        *slot = Some(s);
    }
    let missing: Vec<u8> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_none())
        .map(|(k, _)| k as u8 + 1)
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteSet { missing });
    }
    Ok(slots.into_iter().map(|s| s.expect("checked")).collect())
}

/// Recover the padded plaintext blocks, truncated to the recorded length.
pub fn reconstruct_blocks(
    prims: &Primitives,
    key: Option<&CipherKey>,
    shares: &[Share],
) -> Result<Vec<Block>> {
    let ordered = check_share_set(shares)?;
    let head = ordered[0];
    let scheme = head.scheme;
    if head.spec != prims.spec {
        return Err(Error::WidthMismatch {
            left: prims.spec.bits(),
            right: head.spec.bits(),
        });
    }
    let frags: Vec<&[Block]> = ordered.iter().map(|s| s.fragment.as_slice()).collect();
    let mut buf = Vec::with_capacity(frags.iter().map(|f| f.len()).sum::<usize>() + 1);
    if scheme == SchemeId::Ssake {
        // room for C_0, which the chain dropped
        buf.push(Block::ZERO);
    }
    buf.extend(assemble(&frags, head.policy()));
    let secret = if scheme.has_iv_share() {
        let set = BlockShareSet {
            spec: head.spec,
            shares: ordered.iter().map(|s| s.iv_share.expect("checked")).collect(),
        };
        Some(pss_reconstruct(&set)?)
    } else {
        None
    };

    let mut counters = OpCounters::default();
    let mut phases = PhaseTimes::default();
    let mut ctx = KernelCtx {
        prims,
        key,
        counters: &mut counters,
        phases: &mut phases,
    };
    let range = match scheme {
        SchemeId::CtrNaive => ctr_naive::inverse(&mut ctx, &mut buf)?,
        SchemeId::Ssms => ssms::inverse(&mut ctx, secret, &mut buf)?,
        SchemeId::Ssake => ssake::inverse(&mut ctx, secret, &mut buf)?,
        SchemeId::RossakeBc | SchemeId::RossakeSponge => rossake::inverse(&mut ctx, secret, &mut buf)?,
        SchemeId::Bastion => bastion::inverse(&mut ctx, &mut buf)?,
        SchemeId::RivestAont => rivest::inverse(&mut ctx, &mut buf, false)?,
        SchemeId::RivestAon => rivest::inverse(&mut ctx, &mut buf, true)?,
    };
    let want = head.plaintext_len.div_ceil(head.spec.bytes() as u64) as usize;
    let plain = &buf[range];
    if want > plain.len() {
        return Err(Error::CorruptSet(format!(
            "recorded length {} exceeds the {} recovered blocks",
            head.plaintext_len,
            plain.len()
        )));
    }
    Ok(plain[..want].to_vec())
}

/// Recover the plaintext bytes.
pub fn reconstruct_bytes(
    prims: &Primitives,
    key: Option<&CipherKey>,
    shares: &[Share],
) -> Result<Vec<u8>> {
    let blocks = reconstruct_blocks(prims, key, shares)?;
    let len = shares[0].plaintext_len as usize;
    prims.spec.unpack(&blocks, len)
}

/// An owned bundle of primitives covering every scheme.
pub struct Suite {
    spec: BlockSpec,
    cipher: Box<dyn BlockCipher>,
    bc_oracle: Box<dyn RandomOracleStream>,
    sponge: SpongeOracle,
    mode: CounterMode,
}

impl Suite {
    pub fn new(
        cipher: Box<dyn BlockCipher>,
        bc_oracle: Box<dyn RandomOracleStream>,
        sponge: SpongeOracle,
    ) -> Result<Self> {
        let spec = cipher.spec();
        for other in [bc_oracle.spec(), sponge.spec()] {
            if other != spec {
                return Err(Error::WidthMismatch {
                    left: spec.bits(),
                    right: other.bits(),
                });
            }
        }
        Ok(Suite {
            spec,
            cipher,
            bc_oracle,
            sponge,
            mode: CounterMode::Xor,
        })
    }

    /// AES-128, AES-256 counter-mode oracle, SHAKE128 at `b = 128`.
    pub fn production() -> Self {
        Suite::new(
            Box::new(Aes128Cipher),
            Box::new(CounterModeOracle::new(Aes256WideCipher)),
            SpongeOracle::shake128(BlockSpec::B128),
        )
        .expect("widths agree")
    }

    /// Table permutations at `bits <= 20`, seeded by `seed`.
    pub fn toy(bits: u32, seed: u64) -> Result<Self> {
        Suite::new(
            Box::new(ToyCipher::new(bits, seed)?),
            Box::new(CounterModeOracle::new(ToyWideCipher::new(bits, seed)?)),
            SpongeOracle::shake128(BlockSpec::new(bits)?),
        )
    }

    /// The linear XOR test doubles, for hand-checkable vectors.
    pub fn xor_test(bits: u32) -> Result<Self> {
        let spec = BlockSpec::new(bits)?;
        Suite::new(
            Box::new(XorTestCipher::new(spec)),
            Box::new(CounterModeOracle::new(XorWideTestCipher::new(spec))),
            SpongeOracle::shake128(spec),
        )
    }

    pub fn with_counter_mode(mut self, mode: CounterMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn spec(&self) -> BlockSpec {
        self.spec
    }

    pub fn cipher(&self) -> &dyn BlockCipher {
        &*self.cipher
    }

    pub fn sponge(&self) -> &SpongeOracle {
        &self.sponge
    }

    /// Primitives as seen by `scheme` (selects the oracle variant).
    pub fn primitives(&self, scheme: SchemeId) -> Primitives<'_> {
        let oracle: &dyn RandomOracleStream = match scheme {
            SchemeId::RossakeSponge => &self.sponge,
            _ => &*self.bc_oracle,
        };
        Primitives {
            spec: self.spec,
            cipher: Some(&*self.cipher),
            oracle: Some(oracle),
            hash: Some(&self.sponge),
            mode: self.mode,
        }
    }

    pub fn share(
        &self,
        scheme: SchemeId,
        key: Option<&CipherKey>,
        plaintext: &[u8],
        n: usize,
        policy: FragmentationPolicy,
        rng: &mut dyn RngCore,
    ) -> Result<Dispersal> {
        share_bytes(&self.primitives(scheme), scheme, key, plaintext, n, policy, rng)
    }

    pub fn share_blocks(
        &self,
        scheme: SchemeId,
        key: Option<&CipherKey>,
        blocks: &[Block],
        n: usize,
        policy: FragmentationPolicy,
        rng: &mut dyn RngCore,
    ) -> Result<Dispersal> {
        share_blocks(&self.primitives(scheme), scheme, key, blocks, n, policy, rng)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn encode(
        &self,
        scheme: SchemeId,
        key: Option<&CipherKey>,
        rand: &Randomness,
        plain: &[Block],
        plaintext_len: u64,
        n: usize,
        policy: FragmentationPolicy,
        pss_rng: &mut dyn RngCore,
    ) -> Result<Dispersal> {
        encode(
            &self.primitives(scheme),
            scheme,
            key,
            rand,
            plain,
            plaintext_len,
            n,
            policy,
            pss_rng,
        )
    }

    pub fn reconstruct(&self, key: Option<&CipherKey>, shares: &[Share]) -> Result<Vec<u8>> {
        let scheme = shares
            .first()
            .ok_or_else(|| Error::IncompleteSet { missing: vec![] })?
            .scheme;
        reconstruct_bytes(&self.primitives(scheme), key, shares)
    }

    pub fn reconstruct_blocks(&self, key: Option<&CipherKey>, shares: &[Share]) -> Result<Vec<Block>> {
        let scheme = shares
            .first()
            .ok_or_else(|| Error::IncompleteSet { missing: vec![] })?
            .scheme;
        reconstruct_blocks(&self.primitives(scheme), key, shares)
    }
}
