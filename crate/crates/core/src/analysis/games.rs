//! Indistinguishability experiments with the user key handed to the adversary.
//!
//! SAKE: the adversary adaptively reads `n - 1` whole shares.
//! CAKE: the adversary reads all but `λ` stored blocks of its choosing.

use rand::RngCore;
use serde::Serialize;

use crate::analysis::stats::AdvantageReport;
use crate::block::{Block, BlockSpec, CipherKey};
use crate::error::{Error, Result};
use crate::rng::DeterministicRng;
use crate::schemes::{Dispersal, FragmentationPolicy, Layout, Randomness, SchemeId, Share, Suite};

/// Fewest trials a game accepts.
pub const MIN_TRIALS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GameConfig {
    pub scheme: SchemeId,
    pub toy_bits: u32,
    pub trials: u64,
    pub n: usize,
    pub plaintext_blocks: usize,
    /// Blocks withheld from a CAKE adversary; ignored by SAKE.
    pub lambda: usize,
    pub policy: FragmentationPolicy,
    pub seed: u64,
}

impl GameConfig {
    pub fn new(scheme: SchemeId, toy_bits: u32, trials: u64) -> Self {
        GameConfig {
            scheme,
            toy_bits,
            trials,
            n: 3,
            plaintext_blocks: 8,
            lambda: 1,
            policy: FragmentationPolicy::Contiguous,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::contract(format!(
                "a game needs at least {MIN_TRIALS} trials, got {}",
                self.trials
            )));
        }
        if self.n < 2 {
            return Err(Error::contract("a game needs n >= 2 shares"));
        }
        if self.plaintext_blocks == 0 {
            return Err(Error::contract("a game needs a non-empty plaintext"));
        }
        Ok(())
    }
}

/// One stored block: an IV share or a position in the transformed sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    IvShare { share: u8 },
    Transformed { position: usize },
}

/// What the adversary has read.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct View {
    pub blocks: Vec<(Slot, Block)>,
}

impl View {
    pub fn get(&self, slot: Slot) -> Option<Block> {
        self.blocks.iter().find(|(s, _)| *s == slot).map(|(_, b)| *b)
    }

    pub fn at(&self, position: usize) -> Option<Block> {
        self.get(Slot::Transformed { position })
    }

    pub fn iv_shares(&self) -> Vec<Block> {
        self.blocks
            .iter()
            .filter(|(s, _)| matches!(s, Slot::IvShare { .. }))
            .map(|(_, b)| *b)
            .collect()
    }

    /// Transformed positions read, ascending.
    pub fn positions(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .blocks
            .iter()
            .filter_map(|(s, _)| match s {
                Slot::Transformed { position } => Some(*position),
                Slot::IvShare { .. } => None,
            })
            .collect();
        p.sort_unstable();
        p
    }
}

/// Fixed public parameters of one game.
pub struct GameContext<'a> {
    pub suite: &'a Suite,
    pub scheme: SchemeId,
    pub n: usize,
    pub plaintext_blocks: usize,
    pub policy: FragmentationPolicy,
    pub layout: Layout,
}

impl GameContext<'_> {
    pub fn spec(&self) -> BlockSpec {
        self.suite.spec()
    }

    /// Blocks per fragment.
    pub fn fragment_len(&self) -> usize {
        self.layout.transformed_blocks / self.n
    }

    /// 1-based share index holding a transformed position.
    pub fn share_of(&self, position: usize) -> u8 {
        let k = match self.policy {
            FragmentationPolicy::Contiguous => position / self.fragment_len(),
            FragmentationPolicy::Interleaved => position % self.n,
        };
        k as u8 + 1
    }

    fn position(&self, share: u8, j: usize) -> usize {
        let k = share as usize - 1;
        match self.policy {
            FragmentationPolicy::Contiguous => k * self.fragment_len() + j,
            FragmentationPolicy::Interleaved => j * self.n + k,
        }
    }

    /// Every stored slot, IV shares first.
    pub fn all_slots(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        if self.scheme.has_iv_share() {
            out.extend((1..=self.n as u8).map(|share| Slot::IvShare { share }));
        }
        out.extend((0..self.layout.transformed_blocks).map(|position| Slot::Transformed { position }));
        out
    }

    /// All slots stored in one share.
    pub fn share_view(&self, share: &Share) -> View {
        let mut blocks = Vec::with_capacity(share.fragment.len() + 1);
        if let Some(iv) = share.iv_share {
            blocks.push((Slot::IvShare { share: share.index }, iv));
        }
        for (j, &b) in share.fragment.iter().enumerate() {
            blocks.push((Slot::Transformed { position: self.position(share.index, j) }, b));
        }
        View { blocks }
    }

    /// Read the chosen slots out of a dispersal.
    pub fn block_view(&self, dispersal: &Dispersal, slots: &[Slot]) -> View {
        let mut full = View::default();
        for share in &dispersal.shares {
            full.blocks.extend(self.share_view(share).blocks);
        }
        View {
            blocks: slots
                .iter()
                .filter_map(|&s| full.get(s).map(|b| (s, b)))
                .collect(),
        }
    }

    /// Stored blocks `c` of one message, counting IV-share slots.
    pub fn stored_blocks(&self) -> usize {
        self.layout.transformed_blocks + if self.scheme.has_iv_share() { self.n } else { 0 }
    }
}

/// The key the experiment hands to the adversary: the user key, or the
/// message key for schemes whose cipher runs only under `K1`.
pub fn exposed_key(scheme: SchemeId, user: &CipherKey, rand: &Randomness) -> CipherKey {
    match (scheme, rand.message_key) {
        (SchemeId::Ssms | SchemeId::RivestAont, Some(k1)) => k1,
        _ => *user,
    }
}

pub trait Adversary: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, scheme: SchemeId) -> bool {
        let _ = scheme;
        true
    }

    /// Two equal-length plaintexts `(P_0, P_1)`.
    fn choose_plaintexts(
        &self,
        ctx: &GameContext,
        rng: &mut DeterministicRng,
    ) -> (Vec<Block>, Vec<Block>);

    /// SAKE: next share to read (1-based), given those already read.
    fn next_share_query(&self, ctx: &GameContext, read: &[u8], rng: &mut DeterministicRng) -> u8 {
        let _ = rng;
        (1..=ctx.n as u8)
            .find(|k| !read.contains(k))
            .expect("fewer than n queries")
    }

    /// CAKE: up to `budget` slots out of `available`.
    fn choose_blocks(
        &self,
        ctx: &GameContext,
        available: &[Slot],
        budget: usize,
        rng: &mut DeterministicRng,
    ) -> Vec<Slot> {
        let _ = (ctx, rng);
        available.iter().copied().take(budget).collect()
    }

    /// Guess which plaintext was shared.
    fn guess(&self, ctx: &GameContext, view: &View, key: &CipherKey, rng: &mut DeterministicRng) -> bool;
}

struct Trial {
    dispersal: Dispersal,
    key: CipherKey,
    bit: bool,
}

fn run_game(
    suite: &Suite,
    adversary: &dyn Adversary,
    cfg: &GameConfig,
    observe: impl Fn(&GameContext, &Trial, &mut DeterministicRng) -> Result<View>,
) -> Result<AdvantageReport> {
    cfg.validate()?;
    if suite.spec().bits() != cfg.toy_bits {
        return Err(Error::WidthMismatch {
            left: suite.spec().bits(),
            right: cfg.toy_bits,
        });
    }
    if !adversary.supports(cfg.scheme) {
        return Err(Error::contract(format!(
            "adversary '{}' does not target {}",
            adversary.name(),
            cfg.scheme
        )));
    }
    let ctx = GameContext {
        suite,
        scheme: cfg.scheme,
        n: cfg.n,
        plaintext_blocks: cfg.plaintext_blocks,
        policy: cfg.policy,
        layout: Layout::new(cfg.scheme, cfg.plaintext_blocks, cfg.n)?,
    };
    let spec = suite.spec();
    let root = DeterministicRng::new(cfg.seed);
    let user_key = spec.random_key(&mut root.fork(u64::MAX));
    let mut wins = 0u64;
    for trial in 0..cfg.trials {
        let mut rng = root.fork(trial);
        let (p0, p1) = adversary.choose_plaintexts(&ctx, &mut rng);
        if p0.len() != cfg.plaintext_blocks || p1.len() != cfg.plaintext_blocks {
            return Err(Error::contract(format!(
                "plaintexts of {} and {} blocks, game expects {}",
                p0.len(),
                p1.len(),
                cfg.plaintext_blocks
            )));
        }
        let bit = coin(&mut rng);
        let rand = Randomness::draw(spec, cfg.scheme, &mut rng);
        let plain = if bit { &p1 } else { &p0 };
        let len = (plain.len() * spec.bytes()) as u64;
        let dispersal = suite.encode(
            cfg.scheme,
            Some(&user_key),
            &rand,
            plain,
            len,
            cfg.n,
            cfg.policy,
            &mut rng,
        )?;
        let t = Trial {
            dispersal,
            key: exposed_key(cfg.scheme, &user_key, &rand),
            bit,
        };
        let view = observe(&ctx, &t, &mut rng)?;
        if adversary.guess(&ctx, &view, &t.key, &mut rng) == t.bit {
            wins += 1;
        }
    }
    AdvantageReport::from_counts(wins, cfg.trials)
}

/// The SAKE experiment over `cfg.trials` independent messages.
pub fn run_sake_game(
    suite: &Suite,
    adversary: &dyn Adversary,
    cfg: &GameConfig,
) -> Result<AdvantageReport> {
    run_game(suite, adversary, cfg, |ctx, t, rng| {
        let mut read: Vec<u8> = Vec::with_capacity(ctx.n - 1);
        let mut view = View::default();
        for _ in 0..ctx.n - 1 {
            let k = adversary.next_share_query(ctx, &read, rng);
            if k == 0 || k as usize > ctx.n || read.contains(&k) {
                return Err(Error::contract(format!("invalid share query {k}")));
            }
            read.push(k);
            let share = &t.dispersal.shares[k as usize - 1];
            view.blocks.extend(ctx.share_view(share).blocks);
        }
        Ok(view)
    })
}

/// The CAKE experiment: `λ` of the `c` stored blocks stay hidden.
pub fn run_cake_game(
    suite: &Suite,
    adversary: &dyn Adversary,
    cfg: &GameConfig,
) -> Result<AdvantageReport> {
    let c = {
        let layout = Layout::new(cfg.scheme, cfg.plaintext_blocks.max(1), cfg.n.max(1))?;
        layout.transformed_blocks + if cfg.scheme.has_iv_share() { cfg.n } else { 0 }
    };
    if cfg.lambda > c {
        return Err(Error::contract(format!(
            "lambda = {} exceeds the {c} stored blocks",
            cfg.lambda
        )));
    }
    run_game(suite, adversary, cfg, |ctx, t, rng| {
        let available = ctx.all_slots();
        let budget = available.len() - cfg.lambda;
        let chosen = adversary.choose_blocks(ctx, &available, budget, rng);
        let mut seen = chosen.clone();
        seen.sort_unstable();
        seen.dedup();
        if chosen.len() > budget || seen.len() != chosen.len() || !chosen.iter().all(|s| available.contains(s)) {
            return Err(Error::contract(format!(
                "adversary chose {} slots with a budget of {budget}",
                chosen.len()
            )));
        }
        Ok(ctx.block_view(&t.dispersal, &chosen))
    })
}

/// A fair bit from the trial stream.
pub(crate) fn coin(rng: &mut DeterministicRng) -> bool {
    rng.next_u32() & 1 == 1
}
