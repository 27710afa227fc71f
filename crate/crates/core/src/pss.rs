//! Additive n-of-n sharing of one block.

use rand::RngCore;

use crate::block::{xor_all, Block, BlockSpec};
use crate::error::{Error, Result};

/// `n` blocks whose XOR is the secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockShareSet {
    pub spec: BlockSpec,
    pub shares: Vec<Block>,
}

impl BlockShareSet {
    pub fn n(&self) -> usize {
        self.shares.len()
    }
}

/// Shares `1..n-1` are raw draws from `rng`; share `n` closes the XOR.
pub fn pss_split(
    spec: BlockSpec,
    secret: Block,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<BlockShareSet> {
    if n == 0 {
        return Err(Error::contract("secret sharing needs n >= 1"));
    }
    spec.check(secret)?;
    let mut shares: Vec<Block> = (0..n - 1).map(|_| spec.random_block(rng)).collect();
    shares.push(secret ^ xor_all(&shares));
    Ok(BlockShareSet { spec, shares })
}

pub fn pss_reconstruct(set: &BlockShareSet) -> Result<Block> {
    if set.shares.is_empty() {
        return Err(Error::contract("cannot reconstruct from an empty share set"));
    }
    for &s in &set.shares {
        set.spec.check(s)?;
    }
    Ok(xor_all(&set.shares))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;
    use crate::testutil::ScriptedRng;
    use proptest::prelude::*;

    fn b8() -> BlockSpec {
        BlockSpec::new(8).unwrap()
    }

    #[test]
    fn scripted_examples() {
        let mut rng = ScriptedRng::new(&[0x11, 0x22]);
        let set = pss_split(b8(), Block(0xA5), 3, &mut rng).unwrap();
        assert_eq!(set.shares, vec![Block(0x11), Block(0x22), Block(0x96)]);
        assert_eq!(pss_reconstruct(&set).unwrap(), Block(0xA5));

        let mut rng = ScriptedRng::new(&[0x13]);
        let set = pss_split(b8(), Block(0x20), 2, &mut rng).unwrap();
        assert_eq!(set.shares, vec![Block(0x13), Block(0x33)]);
        assert_eq!(pss_reconstruct(&set).unwrap(), Block(0x20));
    }

    #[test]
    fn degenerate_and_errors() {
        let mut rng = DeterministicRng::new(1);
        let set = pss_split(b8(), Block(0x5C), 1, &mut rng).unwrap();
        assert_eq!(set.shares, vec![Block(0x5C)]);
        assert!(pss_split(b8(), Block(1), 0, &mut rng).is_err());
        let empty = BlockShareSet {
            spec: b8(),
            shares: vec![],
        };
        assert!(pss_reconstruct(&empty).is_err());
    }

    proptest! {
        #[test]
        fn split_then_reconstruct(secret in any::<u128>(), n in 1usize..12, seed in any::<u64>()) {
            let spec = BlockSpec::B128;
            let mut rng = DeterministicRng::new(seed);
            let set = pss_split(spec, Block(secret), n, &mut rng).unwrap();
            prop_assert_eq!(set.n(), n);
            prop_assert_eq!(pss_reconstruct(&set).unwrap(), Block(secret));
        }

        #[test]
        fn first_shares_ignore_the_secret(a in any::<u16>(), b in any::<u16>(), n in 2usize..8, seed in any::<u64>()) {
            let spec = BlockSpec::new(16).unwrap();
            let x = pss_split(spec, Block(a as u128), n, &mut DeterministicRng::new(seed)).unwrap();
            let y = pss_split(spec, Block(b as u128), n, &mut DeterministicRng::new(seed)).unwrap();
            prop_assert_eq!(&x.shares[..n - 1], &y.shares[..n - 1]);
        }
    }
}
