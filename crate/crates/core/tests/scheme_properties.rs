use kexshard::analysis::{adversary_by_name, run_sake_game, GameConfig};
use kexshard::block::BlockSpec;
use kexshard::rng::DeterministicRng;
use kexshard::schemes::{assemble, FragmentationPolicy, SchemeId, Suite};
use kexshard::storage::encode_share;
use proptest::prelude::*;

fn scheme() -> impl Strategy<Value = SchemeId> {
    prop::sample::select(SchemeId::ALL.to_vec())
}

fn policy() -> impl Strategy<Value = FragmentationPolicy> {
    prop_oneof![
        Just(FragmentationPolicy::Contiguous),
        Just(FragmentationPolicy::Interleaved)
    ]
}

fn xor_ops(scheme: SchemeId, c: u64, n: u64) -> u64 {
    match scheme {
        SchemeId::CtrNaive => 0,
        SchemeId::Ssms | SchemeId::RossakeBc | SchemeId::RossakeSponge => n - 1,
        SchemeId::Ssake => c + n - 2,
        SchemeId::Bastion => 2 * c - 1,
        SchemeId::RivestAont | SchemeId::RivestAon => 1,
    }
}

/// Stored blocks in terms of the ciphertext size `c`.
fn stored_blocks(scheme: SchemeId, c: usize, n: usize) -> usize {
    match scheme {
        SchemeId::CtrNaive | SchemeId::Bastion => c,
        SchemeId::Ssms => c + n,
        SchemeId::Ssake | SchemeId::RossakeBc | SchemeId::RossakeSponge => c + n - 1,
        SchemeId::RivestAont | SchemeId::RivestAon => c + 1,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_production(
        scheme in scheme(),
        data in prop::collection::vec(any::<u8>(), 0..600),
        n in 1usize..9,
        policy in policy(),
        seed in any::<u64>(),
    ) {
        let suite = Suite::production();
        let mut rng = DeterministicRng::new(seed);
        let key = suite.spec().random_key(&mut rng);
        let d = suite.share(scheme, Some(&key), &data, n, policy, &mut rng).unwrap();
        prop_assert_eq!(d.shares.len(), n);
        let back = suite.reconstruct(Some(&key), &d.shares).unwrap();
        prop_assert_eq!(back, data);
    }

    #[test]
    fn round_trip_toy_widths(
        scheme in scheme(),
        bits in prop::sample::select(vec![8u32, 16]),
        data in prop::collection::vec(any::<u8>(), 0..200),
        n in 1usize..6,
        policy in policy(),
        seed in any::<u64>(),
    ) {
        let suite = Suite::toy(bits, seed).unwrap();
        let mut rng = DeterministicRng::new(seed ^ 1);
        let key = suite.spec().random_key(&mut rng);
        let d = suite.share(scheme, Some(&key), &data, n, policy, &mut rng).unwrap();
        let back = suite.reconstruct(Some(&key), &d.shares).unwrap();
        prop_assert_eq!(back, data);
    }

    #[test]
    fn accounting_and_partition(
        scheme in scheme(),
        blocks in 1usize..80,
        n in 1usize..9,
        policy in policy(),
        seed in any::<u64>(),
    ) {
        let suite = Suite::production();
        let mut rng = DeterministicRng::new(seed);
        let key = suite.spec().random_key(&mut rng);
        let data = vec![0x5au8; blocks * 16];
        let d = suite.share(scheme, Some(&key), &data, n, policy, &mut rng).unwrap();
        let c = d.layout.ciphertext_blocks;
        prop_assert_eq!(d.counters.xor_block_ops, xor_ops(scheme, c as u64, n as u64));
        prop_assert_eq!(d.stored_blocks(), stored_blocks(scheme, c, n));

        let len = d.shares[0].fragment.len();
        prop_assert!(d.shares.iter().all(|s| s.fragment.len() == len));
        let frags: Vec<&[_]> = d.shares.iter().map(|s| s.fragment.as_slice()).collect();
        prop_assert_eq!(assemble(&frags, policy).len(), d.layout.transformed_blocks);
    }

    #[test]
    fn key_never_stored(
        scheme in prop::sample::select(
            SchemeId::ALL.iter().copied().filter(|s| s.needs_key()).collect::<Vec<_>>()
        ),
        blocks in 1usize..40,
        n in 1usize..6,
        seed in any::<u64>(),
    ) {
        let suite = Suite::production();
        let mut rng = DeterministicRng::new(seed);
        let key = suite.spec().random_key(&mut rng);
        let needle = BlockSpec::B128.block_to_bytes(key.0);
        let mut data = vec![0u8; blocks * 16];
        rand::RngCore::fill_bytes(&mut rng, &mut data);
        let d = suite.share(scheme, Some(&key), &data, n, FragmentationPolicy::Contiguous, &mut rng).unwrap();
        for s in &d.shares {
            let bytes = encode_share(s).unwrap();
            prop_assert!(!bytes.windows(16).any(|w| w == needle.as_slice()));
        }
    }
}

#[test]
fn ssake_halves_bastion_overhead_when_c_at_least_2n() {
    let suite = Suite::production();
    let mut rng = DeterministicRng::new(3);
    let key = suite.spec().random_key(&mut rng);
    for n in 1..=8usize {
        for blocks in [2 * n, 4 * n + 1, 64] {
            let data = vec![1u8; blocks * 16];
            let p = FragmentationPolicy::Contiguous;
            let s = suite.share(SchemeId::Ssake, Some(&key), &data, n, p, &mut rng).unwrap();
            let b = suite.share(SchemeId::Bastion, Some(&key), &data, n, p, &mut rng).unwrap();
            let c = s.layout.ciphertext_blocks;
            assert!(c >= 2 * n);
            let (xs, xb) = (s.counters.xor_block_ops as f64, b.counters.xor_block_ops as f64);
            assert!(
                xs < xb / 2.0 + n as f64,
                "n={n} blocks={blocks} c_ssake={c} c_bastion={} ssake={xs} bastion={xb}",
                b.layout.ciphertext_blocks
            );
        }
    }
}

#[test]
fn game_replays_are_identical() {
    let suite = Suite::toy(10, 7).unwrap();
    for name in ["prefix", "pair-ctr"] {
        let adv = adversary_by_name(name).unwrap();
        let mut cfg = GameConfig::new(SchemeId::Ssake, 10, 200);
        cfg.seed = 99;
        let a = run_sake_game(&suite, adv.as_ref(), &cfg).unwrap();
        let b = run_sake_game(&suite, adv.as_ref(), &cfg).unwrap();
        assert_eq!(a, b, "{name}");
    }
}
