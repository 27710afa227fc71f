//! Exposed-key security experiments, pad samplers and uniformity statistics.

pub mod adversaries;
pub mod checks;
pub mod games;
pub mod samplers;
pub mod stats;

pub use adversaries::{
    adversary_by_name, all_adversaries, ctr_distinguisher, IvCollectAdversary, IvGuessAdversary,
    PairCtrAdversary, PrefixAdversary,
};
pub use checks::{matrices_check, prop1_check, prop4_check, MatrixReport, UniformityReport};
pub use games::{run_cake_game, run_sake_game, Adversary, GameConfig, GameContext, Slot, View};
pub use samplers::{sample_diff_vector, sample_pad_bastion, SigmaSource};
pub use stats::{chi_square_uniform_on, chi_square_uniformity, AdvantageReport, ChiSquareReport, Verdict};
