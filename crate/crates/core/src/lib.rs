pub mod analysis;
pub mod bench;
pub mod block;
pub mod cipher;
pub mod ctr;
pub mod error;
pub mod matrix;
pub mod pss;
pub mod ro;
pub mod rng;
pub mod testutil;
pub mod transforms;
pub mod schemes;
pub mod storage;
