//! Replay helpers for worked examples: an RNG that yields a fixed script.

use rand::RngCore;

use crate::block::BlockSpec;

/// Yields the scripted bytes in order and panics once they run out.
#[derive(Clone, Debug)]
pub struct ScriptedRng {
    bytes: Vec<u8>,
    pos: usize,
}

impl ScriptedRng {
    pub fn new(bytes: &[u8]) -> Self {
        ScriptedRng {
            bytes: bytes.to_vec(),
            pos: 0,
        }
    }

    /// Script whose successive block draws at width `spec` are `values`.
    pub fn from_blocks(spec: BlockSpec, values: &[u128]) -> Self {
        let mut bytes = Vec::new();
        for &v in values {
            spec.write_block(crate::block::Block(v), &mut bytes);
        }
        ScriptedRng { bytes, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

impl RngCore for ScriptedRng {
    fn next_u32(&mut self) -> u32 {
        let mut b = [0u8; 4];
        self.fill_bytes(&mut b);
        u32::from_be_bytes(b)
    }

    fn next_u64(&mut self) -> u64 {
        let mut b = [0u8; 8];
        self.fill_bytes(&mut b);
        u64::from_be_bytes(b)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        let end = self.pos + dest.len();
        assert!(end <= self.bytes.len(), "scripted randomness exhausted");
        dest.copy_from_slice(&self.bytes[self.pos..end]);
        self.pos = end;
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
