//! Fixed pseudo-random encoder for plumbing runs and tests.
//!
//! Token vectors are a seeded hash embedding of the token id pushed through
//! two fixed affine-plus-tanh layers; nothing here is trainable and nothing
//! depends on surrounding context. Useful wherever the pipeline shape
//! matters and the scores do not.

use alloc::vec::Vec;

use crate::math;

use super::{Encoder, EncoderOutput, TokenizedPair};

/// Dimensionality of the mock embedding space.
pub const MOCK_DIM: usize = 32;

/// Deterministic context-free encoder. Distinct seeds give unrelated
/// embeddings; the same seed always gives the same ones.
#[derive(Debug, Clone)]
pub struct MockEncoder {
    seed: u64,
    vocab_size: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// SplitMix64 step; the standard finalizer keeps the stream platform-stable.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps a hash to [-1, 1].
fn unit(h: u64) -> f64 {
    (h as f64) / (u64::MAX as f64) * 2.0 - 1.0
}

impl MockEncoder {
    pub fn new(seed: u64, vocab_size: usize) -> MockEncoder {
        let layer = |tag: u64, rows: usize, cols: usize, scale: f64| -> Vec<f64> {
            (0..rows * cols)
                .map(|i| unit(splitmix64(seed ^ tag.wrapping_mul(0x9e3779b97f4a7c15) ^ i as u64)) * scale)
                .collect()
        };
        MockEncoder {
            seed,
            vocab_size,
            w1: layer(1, MOCK_DIM, MOCK_DIM, 0.4),
            b1: layer(2, MOCK_DIM, 1, 0.1),
            w2: layer(3, MOCK_DIM, MOCK_DIM, 0.4),
            b2: layer(4, MOCK_DIM, 1, 0.1),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn raw_embedding(&self, token_id: u32) -> Vec<f64> {
        (0..MOCK_DIM)
            .map(|k| unit(splitmix64(self.seed ^ 0xa076_1d64_78bd_642f ^ ((token_id as u64) << 16) ^ k as u64)))
            .collect()
    }

    fn token_vector(&self, token_id: u32) -> Vec<f64> {
        let e = self.raw_embedding(token_id);
        let mut h1 = Vec::with_capacity(MOCK_DIM);
        for r in 0..MOCK_DIM {
            let mut acc = self.b1[r];
            for c in 0..MOCK_DIM {
                acc += self.w1[r * MOCK_DIM + c] * e[c];
            }
            h1.push(math::tanh(acc));
        }
        let mut h2 = Vec::with_capacity(MOCK_DIM);
        for r in 0..MOCK_DIM {
            let mut acc = self.b2[r];
            for c in 0..MOCK_DIM {
                acc += self.w2[r * MOCK_DIM + c] * h1[c];
            }
            h2.push(math::tanh(acc));
        }
        h2
    }
}

impl Encoder for MockEncoder {
    fn dim(&self) -> usize {
        MOCK_DIM
    }

    fn encode(&self, pair: &TokenizedPair) -> EncoderOutput {
        let mut data = Vec::with_capacity(pair.len() * MOCK_DIM);
        for &id in &pair.ids {
            data.extend_from_slice(&self.token_vector(id));
        }
        EncoderOutput::new(data, MOCK_DIM).expect("row-major by construction")
    }

    fn lm_logits(&self, pair: &TokenizedPair, position: usize) -> Vec<f64> {
        let h = self.token_vector(pair.ids[position]);
        (0..self.vocab_size as u32)
            .map(|v| {
                let e = self.token_vector(v);
                e.iter().zip(&h).map(|(a, b)| a * b).sum()
            })
            .collect()
    }
}
