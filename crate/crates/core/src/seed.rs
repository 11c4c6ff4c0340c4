//! Keyed seed derivation.
//!
//! Every random stream in the crate is derived from a user seed plus a key
//! (a pair id, a resample index) so results do not depend on iteration order
//! or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(seed: u64, key: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"rat-seed/v1");
    h.update(seed.to_le_bytes());
    h.update((key.len() as u64).to_le_bytes());
    h.update(key);
    h.finalize().into()
}

pub fn keyed_rng(seed: u64, key: &[u8]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(seed, key))
}
