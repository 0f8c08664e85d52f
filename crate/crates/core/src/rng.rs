//! The generator behind every random draw. ChaCha8 is portable and
//! word-for-word reproducible across platforms, and its stream parameter
//! gives independent substreams from one seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DpgRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> DpgRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator seeded with `seed`.
pub fn substream(seed: u64, stream: u64) -> DpgRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
