//! Per-path random streams.
//!
//! Path `i` of a run with base seed `s` draws its normals from
//! `ChaCha8Rng::seed_from_u64(s)` on stream `2i` and its bridge uniforms from
//! stream `2i + 1`. Normals come from `rand_distr::StandardNormal`. Keeping
//! the two streams apart means switching the bridge correction on or off
//! does not change the Brownian path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn normal_stream(seed: u64, path: u64) -> ChaCha8Rng {
    stream(seed, 2 * path)
}

pub fn uniform_stream(seed: u64, path: u64) -> ChaCha8Rng {
    stream(seed, 2 * path + 1)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
