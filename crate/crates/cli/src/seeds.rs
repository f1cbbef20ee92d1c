//! Per-item seeds. Item `i` gets the first word of the ChaCha8 stream `i`
//! keyed by the root seed, so items never share a stream and can be
//! generated in any order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn item_seed(root: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(index);
    rng.next_u64()
}
