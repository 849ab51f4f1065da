//! Seeded random streams.
//!
//! All randomness is derived from one user seed through named sub-streams,
//! so adding a consumer never perturbs the numbers drawn by another.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Rng;

fn fnv1a(h: &mut u64, bytes: &[u8]) {
    for b in bytes {
        *h ^= *b as u64;
        *h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
}

/// Stream for `seed` and a path of labels, e.g. `(0, &["cube5", "KNN"])`.
pub fn stream(seed: u64, labels: &[&str]) -> Rng {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    fnv1a(&mut h, &seed.to_le_bytes());
    for l in labels {
        fnv1a(&mut h, &[0xff]);
        fnv1a(&mut h, l.as_bytes());
    }
    Rng::seed_from_u64(h)
}

/// Plain stream from a seed without labels.
pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
