//! Named seed sub-streams.
//!
//! Every random quantity descends from one root seed through [`derive`], so a
//! single trial or edge draw can be replayed in isolation.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of the `index`-th draw of the stream called `name`.
pub fn derive(root: u64, name: &str, index: u64) -> u64 {
    mix(mix(root ^ fnv1a(name)).wrapping_add(index))
}

/// Seed of the rounding draw for pair `{u, v}`; symmetric in its endpoints.
pub fn edge_seed(root: u64, u: usize, v: usize) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    mix(mix(mix(root) ^ a as u64).wrapping_add(b as u64))
}
