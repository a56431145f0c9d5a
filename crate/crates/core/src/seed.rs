//! Deterministic seed derivation.
//!
//! Every randomized consumer (target sampler, ACO, sweep rows) gets its own
//! stream derived from one master seed and a textual tag, so a single seed
//! reproduces an entire run.

/// Derives a child seed from `master` and a consumer tag.
///
/// The tag is hashed with FNV-1a and the result is mixed with the master
/// seed through a splitmix64 finalizer. Stable across platforms and runs.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = FNV_OFFSET;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(master ^ h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
