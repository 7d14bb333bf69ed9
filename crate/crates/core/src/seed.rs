//! Seed derivation for reproducible, independently seeded RNG streams.

/// SplitMix64 finalizer. Bijective on `u64`, so distinct inputs never
/// collide.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derives a stream seed from a base seed and two indices:
/// `splitmix64(base ^ splitmix64(a) ^ splitmix64(b).rotate_left(32))`.
///
/// The two indices are mixed through different rotations so `(a, b)` and
/// `(b, a)` land on different streams.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(base ^ splitmix64(a) ^ splitmix64(b).rotate_left(32))
}
