use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; the standard avalanche mix.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent substream seed from a base seed and a tag path
/// (experiment component, sparsity level, trial index, purpose, ...).
/// Any single trial is reproducible in isolation from `(base, tags)`.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix(base);
    for (i, &t) in tags.iter().enumerate() {
        s = splitmix(s ^ splitmix(t.wrapping_add((i as u64 + 1).wrapping_mul(0xA076_1D64_78BD_642F))));
    }
    s
}

/// Counter-based generator for the derived stream.
pub fn stream_rng(base: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags))
}
