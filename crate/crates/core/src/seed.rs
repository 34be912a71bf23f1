//! Seed derivation so that every random stream (splits, init, shuffling,
//! dropout) is reproducible and independent per fold.

/// Stream tags for [`derive_seed`].
pub mod stream {
    pub const SPLIT: u64 = 0x0053_504c_4954;
    pub const FOLD: u64 = 0x464f_4c44;
    pub const INIT: u64 = 0x494e_4954;
    pub const SHUFFLE: u64 = 0x5348_5546;
    pub const DROPOUT: u64 = 0x4452_4f50;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a stream tag and an index into a new 64-bit seed.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_streams_and_indices() {
        let a = derive_seed(7, stream::SPLIT, 0);
        assert_eq!(a, derive_seed(7, stream::SPLIT, 0));
        assert_ne!(a, derive_seed(7, stream::SPLIT, 1));
        assert_ne!(a, derive_seed(7, stream::INIT, 0));
        assert_ne!(a, derive_seed(8, stream::SPLIT, 0));
    }
}
