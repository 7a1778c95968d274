//! Deterministic derivation of per-task RNG seeds from one master seed.
//!
//! Every stochastic stage (each time point, each probe frequency, each
//! posterior run) gets its own stream, identified by a path of integers.
//! Mixing the path into the master seed with a splitmix-style finalizer
//! keeps runs reproducible while decorrelating the streams.

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for the stream identified by `path` under `master`.
///
/// The same `(master, path)` always yields the same seed; distinct paths
/// (including prefixes of one another) yield decorrelated seeds.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = mix(master.wrapping_add(0x9E37_79B9_7F4A_7C15));
    for &part in path {
        let salted = part
            .wrapping_mul(0xD134_2543_DE82_EF95)
            .wrapping_add(0x9E37_79B9_7F4A_7C15);
        state = mix(state ^ salted);
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_path_same_seed() {
        assert_eq!(derive_seed(42, &[1, 2, 3]), derive_seed(42, &[1, 2, 3]));
    }

    #[test]
    fn different_inputs_decorrelate() {
        let base = derive_seed(42, &[1, 2]);
        assert_ne!(base, derive_seed(43, &[1, 2]));
        assert_ne!(base, derive_seed(42, &[1, 3]));
        assert_ne!(base, derive_seed(42, &[2, 1]));
        assert_ne!(base, derive_seed(42, &[1]));
        assert_ne!(base, derive_seed(42, &[1, 2, 0]));
    }

    #[test]
    fn empty_path_differs_from_master() {
        // The master value itself must not leak through as a stream seed.
        assert_ne!(derive_seed(7, &[]), 7);
    }
}
