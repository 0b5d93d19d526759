//! Deterministic seed derivation.
//!
//! Every randomized routine takes an explicit seed, and derived seeds come
//! from a SplitMix64 chain over (base seed, tag...) so that parallel
//! execution order can never change a sampled value. The experiment harness
//! derives per-row seeds as `derive(base_seed, &[n as u64, trial as u64])`.

/// SplitMix64 finalizer step.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and an ordered list of integer tags.
pub fn derive(base: u64, tags: &[u64]) -> u64 {
    let mut h = splitmix64(base ^ 0x6A09_E667_F3BC_C909);
    for &t in tags {
        h = splitmix64(h ^ t);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable() {
        // Frozen values: changing the hash silently would break every
        // recorded experiment, so the chain is pinned here.
        assert_eq!(derive(42, &[]), derive(42, &[]));
        assert_eq!(derive(42, &[32, 0]), 17_779_515_951_389_510_124);
        assert_ne!(derive(42, &[32, 0]), derive(42, &[0, 32]));
        assert_ne!(derive(42, &[1]), derive(43, &[1]));
    }

    #[test]
    fn tags_are_order_sensitive_and_injective_in_practice() {
        let mut seen = std::collections::HashSet::new();
        for n in 0..50u64 {
            for t in 0..50u64 {
                assert!(seen.insert(derive(7, &[n, t])));
            }
        }
    }
}
