//! Seeded random mode combinations on the torus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::surfaces::{FieldExpr, ModeSpec, Term, TorusBranch};
use crate::Result;

/// Largest index drawn for `m` and `n`.
pub const MAX_INDEX: u32 = 3;
pub const TERMS: usize = 3;

/// A normalized combination of three torus modes with `m, n <= 3`, random
/// branches and coefficients in `[-1, 1]`. The constant mode is never drawn.
/// The same seed always yields the same field.
pub fn random_torus_combination(seed: u64) -> Result<FieldExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(TERMS);
    while terms.len() < TERMS {
        let m = rng.gen_range(0..=MAX_INDEX);
        let n = rng.gen_range(0..=MAX_INDEX);
        let branch = *TorusBranch::ALL.choose(&mut rng).expect("nonempty");
        let coefficient: f64 = rng.gen_range(-1.0..=1.0);
        if m == 0 && n == 0 {
            continue;
        }
        // Branches that vanish identically are redrawn.
        let Ok(mode) = ModeSpec::torus(m, n, branch) else { continue };
        terms.push(Term { coefficient, mode });
    }
    Ok(FieldExpr::combination(terms)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_torus_combination(7).unwrap(), random_torus_combination(7).unwrap());
        assert_ne!(random_torus_combination(7).unwrap(), random_torus_combination(8).unwrap());
        assert_eq!(random_torus_combination(3).unwrap().terms().len(), TERMS);
    }
}
