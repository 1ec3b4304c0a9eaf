//! Seeded random automorphisms built from elementary Nielsen moves, with
//! their inverses tracked alongside.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::word::{Automorphism, Word};

/// An elementary Nielsen automorphism with its inverse.
fn nielsen_move<R: Rng>(rank: usize, rng: &mut R) -> Automorphism {
    let mut imgs: Vec<Word> = (1..=rank as i32).map(Word::letter).collect();
    let mut invs = imgs.clone();
    let i = rng.gen_range(0..rank);
    let kind = if rank == 1 { 1 } else { rng.gen_range(0..4) };
    match kind {
        0 => {
            // swap x_i and x_j
            let mut j = rng.gen_range(0..rank - 1);
            if j >= i {
                j += 1;
            }
            imgs.swap(i, j);
            invs.swap(i, j);
        }
        1 => {
            // x_i ↦ x_i⁻¹
            imgs[i] = imgs[i].inverse();
            invs[i] = invs[i].inverse();
        }
        _ => {
            // x_i ↦ x_i x_j^ε or x_j^ε x_i
            let mut j = rng.gen_range(0..rank - 1);
            if j >= i {
                j += 1;
            }
            let e: i32 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let xi = Word::letter(i as i32 + 1);
            let xj = Word::letter(e * (j as i32 + 1));
            if kind == 2 {
                imgs[i] = xi.mul(&xj);
                invs[i] = xi.mul(&xj.inverse());
            } else {
                imgs[i] = xj.mul(&xi);
                invs[i] = xj.inverse().mul(&xi);
            }
        }
    }
    Automorphism::new(rank, imgs).unwrap().with_inverse(invs).unwrap()
}

/// A random composition of between one and `max_moves` Nielsen moves.
pub fn random_automorphism<R: Rng>(rank: usize, max_moves: usize, rng: &mut R) -> Automorphism {
    let k = rng.gen_range(1..=max_moves.max(1));
    let mut phi = Automorphism::identity(rank);
    for _ in 0..k {
        phi = phi.compose(&nielsen_move(rank, rng));
    }
    phi
}

/// `count` automorphisms of `F_2` and `F_3` (alternating) from the seed.
pub fn corpus(seed: u64, count: usize, max_moves: usize) -> Vec<Automorphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_automorphism(2 + i % 2, max_moves, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::verify_inverse_pair;

    #[test]
    fn inverses_are_tracked() {
        for phi in corpus(11, 60, 5) {
            let psi = phi.declared_inverse().unwrap();
            assert!(verify_inverse_pair(&phi, &psi), "{phi}");
        }
    }
}
