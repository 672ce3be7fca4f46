//! Pairing-friendly group suites, scalar sampling and hashing, and the
//! instrumented pairing entry points every scheme goes through.

mod counter;
mod suite;
mod symmetric;

use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ff::{PrimeField, UniformRand, Zero};
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha512};

pub use counter::{pairing_count, reset_pairing_count};
pub use suite::{parse_suite_id, GroupSuite, Mode, PairingSuite};
pub use symmetric::SymElement;

/// Scalar field of a suite.
pub type Fr<E> = <E as Pairing>::ScalarField;
/// Source group 1 (projective).
pub type G1<E> = <E as Pairing>::G1;
/// Source group 2 (projective).
pub type G2<E> = <E as Pairing>::G2;
/// Target group, written additively by arkworks: `+` is the group
/// operation and `* s` is exponentiation.
pub type Gt<E> = PairingOutput<E>;

/// Marker for random sources accepted by every sampling routine.
pub trait RandomSource: RngCore + CryptoRng {}
impl<T: RngCore + CryptoRng> RandomSource for T {}

/// Deterministic source for reproducible test vectors.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Production source backed by OS entropy.
pub fn os_rng() -> ChaCha20Rng {
    ChaCha20Rng::from_entropy()
}

/// Uniform scalar in `[0, p)`.
pub fn scalar_random<F: PrimeField, R: RandomSource + ?Sized>(rng: &mut R) -> F {
    F::rand(rng)
}

/// Uniform scalar in `[1, p)`.
pub fn scalar_nonzero<F: PrimeField, R: RandomSource + ?Sized>(rng: &mut R) -> F {
    loop {
        let s = F::rand(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Hashes `bytes` under `domain_tag` to a scalar.
///
/// SHA-512 over the length-prefixed tag and the input, reduced mod p. The
/// 512-bit digest keeps the reduction bias below 2^-250.
pub fn hash_to_scalar<F: PrimeField>(bytes: &[u8], domain_tag: &[u8]) -> F {
    let mut h = Sha512::new();
    h.update((domain_tag.len() as u64).to_le_bytes());
    h.update(domain_tag);
    h.update(bytes);
    F::from_le_bytes_mod_order(&h.finalize())
}

/// Single pairing `e(x, y)`. Counts one base pairing.
pub fn pair<E: Pairing>(x: &G1<E>, y: &G2<E>) -> Gt<E> {
    counter::add(1);
    E::pairing(*x, *y)
}

/// Product of pairings `Π e(x_i, y_i)` with one shared final exponentiation.
/// Counts one base pairing per term.
pub fn multi_pair<E: Pairing>(pairs: &[(G1<E>, G2<E>)]) -> Gt<E> {
    counter::add(pairs.len() as u64);
    if pairs.is_empty() {
        return Gt::<E>::zero();
    }
    let (a, b): (Vec<E::G1Prepared>, Vec<E::G2Prepared>) =
        pairs.iter().map(|(x, y)| (x.into(), y.into())).unzip();
    E::multi_pairing(a, b)
}

/// Uniform target-group element.
pub fn gt_random<E: PairingSuite, R: RandomSource + ?Sized>(rng: &mut R) -> Gt<E> {
    E::gt_generator() * Fr::<E>::rand(rng)
}

/// Uniform source-group-1 element.
pub fn g1_random<E: Pairing, R: RandomSource + ?Sized>(rng: &mut R) -> G1<E> {
    G1::<E>::rand(rng)
}
