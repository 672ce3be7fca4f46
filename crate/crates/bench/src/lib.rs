//! Shared fixtures for the benchmarks.

use hve_core::group::seeded_rng;
use hve_core::{AttributeVector, GroupSuite, HveScheme, PairingSuite, PatternVector, Slot};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

/// A key pair, one record and a matching token with `s` fixed slots.
pub struct Fixture<E: PairingSuite, S: HveScheme<E>> {
    pub rng: ChaCha20Rng,
    pub pk: S::PublicKey,
    pub sk: S::SecretKey,
    pub x: AttributeVector,
    pub pattern: PatternVector,
    pub token: S::Token,
}

pub fn fixture<E: PairingSuite, S: HveScheme<E>>(l: usize, s: usize, seed: u64) -> Fixture<E, S> {
    assert!(s <= l);
    let mut rng = seeded_rng(seed);
    let (pk, sk) = S::setup(&mut rng, &GroupSuite::new(hve_core::Mode::Asymmetric), l).unwrap();
    let values: Vec<u64> = (0..l).map(|_| rng.gen_range(0..16)).collect();
    let x = AttributeVector::from_ints(&values).unwrap();
    let pattern = PatternVector::new(
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if i < s {
                    Slot::value(v)
                } else {
                    Slot::Wildcard
                }
            })
            .collect(),
    )
    .unwrap();
    let token = S::gen_token(&mut rng, &pattern, &sk, &pk).unwrap();
    Fixture {
        rng,
        pk,
        sk,
        x,
        pattern,
        token,
    }
}
