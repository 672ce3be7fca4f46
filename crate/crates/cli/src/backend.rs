//! Runtime dispatch from a (suite id, scheme id) pair to the generic scheme
//! implementations. Everything crossing this boundary is serialized bytes.

use std::marker::PhantomData;

use anyhow::{anyhow, Result};
use hve_core::group::{pairing_count, parse_suite_id};
use hve_core::schemes::dhve;
use hve_core::{
    Asym, AttributeVector, Bls12_381, Bn254, Bw, CountElements, Dhve, ElementCounts, GroupSuite,
    HveScheme, Ll, MatchResult, Mode, PairingSuite, PatternVector, Record, SchemeId,
    SealedCiphertext, Slot,
};
use rand_chacha::ChaCha20Rng;

use crate::usage;

pub struct KeyPair {
    pub pk: Vec<u8>,
    pub sk: Vec<u8>,
    pub pk_counts: ElementCounts,
}

pub trait Backend {
    fn setup(&self, rng: &mut ChaCha20Rng, l: usize) -> Result<KeyPair>;
    fn gen_token(
        &self,
        rng: &mut ChaCha20Rng,
        pk: &[u8],
        sk: &[u8],
        pattern: &PatternVector,
    ) -> Result<Vec<u8>>;
    fn encrypt(
        &self,
        rng: &mut ChaCha20Rng,
        pk: &[u8],
        x: &AttributeVector,
        payload: &[u8],
    ) -> Result<Vec<u8>>;
    fn searcher(&self, pk: &[u8], token: &[u8]) -> Result<Box<dyn Searcher>>;
}

pub trait Searcher: Send + Sync {
    /// Queries one serialized ciphertext, returning the outcome and the
    /// number of pairings it took.
    fn query(&self, ct: &[u8]) -> Result<(MatchResult, u64)>;
}

struct Impl<E: PairingSuite, S> {
    suite: GroupSuite<E>,
    _scheme: PhantomData<S>,
}

impl<E, S> Backend for Impl<E, S>
where
    E: PairingSuite,
    S: HveScheme<E> + 'static,
{
    fn setup(&self, rng: &mut ChaCha20Rng, l: usize) -> Result<KeyPair> {
        let (pk, sk) = S::setup(rng, &self.suite, l)?;
        let id = self.suite.id();
        Ok(KeyPair {
            pk_counts: pk.element_counts(),
            pk: pk.to_bytes(id),
            sk: sk.to_bytes(id),
        })
    }

    fn gen_token(
        &self,
        rng: &mut ChaCha20Rng,
        pk: &[u8],
        sk: &[u8],
        pattern: &PatternVector,
    ) -> Result<Vec<u8>> {
        let id = self.suite.id();
        let pk = S::PublicKey::from_bytes(pk, id)?;
        let sk = S::SecretKey::from_bytes(sk, id)?;
        Ok(S::gen_token(rng, pattern, &sk, &pk)?.to_bytes(id))
    }

    fn encrypt(
        &self,
        rng: &mut ChaCha20Rng,
        pk: &[u8],
        x: &AttributeVector,
        payload: &[u8],
    ) -> Result<Vec<u8>> {
        let id = self.suite.id();
        let pk = S::PublicKey::from_bytes(pk, id)?;
        if x.len() != S::attribute_len(&pk) {
            return Err(usage!(
                "expected {} attributes, got {}",
                S::attribute_len(&pk),
                x.len()
            ));
        }
        Ok(S::encrypt(rng, x, payload, &pk)?.to_bytes(id))
    }

    fn searcher(&self, pk: &[u8], token: &[u8]) -> Result<Box<dyn Searcher>> {
        let id = self.suite.id();
        Ok(Box::new(Prepared::<E, S> {
            suite: id,
            pk: S::PublicKey::from_bytes(pk, id)?,
            token: S::Token::from_bytes(token, id)?,
        }))
    }
}

struct Prepared<E: PairingSuite, S: HveScheme<E>> {
    suite: u8,
    pk: S::PublicKey,
    token: S::Token,
}

impl<E, S> Searcher for Prepared<E, S>
where
    E: PairingSuite,
    S: HveScheme<E>,
{
    fn query(&self, ct: &[u8]) -> Result<(MatchResult, u64)> {
        let ct = SealedCiphertext::<S::Ciphertext>::from_bytes(ct, self.suite)?;
        let before = pairing_count();
        let result = S::query(&ct, &self.token, &self.pk)?;
        Ok((result, pairing_count() - before))
    }
}

fn for_curve<E: PairingSuite>(mode: Mode, scheme: SchemeId) -> Box<dyn Backend> {
    fn make<E: PairingSuite, S: HveScheme<E> + 'static>(mode: Mode) -> Box<dyn Backend> {
        Box::new(Impl::<E, S> {
            suite: GroupSuite::new(mode),
            _scheme: PhantomData,
        })
    }
    match scheme {
        SchemeId::Bw2 => make::<E, Bw>(mode),
        SchemeId::Ll3 => make::<E, Ll>(mode),
        SchemeId::Dhve3 => make::<E, Dhve>(mode),
        SchemeId::Asym1 => make::<E, Asym>(mode),
    }
}

pub fn backend(suite: u8, scheme: SchemeId) -> Result<Box<dyn Backend>> {
    let (curve, mode) = parse_suite_id(suite);
    match curve {
        Bls12_381::CURVE_ID => Ok(for_curve::<Bls12_381>(mode, scheme)),
        Bn254::CURVE_ID => Ok(for_curve::<Bn254>(mode, scheme)),
        _ => Err(anyhow!("unknown curve id {curve:#04x}")),
    }
}

/// Fixes the delegatable slot `k` (0-based) of a DHVE3 token.
pub fn delegate(
    rng: &mut ChaCha20Rng,
    suite: u8,
    pk: &[u8],
    token: &[u8],
    k: usize,
    slot: &Slot,
) -> Result<Vec<u8>> {
    fn run<E: PairingSuite>(
        rng: &mut ChaCha20Rng,
        suite: u8,
        pk: &[u8],
        token: &[u8],
        k: usize,
        slot: &Slot,
    ) -> Result<Vec<u8>> {
        let pk = <Dhve as HveScheme<E>>::PublicKey::from_bytes(pk, suite)?;
        let tk = <Dhve as HveScheme<E>>::Token::from_bytes(token, suite)?;
        match dhve::delegate(rng, k, slot, &tk, &pk) {
            Ok(out) => Ok(out.to_bytes(suite)),
            Err(e @ hve_core::Error::InvalidDelegation(_)) => Err(usage!("{e}")),
            Err(e) => Err(e.into()),
        }
    }
    match parse_suite_id(suite).0 {
        Bls12_381::CURVE_ID => run::<Bls12_381>(rng, suite, pk, token, k, slot),
        Bn254::CURVE_ID => run::<Bn254>(rng, suite, pk, token, k, slot),
        c => Err(anyhow!("unknown curve id {c:#04x}")),
    }
}
