//! Trivial predicate encryption for a small enumerated family of patterns:
//! one public-key encryption instance per pattern. Used as a reference to
//! check HVE search results against.

use ark_ec::PrimeGroup;

use crate::error::{DecodeError, Error, Result};
use crate::group::{scalar_nonzero, Fr, PairingSuite, RandomSource, G1};
use crate::hve::{
    aead_decrypt, aead_encrypt, derive_key, predicate_eval, AttributeVector, MatchResult,
    PatternVector,
};

const KDF_INFO: &[u8] = b"hve/trivial-pe/key/v1";
const AAD: &[u8] = b"hve/trivial-pe/v1";
const MATCH_TAG: u8 = 1;
const NO_MATCH_TAG: u8 = 0;

#[derive(Debug, Clone)]
pub struct TrivialPk<E: PairingSuite> {
    pub family: Vec<PatternVector>,
    pub keys: Vec<G1<E>>,
}

#[derive(Debug, Clone)]
pub struct TrivialSk<E: PairingSuite> {
    pub keys: Vec<Fr<E>>,
}

#[derive(Debug, Clone)]
pub struct TrivialToken<E: PairingSuite> {
    pub index: usize,
    pub key: Fr<E>,
}

/// One hybrid ciphertext per family member.
#[derive(Debug, Clone)]
pub struct TrivialCt<E: PairingSuite> {
    pub slots: Vec<(G1<E>, Vec<u8>)>,
}

pub fn tpe_setup<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    family: Vec<PatternVector>,
) -> Result<(TrivialPk<E>, TrivialSk<E>)> {
    let l = family.first().ok_or(Error::EmptyVector)?.len();
    if let Some(p) = family.iter().find(|p| p.len() != l) {
        return Err(Error::LengthMismatch {
            expected: l,
            got: p.len(),
        });
    }
    let keys: Vec<Fr<E>> = family.iter().map(|_| scalar_nonzero(&mut *rng)).collect();
    let g = G1::<E>::generator();
    let pk = TrivialPk {
        keys: keys.iter().map(|k| g * k).collect(),
        family,
    };
    Ok((pk, TrivialSk { keys }))
}

pub fn tpe_gen_token<E: PairingSuite>(j: usize, sk: &TrivialSk<E>) -> Result<TrivialToken<E>> {
    let key = *sk.keys.get(j).ok_or(Error::IndexOutOfRange {
        index: j,
        len: sk.keys.len(),
    })?;
    Ok(TrivialToken { index: j, key })
}

pub fn tpe_encrypt<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    x: &AttributeVector,
    payload: &[u8],
    pk: &TrivialPk<E>,
) -> Result<TrivialCt<E>> {
    let mut slots = Vec::with_capacity(pk.keys.len());
    for (f, y) in pk.family.iter().zip(&pk.keys) {
        let plaintext = if predicate_eval(f, x)? {
            [&[MATCH_TAG][..], payload].concat()
        } else {
            vec![NO_MATCH_TAG]
        };
        let k: Fr<E> = scalar_nonzero(&mut *rng);
        let key = derive_key(&(*y * k), KDF_INFO);
        slots.push((
            G1::<E>::generator() * k,
            aead_encrypt(&mut *rng, &key, AAD, &plaintext),
        ));
    }
    Ok(TrivialCt { slots })
}

pub fn tpe_query<E: PairingSuite>(ct: &TrivialCt<E>, tk: &TrivialToken<E>) -> Result<MatchResult> {
    let (eph, blob) = ct.slots.get(tk.index).ok_or(Error::IndexOutOfRange {
        index: tk.index,
        len: ct.slots.len(),
    })?;
    let key = derive_key(&(*eph * tk.key), KDF_INFO);
    let plaintext =
        aead_decrypt(&key, AAD, blob).ok_or(DecodeError::Malformed("trivial PE slot"))?;
    match plaintext.split_first() {
        Some((&MATCH_TAG, rest)) => Ok(MatchResult::Matched(rest.to_vec())),
        Some((&NO_MATCH_TAG, [])) => Ok(MatchResult::NoMatch),
        _ => Err(DecodeError::Malformed("trivial PE plaintext").into()),
    }
}
