use std::fmt;
use std::str::FromStr;

use crate::error::{DecodeError, Error, Result};
use crate::group::{GroupSuite, Gt, PairingSuite, RandomSource};
use crate::hve::seal::{open, seal, MatchResult, SealedPayload};
use crate::hve::vectors::{AttributeVector, PatternVector};
use crate::wire::{Record, TlvReader, TlvWriter};

/// Identifies a scheme in file headers and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Bw2,
    Ll3,
    Dhve3,
    Asym1,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::Bw2,
        SchemeId::Ll3,
        SchemeId::Dhve3,
        SchemeId::Asym1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Bw2 => "BW2",
            SchemeId::Ll3 => "LL3",
            SchemeId::Dhve3 => "DHVE3",
            SchemeId::Asym1 => "ASYM1",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            SchemeId::Bw2 => 1,
            SchemeId::Ll3 => 2,
            SchemeId::Dhve3 => 3,
            SchemeId::Asym1 => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, DecodeError> {
        Self::ALL
            .into_iter()
            .find(|s| s.code() == code)
            .ok_or(DecodeError::Malformed("scheme id"))
    }

    /// Base value of the record kinds used by this scheme.
    pub(crate) const fn kind_base(code: u8) -> u8 {
        code << 4
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidEncoding(format!("unknown scheme {s:?}")))
    }
}

/// Group-element counts of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ElementCounts {
    pub g1: usize,
    pub g2: usize,
    pub gt: usize,
}

impl ElementCounts {
    /// Source-group elements on either side.
    pub fn source(&self) -> usize {
        self.g1 + self.g2
    }
}

pub trait CountElements {
    fn element_counts(&self) -> ElementCounts;
}

/// The four-algorithm HVE interface.
///
/// `encrypt_element`/`decrypt_element` are the raw mode: they carry a bare
/// target-group message and return the bare candidate. `encrypt`/`query`
/// wrap them with a sealed payload so a mismatch is recognized.
pub trait HveScheme<E: PairingSuite> {
    const ID: SchemeId;

    type PublicKey: Record + Clone + Send + Sync + CountElements;
    type SecretKey: Record + Send + Sync;
    type Token: Record + Clone + Send + Sync + CountElements;
    type Ciphertext: Record + Clone + Send + Sync + CountElements;

    fn setup<R: RandomSource + ?Sized>(
        rng: &mut R,
        suite: &GroupSuite<E>,
        l: usize,
    ) -> Result<(Self::PublicKey, Self::SecretKey)>;

    fn gen_token<R: RandomSource + ?Sized>(
        rng: &mut R,
        pattern: &PatternVector,
        sk: &Self::SecretKey,
        pk: &Self::PublicKey,
    ) -> Result<Self::Token>;

    fn encrypt_element<R: RandomSource + ?Sized>(
        rng: &mut R,
        x: &AttributeVector,
        m: Gt<E>,
        pk: &Self::PublicKey,
    ) -> Result<Self::Ciphertext>;

    fn decrypt_element(
        ct: &Self::Ciphertext,
        tk: &Self::Token,
        pk: &Self::PublicKey,
    ) -> Result<Gt<E>>;

    /// Number of attributes `l` the key pair was set up for.
    fn attribute_len(pk: &Self::PublicKey) -> usize;

    fn encrypt<R: RandomSource + ?Sized>(
        rng: &mut R,
        x: &AttributeVector,
        payload: &[u8],
        pk: &Self::PublicKey,
    ) -> Result<SealedCiphertext<Self::Ciphertext>> {
        let (mask, sealed) = seal::<E, R>(rng, payload)?;
        let ct = Self::encrypt_element(rng, x, mask, pk)?;
        Ok(SealedCiphertext { ct, sealed })
    }

    fn query(
        ct: &SealedCiphertext<Self::Ciphertext>,
        tk: &Self::Token,
        pk: &Self::PublicKey,
    ) -> Result<MatchResult> {
        let candidate = Self::decrypt_element(&ct.ct, tk, pk)?;
        Ok(open::<E>(&candidate, &ct.sealed))
    }
}

/// A scheme ciphertext together with the payload it encapsulates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedCiphertext<C> {
    pub ct: C,
    pub sealed: SealedPayload,
}

impl<C: CountElements> CountElements for SealedCiphertext<C> {
    fn element_counts(&self) -> ElementCounts {
        self.ct.element_counts()
    }
}

impl<C: Record> Record for SealedCiphertext<C> {
    const KIND: u8 = C::KIND + 1;

    fn write_body(&self, w: &mut TlvWriter) {
        w.nested(1, |w| self.ct.write_body(w));
        w.put(2, self.sealed.blob());
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let mut inner = r.nested(1)?;
        let ct = C::read_body(&mut inner)?;
        inner.finish()?;
        let sealed = SealedPayload::from_blob(r.take(2)?.to_vec())
            .map_err(|_| DecodeError::Malformed("sealed payload"))?;
        Ok(Self { ct, sealed })
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn check_l(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::EmptyVector);
    }
    Ok(())
}
