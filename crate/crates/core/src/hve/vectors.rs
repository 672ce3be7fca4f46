use std::fmt;

use ark_ff::PrimeField;

use crate::error::{DecodeError, Error, Result};
use crate::group::hash_to_scalar;
use crate::wire::{TlvReader, TlvWriter};

const ATTRIBUTE_TAG: &[u8] = b"hve/attribute/v1";

/// One attribute value from the alphabet Σ.
///
/// Byte strings are hashed into the scalar field; small integers (used by
/// the predicate encodings, whose alphabet is `{0, 1}`) map directly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attribute {
    Int(u64),
    Bytes(Vec<u8>),
}

impl Attribute {
    pub fn to_scalar<F: PrimeField>(&self) -> F {
        match self {
            Attribute::Int(n) => F::from(*n),
            Attribute::Bytes(b) => hash_to_scalar(b, ATTRIBUTE_TAG),
        }
    }
}

impl From<u64> for Attribute {
    fn from(n: u64) -> Self {
        Attribute::Int(n)
    }
}

impl From<&str> for Attribute {
    fn from(s: &str) -> Self {
        Attribute::Bytes(s.as_bytes().to_vec())
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Attribute::Int(n) => write!(f, "{n}"),
            Attribute::Bytes(b) => write!(f, "{}", String::from_utf8_lossy(b)),
        }
    }
}

/// Ciphertext attributes `x ∈ Σ^l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeVector(Vec<Attribute>);

impl AttributeVector {
    pub fn new(attrs: Vec<Attribute>) -> Result<Self> {
        if attrs.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self(attrs))
    }

    pub fn from_ints(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().copied().map(Attribute::Int).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn attrs(&self) -> &[Attribute] {
        &self.0
    }

    pub fn to_scalars<F: PrimeField>(&self) -> Vec<F> {
        self.0.iter().map(Attribute::to_scalar).collect()
    }
}

/// One slot of a token pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot {
    Value(Attribute),
    /// `*`: matches any attribute.
    Wildcard,
    /// `?`: left open for later delegation (delegatable scheme only).
    Delegatable,
}

impl Slot {
    pub fn value(a: impl Into<Attribute>) -> Self {
        Slot::Value(a.into())
    }
}

/// Token pattern `σ ∈ Σ_*^l` (or `Σ_{?,*}^l` for the delegatable scheme).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternVector(Vec<Slot>);

impl PatternVector {
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self(slots))
    }

    pub fn all_wildcards(l: usize) -> Result<Self> {
        Self::new(vec![Slot::Wildcard; l])
    }

    /// A pattern that fixes every slot to `x`.
    pub fn exact(x: &AttributeVector) -> Self {
        Self(x.attrs().iter().cloned().map(Slot::Value).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    /// Indexes of fixed (non-wildcard, non-delegatable) slots, ascending.
    pub fn fixed_indices(&self) -> Vec<usize> {
        self.indices_where(|s| matches!(s, Slot::Value(_)))
    }

    /// Indexes of delegatable slots, ascending.
    pub fn delegatable_indices(&self) -> Vec<usize> {
        self.indices_where(|s| matches!(s, Slot::Delegatable))
    }

    fn indices_where(&self, pred: impl Fn(&Slot) -> bool) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| pred(s))
            .map(|(i, _)| i)
            .collect()
    }

    /// Errors if any slot is delegatable.
    pub fn ensure_no_delegatable(&self) -> Result<()> {
        match self.0.iter().position(|s| matches!(s, Slot::Delegatable)) {
            Some(i) => Err(Error::DelegatableSlot(i)),
            None => Ok(()),
        }
    }

    /// Fixed positions paired with their scalar values.
    pub fn fixed_scalars<F: PrimeField>(&self) -> Vec<(usize, F)> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Slot::Value(a) => Some((i, a.to_scalar())),
                _ => None,
            })
            .collect()
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// `f_σ(x) = 1` iff every slot is `*` or equals `x_i`.
pub fn predicate_eval(pattern: &PatternVector, x: &AttributeVector) -> Result<bool> {
    check_len(pattern.len(), x.len())?;
    pattern.ensure_no_delegatable()?;
    Ok(slots_match(pattern, x))
}

/// Predicate of the delegatable scheme: `?` slots do not constrain `x`.
pub fn predicate_eval_delegatable(pattern: &PatternVector, x: &AttributeVector) -> Result<bool> {
    check_len(pattern.len(), x.len())?;
    Ok(slots_match(pattern, x))
}

fn slots_match(pattern: &PatternVector, x: &AttributeVector) -> bool {
    pattern.slots().iter().zip(x.attrs()).all(|(s, a)| match s {
        Slot::Value(v) => v == a,
        Slot::Wildcard | Slot::Delegatable => true,
    })
}

/// Which slots of a token are fixed, wildcard or delegatable; stored in
/// tokens so that queries and delegation know `S` without the values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Fixed,
    Wildcard,
    Delegatable,
}

impl SlotKind {
    pub fn of(slot: &Slot) -> Self {
        match slot {
            Slot::Value(_) => SlotKind::Fixed,
            Slot::Wildcard => SlotKind::Wildcard,
            Slot::Delegatable => SlotKind::Delegatable,
        }
    }

    fn code(self) -> u8 {
        match self {
            SlotKind::Fixed => 0,
            SlotKind::Wildcard => 1,
            SlotKind::Delegatable => 2,
        }
    }

    pub(crate) fn write_all(tag: u8, kinds: &[SlotKind], w: &mut TlvWriter) {
        let bytes: Vec<u8> = kinds.iter().map(|k| k.code()).collect();
        w.put(tag, &bytes);
    }

    pub(crate) fn read_all(tag: u8, r: &mut TlvReader<'_>) -> Result<Vec<SlotKind>, DecodeError> {
        r.take(tag)?
            .iter()
            .map(|b| match b {
                0 => Ok(SlotKind::Fixed),
                1 => Ok(SlotKind::Wildcard),
                2 => Ok(SlotKind::Delegatable),
                _ => Err(DecodeError::Malformed("slot kind")),
            })
            .collect()
    }
}
