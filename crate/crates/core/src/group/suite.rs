use std::fmt;
use std::sync::OnceLock;

use ark_ec::pairing::Pairing;
use ark_ec::PrimeGroup;

use super::{Gt, G1, G2};
use crate::error::DecodeError;

/// A concrete pairing-friendly curve usable as a group suite.
pub trait PairingSuite: Pairing {
    /// Curve identifier; the low 7 bits of a serialized suite id.
    const CURVE_ID: u8;
    const NAME: &'static str;

    /// Cached `e(g, ĝ)`.
    fn gt_generator() -> Gt<Self>;
}

impl PairingSuite for ark_bls12_381::Bls12_381 {
    const CURVE_ID: u8 = 0x01;
    const NAME: &'static str = "bls12-381";

    fn gt_generator() -> Gt<Self> {
        static GT: OnceLock<Gt<ark_bls12_381::Bls12_381>> = OnceLock::new();
        *GT.get_or_init(Gt::<Self>::generator)
    }
}

impl PairingSuite for ark_bn254::Bn254 {
    const CURVE_ID: u8 = 0x02;
    const NAME: &'static str = "bn254";

    fn gt_generator() -> Gt<Self> {
        static GT: OnceLock<Gt<ark_bn254::Bn254>> = OnceLock::new();
        *GT.get_or_init(Gt::<Self>::generator)
    }
}

/// How the logical source group is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Native Type-3 groups `G1`, `G2` with no efficient isomorphism.
    Asymmetric,
    /// A single logical group `G`, emulated on the Type-3 curve by carrying
    /// each element as a `(G1, G2)` pair with a shared exponent.
    Symmetric,
}

const SYMMETRIC_FLAG: u8 = 0x80;

/// A curve plus a representation mode.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GroupSuite<E: PairingSuite> {
    mode: Mode,
    _curve: std::marker::PhantomData<E>,
}

impl<E: PairingSuite> fmt::Debug for GroupSuite<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupSuite")
            .field("curve", &E::NAME)
            .field("mode", &self.mode)
            .finish()
    }
}

impl<E: PairingSuite> GroupSuite<E> {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            _curve: std::marker::PhantomData,
        }
    }

    pub fn asymmetric() -> Self {
        Self::new(Mode::Asymmetric)
    }

    pub fn symmetric() -> Self {
        Self::new(Mode::Symmetric)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// One-byte suite id carried in every serialized record header.
    pub fn id(&self) -> u8 {
        match self.mode {
            Mode::Asymmetric => E::CURVE_ID,
            Mode::Symmetric => E::CURVE_ID | SYMMETRIC_FLAG,
        }
    }

    pub fn from_id(id: u8) -> Result<Self, DecodeError> {
        if id & !SYMMETRIC_FLAG != E::CURVE_ID {
            return Err(DecodeError::UnknownSuite(id));
        }
        let mode = if id & SYMMETRIC_FLAG != 0 {
            Mode::Symmetric
        } else {
            Mode::Asymmetric
        };
        Ok(Self::new(mode))
    }

    /// Describes which representation of the source group is active.
    pub fn representation(&self) -> &'static str {
        match self.mode {
            Mode::Asymmetric => "native type-3 (G1, G2)",
            Mode::Symmetric => "symmetric emulated as (G1, G2) pairs",
        }
    }

    /// Bit length of the prime group order.
    pub fn order_bits(&self) -> u32 {
        use ark_ff::PrimeField;
        E::ScalarField::MODULUS_BIT_SIZE
    }

    pub fn g(&self) -> G1<E> {
        G1::<E>::generator()
    }

    pub fn g_hat(&self) -> G2<E> {
        G2::<E>::generator()
    }

    pub fn gt_generator(&self) -> Gt<E> {
        E::gt_generator()
    }
}

/// Splits a suite id into its curve id and mode.
pub fn parse_suite_id(id: u8) -> (u8, Mode) {
    let mode = if id & SYMMETRIC_FLAG != 0 {
        Mode::Symmetric
    } else {
        Mode::Asymmetric
    };
    (id & !SYMMETRIC_FLAG, mode)
}
