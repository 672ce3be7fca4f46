use std::ops::{Add, Mul, Neg};

use ark_ec::PrimeGroup;
use ark_ff::Zero;

use super::{multi_pair, pair, Fr, Gt, PairingSuite, G1, G2};

/// An element of the logical symmetric group `G`, carried as `(g^x, ĝ^x)`.
///
/// `e(u, v)` for two such elements pairs the first half of `u` with the
/// second half of `v`, so the emulated pairing is symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymElement<E: PairingSuite> {
    pub g1: G1<E>,
    pub g2: G2<E>,
}

impl<E: PairingSuite> SymElement<E> {
    pub fn generator() -> Self {
        Self {
            g1: G1::<E>::generator(),
            g2: G2::<E>::generator(),
        }
    }

    pub fn identity() -> Self {
        Self {
            g1: G1::<E>::zero(),
            g2: G2::<E>::zero(),
        }
    }

    /// `g^x` for the suite generator.
    pub fn from_exponent(x: Fr<E>) -> Self {
        Self::generator() * x
    }

    pub fn pair(&self, other: &Self) -> Gt<E> {
        pair::<E>(&self.g1, &other.g2)
    }

    /// Whether both halves carry the same exponent, i.e.
    /// `e(x1, ĝ) == e(g, x2)`.
    pub fn is_consistent(&self) -> bool {
        multi_pair::<E>(&[
            (self.g1, G2::<E>::generator()),
            (-G1::<E>::generator(), self.g2),
        ])
        .is_zero()
    }
}

impl<E: PairingSuite> Add for SymElement<E> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            g1: self.g1 + rhs.g1,
            g2: self.g2 + rhs.g2,
        }
    }
}

impl<E: PairingSuite> Neg for SymElement<E> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            g1: -self.g1,
            g2: -self.g2,
        }
    }
}

impl<E: PairingSuite> Mul<Fr<E>> for SymElement<E> {
    type Output = Self;
    fn mul(self, rhs: Fr<E>) -> Self {
        Self {
            g1: self.g1 * rhs,
            g2: self.g2 * rhs,
        }
    }
}
