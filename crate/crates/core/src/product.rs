//! Bilinear product groups: `G^n` with exponent vectors, the componentwise
//! pairing `e(g^a, ĝ^b) = e(g, ĝ)^(a·b)`, and the orthogonal bases used by
//! the converted schemes.
//!
//! Side 1 elements live in `G1` and side 2 elements in `G2`; the two sides
//! are distinct Rust types, so a product pairing can only ever take one of
//! each.

use ark_ec::CurveGroup;
use ark_ff::{Field, Zero};

use crate::error::{DecodeError, Error, Result};
use crate::group::{multi_pair, scalar_nonzero, Fr, Gt, PairingSuite, RandomSource, G1, G2};
use crate::wire::{Record, TlvReader, TlvWriter};

/// An exponent vector `b ∈ Z_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector<F: Field>(pub Vec<F>);

impl<F: Field> ExponentVector<F> {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Self) -> F {
        assert_eq!(
            self.dim(),
            other.dim(),
            "exponent vector dimension mismatch"
        );
        self.0.iter().zip(&other.0).map(|(a, b)| *a * b).sum()
    }

    pub fn scale(&self, c: F) -> Self {
        Self(self.0.iter().map(|a| *a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            self.dim(),
            other.dim(),
            "exponent vector dimension mismatch"
        );
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a + b).collect())
    }
}

/// `g^b = (g^{b_1}, …, g^{b_n})` in one source group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductElement<G: CurveGroup> {
    elems: Vec<G>,
}

impl<G: CurveGroup> ProductElement<G> {
    pub fn new(elems: Vec<G>) -> Self {
        Self { elems }
    }

    /// `g^b` for the group generator.
    pub fn from_exponents(b: &ExponentVector<G::ScalarField>) -> Self {
        let g = G::generator();
        Self {
            elems: b.0.iter().map(|x| g * x).collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            elems: vec![G::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[G] {
        &self.elems
    }

    pub fn is_identity(&self) -> bool {
        self.elems.iter().all(Zero::is_zero)
    }

    /// `(g^b)^c`, componentwise.
    pub fn exp(&self, c: G::ScalarField) -> Self {
        Self {
            elems: self.elems.iter().map(|e| *e * c).collect(),
        }
    }

    /// `g^a · g^b = g^(a+b)`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self {
            elems: self
                .elems
                .iter()
                .zip(&other.elems)
                .map(|(a, b)| *a + b)
                .collect(),
        })
    }

    /// `Π base_k^{c_k}` over same-dimension bases. Panics on a dimension
    /// mismatch; callers inside the schemes always pass one basis family.
    pub fn lincomb(terms: &[(&Self, G::ScalarField)]) -> Self {
        let dim = terms.first().map_or(0, |(b, _)| b.dim());
        assert!(
            terms.iter().all(|(b, _)| b.dim() == dim),
            "dimension mismatch"
        );
        let scalars: Vec<G::ScalarField> = terms.iter().map(|(_, c)| *c).collect();
        let elems = (0..dim)
            .map(|k| {
                let bases: Vec<G> = terms.iter().map(|(b, _)| b.elems[k]).collect();
                let bases = G::normalize_batch(&bases);
                G::msm_unchecked(&bases, &scalars)
            })
            .collect();
        Self { elems }
    }

    pub(crate) fn write(&self, tag: u8, w: &mut TlvWriter) {
        w.put_points(tag, &self.elems);
    }

    pub(crate) fn read(tag: u8, r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let elems = r.points::<G>(tag)?;
        if !(2..=3).contains(&elems.len()) {
            return Err(DecodeError::Malformed("product element dimension"));
        }
        Ok(Self { elems })
    }

    pub(crate) fn read_dim(
        tag: u8,
        dim: usize,
        r: &mut TlvReader<'_>,
    ) -> Result<Self, DecodeError> {
        let p = Self::read(tag, r)?;
        if p.dim() != dim {
            return Err(DecodeError::Malformed("product element dimension"));
        }
        Ok(p)
    }
}

/// Side-1 product element of a suite.
pub type Side1<E> = ProductElement<G1<E>>;
/// Side-2 product element of a suite.
pub type Side2<E> = ProductElement<G2<E>>;

/// Base pairs `(x_k, y_k)` of a product pairing, for batching several
/// product pairings into one multi-pairing.
pub fn pairing_terms<E: PairingSuite>(x: &Side1<E>, y: &Side2<E>) -> Vec<(G1<E>, G2<E>)> {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    x.elems
        .iter()
        .copied()
        .zip(y.elems.iter().copied())
        .collect()
}

/// `e(g^a, ĝ^b) = Π_k e(g^{a_k}, ĝ^{b_k}) = e(g, ĝ)^(a·b)`.
pub fn vec_pair<E: PairingSuite>(x: &Side1<E>, y: &Side2<E>) -> Result<Gt<E>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(multi_pair::<E>(&pairing_terms::<E>(x, y)))
}

/// True iff the product pairing of `x` and `y` is the identity.
pub fn check_orthogonal<E: PairingSuite>(x: &Side1<E>, y: &Side2<E>) -> Result<bool> {
    Ok(vec_pair::<E>(x, y)?.is_zero())
}

/// One basis vector published on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement<E: PairingSuite> {
    pub side1: Side1<E>,
    pub side2: Side2<E>,
}

impl<E: PairingSuite> BasisElement<E> {
    pub fn from_exponents(b: &ExponentVector<Fr<E>>) -> Self {
        Self {
            side1: ProductElement::from_exponents(b),
            side2: ProductElement::from_exponents(b),
        }
    }
}

/// Trapdoor `a` of the two-dimensional basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trapdoor2<F: Field> {
    pub a: F,
}

impl<F: Field> Trapdoor2<F> {
    /// `(b11, b12, b2) = ((1,0), (1,a), (a,-1))`.
    pub fn vectors(&self) -> [ExponentVector<F>; 3] {
        [
            ExponentVector(vec![F::ONE, F::ZERO]),
            ExponentVector(vec![F::ONE, self.a]),
            ExponentVector(vec![self.a, -F::ONE]),
        ]
    }
}

/// Trapdoor `(a1, a2, a3)` of the three-dimensional basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trapdoor3<F: Field> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
}

impl<F: Field> Trapdoor3<F> {
    /// `b11 = (1,0,a1)`, `b12 = (1,a2,0)`, `b2 = (a2,-1,a1a2-a3)`,
    /// `b3 = (a1,a3,-1)`.
    pub fn vectors(&self) -> [ExponentVector<F>; 4] {
        let (a1, a2, a3) = (self.a1, self.a2, self.a3);
        [
            ExponentVector(vec![F::ONE, F::ZERO, a1]),
            ExponentVector(vec![F::ONE, a2, F::ZERO]),
            ExponentVector(vec![a2, -F::ONE, a1 * a2 - a3]),
            ExponentVector(vec![a1, a3, -F::ONE]),
        ]
    }
}

/// Two-dimensional basis `B11, B12, B2` with its trapdoor.
#[derive(Debug, Clone)]
pub struct Basis2<E: PairingSuite> {
    pub b11: BasisElement<E>,
    pub b12: BasisElement<E>,
    pub b2: BasisElement<E>,
    trapdoor: Trapdoor2<Fr<E>>,
}

impl<E: PairingSuite> Basis2<E> {
    pub fn from_trapdoor(trapdoor: Trapdoor2<Fr<E>>) -> Self {
        let [b11, b12, b2] = trapdoor.vectors();
        Self {
            b11: BasisElement::from_exponents(&b11),
            b12: BasisElement::from_exponents(&b12),
            b2: BasisElement::from_exponents(&b2),
            trapdoor,
        }
    }

    pub fn trapdoor(&self) -> &Trapdoor2<Fr<E>> {
        &self.trapdoor
    }

    pub fn public(&self) -> Basis2Public<E> {
        Basis2Public {
            b11: self.b11.clone(),
            b12: self.b12.clone(),
            b2: self.b2.clone(),
        }
    }
}

/// Three-dimensional basis `B11, B12, B2, B3` with its trapdoor.
#[derive(Debug, Clone)]
pub struct Basis3<E: PairingSuite> {
    pub b11: BasisElement<E>,
    pub b12: BasisElement<E>,
    pub b2: BasisElement<E>,
    pub b3: BasisElement<E>,
    trapdoor: Trapdoor3<Fr<E>>,
}

impl<E: PairingSuite> Basis3<E> {
    pub fn from_trapdoor(trapdoor: Trapdoor3<Fr<E>>) -> Self {
        let [b11, b12, b2, b3] = trapdoor.vectors();
        Self {
            b11: BasisElement::from_exponents(&b11),
            b12: BasisElement::from_exponents(&b12),
            b2: BasisElement::from_exponents(&b2),
            b3: BasisElement::from_exponents(&b3),
            trapdoor,
        }
    }

    pub fn trapdoor(&self) -> &Trapdoor3<Fr<E>> {
        &self.trapdoor
    }

    pub fn public(&self) -> Basis3Public<E> {
        Basis3Public {
            b11: self.b11.clone(),
            b12: self.b12.clone(),
            b2: self.b2.clone(),
            b3: self.b3.clone(),
        }
    }
}

/// Samples a two-dimensional basis; the trapdoor is resampled on zero.
pub fn gen_basis2<E: PairingSuite, R: RandomSource + ?Sized>(rng: &mut R) -> Basis2<E> {
    Basis2::from_trapdoor(Trapdoor2 {
        a: scalar_nonzero(rng),
    })
}

/// Samples a three-dimensional basis. Trapdoors are nonzero and
/// `a1·a2 − a3 ≠ 0`.
pub fn gen_basis3<E: PairingSuite, R: RandomSource + ?Sized>(rng: &mut R) -> Basis3<E> {
    loop {
        let t: Trapdoor3<Fr<E>> = Trapdoor3 {
            a1: scalar_nonzero(rng),
            a2: scalar_nonzero(rng),
            a3: scalar_nonzero(rng),
        };
        if !(t.a1 * t.a2 - t.a3).is_zero() {
            return Basis3::from_trapdoor(t);
        }
    }
}

/// Public part of a two-dimensional basis (no trapdoor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis2Public<E: PairingSuite> {
    pub b11: BasisElement<E>,
    pub b12: BasisElement<E>,
    pub b2: BasisElement<E>,
}

/// Public part of a three-dimensional basis (no trapdoor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis3Public<E: PairingSuite> {
    pub b11: BasisElement<E>,
    pub b12: BasisElement<E>,
    pub b2: BasisElement<E>,
    pub b3: BasisElement<E>,
}

fn write_basis_element<E: PairingSuite>(tag: u8, b: &BasisElement<E>, w: &mut TlvWriter) {
    w.nested(tag, |w| {
        b.side1.write(1, w);
        b.side2.write(2, w);
    });
}

fn read_basis_element<E: PairingSuite>(
    tag: u8,
    dim: usize,
    r: &mut TlvReader<'_>,
) -> Result<BasisElement<E>, DecodeError> {
    let mut inner = r.nested(tag)?;
    let side1 = ProductElement::read_dim(1, dim, &mut inner)?;
    let side2 = ProductElement::read_dim(2, dim, &mut inner)?;
    inner.finish()?;
    Ok(BasisElement { side1, side2 })
}

impl<E: PairingSuite> Record for Basis2Public<E> {
    const KIND: u8 = 0x01;

    fn write_body(&self, w: &mut TlvWriter) {
        write_basis_element(1, &self.b11, w);
        write_basis_element(2, &self.b12, w);
        write_basis_element(3, &self.b2, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        Ok(Self {
            b11: read_basis_element(1, 2, r)?,
            b12: read_basis_element(2, 2, r)?,
            b2: read_basis_element(3, 2, r)?,
        })
    }
}

impl<E: PairingSuite> Record for Basis3Public<E> {
    const KIND: u8 = 0x02;

    fn write_body(&self, w: &mut TlvWriter) {
        write_basis_element(1, &self.b11, w);
        write_basis_element(2, &self.b12, w);
        write_basis_element(3, &self.b2, w);
        write_basis_element(4, &self.b3, w);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        Ok(Self {
            b11: read_basis_element(1, 3, r)?,
            b12: read_basis_element(2, 3, r)?,
            b2: read_basis_element(3, 3, r)?,
            b3: read_basis_element(4, 3, r)?,
        })
    }
}
