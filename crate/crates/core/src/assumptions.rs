//! Samplers for decisional BDH and P3DH challenge tuples in the (emulated)
//! symmetric group, plus an exponent-free consistency check for P3DH tuples.
//!
//! Samplers return the published tuple and, separately, the exponents used
//! to build it so tests can recompute the defining relations.

use ark_ff::Zero;

use crate::error::DecodeError;
use crate::group::{scalar_random, Fr, Gt, PairingSuite, RandomSource, SymElement};
use crate::wire::{Record, TlvReader, TlvWriter};

/// `(g, g^a, g^b, g^c)` and `T ∈ {e(g,g)^{abc}, e(g,g)^d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdhTuple<E: PairingSuite> {
    pub g: SymElement<E>,
    pub ga: SymElement<E>,
    pub gb: SymElement<E>,
    pub gc: SymElement<E>,
    pub t: Gt<E>,
}

#[derive(Debug, Clone, Copy)]
pub struct BdhExponents<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
    pub bit: bool,
}

/// `(g, f), (g^a, f^a), (g^b, f^b), (g^{ab} f^{z1}, g^{z1}),
/// (g^{abc} f^{z2}, g^{z2})` and `T = (g^c f^{z3}, g^{z3})` (real) or
/// `(g^d f^{z3}, g^{z3})` (random).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P3dhTuple<E: PairingSuite> {
    pub g: SymElement<E>,
    pub f: SymElement<E>,
    pub ga: SymElement<E>,
    pub fa: SymElement<E>,
    pub gb: SymElement<E>,
    pub fb: SymElement<E>,
    pub x1: SymElement<E>,
    pub y1: SymElement<E>,
    pub x2: SymElement<E>,
    pub y2: SymElement<E>,
    pub t1: SymElement<E>,
    pub t2: SymElement<E>,
}

#[derive(Debug, Clone, Copy)]
pub struct P3dhExponents<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
    /// `f = g^phi`.
    pub phi: F,
    pub z1: F,
    pub z2: F,
    pub z3: F,
    pub bit: bool,
}

/// `bit = false` yields the real `T`, `bit = true` the random branch.
pub fn sample_bdh<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    bit: bool,
) -> (BdhTuple<E>, BdhExponents<Fr<E>>) {
    let (a, b, c, d) = (
        scalar_random(rng),
        scalar_random(rng),
        scalar_random(rng),
        scalar_random(rng),
    );
    let gt = E::gt_generator();
    let t = if bit { gt * d } else { gt * (a * b * c) };
    let g = SymElement::<E>::generator();
    (
        BdhTuple {
            g,
            ga: g * a,
            gb: g * b,
            gc: g * c,
            t,
        },
        BdhExponents { a, b, c, d, bit },
    )
}

pub fn sample_p3dh<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    bit: bool,
) -> (P3dhTuple<E>, P3dhExponents<Fr<E>>) {
    let mut s = || scalar_random::<Fr<E>, R>(rng);
    let (a, b, c, d, phi, z1, z2, z3) = (s(), s(), s(), s(), s(), s(), s(), s());
    let g = SymElement::<E>::generator();
    let f = g * phi;
    let top = if bit { d } else { c };
    (
        P3dhTuple {
            g,
            f,
            ga: g * a,
            fa: f * a,
            gb: g * b,
            fb: f * b,
            x1: g * (a * b) + f * z1,
            y1: g * z1,
            x2: g * (a * b * c) + f * z2,
            y2: g * z2,
            t1: g * top + f * z3,
            t2: g * z3,
        },
        P3dhExponents {
            a,
            b,
            c,
            d,
            phi,
            z1,
            z2,
            z3,
            bit,
        },
    )
}

impl<E: PairingSuite> P3dhTuple<E> {
    pub fn components(&self) -> [&SymElement<E>; 12] {
        [
            &self.g, &self.f, &self.ga, &self.fa, &self.gb, &self.fb, &self.x1, &self.y1, &self.x2,
            &self.y2, &self.t1, &self.t2,
        ]
    }

    pub fn components_mut(&mut self) -> [&mut SymElement<E>; 12] {
        [
            &mut self.g,
            &mut self.f,
            &mut self.ga,
            &mut self.fa,
            &mut self.gb,
            &mut self.fb,
            &mut self.x1,
            &mut self.y1,
            &mut self.x2,
            &mut self.y2,
            &mut self.t1,
            &mut self.t2,
        ]
    }
}

/// Checks every pairing relation among the published components that holds
/// without knowledge of any exponent:
///
/// - each component carries one exponent on both of its halves;
/// - `e(g^a, f) = e(g, f^a)` and `e(g^b, f) = e(g, f^b)`;
/// - `e(g^{ab} f^{z1}, g) = e(g^a, g^b) · e(f, g^{z1})`.
///
/// The `abc` and `T` components are constrained only through exponents the
/// verifier does not know, so a corruption that keeps both halves of one of
/// them consistent is undetectable by construction.
pub fn verify_p3dh_wellformed<E: PairingSuite>(t: &P3dhTuple<E>) -> bool {
    if t.g.g1.is_zero() || !t.components().iter().all(|c| c.is_consistent()) {
        return false;
    }
    let rel_a = t.ga.pair(&t.f) == t.g.pair(&t.fa);
    let rel_b = t.gb.pair(&t.f) == t.g.pair(&t.fb);
    let rel_ab = t.x1.pair(&t.g) == t.ga.pair(&t.gb) + t.f.pair(&t.y1);
    rel_a && rel_b && rel_ab
}

fn write_sym<E: PairingSuite>(tag: u8, x: &SymElement<E>, w: &mut TlvWriter) {
    w.nested(tag, |w| {
        w.put_point(1, &x.g1);
        w.put_point(2, &x.g2);
    });
}

fn read_sym<E: PairingSuite>(tag: u8, r: &mut TlvReader<'_>) -> Result<SymElement<E>, DecodeError> {
    let mut inner = r.nested(tag)?;
    let g1 = inner.point(1)?;
    let g2 = inner.point(2)?;
    inner.finish()?;
    Ok(SymElement { g1, g2 })
}

impl<E: PairingSuite> Record for BdhTuple<E> {
    const KIND: u8 = 0x03;

    fn write_body(&self, w: &mut TlvWriter) {
        write_sym(1, &self.g, w);
        write_sym(2, &self.ga, w);
        write_sym(3, &self.gb, w);
        write_sym(4, &self.gc, w);
        w.put_canonical(5, &self.t);
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        Ok(Self {
            g: read_sym(1, r)?,
            ga: read_sym(2, r)?,
            gb: read_sym(3, r)?,
            gc: read_sym(4, r)?,
            t: r.canonical(5)?,
        })
    }
}

impl<E: PairingSuite> Record for P3dhTuple<E> {
    const KIND: u8 = 0x04;

    fn write_body(&self, w: &mut TlvWriter) {
        for (i, c) in self.components().iter().enumerate() {
            write_sym(i as u8 + 1, c, w);
        }
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let mut c = Vec::with_capacity(12);
        for i in 0..12u8 {
            c.push(read_sym(i + 1, r)?);
        }
        let [g, f, ga, fa, gb, fb, x1, y1, x2, y2, t1, t2]: [SymElement<E>; 12] =
            c.try_into().expect("12 components");
        Ok(Self {
            g,
            f,
            ga,
            fa,
            gb,
            fb,
            x1,
            y1,
            x2,
            y2,
            t1,
            t2,
        })
    }
}
