//! Delegatable HVE over three-dimensional product groups.
//!
//! Public keys, secret keys and ciphertexts are those of [`crate::schemes::ll`].
//! Tokens use one exponent per fixed slot and carry, for every `?` slot,
//! extra components that let the holder fix that slot to a value or to `*`
//! without the secret key.

use ark_ff::Field;

use crate::error::{DecodeError, Error, Result};
use crate::group::{
    multi_pair, scalar_nonzero, scalar_random, Fr, GroupSuite, Gt, PairingSuite, RandomSource, G1,
    G2,
};
use crate::hve::{
    check_len, Attribute, AttributeVector, CountElements, ElementCounts, HveScheme, PatternVector,
    SchemeId, Slot, SlotKind,
};
use crate::product::{pairing_terms, ProductElement, Side2};
use crate::schemes::ll::{self, LlCiphertext, LlPublicKey, LlSecretKey};
use crate::schemes::{read_list, write_list};
use crate::wire::{Record, TlvReader, TlvWriter};

const KIND: u8 = SchemeId::kind_base(3);

/// Scheme marker.
#[derive(Debug, Clone, Copy)]
pub struct Dhve;

pub type DhvePublicKey<E> = LlPublicKey<E>;
pub type DhveSecretKey<E> = LlSecretKey<E>;
pub type DhveCiphertext<E> = LlCiphertext<E>;

/// Delegation components of one `?` slot `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelegationComponents<E: PairingSuite> {
    pub l1u: Side2<E>,
    pub l1h: Side2<E>,
    pub l2: Side2<E>,
    pub l3: Side2<E>,
    /// Keyed by `S ∪ {j}` in ascending order.
    pub l4: Vec<Side2<E>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DhveToken<E: PairingSuite> {
    pub kinds: Vec<SlotKind>,
    pub k1: Side2<E>,
    pub k2: Side2<E>,
    pub k3: Side2<E>,
    /// Keyed by the fixed slots `S` in ascending order.
    pub k4: Vec<Side2<E>>,
    /// Keyed by the `?` slots in ascending order.
    pub delegation: Vec<DelegationComponents<E>>,
}

impl<E: PairingSuite> DhveToken<E> {
    pub fn l(&self) -> usize {
        self.kinds.len()
    }

    pub fn fixed(&self) -> Vec<usize> {
        indices_of(&self.kinds, SlotKind::Fixed)
    }

    pub fn delegatable(&self) -> Vec<usize> {
        indices_of(&self.kinds, SlotKind::Delegatable)
    }
}

fn indices_of(kinds: &[SlotKind], kind: SlotKind) -> Vec<usize> {
    kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| **k == kind)
        .map(|(i, _)| i)
        .collect()
}

/// `S ∪ {j}`, ascending.
fn with_slot(fixed: &[usize], j: usize) -> Vec<usize> {
    let mut v = fixed.to_vec();
    let pos = v.partition_point(|&i| i < j);
    v.insert(pos, j);
    v
}

pub fn setup<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    suite: &GroupSuite<E>,
    l: usize,
) -> Result<(DhvePublicKey<E>, DhveSecretKey<E>)> {
    ll::setup(rng, suite, l)
}

pub fn gen_token<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    pattern: &PatternVector,
    sk: &DhveSecretKey<E>,
) -> Result<DhveToken<E>> {
    check_len(sk.u2.len(), pattern.len())?;
    let fixed = pattern.fixed_scalars::<Fr<E>>();
    let b3 = &sk.b3_hat;
    let mut s = || scalar_random::<Fr<E>, R>(&mut *rng);

    // Π_{i∈S} (u2_i^{σ_i} h2_i)^{r_i} as lincomb terms.
    let attr_terms = |r: &[Fr<E>]| -> Vec<(&Side2<E>, Fr<E>)> {
        fixed
            .iter()
            .zip(r)
            .flat_map(|(&(i, sigma), r)| [(&sk.u2[i], sigma * r), (&sk.h2[i], *r)])
            .collect()
    };
    let tail = |r: Fr<E>, y: Fr<E>| ProductElement::lincomb(&[(&sk.v2, -r), (b3, y)]);

    let (r1, r2) = (s(), s());
    let r3: Vec<Fr<E>> = fixed.iter().map(|_| s()).collect();
    let mut terms = vec![
        (&sk.b12_alpha, Fr::<E>::ONE),
        (&sk.w21, r1),
        (&sk.w22, r2),
        (b3, s()),
    ];
    terms.extend(attr_terms(&r3));
    let k1 = ProductElement::lincomb(&terms);
    let (k2, k3) = (tail(r1, s()), tail(r2, s()));
    let k4 = r3.iter().map(|r| tail(*r, s())).collect();

    let mut delegation = Vec::new();
    for j in pattern.delegatable_indices() {
        let (s1, s2) = (s(), s());
        let s3: Vec<Fr<E>> = fixed.iter().map(|_| s()).collect();
        let s3jj = s();
        let l1u = ProductElement::lincomb(&[(&sk.u2[j], s3jj), (b3, s())]);
        let mut terms = vec![(&sk.w21, s1), (&sk.w22, s2), (&sk.h2[j], s3jj), (b3, s())];
        terms.extend(attr_terms(&s3));
        let l1h = ProductElement::lincomb(&terms);
        let (l2, l3) = (tail(s1, s()), tail(s2, s()));
        // L4 keyed by S ∪ {j}: s3jj sits at j's sorted position.
        let mut exps: Vec<(usize, Fr<E>)> = fixed.iter().map(|(i, _)| *i).zip(s3).collect();
        exps.insert(exps.partition_point(|(i, _)| *i < j), (j, s3jj));
        let l4 = exps.iter().map(|(_, e)| tail(*e, s())).collect();
        delegation.push(DelegationComponents {
            l1u,
            l1h,
            l2,
            l3,
            l4,
        });
    }

    Ok(DhveToken {
        kinds: pattern.slots().iter().map(SlotKind::of).collect(),
        k1,
        k2,
        k3,
        k4,
        delegation,
    })
}

pub fn encrypt_element<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    x: &AttributeVector,
    m: Gt<E>,
    pk: &DhvePublicKey<E>,
) -> Result<DhveCiphertext<E>> {
    ll::encrypt_element(rng, x, m, pk)
}

/// `C0 · (e(C1,K1) e(C2,K2) e(C3,K3) Π_{i∈S} e(C4_i, K4_i))^{-1}`.
pub fn decrypt_element<E: PairingSuite>(
    ct: &DhveCiphertext<E>,
    tk: &DhveToken<E>,
) -> Result<Gt<E>> {
    check_len(tk.l(), ct.c4.len())?;
    let mut terms: Vec<(G1<E>, G2<E>)> = pairing_terms::<E>(&ct.c1, &tk.k1);
    terms.extend(pairing_terms::<E>(&ct.c2, &tk.k2));
    terms.extend(pairing_terms::<E>(&ct.c3, &tk.k3));
    for (i, k4) in tk.fixed().into_iter().zip(&tk.k4) {
        terms.extend(pairing_terms::<E>(&ct.c4[i], k4));
    }
    Ok(ct.c0 - multi_pair::<E>(&terms))
}

/// Fixes the `?` slot `k` (0-based) to `slot`, which must be a value or `*`.
pub fn delegate<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    k: usize,
    slot: &Slot,
    tk: &DhveToken<E>,
    pk: &DhvePublicKey<E>,
) -> Result<DhveToken<E>> {
    if tk.kinds.get(k) != Some(&SlotKind::Delegatable) {
        return Err(Error::InvalidDelegation(format!(
            "slot {} is not delegatable",
            k + 1
        )));
    }
    let b3 = &pk.b3_hat;
    let mut reblind = |x: &Side2<E>| {
        ProductElement::lincomb(&[(x, Fr::<E>::ONE), (b3, scalar_random(&mut *rng))])
    };
    let old_deleg = tk.delegatable();
    let pos_k = old_deleg
        .iter()
        .position(|&j| j == k)
        .expect("k is delegatable");
    let dk = &tk.delegation[pos_k];
    let mut kinds = tk.kinds.clone();

    match slot {
        Slot::Delegatable => Err(Error::InvalidDelegation(
            "target slot must be a value or *".into(),
        )),
        Slot::Wildcard => {
            kinds[k] = SlotKind::Wildcard;
            let delegation = tk
                .delegation
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != pos_k)
                .map(|(_, d)| DelegationComponents {
                    l1u: reblind(&d.l1u),
                    l1h: reblind(&d.l1h),
                    l2: reblind(&d.l2),
                    l3: reblind(&d.l3),
                    l4: d.l4.iter().map(&mut reblind).collect(),
                })
                .collect();
            Ok(DhveToken {
                kinds,
                k1: reblind(&tk.k1),
                k2: reblind(&tk.k2),
                k3: reblind(&tk.k3),
                k4: tk.k4.iter().map(&mut reblind).collect(),
                delegation,
            })
        }
        Slot::Value(a) => {
            let sigma_k: Fr<E> = a.to_scalar();
            let old_fixed = tk.fixed();
            let new_fixed = with_slot(&old_fixed, k);
            let one = Fr::<E>::ONE;
            let mu: Fr<E> = scalar_nonzero(&mut *rng);
            let mut fresh = || scalar_random::<Fr<E>, R>(&mut *rng);
            // Position of slot i inside L4_k's index set S ∪ {k}.
            let l4k_at = |i: usize| new_fixed.binary_search(&i).expect("index in S ∪ {k}");

            let k1 = ProductElement::lincomb(&[
                (&tk.k1, one),
                (&dk.l1u, sigma_k * mu),
                (&dk.l1h, mu),
                (b3, fresh()),
            ]);
            let k2 = ProductElement::lincomb(&[(&tk.k2, one), (&dk.l2, mu), (b3, fresh())]);
            let k3 = ProductElement::lincomb(&[(&tk.k3, one), (&dk.l3, mu), (b3, fresh())]);
            let k4 = new_fixed
                .iter()
                .map(|&i| {
                    let l4ki = &dk.l4[l4k_at(i)];
                    if i == k {
                        ProductElement::lincomb(&[(l4ki, mu), (b3, fresh())])
                    } else {
                        let old = &tk.k4[old_fixed.binary_search(&i).expect("i in S")];
                        ProductElement::lincomb(&[(old, one), (l4ki, mu), (b3, fresh())])
                    }
                })
                .collect();

            let mut delegation = Vec::new();
            for (p, &j) in old_deleg.iter().enumerate() {
                if j == k {
                    continue;
                }
                let dj = &tk.delegation[p];
                let tau: Fr<E> = fresh();
                let l1u = ProductElement::lincomb(&[(&dj.l1u, mu), (b3, fresh())]);
                let l1h = ProductElement::lincomb(&[
                    (&dj.l1h, mu),
                    (&dk.l1u, sigma_k * tau),
                    (&dk.l1h, tau),
                    (b3, fresh()),
                ]);
                let l2 = ProductElement::lincomb(&[(&dj.l2, mu), (&dk.l2, tau), (b3, fresh())]);
                let l3 = ProductElement::lincomb(&[(&dj.l3, mu), (&dk.l3, tau), (b3, fresh())]);
                // New index set S ∪ {k} ∪ {j}.
                let old_j = with_slot(&old_fixed, j);
                let l4 = with_slot(&new_fixed, j)
                    .into_iter()
                    .map(|i| {
                        if i == k {
                            ProductElement::lincomb(&[(&dk.l4[l4k_at(k)], tau), (b3, fresh())])
                        } else if i == j {
                            let l4jj = &dj.l4[old_j.binary_search(&j).expect("j in S ∪ {j}")];
                            ProductElement::lincomb(&[(l4jj, mu), (b3, fresh())])
                        } else {
                            let l4ji = &dj.l4[old_j.binary_search(&i).expect("i in S")];
                            ProductElement::lincomb(&[
                                (l4ji, mu),
                                (&dk.l4[l4k_at(i)], tau),
                                (b3, fresh()),
                            ])
                        }
                    })
                    .collect();
                delegation.push(DelegationComponents {
                    l1u,
                    l1h,
                    l2,
                    l3,
                    l4,
                });
            }
            kinds[k] = SlotKind::Fixed;
            Ok(DhveToken {
                kinds,
                k1,
                k2,
                k3,
                k4,
                delegation,
            })
        }
    }
}

/// Delegates to `target`, which must agree with the token's slot kinds
/// except for exactly one `?` slot that it fixes to a value or to `*`.
pub fn delegate_to<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    target: &PatternVector,
    tk: &DhveToken<E>,
    pk: &DhvePublicKey<E>,
) -> Result<DhveToken<E>> {
    check_len(tk.l(), target.len())?;
    let changed: Vec<usize> = target
        .slots()
        .iter()
        .zip(&tk.kinds)
        .enumerate()
        .filter(|(_, (s, k))| SlotKind::of(s) != **k)
        .map(|(i, _)| i)
        .collect();
    match changed.as_slice() {
        [k] => delegate(rng, *k, &target.slots()[*k], tk, pk),
        [] => Err(Error::InvalidDelegation(
            "target pattern fixes no slot".into(),
        )),
        _ => Err(Error::InvalidDelegation(
            "target pattern changes more than one slot".into(),
        )),
    }
}

/// Convenience wrapper for fixing slot `k` to an attribute value.
pub fn delegate_value<E: PairingSuite, R: RandomSource + ?Sized>(
    rng: &mut R,
    k: usize,
    value: impl Into<Attribute>,
    tk: &DhveToken<E>,
    pk: &DhvePublicKey<E>,
) -> Result<DhveToken<E>> {
    delegate(rng, k, &Slot::Value(value.into()), tk, pk)
}

impl<E: PairingSuite> HveScheme<E> for Dhve {
    const ID: SchemeId = SchemeId::Dhve3;
    type PublicKey = DhvePublicKey<E>;
    type SecretKey = DhveSecretKey<E>;
    type Token = DhveToken<E>;
    type Ciphertext = DhveCiphertext<E>;

    fn setup<R: RandomSource + ?Sized>(
        rng: &mut R,
        suite: &GroupSuite<E>,
        l: usize,
    ) -> Result<(Self::PublicKey, Self::SecretKey)> {
        setup(rng, suite, l)
    }

    fn gen_token<R: RandomSource + ?Sized>(
        rng: &mut R,
        pattern: &PatternVector,
        sk: &Self::SecretKey,
        _pk: &Self::PublicKey,
    ) -> Result<Self::Token> {
        gen_token(rng, pattern, sk)
    }

    fn encrypt_element<R: RandomSource + ?Sized>(
        rng: &mut R,
        x: &AttributeVector,
        m: Gt<E>,
        pk: &Self::PublicKey,
    ) -> Result<Self::Ciphertext> {
        encrypt_element(rng, x, m, pk)
    }

    fn decrypt_element(
        ct: &Self::Ciphertext,
        tk: &Self::Token,
        _pk: &Self::PublicKey,
    ) -> Result<Gt<E>> {
        decrypt_element(ct, tk)
    }

    fn attribute_len(pk: &Self::PublicKey) -> usize {
        pk.u.len()
    }
}

impl<E: PairingSuite> CountElements for DhveToken<E> {
    fn element_counts(&self) -> ElementCounts {
        let dec = [&self.k1, &self.k2, &self.k3]
            .iter()
            .map(|k| k.dim())
            .sum::<usize>()
            + self.k4.iter().map(|k| k.dim()).sum::<usize>();
        let del: usize = self
            .delegation
            .iter()
            .map(|d| {
                [&d.l1u, &d.l1h, &d.l2, &d.l3]
                    .iter()
                    .map(|k| k.dim())
                    .sum::<usize>()
                    + d.l4.iter().map(|k| k.dim()).sum::<usize>()
            })
            .sum();
        ElementCounts {
            g1: 0,
            g2: dec + del,
            gt: 0,
        }
    }
}

impl<E: PairingSuite> Record for DhveToken<E> {
    const KIND: u8 = KIND + 4;

    fn write_body(&self, w: &mut TlvWriter) {
        SlotKind::write_all(1, &self.kinds, w);
        self.k1.write(2, w);
        self.k2.write(3, w);
        self.k3.write(4, w);
        write_list(5, &self.k4, w);
        for d in &self.delegation {
            w.nested(6, |w| {
                d.l1u.write(1, w);
                d.l1h.write(2, w);
                d.l2.write(3, w);
                d.l3.write(4, w);
                write_list(5, &d.l4, w);
            });
        }
    }

    fn read_body(r: &mut TlvReader<'_>) -> Result<Self, DecodeError> {
        let kinds = SlotKind::read_all(1, r)?;
        if kinds.is_empty() {
            return Err(DecodeError::Malformed("empty pattern"));
        }
        let k1 = ProductElement::read_dim(2, 3, r)?;
        let k2 = ProductElement::read_dim(3, 3, r)?;
        let k3 = ProductElement::read_dim(4, 3, r)?;
        let k4 = read_list(5, 3, r)?;
        let s = indices_of(&kinds, SlotKind::Fixed).len();
        if k4.len() != s {
            return Err(DecodeError::Malformed("token component count"));
        }
        let mut delegation = Vec::new();
        for _ in indices_of(&kinds, SlotKind::Delegatable) {
            let mut inner = r.nested(6)?;
            let d = DelegationComponents {
                l1u: ProductElement::read_dim(1, 3, &mut inner)?,
                l1h: ProductElement::read_dim(2, 3, &mut inner)?,
                l2: ProductElement::read_dim(3, 3, &mut inner)?,
                l3: ProductElement::read_dim(4, 3, &mut inner)?,
                l4: read_list(5, 3, &mut inner)?,
            };
            inner.finish()?;
            if d.l4.len() != s + 1 {
                return Err(DecodeError::Malformed("delegation component count"));
            }
            delegation.push(d);
        }
        Ok(Self {
            kinds,
            k1,
            k2,
            k3,
            k4,
            delegation,
        })
    }
}
