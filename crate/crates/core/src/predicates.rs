//! Encodings of comparison, range and subset predicates as HVE patterns
//! over the alphabet `{0, 1}`, the inner-product vector encoding, and plain
//! evaluators for all of them.
//!
//! A field `i ∈ 1..=w` over domain `1..=n` occupies the block of positions
//! `(i-1)·n .. i·n`; position `j` within the block is 1-based.

use std::collections::BTreeSet;

use ark_ff::PrimeField;

use crate::error::{Error, Result};
use crate::group::{scalar_random, RandomSource};
use crate::hve::{Attribute, AttributeVector, PatternVector, Slot};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidEncoding(msg.into())
}

fn check_domain(n: usize, w: usize) -> Result<()> {
    if n == 0 || w == 0 {
        return Err(invalid("domain size and field count must be positive"));
    }
    Ok(())
}

fn check_value(n: usize, v: usize, what: &str) -> Result<()> {
    if !(1..=n).contains(&v) {
        return Err(invalid(format!("{what} {v} outside 1..={n}")));
    }
    Ok(())
}

/// Conjunctive comparison `b_i ≤ a_i` (or `b_i ≥ a_i` with the mirrored encoders).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonSpec {
    n: usize,
    bounds: Vec<usize>,
}

impl ComparisonSpec {
    pub fn new(n: usize, bounds: Vec<usize>) -> Result<Self> {
        check_domain(n, bounds.len())?;
        for &a in &bounds {
            check_value(n, a, "bound")?;
        }
        Ok(Self { n, bounds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }
}

/// Conjunctive range `lo_i ≤ b_i ≤ hi_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeSpec {
    n: usize,
    intervals: Vec<(usize, usize)>,
}

impl RangeSpec {
    pub fn new(n: usize, intervals: Vec<(usize, usize)>) -> Result<Self> {
        check_domain(n, intervals.len())?;
        for &(lo, hi) in &intervals {
            check_value(n, lo, "lower bound")?;
            check_value(n, hi, "upper bound")?;
            if lo > hi {
                return Err(invalid(format!("empty interval [{lo},{hi}]")));
            }
        }
        Ok(Self { n, intervals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }
}

/// Conjunctive subset membership `b_i ∈ A_i`. An empty `A_i` never matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpec {
    n: usize,
    sets: Vec<BTreeSet<usize>>,
}

impl SubsetSpec {
    pub fn new(n: usize, sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        check_domain(n, sets.len())?;
        for &v in sets.iter().flatten() {
            check_value(n, v, "set element")?;
        }
        Ok(Self { n, sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }
}

fn bit(b: bool) -> Attribute {
    Attribute::Int(b as u64)
}

fn blocks<T>(n: usize, w: usize, mut f: impl FnMut(usize, usize) -> T) -> Vec<T> {
    (0..w)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .map(|(i, j)| f(i, j))
        .collect()
}

fn pattern(slots: Vec<Slot>) -> PatternVector {
    PatternVector::new(slots).expect("specs have n, w ≥ 1")
}

fn attrs(a: Vec<Attribute>) -> AttributeVector {
    AttributeVector::new(a).expect("specs have n, w ≥ 1")
}

fn check_values(n: usize, values: &[usize]) -> Result<()> {
    check_domain(n, values.len())?;
    values.iter().try_for_each(|&b| check_value(n, b, "value"))
}

/// Position `(i, a_i)` is `1`; every other position is `*`.
pub fn encode_comparison_token(spec: &ComparisonSpec) -> PatternVector {
    let a = &spec.bounds;
    pattern(blocks(spec.n, spec.w(), |i, j| {
        if j == a[i] {
            Slot::value(1u64)
        } else {
            Slot::Wildcard
        }
    }))
}

/// Position `(i, j)` is `1` iff `j ≥ b_i`.
pub fn encode_comparison_ciphertext(n: usize, values: &[usize]) -> Result<AttributeVector> {
    check_values(n, values)?;
    Ok(attrs(blocks(n, values.len(), |i, j| bit(j >= values[i]))))
}

/// Token for `b_i ≥ a_i`; identical in shape to the `≤` token.
pub fn encode_ge_token(spec: &ComparisonSpec) -> PatternVector {
    encode_comparison_token(spec)
}

/// Position `(i, j)` is `1` iff `j ≤ b_i`.
pub fn encode_ge_ciphertext(n: usize, values: &[usize]) -> Result<AttributeVector> {
    check_values(n, values)?;
    Ok(attrs(blocks(n, values.len(), |i, j| bit(j <= values[i]))))
}

/// The `≤ hi` token followed by the `≥ lo` token.
pub fn encode_range_token(spec: &RangeSpec) -> PatternVector {
    let (lo, hi): (Vec<usize>, Vec<usize>) = spec.intervals.iter().copied().unzip();
    let le = encode_comparison_token(&ComparisonSpec {
        n: spec.n,
        bounds: hi,
    });
    let ge = encode_ge_token(&ComparisonSpec {
        n: spec.n,
        bounds: lo,
    });
    pattern(le.slots().iter().chain(ge.slots()).cloned().collect())
}

/// The pair `(b, b)` under the `≤` and `≥` ciphertext encodings.
pub fn encode_range_ciphertext(n: usize, values: &[usize]) -> Result<AttributeVector> {
    let le = encode_comparison_ciphertext(n, values)?;
    let ge = encode_ge_ciphertext(n, values)?;
    Ok(attrs(
        le.attrs().iter().chain(ge.attrs()).cloned().collect(),
    ))
}

/// Position `(i, j)` is `0` iff `j ∉ A_i`, else `*`.
pub fn encode_subset_token(spec: &SubsetSpec) -> PatternVector {
    pattern(blocks(spec.n, spec.w(), |i, j| {
        if spec.sets[i].contains(&j) {
            Slot::Wildcard
        } else {
            Slot::value(0u64)
        }
    }))
}

/// Position `(i, j)` is `1` iff `j = b_i`.
pub fn encode_subset_ciphertext(n: usize, values: &[usize]) -> Result<AttributeVector> {
    check_values(n, values)?;
    Ok(attrs(blocks(n, values.len(), |i, j| bit(j == values[i]))))
}

/// Conjunctive equality needs no encoding.
pub fn encode_equality(sigma: &PatternVector) -> PatternVector {
    sigma.clone()
}

pub fn eval_comparison(spec: &ComparisonSpec, values: &[usize]) -> bool {
    values.len() == spec.w() && values.iter().zip(&spec.bounds).all(|(b, a)| b <= a)
}

pub fn eval_ge(spec: &ComparisonSpec, values: &[usize]) -> bool {
    values.len() == spec.w() && values.iter().zip(&spec.bounds).all(|(b, a)| b >= a)
}

pub fn eval_range(spec: &RangeSpec, values: &[usize]) -> bool {
    values.len() == spec.w()
        && values
            .iter()
            .zip(&spec.intervals)
            .all(|(b, (lo, hi))| lo <= b && b <= hi)
}

pub fn eval_subset(spec: &SubsetSpec, values: &[usize]) -> bool {
    values.len() == spec.w() && values.iter().zip(&spec.sets).all(|(b, a)| a.contains(b))
}

/// `σ ↦ σ'` with `(1, σ_i)` for fixed slots and `(0, 0)` for wildcards.
pub fn ipe_encode_token<F: PrimeField>(sigma: &PatternVector) -> Result<Vec<F>> {
    sigma.ensure_no_delegatable()?;
    Ok(sigma
        .slots()
        .iter()
        .flat_map(|s| match s {
            Slot::Value(a) => [F::ONE, a.to_scalar()],
            _ => [F::ZERO, F::ZERO],
        })
        .collect())
}

/// `x ↦ x'` with `(-r_i·x_i, r_i)` for fresh uniform `r_i`.
pub fn ipe_encode_ciphertext<F: PrimeField, R: RandomSource + ?Sized>(
    rng: &mut R,
    x: &AttributeVector,
) -> Vec<F> {
    x.to_scalars::<F>()
        .into_iter()
        .flat_map(|xi| {
            let r: F = scalar_random(rng);
            [-r * xi, r]
        })
        .collect()
}

pub fn ipe_inner_product<F: PrimeField>(u: &[F], v: &[F]) -> Result<F> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(a, b)| *a * b).sum())
}
