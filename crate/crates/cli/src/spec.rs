//! Text forms accepted on the command line: attribute lists, encoded value
//! lists and predicate specs.
//!
//! A predicate spec has one expression per field, separated by commas that
//! are not inside `{}` or `[]`:
//!
//! ```text
//! =v  *  ?  <=k  >=k  in{a,b,...}  [lo,hi]
//! ```

use std::collections::BTreeSet;

use anyhow::Result;
use hve_core::predicates::{
    encode_comparison_ciphertext, encode_comparison_token, encode_range_ciphertext,
    encode_range_token, encode_subset_ciphertext, encode_subset_token, ComparisonSpec, RangeSpec,
    SubsetSpec,
};
use hve_core::{Attribute, AttributeVector, PatternVector, SchemeId, Slot};

use crate::files::{Encoding, Family};
use crate::usage;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Eq(Attribute),
    Wildcard,
    Delegatable,
    Le(usize),
    Ge(usize),
    In(BTreeSet<usize>),
    Between(usize, usize),
}

/// Splits at commas outside brackets.
pub fn split_fields(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '{' | '[' => depth += 1,
            '}' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(usage!("unbalanced {c:?} in {s:?}"));
                }
            }
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(usage!("unclosed bracket in {s:?}"));
    }
    out.push(s[start..].trim());
    Ok(out)
}

/// Integers become `Int` attributes, anything else is taken as bytes.
pub fn parse_attr(s: &str) -> Result<Attribute> {
    if s.is_empty() {
        return Err(usage!("empty attribute value"));
    }
    Ok(match s.parse::<u64>() {
        Ok(n) => Attribute::Int(n),
        Err(_) => Attribute::from(s),
    })
}

pub fn parse_attrs(s: &str) -> Result<Vec<Attribute>> {
    s.split(',').map(|v| parse_attr(v.trim())).collect()
}

fn parse_num(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| usage!("expected a number, got {s:?}"))
}

pub fn parse_values(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(parse_num).collect()
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let expr = match s {
        "*" => Expr::Wildcard,
        "?" => Expr::Delegatable,
        _ if s.starts_with("<=") => Expr::Le(parse_num(&s[2..])?),
        _ if s.starts_with(">=") => Expr::Ge(parse_num(&s[2..])?),
        _ if s.starts_with('=') => Expr::Eq(parse_attr(s[1..].trim())?),
        _ if s.starts_with("in{") && s.ends_with('}') => {
            let inner = s[3..s.len() - 1].trim();
            let set = if inner.is_empty() {
                BTreeSet::new()
            } else {
                inner.split(',').map(parse_num).collect::<Result<_>>()?
            };
            Expr::In(set)
        }
        _ if s.starts_with('[') && s.ends_with(']') => {
            let (lo, hi) = s[1..s.len() - 1]
                .split_once(',')
                .ok_or_else(|| usage!("interval {s:?} needs two bounds"))?;
            Expr::Between(parse_num(lo)?, parse_num(hi)?)
        }
        _ => return Err(usage!("cannot parse expression {s:?}")),
    };
    Ok(expr)
}

/// Builds the token pattern for `spec` against a key pair with `l` slots.
pub fn build_pattern(
    spec: &str,
    scheme: SchemeId,
    l: usize,
    encoding: Option<&Encoding>,
) -> Result<PatternVector> {
    let exprs = split_fields(spec)?
        .into_iter()
        .map(parse_expr)
        .collect::<Result<Vec<_>>>()?;
    let pattern = match encoding {
        None => plain_pattern(&exprs, scheme, l)?,
        Some(enc) => encoded_pattern(&exprs, enc)?,
    };
    debug_assert_eq!(pattern.len(), l);
    Ok(pattern)
}

fn plain_pattern(exprs: &[Expr], scheme: SchemeId, l: usize) -> Result<PatternVector> {
    if exprs.len() != l {
        return Err(usage!("spec has {} fields, key pair has {l}", exprs.len()));
    }
    let slots = exprs
        .iter()
        .map(|e| match e {
            Expr::Eq(a) => Ok(Slot::Value(a.clone())),
            Expr::Wildcard => Ok(Slot::Wildcard),
            Expr::Delegatable if scheme == SchemeId::Dhve3 => Ok(Slot::Delegatable),
            Expr::Delegatable => Err(usage!("'?' is only available with dhve3")),
            other => Err(usage!(
                "{other:?} needs an encoded key pair (keygen --encode)"
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatternVector::new(slots)?)
}

fn domain_value(e: &Attribute, n: usize) -> Result<usize> {
    match e {
        Attribute::Int(v) if (1..=n as u64).contains(v) => Ok(*v as usize),
        _ => Err(usage!("value {e} outside the domain 1..={n}")),
    }
}

fn encoded_pattern(exprs: &[Expr], enc: &Encoding) -> Result<PatternVector> {
    let (n, w) = (enc.n, enc.w);
    if exprs.len() != w {
        return Err(usage!("spec has {} fields, encoding has {w}", exprs.len()));
    }
    let unsupported = |e: &Expr| usage!("{e:?} is not available with {} encoding", enc.family);
    let pattern = match enc.family {
        Family::Cmp => {
            let bounds = exprs
                .iter()
                .map(|e| match e {
                    Expr::Le(k) => Ok(*k),
                    Expr::Wildcard => Ok(n),
                    e => Err(unsupported(e)),
                })
                .collect::<Result<Vec<_>>>()?;
            encode_comparison_token(&ComparisonSpec::new(n, bounds).map_err(invalid)?)
        }
        Family::Range => {
            let intervals = exprs
                .iter()
                .map(|e| match e {
                    Expr::Between(lo, hi) => Ok((*lo, *hi)),
                    Expr::Le(k) => Ok((1, *k)),
                    Expr::Ge(k) => Ok((*k, n)),
                    Expr::Eq(a) => domain_value(a, n).map(|v| (v, v)),
                    Expr::Wildcard => Ok((1, n)),
                    e => Err(unsupported(e)),
                })
                .collect::<Result<Vec<_>>>()?;
            encode_range_token(&RangeSpec::new(n, intervals).map_err(invalid)?)
        }
        Family::Subset => {
            let sets = exprs
                .iter()
                .map(|e| match e {
                    Expr::In(set) => Ok(set.clone()),
                    Expr::Eq(a) => domain_value(a, n).map(|v| BTreeSet::from([v])),
                    Expr::Wildcard => Ok((1..=n).collect()),
                    e => Err(unsupported(e)),
                })
                .collect::<Result<Vec<_>>>()?;
            encode_subset_token(&SubsetSpec::new(n, sets).map_err(invalid)?)
        }
    };
    Ok(pattern)
}

fn invalid(e: hve_core::Error) -> anyhow::Error {
    usage!("{e}")
}

/// Maps a record's plain values to the attribute vector that gets encrypted.
pub fn encode_values(enc: &Encoding, values: &[usize]) -> Result<AttributeVector> {
    if values.len() != enc.w {
        return Err(usage!("expected {} values, got {}", enc.w, values.len()));
    }
    let x = match enc.family {
        Family::Cmp => encode_comparison_ciphertext(enc.n, values),
        Family::Range => encode_range_ciphertext(enc.n, values),
        Family::Subset => encode_subset_ciphertext(enc.n, values),
    };
    x.map_err(invalid)
}
