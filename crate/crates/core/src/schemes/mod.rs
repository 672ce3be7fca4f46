//! Concrete HVE schemes.

pub mod asym;
pub mod bw;
pub mod dhve;
pub mod ll;

pub use asym::Asym;
pub use bw::Bw;
pub use dhve::Dhve;
pub use ll::Ll;

use ark_ec::CurveGroup;

use crate::error::DecodeError;
use crate::product::ProductElement;
use crate::wire::{TlvReader, TlvWriter};

pub(crate) fn write_list<G: CurveGroup>(tag: u8, xs: &[ProductElement<G>], w: &mut TlvWriter) {
    w.nested(tag, |w| xs.iter().for_each(|x| x.write(1, w)));
}

pub(crate) fn read_list<G: CurveGroup>(
    tag: u8,
    dim: usize,
    r: &mut TlvReader<'_>,
) -> Result<Vec<ProductElement<G>>, DecodeError> {
    let mut inner = r.nested(tag)?;
    let mut out = Vec::new();
    while !inner.is_empty() {
        out.push(ProductElement::read_dim(1, dim, &mut inner)?);
    }
    Ok(out)
}
