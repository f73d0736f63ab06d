use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{Elt, FieldCtx, NONE};
use crate::{Error, Result};

/// A field homomorphism F_{p^m} → F_{p^n} (m | n) sending the generator of
/// the small field's polynomial basis to the least root of its modulus.
#[derive(Debug, Clone)]
pub struct Embedding {
    big: Arc<FieldCtx>,
    small: Arc<FieldCtx>,
    up: Vec<u32>,
    down: Vec<u32>,
}

impl Embedding {
    pub fn new(big: Arc<FieldCtx>, small: Arc<FieldCtx>) -> Result<Embedding> {
        if big.p() != small.p() {
            return Err(Error::DomainMismatch("characteristics differ"));
        }
        if !big.n().is_multiple_of(small.n()) {
            return Err(Error::NotADivisor { m: small.n(), n: big.n() });
        }
        let modulus = &small.spec().modulus;
        let root = big
            .elements()
            .find(|&b| {
                let mut acc = Elt::ZERO;
                for &c in modulus.iter().rev() {
                    acc = big.add(big.mul(acc, b), big.from_int(c as i128));
                }
                acc.is_zero()
            })
            .ok_or(Error::DomainMismatch("small modulus has no root"))?;
        let mut powers = Vec::with_capacity(small.n() as usize);
        let mut cur = Elt::ONE;
        for _ in 0..small.n() {
            powers.push(cur);
            cur = big.mul(cur, root);
        }
        let mut up = vec![0u32; small.size()];
        let mut down = vec![NONE; big.size()];
        for y in small.elements() {
            let mut acc = Elt::ZERO;
            for (i, &b) in powers.iter().enumerate() {
                let d = small.digit(y, i as u32);
                acc = big.add(acc, big.mul(big.from_int(d as i128), b));
            }
            up[y.idx()] = acc.0;
            down[acc.idx()] = y.0;
        }
        Ok(Embedding { big, small, up, down })
    }

    pub fn big(&self) -> &Arc<FieldCtx> {
        &self.big
    }

    pub fn small(&self) -> &Arc<FieldCtx> {
        &self.small
    }

    #[inline]
    pub fn up(&self, y: Elt) -> Elt {
        Elt(self.up[y.idx()])
    }

    /// Preimage of a big-field element lying in the image, else `None`.
    #[inline]
    pub fn down(&self, x: Elt) -> Option<Elt> {
        match self.down[x.idx()] {
            NONE => None,
            v => Some(Elt(v)),
        }
    }
}
