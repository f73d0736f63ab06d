//! Orthomorphisms: permutations ℘ with x ↦ ℘(x) − x also a permutation.
//!
//! Every [`Ortho`] is verified at construction and normalized to ℘(0) = 0;
//! the subtracted constant is kept as `shift`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::func::{is_bijective, VFunc};
use crate::gf::{Elt, FieldCtx};
use crate::linalg::Matrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// ℘(x) = c·x
    CMult { c: Elt },
    /// ℘(x) = c·x^{p^j}
    MonomialTwist { c: Elt, j: u32 },
    /// ℘ = A on polynomial-basis coordinates
    Matrix { matrix: Matrix },
    /// ℘(x) = b·x + (x^{2^m} + x)^3 on F_{2^{2m}}
    ThmEx { b: Elt, m: u32 },
    /// ℘(x) = (x^{q^m} − x)^{2k} − x on F_{q^{2m}}
    Qm { q: u32, m: u32, k: u32 },
    Custom,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::CMult { .. } => "c-mult",
            Family::MonomialTwist { .. } => "monomial-twist",
            Family::Matrix { .. } => "matrix",
            Family::ThmEx { .. } => "theorem-ex",
            Family::Qm { .. } => "theorem-qm",
            Family::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Ortho {
    map: VFunc,
    inverse: Vec<u32>,
    family: Family,
    shift: Elt,
    linear: bool,
}

fn shifted_table(f: &VFunc, sign: Elt) -> Vec<u32> {
    let k = f.cod();
    f.dom().elements().map(|x| k.add(f.eval(x), k.mul(sign, x)).0).collect()
}

/// f and x ↦ f(x) + x are both permutations.
pub fn is_complete_mapping(f: &VFunc) -> bool {
    f.is_endo() && is_bijective(f.table()) && is_bijective(&shifted_table(f, Elt::ONE))
}

/// f and x ↦ f(x) − x are both permutations (no normalization needed).
pub fn is_orthomorphism(f: &VFunc) -> bool {
    f.is_endo() && is_bijective(f.table()) && is_bijective(&shifted_table(f, f.cod().neg(Elt::ONE)))
}

/// Verifies `f` and returns it normalized to ℘(0) = 0.
pub fn verify_orthomorphism(f: &VFunc) -> Result<Ortho> {
    build(f, Family::Custom)
}

fn build(f: &VFunc, family: Family) -> Result<Ortho> {
    if !f.is_endo() {
        return Err(Error::DomainMismatch("orthomorphism must be an endomap"));
    }
    let k = f.cod();
    let shift = f.eval(Elt::ZERO);
    let map = if shift.is_zero() { f.clone() } else { VFunc::add_const(f, k.neg(shift)) };
    if !is_bijective(map.table()) {
        return Err(Error::NotPermutation);
    }
    if !is_bijective(&shifted_table(&map, k.neg(Elt::ONE))) {
        return Err(Error::NotOrthomorphism);
    }
    let mut inverse = vec![0u32; k.size()];
    for (x, &y) in map.table().iter().enumerate() {
        inverse[y as usize] = x as u32;
    }
    let linear = map.is_linearized();
    Ok(Ortho { map, inverse, family, shift, linear })
}

pub fn make_c_mult(ctx: &Arc<FieldCtx>, c: Elt) -> Result<Ortho> {
    if !ctx.contains(c) || c.is_zero() || c == Elt::ONE {
        return Err(Error::BadC);
    }
    build(&VFunc::from_linearized(ctx, &[c]), Family::CMult { c })
}

/// ℘(x) = c·x^{p^j} with j | n and c not a (p^j − 1)-th power. For p = 2
/// this is the twist c·x^{2^j}.
pub fn make_monomial_twist(ctx: &Arc<FieldCtx>, c: Elt, j: u32) -> Result<Ortho> {
    if j == 0 || !ctx.n().is_multiple_of(j) {
        return Err(Error::BadTwist("j must divide n"));
    }
    if !ctx.contains(c) || c.is_zero() {
        return Err(Error::BadTwist("c must be nonzero"));
    }
    let e = ctx.p().pow(j) - 1;
    if ctx.is_kth_power(c, e as u128)? {
        return Err(Error::BadTwist("c is a (p^j - 1)-th power"));
    }
    let mut coeffs = vec![Elt::ZERO; j as usize + 1];
    coeffs[j as usize] = c;
    build(&VFunc::from_linearized(ctx, &coeffs), Family::MonomialTwist { c, j })
}

pub fn make_matrix_ortho(ctx: &Arc<FieldCtx>, a: &Matrix) -> Result<Ortho> {
    if !a.is_invertible() {
        return Err(Error::Singular);
    }
    if !a.sub_identity().is_invertible() {
        return Err(Error::ShiftSingular);
    }
    let table = a.to_table(ctx)?;
    let f = VFunc::from_table(ctx.clone(), ctx.clone(), table)?;
    build(&f, Family::Matrix { matrix: a.clone() })
}

/// ℘(x) = b·x + (x^{2^m} + x)^3 on F_{2^{2m}}, m odd, b ∈ F_{2^m} \ {0, 1}.
pub fn make_thmex_ortho(ctx: &Arc<FieldCtx>, b: Elt) -> Result<Ortho> {
    if ctx.p() != 2 || !ctx.n().is_multiple_of(2) {
        return Err(Error::BadParams("field must be F_{2^{2m}}".into()));
    }
    let m = ctx.n() / 2;
    if m.is_multiple_of(2) {
        return Err(Error::BadParams("m must be odd".into()));
    }
    if !ctx.contains(b) || b.is_zero() || b == Elt::ONE || !ctx.in_subfield(b, m)? {
        return Err(Error::BadParams("b must lie in F_{2^m} \\ {0, 1}".into()));
    }
    let f = thmex_map(ctx, b);
    build(&f, Family::ThmEx { b, m })
}

/// b·x + (x^{2^m} + x)^3 without any admissibility checks.
pub fn thmex_map(ctx: &Arc<FieldCtx>, b: Elt) -> VFunc {
    let m = ctx.n() / 2;
    VFunc::endo_fn(ctx, |x| {
        let t = ctx.add(ctx.frobenius(x, m), x);
        ctx.add(ctx.mul(b, x), ctx.pow(t, 3))
    })
}

/// ℘(x) = (x^{q^m} − x)^{2k} − x on F_{q^{2m}}, q odd. Also checks ℘∘℘ = id.
pub fn make_qm_ortho(ctx: &Arc<FieldCtx>, q: u32, m: u32, k: u32) -> Result<Ortho> {
    let p = ctx.p();
    if p == 2 || k == 0 || m == 0 {
        return Err(Error::BadParams("need q odd and m, k >= 1".into()));
    }
    let mut s = 0;
    let mut t = q;
    while t > 1 && t.is_multiple_of(p) {
        t /= p;
        s += 1;
    }
    if t != 1 || s == 0 || 2 * m * s != ctx.n() {
        return Err(Error::BadParams("field order must be q^{2m} with q a power of p".into()));
    }
    let f = qm_map(ctx, m * s, k);
    let o = build(&f, Family::Qm { q, m, k })?;
    if o.map.table().iter().enumerate().any(|(x, &y)| o.map.table()[y as usize] != x as u32) {
        return Err(Error::BadParams("map is not self-inverse".into()));
    }
    Ok(o)
}

fn qm_map(ctx: &Arc<FieldCtx>, half: u32, k: u32) -> VFunc {
    VFunc::endo_fn(ctx, |x| {
        let t = ctx.sub(ctx.frobenius(x, half), x);
        ctx.sub(ctx.pow(t, 2 * k as u128), x)
    })
}

impl Ortho {
    pub fn map(&self) -> &VFunc {
        &self.map
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.map.dom()
    }

    #[inline]
    pub fn apply(&self, y: Elt) -> Elt {
        self.map.eval(y)
    }

    #[inline]
    pub fn apply_inv(&self, y: Elt) -> Elt {
        Elt(self.inverse[y.idx()])
    }

    pub fn table(&self) -> &[u32] {
        self.map.table()
    }

    pub fn inverse_table(&self) -> &[u32] {
        &self.inverse
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// The constant subtracted during normalization.
    pub fn shift(&self) -> Elt {
        self.shift
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    /// ℘∘℘ = id.
    pub fn is_involution(&self) -> bool {
        self.map.table() == self.inverse.as_slice()
    }
}
