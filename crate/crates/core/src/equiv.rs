//! ℘-affine equivalence F2 = A2 ∘ F1 ∘ A1 with A1 = L1 + α1 on the domain and
//! A2 = L2 + α2 on the codomain, L2 a linear permutation commuting with ℘.
//!
//! The decision procedure is a backtracking search: admissible L2 in
//! lexicographic order of their tables, then α2, then α1, then L1 grown one
//! basis image at a time with every newly determined value checked against
//! L2⁻¹(F2 − α2). The first hit is therefore the lexicographically least
//! witness in the order (L2, α2, α1, L1).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffspec::{spectrum, Mode};
use crate::func::VFunc;
use crate::gf::{Elt, FieldCtx};
use crate::linalg::{Matrix, PartialLinear};
use crate::ortho::Ortho;
use crate::{Error, Result};

/// Largest field for the permutation enumeration behind [`verify_equilem`].
pub const EQUILEM_LIMIT: u32 = 9;
/// Default largest domain for [`are_wp_affine_equivalent`].
pub const EQUIV_LIMIT: u32 = 1 << 6;
/// Largest codomain for [`admissible_l2_enumerate`].
pub const ADMISSIBLE_FIELD_LIMIT: u32 = 1 << 9;
/// Cap on (number of admissible maps) × (field order) held in memory.
pub const ADMISSIBLE_TABLE_LIMIT: u64 = 1 << 24;

/// L(℘(x)) = ℘(L(x)) for all x.
pub fn commutes_with(l: &VFunc, wp: &Ortho) -> bool {
    l.is_endo() && l.dom().spec() == wp.ctx().spec() && wp.ctx().elements().all(|x| l.eval(wp.apply(x)) == wp.apply(l.eval(x)))
}

/// L(y1 + ℘(y2)) = L(y1) + ℘(L(y2)) for all y1, y2.
pub fn satisfies_equilem_identity(l: &[u32], wp: &Ortho) -> bool {
    let ctx = wp.ctx();
    ctx.elements().all(|y2| {
        let w = wp.apply(y2);
        let lw = wp.apply(Elt(l[y2.idx()]));
        ctx.elements().all(|y1| l[ctx.add(y1, w).idx()] == ctx.add(Elt(l[y1.idx()]), lw).0)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilemReport {
    pub permutations: u64,
    /// tables of every permutation satisfying the identity, in discovery order
    pub solutions: Vec<Vec<u32>>,
    pub nonlinear: u64,
    pub moves_zero: u64,
    pub noncommuting: u64,
}

impl EquilemReport {
    pub fn holds(&self) -> bool {
        self.nonlinear == 0 && self.moves_zero == 0 && self.noncommuting == 0
    }
}

/// Enumerates every permutation of ℘'s field (Heap's algorithm) and classifies
/// those satisfying L(y1 + ℘(y2)) = L(y1) + ℘(L(y2)).
pub fn equilem_solutions(wp: &Ortho) -> Result<EquilemReport> {
    let ctx = wp.ctx();
    let q = ctx.order();
    if q > EQUILEM_LIMIT {
        return Err(Error::SizeLimit { what: "permutation enumeration", size: q as u128, limit: EQUILEM_LIMIT as u128 });
    }
    let mut rep = EquilemReport { permutations: 0, solutions: Vec::new(), nonlinear: 0, moves_zero: 0, noncommuting: 0 };
    let mut visit = |perm: &[u32]| {
        rep.permutations += 1;
        if satisfies_equilem_identity(perm, wp) {
            let f = VFunc::from_table(ctx.clone(), ctx.clone(), perm.to_vec()).expect("table in range");
            rep.nonlinear += !f.is_linearized() as u64;
            rep.moves_zero += (perm[0] != 0) as u64;
            rep.noncommuting += !commutes_with(&f, wp) as u64;
            rep.solutions.push(perm.to_vec());
        }
    };
    for_each_permutation(q as usize, &mut visit);
    Ok(rep)
}

/// Heap's algorithm: visits every permutation of 0..len exactly once.
fn for_each_permutation(len: usize, visit: &mut dyn FnMut(&[u32])) {
    let mut perm: Vec<u32> = (0..len as u32).collect();
    let mut c = vec![0usize; len];
    visit(&perm);
    let mut i = 1;
    while i < len {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Every permutation satisfying the identity of [`satisfies_equilem_identity`]
/// is linearized, fixes 0 and commutes with ℘.
pub fn verify_equilem(wp: &Ortho) -> Result<bool> {
    Ok(equilem_solutions(wp)?.holds())
}

/// Calls `visit` on the table of every linear permutation commuting with ℘, in
/// lexicographic order. Stops early when `visit` returns false.
pub fn for_each_admissible_l2(wp: &Ortho, mut visit: impl FnMut(&[u32]) -> bool) -> Result<()> {
    let ctx = wp.ctx();
    if ctx.order() > ADMISSIBLE_FIELD_LIMIT {
        return Err(Error::SizeLimit { what: "admissible L2 search", size: ctx.order() as u128, limit: ADMISSIBLE_FIELD_LIMIT as u128 });
    }
    let mut pl = PartialLinear::new(ctx);
    if close_under_wp(ctx, wp, &mut pl, 0, &mut 0) {
        admissible_rec(ctx, wp, &mut pl, &mut visit);
    }
    Ok(())
}

/// All linear permutations commuting with ℘, in lexicographic order of tables.
pub fn admissible_l2_enumerate(wp: &Ortho) -> Result<Vec<VFunc>> {
    let ctx = wp.ctx().clone();
    let mut out = Vec::new();
    let mut overflow = false;
    let cap = ADMISSIBLE_TABLE_LIMIT / ctx.order() as u64;
    for_each_admissible_l2(wp, |t| {
        if out.len() as u64 >= cap {
            overflow = true;
            return false;
        }
        out.push(VFunc::from_table(ctx.clone(), ctx.clone(), t.to_vec()).expect("table in range"));
        true
    })?;
    if overflow {
        return Err(Error::SizeLimit { what: "admissible L2 count", size: cap as u128 + 1, limit: cap as u128 });
    }
    Ok(out)
}

/// Propagates L(℘(z)) = ℘(L(z)) from `defined()[from..]`, extending the map
/// where ℘(z) is new. Records each extension in `steps` for undo.
fn close_under_wp(ctx: &FieldCtx, wp: &Ortho, pl: &mut PartialLinear, from: usize, steps: &mut usize) -> bool {
    let mut i = from;
    while i < pl.defined().len() {
        let z = Elt(pl.defined()[i]);
        let want = wp.apply(pl.image(z).expect("defined"));
        let pz = wp.apply(z);
        match pl.image(pz) {
            Some(v) if v != want => return false,
            Some(_) => {}
            None => {
                if pl.in_image(want) {
                    return false;
                }
                pl.extend(ctx, pz, want);
                *steps += 1;
            }
        }
        i += 1;
    }
    true
}

fn admissible_rec(ctx: &FieldCtx, wp: &Ortho, pl: &mut PartialLinear, visit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    let Some(x) = ctx.elements().find(|&x| !pl.is_defined(x)) else {
        return visit(&pl.table().expect("total"));
    };
    for t in ctx.elements() {
        if pl.in_image(t) {
            continue;
        }
        let start = pl.defined().len();
        pl.extend(ctx, x, t);
        let mut steps = 0;
        let ok = close_under_wp(ctx, wp, pl, start, &mut steps);
        let go_on = !ok || admissible_rec(ctx, wp, pl, visit);
        for _ in 0..=steps {
            pl.undo();
        }
        if !go_on {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivWitness {
    pub l1: VFunc,
    pub alpha1: Elt,
    pub l2: VFunc,
    pub alpha2: Elt,
    /// table equality re-checked independently of the search
    pub checked: bool,
}

impl EquivWitness {
    pub fn l1_matrix(&self) -> Matrix {
        Matrix::from_linear_table(self.l1.dom(), self.l1.table())
    }

    pub fn l2_matrix(&self) -> Matrix {
        Matrix::from_linear_table(self.l2.dom(), self.l2.table())
    }

    /// x ↦ L2(F(L1(x) + α1)) + α2.
    pub fn apply(&self, f: &VFunc) -> VFunc {
        let (dom, cod) = (f.dom(), f.cod());
        VFunc::from_fn(dom, cod, |x| cod.add(self.l2.eval(f.eval(dom.add(self.l1.eval(x), self.alpha1))), self.alpha2))
    }

    /// Independent check of F2 = A2 ∘ F1 ∘ A1 and of the admissibility of L1, L2.
    pub fn verify(&self, f1: &VFunc, f2: &VFunc, wp: &Ortho) -> bool {
        self.l1.is_linearized()
            && self.l1.is_permutation().unwrap_or(false)
            && self.l2.is_linearized()
            && self.l2.is_permutation().unwrap_or(false)
            && commutes_with(&self.l2, wp)
            && self.apply(f1).table() == f2.table()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivOptions {
    /// largest domain order
    pub limit: u32,
    /// refute early when the ℘-spectrum histograms differ
    pub prefilter: bool,
    /// restrict α2 to values with ℘(y + α2) = ℘(y) + ℘(α2) for all y
    pub additive_alpha2: bool,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { limit: EQUIV_LIMIT, prefilter: true, additive_alpha2: false }
    }
}

/// Outcome of [`EquivSearch::decide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Equivalent(EquivWitness),
    /// the ℘-spectrum histograms differ
    SpectrumMismatch,
    /// exhaustive search found nothing
    Inequivalent,
}

/// Precomputed state for deciding ℘-affine equivalence of F1 and F2.
pub struct EquivSearch<'a> {
    f1: &'a VFunc,
    f2: &'a VFunc,
    wp: &'a Ortho,
    opts: EquivOptions,
    l2s: Vec<Vec<u32>>,
    alpha2s: Vec<Elt>,
    /// F1 preimages: value ↦ sorted domain points
    pre: Vec<Vec<u32>>,
}

impl<'a> EquivSearch<'a> {
    pub fn new(f1: &'a VFunc, f2: &'a VFunc, wp: &'a Ortho, opts: EquivOptions) -> Result<EquivSearch<'a>> {
        if f1.dom().spec() != f2.dom().spec() || f1.cod().spec() != f2.cod().spec() {
            return Err(Error::DomainMismatch("F1 and F2 must share domain and codomain"));
        }
        if f1.cod().spec() != wp.ctx().spec() {
            return Err(Error::DomainMismatch("orthomorphism must act on the codomain"));
        }
        if f1.dom().order() > opts.limit {
            return Err(Error::SizeLimit { what: "equivalence search", size: f1.dom().order() as u128, limit: opts.limit as u128 });
        }
        let mut l2s = Vec::new();
        let cap = ADMISSIBLE_TABLE_LIMIT / wp.ctx().order() as u64;
        let mut overflow = false;
        for_each_admissible_l2(wp, |t| {
            if l2s.len() as u64 >= cap {
                overflow = true;
                return false;
            }
            l2s.push(t.to_vec());
            true
        })?;
        if overflow {
            return Err(Error::SizeLimit { what: "admissible L2 count", size: cap as u128 + 1, limit: cap as u128 });
        }
        let cod = f1.cod();
        let alpha2s = cod.elements().filter(|&a| !opts.additive_alpha2 || is_additive_shift(wp, a)).collect();
        let mut pre = vec![Vec::new(); cod.size()];
        for x in f1.dom().elements() {
            pre[f1.eval(x).idx()].push(x.0);
        }
        Ok(EquivSearch { f1, f2, wp, opts, l2s, alpha2s, pre })
    }

    /// Number of admissible L2.
    pub fn l2_count(&self) -> usize {
        self.l2s.len()
    }

    pub fn l2_tables(&self) -> &[Vec<u32>] {
        &self.l2s
    }

    /// The α2 values tried.
    pub fn alpha2s(&self) -> &[Elt] {
        &self.alpha2s
    }

    /// Whether the ℘-spectrum histograms of F1 and F2 agree.
    pub fn spectra_match(&self) -> Result<bool> {
        let h1 = spectrum(self.f1, Mode::Wp(self.wp))?.histogram;
        let h2 = spectrum(self.f2, Mode::Wp(self.wp))?.histogram;
        Ok(h1 == h2)
    }

    /// The least witness whose L2 is the `i`-th admissible map.
    pub fn search_l2(&self, i: usize) -> Option<EquivWitness> {
        let (dom, cod) = (self.f1.dom(), self.f1.cod());
        let l2 = &self.l2s[i];
        let mut l2_inv = vec![0u32; l2.len()];
        for (y, &z) in l2.iter().enumerate() {
            l2_inv[z as usize] = y as u32;
        }
        let mut target = vec![0u32; dom.size()];
        for &alpha2 in &self.alpha2s {
            for x in dom.elements() {
                target[x.idx()] = l2_inv[cod.sub(self.f2.eval(x), alpha2).idx()];
            }
            for &a1 in &self.pre[target[0] as usize] {
                let alpha1 = Elt(a1);
                let mut pl = PartialLinear::new(dom);
                if let Some(l1) = self.grow_l1(dom, &mut pl, alpha1, &target) {
                    let w = EquivWitness {
                        l1: VFunc::from_table(dom.clone(), dom.clone(), l1).expect("table in range"),
                        alpha1,
                        l2: VFunc::from_table(cod.clone(), cod.clone(), l2.clone()).expect("table in range"),
                        alpha2,
                        checked: false,
                    };
                    let checked = w.verify(self.f1, self.f2, self.wp);
                    return Some(EquivWitness { checked, ..w });
                }
            }
        }
        None
    }

    fn grow_l1(&self, dom: &Arc<FieldCtx>, pl: &mut PartialLinear, alpha1: Elt, target: &[u32]) -> Option<Vec<u32>> {
        let Some(x) = dom.elements().find(|&x| !pl.is_defined(x)) else {
            return pl.table();
        };
        // F1(L1(x) + α1) = T(x) forces L1(x) + α1 into the preimage set of T(x)
        for &s in &self.pre[target[x.idx()] as usize] {
            let t = dom.sub(Elt(s), alpha1);
            if pl.in_image(t) {
                continue;
            }
            let start = pl.extend(dom, x, t);
            let ok = pl.defined()[start..].iter().all(|&z| {
                let lz = pl.image(Elt(z)).expect("defined");
                self.f1.eval(dom.add(lz, alpha1)).0 == target[z as usize]
            });
            if ok {
                if let Some(t) = self.grow_l1(dom, pl, alpha1, target) {
                    return Some(t);
                }
            }
            pl.undo();
        }
        None
    }

    /// The ℘-spectrum histogram is an invariant only when ℘ is linear or α2 is
    /// restricted to additive shifts; otherwise the prefilter is skipped.
    pub fn prefilter_sound(&self) -> bool {
        self.wp.is_linear() || self.opts.additive_alpha2
    }

    /// Runs the prefilter (if enabled and sound) and then the search over all L2 in order.
    pub fn decide(&self) -> Result<EquivVerdict> {
        if self.opts.prefilter && self.prefilter_sound() && !self.spectra_match()? {
            return Ok(EquivVerdict::SpectrumMismatch);
        }
        Ok((0..self.l2_count()).find_map(|i| self.search_l2(i)).map_or(EquivVerdict::Inequivalent, EquivVerdict::Equivalent))
    }
}

/// ℘(y + a) = ℘(y) + ℘(a) for all y.
pub fn is_additive_shift(wp: &Ortho, a: Elt) -> bool {
    let ctx = wp.ctx();
    let pa = wp.apply(a);
    ctx.elements().all(|y| wp.apply(ctx.add(y, a)) == ctx.add(wp.apply(y), pa))
}

/// The least ℘-affine equivalence witness taking F1 to F2, if any.
pub fn are_wp_affine_equivalent(f1: &VFunc, f2: &VFunc, wp: &Ortho) -> Result<Option<EquivWitness>> {
    are_wp_affine_equivalent_with(f1, f2, wp, EquivOptions::default())
}

pub fn are_wp_affine_equivalent_with(f1: &VFunc, f2: &VFunc, wp: &Ortho, opts: EquivOptions) -> Result<Option<EquivWitness>> {
    match EquivSearch::new(f1, f2, wp, opts)?.decide()? {
        EquivVerdict::Equivalent(w) => Ok(Some(w)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests;
