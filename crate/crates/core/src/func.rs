//! Functions F_{p^n} → F_{p^m} stored as dense value tables.
//!
//! The codomain is its own [`FieldCtx`]; when m < n it is tied to the domain
//! through an [`Embedding`]. Symbolic constructors keep their formula as
//! provenance so a table can always be re-derived and compared.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::gf::{Elt, Embedding, FieldCtx};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// x ↦ x^d, d ≥ 1.
    Monomial { d: u128 },
    /// x ↦ Σ c_i x^{e_i}, with 0^0 = 1.
    Poly { terms: Vec<(Elt, u128)> },
    /// x ↦ Σ_i c_i x^{p^i}.
    Linearized { coeffs: Vec<Elt> },
    Table,
}

impl Provenance {
    fn poly_terms(&self, ctx: &FieldCtx) -> Option<Vec<(Elt, u128)>> {
        match self {
            Provenance::Monomial { d } => Some(vec![(Elt::ONE, *d)]),
            Provenance::Poly { terms } => Some(terms.clone()),
            Provenance::Linearized { coeffs } => {
                Some(coeffs.iter().enumerate().map(|(i, &c)| (c, ctx.stride(i as u32) as u128)).collect())
            }
            Provenance::Table => None,
        }
    }

    /// Evaluates the symbolic form over `ctx`; `None` for plain tables.
    pub fn evaluate(&self, ctx: &FieldCtx) -> Option<Vec<u32>> {
        let terms = self.poly_terms(ctx)?;
        Some(ctx.elements().map(|x| eval_poly(ctx, &terms, x).0).collect())
    }
}

fn eval_poly(ctx: &FieldCtx, terms: &[(Elt, u128)], x: Elt) -> Elt {
    terms.iter().fold(Elt::ZERO, |acc, &(c, e)| ctx.add(acc, ctx.mul(c, ctx.pow(x, e))))
}

fn normalize_terms(ctx: &FieldCtx, mut terms: Vec<(Elt, u128)>) -> Vec<(Elt, u128)> {
    terms.sort_by_key(|t| t.1);
    let mut out: Vec<(Elt, u128)> = Vec::with_capacity(terms.len());
    for (c, e) in terms {
        match out.last_mut() {
            Some(last) if last.1 == e => last.0 = ctx.add(last.0, c),
            _ => out.push((c, e)),
        }
    }
    out.retain(|t| !t.0.is_zero());
    out
}

#[derive(Clone, Debug)]
pub struct VFunc {
    dom: Arc<FieldCtx>,
    cod: Arc<FieldCtx>,
    table: Vec<u32>,
    prov: Provenance,
}

impl PartialEq for VFunc {
    fn eq(&self, other: &Self) -> bool {
        self.dom == other.dom && self.cod == other.cod && self.table == other.table
    }
}

impl Eq for VFunc {}

impl VFunc {
    pub fn from_table(dom: Arc<FieldCtx>, cod: Arc<FieldCtx>, table: Vec<u32>) -> Result<VFunc> {
        if dom.p() != cod.p() || !dom.n().is_multiple_of(cod.n()) {
            return Err(Error::DomainMismatch("codomain must be a subfield of the domain"));
        }
        if table.len() != dom.size() {
            return Err(Error::DomainMismatch("table length differs from the domain order"));
        }
        if table.iter().any(|&v| v >= cod.order()) {
            return Err(Error::DomainMismatch("table entry outside the codomain"));
        }
        Ok(VFunc { dom, cod, table, prov: Provenance::Table })
    }

    pub fn from_fn(dom: &Arc<FieldCtx>, cod: &Arc<FieldCtx>, mut f: impl FnMut(Elt) -> Elt) -> VFunc {
        let table = dom.elements().map(|x| f(x).0).collect();
        VFunc { dom: dom.clone(), cod: cod.clone(), table, prov: Provenance::Table }
    }

    pub fn endo_fn(ctx: &Arc<FieldCtx>, f: impl FnMut(Elt) -> Elt) -> VFunc {
        Self::from_fn(ctx, ctx, f)
    }

    fn symbolic(ctx: &Arc<FieldCtx>, prov: Provenance) -> VFunc {
        let table = prov.evaluate(ctx).expect("symbolic provenance");
        VFunc { dom: ctx.clone(), cod: ctx.clone(), table, prov }
    }

    pub fn from_monomial(ctx: &Arc<FieldCtx>, d: i128) -> Result<VFunc> {
        if d <= 0 {
            return Err(Error::BadExponent(d));
        }
        Ok(Self::symbolic(ctx, Provenance::Monomial { d: d as u128 }))
    }

    pub fn from_poly(ctx: &Arc<FieldCtx>, terms: &[(Elt, u128)]) -> VFunc {
        Self::symbolic(ctx, Provenance::Poly { terms: normalize_terms(ctx, terms.to_vec()) })
    }

    /// Σ_i coeffs[i] x^{p^i}; indices wrap modulo n.
    pub fn from_linearized(ctx: &Arc<FieldCtx>, coeffs: &[Elt]) -> VFunc {
        let n = ctx.n() as usize;
        let mut c = vec![Elt::ZERO; n];
        for (i, &a) in coeffs.iter().enumerate() {
            c[i % n] = ctx.add(c[i % n], a);
        }
        Self::symbolic(ctx, Provenance::Linearized { coeffs: c })
    }

    pub fn identity(ctx: &Arc<FieldCtx>) -> VFunc {
        Self::from_linearized(ctx, &[Elt::ONE])
    }

    pub fn constant(dom: &Arc<FieldCtx>, cod: &Arc<FieldCtx>, a: Elt) -> VFunc {
        let mut f = Self::from_fn(dom, cod, |_| a);
        if dom == cod {
            f.prov = Provenance::Poly { terms: normalize_terms(dom, vec![(a, 0)]) };
        }
        f
    }

    /// The relative trace F_{p^n} → F_{p^m}, with values in the small field.
    pub fn rel_trace_map(emb: &Embedding) -> VFunc {
        let big = emb.big();
        let m = emb.small().n();
        Self::from_fn(big, emb.small(), |x| emb.down(big.rel_trace(m, x).expect("m | n")).expect("trace lies in subfield"))
    }

    /// Re-reads an endomap whose values all lie in the embedded subfield as a
    /// map into the small field.
    pub fn project(&self, emb: &Embedding) -> Result<VFunc> {
        if self.cod != *emb.big() {
            return Err(Error::DomainMismatch("embedding target differs from codomain"));
        }
        let table = self
            .table
            .iter()
            .map(|&v| emb.down(Elt(v)).map(|e| e.0))
            .collect::<Option<Vec<u32>>>()
            .ok_or(Error::DomainMismatch("value outside the subfield"))?;
        Ok(VFunc { dom: self.dom.clone(), cod: emb.small().clone(), table, prov: Provenance::Table })
    }

    /// Reads a map into the small field as an endomap of the big field.
    pub fn lift(&self, emb: &Embedding) -> Result<VFunc> {
        if self.cod != *emb.small() || self.dom != *emb.big() {
            return Err(Error::DomainMismatch("embedding does not match the map"));
        }
        let table = self.table.iter().map(|&v| emb.up(Elt(v)).0).collect();
        Ok(VFunc { dom: self.dom.clone(), cod: self.dom.clone(), table, prov: Provenance::Table })
    }

    #[inline]
    pub fn dom(&self) -> &Arc<FieldCtx> {
        &self.dom
    }

    #[inline]
    pub fn cod(&self) -> &Arc<FieldCtx> {
        &self.cod
    }

    #[inline]
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn provenance(&self) -> &Provenance {
        &self.prov
    }

    #[inline]
    pub fn eval(&self, x: Elt) -> Elt {
        Elt(self.table[x.idx()])
    }

    pub fn is_endo(&self) -> bool {
        self.dom == self.cod
    }

    /// True when the stored provenance (if any) reproduces the table.
    pub fn symbolic_matches(&self) -> bool {
        match self.prov.evaluate(&self.dom) {
            Some(t) => t == self.table,
            None => true,
        }
    }

    pub fn preimage_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.cod.size()];
        for &v in &self.table {
            counts[v as usize] += 1;
        }
        counts
    }

    pub fn is_permutation(&self) -> Result<bool> {
        if !self.is_endo() {
            return Err(Error::DomainMismatch("permutation test needs an endomap"));
        }
        Ok(is_bijective(&self.table))
    }

    pub fn is_balanced(&self) -> bool {
        let want = self.dom.order() / self.cod.order();
        self.preimage_counts().iter().all(|&c| c == want)
    }

    /// Inverse permutation.
    pub fn inverse(&self) -> Result<VFunc> {
        if !self.is_permutation()? {
            return Err(Error::NotPermutation);
        }
        let mut inv = vec![0u32; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Ok(VFunc { dom: self.dom.clone(), cod: self.cod.clone(), table: inv, prov: Provenance::Table })
    }

    /// outer ∘ inner.
    pub fn compose(outer: &VFunc, inner: &VFunc) -> Result<VFunc> {
        if inner.cod != outer.dom {
            return Err(Error::DomainMismatch("inner codomain differs from outer domain"));
        }
        let table = inner.table.iter().map(|&v| outer.table[v as usize]).collect();
        let prov = match (&outer.prov, &inner.prov) {
            (Provenance::Monomial { d: a }, Provenance::Monomial { d: b }) => match a.checked_mul(*b) {
                Some(d) => Provenance::Monomial { d },
                None => Provenance::Table,
            },
            (Provenance::Linearized { coeffs: a }, Provenance::Linearized { coeffs: b }) if inner.is_endo() => {
                let ctx = &inner.dom;
                let n = ctx.n() as usize;
                let mut c = vec![Elt::ZERO; n];
                for (i, &ai) in a.iter().enumerate() {
                    for (j, &bj) in b.iter().enumerate() {
                        let t = ctx.mul(ai, ctx.frobenius(bj, i as u32));
                        c[(i + j) % n] = ctx.add(c[(i + j) % n], t);
                    }
                }
                Provenance::Linearized { coeffs: c }
            }
            _ => Provenance::Table,
        };
        Ok(VFunc { dom: inner.dom.clone(), cod: outer.cod.clone(), table, prov })
    }

    fn check_same_shape(f: &VFunc, g: &VFunc) -> Result<()> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(Error::DomainMismatch("operands have different fields"));
        }
        Ok(())
    }

    fn combine_symbolic(f: &VFunc, g: &VFunc, negate_g: bool) -> Provenance {
        if !f.is_endo() {
            return Provenance::Table;
        }
        let ctx = &f.dom;
        let sign = if negate_g { ctx.neg(Elt::ONE) } else { Elt::ONE };
        if let (Provenance::Linearized { coeffs: a }, Provenance::Linearized { coeffs: b }) = (&f.prov, &g.prov) {
            let coeffs = a.iter().zip(b).map(|(&x, &y)| ctx.add(x, ctx.mul(sign, y))).collect();
            return Provenance::Linearized { coeffs };
        }
        match (f.prov.poly_terms(ctx), g.prov.poly_terms(ctx)) {
            (Some(mut a), Some(b)) => {
                a.extend(b.into_iter().map(|(c, e)| (ctx.mul(sign, c), e)));
                Provenance::Poly { terms: normalize_terms(ctx, a) }
            }
            _ => Provenance::Table,
        }
    }

    pub fn add_funcs(f: &VFunc, g: &VFunc) -> Result<VFunc> {
        Self::check_same_shape(f, g)?;
        let c = &f.cod;
        let table = f.table.iter().zip(&g.table).map(|(&a, &b)| c.add(Elt(a), Elt(b)).0).collect();
        Ok(VFunc { dom: f.dom.clone(), cod: f.cod.clone(), table, prov: Self::combine_symbolic(f, g, false) })
    }

    pub fn sub_funcs(f: &VFunc, g: &VFunc) -> Result<VFunc> {
        Self::check_same_shape(f, g)?;
        let c = &f.cod;
        let table = f.table.iter().zip(&g.table).map(|(&a, &b)| c.sub(Elt(a), Elt(b)).0).collect();
        Ok(VFunc { dom: f.dom.clone(), cod: f.cod.clone(), table, prov: Self::combine_symbolic(f, g, true) })
    }

    /// x ↦ c·f(x), c in the codomain.
    pub fn scale(c: Elt, f: &VFunc) -> VFunc {
        let k = &f.cod;
        let table = f.table.iter().map(|&a| k.mul(c, Elt(a)).0).collect();
        let prov = if !f.is_endo() {
            Provenance::Table
        } else if let Provenance::Linearized { coeffs } = &f.prov {
            Provenance::Linearized { coeffs: coeffs.iter().map(|&a| k.mul(c, a)).collect() }
        } else {
            match f.prov.poly_terms(k) {
                Some(t) => Provenance::Poly { terms: normalize_terms(k, t.into_iter().map(|(a, e)| (k.mul(c, a), e)).collect()) },
                None => Provenance::Table,
            }
        };
        VFunc { dom: f.dom.clone(), cod: f.cod.clone(), table, prov }
    }

    pub fn neg(f: &VFunc) -> VFunc {
        Self::scale(f.cod.neg(Elt::ONE), f)
    }

    pub fn add_const(f: &VFunc, a: Elt) -> VFunc {
        let k = &f.cod;
        let table = f.table.iter().map(|&v| k.add(Elt(v), a).0).collect();
        let prov = match (f.is_endo(), f.prov.poly_terms(k)) {
            (true, Some(mut t)) => {
                t.push((a, 0));
                Provenance::Poly { terms: normalize_terms(k, t) }
            }
            _ => Provenance::Table,
        };
        VFunc { dom: f.dom.clone(), cod: f.cod.clone(), table, prov }
    }

    /// f(x + y) = f(x) + f(y) for all x, y and f(0) = 0. Checking y over a
    /// basis of F_{p^n}/F_p is equivalent, since every y is a sum of basis
    /// vectors.
    pub fn is_linearized(&self) -> bool {
        if self.table[0] != 0 {
            return false;
        }
        let (d, c) = (&self.dom, &self.cod);
        (0..d.n()).all(|i| {
            let e = Elt(d.stride(i));
            let fe = self.eval(e);
            d.elements().all(|x| self.eval(d.add(x, e)) == c.add(self.eval(x), fe))
        })
    }

    pub fn is_affine(&self) -> bool {
        Self::add_const(self, self.cod.neg(self.eval(Elt::ZERO))).is_linearized()
    }

    /// Algebraic degree ≤ 2: every second-order derivative
    /// x ↦ f(x+a+b) − f(x+a) − f(x+b) + f(x) is constant. It suffices to take
    /// a, b from a basis: constant second differences along basis directions
    /// force all third differences to vanish, which bounds the degree.
    pub fn is_quadratic(&self) -> bool {
        let (d, c) = (&self.dom, &self.cod);
        let n = d.n();
        for i in 0..n {
            for j in i..n {
                let (a, b) = (Elt(d.stride(i)), Elt(d.stride(j)));
                let second = |x: Elt| {
                    let s = c.sub(self.eval(d.add(d.add(x, a), b)), self.eval(d.add(x, a)));
                    c.add(c.sub(s, self.eval(d.add(x, b))), self.eval(x))
                };
                let base = second(Elt::ZERO);
                if d.elements().any(|x| second(x) != base) {
                    return false;
                }
            }
        }
        true
    }
}

pub(crate) fn is_bijective(table: &[u32]) -> bool {
    let mut seen = vec![false; table.len()];
    for &v in table {
        let v = v as usize;
        if v >= seen.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}
