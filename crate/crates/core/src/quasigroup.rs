//! The quasigroup (F_{p^n} × F_{p^m}, +_℘) with
//! (x1, y1) +_℘ (x2, y2) = (x1 + x2, y1 + ℘(y2)), and difference sets in it.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::func::{is_bijective, VFunc};
use crate::gf::{Elt, FieldCtx};
use crate::ortho::Ortho;
use crate::{Error, Result};

/// Largest quasigroup for the translation (Latin square) check.
pub const LATIN_LIMIT: u64 = 1 << 16;
/// Largest quasigroup for difference counting.
pub const COUNT_LIMIT: u64 = 1 << 24;
/// Below this order the Latin check runs over the full operation table.
const FULL_TABLE_LIMIT: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QElem {
    pub x: Elt,
    pub y: Elt,
}

impl QElem {
    pub fn new(x: Elt, y: Elt) -> QElem {
        QElem { x, y }
    }
}

#[derive(Clone, Debug)]
pub struct QGroup {
    dom: Arc<FieldCtx>,
    cod: Arc<FieldCtx>,
    wp: Vec<u32>,
}

impl QGroup {
    pub fn new(dom: &Arc<FieldCtx>, wp: &Ortho) -> Result<QGroup> {
        if dom.p() != wp.ctx().p() || !dom.n().is_multiple_of(wp.ctx().n()) {
            return Err(Error::DomainMismatch("orthomorphism field is not a subfield of the domain"));
        }
        Ok(QGroup { dom: dom.clone(), cod: wp.ctx().clone(), wp: wp.table().to_vec() })
    }

    /// Uses an arbitrary map of F_{p^m} in place of ℘, without verification.
    pub fn from_map(dom: &Arc<FieldCtx>, map: &VFunc) -> Result<QGroup> {
        if !map.is_endo() || dom.p() != map.dom().p() || !dom.n().is_multiple_of(map.dom().n()) {
            return Err(Error::DomainMismatch("map must be an endomap of a subfield"));
        }
        Ok(QGroup { dom: dom.clone(), cod: map.dom().clone(), wp: map.table().to_vec() })
    }

    pub fn dom(&self) -> &Arc<FieldCtx> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FieldCtx> {
        &self.cod
    }

    /// p^{n+m}.
    pub fn order(&self) -> u64 {
        self.dom.order() as u64 * self.cod.order() as u64
    }

    #[inline]
    pub fn encode(&self, e: QElem) -> u32 {
        e.x.0 * self.cod.order() + e.y.0
    }

    #[inline]
    pub fn decode(&self, code: u32) -> QElem {
        QElem { x: Elt(code / self.cod.order()), y: Elt(code % self.cod.order()) }
    }

    #[inline]
    pub fn wp(&self, y: Elt) -> Elt {
        Elt(self.wp[y.idx()])
    }

    pub fn elements(&self) -> impl Iterator<Item = QElem> + '_ {
        (0..self.order() as u32).map(|c| self.decode(c))
    }

    /// e1 +_℘ e2.
    #[inline]
    pub fn op(&self, e1: QElem, e2: QElem) -> QElem {
        QElem { x: self.dom.add(e1.x, e2.x), y: self.cod.add(e1.y, self.wp(e2.y)) }
    }

    /// (x1 − x2, y1 − ℘(y2)), so that op(difference(e1, e2), e2) = e1.
    #[inline]
    pub fn difference(&self, e1: QElem, e2: QElem) -> QElem {
        QElem { x: self.dom.sub(e1.x, e2.x), y: self.cod.sub(e1.y, self.wp(e2.y)) }
    }
}

/// Both translations e ↦ a +_℘ e and e ↦ e +_℘ a are bijections for every a.
///
/// Small quasigroups are checked on the full operation table. Larger ones use
/// the fact that the operation acts coordinatewise, so its table is the
/// product of the two coordinate tables and is Latin exactly when both are.
pub fn verify_quasigroup(q: &QGroup) -> Result<bool> {
    let v = q.order();
    if v > LATIN_LIMIT {
        return Err(Error::SizeLimit { what: "quasigroup Latin check", size: v as u128, limit: LATIN_LIMIT as u128 });
    }
    if v <= FULL_TABLE_LIMIT {
        let mut row = vec![0u32; v as usize];
        let mut col = vec![0u32; v as usize];
        for a in q.elements() {
            for (i, e) in q.elements().enumerate() {
                row[i] = q.encode(q.op(a, e));
                col[i] = q.encode(q.op(e, a));
            }
            if !is_bijective(&row) || !is_bijective(&col) {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let (d, c) = (&q.dom, &q.cod);
    let mut buf = vec![0u32; d.size()];
    for a in d.elements() {
        for x in d.elements() {
            buf[x.idx()] = d.add(a, x).0;
        }
        if !is_bijective(&buf) {
            return Ok(false);
        }
    }
    let mut left = vec![0u32; c.size()];
    let mut right = vec![0u32; c.size()];
    for a in c.elements() {
        for y in c.elements() {
            left[y.idx()] = c.add(a, q.wp(y)).0;
            right[y.idx()] = c.add(y, q.wp(a)).0;
        }
        if !is_bijective(&left) || !is_bijective(&right) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// {(x, F(x))}.
pub fn graph_of(f: &VFunc) -> Vec<QElem> {
    f.dom().elements().map(|x| QElem { x, y: f.eval(x) }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QdsReport {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    /// count ↦ number of quasigroup elements with that many representations
    pub histogram: BTreeMap<u32, u64>,
    /// first element (in encoding order) whose count differs from λ
    pub first_bad: Option<(QElem, u32)>,
    pub pass: bool,
}

/// Difference counts over the ordered pairs (d1, d2) with d1 in a slice of D.
pub fn difference_counts(q: &QGroup, d: &[QElem], d1_range: core::ops::Range<usize>) -> Vec<u32> {
    let mut counts = vec![0u32; q.order() as usize];
    for &e1 in &d[d1_range] {
        for &e2 in d {
            counts[q.encode(q.difference(e1, e2)) as usize] += 1;
        }
    }
    counts
}

fn check_params(q: &QGroup, d: &[QElem], lambda: u64) -> Result<()> {
    let v = q.order();
    if v > COUNT_LIMIT {
        return Err(Error::SizeLimit { what: "difference counting", size: v as u128, limit: COUNT_LIMIT as u128 });
    }
    let k = d.len() as u64;
    if k * k != v * lambda {
        return Err(Error::ParamMismatch(alloc::format!("k^2 = {} but v*lambda = {}", k * k, v * lambda)));
    }
    Ok(())
}

/// Summarizes merged difference counts against λ.
pub fn qds_report(q: &QGroup, d: &[QElem], lambda: u64, counts: &[u32]) -> QdsReport {
    let mut histogram = BTreeMap::new();
    let mut first_bad = None;
    for (code, &c) in counts.iter().enumerate() {
        *histogram.entry(c).or_insert(0) += 1;
        if c as u64 != lambda && first_bad.is_none() {
            first_bad = Some((q.decode(code as u32), c));
        }
    }
    QdsReport { v: q.order(), k: d.len() as u64, lambda, histogram, pass: first_bad.is_none(), first_bad }
}

/// Every element of Q arises as a difference of an ordered pair in D×D
/// (equal pairs included) exactly λ times.
pub fn is_quasigroup_difference_set(q: &QGroup, d: &[QElem], lambda: u64) -> Result<QdsReport> {
    check_params(q, d, lambda)?;
    let counts = difference_counts(q, d, 0..d.len());
    Ok(qds_report(q, d, lambda, &counts))
}

/// Parameter check only, for callers that count in parallel.
pub fn check_qds_params(q: &QGroup, d: &[QElem], lambda: u64) -> Result<()> {
    check_params(q, d, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffspec::is_pwpn;
    use crate::linalg::Matrix;
    use crate::ortho::{make_c_mult, make_matrix_ortho, make_thmex_ortho};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32, n: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(p, n, None).unwrap())
    }

    fn neg_ortho(f: &Arc<FieldCtx>) -> Ortho {
        make_c_mult(f, f.neg(Elt::ONE)).unwrap()
    }

    #[test]
    fn operation_examples() {
        let f3 = field(3, 1);
        let q = QGroup::new(&f3, &make_c_mult(&f3, Elt(2)).unwrap()).unwrap();
        let one = QElem::new(Elt(1), Elt(1));
        assert_eq!(q.op(one, one), QElem::new(Elt(2), Elt(0)));
        for e in q.elements() {
            assert_eq!(q.op(e, QElem::new(Elt(0), Elt(0))), e);
        }
        assert_eq!(q.difference(one, QElem::new(Elt(0), Elt(2))), QElem::new(Elt(1), Elt(0)));
        for e in q.elements() {
            assert_eq!(q.difference(e, e), QElem::new(Elt(0), f3.sub(e.y, q.wp(e.y))));
        }
    }

    #[test]
    fn thmex_quasigroup_is_not_associative() {
        let f64 = field(2, 6);
        let b = f64.subfield_elements(3).unwrap()[2];
        let q = QGroup::new(&f64, &make_thmex_ortho(&f64, b).unwrap()).unwrap();
        let mut found = None;
        'scan: for c1 in 0..q.order() as u32 {
            for c2 in (0..q.order() as u32).step_by(61) {
                for c3 in (0..q.order() as u32).step_by(97) {
                    let (a, b, c) = (q.decode(c1), q.decode(c2), q.decode(c3));
                    if q.op(q.op(a, b), c) != q.op(a, q.op(b, c)) {
                        found = Some((a, b, c));
                        break 'scan;
                    }
                }
            }
        }
        assert!(found.is_some());
    }

    #[test]
    fn round_trip_on_f9() {
        let f9 = field(3, 2);
        let q = QGroup::new(&f9, &neg_ortho(&f9)).unwrap();
        for e1 in q.elements() {
            for e2 in q.elements() {
                assert_eq!(q.op(q.difference(e1, e2), e2), e1);
                assert_eq!(q.difference(q.op(e1, e2), e2), e1);
            }
        }
    }

    #[test]
    fn latin_examples() {
        for (p, n, m) in [(2, 3, 3), (3, 2, 1), (3, 3, 3), (2, 6, 3), (5, 2, 2), (2, 8, 8)] {
            let dom = field(p, n);
            let cod = field(p, m);
            for c in cod.elements().skip(2).take(3) {
                let q = QGroup::new(&dom, &make_c_mult(&cod, c).unwrap()).unwrap();
                assert!(verify_quasigroup(&q).unwrap());
            }
        }
        let f64 = field(2, 6);
        for b in f64.subfield_elements(3).unwrap().into_iter().filter(|b| b.0 > 1) {
            let q = QGroup::new(&f64, &make_thmex_ortho(&f64, b).unwrap()).unwrap();
            assert!(verify_quasigroup(&q).unwrap());
        }
        let big = field(2, 9);
        let q = QGroup::new(&big, &make_c_mult(&big, Elt(2)).unwrap()).unwrap();
        assert!(matches!(verify_quasigroup(&q), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn corrupted_map_is_rejected() {
        for (p, n) in [(3, 2), (2, 8)] {
            let f = field(p, n);
            let o = make_c_mult(&f, Elt(2)).unwrap();
            let mut t = o.table().to_vec();
            // send two inputs to the same value
            t[1] = t[2];
            let bad = VFunc::from_table(f.clone(), f.clone(), t).unwrap();
            let q = QGroup::from_map(&f, &bad).unwrap();
            assert!(!verify_quasigroup(&q).unwrap());
        }
    }

    #[test]
    fn difference_set_examples() {
        let f3 = field(3, 1);
        let q = QGroup::new(&f3, &make_c_mult(&f3, Elt(2)).unwrap()).unwrap();
        let rep = is_quasigroup_difference_set(&q, &graph_of(&VFunc::identity(&f3)), 1).unwrap();
        assert!(rep.pass && (rep.v, rep.k, rep.lambda) == (9, 3, 1));
        let f27 = field(3, 3);
        let q = QGroup::new(&f27, &neg_ortho(&f27)).unwrap();
        let d = graph_of(&VFunc::from_monomial(&f27, 5).unwrap());
        let rep = is_quasigroup_difference_set(&q, &d, 1).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.histogram, BTreeMap::from([(1, 729)]));
        let f9 = field(3, 2);
        let q = QGroup::new(&f9, &neg_ortho(&f9)).unwrap();
        let rep = is_quasigroup_difference_set(&q, &graph_of(&VFunc::from_monomial(&f9, 2).unwrap()), 1).unwrap();
        assert!(!rep.pass);
        let (bad, count) = rep.first_bad.unwrap();
        assert_ne!(count, 1);
        let direct = graph_of(&VFunc::from_monomial(&f9, 2).unwrap());
        let hits = direct.iter().flat_map(|&a| direct.iter().map(move |&b| (a, b))).filter(|&(a, b)| q.difference(a, b) == bad).count();
        assert_eq!(hits as u32, count);
        assert!(matches!(is_quasigroup_difference_set(&q, &direct, 2), Err(Error::ParamMismatch(_))));
    }

    #[test]
    fn graph_examples() {
        let f3 = field(3, 1);
        let zero = VFunc::constant(&f3, &f3, Elt::ZERO);
        assert!(graph_of(&zero).iter().all(|e| e.y.is_zero()));
        let g = graph_of(&VFunc::identity(&f3));
        assert_eq!(g, vec![QElem::new(Elt(0), Elt(0)), QElem::new(Elt(1), Elt(1)), QElem::new(Elt(2), Elt(2))]);
    }

    fn random_ortho(f: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> Ortho {
        let dim = f.n() as usize;
        loop {
            let entries = (0..dim * dim).map(|_| rng.gen_range(0..f.p())).collect();
            let a = Matrix::from_rows(f.p(), dim, entries).unwrap();
            if let Ok(o) = make_matrix_ortho(f, &a) {
                return o;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn graph_is_qds_iff_pwpn(seed in any::<u64>(), which in 0usize..4) {
            let (p, n, m) = [(3, 2, 2), (2, 3, 3), (3, 2, 1), (5, 1, 1)][which];
            let dom = field(p, n);
            let cod = field(p, m);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let wp = random_ortho(&cod, &mut rng);
            let f = VFunc::from_fn(&dom, &cod, |_| Elt(rng.gen_range(0..cod.order())));
            let q = QGroup::new(&dom, &wp).unwrap();
            prop_assert!(verify_quasigroup(&q).unwrap());
            let lambda = (dom.order() / cod.order()) as u64;
            let d = graph_of(&f);
            let rep = is_quasigroup_difference_set(&q, &d, lambda).unwrap();
            prop_assert_eq!(rep.pass, is_pwpn(&f, &wp).unwrap());
            let total: u64 = rep.histogram.iter().map(|(&c, &k)| c as u64 * k).sum();
            prop_assert_eq!(total, (d.len() * d.len()) as u64);
        }

        #[test]
        fn op_and_difference_round_trip(seed in any::<u64>()) {
            let f27 = field(3, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let wp = random_ortho(&f27, &mut rng);
            let q = QGroup::new(&f27, &wp).unwrap();
            for _ in 0..200 {
                let a = q.decode(rng.gen_range(0..729));
                let b = q.decode(rng.gen_range(0..729));
                prop_assert_eq!(q.op(q.difference(a, b), b), a);
                prop_assert_eq!(q.difference(q.op(a, b), b), a);
            }
        }
    }
}
