//! Classical, c- and ℘-differential spectra.
//!
//! For a mode M the derivative in direction a is x ↦ F(x + a) − M(F(x)),
//! where M is the identity (classical), multiplication by c, or an
//! orthomorphism ℘. The spectrum is the multiset of counts
//! δ(a, b) = #{x : derivative(x) = b}. Direction a = 0 is skipped only in the
//! classical mode (c = 1).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::func::VFunc;
use crate::gf::Elt;
use crate::ortho::Ortho;
use crate::{Error, Result};

/// Largest domain for a full spectrum.
pub const FULL_SPECTRUM_LIMIT: u32 = 1 << 16;
/// Largest domain for the early-exit perfect-nonlinearity scan.
pub const SCAN_LIMIT: u32 = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub enum Mode<'a> {
    Classical,
    C(Elt),
    Wp(&'a Ortho),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Classical,
    C { c: Elt },
    Wp { family: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// every count equals p^{n−m}
    Perfect,
    /// endomap with maximum count 2
    AlmostPerfect,
    Uniform(u32),
}

impl Classification {
    pub fn label(&self, kind: &Kind) -> String {
        match (self, kind) {
            (Classification::Perfect, Kind::Classical) => "PN".into(),
            (Classification::Perfect, Kind::C { .. }) => "PcN".into(),
            (Classification::Perfect, Kind::Wp { .. }) => "PwpN".into(),
            (Classification::AlmostPerfect, Kind::Classical) => "APN".into(),
            (Classification::AlmostPerfect, _) => "APcN".into(),
            (Classification::Uniform(d), _) => alloc::format!("{d}-uniform"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumReport {
    pub kind: Kind,
    pub dom_order: u32,
    pub cod_order: u32,
    /// δ_F
    pub max_count: u32,
    /// first (a, b) attaining the maximum
    pub argmax: (Elt, Elt),
    /// (a, max_b δ(a, b)) for every included a
    pub per_a_max: Vec<(Elt, u32)>,
    /// count value ↦ number of (a, b) pairs with that count
    pub histogram: BTreeMap<u32, u64>,
    pub classification: Classification,
    pub includes_zero_a: bool,
    /// p^{n−m}
    pub balanced_count: u32,
}

impl SpectrumReport {
    pub fn label(&self) -> String {
        self.classification.label(&self.kind)
    }

    pub fn is_perfect(&self) -> bool {
        self.classification == Classification::Perfect
    }
}

/// Precomputed state for counting: F's table and x ↦ −M(F(x)).
pub struct Kernel<'a> {
    f: &'a VFunc,
    neg_w: Vec<u32>,
    kind: Kind,
    skip_zero: bool,
}

impl<'a> Kernel<'a> {
    pub fn new(f: &'a VFunc, mode: Mode<'_>) -> Result<Kernel<'a>> {
        let cod = f.cod();
        let (w, kind, skip_zero): (Vec<u32>, Kind, bool) = match mode {
            Mode::Classical => (f.table().to_vec(), Kind::Classical, true),
            Mode::C(c) => {
                if !cod.contains(c) {
                    return Err(Error::BadC);
                }
                let w = f.table().iter().map(|&v| cod.mul(c, Elt(v)).0).collect();
                if c == Elt::ONE {
                    (w, Kind::Classical, true)
                } else {
                    (w, Kind::C { c }, false)
                }
            }
            Mode::Wp(o) => {
                if **o.ctx() != **cod {
                    return Err(Error::DomainMismatch("orthomorphism acts on a different field"));
                }
                let w = f.table().iter().map(|&v| o.apply(Elt(v)).0).collect();
                (w, Kind::Wp { family: o.family().tag().into() }, false)
            }
        };
        let neg_w = w.into_iter().map(|v| cod.neg(Elt(v)).0).collect();
        Ok(Kernel { f, neg_w, kind, skip_zero })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Directions covered by the spectrum, in increasing order.
    pub fn a_range(&self) -> Range<u32> {
        (if self.skip_zero { 1 } else { 0 })..self.f.dom().order()
    }

    /// Counts δ(a, ·) into `counts` (length p^m).
    pub fn counts_for(&self, a: Elt, counts: &mut [u32]) {
        let (dom, cod) = (self.f.dom(), self.f.cod());
        let t = self.f.table();
        counts.iter_mut().for_each(|c| *c = 0);
        if dom.p() == 2 {
            for x in 0..t.len() {
                let b = t[x ^ a.idx()] ^ self.neg_w[x];
                counts[b as usize] += 1;
            }
        } else {
            for x in dom.elements() {
                let b = cod.add(Elt(t[dom.add(x, a).idx()]), Elt(self.neg_w[x.idx()]));
                counts[b.idx()] += 1;
            }
        }
    }

    /// The derivative table for direction a.
    pub fn derivative(&self, a: Elt) -> VFunc {
        let (dom, cod) = (self.f.dom(), self.f.cod());
        VFunc::from_fn(dom, cod, |x| cod.add(self.f.eval(dom.add(x, a)), Elt(self.neg_w[x.idx()])))
    }

    pub fn balanced_count(&self) -> u32 {
        self.f.dom().order() / self.f.cod().order()
    }
}

/// Spectrum data over a contiguous block of directions; parts over disjoint
/// blocks merge into a full report independently of evaluation order.
#[derive(Clone, Debug, Default)]
pub struct SpectrumPart {
    per_a_max: Vec<(Elt, u32, Elt)>,
    histogram: BTreeMap<u32, u64>,
}

impl SpectrumPart {
    pub fn compute(kernel: &Kernel<'_>, a_range: Range<u32>) -> SpectrumPart {
        let mut counts = vec![0u32; kernel.f.cod().size()];
        let mut part = SpectrumPart::default();
        let mut hist = vec![0u64; kernel.f.dom().size() + 1];
        for a in a_range {
            kernel.counts_for(Elt(a), &mut counts);
            let mut best = (0u32, Elt::ZERO);
            for (b, &c) in counts.iter().enumerate() {
                hist[c as usize] += 1;
                if c > best.0 {
                    best = (c, Elt(b as u32));
                }
            }
            part.per_a_max.push((Elt(a), best.0, best.1));
        }
        for (c, &v) in hist.iter().enumerate() {
            if v > 0 {
                part.histogram.insert(c as u32, v);
            }
        }
        part
    }

    pub fn merge(kernel: &Kernel<'_>, mut parts: Vec<SpectrumPart>) -> SpectrumReport {
        parts.sort_by_key(|p| p.per_a_max.first().map(|r| r.0));
        let mut histogram = BTreeMap::new();
        let mut rows = Vec::new();
        for p in parts {
            for (k, v) in p.histogram {
                *histogram.entry(k).or_insert(0) += v;
            }
            rows.extend(p.per_a_max);
        }
        let mut max_count = 0;
        let mut argmax = (Elt::ZERO, Elt::ZERO);
        for &(a, m, b) in &rows {
            if m > max_count {
                max_count = m;
                argmax = (a, b);
            }
        }
        let lambda = kernel.balanced_count();
        let endo = kernel.f.is_endo();
        let classification = if max_count == lambda {
            Classification::Perfect
        } else if endo && max_count == 2 {
            Classification::AlmostPerfect
        } else {
            Classification::Uniform(max_count)
        };
        SpectrumReport {
            kind: kernel.kind.clone(),
            dom_order: kernel.f.dom().order(),
            cod_order: kernel.f.cod().order(),
            max_count,
            argmax,
            per_a_max: rows.into_iter().map(|(a, m, _)| (a, m)).collect(),
            histogram,
            classification,
            includes_zero_a: !kernel.skip_zero,
            balanced_count: lambda,
        }
    }
}

pub fn spectrum(f: &VFunc, mode: Mode<'_>) -> Result<SpectrumReport> {
    if f.dom().order() > FULL_SPECTRUM_LIMIT {
        return Err(Error::SizeLimit {
            what: "full spectrum",
            size: f.dom().order() as u128,
            limit: FULL_SPECTRUM_LIMIT as u128,
        });
    }
    let kernel = Kernel::new(f, mode)?;
    let part = SpectrumPart::compute(&kernel, kernel.a_range());
    Ok(SpectrumPart::merge(&kernel, vec![part]))
}

/// Maximum of δ(a, b); shorthand for `spectrum(..).max_count`.
pub fn uniformity(f: &VFunc, mode: Mode<'_>) -> Result<u32> {
    Ok(spectrum(f, mode)?.max_count)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanVerdict {
    pub perfect: bool,
    /// first direction with an unbalanced derivative, with a most frequent value
    pub witness: Option<(Elt, Elt, u32)>,
    pub directions_scanned: u32,
}

/// Early-exit scan: stops at the first direction whose derivative is not
/// balanced.
pub fn perfect_scan(f: &VFunc, mode: Mode<'_>) -> Result<ScanVerdict> {
    if f.dom().order() > SCAN_LIMIT {
        return Err(Error::SizeLimit { what: "perfect scan", size: f.dom().order() as u128, limit: SCAN_LIMIT as u128 });
    }
    let kernel = Kernel::new(f, mode)?;
    let lambda = kernel.balanced_count();
    let mut counts = vec![0u32; f.cod().size()];
    let mut scanned = 0;
    for a in kernel.a_range() {
        kernel.counts_for(Elt(a), &mut counts);
        scanned += 1;
        if let Some((b, &c)) = counts.iter().enumerate().find(|(_, &c)| c != lambda) {
            let (b, c) = if c > lambda {
                (b, c)
            } else {
                let (b, &c) = counts.iter().enumerate().max_by_key(|&(i, &c)| (c, core::cmp::Reverse(i))).unwrap();
                (b, c)
            };
            return Ok(ScanVerdict { perfect: false, witness: Some((Elt(a), Elt(b as u32), c)), directions_scanned: scanned });
        }
    }
    Ok(ScanVerdict { perfect: true, witness: None, directions_scanned: scanned })
}

/// Every ℘-derivative, a = 0 included, is balanced.
pub fn is_pwpn(f: &VFunc, wp: &Ortho) -> Result<bool> {
    Ok(perfect_scan(f, Mode::Wp(wp))?.perfect)
}

pub fn classical_derivative(f: &VFunc, a: Elt) -> VFunc {
    let (d, c) = (f.dom(), f.cod());
    VFunc::from_fn(d, c, |x| c.sub(f.eval(d.add(x, a)), f.eval(x)))
}

pub fn c_derivative(f: &VFunc, a: Elt, c: Elt) -> VFunc {
    let (d, k) = (f.dom(), f.cod());
    VFunc::from_fn(d, k, |x| k.sub(f.eval(d.add(x, a)), k.mul(c, f.eval(x))))
}

pub fn wp_derivative(f: &VFunc, a: Elt, wp: &Ortho) -> Result<VFunc> {
    if **wp.ctx() != **f.cod() {
        return Err(Error::DomainMismatch("orthomorphism acts on a different field"));
    }
    let (d, k) = (f.dom(), f.cod());
    Ok(VFunc::from_fn(d, k, |x| k.sub(f.eval(d.add(x, a)), wp.apply(f.eval(x)))))
}

/// For quadratic F and c ∈ F_p \ {1}: (F balanced) ⇔ (F is PcN).
pub fn quadratic_pcn_iff_balanced_check(f: &VFunc, c: Elt) -> Result<bool> {
    if c.0 >= f.cod().p() || c == Elt::ONE {
        return Err(Error::BadC);
    }
    if !f.is_quadratic() {
        return Err(Error::NotQuadratic);
    }
    let pcn = perfect_scan(f, Mode::C(c))?.perfect;
    Ok(pcn == f.is_balanced())
}

/// x ↦ F(x+a+b) − c1 F(x+b) − c2 F(x+a) + c1 c2 F(x).
pub fn second_order_c_derivative(f: &VFunc, a: Elt, b: Elt, c1: Elt, c2: Elt) -> VFunc {
    let (d, k) = (f.dom(), f.cod());
    let c12 = k.mul(c1, c2);
    VFunc::from_fn(d, k, |x| {
        let s = k.sub(f.eval(d.add(d.add(x, a), b)), k.mul(c1, f.eval(d.add(x, b))));
        k.add(k.sub(s, k.mul(c2, f.eval(d.add(x, a)))), k.mul(c12, f.eval(x)))
    })
}

/// The c2-derivative at b of (c1-derivative at a of (F + K1)) + K2, computed
/// literally from the keyed tables.
pub fn keyed_double_derivative(f: &VFunc, k1: Elt, k2: Elt, a: Elt, b: Elt, c1: Elt, c2: Elt) -> VFunc {
    let keyed = VFunc::add_const(f, k1);
    let g = VFunc::add_const(&c_derivative(&keyed, a, c1), k2);
    c_derivative(&g, b, c2)
}

/// Keyed and unkeyed double derivatives agree for every a, b, x.
pub fn keys_cancel(f: &VFunc, k1: Elt, k2: Elt, c1: Elt, c2: Elt) -> bool {
    let d = f.dom();
    d.elements().all(|a| {
        d.elements()
            .all(|b| keyed_double_derivative(f, k1, k2, a, b, c1, c2) == second_order_c_derivative(f, a, b, c1, c2))
    })
}

/// With K2 = −(1 − c1)K1 the round keys cancel; with c2 = 1 they cancel for
/// any K2. Both branches are checked.
pub fn key_cancellation_check(f: &VFunc, k1: Elt, c1: Elt, c2: Elt) -> bool {
    let k = f.cod();
    let k2 = k.neg(k.mul(k.sub(Elt::ONE, c1), k1));
    if !keys_cancel(f, k1, k2, c1, c2) {
        return false;
    }
    let any_k2: Vec<Elt> = if k.order() <= 32 {
        k.elements().collect()
    } else {
        vec![Elt::ZERO, Elt::ONE, k1, k.primitive()]
    };
    any_k2.into_iter().all(|k2| keys_cancel(f, k1, k2, c1, Elt::ONE))
}

#[cfg(test)]
mod tests;
