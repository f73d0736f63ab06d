//! The development {G_F + (u, v)} of a graph in F_{p^n} × F_{p^m} and the
//! single/paired incidence properties it satisfies when F is P℘N for a linear ℘.
//!
//! Points and blocks are both encoded as x·p^m + y. Block (u, v) is paired with
//! (u, ℘⁻¹(v)) and point (x, y) with (x, ℘⁻¹(y)); v = 0 and y = 0 give the single
//! classes.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::func::{is_bijective, VFunc};
use crate::ortho::Ortho;
use crate::{Error, Result};

/// Largest number of points for building a development.
pub const DEVELOPMENT_LIMIT: u64 = 1 << 20;
/// Largest total incidence count v·k.
pub const INCIDENCE_LIMIT: u64 = 1 << 24;
/// Largest number of points for the pair properties.
pub const VERIFY_LIMIT: u64 = 1 << 12;

/// Magic bytes of the packed incidence bitmap.
pub const BITMAP_MAGIC: [u8; 4] = *b"PWDI";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceStructure {
    p: u32,
    n: u32,
    m: u32,
    qm: u32,
    wp_inv: Vec<u32>,
    offsets: Vec<usize>,
    points: Vec<u32>,
}

/// Block sizes and point degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replication {
    pub block_sizes: BTreeMap<usize, u64>,
    pub point_degrees: BTreeMap<usize, u64>,
    /// every block has p^n points and every point is on p^n blocks
    pub uniform: bool,
}

/// The translates G_F + (u, v). Requires a linear ℘.
pub fn development(f: &VFunc, wp: &Ortho) -> Result<IncidenceStructure> {
    if !wp.is_linear() {
        return Err(Error::NotLinearOrtho);
    }
    development_experimental(f, wp)
}

/// As [`development`] but accepts any orthomorphism.
pub fn development_experimental(f: &VFunc, wp: &Ortho) -> Result<IncidenceStructure> {
    if f.cod().spec() != wp.ctx().spec() {
        return Err(Error::DomainMismatch("orthomorphism must act on the codomain"));
    }
    let (dom, cod) = (f.dom(), f.cod());
    let v = dom.order() as u64 * cod.order() as u64;
    if v > DEVELOPMENT_LIMIT {
        return Err(Error::SizeLimit { what: "development", size: v as u128, limit: DEVELOPMENT_LIMIT as u128 });
    }
    let k = dom.order() as u64;
    if v * k > INCIDENCE_LIMIT {
        return Err(Error::SizeLimit { what: "incidence count", size: (v * k) as u128, limit: INCIDENCE_LIMIT as u128 });
    }
    let qm = cod.order();
    let mut blocks = Vec::with_capacity(v as usize);
    let mut buf = Vec::with_capacity(k as usize);
    for u in dom.elements() {
        for w in cod.elements() {
            buf.clear();
            buf.extend(dom.elements().map(|x| dom.add(x, u).0 * qm + cod.add(f.eval(x), w).0));
            blocks.push(buf.clone());
        }
    }
    IncidenceStructure::from_blocks(dom.p(), dom.n(), cod.n(), wp.inverse_table().to_vec(), blocks)
}

impl IncidenceStructure {
    /// Arbitrary blocks on the points of F_{p^n} × F_{p^m}, one per encoded
    /// (u, v), with pairings given by `wp_inv` (a permutation of F_{p^m} fixing 0).
    pub fn from_blocks(p: u32, n: u32, m: u32, wp_inv: Vec<u32>, blocks: Vec<Vec<u32>>) -> Result<IncidenceStructure> {
        if m == 0 || n < m {
            return Err(Error::BadParams("need 1 <= m <= n".into()));
        }
        let qm = crate::arith::checked_pow(p as u128, m).filter(|&q| q <= u32::MAX as u128).ok_or(Error::BadParams("field too large".into()))? as u32;
        let qn = crate::arith::checked_pow(p as u128, n).ok_or(Error::BadParams("field too large".into()))?;
        let v = qn * qm as u128;
        if v > DEVELOPMENT_LIMIT as u128 {
            return Err(Error::SizeLimit { what: "incidence structure", size: v, limit: DEVELOPMENT_LIMIT as u128 });
        }
        if wp_inv.len() != qm as usize || !is_bijective(&wp_inv) || wp_inv[0] != 0 {
            return Err(Error::BadTwist("pairing must be a permutation of F_{p^m} fixing 0"));
        }
        if blocks.len() as u128 != v {
            return Err(Error::BadParams(alloc::format!("expected {} blocks, got {}", v, blocks.len())));
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut points = Vec::new();
        offsets.push(0);
        for mut b in blocks {
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) || b.last().is_some_and(|&x| x as u128 >= v) {
                return Err(Error::BadParams("block has a repeated or out-of-range point".into()));
            }
            points.extend_from_slice(&b);
            offsets.push(points.len());
        }
        if points.len() as u64 > INCIDENCE_LIMIT {
            return Err(Error::SizeLimit { what: "incidence count", size: points.len() as u128, limit: INCIDENCE_LIMIT as u128 });
        }
        Ok(IncidenceStructure { p, n, m, qm, wp_inv, offsets, points })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of points, equal to the number of blocks.
    pub fn v(&self) -> usize {
        self.offsets.len() - 1
    }

    /// p^n.
    pub fn k(&self) -> usize {
        self.v() / self.qm as usize
    }

    /// p^{n−m}.
    pub fn lambda(&self) -> u64 {
        (self.k() / self.qm as usize) as u64
    }

    /// Sorted points of block `b`.
    pub fn block(&self, b: u32) -> &[u32] {
        &self.points[self.offsets[b as usize]..self.offsets[b as usize + 1]]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.v() as u32).map(|b| self.block(b))
    }

    /// (x, y) ↦ (x, ℘⁻¹(y)) on encoded points or blocks.
    #[inline]
    pub fn partner(&self, code: u32) -> u32 {
        code - code % self.qm + self.wp_inv[(code % self.qm) as usize]
    }

    #[inline]
    pub fn is_single(&self, code: u32) -> bool {
        code.is_multiple_of(self.qm)
    }

    pub fn single_count(&self) -> usize {
        self.k()
    }

    /// The pairing restricted to v ≠ 0 has no fixed points and squares to the identity.
    pub fn pairing_is_involution(&self) -> bool {
        (1..self.qm).all(|y| {
            let z = self.wp_inv[y as usize];
            z != y && self.wp_inv[z as usize] == y
        })
    }

    /// The paired class: unordered pairs {B, B̄} when the pairing is an
    /// involution, otherwise every association B ↦ B̄.
    pub fn paired_blocks(&self) -> Vec<(u32, u32)> {
        let inv = self.pairing_is_involution();
        (0..self.v() as u32)
            .filter(|&b| !self.is_single(b))
            .map(|b| (b, self.partner(b)))
            .filter(|&(b, c)| !inv || b < c)
            .collect()
    }

    pub fn replication(&self) -> Replication {
        let k = self.k();
        let mut block_sizes = BTreeMap::new();
        let mut deg = vec![0usize; self.v()];
        for b in self.blocks() {
            *block_sizes.entry(b.len()).or_insert(0) += 1;
            for &pt in b {
                deg[pt as usize] += 1;
            }
        }
        let mut point_degrees = BTreeMap::new();
        for d in deg {
            *point_degrees.entry(d).or_insert(0) += 1;
        }
        let uniform = block_sizes.keys().eq([k].iter()) && point_degrees.keys().eq([k].iter());
        Replication { block_sizes, point_degrees, uniform }
    }

    /// Block × point incidence matrix, row-major, least significant bit first,
    /// after a 16-byte header: magic, then p, n, m as little-endian u32.
    pub fn to_bitmap(&self) -> Vec<u8> {
        let v = self.v();
        let mut out = Vec::with_capacity(16 + (v * v).div_ceil(8));
        out.extend_from_slice(&BITMAP_MAGIC);
        for x in [self.p, self.n, self.m] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        let mut bits = vec![0u8; (v * v).div_ceil(8)];
        for (b, pts) in self.blocks().enumerate() {
            for &pt in pts {
                let i = b * v + pt as usize;
                bits[i / 8] |= 1 << (i % 8);
            }
        }
        out.extend_from_slice(&bits);
        out
    }

    /// Inverse of [`IncidenceStructure::to_bitmap`], given the pairing.
    pub fn from_bitmap(bytes: &[u8], wp_inv: Vec<u32>) -> Result<IncidenceStructure> {
        if bytes.len() < 16 || bytes[..4] != BITMAP_MAGIC {
            return Err(Error::BadParams("not an incidence bitmap".into()));
        }
        let word = |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
        let (p, n, m) = (word(4), word(8), word(12));
        let v = crate::arith::checked_pow(p as u128, n + m).filter(|&v| v <= DEVELOPMENT_LIMIT as u128).ok_or(Error::BadParams("bitmap header out of range".into()))? as usize;
        let bits = &bytes[16..];
        if bits.len() != (v * v).div_ceil(8) {
            return Err(Error::BadParams("bitmap length does not match header".into()));
        }
        let blocks = (0..v)
            .map(|b| (0..v as u32).filter(|&pt| {
                let i = b * v + pt as usize;
                bits[i / 8] >> (i % 8) & 1 == 1
            }).collect())
            .collect();
        IncidenceStructure::from_blocks(p, n, m, wp_inv, blocks)
    }
}

/// Bitset rows for one of the two pair properties.
///
/// For the block property rows are points and columns blocks: row P holds the
/// blocks through P. For the point property rows are blocks and columns points.
/// The statistic for an ordered pair (r1, r2) is the number of columns c with
/// c ∈ row r1 and partner(c) ∈ row r2, split into single and paired columns.
#[derive(Clone, Debug)]
pub struct PairCounter {
    rows: Vec<u64>,
    shifted: Vec<u64>,
    singles: Vec<u64>,
    words: usize,
    single_words: usize,
    count: usize,
    target: u64,
}

/// Statistics over a range of ordered pairs of distinct rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairStats {
    pub pairs: u64,
    /// statistic value ↦ number of ordered pairs
    pub histogram: BTreeMap<u64, u64>,
    pub single_total: u64,
    pub paired_total: u64,
    /// least (r1, r2) whose statistic differs from p^{n−m}, with the value
    pub first_bad: Option<(u32, u32, u64)>,
}

impl PairStats {
    pub fn merge(parts: impl IntoIterator<Item = PairStats>) -> PairStats {
        let mut out = PairStats::default();
        for s in parts {
            out.pairs += s.pairs;
            out.single_total += s.single_total;
            out.paired_total += s.paired_total;
            for (k, c) in s.histogram {
                *out.histogram.entry(k).or_insert(0) += c;
            }
            out.first_bad = match (out.first_bad, s.first_bad) {
                (Some(a), Some(b)) => Some(if (b.0, b.1) < (a.0, a.1) { b } else { a }),
                (a, b) => a.or(b),
            };
        }
        out
    }

    pub fn pass(&self) -> bool {
        self.first_bad.is_none()
    }
}

impl PairCounter {
    /// Rows are points; checks the single/paired block statistic.
    pub fn block_property(s: &IncidenceStructure) -> Result<PairCounter> {
        Self::build(s, true)
    }

    /// Rows are blocks; checks the single/paired point statistic.
    pub fn point_property(s: &IncidenceStructure) -> Result<PairCounter> {
        Self::build(s, false)
    }

    fn build(s: &IncidenceStructure, rows_are_points: bool) -> Result<PairCounter> {
        let v = s.v();
        if v as u64 > VERIFY_LIMIT {
            return Err(Error::SizeLimit { what: "pair property check", size: v as u128, limit: VERIFY_LIMIT as u128 });
        }
        let words = v.div_ceil(64);
        let qm = s.qm as usize;
        let single_words = (v / qm).div_ceil(64);
        let mut rows = vec![0u64; v * words];
        let mut singles = vec![0u64; v * single_words];
        for (b, pts) in s.blocks().enumerate() {
            for &pt in pts {
                let (r, c) = if rows_are_points { (pt as usize, b) } else { (b, pt as usize) };
                rows[r * words + c / 64] |= 1 << (c % 64);
                if c % qm == 0 {
                    let j = c / qm;
                    singles[r * single_words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let mut shifted = vec![0u64; v * words];
        for r in 0..v {
            let row = &rows[r * words..(r + 1) * words];
            for c in 0..v {
                let pc = s.partner(c as u32) as usize;
                if row[pc / 64] >> (pc % 64) & 1 == 1 {
                    shifted[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        Ok(PairCounter { rows, shifted, singles, words, single_words, count: v, target: s.lambda() })
    }

    pub fn rows(&self) -> usize {
        self.count
    }

    /// p^{n−m}.
    pub fn target(&self) -> u64 {
        self.target
    }

    /// (single, paired) statistic for the ordered pair (r1, r2).
    pub fn pair(&self, r1: usize, r2: usize) -> (u64, u64) {
        let w = self.words;
        let a = &self.rows[r1 * w..(r1 + 1) * w];
        let b = &self.shifted[r2 * w..(r2 + 1) * w];
        let total: u64 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum();
        let sw = self.single_words;
        let sa = &self.singles[r1 * sw..(r1 + 1) * sw];
        let sb = &self.singles[r2 * sw..(r2 + 1) * sw];
        let single: u64 = sa.iter().zip(sb).map(|(x, y)| (x & y).count_ones() as u64).sum();
        (single, total - single)
    }

    /// All ordered pairs (r1, r2), r1 ≠ r2, with r1 in `first`.
    pub fn stats(&self, first: Range<usize>) -> PairStats {
        let mut out = PairStats::default();
        for r1 in first {
            for r2 in 0..self.count {
                if r1 == r2 {
                    continue;
                }
                let (single, paired) = self.pair(r1, r2);
                let t = single + paired;
                out.pairs += 1;
                out.single_total += single;
                out.paired_total += paired;
                *out.histogram.entry(t).or_insert(0) += 1;
                if t != self.target && out.first_bad.is_none() {
                    out.first_bad = Some((r1 as u32, r2 as u32, t));
                }
            }
        }
        out
    }

    pub fn all_stats(&self) -> PairStats {
        self.stats(0..self.count)
    }
}

/// For every ordered pair of distinct points, the single blocks through both
/// plus the paired blocks (B, B̄) with the first point in B and the second in B̄
/// number p^{n−m}.
pub fn verify_block_property(s: &IncidenceStructure) -> Result<bool> {
    Ok(PairCounter::block_property(s)?.all_stats().pass())
}

/// The dual of [`verify_block_property`] over ordered pairs of distinct blocks.
pub fn verify_point_property(s: &IncidenceStructure) -> Result<bool> {
    Ok(PairCounter::point_property(s)?.all_stats().pass())
}
