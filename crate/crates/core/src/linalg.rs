//! F_p-linear algebra on the coordinate space of GF(p^n).
//!
//! A matrix acts on the polynomial-basis coordinate vector of an element:
//! y_i = Σ_j A[i][j] x_j, so column j holds the coordinates of A(e_j).

use alloc::vec;
use alloc::vec::Vec;

use crate::gf::{Elt, FieldCtx};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matrix {
    p: u32,
    dim: usize,
    /// row-major entries in [0, p)
    entries: Vec<u32>,
}

impl Matrix {
    pub fn identity(p: u32, dim: usize) -> Matrix {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Matrix { p, dim, entries }
    }

    pub fn scalar(p: u32, dim: usize, s: u32) -> Matrix {
        let mut m = Matrix::identity(p, dim);
        for e in m.entries.iter_mut() {
            *e = (*e * s) % p;
        }
        m
    }

    pub fn from_rows(p: u32, dim: usize, entries: Vec<u32>) -> Result<Matrix> {
        if entries.len() != dim * dim {
            return Err(Error::BadParams(alloc::format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        if entries.iter().any(|&e| e >= p) {
            return Err(Error::BadParams("matrix entry out of range".into()));
        }
        Ok(Matrix { p, dim, entries })
    }

    /// The matrix of an F_p-linear endomap given by its table.
    pub fn from_linear_table(ctx: &FieldCtx, table: &[u32]) -> Matrix {
        let dim = ctx.n() as usize;
        let mut entries = vec![0; dim * dim];
        for j in 0..dim {
            let img = Elt(table[ctx.stride(j as u32) as usize]);
            for i in 0..dim {
                entries[i * dim + j] = ctx.digit(img, i as u32);
            }
        }
        Matrix { p: ctx.p(), dim, entries }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim + j]
    }

    pub fn sub_identity(&self) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.dim {
            let e = &mut m.entries[i * self.dim + i];
            *e = (*e + self.p - 1) % self.p;
        }
        m
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let (d, p) = (self.dim, self.p as u64);
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                let s: u64 = (0..d).map(|k| self.get(i, k) as u64 * other.get(k, j) as u64).sum();
                entries[i * d + j] = (s % p) as u32;
            }
        }
        Matrix { p: self.p, dim: d, entries }
    }

    pub fn rank(&self) -> usize {
        let (d, p) = (self.dim, self.p as u64);
        let mut m: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| self.get(i, j) as u64).collect()).collect();
        let mut rank = 0;
        for col in 0..d {
            let Some(piv) = (rank..d).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, piv);
            let inv = crate::gf::poly::inv_mod_p(m[rank][col], p);
            for r in 0..d {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col] * inv % p;
                    for c in 0..d {
                        m[r][c] = (m[r][c] + (p - f) * m[rank][c]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.dim
    }

    /// Table of x ↦ A·x on a field of matching degree.
    pub fn to_table(&self, ctx: &FieldCtx) -> Result<Vec<u32>> {
        if ctx.p() != self.p || ctx.n() as usize != self.dim {
            return Err(Error::DomainMismatch("matrix dimension differs from the field degree"));
        }
        let cols: Vec<Elt> = (0..self.dim)
            .map(|j| ctx.from_digits(&(0..self.dim).map(|i| self.get(i, j)).collect::<Vec<_>>()))
            .collect();
        Ok(linear_table(ctx, &cols))
    }
}

/// Table of the F_p-linear map sending e_j to `images[j]`.
pub fn linear_table(ctx: &FieldCtx, images: &[Elt]) -> Vec<u32> {
    let mut table = vec![0u32; ctx.size()];
    let mut filled = 1usize;
    for (j, &img) in images.iter().enumerate() {
        let stride = ctx.stride(j as u32) as usize;
        debug_assert_eq!(stride, filled);
        let mut mult = Elt::ZERO;
        for k in 1..ctx.p() as usize {
            mult = ctx.add(mult, img);
            for x in 0..filled {
                table[k * stride + x] = ctx.add(Elt(table[x]), mult).0;
            }
        }
        filled *= ctx.p() as usize;
    }
    table
}

/// |GL(dim, p)|, saturating.
pub fn gl_order(p: u32, dim: u32) -> u128 {
    let q = (p as u128).saturating_pow(dim);
    (0..dim).fold(1u128, |acc, i| acc.saturating_mul(q - (p as u128).pow(i)))
}

/// A partially specified injective F_p-linear map of a field into itself,
/// grown one basis vector at a time, with undo for backtracking.
#[derive(Clone, Debug)]
pub struct PartialLinear {
    p: u32,
    img: Vec<u32>,
    hit: Vec<bool>,
    defined: Vec<u32>,
    marks: Vec<usize>,
}

impl PartialLinear {
    pub fn new(ctx: &FieldCtx) -> PartialLinear {
        let mut img = vec![NONE; ctx.size()];
        let mut hit = vec![false; ctx.size()];
        img[0] = 0;
        hit[0] = true;
        PartialLinear { p: ctx.p(), img, hit, defined: vec![0], marks: Vec::new() }
    }

    #[inline]
    pub fn image(&self, x: Elt) -> Option<Elt> {
        match self.img[x.idx()] {
            NONE => None,
            v => Some(Elt(v)),
        }
    }

    #[inline]
    pub fn is_defined(&self, x: Elt) -> bool {
        self.img[x.idx()] != NONE
    }

    #[inline]
    pub fn in_image(&self, y: Elt) -> bool {
        self.hit[y.idx()]
    }

    pub fn dim(&self) -> usize {
        self.marks.len()
    }

    pub fn defined(&self) -> &[u32] {
        &self.defined
    }

    pub fn is_total(&self) -> bool {
        self.defined.len() == self.img.len()
    }

    /// Extends by s ↦ t. Requires s outside the current domain and t outside
    /// the current image. Returns the index where the new points start.
    pub fn extend(&mut self, ctx: &FieldCtx, s: Elt, t: Elt) -> usize {
        debug_assert!(!self.is_defined(s) && !self.in_image(t));
        let start = self.defined.len();
        self.marks.push(start);
        let (mut ms, mut mt) = (Elt::ZERO, Elt::ZERO);
        for _ in 1..self.p {
            ms = ctx.add(ms, s);
            mt = ctx.add(mt, t);
            for i in 0..start {
                let x = Elt(self.defined[i]);
                let y = Elt(self.img[x.idx()]);
                let nx = ctx.add(x, ms);
                let ny = ctx.add(y, mt);
                self.img[nx.idx()] = ny.0;
                self.hit[ny.idx()] = true;
                self.defined.push(nx.0);
            }
        }
        start
    }

    pub fn undo(&mut self) {
        let start = self.marks.pop().expect("nothing to undo");
        for &x in &self.defined[start..] {
            let y = self.img[x as usize];
            self.hit[y as usize] = false;
            self.img[x as usize] = NONE;
        }
        self.defined.truncate(start);
    }

    pub fn table(&self) -> Option<Vec<u32>> {
        if self.is_total() {
            Some(self.img.clone())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn all_matrices(p: u32, d: usize) -> impl Iterator<Item = Matrix> {
        let count = (p as usize).pow((d * d) as u32);
        (0..count).map(move |mut idx| {
            let mut e = vec![0; d * d];
            for v in e.iter_mut() {
                *v = (idx % p as usize) as u32;
                idx /= p as usize;
            }
            Matrix::from_rows(p, d, e).unwrap()
        })
    }

    #[test]
    fn gl_orders_match_enumeration() {
        for (p, d) in [(2, 1), (2, 2), (2, 3), (3, 2), (5, 1)] {
            let count = all_matrices(p, d).filter(|m| m.is_invertible()).count() as u128;
            assert_eq!(count, gl_order(p, d as u32), "p={p} d={d}");
        }
        assert_eq!(gl_order(2, 3), 168);
        assert_eq!(gl_order(2, 4), 20160);
    }

    #[test]
    fn matrix_tables_are_linear_and_round_trip() {
        let ctx = FieldCtx::new(3, 2, None).unwrap();
        let mut tables = BTreeSet::new();
        for m in all_matrices(3, 2) {
            let t = m.to_table(&ctx).unwrap();
            for x in ctx.elements() {
                for y in ctx.elements() {
                    assert_eq!(t[ctx.add(x, y).idx()], ctx.add(Elt(t[x.idx()]), Elt(t[y.idx()])).0);
                }
            }
            assert_eq!(Matrix::from_linear_table(&ctx, &t), m);
            let bij = crate::func::is_bijective(&t);
            assert_eq!(bij, m.is_invertible());
            tables.insert(t);
        }
        assert_eq!(tables.len(), 81);
    }

    #[test]
    fn product_matches_composition() {
        let ctx = FieldCtx::new(2, 3, None).unwrap();
        let ms: Vec<Matrix> = all_matrices(2, 3).step_by(37).collect();
        for a in &ms {
            for b in &ms {
                let ta = a.to_table(&ctx).unwrap();
                let tb = b.to_table(&ctx).unwrap();
                let tab = a.mul(b).to_table(&ctx).unwrap();
                for x in 0..8 {
                    assert_eq!(tab[x], ta[tb[x] as usize]);
                }
            }
        }
    }

    #[test]
    fn partial_linear_extends_and_undoes() {
        let ctx = FieldCtx::new(3, 2, None).unwrap();
        let mut l = PartialLinear::new(&ctx);
        l.extend(&ctx, Elt(1), Elt(4));
        assert_eq!(l.defined().len(), 3);
        let snapshot = l.clone();
        l.extend(&ctx, Elt(3), Elt(1));
        let t = l.table().unwrap();
        assert_eq!(t, linear_table(&ctx, &[Elt(4), Elt(1)]));
        l.undo();
        assert_eq!(l.defined(), snapshot.defined());
        assert!(!l.in_image(Elt(1)));
    }
}
