//! Arithmetic in GF(p^n).
//!
//! An element is stored as the base-p packing of its coefficient vector in the
//! polynomial basis: `index = Σ a_i p^i`. For p = 2 this is the usual bit
//! string. Multiplication goes through log/antilog tables built from the
//! least primitive element; odd-characteristic addition uses a Zech table.
//! The table-free routines (`add_ref`, `mul_ref`) stay available as an
//! independent reference path.

mod embed;
pub(crate) mod poly;

use alloc::vec;
use alloc::vec::Vec;

pub use embed::Embedding;

use crate::arith;
use crate::{Error, Result};

/// Largest field order accepted by default.
pub const DEFAULT_LIMIT: u64 = 1 << 20;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elt(pub u32);

impl Elt {
    pub const ZERO: Elt = Elt(0);
    pub const ONE: Elt = Elt(1);

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Characteristic, degree and monic modulus (n + 1 coefficients, low first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
}

#[derive(Clone, Copy, Debug)]
pub struct FieldOptions {
    pub limit: u64,
    pub tables: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions { limit: DEFAULT_LIMIT, tables: true }
    }
}

#[derive(Debug)]
struct Tables {
    log: Vec<u32>,
    /// exp[i] = g^i for i < 2(q-1)
    exp: Vec<u32>,
    /// zech[k] = log(1 + g^k), NONE when 1 + g^k = 0; empty for p = 2
    zech: Vec<u32>,
}

#[derive(Debug)]
pub struct FieldCtx {
    spec: FieldSpec,
    q: u32,
    pw: Vec<u32>,
    /// modulus without the leading term, as a bit mask (p = 2 only)
    low_mask: u32,
    g: Elt,
    tables: Option<Tables>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for FieldCtx {}

/// Lexicographically least monic irreducible of degree n over F_p, ordering
/// candidates by the integer Σ a_i p^i of the non-leading coefficients.
pub fn least_irreducible(p: u32, n: u32) -> Result<Vec<u32>> {
    if !arith::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if n == 0 {
        return Err(Error::BadModulus("degree must be at least 1".into()));
    }
    let count = arith::checked_pow(p as u128, n)
        .ok_or(Error::SizeLimit { what: "modulus search", size: u128::MAX, limit: DEFAULT_LIMIT as u128 })?;
    for idx in 0..count {
        let mut f: Vec<u64> = Vec::with_capacity(n as usize + 1);
        let mut rest = idx;
        for _ in 0..n {
            f.push((rest % p as u128) as u64);
            rest /= p as u128;
        }
        f.push(1);
        if poly::is_irreducible(&f, p as u64) {
            return Ok(f.into_iter().map(|c| c as u32).collect());
        }
    }
    Err(Error::Reducible(p))
}

impl FieldCtx {
    pub fn new(p: u32, n: u32, modulus: Option<&[u32]>) -> Result<FieldCtx> {
        Self::with_options(p, n, modulus, FieldOptions::default())
    }

    pub fn with_options(p: u32, n: u32, modulus: Option<&[u32]>, opts: FieldOptions) -> Result<FieldCtx> {
        if !arith::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if n == 0 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        let q = arith::checked_pow(p as u128, n).unwrap_or(u128::MAX);
        if q > opts.limit as u128 || q > u32::MAX as u128 / 2 {
            return Err(Error::SizeLimit { what: "field order", size: q, limit: opts.limit as u128 });
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != n as usize + 1 {
                    return Err(Error::BadModulus("modulus must have n + 1 coefficients".into()));
                }
                if m[n as usize] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus("coefficient out of range".into()));
                }
                let f: Vec<u64> = m.iter().map(|&c| c as u64).collect();
                if !poly::is_irreducible(&f, p as u64) {
                    return Err(Error::Reducible(p));
                }
                m.to_vec()
            }
            None => least_irreducible(p, n)?,
        };
        let q = q as u32;
        let pw: Vec<u32> = (0..=n).map(|i| p.pow(i)).collect();
        let low_mask = if p == 2 {
            modulus[..n as usize].iter().enumerate().fold(0u32, |m, (i, &c)| m | (c << i))
        } else {
            0
        };
        let mut ctx = FieldCtx { spec: FieldSpec { p, n, modulus }, q, pw, low_mask, g: Elt::ONE, tables: None };
        ctx.g = ctx.find_primitive();
        if opts.tables {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    fn find_primitive(&self) -> Elt {
        let order = (self.q - 1) as u128;
        let factors = arith::prime_factors(order);
        (1..self.q)
            .map(Elt)
            .find(|&x| factors.iter().all(|&r| self.pow_ref(x, order / r) != Elt::ONE))
            .expect("multiplicative group is cyclic")
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let ord = q - 1;
        let mut exp = vec![0u32; 2 * ord.max(1)];
        let mut log = vec![NONE; q];
        let mut cur = Elt::ONE;
        for i in 0..ord {
            exp[i] = cur.0;
            log[cur.idx()] = i as u32;
            cur = self.mul_ref(cur, self.g);
        }
        for i in ord..2 * ord {
            exp[i] = exp[i - ord];
        }
        let zech = if self.spec.p == 2 {
            Vec::new()
        } else {
            (0..ord)
                .map(|k| {
                    let s = self.add_ref(Elt::ONE, Elt(exp[k]));
                    if s.is_zero() {
                        NONE
                    } else {
                        log[s.idx()]
                    }
                })
                .collect()
        };
        Tables { log, exp, zech }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Characteristic.
    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    /// Extension degree over F_p.
    #[inline]
    pub fn n(&self) -> u32 {
        self.spec.n
    }

    /// Field order p^n.
    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.q as usize
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// The least primitive element.
    pub fn primitive(&self) -> Elt {
        self.g
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> + Clone {
        (0..self.q).map(Elt)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elt> + Clone {
        (1..self.q).map(Elt)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, k: i128) -> Elt {
        Elt(k.rem_euclid(self.spec.p as i128) as u32)
    }

    pub fn digit(&self, x: Elt, i: u32) -> u32 {
        (x.0 / self.pw[i as usize]) % self.spec.p
    }

    pub fn digits(&self, x: Elt) -> Vec<u32> {
        (0..self.spec.n).map(|i| self.digit(x, i)).collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> Elt {
        debug_assert!(d.len() <= self.spec.n as usize && d.iter().all(|&c| c < self.spec.p));
        Elt(d.iter().enumerate().map(|(i, &c)| c * self.pw[i]).sum())
    }

    /// p^i as an element index stride.
    pub fn stride(&self, i: u32) -> u32 {
        self.pw[i as usize]
    }

    pub fn contains(&self, x: Elt) -> bool {
        x.0 < self.q
    }

    // ---- table-free reference arithmetic ----

    pub fn add_ref(&self, x: Elt, y: Elt) -> Elt {
        let p = self.spec.p;
        if p == 2 {
            return Elt(x.0 ^ y.0);
        }
        let (mut a, mut b, mut out, mut w) = (x.0, y.0, 0u32, 1u32);
        for _ in 0..self.spec.n {
            out += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
            w = w.wrapping_mul(p);
        }
        Elt(out)
    }

    pub fn neg_ref(&self, x: Elt) -> Elt {
        let p = self.spec.p;
        if p == 2 {
            return x;
        }
        let (mut a, mut out, mut w) = (x.0, 0u32, 1u32);
        for _ in 0..self.spec.n {
            out += ((p - a % p) % p) * w;
            a /= p;
            w = w.wrapping_mul(p);
        }
        Elt(out)
    }

    pub fn mul_ref(&self, x: Elt, y: Elt) -> Elt {
        let n = self.spec.n;
        if self.spec.p == 2 {
            let (mut a, mut b, mut r) = (x.0, y.0, 0u32);
            let top = 1u32 << (n - 1);
            let full = (1u32 << n).wrapping_sub(1);
            while b != 0 {
                if b & 1 == 1 {
                    r ^= a;
                }
                b >>= 1;
                let carry = a & top != 0;
                a = (a << 1) & full;
                if carry {
                    a ^= self.low_mask;
                }
            }
            return Elt(r);
        }
        let p = self.spec.p as u64;
        let a: Vec<u64> = self.digits(x).into_iter().map(u64::from).collect();
        let b: Vec<u64> = self.digits(y).into_iter().map(u64::from).collect();
        let m: Vec<u64> = self.spec.modulus.iter().map(|&c| c as u64).collect();
        let r = poly::mulmod(&a, &b, &m, p);
        Elt(r.iter().enumerate().map(|(i, &c)| c as u32 * self.pw[i]).sum())
    }

    pub fn pow_ref(&self, x: Elt, e: u128) -> Elt {
        if x.is_zero() {
            return if e == 0 { Elt::ONE } else { Elt::ZERO };
        }
        let mut e = e % (self.q as u128 - 1);
        let mut acc = Elt::ONE;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_ref(acc, b);
            }
            b = self.mul_ref(b, b);
            e >>= 1;
        }
        acc
    }

    // ---- main arithmetic ----

    #[inline]
    pub fn add(&self, x: Elt, y: Elt) -> Elt {
        if self.spec.p == 2 {
            return Elt(x.0 ^ y.0);
        }
        match &self.tables {
            Some(t) => {
                if x.is_zero() {
                    return y;
                }
                if y.is_zero() {
                    return x;
                }
                let lx = t.log[x.idx()];
                let ly = t.log[y.idx()];
                let ord = self.q - 1;
                let d = if ly >= lx { ly - lx } else { ly + ord - lx };
                let z = t.zech[d as usize];
                if z == NONE {
                    Elt::ZERO
                } else {
                    Elt(t.exp[(lx + z) as usize])
                }
            }
            None => self.add_ref(x, y),
        }
    }

    #[inline]
    pub fn neg(&self, x: Elt) -> Elt {
        if self.spec.p == 2 || x.is_zero() {
            return x;
        }
        match &self.tables {
            Some(t) => Elt(t.exp[(t.log[x.idx()] + (self.q - 1) / 2) as usize]),
            None => self.neg_ref(x),
        }
    }

    #[inline]
    pub fn sub(&self, x: Elt, y: Elt) -> Elt {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Elt, y: Elt) -> Elt {
        match &self.tables {
            Some(t) => {
                if x.is_zero() || y.is_zero() {
                    Elt::ZERO
                } else {
                    Elt(t.exp[(t.log[x.idx()] + t.log[y.idx()]) as usize])
                }
            }
            None => self.mul_ref(x, y),
        }
    }

    pub fn inv(&self, x: Elt) -> Result<Elt> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => Elt(t.exp[(self.q - 1 - t.log[x.idx()]) as usize]),
            None => self.pow_ref(x, self.q as u128 - 2),
        })
    }

    pub fn div(&self, x: Elt, y: Elt) -> Result<Elt> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// x^e for e ≥ 0, with 0^0 = 1.
    pub fn pow(&self, x: Elt, e: u128) -> Elt {
        if x.is_zero() {
            return if e == 0 { Elt::ONE } else { Elt::ZERO };
        }
        match &self.tables {
            Some(t) => {
                let ord = (self.q - 1) as u128;
                let k = (t.log[x.idx()] as u128 * (e % ord)) % ord;
                Elt(t.exp[k as usize])
            }
            None => self.pow_ref(x, e),
        }
    }

    /// x^e for any integer e; negative exponents need x ≠ 0.
    pub fn pow_signed(&self, x: Elt, e: i128) -> Result<Elt> {
        if e >= 0 {
            Ok(self.pow(x, e as u128))
        } else {
            Ok(self.pow(self.inv(x)?, e.unsigned_abs()))
        }
    }

    /// x^{p^k}.
    pub fn frobenius(&self, x: Elt, k: u32) -> Elt {
        self.pow(x, self.pw[(k % self.spec.n) as usize] as u128)
    }

    pub fn log(&self, x: Elt) -> Option<u32> {
        let t = self.tables.as_ref()?;
        if x.is_zero() {
            None
        } else {
            Some(t.log[x.idx()])
        }
    }

    /// g^k.
    pub fn exp(&self, k: u128) -> Elt {
        let ord = (self.q - 1) as u128;
        match &self.tables {
            Some(t) => Elt(t.exp[(k % ord) as usize]),
            None => self.pow_ref(self.g, k),
        }
    }

    fn check_divisor(&self, m: u32) -> Result<()> {
        if m == 0 || !self.spec.n.is_multiple_of(m) {
            Err(Error::NotADivisor { m, n: self.spec.n })
        } else {
            Ok(())
        }
    }

    /// Tr^n_m(x) = Σ_{i < n/m} x^{p^{mi}}, an element of the subfield F_{p^m}.
    pub fn rel_trace(&self, m: u32, x: Elt) -> Result<Elt> {
        self.check_divisor(m)?;
        let mut acc = Elt::ZERO;
        let mut y = x;
        for _ in 0..self.spec.n / m {
            acc = self.add(acc, y);
            y = self.frobenius(y, m);
        }
        debug_assert!(self.frobenius(acc, m) == acc);
        Ok(acc)
    }

    /// Absolute trace onto F_p.
    pub fn trace(&self, x: Elt) -> Elt {
        self.rel_trace(1, x).expect("1 divides n")
    }

    pub fn in_subfield(&self, x: Elt, m: u32) -> Result<bool> {
        self.check_divisor(m)?;
        Ok(self.frobenius(x, m) == x)
    }

    /// Elements of the subfield F_{p^m}, in increasing index order.
    pub fn subfield_elements(&self, m: u32) -> Result<Vec<Elt>> {
        self.check_divisor(m)?;
        Ok(self.elements().filter(|&x| self.frobenius(x, m) == x).collect())
    }

    pub fn is_kth_power(&self, x: Elt, k: u128) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        let ord = (self.q - 1) as u128;
        Ok(self.pow(x, ord / arith::gcd(k, ord)) == Elt::ONE)
    }

    /// η(x) ∈ {−1, 0, 1}.
    pub fn quadratic_character(&self, x: Elt) -> Result<i8> {
        if self.spec.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if x.is_zero() {
            return Ok(0);
        }
        let r = self.pow(x, (self.q as u128 - 1) / 2);
        Ok(if r == Elt::ONE { 1 } else { -1 })
    }

    /// The field F_{p^m} with its default modulus.
    pub fn subfield_ctx(&self, m: u32) -> Result<FieldCtx> {
        self.check_divisor(m)?;
        FieldCtx::new(self.spec.p, m, None)
    }
}
