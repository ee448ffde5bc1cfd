//! The base field F_q, either a prime field or F_p[t]/(m(t)).

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

use super::poly;
use super::GfError;
use crate::numth::modarith::{inv_mod, Barrett};

/// Largest extension degree over the prime field: q < 8e12 forces e <= 42.
pub const MAX_EXT_DEGREE: usize = 42;

/// Arithmetic in a finite field F_q. Elements are plain `Copy` data.
///
/// Every element has an integer index in `0..q`: for F_p the residue itself,
/// for F_{p^e} the value `sum c_i p^i` of its coefficient vector. The index
/// is what certificates store for base-field values.
#[allow(clippy::wrong_self_convention)]
pub trait BaseField: Clone + Debug + Send + Sync {
    type El: Copy + Eq + Hash + Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    fn degree(&self) -> u32;
    fn order(&self) -> u64;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    /// Image of the integer `n` under Z -> F_p -> F_q.
    fn from_int(&self, n: u64) -> Self::El;

    fn add(&self, a: Self::El, b: Self::El) -> Self::El;
    fn sub(&self, a: Self::El, b: Self::El) -> Self::El;
    fn neg(&self, a: Self::El) -> Self::El;
    fn mul(&self, a: Self::El, b: Self::El) -> Self::El;
    fn inv(&self, a: Self::El) -> Option<Self::El>;

    fn to_index(&self, a: Self::El) -> u64;
    fn from_index(&self, i: u64) -> Option<Self::El>;
    /// Little-endian base-p digits, always `degree()` of them.
    fn digits(&self, a: Self::El) -> Vec<u64>;
    fn from_digits(&self, d: &[u64]) -> Option<Self::El>;

    /// `a0*b0 + a1*b1 + a2*b2`; prime fields override this with a single reduction.
    fn dot3(&self, a: [Self::El; 3], b: [Self::El; 3]) -> Self::El {
        let s = self.add(self.mul(a[0], b[0]), self.mul(a[1], b[1]));
        self.add(s, self.mul(a[2], b[2]))
    }

    fn is_zero(&self, a: Self::El) -> bool {
        a == self.zero()
    }

    fn pow(&self, a: Self::El, mut e: u128) -> Self::El {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::El {
        self.from_index(rng.gen_range(0..self.order()))
            .expect("index below the field order")
    }
}

/// F_p for a prime `p < 2^63`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    red: Barrett,
    /// `p^2 * 3` fits in u128 without overflow when p < 2^62.
    lazy_dot: bool,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField {
            red: Barrett::new(p),
            lazy_dot: p < (1 << 62),
        }
    }

    pub fn p(&self) -> u64 {
        self.red.modulus()
    }
}

impl BaseField for PrimeField {
    type El = u64;

    fn characteristic(&self) -> u64 {
        self.p()
    }
    fn degree(&self) -> u32 {
        1
    }
    fn order(&self) -> u64 {
        self.p()
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p()
    }
    fn from_int(&self, n: u64) -> u64 {
        n % self.p()
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        self.red.add(a, b)
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        self.red.sub(a, b)
    }
    #[inline]
    fn neg(&self, a: u64) -> u64 {
        self.red.sub(0, a)
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.red.mul(a, b)
    }
    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        inv_mod(a as u128, self.p() as u128).map(|v| v as u64)
    }
    fn to_index(&self, a: u64) -> u64 {
        a
    }
    fn from_index(&self, i: u64) -> Option<u64> {
        (i < self.p()).then_some(i)
    }
    fn digits(&self, a: u64) -> Vec<u64> {
        vec![a]
    }
    fn from_digits(&self, d: &[u64]) -> Option<u64> {
        match d {
            [x] if *x < self.p() => Some(*x),
            _ => None,
        }
    }
    #[inline]
    fn dot3(&self, a: [u64; 3], b: [u64; 3]) -> u64 {
        if self.lazy_dot {
            let s = a[0] as u128 * b[0] as u128
                + a[1] as u128 * b[1] as u128
                + a[2] as u128 * b[2] as u128;
            self.red.reduce(s)
        } else {
            let s = self.add(self.mul(a[0], b[0]), self.mul(a[1], b[1]));
            self.add(s, self.mul(a[2], b[2]))
        }
    }
}

/// Coefficient vector of an element of F_{p^e}; slots past `e` stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtEl(pub [u32; MAX_EXT_DEGREE]);

impl Debug for ExtEl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        write!(f, "ExtEl{:?}", &self.0[..last])
    }
}

/// F_{p^e} = F_p[t]/(m(t)) for `e >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    prime: PrimeField,
    e: usize,
    q: u64,
    /// `(p - m_i) mod p` for the monic modulus `t^e + sum m_i t^i`.
    neg_tail: Vec<u64>,
    modulus: Vec<u64>,
    /// floor(2^64 / p), for [`ExtField::rem`].
    recip: u64,
}

impl ExtField {
    /// Uses the given monic modulus (coefficients low to high, length e+1),
    /// checking that it is irreducible.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self, GfError> {
        let e = modulus.len().saturating_sub(1);
        if !(2..=MAX_EXT_DEGREE).contains(&e) || p >= 1 << 22 {
            return Err(GfError::Unsupported(format!(
                "extension of degree {e} over F_{p}"
            )));
        }
        if modulus[e] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(GfError::BadModulus(
                "base modulus must be monic and reduced".into(),
            ));
        }
        let prime = PrimeField::new(p);
        if !poly::is_irreducible(&prime, modulus) {
            return Err(GfError::BadModulus("base modulus is reducible".into()));
        }
        let q = p
            .checked_pow(e as u32)
            .filter(|&q| q < 1 << 62)
            .ok_or_else(|| GfError::Unsupported(format!("{p}^{e} too large")))?;
        Ok(ExtField {
            neg_tail: modulus[..e].iter().map(|&c| (p - c) % p).collect(),
            modulus: modulus.to_vec(),
            recip: ((1u128 << 64) / p as u128) as u64,
            prime,
            e,
            q,
        })
    }

    /// Draws random monic degree-e polynomials until one is irreducible.
    pub fn random<R: Rng + ?Sized>(p: u64, e: usize, rng: &mut R) -> Result<Self, GfError> {
        if !(2..=MAX_EXT_DEGREE).contains(&e) || p >= 1 << 22 {
            return Err(GfError::Unsupported(format!(
                "extension of degree {e} over F_{p}"
            )));
        }
        let prime = PrimeField::new(p);
        loop {
            let mut m: Vec<u64> = (0..e).map(|_| rng.gen_range(0..p)).collect();
            m.push(1);
            if m[0] != 0 && poly::is_irreducible(&prime, &m) {
                return ExtField::with_modulus(p, &m);
            }
        }
    }

    /// Monic modulus coefficients, low to high.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn p(&self) -> u64 {
        self.prime.p()
    }

    /// x mod p for x < 2^63.
    #[inline]
    fn rem(&self, x: u64) -> u64 {
        let p = self.p();
        let qt = ((x as u128 * self.recip as u128) >> 64) as u64;
        let mut r = x - qt * p;
        while r >= p {
            r -= p;
        }
        r
    }

    /// Adds the schoolbook product of `a` and `b` into `t`.
    #[inline]
    fn accumulate(&self, t: &mut [u64; 2 * MAX_EXT_DEGREE], a: &ExtEl, b: &ExtEl) {
        let e = self.e;
        for i in 0..e {
            let ai = a.0[i] as u64;
            if ai == 0 {
                continue;
            }
            for j in 0..e {
                t[i + j] += ai * b.0[j] as u64;
            }
        }
    }

    /// Reduces an accumulated product modulo the field polynomial and p.
    /// p < 2^22, so slots holding a few products of e terms stay far
    /// below 2^63.
    #[inline]
    fn reduce(&self, mut t: [u64; 2 * MAX_EXT_DEGREE]) -> ExtEl {
        let e = self.e;
        for k in (e..2 * e - 1).rev() {
            let c = self.rem(t[k]);
            if c == 0 {
                continue;
            }
            for (j, &nm) in self.neg_tail.iter().enumerate() {
                t[k - e + j] += c * nm;
            }
        }
        let mut out = [0u32; MAX_EXT_DEGREE];
        for i in 0..e {
            out[i] = self.rem(t[i]) as u32;
        }
        ExtEl(out)
    }
}

impl BaseField for ExtField {
    type El = ExtEl;

    fn characteristic(&self) -> u64 {
        self.p()
    }
    fn degree(&self) -> u32 {
        self.e as u32
    }
    fn order(&self) -> u64 {
        self.q
    }
    fn zero(&self) -> ExtEl {
        ExtEl([0; MAX_EXT_DEGREE])
    }
    fn one(&self) -> ExtEl {
        self.from_int(1)
    }
    fn from_int(&self, n: u64) -> ExtEl {
        let mut c = [0; MAX_EXT_DEGREE];
        c[0] = (n % self.p()) as u32;
        ExtEl(c)
    }
    fn add(&self, a: ExtEl, b: ExtEl) -> ExtEl {
        let p = self.p() as u32;
        let mut c = a.0;
        for (x, &y) in c.iter_mut().zip(&b.0).take(self.e) {
            let s = *x + y;
            *x = if s >= p { s - p } else { s };
        }
        ExtEl(c)
    }
    fn sub(&self, a: ExtEl, b: ExtEl) -> ExtEl {
        let p = self.p() as u32;
        let mut c = a.0;
        for (x, &y) in c.iter_mut().zip(&b.0).take(self.e) {
            *x = if *x >= y { *x - y } else { *x + p - y };
        }
        ExtEl(c)
    }
    fn neg(&self, a: ExtEl) -> ExtEl {
        self.sub(self.zero(), a)
    }
    fn mul(&self, a: ExtEl, b: ExtEl) -> ExtEl {
        let mut t = [0u64; 2 * MAX_EXT_DEGREE];
        self.accumulate(&mut t, &a, &b);
        self.reduce(t)
    }
    fn dot3(&self, a: [ExtEl; 3], b: [ExtEl; 3]) -> ExtEl {
        let mut t = [0u64; 2 * MAX_EXT_DEGREE];
        for i in 0..3 {
            self.accumulate(&mut t, &a[i], &b[i]);
        }
        self.reduce(t)
    }
    fn inv(&self, a: ExtEl) -> Option<ExtEl> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, (self.q - 2) as u128))
    }
    fn to_index(&self, a: ExtEl) -> u64 {
        let p = self.p();
        a.0[..self.e]
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * p + c as u64)
    }
    fn from_index(&self, mut i: u64) -> Option<ExtEl> {
        if i >= self.q {
            return None;
        }
        let p = self.p();
        let mut c = [0u32; MAX_EXT_DEGREE];
        for slot in c.iter_mut().take(self.e) {
            *slot = (i % p) as u32;
            i /= p;
        }
        Some(ExtEl(c))
    }
    fn digits(&self, a: ExtEl) -> Vec<u64> {
        a.0[..self.e].iter().map(|&c| c as u64).collect()
    }
    fn from_digits(&self, d: &[u64]) -> Option<ExtEl> {
        if d.len() != self.e || d.iter().any(|&c| c >= self.p()) {
            return None;
        }
        let mut c = [0u32; MAX_EXT_DEGREE];
        for (slot, &v) in c.iter_mut().zip(d) {
            *slot = v as u32;
        }
        Some(ExtEl(c))
    }
}
