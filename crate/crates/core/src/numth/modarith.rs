//! Modular arithmetic on machine integers.
//!
//! Two reducers live here. [`Barrett`] handles moduli below 2^63 with a
//! precomputed reciprocal and is what the prime-field code uses. [`Mont128`]
//! handles any odd modulus below 2^128 and backs primality testing and rho on
//! values such as q^2+q+1, which overflow 64 bits once q passes ~4.3e9.

/// Full 128x128 -> 256 bit product, returned as (hi, lo).
#[inline]
pub fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const M: u128 = u64::MAX as u128;
    let (a0, a1) = (a & M, a >> 64);
    let (b0, b1) = (b & M, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & M) + (p10 & M);
    let lo = (p00 & M) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Reduction modulo `m < 2^63` using `floor((2^128 - 1) / m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Barrett {
    m: u64,
    recip: u128,
}

impl Barrett {
    pub fn new(m: u64) -> Self {
        assert!(
            (1..(1 << 63)).contains(&m),
            "Barrett modulus out of range: {m}"
        );
        Barrett {
            m,
            recip: u128::MAX / m as u128,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Reduces `x < 2^126`.
    #[inline]
    pub fn reduce(&self, x: u128) -> u64 {
        let (q, _) = mul_wide(x, self.recip);
        let m = self.m as u128;
        let mut r = x.wrapping_sub(q * m);
        while r >= m {
            r -= m;
        }
        r as u64
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u128) -> u64 {
        let mut acc = 1 % self.m;
        base %= self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// Montgomery arithmetic modulo an odd `n` with R = 2^128.
#[derive(Clone, Copy, Debug)]
pub struct Mont128 {
    n: u128,
    neg_inv: u128,
    r1: u128,
    r2: u128,
}

#[inline]
fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    let (s, c) = a.overflowing_add(b);
    if c || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

impl Mont128 {
    pub fn new(n: u128) -> Self {
        assert!(
            n & 1 == 1 && n > 1,
            "Montgomery modulus must be odd and > 1"
        );
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let r1 = (u128::MAX % n + 1) % n;
        let mut r2 = r1;
        for _ in 0..128 {
            r2 = add_mod(r2, r2, n);
        }
        Mont128 {
            n,
            neg_inv: inv.wrapping_neg(),
            r1,
            r2,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.n
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, _) = mul_wide(m, self.n);
        let carry = (lo != 0) as u128;
        let (t, c1) = hi.overflowing_add(mh);
        let (t, c2) = t.overflowing_add(carry);
        if c1 || c2 || t >= self.n {
            t.wrapping_sub(self.n)
        } else {
            t
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u128) -> u128 {
        self.redc(0, a)
    }

    #[inline]
    pub fn one(&self) -> u128 {
        self.r1
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        add_mod(a, b, self.n)
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.n)
        }
    }

    /// `base` and the result are in Montgomery form.
    pub fn pow(&self, mut base: u128, mut exp: u128) -> u128 {
        let mut acc = self.r1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// `a * b mod n` for arbitrary `n >= 1` below 2^128.
pub fn mul_mod(a: u128, b: u128, n: u128) -> u128 {
    if n <= u64::MAX as u128 {
        return (a % n) * (b % n) % n;
    }
    // shift-and-add; only used off the hot path for even wide moduli
    let (mut a, mut b) = (a % n, b % n);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, n);
        }
        a = add_mod(a, a, n);
        b >>= 1;
    }
    acc
}

pub fn pow_mod(mut base: u128, mut exp: u128, n: u128) -> u128 {
    if n == 1 {
        return 0;
    }
    if n & 1 == 1 && n > u64::MAX as u128 {
        let mont = Mont128::new(n);
        return mont.from_mont(mont.pow(mont.to_mont(base), exp));
    }
    let mut acc = 1u128;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `n`, if `gcd(a, n) = 1`.
pub fn inv_mod(a: u128, n: u128) -> Option<u128> {
    if n == 1 {
        return Some(0);
    }
    // extended Euclid on signed magnitudes tracked via the sign of the coefficient
    let (mut r0, mut r1) = (n, a % n);
    let (mut s0, mut s1): (u128, u128) = (0, 1);
    let (mut neg0, mut neg1) = (false, false);
    while r1 != 0 {
        let q = r0 / r1;
        let r2 = r0 - q * r1;
        // s2 = s0 - q*s1 with signs
        let qs1 = mul_mod(q, s1, n);
        let (s2, neg2) = if neg0 == neg1 {
            if s0 >= qs1 {
                (s0 - qs1, neg0)
            } else {
                (qs1 - s0, !neg0)
            }
        } else {
            (add_mod(s0, qs1, n), neg0)
        };
        r0 = r1;
        r1 = r2;
        s0 = s1;
        neg0 = neg1;
        s1 = s2;
        neg1 = neg2;
    }
    if r0 != 1 {
        return None;
    }
    let s = s0 % n;
    Some(if neg0 && s != 0 { n - s } else { s })
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Floor of the `k`-th root.
pub fn iroot(n: u128, k: u32) -> u128 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut x = (n as f64).powf(1.0 / k as f64) as u128;
    let pow_le = |x: u128| x.checked_pow(k).is_some_and(|v| v <= n);
    while x > 0 && !pow_le(x) {
        x -= 1;
    }
    while pow_le(x + 1) {
        x += 1;
    }
    x
}
