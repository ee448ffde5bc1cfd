//! Primality testing for integers below 2^128.
//!
//! Below 3.3e24 the Miller–Rabin witness sets used here are proven to be
//! deterministic. Above that bound a strong Lucas test is added (BPSW).

use super::modarith::{isqrt, Mont128};

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Witness set proven for all n < 2^64 (Jim Sinclair).
const BASES_64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Bases 2..41 are deterministic below this bound (Sorenson–Webster).
const BOUND_41: u128 = 3_317_044_064_679_887_385_961_981;

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = p as u128;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    if n <= u64::MAX as u128 {
        return is_prime_u64(n as u64);
    }
    let mont = Mont128::new(n);
    if !SMALL_PRIMES
        .iter()
        .all(|&b| strong_probable_prime(&mont, b as u128))
    {
        return false;
    }
    if n < BOUND_41 {
        return true;
    }
    strong_lucas(&mont)
}

fn is_prime_u64(n: u64) -> bool {
    let n128 = n as u128;
    let d_s = {
        let m = n - 1;
        let s = m.trailing_zeros();
        (m >> s, s)
    };
    'bases: for &b in &BASES_64 {
        let a = (b % n) as u128;
        if a == 0 {
            continue;
        }
        let mut x = pow_u64(a, d_s.0 as u128, n128);
        if x == 1 || x == n128 - 1 {
            continue;
        }
        for _ in 1..d_s.1 {
            x = x * x % n128;
            if x == n128 - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pow_u64(mut b: u128, mut e: u128, n: u128) -> u128 {
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    acc
}

fn strong_probable_prime(mont: &Mont128, base: u128) -> bool {
    let n = mont.modulus();
    let m = n - 1;
    let s = m.trailing_zeros();
    let d = m >> s;
    let one = mont.one();
    let minus_one = mont.sub(0, one);
    let mut x = mont.pow(mont.to_mont(base), d);
    if x == one || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = mont.mul(x, x);
        if x == minus_one {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n > 0.
pub fn jacobi(a: i128, n: u128) -> i32 {
    debug_assert!(n & 1 == 1);
    let mut a = if a >= 0 {
        (a as u128) % n
    } else {
        let r = a.unsigned_abs() % n;
        if r == 0 {
            0
        } else {
            n - r
        }
    };
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n & 7;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn signed_to_mont(mont: &Mont128, v: i128) -> u128 {
    let n = mont.modulus();
    let r = v.unsigned_abs() % n;
    let r = if v < 0 && r != 0 { n - r } else { r };
    mont.to_mont(r)
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice.
fn strong_lucas(mont: &Mont128) -> bool {
    let n = mont.modulus();
    let root = isqrt(n);
    if root * root == n {
        return false;
    }
    let mut d: i128 = 5;
    loop {
        match jacobi(d, n) {
            -1 => break,
            0 if d.unsigned_abs() != n => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let dm = signed_to_mont(mont, d);
    let qm = signed_to_mont(mont, q);
    let half = |x: u128| -> u128 {
        // x is in Montgomery form; halving commutes with the representation
        if x & 1 == 0 {
            x >> 1
        } else {
            (x >> 1) + (n >> 1) + 1
        }
    };

    let np1 = n.wrapping_add(1);
    // n is odd and < 2^128, so n + 1 only overflows when n = 2^128 - 1, which is composite
    if np1 == 0 {
        return false;
    }
    let s = np1.trailing_zeros();
    let odd = np1 >> s;

    let one = mont.one();
    let mut u = one;
    let mut v = one; // P = 1
    let mut qk = qm;
    let bits = 128 - odd.leading_zeros();
    for i in (0..bits - 1).rev() {
        u = mont.mul(u, v);
        v = mont.sub(mont.mul(v, v), mont.add(qk, qk));
        qk = mont.mul(qk, qk);
        if (odd >> i) & 1 == 1 {
            let nu = half(mont.add(u, v));
            let nv = half(mont.add(mont.mul(dm, u), v));
            u = nu;
            v = nv;
            qk = mont.mul(qk, qm);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = mont.sub(mont.mul(v, v), mont.add(qk, qk));
        qk = mont.mul(qk, qk);
        if v == 0 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u128) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u128;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn named_values() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(4_708_304_701));
        assert!(trial(4_708_304_701));
        assert!(!is_prime(1_440_278_401));
    }

    #[test]
    fn agrees_with_trial_division_small() {
        for n in 0..20_000u128 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn wide_values() {
        // 2^89 - 1 and 2^107 - 1 and 2^127 - 1 are Mersenne primes
        assert!(is_prime((1u128 << 89) - 1));
        assert!(is_prime((1u128 << 107) - 1));
        assert!(is_prime((1u128 << 127) - 1));
        assert!(!is_prime((1u128 << 101) - 1)); // 7432339208719 * 341117531003194129
        let p = 18_446_744_073_709_551_557u128; // largest prime below 2^64
        assert!(is_prime(p));
        assert!(!is_prime(p * 3));
        let below = |mut n: u128| {
            while !is_prime(n) {
                n -= 1;
            }
            n
        };
        let a = below(1 << 62);
        let b = below(a - 1);
        // product of two 62-bit primes: beyond the deterministic MR bound, exercises Lucas
        assert!(!is_prime(a * b));
        assert!(!is_prime(((1u128 << 61) - 1) * ((1u128 << 61) - 1)));
    }

    #[test]
    fn lucas_accepts_primes_above_bound() {
        let mont = Mont128::new((1u128 << 127) - 1);
        assert!(strong_lucas(&mont));
        let mont = Mont128::new((1u128 << 89) - 1);
        assert!(strong_lucas(&mont));
        // strong Lucas pseudoprimes exist but 2^101 - 1 is not one of them
        let mont = Mont128::new((1u128 << 101) - 1);
        assert!(!strong_lucas(&mont));
    }

    #[test]
    fn jacobi_small() {
        assert_eq!(jacobi(2, 7), 1);
        assert_eq!(jacobi(3, 7), -1);
        assert_eq!(jacobi(-1, 7), -1);
        assert_eq!(jacobi(-1, 13), 1);
        assert_eq!(jacobi(14, 7), 0);
    }
}
