//! Sliding-window sieve producing, for every prime q in a range, the full
//! factorization of q-1 and the X-smooth part of q^2+q+1.

use serde::{Deserialize, Serialize};

use super::factor::{primes_up_to, Factorization};
use super::modarith::{isqrt, Barrett};
use super::primality::is_prime;
use super::NumthError;

/// Default smoothness bound X = 2^20.
pub const DEFAULT_SMOOTH_BOUND: u64 = 1 << 20;

/// Default number of consecutive integers sieved per window.
pub const DEFAULT_WINDOW: u64 = 1 << 20;

/// Known small-prime part of `m` plus the unfactored cofactor `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFactorization {
    pub m: u128,
    /// Exactly the primes below `bound`, with their full multiplicity in `m`.
    pub smooth: Factorization,
    pub u: u128,
    pub bound: u64,
}

impl PartialFactorization {
    /// Computes the partial factorization by trial division. Slow; intended
    /// for single values and as a check on the windowed path.
    pub fn by_trial_division(m: u128, bound: u64) -> Self {
        let mut u = m;
        let mut pairs = Vec::new();
        for p in primes_up_to(bound.saturating_sub(1)) {
            let p = p as u128;
            if u.is_multiple_of(p) {
                let mut e = 0;
                while u.is_multiple_of(p) {
                    u /= p;
                    e += 1;
                }
                pairs.push((p, e));
            }
        }
        PartialFactorization {
            m,
            smooth: Factorization::from_pairs(pairs),
            u,
            bound,
        }
    }

    /// `u < X^2`, in which case `u` is 1 or prime.
    pub fn is_resolved(&self) -> bool {
        let x = self.bound as u128;
        x.checked_mul(x).is_none_or(|x2| self.u < x2)
    }

    /// `floor(log_X u)`, computed exactly.
    pub fn unknown_prime_bound(&self) -> u32 {
        let x = self.bound as u128;
        let mut s = 0;
        let mut acc = 1u128;
        while let Some(next) = acc.checked_mul(x) {
            if next > self.u {
                break;
            }
            acc = next;
            s += 1;
        }
        s
    }

    /// Full factorization of `m` when the cofactor is resolved.
    pub fn full(&self) -> Option<Factorization> {
        if !self.is_resolved() {
            return None;
        }
        if self.u == 1 {
            return Some(self.smooth.clone());
        }
        debug_assert!(is_prime(self.u));
        Some(Factorization::product(
            &self.smooth,
            &Factorization::from_pairs([(self.u, 1)]),
        ))
    }

    /// Verifies every structural invariant, including that no prime below
    /// the bound divides `u` (by trial division).
    pub fn check(&self) -> Result<(), NumthError> {
        let product = self.smooth.value().and_then(|v| v.checked_mul(self.u));
        if product != Some(self.m) {
            return Err(NumthError::InvalidPartial(
                "smooth part times u differs from m".into(),
            ));
        }
        if self.smooth.primes().any(|p| p >= self.bound as u128) || !self.smooth.is_valid() {
            return Err(NumthError::InvalidPartial(
                "smooth part has a prime >= X".into(),
            ));
        }
        if let Some(p) = smallest_factor_below(self.u, self.bound) {
            return Err(NumthError::InvalidPartial(format!(
                "cofactor {} has the factor {p} below X",
                self.u
            )));
        }
        if self.is_resolved() && self.u != 1 && !is_prime(self.u) {
            return Err(NumthError::InvalidPartial(
                "resolved cofactor is composite".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest prime `p < bound` dividing `n`, if any.
pub fn smallest_factor_below(n: u128, bound: u64) -> Option<u64> {
    primes_up_to(bound.saturating_sub(1))
        .into_iter()
        .find(|&p| n.is_multiple_of(p as u128))
}

/// One prime q with its factorization data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeRecord {
    pub q: u64,
    pub q_minus_one: Factorization,
    pub norm_part: PartialFactorization,
}

/// Precomputed data shared by all windows of a scan.
#[derive(Clone, Debug)]
pub struct WindowSieve {
    bound: u64,
    /// Primes up to `max(bound, sqrt(limit))`.
    primes: Vec<u64>,
    /// For each prime `p < bound` with `p ≡ 1 (mod 3)` or `p = 3`: roots of x^2+x+1.
    cube_roots: Vec<(u64, [u64; 2], usize)>,
}

impl WindowSieve {
    /// Prepares to sieve any window whose values do not exceed `limit`.
    pub fn new(limit: u64, bound: u64) -> Self {
        assert!(bound >= 2, "smoothness bound must be at least 2");
        let top = (isqrt(limit as u128) as u64 + 1).max(bound);
        let primes = primes_up_to(top);
        let cube_roots = primes
            .iter()
            .copied()
            .take_while(|&p| p < bound)
            .filter_map(|p| {
                if p == 3 {
                    Some((3, [1, 1], 1))
                } else if p % 3 == 1 {
                    let w = primitive_cube_root(p);
                    let w2 = (w as u128 * w as u128 % p as u128) as u64;
                    Some((p, [w, w2], 2))
                } else {
                    None
                }
            })
            .collect();
        WindowSieve {
            bound,
            primes,
            cube_roots,
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Sieves the half-open window `[lo, hi)` and returns records for its primes.
    pub fn window(&self, lo: u64, hi: u64) -> Vec<PrimeRecord> {
        if hi <= lo {
            return Vec::new();
        }
        let width = (hi - lo) as usize;
        let mut is_p = vec![true; width];
        let below_two = width.min(2usize.saturating_sub(lo as usize));
        is_p[..below_two].fill(false);
        for &p in &self.primes {
            if p.saturating_mul(p) >= hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut n = start;
            while n < hi {
                is_p[(n - lo) as usize] = false;
                n += p;
            }
        }

        let mut slot = vec![u32::MAX; width];
        let mut qs = Vec::new();
        for (i, &flag) in is_p.iter().enumerate() {
            if flag {
                slot[i] = qs.len() as u32;
                qs.push(lo + i as u64);
            }
        }
        if qs.is_empty() {
            return Vec::new();
        }

        // q - 1: every prime factor except possibly one exceeds sqrt(hi)
        let mut qm1_rem: Vec<u64> = qs.iter().map(|&q| q - 1).collect();
        let mut qm1_fac: Vec<Vec<(u128, u32)>> = vec![Vec::new(); qs.len()];
        let root = isqrt(hi as u128) as u64;
        for &p in &self.primes {
            if p > root {
                break;
            }
            // n ≡ 1 (mod p)
            let mut n = first_at_least(lo, 1 % p, p);
            while n < hi {
                let s = slot[(n - lo) as usize];
                if s != u32::MAX {
                    let r = &mut qm1_rem[s as usize];
                    let mut e = 0;
                    while (*r).is_multiple_of(p) && *r > 0 {
                        *r /= p;
                        e += 1;
                    }
                    if e > 0 {
                        qm1_fac[s as usize].push((p as u128, e));
                    }
                }
                n += p;
            }
        }

        // q^2 + q + 1 over primes below the bound
        let mut m_rem: Vec<u128> = qs.iter().map(|&q| norm_value(q)).collect();
        let mut m_fac: Vec<Vec<(u128, u32)>> = vec![Vec::new(); qs.len()];
        for &(p, roots, count) in &self.cube_roots {
            for &r in &roots[..count] {
                let mut n = first_at_least(lo, r, p);
                while n < hi {
                    let s = slot[(n - lo) as usize];
                    if s != u32::MAX {
                        let v = &mut m_rem[s as usize];
                        let mut e = 0;
                        while (*v).is_multiple_of(p as u128) {
                            *v /= p as u128;
                            e += 1;
                        }
                        debug_assert!(e > 0);
                        m_fac[s as usize].push((p as u128, e));
                    }
                    n += p;
                }
            }
        }

        qs.into_iter()
            .enumerate()
            .map(|(i, q)| {
                let mut pairs = std::mem::take(&mut qm1_fac[i]);
                if qm1_rem[i] > 1 {
                    pairs.push((qm1_rem[i] as u128, 1));
                }
                PrimeRecord {
                    q,
                    q_minus_one: Factorization::from_pairs(pairs),
                    norm_part: PartialFactorization {
                        m: norm_value(q),
                        smooth: Factorization::from_pairs(std::mem::take(&mut m_fac[i])),
                        u: m_rem[i],
                        bound: self.bound,
                    },
                }
            })
            .collect()
    }
}

/// q^2 + q + 1.
pub fn norm_value(q: u64) -> u128 {
    let q = q as u128;
    q * q + q + 1
}

fn first_at_least(lo: u64, residue: u64, p: u64) -> u64 {
    let r = lo % p;
    if r <= residue {
        lo + (residue - r)
    } else {
        lo + (p - r) + residue
    }
}

fn primitive_cube_root(p: u64) -> u64 {
    let red = Barrett::new(p);
    (2..p)
        .map(|h| red.pow(h, ((p - 1) / 3) as u128))
        .find(|&w| w != 1)
        .expect("p ≡ 1 mod 3 has a primitive cube root of unity")
}

/// Iterator over the primes of `[from, to]` with their factorization data,
/// sieving `window` values at a time.
pub struct WindowedPartialFactor {
    sieve: WindowSieve,
    next_lo: u64,
    end: u64,
    window: u64,
    buffer: std::vec::IntoIter<PrimeRecord>,
}

impl Iterator for WindowedPartialFactor {
    type Item = PrimeRecord;

    fn next(&mut self) -> Option<PrimeRecord> {
        loop {
            if let Some(r) = self.buffer.next() {
                return Some(r);
            }
            if self.next_lo >= self.end {
                return None;
            }
            let hi = self.next_lo.saturating_add(self.window).min(self.end);
            self.buffer = self.sieve.window(self.next_lo, hi).into_iter();
            self.next_lo = hi;
        }
    }
}

/// Streams [`PrimeRecord`]s for every prime in the inclusive range `[from, to]`.
pub fn windowed_partial_factor(from: u64, to: u64, bound: u64) -> WindowedPartialFactor {
    windowed_partial_factor_with_window(from, to, bound, DEFAULT_WINDOW)
}

pub fn windowed_partial_factor_with_window(
    from: u64,
    to: u64,
    bound: u64,
    window: u64,
) -> WindowedPartialFactor {
    let end = to.saturating_add(1).max(from);
    WindowedPartialFactor {
        sieve: WindowSieve::new(to, bound),
        next_lo: from,
        end,
        window: window.max(1),
        buffer: Vec::new().into_iter(),
    }
}
