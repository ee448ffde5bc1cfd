//! Exact factorization of integers below 2^128: trial division by sieved
//! primes, then Brent's variant of Pollard rho on whatever is left.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::modarith::{gcd, iroot, Mont128};
use super::primality::is_prime;
use super::NumthError;

/// Trial division bound used by [`factorize`].
pub const TRIAL_BOUND: u64 = 1_000_000;

/// Default rho iteration budget (function evaluations, summed over restarts).
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 26;

/// Prime factorization as strictly increasing (prime, exponent) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization::default()
    }

    /// Builds a factorization from arbitrary pairs, merging repeated primes.
    ///
    /// The primes are not re-tested here; use [`Factorization::is_valid`] for that.
    pub fn from_pairs<I: IntoIterator<Item = (u128, u32)>>(pairs: I) -> Self {
        let mut factors: Vec<(u128, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_unstable();
        let mut merged: Vec<(u128, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        Factorization { factors: merged }
    }

    /// Factorization of `a * b`.
    pub fn product(a: &Factorization, b: &Factorization) -> Self {
        Factorization::from_pairs(a.factors.iter().chain(b.factors.iter()).copied())
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The factored value, or `None` if it does not fit in 128 bits.
    pub fn value(&self) -> Option<u128> {
        self.factors
            .iter()
            .try_fold(1u128, |acc, &(p, e)| acc.checked_mul(p.checked_pow(e)?))
    }

    pub fn value_big(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::from(1u32), |acc, &(p, e)| {
                acc * BigUint::from(p).pow(e)
            })
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Euler's totient. Panics if the value overflows 128 bits.
    pub fn euler_phi(&self) -> u128 {
        self.factors.iter().fold(1u128, |acc, &(p, e)| {
            let pk = p.checked_pow(e - 1).expect("totient overflow");
            acc.checked_mul(pk * (p - 1)).expect("totient overflow")
        })
    }

    /// Product of the distinct primes. Panics if it overflows 128 bits.
    pub fn radical(&self) -> u128 {
        self.factors.iter().fold(1u128, |acc, &(p, _)| {
            acc.checked_mul(p).expect("radical overflow")
        })
    }

    /// Exponent of `p` (zero if absent).
    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map_or(0, |i| self.factors[i].1)
    }

    /// Checks ordering, exponents and primality of every entry.
    pub fn is_valid(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].0 < w[1].0)
            && self.factors.iter().all(|&(p, e)| e >= 1 && is_prime(p))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes below [`TRIAL_BOUND`], computed once.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

/// Factorizes `n >= 1` with the default rho budget.
pub fn factorize(n: u128) -> Result<Factorization, NumthError> {
    factorize_with_budget(n, DEFAULT_RHO_BUDGET)
}

pub fn factorize_with_budget(n: u128, rho_budget: u64) -> Result<Factorization, NumthError> {
    if n == 0 {
        return Err(NumthError::Zero);
    }
    let mut pairs = Vec::new();
    let mut rem = n;
    let mut checked_prime = false;
    for (i, &p) in small_primes().iter().enumerate() {
        let p = p as u128;
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            pairs.push((p, e));
            checked_prime = false;
        }
        // a large prime cofactor would otherwise cost a full trial pass
        if (i == 168 || (i > 168 && i % 4096 == 0)) && !checked_prime {
            if is_prime(rem) {
                break;
            }
            checked_prime = true;
        }
    }
    if rem > 1 {
        let mut budget = rho_budget;
        split_composite(rem, &mut budget, &mut pairs)?;
    }
    Ok(Factorization::from_pairs(pairs))
}

fn split_composite(
    n: u128,
    budget: &mut u64,
    out: &mut Vec<(u128, u32)>,
) -> Result<(), NumthError> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push((n, 1));
        return Ok(());
    }
    if let Some((p, e)) = perfect_power(n) {
        let mut inner = Vec::new();
        split_composite(p, budget, &mut inner)?;
        out.extend(inner.into_iter().map(|(q, f)| (q, f * e)));
        return Ok(());
    }
    if n.is_multiple_of(2) {
        let s = n.trailing_zeros();
        out.push((2, s));
        return split_composite(n >> s, budget, out);
    }
    let d = rho_brent(n, budget).ok_or(NumthError::RhoBudgetExhausted { n })?;
    split_composite(d, budget, out)?;
    split_composite(n / d, budget, out)
}

/// Returns `(r, k)` with `r^k = n` and `k >= 2` maximal, if any.
fn perfect_power(n: u128) -> Option<(u128, u32)> {
    let bits = 128 - n.leading_zeros();
    (2..=bits).rev().find_map(|k| {
        let r = iroot(n, k);
        (r > 1 && r.checked_pow(k) == Some(n)).then_some((r, k))
    })
}

/// Finds a nontrivial factor of an odd composite `n`, consuming at most
/// `budget` iterations of `x -> x^2 + c`.
pub fn rho_brent(n: u128, budget: &mut u64) -> Option<u128> {
    let mont = Mont128::new(n);
    const BLOCK: u64 = 128;
    for c in 1u128.. {
        if *budget == 0 {
            return None;
        }
        let cm = mont.to_mont(c);
        let f = |x: u128| mont.add(mont.mul(x, x), cm);
        let mut y = mont.to_mont(2);
        let mut x = y;
        let mut ys = y;
        let mut prod = mont.one();
        let mut g = 1u128;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = BLOCK.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    let diff = x.abs_diff(y);
                    prod = mont.mul(prod, diff);
                }
                g = gcd(prod, n);
                k += steps;
            }
            let spent = 2 * r;
            if *budget < spent {
                *budget = 0;
                if g == 1 {
                    return None;
                }
            } else {
                *budget -= spent;
            }
            r *= 2;
        }
        if g == n {
            // backtrack one step at a time from the last checkpoint
            loop {
                ys = f(ys);
                let diff = x.abs_diff(ys);
                g = gcd(diff, n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != n && g != 1 {
            return Some(g);
        }
    }
    None
}

/// `(p, e)` with `p^e = n` and `p` prime, if `n` is a prime power.
pub fn is_prime_power(n: u128) -> Option<(u128, u32)> {
    if n < 2 {
        return None;
    }
    let bits = 128 - n.leading_zeros();
    (1..=bits).rev().find_map(|k| {
        let r = iroot(n, k);
        (r >= 2 && r.checked_pow(k) == Some(n) && is_prime(r)).then_some((r, k))
    })
}
