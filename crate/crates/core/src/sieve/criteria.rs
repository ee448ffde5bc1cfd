//! The prime sieve criterion and its modified form.
//!
//! For a split rad(q^3 - 1) = kPL put
//!
//!   delta = 1 - 2 sum_{p|P} 1/p,  eps = sum_{p|L} 1/p,  theta = phi(k)/k,
//!
//! and C_q = 2 for even q, 3 for odd q. The modified criterion holds when
//!
//!   theta^2 delta > 2 eps  and
//!   sqrt(q) > C_q (theta^2 4^w(k) (2 w(P) - 1 + 2 delta) + w(L) - eps) / (theta^2 delta - 2 eps).
//!
//! With L = 1 this collapses to delta > 0 and
//! sqrt(q) > C_q 4^w(k) ((2 w(P) - 1)/delta + 2).
//!
//! Verdicts never touch floating point. The square root comparison is done
//! by squaring: with rhs = n/d (d > 0) it holds iff n <= 0 or q d^2 > n^2.
//! Two independent evaluations exist: [`SieveSplit::holds`] works with reduced
//! rationals, while [`SplitEvaluator`] clears denominators once and works in
//! big integers, which is what the scans use.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SieveError;
use crate::numth::Factorization;

/// Which inequality ruled a q out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "PSC")]
    Psc,
    #[serde(rename = "MPSC")]
    Mpsc,
    #[serde(rename = "PSC-partial")]
    PscPartial,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Psc => "PSC",
            Criterion::Mpsc => "MPSC",
            Criterion::PscPartial => "PSC-partial",
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "psc" => Ok(Criterion::Psc),
            "mpsc" => Ok(Criterion::Mpsc),
            "psc-partial" => Ok(Criterion::PscPartial),
            other => Err(format!("unknown criterion {other:?}")),
        }
    }
}

pub fn c_q(q: u64) -> u32 {
    if q.is_multiple_of(2) {
        2
    } else {
        3
    }
}

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A partition of the primes of q^3 - 1 into k, P and L, with the derived
/// sieve quantities held as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveSplit {
    pub k: Vec<u128>,
    pub p: Vec<u128>,
    pub l: Vec<u128>,
    /// Unknown primes (all >= `unknown_bound`) counted in P; zero except on
    /// the partial-factorization path.
    pub unknown_in_p: u32,
    pub unknown_bound: u64,
    pub delta: BigRational,
    pub epsilon: BigRational,
    pub theta: BigRational,
    pub c_q: u32,
}

impl SieveSplit {
    /// Builds a split, checking that `k`, `p`, `l` partition the primes of `fact`.
    pub fn new(
        q: u64,
        fact: &Factorization,
        k: &[u128],
        p: &[u128],
        l: &[u128],
    ) -> Result<Self, SieveError> {
        let mut all: Vec<u128> = k.iter().chain(p).chain(l).copied().collect();
        all.sort_unstable();
        let primes: Vec<u128> = fact.primes().collect();
        if all != primes {
            return Err(SieveError::NotAPartition);
        }
        Ok(Self::from_sets(q, k, p, l, 0, 0))
    }

    pub(crate) fn from_sets(
        q: u64,
        k: &[u128],
        p: &[u128],
        l: &[u128],
        unknown_in_p: u32,
        unknown_bound: u64,
    ) -> Self {
        let sorted = |v: &[u128]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        let two = ratio(2, 1);
        let mut delta = BigRational::one()
            - p.iter()
                .fold(BigRational::zero(), |acc, &x| acc + ratio(1, x) * &two);
        if unknown_in_p > 0 {
            delta -= ratio(2 * unknown_in_p as u64, unknown_bound);
        }
        let epsilon = l
            .iter()
            .fold(BigRational::zero(), |acc, &x| acc + ratio(1, x));
        let theta = k
            .iter()
            .fold(BigRational::one(), |acc, &x| acc * ratio(x - 1, x));
        SieveSplit {
            k: sorted(k),
            p: sorted(p),
            l: sorted(l),
            unknown_in_p,
            unknown_bound,
            delta,
            epsilon,
            theta,
            c_q: c_q(q),
        }
    }

    fn omega_p(&self) -> usize {
        self.p.len() + self.unknown_in_p as usize
    }

    /// `q - sign(rhs) rhs^2` for the modified criterion, or `None` when
    /// theta^2 delta <= 2 eps. Positive exactly when the criterion holds.
    pub fn margin(&self, q: u64) -> Option<BigRational> {
        let theta2 = &self.theta * &self.theta;
        let denom = &theta2 * &self.delta - &self.epsilon * ratio(2, 1);
        if !denom.is_positive() {
            return None;
        }
        let four_k = BigRational::from_integer(BigInt::from(4u32).pow(self.k.len() as u32));
        let numer = &theta2
            * four_k
            * (ratio(2 * self.omega_p() as i64 - 1, 1) + &self.delta * ratio(2, 1))
            + ratio(self.l.len() as i64, 1)
            - &self.epsilon;
        let rhs = ratio(self.c_q, 1) * numer / denom;
        let sq = &rhs * &rhs;
        let q = ratio(q, 1);
        Some(if rhs.is_negative() { q + sq } else { q - sq })
    }

    /// Exact evaluation of the modified criterion by rational arithmetic.
    pub fn holds(&self, q: u64) -> bool {
        self.margin(q).is_some_and(|m| m.is_positive())
    }

    /// Exact evaluation of the simpler criterion (requires `l` empty).
    pub fn holds_psc(&self, q: u64) -> bool {
        debug_assert!(self.l.is_empty());
        if !self.delta.is_positive() {
            return false;
        }
        let four_k = BigRational::from_integer(BigInt::from(4u32).pow(self.k.len() as u32));
        let rhs = ratio(self.c_q, 1)
            * four_k
            * (ratio(2 * self.omega_p() as i64 - 1, 1) / &self.delta + ratio(2, 1));
        rhs.is_negative() || ratio(q, 1) > &rhs * &rhs
    }
}

/// Modified criterion for an explicit split.
pub fn eval_mpsc(q: u64, fact: &Factorization, split: &SieveSplit) -> Result<bool, SieveError> {
    let primes: Vec<u128> = fact.primes().collect();
    let mut all: Vec<u128> = split
        .k
        .iter()
        .chain(&split.p)
        .chain(&split.l)
        .copied()
        .collect();
    all.sort_unstable();
    if all != primes {
        return Err(SieveError::NotAPartition);
    }
    Ok(split.holds(q))
}

/// Simple criterion for `rad(q^3 - 1) = kP`.
pub fn eval_psc(q: u64, fact: &Factorization, k: &[u128], p: &[u128]) -> Result<bool, SieveError> {
    Ok(SieveSplit::new(q, fact, k, p, &[])?.holds_psc(q))
}

/// Integer-only evaluation over a fixed ascending prime list, for scanning
/// many splits of the same q.
pub struct SplitEvaluator {
    q: BigInt,
    c_q2: BigInt,
    primes: Vec<BigInt>,
}

/// Outcome of one split: `None` if the first inequality fails, otherwise
/// the margin `q A^2 - C^2 B^2` over `A^2` (numerator, denominator).
pub type IntMargin = Option<(BigInt, BigInt)>;

impl SplitEvaluator {
    pub fn new(q: u64, primes: &[u128]) -> Self {
        let c = c_q(q);
        SplitEvaluator {
            q: BigInt::from(q),
            c_q2: BigInt::from(c * c),
            primes: primes.iter().map(|&p| BigInt::from(p)).collect(),
        }
    }

    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    /// `(prod, sum of prod/p)` over a slice of primes.
    fn recip_sum(ps: &[BigInt]) -> (BigInt, BigInt) {
        let prod: BigInt = ps.iter().product();
        let sum = ps.iter().map(|p| &prod / p).sum();
        (prod, sum)
    }

    /// Contiguous split: k = first `i` primes, L = last `j`, P = the rest,
    /// plus `extra_p` unknown primes each contributing at most `1/bound`.
    pub fn margin(&self, i: usize, j: usize, extra_p: u32, bound: u64) -> IntMargin {
        let w = self.primes.len();
        debug_assert!(i + j <= w);
        self.margin_sets(
            &self.primes[..i],
            &self.primes[i..w - j],
            &self.primes[w - j..],
            extra_p,
            bound,
        )
    }

    /// Split given by index masks into the prime list (bit set = in k / in L).
    pub fn margin_masks(&self, k_mask: u64, l_mask: u64, extra_p: u32, bound: u64) -> IntMargin {
        debug_assert_eq!(k_mask & l_mask, 0);
        let (mut k, mut p, mut l) = (Vec::new(), Vec::new(), Vec::new());
        for (idx, x) in self.primes.iter().enumerate() {
            let bit = 1u64 << idx;
            if k_mask & bit != 0 {
                k.push(x.clone());
            } else if l_mask & bit != 0 {
                l.push(x.clone());
            } else {
                p.push(x.clone());
            }
        }
        self.margin_sets(&k, &p, &l, extra_p, bound)
    }

    /// All quantities are scaled to the common denominator K^2 D_P D_L X^s so
    /// that the test is A > 0 and (B <= 0 or q A^2 > C^2 B^2) with
    ///   A = theta^2 delta - 2 eps,  B = theta^2 4^w(k) (2 w(P) - 1 + 2 delta) + w(L) - eps.
    fn margin_sets(
        &self,
        k: &[BigInt],
        p: &[BigInt],
        l: &[BigInt],
        extra_p: u32,
        bound: u64,
    ) -> IntMargin {
        // theta = phi_k / kk
        let kk: BigInt = k.iter().product();
        let phi_k: BigInt = k.iter().map(|x| x - 1).product();
        // delta = (dp - 2 np) / dp with the unknown part folded in
        let (mut dp, mut np) = Self::recip_sum(p);
        if extra_p > 0 {
            let x = BigInt::from(bound);
            np = np * &x + &dp * extra_p;
            dp *= x;
        }
        let (dl, nl) = Self::recip_sum(l);
        let omega_p = (p.len() + extra_p as usize) as i64;
        let omega_l = l.len() as i64;

        let k2 = &kk * &kk;
        let phi2 = &phi_k * &phi_k;
        let delta_num = &dp - &np * 2;
        // A * (K^2 dp dl)
        let a: BigInt = &phi2 * &delta_num * &dl - &nl * 2 * &k2 * &dp;
        if a.sign() != Sign::Plus {
            return None;
        }
        let four_k = BigInt::from(4u32).pow(k.len() as u32);
        // B * (K^2 dp dl)
        let b: BigInt =
            &phi2 * four_k * (BigInt::from(2 * omega_p - 1) * &dp + delta_num * 2) * &dl
                + (BigInt::from(omega_l) * &dl - nl) * k2 * dp;
        let a2 = &a * &a;
        let num = if b.sign() == Sign::Minus {
            &self.q * &a2 + &self.c_q2 * &b * &b
        } else {
            &self.q * &a2 - &self.c_q2 * &b * &b
        };
        Some((num, a2))
    }

    pub fn passes(&self, i: usize, j: usize, extra_p: u32, bound: u64) -> bool {
        self.margin(i, j, extra_p, bound)
            .is_some_and(|(n, _)| n.sign() == Sign::Plus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::factorize;

    fn fact_q3(q: u64) -> Factorization {
        let q = q as u128;
        factorize(q * q * q - 1).unwrap()
    }

    #[test]
    fn q7_all_in_k_fails() {
        let f = fact_q3(7);
        let primes: Vec<u128> = f.primes().collect();
        let split = SieveSplit::new(7, &f, &primes, &[], &[]).unwrap();
        assert_eq!(split.delta, BigRational::one());
        assert_eq!(split.epsilon, BigRational::zero());
        assert_eq!(split.theta, ratio(36, 114)); // phi(114)/114
                                                 // rhs = 3 * 4^3 = 192
        assert_eq!(split.margin(7), Some(ratio(7 - 192 * 192, 1)));
        assert!(!eval_mpsc(7, &f, &split).unwrap());
        assert!(!eval_psc(7, &f, &primes, &[]).unwrap());
    }

    #[test]
    fn q2_fails_everywhere() {
        let f = fact_q3(2);
        assert!(!eval_psc(2, &f, &[], &[7]).unwrap());
        assert!(!eval_psc(2, &f, &[7], &[]).unwrap());
    }

    #[test]
    fn partition_is_checked() {
        let f = fact_q3(7);
        assert_eq!(eval_psc(7, &f, &[2], &[3]), Err(SieveError::NotAPartition));
        assert!(SieveSplit::new(7, &f, &[2], &[3, 19], &[5]).is_err());
    }

    #[test]
    fn integer_route_matches_rational_route() {
        for q in [
            2u64,
            3,
            4,
            7,
            8,
            9,
            31,
            211,
            1009,
            65_537,
            1_000_003,
            4_708_304_701,
        ] {
            let f = fact_q3(q);
            let primes: Vec<u128> = f.primes().collect();
            let ev = SplitEvaluator::new(q, &primes);
            let w = primes.len();
            for i in 0..=w {
                for j in 0..=w - i {
                    let split = SieveSplit::from_sets(
                        q,
                        &primes[..i],
                        &primes[i..w - j],
                        &primes[w - j..],
                        0,
                        0,
                    );
                    let fast = ev.margin(i, j, 0, 0);
                    let slow = split.margin(q);
                    assert_eq!(fast.is_some(), slow.is_some(), "q={q} i={i} j={j}");
                    if let (Some((n, d)), Some(m)) = (fast, slow) {
                        assert_eq!(BigRational::new(n, d), m, "q={q} i={i} j={j}");
                    }
                    if j == 0 {
                        assert_eq!(split.holds_psc(q), split.holds(q));
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_primes_fold_into_delta() {
        let q = 10_000_000_019u64;
        let primes = [2u128, 3, 7];
        let ev = SplitEvaluator::new(q, &primes);
        let split = SieveSplit::from_sets(q, &primes[..1], &primes[1..], &[], 2, 1 << 20);
        assert_eq!(
            split.delta,
            BigRational::one() - ratio(2, 3) - ratio(2, 7) - ratio(4, 1 << 20)
        );
        let (n, d) = ev.margin(1, 0, 2, 1 << 20).unwrap();
        assert_eq!(BigRational::new(n, d), split.margin(q).unwrap());
    }
}
