//! Split search over the primes of q^3 - 1 and the partial-factorization path.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

use super::criteria::{Criterion, IntMargin, SieveSplit, SplitEvaluator};
use super::SieveError;
use crate::numth::{Factorization, PartialFactorization};

/// Which splits [`best_split_search_with`] may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    /// Only L = 1.
    PscOnly,
    /// L = 1 first, then every contiguous split with L nontrivial.
    Mpsc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveVerdict {
    pub q: u64,
    pub ruled_out: bool,
    pub winning_split: Option<SieveSplit>,
    /// The criterion that ruled q out, or for survivors the strongest one tried.
    pub criterion: Criterion,
    /// `q - sign(rhs) rhs^2` at the winning split; for survivors the largest
    /// value over the evaluated splits. `None` if no split had a positive
    /// denominator.
    pub margin: Option<BigRational>,
}

impl SieveVerdict {
    /// Re-evaluates the winning split with rational arithmetic.
    pub fn recheck(&self) -> bool {
        match (&self.winning_split, self.ruled_out) {
            (Some(split), true) => match self.criterion {
                Criterion::Mpsc => split.holds(self.q),
                _ => split.l.is_empty() && split.holds_psc(self.q) && split.holds(self.q),
            },
            (None, false) => true,
            _ => false,
        }
    }
}

fn better(a: &IntMargin, best: &Option<(BigInt, BigInt)>) -> bool {
    match (a, best) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some((n1, d1)), Some((n2, d2))) => n1 * d2 > n2 * d1,
    }
}

fn to_rational(m: Option<(BigInt, BigInt)>) -> Option<BigRational> {
    m.map(|(n, d)| BigRational::new(n, d))
}

/// Full contiguous search: PSC splits first, then the modified criterion.
pub fn best_split_search(q: u64, fact: &Factorization) -> SieveVerdict {
    best_split_search_with(q, fact, SplitMode::Mpsc)
}

pub fn best_split_search_with(q: u64, fact: &Factorization, mode: SplitMode) -> SieveVerdict {
    let primes: Vec<u128> = fact.primes().collect();
    let ev = SplitEvaluator::new(q, &primes);
    let w = primes.len();
    let mut best: Option<(BigInt, BigInt)> = None;

    let try_split =
        |i: usize, j: usize, best: &mut Option<(BigInt, BigInt)>| -> Option<BigRational> {
            let m = ev.margin(i, j, 0, 0);
            if let Some((n, d)) = &m {
                if n.sign() == Sign::Plus {
                    return Some(BigRational::new(n.clone(), d.clone()));
                }
            }
            if better(&m, best) {
                *best = m;
            }
            None
        };
    let win = |i: usize, j: usize, margin: BigRational, criterion: Criterion| SieveVerdict {
        q,
        ruled_out: true,
        winning_split: Some(SieveSplit::from_sets(
            q,
            &primes[..i],
            &primes[i..w - j],
            &primes[w - j..],
            0,
            0,
        )),
        criterion,
        margin: Some(margin),
    };

    for i in 0..=w {
        if let Some(m) = try_split(i, 0, &mut best) {
            return win(i, 0, m, Criterion::Psc);
        }
    }
    if mode == SplitMode::Mpsc {
        for i in 0..=w {
            for j in 1..=w - i {
                if let Some(m) = try_split(i, j, &mut best) {
                    return win(i, j, m, Criterion::Mpsc);
                }
            }
        }
    }
    SieveVerdict {
        q,
        ruled_out: false,
        winning_split: None,
        criterion: match mode {
            SplitMode::PscOnly => Criterion::Psc,
            SplitMode::Mpsc => Criterion::Mpsc,
        },
        margin: to_rational(best),
    }
}

/// PSC with only a partial factorization of q^2 + q + 1.
pub fn eval_psc_partial(
    q: u64,
    fact_qm1: &Factorization,
    pf: &PartialFactorization,
) -> Result<bool, SieveError> {
    Ok(psc_partial_verdict(q, fact_qm1, pf)?.ruled_out)
}

/// As [`eval_psc_partial`], returning the verdict with its split.
pub fn psc_partial_verdict(
    q: u64,
    fact_qm1: &Factorization,
    pf: &PartialFactorization,
) -> Result<SieveVerdict, SieveError> {
    let qq = q as u128;
    if fact_qm1.value() != Some(qq - 1) || pf.m != qq * qq + qq + 1 {
        return Err(SieveError::Mismatch(q));
    }
    pf.check()?;
    Ok(psc_partial_unchecked(q, fact_qm1, pf))
}

/// For a fixed size of k the PSC right-hand side only depends on delta, which
/// is largest when P holds the largest primes. Hence trying k = the i smallest
/// known primes for each i decides the same as trying every subset.
pub(crate) fn psc_partial_unchecked(
    q: u64,
    fact_qm1: &Factorization,
    pf: &PartialFactorization,
) -> SieveVerdict {
    if let Some(full) = pf.full() {
        let fact = Factorization::product(fact_qm1, &full);
        let mut v = best_split_search_with(q, &fact, SplitMode::PscOnly);
        if v.ruled_out {
            v.criterion = Criterion::PscPartial;
        }
        return v;
    }
    let s = pf.unknown_prime_bound();
    let known = Factorization::product(fact_qm1, &pf.smooth);
    let primes: Vec<u128> = known.primes().collect();
    let ev = SplitEvaluator::new(q, &primes);
    let w = primes.len();
    let mut best: Option<(BigInt, BigInt)> = None;
    for i in 0..=w {
        let m = ev.margin(i, 0, s, pf.bound);
        if let Some((n, d)) = &m {
            if n.sign() == Sign::Plus {
                return SieveVerdict {
                    q,
                    ruled_out: true,
                    winning_split: Some(SieveSplit::from_sets(
                        q,
                        &primes[..i],
                        &primes[i..],
                        &[],
                        s,
                        pf.bound,
                    )),
                    criterion: Criterion::PscPartial,
                    margin: Some(BigRational::new(n.clone(), d.clone())),
                };
            }
        }
        if better(&m, &best) {
            best = m;
        }
    }
    SieveVerdict {
        q,
        ruled_out: false,
        winning_split: None,
        criterion: Criterion::PscPartial,
        margin: to_rational(best),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::{factorize, is_prime, DEFAULT_SMOOTH_BOUND};

    fn fact_q3(q: u64) -> Factorization {
        let a = factorize(q as u128 - 1).unwrap();
        let q = q as u128;
        Factorization::product(&a, &factorize(q * q + q + 1).unwrap())
    }

    fn every_split_psc(q: u64, fact: &Factorization) -> bool {
        let primes: Vec<u128> = fact.primes().collect();
        let ev = SplitEvaluator::new(q, &primes);
        (0u64..1 << primes.len()).any(|mask| {
            ev.margin_masks(mask, 0, 0, 0)
                .is_some_and(|(n, _)| n.sign() == Sign::Plus)
        })
    }

    #[test]
    fn named_survivors() {
        for q in [4_708_304_701u64, 1_440_278_401] {
            let v = best_split_search(q, &fact_q3(q));
            assert!(!v.ruled_out, "q={q}");
            assert!(v.margin.is_some());
        }
    }

    #[test]
    fn tiny_q_survive() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 211] {
            let v = best_split_search(q, &fact_q3(q));
            assert!(!v.ruled_out, "q={q}");
            assert!(v.recheck());
        }
    }

    #[test]
    fn winning_splits_recheck() {
        let mut ruled = 0;
        for q in (100_000u64..101_000).filter(|&q| is_prime(q as u128)) {
            let v = best_split_search(q, &fact_q3(q));
            assert!(v.recheck(), "q={q}");
            if v.ruled_out {
                ruled += 1;
                assert!(v.margin.as_ref().unwrap() > &BigRational::from_integer(0.into()));
            }
        }
        assert!(ruled > 0);
    }

    #[test]
    fn psc_contiguous_equals_all_subsets() {
        for q in (2u64..3000).filter(|&q| crate::numth::is_prime_power(q as u128).is_some()) {
            let f = fact_q3(q);
            let v = best_split_search_with(q, &f, SplitMode::PscOnly);
            assert_eq!(v.ruled_out, every_split_psc(q, &f), "q={q}");
        }
    }

    #[test]
    fn first_small_omega_prime_above_million_passes() {
        let q = (1_000_001u64..)
            .filter(|&q| is_prime(q as u128))
            .find(|&q| fact_q3(q).omega() <= 5)
            .unwrap();
        let f = fact_q3(q);
        let primes: Vec<u128> = f.primes().collect();
        assert!(crate::sieve::eval_psc(q, &f, &primes[..1], &primes[1..]).unwrap());
    }

    #[test]
    fn partial_with_unit_cofactor_matches_full() {
        let mut seen = 0;
        for q in (10_000_000u64..10_020_000).filter(|&q| is_prime(q as u128)) {
            let qq = q as u128;
            let pf =
                PartialFactorization::by_trial_division(qq * qq + qq + 1, DEFAULT_SMOOTH_BOUND);
            if !pf.is_resolved() {
                continue;
            }
            seen += 1;
            let qm1 = factorize(qq - 1).unwrap();
            let full = best_split_search_with(q, &fact_q3(q), SplitMode::PscOnly);
            assert_eq!(
                eval_psc_partial(q, &qm1, &pf).unwrap(),
                full.ruled_out,
                "q={q}"
            );
        }
        assert!(seen > 0);
    }

    #[test]
    fn partial_rejects_bad_input() {
        let q = 10_000_000_019u64;
        let qq = q as u128;
        let qm1 = factorize(qq - 1).unwrap();
        let mut pf =
            PartialFactorization::by_trial_division(qq * qq + qq + 1, DEFAULT_SMOOTH_BOUND);
        assert!(eval_psc_partial(q, &qm1, &pf).is_ok());
        pf.smooth = Factorization::one();
        pf.u = pf.m;
        assert!(matches!(
            eval_psc_partial(q, &qm1, &pf),
            Err(SieveError::Numth(_))
        ));
        assert!(matches!(
            eval_psc_partial(q + 2, &qm1, &pf),
            Err(SieveError::Mismatch(_))
        ));
    }

    #[test]
    fn partial_is_sound_near_ten_to_ten() {
        let mut checked = 0;
        for q in (10_000_000_000u64..)
            .filter(|&q| is_prime(q as u128))
            .take(40)
        {
            let qq = q as u128;
            let qm1 = factorize(qq - 1).unwrap();
            let pf =
                PartialFactorization::by_trial_division(qq * qq + qq + 1, DEFAULT_SMOOTH_BOUND);
            if eval_psc_partial(q, &qm1, &pf).unwrap() {
                checked += 1;
                assert!(best_split_search_with(q, &fact_q3(q), SplitMode::PscOnly).ruled_out);
            }
        }
        assert!(checked > 0);
    }
}
