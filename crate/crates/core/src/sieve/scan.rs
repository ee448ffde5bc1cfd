//! Range scans over prime powers, window by window.

use rayon::prelude::*;

use super::criteria::Criterion;
use super::splits::{best_split_search_with, psc_partial_unchecked, SieveVerdict, SplitMode};
use super::SieveError;
use crate::numth::modarith::isqrt;
use crate::numth::{
    factorize, primes_up_to, Factorization, PartialFactorization, PrimeRecord, WindowSieve,
    DEFAULT_SMOOTH_BOUND, DEFAULT_WINDOW,
};

/// Largest q a scan accepts.
pub const MAX_SCAN_Q: u64 = 8_000_000_000_000;

/// Primes at or above this use the partial path by default.
pub const DEFAULT_CROSSOVER: u64 = 10_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub criterion: Criterion,
    pub smooth_bound: u64,
    pub crossover: u64,
    pub window: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            criterion: Criterion::Mpsc,
            smooth_bound: DEFAULT_SMOOTH_BOUND,
            crossover: DEFAULT_CROSSOVER,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Factorization data behind a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorData {
    /// Complete factorization of q^3 - 1.
    Full(Factorization),
    /// q - 1 in full, q^2 + q + 1 only up to its rough cofactor.
    Partial {
        q_minus_one: Factorization,
        norm_part: PartialFactorization,
    },
}

impl FactorData {
    /// Known prime factors with exponents, ascending.
    pub fn known(&self) -> Factorization {
        match self {
            FactorData::Full(f) => f.clone(),
            FactorData::Partial {
                q_minus_one,
                norm_part,
            } => Factorization::product(q_minus_one, &norm_part.smooth),
        }
    }

    /// The unfactored cofactor, 1 when the factorization is complete.
    pub fn unfactored(&self) -> u128 {
        match self {
            FactorData::Full(_) => 1,
            FactorData::Partial { norm_part, .. } => norm_part.u,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    pub q: u64,
    pub p: u64,
    pub e: u32,
    pub verdict: SieveVerdict,
    pub factors: FactorData,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanSummary {
    pub prime_powers: u64,
    pub composite: u64,
    pub survivors: u64,
    pub composite_survivors: u64,
    pub ruled_psc: u64,
    pub ruled_mpsc: u64,
    pub ruled_psc_partial: u64,
}

impl ScanSummary {
    fn add(&mut self, r: &ScanRecord) {
        self.prime_powers += 1;
        let composite = r.e > 1;
        self.composite += composite as u64;
        if !r.verdict.ruled_out {
            self.survivors += 1;
            self.composite_survivors += composite as u64;
            return;
        }
        match r.verdict.criterion {
            Criterion::Psc => self.ruled_psc += 1,
            Criterion::Mpsc => self.ruled_mpsc += 1,
            Criterion::PscPartial => self.ruled_psc_partial += 1,
        }
    }

    /// Prime powers not ruled out by the simple criterion alone.
    pub fn psc_survivors(&self) -> u64 {
        self.survivors + self.ruled_mpsc
    }
}

enum Item {
    Prime(PrimeRecord),
    Power { q: u64, p: u64, e: u32 },
}

impl Item {
    fn q(&self) -> u64 {
        match self {
            Item::Prime(r) => r.q,
            Item::Power { q, .. } => *q,
        }
    }
}

fn full_norm(pf: &PartialFactorization) -> Result<Factorization, SieveError> {
    if let Some(f) = pf.full() {
        return Ok(f);
    }
    Ok(Factorization::product(&pf.smooth, &factorize(pf.u)?))
}

fn mode_of(c: Criterion) -> SplitMode {
    match c {
        Criterion::Psc => SplitMode::PscOnly,
        Criterion::Mpsc | Criterion::PscPartial => SplitMode::Mpsc,
    }
}

/// Verdict and factor data for one prime power.
fn evaluate(item: Item, cfg: &ScanConfig) -> Result<ScanRecord, SieveError> {
    let mode = mode_of(cfg.criterion);
    match item {
        Item::Prime(rec) => {
            let q = rec.q;
            if cfg.criterion == Criterion::PscPartial && q >= cfg.crossover {
                let v = psc_partial_unchecked(q, &rec.q_minus_one, &rec.norm_part);
                if v.ruled_out {
                    return Ok(ScanRecord {
                        q,
                        p: q,
                        e: 1,
                        verdict: v,
                        factors: FactorData::Partial {
                            q_minus_one: rec.q_minus_one,
                            norm_part: rec.norm_part,
                        },
                    });
                }
                log::debug!("q={q}: partial path inconclusive, factoring fully");
            }
            let fact = Factorization::product(&rec.q_minus_one, &full_norm(&rec.norm_part)?);
            Ok(ScanRecord {
                q,
                p: q,
                e: 1,
                verdict: best_split_search_with(q, &fact, mode),
                factors: FactorData::Full(fact),
            })
        }
        Item::Power { q, p, e } => {
            let qq = q as u128;
            let fact = Factorization::product(&factorize(qq - 1)?, &factorize(qq * qq + qq + 1)?);
            Ok(ScanRecord {
                q,
                p,
                e,
                verdict: best_split_search_with(q, &fact, mode),
                factors: FactorData::Full(fact),
            })
        }
    }
}

/// Prime powers p^e with e >= 2 in `[from, to]`, ascending.
fn composite_prime_powers(from: u64, to: u64) -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for p in primes_up_to(isqrt(to as u128) as u64) {
        let mut q = p * p;
        let mut e = 2;
        while q <= to {
            if q >= from {
                out.push((q, p, e));
            }
            match q.checked_mul(p) {
                Some(n) => q = n,
                None => break,
            }
            e += 1;
        }
    }
    out.sort_unstable();
    out
}

/// Evaluates every prime power in `[from, to]`, passing records to `sink` in
/// ascending order. Windows are evaluated in parallel; the output does not
/// depend on the number of threads.
pub fn scan_range(
    from: u64,
    to: u64,
    cfg: &ScanConfig,
    mut sink: impl FnMut(ScanRecord),
) -> Result<ScanSummary, SieveError> {
    let from = from.max(2);
    if to > MAX_SCAN_Q {
        return Err(SieveError::Range { from, to });
    }
    let mut summary = ScanSummary::default();
    if from > to {
        return Ok(summary);
    }
    let sieve = WindowSieve::new(to, cfg.smooth_bound);
    let powers = composite_prime_powers(from, to);
    let mut pi = 0;
    let window = cfg.window.max(1);
    let mut lo = from;
    while lo <= to {
        let hi = lo.saturating_add(window).min(to + 1);
        let mut items: Vec<Item> = sieve.window(lo, hi).into_iter().map(Item::Prime).collect();
        while pi < powers.len() && powers[pi].0 < hi {
            let (q, p, e) = powers[pi];
            items.push(Item::Power { q, p, e });
            pi += 1;
        }
        items.sort_by_key(Item::q);
        let records: Vec<Result<ScanRecord, SieveError>> =
            items.into_par_iter().map(|it| evaluate(it, cfg)).collect();
        for r in records {
            let r = r?;
            summary.add(&r);
            sink(r);
        }
        lo = hi;
    }
    Ok(summary)
}

/// Collects [`scan_range`] into a vector.
pub fn scan_range_vec(from: u64, to: u64, cfg: &ScanConfig) -> Result<Vec<ScanRecord>, SieveError> {
    let mut out = Vec::new();
    scan_range(from, to, cfg, |r| out.push(r))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::is_prime_power;

    #[test]
    fn covers_every_prime_power_in_order() {
        let cfg = ScanConfig {
            window: 97,
            ..ScanConfig::default()
        };
        let recs = scan_range_vec(2, 3000, &cfg).unwrap();
        let expect: Vec<u64> = (2..=3000)
            .filter(|&q| is_prime_power(q as u128).is_some())
            .collect();
        assert_eq!(recs.iter().map(|r| r.q).collect::<Vec<_>>(), expect);
        for r in &recs {
            assert_eq!((r.p as u128).pow(r.e), r.q as u128);
            let FactorData::Full(f) = &r.factors else {
                panic!()
            };
            let q = r.q as u128;
            assert_eq!(f.value(), Some(q * q * q - 1));
        }
    }

    #[test]
    fn small_range_survivors() {
        // only 128 = 2^7 falls, via k = P = 1, L = 7 * 127 * 337
        let recs = scan_range_vec(2, 211, &ScanConfig::default()).unwrap();
        let ruled: Vec<u64> = recs
            .iter()
            .filter(|r| r.verdict.ruled_out)
            .map(|r| r.q)
            .collect();
        assert_eq!(ruled, vec![128]);
        let split = recs
            .iter()
            .find(|r| r.q == 128)
            .unwrap()
            .verdict
            .winning_split
            .clone()
            .unwrap();
        assert!(split.k.is_empty() && split.p.is_empty());
        assert_eq!(split.l, vec![7, 127, 337]);
        let psc = ScanConfig {
            criterion: Criterion::Psc,
            ..ScanConfig::default()
        };
        assert!(scan_range_vec(2, 211, &psc)
            .unwrap()
            .iter()
            .all(|r| !r.verdict.ruled_out));
    }

    #[test]
    fn window_size_does_not_change_output() {
        let a = scan_range_vec(5000, 20000, &ScanConfig::default()).unwrap();
        let cfg = ScanConfig {
            window: 1234,
            ..ScanConfig::default()
        };
        assert_eq!(a, scan_range_vec(5000, 20000, &cfg).unwrap());
    }

    #[test]
    fn psc_survivors_contain_mpsc_survivors() {
        let psc = ScanConfig {
            criterion: Criterion::Psc,
            ..ScanConfig::default()
        };
        let a = scan_range_vec(2, 50_000, &psc).unwrap();
        let b = scan_range_vec(2, 50_000, &ScanConfig::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if x.verdict.ruled_out {
                assert!(y.verdict.ruled_out);
            }
        }
    }

    #[test]
    fn composite_survivor_is_flagged() {
        let q = 1_440_278_401u64;
        let recs = scan_range_vec(q, q, &ScanConfig::default()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].p, recs[0].e), (37951, 2));
        assert!(!recs[0].verdict.ruled_out);
    }

    #[test]
    fn partial_path_above_crossover() {
        let cfg = ScanConfig {
            criterion: Criterion::PscPartial,
            crossover: 1_000_000,
            ..ScanConfig::default()
        };
        let recs = scan_range_vec(1_000_000, 1_002_000, &cfg).unwrap();
        assert!(recs
            .iter()
            .any(|r| r.verdict.criterion == Criterion::PscPartial && r.verdict.ruled_out));
        for r in &recs {
            assert!(r.verdict.recheck());
        }
    }

    #[test]
    fn range_limit() {
        assert!(scan_range_vec(2, MAX_SCAN_Q + 1, &ScanConfig::default()).is_err());
    }
}
