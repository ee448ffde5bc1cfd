//! Per-q certification: brute force for small q, otherwise families, the
//! k-loop, randomized trace search for whatever is left, and exhaustive
//! search as the last resort.

use std::collections::BTreeMap;

use rand::Rng;

use super::brute::{brute_force, brute_force_for, DEFAULT_BRUTE_FORCE_CAP};
use super::family::{select_families, DEFAULT_FAMILIES};
use super::nonzero::{find_family_for_k, lemma_witness, search_nonzero, DEFAULT_ATTEMPT_CAP};
use super::trace::{search_fallback_trace, DEFAULT_TRACE_BUDGET};
use super::witness::{
    CertConfig, CertHeader, CertStats, CertStatus, Certificate, ExceptionReport, Witness,
    CERT_VERSION,
};
use super::SearchError;
use crate::gf::{build_tower, AnyTower, BaseField, FieldTower, TowerVisitor};
use crate::numth::is_prime_power;
use crate::rng::{seeded_rng, PURPOSE_FAMILIES, PURPOSE_SAMPLE};

/// q at or below this are settled by exhaustive search.
pub const DEFAULT_BRUTE_FORCE_MAX_Q: u64 = 211;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyConfig {
    pub seed: u64,
    pub families: usize,
    pub attempt_cap: usize,
    pub brute_force_max_q: u64,
    pub brute_force_cap: u64,
    pub trace_budget: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            seed: 0,
            families: DEFAULT_FAMILIES,
            attempt_cap: DEFAULT_ATTEMPT_CAP,
            brute_force_max_q: DEFAULT_BRUTE_FORCE_MAX_Q,
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
            trace_budget: DEFAULT_TRACE_BUDGET,
        }
    }
}

impl CertifyConfig {
    fn record(&self) -> CertConfig {
        CertConfig {
            families: self.families,
            attempt_cap: self.attempt_cap,
            brute_force_max_q: self.brute_force_max_q,
            brute_force_cap: self.brute_force_cap,
            trace_budget: self.trace_budget,
        }
    }
}

/// Which a values to certify.
#[derive(Clone, Copy)]
enum Scope {
    All,
    Sample(usize),
}

struct Run<'a> {
    any: &'a AnyTower,
    cfg: &'a CertifyConfig,
    scope: Scope,
}

impl TowerVisitor for Run<'_> {
    type Output = Result<Certificate, SearchError>;
    fn visit<F: BaseField>(self, t: &FieldTower<F>) -> Self::Output {
        match self.scope {
            Scope::All => certify_all(self.any, t, self.cfg),
            Scope::Sample(n) => certify_some(self.any, t, self.cfg, n),
        }
    }
}

fn header<F: BaseField>(
    any: &AnyTower,
    t: &FieldTower<F>,
    cfg: &CertifyConfig,
    g: Option<F::El>,
    families: usize,
) -> CertHeader {
    let q = t.q();
    let (p, e) = is_prime_power(q as u128).expect("tower order is a prime power");
    CertHeader {
        version: env!("CARGO_PKG_VERSION").to_string(),
        format: CERT_VERSION,
        q,
        p: p as u64,
        e,
        base_modulus: any.base_modulus(),
        cubic_modulus: any.cubic_modulus_digits(),
        g: g.map(|g| t.field().to_index(g)),
        seed: cfg.seed,
        families,
        factors: t.order_fact().factors().to_vec(),
        status: CertStatus::Full,
        unresolved: Vec::new(),
        config: cfg.record(),
    }
}

fn finish(
    mut header: CertHeader,
    witnesses: BTreeMap<u64, Witness>,
    mut exceptions: Vec<ExceptionReport>,
    unresolved: Vec<u64>,
    stats: CertStats,
    sample: bool,
) -> Certificate {
    exceptions.sort_by_key(|e| e.failing_a);
    header.status = if !unresolved.is_empty() {
        CertStatus::BudgetExceeded
    } else if sample {
        CertStatus::Sample
    } else if !exceptions.is_empty() {
        CertStatus::Exceptions
    } else {
        CertStatus::Full
    };
    header.unresolved = unresolved;
    Certificate {
        header,
        witnesses: witnesses.into_values().collect(),
        exceptions,
        stats,
    }
}

/// Randomized trace search for each a, with exhaustive search for the ones
/// that exhaust the budget when q^3 is within the cap.
fn fill_by_trace<F: BaseField>(
    t: &FieldTower<F>,
    cfg: &CertifyConfig,
    missing: &[u64],
    witnesses: &mut BTreeMap<u64, Witness>,
    exceptions: &mut Vec<ExceptionReport>,
    stats: &mut CertStats,
) -> Result<Vec<u64>, SearchError> {
    let q = t.q();
    let mut hard = Vec::new();
    for &a in missing {
        log::info!("q={q}: randomized trace search for a={a}");
        stats.trace_searches += 1;
        match search_fallback_trace(t, a, cfg.seed, cfg.trace_budget) {
            Ok(w) => {
                witnesses.insert(a, w);
            }
            Err(SearchError::BudgetExhausted(_)) => hard.push(a),
            Err(e) => return Err(e),
        }
    }
    if hard.is_empty() {
        return Ok(hard);
    }
    if (q as u128).pow(3) > cfg.brute_force_cap as u128 {
        log::warn!("q={q}: {} trace values left unresolved", hard.len());
        return Ok(hard);
    }
    log::info!("q={q}: exhaustive search for {} trace values", hard.len());
    stats.brute_force_runs += 1;
    let out = brute_force_for(t, cfg.brute_force_cap, Some(&hard))?;
    for w in out.witnesses {
        witnesses.insert(w.a, w);
    }
    exceptions.extend(out.exceptions);
    Ok(Vec::new())
}

fn brute_certificate<F: BaseField>(
    any: &AnyTower,
    t: &FieldTower<F>,
    cfg: &CertifyConfig,
    mut stats: CertStats,
) -> Result<Certificate, SearchError> {
    let g = t.primitive_root().ok();
    stats.brute_force_runs += 1;
    let out = brute_force(t, cfg.brute_force_cap)?;
    let witnesses = out.witnesses.into_iter().map(|w| (w.a, w)).collect();
    Ok(finish(
        header(any, t, cfg, g, 0),
        witnesses,
        out.exceptions,
        Vec::new(),
        stats,
        false,
    ))
}

fn certify_all<F: BaseField>(
    any: &AnyTower,
    t: &FieldTower<F>,
    cfg: &CertifyConfig,
) -> Result<Certificate, SearchError> {
    let q = t.q();
    let within_cap = (q as u128).pow(3) <= cfg.brute_force_cap as u128;
    if q <= cfg.brute_force_max_q {
        return brute_certificate(any, t, cfg, CertStats::default());
    }
    let mut rng = seeded_rng(q, cfg.seed, PURPOSE_FAMILIES, 0);
    let (g, families) = match select_families(t, cfg.families, &mut rng) {
        Ok(x) => x,
        Err(SearchError::NoFamilies(draws)) => {
            log::info!("q={q}: no family after {draws} draws");
            if within_cap {
                return brute_certificate(any, t, cfg, CertStats::default());
            }
            let all: Vec<u64> = (0..q).collect();
            return Ok(finish(
                header(any, t, cfg, t.primitive_root().ok(), 0),
                BTreeMap::new(),
                Vec::new(),
                all,
                CertStats::default(),
                false,
            ));
        }
        Err(e) => return Err(e),
    };
    let mut stats = CertStats {
        families: families.len(),
        ..CertStats::default()
    };
    let nz = search_nonzero(t, &families, cfg.attempt_cap)?;
    stats.fallback_ks = nz.fallback_ks;
    let mut witnesses = nz.witnesses;
    let missing: Vec<u64> = (0..q).filter(|a| !witnesses.contains_key(a)).collect();
    if missing.len() > 1 {
        log::info!(
            "q={q}: {} nonzero trace values left for the randomized search",
            missing.len() - 1
        );
    }
    let mut exceptions = Vec::new();
    let unresolved = fill_by_trace(
        t,
        cfg,
        &missing,
        &mut witnesses,
        &mut exceptions,
        &mut stats,
    )?;
    Ok(finish(
        header(any, t, cfg, Some(g), families.len()),
        witnesses,
        exceptions,
        unresolved,
        stats,
        false,
    ))
}

fn certify_some<F: BaseField>(
    any: &AnyTower,
    t: &FieldTower<F>,
    cfg: &CertifyConfig,
    count: usize,
) -> Result<Certificate, SearchError> {
    let q = t.q();
    let f = t.field();
    if q <= cfg.brute_force_max_q {
        let mut c = brute_certificate(any, t, cfg, CertStats::default())?;
        c.header.status = CertStatus::Sample;
        return Ok(c);
    }
    let mut rng = seeded_rng(q, cfg.seed, PURPOSE_FAMILIES, 0);
    let (g, families) = select_families(t, cfg.families, &mut rng)?;
    let mut stats = CertStats {
        families: families.len(),
        ..CertStats::default()
    };
    let mut pick = seeded_rng(q, cfg.seed, PURPOSE_SAMPLE, 0);
    let mut ks: Vec<u64> = (0..count).map(|_| pick.gen_range(0..q - 1)).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut witnesses = BTreeMap::new();
    let mut missing = vec![0u64];
    for k in ks {
        let a = f.to_index(f.pow(g, k as u128));
        match find_family_for_k(t, &families, k, cfg.attempt_cap)? {
            Some(hit) => {
                let w = lemma_witness(t, &families[hit.family], k, false, hit.sum_flags)?;
                witnesses.insert(a, w);
            }
            None => {
                stats.fallback_ks.push(k);
                missing.push(a);
            }
        }
    }
    let mut exceptions = Vec::new();
    let unresolved = fill_by_trace(
        t,
        cfg,
        &missing,
        &mut witnesses,
        &mut exceptions,
        &mut stats,
    )?;
    Ok(finish(
        header(any, t, cfg, Some(g), families.len()),
        witnesses,
        exceptions,
        unresolved,
        stats,
        true,
    ))
}

/// Certificate covering every a in F_q, or the exceptional a values.
pub fn certify_q(q: u64, cfg: &CertifyConfig) -> Result<Certificate, SearchError> {
    let tower = build_tower(q, cfg.seed)?;
    tower.visit(Run {
        any: &tower,
        cfg,
        scope: Scope::All,
    })
}

/// Witnesses for a = 0 and for g^k at `count` random k (duplicates merged).
pub fn certify_sample(
    q: u64,
    cfg: &CertifyConfig,
    count: usize,
) -> Result<Certificate, SearchError> {
    let tower = build_tower(q, cfg.seed)?;
    tower.visit(Run {
        any: &tower,
        cfg,
        scope: Scope::Sample(count),
    })
}
