//! Explicit witnesses for the q the sieve leaves behind.

mod brute;
mod certify;
mod family;
mod nonzero;
mod trace;
mod verify;
mod witness;

pub use brute::{brute_force, brute_force_for, BruteOutcome, DEFAULT_BRUTE_FORCE_CAP};
pub use certify::{certify_q, certify_sample, CertifyConfig, DEFAULT_BRUTE_FORCE_MAX_Q};
pub use family::{
    build_family, family_modulus, generators, precompute_families, select_families, sum_formula,
    CandidateFamily, FamilyBuilder, DEFAULT_FAMILIES, EXHAUSTIVE_D, MAX_GENERATORS, MIN_FAMILY_Q,
};
pub use nonzero::{
    find_family_for_k, k_bound, lemma_witness, search_nonzero, witnesses_for_k, LemmaHit,
    NonzeroOutcome, DEFAULT_ATTEMPT_CAP,
};
pub use trace::{sample_with_trace, search_fallback_trace, DEFAULT_TRACE_BUDGET};
pub use verify::{verify_certificate, verify_witness, Verifier, VerifyFailure, VerifySummary};
pub use witness::{
    CertConfig, CertHeader, CertStats, CertStatus, Certificate, Checks, Construction, Evidence,
    ExceptionReport, Record, Witness, CERT_VERSION,
};

use crate::gf::{BaseField, CubicRing, Elt, FieldTower, GfError};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("gcd(3k + d, q - 1) != 1 for k = {k}, d = {d}")]
    NotCoprime { k: u64, d: u64 },
    #[error("no usable family after {0} draws")]
    NoFamilies(u64),
    #[error("exhaustive search at q = {q} exceeds the cap q^3 <= {cap}")]
    CapExceeded { q: u64, cap: u64 },
    #[error("trace search budget of {0} samples exhausted")]
    BudgetExhausted(u64),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-prime primitivity flags of `x` through the tower's shared chain.
pub(crate) fn powers_evidence<F: BaseField>(
    tower: &FieldTower<F>,
    ring: &CubicRing<F>,
    x: &Elt<F::El>,
) -> Result<Evidence, SearchError> {
    Ok(Evidence::Powers {
        nonunit: tower.primitivity_flags_in(ring, x)?,
    })
}

/// Serializes `xi` with its construction transcript; `a` is Tr(xi).
#[allow(clippy::too_many_arguments)]
pub(crate) fn make_witness<F: BaseField>(
    tower: &FieldTower<F>,
    ring: &CubicRing<F>,
    xi: &Elt<F::El>,
    construction: Construction,
    k: Option<u64>,
    d: Option<u64>,
    xi_evidence: Evidence,
    sum_evidence: Option<Evidence>,
) -> Result<Witness, SearchError> {
    let f = ring.field();
    let trace = f.to_index(ring.trace_linear(xi));
    let sum = match sum_evidence {
        Some(e) => e,
        None => {
            let inv = ring.inv(xi).ok_or(GfError::ZeroElement)?;
            powers_evidence(tower, ring, &ring.add(xi, &inv))?
        }
    };
    Ok(Witness {
        q: tower.q(),
        a: trace,
        xi_digits: ring.to_digits(xi),
        construction,
        k,
        d,
        checks: Checks {
            trace,
            xi: xi_evidence,
            sum,
        },
    })
}
