//! Character-sum sieve criteria deciding which q need an explicit search.

mod criteria;
mod scan;
mod splits;

pub use criteria::{c_q, eval_mpsc, eval_psc, Criterion, IntMargin, SieveSplit, SplitEvaluator};
pub use scan::{
    scan_range, scan_range_vec, FactorData, ScanConfig, ScanRecord, ScanSummary, DEFAULT_CROSSOVER,
    MAX_SCAN_Q,
};
pub use splits::{
    best_split_search, best_split_search_with, eval_psc_partial, psc_partial_verdict, SieveVerdict,
    SplitMode,
};

use crate::numth::NumthError;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SieveError {
    #[error("the given sets do not partition the primes of q^3 - 1")]
    NotAPartition,
    #[error("factorization data does not belong to q = {0}")]
    Mismatch(u64),
    #[error("range [{from}, {to}] outside [2, 8e12]")]
    Range { from: u64, to: u64 },
    #[error(transparent)]
    Numth(#[from] NumthError),
}
