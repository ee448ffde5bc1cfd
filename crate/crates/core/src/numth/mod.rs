//! Exact integer arithmetic: primality, factorization, multiplicative
//! functions and the windowed sieve that feeds range scans.

mod factor;
pub mod modarith;
mod primality;
mod window;

use thiserror::Error;

pub use factor::{
    factorize, factorize_with_budget, is_prime_power, primes_up_to, rho_brent, small_primes,
    Factorization, DEFAULT_RHO_BUDGET, TRIAL_BOUND,
};
pub use primality::{is_prime, jacobi};
pub use window::{
    norm_value, smallest_factor_below, windowed_partial_factor,
    windowed_partial_factor_with_window, PartialFactorization, PrimeRecord, WindowSieve,
    WindowedPartialFactor, DEFAULT_SMOOTH_BOUND, DEFAULT_WINDOW,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumthError {
    #[error("cannot factor zero")]
    Zero,
    #[error("rho iteration budget exhausted while splitting {n}")]
    RhoBudgetExhausted { n: u128 },
    #[error("invalid partial factorization: {0}")]
    InvalidPartial(String),
}

/// Omega: number of distinct prime factors.
pub fn omega(f: &Factorization) -> usize {
    f.omega()
}

pub fn euler_phi(f: &Factorization) -> u128 {
    f.euler_phi()
}

pub fn radical(f: &Factorization) -> u128 {
    f.radical()
}
