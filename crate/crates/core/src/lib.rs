//! Certification of primitive pairs with prescribed trace in cubic
//! extensions of finite fields.
//!
//! For a prime power q the question is whether every a in F_q is the trace
//! of some primitive xi in F_{q^3} whose sum xi + 1/xi is also primitive.
//! [`sieve`] rules out most q by character-sum sieve inequalities evaluated
//! in exact arithmetic; [`search`] produces explicit, independently
//! verifiable witnesses for the q that remain.

pub mod cli;
pub mod gf;
pub mod numth;
pub mod rng;
pub mod search;
pub mod sieve;
