//! The tower F_p ⊆ F_q ⊆ F_{q^3}: base-field arithmetic, cubic extensions,
//! trace and norm, primitivity testing and batch exponentiation.

mod base;
pub mod chain;
mod cubic;
pub mod poly;
mod table;
mod tower;

use thiserror::Error;

pub use base::{BaseField, ExtEl, ExtField, PrimeField, MAX_EXT_DEGREE};
pub use chain::{naive_mult_count, ChainPlan};
pub use cubic::{CubicRing, Elt};
pub use table::{TableField, MAX_TABLE_Q};
pub use tower::{
    build_tower, find_primitive_root_base, is_primitive, is_primitive_naive, AnyTower, FieldTower,
    TowerVisitor, MAX_Q,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} is too large: q^3 - 1 must fit in 128 bits")]
    TooLarge(u64),
    #[error("unsupported field: {0}")]
    Unsupported(String),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("the multiplicative group of F_{0} is trivial")]
    DegenerateGroup(u64),
    #[error(transparent)]
    Numth(#[from] crate::numth::NumthError),
}
