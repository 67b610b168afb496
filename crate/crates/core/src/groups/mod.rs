//! Finite presentations and the tools used to identify the groups they
//! present: Tietze moves, abelianization, homomorphism counts into finite
//! groups, and free products of two cyclic groups.

mod finite;
mod free_product;
mod orbifold;
mod presentation;
mod smith;
mod tietze;
mod zvk;

pub use finite::{
    fingerprint, free_product_count, free_product_fingerprint, hom_count, Catalog, FingerprintEntry, FiniteGroup,
    HomFingerprint, DEFAULT_TUPLE_CAP,
};
pub use free_product::{
    bounded_hopf_check, elements_up_to, eval_hom, find_epimorphism, hopf_candidates, Factor, FreeProductWord,
    HomVerdict, HopfReport,
};
pub use orbifold::{orbifold_pi1, torus_pencil_orbifold, OrbifoldSpec, PencilCertificate, PencilFiber, TorusPencil};
pub use presentation::Presentation;
pub use smith::{abelianization, determinant, matmul, smith_normal_form, SmithForm};
pub use tietze::{tietze_simplify, TietzeOptions, TietzeResult};
pub use zvk::{zvk_presentation, ZvkPresentation};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("braid on {found} strands, expected {expected}")]
    StrandMismatch { expected: usize, found: usize },
    #[error("{tuples} generator-image tuples exceed the cap {cap}")]
    BudgetExceeded { tuples: u128, cap: u64 },
    #[error("expected {expected} images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("factor orders ({p}, {q}) must be at least 2")]
    BadOrders { p: u32, q: u32 },
    #[error("({p}, {q}) is not a coprime pair")]
    NonCoprime { p: u32, q: u32 },
    #[error("unknown catalog '{0}'")]
    UnknownCatalog(String),
}
