//! Exact arithmetic for unramified extensions of Q_p: residue fields,
//! representative systems, truncated p-adic expansions, valuations.
//!
//! All values are immutable after construction and every operation is pure.

mod field;
mod number;
mod text;

pub use field::{
    find_modulus, is_prime, Field, FieldDescriptor, RepLabel, RepSystem, ResidueElement,
    DEFAULT_PRECISION,
};
pub use number::{PAdicNumber, Valuation};
pub use text::{format_padic, parse_padic};
