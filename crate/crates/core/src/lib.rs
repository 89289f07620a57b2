//! Binary matrices of bounded twin-width: contraction sequences, structural
//! diagnostics, and a compact entry oracle.

pub mod cli;
pub mod compact;
pub mod error;
pub mod geom;
pub mod matrix;
pub mod subtypes;
pub mod twinorder;
pub mod zoneapprox;

pub use error::{Error, Result};
pub use matrix::{BinaryMatrix, Rect, RectangleDecomposition};

/// True when `TWINMAT_DEBUG=1`: builds re-check their invariants.
pub fn debug_checks() -> bool {
    static FLAG: std::sync::OnceLock<bool> = std::sync::OnceLock::new();
    *FLAG.get_or_init(|| std::env::var("TWINMAT_DEBUG").is_ok_and(|v| v == "1"))
}
