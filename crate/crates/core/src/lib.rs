//! Exact stable-cohomotopy tables, 4-manifold surgery arithmetic and a
//! rule engine for Bauer–Furuta invariants.
pub mod abelian;
pub mod cells;
pub mod cohomotopy;
pub mod decimal;
pub mod engine;
pub mod error;
pub mod fourman;
pub mod par;
pub mod session;
pub mod stems;

pub use error::{Error, Result};
