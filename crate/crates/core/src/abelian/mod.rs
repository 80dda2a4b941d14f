//! Finitely generated abelian groups, their homomorphisms, and extensions.

mod extension;
mod group;
mod hom;
mod matrix;
mod snf;

pub use extension::{classify_extension, ExtensionResult};
pub use group::FgAbGroup;
pub use hom::{cokernel, cokernel_presented, kernel, kernel_presented, GroupHom};
pub use matrix::IntMatrix;
pub use snf::{integer_nullspace, smith_normal_form, Smith};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AbelianError {
    #[error("matrix has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("image of source generator {generator} violates its order")]
    NotWellDefined { generator: usize },
    #[error("{0}")]
    Mismatch(&'static str),
}
