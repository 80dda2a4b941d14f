//! Homological descriptors of 4-manifolds, spin^c structures and the
//! surgery operations that move between them.

pub mod catalog;
mod descriptor;
pub mod lattice;
mod spinc;
mod surgery;

pub use descriptor::{BlowdownRecord, BoundaryComponent, ManifoldDescriptor, Piece};
pub use spinc::{
    check_characteristic, dimension_of_class, is_characteristic, virtual_dimension, SpincStructure,
};
pub use surgery::{
    blowup, blowup_spinc, connected_sum_power, glue, lift_spinc, log_transform, rational_blowdown,
    Gluing, SurfaceData, SurfaceKind, MAX_LIFT_P,
};
