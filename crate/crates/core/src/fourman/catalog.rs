//! Standard manifolds. Seed facts such as the K3 Seiberg–Witten value live in
//! the engine, not here.

use super::descriptor::ManifoldDescriptor;
use super::lattice::{hyperbolic, neg_e8};
use super::surgery::connected_sum_power;
use crate::abelian::IntMatrix;
use crate::error::{Error, Result};

pub const NAMES: [&str; 6] = ["S4", "CP2", "CP2bar", "S2xS2", "K3", "mK3"];

pub fn s4() -> ManifoldDescriptor {
    ManifoldDescriptor::closed("S4", 0, IntMatrix::zeros(0, 0)).expect("empty form")
}

pub fn cp2() -> ManifoldDescriptor {
    ManifoldDescriptor::closed("CP2", 0, IntMatrix::diagonal(&[1]))
        .expect("nondegenerate")
        .with_symplectic(true)
}

pub fn cp2bar() -> ManifoldDescriptor {
    ManifoldDescriptor::closed("CP2bar", 0, IntMatrix::diagonal(&[-1])).expect("nondegenerate")
}

pub fn s2xs2() -> ManifoldDescriptor {
    ManifoldDescriptor::closed("S2xS2", 0, hyperbolic())
        .expect("nondegenerate")
        .with_symplectic(true)
}

/// `2(−E8) ⊕ 3H`.
pub fn k3() -> ManifoldDescriptor {
    let e8 = neg_e8();
    let mut q = IntMatrix::block_diagonal(&e8, &e8);
    for _ in 0..3 {
        q = IntMatrix::block_diagonal(&q, &hyperbolic());
    }
    ManifoldDescriptor::closed("K3", 0, q)
        .expect("nondegenerate")
        .with_symplectic(true)
}

/// `#m K3`.
pub fn sum_k3(m: usize) -> Result<ManifoldDescriptor> {
    connected_sum_power(&k3(), m)
}

/// Looks up a catalog entry; `mK3` takes the number of summands.
pub fn by_name(name: &str, m: Option<usize>) -> Result<ManifoldDescriptor> {
    match name {
        "S4" => Ok(s4()),
        "CP2" => Ok(cp2()),
        "CP2bar" => Ok(cp2bar()),
        "S2xS2" => Ok(s2xs2()),
        "K3" => Ok(k3()),
        "mK3" => sum_k3(m.ok_or_else(|| Error::Parse("mK3 needs a number of summands".into()))?),
        other => Err(Error::Parse(format!(
            "unknown catalog manifold `{other}` (known: {})",
            NAMES.join(", ")
        ))),
    }
}
