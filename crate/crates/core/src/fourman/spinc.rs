use std::fmt;

use serde::{Deserialize, Serialize};

use super::descriptor::ManifoldDescriptor;
use crate::error::{Error, Result};

/// A spin^c structure recorded by its first Chern class in the stored basis
/// (at the manifold's class scale). Torsion is not modeled.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct SpincStructure {
    pub manifold: String,
    #[serde(with = "crate::decimal::vec")]
    pub c1: Vec<i64>,
}

impl SpincStructure {
    pub fn new(x: &ManifoldDescriptor, c1: Vec<i64>) -> Result<Self> {
        x.check_len(&c1)?;
        Ok(SpincStructure {
            manifold: x.name.clone(),
            c1,
        })
    }

    /// Checked constructor: the class must be characteristic on `x`.
    pub fn characteristic(x: &ManifoldDescriptor, c1: Vec<i64>) -> Result<Self> {
        let s = Self::new(x, c1)?;
        check_characteristic(x, &s.c1)?;
        Ok(s)
    }

    /// `c₁ = 0`; characteristic exactly when the form is even.
    pub fn trivial(x: &ManifoldDescriptor) -> Self {
        SpincStructure {
            manifold: x.name.clone(),
            c1: vec![0; x.rank()],
        }
    }
}

impl fmt::Display for SpincStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c1.iter().map(ToString::to_string).collect();
        write!(f, "{}[{}]", self.manifold, parts.join(","))
    }
}

/// Wu's condition `⟨c, x⟩ ≡ x·x (mod 2)` on every basis vector, plus
/// `c² ≡ σ (mod 8)` when the form is unimodular.
///
/// On descriptors with a class scale above one the lattice is only known up
/// to finite index, so only integrality of `d` is checked (by
/// [`virtual_dimension`]).
pub fn check_characteristic(x: &ManifoldDescriptor, c: &[i64]) -> Result<()> {
    x.check_len(c)?;
    if x.class_scale() != 1 {
        return Ok(());
    }
    let q = x.form();
    let qc = q.mul_vec(c);
    for (i, v) in qc.iter().enumerate() {
        if (v - q[(i, i)]).rem_euclid(2) != 0 {
            return Err(Error::NotCharacteristic(format!(
                "⟨c, e{i}⟩ = {v} but e{i}·e{i} = {}",
                q[(i, i)]
            )));
        }
    }
    if x.invariants().is_unimodular() {
        let sq = q.pair(c, c);
        if (sq - x.signature()).rem_euclid(8) != 0 {
            return Err(Error::NotCharacteristic(format!(
                "c² = {sq} is not congruent to σ = {} mod 8",
                x.signature()
            )));
        }
    }
    Ok(())
}

pub fn is_characteristic(x: &ManifoldDescriptor, c: &[i64]) -> bool {
    check_characteristic(x, c).is_ok()
}

/// `d(𝔰) = (c₁² − 2χ − 3σ)/4`.
///
/// Requires `b₁ = 0`. For a bounded piece the stored χ is used as is.
pub fn virtual_dimension(x: &ManifoldDescriptor, s: &SpincStructure) -> Result<i64> {
    if s.manifold != x.name {
        return Err(Error::PreconditionViolation(format!(
            "spin^c structure on {} evaluated on {}",
            s.manifold, x.name
        )));
    }
    dimension_of_class(x, &s.c1)
}

/// [`virtual_dimension`] on a bare class.
pub fn dimension_of_class(x: &ManifoldDescriptor, c: &[i64]) -> Result<i64> {
    if x.b1() != 0 {
        return Err(Error::PreconditionViolation(format!(
            "{} has b1 = {}; dimensions are only computed for b1 = 0",
            x.name,
            x.b1()
        )));
    }
    check_characteristic(x, c)?;
    let raw = x.raw_pair(c, c)?;
    let s2 = x
        .class_scale()
        .checked_mul(x.class_scale())
        .ok_or_else(|| Error::OutOfRange("class scale overflow".into()))?;
    let num = raw - s2 * (2 * x.euler() + 3 * x.signature());
    let den = 4 * s2;
    if num % den != 0 {
        return Err(Error::NonIntegerDimension(num));
    }
    Ok(num / den)
}
