use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lattice::{form_invariants, FormInvariants};
use crate::abelian::IntMatrix;
use crate::error::{Error, Result};

/// A boundary 3-manifold. The flags are trusted input; nothing here checks
/// Floer-theoretic claims.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub label: String,
    pub swf_spherical: bool,
    pub rational_homology_sphere: bool,
}

impl BoundaryComponent {
    pub fn gluable(&self) -> bool {
        self.swf_spherical && self.rational_homology_sphere
    }
}

/// Betti numbers and flags of one gluing piece, kept for decomposition rules.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Piece {
    pub name: String,
    #[serde(with = "crate::decimal")]
    pub b1: i64,
    #[serde(with = "crate::decimal")]
    pub b2_plus: i64,
    #[serde(with = "crate::decimal")]
    pub b2_minus: i64,
    pub symplectic: bool,
}

/// Data needed to lift spin^c structures back across a rational blowdown.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BlowdownRecord {
    #[serde(with = "crate::decimal")]
    pub p: i64,
    pub parent: Box<ManifoldDescriptor>,
    /// Plumbing spheres as vectors in the parent's basis.
    #[serde(with = "crate::decimal::nested")]
    pub spheres: Vec<Vec<i64>>,
    /// Columns: the basis of the orthogonal complement, in parent coordinates.
    pub complement: IntMatrix,
}

/// Homological data of a compact oriented 4-manifold.
///
/// Classes are integer vectors `v` standing for `v / class_scale` in the
/// rational span of the stored basis; the pairing is `uᵀ Q v / scale²`.
/// Surgeries that change the lattice (log transforms, rational blowdowns)
/// raise the scale instead of guessing an integral basis.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ManifoldDescriptor {
    pub name: String,
    #[serde(with = "crate::decimal")]
    b1: i64,
    #[serde(with = "crate::decimal")]
    b2_plus: i64,
    #[serde(with = "crate::decimal")]
    b2_minus: i64,
    form: IntMatrix,
    pub h1_no_2torsion: bool,
    pub symplectic: bool,
    boundary: Vec<BoundaryComponent>,
    /// Stored only when the boundary is nonempty.
    #[serde(with = "crate::decimal::option", default)]
    boundary_euler: Option<i64>,
    #[serde(with = "crate::decimal")]
    class_scale: i64,
    /// Named classes such as exceptional spheres `E1` or a fibre `f`.
    #[serde(with = "named_classes")]
    classes: BTreeMap<String, Vec<i64>>,
    pieces: Vec<Piece>,
    #[serde(default)]
    blowdown: Option<BlowdownRecord>,
}

impl ManifoldDescriptor {
    /// A closed manifold with the given form. `b2±` come from the inertia,
    /// which must be nondegenerate.
    pub fn closed(name: &str, b1: i64, form: IntMatrix) -> Result<Self> {
        Self::build(name, b1, form, Vec::new(), None)
    }

    /// A manifold with boundary; `euler` is taken as given.
    pub fn bounded(
        name: &str,
        b1: i64,
        form: IntMatrix,
        boundary: Vec<BoundaryComponent>,
        euler: i64,
    ) -> Result<Self> {
        if boundary.is_empty() {
            return Err(Error::PreconditionViolation(
                "a bounded descriptor needs at least one boundary component".into(),
            ));
        }
        Self::build(name, b1, form, boundary, Some(euler))
    }

    fn build(
        name: &str,
        b1: i64,
        form: IntMatrix,
        boundary: Vec<BoundaryComponent>,
        boundary_euler: Option<i64>,
    ) -> Result<Self> {
        if b1 < 0 {
            return Err(Error::OutOfRange(format!("b1 = {b1}")));
        }
        if !form.is_square() || !form.is_symmetric() {
            return Err(Error::PreconditionViolation(
                "intersection form must be square and symmetric".into(),
            ));
        }
        let inv = form_invariants(&form);
        if inv.nullity > 0 {
            return Err(Error::PreconditionViolation(format!(
                "intersection form of {name} is degenerate"
            )));
        }
        let mut m = ManifoldDescriptor {
            name: name.to_string(),
            b1,
            b2_plus: inv.positive as i64,
            b2_minus: inv.negative as i64,
            form,
            h1_no_2torsion: true,
            symplectic: false,
            boundary,
            boundary_euler,
            class_scale: 1,
            classes: BTreeMap::new(),
            pieces: Vec::new(),
            blowdown: None,
        };
        m.pieces = vec![m.as_piece()];
        Ok(m)
    }

    /// Sets the symplectic flag (builder style).
    pub fn with_symplectic(mut self, symplectic: bool) -> Self {
        self.symplectic = symplectic;
        if let [only] = self.pieces.as_mut_slice() {
            only.symplectic = symplectic;
        }
        self
    }

    pub fn with_h1_no_2torsion(mut self, flag: bool) -> Self {
        self.h1_no_2torsion = flag;
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        if let [only] = self.pieces.as_mut_slice() {
            if only.name == self.name {
                only.name = name.to_string();
            }
        }
        self.name = name.to_string();
        self
    }

    pub fn as_piece(&self) -> Piece {
        Piece {
            name: self.name.clone(),
            b1: self.b1,
            b2_plus: self.b2_plus,
            b2_minus: self.b2_minus,
            symplectic: self.symplectic,
        }
    }

    pub fn b1(&self) -> i64 {
        self.b1
    }

    pub fn b2_plus(&self) -> i64 {
        self.b2_plus
    }

    pub fn b2_minus(&self) -> i64 {
        self.b2_minus
    }

    pub fn rank(&self) -> usize {
        self.form.rows()
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn signature(&self) -> i64 {
        self.b2_plus - self.b2_minus
    }

    /// `2 − 2b₁ + b₂` when closed; the stored value otherwise.
    pub fn euler(&self) -> i64 {
        match self.boundary_euler {
            Some(e) if !self.boundary.is_empty() => e,
            _ => 2 - 2 * self.b1 + self.b2_plus + self.b2_minus,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn boundary(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    pub fn class_scale(&self) -> i64 {
        self.class_scale
    }

    pub fn classes(&self) -> &BTreeMap<String, Vec<i64>> {
        &self.classes
    }

    pub fn class(&self, name: &str) -> Option<&Vec<i64>> {
        self.classes.get(name)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn blowdown_record(&self) -> Option<&BlowdownRecord> {
        self.blowdown.as_ref()
    }

    pub fn invariants(&self) -> FormInvariants {
        form_invariants(&self.form)
    }

    /// The numerical fingerprint: `(b₁, b₂⁺, b₂⁻, σ, χ)`.
    pub fn betti(&self) -> (i64, i64, i64, i64, i64) {
        (
            self.b1,
            self.b2_plus,
            self.b2_minus,
            self.signature(),
            self.euler(),
        )
    }

    /// Same homological data, ignoring names and bookkeeping.
    pub fn same_topology(&self, other: &ManifoldDescriptor) -> bool {
        self.betti() == other.betti()
            && self.form == other.form
            && self.class_scale == other.class_scale
            && self.boundary == other.boundary
    }

    /// Advisory notes about the data; never fatal.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.is_closed() && self.class_scale == 1 && !self.invariants().is_unimodular() {
            out.push(format!(
                "{}: closed but the free intersection form is not unimodular",
                self.name
            ));
        }
        out
    }

    /// `uᵀ Q v` on stored vectors, before dividing by `scale²`.
    pub fn raw_pair(&self, u: &[i64], v: &[i64]) -> Result<i64> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.form.pair(u, v))
    }

    /// Pairing of two classes; fails when the value is not an integer.
    pub fn pair(&self, u: &[i64], v: &[i64]) -> Result<i64> {
        let raw = self.raw_pair(u, v)?;
        let s2 = self.class_scale * self.class_scale;
        if raw % s2 != 0 {
            return Err(Error::PreconditionViolation(format!(
                "pairing {raw}/{s2} is not an integer on {}",
                self.name
            )));
        }
        Ok(raw / s2)
    }

    pub fn square(&self, v: &[i64]) -> Result<i64> {
        self.pair(v, v)
    }

    pub(crate) fn check_len(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::PreconditionViolation(format!(
                "class has {} coordinates, {} has rank {}",
                v.len(),
                self.name,
                self.rank()
            )));
        }
        Ok(())
    }

    /// Basis vector `i`, at the current scale.
    pub fn basis_class(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[i] = self.class_scale;
        v
    }

    pub(crate) fn set_class(&mut self, name: &str, v: Vec<i64>) {
        self.classes.insert(name.to_string(), v);
    }

    /// Multiplies the scale by `k`, rescaling every stored class.
    pub(crate) fn rescale(&mut self, k: i64) {
        self.class_scale *= k;
        for v in self.classes.values_mut() {
            v.iter_mut().for_each(|x| *x *= k);
        }
    }

    pub(crate) fn raw_parts(&self) -> (&IntMatrix, &[BoundaryComponent], Option<i64>) {
        (&self.form, &self.boundary, self.boundary_euler)
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        name: String,
        b1: i64,
        b2_plus: i64,
        b2_minus: i64,
        form: IntMatrix,
        boundary: Vec<BoundaryComponent>,
        boundary_euler: Option<i64>,
        class_scale: i64,
        classes: BTreeMap<String, Vec<i64>>,
        pieces: Vec<Piece>,
    ) -> Self {
        ManifoldDescriptor {
            name,
            b1,
            b2_plus,
            b2_minus,
            form,
            h1_no_2torsion: true,
            symplectic: false,
            boundary,
            boundary_euler,
            class_scale,
            classes,
            pieces,
            blowdown: None,
        }
    }

    pub(crate) fn set_pieces(&mut self, pieces: Vec<Piece>) {
        self.pieces = pieces;
    }

    pub(crate) fn set_blowdown(&mut self, rec: BlowdownRecord) {
        self.blowdown = Some(rec);
    }
}

impl fmt::Display for ManifoldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: b1={} b2+={} b2-={} sigma={} chi={}",
            self.name,
            self.b1,
            self.b2_plus,
            self.b2_minus,
            self.signature(),
            self.euler()
        )?;
        if self.class_scale != 1 {
            write!(f, " scale={}", self.class_scale)?;
        }
        if self.symplectic {
            f.write_str(" symplectic")?;
        }
        Ok(())
    }
}

mod named_classes {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        name: String,
        #[serde(with = "crate::decimal::vec")]
        class: Vec<i64>,
    }

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Vec<i64>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(k, c)| Entry {
                name: k.clone(),
                class: c.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, Vec<i64>>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.name, e.class)).collect())
    }
}
