use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;

/// A finitely generated abelian group `ℤ^r ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_t` in
/// invariant-factor form (`d₁ | d₂ | …`, every `dᵢ ≥ 2`).
///
/// Generators are ordered free first, then torsion. Every constructor
/// canonicalizes, so `==` decides isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<u64>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        FgAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn integers() -> Self {
        Self::free(1)
    }

    /// `ℤ/n`; `n = 0` gives `ℤ`, `n = 1` the trivial group.
    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(&[n])
    }

    /// Direct sum of cyclic groups `ℤ/aᵢ` (`0` meaning `ℤ`), canonicalized.
    pub fn from_orders(orders: &[u64]) -> Self {
        let diag: Vec<i64> = orders
            .iter()
            .map(|&o| i64::try_from(o).expect("cyclic order exceeds i64"))
            .collect();
        Self::from_presentation(&IntMatrix::diagonal(&diag))
    }

    /// The group `ℤ^n / (column span of relations)` with `n = relations.rows()`.
    pub fn from_presentation(relations: &IntMatrix) -> Self {
        let n = relations.rows();
        let inv = smith_normal_form(relations).invariants();
        let torsion: Vec<u64> = inv.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
        FgAbGroup {
            free_rank: n - inv.len(),
            torsion,
        }
    }

    /// Builds from already-canonical data; rejects anything that is not.
    pub fn from_invariants(free_rank: usize, torsion: Vec<u64>) -> Result<Self, String> {
        if torsion.iter().any(|&d| d < 2) {
            return Err("invariant factors must be at least 2".into());
        }
        if torsion.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err("invariant factors must form a divisibility chain".into());
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    /// Number of canonical generators.
    pub fn ngens(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Order of each canonical generator, `0` for free generators.
    pub fn generator_orders(&self) -> Vec<u64> {
        std::iter::repeat_n(0, self.free_rank)
            .chain(self.torsion.iter().copied())
            .collect()
    }

    /// Diagonal relation matrix of the canonical presentation.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.ngens();
        let cols: Vec<Vec<i64>> = self
            .torsion
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut c = vec![0; n];
                c[self.free_rank + i] = d as i64;
                c
            })
            .collect();
        IntMatrix::from_columns(n, &cols)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    pub fn torsion_subgroup(&self) -> FgAbGroup {
        FgAbGroup {
            free_rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let orders: Vec<u64> = self
            .generator_orders()
            .into_iter()
            .chain(other.generator_orders())
            .collect();
        Self::from_orders(&orders)
    }

    /// Reduces a coordinate vector into the canonical representative range.
    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.ngens(), "coordinate length mismatch");
        x.iter()
            .zip(self.generator_orders())
            .map(|(&v, o)| if o == 0 { v } else { v.rem_euclid(o as i64) })
            .collect()
    }

    /// All elements, for finite groups of manageable order.
    pub fn elements(&self) -> Option<Vec<Vec<i64>>> {
        let order = self.order()?;
        if order > 1 << 20 {
            return None;
        }
        let mut out = vec![Vec::new()];
        for &d in &self.torsion {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..d as i64).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        Some(out)
    }
}

impl Default for FgAbGroup {
    fn default() -> Self {
        Self::trivial()
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" ⊕ "))
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    #[serde(with = "crate::decimal")]
    free_rank: usize,
    #[serde(with = "crate::decimal::vec")]
    torsion: Vec<u64>,
}

impl From<FgAbGroup> for GroupRepr {
    fn from(g: FgAbGroup) -> Self {
        GroupRepr {
            free_rank: g.free_rank,
            torsion: g.torsion,
        }
    }
}

impl TryFrom<GroupRepr> for FgAbGroup {
    type Error = String;

    fn try_from(r: GroupRepr) -> Result<Self, String> {
        FgAbGroup::from_invariants(r.free_rank, r.torsion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(FgAbGroup::from_orders(&[2, 3]), FgAbGroup::cyclic(6));
        assert_eq!(FgAbGroup::from_orders(&[4, 6]).torsion(), &[2, 12]);
        assert_eq!(FgAbGroup::from_orders(&[1, 0]), FgAbGroup::integers());
        assert!(FgAbGroup::cyclic(1).is_trivial());
    }

    #[test]
    fn display() {
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
        assert_eq!(FgAbGroup::from_orders(&[0, 2]).to_string(), "Z ⊕ Z/2");
        assert_eq!(FgAbGroup::cyclic(8).to_string(), "Z/8");
        assert_eq!(FgAbGroup::free(2).to_string(), "Z^2");
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let g = FgAbGroup::from_orders(&[12, 18, 0, 5]);
        assert_eq!(FgAbGroup::from_orders(&g.generator_orders()), g);
    }

    #[test]
    fn serde_rejects_non_canonical() {
        let bad = r#"{"free_rank":"0","torsion":["4","2"]}"#;
        assert!(serde_json::from_str::<FgAbGroup>(bad).is_err());
        let g = FgAbGroup::from_orders(&[0, 2, 4]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<FgAbGroup>(&s).unwrap(), g);
    }

    #[test]
    fn element_enumeration() {
        let g = FgAbGroup::from_orders(&[2, 4]);
        assert_eq!(g.elements().unwrap().len(), 8);
        assert!(FgAbGroup::integers().elements().is_none());
    }
}
