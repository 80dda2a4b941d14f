use std::fmt;

use serde::{Deserialize, Serialize};

use super::group::FgAbGroup;
use super::matrix::{checked_mul, IntMatrix};
use super::snf::{integer_nullspace, smith_normal_form};
use super::AbelianError;

/// A homomorphism between canonical groups, stored as an integer matrix
/// whose columns are the images of the source generators.
///
/// Rows belonging to torsion generators of the target are reduced into
/// `0..order` when the value is built.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(
        source: FgAbGroup,
        target: FgAbGroup,
        matrix: IntMatrix,
    ) -> Result<Self, AbelianError> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(AbelianError::ShapeMismatch {
                expected: (target.ngens(), source.ngens()),
                found: (matrix.rows(), matrix.cols()),
            });
        }
        let t_orders = target.generator_orders();
        let mut m = matrix;
        for (i, &o) in t_orders.iter().enumerate() {
            if o > 0 {
                for j in 0..m.cols() {
                    m[(i, j)] = m[(i, j)].rem_euclid(o as i64);
                }
            }
        }
        // A torsion generator of order s must land in the s-torsion.
        for (j, s) in source.generator_orders().into_iter().enumerate() {
            if s == 0 {
                continue;
            }
            for (i, &o) in t_orders.iter().enumerate() {
                let y = checked_mul(m[(i, j)], s as i64);
                let ok = if o == 0 { y == 0 } else { y % o as i64 == 0 };
                if !ok {
                    return Err(AbelianError::NotWellDefined { generator: j });
                }
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix: m,
        })
    }

    /// Cyclic-to-cyclic convenience: `1 ↦ k`.
    pub fn scalar(source: FgAbGroup, target: FgAbGroup, k: i64) -> Result<Self, AbelianError> {
        let m = IntMatrix::from_fn(target.ngens(), source.ngens(), |_, _| k);
        Self::new(source, target, m)
    }

    pub fn zero(source: FgAbGroup, target: FgAbGroup) -> Self {
        let m = IntMatrix::zeros(target.ngens(), source.ngens());
        GroupHom {
            source,
            target,
            matrix: m,
        }
    }

    pub fn identity(g: FgAbGroup) -> Self {
        let m = IntMatrix::identity(g.ngens());
        GroupHom {
            source: g.clone(),
            target: g,
            matrix: m,
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.target
            .reduce(&self.matrix.mul_vec(&self.source.reduce(x)))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom, AbelianError> {
        if inner.target != self.source {
            return Err(AbelianError::Mismatch(
                "composition: target of inner map differs from source of outer",
            ));
        }
        GroupHom::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        )
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom, AbelianError> {
        if self.source != other.source || self.target != other.target {
            return Err(AbelianError::Mismatch(
                "sum of maps with different source or target",
            ));
        }
        let m = IntMatrix::from_fn(self.matrix.rows(), self.matrix.cols(), |i, j| {
            self.matrix[(i, j)] + other.matrix[(i, j)]
        });
        GroupHom::new(self.source.clone(), self.target.clone(), m)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn kernel(&self) -> FgAbGroup {
        kernel(self)
    }

    pub fn cokernel(&self) -> FgAbGroup {
        cokernel(self)
    }

    pub fn image(&self) -> FgAbGroup {
        FgAbGroup::from_presentation(&preimage_lattice(
            &self.matrix,
            &self.target.generator_orders(),
        ))
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupHom({} -> {}, {:?})",
            self.source,
            self.target,
            self.matrix.to_rows()
        )
    }
}

/// `target / f(source)`.
pub fn cokernel(f: &GroupHom) -> FgAbGroup {
    cokernel_presented(&f.matrix, &f.target.generator_orders())
}

/// `ker f`.
pub fn kernel(f: &GroupHom) -> FgAbGroup {
    kernel_presented(
        &f.matrix,
        &f.source.generator_orders(),
        &f.target.generator_orders(),
    )
}

/// Relation matrix of `⊕ ℤ/oᵢ` (`0` meaning ℤ, `1` a dead generator).
fn diagonal_relations(orders: &[u64]) -> IntMatrix {
    let cols: Vec<Vec<i64>> = orders
        .iter()
        .enumerate()
        .filter(|(_, &o)| o != 0)
        .map(|(i, &o)| {
            let mut c = vec![0; orders.len()];
            c[i] = o as i64;
            c
        })
        .collect();
    IntMatrix::from_columns(orders.len(), &cols)
}

/// Cokernel of a matrix map into `⊕ ℤ/tᵢ`, generators not necessarily canonical.
pub fn cokernel_presented(matrix: &IntMatrix, target_orders: &[u64]) -> FgAbGroup {
    assert_eq!(matrix.rows(), target_orders.len());
    FgAbGroup::from_presentation(&matrix.hstack(&diagonal_relations(target_orders)))
}

/// Kernel of a matrix map `⊕ ℤ/sⱼ → ⊕ ℤ/tᵢ`. The map must be well defined.
///
/// The nullspace of `[M | R_target]` projected to the source coordinates is
/// the preimage lattice of zero; the kernel is that lattice modulo the
/// source relations, expressed in an SNF-adapted basis.
pub fn kernel_presented(
    matrix: &IntMatrix,
    source_orders: &[u64],
    target_orders: &[u64],
) -> FgAbGroup {
    assert_eq!(matrix.cols(), source_orders.len());
    assert_eq!(matrix.rows(), target_orders.len());
    let ns = source_orders.len();
    if ns == 0 {
        return FgAbGroup::trivial();
    }
    let s = smith_normal_form(&preimage_lattice(matrix, target_orders));
    let inv = s.invariants();
    let r = inv.len();
    // Coordinates of each source relation in the basis {dᵢ·U⁻¹eᵢ}.
    let rel = diagonal_relations(source_orders);
    let cols: Vec<Vec<i64>> = (0..rel.cols())
        .map(|j| {
            let w = s.u.mul_vec(&rel.column(j));
            (0..r)
                .map(|i| {
                    debug_assert_eq!(w[i] % inv[i], 0);
                    w[i] / inv[i]
                })
                .collect()
        })
        .collect();
    FgAbGroup::from_presentation(&IntMatrix::from_columns(r, &cols))
}

/// Columns spanning `{x ∈ ℤ^ns : M·x ∈ R_target}`.
fn preimage_lattice(matrix: &IntMatrix, target_orders: &[u64]) -> IntMatrix {
    let aug = matrix.hstack(&diagonal_relations(target_orders));
    integer_nullspace(&aug).select_rows(0..matrix.cols())
}
