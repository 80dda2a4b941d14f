//! Exact invariants of symmetric integer forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::abelian::IntMatrix;

/// Inertia and determinant of a symmetric form over ℚ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormInvariants {
    pub positive: usize,
    pub negative: usize,
    pub nullity: usize,
    /// `|det|`; zero when degenerate.
    pub abs_det: BigInt,
}

impl FormInvariants {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn is_unimodular(&self) -> bool {
        self.abs_det.is_one()
    }
}

/// Diagonalizes `q` by congruence over ℚ. Every step has determinant ±1 so
/// the product of the pivots is `±det q`.
pub fn form_invariants(q: &IntMatrix) -> FormInvariants {
    assert!(q.is_symmetric(), "form must be symmetric");
    let n = q.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            q.row(i)
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let (mut pos, mut neg, mut null) = (0, 0, 0);
    let mut det = BigRational::one();
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(i, k);
                for row in a.iter_mut() {
                    row.swap(i, k);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // a_kk = a_jj = 0, a_kj ≠ 0: e_k ← e_k + e_j gives 2a_kj.
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
            } else {
                null += 1;
                det = BigRational::zero();
                k += 1;
                continue;
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        det *= &p;
        // Schur complement on the trailing block; row k and column k are
        // never read again.
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k + 1..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        k += 1;
    }
    FormInvariants {
        positive: pos,
        negative: neg,
        nullity: null,
        abs_det: det.abs().to_integer(),
    }
}

/// The `(p−1)`-sphere linear plumbing lattice: weights `−(p+2), −2, …, −2`,
/// adjacent spheres meeting once.
pub fn plumbing_lattice(p: i64) -> IntMatrix {
    assert!(p >= 2, "plumbing lattice needs p >= 2");
    let n = (p - 1) as usize;
    IntMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => -(p + 2),
        (i, j) if i == j => -2,
        (i, j) if i.abs_diff(j) == 1 => 1,
        _ => 0,
    })
}

/// The negative `E8` lattice.
pub fn neg_e8() -> IntMatrix {
    // Chain 0-1-2-3-4-5-6 with node 7 attached to node 4.
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
    IntMatrix::from_fn(8, 8, |i, j| {
        if i == j {
            -2
        } else if edges.contains(&(i.min(j), i.max(j))) {
            1
        } else {
            0
        }
    })
}

pub fn hyperbolic() -> IntMatrix {
    IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_is_even_unimodular_negative_definite() {
        let e8 = neg_e8();
        let inv = form_invariants(&e8);
        assert_eq!((inv.positive, inv.negative), (0, 8));
        assert!(inv.is_unimodular());
        assert_eq!(e8.determinant(), 1);
    }

    #[test]
    fn hyperbolic_inertia() {
        let inv = form_invariants(&hyperbolic());
        assert_eq!((inv.positive, inv.negative, inv.signature()), (1, 1, 0));
        assert!(inv.is_unimodular());
    }

    #[test]
    fn plumbing_determinants() {
        // |det C_p| = p².
        for p in 2..9 {
            let c = plumbing_lattice(p);
            assert_eq!(c.determinant().abs(), p * p, "p = {p}");
            assert_eq!(form_invariants(&c).negative as i64, p - 1);
        }
    }

    #[test]
    fn degenerate_form() {
        let q = IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        let inv = form_invariants(&q);
        assert_eq!((inv.positive, inv.nullity), (1, 1));
        assert!(inv.abs_det.is_zero());
    }
}
