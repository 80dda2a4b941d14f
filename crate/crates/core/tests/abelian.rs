use bfcalc::abelian::{integer_nullspace, smith_normal_form, FgAbGroup, GroupHom, IntMatrix};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-9i64..=9, r * c)
            .prop_map(move |v| IntMatrix::from_fn(r, c, |i, j| v[i * c + j]))
    })
}

fn wide(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect()
}

fn wide_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum())
                .collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn smith_form_is_a_factorisation(a in matrix()) {
        let s = smith_normal_form(&a);
        let uav = wide_mul(&wide_mul(&wide(&s.u), &wide(&a)), &wide(&s.v));
        prop_assert_eq!(uav, wide(&s.d));
        let inv = s.invariants();
        prop_assert!(inv.iter().all(|&x| x > 0));
        prop_assert!(inv.windows(2).all(|w| w[1] % w[0] == 0));
    }

    #[test]
    fn nullspace_is_annihilated_and_full(a in matrix()) {
        let n = integer_nullspace(&a);
        let s = smith_normal_form(&a);
        prop_assert_eq!(n.cols(), a.cols() - s.rank());
        for j in 0..n.cols() {
            prop_assert!(a.mul_vec(&n.column(j)).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn square_presentation_order_is_the_determinant(a in matrix()) {
        // For a square relation matrix the group is finite iff det ≠ 0, of order |det|.
        if a.is_square() {
            let g = FgAbGroup::from_presentation(&a.transpose());
            let det = a.determinant();
            if det == 0 {
                prop_assert!(!g.is_finite());
            } else {
                prop_assert_eq!(g.order(), Some(det.unsigned_abs()));
            }
        }
    }

    #[test]
    fn kernel_and_image_orders_multiply(
        src in prop::collection::vec(2u64..=6, 1..=3),
        tgt in prop::collection::vec(2u64..=6, 1..=3),
        seed in prop::collection::vec(0i64..36, 9),
    ) {
        let (s, t) = (FgAbGroup::from_orders(&src), FgAbGroup::from_orders(&tgt));
        let (so, to) = (s.generator_orders(), t.generator_orders());
        let m = IntMatrix::from_fn(to.len(), so.len(), |r, c| {
            let step = to[r] / num_integer::gcd(to[r], so[c]);
            step as i64 * seed[(r * 3 + c) % 9]
        });
        let f = GroupHom::new(s.clone(), t.clone(), m).unwrap();
        let (k, i, c) = (f.kernel(), f.image(), f.cokernel());
        prop_assert_eq!(k.order().unwrap() * i.order().unwrap(), s.order().unwrap());
        prop_assert_eq!(c.order().unwrap() * i.order().unwrap(), t.order().unwrap());
    }
}

#[test]
fn direct_sums_combine_invariants() {
    let g = FgAbGroup::cyclic(4).direct_sum(&FgAbGroup::cyclic(6));
    assert_eq!(g.torsion(), &[2, 12]);
    assert_eq!(
        FgAbGroup::cyclic(2).direct_sum(&FgAbGroup::cyclic(3)),
        FgAbGroup::cyclic(6)
    );
}
