//! One PASS/FAIL line per acceptance criterion. Every check here uses an
//! oracle written independently of the library code it tests.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use bfcalc::abelian::{smith_normal_form, FgAbGroup, GroupHom, IntMatrix};
use bfcalc::cohomotopy::{cp_cohomotopy, golden_table, les_sweep, min_n};
use bfcalc::engine::*;
use bfcalc::fourman::lattice::{hyperbolic, neg_e8};
use bfcalc::fourman::{
    blowup_spinc, dimension_of_class, glue, Gluing, ManifoldDescriptor, SpincStructure, SurfaceData,
};
use bfcalc::par::Execution;
use bfcalc::stems::{compose, precomposition_map, StemElement};
use bfcalc::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn check(
        &mut self,
        name: &str,
        limit: Option<Duration>,
        f: impl FnOnce() -> Result<(), String>,
    ) {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(()), Some(l)) if took > l => Err(format!("took {took:?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(()) => println!("PASS {name} ({took:.2?})"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                self.failures.push(name.to_string());
            }
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Hurewicz table oracle: largest divisor of 24 dividing x, found by search.
fn div24(x: i64) -> u64 {
    (1..=24u64)
        .rev()
        .find(|d| 24 % d == 0 && x.rem_euclid(*d as i64) == 0)
        .unwrap()
}

fn oracle_orders(n: i64, j: i64) -> (u64, u64) {
    let odd = n.rem_euclid(2) == 1;
    match (j, odd) {
        (0, _) => (1, 1),
        (1, _) => (if odd { 2 } else { 1 }, 1),
        (2, _) => (if odd { 2 } else { 1 }, if odd { 1 } else { 2 }),
        (3, true) => (div24(n + 1), 1),
        (3, false) => (div24(n - 2) / 2, 1),
        (4, true) => (1, 48 / div24(n + 1)),
        (4, false) => (1, 24 / div24(n - 2)),
        (5, false) => (div24(n), 1),
        (5, true) => (div24(n - 3) / 2, 1),
        (6, false) => (1, 48 / div24(n)),
        _ => (1, 24 / div24(n - 3)),
    }
}

fn in_range_cases(js: std::ops::RangeInclusive<i64>) -> Vec<(i64, i64)> {
    (4..=100)
        .flat_map(|n| js.clone().map(move |j| (n, j)))
        .filter(|&(n, j)| n >= min_n(j).unwrap())
        .collect()
}

fn golden() -> Result<(), String> {
    let cases = in_range_cases(0..=6);
    let got = golden_table(&cases, Execution::default());
    for (&(n, j), h) in cases.iter().zip(got) {
        let h = h.map_err(|e| format!("({n},{j}): {e}"))?;
        let (k, c) = oracle_orders(n, j);
        ensure(
            h.kernel == FgAbGroup::cyclic(k) && h.cokernel == FgAbGroup::cyclic(c),
            || {
                format!(
                    "({n},{j}): got {} / {}, expected Z/{k} / Z/{c}",
                    h.kernel, h.cokernel
                )
            },
        )?;
    }
    let spot = |n, j| bfcalc::cohomotopy::hurewicz_table(n, j).unwrap();
    ensure(spot(7, 3).kernel == FgAbGroup::cyclic(8), || {
        "Ker at (7,3)".into()
    })?;
    ensure(spot(4, 4).cokernel == FgAbGroup::cyclic(12), || {
        "Coker at (4,4)".into()
    })?;
    ensure(spot(6, 1).kernel.is_trivial(), || "Ker at (6,1)".into())
}

fn stunted() -> Result<(), String> {
    let cases = in_range_cases(1..=3);
    let got = les_sweep(&cases, Execution::default());
    for (&(n, j), r) in cases.iter().zip(got) {
        let r = r.map_err(|e| format!("({n},{j}): {e}"))?;
        let g = r
            .unique()
            .ok_or_else(|| format!("({n},{j}) is ambiguous"))?;
        let expected = cp_cohomotopy(n, j).unwrap();
        ensure(*g == expected, || format!("({n},{j}): {g} vs {expected}"))?;
    }
    Ok(())
}

fn stem_elements(degree: i64) -> Vec<StemElement> {
    let coeffs: Vec<i64> = match degree {
        0 => (-3..=3).collect(),
        1 | 2 => vec![0, 1],
        3 => (0..24).collect(),
        _ => vec![0],
    };
    coeffs
        .into_iter()
        .map(|c| StemElement::new(degree, c).unwrap())
        .collect()
}

fn stems() -> Result<(), String> {
    let err = |e: Error| e.to_string();
    for da in 0..=5 {
        for db in 0..=5 - da {
            for a in stem_elements(da) {
                for a2 in stem_elements(da) {
                    for b in stem_elements(db) {
                        let lhs = compose(a.add(&a2).map_err(err)?, b).map_err(err)?;
                        let rhs = compose(a, b)
                            .map_err(err)?
                            .add(&compose(a2, b).map_err(err)?)
                            .map_err(err)?;
                        ensure(lhs == rhs, || {
                            format!("left distributivity fails at {a}, {a2}, {b}")
                        })?;
                        let lhs = compose(b, a.add(&a2).map_err(err)?).map_err(err)?;
                        let rhs = compose(b, a)
                            .map_err(err)?
                            .add(&compose(b, a2).map_err(err)?)
                            .map_err(err)?;
                        ensure(lhs == rhs, || {
                            format!("right distributivity fails at {b}, {a}, {a2}")
                        })?;
                    }
                }
                for dc in 0..=5 - da - db {
                    for b in stem_elements(db) {
                        for c in stem_elements(dc) {
                            let l = compose(compose(a, b).map_err(err)?, c).map_err(err)?;
                            let r = compose(a, compose(b, c).map_err(err)?).map_err(err)?;
                            ensure(l == r, || format!("associativity fails at {a}, {b}, {c}"))?;
                        }
                    }
                }
            }
        }
    }
    let eta = StemElement::eta(1);
    let nu = StemElement::nu(1);
    ensure(eta.scale(2).is_zero(), || "2η ≠ 0".into())?;
    ensure(nu.scale(24).is_zero() && !nu.scale(12).is_zero(), || {
        "ν does not have order 24".into()
    })?;
    let eta3 = compose(eta, compose(eta, eta).map_err(err)?).map_err(err)?;
    ensure(eta3 == nu.scale(12), || format!("η³ = {eta3}"))?;
    ensure(compose(eta, nu).map_err(err)?.is_zero(), || "ην ≠ 0".into())?;
    // Precomposition by η from π_2 hits 12ν.
    let m = precomposition_map(eta, 2).map_err(err)?;
    ensure(m.apply(&[1]) == vec![12], || "η^* on π_2".into())
}

// Element order in a finite group given by generator orders.
fn element_order(orders: &[u64], x: &[i64]) -> u64 {
    orders.iter().zip(x).fold(1u64, |acc, (&o, &v)| {
        num_integer::lcm(acc, o / num_integer::gcd(o, v.rem_euclid(o as i64) as u64))
    })
}

fn histogram(orders: &[u64], elems: impl Iterator<Item = Vec<i64>>) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for e in elems {
        *h.entry(element_order(orders, &e)).or_default() += 1;
    }
    h
}

fn enumerate(orders: &[u64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &o in orders {
        out = out
            .into_iter()
            .flat_map(|v| (0..o as i64).map(move |k| [v.clone(), vec![k]].concat()))
            .collect();
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    IntMatrix::from_fn(r, c, |_, _| rng.gen_range(-9..=9))
}

// The oracle multiplies in i128 so that large but valid transforms are not
// mistaken for failures.
fn wide(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect()
}

fn wide_mul(a: &[Vec<i128>], b: &[Vec<i128>], inner: usize, cols: usize) -> Vec<Vec<i128>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

// Determinant by exact rational elimination.
fn unimodular(m: &IntMatrix) -> bool {
    use num_rational::BigRational;
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = m
        .to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let mut det = BigRational::from_integer(1.into());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != BigRational::from_integer(0.into())) else {
            return false;
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k].clone();
        for i in k + 1..n {
            let f = a[i][k].clone() / a[k][k].clone();
            for j in k..n {
                let t = f.clone() * a[k][j].clone();
                a[i][j] -= t;
            }
        }
    }
    det.clone() * det == BigRational::from_integer(1.into())
}

fn snf() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let a = random_matrix(&mut rng);
        let s = smith_normal_form(&a);
        let ua = wide_mul(&wide(&s.u), &wide(&a), a.rows(), a.cols());
        let uav = wide_mul(&ua, &wide(&s.v), a.cols(), a.cols());
        ensure(uav == wide(&s.d), || format!("U·A·V ≠ D for {a:?}"))?;
        ensure(unimodular(&s.u) && unimodular(&s.v), || {
            format!("non-unimodular transform for {a:?}")
        })?;
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                ensure(i == j || s.d.row(i)[j] == 0, || {
                    format!("D is not diagonal for {a:?}")
                })?;
            }
        }
        let inv = s.invariants();
        ensure(inv.iter().all(|&x| x > 0), || {
            format!("nonpositive invariant for {a:?}")
        })?;
        ensure(inv.windows(2).all(|w| w[1] % w[0] == 0), || {
            format!("divisibility fails for {a:?}")
        })?;
    }
    let mut checked = 0;
    while checked < 300 {
        let src: Vec<u64> = (0..rng.gen_range(1..=3))
            .map(|_| rng.gen_range(2..=8))
            .collect();
        let tgt: Vec<u64> = (0..rng.gen_range(1..=3))
            .map(|_| rng.gen_range(2..=8))
            .collect();
        if src.iter().product::<u64>() > 200 || tgt.iter().product::<u64>() > 200 {
            continue;
        }
        checked += 1;
        let (sg, tg) = (FgAbGroup::from_orders(&src), FgAbGroup::from_orders(&tgt));
        let (src, tgt) = (sg.generator_orders(), tg.generator_orders());
        let m = IntMatrix::from_fn(tgt.len(), src.len(), |r, c| {
            let step = tgt[r] / num_integer::gcd(tgt[r], src[c]);
            step as i64 * rng.gen_range(0..tgt[r] as i64)
        });
        let f = GroupHom::new(sg, tg, m.clone()).map_err(|e| e.to_string())?;
        let image = |x: &[i64]| -> Vec<i64> {
            m.mul_vec(x)
                .iter()
                .zip(&tgt)
                .map(|(v, &o)| v.rem_euclid(o as i64))
                .collect()
        };
        let kernel: Vec<Vec<i64>> = enumerate(&src)
            .into_iter()
            .filter(|x| image(x).iter().all(|&v| v == 0))
            .collect();
        let im: std::collections::BTreeSet<Vec<i64>> =
            enumerate(&src).iter().map(|x| image(x)).collect();
        // Order of x + Im in the quotient.
        let quot_order = |x: &Vec<i64>| -> u64 {
            (1u64..)
                .find(|&k| {
                    let y: Vec<i64> = x
                        .iter()
                        .zip(&tgt)
                        .map(|(v, &o)| (v * k as i64).rem_euclid(o as i64))
                        .collect();
                    im.contains(&y)
                })
                .unwrap()
        };
        let mut coker_hist = BTreeMap::new();
        for x in enumerate(&tgt) {
            *coker_hist.entry(quot_order(&x)).or_insert(0usize) += 1;
        }
        for v in coker_hist.values_mut() {
            *v /= im.len();
        }
        let k = f.kernel();
        let c = f.cokernel();
        let kh = histogram(&k.generator_orders(), k.elements().unwrap().into_iter());
        let ch = histogram(&c.generator_orders(), c.elements().unwrap().into_iter());
        ensure(kh == histogram(&src, kernel.into_iter()), || {
            format!("kernel mismatch for {src:?} → {tgt:?}, {m:?}")
        })?;
        ensure(ch == coker_hist, || {
            format!("cokernel mismatch for {src:?} → {tgt:?}, {m:?}")
        })?;
    }
    Ok(())
}

/// A random form of rank ≤ 8 with a characteristic class, both in a
/// scrambled basis, plus the oracle's own b2+, σ and c².
struct RandomForm {
    form: IntMatrix,
    c: Vec<i64>,
    b2_plus: i64,
    sigma: i64,
    c_sq: i64,
}

fn random_form(rng: &mut ChaCha8Rng) -> RandomForm {
    let odd = |rng: &mut ChaCha8Rng| 2 * rng.gen_range(-3..=2) + 1;
    let even = |rng: &mut ChaCha8Rng| 2 * rng.gen_range(-2..=2);
    let (mut q, mut c, mut b2p, mut sigma, mut csq) = (IntMatrix::empty(0, 0), vec![], 0, 0, 0);
    if rng.gen_bool(0.1) {
        q = neg_e8();
        c = (0..8).map(|_| even(rng)).collect();
        csq = q.pair(&c, &c);
        sigma = -8;
    } else {
        let rank = rng.gen_range(1..=8);
        while q.rows() < rank {
            match rng.gen_range(0..3) {
                0 => {
                    q = IntMatrix::block_diagonal(&q, &IntMatrix::diagonal(&[1]));
                    let a = odd(rng);
                    c.push(a);
                    csq += a * a;
                    b2p += 1;
                    sigma += 1;
                }
                1 => {
                    q = IntMatrix::block_diagonal(&q, &IntMatrix::diagonal(&[-1]));
                    let a = odd(rng);
                    c.push(a);
                    csq -= a * a;
                    sigma -= 1;
                }
                _ if q.rows() + 2 <= rank => {
                    q = IntMatrix::block_diagonal(&q, &hyperbolic());
                    let (a, b) = (even(rng), even(rng));
                    c.extend([a, b]);
                    csq += 2 * a * b;
                    b2p += 1;
                }
                _ => {}
            }
        }
    }
    // Scramble: Q' = PᵀQP, c' = P⁻¹c.
    let n = q.rows();
    let mut p = IntMatrix::identity(n).to_rows();
    let mut pinv = IntMatrix::identity(n).to_rows();
    for _ in 0..n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || n < 2 {
            continue;
        }
        let k = if rng.gen_bool(0.5) { 1 } else { -1 };
        // P ← P·(I + k e_j e_iᵀ): column i += k·column j.
        for row in p.iter_mut() {
            row[i] += k * row[j];
        }
        // P⁻¹ ← (I − k e_j e_iᵀ)·P⁻¹: row j −= k·row i.
        let ri = pinv[i].clone();
        for (x, y) in pinv[j].iter_mut().zip(ri) {
            *x -= k * y;
        }
    }
    let p = IntMatrix::from_rows(&p);
    let pinv = IntMatrix::from_rows(&pinv);
    RandomForm {
        form: p.transpose().mul(&q).mul(&p),
        c: pinv.mul_vec(&c),
        b2_plus: b2p,
        sigma,
        c_sq: csq,
    }
}

fn oracle_d(f: &RandomForm) -> i64 {
    let euler = 2 + f.form.rows() as i64;
    let num = f.c_sq - 2 * euler - 3 * f.sigma;
    assert_eq!(num.rem_euclid(4), 0, "oracle dimension is not integral");
    num / 4
}

fn dimensions() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let err = |e: Error| e.to_string();
    let mut forms = Vec::new();
    for t in 0..100 {
        let f = random_form(&mut rng);
        let x = ManifoldDescriptor::closed(&format!("R{t}"), 0, f.form.clone()).map_err(err)?;
        let d = dimension_of_class(&x, &f.c).map_err(err)?;
        ensure(d == oracle_d(&f), || {
            format!("d = {d}, oracle {} on {:?}", oracle_d(&f), f.form)
        })?;
        ensure((d - f.b2_plus - 1).rem_euclid(2) == 0, || {
            format!("parity fails: d = {d}, b2+ = {}", f.b2_plus)
        })?;
        let s = SpincStructure::characteristic(&x, f.c.clone()).map_err(err)?;
        for r in -10..=10 {
            let (blown, sr) = blowup_spinc(&x, &s, r).map_err(err)?;
            let after = dimension_of_class(&blown, &sr.c1).map_err(err)?;
            ensure(after == d - r * (r + 1), || {
                format!("blowup r = {r}: {after} vs {}", d - r * (r + 1))
            })?;
        }
        forms.push((x, f));
    }
    for _ in 0..50 {
        let m = rng.gen_range(2..=4);
        let picks: Vec<usize> = (0..m).map(|_| rng.gen_range(0..forms.len())).collect();
        let mut whole = forms[picks[0]].0.clone();
        let mut c = forms[picks[0]].1.c.clone();
        let mut total = oracle_d(&forms[picks[0]].1);
        for &i in &picks[1..] {
            whole = glue(&whole, &forms[i].0, &Gluing::ConnectedSum).map_err(err)?;
            c.extend(&forms[i].1.c);
            total += oracle_d(&forms[i].1);
        }
        let d = dimension_of_class(&whole, &c).map_err(err)?;
        ensure(d == total + m as i64 - 1, || {
            format!("gluing {m} pieces: {d} vs {}", total + m as i64 - 1)
        })?;
    }
    Ok(())
}

fn infer_all(kb: &mut KnowledgeBase) -> Result<(), String> {
    infer_in_place(kb, Execution::default())
        .map(|_| ())
        .map_err(|e| e.to_string())
}

fn sum_criterion() -> Result<(), String> {
    let err = |e: Error| e.to_string();
    for m in 1..=6usize {
        let mut kb = KnowledgeBase::new();
        let w = sum_k3_canonical(&mut kb, m).map_err(err)?;
        infer_all(&mut kb)?;
        let state = kb.bf(&w);
        if m <= 4 {
            ensure(state.is_nonzero(), || format!("#{m}K3 is {state}"))?;
            let dim = bf_dimension(&kb, &w.manifold).map_err(err)?;
            ensure(dim == BfDim::Finite(m as i64 - 1), || {
                format!("dim_BF(#{m}K3) = {dim}")
            })?;
        } else {
            ensure(state == BfState::Zero, || format!("#{m}K3 is {state}"))?;
        }
    }
    // Three K3 summands and a piece with b2+ = 7: 4(−E8) ⊕ 7H, K = 2f.
    let mut q = IntMatrix::empty(0, 0);
    for _ in 0..4 {
        q = IntMatrix::block_diagonal(&q, &neg_e8());
    }
    for _ in 0..7 {
        q = IntMatrix::block_diagonal(&q, &hyperbolic());
    }
    let z = ManifoldDescriptor::closed("Z", 0, q).map_err(err)?;
    let mut kc = vec![0; z.rank()];
    kc[32] = 2;
    let mut kb = KnowledgeBase::new();
    kb.add_manifold(z).map_err(err)?;
    let zk = FactKey::new("Z", kc);
    kb.assert_fact(
        &zk,
        BfState::Unknown,
        SwFact::Parity(Parity::Odd),
        "synthetic",
    )
    .map_err(err)?;
    let k = k3_canonical(&mut kb).map_err(err)?;
    let w = kb
        .declare_connected_sum(&[k.clone(), k.clone(), k, zk.clone()], Some("W"))
        .map_err(err)?;
    infer_all(&mut kb)?;
    ensure(kb.fact(&zk).and_then(|f| f.d) == Some(0), || {
        "the b2+ = 7 piece is not at d = 0".into()
    })?;
    ensure(kb.bf(&w) == BfState::Zero, || {
        format!("mixed sum is {}", kb.bf(&w))
    })
}

fn diag(pos: usize, neg: usize) -> ManifoldDescriptor {
    let entries: Vec<i64> = std::iter::repeat_n(1, pos)
        .chain(std::iter::repeat_n(-1, neg))
        .collect();
    ManifoldDescriptor::closed(&format!("D{pos}_{neg}"), 0, IntMatrix::diagonal(&entries)).unwrap()
}

fn transfer() -> Result<(), String> {
    let err = |e: Error| e.to_string();
    // d = 2, b2+ = 5, asserted torsion; the blowup with r = 1 lands at d = 0.
    let mut kb = KnowledgeBase::new();
    kb.add_manifold(diag(5, 1)).map_err(err)?;
    let x = FactKey::new("D5_1", vec![3, 3, 3, 3, 1, 1]);
    kb.assert_fact(&x, BfState::NonzeroTorsion, SwFact::Unknown, "synthetic")
        .map_err(err)?;
    let low = kb.declare_blowup(&x, 1).map_err(err)?;
    infer_all(&mut kb)?;
    ensure(kb.fact(&x).and_then(|f| f.d) == Some(2), || {
        "source is not at d = 2".into()
    })?;
    ensure(condition_star(&kb, &x) == Tri::True, || {
        "(∗) does not hold".into()
    })?;
    ensure(kb.bf(&low) == BfState::Zero, || {
        format!("d = 0 side is {}", kb.bf(&low))
    })?;
    ensure(
        kb.fact(&low)
            .unwrap()
            .why
            .iter()
            .any(|j| j.rule == "vanishing-transfer"),
        || "Zero was not justified by the torsion transfer".into(),
    )?;

    // d = 3 → d = 1: the transfer map itself is zero, nothing known upstairs.
    let mut kb = KnowledgeBase::new();
    kb.add_manifold(diag(6, 2)).map_err(err)?;
    let x = FactKey::new("D6_2", vec![3, 3, 3, 3, 3, 1, 1, 1]);
    kb.assert_fact(&x, BfState::Unknown, SwFact::Unknown, "synthetic")
        .map_err(err)?;
    let low = kb.declare_blowup(&x, 1).map_err(err)?;
    infer_all(&mut kb)?;
    ensure(kb.fact(&x).and_then(|f| f.d) == Some(3), || {
        "source is not at d = 3".into()
    })?;
    ensure(kb.fact(&low).and_then(|f| f.d) == Some(1), || {
        "target is not at d = 1".into()
    })?;
    ensure(kb.bf(&low) == BfState::Zero, || {
        format!("d = 1 side is {}", kb.bf(&low))
    })?;
    ensure(
        kb.fact(&low)
            .unwrap()
            .why
            .iter()
            .any(|j| j.rule == "transfer-map"),
        || "Zero was not justified by the zero transfer map".into(),
    )?;

    // Equal dimensions copy every state in both directions.
    for state in [BfState::Zero, BfState::Nonzero, BfState::NonzeroTorsion] {
        for r in [0, -1] {
            for upstairs in [true, false] {
                let mut kb = KnowledgeBase::new();
                kb.add_manifold(diag(3, 2)).map_err(err)?;
                let x = FactKey::new("D3_2", vec![3, 3, 3, 1, 1]);
                let y = kb.declare_blowup(&x, r).map_err(err)?;
                let (from, to) = if upstairs { (&x, &y) } else { (&y, &x) };
                kb.assert_fact(from, state, SwFact::Unknown, "synthetic")
                    .map_err(err)?;
                infer_all(&mut kb)?;
                ensure(kb.bf(to) == state, || {
                    format!("{state} did not copy (r = {r})")
                })?;
            }
        }
    }
    Ok(())
}

fn three_h() -> ManifoldDescriptor {
    let h = hyperbolic();
    let q = IntMatrix::block_diagonal(&IntMatrix::block_diagonal(&h, &h), &h);
    ManifoldDescriptor::closed("Y", 0, q).unwrap()
}

fn basic_classes_check() -> Result<(), String> {
    let err = |e: Error| e.to_string();
    for k in 0..=6usize {
        let mut kb = KnowledgeBase::new();
        let base = k3_canonical(&mut kb).map_err(err)?;
        let got = blowup_basic_classes(&mut kb, &base, k).map_err(err)?;
        let signs: std::collections::BTreeSet<Vec<i64>> =
            got.iter().map(|g| g.c1[22..].to_vec()).collect();
        ensure(got.len() == 1 << k && signs.len() == 1 << k, || {
            format!("k = {k}: {} classes", got.len())
        })?;
        ensure(signs.iter().all(|s| s.iter().all(|c| c.abs() == 1)), || {
            format!("k = {k}: a coefficient is not ±1")
        })?;
        ensure(
            got.iter().all(|g| g.c1[..22].iter().all(|&c| c == 0)),
            || "K3 part moved".into(),
        )?;
        ensure(basic_classes(&kb, &got[0].manifold).len() == 1 << k, || {
            "extra basic classes".into()
        })?;
    }
    // Y = 3H with basic classes ±K, K = (2,4,0,0,0,0), fishtail fiber f = e₂.
    for p in 1..=5i64 {
        let mut kb = KnowledgeBase::new();
        kb.add_manifold(three_h().with_h1_no_2torsion(true))
            .map_err(err)?;
        let kc = vec![2, 4, 0, 0, 0, 0];
        let minus: Vec<i64> = kc.iter().map(|v| -v).collect();
        for c in [kc.clone(), minus.clone()] {
            kb.assert_fact(
                &FactKey::new("Y", c),
                BfState::Unknown,
                SwFact::Value(1),
                "synthetic",
            )
            .map_err(err)?;
        }
        let fish = SurfaceData::immersed_sphere(vec![0, 0, 1, 0, 0, 0], 1, 0);
        let got = basic_classes_log_transform(&mut kb, "Y", &fish, p).map_err(err)?;
        ensure(got.len() as i64 == 2 * p, || {
            format!("p = {p}: {} classes, expected {}", got.len(), 2 * p)
        })?;
        let expected: Vec<i64> = (0..p).map(|j| 2 * j - (p - 1)).collect();
        for base in [&kc, &minus] {
            let mut coeffs: Vec<i64> = got
                .iter()
                .filter(|(key, _)| {
                    key.c1
                        .iter()
                        .enumerate()
                        .all(|(i, &v)| i == 2 || v == base[i] * p)
                })
                .map(|(key, _)| key.c1[2])
                .collect();
            coeffs.sort();
            ensure(coeffs == expected, || {
                format!("p = {p}: coefficients {coeffs:?}, expected {expected:?}")
            })?;
        }
    }
    Ok(())
}

// Applies the first derivation that changes anything, then starts over.
fn naive(kb: &mut KnowledgeBase) -> Result<(), Error> {
    'outer: loop {
        for r in all_rules() {
            for d in (r.run)(kb) {
                if kb.apply(&d)? {
                    continue 'outer;
                }
            }
        }
        return Ok(());
    }
}

type Snapshot = (
    Vec<(FactKey, BfState, SwFact)>,
    Vec<(String, Vec<(FlagKind, bool)>)>,
);

fn snapshot(kb: &KnowledgeBase) -> Snapshot {
    let facts = kb.facts().map(|(k, f)| (k.clone(), f.bf, f.sw)).collect();
    let flags = kb
        .manifolds()
        .map(|e| {
            (
                e.descriptor.name.clone(),
                e.flags.iter().map(|(k, v)| (*k, *v)).collect(),
            )
        })
        .collect();
    (facts, flags)
}

fn random_kb(rng: &mut ChaCha8Rng) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    let m = rng.gen_range(1..=5);
    let w = sum_k3_canonical(&mut kb, m).unwrap();
    if rng.gen_bool(0.5) {
        let r = rng.gen_range(-2..=2);
        kb.declare_blowup(&w, r).unwrap();
    } else {
        kb.add_manifold(three_h()).unwrap();
        let key = FactKey::new("Y", vec![2, 4, 0, 0, 0, 0]);
        let sw = match rng.gen_range(0..3) {
            0 => SwFact::Value(1),
            1 => SwFact::Parity(Parity::Even),
            _ => SwFact::Unknown,
        };
        let bf = if rng.gen_bool(0.2) {
            BfState::Nonzero
        } else {
            BfState::Unknown
        };
        kb.assert_fact(&key, bf, sw, "random").unwrap();
        if rng.gen_bool(0.5) {
            kb.assert_flag("Y", FlagKind::BlowupSimple, true).unwrap();
        }
        let k = k3_canonical(&mut kb).unwrap();
        kb.declare_connected_sum(&[key, k], Some("Y#K3")).unwrap();
    }
    kb
}

fn oracle_agreement() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in 0..50 {
        let kb = random_kb(&mut rng);
        ensure(kb.manifold_names().len() <= 5, || {
            format!("case {t} has too many manifolds")
        })?;
        let fast = infer(&kb, Execution::Parallel);
        let seq = infer(&kb, Execution::Sequential);
        let mut slow = kb.clone();
        match (fast, seq, naive(&mut slow)) {
            (Ok(f), Ok(s), Ok(())) => {
                ensure(snapshot(&f) == snapshot(&slow), || {
                    format!("case {t}: naive oracle disagrees")
                })?;
                ensure(snapshot(&f) == snapshot(&s), || {
                    format!("case {t}: execution modes disagree")
                })?;
                let again = infer(&f, Execution::Parallel).map_err(|e| e.to_string())?;
                ensure(snapshot(&again) == snapshot(&f), || {
                    format!("case {t}: not idempotent")
                })?;
            }
            (Err(_), Err(_), Err(_)) => {}
            _ => return Err(format!("case {t}: only some paths reported inconsistency")),
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let mut report = Report {
        failures: Vec::new(),
    };
    report.check(
        "1 golden Hurewicz table",
        Some(Duration::from_secs(1)),
        golden,
    );
    report.check(
        "2 stunted LES sweep is unambiguous",
        Some(Duration::from_secs(5)),
        stunted,
    );
    report.check("3 stem composition laws", None, stems);
    report.check("4 Smith normal form and kernels", None, snf);
    report.check("5 dimension formulas", None, dimensions);
    report.check(
        "6 K3 sum criterion",
        Some(Duration::from_secs(1)),
        sum_criterion,
    );
    report.check("7 transfer along common complements", None, transfer);
    report.check(
        "8 basic classes under blowup and log transform",
        None,
        basic_classes_check,
    );
    report.check(
        "9 inference matches the naive oracle",
        None,
        oracle_agreement,
    );
    assert!(report.failures.is_empty(), "failed: {:?}", report.failures);
}
