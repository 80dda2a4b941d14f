use num_integer::Integer;

use super::matrix::IntMatrix;

/// Result of a Smith normal form reduction: `u · a · v == d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries, in order. They form a divisibility chain.
    pub fn invariants(&self) -> Vec<i64> {
        let k = self.d.rows().min(self.d.cols());
        (0..k)
            .map(|i| self.d[(i, i)])
            .take_while(|&x| x != 0)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

/// Smith normal form with unimodular transforms.
///
/// Alternates column and row Hermite reductions until the matrix is
/// diagonal, then fixes the divisibility chain with 2×2 Bezout steps.
/// Off-pivot entries are reduced at every step, which keeps the transforms
/// bounded by the minors of `a` instead of by the length of the Euclid chains.
/// Work is done in `i128`; a transform entry outside `i64` panics.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut d = Work::from(a);
    let mut u = Work::identity(m);
    let mut v = Work::identity(n);

    loop {
        column_hermite(&mut d, &mut v);
        if d.is_diagonal() {
            break;
        }
        let mut dt = d.transpose();
        let mut ut = u.transpose();
        column_hermite(&mut dt, &mut ut);
        d = dt.transpose();
        u = ut.transpose();
        if d.is_diagonal() {
            break;
        }
    }

    let k = m.min(n);
    sort_diagonal(&mut d, &mut u, &mut v);

    let r = (0..k).take_while(|&i| d.at(i, i) != 0).count();
    for i in 0..r {
        for j in i + 1..r {
            let (x, y) = (d.at(i, i), d.at(j, j));
            if y % x == 0 {
                continue;
            }
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (x / g, y / g);
            // [s t; −y/g x/g] · diag(x, y) · [1 −t·y/g; 1 s·x/g] = diag(g, lcm)
            u.combine_rows(i, j, [s, t, -yg, xg]);
            v.combine_cols(i, j, [1, -t * yg, 1, s * xg]);
            d.set(i, i, g);
            d.set(j, j, x * yg);
        }
    }
    // Columns of `v` past the rank span ker(a), rows of `u` past it span the
    // left kernel. Shorten those bases and reduce the rest against them.
    reduce_against_kernel(&mut v, r);
    let mut ut = u.transpose();
    reduce_against_kernel(&mut ut, r);
    u = ut.transpose();
    let diag: Vec<i128> = (0..r).map(|i| d.at(i, i)).collect();
    balance(&mut u, &mut v, &diag);
    for i in 0..k {
        if d.at(i, i) < 0 {
            d.set(i, i, -d.at(i, i));
            u.negate_row(i);
        }
    }
    Smith {
        u: u.into_int(),
        d: d.into_int(),
        v: v.into_int(),
    }
}

/// Shrinks the transforms without changing `u · a · v`.
///
/// `col_j(v) += c·col_k(v)` together with `row_k(u) −= c·(d_k/d_j)·row_j(u)`
/// preserves the product whenever `d_j` divides `c·d_k`, and symmetrically
/// for rows of `u`. Each step is taken only if it lowers the combined
/// squared norm, so this terminates.
fn balance(u: &mut Work, v: &mut Work, diag: &[i128]) {
    let r = diag.len();
    let col = |w: &Work, j: usize| -> Vec<f64> { (0..w.rows).map(|i| w.at(i, j) as f64).collect() };
    let row = |w: &Work, i: usize| -> Vec<f64> { (0..w.cols).map(|j| w.at(i, j) as f64).collect() };
    for _ in 0..64 {
        let mut improved = false;
        for j in 0..r {
            for k in 0..r {
                if j == k {
                    continue;
                }
                let step = diag[j] / diag[j].gcd(&diag[k]);
                let ratio = |c: i128| c * diag[k] / diag[j];

                // Shorten column j of v.
                let (vj, vk, uj, uk) = (col(v, j), col(v, k), row(u, j), row(u, k));
                let c = step
                    * (-(dot(&vj, &vk)) / (step as f64 * dot(&vk, &vk).max(1.0))).round() as i128;
                if c != 0 {
                    let cf = c as f64;
                    let rf = ratio(c) as f64;
                    let gain = dot(&vj, &vj)
                        - (dot(&vj, &vj) + 2.0 * cf * dot(&vj, &vk) + cf * cf * dot(&vk, &vk))
                        + dot(&uk, &uk)
                        - (dot(&uk, &uk) - 2.0 * rf * dot(&uk, &uj) + rf * rf * dot(&uj, &uj));
                    if gain > 0.5 {
                        v.add_col_multiple(j, k, c);
                        u.add_row_multiple(k, j, -ratio(c));
                        improved = true;
                    }
                }

                // Shorten row j of u.
                let (vj, vk, uj, uk) = (col(v, j), col(v, k), row(u, j), row(u, k));
                let a = step
                    * (-(dot(&uj, &uk)) / (step as f64 * dot(&uk, &uk).max(1.0))).round() as i128;
                if a != 0 {
                    let af = a as f64;
                    let rf = ratio(a) as f64;
                    let gain = dot(&uj, &uj)
                        - (dot(&uj, &uj) + 2.0 * af * dot(&uj, &uk) + af * af * dot(&uk, &uk))
                        + dot(&vk, &vk)
                        - (dot(&vk, &vk) - 2.0 * rf * dot(&vk, &vj) + rf * rf * dot(&vj, &vj));
                    if gain > 0.5 {
                        u.add_row_multiple(j, k, a);
                        v.add_col_multiple(k, j, -ratio(a));
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// LLL-reduces columns `r..` of `w` and size-reduces columns `..r` against
/// them. Gram-Schmidt data is floating point; it only steers the choice of
/// integer column operations, so exactness is unaffected.
fn reduce_against_kernel(w: &mut Work, r: usize) {
    let basis: Vec<usize> = (r..w.cols).collect();
    if basis.is_empty() {
        return;
    }
    lll(w, &basis);
    let (gs, norms) = gram_schmidt(w, &basis);
    for j in 0..r {
        for l in (0..basis.len()).rev() {
            if norms[l] == 0.0 {
                continue;
            }
            let mu = (0..w.rows)
                .map(|i| w.at(i, j) as f64 * gs[l][i])
                .sum::<f64>()
                / norms[l];
            let q = mu.round() as i128;
            if q != 0 {
                w.add_col_multiple(j, basis[l], -q);
            }
        }
    }
}

fn gram_schmidt(w: &Work, cols: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut gs: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    let mut norms = Vec::with_capacity(cols.len());
    for &c in cols {
        let mut b: Vec<f64> = (0..w.rows).map(|i| w.at(i, c) as f64).collect();
        for (g, &n) in gs.iter().zip(&norms) {
            if n == 0.0 {
                continue;
            }
            let mu = dot(&b, g) / n;
            for (x, y) in b.iter_mut().zip(g) {
                *x -= mu * y;
            }
        }
        norms.push(dot(&b, &b));
        gs.push(b);
    }
    (gs, norms)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Textbook LLL with δ = 3/4 on the given columns.
fn lll(w: &mut Work, cols: &[usize]) {
    let n = cols.len();
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            return;
        }
        for j in (0..k).rev() {
            let (gs, norms) = gram_schmidt(w, cols);
            if norms[j] == 0.0 {
                continue;
            }
            let bk: Vec<f64> = (0..w.rows).map(|i| w.at(i, cols[k]) as f64).collect();
            let q = (dot(&bk, &gs[j]) / norms[j]).round() as i128;
            if q != 0 {
                w.add_col_multiple(cols[k], cols[j], -q);
            }
        }
        let (gs, norms) = gram_schmidt(w, cols);
        let bk: Vec<f64> = (0..w.rows).map(|i| w.at(i, cols[k]) as f64).collect();
        let mu = if norms[k - 1] == 0.0 {
            0.0
        } else {
            dot(&bk, &gs[k - 1]) / norms[k - 1]
        };
        if norms[k] >= (0.75 - mu * mu) * norms[k - 1] {
            k += 1;
        } else {
            w.swap_cols(cols[k], cols[k - 1]);
            k = (k - 1).max(1);
        }
    }
}

/// Moves nonzero diagonal entries to the front, keeping their order.
fn sort_diagonal(d: &mut Work, u: &mut Work, v: &mut Work) {
    let k = d.rows.min(d.cols);
    let mut next = 0;
    for i in 0..k {
        if d.at(i, i) != 0 {
            if i != next {
                d.swap_rows(i, next);
                d.swap_cols(i, next);
                u.swap_rows(i, next);
                v.swap_cols(i, next);
            }
            next += 1;
        }
    }
}

/// Column Hermite form: column operations (mirrored into `v`) make `d`
/// lower echelon with positive pivots and entries left of each pivot
/// reduced modulo it.
fn column_hermite(d: &mut Work, v: &mut Work) {
    let mut c = 0;
    for i in 0..d.rows {
        if c == d.cols {
            break;
        }
        for k in c + 1..d.cols {
            let (x, y) = (d.at(i, c), d.at(i, k));
            if y == 0 {
                continue;
            }
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            // New columns: c ← s·c + t·k, k ← −(y/g)·c + (x/g)·k.
            let m = [s, -y / g, t, x / g];
            d.combine_cols(c, k, m);
            v.combine_cols(c, k, m);
        }
        let p = d.at(i, c);
        if p == 0 {
            continue;
        }
        if p < 0 {
            d.negate_col(c);
            v.negate_col(c);
        }
        let p = d.at(i, c);
        for k in 0..c {
            let q = Integer::div_floor(&d.at(i, k), &p);
            if q != 0 {
                d.add_col_multiple(k, c, -q);
                v.add_col_multiple(k, c, -q);
            }
        }
        c += 1;
    }
}

/// Dense `i128` scratch matrix for the reduction.
#[derive(Clone)]
struct Work {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl Work {
    fn from(a: &IntMatrix) -> Self {
        let data = (0..a.rows())
            .flat_map(|i| a.row(i).iter().map(|&x| x as i128).collect::<Vec<_>>())
            .collect();
        Work {
            rows: a.rows(),
            cols: a.cols(),
            data,
        }
    }

    fn identity(n: usize) -> Self {
        let mut w = Work {
            rows: n,
            cols: n,
            data: vec![0; n * n],
        };
        for i in 0..n {
            w.set(i, i, 1);
        }
        w
    }

    fn at(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = x;
    }

    fn transpose(&self) -> Self {
        let mut t = Work {
            rows: self.cols,
            cols: self.rows,
            data: vec![0; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.at(i, j) == 0))
    }

    /// Columns `(a, b) ← (m₀·a + m₂·b, m₁·a + m₃·b)`.
    fn combine_cols(&mut self, a: usize, b: usize, m: [i128; 4]) {
        for i in 0..self.rows {
            let (x, y) = (self.at(i, a), self.at(i, b));
            self.set(i, a, lin(m[0], x, m[2], y));
            self.set(i, b, lin(m[1], x, m[3], y));
        }
    }

    /// Rows `(a, b) ← (m₀·a + m₁·b, m₂·a + m₃·b)`.
    fn combine_rows(&mut self, a: usize, b: usize, m: [i128; 4]) {
        for j in 0..self.cols {
            let (x, y) = (self.at(a, j), self.at(b, j));
            self.set(a, j, lin(m[0], x, m[1], y));
            self.set(b, j, lin(m[2], x, m[3], y));
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, k: i128) {
        for i in 0..self.rows {
            let v = lin(1, self.at(i, dst), k, self.at(i, src));
            self.set(i, dst, v);
        }
    }

    fn add_row_multiple(&mut self, dst: usize, src: usize, k: i128) {
        for j in 0..self.cols {
            let v = lin(1, self.at(dst, j), k, self.at(src, j));
            self.set(dst, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self.set(i, j, -self.at(i, j));
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.set(i, j, -self.at(i, j));
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn into_int(self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| {
            i64::try_from(self.at(i, j)).expect("integer overflow in exact arithmetic")
        })
    }
}

fn lin(a: i128, x: i128, b: i128, y: i128) -> i128 {
    a.checked_mul(x)
        .and_then(|p| b.checked_mul(y).and_then(|q| p.checked_add(q)))
        .expect("integer overflow in exact arithmetic")
}

/// Basis of the integer nullspace `{x : a·x = 0}`, as columns, each with
/// its first nonzero entry positive.
pub fn integer_nullspace(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let r = s.rank();
    let columns: Vec<Vec<i64>> = (r..a.cols())
        .map(|j| {
            let c = s.v.column(j);
            match c.iter().find(|&&x| x != 0) {
                Some(&x) if x < 0 => c.iter().map(|y| -y).collect(),
                _ => c,
            }
        })
        .collect();
    IntMatrix::from_columns(a.cols(), &columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> Smith {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.determinant().abs(), 1);
        assert_eq!(s.v.determinant().abs(), 1);
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        s
    }

    #[test]
    fn small_cases() {
        assert_eq!(check(&IntMatrix::identity(2)).d, IntMatrix::identity(2));
        assert!(check(&IntMatrix::zeros(2, 3)).d.is_zero());
        let s = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.invariants(), vec![2, 4]);
    }

    #[test]
    fn empty_shapes() {
        check(&IntMatrix::zeros(0, 3));
        check(&IntMatrix::zeros(3, 0));
        check(&IntMatrix::zeros(0, 0));
    }

    #[test]
    fn coprime_entries_collapse() {
        let s = check(&IntMatrix::diagonal(&[4, 6]));
        assert_eq!(s.invariants(), vec![2, 12]);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = integer_nullspace(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
    }
}
