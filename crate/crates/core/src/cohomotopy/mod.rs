//! Stable cohomotopy of small complexes and of `ℂPⁿ` near the top cell,
//! the Hurewicz kernel/cokernel tables, and restriction maps.

mod les;

use num_integer::gcd;
use serde::{Deserialize, Serialize};

use crate::abelian::{FgAbGroup, GroupHom, IntMatrix};
use crate::cells::cp_stunted;
use crate::error::{Error, Result};
use crate::par::{map_collect, Execution};

pub use les::{complex_cohomotopy, CohomotopyResult};

/// Kernel and cokernel of `h : π^{2n−j}(ℂPⁿ) → H^{2n−j}(ℂPⁿ)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HurewiczData {
    pub kernel: FgAbGroup,
    pub cokernel: FgAbGroup,
}

/// Largest `j` covered by the tables.
pub const MAX_J: i64 = 6;

/// Smallest `n` for which the `j` column is exposed.
pub fn min_n(j: i64) -> Option<i64> {
    match j {
        0..=2 => Some(j + 1),
        3..=MAX_J => Some(4),
        _ => None,
    }
}

fn check_range(n: i64, j: i64) -> Result<()> {
    match min_n(j) {
        Some(lo) if n >= lo => Ok(()),
        Some(lo) => Err(Error::OutOfRange(format!(
            "the j = {j} column needs n >= {lo}, got n = {n}"
        ))),
        None => Err(Error::OutOfRange(format!("j = {j} is outside 0..=6"))),
    }
}

fn g(a: i64, b: i64) -> u64 {
    gcd(a, b).unsigned_abs()
}

/// Closed forms for the Hurewicz kernel and cokernel in degree `2n − j`.
pub fn hurewicz_table(n: i64, j: i64) -> Result<HurewiczData> {
    check_range(n, j)?;
    let even = n % 2 == 0;
    let c = FgAbGroup::cyclic;
    let (kernel, cokernel) = match j {
        0 => (c(1), c(1)),
        1 => (c(g(2, n + 1)), c(1)),
        2 => (c(g(2, n - 1)), c(g(2, n))),
        3 if even => (c(g(24, n - 2) / 2), c(1)),
        3 => (c(g(24, n + 1)), c(1)),
        4 if even => (c(1), c(24 / g(24, n - 2))),
        4 => (c(1), c(48 / g(24, n + 1))),
        5 if even => (c(g(24, n)), c(1)),
        5 => (c(g(24, n - 3) / 2), c(1)),
        6 if even => (c(1), c(48 / g(24, n))),
        _ => (c(1), c(24 / g(24, n - 3))),
    };
    Ok(HurewiczData { kernel, cokernel })
}

/// `π^{2n−j}(ℂPⁿ)`. Odd `j`: the Hurewicz kernel. Even `j`: the image is a
/// copy of ℤ and the extension splits.
pub fn cp_cohomotopy(n: i64, j: i64) -> Result<FgAbGroup> {
    let h = hurewicz_table(n, j)?;
    Ok(if j % 2 == 1 {
        h.kernel
    } else {
        FgAbGroup::integers().direct_sum(&h.kernel)
    })
}

/// Restriction `π^{2n−j}(ℂPⁿ) → π^{2n−j}(ℂP^{n−s})` along the inclusion.
///
/// The target is `cp_cohomotopy(n − s, j − 2s)`, or the trivial group once
/// `2n − j` exceeds the dimension of `ℂP^{n−s}`. Pairs with no known answer
/// return `Unsupported`.
pub fn restriction_map(n: i64, j: i64, s: i64) -> Result<GroupHom> {
    if s < 0 {
        return Err(Error::OutOfRange(format!("negative step {s}")));
    }
    let source = cp_cohomotopy(n, j)?;
    if s == 0 {
        return Ok(GroupHom::identity(source));
    }
    let tj = j - 2 * s;
    if tj < 0 {
        return Ok(GroupHom::zero(source, FgAbGroup::trivial()));
    }
    let target = if (n - s, tj) == (2, 2) {
        // π²(ℂP²) ≅ ℤ, sitting with index 2 in H². Only the (6,2) map at n = 4 lands here.
        FgAbGroup::integers()
    } else {
        cp_cohomotopy(n - s, tj)?
    };
    let even = n % 2 == 0;
    let free_to_free = |k: i64| -> Result<GroupHom> {
        // Free generator to `k` times the free generator, torsion to zero.
        let m = IntMatrix::from_fn(target.ngens(), source.ngens(), |r, c| {
            if r == 0 && c == 0 {
                k
            } else {
                0
            }
        });
        Ok(GroupHom::new(source.clone(), target.clone(), m)?)
    };
    match (j, s) {
        (3, 1) | (5, 2) => Ok(GroupHom::zero(source, target)),
        (5, 1) => {
            if source != target {
                return Err(Error::Inconsistent(format!(
                    "restriction (n={n}, j=5) should be an isomorphism, got {source} → {target}"
                )));
            }
            Ok(GroupHom::identity(source))
        }
        (6, 1) => free_to_free(1),
        (6, 2) if even => free_to_free(24 / gcd(24, n)),
        (6, 2) => free_to_free(24 / gcd(24, n - 3)),
        // Top-cell cases: Hurewicz on the smaller space is an isomorphism in
        // its top degree, so the map is `h` itself.
        (2, 1) | (4, 2) | (6, 3) => {
            let coker = hurewicz_table(n, j)?.cokernel;
            free_to_free(coker.order().expect("finite cokernel") as i64)
        }
        _ => Err(Error::Unsupported(format!(
            "restriction π^{{2n-{j}}}(CP^n) → CP^(n-{s}) is not determined"
        ))),
    }
}

/// The `(n, j)` pairs of the golden table for `n` in `ns`.
pub fn table_cases(
    ns: std::ops::RangeInclusive<i64>,
    js: std::ops::RangeInclusive<i64>,
) -> Vec<(i64, i64)> {
    ns.flat_map(|n| js.clone().map(move |j| (n, j)))
        .filter(|&(n, j)| check_range(n, j).is_ok())
        .collect()
}

/// `hurewicz_table` over a batch.
pub fn golden_table(cases: &[(i64, i64)], exec: Execution) -> Vec<Result<HurewiczData>> {
    map_collect(exec, cases, |&(n, j)| hurewicz_table(n, j))
}

/// `π^{2n−j}` of the stunted space that carries the answer for `j ≤ 3`:
/// `ℂPⁿ_{j+1}`, capped at three cells. Cells below the cap only touch
/// negative stems in this degree.
pub fn stunted_cohomotopy(n: i64, j: i64) -> Result<CohomotopyResult> {
    if !(1..=3).contains(&j) {
        return Err(Error::OutOfRange(format!(
            "stunted model covers j in 1..=3, got {j}"
        )));
    }
    complex_cohomotopy(&cp_stunted(n, (j + 1).min(3))?, 2 * n - j)
}

/// `stunted_cohomotopy` over a batch.
pub fn les_sweep(cases: &[(i64, i64)], exec: Execution) -> Vec<Result<CohomotopyResult>> {
    map_collect(exec, cases, |&(n, j)| stunted_cohomotopy(n, j))
}
