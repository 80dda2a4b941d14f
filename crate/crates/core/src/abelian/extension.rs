use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::group::FgAbGroup;
use super::matrix::IntMatrix;

/// Middle groups `G` fitting into `0 → sub → G → quot → 0`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtensionResult {
    Unique(FgAbGroup),
    /// All isomorphism types that occur, sorted; at least two.
    Ambiguous(Vec<FgAbGroup>),
}

impl ExtensionResult {
    pub fn unique(&self) -> Option<&FgAbGroup> {
        match self {
            ExtensionResult::Unique(g) => Some(g),
            ExtensionResult::Ambiguous(_) => None,
        }
    }

    pub fn is_ambiguous(&self) -> bool {
        matches!(self, ExtensionResult::Ambiguous(_))
    }

    pub fn candidates(&self) -> Vec<FgAbGroup> {
        match self {
            ExtensionResult::Unique(g) => vec![g.clone()],
            ExtensionResult::Ambiguous(v) => v.clone(),
        }
    }
}

impl fmt::Display for ExtensionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionResult::Unique(g) => write!(f, "{g}"),
            ExtensionResult::Ambiguous(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "ambiguous {{{}}}", parts.join(", "))
            }
        }
    }
}

impl fmt::Debug for ExtensionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Upper bound on the number of extension classes enumerated.
const MAX_CLASSES: u64 = 1 << 16;

/// Every isomorphism type of extension of `quot` by `sub`.
///
/// Ext¹(quot, sub) = ⊕ⱼ sub / qⱼ·sub over the torsion generators of `quot`.
/// Each class `(eⱼ)` gives the middle group
/// `(sub ⊕ ℤ^{t}) / ⟨qⱼ gⱼ − eⱼ⟩ ⊕ ℤ^{free(quot)}`; the distinct results are
/// collected.
pub fn classify_extension(sub: &FgAbGroup, quot: &FgAbGroup) -> ExtensionResult {
    if sub.is_trivial() {
        return ExtensionResult::Unique(quot.clone());
    }
    if quot.is_trivial() || quot.is_torsion_free() {
        return ExtensionResult::Unique(sub.direct_sum(quot));
    }

    let s_orders = sub.generator_orders();
    let q_tors = quot.torsion();
    // For each quotient torsion generator, the representative range per sub coordinate.
    let ranges: Vec<Vec<u64>> = q_tors
        .iter()
        .map(|&q| {
            s_orders
                .iter()
                .map(|&s| if s == 0 { q } else { num_integer::gcd(q, s) })
                .collect()
        })
        .collect();
    let total: u64 = ranges
        .iter()
        .flatten()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r))
        .unwrap_or(u64::MAX);
    assert!(
        total <= MAX_CLASSES,
        "extension enumeration too large ({total} classes)"
    );

    let ns = sub.ngens();
    let nt = q_tors.len();
    let n = ns + nt;
    let sub_rel = sub.relation_matrix();
    let mut found = BTreeSet::new();
    let flat: Vec<u64> = ranges.iter().flatten().copied().collect();
    let mut digits = vec![0u64; flat.len()];
    loop {
        let mut cols: Vec<Vec<i64>> = (0..sub_rel.cols())
            .map(|j| {
                let mut c = sub_rel.column(j);
                c.resize(n, 0);
                c
            })
            .collect();
        for (jq, &q) in q_tors.iter().enumerate() {
            let mut c = vec![0i64; n];
            for i in 0..ns {
                c[i] = -(digits[jq * ns + i] as i64);
            }
            c[ns + jq] = q as i64;
            cols.push(c);
        }
        let middle = FgAbGroup::from_presentation(&IntMatrix::from_columns(n, &cols))
            .direct_sum(&FgAbGroup::free(quot.free_rank()));
        found.insert(middle);

        // Odometer increment.
        let mut k = 0;
        loop {
            if k == digits.len() {
                return finish(found);
            }
            digits[k] += 1;
            if digits[k] < flat[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn finish(found: BTreeSet<FgAbGroup>) -> ExtensionResult {
    let mut v: Vec<FgAbGroup> = found.into_iter().collect();
    if v.len() == 1 {
        ExtensionResult::Unique(v.remove(0))
    } else {
        ExtensionResult::Ambiguous(v)
    }
}
