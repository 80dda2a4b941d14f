use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::abelian::{
    classify_extension, cokernel_presented, kernel_presented, ExtensionResult, FgAbGroup, IntMatrix,
};
use crate::cells::StableComplex;
use crate::error::{Error, Result};
use crate::stems::{precomposition_map, stem_group_known};

/// A cohomotopy group together with the exact-sequence steps that produced it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CohomotopyResult {
    pub group: ExtensionResult,
    pub derivation: Vec<String>,
}

impl CohomotopyResult {
    pub fn unique(&self) -> Option<&FgAbGroup> {
        self.group.unique()
    }

    pub fn is_ambiguous(&self) -> bool {
        self.group.is_ambiguous()
    }
}

/// `π^m(X)` from the cofibre sequence of a split `A ⊂ X → X/A` in which both
/// `A` (a prefix of the cells) and `X/A` are wedges of spheres:
///
/// `π^{m−1}(A) →δ π^m(X/A) → π^m(X) → π^m(A) →δ π^{m+1}(X/A)`.
///
/// Every valid split is evaluated and the candidate sets are intersected, so
/// a group is reported as unique whenever any split pins it down.
pub fn complex_cohomotopy(x: &StableComplex, m: i64) -> Result<CohomotopyResult> {
    let len = x.cells().len();
    let splits: Vec<usize> = (1..=len)
        .rev()
        .filter(|&p| x.is_wedge_on(0..p) && x.is_wedge_on(p..len))
        .collect();
    if splits.is_empty() {
        return Err(Error::Indeterminate(format!(
            "{x} has no split into two wedges of spheres"
        )));
    }

    let mut derivation = vec![format!("π^{m}({x})")];
    let mut candidates: Option<BTreeSet<FgAbGroup>> = None;
    let mut first_err = None;
    for p in splits {
        match split_sequence(x, m, p) {
            Ok((ext, steps)) => {
                derivation.extend(steps);
                let set: BTreeSet<FgAbGroup> = ext.candidates().into_iter().collect();
                candidates = Some(match candidates {
                    None => set,
                    Some(prev) => prev.intersection(&set).cloned().collect(),
                });
            }
            Err(e) => {
                derivation.push(format!("  split at {p}: {e}"));
                first_err.get_or_insert(e);
            }
        }
    }
    let Some(cands) = candidates else {
        return Err(first_err.expect("at least one split was tried"));
    };
    let mut v: Vec<FgAbGroup> = cands.into_iter().collect();
    let group = match v.len() {
        0 => {
            return Err(Error::Indeterminate(format!(
                "splits of {x} disagree in degree {m}"
            )))
        }
        1 => ExtensionResult::Unique(v.remove(0)),
        _ => ExtensionResult::Ambiguous(v),
    };
    derivation.push(format!("  result: {group}"));
    Ok(CohomotopyResult { group, derivation })
}

/// Order of a cyclic stem group: `0` for ℤ, `1` for the trivial group.
fn cyclic_order(g: &FgAbGroup) -> u64 {
    if g.free_rank() > 0 {
        0
    } else {
        g.torsion().first().copied().unwrap_or(1)
    }
}

fn split_sequence(x: &StableComplex, m: i64, p: usize) -> Result<(ExtensionResult, Vec<String>)> {
    let dims = x.dims();
    let (a_dims, q_dims) = dims.split_at(p);
    let mut steps = vec![format!(
        "  split A = {:?}, X/A = {:?}",
        a_dims.iter().map(|d| format!("S^{d}")).collect::<Vec<_>>(),
        q_dims.iter().map(|d| format!("S^{d}")).collect::<Vec<_>>()
    )];

    // coker(δ : π^{m−1}(A) → π^m(X/A)); the target must be fully known.
    let (mat, src, tgt) = delta(x, p, m - 1, false, true)?;
    let sub = cokernel_presented(&mat, &tgt);
    steps.push(format!(
        "  δ: π^{}(A) {:?} → π^{m}(X/A) {:?}, matrix {:?}; coker = {sub}",
        m - 1,
        src,
        tgt,
        mat.to_rows()
    ));

    // ker(δ : π^m(A) → π^{m+1}(X/A)); the source must be fully known.
    let (mat, src, tgt) = delta(x, p, m, true, false)?;
    let quot = kernel_presented(&mat, &src, &tgt);
    steps.push(format!(
        "  δ: π^{m}(A) {:?} → π^{}(X/A) {:?}, matrix {:?}; ker = {quot}",
        src,
        m + 1,
        tgt,
        mat.to_rows()
    ));

    let ext = classify_extension(&sub, &quot);
    steps.push(format!("  0 → {sub} → π^{m}(X) → {quot} → 0 gives {ext}"));
    Ok((ext, steps))
}

/// Matrix of `δ : π^k(A) → π^{k+1}(X/A)` in the summand bases, plus the
/// summand orders. Unknown summands are tolerated only when every block
/// touching them is forced to vanish, unless the caller requires that side.
fn delta(
    x: &StableComplex,
    p: usize,
    k: i64,
    need_source: bool,
    need_target: bool,
) -> Result<(IntMatrix, Vec<u64>, Vec<u64>)> {
    let cells = x.cells();
    let len = cells.len();
    let src_groups: Vec<(i64, Option<FgAbGroup>)> = (0..p)
        .map(|a| {
            let deg = cells[a].dim - k;
            (deg, stem_group_known(deg))
        })
        .collect();
    let tgt_groups: Vec<(i64, Option<FgAbGroup>)> = (p..len)
        .map(|q| {
            let deg = cells[q].dim - k - 1;
            (deg, stem_group_known(deg))
        })
        .collect();

    let require = |side: &[(i64, Option<FgAbGroup>)], needed: bool| -> Result<()> {
        if needed {
            if let Some((deg, _)) = side.iter().find(|(_, g)| g.is_none()) {
                return Err(Error::StemRangeExceeded(*deg));
            }
        }
        Ok(())
    };
    require(&src_groups, need_source)?;
    require(&tgt_groups, need_target)?;

    let nontrivial = |g: &Option<FgAbGroup>| g.as_ref().is_none_or(|g| !g.is_trivial());
    let mut mat = IntMatrix::zeros(len - p, p);
    for (qi, q) in (p..len).enumerate() {
        for a in 0..p {
            let Some(phi) = x.attaching(q, a) else {
                continue;
            };
            let (sd, sg) = &src_groups[a];
            let (td, tg) = &tgt_groups[qi];
            if !nontrivial(sg) || !nontrivial(tg) {
                continue;
            }
            if sg.is_none() {
                return Err(Error::StemRangeExceeded(*sd));
            }
            if tg.is_none() {
                return Err(Error::StemRangeExceeded(*td));
            }
            let block = precomposition_map(phi, *sd)?;
            mat[(qi, a)] = block.matrix()[(0, 0)];
        }
    }
    let orders = |side: &[(i64, Option<FgAbGroup>)]| -> Vec<u64> {
        side.iter()
            .map(|(_, g)| g.as_ref().map_or(1, cyclic_order))
            .collect()
    };
    Ok((mat, orders(&src_groups), orders(&tgt_groups)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::cp_stunted;

    #[test]
    fn sphere_in_its_own_degree() {
        let r = complex_cohomotopy(&StableComplex::sphere(10), 10).unwrap();
        assert_eq!(r.unique(), Some(&FgAbGroup::integers()));
    }

    #[test]
    fn eta_attached_kills_degree_2n_minus_1() {
        for n in [4, 6, 10] {
            let x = cp_stunted(n, 2).unwrap();
            let r = complex_cohomotopy(&x, 2 * n - 1).unwrap();
            assert_eq!(r.unique(), Some(&FgAbGroup::trivial()), "n = {n}");
        }
    }

    #[test]
    fn wedge_in_degree_nine() {
        let x: StableComplex = "S8,S10".parse().unwrap();
        let r = complex_cohomotopy(&x, 9).unwrap();
        assert_eq!(r.unique(), Some(&FgAbGroup::cyclic(2)));
    }

    #[test]
    fn seven_three() {
        let x = cp_stunted(7, 3).unwrap();
        assert_eq!(
            complex_cohomotopy(&x, 11).unwrap().unique(),
            Some(&FgAbGroup::cyclic(8))
        );
    }

    #[test]
    fn unknown_stems_are_reported() {
        // π^0(S^8) needs π^S_8.
        let x = StableComplex::sphere(8);
        assert_eq!(
            complex_cohomotopy(&x, 0).unwrap_err(),
            Error::StemRangeExceeded(8)
        );
    }

    #[test]
    fn derivation_is_recorded() {
        let r = complex_cohomotopy(&cp_stunted(6, 3).unwrap(), 9).unwrap();
        assert!(r.derivation.len() >= 4);
        assert!(r.derivation.iter().any(|l| l.contains("coker")));
    }
}
