use std::fmt;

use serde::{Deserialize, Serialize};

use super::infer::infer_in_place;
use super::kb::{FactKey, FlagKind, KnowledgeBase, Premise, Relation};
use super::state::{BfState, Parity, Tri};
use crate::error::{Error, Result};
use crate::fourman::{SurfaceData, SurfaceKind};
use crate::par::Execution;

/// `b₁ = 0`, `b₂⁺ ≥ 2`, `d ≤ 3`, and a torsion value when `d > 0`.
pub fn condition_star(kb: &KnowledgeBase, key: &FactKey) -> Tri {
    let Ok(x) = kb.manifold(&key.manifold) else {
        return Tri::Unknown;
    };
    if x.b1() != 0 || x.b2_plus() < 2 {
        return Tri::False;
    }
    let f = kb.fact(key);
    let d = match f.and_then(|f| f.d) {
        Some(d) => d,
        None => match crate::fourman::dimension_of_class(x, &key.c1) {
            Ok(d) => d,
            Err(_) => return Tri::Unknown,
        },
    };
    if d > 3 {
        return Tri::False;
    }
    if d <= 0 {
        return Tri::True;
    }
    match f.map_or(BfState::Unknown, |f| f.bf) {
        BfState::Zero | BfState::NonzeroTorsion => Tri::True,
        BfState::NonzeroFree => Tri::False,
        _ => Tri::Unknown,
    }
}

/// Nonzero facts on a manifold, i.e. its known basic classes.
pub fn basic_classes(kb: &KnowledgeBase, manifold: &str) -> Vec<FactKey> {
    kb.facts_on(manifold)
        .filter(|(_, f)| f.bf.is_nonzero())
        .map(|(k, _)| k.clone())
        .collect()
}

/// The smallest dimension carrying a nonzero invariant.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BfDim {
    Finite(i64),
    NegInfinity,
    PosInfinity,
    /// Not pinned down: at least `at_least`, and at most `at_most` when a
    /// nonzero fact is known.
    Bounded {
        at_least: i64,
        at_most: Option<i64>,
    },
}

impl fmt::Display for BfDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BfDim::Finite(d) => write!(f, "{d}"),
            BfDim::NegInfinity => f.write_str("-inf"),
            BfDim::PosInfinity => f.write_str("+inf"),
            BfDim::Bounded {
                at_least,
                at_most: None,
            } => write!(f, "Unknown (>= {at_least})"),
            BfDim::Bounded {
                at_least,
                at_most: Some(hi),
            } => write!(f, "Unknown ({at_least}..={hi})"),
        }
    }
}

const MAX_SPLIT_DEPTH: usize = 16;

fn dim_rec(kb: &KnowledgeBase, name: &str, depth: usize) -> Result<BfDim> {
    let x = kb.manifold(name)?;
    let (b1, bp, bm) = (x.b1(), x.b2_plus(), x.b2_minus());
    if bp == 0 {
        return Ok(if bm != 0 {
            BfDim::NegInfinity
        } else {
            BfDim::Finite(b1 - 1)
        });
    }
    if bp == 1 && b1 == 0 {
        return Ok(BfDim::PosInfinity);
    }
    let nonzero_min = kb
        .facts_on(name)
        .filter(|(_, f)| f.bf.is_nonzero())
        .filter_map(|(_, f)| f.d)
        .min();
    for d0 in kb.homogeneous_dims(name) {
        if nonzero_min == Some(d0) {
            return Ok(BfDim::Finite(d0));
        }
    }
    let mut lower = 0;
    if depth < MAX_SPLIT_DEPTH {
        for r in kb.relations() {
            let Relation::Split { whole, pieces, .. } = r else {
                continue;
            };
            if whole != name {
                continue;
            }
            let mut sum = pieces.len() as i64 - 1;
            let mut usable = true;
            for p in pieces {
                if kb.manifold(p)?.b2_plus() < 1 {
                    usable = false;
                    break;
                }
                match dim_rec(kb, p, depth + 1)? {
                    BfDim::PosInfinity => return Ok(BfDim::PosInfinity),
                    BfDim::Finite(d) => sum += d,
                    BfDim::Bounded { at_least, .. } => sum += at_least,
                    BfDim::NegInfinity => {
                        usable = false;
                        break;
                    }
                }
            }
            if usable {
                lower = lower.max(sum);
            }
        }
    }
    match nonzero_min {
        Some(d) if d <= lower => Ok(BfDim::Finite(d)),
        at_most => Ok(BfDim::Bounded {
            at_least: lower,
            at_most,
        }),
    }
}

/// BF dimension from forced values, gluing bounds and known facts.
pub fn bf_dimension(kb: &KnowledgeBase, manifold: &str) -> Result<BfDim> {
    dim_rec(kb, manifold, 0)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DecompositionVerdict {
    Obstructed(String),
    Consistent { constraints: Vec<String> },
    Unknown(String),
}

impl fmt::Display for DecompositionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionVerdict::Obstructed(r) => write!(f, "Obstructed: {r}"),
            DecompositionVerdict::Consistent { constraints } if constraints.is_empty() => {
                f.write_str("Consistent")
            }
            DecompositionVerdict::Consistent { constraints } => {
                write!(f, "Consistent; {}", constraints.join("; "))
            }
            DecompositionVerdict::Unknown(r) => write!(f, "Unknown: {r}"),
        }
    }
}

/// Whether a piece has a `d = 0` structure with odd SW, directly or via
/// the symplectic canonical class.
fn has_odd_zero_class(kb: &KnowledgeBase, name: &str) -> Result<bool> {
    let x = kb.manifold(name)?;
    if x.symplectic && x.is_closed() && x.b2_plus() >= 2 {
        return Ok(true);
    }
    Ok(kb
        .facts_on(name)
        .any(|(_, f)| f.d == Some(0) && f.sw.parity() == Some(Parity::Odd)))
}

/// Compares a decomposition `X₁ ∪ … ∪ X_k` with a candidate `X′₁ ∪ … ∪ X′_l`.
///
/// Both lists name registered manifolds. The rules are run on a copy first
/// so that homogeneity flags are available.
pub fn decomposition_verdict(
    kb: &KnowledgeBase,
    x: &[String],
    x_prime: &[String],
) -> Result<DecompositionVerdict> {
    use DecompositionVerdict::*;
    if x.is_empty() || x_prime.is_empty() {
        return Err(Error::PreconditionViolation(
            "both decompositions need a piece".into(),
        ));
    }
    let mut kb = kb.clone();
    infer_in_place(&mut kb, Execution::default())?;
    let pieces =
        |names: &[String]| -> Result<Vec<_>> { names.iter().map(|n| kb.manifold(n)).collect() };
    let (xs, ys) = (pieces(x)?, pieces(x_prime)?);
    let total = |v: &[&crate::fourman::ManifoldDescriptor],
                 f: fn(&crate::fourman::ManifoldDescriptor) -> i64| {
        v.iter().map(|m| f(m)).sum::<i64>()
    };
    use crate::fourman::ManifoldDescriptor as M;
    let (k, l) = (xs.len(), ys.len());
    let b_total = total(&xs, M::b2_plus);
    if k > 4 {
        return Ok(Unknown(
            "the known decomposition has more than 4 pieces".into(),
        ));
    }
    if let Some(p) = xs
        .iter()
        .find(|p| p.b1() != 0 || p.b2_plus().rem_euclid(4) != 3)
    {
        return Ok(Unknown(format!(
            "{} does not have b1 = 0 and b2+ ≡ 3 mod 4",
            p.name
        )));
    }
    for n in x {
        if !has_odd_zero_class(&kb, n)? {
            return Ok(Unknown(format!(
                "{n} has no known d = 0 structure with odd SW"
            )));
        }
    }
    if k == 4 && b_total.rem_euclid(8) != 4 {
        return Ok(Unknown("four pieces but b2+(X) is not 4 mod 8".into()));
    }
    if let Some(p) = ys.iter().find(|p| p.b2_plus() < 1) {
        return Ok(Unknown(format!("{} has b2+ = 0", p.name)));
    }
    if l > k {
        return Ok(Obstructed(format!("k ≥ l fails (k = {k}, l = {l})")));
    }
    if let Some(p) = ys.iter().find(|p| p.b2_plus() == 1) {
        return Ok(Obstructed(format!("b2+(X'_j) ≥ 2 fails for {}", p.name)));
    }
    for (what, f) in [
        ("b1", M::b1 as fn(&M) -> i64),
        ("b2+", M::b2_plus),
        ("b2-", M::b2_minus),
    ] {
        if total(&xs, f) != total(&ys, f) {
            return Ok(Obstructed(format!(
                "{what} differs between the two decompositions"
            )));
        }
    }
    let hom0 = |n: &String| kb.flag_true(n, FlagKind::Homogeneous(0));
    if x.iter().all(hom0) && x_prime.iter().all(hom0) {
        if k != l {
            return Ok(Obstructed(format!("k = l fails (k = {k}, l = {l})")));
        }
        if let Some(p) = ys
            .iter()
            .find(|p| p.b1() != 0 || p.b2_plus().rem_euclid(4) != 3)
        {
            return Ok(Obstructed(format!(
                "b1(X'_j) = 0 and b2+(X'_j) ≡ 3 mod 4 fail for {}",
                p.name
            )));
        }
        return Ok(Consistent {
            constraints: vec![
                "k = l".into(),
                "b1(X'_j) = 0 and b2+(X'_j) ≡ 3 mod 4 for every j".into(),
                "each X'_j carries a d = 0 structure with odd SW".into(),
            ],
        });
    }
    Ok(Consistent {
        constraints: vec!["k ≥ l".into(), "b2+(X'_j) ≥ 2 for every j".into()],
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum AdjunctionVerdict {
    /// The inequality holds; nothing new is learned.
    Holds,
    /// The inequality fails, so `K` is not a basic class; recorded as Zero.
    Excluded(FactKey),
    /// The alternative of the immersed inequality: this structure is nonzero.
    Derived(FactKey),
    /// The inequality fails but `K` is not known to be basic.
    Unknown,
}

impl fmt::Display for AdjunctionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdjunctionVerdict::Holds => f.write_str("Holds"),
            AdjunctionVerdict::Excluded(k) => write!(f, "Excluded: {k} is not a basic class"),
            AdjunctionVerdict::Derived(k) => write!(f, "Derived: BF({k}) nonzero"),
            AdjunctionVerdict::Unknown => f.write_str("Unknown"),
        }
    }
}

/// Tests a class `K` against an embedded or immersed surface and records
/// what follows.
pub fn adjunction_verdict(
    kb: &mut KnowledgeBase,
    manifold: &str,
    k: &[i64],
    surface: &SurfaceData,
) -> Result<AdjunctionVerdict> {
    let x = kb.manifold(manifold)?.clone();
    surface.validate(&x)?;
    let key = FactKey::new(manifold, k.to_vec());
    kb.ensure_fact(&key)?;
    infer_in_place(kb, Execution::default())?;
    let aa = x.pair(&surface.class, &surface.class)?;
    let ka = x.pair(k, &surface.class)?;
    let here = vec![Premise::Manifold(manifold.to_string())];
    match surface.kind {
        SurfaceKind::Embedded => {
            if aa < 0 {
                return Err(Error::PreconditionViolation(format!(
                    "embedded surface has negative square {aa}"
                )));
            }
            if surface.chi_minus() >= aa + ka.abs() {
                return Ok(AdjunctionVerdict::Holds);
            }
            kb.record(&key, BfState::Zero, "embedded-adjunction", here)?;
            infer_in_place(kb, Execution::default())?;
            Ok(AdjunctionVerdict::Excluded(key))
        }
        SurfaceKind::ImmersedSphere => {
            let p = surface.positive_double_points;
            if 2 * p - 2 >= ka.abs() + aa {
                return Ok(AdjunctionVerdict::Holds);
            }
            if kb.flag_true(manifold, FlagKind::BlowupSimple) {
                let mut premises = here;
                premises.push(Premise::Flag(manifold.to_string(), FlagKind::BlowupSimple));
                kb.record(&key, BfState::Zero, "immersed-adjunction-simple", premises)?;
                infer_in_place(kb, Execution::default())?;
                return Ok(AdjunctionVerdict::Excluded(key));
            }
            if !kb.bf(&key).is_nonzero() {
                return Ok(AdjunctionVerdict::Unknown);
            }
            let sign = if ka >= 0 { 2 } else { -2 };
            let c1: Vec<i64> = k
                .iter()
                .zip(&surface.class)
                .map(|(a, b)| a + sign * b)
                .collect();
            let other = FactKey::new(manifold, c1);
            let premises = vec![
                Premise::Fact(key.clone()),
                Premise::Manifold(manifold.to_string()),
            ];
            kb.record(&other, BfState::Nonzero, "immersed-adjunction", premises)?;
            infer_in_place(kb, Execution::default())?;
            Ok(AdjunctionVerdict::Derived(other))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SimpleTypeVerdict {
    pub blowup_simple: Tri,
    pub homogeneous: Vec<i64>,
    pub sw_simple: Tri,
    pub mod2_sw_simple: Tri,
}

impl fmt::Display for SimpleTypeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hom: Vec<String> = self.homogeneous.iter().map(ToString::to_string).collect();
        write!(
            f,
            "blowup-simple = {}; homogeneous = [{}]; sw-simple = {}; mod2-sw-simple = {}",
            self.blowup_simple,
            hom.join(","),
            self.sw_simple,
            self.mod2_sw_simple
        )
    }
}

/// Type flags for a manifold after running the rules.
pub fn simple_type_verdict(kb: &KnowledgeBase, manifold: &str) -> Result<SimpleTypeVerdict> {
    kb.manifold(manifold)?;
    let mut kb = kb.clone();
    infer_in_place(&mut kb, Execution::default())?;
    let tri = |kind| match kb.flag(manifold, kind) {
        Some(true) => Tri::True,
        Some(false) => Tri::False,
        None => Tri::Unknown,
    };
    Ok(SimpleTypeVerdict {
        blowup_simple: tri(FlagKind::BlowupSimple),
        homogeneous: kb.homogeneous_dims(manifold),
        sw_simple: tri(FlagKind::SwSimple),
        mod2_sw_simple: tri(FlagKind::Mod2SwSimple),
    })
}

/// Declares `base` blown up `count` times with every sign `±Eᵢ` and
/// returns the resulting structures known to be nonzero.
pub fn blowup_basic_classes(
    kb: &mut KnowledgeBase,
    base: &FactKey,
    count: usize,
) -> Result<Vec<FactKey>> {
    if count > 8 {
        return Err(Error::OutOfRange(format!(
            "{count} blowups would declare 2^{count} structures"
        )));
    }
    let mut out = Vec::new();
    for mask in 0..(1u32 << count) {
        let rs: Vec<i64> = (0..count)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 0 })
            .collect();
        out.push(kb.declare_blowups(base, &rs)?);
    }
    infer_in_place(kb, Execution::default())?;
    Ok(out.into_iter().filter(|k| kb.bf(k).is_nonzero()).collect())
}

/// Registers the log transform and returns the basic classes of the result
/// with their states.
pub fn basic_classes_log_transform(
    kb: &mut KnowledgeBase,
    base: &str,
    fishtail: &SurfaceData,
    p: i64,
) -> Result<Vec<(FactKey, BfState)>> {
    if !kb.manifold(base)?.h1_no_2torsion {
        return Err(Error::PreconditionViolation(format!(
            "{base} is not flagged as having no 2-torsion in H1"
        )));
    }
    let name = kb.declare_log_transform(base, fishtail, p)?;
    if !kb.manifold(&name)?.h1_no_2torsion {
        return Err(Error::PreconditionViolation(format!(
            "{name} is not flagged as having no 2-torsion in H1"
        )));
    }
    infer_in_place(kb, Execution::default())?;
    Ok(basic_classes(kb, &name)
        .into_iter()
        .map(|k| {
            let s = kb.bf(&k);
            (k, s)
        })
        .collect())
}
