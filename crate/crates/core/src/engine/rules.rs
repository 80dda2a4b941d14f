//! Inference rules. Each rule scans the knowledge base and proposes
//! derivations; none of them mutate anything.

use super::kb::{
    bf_group, ComplementKind, Derivation, FactKey, FlagKind, KnowledgeBase, Premise, Relation,
    Target,
};
use super::state::{BfState, Parity, SwFact};
use crate::abelian::GroupHom;
use crate::cohomotopy::restriction_map;
use crate::fourman::{dimension_of_class, ManifoldDescriptor, SurfaceKind};

pub type RuleFn = fn(&KnowledgeBase) -> Vec<Derivation>;

#[derive(Clone, Copy)]
pub struct Rule {
    pub id: &'static str,
    pub run: RuleFn,
}

impl std::fmt::Debug for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id)
    }
}

static RULES: &[Rule] = &[
    Rule {
        id: "negative-dimension",
        run: negative_dimension,
    },
    Rule {
        id: "b-plus-one",
        run: b_plus_one,
    },
    Rule {
        id: "b-plus-zero",
        run: b_plus_zero,
    },
    Rule {
        id: "target-group",
        run: target_group,
    },
    Rule {
        id: "odd-dimension-torsion",
        run: odd_dimension_torsion,
    },
    Rule {
        id: "sw-bf-correspondence",
        run: sw_bf_correspondence,
    },
    Rule {
        id: "sw-simple-torsion",
        run: sw_simple_torsion,
    },
    Rule {
        id: "homogeneous-vanishing",
        run: homogeneous_vanishing,
    },
    Rule {
        id: "equal-dimension-copy",
        run: equal_dimension_copy,
    },
    Rule {
        id: "monotone-transfer",
        run: monotone_transfer,
    },
    Rule {
        id: "vanishing-transfer",
        run: vanishing_transfer,
    },
    Rule {
        id: "transfer-map",
        run: transfer_map,
    },
    Rule {
        id: "blowup-simple",
        run: blowup_simple,
    },
    Rule {
        id: "gluing-nonvanishing",
        run: gluing_nonvanishing,
    },
    Rule {
        id: "sum-nonvanishing-criterion",
        run: sum_nonvanishing_criterion,
    },
    Rule {
        id: "log-transform-classes",
        run: log_transform_classes,
    },
    Rule {
        id: "symplectic-homogeneous",
        run: symplectic_homogeneous,
    },
    Rule {
        id: "homogeneous-gluing",
        run: homogeneous_gluing,
    },
    Rule {
        id: "homogeneous-sw-simple",
        run: homogeneous_sw_simple,
    },
    Rule {
        id: "symplectic-blowup-simple",
        run: symplectic_blowup_simple,
    },
    Rule {
        id: "embedded-surface-simple",
        run: embedded_surface_simple,
    },
    Rule {
        id: "immersed-sphere-simple",
        run: immersed_sphere_simple,
    },
    Rule {
        id: "connected-sum-simple",
        run: connected_sum_simple,
    },
    Rule {
        id: "mod2-simple",
        run: mod2_simple,
    },
];

/// The rule set in evaluation order.
pub fn all_rules() -> &'static [Rule] {
    RULES
}

pub fn is_rule(id: &str) -> bool {
    RULES.iter().any(|r| r.id == id)
}

fn bf(key: &FactKey, s: BfState, rule: &'static str, premises: Vec<Premise>) -> Derivation {
    Derivation {
        target: Target::Bf(key.clone(), s),
        rule,
        premises,
    }
}

fn flag(m: &str, kind: FlagKind, rule: &'static str, premises: Vec<Premise>) -> Derivation {
    Derivation {
        target: Target::Flag(m.to_string(), kind),
        rule,
        premises,
    }
}

fn fact_p(k: &FactKey) -> Premise {
    Premise::Fact(k.clone())
}

fn desc<'a>(kb: &'a KnowledgeBase, k: &FactKey) -> &'a ManifoldDescriptor {
    kb.manifold(&k.manifold)
        .expect("facts refer to registered manifolds")
}

/// Every fact with its descriptor.
fn each_fact<'a>(
    kb: &'a KnowledgeBase,
) -> impl Iterator<Item = (&'a FactKey, &'a super::kb::Fact, &'a ManifoldDescriptor)> + 'a {
    kb.facts().map(move |(k, f)| (k, f, desc(kb, k)))
}

/// Whether `(X, 𝔰)` is known to satisfy: `b₁ = 0`, `b₂⁺ ≥ 2`, `d ≤ 3`, and
/// `BF` torsion when `d > 0`.
pub fn condition_star_holds(kb: &KnowledgeBase, k: &FactKey) -> bool {
    let (Some(f), Ok(x)) = (kb.fact(k), kb.manifold(&k.manifold)) else {
        return false;
    };
    let Some(d) = f.d else { return false };
    x.b1() == 0 && x.b2_plus() >= 2 && d <= 3 && (d <= 0 || f.bf.is_torsion())
}

// ---- single facts ----------------------------------------------------------

fn negative_dimension(kb: &KnowledgeBase) -> Vec<Derivation> {
    each_fact(kb)
        .filter(|(_, f, x)| x.b2_plus() >= 1 && f.d.is_some_and(|d| d < 0))
        .map(|(k, _, _)| {
            bf(
                k,
                BfState::Zero,
                "negative-dimension",
                vec![Premise::Manifold(k.manifold.clone())],
            )
        })
        .collect()
}

fn b_plus_one(kb: &KnowledgeBase) -> Vec<Derivation> {
    each_fact(kb)
        .filter(|(_, _, x)| x.b2_plus() == 1 && x.b1() == 0)
        .map(|(k, _, _)| {
            bf(
                k,
                BfState::Zero,
                "b-plus-one",
                vec![Premise::Manifold(k.manifold.clone())],
            )
        })
        .collect()
}

fn b_plus_zero(kb: &KnowledgeBase) -> Vec<Derivation> {
    each_fact(kb)
        .filter(|(_, _, x)| x.b2_plus() == 0)
        .map(|(k, _, _)| {
            bf(
                k,
                BfState::Nonzero,
                "b-plus-zero",
                vec![Premise::Manifold(k.manifold.clone())],
            )
        })
        .collect()
}

fn target_group(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (k, f, x) in each_fact(kb) {
        let Some(d) = f.d else { continue };
        let Some(g) = bf_group(x.b1(), x.b2_plus(), d) else {
            continue;
        };
        let premises = vec![Premise::Manifold(k.manifold.clone())];
        if g.is_trivial() {
            out.push(bf(k, BfState::Zero, "target-group", premises));
        } else if f.bf == BfState::Nonzero && g.is_finite() {
            out.push(bf(
                k,
                BfState::NonzeroTorsion,
                "target-group",
                vec![fact_p(k)],
            ));
        } else if f.bf == BfState::Nonzero && g.is_torsion_free() {
            out.push(bf(k, BfState::NonzeroFree, "target-group", vec![fact_p(k)]));
        }
    }
    out
}

fn odd_dimension_torsion(kb: &KnowledgeBase) -> Vec<Derivation> {
    each_fact(kb)
        .filter(|(_, f, x)| {
            x.b1() == 0
                && x.b2_plus() >= 2
                && f.bf == BfState::Nonzero
                && f.d.is_some_and(|d| d.rem_euclid(2) == 1)
        })
        .map(|(k, _, _)| {
            bf(
                k,
                BfState::NonzeroTorsion,
                "odd-dimension-torsion",
                vec![fact_p(k)],
            )
        })
        .collect()
}

fn sw_bf_correspondence(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (k, f, x) in each_fact(kb) {
        if x.b1() != 0 || x.b2_plus() < 2 || f.d != Some(0) {
            continue;
        }
        match f.sw.nonzero() {
            Some(true) => out.push(bf(
                k,
                BfState::Nonzero,
                "sw-bf-correspondence",
                vec![fact_p(k)],
            )),
            Some(false) => out.push(bf(
                k,
                BfState::Zero,
                "sw-bf-correspondence",
                vec![fact_p(k)],
            )),
            None => {}
        }
        if f.bf.is_zero() && f.sw == SwFact::Unknown {
            out.push(Derivation {
                target: Target::Sw(k.clone(), SwFact::Value(0)),
                rule: "sw-bf-correspondence",
                premises: vec![fact_p(k)],
            });
        }
    }
    out
}

fn sw_simple_torsion(kb: &KnowledgeBase) -> Vec<Derivation> {
    each_fact(kb)
        .filter(|(k, f, x)| {
            x.b1() == 0
                && x.b2_plus() >= 2
                && f.bf == BfState::Nonzero
                && f.d.is_some_and(|d| d > 0)
                && kb.flag_true(&k.manifold, FlagKind::SwSimple)
        })
        .map(|(k, _, _)| {
            bf(
                k,
                BfState::NonzeroTorsion,
                "sw-simple-torsion",
                vec![
                    fact_p(k),
                    Premise::Flag(k.manifold.clone(), FlagKind::SwSimple),
                ],
            )
        })
        .collect()
}

fn homogeneous_vanishing(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (k, f, _) in each_fact(kb) {
        let Some(d) = f.d else { continue };
        for d0 in kb.homogeneous_dims(&k.manifold) {
            if d0 != d {
                out.push(bf(
                    k,
                    BfState::Zero,
                    "homogeneous-vanishing",
                    vec![Premise::Flag(k.manifold.clone(), FlagKind::Homogeneous(d0))],
                ));
            }
        }
    }
    out
}

// ---- common complements ----------------------------------------------------

/// `(index, first, second, δ = d₂ − d₁, kind)` for pairs with known dimensions.
fn complements(kb: &KnowledgeBase) -> Vec<(usize, &FactKey, &FactKey, i64, ComplementKind)> {
    kb.relations()
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            Relation::CommonComplement {
                first,
                second,
                kind,
            } => {
                let d1 = kb.fact(first)?.d?;
                let d2 = kb.fact(second)?.d?;
                Some((i, first, second, d2 - d1, *kind))
            }
            _ => None,
        })
        .collect()
}

fn equal_dimension_copy(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, a, b, delta, _) in complements(kb) {
        if delta != 0 {
            continue;
        }
        for (from, to) in [(a, b), (b, a)] {
            let s = kb.bf(from);
            if s.is_known() {
                out.push(bf(
                    to,
                    s,
                    "equal-dimension-copy",
                    vec![fact_p(from), Premise::Relation(i)],
                ));
            }
        }
    }
    out
}

fn monotone_transfer(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, first, second, delta, _) in complements(kb) {
        if delta < 0 {
            continue;
        }
        if kb.bf(first).is_nonzero() {
            out.push(bf(
                second,
                BfState::Nonzero,
                "monotone-transfer",
                vec![fact_p(first), Premise::Relation(i)],
            ));
        }
        if kb.bf(second).is_zero() {
            out.push(bf(
                first,
                BfState::Zero,
                "monotone-transfer",
                vec![fact_p(second), Premise::Relation(i)],
            ));
        }
    }
    out
}

fn vanishing_transfer(kb: &KnowledgeBase) -> Vec<Derivation> {
    complements(kb)
        .into_iter()
        .filter(|&(_, _, second, delta, _)| delta > 0 && condition_star_holds(kb, second))
        .map(|(i, first, second, _, _)| {
            bf(
                first,
                BfState::Zero,
                "vanishing-transfer",
                vec![fact_p(second), Premise::Relation(i)],
            )
        })
        .collect()
}

/// Whether `f` sends every torsion generator of its source to zero.
fn kills_torsion(f: &GroupHom) -> bool {
    let src = f.source();
    (src.free_rank()..src.ngens()).all(|c| {
        let mut e = vec![0; src.ngens()];
        e[c] = 1;
        f.target().reduce(&f.apply(&e)).iter().all(|&v| v == 0)
    })
}

fn transfer_map(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, first, second, delta, _) in complements(kb) {
        if delta <= 0 || delta % 2 != 0 {
            continue;
        }
        let x = desc(kb, second);
        if x.b1() != 0 || x.b2_plus() < 2 {
            continue;
        }
        let d2 = kb.fact(second).and_then(|f| f.d).expect("known");
        let twice = d2 + x.b2_plus() - 1;
        if twice % 2 != 0 {
            continue;
        }
        // An unsupported restriction means no conclusion.
        let Ok(map) = restriction_map(twice / 2, d2, delta / 2) else {
            continue;
        };
        let s2 = kb.bf(second);
        let rel = Premise::Relation(i);
        if map.is_zero() {
            out.push(bf(
                first,
                BfState::Zero,
                "transfer-map",
                vec![Premise::Manifold(second.manifold.clone()), rel],
            ));
        } else if s2 == BfState::NonzeroTorsion && kills_torsion(&map) {
            out.push(bf(
                first,
                BfState::Zero,
                "transfer-map",
                vec![fact_p(second), rel],
            ));
        } else if s2.is_nonzero() && map.is_injective() {
            out.push(bf(
                first,
                BfState::Nonzero,
                "transfer-map",
                vec![fact_p(second), rel],
            ));
        }
    }
    out
}

fn blowup_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, r) in kb.relations().iter().enumerate() {
        if let Relation::CommonComplement {
            first,
            second,
            kind: ComplementKind::Blowup(r),
        } = r
        {
            if *r != 0 && *r != -1 && kb.flag_true(&second.manifold, FlagKind::BlowupSimple) {
                out.push(bf(
                    first,
                    BfState::Zero,
                    "blowup-simple",
                    vec![
                        Premise::Flag(second.manifold.clone(), FlagKind::BlowupSimple),
                        Premise::Relation(i),
                    ],
                ));
            }
        }
    }
    out
}

// ---- gluing ----------------------------------------------------------------

fn decompositions(kb: &KnowledgeBase) -> impl Iterator<Item = (usize, &FactKey, &[FactKey])> {
    kb.relations()
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            Relation::Decomposition { whole, pieces, .. } => Some((i, whole, pieces.as_slice())),
            _ => None,
        })
}

fn gluing_nonvanishing(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, whole, pieces) in decompositions(kb) {
        if kb.bf(whole).is_nonzero() {
            for p in pieces {
                out.push(bf(
                    p,
                    BfState::Nonzero,
                    "gluing-nonvanishing",
                    vec![fact_p(whole), Premise::Relation(i)],
                ));
            }
        }
        if let Some(p) = pieces.iter().find(|p| kb.bf(p).is_zero()) {
            out.push(bf(
                whole,
                BfState::Zero,
                "gluing-nonvanishing",
                vec![fact_p(p), Premise::Relation(i)],
            ));
        }
    }
    out
}

/// Outcome of the nonvanishing criterion for sums of `d = 0` pieces.
pub fn sum_criterion(kb: &KnowledgeBase, whole: &FactKey, pieces: &[FactKey]) -> Option<bool> {
    let m = pieces.len();
    if m < 2 {
        return None;
    }
    let xs: Vec<&ManifoldDescriptor> = pieces.iter().map(|p| desc(kb, p)).collect();
    if xs.iter().any(|x| x.b1() != 0)
        || pieces
            .iter()
            .any(|p| kb.fact(p).and_then(|f| f.d) != Some(0))
    {
        return None;
    }
    let b_total = desc(kb, whole).b2_plus();
    if xs.iter().any(|x| x.b2_plus().rem_euclid(4) != 3)
        || m > 4
        || (m == 4 && b_total.rem_euclid(8) != 4)
    {
        return Some(false);
    }
    let parities: Vec<Option<Parity>> = pieces
        .iter()
        .map(|p| kb.fact(p).and_then(|f| f.sw.parity()))
        .collect();
    if parities.contains(&Some(Parity::Even)) {
        return Some(false);
    }
    if parities.iter().all(|p| *p == Some(Parity::Odd)) {
        return Some(true);
    }
    None
}

fn sum_nonvanishing_criterion(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, whole, pieces) in decompositions(kb) {
        let Some(nonzero) = sum_criterion(kb, whole, pieces) else {
            continue;
        };
        let mut premises: Vec<Premise> = pieces.iter().map(fact_p).collect();
        premises.push(Premise::Relation(i));
        // Nonzero sums satisfy the torsion condition and have d = m − 1 > 0.
        let s = if nonzero {
            BfState::NonzeroTorsion
        } else {
            BfState::Zero
        };
        out.push(bf(whole, s, "sum-nonvanishing-criterion", premises));
    }
    out
}

fn log_transform_classes(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, r) in kb.relations().iter().enumerate() {
        let Relation::LogTransform { base, result, p } = r else {
            continue;
        };
        let (Ok(x), Ok(y)) = (kb.manifold(base), kb.manifold(result)) else {
            continue;
        };
        if !(x.h1_no_2torsion && y.h1_no_2torsion) {
            continue;
        }
        let Some(f) = y.class("f") else { continue };
        let (sx, sy) = (x.class_scale(), y.class_scale());
        if sy != sx * p {
            continue;
        }
        for (k, fact) in kb.facts_on(base) {
            if !fact.bf.is_nonzero() {
                continue;
            }
            // L·p + (2j − (p − 1))·f at the finer scale.
            for j in 0..*p {
                let c1: Vec<i64> =
                    k.c1.iter()
                        .zip(f)
                        .map(|(l, fv)| l * p + (2 * j - (p - 1)) * fv)
                        .collect();
                if dimension_of_class(y, &c1).is_err() {
                    continue;
                }
                out.push(bf(
                    &FactKey::new(result, c1),
                    fact.bf,
                    "log-transform-classes",
                    vec![fact_p(k), Premise::Relation(i)],
                ));
            }
        }
    }
    out
}

// ---- manifold flags ----------------------------------------------------------

fn symplectic_homogeneous(kb: &KnowledgeBase) -> Vec<Derivation> {
    kb.manifolds()
        .map(|e| &e.descriptor)
        .filter(|x| x.symplectic && x.is_closed() && x.b2_plus() >= 2)
        .map(|x| {
            flag(
                &x.name,
                FlagKind::Homogeneous(0),
                "symplectic-homogeneous",
                vec![Premise::Manifold(x.name.clone())],
            )
        })
        .collect()
}

fn splits(kb: &KnowledgeBase) -> impl Iterator<Item = (usize, &String, &[String], bool)> {
    kb.relations()
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            Relation::Split {
                whole,
                pieces,
                connected_sum,
            } => Some((i, whole, pieces.as_slice(), *connected_sum)),
            _ => None,
        })
}

fn homogeneous_gluing(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, whole, pieces, _) in splits(kb) {
        let mut total = pieces.len() as i64 - 1;
        let mut premises = Vec::new();
        let mut ok = true;
        for p in pieces {
            let x = kb.manifold(p).expect("registered");
            match kb.homogeneous_dims(p).into_iter().min() {
                Some(d) if x.b2_plus() >= 1 => {
                    total += d;
                    premises.push(Premise::Flag(p.clone(), FlagKind::Homogeneous(d)));
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            premises.push(Premise::Relation(i));
            out.push(flag(
                whole,
                FlagKind::Homogeneous(total),
                "homogeneous-gluing",
                premises,
            ));
        }
    }
    out
}

fn homogeneous_sw_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    kb.manifolds()
        .filter(|e| {
            let x = &e.descriptor;
            x.b2_plus() - x.b1() >= 2 && kb.flag_true(&x.name, FlagKind::Homogeneous(0))
        })
        .map(|e| {
            let n = &e.descriptor.name;
            flag(
                n,
                FlagKind::SwSimple,
                "homogeneous-sw-simple",
                vec![Premise::Flag(n.clone(), FlagKind::Homogeneous(0))],
            )
        })
        .collect()
}

fn symplectic_blowup_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    kb.manifolds()
        .map(|e| &e.descriptor)
        .filter(|x| x.symplectic && x.is_closed() && x.b2_plus() - x.b1() > 1)
        .map(|x| {
            flag(
                &x.name,
                FlagKind::BlowupSimple,
                "symplectic-blowup-simple",
                vec![Premise::Manifold(x.name.clone())],
            )
        })
        .collect()
}

fn embedded_surface_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for e in kb.manifolds() {
        let x = &e.descriptor;
        let hit = e.surfaces.iter().any(|s| {
            s.kind == SurfaceKind::Embedded
                && s.genus > 1
                && s.self_intersection(x).is_ok_and(|sq| sq == 2 * s.genus - 2)
        });
        if hit {
            out.push(flag(
                &x.name,
                FlagKind::BlowupSimple,
                "embedded-surface-simple",
                vec![Premise::Manifold(x.name.clone())],
            ));
        }
    }
    out
}

fn immersed_sphere_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for e in kb.manifolds() {
        let x = &e.descriptor;
        let hit = e.surfaces.iter().any(|s| {
            let p = s.positive_double_points;
            s.kind == SurfaceKind::ImmersedSphere
                && s.non_torsion
                && s.self_intersection(x)
                    .is_ok_and(|sq| sq == 2 * p - 2 && sq >= 0)
        });
        if hit {
            out.push(flag(
                &x.name,
                FlagKind::BlowupSimple,
                "immersed-sphere-simple",
                vec![Premise::Manifold(x.name.clone())],
            ));
        }
    }
    out
}

fn connected_sum_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    let mut out = Vec::new();
    for (i, whole, pieces, connected_sum) in splits(kb) {
        if !connected_sum {
            continue;
        }
        if let Some(p) = pieces
            .iter()
            .find(|p| kb.flag_true(p, FlagKind::BlowupSimple))
        {
            out.push(flag(
                whole,
                FlagKind::BlowupSimple,
                "connected-sum-simple",
                vec![
                    Premise::Flag(p.clone(), FlagKind::BlowupSimple),
                    Premise::Relation(i),
                ],
            ));
        }
    }
    out
}

fn mod2_simple(kb: &KnowledgeBase) -> Vec<Derivation> {
    kb.manifolds()
        .map(|e| &e.descriptor)
        .filter(|x| {
            let b = x.b2_plus() - x.b1();
            b > 1 && b.rem_euclid(4) == 3 && kb.flag_true(&x.name, FlagKind::CupProductCondition)
        })
        .map(|x| {
            flag(
                &x.name,
                FlagKind::Mod2SwSimple,
                "mod2-simple",
                vec![Premise::Flag(x.name.clone(), FlagKind::CupProductCondition)],
            )
        })
        .collect()
}
