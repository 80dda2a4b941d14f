use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::{BfState, SwFact};
use crate::abelian::FgAbGroup;
use crate::cohomotopy::{cp_cohomotopy, min_n, MAX_J};
use crate::error::{Error, Result};
use crate::fourman::{
    blowup, catalog, check_characteristic, dimension_of_class, glue, lift_spinc, log_transform,
    Gluing, ManifoldDescriptor, SpincStructure, SurfaceData,
};

/// A spin^c structure on a named manifold, by its first Chern class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct FactKey {
    pub manifold: String,
    #[serde(with = "crate::decimal::vec")]
    pub c1: Vec<i64>,
}

impl FactKey {
    pub fn new(manifold: &str, c1: Vec<i64>) -> Self {
        FactKey {
            manifold: manifold.to_string(),
            c1,
        }
    }
}

impl From<&SpincStructure> for FactKey {
    fn from(s: &SpincStructure) -> Self {
        FactKey::new(&s.manifold, s.c1.clone())
    }
}

impl fmt::Display for FactKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c1.iter().map(ToString::to_string).collect();
        write!(f, "{}[{}]", self.manifold, parts.join(","))
    }
}

/// Manifold-level properties tracked by the engine.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum FlagKind {
    BlowupSimple,
    /// `BF = 0` whenever `d ≠` the given dimension.
    Homogeneous(#[serde(with = "crate::decimal")] i64),
    SwSimple,
    Mod2SwSimple,
    /// Every cup product of a generating set of `H¹` is torsion or even.
    CupProductCondition,
}

impl fmt::Display for FlagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlagKind::BlowupSimple => f.write_str("blowup-simple"),
            FlagKind::Homogeneous(d) => write!(f, "homogeneous({d})"),
            FlagKind::SwSimple => f.write_str("sw-simple"),
            FlagKind::Mod2SwSimple => f.write_str("mod2-sw-simple"),
            FlagKind::CupProductCondition => f.write_str("cup-product-condition"),
        }
    }
}

impl std::str::FromStr for FlagKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s
            .strip_prefix("homogeneous(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let d = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad homogeneous dimension in `{s}`")))?;
            return Ok(FlagKind::Homogeneous(d));
        }
        Ok(match s {
            "blowup-simple" => FlagKind::BlowupSimple,
            "sw-simple" => FlagKind::SwSimple,
            "mod2-sw-simple" => FlagKind::Mod2SwSimple,
            "cup-product-condition" => FlagKind::CupProductCondition,
            _ => return Err(Error::Parse(format!("unknown flag `{s}`"))),
        })
    }
}

/// What a justification established.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Claim {
    Bf(BfState),
    Sw(SwFact),
    Flag(FlagKind, bool),
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Bf(s) => write!(f, "BF = {s}"),
            Claim::Sw(s) => write!(f, "SW = {s}"),
            Claim::Flag(k, v) => write!(f, "{k} = {v}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Premise {
    Fact(FactKey),
    Flag(String, FlagKind),
    Manifold(String),
    Relation(#[serde(with = "crate::decimal")] usize),
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::Fact(k) => write!(f, "{k}"),
            Premise::Flag(m, k) => write!(f, "{m}:{k}"),
            Premise::Manifold(m) => write!(f, "data of {m}"),
            Premise::Relation(i) => write!(f, "relation #{i}"),
        }
    }
}

/// One step of a provenance chain.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Justification {
    pub rule: String,
    pub claim: Claim,
    pub premises: Vec<Premise>,
    /// Asserted from outside rather than derived.
    pub external: bool,
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} BY {}", self.claim, self.rule)?;
        if self.external {
            f.write_str(" (external)")?;
        }
        if !self.premises.is_empty() {
            let p: Vec<String> = self.premises.iter().map(ToString::to_string).collect();
            write!(f, " FROM {}", p.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Fact {
    pub bf: BfState,
    pub sw: SwFact,
    #[serde(with = "crate::decimal::option", default)]
    pub d: Option<i64>,
    pub why: Vec<Justification>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ComplementKind {
    General,
    /// `first` lives on the blowup of `second`'s manifold with coefficient `2r+1`.
    Blowup(#[serde(with = "crate::decimal")] i64),
    RationalBlowdown,
}

/// Structural facts the rules consume.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Relation {
    /// Two closed manifolds `X ∪ N₁`, `X ∪ N₂` with `b₁(Nᵢ) = b₂⁺(Nᵢ) = 0` and
    /// spin^c structures agreeing on `X`. `first` has the smaller dimension.
    CommonComplement {
        first: FactKey,
        second: FactKey,
        kind: ComplementKind,
    },
    /// `whole` restricts to `pieces` under a gluing along SWF-spherical
    /// rational homology spheres.
    Decomposition {
        whole: FactKey,
        pieces: Vec<FactKey>,
        connected_sum: bool,
    },
    /// Manifold-level gluing decomposition.
    Split {
        whole: String,
        pieces: Vec<String>,
        connected_sum: bool,
    },
    /// `result` is a log transform of `base` with multiplicity `p`.
    LogTransform {
        base: String,
        result: String,
        #[serde(with = "crate::decimal")]
        p: i64,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ManifoldEntry {
    pub descriptor: ManifoldDescriptor,
    #[serde(with = "super::entries")]
    pub flags: BTreeMap<FlagKind, bool>,
    #[serde(with = "super::entries")]
    pub flag_why: BTreeMap<FlagKind, Vec<Justification>>,
    pub surfaces: Vec<SurfaceData>,
}

/// A change proposed by a rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub target: Target,
    pub rule: &'static str,
    pub premises: Vec<Premise>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Target {
    Bf(FactKey, BfState),
    Sw(FactKey, SwFact),
    Flag(String, FlagKind),
}

/// Monotone store of BF/SW knowledge.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    #[serde(with = "super::entries")]
    manifolds: BTreeMap<String, ManifoldEntry>,
    #[serde(with = "super::entries")]
    facts: BTreeMap<FactKey, Fact>,
    relations: Vec<Relation>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    // ---- manifolds ------------------------------------------------------

    /// Registers a descriptor; re-adding identical data is a no-op.
    pub fn add_manifold(&mut self, x: ManifoldDescriptor) -> Result<()> {
        if let Some(old) = self.manifolds.get(&x.name) {
            if old.descriptor == x {
                return Ok(());
            }
            return Err(Error::PreconditionViolation(format!(
                "a different manifold named {} is already registered",
                x.name
            )));
        }
        self.manifolds.insert(
            x.name.clone(),
            ManifoldEntry {
                descriptor: x,
                flags: BTreeMap::new(),
                flag_why: BTreeMap::new(),
                surfaces: Vec::new(),
            },
        );
        Ok(())
    }

    pub fn manifold(&self, name: &str) -> Result<&ManifoldDescriptor> {
        self.entry(name).map(|e| &e.descriptor)
    }

    pub fn entry(&self, name: &str) -> Result<&ManifoldEntry> {
        self.manifolds
            .get(name)
            .ok_or_else(|| Error::PreconditionViolation(format!("no manifold named {name}")))
    }

    pub fn manifolds(&self) -> impl Iterator<Item = &ManifoldEntry> {
        self.manifolds.values()
    }

    pub fn manifold_names(&self) -> Vec<String> {
        self.manifolds.keys().cloned().collect()
    }

    pub fn add_surface(&mut self, manifold: &str, s: SurfaceData) -> Result<()> {
        let e = self
            .manifolds
            .get_mut(manifold)
            .ok_or_else(|| Error::PreconditionViolation(format!("no manifold named {manifold}")))?;
        s.validate(&e.descriptor)?;
        if !e.surfaces.contains(&s) {
            e.surfaces.push(s);
        }
        Ok(())
    }

    pub fn flag(&self, manifold: &str, kind: FlagKind) -> Option<bool> {
        self.manifolds
            .get(manifold)
            .and_then(|e| e.flags.get(&kind).copied())
    }

    pub fn flag_true(&self, manifold: &str, kind: FlagKind) -> bool {
        self.flag(manifold, kind) == Some(true)
    }

    /// Dimensions `d` for which the manifold is known to be homogeneous.
    pub fn homogeneous_dims(&self, manifold: &str) -> Vec<i64> {
        self.manifolds.get(manifold).map_or_else(Vec::new, |e| {
            e.flags
                .iter()
                .filter_map(|(k, &v)| match k {
                    FlagKind::Homogeneous(d) if v => Some(*d),
                    _ => None,
                })
                .collect()
        })
    }

    pub fn assert_flag(&mut self, manifold: &str, kind: FlagKind, value: bool) -> Result<bool> {
        self.merge_flag(
            manifold,
            kind,
            value,
            Justification {
                rule: "assertion".into(),
                claim: Claim::Flag(kind, value),
                premises: Vec::new(),
                external: true,
            },
        )
    }

    fn merge_flag(
        &mut self,
        manifold: &str,
        kind: FlagKind,
        value: bool,
        why: Justification,
    ) -> Result<bool> {
        let e = self
            .manifolds
            .get_mut(manifold)
            .ok_or_else(|| Error::PreconditionViolation(format!("no manifold named {manifold}")))?;
        match e.flags.get(&kind) {
            Some(&old) if old == value => Ok(false),
            Some(&old) => Err(Error::Inconsistent(format!(
                "{manifold}: {kind} is {old}, cannot become {value} ({why})"
            ))),
            None => {
                e.flags.insert(kind, value);
                e.flag_why.entry(kind).or_default().push(why);
                Ok(true)
            }
        }
    }

    // ---- facts ----------------------------------------------------------

    pub fn facts(&self) -> impl Iterator<Item = (&FactKey, &Fact)> {
        self.facts.iter()
    }

    pub fn fact(&self, key: &FactKey) -> Option<&Fact> {
        self.facts.get(key)
    }

    pub fn bf(&self, key: &FactKey) -> BfState {
        self.facts.get(key).map_or(BfState::Unknown, |f| f.bf)
    }

    pub fn facts_on<'a>(
        &'a self,
        manifold: &'a str,
    ) -> impl Iterator<Item = (&'a FactKey, &'a Fact)> + 'a {
        self.facts
            .iter()
            .filter(move |(k, _)| k.manifold == manifold)
    }

    /// Creates an empty fact for `key`, validating the class.
    pub fn ensure_fact(&mut self, key: &FactKey) -> Result<()> {
        if self.facts.contains_key(key) {
            return Ok(());
        }
        let x = self.manifold(&key.manifold)?;
        check_characteristic(x, &key.c1)?;
        let d = if x.b1() == 0 {
            Some(dimension_of_class(x, &key.c1)?)
        } else {
            None
        };
        self.facts.insert(
            key.clone(),
            Fact {
                d,
                ..Fact::default()
            },
        );
        Ok(())
    }

    /// Records an externally known BF state and/or SW value.
    pub fn assert_fact(
        &mut self,
        key: &FactKey,
        bf: BfState,
        sw: SwFact,
        source: &str,
    ) -> Result<bool> {
        self.ensure_fact(key)?;
        let ext = |claim| Justification {
            rule: source.to_string(),
            claim,
            premises: Vec::new(),
            external: true,
        };
        let mut changed = false;
        if bf.is_known() {
            changed |= self.merge_bf(key, bf, ext(Claim::Bf(bf)))?;
        }
        if sw != SwFact::Unknown {
            changed |= self.merge_sw(key, sw, ext(Claim::Sw(sw)))?;
        }
        Ok(changed)
    }

    fn merge_bf(&mut self, key: &FactKey, state: BfState, why: Justification) -> Result<bool> {
        self.ensure_fact(key)?;
        let group = self.target_group(key);
        let fact = self.facts.get_mut(key).expect("ensured");
        let new = fact
            .bf
            .join(state)
            .map_err(|e| Error::Inconsistent(format!("{key}: {e} ({why})")))?;
        if new == fact.bf {
            return Ok(false);
        }
        if let Some(g) = group {
            new.check_group(&g)
                .map_err(|e| Error::Inconsistent(format!("{key}: {e} ({why})")))?;
        }
        if new == BfState::NonzeroFree && fact.d.is_some_and(|d| d.rem_euclid(2) == 1) {
            return Err(Error::Inconsistent(format!(
                "{key}: odd dimension forces a torsion value ({why})"
            )));
        }
        fact.bf = new;
        fact.why.push(why);
        Ok(true)
    }

    fn merge_sw(&mut self, key: &FactKey, sw: SwFact, why: Justification) -> Result<bool> {
        self.ensure_fact(key)?;
        let fact = self.facts.get_mut(key).expect("ensured");
        let new = fact
            .sw
            .join(sw)
            .map_err(|e| Error::Inconsistent(format!("{key}: {e} ({why})")))?;
        if new == fact.sw {
            return Ok(false);
        }
        fact.sw = new;
        fact.why.push(why);
        Ok(true)
    }

    /// Applies a rule's conclusion; returns whether anything changed.
    pub fn apply(&mut self, d: &Derivation) -> Result<bool> {
        let why = |claim| Justification {
            rule: d.rule.to_string(),
            claim,
            premises: d.premises.clone(),
            external: false,
        };
        match &d.target {
            Target::Bf(k, s) => self.merge_bf(k, *s, why(Claim::Bf(*s))),
            Target::Sw(k, s) => self.merge_sw(k, *s, why(Claim::Sw(*s))),
            Target::Flag(m, kind) => self.merge_flag(m, *kind, true, why(Claim::Flag(*kind, true))),
        }
    }

    /// Records a conclusion reached outside the rule set (for example by an
    /// adjunction query) together with its premises.
    pub fn record(
        &mut self,
        key: &FactKey,
        state: BfState,
        rule: &str,
        premises: Vec<Premise>,
    ) -> Result<bool> {
        self.merge_bf(
            key,
            state,
            Justification {
                rule: rule.to_string(),
                claim: Claim::Bf(state),
                premises,
                external: false,
            },
        )
    }

    /// `π^{b−1}(ℂP^{k−1})` with `k = (d + 1 + b₂⁺)/2`, when the tables reach it.
    pub fn target_group(&self, key: &FactKey) -> Option<FgAbGroup> {
        let x = self.manifolds.get(&key.manifold)?;
        let x = &x.descriptor;
        let d = match self.facts.get(key) {
            Some(f) => f.d?,
            None => {
                if x.b1() != 0 {
                    return None;
                }
                dimension_of_class(x, &key.c1).ok()?
            }
        };
        bf_group(x.b1(), x.b2_plus(), d)
    }

    // ---- relations ------------------------------------------------------

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    fn push_relation(&mut self, r: Relation) -> usize {
        if let Some(i) = self.relations.iter().position(|x| *x == r) {
            return i;
        }
        self.relations.push(r);
        self.relations.len() - 1
    }

    /// Declares that two spin^c structures share a complement with negative
    /// definite caps. The pair is stored with the smaller dimension first.
    pub fn declare_common_complement(
        &mut self,
        a: &FactKey,
        b: &FactKey,
        kind: ComplementKind,
    ) -> Result<usize> {
        self.ensure_fact(a)?;
        self.ensure_fact(b)?;
        let (xa, xb) = (self.manifold(&a.manifold)?, self.manifold(&b.manifold)?);
        if xa.b1() != xb.b1() || xa.b2_plus() != xb.b2_plus() {
            return Err(Error::PreconditionViolation(format!(
                "{} and {} differ in b1 or b2+; caps must have b1 = b2+ = 0",
                xa.name, xb.name
            )));
        }
        let (da, db) = (self.facts[a].d, self.facts[b].d);
        let (first, second) = match (da, db) {
            (Some(x), Some(y)) if x > y => (b.clone(), a.clone()),
            _ => (a.clone(), b.clone()),
        };
        Ok(self.push_relation(Relation::CommonComplement {
            first,
            second,
            kind,
        }))
    }

    /// Registers `X # CP²bar` (if needed) and the spin^c structure `𝔰_r`.
    pub fn declare_blowup(&mut self, base: &FactKey, r: i64) -> Result<FactKey> {
        self.ensure_fact(base)?;
        let x = self.manifold(&base.manifold)?.clone();
        let blown = blowup(&x);
        let mut c1 = base.c1.clone();
        c1.push((2 * r + 1) * x.class_scale());
        let key = FactKey::new(&blown.name, c1);
        let name = blown.name.clone();
        self.add_manifold(blown)?;
        self.add_manifold(catalog::cp2bar())?;
        self.push_relation(Relation::Split {
            whole: name,
            pieces: vec![x.name.clone(), "CP2bar".into()],
            connected_sum: true,
        });
        self.ensure_fact(&key)?;
        self.declare_common_complement(&key, base, ComplementKind::Blowup(r))?;
        Ok(key)
    }

    /// Iterated blowups with coefficients `2rᵢ+1`.
    pub fn declare_blowups(&mut self, base: &FactKey, rs: &[i64]) -> Result<FactKey> {
        let mut k = base.clone();
        for &r in rs {
            k = self.declare_blowup(&k, r)?;
        }
        Ok(k)
    }

    /// Lifts a spin^c structure across a registered rational blowdown and
    /// relates the two. Returns the lift.
    pub fn declare_rational_blowdown(&mut self, down: &FactKey) -> Result<FactKey> {
        let xp = self.manifold(&down.manifold)?.clone();
        let rec = xp.blowdown_record().ok_or_else(|| {
            Error::PreconditionViolation(format!("{} is not a rational blowdown", xp.name))
        })?;
        self.add_manifold((*rec.parent).clone())?;
        let s = SpincStructure::new(&xp, down.c1.clone())?;
        let lift = lift_spinc(&xp, &s)?;
        let lk = FactKey::from(&lift);
        self.declare_common_complement(&lk, down, ComplementKind::RationalBlowdown)?;
        Ok(lk)
    }

    /// Connected sum of the pieces' manifolds with the sum spin^c structure.
    pub fn declare_connected_sum(
        &mut self,
        pieces: &[FactKey],
        name: Option<&str>,
    ) -> Result<FactKey> {
        if pieces.len() < 2 {
            return Err(Error::PreconditionViolation(
                "a connected sum needs two pieces".into(),
            ));
        }
        let mut acc = self.manifold(&pieces[0].manifold)?.clone();
        let mut c1 = pieces[0].c1.clone();
        for p in &pieces[1..] {
            let x = self.manifold(&p.manifold)?;
            let next = glue(&acc, x, &Gluing::ConnectedSum)?;
            let (fa, fb) = (
                next.class_scale() / acc.class_scale(),
                next.class_scale() / x.class_scale(),
            );
            c1 = c1
                .iter()
                .map(|v| v * fa)
                .chain(p.c1.iter().map(|v| v * fb))
                .collect();
            acc = next;
        }
        let default_name = if pieces.iter().all(|p| p.manifold == pieces[0].manifold) {
            format!("#{}{}", pieces.len(), pieces[0].manifold)
        } else {
            acc.name.clone()
        };
        let whole = acc.renamed(name.unwrap_or(&default_name));
        let wname = whole.name.clone();
        self.add_manifold(whole)?;
        let key = FactKey::new(&wname, c1);
        self.declare_decomposition(&key, pieces, true)?;
        Ok(key)
    }

    /// Declares a gluing decomposition of an existing spin^c structure.
    /// Betti numbers and dimensions must add up.
    pub fn declare_decomposition(
        &mut self,
        whole: &FactKey,
        pieces: &[FactKey],
        connected_sum: bool,
    ) -> Result<usize> {
        self.ensure_fact(whole)?;
        for p in pieces {
            self.ensure_fact(p)?;
        }
        let w = self.manifold(&whole.manifold)?;
        let ps: Vec<&ManifoldDescriptor> = pieces
            .iter()
            .map(|p| self.manifold(&p.manifold))
            .collect::<Result<_>>()?;
        let sum = |f: fn(&ManifoldDescriptor) -> i64| ps.iter().map(|x| f(x)).sum::<i64>();
        if w.b1() != sum(ManifoldDescriptor::b1)
            || w.b2_plus() != sum(ManifoldDescriptor::b2_plus)
            || w.b2_minus() != sum(ManifoldDescriptor::b2_minus)
        {
            return Err(Error::PreconditionViolation(format!(
                "Betti numbers of {} are not the sum of its pieces",
                w.name
            )));
        }
        let m = pieces.len() as i64;
        let ds: Option<Vec<i64>> = pieces.iter().map(|p| self.facts[p].d).collect();
        if let (Some(dw), Some(ds)) = (self.facts[whole].d, ds) {
            let expect = ds.iter().sum::<i64>() + m - 1;
            if dw != expect {
                return Err(Error::PreconditionViolation(format!(
                    "d({whole}) = {dw} but the pieces give {expect}"
                )));
            }
        }
        let split = Relation::Split {
            whole: whole.manifold.clone(),
            pieces: pieces.iter().map(|p| p.manifold.clone()).collect(),
            connected_sum,
        };
        self.push_relation(split);
        Ok(self.push_relation(Relation::Decomposition {
            whole: whole.clone(),
            pieces: pieces.to_vec(),
            connected_sum,
        }))
    }

    /// Manifold-level decomposition only.
    pub fn declare_split(
        &mut self,
        whole: &str,
        pieces: &[String],
        connected_sum: bool,
    ) -> Result<usize> {
        self.manifold(whole)?;
        for p in pieces {
            self.manifold(p)?;
        }
        Ok(self.push_relation(Relation::Split {
            whole: whole.to_string(),
            pieces: pieces.to_vec(),
            connected_sum,
        }))
    }

    /// Registers `X_(p)` for a fishtail in `base` and relates the two.
    pub fn declare_log_transform(
        &mut self,
        base: &str,
        fishtail: &SurfaceData,
        p: i64,
    ) -> Result<String> {
        let x = self.manifold(base)?.clone();
        let y = log_transform(&x, fishtail, p)?;
        let name = y.name.clone();
        if name != base {
            self.add_manifold(y)?;
        }
        self.push_relation(Relation::LogTransform {
            base: base.to_string(),
            result: name.clone(),
            p,
        });
        Ok(name)
    }

    // ---- provenance -----------------------------------------------------

    /// Every justification reachable from the fact, in discovery order.
    pub fn chain(&self, key: &FactKey) -> Vec<(Premise, Justification)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut stack = vec![Premise::Fact(key.clone())];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.clone()) {
                continue;
            }
            let whys: &[Justification] = match &p {
                Premise::Fact(k) => self.facts.get(k).map_or(&[], |f| &f.why),
                Premise::Flag(m, kind) => self
                    .manifolds
                    .get(m)
                    .and_then(|e| e.flag_why.get(kind))
                    .map_or(&[], |v| v.as_slice()),
                _ => &[],
            };
            for j in whys {
                out.push((p.clone(), j.clone()));
                stack.extend(j.premises.iter().rev().cloned());
            }
        }
        out
    }

    /// Same manifolds, relations and surfaces with all knowledge erased.
    pub(crate) fn skeleton(&self) -> KnowledgeBase {
        let mut kb = self.clone();
        for f in kb.facts.values_mut() {
            f.bf = BfState::Unknown;
            f.sw = SwFact::Unknown;
            f.why.clear();
        }
        for e in kb.manifolds.values_mut() {
            e.flags.clear();
            e.flag_why.clear();
        }
        kb
    }

    /// Re-applies a recorded external or query-level justification.
    pub(crate) fn reapply(&mut self, at: &Premise, j: &Justification) -> Result<()> {
        match (at, &j.claim) {
            (Premise::Fact(k), Claim::Bf(s)) => self.merge_bf(k, *s, j.clone()).map(drop),
            (Premise::Fact(k), Claim::Sw(s)) => self.merge_sw(k, *s, j.clone()).map(drop),
            (Premise::Flag(m, _), Claim::Flag(kind, v)) => {
                self.merge_flag(m, *kind, *v, j.clone()).map(drop)
            }
            _ => Err(Error::Inconsistent(format!("malformed justification {j}"))),
        }
    }
}

/// The group `π^{b−1}(ℂP^{k−1})`, `k = (d + 1 + b)/2`, for `b₁ = 0`, `b ≥ 2`.
pub fn bf_group(b1: i64, b2_plus: i64, d: i64) -> Option<FgAbGroup> {
    if b1 != 0 || b2_plus < 2 || !(0..=MAX_J).contains(&d) {
        return None;
    }
    let twice = d + b2_plus - 1;
    if twice % 2 != 0 {
        return None;
    }
    let n = twice / 2;
    if n < min_n(d)? {
        return None;
    }
    cp_cohomotopy(n, d).ok()
}
