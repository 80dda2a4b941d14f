//! Monotone knowledge base of Bauer–Furuta and Seiberg–Witten facts, the
//! rule set that extends it, and queries over the result.

mod infer;
mod kb;
mod queries;
mod rules;
mod seed;
mod state;

pub use infer::{infer, infer_in_place, propose, replay, InferStats};
pub use kb::{
    bf_group, Claim, ComplementKind, Derivation, Fact, FactKey, FlagKind, Justification,
    KnowledgeBase, ManifoldEntry, Premise, Relation, Target,
};
pub use queries::*;
pub use rules::{all_rules, condition_star_holds, is_rule, sum_criterion, Rule, RuleFn};
pub use seed::{
    add_catalog, assert_symplectic_canonical, k3_canonical, sum_k3_canonical, CATALOG_AXIOM,
};
pub use state::{BfState, Parity, SwFact, Tri};

/// `BTreeMap<K, V>` as a list of `[key, value]` pairs, so non-string keys
/// survive JSON.
pub(crate) mod entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(
        m: &BTreeMap<K, V>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}
