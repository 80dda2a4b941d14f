use super::kb::{Derivation, FactKey, KnowledgeBase};
use super::rules::{all_rules, is_rule};
use super::state::BfState;
use crate::error::Result;
use crate::par::{map_collect, Execution};

/// Counters from a run of [`infer_in_place`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct InferStats {
    pub rounds: usize,
    pub changes: usize,
}

/// One round: every rule runs against the same snapshot.
pub fn propose(kb: &KnowledgeBase, exec: Execution) -> Vec<Derivation> {
    map_collect(exec, all_rules(), |r| (r.run)(kb))
        .into_iter()
        .flatten()
        .collect()
}

/// Applies all rules until nothing changes. Rules are evaluated in
/// parallel on a snapshot and merged in rule order, so the result does
/// not depend on the execution mode.
pub fn infer_in_place(kb: &mut KnowledgeBase, exec: Execution) -> Result<InferStats> {
    let mut stats = InferStats::default();
    loop {
        stats.rounds += 1;
        let mut changed = 0;
        for d in propose(kb, exec) {
            if kb.apply(&d)? {
                changed += 1;
            }
        }
        stats.changes += changed;
        if changed == 0 {
            return Ok(stats);
        }
    }
}

/// [`infer_in_place`] on a copy.
pub fn infer(kb: &KnowledgeBase, exec: Execution) -> Result<KnowledgeBase> {
    let mut out = kb.clone();
    infer_in_place(&mut out, exec)?;
    Ok(out)
}

/// Rebuilds the fact from the external inputs its chain depends on and
/// returns the state the rules reach from them alone.
pub fn replay(kb: &KnowledgeBase, key: &FactKey) -> Result<BfState> {
    let mut fresh = kb.skeleton();
    for (at, j) in kb.chain(key).iter().rev() {
        if j.external || !is_rule(&j.rule) {
            fresh.reapply(at, j)?;
        }
    }
    infer_in_place(&mut fresh, Execution::Sequential)?;
    Ok(fresh.bf(key))
}
