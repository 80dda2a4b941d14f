use super::kb::{FactKey, KnowledgeBase};
use super::state::{BfState, Parity, SwFact};
use crate::error::{Error, Result};
use crate::fourman::catalog;

/// Source tag of catalog axioms.
pub const CATALOG_AXIOM: &str = "catalog-axiom";

/// Canonical class of a symplectic manifold with `b₂⁺ ≥ 2`: SW is `±1`.
pub fn assert_symplectic_canonical(kb: &mut KnowledgeBase, key: &FactKey) -> Result<()> {
    let x = kb.manifold(&key.manifold)?;
    if !x.symplectic || x.b2_plus() < 2 {
        return Err(Error::PreconditionViolation(format!(
            "{} is not flagged symplectic with b2+ >= 2",
            x.name
        )));
    }
    kb.assert_fact(
        key,
        BfState::Unknown,
        SwFact::Parity(Parity::Odd),
        CATALOG_AXIOM,
    )?;
    Ok(())
}

/// `K3` with `SW(K3, 0) = 1`.
pub fn k3_canonical(kb: &mut KnowledgeBase) -> Result<FactKey> {
    let k3 = catalog::k3();
    let key = FactKey::new(&k3.name, vec![0; k3.rank()]);
    kb.add_manifold(k3)?;
    kb.assert_fact(&key, BfState::Unknown, SwFact::Value(1), CATALOG_AXIOM)?;
    Ok(key)
}

/// `#m K3` as a declared connected sum of canonical K3 structures.
pub fn sum_k3_canonical(kb: &mut KnowledgeBase, m: usize) -> Result<FactKey> {
    let k = k3_canonical(kb)?;
    if m == 1 {
        return Ok(k);
    }
    kb.declare_connected_sum(&vec![k; m], None)
}

/// Adds a catalog manifold with its seed facts. Returns the canonical
/// structure when the catalog knows one.
pub fn add_catalog(
    kb: &mut KnowledgeBase,
    name: &str,
    m: Option<usize>,
) -> Result<Option<FactKey>> {
    match name {
        "K3" => k3_canonical(kb).map(Some),
        "mK3" => {
            let m = m.ok_or_else(|| Error::Parse("mK3 needs a number of summands".into()))?;
            sum_k3_canonical(kb, m).map(Some)
        }
        _ => {
            kb.add_manifold(catalog::by_name(name, m)?)?;
            Ok(None)
        }
    }
}
