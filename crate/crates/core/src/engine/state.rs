use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::FgAbGroup;
use crate::error::{Error, Result};

/// What is known about one Bauer–Furuta invariant. The non-`Unknown` states
/// form a small join semilattice; joining incompatible states is an error.
#[derive(
    Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize,
)]
pub enum BfState {
    #[default]
    Unknown,
    Nonzero,
    NonzeroTorsion,
    NonzeroFree,
    Zero,
}

impl BfState {
    pub fn is_known(self) -> bool {
        self != BfState::Unknown
    }

    pub fn is_nonzero(self) -> bool {
        matches!(
            self,
            BfState::Nonzero | BfState::NonzeroTorsion | BfState::NonzeroFree
        )
    }

    pub fn is_zero(self) -> bool {
        self == BfState::Zero
    }

    /// Known to be a torsion element (zero counts).
    pub fn is_torsion(self) -> bool {
        matches!(self, BfState::Zero | BfState::NonzeroTorsion)
    }

    pub fn join(self, other: BfState) -> Result<BfState> {
        use BfState::*;
        Ok(match (self, other) {
            (a, b) if a == b => a,
            (Unknown, x) | (x, Unknown) => x,
            (Nonzero, x) | (x, Nonzero) if x.is_nonzero() => x,
            (a, b) => {
                return Err(Error::Inconsistent(format!(
                    "BF cannot be both {a} and {b}"
                )));
            }
        })
    }

    /// Whether the state is compatible with the target group.
    pub fn check_group(self, g: &FgAbGroup) -> Result<()> {
        let bad = |why: &str| Err(Error::Inconsistent(format!("BF {self} in {g}: {why}")));
        match self {
            BfState::NonzeroTorsion if g.torsion().is_empty() => bad("the group has no torsion"),
            BfState::NonzeroFree if g.free_rank() == 0 => bad("the group is finite"),
            s if s.is_nonzero() && g.is_trivial() => bad("the group is trivial"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for BfState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BfState::Unknown => "Unknown",
            BfState::Nonzero => "Nonzero",
            BfState::NonzeroTorsion => "NonzeroTorsion",
            BfState::NonzeroFree => "NonzeroFree",
            BfState::Zero => "Zero",
        })
    }
}

impl std::str::FromStr for BfState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "unknown" => BfState::Unknown,
            "nonzero" => BfState::Nonzero,
            "nonzerotorsion" | "nonzero-torsion" | "torsion" => BfState::NonzeroTorsion,
            "nonzerofree" | "nonzero-free" | "free" => BfState::NonzeroFree,
            "zero" => BfState::Zero,
            _ => return Err(Error::Parse(format!("unknown BF state `{s}`"))),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: i64) -> Parity {
        if v.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Knowledge about an integer Seiberg–Witten invariant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub enum SwFact {
    #[default]
    Unknown,
    Parity(Parity),
    Value(#[serde(with = "crate::decimal")] i64),
}

impl SwFact {
    pub fn parity(self) -> Option<Parity> {
        match self {
            SwFact::Unknown => None,
            SwFact::Parity(p) => Some(p),
            SwFact::Value(v) => Some(Parity::of(v)),
        }
    }

    /// `Some(true)` when known nonzero, `Some(false)` when known zero.
    pub fn nonzero(self) -> Option<bool> {
        match self {
            SwFact::Value(v) => Some(v != 0),
            SwFact::Parity(Parity::Odd) => Some(true),
            _ => None,
        }
    }

    pub fn join(self, other: SwFact) -> Result<SwFact> {
        use SwFact::*;
        let clash = || {
            Err(Error::Inconsistent(format!(
                "SW cannot be both {self} and {other}"
            )))
        };
        match (self, other) {
            (a, b) if a == b => Ok(a),
            (Unknown, x) | (x, Unknown) => Ok(x),
            (Parity(_), Parity(_)) => clash(),
            (Parity(p), Value(v)) | (Value(v), Parity(p)) => {
                if self::Parity::of(v) == p {
                    Ok(Value(v))
                } else {
                    clash()
                }
            }
            (Value(_), Value(_)) => clash(),
        }
    }
}

impl fmt::Display for SwFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwFact::Unknown => f.write_str("unknown"),
            SwFact::Parity(Parity::Even) => f.write_str("even"),
            SwFact::Parity(Parity::Odd) => f.write_str("odd"),
            SwFact::Value(v) => write!(f, "{v}"),
        }
    }
}

impl std::str::FromStr for SwFact {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "unknown" => SwFact::Unknown,
            "even" => SwFact::Parity(Parity::Even),
            "odd" => SwFact::Parity(Parity::Odd),
            v => SwFact::Value(v.parse().map_err(|_| {
                Error::Parse(format!(
                    "SW value `{s}` is not an integer, odd, even or unknown"
                ))
            })?),
        })
    }
}

/// Three-valued answer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "True",
            Tri::False => "False",
            Tri::Unknown => "Unknown",
        })
    }
}
