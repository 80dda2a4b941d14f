//! Stable cell complexes with at most three cells, and the stunted
//! projective spaces built from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stems::StemElement;

pub const MAX_CELLS: usize = 3;

/// One component of an attaching map: a stem element onto an earlier cell.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Attach {
    #[serde(with = "crate::decimal")]
    pub onto: usize,
    pub element: StemElement,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Cell {
    #[serde(with = "crate::decimal")]
    pub dim: i64,
    pub attaching: Vec<Attach>,
}

/// A stable complex `S^{d₀} ∪ e^{d₁} ∪ …`. Zero attaching components are
/// dropped on construction, so a wedge has no attaching data at all.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Cell>", into = "Vec<Cell>")]
pub struct StableComplex {
    cells: Vec<Cell>,
}

impl StableComplex {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() || cells.len() > MAX_CELLS {
            return Err(Error::OutOfRange(format!(
                "a complex needs 1..={MAX_CELLS} cells, got {}",
                cells.len()
            )));
        }
        let mut out = Vec::with_capacity(cells.len());
        for (i, mut c) in cells.into_iter().enumerate() {
            if let Some(prev) = out.last().map(|p: &Cell| p.dim) {
                if c.dim <= prev {
                    return Err(Error::Parse("cell dimensions must increase".into()));
                }
            }
            for a in &c.attaching {
                if a.onto >= i {
                    return Err(Error::Parse(format!(
                        "cell {i} attaches onto a later cell {}",
                        a.onto
                    )));
                }
                let want = c.dim - 1 - out[a.onto].dim;
                if a.element.degree() != want {
                    return Err(Error::Parse(format!(
                        "attaching e^{} onto e^{} needs a degree-{want} stem, got {}",
                        c.dim,
                        out[a.onto].dim,
                        a.element.degree()
                    )));
                }
            }
            c.attaching.retain(|a| !a.element.is_zero());
            c.attaching.sort_by_key(|a| a.onto);
            if c.attaching.windows(2).any(|w| w[0].onto == w[1].onto) {
                return Err(Error::Parse(format!(
                    "cell {i} has two components onto one cell"
                )));
            }
            out.push(c);
        }
        Ok(StableComplex { cells: out })
    }

    pub fn sphere(dim: i64) -> Self {
        StableComplex {
            cells: vec![Cell {
                dim,
                attaching: Vec::new(),
            }],
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn dims(&self) -> Vec<i64> {
        self.cells.iter().map(|c| c.dim).collect()
    }

    /// Attaching component of cell `to` onto cell `from`, if nonzero.
    pub fn attaching(&self, to: usize, from: usize) -> Option<StemElement> {
        self.cells[to]
            .attaching
            .iter()
            .find(|a| a.onto == from)
            .map(|a| a.element)
    }

    pub fn is_wedge(&self) -> bool {
        self.cells.iter().all(|c| c.attaching.is_empty())
    }

    /// `X / S^{d₀}`: drops the bottom cell and every component onto it.
    pub fn collapse_bottom(&self) -> Option<StableComplex> {
        if self.cells.len() < 2 {
            return None;
        }
        let cells = self.cells[1..]
            .iter()
            .map(|c| Cell {
                dim: c.dim,
                attaching: c
                    .attaching
                    .iter()
                    .filter(|a| a.onto > 0)
                    .map(|a| Attach {
                        onto: a.onto - 1,
                        element: a.element,
                    })
                    .collect(),
            })
            .collect();
        Some(StableComplex { cells })
    }

    /// Whether the cells in `range` have no attaching data among themselves.
    pub fn is_wedge_on(&self, range: std::ops::Range<usize>) -> bool {
        let start = range.start;
        self.cells[range]
            .iter()
            .all(|c| c.attaching.iter().all(|a| a.onto < start))
    }
}

/// `ℂPⁿ_k = ℂPⁿ/ℂP^{n−k}` for `k ≤ 3`.
pub fn cp_stunted(n: i64, k: i64) -> Result<StableComplex> {
    let cell = |dim: i64, attaching: Vec<Attach>| Cell { dim, attaching };
    let on = |onto: usize, element: StemElement| Attach { onto, element };
    match k {
        1 if n >= 1 => Ok(StableComplex::sphere(2 * n)),
        2 if n >= 3 => StableComplex::new(vec![
            cell(2 * n - 2, vec![]),
            cell(2 * n, vec![on(0, StemElement::eta(n - 1))]),
        ]),
        3 if n >= 4 => {
            let nu = if n % 2 == 1 { (n + 1) / 2 } else { (n - 2) / 2 };
            StableComplex::new(vec![
                cell(2 * n - 4, vec![]),
                cell(2 * n - 2, vec![on(0, StemElement::eta(n - 2))]),
                cell(
                    2 * n,
                    vec![on(0, StemElement::nu(nu)), on(1, StemElement::eta(n - 1))],
                ),
            ])
        }
        1..=3 => Err(Error::OutOfRange(format!("CP^{n}_{k} needs a larger n"))),
        _ => Err(Error::OutOfRange(format!(
            "no cell decomposition available for k = {k}"
        ))),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Quaternionic {
    HP,
    Q,
}

/// `ℍPⁿ_{n−2}` or the quasi-projective `Qⁿ_{n−2}`, for `n ≥ 3`.
pub fn hp_q_stunted(n: i64, which: Quaternionic) -> Result<StableComplex> {
    if n < 3 {
        return Err(Error::OutOfRange(format!(
            "quaternionic stunted space needs n >= 3, got {n}"
        )));
    }
    let (bottom, top, coeff) = match which {
        Quaternionic::HP => (4 * n - 4, 4 * n, n - 1),
        Quaternionic::Q => (4 * n - 5, 4 * n - 1, n),
    };
    StableComplex::new(vec![
        Cell {
            dim: bottom,
            attaching: vec![],
        },
        Cell {
            dim: top,
            attaching: vec![Attach {
                onto: 0,
                element: StemElement::nu(coeff),
            }],
        },
    ])
}

/// Compact spelling: `S8,e10:eta` or `S4,S6,e8:nu+eta`. A leading `S`
/// marks a cell with no attaching map; each `e` component names its target
/// cell implicitly through its degree.
impl FromStr for StableComplex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cells: Vec<Cell> = Vec::new();
        for (i, tok) in s.split(',').map(str::trim).enumerate() {
            let (head, rest) = match tok.split_once(':') {
                Some((h, r)) => (h, Some(r)),
                None => (tok, None),
            };
            let (kind, digits) = head.split_at(head.chars().next().map_or(0, char::len_utf8));
            let dim: i64 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad cell `{tok}`")))?;
            let mut attaching = Vec::new();
            match (kind, rest) {
                ("S", None) | ("e", None) => {}
                ("e", Some(r)) => {
                    for term in r.split('+') {
                        let element: StemElement = term.parse()?;
                        let target = dim - 1 - element.degree();
                        let onto = cells.iter().position(|c| c.dim == target).ok_or_else(|| {
                            Error::Parse(format!(
                                "no cell of dimension {target} for `{term}` in cell {i}"
                            ))
                        })?;
                        attaching.push(Attach { onto, element });
                    }
                }
                _ => return Err(Error::Parse(format!("bad cell `{tok}`"))),
            }
            if i == 0 && !attaching.is_empty() {
                return Err(Error::Parse(
                    "the bottom cell cannot have attaching data".into(),
                ));
            }
            cells.push(Cell { dim, attaching });
        }
        StableComplex::new(cells)
    }
}

impl fmt::Display for StableComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cells
            .iter()
            .map(|c| {
                if c.attaching.is_empty() {
                    format!("S{}", c.dim)
                } else {
                    let terms: Vec<String> =
                        c.attaching.iter().map(|a| a.element.ascii()).collect();
                    format!("e{}:{}", c.dim, terms.join("+"))
                }
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for StableComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StableComplex({self})")
    }
}

impl TryFrom<Vec<Cell>> for StableComplex {
    type Error = Error;

    fn try_from(cells: Vec<Cell>) -> Result<Self> {
        StableComplex::new(cells)
    }
}

impl From<StableComplex> for Vec<Cell> {
    fn from(c: StableComplex) -> Self {
        c.cells
    }
}
