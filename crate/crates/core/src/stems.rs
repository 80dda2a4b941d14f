//! Stable stems `π^S_d` for `d ≤ 5` with their composition products.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::abelian::{FgAbGroup, GroupHom};
use crate::error::{Error, Result};

/// Highest stem degree this crate knows.
pub const MAX_STEM: i64 = 5;

/// Order of the generator in degree `d`: `0` for ℤ, `1` when the group is trivial.
fn generator_order(d: i64) -> u64 {
    match d {
        0 => 0,
        1 | 2 => 2,
        3 => 24,
        _ => 1,
    }
}

/// Table lookup that treats negative degrees as known zeros and returns
/// `None` above the table.
pub fn stem_group_known(d: i64) -> Option<FgAbGroup> {
    match d {
        d if d < 0 => Some(FgAbGroup::trivial()),
        d if d > MAX_STEM => None,
        d => Some(FgAbGroup::cyclic(generator_order(d))),
    }
}

/// `π^S_d` for `−5 ≤ d ≤ 5`.
pub fn stem_group(d: i64) -> Result<FgAbGroup> {
    if d.abs() > MAX_STEM {
        return Err(Error::OutOfRange(format!("stem degree {d} outside -5..5")));
    }
    Ok(stem_group_known(d).expect("in table"))
}

/// The table for `−5..=5`.
pub fn stem_table() -> Vec<(i64, FgAbGroup)> {
    (-MAX_STEM..=MAX_STEM)
        .map(|d| (d, stem_group(d).expect("in range")))
        .collect()
}

/// A multiple of the generator of `π^S_d` (`ι`, `η`, `η²`, `ν`; degrees 4
/// and 5 carry only zero). Coefficients are kept reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "StemRepr", into = "StemRepr")]
pub struct StemElement {
    degree: i64,
    coeff: i64,
}

impl StemElement {
    pub fn new(degree: i64, coeff: i64) -> Result<Self> {
        if !(0..=MAX_STEM).contains(&degree) {
            return Err(Error::OutOfRange(format!(
                "stem element of degree {degree}"
            )));
        }
        let coeff = match generator_order(degree) {
            0 => coeff,
            o => coeff.rem_euclid(o as i64),
        };
        Ok(StemElement { degree, coeff })
    }

    pub fn zero(degree: i64) -> Result<Self> {
        Self::new(degree, 0)
    }

    pub fn iota(k: i64) -> Self {
        StemElement {
            degree: 0,
            coeff: k,
        }
    }

    pub fn eta(k: i64) -> Self {
        Self::new(1, k).expect("degree 1")
    }

    pub fn eta2(k: i64) -> Self {
        Self::new(2, k).expect("degree 2")
    }

    pub fn nu(k: i64) -> Self {
        Self::new(3, k).expect("degree 3")
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn coeff(&self) -> i64 {
        self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }

    pub fn add(&self, other: &StemElement) -> Result<StemElement> {
        if self.degree != other.degree {
            return Err(Error::OutOfRange(format!(
                "sum of stems in degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Self::new(self.degree, self.coeff + other.coeff)
    }

    pub fn scale(&self, k: i64) -> StemElement {
        Self::new(self.degree, self.coeff * k).expect("same degree")
    }

    /// ASCII spelling accepted by `FromStr`, e.g. `3nu`.
    pub fn ascii(&self) -> String {
        let name = ["iota", "eta", "eta2", "nu", "zero4", "zero5"][self.degree as usize];
        match self.coeff {
            1 => name.to_string(),
            k => format!("{k}{name}"),
        }
    }
}

/// Composition product in the stable stems.
///
/// `ι` is the unit, `η·η = η²`, `η·η² = 12ν`, `η·ν = 0`, and everything landing
/// in degree 4 or 5 vanishes.
pub fn compose(a: StemElement, b: StemElement) -> Result<StemElement> {
    let d = a.degree + b.degree;
    if d > MAX_STEM {
        return Err(Error::OutOfRange(format!(
            "product lands in stem degree {d}"
        )));
    }
    let unit = match (a.degree, b.degree) {
        (0, _) | (_, 0) => 1,
        (1, 1) => 1,
        (1, 2) | (2, 1) => 12,
        _ => 0,
    };
    StemElement::new(d, a.coeff * b.coeff * unit)
}

/// `α^* : π^S_m → π^S_{m+|α|}`, `x ↦ x∘α`.
pub fn precomposition_map(alpha: StemElement, m: i64) -> Result<GroupHom> {
    let t = m + alpha.degree;
    if m.abs() > MAX_STEM || t.abs() > MAX_STEM {
        return Err(Error::OutOfRange(format!(
            "precomposition π_{m} → π_{t} leaves the stem table"
        )));
    }
    let source = stem_group(m)?;
    let target = stem_group(t)?;
    if source.is_trivial() || target.is_trivial() {
        return Ok(GroupHom::zero(source, target));
    }
    let image = compose(StemElement::new(m, 1)?, alpha)?;
    Ok(GroupHom::scalar(source, target, image.coeff)?)
}

impl fmt::Display for StemElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff == 0 {
            return f.write_str("0");
        }
        let sym = match self.degree {
            0 => "ι",
            1 => "η",
            2 => "η²",
            _ => "ν",
        };
        match self.coeff {
            1 => f.write_str(sym),
            k => write!(f, "{k}{sym}"),
        }
    }
}

impl fmt::Debug for StemElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.degree)
    }
}

/// Parses `iota`, `eta`, `eta2`, `nu` with an optional integer prefix
/// (`3nu`, `-1eta`); ASCII only.
impl FromStr for StemElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .find(|c: char| c.is_ascii_alphabetic())
            .ok_or_else(|| Error::Parse(format!("no stem generator in `{s}`")))?;
        let (num, name) = s.split_at(split);
        let k = match num {
            "" | "+" => 1,
            "-" => -1,
            n => n
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad coefficient `{n}`: {e}")))?,
        };
        let degree = match name {
            "iota" => 0,
            "eta" => 1,
            "eta2" => 2,
            "nu" => 3,
            other => return Err(Error::Parse(format!("unknown stem generator `{other}`"))),
        };
        StemElement::new(degree, k)
    }
}

#[derive(Serialize, Deserialize)]
struct StemRepr {
    #[serde(with = "crate::decimal")]
    degree: i64,
    #[serde(with = "crate::decimal")]
    coeff: i64,
}

impl From<StemElement> for StemRepr {
    fn from(s: StemElement) -> Self {
        StemRepr {
            degree: s.degree,
            coeff: s.coeff,
        }
    }
}

impl TryFrom<StemRepr> for StemElement {
    type Error = Error;

    fn try_from(r: StemRepr) -> Result<Self> {
        let e = StemElement::new(r.degree, r.coeff)?;
        if e.coeff != r.coeff {
            return Err(Error::Parse("stem coefficient is not reduced".into()));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(stem_group(3).unwrap(), FgAbGroup::cyclic(24));
        assert!(stem_group(-1).unwrap().is_trivial());
        assert!(stem_group(4).unwrap().is_trivial());
        assert!(stem_group(6).is_err());
        assert!(stem_group(-6).is_err());
        assert_eq!(stem_table().len(), 11);
    }

    #[test]
    fn products() {
        let eta = StemElement::eta(1);
        assert_eq!(compose(eta, eta).unwrap(), StemElement::eta2(1));
        assert_eq!(
            compose(eta, StemElement::eta2(1)).unwrap(),
            StemElement::nu(12)
        );
        assert!(compose(eta, StemElement::nu(1)).unwrap().is_zero());
        assert_eq!(
            compose(StemElement::iota(5), StemElement::nu(7)).unwrap(),
            StemElement::nu(11)
        );
        assert!(compose(StemElement::nu(1), StemElement::nu(1)).is_err());
    }

    #[test]
    fn reduced_coefficients() {
        assert!(StemElement::eta(2).is_zero());
        assert!(StemElement::nu(24).is_zero());
        assert_eq!(StemElement::nu(-1).coeff(), 23);
        assert!(StemElement::new(4, 7).unwrap().is_zero());
    }

    #[test]
    fn precomposition() {
        let f = precomposition_map(StemElement::eta(1), 0).unwrap();
        assert!(f.is_surjective());
        let g = precomposition_map(StemElement::eta(3), 0).unwrap(); // (n−1)η, n = 4
        assert!(!g.is_zero());
        assert!(precomposition_map(StemElement::eta(4), 0)
            .unwrap()
            .is_zero());
        let h = precomposition_map(StemElement::nu(6), 0).unwrap();
        assert_eq!(h.apply(&[1]), vec![6]);
        assert!(precomposition_map(StemElement::nu(1), 3).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("eta".parse::<StemElement>().unwrap(), StemElement::eta(1));
        assert_eq!("3nu".parse::<StemElement>().unwrap(), StemElement::nu(3));
        assert_eq!("eta2".parse::<StemElement>().unwrap(), StemElement::eta2(1));
        assert!("4xi".parse::<StemElement>().is_err());
        assert_eq!(StemElement::nu(4).to_string(), "4ν");
        assert_eq!(StemElement::eta(1).to_string(), "η");
    }
}
