use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::descriptor::{BlowdownRecord, ManifoldDescriptor};
use super::lattice::{form_invariants, plumbing_lattice};
use super::spinc::{check_characteristic, dimension_of_class, SpincStructure};
use crate::abelian::{integer_nullspace, IntMatrix};
use crate::error::{Error, Result};

/// Largest `p` for which [`lift_spinc`] enumerates candidate restrictions.
pub const MAX_LIFT_P: i64 = 7;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SurfaceKind {
    Embedded,
    ImmersedSphere,
}

/// A surface in a 4-manifold, recorded by its homology class (at the
/// manifold's class scale) and its genus or double points.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SurfaceData {
    pub kind: SurfaceKind,
    #[serde(with = "crate::decimal::vec")]
    pub class: Vec<i64>,
    #[serde(with = "crate::decimal", default)]
    pub genus: i64,
    #[serde(with = "crate::decimal", default)]
    pub positive_double_points: i64,
    #[serde(with = "crate::decimal", default)]
    pub negative_double_points: i64,
    pub non_torsion: bool,
}

impl SurfaceData {
    pub fn embedded(class: Vec<i64>, genus: i64) -> Self {
        SurfaceData {
            kind: SurfaceKind::Embedded,
            non_torsion: class.iter().any(|&x| x != 0),
            class,
            genus,
            positive_double_points: 0,
            negative_double_points: 0,
        }
    }

    pub fn immersed_sphere(class: Vec<i64>, positive: i64, negative: i64) -> Self {
        SurfaceData {
            kind: SurfaceKind::ImmersedSphere,
            non_torsion: class.iter().any(|&x| x != 0),
            class,
            genus: 0,
            positive_double_points: positive,
            negative_double_points: negative,
        }
    }

    pub fn self_intersection(&self, x: &ManifoldDescriptor) -> Result<i64> {
        x.square(&self.class)
    }

    /// `max(0, 2g − 2)`, the negative part of the Euler characteristic.
    pub fn chi_minus(&self) -> i64 {
        (2 * self.genus - 2).max(0)
    }

    pub fn validate(&self, x: &ManifoldDescriptor) -> Result<()> {
        x.check_len(&self.class)?;
        if self.genus < 0 || self.positive_double_points < 0 || self.negative_double_points < 0 {
            return Err(Error::PreconditionViolation(
                "negative genus or double-point count".into(),
            ));
        }
        match self.kind {
            SurfaceKind::Embedded
                if self.positive_double_points + self.negative_double_points > 0 =>
            {
                Err(Error::PreconditionViolation(
                    "an embedded surface has no double points".into(),
                ))
            }
            SurfaceKind::ImmersedSphere if self.genus != 0 => Err(Error::PreconditionViolation(
                "an immersed sphere has genus 0".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Gluing {
    ConnectedSum,
    /// Glue the named boundary component of the first manifold to the named
    /// component of the second.
    Boundary {
        left: String,
        right: String,
    },
}

fn first_free_exceptional(classes: &BTreeMap<String, Vec<i64>>) -> String {
    (1..)
        .map(|k| format!("E{k}"))
        .find(|n| !classes.contains_key(n))
        .expect("unbounded search")
}

/// `X # CP²bar`, with the new exceptional class recorded as `E1`, `E2`, …
pub fn blowup(x: &ManifoldDescriptor) -> ManifoldDescriptor {
    let (form, boundary, euler) = x.raw_parts();
    let form = IntMatrix::block_diagonal(form, &IntMatrix::diagonal(&[-1]));
    let mut classes: BTreeMap<String, Vec<i64>> = x
        .classes()
        .iter()
        .map(|(k, v)| {
            let mut v = v.clone();
            v.push(0);
            (k.clone(), v)
        })
        .collect();
    let e = first_free_exceptional(&classes);
    let mut ev = vec![0; x.rank() + 1];
    ev[x.rank()] = x.class_scale();
    classes.insert(e, ev);
    let mut out = ManifoldDescriptor::assemble(
        format!("{}#CP2bar", x.name),
        x.b1(),
        x.b2_plus(),
        x.b2_minus() + 1,
        form,
        boundary.to_vec(),
        euler.map(|e| e + 1),
        x.class_scale(),
        classes,
        x.pieces().to_vec(),
    );
    out.h1_no_2torsion = x.h1_no_2torsion;
    out.symplectic = x.symplectic;
    out
}

/// `𝔰_r = 𝔰 # 𝔰_{(2r+1)E}` on `blowup(x)`, returned with the blown-up
/// descriptor. The dimension drop `r(r+1)` is recomputed and checked.
pub fn blowup_spinc(
    x: &ManifoldDescriptor,
    s: &SpincStructure,
    r: i64,
) -> Result<(ManifoldDescriptor, SpincStructure)> {
    check_characteristic(x, &s.c1)?;
    let blown = blowup(x);
    let mut c1 = s.c1.clone();
    c1.push((2 * r + 1) * x.class_scale());
    let sr = SpincStructure::characteristic(&blown, c1)?;
    if x.b1() == 0 {
        let before = dimension_of_class(x, &s.c1)?;
        let after = dimension_of_class(&blown, &sr.c1)?;
        if before - after != r * (r + 1) {
            return Err(Error::Inconsistent(format!(
                "blowup changed d from {before} to {after} with r = {r}"
            )));
        }
    }
    Ok((blown, sr))
}

fn rescaled(x: &ManifoldDescriptor, to: i64) -> ManifoldDescriptor {
    let mut y = x.clone();
    if to != x.class_scale() {
        y.rescale(to / x.class_scale());
    }
    y
}

/// Gluing of two manifolds. Betti numbers and signatures add, χ adds (minus
/// two for a connected sum) and the form is the block sum. The result is not
/// marked symplectic; callers that know better can set the flag.
pub fn glue(
    x1: &ManifoldDescriptor,
    x2: &ManifoldDescriptor,
    how: &Gluing,
) -> Result<ManifoldDescriptor> {
    let scale = x1.class_scale().lcm(&x2.class_scale());
    let (a, b) = (rescaled(x1, scale), rescaled(x2, scale));
    let (fa, ba, _) = a.raw_parts();
    let (fb, bb, _) = b.raw_parts();

    let (name, boundary, euler) = match how {
        Gluing::ConnectedSum => {
            let mut bd = ba.to_vec();
            bd.extend_from_slice(bb);
            (
                format!("{}#{}", x1.name, x2.name),
                bd,
                a.euler() + b.euler() - 2,
            )
        }
        Gluing::Boundary { left, right } => {
            let li = ba.iter().position(|c| &c.label == left).ok_or_else(|| {
                Error::IncompatibleBoundary(format!("{} has no boundary component {left}", x1.name))
            })?;
            let ri = bb.iter().position(|c| &c.label == right).ok_or_else(|| {
                Error::IncompatibleBoundary(format!(
                    "{} has no boundary component {right}",
                    x2.name
                ))
            })?;
            for (c, owner) in [(&ba[li], &x1.name), (&bb[ri], &x2.name)] {
                if !c.gluable() {
                    return Err(Error::IncompatibleBoundary(format!(
                        "component {} of {owner} is not flagged as an SWF-spherical rational homology sphere",
                        c.label
                    )));
                }
            }
            let mut bd: Vec<_> = ba
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != li)
                .map(|(_, c)| c.clone())
                .collect();
            bd.extend(
                bb.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != ri)
                    .map(|(_, c)| c.clone()),
            );
            (
                format!("{}∪{}", x1.name, x2.name),
                bd,
                a.euler() + b.euler(),
            )
        }
    };

    let closed_euler = 2 - 2 * (a.b1() + b.b1()) + a.rank() as i64 + b.rank() as i64;
    if boundary.is_empty() && euler != closed_euler {
        return Err(Error::PreconditionViolation(format!(
            "glued Euler characteristic {euler} disagrees with the closed value {closed_euler}"
        )));
    }

    let mut classes = BTreeMap::new();
    for (k, v) in a.classes() {
        let mut v = v.clone();
        v.extend(std::iter::repeat_n(0, b.rank()));
        classes.insert(k.clone(), v);
    }
    for (k, v) in b.classes() {
        let mut w = vec![0; a.rank()];
        w.extend_from_slice(v);
        let key = if classes.contains_key(k) {
            format!("{k}@{}", x2.name)
        } else {
            k.clone()
        };
        classes.insert(key, w);
    }
    let mut pieces = a.pieces().to_vec();
    pieces.extend_from_slice(b.pieces());

    let bounded = !boundary.is_empty();
    let mut out = ManifoldDescriptor::assemble(
        name,
        a.b1() + b.b1(),
        a.b2_plus() + b.b2_plus(),
        a.b2_minus() + b.b2_minus(),
        IntMatrix::block_diagonal(fa, fb),
        boundary,
        bounded.then_some(euler),
        scale,
        classes,
        pieces,
    );
    out.h1_no_2torsion = a.h1_no_2torsion && b.h1_no_2torsion;
    Ok(out)
}

/// `#m` copies of `x` by iterated connected sum, named `#mX`.
pub fn connected_sum_power(x: &ManifoldDescriptor, m: usize) -> Result<ManifoldDescriptor> {
    if m == 0 {
        return Err(Error::OutOfRange(
            "a connected sum needs at least one summand".into(),
        ));
    }
    let mut acc = x.clone();
    for _ in 1..m {
        acc = glue(&acc, x, &Gluing::ConnectedSum)?;
    }
    Ok(acc.renamed(&format!("#{m}{}", x.name)))
}

/// Logarithmic transform of multiplicity `p` along a cusp neighbourhood of
/// an immersed fishtail sphere.
///
/// Betti numbers and the form are unchanged. The class scale is multiplied
/// by `p`, the multiple fibre is recorded as `f` and the old fibre class as
/// `alpha`, so that `alpha = p·f`.
pub fn log_transform(
    x: &ManifoldDescriptor,
    fishtail: &SurfaceData,
    p: i64,
) -> Result<ManifoldDescriptor> {
    if p < 1 {
        return Err(Error::OutOfRange(format!("log transform multiplicity {p}")));
    }
    fishtail.validate(x)?;
    let bad = |why: &str| {
        Err(Error::PreconditionViolation(format!(
            "fishtail data: {why}"
        )))
    };
    if fishtail.kind != SurfaceKind::ImmersedSphere {
        return bad("not an immersed sphere");
    }
    if fishtail.positive_double_points != 1 {
        return bad("needs exactly one positive double point");
    }
    if !fishtail.non_torsion {
        return bad("class is torsion");
    }
    if x.raw_pair(&fishtail.class, &fishtail.class)? != 0 {
        return bad("self-intersection is not zero");
    }
    let mut y = x.clone();
    y.rescale(p);
    y.set_class("f", fishtail.class.clone());
    y.set_class("alpha", fishtail.class.iter().map(|c| c * p).collect());
    if p != 1 {
        y.symplectic = false;
        y = y.renamed(&format!("{}_({p})", x.name));
    }
    Ok(y)
}

/// Replaces a configuration `C_p` of spheres by the rational ball `B_p`.
///
/// `spheres` are the classes of the plumbing spheres in `x`'s stored basis.
/// The new lattice is the orthogonal complement of their span, with classes
/// allowed denominators up to `p²`.
pub fn rational_blowdown(
    x: &ManifoldDescriptor,
    p: i64,
    spheres: &[Vec<i64>],
) -> Result<ManifoldDescriptor> {
    if p < 2 {
        return Err(Error::OutOfRange(format!(
            "rational blowdown needs p >= 2, got {p}"
        )));
    }
    if x.class_scale() != 1 {
        return Err(Error::Unsupported(
            "rational blowdown of a descriptor with rescaled classes".into(),
        ));
    }
    if spheres.len() as i64 != p - 1 {
        return Err(Error::BadEmbedding(format!(
            "C_{p} has {} spheres, {} given",
            p - 1,
            spheres.len()
        )));
    }
    for s in spheres {
        x.check_len(s)
            .map_err(|e| Error::BadEmbedding(e.to_string()))?;
    }
    let e = IntMatrix::from_columns(x.rank(), spheres);
    let q = x.form();
    let gram = e.transpose().mul(q).mul(&e);
    if gram != plumbing_lattice(p) {
        return Err(Error::BadEmbedding(format!(
            "Gram matrix {:?} is not the C_{p} plumbing {:?}",
            gram.to_rows(),
            plumbing_lattice(p).to_rows()
        )));
    }
    let complement = integer_nullspace(&e.transpose().mul(q));
    let form = complement.transpose().mul(q).mul(&complement);
    let inv = form_invariants(&form);
    if inv.nullity != 0 || inv.positive as i64 != x.b2_plus() {
        return Err(Error::BadEmbedding(
            "complement of the plumbing is degenerate".into(),
        ));
    }
    let mut out = ManifoldDescriptor::assemble(
        format!("{}_bd{p}", x.name),
        x.b1(),
        inv.positive as i64,
        inv.negative as i64,
        form,
        x.boundary().to_vec(),
        None,
        p * p,
        BTreeMap::new(),
        Vec::new(),
    );
    out.h1_no_2torsion = x.h1_no_2torsion;
    let piece = out.as_piece();
    out.set_pieces(vec![piece]);
    out.set_blowdown(BlowdownRecord {
        p,
        parent: Box::new(x.clone()),
        spheres: spheres.to_vec(),
        complement,
    });
    Ok(out)
}

/// Integer adjugate via cofactors; fine for the small plumbing matrices.
fn adjugate(c: &IntMatrix) -> IntMatrix {
    let n = c.rows();
    IntMatrix::from_fn(n, n, |i, j| {
        // adj[i][j] = (−1)^{i+j} det(minor without row j, column i)
        let rows: Vec<Vec<i64>> = (0..n)
            .filter(|&r| r != j)
            .map(|r| (0..n).filter(|&k| k != i).map(|k| c[(r, k)]).collect())
            .collect();
        let m = if n == 1 {
            1
        } else {
            IntMatrix::from_rows(&rows).determinant()
        };
        if (i + j) % 2 == 0 {
            m
        } else {
            -m
        }
    })
}

/// The characteristic lift of a spin^c structure on a rational blowdown
/// with the same virtual dimension.
///
/// The lift is `L = c̄ + Σ (C⁻¹w)_i e_i` where `w` lists the values of `L`
/// on the plumbing spheres; every `w` with `wᵀC⁻¹w = −(p−1)` and entries in
/// `[−(p+1), p+1]` is tried and the integral characteristic ones are kept.
pub fn lift_spinc(x_p: &ManifoldDescriptor, s_p: &SpincStructure) -> Result<SpincStructure> {
    let rec = x_p.blowdown_record().ok_or_else(|| {
        Error::PreconditionViolation(format!("{} is not a rational blowdown", x_p.name))
    })?;
    let parent = &rec.parent;
    if !(x_p.h1_no_2torsion && parent.h1_no_2torsion) {
        return Err(Error::NonUnique(
            "H1 may have 2-torsion, so characteristic lifts need not be unique".into(),
        ));
    }
    let p = rec.p;
    if p > MAX_LIFT_P {
        return Err(Error::Unsupported(format!(
            "lift enumeration for p = {p} > {MAX_LIFT_P}"
        )));
    }
    if s_p.manifold != x_p.name {
        return Err(Error::PreconditionViolation(format!(
            "spin^c structure on {} lifted from {}",
            s_p.manifold, x_p.name
        )));
    }
    let d_target = dimension_of_class(x_p, &s_p.c1)?;

    let c = plumbing_lattice(p);
    let adj = adjugate(&c);
    let det = c.determinant() as i128;
    let scale = x_p.class_scale() as i128;
    let n = parent.rank();
    // c̄ in parent coordinates, times `scale`.
    let cbar: Vec<i128> = (0..n)
        .map(|i| {
            (0..rec.complement.cols())
                .map(|k| rec.complement[(i, k)] as i128 * s_p.c1[k] as i128)
                .sum()
        })
        .collect();

    let m = (p - 1) as usize;
    let bound = p + 1;
    let mut w = vec![-bound; m];
    let mut found: Vec<Vec<i64>> = Vec::new();
    loop {
        let parity_ok = (0..m).all(|i| (w[i] - c[(i, i)]).rem_euclid(2) == 0);
        if parity_ok {
            let y = adj.mul_vec(&w); // C⁻¹w = y / det
            let quad: i128 = w.iter().zip(&y).map(|(&a, &b)| a as i128 * b as i128).sum();
            if quad == -((p - 1) as i128) * det {
                // L = cbar/scale + E y / det; common denominator scale·det.
                let den = scale * det;
                let mut l = Vec::with_capacity(n);
                let mut integral = true;
                for i in 0..n {
                    let ey: i128 = (0..m)
                        .map(|k| rec.spheres[k][i] as i128 * y[k] as i128)
                        .sum();
                    let num = cbar[i] * det + ey * scale;
                    if num % den != 0 {
                        integral = false;
                        break;
                    }
                    l.push((num / den) as i64);
                }
                if integral && check_characteristic(parent, &l).is_ok() {
                    found.push(l);
                }
            }
        }
        // Odometer over the box.
        let mut i = 0;
        while i < m && w[i] == bound {
            w[i] = -bound;
            i += 1;
        }
        if i == m {
            break;
        }
        w[i] += 1;
    }

    match found.len() {
        0 => Err(Error::NoLift(format!(
            "no characteristic lift of {s_p} to {}",
            parent.name
        ))),
        1 => {
            let l = found.pop().expect("one lift");
            let d = dimension_of_class(parent, &l)?;
            if d != d_target {
                return Err(Error::Inconsistent(format!(
                    "lift has d = {d}, downstairs d = {d_target}"
                )));
            }
            SpincStructure::characteristic(parent, l)
        }
        k => Err(Error::NonUnique(format!(
            "{k} characteristic lifts of {s_p}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourman::catalog;
    use crate::fourman::spinc::virtual_dimension;

    #[test]
    fn blowups() {
        let b = blowup(&catalog::s4());
        assert_eq!(b.form(), &IntMatrix::diagonal(&[-1]));
        let k = blowup(&catalog::k3());
        assert_eq!((k.b2_minus(), k.signature(), k.euler()), (20, -17, 25));
        let bb = blowup(&blowup(&catalog::s4()));
        assert_eq!(bb.form(), &IntMatrix::diagonal(&[-1, -1]));
        assert_eq!(bb.class("E1"), Some(&vec![1, 0]));
        assert_eq!(bb.class("E2"), Some(&vec![0, 1]));
    }

    #[test]
    fn blowup_spinc_drop() {
        let k3 = catalog::k3();
        let s = SpincStructure::trivial(&k3);
        for (r, drop) in [(0, 0), (-1, 0), (2, 6)] {
            let (x, sr) = blowup_spinc(&k3, &s, r).unwrap();
            assert_eq!(virtual_dimension(&x, &sr).unwrap(), -drop);
        }
    }

    #[test]
    fn sums() {
        let k3 = catalog::k3();
        let kk = glue(&k3, &k3, &Gluing::ConnectedSum).unwrap();
        assert_eq!((kk.b2_plus(), kk.signature(), kk.euler()), (6, -32, 46));
        assert_eq!(
            virtual_dimension(&kk, &SpincStructure::trivial(&kk)).unwrap(),
            1
        );
        let ks = glue(&k3, &catalog::s4(), &Gluing::ConnectedSum).unwrap();
        assert!(ks.same_topology(&k3));
        assert_eq!(kk.pieces().len(), 2);
    }

    #[test]
    fn boundary_gluing() {
        use crate::fourman::BoundaryComponent;
        let y = |ok: bool| BoundaryComponent {
            label: "Y".into(),
            swf_spherical: ok,
            rational_homology_sphere: true,
        };
        // Two halves of K3 along a homology sphere; χ must add exactly.
        let h = crate::fourman::lattice::hyperbolic();
        let a = ManifoldDescriptor::bounded("A", 0, h.clone(), vec![y(true)], 3).unwrap();
        let b = ManifoldDescriptor::bounded(
            "B",
            0,
            IntMatrix::block_diagonal(&h, &IntMatrix::diagonal(&[1, -1])),
            vec![y(true)],
            5,
        )
        .unwrap();
        let g = glue(
            &a,
            &b,
            &Gluing::Boundary {
                left: "Y".into(),
                right: "Y".into(),
            },
        )
        .unwrap();
        assert!(g.is_closed());
        assert_eq!(g.b2_plus(), 3);
        assert_eq!(g.euler(), 8);
        let bad = ManifoldDescriptor::bounded("C", 0, h, vec![y(false)], 3).unwrap();
        assert!(matches!(
            glue(
                &a,
                &bad,
                &Gluing::Boundary {
                    left: "Y".into(),
                    right: "Y".into()
                }
            ),
            Err(Error::IncompatibleBoundary(_))
        ));
    }

    #[test]
    fn log_transform_records_fibre() {
        let x = catalog::s2xs2();
        let fish = SurfaceData::immersed_sphere(vec![1, 0], 1, 0);
        let y1 = log_transform(&x, &fish, 1).unwrap();
        assert_eq!(y1.class("f"), Some(&vec![1, 0]));
        assert_eq!(y1.form(), x.form());
        let y2 = log_transform(&x, &fish, 2).unwrap();
        assert_eq!(y2.betti(), x.betti());
        let (f, a) = (y2.class("f").unwrap(), y2.class("alpha").unwrap());
        assert_eq!(a, &f.iter().map(|c| 2 * c).collect::<Vec<_>>());
        let two = SurfaceData::immersed_sphere(vec![1, 0], 2, 0);
        assert!(log_transform(&x, &two, 2).is_err());
        let diag = SurfaceData::immersed_sphere(vec![1, 1], 1, 0);
        assert!(log_transform(&x, &diag, 2).is_err());
    }

    #[test]
    fn blowdown_and_lift() {
        let x = catalog::s2xs2();
        let xp = rational_blowdown(&x, 2, &[vec![1, -2]]).unwrap();
        assert_eq!((xp.b2_plus(), xp.b2_minus()), (1, 0));
        assert_eq!(xp.class_scale(), 4);
        let s = SpincStructure::new(&xp, vec![2]).unwrap();
        assert_eq!(virtual_dimension(&xp, &s).unwrap(), -2);
        let l = lift_spinc(&xp, &s).unwrap();
        assert_eq!(l.c1, vec![0, 2]);
        assert_eq!(virtual_dimension(&x, &l).unwrap(), -2);
        assert!(matches!(
            rational_blowdown(&x, 2, &[vec![1, 1]]),
            Err(Error::BadEmbedding(_))
        ));
        let restored = blowup(&xp);
        assert_eq!(restored.betti(), x.betti());
    }

    #[test]
    fn lift_needs_h1_flag() {
        let x = catalog::s2xs2().with_h1_no_2torsion(false);
        let xp = rational_blowdown(&x, 2, &[vec![1, -2]]).unwrap();
        let s = SpincStructure::new(&xp, vec![2]).unwrap();
        assert!(matches!(lift_spinc(&xp, &s), Err(Error::NonUnique(_))));
    }
}
