use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::lattice::{dot, integer_kernel, is_unimodular, primitive, rank, rational_kernel, IVec};
use crate::error::{bail, Result};

/// `cone{v_1, ..., v_l}` in `R^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub n: usize,
    pub gens: Vec<IVec>,
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    go(0, m, k, &mut cur, &mut out);
    out
}

/// Generators of `{x : <g, x> ≥ 0 for all g}`: extreme rays of the pointed
/// part followed by `±` a basis of the lineality space.
fn polar_generators(n: usize, rows: &[IVec]) -> Vec<IVec> {
    let rows: Vec<IVec> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let lin = rational_kernel(&rows, n);
    let k = n - lin.len();
    let mut rays = BTreeSet::new();
    if k > 0 {
        for s in combinations(rows.len(), k - 1) {
            let mut eqs: Vec<IVec> = s.iter().map(|&i| rows[i].clone()).collect();
            eqs.extend(lin.iter().cloned());
            let ker = rational_kernel(&eqs, n);
            if ker.len() != 1 {
                continue;
            }
            for sign in [1, -1] {
                let v: IVec = ker[0].iter().map(|x| sign * x).collect();
                if rows.iter().all(|r| dot(r, &v) >= 0) {
                    rays.insert(primitive(&v));
                }
            }
        }
    }
    let mut out: Vec<IVec> = rays.into_iter().collect();
    for l in lin {
        out.push(l.iter().map(|x| -x).collect());
        out.push(l);
    }
    out
}

impl Cone {
    pub fn new(n: usize, gens: Vec<IVec>) -> Result<Cone> {
        if gens.iter().any(|g| g.len() != n) {
            bail!(Structural, "generator of the wrong length for a cone in R^{n}");
        }
        Ok(Cone { n, gens })
    }

    pub fn zero(n: usize) -> Cone {
        Cone { n, gens: vec![] }
    }

    pub fn whole(n: usize) -> Cone {
        let mut gens = vec![];
        for i in 0..n {
            for s in [1, -1] {
                gens.push((0..n).map(|j| if i == j { s } else { 0 }).collect());
            }
        }
        Cone { n, gens }
    }

    pub fn dim(&self) -> usize {
        rank(&self.gens)
    }

    /// Inequalities `<y, x> ≥ 0` cutting out the cone.
    pub fn facet_normals(&self) -> Vec<IVec> {
        polar_generators(self.n, &self.gens)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.facet_normals().iter().all(|y| dot(y, v) >= 0)
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        let normals = self.facet_normals();
        other.gens.iter().all(|g| normals.iter().all(|y| dot(y, g) >= 0))
    }

    pub fn same_as(&self, other: &Cone) -> bool {
        self.contains_cone(other) && other.contains_cone(self)
    }

    pub fn is_pointed(&self) -> bool {
        cospan(self).1 == 0
    }

    /// Primitive extreme rays plus `±` a lineality basis.
    pub fn normalized(&self) -> Cone {
        Cone { n: self.n, gens: polar_generators(self.n, &self.facet_normals()) }
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        let mut normals = self.facet_normals();
        normals.extend(other.facet_normals());
        Cone { n: self.n, gens: polar_generators(self.n, &normals) }
    }

    /// Whether `face` is a face of `self`.
    pub fn has_face(&self, face: &Cone) -> bool {
        if !self.contains_cone(face) {
            return false;
        }
        let normals = self.facet_normals();
        let tight: Vec<&IVec> = normals.iter().filter(|y| face.gens.iter().all(|g| dot(y, g) == 0)).collect();
        let y: IVec = (0..self.n).map(|i| tight.iter().map(|t| t[i]).sum()).collect();
        let on_face: Vec<IVec> = self.gens.iter().filter(|g| dot(&y, g) == 0).cloned().collect();
        face.same_as(&Cone { n: self.n, gens: on_face })
    }
}

/// A lattice basis of `σ ∩ (-σ)` and its dimension.
pub fn cospan(sigma: &Cone) -> (Vec<IVec>, usize) {
    let normals = sigma.facet_normals();
    let basis = integer_kernel(&normals, sigma.n).expect("integer kernel");
    let u = basis.len();
    (basis, u)
}

pub fn dual_cone(sigma: &Cone) -> Result<Cone> {
    if sigma.n > 3 {
        bail!(Unsupported, "dual cones are only computed in rank at most 3");
    }
    Ok(Cone { n: sigma.n, gens: sigma.facet_normals() })
}

/// A lattice basis of `Z^n` made of points of a pointed full-dimensional cone.
pub fn basis_inside_cone(sigma: &Cone) -> Result<Vec<IVec>> {
    let n = sigma.n;
    if sigma.dim() != n || !sigma.is_pointed() {
        bail!(Domain, "basis_inside_cone needs a pointed cone of dimension {n}");
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let normals = sigma.facet_normals();
    for r in 1..=12i64 {
        let mut pts: Vec<IVec> = vec![vec![]];
        for _ in 0..n {
            pts = pts.into_iter().flat_map(|p: IVec| (-r..=r).map(move |x| [p.clone(), vec![x]].concat())).collect();
        }
        let mut pts: Vec<IVec> =
            pts.into_iter().filter(|p| p.iter().any(|&x| x != 0) && primitive(p) == *p && normals.iter().all(|y| dot(y, p) >= 0)).collect();
        pts.sort_by_key(|p| (p.iter().map(|x| x.abs()).sum::<i64>(), p.clone()));
        if let Some(b) = search(&pts, n, &mut vec![]) {
            return Ok(b);
        }
    }
    bail!(Internal, "no unimodular basis found inside the cone")
}

fn search(pts: &[IVec], n: usize, cur: &mut Vec<IVec>) -> Option<Vec<IVec>> {
    if cur.len() == n {
        return is_unimodular(cur).then(|| cur.clone());
    }
    for (i, p) in pts.iter().enumerate() {
        cur.push(p.clone());
        if rank(cur) == cur.len() {
            if let Some(b) = search(&pts[i + 1..], n, cur) {
                return Some(b);
            }
        }
        cur.pop();
    }
    None
}
