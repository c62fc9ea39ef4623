use serde::{Deserialize, Serialize};

use super::cone::Cone;
use super::lattice::{dot, IVec};
use crate::error::{bail, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub n: usize,
    pub cones: Vec<Cone>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    pub complete: bool,
    pub not_pointed: Vec<usize>,
    /// Pairs whose intersection is not a common face, or not in the fan.
    pub bad_intersections: Vec<(usize, usize)>,
    /// A direction not covered by any cone.
    pub gap: Option<IVec>,
    /// Walls (codimension one cones) not shared by exactly two maximal cones.
    pub open_walls: Vec<usize>,
}

impl Fan {
    pub fn new(n: usize, cones: Vec<Vec<IVec>>) -> Result<Fan> {
        Ok(Fan { n, cones: cones.into_iter().map(|g| Cone::new(n, g)).collect::<Result<_>>()? })
    }

    /// All cones spanned by subsets of `{±e_1, ..., ±e_n}` with at most one sign per axis.
    pub fn standard(n: usize) -> Fan {
        let mut cones = vec![];
        for code in 0..3usize.pow(n as u32) {
            let mut gens = vec![];
            let mut c = code;
            for i in 0..n {
                let s = match c % 3 {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                c /= 3;
                if s != 0 {
                    gens.push((0..n).map(|j| if i == j { s } else { 0 }).collect());
                }
            }
            cones.push(Cone { n, gens });
        }
        cones.sort_by_key(|c| c.gens.len());
        Fan { n, cones }
    }

    pub fn nonzero_cones(&self) -> impl Iterator<Item = &Cone> {
        self.cones.iter().filter(|c| c.dim() > 0)
    }
}

fn covered(fan: &Fan, v: &[i64]) -> bool {
    fan.cones.iter().any(|c| c.contains(v))
}

fn angular_gap(fan: &Fan) -> Option<IVec> {
    let mut dirs: Vec<IVec> = vec![];
    for c in &fan.cones {
        for g in c.normalized().gens {
            if g.iter().any(|&x| x != 0) {
                dirs.push(g);
            }
        }
    }
    if fan.n == 1 {
        return [vec![1], vec![-1]].into_iter().find(|v| !covered(fan, v));
    }
    if dirs.is_empty() {
        return Some(vec![1, 0]);
    }
    let angle = |v: &IVec| (v[1] as f64).atan2(v[0] as f64);
    dirs.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap());
    dirs.dedup();
    let mut tests = dirs.clone();
    for i in 0..dirs.len() {
        let (a, b) = (&dirs[i], &dirs[(i + 1) % dirs.len()]);
        let cross = a[0] * b[1] - a[1] * b[0];
        if cross > 0 {
            tests.push(vec![a[0] + b[0], a[1] + b[1]]);
        } else {
            tests.push(vec![-a[1], a[0]]);
        }
    }
    tests.into_iter().find(|v| !covered(fan, v))
}

/// Checks the fan axioms and that the cones cover `R^n` (`n ≤ 3`).
pub fn is_complete_fan(fan: &Fan) -> Result<FanReport> {
    let n = fan.n;
    if n == 0 || n > 3 {
        bail!(Unsupported, "completeness is only decided in rank 1 to 3");
    }
    let mut rep = FanReport::default();
    for (i, c) in fan.cones.iter().enumerate() {
        if !c.is_pointed() {
            rep.not_pointed.push(i);
        }
    }
    for (i, a) in fan.cones.iter().enumerate() {
        for (j, b) in fan.cones.iter().enumerate().skip(i + 1) {
            let x = a.intersect(b);
            if !a.has_face(&x) || !b.has_face(&x) || !fan.cones.iter().any(|c| c.same_as(&x)) {
                rep.bad_intersections.push((i, j));
            }
        }
    }
    if n <= 2 {
        rep.gap = angular_gap(fan);
    } else {
        let tops: Vec<&Cone> = fan.cones.iter().filter(|c| c.dim() == n).collect();
        if tops.is_empty() {
            rep.gap = Some(vec![1, 0, 0]);
        }
        for (i, w) in fan.cones.iter().enumerate() {
            if w.dim() == n - 1 && tops.iter().filter(|t| t.has_face(w)).count() != 2 {
                rep.open_walls.push(i);
            }
        }
        if rep.gap.is_none() && !rep.open_walls.is_empty() {
            let w = &fan.cones[rep.open_walls[0]];
            let inner: IVec = (0..n).map(|i| w.gens.iter().map(|g| g[i]).sum()).collect();
            let normal = w.facet_normals().into_iter().find(|y| dot(y, &inner) == 0 && w.gens.iter().all(|g| dot(y, g) == 0));
            if let Some(y) = normal {
                for s in [1, -1] {
                    let v: IVec = inner.iter().zip(&y).map(|(a, b)| 8 * a + s * b).collect();
                    if !covered(fan, &v) {
                        rep.gap = Some(v);
                        break;
                    }
                }
            }
        }
    }
    rep.complete = rep.not_pointed.is_empty() && rep.bad_intersections.is_empty() && rep.gap.is_none() && rep.open_walls.is_empty();
    Ok(rep)
}
