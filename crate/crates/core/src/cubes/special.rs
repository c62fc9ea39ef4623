use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::diagram::{totalise, NDiagram, TotalisedComplex};
use super::incidence::{all_subsets, card, elements, sign, singleton, subsets_of, total_incidence, Subset};
use crate::error::{bail, Error, Result};
use crate::homalg::{check_map_dims, cochain_defect, svec_add, svec_neg, FreeComplex, GradedMap, LinearOp, Matrix, SVec};
use crate::rings::{LRing, Poly};

/// A complex `C` with self-maps `f_k` and higher homotopies `H_S` (`s ≥ 2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialCube {
    pub n: usize,
    pub complex: FreeComplex,
    /// `f[k-1] = f_k`.
    pub f: Vec<GradedMap>,
    /// `H_S`; absent entries are zero.
    pub h: BTreeMap<Subset, GradedMap>,
}

impl SpecialCube {
    pub fn new(complex: FreeComplex, f: Vec<GradedMap>, h: BTreeMap<Subset, GradedMap>) -> Result<Self> {
        let n = f.len();
        for (k, fk) in f.iter().enumerate() {
            if fk.degree != 0 {
                bail!(Structural, "f_{} has degree {}", k + 1, fk.degree);
            }
            check_map_dims(fk, &complex, &complex)?;
        }
        for (&s, hs) in &h {
            if card(s) < 2 || s >> n != 0 {
                bail!(Structural, "homotopy index {s} is not a subset of size ≥ 2 of N");
            }
            if hs.degree != 1 - card(s) as i64 {
                bail!(Structural, "H_{s} has degree {} instead of {}", hs.degree, 1 - card(s) as i64);
            }
            check_map_dims(hs, &complex, &complex)?;
        }
        let h = h.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(SpecialCube { n, complex, f, h })
    }

    pub fn ring(&self) -> LRing {
        self.complex.ring()
    }

    /// `d` for `S = ∅`, `f_k` for `S = {k}`, `H_S` otherwise.
    pub fn map_for(&self, s: Subset) -> GradedMap {
        match card(s) {
            0 => self.complex.d().clone(),
            1 => self.f[elements(s)[0] - 1].clone(),
            c => self.h.get(&s).cloned().unwrap_or_else(|| GradedMap::zero(self.ring(), 1 - c as i64)),
        }
    }

    pub fn expand(&self) -> NDiagram {
        let mut maps = BTreeMap::new();
        for b in all_subsets(self.n) {
            for a in subsets_of(b) {
                if a != b {
                    let m = self.map_for(b & !a);
                    if !m.is_zero() {
                        maps.insert((b, a), m);
                    }
                }
            }
        }
        NDiagram::new(self.n, vec![self.complex.clone(); 1 << self.n], maps).expect("special diagram")
    }

    pub fn totalise(&self) -> Result<TotalisedComplex> {
        totalise(&self.expand())
    }
}

pub fn expand_special(s: &SpecialCube) -> NDiagram {
    s.expand()
}

/// The expression that must vanish at `S` for the data to form a cube:
/// `d²` (`s = 0`), `d f - f d` (`s = 1`), `dH + Hd - (f_k f_l - f_l f_k)` (`s = 2`),
/// and the five-part sum otherwise.
pub fn criterion_sum(cube: &SpecialCube, s_set: Subset) -> GradedMap {
    let d = cube.complex.d();
    let s = card(s_set);
    match s {
        0 => d.compose(d),
        1 => {
            let f = cube.map_for(s_set);
            d.compose(&f).sub(&f.compose(d))
        }
        2 => {
            let el = elements(s_set);
            let (fk, fl) = (&cube.f[el[0] - 1], &cube.f[el[1] - 1]);
            let h = cube.map_for(s_set);
            d.compose(&h).add(&h.compose(d)).sub(&fk.compose(fl).sub(&fl.compose(fk)))
        }
        _ => {
            let hs = cube.map_for(s_set);
            let ss = total_incidence(s_set, 0);
            let mut acc = d.compose(&hs).scale_int(sign(s) * ss).add(&hs.compose(d).scale_int(ss));
            for z in elements(s_set) {
                let zs = singleton(z);
                let rest = s_set & !zs;
                let c1 = total_incidence(s_set, rest) * total_incidence(rest, 0);
                acc = acc.add(&cube.f[z - 1].compose(&cube.map_for(rest)).scale_int(c1));
                let c2 = sign(s) * total_incidence(s_set, zs);
                acc = acc.add(&cube.map_for(rest).compose(&cube.f[z - 1]).scale_int(c2));
            }
            for t in subsets_of(s_set) {
                let tc = card(t);
                if tc < 2 || s - tc < 2 {
                    continue;
                }
                let c = sign(tc * s) * total_incidence(s_set, t) * total_incidence(t, 0);
                acc = acc.add(&cube.map_for(s_set & !t).compose(&cube.map_for(t)).scale_int(c));
            }
            acc
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialReport {
    /// `(S, passed)` for every `S ⊆ N` in increasing bitmask order.
    pub results: Vec<(Subset, bool)>,
    pub first_failure: Option<Subset>,
}

impl SpecialReport {
    pub fn is_cube(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub fn verify_special(cube: &SpecialCube) -> SpecialReport {
    let results: Vec<(Subset, bool)> = all_subsets(cube.n).map(|s| (s, criterion_sum(cube, s).is_zero())).collect();
    let first_failure = results.iter().find(|(_, ok)| !ok).map(|(s, _)| *s);
    SpecialReport { results, first_failure }
}

/// `Triv(C; f_1, ..., f_n)`: all higher homotopies zero.
pub fn trivial_cube(c: &FreeComplex, f: Vec<GradedMap>) -> Result<SpecialCube> {
    for (k, fk) in f.iter().enumerate() {
        check_map_dims(fk, c, c)?;
        if fk.degree != 0 || !cochain_defect(fk, c, c).is_zero() {
            bail!(Contract, "f_{} is not a cochain map", k + 1);
        }
    }
    for k in 0..f.len() {
        for l in k + 1..f.len() {
            if !f[k].compose(&f[l]).sub(&f[l].compose(&f[k])).is_zero() {
                bail!(Contract, "f_{} and f_{} do not commute", k + 1, l + 1);
            }
        }
    }
    SpecialCube::new(c.clone(), f, BTreeMap::new())
}

/// Input of the derived-cube construction: `α: C -> D`, `β: D -> C`,
/// `G` with `dG + Gd = αβ - id_D`, and commuting cochain maps `h_k` on `D`.
pub struct DerivedInput<'a> {
    pub c: &'a FreeComplex,
    pub d: &'a FreeComplex,
    pub alpha: &'a dyn LinearOp,
    pub beta: &'a dyn LinearOp,
    pub g: &'a dyn LinearOp,
    pub h: Vec<&'a dyn LinearOp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// True when every operator is linear over the ring of `D`, so the basis check is conclusive.
    pub exact: bool,
    /// Half-width of the box of monomial multiples of basis vectors that was checked otherwise.
    pub window: i64,
    pub vectors: usize,
}

pub fn basis(c: &FreeComplex) -> Vec<(i64, SVec)> {
    let one = c.ring().one();
    let mut out = Vec::new();
    for (&l, &r) in c.ranks() {
        for j in 0..r {
            out.push((l, [(j, one.clone())].into_iter().collect()));
        }
    }
    out
}

/// Basis vectors times all monomials with exponents in `[-w, w]^n`.
pub fn windowed_basis(c: &FreeComplex, w: i64) -> Vec<(i64, SVec)> {
    let ring = c.ring();
    let mut exps: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..ring.nvars {
        exps = exps.into_iter().flat_map(|e| (-w..=w).map(move |a| [e.clone(), vec![a]].concat())).collect();
    }
    let mut out = Vec::new();
    for (&l, &r) in c.ranks() {
        for j in 0..r {
            for e in &exps {
                let m = Poly::monomial(ring, e.clone(), ring.coeff.one());
                out.push((l, [(j, m)].into_iter().collect()));
            }
        }
    }
    out
}

fn first_bad<F: Fn(i64, &SVec) -> SVec>(vs: &[(i64, SVec)], f: F) -> Option<i64> {
    vs.iter().find(|(l, v)| !f(*l, v).is_empty()).map(|(l, _)| *l)
}

impl DerivedInput<'_> {
    fn all_ring_linear(&self) -> bool {
        self.alpha.is_ring_linear()
            && self.beta.is_ring_linear()
            && self.g.is_ring_linear()
            && self.h.iter().all(|h| h.is_ring_linear())
    }

    /// Checks the hypotheses exactly on a basis of `D` (or on a window of
    /// monomial multiples of it when some operator is only additive).
    pub fn check(&self, window: i64) -> Result<IdentityCheck> {
        let exact = self.all_ring_linear();
        let w = if exact { 0 } else { window };
        let dv = windowed_basis(self.d, w);
        let cv = basis(self.c);
        let dd = self.d.d();
        let dc = self.c.d();
        for (name, op) in [("alpha", self.alpha), ("beta", self.beta), ("G", self.g)] {
            let want = match name {
                "G" => -1,
                _ => 0,
            };
            if op.degree() != want {
                bail!(Structural, "{name} has degree {} instead of {want}", op.degree());
            }
        }
        if let Some(l) = first_bad(&cv, |l, v| svec_add(&dd.apply(l, &self.alpha.apply(l, v)), &svec_neg(&self.alpha.apply(l + 1, &dc.apply(l, v))))) {
            bail!(Contract, "alpha is not a cochain map (degree {l})");
        }
        if let Some(l) = first_bad(&dv, |l, v| svec_add(&dc.apply(l, &self.beta.apply(l, v)), &svec_neg(&self.beta.apply(l + 1, &dd.apply(l, v))))) {
            bail!(Contract, "beta is not a cochain map (degree {l})");
        }
        let homotopy = |l: i64, v: &SVec| {
            let lhs = svec_add(&dd.apply(l - 1, &self.g.apply(l, v)), &self.g.apply(l + 1, &dd.apply(l, v)));
            let rhs = svec_add(&self.alpha.apply(l, &self.beta.apply(l, v)), &svec_neg(v));
            svec_add(&lhs, &svec_neg(&rhs))
        };
        if let Some(l) = first_bad(&dv, homotopy) {
            bail!(Contract, "dG + Gd != alpha beta - id in degree {l}");
        }
        for (k, h) in self.h.iter().enumerate() {
            if h.degree() != 0 {
                bail!(Structural, "h_{} has degree {}", k + 1, h.degree());
            }
            if let Some(l) = first_bad(&dv, |l, v| svec_add(&dd.apply(l, &h.apply(l, v)), &svec_neg(&h.apply(l + 1, &dd.apply(l, v))))) {
                bail!(Contract, "h_{} is not a cochain map (degree {l})", k + 1);
            }
            for (j, h2) in self.h.iter().enumerate().skip(k + 1) {
                if let Some(l) = first_bad(&dv, |l, v| svec_add(&h.apply(l, &h2.apply(l, v)), &svec_neg(&h2.apply(l, &h.apply(l, v))))) {
                    bail!(Contract, "h_{} and h_{} do not commute (degree {l})", k + 1, j + 1);
                }
            }
        }
        Ok(IdentityCheck { exact, window: w, vectors: dv.len() })
    }
}

/// Images `V(T)(e)` of the basis of `C`, where
/// `V({z}) = h_z α` and `V(T) = Σ_k (-1)^{k-1} h_{z_k} G V(T ∖ z_k)`.
fn derived_images(input: &DerivedInput, n: usize) -> BTreeMap<Subset, Vec<(i64, SVec)>> {
    let cb = basis(input.c);
    let mut v: BTreeMap<Subset, Vec<(i64, SVec)>> = BTreeMap::new();
    let mut order: Vec<Subset> = (1..(1u32 << n)).collect();
    order.sort_by_key(|&s| (card(s), s));
    for t in order {
        let el = elements(t);
        let imgs = if el.len() == 1 {
            let h = input.h[el[0] - 1];
            cb.iter().map(|(l, e)| (*l, h.apply(*l, &input.alpha.apply(*l, e)))).collect()
        } else {
            let tc = el.len() as i64;
            cb.iter()
                .enumerate()
                .map(|(idx, (l, _))| {
                    let mut acc = SVec::new();
                    for (k, &z) in el.iter().enumerate() {
                        let prev = &v[&(t & !singleton(z))][idx].1;
                        let deg_prev = l - (tc - 2);
                        let gv = input.g.apply(deg_prev, prev);
                        let hv = input.h[z - 1].apply(deg_prev - 1, &gv);
                        acc = if k % 2 == 0 { svec_add(&acc, &hv) } else { svec_add(&acc, &svec_neg(&hv)) };
                    }
                    (*l, acc)
                })
                .collect()
        };
        v.insert(t, imgs);
    }
    v
}

fn map_from_images(c: &FreeComplex, degree: i64, imgs: &[(i64, SVec)]) -> GradedMap {
    let ring = c.ring();
    let mut out = GradedMap::zero(ring, degree);
    let mut idx = 0;
    for (&l, &r) in c.ranks() {
        let mut m = Matrix::zeros(ring, c.rank(l + degree), r);
        for j in 0..r {
            for (i, p) in &imgs[idx].1 {
                m.set(*i, j, p.clone());
            }
            idx += 1;
        }
        out.set_block(l, m);
    }
    out
}

/// `Der(C; α, β, G; h_1, ..., h_n)` after checking its hypotheses.
pub fn derive_cube(input: &DerivedInput, window: i64) -> Result<SpecialCube> {
    input.check(window)?;
    derive_cube_unchecked(input)
}

pub fn derive_cube_unchecked(input: &DerivedInput) -> Result<SpecialCube> {
    let n = input.h.len();
    let v = derived_images(input, n);
    let mut f = Vec::with_capacity(n);
    let mut h = BTreeMap::new();
    for (t, imgs) in &v {
        let deg = 1 - card(*t) as i64;
        let out: Vec<(i64, SVec)> = imgs.iter().map(|(l, x)| (*l, input.beta.apply(l + deg, x))).collect();
        for (l, x) in &out {
            if let Some((_, p)) = x.iter().next() {
                if p.ring() != input.c.ring() {
                    return Err(Error::Structural(format!("beta lands in {} not in {} (degree {l})", p.ring(), input.c.ring())));
                }
            }
        }
        let m = map_from_images(input.c, deg, &out);
        if card(*t) == 1 {
            f.push(m);
        } else {
            h.insert(*t, m);
        }
    }
    SpecialCube::new(input.c.clone(), f, h)
}
