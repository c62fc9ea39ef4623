use std::collections::BTreeMap;

use super::incidence::{all_subsets, card, is_subset, sign, subsets_of, total_incidence, Subset};
use crate::error::{bail, Result};
use crate::homalg::{check_map_dims, FreeComplex, GradedMap, Matrix};
use crate::rings::LRing;

/// Block structure of `Tot(F)^l = ⊕_A F(A)^{l-a}` over a chosen list of subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub members: Vec<Subset>,
    pub ranks: BTreeMap<Subset, BTreeMap<i64, usize>>,
}

impl Layout {
    pub fn new(n: usize, members: Vec<Subset>, rank_of: impl Fn(Subset) -> BTreeMap<i64, usize>) -> Self {
        let ranks = members.iter().map(|&a| (a, rank_of(a))).collect();
        Layout { n, members, ranks }
    }

    pub fn summand_rank(&self, l: i64, a: Subset) -> usize {
        self.ranks[&a].get(&(l - card(a) as i64)).copied().unwrap_or(0)
    }

    pub fn offset(&self, l: i64, a: Subset) -> usize {
        self.members.iter().take_while(|&&m| m != a).map(|&m| self.summand_rank(l, m)).sum()
    }

    pub fn total_rank(&self, l: i64) -> usize {
        self.members.iter().map(|&m| self.summand_rank(l, m)).sum()
    }

    pub fn degree_bounds(&self) -> Option<(i64, i64)> {
        let degs: Vec<i64> = self
            .members
            .iter()
            .flat_map(|&a| self.ranks[&a].iter().filter(|(_, r)| **r > 0).map(move |(l, _)| l + card(a) as i64))
            .collect();
        Some((*degs.iter().min()?, *degs.iter().max()?))
    }

    pub fn total_ranks(&self) -> BTreeMap<i64, usize> {
        match self.degree_bounds() {
            Some((lo, hi)) => (lo..=hi).map(|l| (l, self.total_rank(l))).filter(|(_, r)| *r > 0).collect(),
            None => BTreeMap::new(),
        }
    }
}

/// Assembles a map `Tot(src) -> Tot(tgt)` of degree `deg` from components
/// `(B, A) ↦ φ_{B,A}: F(A) -> F'(B)`, each of degree `a - b + deg`.
pub fn assemble(
    ring: LRing,
    src: &Layout,
    tgt: &Layout,
    deg: i64,
    blocks: &BTreeMap<(Subset, Subset), GradedMap>,
) -> Result<GradedMap> {
    let mut out = GradedMap::zero(ring, deg);
    let (Some((lo, hi)), Some(_)) = (src.degree_bounds(), tgt.degree_bounds()) else { return Ok(out) };
    for l in lo..=hi {
        let rows = tgt.total_rank(l + deg);
        let cols = src.total_rank(l);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zeros(ring, rows, cols);
        for (&(b, a), phi) in blocks {
            if !src.ranks.contains_key(&a) || !tgt.ranks.contains_key(&b) {
                continue;
            }
            let expect = card(a) as i64 - card(b) as i64 + deg;
            if phi.degree != expect {
                bail!(Structural, "component ({b},{a}) has degree {} instead of {expect}", phi.degree);
            }
            if let Some(blk) = phi.block(l - card(a) as i64) {
                m.add_block(tgt.offset(l + deg, b), src.offset(l, a), blk, 1);
            }
        }
        out.set_block(l, m);
    }
    Ok(out)
}

/// Extracts the `(B, A)` component of a map between totalisations at degree `l`.
pub fn component(map: &GradedMap, src: &Layout, tgt: &Layout, l: i64, b: Subset, a: Subset) -> Matrix {
    let rows = tgt.summand_rank(l + map.degree, b);
    let cols = src.summand_rank(l, a);
    match map.block(l) {
        Some(m) => m.submatrix(tgt.offset(l + map.degree, b), rows, src.offset(l, a), cols),
        None => Matrix::zeros(map.ring, rows, cols),
    }
}

#[derive(Clone, Debug)]
pub struct NDiagram {
    pub n: usize,
    pub ring: LRing,
    /// `F(A)` indexed by bitmask; the differential of `F(A)` is `H_{A,A}`.
    pub complexes: Vec<FreeComplex>,
    /// `H_{B,A}` for `A ⊊ B`; absent entries are zero.
    pub maps: BTreeMap<(Subset, Subset), GradedMap>,
}

impl NDiagram {
    pub fn new(n: usize, complexes: Vec<FreeComplex>, maps: BTreeMap<(Subset, Subset), GradedMap>) -> Result<Self> {
        if complexes.len() != 1 << n {
            bail!(Structural, "expected {} complexes, got {}", 1 << n, complexes.len());
        }
        let ring = complexes[0].ring();
        for (&(b, a), h) in &maps {
            if a == b || !is_subset(a, b) || b >> n != 0 {
                bail!(Structural, "map index ({b},{a}) is not a proper inclusion in N");
            }
            let expect = card(a) as i64 - card(b) as i64 + 1;
            if h.degree != expect {
                bail!(Structural, "H_{{{b},{a}}} has degree {} but must have degree {expect}", h.degree);
            }
            check_map_dims(h, &complexes[a as usize], &complexes[b as usize])?;
        }
        Ok(NDiagram { n, ring, complexes, maps })
    }

    pub fn h(&self, b: Subset, a: Subset) -> GradedMap {
        if a == b {
            return self.complexes[a as usize].d().clone();
        }
        self.maps
            .get(&(b, a))
            .cloned()
            .unwrap_or_else(|| GradedMap::zero(self.ring, card(a) as i64 - card(b) as i64 + 1))
    }

    pub fn layout(&self) -> Layout {
        let complexes = &self.complexes;
        Layout::new(self.n, all_subsets(self.n).collect(), |a| complexes[a as usize].ranks().clone())
    }

    /// The signed components `D_{B,A} = (-1)^{ab} [B:A] H_{B,A}`.
    pub fn d_components(&self) -> BTreeMap<(Subset, Subset), GradedMap> {
        let mut out = BTreeMap::new();
        for b in all_subsets(self.n) {
            for a in subsets_of(b) {
                let h = self.h(b, a);
                if h.is_zero() {
                    continue;
                }
                let s = sign(card(a) * card(b)) * total_incidence(b, a);
                out.insert((b, a), h.scale_int(s));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TotalisedComplex {
    pub complex: FreeComplex,
    pub layout: Layout,
}

impl TotalisedComplex {
    pub fn block(&self, l: i64, b: Subset, a: Subset) -> Matrix {
        component(self.complex.d(), &self.layout, &self.layout, l, b, a)
    }
}

/// Assembles `Tot(F)` with differential `D(F)`; `D ∘ D = 0` is not checked.
pub fn totalise(f: &NDiagram) -> Result<TotalisedComplex> {
    totalise_on(f, f.layout())
}

fn totalise_on(f: &NDiagram, layout: Layout) -> Result<TotalisedComplex> {
    let comps: BTreeMap<_, _> = f
        .d_components()
        .into_iter()
        .filter(|((b, a), _)| layout.ranks.contains_key(b) && layout.ranks.contains_key(a))
        .collect();
    let d = assemble(f.ring, &layout, &layout, 1, &comps)?;
    let complex = FreeComplex::new_unchecked(f.ring, layout.total_ranks(), d)?;
    Ok(TotalisedComplex { complex, layout })
}

/// `(D ∘ D)_{B,A} = Σ_S (-1)^{bs+sa} [B:S][S:A] H_{B,S} H_{S,A}`, as maps `F(A) -> F(B)`.
pub fn d_squared(f: &NDiagram) -> BTreeMap<(Subset, Subset), GradedMap> {
    let comps = f.d_components();
    let mut out = BTreeMap::new();
    for b in all_subsets(f.n) {
        for a in subsets_of(b) {
            let mut acc = GradedMap::zero(f.ring, card(a) as i64 - card(b) as i64 + 2);
            for s in subsets_of(b) {
                if !is_subset(a, s) {
                    continue;
                }
                if let (Some(x), Some(y)) = (comps.get(&(b, s)), comps.get(&(s, a))) {
                    acc = acc.add(&x.compose(y));
                }
            }
            if !acc.is_zero() {
                out.insert((b, a), acc);
            }
        }
    }
    out
}

pub fn is_cube(f: &NDiagram) -> bool {
    d_squared(f).is_empty()
}

#[derive(Clone, Debug)]
pub struct Filtration {
    pub k: usize,
    /// `Tot_k(F)`: summands with `#A ≥ k`.
    pub sub: TotalisedComplex,
    /// `Tot_k(F) / Tot_{k+1}(F)`.
    pub quotient: TotalisedComplex,
    /// `⊕_{#A=k} Σ^k F(A)`, to be compared with the quotient.
    pub expected_quotient: FreeComplex,
}

pub fn filtration(f: &NDiagram, k: i64) -> Result<Filtration> {
    let k = k.clamp(0, f.n as i64 + 1) as usize;
    let cx = &f.complexes;
    let sub_members: Vec<Subset> = all_subsets(f.n).filter(|&a| card(a) >= k).collect();
    let q_members: Vec<Subset> = all_subsets(f.n).filter(|&a| card(a) == k).collect();
    let sub = totalise_on(f, Layout::new(f.n, sub_members, |a| cx[a as usize].ranks().clone()))?;
    let quotient = totalise_on(f, Layout::new(f.n, q_members.clone(), |a| cx[a as usize].ranks().clone()))?;
    let mut expected = FreeComplex::zero(f.ring);
    for a in q_members {
        expected = expected.direct_sum(&cx[a as usize].shift(-(k as i64)))?;
    }
    Ok(Filtration { k, sub, quotient, expected_quotient: expected })
}
