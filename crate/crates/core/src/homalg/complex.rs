use std::collections::BTreeMap;

use super::graded::GradedMap;
use super::matrix::Matrix;
use crate::error::{bail, Result};
use crate::rings::{CoeffRing, LRing, Poly, Scalar};

/// Bounded cochain complex of finitely generated free modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    ring: LRing,
    ranks: BTreeMap<i64, usize>,
    d: GradedMap,
}

impl FreeComplex {
    /// Builds a complex, checking block dimensions and `d ∘ d = 0`.
    pub fn new(ring: LRing, ranks: BTreeMap<i64, usize>, d: GradedMap) -> Result<Self> {
        let c = FreeComplex::new_unchecked(ring, ranks, d)?;
        if let Some(l) = c.first_nonzero_square() {
            bail!(Contract, "d^{} ∘ d^{} is nonzero", l + 1, l);
        }
        Ok(c)
    }

    /// Checks dimensions only; `d ∘ d = 0` is left to the caller.
    pub fn new_unchecked(ring: LRing, ranks: BTreeMap<i64, usize>, d: GradedMap) -> Result<Self> {
        if d.degree != 1 {
            bail!(Structural, "differential has degree {}", d.degree);
        }
        if d.ring != ring {
            bail!(Structural, "differential over {} for a complex over {}", d.ring, ring);
        }
        let ranks: BTreeMap<i64, usize> = ranks.into_iter().filter(|(_, r)| *r > 0).collect();
        let c = FreeComplex { ring, ranks, d };
        for (l, m) in &c.d.blocks {
            if m.dims() != (c.rank(l + 1), c.rank(*l)) {
                bail!(
                    Structural,
                    "d^{l} is {}x{} but ranks are {} -> {}",
                    m.rows(),
                    m.cols(),
                    c.rank(*l),
                    c.rank(l + 1)
                );
            }
        }
        Ok(c)
    }

    pub fn zero(ring: LRing) -> Self {
        FreeComplex { ring, ranks: BTreeMap::new(), d: GradedMap::zero(ring, 1) }
    }

    /// A single free module of rank `r` in degree `l`.
    pub fn concentrated(ring: LRing, l: i64, r: usize) -> Self {
        FreeComplex { ring, ranks: [(l, r)].into_iter().filter(|x| x.1 > 0).collect(), d: GradedMap::zero(ring, 1) }
    }

    /// `0 -> R^a --m--> R^b -> 0` in degrees `l, l+1`.
    pub fn two_term(l: i64, m: Matrix) -> Result<Self> {
        let ring = m.ring();
        let ranks = [(l, m.cols()), (l + 1, m.rows())].into_iter().collect();
        FreeComplex::new(ring, ranks, GradedMap::from_blocks(ring, 1, [(l, m)]))
    }

    pub fn ring(&self) -> LRing {
        self.ring
    }

    pub fn rank(&self, l: i64) -> usize {
        self.ranks.get(&l).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn d(&self) -> &GradedMap {
        &self.d
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Smallest and largest degrees with nonzero rank.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        Some((*self.ranks.keys().next()?, *self.ranks.keys().next_back()?))
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.ranks.keys().copied().collect()
    }

    pub fn differential(&self, l: i64) -> Matrix {
        self.d.block_or_zero(l, self.rank(l + 1), self.rank(l))
    }

    fn first_nonzero_square(&self) -> Option<i64> {
        let dd = self.d.compose(&self.d);
        dd.blocks.keys().next().copied()
    }

    pub fn check_complex(&self) -> bool {
        self.first_nonzero_square().is_none()
    }

    /// `shift(C, k)^l = C^{l+k}` with differential multiplied by `(-1)^k`.
    pub fn shift(&self, k: i64) -> FreeComplex {
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        FreeComplex {
            ring: self.ring,
            ranks: self.ranks.iter().map(|(l, r)| (l - k, *r)).collect(),
            d: GradedMap::from_blocks(self.ring, 1, self.d.blocks.iter().map(|(l, m)| (l - k, m.scale_int(sign)))),
        }
    }

    pub fn direct_sum(&self, other: &FreeComplex) -> Result<FreeComplex> {
        if self.ring != other.ring {
            bail!(Structural, "ring mismatch in direct sum");
        }
        let mut ranks = self.ranks.clone();
        for (l, r) in &other.ranks {
            *ranks.entry(*l).or_insert(0) += r;
        }
        let mut d = GradedMap::zero(self.ring, 1);
        let lo = self.bounds().map(|b| b.0).into_iter().chain(other.bounds().map(|b| b.0)).min();
        let hi = self.bounds().map(|b| b.1).into_iter().chain(other.bounds().map(|b| b.1)).max();
        if let (Some(lo), Some(hi)) = (lo, hi) {
            for l in lo..hi {
                let rows = ranks.get(&(l + 1)).copied().unwrap_or(0);
                let cols = ranks.get(&l).copied().unwrap_or(0);
                let mut m = Matrix::zeros(self.ring, rows, cols);
                m.add_block(0, 0, &self.differential(l), 1);
                m.add_block(self.rank(l + 1), self.rank(l), &other.differential(l), 1);
                d.set_block(l, m);
            }
        }
        FreeComplex::new_unchecked(self.ring, ranks, d)
    }

    /// Scalar extension along a ring map applied entrywise.
    pub fn map_entries<F: Fn(&Poly) -> Result<Poly>>(&self, ring: LRing, f: F) -> Result<FreeComplex> {
        let d = self.d.try_map_blocks(ring, |m| m.try_map(ring, &f))?;
        FreeComplex::new_unchecked(ring, self.ranks.clone(), d)
    }

    /// `C ⊗_R L` for a complex over `R` (no variables) and a Laurent ring `L` over `R`.
    pub fn extend_scalars(&self, target: LRing) -> Result<FreeComplex> {
        if self.ring.nvars != 0 && self.ring != target {
            return self.map_entries(target, |p| p.embed(target, &(0..p.nvars()).collect::<Vec<_>>()));
        }
        self.map_entries(target, |p| p.lift(target))
    }

    /// Specialises all variables at `point`; the result lives over the specialisation field.
    pub fn specialize(&self, point: &[Scalar]) -> Result<FreeComplex> {
        let k = LRing::new(self.ring.coeff.specialization_target(), 0);
        self.map_entries(k, |p| Ok(Poly::constant(k, p.specialize(point)?)))
    }

    pub fn change_coeff(&self, coeff: CoeffRing) -> Result<FreeComplex> {
        let ring = LRing::new(coeff, self.ring.nvars);
        self.map_entries(ring, |p| p.change_coeff(coeff))
    }
}

pub fn check_map_dims(f: &GradedMap, src: &FreeComplex, tgt: &FreeComplex) -> Result<()> {
    for (l, m) in &f.blocks {
        if m.dims() != (tgt.rank(l + f.degree), src.rank(*l)) {
            bail!(
                Structural,
                "block {l} of a degree-{} map is {}x{}, expected {}x{}",
                f.degree,
                m.rows(),
                m.cols(),
                tgt.rank(l + f.degree),
                src.rank(*l)
            );
        }
    }
    Ok(())
}

/// `d_Y f - (-1)^{deg f} f d_X`, zero iff `f` is a (graded) cochain map.
pub fn cochain_defect(f: &GradedMap, src: &FreeComplex, tgt: &FreeComplex) -> GradedMap {
    let a = tgt.d().compose(f);
    let b = f.compose(src.d());
    if f.degree.rem_euclid(2) == 0 {
        a.sub(&b)
    } else {
        a.add(&b)
    }
}

pub fn is_cochain_map(f: &GradedMap, src: &FreeComplex, tgt: &FreeComplex) -> bool {
    f.degree == 0 && check_map_dims(f, src, tgt).is_ok() && cochain_defect(f, src, tgt).is_zero()
}

/// Mapping cone with `cone^l = X^l ⊕ Y^{l-1}` and `D = [[d_X, 0], [f, -d_Y]]`.
pub fn mapping_cone(f: &GradedMap, x: &FreeComplex, y: &FreeComplex) -> Result<FreeComplex> {
    check_map_dims(f, x, y)?;
    if f.degree != 0 {
        bail!(Structural, "mapping cone of a map of degree {}", f.degree);
    }
    if let Some((l, _)) = cochain_defect(f, x, y).blocks.iter().next() {
        bail!(Contract, "not a cochain map: f d != d f in degree {l}");
    }
    Ok(mapping_cone_unchecked(f, x, y))
}

pub(crate) fn mapping_cone_unchecked(f: &GradedMap, x: &FreeComplex, y: &FreeComplex) -> FreeComplex {
    let ring = x.ring();
    let degs: Vec<i64> = x.degrees().into_iter().chain(y.degrees().into_iter().map(|l| l + 1)).collect();
    let mut ranks = BTreeMap::new();
    for &l in &degs {
        ranks.insert(l, x.rank(l) + y.rank(l - 1));
    }
    let mut d = GradedMap::zero(ring, 1);
    if let (Some(&lo), Some(&hi)) = (degs.iter().min(), degs.iter().max()) {
        for l in lo..hi {
            let rows = x.rank(l + 1) + y.rank(l);
            let cols = x.rank(l) + y.rank(l - 1);
            let mut m = Matrix::zeros(ring, rows, cols);
            m.add_block(0, 0, &x.differential(l), 1);
            if let Some(fl) = f.block(l) {
                m.add_block(x.rank(l + 1), 0, fl, 1);
            }
            m.add_block(x.rank(l + 1), x.rank(l), &y.differential(l - 1), -1);
            d.set_block(l, m);
        }
    }
    FreeComplex::new_unchecked(ring, ranks, d).expect("cone dimensions")
}

pub fn identity_map(c: &FreeComplex) -> GradedMap {
    GradedMap::from_blocks(c.ring(), 0, c.ranks().iter().map(|(l, r)| (*l, Matrix::identity(c.ring(), *r))))
}
