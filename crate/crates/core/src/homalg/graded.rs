use std::collections::BTreeMap;

use super::matrix::{Matrix, SVec};
use crate::error::{bail, Result};
use crate::rings::{LRing, Poly};

/// A map of graded free modules of fixed degree. `blocks[l]` maps the
/// source in degree `l` to the target in degree `l + degree`; absent blocks are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub ring: LRing,
    pub degree: i64,
    pub blocks: BTreeMap<i64, Matrix>,
}

impl GradedMap {
    pub fn zero(ring: LRing, degree: i64) -> Self {
        GradedMap { ring, degree, blocks: BTreeMap::new() }
    }

    pub fn from_blocks<I: IntoIterator<Item = (i64, Matrix)>>(ring: LRing, degree: i64, blocks: I) -> Self {
        let mut g = GradedMap::zero(ring, degree);
        for (l, m) in blocks {
            g.set_block(l, m);
        }
        g
    }

    pub fn block(&self, l: i64) -> Option<&Matrix> {
        self.blocks.get(&l)
    }

    pub fn block_or_zero(&self, l: i64, rows: usize, cols: usize) -> Matrix {
        self.blocks.get(&l).cloned().unwrap_or_else(|| Matrix::zeros(self.ring, rows, cols))
    }

    pub fn set_block(&mut self, l: i64, m: Matrix) {
        assert_eq!(m.ring(), self.ring, "block ring mismatch");
        if m.is_zero() {
            self.blocks.remove(&l);
        } else {
            self.blocks.insert(l, m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|m| m.is_zero())
    }

    /// `self ∘ other`.
    pub fn checked_compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.ring != other.ring {
            bail!(Structural, "ring mismatch in composition");
        }
        let mut out = GradedMap::zero(self.ring, self.degree + other.degree);
        for (l, b) in &other.blocks {
            if let Some(a) = self.blocks.get(&(l + other.degree)) {
                out.set_block(*l, a.checked_mul(b)?);
            }
        }
        Ok(out)
    }

    pub fn compose(&self, other: &GradedMap) -> GradedMap {
        self.checked_compose(other).expect("graded composition")
    }

    pub fn checked_add(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.degree != other.degree {
            bail!(Structural, "cannot add maps of degrees {} and {}", self.degree, other.degree);
        }
        let mut out = self.clone();
        for (l, b) in &other.blocks {
            let m = match out.blocks.get(l) {
                Some(a) => a.checked_add(b)?,
                None => b.clone(),
            };
            out.set_block(*l, m);
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        self.checked_add(other).expect("graded sum")
    }

    pub fn sub(&self, other: &GradedMap) -> GradedMap {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedMap {
        self.map_blocks(|m| m.neg())
    }

    pub fn scale(&self, c: &Poly) -> GradedMap {
        self.map_blocks(|m| m.scale(c))
    }

    pub fn scale_int(&self, c: i64) -> GradedMap {
        self.map_blocks(|m| m.scale_int(c))
    }

    pub fn map_blocks<F: Fn(&Matrix) -> Matrix>(&self, f: F) -> GradedMap {
        GradedMap::from_blocks(self.ring, self.degree, self.blocks.iter().map(|(l, m)| (*l, f(m))))
    }

    pub fn try_map_blocks<F: Fn(&Matrix) -> Result<Matrix>>(&self, ring: LRing, f: F) -> Result<GradedMap> {
        let mut out = GradedMap::zero(ring, self.degree);
        for (l, m) in &self.blocks {
            out.set_block(*l, f(m)?);
        }
        Ok(out)
    }

    pub fn apply(&self, l: i64, v: &SVec) -> SVec {
        match self.blocks.get(&l) {
            Some(m) => m.apply(v),
            None => SVec::new(),
        }
    }
}
