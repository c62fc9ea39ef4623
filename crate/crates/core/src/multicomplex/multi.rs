use std::collections::BTreeMap;

use crate::cubes::{all_subsets, card, total_incidence, Subset};
use crate::error::{bail, Result};
use crate::homalg::{cochain_defect, FreeComplex, GradedMap, Matrix};
use crate::rings::LRing;

/// A position `b ∈ Z^{n+1}`; the last coordinate is the `e_{n+1}` direction.
pub type Pos = Vec<i64>;

pub fn step(b: &[i64], i: usize, by: i64) -> Pos {
    let mut c = b.to_vec();
    c[i] += by;
    c
}

/// An `(n+1)`-complex on an explicit finite set of positions. Positions may
/// carry rank 0; differentials into positions outside the set are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiComplex {
    pub dirs: usize,
    pub ring: LRing,
    pub ranks: BTreeMap<Pos, usize>,
    /// `d[i][b]: E^b -> E^{b + e_i}`, absent entries are zero.
    pub d: Vec<BTreeMap<Pos, Matrix>>,
}

impl MultiComplex {
    pub fn new(dirs: usize, ring: LRing) -> Self {
        MultiComplex { dirs, ring, ranks: BTreeMap::new(), d: vec![BTreeMap::new(); dirs] }
    }

    pub fn set_module(&mut self, b: Pos, rank: usize) {
        self.ranks.insert(b, rank);
    }

    pub fn rank(&self, b: &[i64]) -> usize {
        self.ranks.get(b).copied().unwrap_or(0)
    }

    pub fn contains(&self, b: &[i64]) -> bool {
        self.ranks.contains_key(b)
    }

    pub fn set_d(&mut self, i: usize, b: Pos, m: Matrix) -> Result<()> {
        let t = step(&b, i, 1);
        if !self.contains(&b) || !self.contains(&t) {
            bail!(Structural, "differential d_{} at {b:?} leaves the position set", i + 1);
        }
        if m.dims() != (self.rank(&t), self.rank(&b)) {
            bail!(Structural, "d_{} at {b:?} has dimensions {:?}", i + 1, m.dims());
        }
        if !m.is_zero() {
            self.d[i].insert(b, m);
        }
        Ok(())
    }

    pub fn d_at(&self, i: usize, b: &[i64]) -> Matrix {
        match self.d[i].get(b) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.ring, self.rank(&step(b, i, 1)), self.rank(b)),
        }
    }

    /// Positions `b` and direction pairs `i ≤ j` where `d_i d_j + d_j d_i`
    /// (or `d_i d_i`) is nonzero; only checked where all intermediate positions exist.
    pub fn anticommutation_defects(&self) -> Vec<(usize, usize, Pos)> {
        let mut out = Vec::new();
        for b in self.ranks.keys() {
            for i in 0..self.dirs {
                for j in i..self.dirs {
                    let (bi, bj) = (step(b, i, 1), step(b, j, 1));
                    let bij = step(&bi, j, 1);
                    if !self.contains(&bi) || !self.contains(&bj) || !self.contains(&bij) {
                        continue;
                    }
                    let x = self.d_at(j, &bi).mul(&self.d_at(i, b));
                    let bad = if i == j { !x.is_zero() } else { !x.add(&self.d_at(i, &bj).mul(&self.d_at(j, b))).is_zero() };
                    if bad {
                        out.push((i + 1, j + 1, b.clone()));
                    }
                }
            }
        }
        out
    }

    /// The complex in `e_{n+1}` direction at `a ∈ Z^n`.
    pub fn column(&self, a: &[i64]) -> FreeComplex {
        let last = self.dirs - 1;
        let mut ranks = BTreeMap::new();
        let mut d = GradedMap::zero(self.ring, 1);
        for (b, &r) in self.ranks.range(a.iter().copied().chain([i64::MIN]).collect::<Pos>()..) {
            if b[..last] != *a {
                break;
            }
            if r > 0 {
                ranks.insert(b[last], r);
            }
            if let Some(m) = self.d[last].get(b) {
                d.set_block(b[last], m.clone());
            }
        }
        FreeComplex::new_unchecked(self.ring, ranks, d).expect("column dimensions")
    }

    pub fn a_positions(&self) -> Vec<Vec<i64>> {
        let last = self.dirs - 1;
        let mut out: Vec<Vec<i64>> = self.ranks.keys().map(|b| b[..last].to_vec()).collect();
        out.dedup();
        out
    }
}

/// A totalisation over a set of positions, `T^k = ⊕_{Σ b = k} E^b`.
#[derive(Clone, Debug)]
pub struct SumTot {
    pub complex: FreeComplex,
    pub positions: BTreeMap<i64, Vec<Pos>>,
    pub ranks: BTreeMap<Pos, usize>,
}

impl SumTot {
    pub fn offset(&self, b: &[i64]) -> usize {
        let k: i64 = b.iter().sum();
        self.positions[&k].iter().take_while(|p| p.as_slice() != b).map(|p| self.ranks[p]).sum()
    }

    /// The block of the differential from position `from` to position `to`.
    pub fn block(&self, to: &[i64], from: &[i64]) -> Matrix {
        let k: i64 = from.iter().sum();
        let rows = self.ranks.get(to).copied().unwrap_or(0);
        let cols = self.ranks.get(from).copied().unwrap_or(0);
        if to.iter().sum::<i64>() != k + 1 || rows == 0 || cols == 0 {
            return Matrix::zeros(self.complex.ring(), rows, cols);
        }
        self.complex.differential(k).submatrix(self.offset(to), rows, self.offset(from), cols)
    }
}

/// Totalisation over the positions accepted by `keep`; differentials into
/// rejected positions are dropped. Returns the dropped `(direction, position)` pairs.
pub(crate) fn tot_over<F: Fn(&Pos) -> bool>(e: &MultiComplex, keep: F) -> (SumTot, Vec<(usize, Pos)>) {
    let mut positions: BTreeMap<i64, Vec<Pos>> = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    for (b, &r) in &e.ranks {
        if r > 0 && keep(b) {
            positions.entry(b.iter().sum()).or_default().push(b.clone());
            ranks.insert(b.clone(), r);
        }
    }
    let tr: BTreeMap<i64, usize> = positions.iter().map(|(k, ps)| (*k, ps.iter().map(|p| ranks[p]).sum())).collect();
    let proto = SumTot { complex: FreeComplex::zero(e.ring), positions, ranks };
    let mut d = GradedMap::zero(e.ring, 1);
    let mut dropped = Vec::new();
    for (&k, ps) in &proto.positions {
        let rows = tr.get(&(k + 1)).copied().unwrap_or(0);
        let mut m = Matrix::zeros(e.ring, rows, tr[&k]);
        for b in ps {
            for i in 0..e.dirs {
                let Some(blk) = e.d[i].get(b) else { continue };
                let t = step(b, i, 1);
                if !proto.ranks.contains_key(&t) {
                    dropped.push((i + 1, b.clone()));
                    continue;
                }
                m.add_block(proto.offset(&t), proto.offset(b), blk, 1);
            }
        }
        d.set_block(k, m);
    }
    let complex = FreeComplex::new_unchecked(e.ring, tr, d).expect("totalisation dimensions");
    (SumTot { complex, ..proto }, dropped)
}

/// Direct-sum totalisation with `d = d_1 + ... + d_{n+1}`.
pub fn tot_sum(e: &MultiComplex) -> SumTot {
    tot_over(e, |_| true).0
}

fn check_family(c: &FreeComplex, f: &[GradedMap]) -> Result<()> {
    for (k, fk) in f.iter().enumerate() {
        if fk.degree != 0 || !cochain_defect(fk, c, c).is_zero() {
            bail!(Contract, "f_{} is not a cochain map", k + 1);
        }
        for (l, fl) in f.iter().enumerate().skip(k + 1) {
            if !fk.compose(fl).sub(&fl.compose(fk)).is_zero() {
                bail!(Contract, "f_{} and f_{} do not commute", k + 1, l + 1);
            }
        }
    }
    Ok(())
}

/// `C^k` at `(ε_1, ..., ε_n, k)`, `d_{n+1} = (-1)^{Σε} d`, `d_k = (-1)^{ε_1 + ... + ε_{k-1}} f_k`.
pub fn from_trivial_cube(c: &FreeComplex, f: &[GradedMap]) -> Result<MultiComplex> {
    check_family(c, f)?;
    let n = f.len();
    let mut e = MultiComplex::new(n + 1, c.ring());
    let Some((lo, hi)) = c.bounds() else { return Ok(e) };
    for eps in 0u32..(1 << n) {
        for k in lo..=hi {
            let mut b: Pos = (0..n).map(|i| (eps >> i & 1) as i64).collect();
            b.push(k);
            e.set_module(b, c.rank(k));
        }
    }
    for eps in 0u32..(1 << n) {
        let base: Pos = (0..n).map(|i| (eps >> i & 1) as i64).collect();
        let s = if eps.count_ones() % 2 == 0 { 1 } else { -1 };
        for k in lo..=hi {
            let b: Pos = base.iter().copied().chain([k]).collect();
            if k < hi {
                e.set_d(n, b.clone(), c.differential(k).scale_int(s))?;
            }
            for (j, fj) in f.iter().enumerate() {
                if eps >> j & 1 == 0 {
                    let below = (eps & ((1 << j) - 1)).count_ones();
                    let sj = if below % 2 == 0 { 1 } else { -1 };
                    let m = fj.block_or_zero(k, c.rank(k), c.rank(k)).scale_int(sj);
                    e.set_d(j, b.clone(), m)?;
                }
            }
        }
    }
    Ok(e)
}

/// Subsets of `{1..n}` of size `p`, in increasing bitmask order.
pub fn subsets_of_size(n: usize, p: usize) -> Vec<Subset> {
    all_subsets(n).filter(|&a| card(a) == p).collect()
}

/// `D^{p,q} = ⊕_{#A = p} C^q` with vertical `(-1)^p d` and horizontal `[A⊔j:A] f_j`.
pub fn partial_tot_2complex(c: &FreeComplex, f: &[GradedMap]) -> Result<MultiComplex> {
    check_family(c, f)?;
    let n = f.len();
    let ring = c.ring();
    let mut e = MultiComplex::new(2, ring);
    let Some((lo, hi)) = c.bounds() else { return Ok(e) };
    let cols: Vec<Vec<Subset>> = (0..=n).map(|p| subsets_of_size(n, p)).collect();
    for (p, subs) in cols.iter().enumerate() {
        for q in lo..=hi {
            e.set_module(vec![p as i64, q], subs.len() * c.rank(q));
        }
    }
    for (p, subs) in cols.iter().enumerate() {
        let sp = if p % 2 == 0 { 1 } else { -1 };
        for q in lo..=hi {
            let r = c.rank(q);
            if q < hi {
                let dq = c.differential(q);
                let mut m = Matrix::zeros(ring, subs.len() * c.rank(q + 1), subs.len() * r);
                for i in 0..subs.len() {
                    m.add_block(i * c.rank(q + 1), i * r, &dq, sp);
                }
                e.set_d(1, vec![p as i64, q], m)?;
            }
            if p < n {
                let next = &cols[p + 1];
                let mut m = Matrix::zeros(ring, next.len() * r, subs.len() * r);
                for (i, &a) in subs.iter().enumerate() {
                    for (j, fj) in f.iter().enumerate() {
                        let bit = 1 << j;
                        if a & bit != 0 {
                            continue;
                        }
                        let t = next.iter().position(|&b| b == a | bit).expect("superset");
                        let blk = fj.block_or_zero(q, r, r);
                        m.add_block(t * r, i * r, &blk, total_incidence(a | bit, a));
                    }
                }
                e.set_d(0, vec![p as i64, q], m)?;
            }
        }
    }
    Ok(e)
}
