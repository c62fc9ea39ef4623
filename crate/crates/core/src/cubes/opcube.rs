use std::collections::BTreeMap;

use super::diagram::Layout;
use super::incidence::{all_subsets, card, elements, sign, singleton, subsets_of, total_incidence, Subset};
use super::special::{windowed_basis, IdentityCheck, SpecialCube};
use crate::error::{bail, Result};
use crate::homalg::{svec_add, svec_add_assign, svec_neg, FreeComplex, GradedMap, LinearOp, Matrix, Op, SVec};
use crate::rings::{LRing, Poly};

/// A map between totalisations given by operator components
/// `(B, A) ↦ φ_{B,A}: F(A) -> F'(B)` of degree `a - b + degree`.
#[derive(Clone, Debug)]
pub struct BlockOp {
    pub degree: i64,
    pub src: Layout,
    pub tgt: Layout,
    pub comps: BTreeMap<(Subset, Subset), Op>,
}

impl BlockOp {
    pub fn try_apply(&self, l: i64, v: &SVec) -> Result<SVec> {
        let mut out = SVec::new();
        for (&(b, a), op) in &self.comps {
            let off = self.src.offset(l, a);
            let r = self.src.summand_rank(l, a);
            let part: SVec = v.range(off..off + r).map(|(i, p)| (i - off, p.clone())).collect();
            if part.is_empty() {
                continue;
            }
            let img = op.try_apply(l - card(a) as i64, &part)?;
            let toff = self.tgt.offset(l + self.degree, b);
            for (i, p) in img {
                svec_add_assign(&mut out, toff + i, &p);
            }
        }
        Ok(out)
    }

    pub fn is_ring_linear(&self) -> bool {
        self.comps.values().all(|o| o.is_ring_linear())
    }

    /// The matrix of a ring-linear block map, read off from a basis.
    pub fn to_graded(&self, ring: LRing) -> Result<GradedMap> {
        if !self.is_ring_linear() {
            bail!(Unsupported, "block map is not linear over {ring}");
        }
        let mut out = GradedMap::zero(ring, self.degree);
        for (l, cols) in self.src.total_ranks() {
            let rows = self.tgt.total_rank(l + self.degree);
            let mut m = Matrix::zeros(ring, rows, cols);
            for j in 0..cols {
                let e: SVec = [(j, ring.one())].into_iter().collect();
                for (i, p) in self.try_apply(l, &e)? {
                    m.set(i, j, p);
                }
            }
            out.set_block(l, m);
        }
        Ok(out)
    }
}

impl LinearOp for BlockOp {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn apply(&self, l: i64, v: &SVec) -> SVec {
        self.try_apply(l, v).expect("block operator application")
    }

    fn is_ring_linear(&self) -> bool {
        BlockOp::is_ring_linear(self)
    }
}

/// A complex of free modules whose differential is given as an operator.
#[derive(Clone, Debug)]
pub struct OpComplex {
    pub ring: LRing,
    pub ranks: BTreeMap<i64, usize>,
    pub d: Op,
}

impl From<&FreeComplex> for OpComplex {
    fn from(c: &FreeComplex) -> Self {
        OpComplex { ring: c.ring(), ranks: c.ranks().clone(), d: Op::Mat(c.d().clone()) }
    }
}

/// A special cube whose structure maps are operators; vectors have entries in `ring`.
#[derive(Clone, Debug)]
pub struct OpCube {
    pub n: usize,
    pub ring: LRing,
    pub ranks: BTreeMap<i64, usize>,
    pub d: Op,
    pub f: Vec<Op>,
    pub h: BTreeMap<Subset, Op>,
}

impl OpCube {
    pub fn from_special(s: &SpecialCube) -> OpCube {
        OpCube {
            n: s.n,
            ring: s.ring(),
            ranks: s.complex.ranks().clone(),
            d: Op::Mat(s.complex.d().clone()),
            f: s.f.iter().cloned().map(Op::Mat).collect(),
            h: s.h.iter().map(|(k, v)| (*k, Op::Mat(v.clone()))).collect(),
        }
    }

    /// The trivial cube on a complex with differential `d` and commuting maps `h`.
    pub fn trivial(c: &OpComplex, h: Vec<Op>) -> OpCube {
        OpCube { n: h.len(), ring: c.ring, ranks: c.ranks.clone(), d: c.d.clone(), f: h, h: BTreeMap::new() }
    }

    pub fn map_for(&self, s: Subset) -> Op {
        match card(s) {
            0 => self.d.clone(),
            1 => self.f[elements(s)[0] - 1].clone(),
            k => self.h.get(&s).cloned().unwrap_or_else(|| Op::zero(1 - k as i64)),
        }
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.n, all_subsets(self.n).collect(), |_| self.ranks.clone())
    }

    /// The totalised differential, `D_{B,A} = (-1)^{ab} [B:A] H_{B∖A}`.
    pub fn tot_d(&self) -> BlockOp {
        let mut comps = BTreeMap::new();
        for b in all_subsets(self.n) {
            for a in subsets_of(b) {
                let s = sign(card(a) * card(b)) * total_incidence(b, a);
                comps.insert((b, a), self.map_for(b & !a).scaled(s));
            }
        }
        let layout = self.layout();
        BlockOp { degree: 1, src: layout.clone(), tgt: layout, comps }
    }

    /// Evaluates the operators on a basis; fails unless they are ring-linear.
    pub fn to_special(&self) -> Result<SpecialCube> {
        let one = |op: &Op| -> Result<GradedMap> { op_matrix(op, self.ring, &self.ranks) };
        let d = one(&self.d)?;
        let complex = FreeComplex::new_unchecked(self.ring, self.ranks.clone(), d)?;
        let f = self.f.iter().map(one).collect::<Result<Vec<_>>>()?;
        let mut h = BTreeMap::new();
        for (s, op) in &self.h {
            h.insert(*s, one(op)?);
        }
        SpecialCube::new(complex, f, h)
    }

    /// The mapping torus data: `d ⊗ 1`, `f_k ⊗ 1 - 1 ⊗ x_k`, `H_S ⊗ 1`, with
    /// the torus variables appended after those of `ring`.
    pub fn torus(&self) -> Result<OpCube> {
        let m = self.ring.nvars;
        let target = LRing::new(self.ring.coeff, m + self.n);
        let mut f = Vec::with_capacity(self.n);
        for (k, fk) in self.f.iter().enumerate() {
            let x = Poly::var(target, m + k);
            f.push(Op::sum(0, vec![(1, fk.extend(target)?), (-1, Op::diag_mul(&self.ranks, &x))]));
        }
        let mut h = BTreeMap::new();
        for (s, op) in &self.h {
            h.insert(*s, op.extend(target)?);
        }
        Ok(OpCube { n: self.n, ring: target, ranks: self.ranks.clone(), d: self.d.extend(target)?, f, h })
    }
}

/// The matrix of a ring-linear operator on a graded free module of the given ranks.
pub fn op_matrix(op: &Op, ring: LRing, ranks: &BTreeMap<i64, usize>) -> Result<GradedMap> {
    if !op.is_ring_linear() {
        bail!(Unsupported, "operator is not linear over {ring}");
    }
    let deg = op.degree();
    let mut out = GradedMap::zero(ring, deg);
    for (&l, &r) in ranks {
        let rows = ranks.get(&(l + deg)).copied().unwrap_or(0);
        let mut m = Matrix::zeros(ring, rows, r);
        for j in 0..r {
            let e: SVec = [(j, ring.one())].into_iter().collect();
            for (i, p) in op.try_apply(l, &e)? {
                if i >= rows {
                    bail!(Structural, "operator image leaves the module in degree {}", l + deg);
                }
                m.set(i, j, p);
            }
        }
        out.set_block(l, m);
    }
    Ok(out)
}

/// Symbolic derived cube: `H_S = β V(S)` with `V({z}) = h_z α` and
/// `V(T) = Σ_k (-1)^{k-1} h_{z_k} G V(T ∖ z_k)`.
pub fn derived_op_cube(c: &OpComplex, alpha: &Op, beta: &Op, g: &Op, h: &[Op]) -> OpCube {
    let n = h.len();
    let mut v: BTreeMap<Subset, Op> = BTreeMap::new();
    let mut order: Vec<Subset> = (1..(1u32 << n)).collect();
    order.sort_by_key(|&s| (card(s), s));
    let mut f = vec![Op::zero(0); n];
    let mut hs = BTreeMap::new();
    for t in order {
        let el = elements(t);
        let vt = if el.len() == 1 {
            Op::compose(vec![h[el[0] - 1].clone(), alpha.clone()])
        } else {
            let terms = el
                .iter()
                .enumerate()
                .map(|(k, &z)| {
                    let prev = v[&(t & !singleton(z))].clone();
                    (sign(k), Op::compose(vec![h[z - 1].clone(), g.clone(), prev]))
                })
                .collect();
            Op::sum(1 - el.len() as i64, terms)
        };
        let ht = Op::compose(vec![beta.clone(), vt.clone()]);
        if el.len() == 1 {
            f[el[0] - 1] = ht;
        } else {
            hs.insert(t, ht);
        }
        v.insert(t, vt);
    }
    OpCube { n, ring: c.ring, ranks: c.ranks.clone(), d: c.d.clone(), f, h: hs }
}

/// Checks `φ ∘ D_src = D_tgt ∘ φ` for a degree-0 block map on a basis of the
/// source totalisation (or a window of monomial multiples of it).
pub fn check_block_chain_map(phi: &BlockOp, dsrc: &BlockOp, dtgt: &BlockOp, ring: LRing, window: i64) -> Result<IdentityCheck> {
    let exact = phi.is_ring_linear() && dsrc.is_ring_linear() && dtgt.is_ring_linear();
    let w = if exact { 0 } else { window };
    let ranks = dsrc.src.total_ranks();
    let fake = FreeComplex::new_unchecked(ring, ranks, GradedMap::zero(ring, 1))?;
    let vs = windowed_basis(&fake, w);
    for (l, v) in &vs {
        let lhs = phi.try_apply(l + 1, &dsrc.try_apply(*l, v)?)?;
        let rhs = dtgt.try_apply(*l, &phi.try_apply(*l, v)?)?;
        if !svec_add(&lhs, &svec_neg(&rhs)).is_empty() {
            bail!(Internal, "comparison map is not a cochain map (degree {l})");
        }
    }
    Ok(IdentityCheck { exact, window: w, vectors: vs.len() })
}
