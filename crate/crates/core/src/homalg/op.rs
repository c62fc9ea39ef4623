use std::collections::BTreeMap;

use super::graded::GradedMap;
use super::matrix::{svec_add_assign, SVec};
use crate::error::Result;
use crate::rings::{LRing, Poly, Scalar};

/// A graded map that can be applied to sparse vectors.
pub trait LinearOp {
    fn degree(&self) -> i64;
    fn apply(&self, l: i64, v: &SVec) -> SVec;
    /// Whether the map is linear over the ring of its entries, so that
    /// checking it on a basis is conclusive.
    fn is_ring_linear(&self) -> bool;
}

impl LinearOp for GradedMap {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn apply(&self, l: i64, v: &SVec) -> SVec {
        GradedMap::apply(self, l, v)
    }

    fn is_ring_linear(&self) -> bool {
        true
    }
}

/// Entrywise operations on ring elements, applied left to right. Operations
/// only touch the leading variables, so they extend unchanged to `- ⊗ L'`
/// (extra variables appended at the end).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prim {
    /// Multiplication; the factor is embedded into the leading variables.
    Mul(Poly),
    /// Evaluates the leading `point.len()` variables at units and drops them.
    Eval(Vec<Scalar>),
    /// Prepends this many fresh variables (the inclusion `R -> R[x^±]`).
    Lift(usize),
    /// Ring homomorphism given by a variable map.
    Embed(LRing, Vec<usize>),
    /// `p ↦ (p - p|_{x_{var+1}=at}) / (x_{var+1} - at)`.
    DivDiff { var: usize, at: Scalar },
    /// `p ↦ p|_{x_{var+1}=at}`, keeping the ring.
    Subst { var: usize, at: Scalar },
}

impl Prim {
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        match self {
            Prim::Mul(q) => {
                if q.ring() == p.ring() {
                    Ok(q * p)
                } else {
                    Ok(&q.embed(p.ring(), &(0..q.nvars()).collect::<Vec<_>>())? * p)
                }
            }
            Prim::Eval(pt) => p.evaluate_leading(pt),
            Prim::Lift(k) => {
                let target = LRing::new(p.ring().coeff, p.nvars() + k);
                p.embed(target, &(0..p.nvars()).map(|j| j + k).collect::<Vec<_>>())
            }
            Prim::Embed(t, m) => p.embed(*t, m),
            Prim::DivDiff { var, at } => p.divided_difference(*var, at),
            Prim::Subst { var, at } => {
                if !p.ring().coeff.is_unit(at) {
                    return Err(crate::error::Error::Domain("substituting a non-unit".into()));
                }
                Ok(p.substitute(*var, at))
            }
        }
    }

    fn is_ring_linear(&self) -> bool {
        matches!(self, Prim::Mul(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Vec<Prim>)>,
}

/// Additive maps between graded free modules that need not be linear over
/// the ring of the vectors (evaluations, inclusions, difference quotients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Mat(GradedMap),
    Semi { degree: i64, blocks: BTreeMap<i64, SemiMatrix> },
    /// `[f, g, h]` is `f ∘ g ∘ h`.
    Compose(Vec<Op>),
    Sum(i64, Vec<(i64, Op)>),
}

impl Op {
    pub fn semi(degree: i64, blocks: impl IntoIterator<Item = (i64, SemiMatrix)>) -> Op {
        Op::Semi { degree, blocks: blocks.into_iter().collect() }
    }

    /// A single-entry block `1x1` at degree `l` applying `prims`.
    pub fn scalar_block(degree: i64, l: i64, prims: Vec<Prim>) -> Op {
        Op::semi(degree, [(l, SemiMatrix { rows: 1, cols: 1, entries: vec![(0, 0, prims)] })])
    }

    pub fn zero(degree: i64) -> Op {
        Op::Sum(degree, vec![])
    }

    /// Multiplication by `q` on every coordinate of a graded module with the given ranks.
    pub fn diag_mul(ranks: &BTreeMap<i64, usize>, q: &Poly) -> Op {
        Op::semi(
            0,
            ranks.iter().filter(|(_, r)| **r > 0).map(|(&l, &r)| {
                (l, SemiMatrix { rows: r, cols: r, entries: (0..r).map(|i| (i, i, vec![Prim::Mul(q.clone())])).collect() })
            }),
        )
    }

    /// Scalar extension `- ⊗ 1` to a ring with more trailing variables.
    pub fn extend(&self, target: LRing) -> Result<Op> {
        Ok(match self {
            Op::Mat(m) => {
                let vm: Vec<usize> = (0..m.ring.nvars).collect();
                Op::Mat(m.try_map_blocks(target, |b| b.try_map(target, |p| p.embed(target, &vm)))?)
            }
            Op::Semi { .. } => self.clone(),
            Op::Compose(ops) => Op::Compose(ops.iter().map(|o| o.extend(target)).collect::<Result<_>>()?),
            Op::Sum(d, ts) => Op::Sum(*d, ts.iter().map(|(c, o)| Ok((*c, o.extend(target)?))).collect::<Result<_>>()?),
        })
    }

    pub fn scaled(self, c: i64) -> Op {
        if c == 1 {
            return self;
        }
        let d = self.degree();
        Op::Sum(d, vec![(c, self)])
    }

    pub fn compose(ops: Vec<Op>) -> Op {
        Op::Compose(ops)
    }

    pub fn sum(degree: i64, terms: Vec<(i64, Op)>) -> Op {
        Op::Sum(degree, terms)
    }

    pub fn try_apply(&self, l: i64, v: &SVec) -> Result<SVec> {
        match self {
            Op::Mat(m) => Ok(m.apply(l, v)),
            Op::Semi { blocks, .. } => {
                let mut out = SVec::new();
                if let Some(b) = blocks.get(&l) {
                    for (r, c, prims) in &b.entries {
                        if let Some(x) = v.get(c) {
                            let mut y = x.clone();
                            for p in prims {
                                y = p.apply(&y)?;
                            }
                            svec_add_assign(&mut out, *r, &y);
                        }
                    }
                }
                Ok(out)
            }
            Op::Compose(ops) => {
                let mut cur = v.clone();
                let mut deg = l;
                for op in ops.iter().rev() {
                    cur = op.try_apply(deg, &cur)?;
                    deg += op.degree();
                }
                Ok(cur)
            }
            Op::Sum(_, terms) => {
                let mut out = SVec::new();
                for (c, op) in terms {
                    for (i, x) in op.try_apply(l, v)? {
                        let y = if *c == 1 { x } else { &x * &x.ring().int(*c) };
                        svec_add_assign(&mut out, i, &y);
                    }
                }
                Ok(out)
            }
        }
    }
}

impl LinearOp for Op {
    fn degree(&self) -> i64 {
        match self {
            Op::Mat(m) => m.degree,
            Op::Semi { degree, .. } => *degree,
            Op::Compose(ops) => ops.iter().map(|o| o.degree()).sum(),
            Op::Sum(d, _) => *d,
        }
    }

    fn apply(&self, l: i64, v: &SVec) -> SVec {
        self.try_apply(l, v).expect("operator application")
    }

    fn is_ring_linear(&self) -> bool {
        match self {
            Op::Mat(_) => true,
            Op::Semi { blocks, .. } => {
                blocks.values().all(|b| b.entries.iter().all(|(_, _, ps)| ps.iter().all(|p| p.is_ring_linear())))
            }
            Op::Compose(ops) => ops.iter().all(|o| o.is_ring_linear()),
            Op::Sum(_, ts) => ts.iter().all(|(_, o)| o.is_ring_linear()),
        }
    }
}
