use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cubes::{
    all_subsets, card, check_block_chain_map, derived_op_cube, elements, sign, subsets_of, total_incidence, BlockOp,
    IdentityCheck, OpComplex, OpCube, Subset,
};
use crate::error::{bail, Result};
use crate::homalg::{mapping_cone, FreeComplex, GradedMap, LinearOp, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatherKind {
    M,
    L,
    K,
    J,
}

/// A comparison map between two totalisations, with the result of checking
/// that it is a cochain map.
#[derive(Clone, Debug)]
pub struct MatherMap {
    pub kind: MatherKind,
    pub blocks: BTreeMap<(Subset, Subset), Op>,
    pub map: BlockOp,
    pub source: OpCube,
    pub target: OpCube,
    pub check: IdentityCheck,
}

impl MatherMap {
    pub fn source_complex(&self) -> Result<FreeComplex> {
        Ok(self.source.to_special()?.totalise()?.complex)
    }

    pub fn target_complex(&self) -> Result<FreeComplex> {
        Ok(self.target.to_special()?.totalise()?.complex)
    }

    /// The matrix of the map; needs ring-linear components over a common ring.
    pub fn graded(&self) -> Result<GradedMap> {
        if self.source.ring != self.target.ring {
            bail!(Unsupported, "source and target live over different rings");
        }
        self.map.to_graded(self.source.ring)
    }

    pub fn cone(&self) -> Result<FreeComplex> {
        mapping_cone(&self.graded()?, &self.source_complex()?, &self.target_complex()?)
    }
}

fn finish(kind: MatherKind, blocks: BTreeMap<(Subset, Subset), Op>, y: OpCube, x: OpCube, window: i64) -> Result<MatherMap> {
    let map = BlockOp { degree: 0, src: y.layout(), tgt: x.layout(), comps: blocks.clone() };
    let check = check_block_chain_map(&map, &y.tot_d(), &x.tot_d(), y.ring, window)?;
    Ok(MatherMap { kind, blocks, map, source: y, target: x, check })
}

/// `M_{B,A} = (-1)^b (-1)^{ab} [B:A] M_{B∖A}` with `M_∅ = g`, `M_k = G h_k g`, `M_S = G H_S`.
fn m_blocks(y: &OpCube, g: &Op, gg: &Op, h: &[Op]) -> BTreeMap<(Subset, Subset), Op> {
    let mut out = BTreeMap::new();
    for b in all_subsets(y.n) {
        for a in subsets_of(b) {
            let s = b & !a;
            let m = match card(s) {
                0 => g.clone(),
                1 => Op::compose(vec![gg.clone(), h[elements(s)[0] - 1].clone(), g.clone()]),
                _ => match y.h.get(&s) {
                    Some(hs) => Op::compose(vec![gg.clone(), hs.clone()]),
                    None => continue,
                },
            };
            let e = sign(card(b)) * sign(card(a) * card(b)) * total_incidence(b, a);
            out.insert((b, a), m.scaled(e));
        }
    }
    out
}

fn check_hypothesis(d: &OpComplex, gg: &Op) -> Result<()> {
    if gg.degree() != -1 {
        bail!(Structural, "G has degree {} instead of -1", gg.degree());
    }
    if d.d.degree() != 1 {
        bail!(Structural, "differential has degree {}", d.d.degree());
    }
    Ok(())
}

fn extend_all(blocks: BTreeMap<(Subset, Subset), Op>, y: &OpCube) -> Result<BTreeMap<(Subset, Subset), Op>> {
    blocks.into_iter().map(|(k, v)| Ok((k, v.extend(y.ring)?))).collect()
}

/// `M: Tot Der(D; g, id, G; h) -> Tot Triv(D; h)`.
pub fn mather_m(d: &OpComplex, g: &Op, gg: &Op, h: &[Op], window: i64) -> Result<MatherMap> {
    check_hypothesis(d, gg)?;
    let y = derived_op_cube(d, g, &Op::compose(vec![]), gg, h);
    let x = OpCube::trivial(d, h.to_vec());
    finish(MatherKind::M, m_blocks(&y, g, gg, h), y, x, window)
}

/// `K = M ⊗ 1` between the mapping tori of the cubes of [`mather_m`].
pub fn mather_k(d: &OpComplex, g: &Op, gg: &Op, h: &[Op], window: i64) -> Result<MatherMap> {
    check_hypothesis(d, gg)?;
    let y0 = derived_op_cube(d, g, &Op::compose(vec![]), gg, h);
    let blocks = m_blocks(&y0, g, gg, h);
    let y = y0.torus()?;
    let x = OpCube::trivial(d, h.to_vec()).torus()?;
    finish(MatherKind::K, extend_all(blocks, &y)?, y, x, window)
}

fn beta_diagonal(n: usize, beta: &Op) -> BTreeMap<(Subset, Subset), Op> {
    all_subsets(n).map(|a| ((a, a), beta.clone())).collect()
}

/// `L = diag β: Tot Der(D; αβ, id, G; h) -> Tot Der(C; α, β, G; h)`.
pub fn mather_l(c: &OpComplex, d: &OpComplex, alpha: &Op, beta: &Op, gg: &Op, h: &[Op], window: i64) -> Result<MatherMap> {
    check_hypothesis(d, gg)?;
    let ab = Op::compose(vec![alpha.clone(), beta.clone()]);
    let y = derived_op_cube(d, &ab, &Op::compose(vec![]), gg, h);
    let z = derived_op_cube(c, alpha, beta, gg, h);
    finish(MatherKind::L, beta_diagonal(h.len(), beta), y, z, window)
}

/// `J = diag β ⊗ 1` between the mapping tori of the cubes of [`mather_l`].
pub fn mather_j(c: &OpComplex, d: &OpComplex, alpha: &Op, beta: &Op, gg: &Op, h: &[Op], window: i64) -> Result<MatherMap> {
    check_hypothesis(d, gg)?;
    let ab = Op::compose(vec![alpha.clone(), beta.clone()]);
    let y = derived_op_cube(d, &ab, &Op::compose(vec![]), gg, h).torus()?;
    let z = derived_op_cube(c, alpha, beta, gg, h).torus()?;
    let blocks = extend_all(beta_diagonal(h.len(), beta), &y)?;
    finish(MatherKind::J, blocks, y, z, window)
}
