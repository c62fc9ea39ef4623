use std::collections::BTreeMap;

use super::mather::{mather_j, mather_k, MatherMap};
use super::torus::{mapping_torus, TorusData};
use crate::cubes::{derive_cube, DerivedInput, IdentityCheck, OpComplex};
use crate::error::{bail, Result};
use crate::homalg::{cohomology, FreeComplex, LinearOp, Matrix, Op, Prim, SemiMatrix};
use crate::rings::{int, CoeffRing, LRing, Scalar};

/// A homotopy equivalence between a finite complex `C` over `R` and a
/// complex `D` of free `L`-modules: `α: C -> D`, `β: D -> C` with
/// `βα = id` and `dG + Gd = αβ - id`. The maps are only `R`-linear.
#[derive(Clone, Debug)]
pub struct Witness {
    pub name: String,
    pub c: FreeComplex,
    pub d: FreeComplex,
    pub alpha: Op,
    pub beta: Op,
    pub g: Op,
}

fn block(rows: usize, cols: usize, entries: Vec<(usize, usize, Vec<Prim>)>) -> SemiMatrix {
    SemiMatrix { rows, cols, entries }
}

impl Witness {
    /// `D = (L --x-1--> L)` in degrees 0, 1 and `C = R` in degree 1.
    pub fn one_variable(coeff: CoeffRing) -> Witness {
        let l = LRing::new(coeff, 1);
        let r = LRing::new(coeff, 0);
        let d = FreeComplex::two_term(0, Matrix::from_polys(l, 1, 1, vec![vec![l.var(0) - l.one()]])).expect("complex");
        let c = FreeComplex::concentrated(r, 1, 1);
        let dd = Prim::DivDiff { var: 0, at: int(1) };
        Witness {
            name: "x-1".into(),
            c,
            d,
            alpha: Op::scalar_block(0, 1, vec![Prim::Lift(1)]),
            beta: Op::scalar_block(0, 1, vec![Prim::Eval(vec![int(1)])]),
            g: Op::scalar_block(-1, 1, vec![dd, Prim::Mul(l.int(-1))]),
        }
    }

    /// The Koszul complex of `(x-1, y-1)` over `L = R[x^±, y^±]`, with `C = R`
    /// in degree 2.
    pub fn two_variable(coeff: CoeffRing) -> Witness {
        let l = LRing::new(coeff, 2);
        let r = LRing::new(coeff, 0);
        let (x1, y1) = (l.var(0) - l.one(), l.var(1) - l.one());
        let d0 = Matrix::from_polys(l, 2, 1, vec![vec![x1.clone()], vec![y1.clone()]]);
        let d1 = Matrix::from_polys(l, 1, 2, vec![vec![-y1, x1]]);
        let ranks = [(0, 1), (1, 2), (2, 1)].into_iter().collect();
        let dmap = crate::homalg::GradedMap::from_blocks(l, 1, [(0, d0), (1, d1)]);
        let d = FreeComplex::new(l, ranks, dmap).expect("Koszul complex");
        let c = FreeComplex::concentrated(r, 2, 1);
        let one = int(1);
        let neg = Prim::Mul(l.int(-1));
        let dx = Prim::DivDiff { var: 0, at: one.clone() };
        let dy = Prim::DivDiff { var: 1, at: one.clone() };
        let g = Op::semi(
            -1,
            [
                (2, block(2, 1, vec![(0, 0, vec![Prim::Subst { var: 0, at: one.clone() }, dy]), (1, 0, vec![dx.clone(), neg.clone()])])),
                (1, block(1, 2, vec![(0, 0, vec![dx, neg])])),
            ],
        );
        Witness {
            name: "(x-1, y-1)".into(),
            c,
            d,
            alpha: Op::scalar_block(0, 2, vec![Prim::Lift(2)]),
            beta: Op::scalar_block(0, 2, vec![Prim::Eval(vec![one.clone(), one])]),
            g,
        }
    }

    pub fn nvars(&self) -> usize {
        self.d.ring().nvars
    }

    /// Multiplication by `x_k` on `D`.
    pub fn h(&self, k: usize) -> Op {
        Op::diag_mul(self.d.ranks(), &self.d.ring().var(k))
    }

    pub fn input<'a>(&'a self, hs: &'a [Op]) -> DerivedInput<'a> {
        DerivedInput {
            c: &self.c,
            d: &self.d,
            alpha: &self.alpha,
            beta: &self.beta,
            g: &self.g,
            h: hs.iter().map(|h| h as &dyn LinearOp).collect(),
        }
    }

    pub fn check(&self, window: i64) -> Result<IdentityCheck> {
        let hs: Vec<Op> = (0..self.nvars()).map(|k| self.h(k)).collect();
        self.input(&hs).check(window)
    }
}

/// `𝒯 Der(C; α, β, G; x_k for k ∈ vars)` over `L' = R[x_k^± : k ∈ vars]`,
/// together with the comparison maps `K` and `J` that relate it to the
/// torus of the trivial cube of `D`.
#[derive(Clone, Debug)]
pub struct DominationWitness {
    pub vars: Vec<usize>,
    pub torus: TorusData,
    pub k: Option<MatherMap>,
    pub j: Option<MatherMap>,
    pub hypotheses: IdentityCheck,
}

/// Builds the witness complex and verifies the cochain identities of `K`
/// and `J` on a window of half-width `window` (`window < 0` skips them).
pub fn domination_witness(w: &Witness, vars: &[usize], window: i64) -> Result<DominationWitness> {
    let n = w.nvars();
    let mut seen = BTreeMap::new();
    for &k in vars {
        if k >= n || seen.insert(k, ()).is_some() {
            bail!(Structural, "invalid variable subset {vars:?} for {n} variables");
        }
    }
    let hs: Vec<Op> = vars.iter().map(|&k| w.h(k)).collect();
    let input = w.input(&hs);
    let hypotheses = input.check(window.max(1))?;
    let cube = derive_cube(&input, window.max(1))?;
    let torus = mapping_torus(&cube)?;
    let (k, j) = if window >= 0 && !vars.is_empty() {
        let d = OpComplex::from(&w.d);
        let c = OpComplex::from(&w.c);
        let g = Op::compose(vec![w.alpha.clone(), w.beta.clone()]);
        let k = mather_k(&d, &g, &w.g, &hs, window)?;
        let j = mather_j(&c, &d, &w.alpha, &w.beta, &w.g, &hs, window)?;
        (Some(k), Some(j))
    } else {
        (None, None)
    };
    Ok(DominationWitness { vars: vars.to_vec(), torus, k, j, hypotheses })
}

/// Compares the cohomology of the specialised witness torus with that of
/// `Σ^u D` specialised at the same point (for `vars` = all variables).
pub fn compare_specialised(w: &Witness, dw: &DominationWitness, points: &[Vec<Scalar>]) -> Result<Option<Vec<String>>> {
    let n = w.nvars();
    if dw.vars.len() != n {
        bail!(Unsupported, "comparison with Σ^u D needs the full variable set");
    }
    let sd = w.d.shift(-(n as i64));
    for p in points {
        let mut q = vec![int(0); n];
        for (i, &k) in dw.vars.iter().enumerate() {
            q[k] = p[i].clone();
        }
        let a = cohomology(&dw.torus.complex().specialize(p)?)?;
        let b = cohomology(&sd.specialize(&q)?)?;
        let ranks = |h: &crate::homalg::CohomologyReport| -> Vec<(i64, usize)> {
            h.degrees.iter().map(|(l, x)| (*l, x.free_rank)).filter(|(_, r)| *r > 0).collect()
        };
        if ranks(&a) != ranks(&b) {
            return Ok(Some(p.iter().map(crate::rings::format_scalar).collect()));
        }
    }
    Ok(None)
}
