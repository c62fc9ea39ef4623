use std::collections::BTreeMap;

use super::multi::{step, tot_sum, MultiComplex, Pos};
use crate::cubes::{total_incidence, SpecialCube, TotalisedComplex};
use crate::error::{bail, Result};
use crate::homalg::Matrix;
use crate::rings::{LRing, Poly};
use crate::tori::mapping_torus;

/// All `a ∈ [lo, hi]^n`.
pub fn box_positions(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|a: Vec<i64>| (lo..=hi).map(move |x| [a.clone(), vec![x]].concat())).collect();
    }
    out
}

/// `Ł(F)` on the given `a`-positions, with `T = Tot F`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub multi: MultiComplex,
    pub tot: TotalisedComplex,
}

/// `N_k: T^l -> T^{l+1}`, `-[A⊔k:A]` times the identity from the `A`- to the `A⊔k`-summand.
fn inclusion(tot: &TotalisedComplex, k: usize, l: i64) -> Matrix {
    let lay = &tot.layout;
    let ring = tot.complex.ring();
    let mut m = Matrix::zeros(ring, lay.total_rank(l + 1), lay.total_rank(l));
    let bit = 1 << k;
    for &a in &lay.members {
        if a & bit != 0 {
            continue;
        }
        let r = lay.summand_rank(l, a);
        if r == 0 {
            continue;
        }
        let id = Matrix::identity(ring, r);
        m.add_block(lay.offset(l + 1, a | bit), lay.offset(l, a), &id, -total_incidence(a | bit, a));
    }
    m
}

pub fn realize_l(f: &SpecialCube, positions: &[Vec<i64>]) -> Result<Realization> {
    let n = f.n;
    if positions.iter().any(|a| a.len() != n) {
        bail!(Structural, "positions must lie in Z^{n}");
    }
    let tot = f.totalise()?;
    let t = &tot.complex;
    let mut e = MultiComplex::new(n + 1, f.ring());
    let Some((lo, hi)) = t.bounds() else { return Ok(Realization { multi: e, tot }) };
    for a in positions {
        let s: i64 = a.iter().sum();
        for l in lo..=hi {
            e.set_module([a.clone(), vec![l - s]].concat(), t.rank(l));
        }
    }
    let keys: Vec<Pos> = e.ranks.keys().cloned().collect();
    for b in keys {
        let s: i64 = b[..n].iter().sum();
        let l = b[n] + s;
        if e.contains(&step(&b, n, 1)) {
            e.set_d(n, b.clone(), t.differential(l))?;
        }
        for k in 0..n {
            if e.contains(&step(&b, k, 1)) {
                e.set_d(k, b.clone(), inclusion(&tot, k, l))?;
            }
        }
    }
    if let Some((i, j, b)) = e.anticommutation_defects().into_iter().next() {
        bail!(Internal, "d_{i} and d_{j} do not anticommute at {b:?}");
    }
    Ok(Realization { multi: e, tot })
}

/// The coefficient of `x^e` in the last `e.len()` variables, as a matrix over the base ring.
pub fn torus_coefficient(m: &Matrix, base: LRing, e: &[i64]) -> Result<Matrix> {
    let nb = base.nvars;
    m.try_map(base, |p| {
        let terms = p.terms().iter().filter(|(x, _)| x[nb..] == *e).map(|(x, c)| (x[..nb].to_vec(), c.clone()));
        Poly::from_terms(base, terms)
    })
}

/// Compares `T Ł(F)` on `[-r, r]^n` with `𝒯F` coefficientwise: the block
/// `(a', t+1-|a'|) <- (a, t-|a|)` must equal the coefficient of `x^{a'-a}` in
/// the torus differential at degree `t`. Returns the number of blocks compared.
pub fn check_torus_by_tot(f: &SpecialCube, r: i64) -> Result<usize> {
    let n = f.n;
    let positions = box_positions(n, -r, r);
    let real = realize_l(f, &positions)?;
    let sum = tot_sum(&real.multi);
    let torus = mapping_torus(f)?;
    let tc = torus.complex();
    let t = &real.tot.complex;
    if tc.ranks() != t.ranks() {
        bail!(Internal, "torus ranks {:?} differ from Tot F ranks {:?}", tc.ranks(), t.ranks());
    }
    let mut coeffs: BTreeMap<(i64, Vec<i64>), Matrix> = BTreeMap::new();
    let mut count = 0;
    for &deg in t.ranks().keys() {
        let full = tc.differential(deg);
        for a in &positions {
            for a2 in &positions {
                let diff: Vec<i64> = a2.iter().zip(a).map(|(x, y)| x - y).collect();
                let key = (deg, diff.clone());
                if !coeffs.contains_key(&key) {
                    coeffs.insert(key.clone(), torus_coefficient(&full, f.ring(), &diff)?);
                }
                let want = &coeffs[&key];
                let (sa, sa2) = (a.iter().sum::<i64>(), a2.iter().sum::<i64>());
                let from = [a.clone(), vec![deg - sa]].concat();
                let to = [a2.clone(), vec![deg + 1 - sa2]].concat();
                let got = sum.block(&to, &from);
                if &got != want {
                    bail!(Internal, "block {to:?} <- {from:?} differs from the x^{diff:?} coefficient");
                }
                count += 1;
            }
        }
    }
    Ok(count)
}
