//! Random instances with the homotopy identity holding by construction.

use std::collections::BTreeMap;

use rand::Rng;

use crate::cubes::DerivedInput;
use crate::homalg::{identity_map, FreeComplex, GradedMap, LinearOp, Matrix};
use crate::rings::{int, CoeffRing, LRing, Poly, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub coeff: CoeffRing,
    pub n: usize,
    pub max_len: usize,
    pub max_rank: usize,
}

impl GenParams {
    pub fn new(coeff: CoeffRing, n: usize) -> Self {
        GenParams { coeff, n, max_len: 4, max_rank: 3 }
    }
}

/// `C`, `D` with `α: C -> D`, `β: D -> C`, `dG + Gd = αβ - id`, and commuting `h_k` on `D`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub c: FreeComplex,
    pub d: FreeComplex,
    pub alpha: GradedMap,
    pub beta: GradedMap,
    pub g: GradedMap,
    pub h: Vec<GradedMap>,
}

impl Instance {
    pub fn input(&self) -> DerivedInput<'_> {
        DerivedInput {
            c: &self.c,
            d: &self.d,
            alpha: &self.alpha,
            beta: &self.beta,
            g: &self.g,
            h: self.h.iter().map(|x| x as &dyn LinearOp).collect(),
        }
    }
}

pub fn small_scalar<R: Rng>(rng: &mut R, coeff: CoeffRing) -> Scalar {
    match coeff {
        CoeffRing::IntegersMod(m) => int(rng.gen_range(0..m as i64)),
        _ => int(rng.gen_range(-2..=2)),
    }
}

fn unit<R: Rng>(rng: &mut R, coeff: CoeffRing) -> Scalar {
    loop {
        let c = match coeff {
            CoeffRing::IntegersMod(m) => int(rng.gen_range(1..m as i64)),
            CoeffRing::Rationals => int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }),
            CoeffRing::Integers => int(if rng.gen_bool(0.5) { 1 } else { -1 }),
        };
        if coeff.is_unit(&c) {
            return c;
        }
    }
}

/// Specialisation points: nonzero rationals in `[-9, 9]` (nonzero residues mod `p`),
/// avoiding any value in `avoid`.
pub fn unit_points<R: Rng>(rng: &mut R, coeff: CoeffRing, nvars: usize, count: usize, avoid: &[Scalar]) -> Vec<Vec<Scalar>> {
    let draw = |rng: &mut R| loop {
        let c = match coeff {
            CoeffRing::IntegersMod(m) => int(rng.gen_range(1..m as i64)),
            _ => {
                let den = rng.gen_range(1..=3);
                let num = rng.gen_range(1..=9 * den) * if rng.gen_bool(0.5) { 1 } else { -1 };
                Scalar::new(num.into(), den.into())
            }
        };
        if !avoid.contains(&c) {
            return c;
        }
    };
    (0..count).map(|_| (0..nvars).map(|_| draw(rng)).collect()).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, ring: LRing, rows: usize, cols: usize, density: f64) -> Matrix {
    let mut m = Matrix::zeros(ring, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density) {
                m.set(i, j, Poly::constant(ring, small_scalar(rng, ring.coeff)));
            }
        }
    }
    m
}

/// A random invertible matrix and its inverse, as a product of elementary matrices.
pub fn random_invertible<R: Rng>(rng: &mut R, ring: LRing, n: usize) -> (Matrix, Matrix) {
    let mut q = Matrix::identity(ring, n);
    let mut qi = Matrix::identity(ring, n);
    if n == 0 {
        return (q, qi);
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let mut e = Matrix::identity(ring, n);
        let mut ei = Matrix::identity(ring, n);
        if i == j {
            let u = unit(rng, ring.coeff);
            e.set(i, i, Poly::constant(ring, u.clone()));
            ei.set(i, i, Poly::constant(ring, ring.coeff.inv(&u).unwrap()));
        } else {
            let c = small_scalar(rng, ring.coeff);
            e.set(i, j, Poly::constant(ring, c.clone()));
            ei.set(i, j, Poly::constant(ring, ring.coeff.neg(&c)));
        }
        q = e.mul(&q);
        qi = qi.mul(&ei);
    }
    (q, qi)
}

/// A direct sum of pieces `R[l]` and `R --c--> R`, with its piece structure.
#[derive(Clone, Debug)]
struct Elementary {
    complex: FreeComplex,
    /// `(l, source index, target index)` for each arrow `R^l --c--> R^{l+1}`.
    arrows: Vec<(i64, usize, usize)>,
    free: BTreeMap<i64, Vec<usize>>,
    targets: BTreeMap<i64, Vec<usize>>,
}

fn elementary<R: Rng>(rng: &mut R, ring: LRing, len: usize, max_rank: usize, unit_arrows: bool) -> Elementary {
    let len = len.max(1) as i64;
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut arrows = Vec::new();
    let mut free: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut targets: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut coeffs = Vec::new();
    for l in 0..len {
        let used = *ranks.get(&l).unwrap_or(&0);
        let room = max_rank.saturating_sub(used);
        if room == 0 {
            continue;
        }
        let k = rng.gen_range(0..=room);
        for _ in 0..k {
            let next_used = *ranks.get(&(l + 1)).unwrap_or(&0);
            let arrow = l + 1 < len && next_used < max_rank && rng.gen_bool(0.6);
            let src = *ranks.get(&l).unwrap_or(&0);
            *ranks.entry(l).or_insert(0) += 1;
            if arrow {
                let tgt = next_used;
                *ranks.entry(l + 1).or_insert(0) += 1;
                targets.entry(l + 1).or_default().push(tgt);
                arrows.push((l, src, tgt));
                let c = if unit_arrows {
                    unit(rng, ring.coeff)
                } else {
                    match ring.coeff {
                        CoeffRing::Integers => int([1, -1, 2, 3, -2][rng.gen_range(0..5)]),
                        _ => unit(rng, ring.coeff),
                    }
                };
                coeffs.push(c);
            } else {
                free.entry(l).or_default().push(src);
            }
        }
    }
    let mut d = GradedMap::zero(ring, 1);
    let mut blocks: BTreeMap<i64, Matrix> = BTreeMap::new();
    for ((l, s, t), c) in arrows.iter().zip(&coeffs) {
        let m = blocks.entry(*l).or_insert_with(|| Matrix::zeros(ring, ranks[&(l + 1)], ranks[l]));
        m.set(*t, *s, Poly::constant(ring, c.clone()));
    }
    for (l, m) in blocks {
        d.set_block(l, m);
    }
    let complex = FreeComplex::new(ring, ranks, d).expect("elementary complex");
    Elementary { complex, arrows, free, targets }
}

/// A contractible complex: one to three pieces `R --u--> R` with `u` a unit.
fn unit_arrows<R: Rng>(rng: &mut R, ring: LRing, len: usize) -> Elementary {
    let k = rng.gen_range(1..=3);
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut arrows = Vec::new();
    let mut entries = Vec::new();
    for _ in 0..k {
        let l = rng.gen_range(-1..len as i64);
        let s = *ranks.get(&l).unwrap_or(&0);
        let t = *ranks.get(&(l + 1)).unwrap_or(&0);
        *ranks.entry(l).or_insert(0) += 1;
        *ranks.entry(l + 1).or_insert(0) += 1;
        arrows.push((l, s, t));
        entries.push(unit(rng, ring.coeff));
    }
    let mut d = GradedMap::zero(ring, 1);
    for ((l, s, t), c) in arrows.iter().zip(entries) {
        let mut m = d.block_or_zero(*l, ranks[&(l + 1)], ranks[l]);
        m.set(*t, *s, Poly::constant(ring, c));
        d.set_block(*l, m);
    }
    let complex = FreeComplex::new(ring, ranks, d).expect("contractible complex");
    Elementary { complex, arrows, free: BTreeMap::new(), targets: BTreeMap::new() }
}

/// A random cochain self-map of an elementary complex.
fn elementary_endo<R: Rng>(rng: &mut R, e: &Elementary) -> GradedMap {
    let ring = e.complex.ring();
    let mut blocks: BTreeMap<i64, Matrix> =
        e.complex.ranks().iter().map(|(l, r)| (*l, Matrix::zeros(ring, *r, *r))).collect();
    for (l, s, t) in &e.arrows {
        let a = Poly::constant(ring, small_scalar(rng, ring.coeff));
        blocks.get_mut(l).unwrap().set(*s, *s, a.clone());
        blocks.get_mut(&(l + 1)).unwrap().set(*t, *t, a);
    }
    for (l, fr) in &e.free {
        let tg = e.targets.get(l).cloned().unwrap_or_default();
        for &x in fr {
            for &y in fr.iter().chain(&tg) {
                if rng.gen_bool(0.5) {
                    blocks.get_mut(l).unwrap().set(y, x, Poly::constant(ring, small_scalar(rng, ring.coeff)));
                }
            }
        }
    }
    GradedMap::from_blocks(ring, 0, blocks)
}

fn invertible_graded<R: Rng>(rng: &mut R, c: &FreeComplex) -> (GradedMap, GradedMap) {
    let ring = c.ring();
    let mut q = GradedMap::zero(ring, 0);
    let mut qi = GradedMap::zero(ring, 0);
    for (&l, &r) in c.ranks() {
        let (a, b) = random_invertible(rng, ring, r);
        q.set_block(l, a);
        qi.set_block(l, b);
    }
    (q, qi)
}

fn conjugate(c: &FreeComplex, q: &GradedMap, qi: &GradedMap) -> FreeComplex {
    let d = q.compose(c.d()).compose(qi);
    FreeComplex::new(c.ring(), c.ranks().clone(), d).expect("conjugate complex")
}

pub fn random_graded<R: Rng>(rng: &mut R, src: &FreeComplex, tgt: &FreeComplex, degree: i64, density: f64) -> GradedMap {
    let ring = src.ring();
    let mut g = GradedMap::zero(ring, degree);
    for (&l, &r) in src.ranks() {
        let rows = tgt.rank(l + degree);
        if rows > 0 {
            g.set_block(l, random_matrix(rng, ring, rows, r, density));
        }
    }
    g
}

/// A random bounded complex over `R` of length at most `max_len` and ranks at most `max_rank`.
pub fn random_complex<R: Rng>(rng: &mut R, coeff: CoeffRing, max_len: usize, max_rank: usize) -> FreeComplex {
    let ring = LRing::new(coeff, 0);
    let len = rng.gen_range(1..=max_len.max(1));
    let e = elementary(rng, ring, len, max_rank, false);
    let (q, qi) = invertible_graded(rng, &e.complex);
    conjugate(&e.complex, &q, &qi)
}

fn block_diag(ring: LRing, a: &GradedMap, ra: &FreeComplex, b: &GradedMap, rb: &FreeComplex, degree: i64) -> GradedMap {
    let mut out = GradedMap::zero(ring, degree);
    let degs: Vec<i64> = ra.degrees().into_iter().chain(rb.degrees()).collect();
    for l in degs {
        let rows = ra.rank(l + degree) + rb.rank(l + degree);
        let cols = ra.rank(l) + rb.rank(l);
        let mut m = Matrix::zeros(ring, rows, cols);
        if let Some(x) = a.block(l) {
            m.add_block(0, 0, x, 1);
        }
        if let Some(y) = b.block(l) {
            m.add_block(ra.rank(l + degree), ra.rank(l), y, 1);
        }
        out.set_block(l, m);
    }
    out
}

/// Polynomials of degree at most 2 in `φ`, so that they pairwise commute.
fn commuting_family<R: Rng>(rng: &mut R, d: &FreeComplex, phi: &GradedMap, n: usize) -> Vec<GradedMap> {
    let ring = d.ring();
    let id = identity_map(d);
    let phi2 = phi.compose(phi);
    (0..n)
        .map(|_| {
            let c0 = Poly::constant(ring, small_scalar(rng, ring.coeff));
            let c1 = Poly::constant(ring, unit(rng, ring.coeff));
            let c2 = Poly::constant(ring, small_scalar(rng, ring.coeff));
            id.scale(&c0).add(&phi.scale(&c1)).add(&phi2.scale(&c2))
        })
        .collect()
}

/// A random contractible complex over `R`.
pub fn random_contractible<R: Rng>(rng: &mut R, coeff: CoeffRing, max_len: usize) -> FreeComplex {
    let ring = LRing::new(coeff, 0);
    let u = unit_arrows(rng, ring, max_len.max(1));
    let (q, qi) = invertible_graded(rng, &u.complex);
    conjugate(&u.complex, &q, &qi)
}

/// `n` commuting cochain self-maps of `c`, polynomials in `a·id + ds + sd`.
pub fn random_commuting_maps<R: Rng>(rng: &mut R, c: &FreeComplex, n: usize) -> Vec<GradedMap> {
    let ring = c.ring();
    let s = random_graded(rng, c, c, -1, 0.5);
    let a = Poly::constant(ring, small_scalar(rng, ring.coeff));
    let phi = identity_map(c).scale(&a).add(&c.d().compose(&s)).add(&s.compose(c.d()));
    commuting_family(rng, c, &phi, n)
}

/// Random data for the derived-cube construction. Half of the instances are
/// isomorphisms twisted by a random homotopy (`α = (id + dG + Gd) Q`, `β = Q⁻¹`),
/// half are retracts `D ≅ C ⊕ (contractible)` with a twisted contraction.
pub fn random_instance<R: Rng>(rng: &mut R, p: &GenParams) -> Instance {
    let ring = LRing::new(p.coeff, 0);
    let len = rng.gen_range(1..=p.max_len.max(1));
    let c0 = elementary(rng, ring, len, p.max_rank, false);
    let (pm, pmi) = invertible_graded(rng, &c0.complex);
    let c = conjugate(&c0.complex, &pm, &pmi);
    if rng.gen_bool(0.5) {
        let (q, qi) = invertible_graded(rng, &c);
        let d = conjugate(&c, &q, &qi);
        let g = random_graded(rng, &d, &d, -1, 0.5);
        let gmap = identity_map(&d).add(&d.d().compose(&g)).add(&g.compose(d.d()));
        let alpha = gmap.compose(&q);
        let beta = qi.clone();
        let t = q.compose(&pm);
        let ti = pmi.compose(&qi);
        let chi = t.compose(&elementary_endo(rng, &c0)).compose(&ti);
        let s = random_graded(rng, &d, &d, -1, 0.4);
        let phi = chi.add(&d.d().compose(&s)).add(&s.compose(d.d()));
        let h = commuting_family(rng, &d, &phi, p.n);
        Instance { c, d, alpha, beta, g, h }
    } else {
        let u = unit_arrows(rng, ring, len);
        let uc = &u.complex;
        // contraction s on the unit arrows: target back to source by the inverse unit
        let mut sblocks: BTreeMap<i64, Matrix> = BTreeMap::new();
        let mut contraction = GradedMap::zero(ring, -1);
        for (l, s, t) in &u.arrows {
            let dl = uc.differential(*l);
            let c = dl.get(*t, *s).constant_value().unwrap();
            let ci = ring.coeff.inv(&c).unwrap();
            let m = sblocks.entry(l + 1).or_insert_with(|| Matrix::zeros(ring, uc.rank(*l), uc.rank(l + 1)));
            m.set(*s, *t, Poly::constant(ring, ci));
        }
        for (l, m) in sblocks {
            contraction.set_block(l, m);
        }
        let d0 = c.direct_sum(uc).expect("direct sum");
        let zero_c = GradedMap::zero(ring, -1);
        let g0 = block_diag(ring, &zero_c, &c, &contraction.neg(), uc, -1);
        let incl = {
            let mut m = GradedMap::zero(ring, 0);
            for (&l, &r) in c.ranks() {
                let mut b = Matrix::zeros(ring, d0.rank(l), r);
                b.add_block(0, 0, &Matrix::identity(ring, r), 1);
                m.set_block(l, b);
            }
            m
        };
        let proj = {
            let mut m = GradedMap::zero(ring, 0);
            for (&l, &r) in c.ranks() {
                let mut b = Matrix::zeros(ring, r, d0.rank(l));
                b.add_block(0, 0, &Matrix::identity(ring, r), 1);
                m.set_block(l, b);
            }
            m
        };
        let (q, qi) = invertible_graded(rng, &d0);
        let d = conjugate(&d0, &q, &qi);
        let alpha = q.compose(&incl);
        let beta = proj.compose(&qi);
        let k = random_graded(rng, &d, &d, -2, 0.4);
        let g = q.compose(&g0).compose(&qi).add(&d.d().compose(&k)).sub(&k.compose(d.d()));
        let chi_c = pm.compose(&elementary_endo(rng, &c0)).compose(&pmi);
        let a = Poly::constant(ring, small_scalar(rng, ring.coeff));
        let chi_u = identity_map(uc).scale(&a);
        let chi = q.compose(&block_diag(ring, &chi_c, &c, &chi_u, uc, 0)).compose(&qi);
        let s = random_graded(rng, &d, &d, -1, 0.4);
        let phi = chi.add(&d.d().compose(&s)).add(&s.compose(d.d()));
        let h = commuting_family(rng, &d, &phi, p.n);
        Instance { c, d, alpha, beta, g, h }
    }
}
