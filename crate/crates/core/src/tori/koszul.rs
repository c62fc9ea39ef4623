use std::collections::BTreeMap;

use num_traits::Zero;

use crate::cubes::{card, trivial_cube, Layout, Subset, TotalisedComplex};
use crate::error::{bail, Result};
use crate::homalg::{
    field_nullspace, field_rank, FreeComplex, GradedMap, Matrix, Op, Prim, SVec, SemiMatrix, SpotCheck,
};
use crate::rings::{format_scalar, pow_scalar, CoeffRing, LRing, Poly, Scalar};

/// `Tot Triv(S; x_1, ..., x_n)` over the polynomial ring `S = R[x_1, ..., x_n]`,
/// stored as Laurent polynomials with nonnegative support.
pub fn koszul(coeff: CoeffRing, n: usize) -> Result<TotalisedComplex> {
    if n == 0 {
        bail!(Precondition, "the Koszul complex needs at least one variable");
    }
    let l = LRing::new(coeff, n);
    let s = FreeComplex::concentrated(l, 0, 1);
    let f = (0..n).map(|k| GradedMap::from_blocks(l, 0, [(0, Matrix::scalar(l, 1, &l.var(k)))])).collect();
    trivial_cube(&s, f)?.totalise()
}

/// The multidegree-`m` part of the Koszul complex, where `x^a` in the summand
/// of `A` has multidegree `a + e_{N∖A}`. A complex of free `R`-modules.
pub fn koszul_slice(k: &TotalisedComplex, m: &[i64]) -> Result<FreeComplex> {
    let ring = k.complex.ring();
    let n = ring.nvars;
    if m.len() != n {
        bail!(Structural, "multidegree has {} entries for {n} variables", m.len());
    }
    let full: Subset = (1 << n) - 1;
    let exponent = |a: Subset| -> Option<Vec<i64>> {
        let e: Vec<i64> = (0..n).map(|i| m[i] - if (full & !a) >> i & 1 == 1 { 1 } else { 0 }).collect();
        e.iter().all(|&x| x >= 0).then_some(e)
    };
    let basis = |l: i64| -> Vec<(Subset, Vec<i64>)> {
        k.layout.members.iter().filter(|&&a| card(a) as i64 == l).filter_map(|&a| exponent(a).map(|e| (a, e))).collect()
    };
    let r = LRing::new(ring.coeff, 0);
    let mut ranks = BTreeMap::new();
    let mut d = GradedMap::zero(r, 1);
    for l in 0..=n as i64 {
        let src = basis(l);
        let tgt = basis(l + 1);
        ranks.insert(l, src.len());
        let mut mat = Matrix::zeros(r, tgt.len(), src.len());
        for (j, (a, e)) in src.iter().enumerate() {
            let v: SVec = [(k.layout.offset(l, *a), Poly::monomial(ring, e.clone(), ring.coeff.one()))].into_iter().collect();
            let img = k.complex.d().apply(l, &v);
            for (i, (b, eb)) in tgt.iter().enumerate() {
                if let Some(p) = img.get(&k.layout.offset(l + 1, *b)) {
                    let c = p.coeff_of(eb);
                    if !c.is_zero() {
                        mat.set(i, j, Poly::constant(r, c));
                    }
                }
            }
        }
        d.set_block(l, mat);
    }
    FreeComplex::new(r, ranks.into_iter().filter(|(_, v)| *v > 0).collect(), d)
}

/// `ψ: 𝒯 Triv(D; x_1, ..., x_n) -> Σ^n D`, `z ⊗ p ↦ z · p` on the top summand.
///
/// The torus lives over `L ⊗ L` with the variables of `D` first and the torus
/// variables after them; `ψ` identifies both sets of variables.
#[derive(Clone, Debug)]
pub struct PsiMap {
    pub torus: TotalisedComplex,
    pub target: FreeComplex,
    pub map: Op,
}

pub fn build_psi(d: &FreeComplex) -> Result<PsiMap> {
    let l = d.ring();
    let n = l.nvars;
    if n == 0 {
        bail!(Precondition, "D must live over a Laurent ring with at least one variable");
    }
    let ll = LRing::new(l.coeff, 2 * n);
    let de = d.map_entries(ll, |p| p.embed(ll, &(0..n).collect::<Vec<_>>()))?;
    let f = (0..n)
        .map(|k| {
            let q = ll.var(k) - ll.var(n + k);
            GradedMap::from_blocks(ll, 0, de.ranks().iter().map(|(&deg, &r)| (deg, Matrix::scalar(ll, r, &q))))
        })
        .collect();
    let torus = trivial_cube(&de, f)?.totalise()?;
    let target = d.shift(-(n as i64));
    let top: Subset = (1 << n) - 1;
    let vm: Vec<usize> = (0..n).chain(0..n).collect();
    let mut blocks = BTreeMap::new();
    for (deg, cols) in torus.layout.total_ranks() {
        let rows = target.rank(deg);
        if rows == 0 {
            continue;
        }
        let off = torus.layout.offset(deg, top);
        let entries = (0..rows).map(|i| (i, off + i, vec![Prim::Embed(l, vm.clone())])).collect();
        blocks.insert(deg, SemiMatrix { rows, cols, entries });
    }
    Ok(PsiMap { torus, target, map: Op::Semi { degree: 0, blocks } })
}

impl PsiMap {
    pub fn n(&self) -> usize {
        self.target.ring().nvars
    }

    /// `ψ` is the projection to the top summand followed by a ring
    /// homomorphism `π`, so `ψ D = D' ψ` holds iff `P π(D) = D' P` entrywise.
    pub fn is_cochain_map(&self) -> Result<bool> {
        let l = self.target.ring();
        let n = self.n();
        let vm: Vec<usize> = (0..n).chain(0..n).collect();
        let top: Subset = (1 << n) - 1;
        let lay: &Layout = &self.torus.layout;
        for (deg, cols) in lay.total_ranks() {
            let dx = self.torus.complex.differential(deg).try_map(l, |p| p.embed(l, &vm))?;
            let rows = self.target.rank(deg + 1);
            let lhs = dx.submatrix(lay.offset(deg + 1, top), rows, 0, cols);
            let mut rhs = Matrix::zeros(l, rows, cols);
            let r = self.target.rank(deg);
            if r > 0 && rows > 0 {
                rhs.add_block(0, lay.offset(deg, top), &self.target.differential(deg), 1);
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// For each point `c`, specialises the torus variables to `c` and checks
    /// the cone of `ψ_c` on a window: every cocycle whose torus part has
    /// exponents in `[-r, r]^n` must bound a cochain with exponents in
    /// `[-r-1, r+1]^n`. Linear algebra over the specialisation field.
    pub fn spot_check(&self, points: &[Vec<Scalar>], r: i64) -> Result<SpotCheck> {
        if points.is_empty() {
            bail!(Unsupported, "spot check needs at least one specialisation point");
        }
        for p in points {
            if !self.windowed_cone_exact(p, r)? {
                return Ok(SpotCheck::Falsified { point: p.iter().map(format_scalar).collect() });
            }
        }
        Ok(SpotCheck::NotFalsified { points: points.len() })
    }

    fn windowed_cone_exact(&self, c: &[Scalar], r: i64) -> Result<bool> {
        let n = self.n();
        if c.len() != n {
            bail!(Structural, "point has {} coordinates for {n} variables", c.len());
        }
        let k = self.target.ring().coeff.specialization_target();
        let lu = LRing::new(k, n);
        let spec = |p: &Poly| -> Result<Poly> {
            let mut q = p.change_coeff(k)?;
            for (j, cj) in c.iter().enumerate() {
                if !k.is_unit(&k.normalize(cj.clone())?) {
                    bail!(Domain, "coordinate {} is not a unit", format_scalar(cj));
                }
                q = q.substitute(n + j, cj);
            }
            q.embed(lu, &(0..n).chain(0..n).collect::<Vec<_>>())
        };
        let t = self.torus.complex.map_entries(lu, spec)?;
        let y = self.target.change_coeff(k)?.specialize(c)?;
        let top: Subset = (1 << n) - 1;
        let lay = &self.torus.layout;
        let cone = ConeWindow { c, t: &t, y: &y, n, top, lay };
        let (lo, hi) = match (t.bounds(), y.bounds()) {
            (Some((a, b)), Some((c2, d2))) => (a.min(c2 + 1), b.max(d2 + 1)),
            (Some(x), None) => x,
            (None, Some((a, b))) => (a + 1, b + 1),
            (None, None) => return Ok(true),
        };
        for l in lo..=hi {
            let (cols, keys) = cone.window_matrix(l, r, k)?;
            let ker = field_nullspace(k, &cols_to_rows(&cols, keys.len(), k), cols.len())?;
            if ker.is_empty() {
                continue;
            }
            let src = cone.basis(l, r);
            let (bcols, mut bkeys) = cone.window_matrix(l - 1, r + 1, k)?;
            let mut all: Vec<BTreeMap<usize, Scalar>> = bcols;
            let nb = all.len();
            for v in &ker {
                let mut col = BTreeMap::new();
                for (x, key) in v.iter().zip(&src) {
                    if !x.is_zero() {
                        let idx = bkeys.idx(key.clone());
                        col.insert(idx, x.clone());
                    }
                }
                all.push(col);
            }
            let rows_all = cols_to_rows(&all, bkeys.len(), k);
            let rows_b = cols_to_rows(&all[..nb], bkeys.len(), k);
            if field_rank(k, &rows_all)? != field_rank(k, &rows_b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    T(usize, Vec<i64>),
    Y(usize),
}

#[derive(Default)]
struct Keys(BTreeMap<Key, usize>);

impl Keys {
    fn idx(&mut self, k: Key) -> usize {
        let n = self.0.len();
        *self.0.entry(k).or_insert(n)
    }

    fn len(&self) -> usize {
        self.0.len()
    }
}

fn cols_to_rows(cols: &[BTreeMap<usize, Scalar>], nrows: usize, k: CoeffRing) -> Vec<Vec<Scalar>> {
    let mut rows = vec![vec![k.zero(); cols.len()]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col {
            rows[*i][j] = x.clone();
        }
    }
    rows
}

struct ConeWindow<'a> {
    c: &'a [Scalar],
    t: &'a FreeComplex,
    y: &'a FreeComplex,
    n: usize,
    top: Subset,
    lay: &'a Layout,
}

impl ConeWindow<'_> {
    fn box_exps(&self, r: i64) -> Vec<Vec<i64>> {
        let mut exps: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..self.n {
            exps = exps.into_iter().flat_map(|e| (-r..=r).map(move |a| [e.clone(), vec![a]].concat())).collect();
        }
        exps
    }

    /// Basis of the cone in degree `l`: `T^l` on the window, then `Y^{l-1}`.
    fn basis(&self, l: i64, r: i64) -> Vec<Key> {
        let mut out = Vec::new();
        for i in 0..self.t.rank(l) {
            for e in self.box_exps(r) {
                out.push(Key::T(i, e));
            }
        }
        out.extend((0..self.y.rank(l - 1)).map(Key::Y));
        out
    }

    /// Columns of the cone differential on the window basis, with row keys.
    fn window_matrix(&self, l: i64, r: i64, k: CoeffRing) -> Result<(Vec<BTreeMap<usize, Scalar>>, Keys)> {
        let mut keys = Keys::default();
        let mut cols = Vec::new();
        let dt = self.t.differential(l);
        let dy = self.y.differential(l - 1);
        let off = self.lay.offset(l, self.top);
        let ytop = self.y.rank(l);
        for key in self.basis(l, r) {
            let mut col: BTreeMap<usize, Scalar> = BTreeMap::new();
            let mut add = |keys: &mut Keys, key: Key, x: Scalar| {
                let i = keys.idx(key);
                let e = col.entry(i).or_insert_with(|| k.zero());
                *e = k.add(e, &x);
            };
            match &key {
                Key::T(i, e) => {
                    for (row, p) in (0..dt.rows()).filter_map(|row| dt.get_ref(row, *i).map(|p| (row, p))) {
                        for (ep, x) in p.terms() {
                            let ex: Vec<i64> = ep.iter().zip(e).map(|(a, b)| a + b).collect();
                            add(&mut keys, Key::T(row, ex), x.clone());
                        }
                    }
                    if *i >= off && *i < off + ytop {
                        let mut v = k.one();
                        for (cj, &a) in self.c.iter().zip(e) {
                            v = k.mul(&v, &pow_scalar(k, cj, a));
                        }
                        add(&mut keys, Key::Y(i - off), v);
                    }
                }
                Key::Y(j) => {
                    for row in 0..dy.rows() {
                        if let Some(p) = dy.get_ref(row, *j) {
                            add(&mut keys, Key::Y(row), k.neg(&p.constant_value().unwrap_or_else(|| k.zero())));
                        }
                    }
                }
            }
            col.retain(|_, x| !x.is_zero());
            cols.push(col);
        }
        Ok((cols, keys))
    }
}
