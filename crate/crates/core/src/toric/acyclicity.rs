use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cone::Cone;
use super::lattice::{add, dot, scale, IVec};
use super::novikov::{nov_invert, nov_mul, NovikovContext, NovikovSeries};
use crate::error::{bail, Result};
use crate::homalg::{field_nullspace, field_rank, FreeComplex};
use crate::rings::{format_scalar, int, pow_scalar, CoeffRing, LRing, Poly, Scalar};

pub const DEFAULT_ORDER: i64 = 16;
pub const MAX_ORDER: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotRecord {
    pub degree: i64,
    pub row: usize,
    pub col: usize,
    /// Quotient exponent of the leading monomial.
    pub base: IVec,
    pub coefficient: String,
    /// Validity bound of the entry when it was used (`None`: exact).
    pub valid: Option<i64>,
}

/// Evidence that `D ⊗ R⟪τ⟫` is not acyclic: a ring map out of `R⟪τ⟫` after
/// which some cohomology group is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonacyclicWitness {
    /// `"p-adic"`: `x^m ↦ ε^{m_U} p^{<λ, m̄>}` into `Q_p`;
    /// `"generic"`: `x^m ↦ ε^{m_U} s^{<λ, m̄>}` into `K((s))`.
    pub method: String,
    pub prime: Option<u64>,
    pub lambda: IVec,
    pub units: Vec<i64>,
    /// Images of the variables (`p-adic` only).
    pub point: Vec<String>,
    pub degree: i64,
    pub dimension: usize,
    /// A cocycle that is not a coboundary after the map (`p-adic` only).
    pub cocycle: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    AcyclicCertified { pivots: Vec<PivotRecord> },
    NonacyclicCertified { witness: NonacyclicWitness },
    Inconclusive { order: i64, remaining: BTreeMap<i64, usize> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::AcyclicCertified { .. } => "AcyclicCertified",
            Verdict::NonacyclicCertified { .. } => "NonacyclicCertified",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn is_acyclic(&self) -> bool {
        matches!(self, Verdict::AcyclicCertified { .. })
    }

    pub fn is_nonacyclic(&self) -> bool {
        matches!(self, Verdict::NonacyclicCertified { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovReport {
    pub cone: Cone,
    pub phi: IVec,
    pub cospan_dim: usize,
    pub order: i64,
    pub verdict: Verdict,
}

type SMat = BTreeMap<(usize, usize), NovikovSeries>;

struct Reduction {
    ctx: Arc<NovikovContext>,
    ranks: BTreeMap<i64, usize>,
    d: BTreeMap<i64, SMat>,
    pivots: Vec<PivotRecord>,
}

fn drop_index(i: usize, gone: usize) -> Option<usize> {
    match i.cmp(&gone) {
        std::cmp::Ordering::Less => Some(i),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(i - 1),
    }
}

impl Reduction {
    fn new(ctx: &Arc<NovikovContext>, c: &FreeComplex) -> Result<Self> {
        let mut d = BTreeMap::new();
        for &l in c.ranks().keys() {
            let mut m = SMat::new();
            for (r, k, p) in c.differential(l).entries() {
                m.insert((r, k), NovikovSeries::from_poly(ctx, p)?);
            }
            d.insert(l, m);
        }
        Ok(Reduction { ctx: ctx.clone(), ranks: c.ranks().clone(), d, pivots: vec![] })
    }

    fn find_pivot(&self) -> Option<(i64, usize, usize)> {
        let mut fallback = None;
        for (&l, m) in &self.d {
            for (&(r, k), s) in m {
                if s.leading_unit().is_some() {
                    if s.is_exact() {
                        return Some((l, r, k));
                    }
                    fallback.get_or_insert((l, r, k));
                }
            }
        }
        fallback
    }

    fn eliminate(&mut self, l: i64, i: usize, j: usize) -> Result<()> {
        let m = self.d.remove(&l).unwrap_or_default();
        let a = &m[&(i, j)];
        let ainv = nov_invert(a).expect("pivot is a unit");
        let (c, e) = a.leading_unit().expect("pivot is a unit");
        self.pivots.push(PivotRecord { degree: l, row: i, col: j, base: e, coefficient: c.to_string(), valid: a.valid });
        let col: Vec<(usize, &NovikovSeries)> = m.iter().filter(|((r, k), _)| *k == j && *r != i).map(|((r, _), s)| (*r, s)).collect();
        let row: Vec<(usize, &NovikovSeries)> = m.iter().filter(|((r, k), _)| *r == i && *k != j).map(|((_, k), s)| (*k, s)).collect();
        let mut out = SMat::new();
        for ((r, k), s) in &m {
            if *r != i && *k != j {
                out.insert((*r, *k), s.clone());
            }
        }
        for (r, cr) in &col {
            let left = nov_mul(cr, &ainv)?;
            for (k, bk) in &row {
                let t = nov_mul(&left, bk)?;
                let cur = out.remove(&(*r, *k)).unwrap_or_else(|| NovikovSeries::zero(&self.ctx));
                out.insert((*r, *k), cur.sub(&t)?);
            }
        }
        let out = out
            .into_iter()
            .filter(|(_, s)| !s.is_exact_zero())
            .map(|((r, k), s)| ((drop_index(r, i).unwrap(), drop_index(k, j).unwrap()), s))
            .collect();
        self.d.insert(l, out);
        if let Some(prev) = self.d.remove(&(l - 1)) {
            let prev = prev.into_iter().filter_map(|((r, k), s)| drop_index(r, j).map(|r| ((r, k), s))).collect();
            self.d.insert(l - 1, prev);
        }
        if let Some(next) = self.d.remove(&(l + 1)) {
            let next = next.into_iter().filter_map(|((r, k), s)| drop_index(k, i).map(|k| ((r, k), s))).collect();
            self.d.insert(l + 1, next);
        }
        *self.ranks.get_mut(&l).unwrap() -= 1;
        *self.ranks.get_mut(&(l + 1)).unwrap() -= 1;
        self.ranks.retain(|_, r| *r > 0);
        Ok(())
    }
}

fn validate(d: &FreeComplex, tau: &Cone) -> Result<()> {
    if d.ring().nvars != tau.n {
        bail!(Structural, "complex over {} variables, cone in rank {}", d.ring().nvars, tau.n);
    }
    if !d.ring().coeff.is_pid() {
        bail!(Unsupported, "coefficients {} are neither the integers nor a field", d.ring().coeff);
    }
    Ok(())
}

/// Decides acyclicity of `D ⊗ R⟪τ⟫` by unit-pivot elimination, falling back
/// to a search for a non-acyclicity witness.
pub fn nov_acyclicity(d: &FreeComplex, tau: &Cone, order: i64) -> Result<NovikovReport> {
    validate(d, tau)?;
    let ctx = NovikovContext::new(d.ring().coeff, tau, order)?;
    nov_acyclicity_in(d, &ctx)
}

pub fn nov_acyclicity_in(d: &FreeComplex, ctx: &Arc<NovikovContext>) -> Result<NovikovReport> {
    validate(d, &ctx.tau)?;
    let mut red = Reduction::new(ctx, d)?;
    while let Some((l, i, j)) = red.find_pivot() {
        red.eliminate(l, i, j)?;
    }
    let verdict = if red.ranks.is_empty() {
        Verdict::AcyclicCertified { pivots: red.pivots }
    } else if let Some(witness) = find_witness(d, ctx)? {
        Verdict::NonacyclicCertified { witness }
    } else {
        Verdict::Inconclusive { order: ctx.order, remaining: red.ranks }
    };
    Ok(NovikovReport { cone: ctx.tau.clone(), phi: ctx.phi.clone(), cospan_dim: ctx.u, order: ctx.order, verdict })
}

/// Runs [`nov_acyclicity`] at `order`, doubling up to [`MAX_ORDER`] while inconclusive.
pub fn nov_acyclicity_auto(d: &FreeComplex, tau: &Cone, order: i64) -> Result<NovikovReport> {
    let mut order = order;
    loop {
        let rep = nov_acyclicity(d, tau, order)?;
        if !matches!(rep.verdict, Verdict::Inconclusive { .. }) || order * 2 > MAX_ORDER {
            return Ok(rep);
        }
        order *= 2;
    }
}

/// Weights `Σ c_i y_i` over the facet normals `y_i` of `τ̄`, `1 ≤ c_i ≤ 4`;
/// each is positive on `τ̄ ∖ 0`, so evaluations along it converge.
fn lambdas(ctx: &NovikovContext) -> Vec<IVec> {
    let normals = &ctx.tau_bar_normals;
    let mut out: Vec<IVec> = vec![vec![0; ctx.q()]];
    for y in normals {
        out = out.iter().flat_map(|l| (1..=4).map(move |c| add(l, &scale(y, c)))).collect();
    }
    out.sort_by_key(|l| (l.iter().map(|x| x.abs()).sum::<i64>(), l.clone()));
    out.dedup();
    out
}

fn sign_vectors(u: usize) -> Vec<Vec<i64>> {
    (0..1usize << u).map(|m| (0..u).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

fn dense_ranks(c: &FreeComplex, k: CoeffRing) -> Result<BTreeMap<i64, usize>> {
    let mut out = BTreeMap::new();
    for &l in c.ranks().keys() {
        let m = c.differential(l);
        let r = if m.rows() == 0 { 0 } else { field_rank(k, &m.to_scalars()?)? };
        out.insert(l, r);
    }
    Ok(out)
}

fn first_cohomology(ranks: &BTreeMap<i64, usize>, c: &FreeComplex) -> Option<(i64, usize)> {
    c.ranks().iter().find_map(|(&l, &n)| {
        let h = n - ranks.get(&l).copied().unwrap_or(0) - ranks.get(&(l - 1)).copied().unwrap_or(0);
        (h > 0).then_some((l, h))
    })
}

/// A vector in `ker d^l` outside `im d^{l-1}`, over a field.
fn nontrivial_cocycle(c: &FreeComplex, k: CoeffRing, l: i64) -> Result<Option<Vec<Scalar>>> {
    let n = c.rank(l);
    let dl = c.differential(l);
    let ker = if dl.rows() == 0 { (0..n).map(|i| (0..n).map(|j| int(i64::from(i == j))).collect()).collect() } else { field_nullspace(k, &dl.to_scalars()?, n)? };
    let prev = c.differential(l - 1);
    let im: Vec<Vec<Scalar>> = if prev.cols() == 0 { vec![] } else { prev.transpose().to_scalars()? };
    let base = if im.is_empty() { 0 } else { field_rank(k, &im)? };
    for v in ker {
        let mut rows = im.clone();
        rows.push(v.clone());
        if field_rank(k, &rows)? > base {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

fn monomial_image(ctx: &NovikovContext, units: &[i64], lambda: &[i64], var: usize) -> (i64, i64) {
    let e: IVec = (0..ctx.n()).map(|i| i64::from(i == var)).collect();
    let (eu, eq) = ctx.split(&e);
    let sign = eu.iter().zip(units).map(|(a, s)| if a.rem_euclid(2) == 1 { *s } else { 1 }).product();
    (sign, dot(lambda, &eq))
}

fn find_witness(d: &FreeComplex, ctx: &NovikovContext) -> Result<Option<NonacyclicWitness>> {
    let coeff = d.ring().coeff;
    for lambda in lambdas(ctx) {
        for units in sign_vectors(ctx.u) {
            let images: Vec<(i64, i64)> = (0..ctx.n()).map(|v| monomial_image(ctx, &units, &lambda, v)).collect();
            if coeff == CoeffRing::Integers {
                for p in [2u64, 3, 5, 7, 11, 13] {
                    let point: Vec<Scalar> =
                        images.iter().map(|(s, k)| int(*s) * pow_scalar(CoeffRing::Rationals, &int(p as i64), *k)).collect();
                    let c = d.specialize(&point)?;
                    let ranks = dense_ranks(&c, CoeffRing::Rationals)?;
                    if let Some((l, h)) = first_cohomology(&ranks, &c) {
                        let v = nontrivial_cocycle(&c, CoeffRing::Rationals, l)?.unwrap_or_default();
                        return Ok(Some(NonacyclicWitness {
                            method: "p-adic".into(),
                            prime: Some(p),
                            lambda,
                            units,
                            point: point.iter().map(format_scalar).collect(),
                            degree: l,
                            dimension: h,
                            cocycle: v.iter().map(format_scalar).collect(),
                        }));
                    }
                }
            }
            if let Some((l, h)) = generic_cohomology(d, &images)? {
                return Ok(Some(NonacyclicWitness {
                    method: "generic".into(),
                    prime: None,
                    lambda,
                    units,
                    point: vec![],
                    degree: l,
                    dimension: h,
                    cocycle: vec![],
                }));
            }
        }
    }
    Ok(None)
}

/// Nonzero cohomology of `D` over `K(s)` after `x_i ↦ ε_i s^{k_i}`, certified
/// by evaluating at enough points to bound the degrees of all minors.
fn generic_cohomology(d: &FreeComplex, images: &[(i64, i64)]) -> Result<Option<(i64, usize)>> {
    let k = d.ring().coeff.specialization_target();
    let s = LRing::new(k, 1);
    let c = d.map_entries(s, |p| {
        Poly::from_terms(
            s,
            p.terms().iter().map(|(e, a)| {
                let sign: i64 = e.iter().zip(images).map(|(x, (g, _))| if x.rem_euclid(2) == 1 { *g } else { 1 }).product();
                let deg: i64 = e.iter().zip(images).map(|(x, (_, kk))| x * kk).sum();
                (vec![deg], k.reduce(a * int(sign)))
            }),
        )
    })?;
    let available: i64 = match k {
        CoeffRing::IntegersMod(p) => p as i64 - 1,
        _ => i64::MAX,
    };
    let mut ranks = BTreeMap::new();
    for &l in c.ranks().keys() {
        let m = c.differential(l);
        if m.rows() == 0 || m.is_zero() {
            ranks.insert(l, 0);
            continue;
        }
        let degs: Vec<i64> = m.entries().flat_map(|(_, _, p)| p.terms().keys().map(|e| e[0]).collect::<Vec<_>>()).collect();
        let span = degs.iter().max().unwrap() - degs.iter().min().unwrap();
        let mut best = 0usize;
        let mut samples = 0i64;
        let mut t = 1i64;
        loop {
            let needed = (best as i64 + 1) * span + 1;
            if samples >= needed {
                break;
            }
            if t > available || t > 4096 {
                return Ok(None);
            }
            let ms = m.try_map(LRing::new(k, 0), |p| Ok(Poly::constant(LRing::new(k, 0), p.specialize(&[k.from_int(t)])?)))?;
            best = best.max(field_rank(k, &ms.to_scalars()?)?);
            samples += 1;
            t += 1;
        }
        ranks.insert(l, best);
    }
    Ok(first_cohomology(&ranks, &c))
}
