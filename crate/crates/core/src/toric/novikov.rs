use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cone::{basis_inside_cone, cospan, Cone};
use super::lattice::{add, adapted_coordinates, dot, int_inverse, mat_vec, primitive, scale, sub, IVec};
use crate::error::{bail, Result};
use crate::rings::{CoeffRing, LRing, Poly};

/// `R⟪τ⟫ = R[U ∩ M]⟪τ̄⟫` for a full-dimensional cone `τ ⊆ M_R` with cospan `U`.
///
/// Exponents are written in an adapted basis of `M`: the first `u` vectors
/// span `M ∩ U`, the images of the others form a basis of `M̄` inside `τ̄`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovContext {
    pub coeff: CoeffRing,
    pub tau: Cone,
    pub u: usize,
    /// Adapted basis vectors, as elements of `M`.
    pub basis: Vec<IVec>,
    /// Rows of the inverse of the basis matrix: `M -> adapted coordinates`.
    pub to_adapted: Vec<IVec>,
    /// Generators and facet normals of `τ̄` in adapted quotient coordinates.
    pub tau_bar: Vec<IVec>,
    pub tau_bar_normals: Vec<IVec>,
    /// Integer weight, positive on `τ̄ ∖ 0`.
    pub phi: IVec,
    /// An interior point of `τ̄`.
    pub w: IVec,
    /// Relative truncation order for inverses.
    pub order: i64,
}

impl NovikovContext {
    pub fn new(coeff: CoeffRing, tau: &Cone, order: i64) -> Result<Arc<NovikovContext>> {
        let n = tau.n;
        if tau.dim() != n {
            bail!(Domain, "the cone has dimension {} in rank {n}; pass the dual of a nonzero fan cone", tau.dim());
        }
        if order < 1 {
            bail!(Domain, "truncation order must be positive");
        }
        let (ubasis, u) = cospan(tau);
        let q = adapted_coordinates(&ubasis, n)?;
        let proj = |v: &IVec| -> IVec { mat_vec(&q, v)[u..].to_vec() };
        let bar_gens: Vec<IVec> = tau.gens.iter().map(proj).filter(|g| g.iter().any(|&x| x != 0)).collect();
        let bar = Cone::new(n - u, bar_gens)?;
        let wq = basis_inside_cone(&bar)?;
        // rows of W^{-1}, with W the matrix whose columns are `wq`
        let wmat: Vec<IVec> = (0..n - u).map(|i| wq.iter().map(|c| c[i]).collect()).collect();
        let winv = int_inverse(&wmat).expect("unimodular basis");
        let mut to_adapted = q[..u].to_vec();
        for r in &winv {
            to_adapted.push((0..n).map(|j| (0..n - u).map(|k| r[k] * q[u + k][j]).sum()).collect());
        }
        let rows_basis = int_inverse(&to_adapted).expect("unimodular change of basis");
        let basis: Vec<IVec> = (0..n).map(|j| rows_basis.iter().map(|r| r[j]).collect()).collect();
        let tau_bar: Vec<IVec> = tau
            .gens
            .iter()
            .map(|g| primitive(&mat_vec(&to_adapted, g)[u..]))
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        let bar = Cone::new(n - u, tau_bar)?.normalized();
        let normals = bar.facet_normals();
        let phi = primitive(&(0..n - u).map(|i| normals.iter().map(|y| y[i]).sum()).collect::<IVec>());
        let w = (0..n - u).map(|i| bar.gens.iter().map(|g| g[i]).sum()).collect();
        let ctx = NovikovContext { coeff, tau: tau.clone(), u, basis, to_adapted, tau_bar: bar.gens, tau_bar_normals: normals, phi, w, order };
        ctx.check_phi(&ctx.phi)?;
        Ok(Arc::new(ctx))
    }

    fn check_phi(&self, phi: &[i64]) -> Result<()> {
        if phi.len() != self.q() || self.tau_bar.iter().any(|g| dot(phi, g) <= 0) {
            bail!(Domain, "weight {phi:?} is not positive on the quotient cone");
        }
        Ok(())
    }

    /// The same ring with another valid weight.
    pub fn with_phi(&self, phi: IVec) -> Result<Arc<NovikovContext>> {
        self.check_phi(&phi)?;
        Ok(Arc::new(NovikovContext { phi, ..self.clone() }))
    }

    pub fn with_order(&self, order: i64) -> Arc<NovikovContext> {
        Arc::new(NovikovContext { order, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.tau.n
    }

    /// Rank of the quotient lattice.
    pub fn q(&self) -> usize {
        self.n() - self.u
    }

    pub fn coeff_ring(&self) -> LRing {
        LRing::new(self.coeff, self.u)
    }

    pub fn weight(&self, e: &[i64]) -> i64 {
        dot(&self.phi, e)
    }

    pub fn in_tau_bar(&self, e: &[i64]) -> bool {
        self.tau_bar_normals.iter().all(|y| dot(y, e) >= 0)
    }

    /// `(cospan part, quotient part)` of an exponent of `M`.
    pub fn split(&self, e: &[i64]) -> (IVec, IVec) {
        let a = mat_vec(&self.to_adapted, e);
        (a[..self.u].to_vec(), a[self.u..].to_vec())
    }

    /// The least `k ≥ 0` with `e + k w ∈ τ̄`.
    fn lift_steps(&self, e: &[i64]) -> i64 {
        self.tau_bar_normals
            .iter()
            .map(|y| {
                let (a, b) = (dot(y, e), dot(y, &self.w));
                if a >= 0 {
                    0
                } else {
                    (-a + b - 1) / b
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// A point `s` with `a, b ∈ s + τ̄`.
    fn common_base(&self, a: &[i64], b: &[i64]) -> IVec {
        if self.in_tau_bar(&sub(b, a)) {
            return a.to_vec();
        }
        if self.in_tau_bar(&sub(a, b)) {
            return b.to_vec();
        }
        let k = self.lift_steps(&sub(b, a));
        sub(a, &scale(&self.w, k))
    }
}

/// A truncated element of `R⟪τ⟫`: `Σ c_e x^e` over quotient exponents `e`,
/// with `c_e ∈ R[M ∩ U]`. Exact for `φ`-degrees below `valid` (`None`: exact),
/// and the full series is supported in `base + τ̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NovikovSeries {
    pub ctx: Arc<NovikovContext>,
    pub terms: BTreeMap<IVec, Poly>,
    pub valid: Option<i64>,
    pub base: IVec,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn plus(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

impl NovikovSeries {
    pub fn zero(ctx: &Arc<NovikovContext>) -> Self {
        NovikovSeries { ctx: ctx.clone(), terms: BTreeMap::new(), valid: None, base: vec![0; ctx.q()] }
    }

    pub fn one(ctx: &Arc<NovikovContext>) -> Self {
        NovikovSeries::monomial(ctx, &vec![0; ctx.n()], ctx.coeff.one())
    }

    pub fn monomial(ctx: &Arc<NovikovContext>, e: &[i64], c: crate::rings::Scalar) -> Self {
        let (eu, eq) = ctx.split(e);
        let p = Poly::monomial(ctx.coeff_ring(), eu, c);
        let mut s = NovikovSeries { ctx: ctx.clone(), terms: BTreeMap::new(), valid: None, base: eq.clone() };
        if !p.is_zero() {
            s.terms.insert(eq, p);
        }
        s
    }

    /// The image of a Laurent polynomial in `R[M]`.
    pub fn from_poly(ctx: &Arc<NovikovContext>, p: &Poly) -> Result<Self> {
        if p.nvars() != ctx.n() || p.ring().coeff != ctx.coeff {
            bail!(Structural, "polynomial over {} for a Novikov ring over {} in rank {}", p.ring(), ctx.coeff, ctx.n());
        }
        let cr = ctx.coeff_ring();
        let mut terms: BTreeMap<IVec, Poly> = BTreeMap::new();
        for (e, c) in p.terms() {
            let (eu, eq) = ctx.split(e);
            let m = Poly::monomial(cr, eu, c.clone());
            let slot = terms.entry(eq).or_insert_with(|| Poly::zero(cr));
            *slot = &*slot + &m;
        }
        terms.retain(|_, c| !c.is_zero());
        let mut s = NovikovSeries { ctx: ctx.clone(), terms, valid: None, base: vec![0; ctx.q()] };
        s.base = s.tight_base();
        Ok(s)
    }

    /// For an exact series: the least-weight exponent `e` with every term in
    /// `e + τ̄` if there is one, else some common base point.
    fn tight_base(&self) -> IVec {
        let mut keys: Vec<&IVec> = self.terms.keys().collect();
        keys.sort_by_key(|e| (self.ctx.weight(e), (*e).clone()));
        let Some(first) = keys.first() else { return vec![0; self.ctx.q()] };
        if let Some(e) = keys.iter().find(|e| keys.iter().all(|f| self.ctx.in_tau_bar(&sub(f, e)))) {
            return (*e).clone();
        }
        keys.iter().fold((*first).clone(), |b, e| self.ctx.common_base(&b, e))
    }

    pub fn is_exact(&self) -> bool {
        self.valid.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.valid.is_none() && self.terms.is_empty()
    }

    /// The least weight among known terms, or the validity bound if there are none.
    pub fn low(&self) -> Option<i64> {
        self.terms.keys().map(|e| self.ctx.weight(e)).min().or(self.valid)
    }

    fn check_ctx(&self, other: &NovikovSeries) -> Result<()> {
        if self.ctx != other.ctx {
            bail!(Structural, "Novikov series over different contexts");
        }
        Ok(())
    }

    fn truncate(mut self) -> Self {
        if let Some(v) = self.valid {
            let ctx = self.ctx.clone();
            self.terms.retain(|e, c| !c.is_zero() && ctx.weight(e) < v);
        } else {
            self.terms.retain(|_, c| !c.is_zero());
            self.base = self.tight_base();
        }
        self
    }

    pub fn add(&self, other: &NovikovSeries) -> Result<NovikovSeries> {
        self.check_ctx(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(|| Poly::zero(self.ctx.coeff_ring()));
            *slot = &*slot + c;
        }
        let base = self.ctx.common_base(&self.base, &other.base);
        let s = NovikovSeries { ctx: self.ctx.clone(), terms, valid: min_opt(self.valid, other.valid), base };
        Ok(s.truncate())
    }

    pub fn neg(&self) -> NovikovSeries {
        NovikovSeries { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &NovikovSeries) -> Result<NovikovSeries> {
        self.add(&other.neg())
    }

    /// Coefficient of the quotient exponent `e` (zero if absent).
    pub fn coeff(&self, e: &[i64]) -> Poly {
        self.terms.get(e).cloned().unwrap_or_else(|| Poly::zero(self.ctx.coeff_ring()))
    }

    /// `Some((c, e))` when the series is `c x^e (1 - h)` with `c` a unit monomial
    /// coefficient and `h` supported in `τ̄ ∖ 0`, with `c` known exactly.
    pub fn leading_unit(&self) -> Option<(Poly, IVec)> {
        let e = &self.base;
        if let Some(v) = self.valid {
            if self.ctx.weight(e) >= v {
                return None;
            }
        }
        let c = self.terms.get(e)?;
        c.is_monomial_unit()?;
        Some((c.clone(), e.clone()))
    }
}

pub fn nov_mul(f: &NovikovSeries, g: &NovikovSeries) -> Result<NovikovSeries> {
    f.check_ctx(g)?;
    let ctx = &f.ctx;
    if f.is_exact_zero() || g.is_exact_zero() {
        return Ok(NovikovSeries::zero(ctx));
    }
    let valid = min_opt(plus(f.low(), g.valid), plus(f.valid, g.low()));
    let mut terms: BTreeMap<IVec, Poly> = BTreeMap::new();
    for (a, ca) in &f.terms {
        for (b, cb) in &g.terms {
            let e = add(a, b);
            if let Some(v) = valid {
                if ctx.weight(&e) >= v {
                    continue;
                }
            }
            let p = ca * cb;
            let slot = terms.entry(e).or_insert_with(|| Poly::zero(ctx.coeff_ring()));
            *slot = &*slot + &p;
        }
    }
    let s = NovikovSeries { ctx: ctx.clone(), terms, valid, base: add(&f.base, &g.base) };
    Ok(s.truncate())
}

/// An inverse up to relative order `ctx.order`, when the unit test of
/// [`NovikovSeries::leading_unit`] applies.
pub fn nov_invert(f: &NovikovSeries) -> Option<NovikovSeries> {
    let ctx = &f.ctx;
    let (c, e0) = f.leading_unit()?;
    let ci = c.inverse_if_monomial_unit()?;
    let w0 = ctx.weight(&e0);
    let rel = min_opt(Some(ctx.order), f.valid.map(|v| v - w0)).expect("finite order");
    // h = 1 - c^{-1} x^{-e0} f
    let mut h = NovikovSeries { ctx: ctx.clone(), terms: BTreeMap::new(), valid: f.valid.map(|v| v - w0), base: vec![0; ctx.q()] };
    for (e, p) in &f.terms {
        if e == &e0 {
            continue;
        }
        h.terms.insert(sub(e, &e0), -(&ci * p));
    }
    h.valid = Some(rel);
    let h = h.truncate();
    let mut sum = NovikovSeries { valid: Some(rel), ..NovikovSeries::one(ctx) };
    let mut power = sum.clone();
    for _ in 1..rel.max(1) {
        power = nov_mul(&power, &h).ok()?;
        power.valid = Some(rel);
        power = power.truncate();
        if power.terms.is_empty() {
            break;
        }
        sum = sum.add(&power).ok()?;
    }
    let mut out = NovikovSeries { ctx: ctx.clone(), terms: BTreeMap::new(), valid: Some(rel - w0), base: scale(&e0, -1) };
    for (e, p) in &sum.terms {
        out.terms.insert(sub(e, &e0), &ci * p);
    }
    Some(out.truncate())
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&IVec> = self.terms.keys().collect();
        keys.sort_by_key(|e| (self.ctx.weight(e), (*e).clone()));
        let parts: Vec<String> = keys.iter().map(|e| format!("({}) t^{:?}", self.terms[*e], e)).collect();
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        match self.valid {
            Some(v) => write!(f, "{body} + O(deg {v})"),
            None => write!(f, "{body}"),
        }
    }
}
