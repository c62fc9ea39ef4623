use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::multi::{step, tot_over, MultiComplex, Pos, SumTot};
use crate::error::{bail, Result};
use crate::homalg::{is_acyclic, svec_add, svec_neg, SVec, Solver};

/// `a` is in the window iff `min a_i ≥ k0` and `|a| ≤ bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationWindow {
    pub n: usize,
    pub k0: i64,
    pub bound: i64,
}

impl TruncationWindow {
    pub fn contains(&self, a: &[i64]) -> bool {
        a.len() == self.n && a.iter().all(|&x| x >= self.k0) && a.iter().sum::<i64>() <= self.bound
    }

    /// Window positions, sorted by `|a|` and then lexicographically.
    pub fn positions(&self) -> Vec<Vec<i64>> {
        let top = self.bound - (self.n as i64 - 1) * self.k0;
        let mut out = vec![vec![]];
        for _ in 0..self.n {
            out = out
                .into_iter()
                .flat_map(|a: Vec<i64>| (self.k0..=top).map(move |x| [a.clone(), vec![x]].concat()))
                .filter(|a| a.iter().sum::<i64>() + (self.n - a.len()) as i64 * self.k0 <= self.bound)
                .collect();
        }
        if self.n == 0 {
            return out;
        }
        out.sort_by_key(|a| (a.iter().sum::<i64>(), a.clone()));
        out
    }
}

/// The truncated product totalisation restricted to a window.
#[derive(Clone, Debug)]
pub struct TrTot {
    pub window: TruncationWindow,
    pub tot: SumTot,
    /// `(direction, position)` of differentials leaving the window.
    pub outflow: Vec<(usize, Pos)>,
}

pub fn tr_tot(e: &MultiComplex, w: &TruncationWindow) -> Result<TrTot> {
    if e.dirs != w.n + 1 {
        bail!(Structural, "window for n = {} on a {}-complex", w.n, e.dirs);
    }
    let (tot, mut outflow) = tot_over(e, |b| w.contains(&b[..w.n]));
    outflow.sort();
    Ok(TrTot { window: *w, tot, outflow })
}

/// A cochain of total degree `degree` with component `c[a] ∈ E^{(a, degree - |a|)}`.
pub type WindowCochain = BTreeMap<Vec<i64>, SVec>;

fn fiber(a: &[i64], degree: i64) -> Pos {
    [a.to_vec(), vec![degree - a.iter().sum::<i64>()]].concat()
}

/// `(d c)_a` for the window positions `a`, from components at window positions.
pub fn window_differential(e: &MultiComplex, w: &TruncationWindow, degree: i64, c: &WindowCochain) -> WindowCochain {
    let n = w.n;
    let mut out = WindowCochain::new();
    for a in w.positions() {
        let mut acc = SVec::new();
        if let Some(v) = c.get(&a) {
            acc = svec_add(&acc, &e.d_at(n, &fiber(&a, degree)).apply(v));
        }
        for j in 0..n {
            let prev = step(&a, j, -1);
            if !w.contains(&prev) {
                continue;
            }
            if let Some(v) = c.get(&prev) {
                acc = svec_add(&acc, &e.d_at(j, &fiber(&prev, degree)).apply(v));
            }
        }
        if !acc.is_empty() {
            out.insert(a, acc);
        }
    }
    out
}

/// Some `b` of degree `degree - 1` with `d b = c` on the window, built by
/// induction on `|a|` from the hook bound.
pub fn contract_cocycle(e: &MultiComplex, w: &TruncationWindow, degree: i64, c: &WindowCochain) -> Result<WindowCochain> {
    let n = w.n;
    if e.dirs != n + 1 {
        bail!(Structural, "window for n = {n} on a {}-complex", e.dirs);
    }
    if let Some(a) = c.keys().find(|a| !w.contains(a)) {
        bail!(Precondition, "cochain has a component at {a:?} outside the window");
    }
    let positions = w.positions();
    for a in &positions {
        if !is_acyclic(&e.column(a))? {
            bail!(Precondition, "the column at {a:?} is not exact");
        }
    }
    if !window_differential(e, w, degree, c).is_empty() {
        bail!(Precondition, "not a cocycle on the window");
    }
    let mut b = WindowCochain::new();
    for a in &positions {
        let mut rhs = c.get(a).cloned().unwrap_or_default();
        for j in 0..n {
            let prev = step(a, j, -1);
            if let Some(v) = b.get(&prev) {
                rhs = svec_add(&rhs, &svec_neg(&e.d_at(j, &fiber(&prev, degree - 1)).apply(v)));
            }
        }
        if rhs.is_empty() {
            continue;
        }
        let m = e.d_at(n, &fiber(a, degree - 1));
        let Some(x) = Solver::new(&m)?.solve(&rhs) else {
            bail!(Internal, "no preimage at {a:?} although the column is exact");
        };
        if !x.is_empty() {
            b.insert(a.clone(), x);
        }
    }
    if window_differential(e, w, degree - 1, &b) != *c {
        bail!(Internal, "d(b) differs from c on the window");
    }
    Ok(b)
}
