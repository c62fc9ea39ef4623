//! Finite-domination pipelines built on the Novikov acyclicity tests.

use std::collections::BTreeMap;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::homalg::FreeComplex;
use crate::rings::{format_scalar, int, CoeffRing, Scalar};
use crate::tori::{compare_specialised, domination_witness, Witness};
use crate::toric::{dual_cone, is_complete_fan, nov_acyclicity_auto, Cone, Fan, NovikovReport, Verdict};

pub use crate::toric::{DEFAULT_ORDER, MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    FinitelyDominatedCertified,
    NotFinitelyDominatedCertified,
    Inconclusive,
}

impl Conclusion {
    /// `0` certified positive, `1` certified negative, `2` inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Conclusion::FinitelyDominatedCertified => 0,
            Conclusion::NotFinitelyDominatedCertified => 1,
            Conclusion::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub cone: Cone,
    pub dual: Cone,
    pub report: NovikovReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindomReport {
    pub nvars: usize,
    pub order: i64,
    pub cones: Vec<ConeVerdict>,
    pub conclusion: Conclusion,
}

impl FindomReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<FindomReport> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug)]
pub struct DominationInput {
    pub d: FreeComplex,
    pub witness: Option<Witness>,
    pub fan: Fan,
    pub order: i64,
}

impl DominationInput {
    pub fn new(d: FreeComplex, fan: Fan) -> Self {
        DominationInput { d, witness: None, fan, order: DEFAULT_ORDER }
    }
}

/// The fan `{0, R≥0, R≤0}` of `Z^1`.
pub fn line_fan() -> Fan {
    Fan::new(1, vec![vec![], vec![vec![1]], vec![vec![-1]]]).expect("fan")
}

/// Runs the Novikov tests for the duals of the given cones concurrently.
pub fn cone_verdicts(d: &FreeComplex, cones: &[Cone], order: i64) -> Result<Vec<ConeVerdict>> {
    let results: Vec<Result<ConeVerdict>> = thread::scope(|s| {
        let handles: Vec<_> = cones
            .iter()
            .map(|sigma| {
                s.spawn(move || {
                    let dual = dual_cone(sigma)?;
                    let report = nov_acyclicity_auto(d, &dual, order)?;
                    Ok(ConeVerdict { cone: sigma.clone(), dual, report })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("cone test panicked")).collect()
    });
    results.into_iter().collect()
}

fn conclude(cones: &[ConeVerdict]) -> Conclusion {
    if cones.iter().any(|c| c.report.verdict.is_nonacyclic()) {
        Conclusion::NotFinitelyDominatedCertified
    } else if cones.iter().all(|c| c.report.verdict.is_acyclic()) {
        Conclusion::FinitelyDominatedCertified
    } else {
        Conclusion::Inconclusive
    }
}

/// The fan criterion: `D` is finitely dominated over `R` iff
/// `D ⊗ R⟪σ^∨⟫` is acyclic for every nonzero cone `σ` of a complete fan.
pub fn toric_findom_test(input: &DominationInput) -> Result<FindomReport> {
    let n = input.d.ring().nvars;
    if input.fan.n != n {
        bail!(Structural, "fan in rank {} for a complex in {n} variables", input.fan.n);
    }
    let rep = is_complete_fan(&input.fan)?;
    if !rep.complete {
        bail!(Precondition, "the fan is not complete: {}", serde_json::to_string(&rep)?);
    }
    let cones: Vec<Cone> = input.fan.nonzero_cones().cloned().collect();
    let cones = cone_verdicts(&input.d, &cones, input.order)?;
    let conclusion = conclude(&cones);
    Ok(FindomReport { nvars: n, order: input.order, cones, conclusion })
}

/// Tests `D ⊗ R⟪x⟫` and `D ⊗ R⟪x^{-1}⟫` for a complex over `R[x^±]`.
pub fn ranicki_test(d: &FreeComplex, order: i64) -> Result<FindomReport> {
    if d.ring().nvars != 1 {
        bail!(Structural, "the one-variable test needs a complex over R[x^±], got {} variables", d.ring().nvars);
    }
    toric_findom_test(&DominationInput { d: d.clone(), witness: None, fan: line_fan(), order })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceWitness {
    /// Indices of the variables spanning the coordinate subspace.
    pub vars: Vec<usize>,
    /// Ranks of the finite free complex over `R[x_k^± : k ∈ vars]`.
    pub ranks: BTreeMap<i64, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsequenceReport {
    pub witness: String,
    pub hypotheses_exact: bool,
    /// Points at which the witness torus and `Σ^n D` were compared.
    pub points: Vec<Vec<String>>,
    /// The first point where their cohomology differs.
    pub mismatch: Option<Vec<String>>,
    pub first_orthant: NovikovReport,
    pub fan_cones: Vec<ConeVerdict>,
    pub subspaces: Vec<SubspaceWitness>,
    pub passed: bool,
}

fn spot_points(coeff: CoeffRing, n: usize) -> Vec<Vec<Scalar>> {
    let k = coeff.specialization_target();
    let vals: Vec<Scalar> = [2, -1, 3, -2]
        .into_iter()
        .map(int)
        .chain([Scalar::new(1.into(), 2.into()), Scalar::new((-3).into(), 5.into())])
        .filter_map(|v| k.normalize(v).ok().filter(|v| k.is_unit(v)))
        .collect();
    (0..vals.len()).map(|i| (0..n).map(|k| vals[(i + 2 * k) % vals.len()].clone()).collect()).collect()
}

/// Checks what a domination witness `(C, α, β, G)` implies: the witness torus
/// matches `Σ^n D` at sample points, `D` is acyclic over the first-orthant
/// Novikov ring and over `R⟪σ^∨⟫` for every cone of the fan, and the tori for
/// the given coordinate subspaces are finite free complexes.
pub fn verify_findom_consequences(input: &DominationInput, subspaces: &[Vec<usize>]) -> Result<ConsequenceReport> {
    let Some(w) = &input.witness else { bail!(Precondition, "no domination witness supplied") };
    let n = w.nvars();
    if input.d != w.d {
        bail!(Precondition, "the witness is for a different complex");
    }
    let all: Vec<usize> = (0..n).collect();
    let dw = domination_witness(w, &all, 2)?;
    let points = spot_points(input.d.ring().coeff, n);
    let mismatch = compare_specialised(w, &dw, &points)?;
    let orthant = Cone::new(n, (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())?;
    let first_orthant = nov_acyclicity_auto(&input.d, &orthant, input.order)?;
    let fan_cones = if input.fan.n == n { cone_verdicts(&input.d, &input.fan.nonzero_cones().cloned().collect::<Vec<_>>(), input.order)? } else { vec![] };
    let mut subs = vec![];
    for vars in subspaces {
        let sw = domination_witness(w, vars, -1)?;
        subs.push(SubspaceWitness { vars: vars.clone(), ranks: sw.torus.complex().ranks().clone() });
    }
    let passed = mismatch.is_none() && first_orthant.verdict.is_acyclic() && fan_cones.iter().all(|c| c.report.verdict.is_acyclic());
    Ok(ConsequenceReport {
        witness: w.name.clone(),
        hypotheses_exact: dw.hypotheses.exact,
        points: points.iter().map(|p| p.iter().map(format_scalar).collect()).collect(),
        mismatch,
        first_orthant,
        fan_cones,
        subspaces: subs,
        passed,
    })
}

/// A compact human-readable line per cone.
pub fn summary(rep: &FindomReport) -> String {
    let mut out = String::new();
    for c in &rep.cones {
        let extra = match &c.report.verdict {
            Verdict::NonacyclicCertified { witness } => format!(" ({} witness, degree {})", witness.method, witness.degree),
            Verdict::Inconclusive { order, .. } => format!(" (order {order})"),
            Verdict::AcyclicCertified { pivots } => format!(" ({} pivots)", pivots.len()),
        };
        out.push_str(&format!("cone {:?}: {}{}\n", c.cone.gens, c.report.verdict.name(), extra));
    }
    out.push_str(&format!("{:?}\n", rep.conclusion));
    out
}
