use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::complex::{check_map_dims, cochain_defect, mapping_cone_unchecked, FreeComplex};
use super::graded::GradedMap;
use super::snf::invariant_factors;
use crate::error::{bail, Result};
use crate::rings::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCohomology {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl DegreeCohomology {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub degrees: BTreeMap<i64, DegreeCohomology>,
}

impl CohomologyReport {
    pub fn is_acyclic(&self) -> bool {
        self.degrees.values().all(|h| h.is_zero())
    }

    pub fn free_rank(&self, l: i64) -> usize {
        self.degrees.get(&l).map_or(0, |h| h.free_rank)
    }

    pub fn torsion(&self, l: i64) -> &[BigInt] {
        self.degrees.get(&l).map_or(&[], |h| &h.torsion)
    }
}

/// Cohomology over a PID via Smith forms of the differentials.
pub fn cohomology(c: &FreeComplex) -> Result<CohomologyReport> {
    if c.ring().nvars != 0 {
        bail!(Unsupported, "cohomology over the Laurent ring {}", c.ring());
    }
    c.ring().coeff.require_pid()?;
    let Some((lo, hi)) = c.bounds() else { return Ok(CohomologyReport::default()) };
    let mut factors: BTreeMap<i64, Vec<Scalar>> = BTreeMap::new();
    for l in lo - 1..=hi {
        factors.insert(l, invariant_factors(&c.differential(l))?);
    }
    let mut out = CohomologyReport::default();
    for l in lo..=hi {
        let r_out = factors[&l].len();
        let r_in = &factors[&(l - 1)];
        let torsion = r_in
            .iter()
            .map(|s| s.numer().clone())
            .filter(|s| !s.is_one() && c.ring().coeff == crate::rings::CoeffRing::Integers)
            .collect();
        out.degrees.insert(l, DegreeCohomology { free_rank: c.rank(l) - r_out - r_in.len(), torsion });
    }
    Ok(out)
}

pub fn is_acyclic(c: &FreeComplex) -> Result<bool> {
    Ok(cohomology(c)?.is_acyclic())
}

/// Quasi-isomorphism test over a PID: the mapping cone is acyclic.
pub fn is_quasi_iso(f: &GradedMap, x: &FreeComplex, y: &FreeComplex) -> Result<bool> {
    let cone = super::complex::mapping_cone(f, x, y)?;
    is_acyclic(&cone)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpotCheck {
    NotFalsified { points: usize },
    Falsified { point: Vec<String> },
}

impl SpotCheck {
    pub fn passed(&self) -> bool {
        matches!(self, SpotCheck::NotFalsified { .. })
    }
}

/// Acyclicity of a Laurent-ring complex after each specialisation.
pub fn spot_check_acyclic(c: &FreeComplex, points: &[Vec<Scalar>]) -> Result<SpotCheck> {
    if points.is_empty() {
        bail!(Unsupported, "spot check needs at least one specialisation point");
    }
    for p in points {
        if !is_acyclic(&c.specialize(p)?)? {
            return Ok(SpotCheck::Falsified { point: p.iter().map(crate::rings::format_scalar).collect() });
        }
    }
    Ok(SpotCheck::NotFalsified { points: points.len() })
}

/// Spot-check mode: the cone stays acyclic after every specialisation.
pub fn spot_check_quasi_iso(f: &GradedMap, x: &FreeComplex, y: &FreeComplex, points: &[Vec<Scalar>]) -> Result<SpotCheck> {
    check_map_dims(f, x, y)?;
    if !cochain_defect(f, x, y).is_zero() {
        bail!(Contract, "not a cochain map");
    }
    spot_check_acyclic(&mapping_cone_unchecked(f, x, y), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::{identity_map, mapping_cone, Matrix};
    use crate::rings::{CoeffRing, LRing};

    fn z() -> LRing {
        LRing::new(CoeffRing::Integers, 0)
    }

    #[test]
    fn multiplication_by_two() {
        let c = FreeComplex::two_term(0, Matrix::from_ints(z(), &[vec![2]])).unwrap();
        let h = cohomology(&c).unwrap();
        assert!(h.degrees[&0].is_zero());
        assert_eq!(h.free_rank(1), 0);
        assert_eq!(h.torsion(1), &[BigInt::from(2)]);
    }

    #[test]
    fn cone_of_two() {
        let x = FreeComplex::concentrated(z(), 0, 1);
        let f = GradedMap::from_blocks(z(), 0, [(0, Matrix::from_ints(z(), &[vec![2]]))]);
        let h = cohomology(&mapping_cone(&f, &x, &x).unwrap()).unwrap();
        assert_eq!(h.torsion(1), &[BigInt::from(2)]);
        assert!(!is_quasi_iso(&f, &x, &x).unwrap());
        assert!(is_quasi_iso(&identity_map(&x), &x, &x).unwrap());
    }

    #[test]
    fn zero_differential() {
        let c = FreeComplex::concentrated(z(), 3, 4);
        assert_eq!(cohomology(&c).unwrap().free_rank(3), 4);
        let zero = GradedMap::zero(z(), 0);
        assert!(!is_quasi_iso(&zero, &c, &c).unwrap());
    }

    #[test]
    fn laurent_spot_check() {
        let r = LRing::new(CoeffRing::Integers, 1);
        let c = FreeComplex::two_term(0, Matrix::from_polys(r, 1, 1, vec![vec![r.parse("x - 1").unwrap()]])).unwrap();
        let good: Vec<Vec<Scalar>> = (2..6).map(|k| vec![crate::rings::int(k)]).collect();
        assert!(spot_check_acyclic(&c, &good).unwrap().passed());
        assert!(!spot_check_acyclic(&c, &[vec![crate::rings::int(1)]]).unwrap().passed());
    }
}
