use crate::cubes::{verify_special, OpCube, SpecialCube, TotalisedComplex};
use crate::error::{bail, Result};
use crate::homalg::FreeComplex;

/// A special cube over `R`, its extension over `L = R[x_1^±, ..., x_n^±]`
/// and the totalisation `𝒯F`.
#[derive(Clone, Debug)]
pub struct TorusData {
    pub base: SpecialCube,
    pub extended: SpecialCube,
    pub totalisation: TotalisedComplex,
}

impl TorusData {
    pub fn complex(&self) -> &FreeComplex {
        &self.totalisation.complex
    }
}

/// The mapping `n`-torus. Torus variables are appended after the variables
/// of the base ring.
pub fn mapping_torus(s: &SpecialCube) -> Result<TorusData> {
    if let Some(bad) = verify_special(s).first_failure {
        bail!(Contract, "not a special cube: criterion fails at S = {bad}");
    }
    let extended = OpCube::from_special(s).torus()?.to_special()?;
    if let Some(bad) = verify_special(&extended).first_failure {
        bail!(Internal, "extended data is not a special cube at S = {bad}");
    }
    let totalisation = extended.totalise()?;
    Ok(TorusData { base: s.clone(), extended, totalisation })
}
