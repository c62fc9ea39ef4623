mod koszul;
mod mather;
mod torus;
mod witness;

pub use koszul::{build_psi, koszul, koszul_slice, PsiMap};
pub use mather::{mather_j, mather_k, mather_l, mather_m, MatherKind, MatherMap};
pub use torus::{mapping_torus, TorusData};
pub use witness::{compare_specialised, domination_witness, DominationWitness, Witness};
