mod cohomology;
mod complex;
mod field;
mod graded;
mod matrix;
mod op;
mod snf;

pub use cohomology::{
    cohomology, is_acyclic, is_quasi_iso, spot_check_acyclic, spot_check_quasi_iso, CohomologyReport,
    DegreeCohomology, SpotCheck,
};
pub use complex::{check_map_dims, cochain_defect, identity_map, is_cochain_map, mapping_cone, FreeComplex};
pub use graded::GradedMap;
pub use matrix::{svec_add, svec_add_assign, svec_neg, svec_scale, Matrix, SVec};
pub use snf::{invariant_factors, rank, smith_normal_form, solve, Snf, Solver};
pub use op::{LinearOp, Op, Prim, SemiMatrix};
pub use field::{field_nullspace, field_rank};
