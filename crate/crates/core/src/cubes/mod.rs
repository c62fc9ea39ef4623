mod diagram;
mod incidence;
mod opcube;
mod special;

pub use diagram::{
    assemble, component, d_squared, filtration, is_cube, totalise, Filtration, Layout, NDiagram, TotalisedComplex,
};
pub use incidence::{
    all_subsets, card, elements, face, from_elements, incidence_by_pairs, is_subset, sign, singleton, subsets_of,
    total_incidence, Subset,
};
pub use special::{
    basis, criterion_sum, derive_cube, derive_cube_unchecked, expand_special, trivial_cube, verify_special,
    windowed_basis, DerivedInput, IdentityCheck, SpecialCube, SpecialReport,
};
pub use opcube::{check_block_chain_map, derived_op_cube, op_matrix, BlockOp, OpComplex, OpCube};
