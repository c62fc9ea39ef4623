mod acyclicity;
mod cone;
mod fan;
pub mod lattice;
mod novikov;

pub use acyclicity::{
    nov_acyclicity, nov_acyclicity_auto, nov_acyclicity_in, NonacyclicWitness, NovikovReport, PivotRecord, Verdict,
    DEFAULT_ORDER, MAX_ORDER,
};
pub use cone::{basis_inside_cone, cospan, dual_cone, Cone};
pub use lattice::IVec;
pub use fan::{is_complete_fan, Fan, FanReport};
pub use novikov::{nov_invert, nov_mul, NovikovContext, NovikovSeries};
