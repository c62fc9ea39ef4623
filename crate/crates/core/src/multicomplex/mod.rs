mod multi;
mod realize;
mod truncated;

pub use multi::{from_trivial_cube, partial_tot_2complex, step, subsets_of_size, tot_sum, MultiComplex, Pos, SumTot};
pub use realize::{box_positions, check_torus_by_tot, realize_l, torus_coefficient, Realization};
pub use truncated::{contract_cocycle, tr_tot, window_differential, TrTot, TruncationWindow, WindowCochain};
