mod coeff;
mod laurent;

pub use coeff::{format_scalar, int, is_prime, CoeffRing, Scalar};
pub use laurent::{Exponent, LRing, Poly};
pub use laurent::pow_scalar;
