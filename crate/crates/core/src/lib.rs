pub mod cubes;
pub mod error;
pub mod findom;
pub mod gen;
pub mod homalg;
pub mod io;
pub mod multicomplex;
pub mod rings;
pub mod tori;
pub mod toric;

pub use error::{Error, Result};
