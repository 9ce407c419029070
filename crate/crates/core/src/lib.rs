pub mod cyclotomic;
pub mod cyclounits;
pub mod error;
pub mod galois;
pub mod hallittlewood;
pub mod linalg;
pub mod numeric;
pub mod qseries;
pub mod rational;
pub mod siegel;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
