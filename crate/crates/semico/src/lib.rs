pub mod carriers;
pub mod cyclic;
pub mod cohomology;
pub mod error;
pub mod extensions;
pub mod io;
pub mod monoids;
pub mod semimodules;

pub use error::{Error, Result};
