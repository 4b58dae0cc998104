pub mod assembly;
pub mod bases;
pub mod cli;
pub mod critical;
pub mod diagnostics;
pub mod eigensolve;
pub mod error;
pub mod oracle;
pub mod physics;

pub use error::{Error, Result};
