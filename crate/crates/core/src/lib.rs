pub mod appendix;
pub mod census;
mod decimal;
pub mod density;
pub mod error;
pub mod gf;
pub mod intpoly;
pub mod numkit;
pub mod par;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
