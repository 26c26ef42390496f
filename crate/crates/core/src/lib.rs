pub mod boundary;
pub mod cayley;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod graded;
pub mod kasparov;
pub mod models;
pub mod numkit;
pub mod pairing;
pub mod vandaele;

pub use error::{Error, Result};
pub use numkit::{Matrix, ToleranceProfile};
