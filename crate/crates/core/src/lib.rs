//! Internal-state and external models of a two-color strontium MOT.
pub mod atomic;
pub mod config;
pub mod error;
pub mod hybrid;
pub mod lindblad;
pub mod linalg;
pub mod liouvillian;
pub mod mot;
pub mod scenarios;
pub mod table;
pub use error::{Error, Result};
