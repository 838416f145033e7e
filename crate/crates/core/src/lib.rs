//! Min-plus matrix products through polynomial approximation over F2.

pub mod apps;
pub mod circuits;
pub mod coppersmith;
pub mod error;
pub mod f2;
pub mod fast;
pub mod fredman;
pub mod minplus;
pub mod rs_poly;

pub use error::{Error, Result};
