//! Exact min-plus algebra: products with witnesses, Floyd–Warshall,
//! APSP by repeated squaring and path reconstruction.
//!
//! Everything here is deterministic and exact; it serves as the reference
//! against which the randomized product is checked.

mod apsp;
mod matrix;
mod product;
mod weight;

pub use apsp::{apsp_by_squaring, floyd_warshall, path_weight, reconstruct_path, validate_graph_matrix, ApspResult};
pub use matrix::{SuccessorMatrix, WeightMatrix, WitnessMatrix};
pub use product::{minplus_product_naive, MinPlusProduct, NaiveProduct, Product, ProductStats};
pub use weight::{Weight, MAX_INPUT, OVERFLOW_BOUND};
