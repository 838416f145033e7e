//! Rectangular matrix multiplication over a prime field by recursion on a
//! 2×3×2 structured product with five multiplications per level.

pub mod algorithms;
pub mod field;
pub mod identity;
pub mod structured;
pub mod vandermonde;

pub use algorithms::{Coppersmith, TensoredOutcome};
pub use field::{FieldMatrix, Fp, TruncatedPoly, F31, MERSENNE31};
pub use identity::{check_base_identity, IdentityReport};
pub use structured::{
    extraction_degree, structured_multiply, truncation_bound, OpCounts, Side, StructuredFieldMatrix,
};
