//! Exact integer engine for PL chains on stratified pseudomanifolds: homology,
//! intersection homology, duality maps and the chain-level intersection product.

pub mod algebra;
pub mod complex;
pub mod corpus;
pub mod duality;
pub mod error;
pub mod intersection;
pub mod pl_chains;
pub mod product;
pub mod stratified;

pub use error::{Error, Result};
