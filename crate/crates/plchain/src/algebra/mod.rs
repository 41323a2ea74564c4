//! Exact chain and cochain algebra over the integers.

pub mod chains;
pub mod groups;
pub mod homology;
pub mod matrix;

pub use chains::{boundary_matrix, cap_product, cup_product, IntChain, IntCochain};
pub use groups::{
    coboundary_map, cohomology_of, cohomology_of_pair, connecting_map, homology_of, homology_of_pair,
    induced_by_chain_map, induced_by_cochain_map, inclusion_map, GroupMap, GroupPresentation, Kind, Pair,
};
pub use matrix::{smith_normal_form, solve_dense, solve_sparse, Matrix, Snf, SparseMatrix};
