use thiserror::Error;

use crate::complex::Simplex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex {0} in simplex")]
    DuplicateVertex(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("subcomplex is not full: {0} has all vertices inside but is missing")]
    NotFull(String),
    #[error("not orientable; inconsistent walk through {} top simplices", .0.len())]
    NonOrientable(Vec<Simplex>),
    #[error("triangulation is not in the lineage of the chain's triangulation")]
    NotInLineage,
    #[error("map is not an isomorphism: {0}")]
    NotIsomorphism(String),
    #[error("not a cycle of the pair in degree {0}")]
    NotACycle(usize),
    #[error("integer overflow in sparse elimination")]
    Overflow,
    #[error("dimension precondition violated: {0}")]
    Dimension(String),
    #[error("general position fails: {0}")]
    GeneralPosition(String),
    #[error("chain is not allowable: {0}")]
    NotAllowable(String),
    #[error("precondition: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
