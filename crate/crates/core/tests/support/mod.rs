pub mod composition;
pub mod dense;
