//! Exact Bott-Chern, Aeppli, Dolbeault and de Rham cohomology of invariant
//! complex structures on nilmanifolds, and first-order obstructions to
//! extending cohomology classes along deformations.

pub mod scalars;
pub mod exterior;
pub mod linalg;
pub mod structure;
pub mod cohomology;
pub mod deformation;
pub mod report;
pub mod catalog;
