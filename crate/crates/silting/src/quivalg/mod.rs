//! Finite-dimensional quiver algebras with relations: representations,
//! bounded complexes, projective resolutions, Hom complexes, derived Hom
//! tables, and the simple-minded-collection and silting axiom checks.

mod homs;
mod iso;
mod presentation;
mod rep;
mod resolve;

pub use homs::{
    dg_end_algebra, derived_hom_table, hom_complex, hom_table_from_resolution,
    nakayama_on_projectives, silting_check, smc_hom_check, EndBasis, HomBasisEntry,
    HomComplexData, HomTable, RawGen, SmcReport,
};
pub use iso::{presentations_isomorphic, IsoOutcome};
pub use presentation::{
    path_basis, AlgebraPresentation, Arrow, Path, PathAlgebra, PathTerm, Relation,
};
pub use rep::{
    injective_rep, projective_rep, ComplexOfReps, RepMorphism, Representation,
};
pub use resolve::{
    expand_proj, resolve_complex, resolve_module, PathMatrix, ProjComplex, ResolvedComplex,
    TermExpansion,
};
