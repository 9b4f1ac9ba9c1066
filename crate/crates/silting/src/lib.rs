//! Exact computation of silting presentations from simple-minded collections.
//!
//! Starting from a finite-dimensional quiver algebra with relations and a
//! collection of bounded complexes of representations, this crate computes the
//! minimal A-infinity structure on the graded endomorphism algebra of the
//! collection (by homotopy transfer over an exact contraction), feeds it
//! through the dual bar construction, and extracts a quiver-with-relations
//! presentation of the endomorphism algebra of the associated silting object.
//!
//! All arithmetic is exact: rationals with big integers, or a prime field
//! chosen at session start. Every stage is deterministic, so equal inputs
//! produce byte-identical outputs.
//!
//! The crate is organised along the pipeline:
//!
//! * [`exactla`] — sparse linear algebra over an exact field: reduced row
//!   echelon forms, kernels, cohomology of complexes together with explicit
//!   contraction data (inclusion, projection, homotopy).
//! * [`graded`] — graded bimodules over a product of copies of the base
//!   field, tensor products, shifts, duals, and the Koszul sign rule.
//! * [`ainf`] — A-infinity algebras, modules, morphisms and homotopies with
//!   exact checkers for the defining identities, plus the cocycle-to-morphism
//!   machinery for morphisms out of idempotent summands.
//! * [`quivalg`] — quiver algebras with relations, representations, bounded
//!   complexes, minimal projective resolutions, Hom complexes, derived Hom
//!   tables, and the simple-minded-collection / silting axiom checks.
//! * [`transfer`] — homotopy transfer of dg (endomorphism) algebras and
//!   modules onto their cohomology; the Ext-algebra pipeline.
//! * [`koszul`] — the dual bar construction, extraction of the degree-zero
//!   quiver presentation, non-positive truncation, and Koszulity evidence.
//! * [`input`] / [`cli`] — the JSON input document, command implementations
//!   and machine-readable reports.
//! * [`identities`] — the seeded randomized identity suite run by the
//!   `identities` subcommand.

pub mod ainf;
pub mod cli;
pub mod error;
pub mod exactla;
pub mod fixtures;
pub mod graded;
pub mod identities;
pub mod input;
pub mod koszul;
pub mod quivalg;
pub mod transfer;

pub use error::Error;
