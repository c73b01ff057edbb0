//! Combinatorial models of real trigonal curves: dessins on bordered
//! surfaces, type-I region labellings, dotted skeletons, elementary moves,
//! and the disk-base chord-diagram classification.
//!
//! The crate is organized bottom-up:
//!  - [`surface`]: graphs embedded in compact orientable surfaces with
//!    boundary, encoded by regions (genus + dart walks);
//!  - [`dessin`]: three-colored decorated graphs and their axioms, pillars
//!    and real schemes;
//!  - [`typing`]: region labellings in {1,2,3} certifying type I, with a
//!    small constraint solver and structural consequence checks;
//!  - [`skeleton`]: partially directed reduced graphs, admissible
//!    orientations, triggers/diodes, extraction and extension;
//!  - [`moves`]: the rewriting system on dessins and skeletons, plus
//!    bounded equivalence search;
//!  - [`weak`]: zigzag creation/straightening and normalization toward
//!    unramified dessins;
//!  - [`rational`]: disk-base chord diagrams, canonical forms, blocks,
//!    junctions and class enumeration;
//!  - [`io`]/[`dot`]: text formats and DOT export;
//!  - [`gen`]: seeded instance generators used by tests and the CLI.

pub mod ids;
pub mod report;
pub mod surface;

pub mod dessin;
pub mod typing;

pub mod skeleton;

pub mod moves;
pub mod weak;

pub mod rational;

pub mod io;
pub mod dot;
pub mod gen;

pub use ids::{BoundaryId, DartId, EdgeId, RegionId, VertexId};
pub use report::{ValidationReport, Violation};
pub use surface::{EmbeddedGraph, Locus};
