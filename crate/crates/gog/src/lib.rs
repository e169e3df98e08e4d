//! Splittings of groups over free, abelian and surface vertex classes:
//! graphs of groups with their moves and Dehn twists, exact normal-form
//! word problems, covering-tree probes, normalization into the canonical
//! bipartite form, and an isomorphism decision pipeline that only ever
//! reports a positive answer together with an independently re-verified
//! witness map.
//!
//! The [`guide`] module mirrors the book chapters; start there for a
//! narrative tour, or at [`graph::GraphOfGroups`] for the data structure.

pub mod builders;
pub mod corpus;
pub mod error;
pub mod format;
pub mod free;
pub mod graph;
pub mod group;
pub mod iso;
pub mod jsj;
pub mod lattice;
pub mod matrix;
pub mod bass_serre;
pub mod config;
pub mod moves;
pub mod oracle;
pub mod out_gens;
pub mod predicates;
pub mod presentation;
pub mod stallings;
pub mod surface;
pub mod word;
pub mod word_problem;

pub use error::GogError;
pub use graph::{Edge, EdgeId, GraphOfGroups, VertexId};
pub use group::{GroupClass, GroupHandle, Tri};
pub use lattice::Lattice;
pub use presentation::{GroupMap, MapStatus, Presentation};
pub use surface::SurfaceSig;
pub use word::{Sym, Word};
