//! Formal concept analysis over file metadata.
//!
//! Raw metadata lives in a [`ManyValuedContext`]; [`scaling`] turns it into a
//! binary [`FormalContext`]; [`lattice`] enumerates and orders its concepts.
//! Descriptive-name queries ([`query`]) select objects directly, views over
//! them form conceptual knowledge systems ([`cks`]), systems can share their
//! organization ([`sharing`]), and [`navigation`] implements neighborhood
//! browsing. [`workspace`] ties everything to files.

pub mod bitset;
pub mod error;
pub mod context;
pub mod scaling;
pub mod lattice;
pub mod query;
pub mod cks;
pub mod sharing;
pub mod navigation;
pub mod fixtures;
pub mod workspace;

pub use cks::{ConceptualKnowledgeSystem, ValidationReport, View, ViewSpec};
pub use bitset::{BitMatrix, BitSet};
pub use context::{AttributeValue, FormalConcept, FormalContext, IndexRelation, ManyValuedContext, ValueKind};
pub use error::{Error, ParseError, Result};
pub use lattice::{enumerate_concepts, purify, reduce, ConceptLattice};
pub use navigation::{init_session, BrowseSession, Filters, Neighborhood, Seed};
pub use query::{evaluate, parse, DescriptiveName};
pub use sharing::{compose, ClassRef, SharedSpace, SharingLink};
pub use workspace::WorkspaceDocument;
pub use scaling::{scale, scale_facets, ScaleKind, ScalePlan};
