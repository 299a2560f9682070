//! Files in and out: record files, directory trees, `.cxt` contexts, lattice
//! exports and the workspace document.

mod cxt;
mod document;
mod export;
mod ingest;
pub mod records;

pub use cxt::{export_cxt, import_cxt};
pub use document::{WorkspaceDocument, FORMAT_VERSION};
pub use export::lattice_to_dot;
pub use ingest::{ingest_directory, Ingested, TagRule, TagRules, Warning, BUILTIN_SORTS};
pub use records::{parse_records, write_records};
