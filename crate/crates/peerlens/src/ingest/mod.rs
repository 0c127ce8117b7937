//! Parsers for the three input sources, snapshot assembly, the on-disk
//! snapshot cache, and a synthetic snapshot generator.
//!
//! Ingest is deliberately forgiving at the record level (a malformed line
//! or a duplicate ASN is reported and skipped) and strict at the dataset
//! level (an empty table or an empty source intersection is an error).

pub mod as_rank;
pub mod as_rel;
pub mod cache;
pub mod peeringdb;
pub mod snapshot;
pub mod synth;

mod json;
mod table;

pub use as_rank::parse_as_rank;
pub use as_rel::{parse_as_rel, ParsedRelationships, RejectedLine};
pub use cache::{load_snapshot, pops_from_csv, pops_to_csv, save_snapshot};
pub use peeringdb::parse_peeringdb;
pub use snapshot::{build_snapshot, Snapshot, SnapshotBuild, SnapshotCounts};
pub use synth::{back_date, synth_snapshot, SynthParams};
pub use table::{SourceRecord, SourceTable, TableWarning};
