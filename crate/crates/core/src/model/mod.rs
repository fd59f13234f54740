//! Domain types: categorical datasets, network structures, CPTs, and the
//! on-disk formats for both.

pub(crate) mod csv;
mod dataset;
mod dbn;
mod family;
mod format;

pub use self::csv::{parse_dataset, parse_domains, write_dataset, write_domains};
pub use dataset::{AttributeSpec, CellRef, Dataset, Subject, Value, MAX_CARDINALITY};
pub use dbn::{joint_log_probability, Cpt, Dbn, DbnParameters, DbnStructure, ROW_SUM_TOLERANCE};
pub use family::{Family, FamilyIndexer, FamilyKind, FamilyShape, Lag, ParentRef};
pub use format::{parse_dbn, write_dbn};
