//! A lossless codec built on bit-pair operators, a 65,536-row translation
//! table and a grid-file artifact, with accounting that reports both the
//! occupant-only size and the size of every channel needed to decode.
//!
//! Modules, bottom-up:
//!
//! - [`pairops`]: the `z`/`n`/`i`/`p` operators and byte factorization.
//! - [`addressing`]: 4D flag addresses and rows for two-byte pairs.
//! - [`transtable`]: the translation table and its text/binary forms.
//! - [`gridfile`]: the `FBGR` and `FBHN` artifact formats.
//! - [`codec`]: compress/decompress in one- and four-table modes.
//! - [`metrics`]: sizes, entropies, manipulation counts and the audit.

pub mod addressing;
pub mod codec;
pub mod error;
pub mod gridfile;
pub mod metrics;
pub mod pairops;
pub mod scalar;
pub mod transtable;

pub use addressing::{FlagAddress, Layout, RowIndex};
pub use codec::{compress, decompress, CompressJob, Tables};
pub use error::{CodecError, FormatError, MetricsError, TtError};
pub use gridfile::{Format, Mode};
pub use metrics::{AuditReport, MetricsReport};
pub use scalar::Scalar;
pub use transtable::{generate_tt, TranslationTable, TtSet4};

/// Default float for reports.
pub type Real = f64;
/// Exact scalar for the entropy/savings ladder.
pub type Exact = num_rational::Ratio<i64>;
