//! On-disk formats and report emission for the syllemb toolkit: TSV corpora,
//! embedding text files, the binary model/training-set containers, JSON and
//! TSV reports, and run manifests. The `syllemb` binary wires these around
//! the core library.

pub mod formats;
pub mod report;

pub use formats::FormatError;
