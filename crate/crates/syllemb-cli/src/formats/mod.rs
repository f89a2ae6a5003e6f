//! Parsers and writers for every file the toolkit reads or produces.

pub mod annotations_tsv;
pub mod container;
pub mod decomp_tsv;
pub mod emb_text;
pub mod embedder_file;
pub mod pairs_tsv;
pub mod splitter_file;
pub mod training_file;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("malformed container: {0}")]
    Container(String),
    #[error(transparent)]
    Corpus(#[from] syllemb::corpus::CorpusError),
    #[error(transparent)]
    Eval(#[from] syllemb::eval::EvalError),
    #[error(transparent)]
    Embedder(#[from] syllemb::embedder::EmbedderError),
    #[error(transparent)]
    Splitter(#[from] syllemb::splitter::SplitterError),
}

impl FormatError {
    pub(crate) fn parse(path: &std::path::Path, line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse { path: path.display().to_string(), line, msg: msg.into() }
    }
}
