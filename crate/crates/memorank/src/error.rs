//! Crate-wide error type with exit-code mapping for the CLI.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("unknown gender value {value:?} in row {row}")]
    UnknownGender { row: usize, value: String },

    #[error("candidate pool is empty")]
    EmptyPool,

    #[error("posting count {n} is smaller than the number of professions {professions}")]
    PostingCountTooSmall { n: usize, professions: usize },

    #[error("{postings} postings cannot cover {recruiters} recruiters with at least one each")]
    TooFewPostings { postings: usize, recruiters: usize },

    #[error("profession {profession:?} has {available} test candidates, need at least {needed}")]
    InsufficientCandidates {
        profession: String,
        available: usize,
        needed: usize,
    },

    #[error("profession {0:?} is missing from the profession statistics")]
    UnknownProfession(String),

    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cosine similarity is undefined for a zero-norm vector")]
    ZeroNormVector,

    #[error("cannot embed empty text")]
    EmptyText,

    #[error("non-finite value in embedding vector")]
    NonFiniteEmbedding,

    #[error("batch item {index} failed: {source}")]
    BatchItem {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no cached embedding for key {0} (cache-only provider)")]
    CacheMiss(String),

    #[error("pool of {pool} candidates is smaller than k = {k}")]
    PoolTooSmall { pool: usize, k: usize },

    #[error("balanced retrieval requires an even k, got {0}")]
    OddK(usize),

    #[error("pool has {available} {gender} candidates, balanced retrieval needs {needed}")]
    InsufficientGenderPool {
        gender: &'static str,
        available: usize,
        needed: usize,
    },

    #[error("rank {0} is out of range (must be >= 1)")]
    RankOutOfRange(u32),

    #[error("rank {rank} exceeds list length {n}")]
    RankBeyondList { rank: u32, n: usize },

    #[error("attention profile length must be >= 1")]
    EmptyAttentionProfile,

    #[error("group attention value {0} is outside [0, 1]")]
    AttentionOutOfRange(f64),

    #[error("no gender known for candidate {0}")]
    MissingGender(String),

    #[error("no relevance score for candidate {0}")]
    MissingRelevance(String),

    #[error("no bio available for candidate {0}")]
    MissingBio(String),

    #[error("candidate {0} is not in the ranked list")]
    CandidateNotInList(String),

    #[error("ranked list too short: has {len} entries, need {needed}")]
    ListTooShort { len: usize, needed: usize },

    #[error("no shortlisted bios available for utility scoring")]
    EmptyShortlist,

    #[error("episodic memory is empty")]
    EmptyMemory,

    #[error("both memory sources are empty")]
    NoMemorySources,

    #[error("required input is empty: {0}")]
    EmptyInput(&'static str),

    #[error("stub bias strength {0} is outside [-1, 1]")]
    BiasStrengthOutOfRange(f64),

    #[error("backend error: {0}")]
    Backend(String),

    #[error("backend retry budget exhausted after {attempts} attempts: {message}")]
    BackendExhausted { attempts: usize, message: String },

    #[error("authentication rejected by backend: {0}")]
    BackendAuth(String),

    #[error("re-rank response unrepairable: recognized {recognized} of {expected} candidate ids")]
    UnrepairableRerank { recognized: usize, expected: usize },

    #[error("backend returned label {0:?}, expected one of biased/neutral/fair")]
    InvalidLabel(String),

    #[error("environment variable {0} is not set")]
    MissingEnvVar(String),

    #[error("experiments {left} and {right} are not a retrieval-sharing pair")]
    NotASharingPair { left: String, right: String },

    #[error("seed mismatch between paired runs: {left} vs {right}")]
    SeedMismatch { left: u64, right: u64 },

    #[error("{stage} failed for recruiter {recruiter}, posting {posting}, experiment {experiment}: {source}")]
    Stage {
        recruiter: String,
        posting: String,
        experiment: String,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("run config does not match the config recorded in {dir}: refusing to resume")]
    ConfigMismatch { dir: PathBuf },

    #[error("trace log incomplete; {} task keys missing (first: {})", missing.len(), missing.first().map(String::as_str).unwrap_or("-"))]
    IncompleteTraces { missing: Vec<String> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown experiment id {0:?}")]
    UnknownExperiment(String),

    #[error("{path}: {source}")]
    IoAt {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attach a path to a bare I/O error.
    pub fn io_at(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::IoAt { path, source }
    }

    /// Process exit code for the CLI: 2 for input/config errors, 3 for
    /// backend exhaustion, 4 for incomplete trace logs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingFile(_)
            | Error::MalformedRow { .. }
            | Error::UnknownGender { .. }
            | Error::InvalidConfig(_)
            | Error::UnknownExperiment(_)
            | Error::MissingEnvVar(_)
            | Error::ConfigMismatch { .. }
            | Error::TooFewPostings { .. }
            | Error::PostingCountTooSmall { .. } => 2,
            Error::BackendExhausted { .. } => 3,
            Error::IncompleteTraces { .. } => 4,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
