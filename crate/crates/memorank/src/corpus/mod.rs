//! Corpus ingestion and synthesis: candidate bios, job postings, recruiter
//! profiles, and curated task-specific memories.

mod load;
pub mod sample;
mod scrub;
mod stats;
mod store;
mod synth;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use load::{load_bios, FieldMap};
pub use scrub::{
    contains_explicit_indicator, scrub_gender_indicators, scrub_with_first_name,
    EXPLICIT_INDICATORS, SCRUB_PLACEHOLDER,
};
pub use stats::{profession_gender_distribution, GenderShare, ProfessionStats};
pub use store::{load_corpus, read_jsonl, write_corpus, write_jsonl, CorpusBundle};
pub use synth::{assign_postings, curate_all, curate_memory, synthesize_postings};

/// Binary gender label carried by the source corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub fn opposite(self) -> Self {
        match self {
            Gender::Male => Gender::Female,
            Gender::Female => Gender::Male,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Candidate pool split: train is the retrieval pool, test feeds recruiter
/// memory curation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn id_prefix(self) -> &'static str {
        match self {
            Split::Train => "tr",
            Split::Test => "te",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

macro_rules! id_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

id_newtype!(
    /// Opaque candidate identifier, stable across runs for a given source file.
    CandidateId
);
id_newtype!(
    /// Opaque job-posting identifier.
    PostingId
);
id_newtype!(
    /// Opaque recruiter identifier.
    RecruiterId
);

/// One candidate: profession, gender label, raw and scrubbed bios, pool split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub id: CandidateId,
    pub profession: String,
    pub gender: Gender,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_name: Option<String>,
    pub raw_bio: String,
    pub scrubbed_bio: String,
    pub split: Split,
}

/// One job posting: profession plus the recruiter's raw instruction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobPosting {
    pub id: PostingId,
    pub profession: String,
    pub raw_query: String,
}

/// One curated task-specific memory record: the sampled candidates for a
/// posting and the one the recruiter shortlisted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub posting_id: PostingId,
    pub sampled_candidate_ids: Vec<CandidateId>,
    pub shortlisted_candidate_id: CandidateId,
    pub shortlist_gender: Gender,
    pub timestamp_ordinal: u32,
    /// True when the gender drawn from the hiring-likelihood Bernoulli was
    /// absent from every resample and the opposite gender was shortlisted.
    #[serde(default)]
    pub gender_fallback: bool,
}

/// A recruiter: owned postings, episodic memory entries, and a semantic
/// memory text filled in by the model gateway at run time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecruiterProfile {
    pub id: RecruiterId,
    pub posting_ids: Vec<PostingId>,
    pub episodic_memory: Vec<MemoryEntry>,
    #[serde(default)]
    pub semantic_memory: String,
}

impl RecruiterProfile {
    /// Episodic entries curated for one posting, in timestamp order.
    pub fn entries_for_posting(&self, posting: &PostingId) -> Vec<&MemoryEntry> {
        self.episodic_memory
            .iter()
            .filter(|e| &e.posting_id == posting)
            .collect()
    }
}
