//! Single abstraction over generative-model calls for the personalization
//! tasks and summary classification, with a deterministic biased-persona
//! stub and a remote chat-completion backend.

pub mod prompts;
mod remote;
mod stub;

use serde::{Deserialize, Serialize};

use crate::corpus::{CandidateId, PostingId};
use crate::error::{Error, Result};
use crate::retrieval::{RankedEntry, RankedList, Stage};

pub use remote::{ChatClient, ChatOutcome, RemoteBackend, RemoteBackendConfig};
pub use stub::{perceived_gender, StubBackend, StubPersonaConfig};

/// The six generation tasks routed through a backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    SemanticMemory,
    PersonalizedQuery,
    MemorySummary,
    JobDescription,
    ReRank,
    ClassifySummary,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::SemanticMemory => "semantic_memory",
            TaskKind::PersonalizedQuery => "personalized_query",
            TaskKind::MemorySummary => "memory_summary",
            TaskKind::JobDescription => "job_description",
            TaskKind::ReRank => "rerank",
            TaskKind::ClassifySummary => "classify_summary",
        }
    }

    pub const ALL: [TaskKind; 6] = [
        TaskKind::SemanticMemory,
        TaskKind::PersonalizedQuery,
        TaskKind::MemorySummary,
        TaskKind::JobDescription,
        TaskKind::ReRank,
        TaskKind::ClassifySummary,
    ];
}

/// Classification of a memory summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryLabel {
    /// Favors or disfavors candidates of a certain gender.
    Biased,
    /// No mention of gender.
    Neutral,
    /// Explicitly states that gender does not influence decisions.
    Fair,
}

impl SummaryLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SummaryLabel::Biased => "biased",
            SummaryLabel::Neutral => "neutral",
            SummaryLabel::Fair => "fair",
        }
    }

    /// Strict parse; anything outside the label set is an error rather than
    /// a silent coercion.
    pub fn parse_strict(text: &str) -> Result<Self> {
        match text.trim().trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase().as_str() {
            "biased" => Ok(SummaryLabel::Biased),
            "neutral" => Ok(SummaryLabel::Neutral),
            "fair" => Ok(SummaryLabel::Fair),
            other => Err(Error::InvalidLabel(other.to_string())),
        }
    }
}

/// A candidate id plus the bio text the backend is allowed to see. The
/// caller resolves raw vs scrubbed text before anything reaches a backend,
/// so a scrubbed experiment never exposes a raw bio here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateBrief {
    pub id: CandidateId,
    pub bio: String,
}

/// One episodic-memory record as presented to a backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodicEvent {
    pub posting_id: PostingId,
    pub profession: String,
    pub sampled: Vec<CandidateBrief>,
    pub shortlisted: CandidateBrief,
    pub ordinal: u32,
}

/// One request/response pair recorded in the task trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub task: TaskKind,
    pub backend: String,
    pub request: String,
    pub response: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Ordered transcript collector for one task execution.
#[derive(Debug, Default, Clone)]
pub struct TranscriptLog {
    entries: Vec<Transcript>,
}

impl TranscriptLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, transcript: Transcript) {
        self.entries.push(transcript);
    }

    pub fn entries(&self) -> &[Transcript] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Transcript> {
        self.entries
    }
}

/// Generative backend for the personalization tasks.
///
/// Every method appends its request/response pair to `log`. Implementations
/// must be safe to share across worker threads.
pub trait ModelBackend: Send + Sync {
    /// Short backend name recorded in transcripts ("stub", "remote").
    fn name(&self) -> &'static str;

    /// Semantic memory text from the recruiter's shortlisting history.
    fn generate_semantic_memory(
        &self,
        episodic: &[EpisodicEvent],
        log: &mut TranscriptLog,
    ) -> Result<String>;

    /// Enhance the raw recruiter query with task-specific memory context.
    /// With `include_gender` off the output must stay free of gender terms.
    fn create_personalized_query(
        &self,
        raw_query: &str,
        episodic: &[EpisodicEvent],
        include_gender: bool,
        log: &mut TranscriptLog,
    ) -> Result<String>;

    /// Consolidated summary of semantic and episodic memory.
    fn summarize_memory(
        &self,
        semantic_memory: Option<&str>,
        episodic: &[EpisodicEvent],
        log: &mut TranscriptLog,
    ) -> Result<String>;

    /// Detailed job description from the personalized query and summary.
    fn create_job_description(
        &self,
        personalized_query: &str,
        memory_summary: &str,
        log: &mut TranscriptLog,
    ) -> Result<String>;

    /// Re-rank retrieved candidates. The output is always a permutation of
    /// the input candidate ids; `candidates` carries the bio text visible to
    /// the backend, aligned with the listed ids.
    fn rerank(
        &self,
        list: &RankedList,
        candidates: &[CandidateBrief],
        job_description: Option<&str>,
        memory_summary: &str,
        log: &mut TranscriptLog,
    ) -> Result<RankedList>;

    /// One-shot classification of a memory summary.
    fn classify_summary(&self, summary: &str, log: &mut TranscriptLog) -> Result<SummaryLabel>;
}

/// Repair a proposed re-rank id ordering into a valid permutation of the
/// original list: unknown ids are dropped, duplicate mentions keep their
/// first position, and missing ids are appended in original order. Returns
/// the repaired order plus a note when anything was fixed. Fails when fewer
/// than half of the original ids were recognized.
pub fn repair_permutation(
    proposed: &[CandidateId],
    original: &RankedList,
) -> Result<(Vec<CandidateId>, Option<String>)> {
    use std::collections::BTreeSet;
    let valid: BTreeSet<&CandidateId> = original.candidate_ids().collect();
    let mut seen = BTreeSet::new();
    let mut order = Vec::with_capacity(original.len());
    let mut dropped = 0usize;
    let mut duplicates = 0usize;
    for id in proposed {
        if !valid.contains(id) {
            dropped += 1;
            continue;
        }
        if !seen.insert(id.clone()) {
            duplicates += 1;
            continue;
        }
        order.push(id.clone());
    }
    if order.len() * 2 < original.len() {
        return Err(Error::UnrepairableRerank {
            recognized: order.len(),
            expected: original.len(),
        });
    }
    let mut appended = 0usize;
    for id in original.candidate_ids() {
        if !seen.contains(id) {
            order.push(id.clone());
            appended += 1;
        }
    }
    let note = if dropped + duplicates + appended > 0 {
        Some(format!(
            "repaired permutation: dropped {dropped} unknown, {duplicates} duplicate, appended {appended} missing"
        ))
    } else {
        None
    };
    Ok((order, note))
}

/// Rebuild a ranked list from an id ordering, carrying each candidate's
/// retrieval score through and re-stamping ranks and stage.
pub fn reorder_as_reranked(original: &RankedList, order: &[CandidateId]) -> RankedList {
    let score_of = |id: &CandidateId| {
        original
            .entries
            .iter()
            .find(|e| &e.candidate_id == id)
            .map(|e| e.score)
            .unwrap_or(0.0)
    };
    RankedList {
        entries: order
            .iter()
            .enumerate()
            .map(|(i, id)| RankedEntry {
                candidate_id: id.clone(),
                score: score_of(id),
                rank: (i + 1) as u32,
            })
            .collect(),
        stage: Stage::Reranking,
        experiment: original.experiment,
        k: original.k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ExperimentId;

    fn list(ids: &[&str]) -> RankedList {
        RankedList {
            entries: ids
                .iter()
                .enumerate()
                .map(|(i, id)| RankedEntry {
                    candidate_id: CandidateId::new(*id),
                    score: 1.0 - i as f64 * 0.1,
                    rank: (i + 1) as u32,
                })
                .collect(),
            stage: Stage::Retrieval,
            experiment: ExperimentId::E1,
            k: ids.len(),
        }
    }

    #[test]
    fn label_parse_is_strict() {
        assert_eq!(SummaryLabel::parse_strict(" Biased.").unwrap(), SummaryLabel::Biased);
        assert_eq!(SummaryLabel::parse_strict("fair").unwrap(), SummaryLabel::Fair);
        assert!(matches!(
            SummaryLabel::parse_strict("mostly fair"),
            Err(Error::InvalidLabel(_))
        ));
    }

    #[test]
    fn clean_permutation_needs_no_repair() {
        let original = list(&["a", "b", "c", "d"]);
        let proposed: Vec<CandidateId> = ["c", "a", "d", "b"].iter().map(|s| CandidateId::new(*s)).collect();
        let (order, note) = repair_permutation(&proposed, &original).unwrap();
        assert_eq!(order, proposed);
        assert!(note.is_none());
    }

    #[test]
    fn missing_id_is_appended_in_original_order() {
        let original = list(&["a", "b", "c", "d"]);
        let proposed: Vec<CandidateId> = ["d", "b", "a"].iter().map(|s| CandidateId::new(*s)).collect();
        let (order, note) = repair_permutation(&proposed, &original).unwrap();
        let expect: Vec<CandidateId> = ["d", "b", "a", "c"].iter().map(|s| CandidateId::new(*s)).collect();
        assert_eq!(order, expect);
        assert!(note.unwrap().contains("appended 1"));
    }

    #[test]
    fn unknown_and_duplicate_ids_are_dropped() {
        let original = list(&["a", "b"]);
        let proposed: Vec<CandidateId> = ["b", "zz", "b", "a"].iter().map(|s| CandidateId::new(*s)).collect();
        let (order, note) = repair_permutation(&proposed, &original).unwrap();
        let expect: Vec<CandidateId> = ["b", "a"].iter().map(|s| CandidateId::new(*s)).collect();
        assert_eq!(order, expect);
        assert!(note.is_some());
    }

    #[test]
    fn mostly_unrecognized_response_is_an_error() {
        let original = list(&["a", "b", "c", "d"]);
        let proposed: Vec<CandidateId> = ["zz", "a"].iter().map(|s| CandidateId::new(*s)).collect();
        assert!(matches!(
            repair_permutation(&proposed, &original),
            Err(Error::UnrepairableRerank { recognized: 1, expected: 4 })
        ));
    }

    #[test]
    fn reorder_preserves_scores_and_restamps_ranks() {
        let original = list(&["a", "b", "c"]);
        let order: Vec<CandidateId> = ["c", "a", "b"].iter().map(|s| CandidateId::new(*s)).collect();
        let reranked = reorder_as_reranked(&original, &order);
        assert_eq!(reranked.stage, Stage::Reranking);
        assert_eq!(reranked.entries[0].candidate_id.as_str(), "c");
        assert_eq!(reranked.entries[0].score, 0.8);
        assert_eq!(reranked.entries[0].rank, 1);
        assert!(original.same_id_set(&reranked));
    }
}
