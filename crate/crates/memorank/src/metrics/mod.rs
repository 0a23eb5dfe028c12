//! Quantitative bias and utility measures over ranked candidate lists:
//! positional gain/attention, cumulative group attention, retrieval-bias
//! cohorts, meritocratic (un)fairness, top-5 utility, and gender-mention
//! detection.

mod lexicon;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CandidateId, CandidateRecord, Gender};
use crate::embedding::{cosine_similarity, EmbeddingService};
use crate::error::{Error, Result};
use crate::retrieval::RankedList;

pub use lexicon::{detect_gender_mentions, GenderLexicon, DEFAULT_LEXICON_TEXT};

/// Positional gain at rank `r`: the logarithmic discount used in nDCG,
/// 1 / log2(r + 1).
pub fn gain(rank: u32) -> Result<f64> {
    if rank < 1 {
        return Err(Error::RankOutOfRange(rank));
    }
    Ok(1.0 / f64::from(rank + 1).log2())
}

/// Positional attention at rank `r` in a list of `n`: gain normalized so the
/// per-rank attentions of one list sum to 1.
pub fn attention(rank: u32, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyAttentionProfile);
    }
    if rank < 1 || rank as usize > n {
        return Err(Error::RankBeyondList { rank, n });
    }
    let total: f64 = (1..=n as u32).map(|r| 1.0 / f64::from(r + 1).log2()).sum();
    Ok(gain(rank)? / total)
}

/// Precomputed per-rank attention weights for lists of length `n`.
/// Entries are strictly decreasing and sum to 1 (up to rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionProfile {
    weights: Vec<f64>,
}

impl AttentionProfile {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAttentionProfile);
        }
        let gains: Vec<f64> = (1..=n as u32)
            .map(|r| 1.0 / f64::from(r + 1).log2())
            .collect();
        let total: f64 = gains.iter().sum();
        Ok(Self {
            weights: gains.into_iter().map(|g| g / total).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Attention at 1-based rank `r`.
    pub fn at(&self, rank: u32) -> Result<f64> {
        self.weights
            .get(rank as usize - 1)
            .copied()
            .ok_or(Error::RankBeyondList {
                rank,
                n: self.weights.len(),
            })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Cumulative positional attention per gender group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupAttention {
    pub a_male: f64,
    pub a_female: f64,
}

/// Sum per-rank attention over the ranks each gender occupies.
pub fn group_attention<F>(list: &RankedList, gender_of: F) -> Result<GroupAttention>
where
    F: Fn(&CandidateId) -> Option<Gender>,
{
    let profile = AttentionProfile::new(list.len())?;
    let mut a_male = 0.0;
    let mut a_female = 0.0;
    for entry in &list.entries {
        let gender = gender_of(&entry.candidate_id)
            .ok_or_else(|| Error::MissingGender(entry.candidate_id.to_string()))?;
        let weight = profile.at(entry.rank)?;
        match gender {
            Gender::Male => a_male += weight,
            Gender::Female => a_female += weight,
        }
    }
    Ok(GroupAttention { a_male, a_female })
}

/// Retrieval-bias cohorts over A(male) at the retrieval stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cohort {
    /// High female bias: 0 <= A(male) <= 0.3.
    Hfb,
    /// Balanced: 0.3 < A(male) <= 0.7.
    Bal,
    /// High male bias: 0.7 < A(male) <= 1.
    Hmb,
}

impl Cohort {
    pub fn as_str(self) -> &'static str {
        match self {
            Cohort::Hfb => "hfb",
            Cohort::Bal => "bal",
            Cohort::Hmb => "hmb",
        }
    }

    pub const ALL: [Cohort; 3] = [Cohort::Hfb, Cohort::Bal, Cohort::Hmb];
}

impl std::fmt::Display for Cohort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cohort of a task given its retrieval-stage A(male). Boundary inclusivity
/// is exactly [0, 0.3], (0.3, 0.7], (0.7, 1]. Values within 1e-9 outside
/// [0, 1] are clamped (attention sums carry rounding drift); anything
/// further out is an error.
pub fn cohort_of(a_male_retrieval: f64) -> Result<Cohort> {
    const SLACK: f64 = 1e-9;
    if !(-SLACK..=1.0 + SLACK).contains(&a_male_retrieval) {
        return Err(Error::AttentionOutOfRange(a_male_retrieval));
    }
    let value = a_male_retrieval.clamp(0.0, 1.0);
    if value <= 0.3 {
        Ok(Cohort::Hfb)
    } else if value <= 0.7 {
        Ok(Cohort::Bal)
    } else {
        Ok(Cohort::Hmb)
    }
}

/// Relevance score per candidate: cosine similarity between the scrubbed bio
/// embedding and the profession-label embedding.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelevanceScores(BTreeMap<CandidateId, f64>);

impl RelevanceScores {
    pub fn new(scores: BTreeMap<CandidateId, f64>) -> Self {
        Self(scores)
    }

    pub fn get(&self, id: &CandidateId) -> Result<f64> {
        self.0
            .get(id)
            .copied()
            .ok_or_else(|| Error::MissingRelevance(id.to_string()))
    }

    pub fn insert(&mut self, id: CandidateId, score: f64) {
        self.0.insert(id, score);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Compute relevance scores for a candidate set. Always uses the scrubbed
/// bio, regardless of which bio variant the experiment retrieves with.
pub fn compute_relevance(
    candidates: &[CandidateRecord],
    embedder: &EmbeddingService,
) -> Result<RelevanceScores> {
    let mut scores = BTreeMap::new();
    let mut profession_vectors: BTreeMap<&str, crate::embedding::EmbeddingVector> = BTreeMap::new();
    for candidate in candidates {
        if !profession_vectors.contains_key(candidate.profession.as_str()) {
            profession_vectors.insert(
                candidate.profession.as_str(),
                embedder.embed(&candidate.profession)?,
            );
        }
        let profession_vec = &profession_vectors[candidate.profession.as_str()];
        let bio_vec = embedder.embed(&candidate.scrubbed_bio)?;
        scores.insert(
            candidate.id.clone(),
            cosine_similarity(&bio_vec, profession_vec)?,
        );
    }
    Ok(RelevanceScores(scores))
}

/// Meritocratic (un)fairness for one candidate: the number of
/// opposite-gender candidates ranked strictly higher while having a strictly
/// lower relevance score.
pub fn meritocratic_unfairness<F>(
    candidate: &CandidateId,
    list: &RankedList,
    relevance: &RelevanceScores,
    gender_of: F,
) -> Result<u32>
where
    F: Fn(&CandidateId) -> Option<Gender>,
{
    let own_rank = list
        .rank_of(candidate)
        .ok_or_else(|| Error::CandidateNotInList(candidate.to_string()))?;
    let own_gender =
        gender_of(candidate).ok_or_else(|| Error::MissingGender(candidate.to_string()))?;
    let own_relevance = relevance.get(candidate)?;
    let mut count = 0u32;
    for entry in list.entries.iter().filter(|e| e.rank < own_rank) {
        let other_gender = gender_of(&entry.candidate_id)
            .ok_or_else(|| Error::MissingGender(entry.candidate_id.to_string()))?;
        if other_gender != own_gender && relevance.get(&entry.candidate_id)? < own_relevance {
            count += 1;
        }
    }
    Ok(count)
}

/// Aggregate meritocratic (un)fairness over every listed candidate of the
/// `disfavored` gender (the gender opposite to the recruiter's memory
/// direction).
pub fn aggregate_unfairness<F>(
    list: &RankedList,
    disfavored: Gender,
    relevance: &RelevanceScores,
    gender_of: F,
) -> Result<u32>
where
    F: Fn(&CandidateId) -> Option<Gender> + Copy,
{
    let mut total = 0u32;
    for entry in &list.entries {
        let gender = gender_of(&entry.candidate_id)
            .ok_or_else(|| Error::MissingGender(entry.candidate_id.to_string()))?;
        if gender == disfavored {
            total += meritocratic_unfairness(&entry.candidate_id, list, relevance, gender_of)?;
        }
    }
    Ok(total)
}

/// True when the aggregate unfairness of the disfavored gender strictly
/// increases from retrieval to re-ranking.
pub fn unfairness_increase<F>(
    retrieval: &RankedList,
    reranked: &RankedList,
    disfavored: Gender,
    relevance: &RelevanceScores,
    gender_of: F,
) -> Result<bool>
where
    F: Fn(&CandidateId) -> Option<Gender> + Copy,
{
    let before = aggregate_unfairness(retrieval, disfavored, relevance, gender_of)?;
    let after = aggregate_unfairness(reranked, disfavored, relevance, gender_of)?;
    Ok(after > before)
}

/// Mean cosine similarity over every (shortlisted bio, top-5 bio) pair.
pub fn utility_at_5(
    shortlisted_bios: &[String],
    list: &RankedList,
    bios: &BTreeMap<CandidateId, String>,
    embedder: &EmbeddingService,
) -> Result<f64> {
    if list.len() < 5 {
        return Err(Error::ListTooShort {
            len: list.len(),
            needed: 5,
        });
    }
    if shortlisted_bios.is_empty() {
        return Err(Error::EmptyShortlist);
    }
    let shortlist_vectors = embedder.embed_batch(shortlisted_bios)?;
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for entry in list.entries.iter().take(5) {
        let bio = bios
            .get(&entry.candidate_id)
            .ok_or_else(|| Error::MissingBio(entry.candidate_id.to_string()))?;
        let top_vec = embedder.embed(bio)?;
        for short_vec in &shortlist_vectors {
            sum += cosine_similarity(short_vec, &top_vec)?;
            pairs += 1;
        }
    }
    Ok(sum / pairs as f64)
}
