//! Seeded synthesis of job postings, recruiter assignments, and curated
//! task-specific memories.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    CandidateRecord, Gender, JobPosting, MemoryEntry, PostingId, ProfessionStats,
    RecruiterId, RecruiterProfile, Split,
};
use crate::embedding::{cosine_similarity, EmbeddingService};
use crate::error::{Error, Result};
use crate::util::derive_seed;

/// Raw recruiter instruction attached to every posting of a profession.
/// Fixed template so retrieval differences stay attributable to
/// personalization rather than query phrasing.
pub fn raw_query_for(profession: &str) -> String {
    format!(
        "Find candidates for the {profession} role; emphasize relevant experience, skills, and a strong track record."
    )
}

/// Allocate `n` postings across professions proportionally to their
/// empirical frequency (largest-remainder rounding), then shuffle order
/// under the seed. Posting ids are assigned before the shuffle, so the id
/// of a given profession slot is independent of the seed.
pub fn synthesize_postings(stats: &ProfessionStats, n: usize, seed: u64) -> Result<Vec<JobPosting>> {
    if stats.is_empty() {
        return Err(Error::EmptyPool);
    }
    if n < stats.len() {
        return Err(Error::PostingCountTooSmall {
            n,
            professions: stats.len(),
        });
    }
    let quotas = largest_remainder_quotas(stats, n);
    let mut postings = Vec::with_capacity(n);
    let mut next_id = 0usize;
    for (profession, quota) in &quotas {
        for _ in 0..*quota {
            postings.push(JobPosting {
                id: PostingId::new(format!("post-{next_id:05}")),
                profession: profession.clone(),
                raw_query: raw_query_for(profession),
            });
            next_id += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &["postings"]));
    postings.shuffle(&mut rng);
    Ok(postings)
}

/// Largest-remainder apportionment of `n` slots over profession frequencies.
/// Remainder ties break toward the lexicographically smaller profession.
fn largest_remainder_quotas(stats: &ProfessionStats, n: usize) -> Vec<(String, usize)> {
    let total = stats.total() as f64;
    let mut quotas: Vec<(String, usize, f64)> = stats
        .iter()
        .map(|(profession, share)| {
            let ideal = n as f64 * share.count as f64 / total;
            (profession.to_string(), ideal.floor() as usize, ideal - ideal.floor())
        })
        .collect();
    let assigned: usize = quotas.iter().map(|(_, q, _)| q).sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        quotas[b]
            .2
            .partial_cmp(&quotas[a].2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| quotas[a].0.cmp(&quotas[b].0))
    });
    for idx in order.into_iter().take(n - assigned) {
        quotas[idx].1 += 1;
    }
    quotas.into_iter().map(|(p, q, _)| (p, q)).collect()
}

/// Randomly assign every posting to one of `n_recruiters` recruiters while
/// guaranteeing each recruiter at least one posting.
pub fn assign_postings(
    postings: &[JobPosting],
    n_recruiters: usize,
    seed: u64,
) -> Result<Vec<RecruiterProfile>> {
    if n_recruiters == 0 {
        return Err(Error::InvalidConfig("n_recruiters must be >= 1".to_string()));
    }
    if postings.len() < n_recruiters {
        return Err(Error::TooFewPostings {
            postings: postings.len(),
            recruiters: n_recruiters,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &["assign"]));
    let mut order: Vec<usize> = (0..postings.len()).collect();
    order.shuffle(&mut rng);

    let mut recruiters: Vec<RecruiterProfile> = (0..n_recruiters)
        .map(|i| RecruiterProfile {
            id: RecruiterId::new(format!("rec-{i:05}")),
            posting_ids: Vec::new(),
            episodic_memory: Vec::new(),
            semantic_memory: String::new(),
        })
        .collect();

    for (slot, posting_idx) in order.into_iter().enumerate() {
        let recruiter_idx = if slot < n_recruiters {
            slot
        } else {
            rng.gen_range(0..n_recruiters)
        };
        recruiters[recruiter_idx]
            .posting_ids
            .push(postings[posting_idx].id.clone());
    }
    Ok(recruiters)
}

const GENDER_RESAMPLE_BUDGET: usize = 8;

/// Curate one task-specific memory entry for a posting.
///
/// Samples 4–10 same-profession test candidates, draws the shortlist gender
/// from the profession's hiring likelihood, and shortlists the sampled
/// candidate of that gender whose bio embedding is closest to the
/// profession-label embedding. When no sampled candidate has the drawn
/// gender, the sample is redrawn up to a bounded budget before falling back
/// to the opposite gender (recorded on the entry).
pub fn curate_memory(
    posting: &JobPosting,
    test_pool: &[CandidateRecord],
    stats: &ProfessionStats,
    embedder: &EmbeddingService,
    seed: u64,
    timestamp_ordinal: u32,
) -> Result<MemoryEntry> {
    let eligible: Vec<&CandidateRecord> = test_pool
        .iter()
        .filter(|c| c.profession == posting.profession && c.split == Split::Test)
        .collect();
    if eligible.len() < 4 {
        return Err(Error::InsufficientCandidates {
            profession: posting.profession.clone(),
            available: eligible.len(),
            needed: 4,
        });
    }
    let p_male = stats.p_male(&posting.profession)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn_gender = if rng.gen_bool(p_male) {
        Gender::Male
    } else {
        Gender::Female
    };

    let max_size = 10.min(eligible.len());
    let mut sample: Vec<&CandidateRecord> = Vec::new();
    let mut have_drawn_gender = false;
    for _ in 0..=GENDER_RESAMPLE_BUDGET {
        let size = rng.gen_range(4..=max_size);
        sample = eligible
            .choose_multiple(&mut rng, size)
            .copied()
            .collect();
        have_drawn_gender = sample.iter().any(|c| c.gender == drawn_gender);
        if have_drawn_gender {
            break;
        }
    }
    let (shortlist_gender, gender_fallback) = if have_drawn_gender {
        (drawn_gender, false)
    } else {
        (drawn_gender.opposite(), true)
    };

    let profession_vec = embedder.embed(&posting.profession)?;
    let mut best: Option<(&CandidateRecord, f64)> = None;
    for candidate in sample.iter().filter(|c| c.gender == shortlist_gender) {
        let bio_vec = embedder.embed(&candidate.raw_bio)?;
        let sim = cosine_similarity(&bio_vec, &profession_vec)?;
        best = match best {
            None => Some((candidate, sim)),
            Some((cur, cur_sim)) => {
                if sim > cur_sim || (sim == cur_sim && candidate.id < cur.id) {
                    Some((candidate, sim))
                } else {
                    Some((cur, cur_sim))
                }
            }
        };
    }
    let (shortlisted, _) = best.expect("sample always contains the shortlist gender");

    Ok(MemoryEntry {
        posting_id: posting.id.clone(),
        sampled_candidate_ids: sample.iter().map(|c| c.id.clone()).collect(),
        shortlisted_candidate_id: shortlisted.id.clone(),
        shortlist_gender,
        timestamp_ordinal,
        gender_fallback,
    })
}

/// Curate memories for every (recruiter, posting) pair, with per-pair seeds
/// derived from the master seed so recruiters could be curated in parallel
/// without changing the result.
pub fn curate_all(
    recruiters: &mut [RecruiterProfile],
    postings: &[JobPosting],
    test_pool: &[CandidateRecord],
    stats: &ProfessionStats,
    embedder: &EmbeddingService,
    master_seed: u64,
) -> Result<()> {
    let by_id: BTreeMap<&PostingId, &JobPosting> =
        postings.iter().map(|p| (&p.id, p)).collect();
    for recruiter in recruiters.iter_mut() {
        let mut entries = Vec::with_capacity(recruiter.posting_ids.len());
        for (ordinal, posting_id) in recruiter.posting_ids.iter().enumerate() {
            let posting = by_id.get(posting_id).ok_or_else(|| {
                Error::InvalidConfig(format!("recruiter references unknown posting {posting_id}"))
            })?;
            let seed = derive_seed(
                master_seed,
                &["curate", recruiter.id.as_str(), posting_id.as_str()],
            );
            entries.push(curate_memory(
                posting,
                test_pool,
                stats,
                embedder,
                seed,
                ordinal as u32,
            )?);
        }
        recruiter.episodic_memory = entries;
    }
    Ok(())
}
