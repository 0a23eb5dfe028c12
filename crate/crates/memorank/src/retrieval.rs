//! Exact top-k retrieval over candidate embeddings, plus the
//! fairness-constrained balanced variant.

use serde::{Deserialize, Serialize};

use crate::corpus::{CandidateId, Gender};
use crate::embedding::{cosine_similarity, EmbeddingVector};
use crate::error::{Error, Result};
use crate::pipeline::ExperimentId;

/// Producing stage of a ranked list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Retrieval,
    Reranking,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Retrieval => "retrieval",
            Stage::Reranking => "reranking",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub candidate_id: CandidateId,
    pub score: f64,
    pub rank: u32,
}

/// Ordered candidate list tagged with producing stage and experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
    pub stage: Stage,
    pub experiment: ExperimentId,
    pub k: usize,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn candidate_ids(&self) -> impl Iterator<Item = &CandidateId> {
        self.entries.iter().map(|e| &e.candidate_id)
    }

    pub fn rank_of(&self, id: &CandidateId) -> Option<u32> {
        self.entries
            .iter()
            .find(|e| &e.candidate_id == id)
            .map(|e| e.rank)
    }

    /// Same candidate ids, independent of order.
    pub fn same_id_set(&self, other: &RankedList) -> bool {
        let mut a: Vec<&CandidateId> = self.candidate_ids().collect();
        let mut b: Vec<&CandidateId> = other.candidate_ids().collect();
        a.sort();
        b.sort();
        a == b
    }
}

/// One embedded candidate in the retrieval pool.
#[derive(Debug, Clone)]
pub struct PoolEntry {
    pub candidate_id: CandidateId,
    pub gender: Gender,
    pub vector: EmbeddingVector,
}

/// Read-only candidate pool with uniform embedding dimension.
#[derive(Debug, Clone)]
pub struct EmbeddedPool {
    entries: Vec<PoolEntry>,
}

impl EmbeddedPool {
    pub fn new(entries: Vec<PoolEntry>) -> Result<Self> {
        if let Some(first) = entries.first() {
            let dim = first.vector.dimension();
            for entry in &entries {
                if entry.vector.dimension() != dim {
                    return Err(Error::DimensionMismatch {
                        left: dim,
                        right: entry.vector.dimension(),
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn gender_count(&self, gender: Gender) -> usize {
        self.entries.iter().filter(|e| e.gender == gender).count()
    }
}

fn scored_pool(query: &EmbeddingVector, pool: &EmbeddedPool) -> Result<Vec<(usize, f64)>> {
    pool.entries
        .iter()
        .enumerate()
        .map(|(i, entry)| Ok((i, cosine_similarity(query, &entry.vector)?)))
        .collect()
}

/// Deterministic ordering: score descending, then candidate id ascending.
fn sort_scored(scored: &mut [(usize, f64)], pool: &EmbeddedPool) {
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| pool.entries[a.0].candidate_id.cmp(&pool.entries[b.0].candidate_id))
    });
}

fn to_list(
    scored: Vec<(usize, f64)>,
    pool: &EmbeddedPool,
    k: usize,
    experiment: ExperimentId,
) -> RankedList {
    let entries = scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (idx, score))| RankedEntry {
            candidate_id: pool.entries[idx].candidate_id.clone(),
            score,
            rank: (i + 1) as u32,
        })
        .collect();
    RankedList {
        entries,
        stage: Stage::Retrieval,
        experiment,
        k,
    }
}

/// The k pool candidates most similar to the query, in descending score
/// order; ties break by ascending candidate id.
pub fn retrieve_top_k(
    query: &EmbeddingVector,
    pool: &EmbeddedPool,
    k: usize,
    experiment: ExperimentId,
) -> Result<RankedList> {
    if pool.len() < k {
        return Err(Error::PoolTooSmall { pool: pool.len(), k });
    }
    let mut scored = scored_pool(query, pool)?;
    sort_scored(&mut scored, pool);
    Ok(to_list(scored, pool, k, experiment))
}

/// Balanced retrieval: the top k/2 candidates of each gender, merged into a
/// single list ordered by score descending (ties by candidate id).
pub fn retrieve_balanced(
    query: &EmbeddingVector,
    pool: &EmbeddedPool,
    k: usize,
    experiment: ExperimentId,
) -> Result<RankedList> {
    if k % 2 != 0 {
        return Err(Error::OddK(k));
    }
    let half = k / 2;
    for gender in [Gender::Male, Gender::Female] {
        let available = pool.gender_count(gender);
        if available < half {
            return Err(Error::InsufficientGenderPool {
                gender: gender.as_str(),
                available,
                needed: half,
            });
        }
    }
    let mut scored = scored_pool(query, pool)?;
    sort_scored(&mut scored, pool);
    let mut merged = Vec::with_capacity(k);
    let mut taken_male = 0usize;
    let mut taken_female = 0usize;
    for (idx, score) in scored {
        let slot = match pool.entries[idx].gender {
            Gender::Male if taken_male < half => &mut taken_male,
            Gender::Female if taken_female < half => &mut taken_female,
            _ => continue,
        };
        *slot += 1;
        merged.push((idx, score));
        if merged.len() == k {
            break;
        }
    }
    // merged is already globally score-ordered because the source was.
    Ok(to_list(merged, pool, k, experiment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(values: Vec<f64>) -> EmbeddingVector {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        EmbeddingVector::new(values.into_iter().map(|v| v / norm).collect()).unwrap()
    }

    fn random_pool(n: usize, dim: usize, seed: u64) -> EmbeddedPool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..n)
            .map(|i| PoolEntry {
                candidate_id: CandidateId::new(format!("c-{i:04}")),
                gender: if rng.gen_bool(0.5) { Gender::Male } else { Gender::Female },
                vector: unit((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()),
            })
            .collect();
        EmbeddedPool::new(entries).unwrap()
    }

    /// Brute-force oracle: full stable sort by (-score, id), first k.
    fn full_sort_oracle(query: &EmbeddingVector, pool: &EmbeddedPool, k: usize) -> Vec<CandidateId> {
        let mut all: Vec<(CandidateId, f64)> = pool
            .entries()
            .iter()
            .map(|e| {
                (
                    e.candidate_id.clone(),
                    cosine_similarity(query, &e.vector).unwrap(),
                )
            })
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.into_iter().take(k).map(|(id, _)| id).collect()
    }

    #[test]
    fn pool_of_exactly_k_returns_all_sorted() {
        let pool = random_pool(20, 8, 1);
        let query = unit(vec![1.0; 8]);
        let list = retrieve_top_k(&query, &pool, 20, ExperimentId::E0).unwrap();
        assert_eq!(list.len(), 20);
        for pair in list.entries.windows(2) {
            assert!(pair[0].score >= pair[1].score);
        }
        assert_eq!(
            list.entries.iter().map(|e| e.rank).collect::<Vec<_>>(),
            (1..=20).collect::<Vec<_>>()
        );
    }

    #[test]
    fn identical_vectors_tie_break_by_id() {
        let v = unit(vec![0.5, 0.5, 0.1, 0.0]);
        let entries = vec![
            PoolEntry {
                candidate_id: CandidateId::new("zz"),
                gender: Gender::Male,
                vector: v.clone(),
            },
            PoolEntry {
                candidate_id: CandidateId::new("aa"),
                gender: Gender::Female,
                vector: v.clone(),
            },
        ];
        let pool = EmbeddedPool::new(entries).unwrap();
        let list = retrieve_top_k(&v, &pool, 2, ExperimentId::E0).unwrap();
        assert_eq!(list.entries[0].candidate_id.as_str(), "aa");
        assert_eq!(list.entries[1].candidate_id.as_str(), "zz");
    }

    #[test]
    fn matches_full_sort_oracle_on_random_pools() {
        for seed in 0..50 {
            let pool = random_pool(200, 16, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead);
            let query = unit((0..16).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let list = retrieve_top_k(&query, &pool, 20, ExperimentId::E0).unwrap();
            let oracle = full_sort_oracle(&query, &pool, 20);
            let got: Vec<CandidateId> = list.candidate_ids().cloned().collect();
            assert_eq!(got, oracle, "seed {seed}");
        }
    }

    #[test]
    fn pool_smaller_than_k_errors() {
        let pool = random_pool(5, 4, 2);
        let query = unit(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            retrieve_top_k(&query, &pool, 6, ExperimentId::E0),
            Err(Error::PoolTooSmall { pool: 5, k: 6 })
        ));
    }

    #[test]
    fn balanced_returns_exact_gender_split() {
        for seed in 0..20 {
            let pool = random_pool(100, 8, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let query = unit((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let list = retrieve_balanced(&query, &pool, 20, ExperimentId::E2).unwrap();
            let males = list
                .candidate_ids()
                .filter(|id| {
                    pool.entries()
                        .iter()
                        .find(|e| &&e.candidate_id == id)
                        .unwrap()
                        .gender
                        == Gender::Male
                })
                .count();
            assert_eq!(males, 10, "seed {seed}");
            assert_eq!(list.len(), 20);
        }
    }

    #[test]
    fn balanced_per_gender_sublists_match_per_gender_oracle() {
        for seed in 0..20 {
            let pool = random_pool(200, 12, seed + 100);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let query = unit((0..12).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let list = retrieve_balanced(&query, &pool, 20, ExperimentId::E2).unwrap();
            for gender in [Gender::Male, Gender::Female] {
                let sub: Vec<CandidateId> = list
                    .candidate_ids()
                    .filter(|id| {
                        pool.entries()
                            .iter()
                            .find(|e| &&e.candidate_id == id)
                            .unwrap()
                            .gender
                            == gender
                    })
                    .cloned()
                    .collect();
                // Per-gender brute-force top-10.
                let gender_pool = EmbeddedPool::new(
                    pool.entries()
                        .iter()
                        .filter(|e| e.gender == gender)
                        .cloned()
                        .collect(),
                )
                .unwrap();
                let oracle = full_sort_oracle(&query, &gender_pool, 10);
                let mut sub_sorted = sub.clone();
                sub_sorted.sort();
                let mut oracle_sorted = oracle.clone();
                oracle_sorted.sort();
                assert_eq!(sub_sorted, oracle_sorted, "seed {seed} gender {gender}");
            }
        }
    }

    #[test]
    fn balanced_rejects_odd_k_and_thin_pools() {
        let pool = random_pool(30, 4, 3);
        let query = unit(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            retrieve_balanced(&query, &pool, 7, ExperimentId::E2),
            Err(Error::OddK(7))
        ));
        let all_male = EmbeddedPool::new(
            (0..20)
                .map(|i| PoolEntry {
                    candidate_id: CandidateId::new(format!("m{i}")),
                    gender: Gender::Male,
                    vector: unit(vec![1.0, i as f64 + 1.0]),
                })
                .collect(),
        )
        .unwrap();
        let q2 = unit(vec![1.0, 0.5]);
        assert!(matches!(
            retrieve_balanced(&q2, &all_male, 20, ExperimentId::E2),
            Err(Error::InsufficientGenderPool { .. })
        ));
    }

    #[test]
    fn shuffling_pool_order_does_not_change_output() {
        use rand::seq::SliceRandom;
        let pool = random_pool(80, 8, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let query = unit((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let baseline = retrieve_top_k(&query, &pool, 10, ExperimentId::E0).unwrap();
        let mut shuffled_entries = pool.entries().to_vec();
        shuffled_entries.shuffle(&mut rng);
        let shuffled = EmbeddedPool::new(shuffled_entries).unwrap();
        let list = retrieve_top_k(&query, &shuffled, 10, ExperimentId::E0).unwrap();
        assert_eq!(baseline.entries, list.entries);
    }
}
