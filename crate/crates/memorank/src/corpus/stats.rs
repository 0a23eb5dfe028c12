//! Per-profession gender distribution, the hiring-likelihood parameter for
//! memory curation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CandidateRecord, Gender};
use crate::error::{Error, Result};

/// Empirical gender frequencies for one profession.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenderShare {
    pub p_male: f64,
    pub p_female: f64,
    pub count: usize,
}

/// Gender distribution per profession over a candidate pool.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProfessionStats {
    per_profession: BTreeMap<String, GenderShare>,
}

impl ProfessionStats {
    pub fn get(&self, profession: &str) -> Option<&GenderShare> {
        self.per_profession.get(profession)
    }

    pub fn p_male(&self, profession: &str) -> Result<f64> {
        self.get(profession)
            .map(|s| s.p_male)
            .ok_or_else(|| Error::UnknownProfession(profession.to_string()))
    }

    pub fn professions(&self) -> impl Iterator<Item = &str> {
        self.per_profession.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GenderShare)> {
        self.per_profession.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.per_profession.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_profession.is_empty()
    }

    /// Total candidate count across professions.
    pub fn total(&self) -> usize {
        self.per_profession.values().map(|s| s.count).sum()
    }
}

/// Exact empirical gender frequencies per profession.
pub fn profession_gender_distribution(pool: &[CandidateRecord]) -> Result<ProfessionStats> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for record in pool {
        let entry = counts.entry(record.profession.clone()).or_insert((0, 0));
        match record.gender {
            Gender::Male => entry.0 += 1,
            Gender::Female => entry.1 += 1,
        }
    }
    let per_profession = counts
        .into_iter()
        .map(|(profession, (males, females))| {
            let count = males + females;
            let share = GenderShare {
                p_male: males as f64 / count as f64,
                p_female: females as f64 / count as f64,
                count,
            };
            (profession, share)
        })
        .collect();
    Ok(ProfessionStats { per_profession })
}
